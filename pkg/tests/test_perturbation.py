from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from squidqdyn.charge import ChargeBasis, QubitParams, build_single_hamiltonian
from squidqdyn.dynamics import fit_loglog_slope
from squidqdyn.perturbation import (
    CorrectionMode,
    corrections,
    effective_corrected,
    effective_first_order,
)

SWEEP = [0.01, 0.02, 0.04, 0.08]
BASIS = ChargeBasis()


def exact_low(params, basis=BASIS):
    return np.linalg.eigvalsh(build_single_hamiltonian(params, basis).entries)[:2]


def test_first_order_fields():
    p = QubitParams(1.0, 0.03, 0.0, 0.4)
    he = effective_first_order(p)
    assert (he.b_x, he.b_y) == (pytest.approx(0.06), 0.0)
    assert he.b_z == pytest.approx(0.2)
    assert he.offset == pytest.approx(0.5 * (0.16 + 0.36))
    assert effective_first_order(QubitParams(1.0, 0.03)).b_z == 0.0


def test_first_order_is_the_projection():
    p = QubitParams(1.4, 0.05, 0.2, 0.31)
    b = ChargeBasis()
    h = build_single_hamiltonian(p, b).entries
    block = h[np.ix_(b.comp_indices, b.comp_indices)]
    np.testing.assert_allclose(effective_first_order(p).matrix, block, atol=1e-15)


def test_printed_by_behind_flag():
    p = QubitParams.from_ratio(0.02)
    assert effective_first_order(p, printed_by=True).b_y == pytest.approx(-0.02)


def test_nulled_flux_gives_diagonal():
    he = effective_first_order(QubitParams(1.0, 0.3, 0.5, 0.2))
    m = he.matrix
    assert abs(m[0, 1]) < 1e-16 and he.b_x == pytest.approx(0.0, abs=1e-16)


@settings(max_examples=40, deadline=None)
@given(r=st.floats(-0.1, 0.1), n_x=st.floats(-1, 2))
def test_dressed_states_orthonormal(r, n_x):
    p = QubitParams(1.0, abs(r) / 2, 0.0 if r >= 0 else 1.0, n_x)
    he = effective_first_order(p)
    v = np.stack([he.dressed0, he.dressed1], axis=1)
    assert np.max(np.abs(v.conj().T @ v - np.eye(2))) <= 1e-12
    np.testing.assert_allclose(he.matrix @ v, v * he.eigenvalues, atol=1e-12)


def test_first_order_splitting_near_exact():
    p = QubitParams(1.0, 0.01, 0.0, 0.5)
    he = effective_first_order(p)
    assert np.diff(he.eigenvalues)[0] == pytest.approx(0.02)
    assert np.max(np.abs(he.eigenvalues - exact_low(p))) < 0.02**2


@pytest.mark.parametrize("mode", list(CorrectionMode))
def test_no_coupling_no_correction(mode):
    c = corrections(QubitParams(1.0, 0.0, 0.0, 0.4), BASIS, mode)
    assert (c.delta_e0, c.delta_e1) == (0.0, 0.0)
    p = QubitParams(1.0, 0.0, 0.0, 0.4)
    assert np.array_equal(effective_corrected(p, BASIS, mode).matrix, effective_first_order(p).matrix)


@pytest.mark.parametrize("e_j", [0.01, 0.03, 0.2])
def test_literal_mode_at_half(e_j):
    c = corrections(QubitParams.from_ratio(e_j), BASIS, "paper-literal")
    assert c.delta_e0 == pytest.approx(e_j**2 / 8, rel=1e-14)
    assert c.delta_e1 == pytest.approx(e_j**2 / 8, rel=1e-14)


def test_literal_mode_off_degeneracy():
    p = QubitParams(2.0, 0.05, 0.0, 0.3)
    c = corrections(p, BASIS, CorrectionMode.PAPER_LITERAL)
    assert c.delta_e0 == pytest.approx(0.1**2 / (16 * 2.0 * 0.3))
    assert c.delta_e1 == pytest.approx(0.1**2 / (4 * 2.0 * (3 - 0.6)))


@pytest.mark.parametrize("n_x", [0.0, 1.5])
def test_literal_mode_singular(n_x):
    with pytest.raises(ZeroDivisionError):
        corrections(QubitParams(1.0, 0.01, 0.0, n_x), BASIS, CorrectionMode.PAPER_LITERAL)


@pytest.mark.parametrize("r", [0.01, 0.04, 0.1])
@pytest.mark.parametrize("n_x", [0.2, 0.4, 0.5, 0.7])
def test_generic_matches_closed_form(r, n_x):
    p = QubitParams.from_ratio(r, n_x=n_x)
    c = corrections(p, BASIS)
    ref = oracles.generic_shifts(1.0, r, n_x)
    np.testing.assert_allclose([c.delta_e0, c.delta_e1], ref, rtol=1e-12, atol=1e-18)
    assert set(c.contributions) == {-1, 2}
    total = np.sum([v for v in c.contributions.values()], axis=0)
    np.testing.assert_allclose(total, [c.delta_e0, c.delta_e1], atol=1e-12)


def test_generic_magnitude_at_half():
    c = corrections(QubitParams(1.0, 0.01, 0.0, 0.5), BASIS)
    for d in (c.delta_e0, c.delta_e1):
        assert abs(abs(d) / (0.02**2 / 8) - 1) < 0.10
    # shifts from higher charge states push the pair down
    assert c.delta_e0 < 0 and c.delta_e1 < 0


@settings(max_examples=25, deadline=None)
@given(r=st.floats(0.001, 0.1), n_x=st.floats(0.1, 0.9))
def test_corrections_even_in_coupling(r, n_x):
    plus = corrections(QubitParams(1.0, r / 2, 0.0, n_x), BASIS)
    minus = corrections(QubitParams(1.0, r / 2, 1.0, n_x), BASIS)
    assert minus.delta_e0 == pytest.approx(plus.delta_e0, rel=1e-9, abs=1e-18)
    assert minus.delta_e1 == pytest.approx(plus.delta_e1, rel=1e-9, abs=1e-18)


@pytest.mark.parametrize("r", [0.01, 0.02, 0.03, 0.05])
def test_modes_agree_at_half(r):
    p = QubitParams.from_ratio(r)
    g = corrections(p, BASIS)
    lit = corrections(p, BASIS, CorrectionMode.PAPER_LITERAL)
    for a, b in ((g.delta_e0, lit.delta_e0), (g.delta_e1, lit.delta_e1)):
        assert abs(abs(a) - abs(b)) <= 0.15 * abs(b)


@pytest.mark.parametrize("r", [0.0, 0.01, 0.3])
def test_corrected_equals_first_order_up_to_constant_at_half(r):
    p = QubitParams.from_ratio(r)
    diff = effective_corrected(p, BASIS, CorrectionMode.PAPER_LITERAL).matrix - effective_first_order(p).matrix
    traceless = diff - np.trace(diff) / 2 * np.eye(2)
    assert np.max(np.abs(traceless)) <= 1e-12


def test_corrected_keeps_dressed_states_and_adds_shifts():
    p = QubitParams(1.0, 0.02, 0.0, 0.4)
    he, hp = effective_first_order(p), effective_corrected(p, BASIS)
    c = corrections(p, BASIS)
    np.testing.assert_array_equal(hp.dressed0, he.dressed0)
    np.testing.assert_allclose(hp.eigenvalues, he.eigenvalues + [c.delta_e0, c.delta_e1], atol=1e-15)
    expected = he.matrix + c.delta_e0 * np.outer(he.dressed0, he.dressed0.conj()) + c.delta_e1 * np.outer(
        he.dressed1, he.dressed1.conj()
    )
    np.testing.assert_allclose(hp.matrix, expected, atol=1e-15)


def test_corrected_eigenvalues_near_degeneracy():
    p = QubitParams.from_ratio(0.02, n_x=0.45)
    res = np.max(np.abs(effective_corrected(p, BASIS).eigenvalues - exact_low(p)))
    assert res <= 1e-7


@pytest.mark.parametrize("n_x", [0.3, 0.4, 0.5])
def test_residual_scaling(n_x):
    first, second = [], []
    for r in SWEEP:
        p = QubitParams.from_ratio(r, n_x=n_x)
        ex = exact_low(p)
        first.append(np.max(np.abs(effective_first_order(p).eigenvalues - ex)))
        second.append(np.max(np.abs(effective_corrected(p, BASIS).eigenvalues - ex)))
    assert abs(fit_loglog_slope(SWEEP, first) - 2) <= 0.5
    assert abs(fit_loglog_slope(SWEEP, second) - 4) <= 0.5
