"""Scenario runners shared by the CLI and the acceptance suite."""

from __future__ import annotations

import math
import numpy as np

from .charge import ChargeBasis, QubitParams, build_single_hamiltonian
from .coupled import (
    CapacitiveCoupling,
    InductiveCoupling,
    build_capacitive_hamiltonian,
    build_inductive_hamiltonian,
    capacitive_cnot,
    cnot_fidelity_scan,
    conditional_deviation,
    he_corrected,
    ho_block,
    inductive_error_curve,
    product_indices,
)
from .dynamics import EvolutionReport, ProbeSet, error_curve
from .numerics import eigh
from .perturbation import CorrectionMode, effective_corrected, effective_first_order

# effective-Hamiltonian choices, keyed by their CLI names
EFFECTIVE_MODES = ("first-order", "corrected-generic", "corrected-paper")

DEFAULT_PERIODS = 10.0
DEFAULT_STEPS = 2001
DEFAULT_RANDOM_PROBES = 16
DEFAULT_SEED = 42
DEFAULT_HALF_WIDTH = 8


def rabi_period(*params: QubitParams) -> float:
    """``2 pi`` over the largest first-order qubit splitting; ``2 pi / E_J`` at ``n_x = 1/2``."""
    split = max(effective_first_order(p).field_norm for p in params)
    if split == 0.0:
        raise ValueError("all qubits are degenerate; no Rabi period")
    return 2.0 * math.pi / split


def time_grid(period: float, periods: float = DEFAULT_PERIODS, steps: int = DEFAULT_STEPS) -> np.ndarray:
    if steps < 2:
        raise ValueError("need at least two time steps")
    return np.linspace(0.0, periods * period, int(steps))


def _mode(effective: str) -> CorrectionMode | None:
    if effective not in EFFECTIVE_MODES:
        raise ValueError(f"effective must be one of {EFFECTIVE_MODES}, got {effective!r}")
    return {
        "first-order": None,
        "corrected-generic": CorrectionMode.GENERIC,
        "corrected-paper": CorrectionMode.PAPER_LITERAL,
    }[effective]


def single_qubit_error(
    ej_over_ech: float,
    n_x: float,
    effective: str = "corrected-generic",
    e_ch: float = 1.0,
    half_width: int = DEFAULT_HALF_WIDTH,
    periods: float = DEFAULT_PERIODS,
    steps: int = DEFAULT_STEPS,
    n_random: int = DEFAULT_RANDOM_PROBES,
    seed: int = DEFAULT_SEED,
    metric: str = "subspace",
) -> EvolutionReport:
    """Exact vs effective single-qubit dynamics over ``periods`` Rabi periods."""
    params = QubitParams.from_ratio(ej_over_ech, n_x=n_x, e_ch=e_ch)
    basis = ChargeBasis.symmetric(half_width)
    mode = _mode(effective)
    eff = effective_first_order(params) if mode is None else effective_corrected(params, basis, mode)
    h = build_single_hamiltonian(params, basis)
    t = time_grid(rabi_period(params), periods, steps)
    probes = ProbeSet.build(2, n_random, seed)
    return error_curve(h, eff, basis.comp_indices, t, probes, metric=metric)


def inductive_pair(ej_over_ech: float, el_over_ej: float = 1.0, e_ch: float = 1.0,
                   half_width: int = DEFAULT_HALF_WIDTH, ej2_over_ej1: float = 1.0):
    """Sweet-spot qubit pair with ``E_L = el_over_ej * E_J1``."""
    p1 = QubitParams.from_ratio(ej_over_ech, n_x=0.5, e_ch=e_ch)
    p2 = QubitParams.from_ratio(ej_over_ech * ej2_over_ej1, n_x=0.5, e_ch=e_ch)
    c = InductiveCoupling(el_over_ej * ej_over_ech * e_ch)
    b = ChargeBasis.symmetric(half_width)
    return p1, p2, c, b, b


def inductive_error(
    ej_over_ech: float,
    effective: str = "corrected-generic",
    el_over_ej: float = 1.0,
    e_ch: float = 1.0,
    half_width: int = DEFAULT_HALF_WIDTH,
    periods: float = DEFAULT_PERIODS,
    steps: int = DEFAULT_STEPS,
    n_random: int = DEFAULT_RANDOM_PROBES,
    seed: int = DEFAULT_SEED,
    metric: str = "subspace",
    ej2_over_ej1: float = 1.0,
) -> EvolutionReport:
    """Exact vs effective inductively coupled dynamics over ``periods`` Rabi periods."""
    p1, p2, c, b1, b2 = inductive_pair(ej_over_ech, el_over_ej, e_ch, half_width, ej2_over_ej1)
    h = build_inductive_hamiltonian(p1, p2, c, b1, b2)
    mode = _mode(effective)
    if mode is None:
        eff, _ = ho_block(p1, p2, c, b1, b2, exact_h=h)
    else:
        eff, _ = he_corrected(p1, p2, c, b1, b2, mode, exact_h=h)
    t = time_grid(rabi_period(p1, p2), periods, steps)
    probes = ProbeSet.build(4, n_random, seed)
    return inductive_error_curve(h, eff, product_indices(b1, b2), t, probes, metric=metric)


def capacitive_settings(delta: float = 1.0, e_ch: float = 1.0, e_j0: float = 0.01,
                        half_width: int = DEFAULT_HALF_WIDTH):
    """Both fluxes at half a flux quantum, ``n_x1 = 0`` and ``n_x2 = 1/2``."""
    p1 = QubitParams(e_ch=e_ch, e_j0=e_j0, flux_ratio=0.5, n_x=0.0)
    p2 = QubitParams(e_ch=e_ch, e_j0=e_j0, flux_ratio=0.5, n_x=0.5)
    b = ChargeBasis.symmetric(half_width)
    return p1, p2, CapacitiveCoupling(delta), b, b


def capacitive_gate(delta: float = 1.0, e_ch: float = 1.0, half_width: int = DEFAULT_HALF_WIDTH):
    """Returns ``(gate, (dev_identity, dev_phase))``."""
    gate = capacitive_cnot(*capacitive_settings(delta, e_ch, half_width=half_width))
    return gate, conditional_deviation(gate)


def capacitive_fidelity(delta: float = 1.0, e_ch: float = 1.0, steps: int = 201,
                        half_width: int = DEFAULT_HALF_WIDTH, target=None):
    """Fidelity scan on ``[0.5, 1.5] * pi / delta``; the grid contains ``pi / delta``."""
    from .coupled import CONDITIONAL_PHASE

    p1, p2, c, b1, b2 = capacitive_settings(delta, e_ch, half_width=half_width)
    h = build_capacitive_hamiltonian(p1, p2, c, b1, b2)
    t0 = math.pi / delta
    steps = int(steps) | 1  # odd, so the midpoint is t0
    grid = np.linspace(0.5 * t0, 1.5 * t0, steps)
    scan = cnot_fidelity_scan(h, product_indices(b1, b2), grid,
                              CONDITIONAL_PHASE if target is None else target)
    return scan, grid


def inductive_fidelity(ej_over_ech: float = 0.02, el_over_ej: float = 1.0, e_ch: float = 1.0,
                       periods: float = 2.0, steps: int = 401, half_width: int = DEFAULT_HALF_WIDTH,
                       target=None):
    """CNOT fidelity scan of the exact inductive evolution.

    The grid runs from a quarter period to ``periods`` Rabi periods, skipping
    the trivial overlap of the identity with CNOT at ``t = 0``.
    """
    from .coupled import CNOT

    p1, p2, c, b1, b2 = inductive_pair(ej_over_ech, el_over_ej, e_ch, half_width)
    h = build_inductive_hamiltonian(p1, p2, c, b1, b2)
    spec = eigh(h)
    period = rabi_period(p1, p2)
    grid = np.linspace(0.25 * period, periods * period, int(steps))
    scan = cnot_fidelity_scan(h, product_indices(b1, b2), grid,
                              CNOT if target is None else target, exact_spec=spec)
    return scan, grid, (h, spec, product_indices(b1, b2))
