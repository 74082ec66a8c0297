"""Effective two-level Hamiltonians of a single charge qubit.

The first-order Hamiltonian is the projection of the charge Hamiltonian onto
charges {0, 1}.  The corrected Hamiltonian adds second-order level shifts to
its two eigenstates, leaving the eigenstates themselves untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .charge import ChargeBasis, QubitParams, split_h0_hc

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class CorrectionMode(str, Enum):
    PAPER_LITERAL = "paper-literal"
    GENERIC = "generic-second-order"


@dataclass(frozen=True)
class TwoLevelHamiltonian:
    """``-1/2 (b_x sx + b_y sy + b_z sz) + offset * I`` with its eigenbasis.

    ``dressed0``/``dressed1`` are the lower/upper eigenvectors expressed in
    the charge-0/charge-1 basis.
    """

    b_x: float
    b_y: float
    b_z: float
    offset: float
    dressed0: np.ndarray
    dressed1: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return (
            -0.5 * (self.b_x * SIGMA_X + self.b_y * SIGMA_Y + self.b_z * SIGMA_Z)
            + self.offset * np.eye(2)
        )

    @property
    def field_norm(self) -> float:
        return float(np.sqrt(self.b_x**2 + self.b_y**2 + self.b_z**2))

    @property
    def eigenvalues(self) -> np.ndarray:
        r = 0.5 * self.field_norm
        return np.array([self.offset - r, self.offset + r])


@dataclass(frozen=True)
class CorrectionPair:
    """Second-order shifts of the lower (``delta_e0``) and upper (``delta_e1``) level.

    In generic mode ``contributions`` maps each excluded charge state to its
    ``(shift_0, shift_1)`` share.
    """

    delta_e0: float
    delta_e1: float
    mode: CorrectionMode
    contributions: dict = field(default_factory=dict)


def _dressed_states(b_x, b_y, b_z):
    """Lower/upper eigenvectors of ``-1/2 b.sigma``, first nonzero entry real-positive."""
    h = -0.5 * (b_x * SIGMA_X + b_y * SIGMA_Y + b_z * SIGMA_Z)
    if np.allclose(h, 0.0, atol=0.0):
        return np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)
    _, v = np.linalg.eigh(h)
    out = []
    for k in range(2):
        vec = v[:, k].astype(complex)
        lead = vec[np.argmax(np.abs(vec) > 1e-14)]
        out.append(vec * (lead.conj() / abs(lead)))
    return out[0], out[1]


def effective_first_order(params: QubitParams, printed_by: bool = False) -> TwoLevelHamiltonian:
    """Projection of the charge Hamiltonian onto charges {0, 1}.

    Parameters
    ----------
    params : QubitParams
    printed_by : bool
        Use the printed ``b_y = -E_J`` instead of the projected ``b_y = 0``.
        For compatibility only; the result no longer matches the projection.
    """
    e_j = params.e_j
    b_x = e_j
    b_y = -e_j if printed_by else 0.0
    b_z = params.e_ch * (1.0 - 2.0 * params.n_x)
    offset = 0.5 * params.e_ch * (params.n_x**2 + (1.0 - params.n_x) ** 2)
    d0, d1 = _dressed_states(b_x, b_y, b_z)
    return TwoLevelHamiltonian(b_x, b_y, b_z, offset, d0, d1)


def corrections(params: QubitParams, basis: ChargeBasis, mode=CorrectionMode.GENERIC) -> CorrectionPair:
    """Second-order level shifts of the two first-order eigenstates.

    ``paper-literal`` evaluates ``E_J^2 / (16 E_ch n_x)`` and
    ``E_J^2 / (4 E_ch (3 - 2 n_x))`` as printed.  ``generic-second-order``
    sums ``|<m|Hc|phi_i>|^2 / (E_i - E_m)`` over all charge states ``m``
    outside the computational pair.
    """
    mode = CorrectionMode(mode)
    e_j, e_ch, n_x = params.e_j, params.e_ch, params.n_x
    if mode is CorrectionMode.PAPER_LITERAL:
        if n_x == 0.0 or n_x == 1.5:
            raise ZeroDivisionError(f"paper-literal corrections are singular at n_x={n_x}")
        return CorrectionPair(
            delta_e0=e_j**2 / (16.0 * e_ch * n_x),
            delta_e1=e_j**2 / (4.0 * e_ch * (3.0 - 2.0 * n_x)),
            mode=mode,
        )

    he = effective_first_order(params)
    _, hc = split_h0_hc(params, basis)
    hc = hc.entries
    i0, i1 = basis.comp_indices
    levels = he.eigenvalues
    contributions = {}
    shifts = np.zeros(2)
    for k, phi in enumerate((he.dressed0, he.dressed1)):
        coupled = hc[:, i0] * phi[0] + hc[:, i1] * phi[1]
        for idx, n in enumerate(basis.charges):
            if idx in (i0, i1) or coupled[idx] == 0:
                continue
            e_m = e_ch * (n - n_x) ** 2
            c = abs(coupled[idx]) ** 2 / (levels[k] - e_m)
            contributions.setdefault(int(n), [0.0, 0.0])[k] = c
            shifts[k] += c
    return CorrectionPair(
        delta_e0=float(shifts[0]),
        delta_e1=float(shifts[1]),
        mode=mode,
        contributions={n: tuple(v) for n, v in contributions.items()},
    )


def effective_corrected(params: QubitParams, basis: ChargeBasis, mode=CorrectionMode.GENERIC) -> TwoLevelHamiltonian:
    """``H_e + dE0 |phi0><phi0| + dE1 |phi1><phi1|`` in field/offset form."""
    he = effective_first_order(params)
    corr = corrections(params, basis, mode)
    norm = he.field_norm
    offset = he.offset + 0.5 * (corr.delta_e0 + corr.delta_e1)
    if norm == 0.0:
        # degenerate only when E_J = 0 and n_x = 1/2, where both shifts vanish
        return TwoLevelHamiltonian(he.b_x, he.b_y, he.b_z, offset, he.dressed0, he.dressed1)
    scale = 1.0 - (corr.delta_e0 - corr.delta_e1) / norm
    return TwoLevelHamiltonian(
        he.b_x * scale, he.b_y * scale, he.b_z * scale, offset, he.dressed0, he.dressed1
    )
