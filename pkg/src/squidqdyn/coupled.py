"""Two coupled charge qubits: capacitive and inductive coupling.

Product states are ordered ``index = i1 * dim2 + i2``; the computational
block is ``|00>, |01>, |10>, |11>`` in that order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .charge import (
    ChargeBasis,
    HermitianOperator,
    QubitParams,
    build_single_hamiltonian,
    charge_operator,
    sin_phase,
)
from .dynamics import EvolutionReport, ProbeSet, error_curve
from .numerics import SpectralDecomposition, eigh, evolve_states
from .perturbation import CorrectionMode

MAX_PRODUCT_DIM = 4096
NULL_TOL = 1e-12

# exp(-i pi/4 sigma_y)
ROTATION = np.array([[1.0, -1.0], [1.0, 1.0]], dtype=complex) / math.sqrt(2.0)
ROTATION_2Q = np.kron(ROTATION, ROTATION)

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
CONDITIONAL_PHASE = np.diag([1, 1, -1j, 1j]).astype(complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


@dataclass(frozen=True)
class CapacitiveCoupling:
    delta: float

    def __post_init__(self):
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise ValueError(f"delta must be positive, got {self.delta}")


@dataclass(frozen=True)
class InductiveCoupling:
    e_l: float

    def __post_init__(self):
        if not (math.isfinite(self.e_l) and self.e_l > 0):
            raise ValueError(f"e_l must be positive, got {self.e_l}")


@dataclass(frozen=True)
class FourLevelEffective:
    """4x4 block Hamiltonian with its eigensystem.

    ``eigenstates`` columns are ordered (psi00, psi01, psi10, psi11) with
    ``eigenvalues`` in the same order.  The mixing angles and the
    chi/eta combinations describe the uncorrected coupled-pair Hamiltonian;
    ``chi_pm = sin(theta1/2) +- cos(theta1/2)`` and
    ``eta_pm = sin(theta2/2) +- cos(theta2/2)``.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenstates: np.ndarray
    theta1: float
    theta2: float
    chi_plus: float
    chi_minus: float
    eta_plus: float
    eta_minus: float


@dataclass(frozen=True)
class InductiveCorrections:
    """Second-order corrections to the uncorrected inductive block.

    ``delta_e11``/``delta_e01`` are the closed-form level shifts and
    ``delta_plus``/``delta_minus`` the shifts applied to psi00/psi11.  In
    generic mode ``level_shifts`` holds the shift of every psi state,
    ``coupling`` the full second-order matrix in the psi basis, and
    ``contributions[m, i]`` the share of intermediate state ``m`` in the
    shift of psi ``i``.
    """

    delta_e11: float
    delta_e01: float
    delta_plus: float
    delta_minus: float
    mode: CorrectionMode
    level_shifts: np.ndarray = field(default_factory=lambda: np.zeros(4))
    coupling: np.ndarray | None = None
    contributions: np.ndarray | None = None


@dataclass(frozen=True)
class CapacitiveGate:
    gate_time: float
    control0: np.ndarray
    control1: np.ndarray
    block: np.ndarray
    leakage: float


@dataclass(frozen=True)
class FidelityScan:
    t_star: float
    f_star: float
    curve: np.ndarray


def product_indices(b1: ChargeBasis, b2: ChargeBasis) -> np.ndarray:
    """Full-space positions of |00>, |01>, |10>, |11>."""
    d2 = b2.dim
    return np.array(
        [i * d2 + j for i in b1.comp_indices for j in b2.comp_indices], dtype=int
    )


def _guard(b1, b2):
    if b1.dim * b2.dim > MAX_PRODUCT_DIM:
        raise ValueError(
            f"product dimension {b1.dim * b2.dim} exceeds {MAX_PRODUCT_DIM}"
        )


def _local_terms(p1, p2, b1, b2):
    h1 = build_single_hamiltonian(p1, b1).entries
    h2 = build_single_hamiltonian(p2, b2).entries
    return np.kron(h1, np.eye(b2.dim)) + np.kron(np.eye(b1.dim), h2)


def build_capacitive_hamiltonian(
    p1: QubitParams, p2: QubitParams, c: CapacitiveCoupling, b1: ChargeBasis, b2: ChargeBasis
) -> HermitianOperator:
    """``H1 + H2 + delta (n1 - n_x1)(n2 - n_x2)``."""
    _guard(b1, b2)
    h = _local_terms(p1, p2, b1, b2)
    h = h + c.delta * np.kron(charge_operator(b1, p1.n_x), charge_operator(b2, p2.n_x))
    return HermitianOperator(h)


def build_inductive_hamiltonian(
    p1: QubitParams, p2: QubitParams, c: InductiveCoupling, b1: ChargeBasis, b2: ChargeBasis
) -> HermitianOperator:
    """``H1 + H2 - (E_J1 sin(theta1) + E_J2 sin(theta2))^2 / E_L``."""
    _guard(b1, b2)
    h = _local_terms(p1, p2, b1, b2)
    x = p1.e_j * np.kron(sin_phase(b1), np.eye(b2.dim)) + p2.e_j * np.kron(
        np.eye(b1.dim), sin_phase(b2)
    )
    h = h - (x @ x) / c.e_l
    # x is Hermitian, so x @ x is too up to rounding; symmetrize it away
    return HermitianOperator(0.5 * (h + h.conj().T))


def _phase_aligned_deviation(u: np.ndarray, target: np.ndarray) -> float:
    overlap = np.trace(target.conj().T @ u)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(u - phase * target)))


def capacitive_cnot(
    p1: QubitParams, p2: QubitParams, c: CapacitiveCoupling, b1: ChargeBasis, b2: ChargeBasis
) -> CapacitiveGate:
    """Wait ``pi / delta`` and read off the conditional gates on qubit 2.

    Requires the target's Josephson coupling to be nulled and ``n_x2 = 1/2``;
    outside that regime the gate is not exact and the call is refused.
    """
    if abs(p2.e_j) > NULL_TOL * p2.e_ch:
        raise ValueError(f"target E_J must be nulled (got {p2.e_j:.3e}); set flux_ratio=0.5")
    if abs(p2.n_x - 0.5) > NULL_TOL:
        raise ValueError(f"target gate charge must be 1/2 (got {p2.n_x})")
    gate_time = math.pi / c.delta
    h = build_capacitive_hamiltonian(p1, p2, c, b1, b2)
    spec = eigh(h)
    idx = product_indices(b1, b2)
    block = evolve_states(spec, np.eye(spec.dim)[:, idx], [gate_time], rows=idx)[0]
    leakage = float(1.0 - np.min(np.sum(np.abs(block) ** 2, axis=0)))
    return CapacitiveGate(
        gate_time=gate_time,
        control0=block[:2, :2].copy(),
        control1=block[2:, 2:].copy(),
        block=block,
        leakage=max(leakage, 0.0),
    )


def conditional_deviation(gate: CapacitiveGate) -> tuple[float, float]:
    """Distances of the two conditional gates from ``I`` and ``diag(-i, i)`` up to phase."""
    return (
        _phase_aligned_deviation(gate.control0, np.eye(2, dtype=complex)),
        _phase_aligned_deviation(gate.control1, np.diag([-1j, 1j])),
    )


def cnot_equivalence_deviation(block: np.ndarray) -> float:
    """Distance of ``(I x H) block (I x H)`` from CNOT, allowing a phase per control branch.

    A phase per control branch is a Z rotation on the control qubit, so a
    zero result means the block is CNOT up to single-qubit operations.
    """
    hh = np.kron(np.eye(2), HADAMARD)
    g = hh @ block @ hh
    off = max(np.max(np.abs(g[:2, 2:])), np.max(np.abs(g[2:, :2])))
    return max(
        off,
        _phase_aligned_deviation(g[:2, :2], CNOT[:2, :2]),
        _phase_aligned_deviation(g[2:, 2:], CNOT[2:, 2:]),
    )


def _mixing(diag_value, coupling):
    r = math.hypot(diag_value, coupling)
    theta = math.atan2(coupling, diag_value) if r > 0 else 0.0
    return r, theta


def ho_effective(e_j1: float, e_j2: float, c: InductiveCoupling) -> FourLevelEffective:
    """Rotated coupled-pair matrix and its closed-form eigensystem.

    The matrix is ``U M U^dagger`` with ``U = exp(-i pi/4 sy) x exp(-i pi/4 sy)``
    and, in the rotated frame, ``M = E_J1 sz x 1 + E_J2 1 x sz - g sy x sy``,
    ``g = E_J1 E_J2 / E_L``.  Eigenvalues are ``+-r1`` (psi00, psi11) and
    ``+-r2`` (psi01, psi10) with ``r1 = hypot(E_J1 + E_J2, g)`` and
    ``r2 = hypot(E_J1 - E_J2, g)``.
    """
    g = e_j1 * e_j2 / c.e_l
    a, b = e_j1 + e_j2, e_j1 - e_j2
    m = np.array(
        [[a, 0, 0, g], [0, b, -g, 0], [0, -g, -b, 0], [g, 0, 0, -a]], dtype=complex
    )
    r1, theta1 = _mixing(a, g)
    r2, theta2 = _mixing(b, -g)
    c1, s1 = math.cos(theta1 / 2), math.sin(theta1 / 2)
    c2, s2 = math.cos(theta2 / 2), math.sin(theta2 / 2)
    rotated = np.array(
        [
            [c1, 0, 0, s1],  # psi00
            [0, c2, s2, 0],  # psi01
            [0, s2, -c2, 0],  # psi10
            [s1, 0, 0, -c1],  # psi11
        ],
        dtype=complex,
    ).T
    states = ROTATION_2Q @ rotated
    states /= np.linalg.norm(states, axis=0)
    return FourLevelEffective(
        matrix=ROTATION_2Q @ m @ ROTATION_2Q.conj().T,
        eigenvalues=np.array([r1, r2, -r2, -r1]),
        eigenstates=states,
        theta1=theta1,
        theta2=theta2,
        chi_plus=s1 + c1,
        chi_minus=s1 - c1,
        eta_plus=s2 + c2,
        eta_minus=s2 - c2,
    )


def _require_sweet_spot(p1, p2):
    for p in (p1, p2):
        if abs(p.n_x - 0.5) > NULL_TOL:
            raise ValueError(f"inductive effective Hamiltonians need n_x = 1/2 (got {p.n_x})")


def ho_block(
    p1: QubitParams, p2: QubitParams, c: InductiveCoupling, b1: ChargeBasis, b2: ChargeBasis,
    exact_h: HermitianOperator | None = None,
) -> tuple[FourLevelEffective, float]:
    """Uncorrected inductive block: the projection of the full Hamiltonian.

    The projection equals ``U M U^dagger / 2 + offset`` with ``M`` evaluated
    at ``(-E_J1, -E_J2)``; equivalently :func:`ho_effective` at
    ``(-E_J1/2, -E_J2/2, E_L/2)``.  Returns the effective model (matrix is
    the exact projection) and the offset.
    """
    _require_sweet_spot(p1, p2)
    h = exact_h if exact_h is not None else build_inductive_hamiltonian(p1, p2, c, b1, b2)
    idx = product_indices(b1, b2)
    block = np.array(h.entries[np.ix_(idx, idx)])
    offset = float(np.real(np.trace(block))) / 4.0
    model = ho_effective(-0.5 * p1.e_j, -0.5 * p2.e_j, InductiveCoupling(0.5 * c.e_l))
    return (
        FourLevelEffective(
            matrix=block,
            eigenvalues=model.eigenvalues + offset,
            eigenstates=model.eigenstates,
            theta1=model.theta1,
            theta2=model.theta2,
            chi_plus=model.chi_plus,
            chi_minus=model.chi_minus,
            eta_plus=model.eta_plus,
            eta_minus=model.eta_minus,
        ),
        offset,
    )


def closed_form_level_shifts(e_j1: float, e_j2: float, e_l: float, e_ch: float) -> tuple[float, float]:
    """Closed-form ``(dE11, dE01)`` exactly as printed, including the ``3 E_L`` term."""
    g2 = (e_j1 * e_j2 / e_l) ** 2
    s = e_j1**2 + e_j2**2
    de11 = (s + 0.5 * g2 + (2.0 / 3.0) * (s / e_l) ** 2) / (8.0 * e_ch)
    de01 = (s - 0.5 * g2 + (2.0 / 3.0) * (s / (3.0 * e_l)) ** 2) / (8.0 * e_ch)
    return de11, de01


def _with_matrix(base: FourLevelEffective, matrix: np.ndarray) -> FourLevelEffective:
    spec = eigh(matrix)
    # label numeric eigenvectors by their largest overlap with the psi states
    overlap = np.abs(base.eigenstates.conj().T @ spec.eigenvectors) ** 2
    order = np.argmax(overlap, axis=1)
    if len(set(order.tolist())) != 4:
        order = np.argsort(np.argsort(base.eigenvalues))
    return FourLevelEffective(
        matrix=matrix,
        eigenvalues=np.array(spec.eigenvalues[order]),
        eigenstates=np.array(spec.eigenvectors[:, order]),
        theta1=base.theta1,
        theta2=base.theta2,
        chi_plus=base.chi_plus,
        chi_minus=base.chi_minus,
        eta_plus=base.eta_plus,
        eta_minus=base.eta_minus,
    )


def he_corrected(
    p1: QubitParams, p2: QubitParams, c: InductiveCoupling, b1: ChargeBasis, b2: ChargeBasis,
    mode=CorrectionMode.GENERIC, exact_h: HermitianOperator | None = None,
) -> tuple[FourLevelEffective, InductiveCorrections]:
    """Second-order corrected inductive block.

    ``generic-second-order`` treats the block-off-diagonal part of the full
    Hamiltonian as the perturbation, with the out-of-block eigenstates of the
    full Hamiltonian's out-of-block part as intermediate states, and returns
    the quasi-degenerate second-order block

    ``H_O + sum_ij 1/2 V_im V_mj (1/(E_i - E_m) + 1/(E_j - E_m)) |psi_i><psi_j|``

    whose diagonal reproduces the usual level shifts.  ``paper-literal``
    applies the closed-form shifts to psi00 and psi11 only.
    """
    mode = CorrectionMode(mode)
    h = exact_h if exact_h is not None else build_inductive_hamiltonian(p1, p2, c, b1, b2)
    ho, _ = ho_block(p1, p2, c, b1, b2, exact_h=h)
    psi = ho.eigenstates
    e_ch = 0.5 * (p1.e_ch + p2.e_ch)
    de11, de01 = closed_form_level_shifts(p1.e_j, p2.e_j, c.e_l, e_ch)

    if mode is CorrectionMode.PAPER_LITERAL:
        d_plus = ho.chi_plus * de11 + ho.chi_minus * de01
        d_minus = ho.chi_plus * de11 - ho.chi_minus * de01
        shifts = np.array([d_plus, 0.0, 0.0, d_minus])
        matrix = ho.matrix + (psi * shifts) @ psi.conj().T
        corr = InductiveCorrections(de11, de01, d_plus, d_minus, mode, level_shifts=shifts)
        return _with_matrix(ho, matrix), corr

    idx = product_indices(b1, b2)
    out = np.setdiff1d(np.arange(h.dim), idx)
    e_m, v_m = np.linalg.eigh(h.entries[np.ix_(out, out)])
    a = v_m.conj().T @ h.entries[np.ix_(out, idx)] @ psi  # <m|V|psi_i>
    levels = np.real(np.diag(psi.conj().T @ ho.matrix @ psi))
    inv = 1.0 / (levels[None, :] - e_m[:, None])  # (m, i)
    coupling = 0.5 * (a.conj().T @ (a * inv) + (a * inv).conj().T @ a)
    contributions = np.abs(a) ** 2 * inv
    shifts = np.real(np.diag(coupling))
    matrix = ho.matrix + psi @ coupling @ psi.conj().T
    matrix = 0.5 * (matrix + matrix.conj().T)
    corr = InductiveCorrections(
        de11, de01, float(shifts[0]), float(shifts[3]), mode,
        level_shifts=shifts, coupling=coupling, contributions=contributions,
    )
    return _with_matrix(ho, matrix), corr


def inductive_error_curve(
    exact_h, effective, indices, t_grid, probes: ProbeSet, metric: str = "subspace",
    exact_spec: SpectralDecomposition | None = None,
) -> EvolutionReport:
    """:func:`error_curve` on the 4x4 computational block."""
    return error_curve(exact_h, effective, indices, t_grid, probes, metric=metric, exact_spec=exact_spec)


def block_evolution(spec: SpectralDecomposition, indices, t_grid) -> np.ndarray:
    """``Pi exp(-iHt) Pi`` restricted to the block, shape ``(len(t_grid), k, k)``."""
    idx = np.asarray(indices)
    basis = np.eye(spec.dim, dtype=complex)[:, idx]
    return evolve_states(spec, basis, t_grid, rows=idx)


def _fidelity(blocks: np.ndarray, target: np.ndarray) -> np.ndarray:
    k = target.shape[0]
    return np.abs(np.einsum("ij,tij->t", target.conj(), blocks)) / k


def cnot_fidelity_scan(exact_h, indices, t_grid, target=CNOT,
                       exact_spec: SpectralDecomposition | None = None) -> FidelityScan:
    """Maximize ``|tr(target^dagger Pi exp(-iHt) Pi)| / 4`` over ``t_grid``.

    The grid maximum is refined once by a parabola through it and its two
    neighbours; the refined point is kept only if it scores higher.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0:
        raise ValueError("t_grid is empty")
    spec = exact_spec if exact_spec is not None else eigh(exact_h)
    target = np.asarray(target, dtype=complex)
    curve = _fidelity(block_evolution(spec, indices, t_grid), target)
    i = int(np.argmax(curve))
    t_star, f_star = float(t_grid[i]), float(curve[i])
    if 0 < i < t_grid.size - 1:
        x = t_grid[i - 1:i + 2]
        y = curve[i - 1:i + 2]
        a, b, _ = np.polyfit(x - x[1], y, 2)
        if a < 0:
            t_v = float(x[1] - b / (2 * a))
            if x[0] < t_v < x[2]:
                f_v = float(_fidelity(block_evolution(spec, indices, [t_v]), target)[0])
                if f_v > f_star:
                    t_star, f_star = t_v, f_v
    return FidelityScan(t_star=t_star, f_star=min(f_star, 1.0), curve=curve)
