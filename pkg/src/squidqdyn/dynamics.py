"""Exact versus effective dynamics inside the computational subspace.

Two distance conventions are available in :func:`error_curve`:

``"subspace"`` (default)
    Leakage is omitted.  The exact evolution is restricted to the exact
    eigenstates adiabatically connected to the computational block (the
    ``k`` eigenvectors with the largest block weight).  Their block
    components are orthonormalized by polar decomposition, which maps that
    manifold unitarily onto the block.  The result is compared with the
    effective evolution.
``"projected"``
    ``rho(t) = Pi exp(-iHt) |psi><psi| exp(iHt) Pi`` without renormalization,
    so the trace deficit (leakage) enters the distance.

Leakage ``1 - tr rho(t)`` is always reported from the projected evolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charge import HermitianOperator
from .numerics import SpectralDecomposition, eigh, evolve_states

METRICS = ("subspace", "projected")


@dataclass(frozen=True)
class ProbeSet:
    """Initial states supported on the computational block.

    Deterministic probes are the basis states plus the uniform
    superpositions ``sum_k |k>`` and ``sum_k i^k |k>``; ``n_random``
    Haar-random states are drawn from ``seed``.
    """

    states: np.ndarray
    seed: int
    n_random: int

    @classmethod
    def build(cls, dim: int, n_random: int = 16, seed: int = 42) -> "ProbeSet":
        det = [np.eye(dim, dtype=complex)[k] for k in range(dim)]
        det.append(np.ones(dim, dtype=complex) / np.sqrt(dim))
        det.append(1j ** np.arange(dim) / np.sqrt(dim))
        rng = np.random.default_rng(seed)
        rand = []
        for _ in range(n_random):
            z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
            rand.append(z / np.linalg.norm(z))
        states = np.array(det + rand).T
        states.setflags(write=False)
        return cls(states, int(seed), int(n_random))

    @property
    def dim(self) -> int:
        return self.states.shape[0]

    def __len__(self):
        return self.states.shape[1]

    def subset(self, n: int) -> "ProbeSet":
        s = np.array(self.states[:, :n])
        s.setflags(write=False)
        return ProbeSet(s, self.seed, max(0, n - (len(self) - self.n_random)))


@dataclass(frozen=True)
class EvolutionReport:
    """Per-time worst-case distance and leakage over a probe set."""

    t_grid: np.ndarray
    distance: np.ndarray
    leakage: np.ndarray
    slope: float | None = None

    @property
    def max_distance(self) -> float:
        return float(np.max(self.distance))

    @property
    def max_leakage(self) -> float:
        return float(np.max(self.leakage))

    @property
    def t_at_max(self) -> float:
        return float(self.t_grid[int(np.argmax(self.distance))])


def project_computational(x, indices):
    """Restrict a state vector or square matrix to the ``indices`` block."""
    a = np.asarray(x)
    idx = np.asarray(indices)
    if idx.size and (idx.max() >= a.shape[0] or idx.min() < 0):
        raise IndexError(f"indices {list(idx)} do not fit dimension {a.shape[0]}")
    if a.ndim == 1:
        return a[idx]
    if a.ndim == 2 and a.shape[0] == a.shape[1]:
        return a[np.ix_(idx, idx)]
    raise ValueError(f"expected a vector or square matrix, got shape {a.shape}")


def trace_distance(rho_a, rho_b) -> float:
    """``1/2 * sum |eig(rho_a - rho_b)|``."""
    diff = np.asarray(rho_a) - np.asarray(rho_b)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))


def _batched_trace_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Trace distance between ``|a><a|`` and ``|b><b|`` for stacked vectors ``(..., d)``."""
    rho = a[..., :, None] * a[..., None, :].conj()
    sig = b[..., :, None] * b[..., None, :].conj()
    return 0.5 * np.sum(np.abs(np.linalg.eigvalsh(rho - sig)), axis=-1)


def low_manifold(spec: SpectralDecomposition, indices) -> np.ndarray:
    """Positions of the ``len(indices)`` eigenvectors with the largest block weight."""
    weight = np.sum(np.abs(spec.eigenvectors[np.asarray(indices)]) ** 2, axis=0)
    k = len(indices)
    return np.sort(np.argsort(weight, kind="stable")[-k:])


def subspace_generator(spec: SpectralDecomposition, indices, exact_h=None) -> np.ndarray:
    """Hermitian block generator of the exact evolution with leakage removed.

    When ``exact_h`` is given, the low-manifold energies are refined by a
    Rayleigh-Ritz step against it.  Dense eigensolvers carry absolute errors
    of order ``eps * ||H||``, which long evolution times would amplify; the
    Ritz values of the nearly block-supported vectors do not.
    """
    low = low_manifold(spec, indices)
    v = spec.eigenvectors[:, low]
    energies = spec.eigenvalues[low]
    if exact_h is not None:
        h = np.asarray(exact_h.entries if isinstance(exact_h, HermitianOperator) else exact_h)
        ritz = v.conj().T @ (h @ v)
        energies, rot = np.linalg.eigh(0.5 * (ritz + ritz.conj().T))
        v = v @ rot
    w = v[np.asarray(indices)]
    u, _, vh = np.linalg.svd(w)
    polar = u @ vh
    return (polar * energies) @ polar.conj().T


def _matrix_of(effective) -> np.ndarray:
    if hasattr(effective, "matrix"):
        return np.asarray(effective.matrix, dtype=complex)
    return np.asarray(effective, dtype=complex)


def error_curve(exact_h, effective, indices, t_grid, probes: ProbeSet, metric: str = "subspace",
                exact_spec: SpectralDecomposition | None = None) -> EvolutionReport:
    """Worst-case distance between exact and effective block dynamics.

    Parameters
    ----------
    exact_h : HermitianOperator or ndarray
        Full truncated Hamiltonian.
    effective : TwoLevelHamiltonian, FourLevelEffective or ndarray
        Block Hamiltonian matching ``len(indices)``.
    indices : sequence of int
        Positions of the computational states in the full space.
    t_grid : array_like
    probes : ProbeSet
    metric : {"subspace", "projected"}
    exact_spec : SpectralDecomposition, optional
        Precomputed eigensystem of ``exact_h``.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0:
        raise ValueError("t_grid is empty")
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}")
    indices = np.asarray(indices)
    k = indices.size
    heff = _matrix_of(effective)
    if heff.shape != (k, k) or probes.dim != k:
        raise ValueError(f"effective Hamiltonian {heff.shape} / probes {probes.dim} do not match block size {k}")
    spec = exact_spec if exact_spec is not None else eigh(exact_h)
    dim = spec.dim

    full = np.zeros((dim, len(probes)), dtype=complex)
    full[indices] = probes.states
    projected = evolve_states(spec, full, t_grid, rows=indices)
    leakage = np.clip(1.0 - np.sum(np.abs(projected) ** 2, axis=1), 0.0, 1.0)

    effective_states = evolve_states(eigh(heff), probes.states, t_grid)
    if metric == "subspace":
        exact_states = evolve_states(eigh(subspace_generator(spec, indices, exact_h)), probes.states, t_grid)
    else:
        exact_states = projected
    dist = _batched_trace_distance(
        np.swapaxes(exact_states, 1, 2), np.swapaxes(effective_states, 1, 2)
    )
    return EvolutionReport(
        t_grid=t_grid,
        distance=np.clip(dist.max(axis=1), 0.0, 1.0),
        leakage=leakage.max(axis=1),
    )


def fit_loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 3:
        raise ValueError("need at least three (x, y) pairs")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs strictly positive data")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])
