"""Dense Hermitian eigendecomposition and spectral-form time evolution."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charge import HERMITIAN_TOL, HermitianOperator

_PHASE_TOL = 1e-10


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _as_matrix(h) -> np.ndarray:
    if isinstance(h, HermitianOperator):
        return h.entries
    return np.asarray(h, dtype=complex)


def eigh(h) -> SpectralDecomposition:
    """Diagonalize a Hermitian matrix.

    Each eigenvector is rephased so its first component of magnitude above
    1e-10 is real and positive, which makes the output reproducible for
    identical input.
    """
    a = _as_matrix(h)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if dev > HERMITIAN_TOL:
        raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    w, v = np.linalg.eigh(a)
    v = np.array(v, dtype=complex)
    lead = np.argmax(np.abs(v) > _PHASE_TOL, axis=0)
    ph = v[lead, np.arange(v.shape[1])]
    v *= (ph.conj() / np.abs(ph))[None, :]
    w.setflags(write=False)
    v.setflags(write=False)
    return SpectralDecomposition(w, v)


def evolve_unitary(spec: SpectralDecomposition, t: float) -> np.ndarray:
    """``exp(-i H t) = V diag(exp(-i E t)) V^dagger`` (hbar = 1)."""
    v = spec.eigenvectors
    return (v * np.exp(-1j * spec.eigenvalues * t)) @ v.conj().T


def evolve_states(spec: SpectralDecomposition, states, times, rows=None, chunk: int = 128) -> np.ndarray:
    """Evolve column ``states`` to every time in ``times``.

    Only the components listed in ``rows`` are returned (all by default).
    Output shape is ``(len(times), len(rows), n_states)``.
    """
    v = spec.eigenvectors
    coeff = v.conj().T @ np.asarray(states, dtype=complex)
    vr = v if rows is None else v[np.asarray(rows)]
    times = np.asarray(times, dtype=float)
    out = np.empty((times.size, vr.shape[0], coeff.shape[1]), dtype=complex)
    for start in range(0, times.size, chunk):
        ts = times[start:start + chunk]
        phases = np.exp(-1j * np.outer(ts, spec.eigenvalues))
        out[start:start + chunk] = np.einsum("rj,tjp->trp", vr, phases[:, :, None] * coeff[None])
    return out
