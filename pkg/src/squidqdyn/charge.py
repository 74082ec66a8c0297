"""Single-junction device parameters and truncated charge-basis Hamiltonians."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
REGIME_LIMIT = 0.2


@dataclass(frozen=True)
class QubitParams:
    """Physical knobs of one symmetric SQUID box.

    Energies are in an arbitrary but consistent unit; only ratios matter.

    Attributes
    ----------
    e_ch : float
        Charging energy (> 0).
    e_j0 : float
        Josephson energy of a single junction (>= 0).
    flux_ratio : float
        Threading flux in units of the flux quantum.
    n_x : float
        Dimensionless gate charge.
    """

    e_ch: float
    e_j0: float
    flux_ratio: float = 0.0
    n_x: float = 0.5

    def __post_init__(self):
        if not (math.isfinite(self.e_ch) and self.e_ch > 0):
            raise ValueError(f"e_ch must be positive and finite, got {self.e_ch}")
        if not (math.isfinite(self.e_j0) and self.e_j0 >= 0):
            raise ValueError(f"e_j0 must be non-negative and finite, got {self.e_j0}")
        if not math.isfinite(self.flux_ratio):
            raise ValueError("flux_ratio must be finite")
        if not math.isfinite(self.n_x):
            raise ValueError("n_x must be finite")

    @classmethod
    def from_ratio(cls, ej_over_ech, n_x=0.5, e_ch=1.0):
        """Params at zero flux whose effective E_J equals ``ej_over_ech * e_ch``."""
        return cls(e_ch=e_ch, e_j0=0.5 * ej_over_ech * e_ch, flux_ratio=0.0, n_x=n_x)

    @property
    def e_j(self) -> float:
        return josephson_energy(self)

    @property
    def outside_charging_regime(self) -> bool:
        """True when |E_J(flux)| / E_ch exceeds 0.2; results are still computed."""
        return abs(self.e_j) / self.e_ch > REGIME_LIMIT


@dataclass(frozen=True)
class ChargeBasis:
    """Integer Cooper-pair-number window ``[n_min, n_max]``.

    The computational states are charges 0 and 1; both need at least two
    neighbours on each side, hence ``n_min <= -2`` and ``n_max >= 3``.
    """

    n_min: int = -8
    n_max: int = 9

    def __post_init__(self):
        if int(self.n_min) != self.n_min or int(self.n_max) != self.n_max:
            raise ValueError("window bounds must be integers")
        if self.n_min > -2 or self.n_max < 3:
            raise ValueError(
                f"window [{self.n_min}, {self.n_max}] must contain [-2, 3]"
            )

    @classmethod
    def symmetric(cls, half_width: int) -> "ChargeBasis":
        """Window ``[-half_width, half_width + 1]``, centred on the 0/1 pair."""
        return cls(-int(half_width), int(half_width) + 1)

    @property
    def dim(self) -> int:
        return self.n_max - self.n_min + 1

    @property
    def charges(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    @property
    def comp0(self) -> int:
        return -self.n_min

    @property
    def comp1(self) -> int:
        return 1 - self.n_min

    @property
    def comp_indices(self) -> tuple[int, int]:
        return (self.comp0, self.comp1)

    def index(self, n: int) -> int:
        if not self.n_min <= n <= self.n_max:
            raise IndexError(f"charge {n} outside window [{self.n_min}, {self.n_max}]")
        return n - self.n_min


class HermitianOperator:
    """Dense Hermitian matrix, read-only after construction."""

    __slots__ = ("_entries",)

    def __init__(self, entries, tol: float = HERMITIAN_TOL):
        a = np.array(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
        if dev > tol:
            raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3e})")
        a.setflags(write=False)
        self._entries = a

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._entries
        return self._entries.astype(dtype)

    def __add__(self, other):
        return HermitianOperator(self._entries + np.asarray(other))

    def __sub__(self, other):
        return HermitianOperator(self._entries - np.asarray(other))

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim})"


def josephson_energy(params: QubitParams) -> float:
    """Flux-tuned Josephson energy ``2 E_J0 cos(pi flux_ratio)``; may be negative."""
    return 2.0 * params.e_j0 * math.cos(math.pi * params.flux_ratio)


def charge_operator(basis: ChargeBasis, n_x: float = 0.0) -> np.ndarray:
    """Diagonal matrix of ``n - n_x`` over the window."""
    return np.diag((basis.charges - n_x).astype(complex))


def ladder(basis: ChargeBasis) -> np.ndarray:
    """``sum_n |n><n+1|`` restricted to the window."""
    return np.eye(basis.dim, k=1, dtype=complex)


def sin_phase(basis: ChargeBasis) -> np.ndarray:
    """Matrix of sin(theta): ``(|n><n+1| - |n+1><n|) / 2i``; Hermitian."""
    t = ladder(basis)
    return (t - t.T) / 2j


def _check_dim(basis: ChargeBasis):
    if basis.dim < 6:
        raise ValueError(f"charge window too small (dim {basis.dim} < 6)")


def build_single_hamiltonian(params: QubitParams, basis: ChargeBasis) -> HermitianOperator:
    """Charge-basis Hamiltonian ``E_ch (n - n_x)^2 - E_J/2 (|n><n+1| + h.c.)``."""
    _check_dim(basis)
    n = basis.charges
    h = np.diag(params.e_ch * (n - params.n_x) ** 2).astype(complex)
    t = ladder(basis)
    h += -0.5 * params.e_j * (t + t.T)
    return HermitianOperator(h)


def split_h0_hc(params: QubitParams, basis: ChargeBasis) -> tuple[HermitianOperator, HermitianOperator]:
    """Split the Hamiltonian into the solvable part and the perturbation.

    ``H0`` keeps every diagonal entry and the single 0<->1 coupling; ``Hc``
    holds every other nearest-neighbour coupling, so ``H0 + Hc == H``
    entrywise.
    """
    h = np.array(build_single_hamiltonian(params, basis).entries)
    i0, i1 = basis.comp_indices
    h0 = np.diag(np.diag(h))
    h0[i0, i1] = h[i0, i1]
    h0[i1, i0] = h[i1, i0]
    hc = h - h0
    return HermitianOperator(h0), HermitianOperator(hc)
