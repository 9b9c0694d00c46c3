"""Truncated Fock-space states, ladder-operator actions and basic observables.

All operators here are band or diagonal in the number basis, so every
action costs O(dim) and no dim x dim matrix is ever materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidStateError, TruncationError


@dataclass
class Observables:
    """Single-state moments of the oscillatory mode."""

    mean_n: float
    mean_a: complex
    mean_n2: float
    mandel_q: float


class FockVector:
    """Complex amplitude vector over the truncated number basis."""

    __slots__ = ("amps",)

    def __init__(self, amps):
        amps = np.ascontiguousarray(amps, dtype=np.complex128)
        if amps.ndim != 1 or amps.size < 2:
            raise InvalidStateError("state needs a 1-d amplitude vector with dim >= 2")
        self.amps = amps

    @property
    def dim(self) -> int:
        return self.amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalize(self) -> "FockVector":
        nrm = self.norm()
        if nrm == 0.0:
            raise InvalidStateError("cannot normalize the zero vector")
        return FockVector(self.amps / nrm)

    def copy(self) -> "FockVector":
        return FockVector(self.amps.copy())

    @classmethod
    def basis(cls, n: int, dim: int) -> "FockVector":
        """Number state |n> in a dim-level truncation."""
        if not 0 <= n < dim:
            raise InvalidStateError(f"basis index {n} outside truncation {dim}")
        amps = np.zeros(dim, dtype=np.complex128)
        amps[n] = 1.0
        return cls(amps)

    @classmethod
    def vacuum(cls, dim: int) -> "FockVector":
        return cls.basis(0, dim)


def apply_annihilation(psi: FockVector) -> FockVector:
    """a|psi>: out_n = sqrt(n+1) psi_{n+1}, top component set to zero."""
    dim = psi.dim
    out = np.zeros(dim, dtype=np.complex128)
    out[: dim - 1] = np.sqrt(np.arange(1.0, dim)) * psi.amps[1:]
    return FockVector(out)


def apply_creation(psi: FockVector) -> FockVector:
    """a^dag|psi>: out_n = sqrt(n) psi_{n-1}; the amplitude promoted past
    the top level is discarded (truncation convention)."""
    dim = psi.dim
    out = np.zeros(dim, dtype=np.complex128)
    out[1:] = np.sqrt(np.arange(1.0, dim)) * psi.amps[: dim - 1]
    return FockVector(out)


def apply_number(psi: FockVector) -> FockVector:
    return FockVector(np.arange(psi.dim) * psi.amps)


def apply_number_squared(psi: FockVector) -> FockVector:
    return FockVector(np.arange(psi.dim) ** 2 * psi.amps)


def coherent_state(alpha: complex, dim: int) -> FockVector:
    """Coherent state truncated to dim levels and renormalized.

    Requires |alpha|^2 + 5|alpha| + 10 <= dim so the Poisson tail beyond
    the truncation is negligible.
    """
    aa = abs(alpha)
    if aa * aa + 5.0 * aa + 10.0 > dim:
        raise TruncationError(
            f"dim={dim} too small for coherent amplitude |alpha|={aa:.3g}"
        )
    amps = np.empty(dim, dtype=np.complex128)
    amps[0] = math.exp(-0.5 * aa * aa)
    for n in range(1, dim):
        amps[n] = amps[n - 1] * alpha / math.sqrt(n)
    return FockVector(amps).normalize()


def top_decile_population(psi: FockVector) -> float:
    """Population in the top 10% of levels; truncation-adequacy diagnostic."""
    start = min(psi.dim - 1, int(math.floor(0.9 * psi.dim)))
    return float(np.sum(np.abs(psi.amps[start:]) ** 2))


def expectation_ladder(psi: FockVector, norm_tol: float = 1e-6) -> Observables:
    """<n>, <a>, <n^2> and Mandel Q of a normalized state."""
    nrm = psi.norm()
    if abs(nrm - 1.0) > norm_tol:
        raise InvalidStateError(f"state not normalized (|norm-1|={abs(nrm-1.0):.3g})")
    n = np.arange(psi.dim)
    pop = np.abs(psi.amps) ** 2
    mean_n = float(n @ pop)
    mean_n2 = float((n * n) @ pop)
    mean_a = complex(np.vdot(psi.amps, apply_annihilation(psi).amps))
    if mean_n > 1e-12:
        mandel_q = (mean_n2 - mean_n**2 - mean_n) / mean_n
    else:
        mandel_q = 0.0
    return Observables(mean_n=mean_n, mean_a=mean_a, mean_n2=mean_n2, mandel_q=mandel_q)


class DensityMatrix:
    """Hermitian, unit-trace matrix rho_nm in the truncated Fock basis."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        entries = np.ascontiguousarray(entries, dtype=np.complex128)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 2:
            raise InvalidStateError("density matrix must be square with dim >= 2")
        self.entries = entries

    @classmethod
    def zeros(cls, dim: int) -> "DensityMatrix":
        return cls(np.zeros((dim, dim), dtype=np.complex128))

    @classmethod
    def from_pure(cls, psi: FockVector) -> "DensityMatrix":
        return cls(np.outer(psi.amps, psi.amps.conj()))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.entries + self.entries.conj().T))[0])

    def normalized(self) -> "DensityMatrix":
        tr = self.trace().real
        if tr <= 0.0:
            raise InvalidStateError("non-positive trace")
        return DensityMatrix(self.entries / tr)

    def observables(self) -> Observables:
        n = np.arange(self.dim)
        diag = np.real(np.diag(self.entries))
        mean_n = float(n @ diag)
        mean_n2 = float((n * n) @ diag)
        # Tr(rho a) = sum_n sqrt(n+1) rho_{n+1,n}
        sq = np.sqrt(np.arange(1.0, self.dim))
        mean_a = complex(np.sum(sq * np.diag(self.entries, -1)))
        if mean_n > 1e-12:
            mandel_q = (mean_n2 - mean_n**2 - mean_n) / mean_n
        else:
            mandel_q = 0.0
        return Observables(mean_n=mean_n, mean_a=mean_a, mean_n2=mean_n2, mandel_q=mandel_q)

    def copy(self) -> "DensityMatrix":
        return DensityMatrix(self.entries.copy())


def accumulate_outer(rho: DensityMatrix, psi: FockVector, weight: float) -> DensityMatrix:
    """rho <- rho + weight |psi><psi| (in place; Hermitian by construction)."""
    if rho.dim != psi.dim:
        raise InvalidStateError(f"dimension mismatch: rho {rho.dim} vs psi {psi.dim}")
    if weight <= 0.0:
        raise InvalidStateError("weight must be positive")
    rho.entries += weight * np.outer(psi.amps, psi.amps.conj())
    return rho
