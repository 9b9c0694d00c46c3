"""Physical parameters, time-dependent couplings, Hamiltonian/Lindblad
actions and the amplitude scaling transformation.

All rates are stored as ratios to the decay rate gamma; runs use gamma=1
internally so times are in units of 1/gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidParameterError, NoSectionError
from .fock import FockVector, apply_annihilation, apply_creation

CHI_MOD_KINDS = ("constant", "sinusoidal")
F_MOD_KINDS = ("constant", "complex_exponential", "sinusoidal")


@dataclass(frozen=True)
class ModelParams:
    """Driven dissipative anharmonic oscillator parameters.

    delta is the detuning, chi0/chi1 the Kerr strength and its modulation
    depth (modulated at Omega), f0/f1 the drive and its modulation depth
    (modulated at small_delta), n_th the bath occupancy.
    """

    gamma: float = 1.0
    delta: float = 0.0
    chi0: float = 0.0
    chi1: float = 0.0
    Omega: float = 0.0
    f0: complex = 0.0 + 0.0j
    f1: complex = 0.0 + 0.0j
    small_delta: float = 0.0
    n_th: float = 0.0
    chi_mod_kind: str = "constant"
    f_mod_kind: str = "constant"

    def __post_init__(self):
        if not (self.gamma > 0.0 and math.isfinite(self.gamma)):
            raise InvalidParameterError("gamma must be positive and finite")
        for name in ("delta", "chi0", "chi1", "Omega", "small_delta", "n_th"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")
        for name in ("f0", "f1"):
            if not (math.isfinite(complex(getattr(self, name)).real)
                    and math.isfinite(complex(getattr(self, name)).imag)):
                raise InvalidParameterError(f"{name} must be finite")
        if self.n_th < 0.0:
            raise InvalidParameterError("n_th must be >= 0")
        if self.chi_mod_kind not in CHI_MOD_KINDS:
            raise InvalidParameterError(f"unknown chi_mod_kind {self.chi_mod_kind!r}")
        if self.f_mod_kind not in F_MOD_KINDS:
            raise InvalidParameterError(f"unknown f_mod_kind {self.f_mod_kind!r}")
        if self.chi_mod_kind == "sinusoidal" and not self.Omega > 0.0:
            raise InvalidParameterError("sinusoidal chi modulation requires Omega > 0")
        if self.f_mod_kind != "constant" and not self.small_delta > 0.0:
            raise InvalidParameterError("f modulation requires small_delta > 0")

    def modulation_period(self) -> float:
        """Stroboscopic period: 2pi/small_delta for a modulated drive,
        2pi/Omega for modulated nonlinearity."""
        if self.f_mod_kind != "constant":
            return 2.0 * math.pi / self.small_delta
        if self.chi_mod_kind == "sinusoidal":
            return 2.0 * math.pi / self.Omega
        raise NoSectionError("no time modulation: stroboscopic period undefined")

    def chi_max(self) -> float:
        return abs(self.chi0) + abs(self.chi1)

    def f_max(self) -> float:
        return abs(self.f0) + abs(self.f1)


def chi_at(p: ModelParams, t: float) -> float:
    """chi(t) = chi0 (+ chi1 sin(Omega t) when modulated)."""
    if p.chi_mod_kind == "sinusoidal":
        return p.chi0 + p.chi1 * math.sin(p.Omega * t)
    return p.chi0


def f_at(p: ModelParams, t: float) -> complex:
    """Drive amplitude f(t).

    The periodic complex-exponential form f0 + f1 exp(+i delta t) is the
    default modulation; it is the form that keeps the stroboscopic map at
    constant phase and reproduces the chaotic/regular boundary at
    f1/gamma = 4.9/4.8 for the reference parameter set.
    """
    if p.f_mod_kind == "complex_exponential":
        return p.f0 + p.f1 * complex(math.cos(p.small_delta * t), math.sin(p.small_delta * t))
    if p.f_mod_kind == "sinusoidal":
        return p.f0 + p.f1 * math.sin(p.small_delta * t)
    return complex(p.f0)


def hamiltonian_apply(p: ModelParams, t: float, psi: FockVector) -> FockVector:
    """(H/hbar)|psi> = Delta n|psi> + chi(t) n^2|psi> + f(t) a^dag|psi> + f*(t) a|psi>."""
    n = np.arange(psi.dim)
    f = f_at(p, t)
    out = (p.delta * n + chi_at(p, t) * n * n) * psi.amps
    out += f * apply_creation(psi).amps
    out += np.conj(f) * apply_annihilation(psi).amps
    return FockVector(out)


def lindblad_apply(p: ModelParams, which: int, psi: FockVector) -> FockVector:
    """L_1 = sqrt((N+1) gamma) a, L_2 = sqrt(N gamma) a^dag."""
    if which == 1:
        return FockVector(math.sqrt((p.n_th + 1.0) * p.gamma) * apply_annihilation(psi).amps)
    if which == 2:
        return FockVector(math.sqrt(p.n_th * p.gamma) * apply_creation(psi).amps)
    raise InvalidParameterError("Lindblad channel must be 1 or 2")


def scale_params(p: ModelParams, lam: float) -> ModelParams:
    """Amplitude scaling alpha -> lam*alpha:
    Delta' = Delta + chi0 (1 - 1/lam^2), chi' = chi/lam^2, f' = lam f,
    gamma unchanged. chi1 scales like chi0; the detuning shift uses chi0 only.
    """
    if not (lam > 0.0 and math.isfinite(lam)):
        raise InvalidParameterError("scale factor must be positive and finite")
    s = 1.0 - 1.0 / (lam * lam)
    return replace(
        p,
        delta=p.delta + p.chi0 * s,
        chi0=p.chi0 / (lam * lam),
        chi1=p.chi1 / (lam * lam),
        f0=lam * complex(p.f0),
        f1=lam * complex(p.f1),
    )
