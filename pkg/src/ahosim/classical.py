"""Semiclassical amplitude dynamics, Poincare sections and the largest
Lyapunov exponent (two-trajectory Benettin renormalization)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import DivergenceError, InvalidParameterError, StepSizeError
from .model import ModelParams, chi_at, f_at
from .sections import PoincareSection


def classical_rhs(alpha: complex, t: float, p: ModelParams) -> complex:
    """d alpha/dt = -(gamma/2) alpha - i (Delta + chi(t)(1 + 2|alpha|^2)) alpha - i f(t)."""
    return (-(0.5 * p.gamma) * alpha
            - 1j * (p.delta + chi_at(p, t) * (1.0 + 2.0 * abs(alpha) ** 2)) * alpha
            - 1j * f_at(p, t))


def _kind_codes(p: ModelParams):
    return K.CHI_KIND_CODES[p.chi_mod_kind], K.F_KIND_CODES[p.f_mod_kind]


def _kernel_args(p: ModelParams):
    ck, fk = _kind_codes(p)
    return (p.gamma, p.delta, p.chi0, p.chi1, p.Omega, ck,
            complex(p.f0), complex(p.f1), p.small_delta, fk)


def integrate_classical(alpha0: complex, p: ModelParams, dt: float, t_final: float,
                        sample_every: int = 1, t0: float = 0.0):
    """Fixed-step RK4 integration; returns (times, alphas) sampled every
    sample_every steps (the sample at the end of each stride)."""
    if not dt > 0.0:
        raise InvalidParameterError("dt must be positive")
    nsteps = int(round(t_final / dt))
    if abs(nsteps * dt - t_final) > 1e-9 * max(1.0, t_final):
        raise StepSizeError("dt must divide t_final")
    nsamples = nsteps // sample_every
    out = np.empty(nsamples, dtype=np.complex128)
    final = K.classical_advance(complex(alpha0), t0, dt, nsteps, sample_every, out,
                                *_kernel_args(p))
    if not (math.isfinite(final.real) and math.isfinite(final.imag)):
        raise DivergenceError("classical amplitude exceeded 1e6 (blow-up)")
    times = t0 + dt * sample_every * np.arange(1, nsamples + 1)
    return times, out


def classical_poincare(p: ModelParams, t0: float = 0.0, n_points: int = 1000,
                       skip: int = 200, alpha0: complex = 0.0,
                       steps_per_period: int = 400) -> PoincareSection:
    """Strobe the flow at t_n = t0 + period*n, discarding the first `skip`
    sections. The stroboscopic period is set by the active modulation."""
    period = p.modulation_period()
    dt = period / steps_per_period
    total = skip + n_points
    out = np.empty(total, dtype=np.complex128)
    final = K.classical_advance(complex(alpha0), t0, dt, total * steps_per_period,
                                steps_per_period, out, *_kernel_args(p))
    if not (math.isfinite(final.real) and math.isfinite(final.imag)):
        raise DivergenceError("classical amplitude exceeded 1e6 (blow-up)")
    pts = np.column_stack([out[skip:].real, out[skip:].imag])
    return PoincareSection(pts, t0=t0, period=period, skipped=skip,
                           provenance="classical")


@dataclass
class LyapunovReport:
    estimate: float
    horizon_periods: int
    renorm_interval: float
    transient_periods: int
    separation_seed: float


def lyapunov_largest(p: ModelParams, alpha0: complex = 0.0,
                     horizon_periods: int = 2000, skip: int = 200,
                     steps_per_period: int = 400, d0: float = 1e-8) -> LyapunovReport:
    """Largest Lyapunov exponent via Benettin renormalization once per
    modulation period. Positive classifies chaos, non-positive regular."""
    period = p.modulation_period()
    dt = period / steps_per_period
    args = _kernel_args(p)
    out = np.empty(0, dtype=np.complex128)
    a = K.classical_advance(complex(alpha0), 0.0, dt, skip * steps_per_period, 0, out, *args)
    if not (math.isfinite(a.real) and math.isfinite(a.imag)):
        raise DivergenceError("classical amplitude exceeded 1e6 during transient")
    acc = K.benettin_lyapunov(a, skip * period, dt, steps_per_period,
                              horizon_periods, d0, *args)
    if not math.isfinite(acc):
        raise DivergenceError("Lyapunov companion trajectory degenerated")
    return LyapunovReport(estimate=acc / (horizon_periods * period),
                          horizon_periods=horizon_periods,
                          renorm_interval=period,
                          transient_periods=skip,
                          separation_seed=d0)
