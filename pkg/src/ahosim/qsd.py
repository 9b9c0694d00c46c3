"""Quantum-state-diffusion trajectory integrator.

A single trajectory evolves a stochastic pure state under the
drive/Kerr/damping dynamics with two complex Wiener channels (decay and,
for a thermal bath, excitation). The stepper is exponential
Euler-Maruyama: the diagonal part (detuning, Kerr phase, L^dag L damping)
is propagated exactly each step, the drive coupling, expectation feedback
and noise by an Ito-Euler increment, followed by renormalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import (DivergenceError, InvalidParameterError, NoSectionError,
                     StepSizeError, TruncationError)
from .fock import FockVector
from .model import ModelParams
from .sections import PoincareSection


@dataclass(frozen=True)
class NoiseStream:
    """Key of a reproducible noise sequence: identical (master_seed,
    trajectory_index) always reproduce identical increments, independent of
    scheduling or worker count."""

    master_seed: int
    trajectory_index: int = 0

    def __post_init__(self):
        if self.trajectory_index < 0:
            raise InvalidParameterError("trajectory_index must be >= 0")

    def generator(self) -> np.random.Generator:
        """Fresh counter-based generator positioned at the sequence start."""
        key = (self.master_seed & 0xFFFFFFFFFFFFFFFF, self.trajectory_index)
        return np.random.Generator(np.random.Philox(key=key))


def sample_noise(stream: NoiseStream, dt: float, count: int = 1):
    """First `count` increments d xi_1 of the stream's decay channel:
    d xi = sqrt(dt/2) (g1 + i g2) with independent standard normals.

    Each step consumes four normals (two complex channels), matching the
    trajectory integrator's consumption order.
    """
    if not dt > 0.0:
        raise InvalidParameterError("dt must be positive")
    g = stream.generator().standard_normal((count, 4))
    dxi = math.sqrt(0.5 * dt) * (g[:, 0] + 1j * g[:, 1])
    return complex(dxi[0]) if count == 1 else dxi


@dataclass(frozen=True)
class TrajectoryConfig:
    dt: float
    t_final: float
    dim: int
    sample_every: int = 100
    poincare_t0: float = 0.0
    poincare_skip: int = 0
    renorm: bool = True
    leak_threshold: float = 1e-4

    def __post_init__(self):
        if not self.dt > 0.0:
            raise InvalidParameterError("dt must be positive")
        if not self.t_final > 0.0:
            raise InvalidParameterError("t_final must be positive")
        if self.dim < 2:
            raise InvalidParameterError("dim must be >= 2")
        if self.sample_every < 1:
            raise InvalidParameterError("sample_every must be >= 1")
        if self.poincare_skip < 0:
            raise InvalidParameterError("poincare_skip must be >= 0")


@dataclass
class TrajectoryRecord:
    times: np.ndarray
    mean_n: np.ndarray
    mean_a: np.ndarray
    mean_n2: np.ndarray
    mandel_q: np.ndarray
    norm_defect: np.ndarray
    poincare: PoincareSection | None
    final_state: FockVector
    leakage: float
    snapshots: list = field(default_factory=list)  # (time, amplitude array)


def stability_guard(cfg: TrajectoryConfig, p: ModelParams) -> float:
    """Step-size guard for the Euler-treated couplings. The diagonal part
    is propagated exactly, so only the drive ladder coupling and the
    expectation feedback bound the step."""
    return cfg.dt * (p.f_max() * math.sqrt(cfg.dim)
                     + p.gamma * (p.n_th + 1.0) * cfg.dim)


def _check_guard(cfg, p):
    g = stability_guard(cfg, p)
    if g > 0.1:
        raise StepSizeError(
            f"dt too large: stability guard {g:.3g} > 0.1 "
            f"(dt={cfg.dt:g}, dim={cfg.dim})")


def _kernel_args(p: ModelParams):
    ck = K.CHI_KIND_CODES[p.chi_mod_kind]
    fk = K.F_KIND_CODES[p.f_mod_kind]
    g1sq = (p.n_th + 1.0) * p.gamma
    g2sq = p.n_th * p.gamma
    return (p.delta, p.chi0, p.chi1, p.Omega, ck,
            complex(p.f0), complex(p.f1), p.small_delta, fk, g1sq, g2sq)


def qsd_step(psi: FockVector, t: float, cfg: TrajectoryConfig, p: ModelParams,
             dxi1: complex, dxi2: complex = 0.0) -> FockVector:
    """Single trajectory step with externally supplied noise increments."""
    _check_guard(cfg, p)
    amp = math.sqrt(0.5 * cfg.dt)
    noise = np.array([[dxi1.real / amp, dxi1.imag / amp,
                       complex(dxi2).real / amp, complex(dxi2).imag / amp]])
    out = psi.amps.copy()
    defect = K.qsd_advance(out, t, cfg.dt, 1, *_kernel_args(p), noise, cfg.renorm)
    if math.isnan(defect):
        raise DivergenceError(f"state diverged in step at t={t:g}")
    return FockVector(out)


def _step_index(t: float, dt: float, what: str) -> int:
    k = int(round(t / dt))
    if abs(k * dt - t) > 1e-9 * max(1.0, abs(t)) + 1e-12:
        raise StepSizeError(f"{what}={t:g} is not an integer multiple of dt={dt:g}")
    return k


def run_trajectory(cfg: TrajectoryConfig, p: ModelParams, psi0: FockVector,
                   stream: NoiseStream, snapshot_times=()) -> TrajectoryRecord:
    """Integrate one stochastic trajectory over [0, t_final].

    Observables are sampled every sample_every steps (plus t=0), Poincare
    points are recorded at exact stroboscopic step indices (dt must divide
    the modulation period), and the state is copied at snapshot_times.
    """
    if psi0.dim != cfg.dim:
        raise InvalidParameterError(f"psi0 dim {psi0.dim} != cfg.dim {cfg.dim}")
    if abs(psi0.norm() - 1.0) > 1e-9:
        raise InvalidParameterError("psi0 must be normalized")
    _check_guard(cfg, p)

    nsteps = _step_index(cfg.t_final, cfg.dt, "t_final")

    # stroboscopic schedule
    strobe = {}
    period = None
    try:
        period = p.modulation_period()
    except NoSectionError:
        period = None
    if period is not None:
        spp = period / cfg.dt
        spp_i = int(round(spp))
        if abs(spp_i - spp) > 1e-9 * spp:
            raise StepSizeError(
                f"dt={cfg.dt:g} must divide the modulation period {period:g}")
        i0 = _step_index(cfg.poincare_t0, cfg.dt, "poincare_t0")
        n = cfg.poincare_skip
        i = i0 + n * spp_i
        while i <= nsteps:
            strobe[i] = n
            n += 1
            i += spp_i

    snap = {}
    for ts in snapshot_times:
        snap[_step_index(ts, cfg.dt, "snapshot time")] = ts

    sample_idx = set(range(0, nsteps + 1, cfg.sample_every))
    sample_idx.add(nsteps)
    boundaries = sorted(sample_idx | set(strobe) | set(snap))

    psi = psi0.amps.copy()
    rng = stream.generator()
    args = _kernel_args(p)

    times, mn, ma, mn2, mq, nd = [], [], [], [], [], []
    pts = []
    snapshots = []
    leakage = 0.0
    cur = 0
    defect = 0.0
    for b in boundaries:
        if b > cur:
            noise = rng.standard_normal((b - cur, 4))
            defect = K.qsd_advance(psi, cur * cfg.dt, cfg.dt, b - cur,
                                   *args, noise, cfg.renorm)
            if math.isnan(defect):
                raise DivergenceError(
                    f"trajectory diverged near t={b * cfg.dt:g} "
                    f"(seed={stream.master_seed}, index={stream.trajectory_index})")
            cur = b
        t = b * cfg.dt
        mean_n, mean_a, mean_n2, leak = K.state_moments(psi)
        if leak > leakage:
            leakage = leak
        if leak > cfg.leak_threshold:
            raise TruncationError(
                f"truncation leakage {leak:.3g} > {cfg.leak_threshold:g} at t={t:g} "
                f"(dim={cfg.dim})")
        if b in sample_idx:
            times.append(t)
            mn.append(mean_n)
            ma.append(mean_a)
            mn2.append(mean_n2)
            mq.append((mean_n2 - mean_n**2 - mean_n) / mean_n if mean_n > 1e-12 else 0.0)
            nd.append(defect)
        if b in strobe:
            pts.append((mean_a.real, mean_a.imag))
        if b in snap:
            snapshots.append((snap[b], psi.copy()))

    section = None
    if period is not None:
        section = PoincareSection(np.array(pts, dtype=float).reshape(-1, 2),
                                  t0=cfg.poincare_t0, period=period,
                                  skipped=cfg.poincare_skip, provenance="quantum")
    return TrajectoryRecord(
        times=np.array(times), mean_n=np.array(mn), mean_a=np.array(ma),
        mean_n2=np.array(mn2), mandel_q=np.array(mq), norm_defect=np.array(nd),
        poincare=section, final_state=FockVector(psi), leakage=leakage,
        snapshots=snapshots)


def quantum_poincare(rec: TrajectoryRecord) -> PoincareSection:
    """Stroboscopic (Re<a>, Im<a>) section recorded on the trajectory."""
    if rec.poincare is None:
        raise NoSectionError("trajectory was run without periodic modulation")
    return rec.poincare
