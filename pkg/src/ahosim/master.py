"""Dense Lindblad master-equation integrator: the ground-truth oracle for
validating the trajectory ensemble at small truncations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, StepSizeError
from .fock import DensityMatrix, Observables
from .model import ModelParams, chi_at, f_at


@dataclass(frozen=True)
class MasterConfig:
    dt: float
    t_final: float
    dim: int
    snapshot_times: tuple = ()
    sample_every: int = 10

    def __post_init__(self):
        if not self.dt > 0.0:
            raise InvalidParameterError("dt must be positive")
        if not self.t_final > 0.0:
            raise InvalidParameterError("t_final must be positive")
        if self.dim < 2:
            raise InvalidParameterError("dim must be >= 2")
        for ts in self.snapshot_times:
            if not 0.0 <= ts <= self.t_final:
                raise InvalidParameterError(f"snapshot time {ts} outside [0, t_final]")


def _shift_ops(dim):
    sq = np.sqrt(np.arange(1.0, dim))
    return sq


def _left_a(rho, sq):
    out = np.zeros_like(rho)
    out[:-1, :] = sq[:, None] * rho[1:, :]
    return out


def _left_adag(rho, sq):
    out = np.zeros_like(rho)
    out[1:, :] = sq[:, None] * rho[:-1, :]
    return out


def _right_a(rho, sq):
    out = np.zeros_like(rho)
    out[:, 1:] = rho[:, :-1] * sq[None, :]
    return out


def _right_adag(rho, sq):
    out = np.zeros_like(rho)
    out[:, :-1] = rho[:, 1:] * sq[None, :]
    return out


def lindblad_rhs(rho: DensityMatrix, t: float, p: ModelParams) -> DensityMatrix:
    """Full right side of the master equation: -i[H, rho] plus the decay
    and thermal-excitation dissipators. The output is Hermitian and
    traceless by construction."""
    r = rho.entries
    dim = rho.dim
    sq = _shift_ops(dim)
    n = np.arange(dim, dtype=float)
    diag = p.delta * n + chi_at(p, t) * n * n
    f = f_at(p, t)

    h_rho = diag[:, None] * r + f * _left_adag(r, sq) + np.conj(f) * _left_a(r, sq)
    rho_h = r * diag[None, :] + f * _right_adag(r, sq) + np.conj(f) * _right_a(r, sq)
    out = -1j * (h_rho - rho_h)

    g1 = (p.n_th + 1.0) * p.gamma  # decay channel L1 = sqrt(g1) a
    a_r_adag = _right_adag(_left_a(r, sq), sq)
    nw = n[:, None] + n[None, :]
    out += g1 * (a_r_adag - 0.5 * nw * r)
    if p.n_th > 0.0:
        g2 = p.n_th * p.gamma  # excitation channel L2 = sqrt(g2) a^dag
        adag_r_a = _right_a(_left_adag(r, sq), sq)
        nw2 = (n[:, None] + 1.0) + (n[None, :] + 1.0)
        out += g2 * (adag_r_a - 0.5 * nw2 * r)
    return DensityMatrix(out)


@dataclass
class MasterResult:
    times: np.ndarray
    mean_n: np.ndarray
    mean_a: np.ndarray
    mean_n2: np.ndarray
    mandel_q: np.ndarray
    trace_defect: float
    snapshots: list = field(default_factory=list)  # (time, DensityMatrix)


def integrate_master(rho0: DensityMatrix, cfg: MasterConfig, p: ModelParams) -> MasterResult:
    """Deterministic RK4 time stepping with per-step trace renormalization
    (the defect before renormalization is tracked and bounded)."""
    if rho0.dim != cfg.dim:
        raise InvalidParameterError(f"rho0 dim {rho0.dim} != cfg.dim {cfg.dim}")
    nsteps = int(round(cfg.t_final / cfg.dt))
    if abs(nsteps * cfg.dt - cfg.t_final) > 1e-9 * max(1.0, cfg.t_final):
        raise StepSizeError("dt must divide t_final")
    snap_steps = {}
    for ts in cfg.snapshot_times:
        k = int(round(ts / cfg.dt))
        snap_steps[k] = ts

    rho = rho0.entries.copy()
    dt = cfg.dt
    times, mn, ma, mn2, mq = [], [], [], [], []
    snapshots = []
    max_defect = 0.0

    def rhs(m, t):
        return lindblad_rhs(DensityMatrix(m), t, p).entries

    def record(k):
        t = k * dt
        obs = DensityMatrix(rho).observables()
        times.append(t)
        mn.append(obs.mean_n)
        ma.append(obs.mean_a)
        mn2.append(obs.mean_n2)
        mq.append(obs.mandel_q)

    record(0)
    if 0 in snap_steps:
        snapshots.append((snap_steps[0], DensityMatrix(rho.copy())))
    for k in range(nsteps):
        t = k * dt
        k1 = rhs(rho, t)
        k2 = rhs(rho + 0.5 * dt * k1, t + 0.5 * dt)
        k3 = rhs(rho + 0.5 * dt * k2, t + 0.5 * dt)
        k4 = rhs(rho + dt * k3, t + dt)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        tr = np.trace(rho).real
        defect = abs(tr - 1.0)
        if defect > max_defect:
            max_defect = defect
        if defect > 1e-6:
            raise StepSizeError(
                f"trace defect {defect:.3g} > 1e-6 at t={t + dt:g}; reduce dt")
        rho /= tr
        if (k + 1) % cfg.sample_every == 0 or k + 1 == nsteps:
            record(k + 1)
        if k + 1 in snap_steps:
            snapshots.append((snap_steps[k + 1], DensityMatrix(rho.copy())))

    return MasterResult(times=np.array(times), mean_n=np.array(mn),
                        mean_a=np.array(ma), mean_n2=np.array(mn2),
                        mandel_q=np.array(mq), trace_defect=max_defect,
                        snapshots=snapshots)
