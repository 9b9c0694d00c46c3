"""Parallel many-trajectory runs: ensemble-mean observables with standard
errors and snapshot density matrices for Wigner analysis.

Trajectories are pure functions of (config, params, initial state, noise
key), and the reduction always runs in ascending trajectory-index order,
so results are bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import AhosimError, InvalidParameterError
from .fock import DensityMatrix, FockVector
from .model import ModelParams
from .qsd import NoiseStream, TrajectoryConfig, run_trajectory
from .wigner import GridSpec, WignerGrid, negativity_volume, wigner_from_density

NEGATIVITY_FLAG_LEVEL = -1e-3 * (2.0 / math.pi)


@dataclass(frozen=True)
class EnsembleConfig:
    n_traj: int
    base: TrajectoryConfig
    snapshot_times: tuple = ()
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.n_traj < 1:
            raise InvalidParameterError("n_traj must be >= 1")
        if self.workers < 1:
            raise InvalidParameterError("workers must be >= 1")
        for ts in self.snapshot_times:
            if not 0.0 <= ts <= self.base.t_final:
                raise InvalidParameterError(
                    f"snapshot time {ts} outside [0, {self.base.t_final}]")


@dataclass
class EnsembleResult:
    times: np.ndarray
    mean_n: np.ndarray
    mean_a: np.ndarray
    mean_n2: np.ndarray
    mandel_q: np.ndarray
    se_n: np.ndarray
    se_re_a: np.ndarray
    se_im_a: np.ndarray
    n_traj: int
    snapshots: list = field(default_factory=list)  # (time, DensityMatrix)
    snapshot_times: tuple = ()
    leakage_max: float = 0.0


def _run_one(args):
    index, cfg, p, amps0 = args
    stream = NoiseStream(cfg.master_seed, index)
    rec = run_trajectory(cfg.base, p, FockVector(amps0), stream,
                         snapshot_times=cfg.snapshot_times)
    return (index, rec.mean_n, rec.mean_a, rec.mean_n2, rec.times,
            [a for _, a in rec.snapshots], rec.leakage)


def run_ensemble(cfg: EnsembleConfig, p: ModelParams, psi0: FockVector) -> EnsembleResult:
    """Run n_traj independent trajectories with streams (master_seed, 0..M-1)
    and reduce observables and snapshot projectors in index order."""
    tasks = [(i, cfg, p, psi0.amps) for i in range(cfg.n_traj)]
    results = {}
    if cfg.workers == 1 or cfg.n_traj == 1:
        for task in tasks:
            out = _run_one(task)
            results[out[0]] = out
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for out in pool.map(_run_one, tasks, chunksize=max(1, cfg.n_traj // (4 * cfg.workers))):
                results[out[0]] = out

    m = cfg.n_traj
    first = results[0]
    times = first[4]
    nsamp = times.size
    sum_n = np.zeros(nsamp)
    sum_n_sq = np.zeros(nsamp)
    sum_a = np.zeros(nsamp, dtype=np.complex128)
    sum_re_sq = np.zeros(nsamp)
    sum_im_sq = np.zeros(nsamp)
    sum_n2 = np.zeros(nsamp)
    rho_sums = [np.zeros((cfg.base.dim, cfg.base.dim), dtype=np.complex128)
                for _ in cfg.snapshot_times]
    leakage_max = 0.0
    for i in range(m):
        _, mn, ma, mn2, _, snaps, leak = results[i]
        sum_n += mn
        sum_n_sq += mn * mn
        sum_a += ma
        sum_re_sq += ma.real**2
        sum_im_sq += ma.imag**2
        sum_n2 += mn2
        for s, amps in zip(rho_sums, snaps):
            s += np.outer(amps, amps.conj())
        leakage_max = max(leakage_max, leak)

    mean_n = sum_n / m
    mean_a = sum_a / m
    mean_n2 = sum_n2 / m
    with np.errstate(invalid="ignore", divide="ignore"):
        mandel_q = np.where(mean_n > 1e-12,
                            (mean_n2 - mean_n**2 - mean_n) / np.maximum(mean_n, 1e-300),
                            0.0)

    def se(sum_sq, mean):
        if m < 2:
            return np.zeros(nsamp)
        var = np.maximum(sum_sq / m - mean**2, 0.0) * m / (m - 1)
        return np.sqrt(var / m)

    snapshots = [(t, DensityMatrix(s / m))
                 for t, s in zip(cfg.snapshot_times, rho_sums)]
    return EnsembleResult(times=times, mean_n=mean_n, mean_a=mean_a,
                          mean_n2=mean_n2, mandel_q=mandel_q,
                          se_n=se(sum_n_sq, mean_n),
                          se_re_a=se(sum_re_sq, mean_a.real),
                          se_im_a=se(sum_im_sq, mean_a.imag),
                          n_traj=m, snapshots=snapshots,
                          snapshot_times=tuple(cfg.snapshot_times),
                          leakage_max=leakage_max)


def snapshot_wigner(res: EnsembleResult, t: float, grid: GridSpec = GridSpec()) -> WignerGrid:
    """Wigner grid of the ensemble density matrix stored at snapshot time t."""
    for ts, rho in res.snapshots:
        if math.isclose(ts, t, rel_tol=1e-12, abs_tol=1e-12):
            return wigner_from_density(rho, grid)
    raise AhosimError(f"no snapshot stored at t={t:g}")


@dataclass
class InterferenceEntry:
    time: float
    min_w: float
    negativity: float
    flagged: bool


def interference_scan(res: EnsembleResult, grid: GridSpec = GridSpec()):
    """Per-snapshot Wigner negativity metrics; a snapshot is flagged when
    min W drops below -1e-3 * (2/pi)."""
    if len(res.snapshots) < 2:
        raise InvalidParameterError("interference scan needs >= 2 snapshots")
    out = []
    for ts, rho in res.snapshots:
        g = wigner_from_density(rho, grid)
        w_min = g.min()
        out.append(InterferenceEntry(time=ts, min_w=w_min,
                                     negativity=negativity_volume(g),
                                     flagged=w_min < NEGATIVITY_FLAG_LEVEL))
    return out
