"""Command-line front end: parses a run configuration, executes the
requested command and writes delimited datasets, JSON reports, rendered
figures and a reproducibility manifest into the output directory.

Exit codes: 0 success, 2 config error, 3 numeric divergence,
4 tolerance failure in validate.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .classical import classical_poincare, lyapunov_largest
from .config import RunConfig, parse_config, serialize_config
from .ensemble import EnsembleConfig, interference_scan, run_ensemble
from .errors import AhosimError, ConfigError, DivergenceError, ToleranceError
from .fock import DensityMatrix, FockVector, coherent_state
from .master import MasterConfig, integrate_master
from .model import scale_params
from .qsd import NoiseStream, TrajectoryConfig, run_trajectory
from .sections import section_overlap
from .wigner import GridSpec, contour_export, negativity_volume, wigner_from_density
from . import reports

OUTPUT_ROOT_ENV = "AHOSIM_OUTPUT_ROOT"


def _initial_state(cfg: RunConfig) -> FockVector:
    st = cfg.initial_state
    if st == "vacuum":
        return FockVector.vacuum(cfg.dim)
    if st.startswith("fock:"):
        return FockVector.basis(int(st.split(":", 1)[1]), cfg.dim)
    re, im = (float(v) for v in st.split(":", 1)[1].split(","))
    return coherent_state(complex(re, im), cfg.dim)


def _grid_spec(cfg: RunConfig) -> GridSpec:
    hw = cfg.grid_half_width if cfg.grid_half_width > 0.0 else None
    return GridSpec(half_width=hw, points=cfg.grid_points)


def _traj_config(cfg: RunConfig) -> TrajectoryConfig:
    return TrajectoryConfig(dt=cfg.dt, t_final=cfg.t_final, dim=cfg.dim,
                            sample_every=cfg.sample_every,
                            poincare_t0=cfg.poincare_t0,
                            poincare_skip=cfg.poincare_skip,
                            renorm=cfg.renorm,
                            leak_threshold=cfg.leak_threshold)


class _Runner:
    """Tracks written artifacts so partial outputs can be removed on failure."""

    def __init__(self, cfg: RunConfig, outdir: Path, figures: bool):
        self.cfg = cfg
        self.outdir = outdir
        self.figures = figures
        self.artifacts = []
        self.extras = {}

    def path(self, name: str) -> Path:
        p = self.outdir / name
        self.artifacts.append(p)
        return p

    def cleanup(self):
        for p in self.artifacts:
            try:
                p.unlink()
            except OSError:
                pass

    # ------------------------------------------------------------------
    def run(self) -> int:
        handler = {
            "classical-poincare": self.cmd_classical_poincare,
            "lyapunov": self.cmd_lyapunov,
            "trajectory": self.cmd_trajectory,
            "ensemble": self.cmd_ensemble,
            "wigner": self.cmd_wigner,
            "scaling-check": self.cmd_scaling_check,
            "validate": self.cmd_validate,
        }[self.cfg.command]
        return handler()

    def scaled_params(self):
        p = self.cfg.model_params()
        if self.cfg.scale_lambda != 1.0:
            p = scale_params(p, self.cfg.scale_lambda)
        return p

    def cmd_classical_poincare(self) -> int:
        cfg = self.cfg
        sec = classical_poincare(self.scaled_params(), t0=cfg.poincare_t0,
                                 n_points=cfg.n_points, skip=cfg.skip,
                                 steps_per_period=cfg.steps_per_period)
        reports.write_section_csv(self.path("section.csv"), sec)
        if self.figures:
            reports.fig_sections(self.path("poincare.png"), [sec],
                                 title="classical Poincare section")
        self.extras["n_points"] = len(sec)
        return 0

    def cmd_lyapunov(self) -> int:
        cfg = self.cfg
        rep = lyapunov_largest(self.scaled_params(),
                               horizon_periods=cfg.horizon_periods,
                               skip=cfg.skip,
                               steps_per_period=cfg.steps_per_period,
                               d0=cfg.separation_seed)
        reports.write_json(self.path("lyapunov.json"), {
            "estimate": rep.estimate,
            "horizon_periods": rep.horizon_periods,
            "renorm_interval": rep.renorm_interval,
            "transient_periods": rep.transient_periods,
            "separation_seed": rep.separation_seed,
            "classification": "chaotic" if rep.estimate > 0 else "regular",
        })
        self.extras["lyapunov"] = rep.estimate
        return 0

    def cmd_trajectory(self) -> int:
        cfg = self.cfg
        rec = run_trajectory(_traj_config(cfg), self.scaled_params(),
                             _initial_state(cfg),
                             NoiseStream(cfg.master_seed, 0),
                             snapshot_times=cfg.snapshot_times)
        reports.write_trajectory_csv(self.path("observables.csv"), rec)
        if rec.poincare is not None:
            reports.write_section_csv(self.path("poincare.csv"), rec.poincare)
        for t, amps in rec.snapshots:
            rho = DensityMatrix(np.outer(amps, amps.conj()))
            reports.write_density_csv(self.path(f"density_t{t:g}.csv"), rho, t)
        if self.figures:
            reports.fig_series(self.path("mean_n.png"), rec.times, rec.mean_n,
                               "<n>", title="single-trajectory excitation number")
            if rec.poincare is not None and len(rec.poincare) > 0:
                reports.fig_sections(self.path("poincare.png"), [rec.poincare],
                                     title="quantum Poincare section")
        self.extras["leakage"] = rec.leakage
        return 0

    def cmd_ensemble(self) -> int:
        cfg = self.cfg
        ecfg = EnsembleConfig(n_traj=cfg.n_traj, base=_traj_config(cfg),
                              snapshot_times=cfg.snapshot_times,
                              master_seed=cfg.master_seed, workers=cfg.workers)
        res = run_ensemble(ecfg, self.scaled_params(), _initial_state(cfg))
        reports.write_ensemble_csv(self.path("observables.csv"), res)
        grid = _grid_spec(cfg)
        for t, rho in res.snapshots:
            reports.write_density_csv(self.path(f"density_t{t:g}.csv"), rho, t)
            g = wigner_from_density(rho, grid)
            reports.write_wigner_csv(self.path(f"wigner_t{t:g}.csv"), g)
            reports.write_wigner_matrix(self.path(f"wigner_t{t:g}.dat"), g)
            if self.figures:
                reports.fig_wigner(self.path(f"wigner_t{t:g}.png"), g,
                                   levels=cfg.levels or None,
                                   title=f"W at gamma t = {t:g}")
        if len(res.snapshots) >= 2:
            scan = interference_scan(res, grid)
            reports.write_json(self.path("interference.json"), [
                {"t": e.time, "min_w": e.min_w, "negativity": e.negativity,
                 "flagged": e.flagged} for e in scan])
        if self.figures:
            reports.fig_series(self.path("mean_n.png"), res.times, res.mean_n,
                               "<n>", se=res.se_n,
                               title=f"ensemble mean over {res.n_traj} trajectories")
        self.extras["leakage_max"] = res.leakage_max
        return 0

    def cmd_wigner(self) -> int:
        cfg = self.cfg
        if cfg.density_file:
            rho, t = reports.read_density_csv(cfg.density_file)
        else:
            psi = _initial_state(cfg)
            rho, t = DensityMatrix.from_pure(psi), 0.0
        g = wigner_from_density(rho, _grid_spec(cfg))
        reports.write_wigner_csv(self.path("wigner.csv"), g)
        reports.write_wigner_matrix(self.path("wigner.dat"), g)
        levels = cfg.levels or (np.linspace(g.values.min(), g.values.max(), 12)[1:-1])
        reports.write_contours_csv(self.path("contours.csv"),
                                   contour_export(g, levels))
        if self.figures:
            reports.fig_wigner(self.path("wigner.png"), g, levels=list(levels),
                               title=f"W at gamma t = {t:g}")
        self.extras.update(integral=g.integral(), min_w=g.min(),
                           negativity=negativity_volume(g))
        return 0

    def cmd_scaling_check(self) -> int:
        cfg = self.cfg
        p = cfg.model_params()
        lam = cfg.scale_lambda
        sec1 = classical_poincare(p, n_points=cfg.n_points, skip=cfg.skip,
                                  steps_per_period=cfg.steps_per_period)
        sec2 = classical_poincare(scale_params(p, lam), n_points=cfg.n_points,
                                  skip=cfg.skip,
                                  steps_per_period=cfg.steps_per_period)
        reports.write_section_csv(self.path("section_base.csv"), sec1)
        reports.write_section_csv(self.path("section_scaled.csv"), sec2)
        overlap = section_overlap(sec1, sec2.scaled(1.0 / lam))
        reports.write_json(self.path("overlap.json"), {
            "lambda": lam, "bhattacharyya": overlap, "bins": 64,
            "n_points": cfg.n_points})
        if self.figures:
            reports.fig_sections(self.path("overlay.png"),
                                 [sec1, sec2.scaled(1.0 / lam)],
                                 labels=["lambda=1", f"lambda={lam:g} (rescaled)"],
                                 title="scaling-invariance overlay")
        self.extras["bhattacharyya"] = overlap
        return 0

    def cmd_validate(self) -> int:
        """QSD ensemble vs dense master-equation oracle on the configured
        instance; fails (exit 4) when the ensemble mean leaves the
        max(3 SE, 3%) band around the oracle at any checkpoint."""
        cfg = self.cfg
        p = self.scaled_params()
        psi0 = _initial_state(cfg)
        ecfg = EnsembleConfig(n_traj=cfg.n_traj, base=_traj_config(cfg),
                              master_seed=cfg.master_seed, workers=cfg.workers)
        res = run_ensemble(ecfg, p, psi0)
        mcfg = MasterConfig(dt=cfg.dt, t_final=cfg.t_final, dim=cfg.dim,
                            sample_every=cfg.sample_every)
        oracle = integrate_master(DensityMatrix.from_pure(psi0), mcfg, p)
        checks = []
        ok = True
        for frac in (0.2, 0.5, 1.0):
            t = frac * cfg.t_final
            i = int(np.argmin(np.abs(res.times - t)))
            j = int(np.argmin(np.abs(oracle.times - t)))
            err = abs(res.mean_n[i] - oracle.mean_n[j])
            tol = max(3.0 * res.se_n[i], 0.03 * max(abs(oracle.mean_n[j]), 1e-9))
            passed = bool(err <= tol)
            ok = ok and passed
            checks.append({"t": float(res.times[i]), "ensemble_mean_n": float(res.mean_n[i]),
                           "oracle_mean_n": float(oracle.mean_n[j]), "error": float(err),
                           "tolerance": float(tol), "pass": passed})
        reports.write_json(self.path("validate.json"), {
            "n_traj": cfg.n_traj, "checks": checks, "pass": ok})
        reports.write_ensemble_csv(self.path("observables.csv"), res)
        self.extras["pass"] = ok
        if not ok:
            raise ToleranceError("ensemble mean outside tolerance of master oracle")
        return 0


def execute(cfg: RunConfig, figures: bool = True) -> int:
    """Run a parsed configuration; returns the process exit status."""
    root = os.environ.get(OUTPUT_ROOT_ENV, "")
    outdir = Path(cfg.output_dir)
    if root and not outdir.is_absolute():
        outdir = Path(root) / outdir
    outdir.mkdir(parents=True, exist_ok=True)
    runner = _Runner(cfg, outdir, figures)
    t0 = time.monotonic()
    try:
        status = runner.run()
    except Exception as exc:
        runner.cleanup()
        if isinstance(exc, ToleranceError):
            code = 4
        elif isinstance(exc, DivergenceError):
            code = 3
        elif isinstance(exc, ConfigError):
            code = 2
        elif isinstance(exc, AhosimError):
            code = 3
        else:
            raise
        reports.write_json(outdir / "error.json", {
            "error": type(exc).__name__, "message": str(exc), "exit_code": code})
        print(f"error: {exc}", file=sys.stderr)
        # a failed validate still keeps its report for inspection
        if isinstance(exc, ToleranceError):
            return 4
        return code
    reports.write_json(outdir / "manifest.json", {
        "version": __version__,
        "command": cfg.command,
        "master_seed": cfg.master_seed,
        "wall_time_s": time.monotonic() - t0,
        "config": serialize_config(cfg),
        "artifacts": [p.name for p in runner.artifacts],
        **runner.extras,
    })
    return status


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ahosim",
        description="driven dissipative anharmonic-oscillator simulator")
    parser.add_argument("config", help="path to a key = value run configuration")
    parser.add_argument("--workers", type=int, default=None,
                        help="override worker count (default: from config)")
    parser.add_argument("--output-dir", default=None,
                        help="override the config's output directory")
    parser.add_argument("--no-figures", action="store_true",
                        help="skip rendering PNG figures")
    parser.add_argument("--version", action="version", version=__version__)
    args = parser.parse_args(argv)
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = parse_config(text)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.workers is not None:
        cfg.workers = max(1, args.workers)
    if args.output_dir is not None:
        cfg.output_dir = args.output_dir
    return execute(cfg, figures=not args.no_figures)


if __name__ == "__main__":
    sys.exit(main())
