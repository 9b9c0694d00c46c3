import json

import numpy as np
import pytest

from ahosim.cli import main
from ahosim.fock import DensityMatrix, FockVector, coherent_state
from ahosim.reports import read_density_csv, write_density_csv


def run_cli(tmp_path, text, *extra):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(text)
    return main([str(cfg), "--output-dir", str(tmp_path / "out"), *extra])


def test_classical_poincare_outputs(tmp_path):
    code = run_cli(tmp_path, """
command = "classical-poincare"
delta = -15.0
chi0 = 2.0
f0 = 5.8
f1 = 4.9
small_delta = 2.0
f_mod_kind = "complex_exponential"
n_points = 50
skip = 20
""")
    assert code == 0
    out = tmp_path / "out"
    lines = (out / "section.csv").read_text().strip().splitlines()
    assert lines[0] == "n,x,y"
    assert len(lines) == 51  # header + n_points rows
    assert (out / "poincare.png").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "classical-poincare"
    assert "section.csv" in manifest["artifacts"]


def test_no_figures_flag(tmp_path):
    code = run_cli(tmp_path, """
command = "classical-poincare"
f0 = 1.0
f1 = 0.5
small_delta = 2.0
f_mod_kind = "complex_exponential"
n_points = 10
skip = 5
""", "--no-figures")
    assert code == 0
    out = tmp_path / "out"
    assert (out / "section.csv").exists()
    assert not (out / "poincare.png").exists()


def test_wigner_command_and_density_round_trip(tmp_path):
    rho = DensityMatrix.from_pure(coherent_state(0.6 - 0.2j, 16))
    dens = tmp_path / "rho.csv"
    write_density_csv(dens, rho, 1.25)
    back, t = read_density_csv(dens)
    assert t == 1.25
    assert np.array_equal(back.entries, rho.entries)

    code = run_cli(tmp_path, f"""
command = "wigner"
dim = 16
grid_points = 64
grid_half_width = 4.0
density_file = "{dens}"
""")
    assert code == 0
    out = tmp_path / "out"
    assert (out / "wigner.csv").exists()
    assert (out / "contours.csv").exists()
    assert (out / "wigner.png").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["integral"] == pytest.approx(1.0, abs=1e-2)


def test_config_error_exit_code(tmp_path):
    assert run_cli(tmp_path, 'command = "fly"\n') == 2
    assert run_cli(tmp_path, 'command = "wigner"\nbogus = 1\n') == 2
    assert main([str(tmp_path / "missing.cfg")]) == 2


def test_divergence_exit_code_and_error_report(tmp_path):
    code = run_cli(tmp_path, """
command = "classical-poincare"
chi0 = -5.0
f0 = 100000000.0
f1 = 1.0
small_delta = 2.0
f_mod_kind = "complex_exponential"
n_points = 10
skip = 5
""")
    assert code == 3
    out = tmp_path / "out"
    err = json.loads((out / "error.json").read_text())
    assert err["error"] == "DivergenceError"
    # partial outputs were removed
    assert not (out / "section.csv").exists()


def test_validate_command(tmp_path):
    code = run_cli(tmp_path, """
command = "validate"
delta = -0.5
f0 = 0.5
dt = 0.001
t_final = 1.0
dim = 12
n_traj = 8
sample_every = 100
initial_state = "fock:1"
master_seed = 5
""")
    assert code == 0
    rep = json.loads((tmp_path / "out" / "validate.json").read_text())
    assert rep["pass"] is True
    assert len(rep["checks"]) == 3


def test_scaling_check_command(tmp_path):
    code = run_cli(tmp_path, """
command = "scaling-check"
delta = -15.0
chi0 = 2.0
f0 = 5.8
f1 = 4.9
small_delta = 2.0
f_mod_kind = "complex_exponential"
scale_lambda = 2.0
n_points = 100
skip = 50
""")
    assert code == 0
    rep = json.loads((tmp_path / "out" / "overlap.json").read_text())
    assert rep["lambda"] == 2.0
    assert 0.0 < rep["bhattacharyya"] <= 1.0


def test_trajectory_command(tmp_path):
    code = run_cli(tmp_path, """
command = "trajectory"
delta = -1.0
f0 = 1.0
dt = 0.001
t_final = 1.0
dim = 16
sample_every = 100
master_seed = 9
""")
    assert code == 0
    lines = (tmp_path / "out" / "observables.csv").read_text().splitlines()
    assert lines[0] == "t,mean_n,re_a,im_a,mean_n2,mandel_q,norm_defect"
    assert len(lines) == 12  # header + 11 samples (t = 0 .. 1 step 0.1)
