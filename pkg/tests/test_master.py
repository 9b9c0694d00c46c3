import numpy as np
import pytest

from ahosim import (DensityMatrix, FockVector, MasterConfig, ModelParams,
                    coherent_state, integrate_master, lindblad_rhs)
from ahosim.errors import InvalidParameterError


def test_rhs_hermitian_traceless():
    p = ModelParams(delta=-1.0, chi0=0.3, f0=1.0, n_th=0.2)
    rho = DensityMatrix.from_pure(coherent_state(0.7 + 0.1j, 20))
    out = lindblad_rhs(rho, 0.3, p)
    assert abs(out.trace()) < 1e-12
    assert out.hermiticity_defect() < 1e-12


def test_vacuum_steady_state():
    p = ModelParams(delta=-1.0, chi0=0.3)
    rho = DensityMatrix.from_pure(FockVector.vacuum(8))
    out = lindblad_rhs(rho, 0.0, p)
    assert np.max(np.abs(out.entries)) < 1e-14


def test_free_decay_closed_form():
    # f = 0: <n>(t) = n0 exp(-gamma t) regardless of chi
    p = ModelParams(delta=-1.0, chi0=0.3)
    rho0 = DensityMatrix.from_pure(FockVector.basis(3, 12))
    res = integrate_master(rho0, MasterConfig(dt=1e-3, t_final=3.0, dim=12), p)
    exact = 3.0 * np.exp(-res.times)
    assert np.max(np.abs(res.mean_n - exact)) < 1e-8


def test_driven_linear_closed_form():
    # chi = 0 from vacuum: <a>(t) = alpha_ss (1 - exp(-(gamma/2 + i Delta) t))
    p = ModelParams(delta=-1.0, f0=1.0)
    a_ss = -1j * complex(p.f0) / (0.5 + 1j * p.delta)
    rho0 = DensityMatrix.from_pure(FockVector.vacuum(24))
    res = integrate_master(rho0, MasterConfig(dt=1e-3, t_final=5.0, dim=24), p)
    exact = a_ss * (1.0 - np.exp(-(0.5 + 1j * p.delta) * res.times))
    assert np.max(np.abs(res.mean_a - exact)) < 1e-6


def test_thermal_relaxation():
    # f = 0, thermal bath: <n>(t) -> n_th with rate gamma
    p = ModelParams(n_th=0.4)
    rho0 = DensityMatrix.from_pure(FockVector.vacuum(24))
    res = integrate_master(rho0, MasterConfig(dt=1e-3, t_final=8.0, dim=24), p)
    exact = 0.4 * (1.0 - np.exp(-res.times))
    assert np.max(np.abs(res.mean_n - exact)) < 1e-6


def test_positivity_and_trace_defect():
    p = ModelParams(delta=-1.0, chi0=0.3, f0=1.0)
    rho0 = DensityMatrix.from_pure(FockVector.vacuum(20))
    res = integrate_master(rho0, MasterConfig(dt=1e-3, t_final=2.0, dim=20,
                                              snapshot_times=(1.0, 2.0)), p)
    assert res.trace_defect < 1e-8
    for t, rho in res.snapshots:
        assert rho.trace().real == pytest.approx(1.0, abs=1e-12)
        assert rho.min_eigenvalue() > -1e-9


def test_dim_mismatch():
    p = ModelParams()
    with pytest.raises(InvalidParameterError):
        integrate_master(DensityMatrix.zeros(8),
                         MasterConfig(dt=1e-3, t_final=1.0, dim=12), p)
