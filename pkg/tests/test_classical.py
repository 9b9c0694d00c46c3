import math

import numpy as np
import pytest

from ahosim import (ModelParams, classical_poincare, classical_rhs,
                    integrate_classical, lyapunov_largest, scale_params)
from ahosim.errors import DivergenceError
from ahosim.sections import (PoincareSection, bhattacharyya, joint_bounds,
                             occupancy_histogram, section_overlap)

# reference drive-modulated parameter set with a known chaotic/regular
# boundary between f1 = 4.9 and f1 = 4.8
def ref_params(f1):
    return ModelParams(delta=-15.0, chi0=2.0, f0=5.8, f1=f1, small_delta=2.0,
                       f_mod_kind="complex_exponential")


def test_linear_decay_exact():
    p = ModelParams(delta=-1.0)
    t, a = integrate_classical(1.0 + 0.5j, p, 1e-3, 2.0, sample_every=100)
    exact = (1.0 + 0.5j) * np.exp(-(0.5 + 1j * p.delta) * t)
    assert np.max(np.abs(a - exact)) < 1e-10


def test_driven_fixed_point():
    p = ModelParams(delta=-1.0, f0=1.0)
    a_ss = -1j / (0.5 + 1j * p.delta)
    t, a = integrate_classical(0.0, p, 1e-3, 60.0, sample_every=1000)
    assert abs(a[-1] - a_ss) < 1e-10


def test_rhs_scaling_identity():
    # exact for constant nonlinearity: the detuning shift absorbs the
    # chi * alpha term only when chi does not depend on time
    p = ModelParams(delta=-1.3, chi0=0.7, f0=0.9 + 0.3j, f1=0.4,
                    small_delta=1.5, f_mod_kind="complex_exponential")
    lam = 2.5
    q = scale_params(p, lam)
    rng = np.random.default_rng(12)
    for _ in range(50):
        a = complex(rng.normal(), rng.normal())
        t = rng.uniform(0, 10)
        lhs = classical_rhs(lam * a, t, q)
        rhs = lam * classical_rhs(a, t, p)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


def test_poincare_period_orbit_regular():
    sec = classical_poincare(ref_params(4.8), n_points=600, skip=400)
    assert len(sec) == 600
    # regular motion: stroboscopic points collapse onto a small set of
    # repeating locations
    pts = np.round(sec.points, 4)
    distinct = len({(x, y) for x, y in pts})
    assert distinct <= 12


def test_poincare_chaotic_spread():
    sec = classical_poincare(ref_params(4.9), n_points=800, skip=400)
    pts = np.round(sec.points, 3)
    distinct = len({(x, y) for x, y in pts})
    assert distinct > 400  # extended attractor, points do not repeat


def test_lyapunov_sign_boundary():
    chaotic = lyapunov_largest(ref_params(4.9), horizon_periods=600, skip=200)
    regular = lyapunov_largest(ref_params(4.8), horizon_periods=600, skip=200)
    assert chaotic.estimate > 0.0
    assert regular.estimate <= 0.0


def test_blowup_detected():
    # undamped-scale drive with positive feedback style parameters is not
    # reachable here (gamma fixed > 0), so force divergence via huge drive
    p = ModelParams(delta=0.0, chi0=-5.0, f0=1e8)
    with pytest.raises(DivergenceError):
        integrate_classical(0.0, p, 1e-3, 10.0)


def test_section_overlap_metric():
    rng = np.random.default_rng(0)
    cloud = rng.normal(size=(4000, 2))
    a = PoincareSection(cloud[:2000], 0.0, 1.0, 0, "classical")
    b = PoincareSection(cloud[2000:], 0.0, 1.0, 0, "classical")
    c = PoincareSection(cloud[2000:] + 8.0, 0.0, 1.0, 0, "classical")
    assert section_overlap(a, b) > 0.6  # same distribution
    assert section_overlap(a, c) < 0.05  # disjoint clouds


def test_histogram_and_bounds():
    pts = np.array([[0.0, 0.0], [1.0, 1.0]])
    bounds = joint_bounds(pts)
    h = occupancy_histogram(pts, bounds, bins=8)
    assert h.sum() == pytest.approx(1.0)
    assert bhattacharyya(h, h) == pytest.approx(1.0)


def test_scaled_section():
    sec = PoincareSection(np.array([[1.0, -2.0]]), 0.0, 1.0, 0, "quantum")
    assert np.allclose(sec.scaled(0.5).points, [[0.5, -1.0]])
