import math

import numpy as np
import pytest

from ahosim import (DensityMatrix, FockVector, GridSpec, coherent_state,
                    contour_export, negativity_volume, wigner_coeff,
                    wigner_from_density)
from ahosim.errors import InvalidParameterError, InvalidStateError
from ahosim.wigner import marching_squares

TWO_OVER_PI = 2.0 / math.pi


def grid_for(dim, hw=5.0, pts=128):
    return GridSpec(half_width=hw, points=pts)


def test_vacuum_closed_form():
    g = wigner_from_density(DensityMatrix.from_pure(FockVector.vacuum(16)),
                            grid_for(16))
    xx, yy = np.meshgrid(g.x, g.y)
    exact = TWO_OVER_PI * np.exp(-2.0 * (xx ** 2 + yy ** 2))
    assert np.max(np.abs(g.values - exact)) < 1e-6
    assert g.integral() == pytest.approx(1.0, abs=1e-3)


def test_coherent_closed_form():
    alpha = 1.0 + 0.5j
    g = wigner_from_density(DensityMatrix.from_pure(coherent_state(alpha, 32)),
                            grid_for(32))
    xx, yy = np.meshgrid(g.x, g.y)
    exact = TWO_OVER_PI * np.exp(-2.0 * ((xx - alpha.real) ** 2
                                         + (yy - alpha.imag) ** 2))
    assert np.max(np.abs(g.values - exact)) < 1e-6


def test_fock1_closed_form_and_origin():
    g = wigner_from_density(DensityMatrix.from_pure(FockVector.basis(1, 16)),
                            grid_for(16))
    xx, yy = np.meshgrid(g.x, g.y)
    r2 = xx ** 2 + yy ** 2
    exact = TWO_OVER_PI * (4.0 * r2 - 1.0) * np.exp(-2.0 * r2)
    assert np.max(np.abs(g.values - exact)) < 1e-6
    # origin values pin the convention
    assert wigner_coeff(0, 0, 0.0, 0.0) == pytest.approx(TWO_OVER_PI)
    assert wigner_coeff(1, 1, 0.0, 0.0) == pytest.approx(-TWO_OVER_PI)
    # negativity volume of |1>: integral of |W| is 4 e^{-1/2} - 1
    assert negativity_volume(g) == pytest.approx(4.0 * math.exp(-0.5) - 2.0,
                                                 abs=5e-3)


def test_coefficient_conjugate_symmetry():
    rng = np.random.default_rng(3)
    for _ in range(20):
        m, n = rng.integers(0, 12, size=2)
        r, th = rng.uniform(0, 3), rng.uniform(-math.pi, math.pi)
        assert wigner_coeff(int(m), int(n), r, th) == pytest.approx(
            np.conj(wigner_coeff(int(n), int(m), r, th)), abs=1e-12)
    with pytest.raises(InvalidParameterError):
        wigner_coeff(-1, 0, 1.0, 0.0)


def test_large_truncation_no_overflow():
    # the scaled recurrence must stay bounded at a few hundred levels
    val = wigner_coeff(200, 190, 8.0, 0.3)
    assert np.isfinite(val.real) and np.isfinite(val.imag)
    assert abs(val) < 1.0


def test_non_hermitian_rejected():
    bad = np.zeros((8, 8), dtype=complex)
    bad[0, 0] = 1.0
    bad[2, 5] = 0.4  # no conjugate partner
    with pytest.raises(InvalidStateError):
        wigner_from_density(DensityMatrix(bad), grid_for(8))


def test_grid_spec_validation():
    with pytest.raises(InvalidParameterError):
        GridSpec(points=32)
    with pytest.raises(InvalidParameterError):
        GridSpec(half_width=-1.0)
    x, y = GridSpec(points=64).axes(16)
    assert x[-1] == pytest.approx(math.sqrt(16) / math.sqrt(2) + 3.0)


def test_marching_squares_circle():
    # level set of x^2 + y^2 at 1: a single closed loop of radius 1
    x = np.linspace(-2, 2, 201)
    y = np.linspace(-2, 2, 201)
    xx, yy = np.meshgrid(x, y)
    lines = marching_squares(x, y, xx ** 2 + yy ** 2, 1.0)
    assert len(lines) == 1
    loop = lines[0]
    assert np.allclose(loop[0], loop[-1])  # closed
    radii = np.hypot(loop[:, 0], loop[:, 1])
    assert np.max(np.abs(radii - 1.0)) < 2e-3


def test_marching_squares_open_contour():
    # plane x = 0 crossing the grid: one open polyline spanning the box
    x = np.linspace(-1, 1, 41)
    y = np.linspace(-1, 1, 41)
    xx, _ = np.meshgrid(x, y)
    lines = marching_squares(x, y, xx, 0.25)
    assert len(lines) == 1
    assert np.allclose(lines[0][:, 0], 0.25)
    ys = lines[0][:, 1]
    assert ys.min() == pytest.approx(-1.0) and ys.max() == pytest.approx(1.0)


def test_contour_export_levels():
    g = wigner_from_density(DensityMatrix.from_pure(FockVector.vacuum(12)),
                            grid_for(12, pts=64))
    out = contour_export(g, [0.5 * TWO_OVER_PI, 10.0])
    assert out[0][0] == pytest.approx(0.5 * TWO_OVER_PI)
    assert len(out[0][1]) >= 1  # hits the Gaussian
    assert out[1][1] == []  # misses the data entirely
