"""Wigner quasidistribution from a Fock-basis density matrix.

The grid evaluation uses the polar expansion W(r,theta) = sum rho_nm W_mn
with W_mn built from associated Laguerre polynomials; the recurrence runs
on the bounded scaled functions so truncations of several hundred levels
evaluate without overflow. The convention is pinned by the vacuum value
W(0) = 2/pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import InvalidParameterError, InvalidStateError
from .fock import DensityMatrix


@dataclass(frozen=True)
class GridSpec:
    """Cartesian phase-space grid, symmetric square by default."""

    half_width: float | None = None  # default sqrt(dim)/sqrt(2) + 3
    points: int = 256

    def __post_init__(self):
        if self.points < 64:
            raise InvalidParameterError("grid resolution must be >= 64 per axis")
        if self.half_width is not None and not self.half_width > 0.0:
            raise InvalidParameterError("half_width must be positive")

    def axes(self, dim: int):
        hw = self.half_width
        if hw is None:
            hw = math.sqrt(dim) / math.sqrt(2.0) + 3.0
        x = np.linspace(-hw, hw, self.points)
        return x, x.copy()


@dataclass
class WignerGrid:
    kind: str
    x: np.ndarray
    y: np.ndarray
    values: np.ndarray  # shape (ny, nx), real
    dim_used: int
    imag_residue: float

    @property
    def cell_area(self) -> float:
        return float((self.x[1] - self.x[0]) * (self.y[1] - self.y[0]))

    def integral(self) -> float:
        return float(self.values.sum() * self.cell_area)

    def abs_integral(self) -> float:
        return float(np.abs(self.values).sum() * self.cell_area)

    def min(self) -> float:
        return float(self.values.min())


def wigner_coeff(m: int, n: int, r, theta) -> complex:
    """Single expansion coefficient W_mn(r, theta); conjugate-symmetric in
    (m, n). Accepts scalars or broadcastable arrays for r and theta."""
    if m < 0 or n < 0:
        raise InvalidParameterError("m, n must be >= 0")
    if m < n:
        return np.conj(wigner_coeff(n, m, r, theta))
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(r < 0.0):
        raise InvalidParameterError("r must be >= 0")
    k = m - n
    x = 4.0 * r * r
    if k == 0:
        phi = np.exp(-0.5 * x)
    else:
        with np.errstate(divide="ignore"):
            log2r = np.where(r > 0.0, np.log(np.maximum(2.0 * r, 1e-300)), -np.inf)
        logphi0 = -0.5 * math.lgamma(k + 1.0) + k * log2r - 0.5 * x
        phi = np.where(np.isneginf(logphi0), 0.0, np.exp(logphi0))
    phi_prev = np.zeros_like(phi)
    for j in range(n):
        aj = (2.0 * j + k + 1.0 - x) / math.sqrt((j + 1.0) * (j + k + 1.0))
        bj = math.sqrt(j * (j + k) / ((j + 1.0) * (j + k + 1.0)))
        phi, phi_prev = aj * phi - bj * phi_prev, phi
    out = (2.0 / math.pi) * (-1.0) ** n * np.exp(1j * k * theta) * phi
    return complex(out) if out.ndim == 0 else out


def wigner_from_density(rho: DensityMatrix, grid: GridSpec = GridSpec(),
                        imag_tol: float = 1e-6) -> WignerGrid:
    """Evaluate W on a Cartesian grid; the imaginary residue of the complex
    sum is checked and dropped."""
    x, y = grid.axes(rho.dim)
    xx, yy = np.meshgrid(x, y)
    r = np.hypot(xx, yy).ravel()
    theta = np.arctan2(yy, xx).ravel()
    out_re = np.empty(r.size)
    out_im = np.empty(r.size)
    K.wigner_eval(rho.entries, r, theta, out_re, out_im)
    residue = float(np.max(np.abs(out_im)))
    if residue > imag_tol:
        raise InvalidStateError(
            f"Wigner sum has imaginary residue {residue:.3g}; "
            "density matrix is inconsistent (non-Hermitian)")
    return WignerGrid(kind="cartesian", x=x, y=y,
                      values=out_re.reshape(y.size, x.size),
                      dim_used=rho.dim, imag_residue=residue)


def negativity_volume(g: WignerGrid) -> float:
    """Integral of |W| minus one, clamped at zero: the standard
    negativity-volume witness of quantum interference."""
    return max(0.0, g.abs_integral() - 1.0)


def marching_squares(x: np.ndarray, y: np.ndarray, values: np.ndarray, level: float):
    """Extract iso-level polylines from a scalar grid.

    Cell edges crossing the level are interpolated linearly and the
    resulting segments are chained into polylines (closed loops where the
    contour closes). Returns a list of (k, 2) arrays.
    """
    v = values - level
    # nudge grid values sitting exactly on the level: corner crossings
    # would otherwise create zero-length segments and branch points
    scale = float(np.max(np.abs(v))) or 1.0
    v = np.where(np.abs(v) < 1e-12 * scale, 1e-12 * scale, v)
    ny, nx = v.shape
    segs = []

    def interp(xa, ya, va, xb, yb, vb):
        t = va / (va - vb)
        return (xa + t * (xb - xa), ya + t * (yb - ya))

    for j in range(ny - 1):
        for i in range(nx - 1):
            # corner order: (i,j) (i+1,j) (i+1,j+1) (i,j+1)
            c = (v[j, i], v[j, i + 1], v[j + 1, i + 1], v[j + 1, i])
            xs = (x[i], x[i + 1], x[i + 1], x[i])
            ys = (y[j], y[j], y[j + 1], y[j + 1])
            idx = sum(1 << k for k in range(4) if c[k] > 0.0)
            if idx in (0, 15):
                continue
            pts = []
            for k in range(4):
                ka, kb = k, (k + 1) % 4
                if (c[ka] > 0.0) != (c[kb] > 0.0):
                    pts.append(interp(xs[ka], ys[ka], c[ka], xs[kb], ys[kb], c[kb]))
            if len(pts) == 2:
                segs.append((pts[0], pts[1]))
            elif len(pts) == 4:
                # saddle: resolve by the cell-center value
                center = 0.25 * sum(c)
                if (center > 0.0) == (c[0] > 0.0):
                    segs.append((pts[0], pts[3]))
                    segs.append((pts[1], pts[2]))
                else:
                    segs.append((pts[0], pts[1]))
                    segs.append((pts[2], pts[3]))

    # chain segments into polylines by walking shared endpoints
    def key(pt):
        return (round(pt[0], 9), round(pt[1], 9))

    # drop zero-length slivers from cells the contour merely grazes
    segs = [(a, b) for a, b in segs if key(a) != key(b)]

    adj = {}
    for i, (a, b) in enumerate(segs):
        adj.setdefault(key(a), []).append(i)
        adj.setdefault(key(b), []).append(i)
    used = [False] * len(segs)
    polylines = []
    for i in range(len(segs)):
        if used[i]:
            continue
        used[i] = True
        chain = [segs[i][0], segs[i][1]]
        for forward in (True, False):
            while True:
                kend = key(chain[-1] if forward else chain[0])
                nxt = next((j for j in adj.get(kend, ()) if not used[j]), None)
                if nxt is None:
                    break
                used[nxt] = True
                p, q = segs[nxt]
                newpt = q if key(p) == kend else p
                if forward:
                    chain.append(newpt)
                else:
                    chain.insert(0, newpt)
        polylines.append(chain)
    return [np.asarray(c, dtype=float) for c in polylines]


def contour_export(g: WignerGrid, levels):
    """Marching-squares contour polylines of the grid at each level.

    Returns a list of (level, [polyline arrays]) pairs; levels that miss
    the data yield empty lists.
    """
    out = []
    for level in levels:
        out.append((float(level), marching_squares(g.x, g.y, g.values, float(level))))
    return out
