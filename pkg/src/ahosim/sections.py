"""Stroboscopic phase-space sections and the attractor-similarity metric."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError


@dataclass
class PoincareSection:
    """Ordered (x, y) points recorded once per modulation period."""

    points: np.ndarray  # shape (N, 2)
    t0: float
    period: float
    skipped: int
    provenance: str  # "classical" or "quantum"

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if not self.period > 0.0:
            raise InvalidParameterError("section period must be positive")
        if self.provenance not in ("classical", "quantum"):
            raise InvalidParameterError(f"unknown provenance {self.provenance!r}")

    def __len__(self) -> int:
        return self.points.shape[0]

    def scaled(self, factor: float) -> "PoincareSection":
        return PoincareSection(self.points * factor, self.t0, self.period,
                               self.skipped, self.provenance)


def occupancy_histogram(points: np.ndarray, bounds, bins: int = 64) -> np.ndarray:
    """Normalized 2-d occupancy histogram of (x, y) points over bounds."""
    (x0, x1), (y0, y1) = bounds
    h, _, _ = np.histogram2d(points[:, 0], points[:, 1], bins=bins,
                             range=[[x0, x1], [y0, y1]])
    total = h.sum()
    if total == 0:
        raise InvalidParameterError("no points fall inside the histogram bounds")
    return h / total


def joint_bounds(*point_sets, pad: float = 0.05):
    """Common bounding box of several point sets with a small margin."""
    pts = np.vstack(point_sets)
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    lo = lo - pad * span
    hi = hi + pad * span
    return (lo[0], hi[0]), (lo[1], hi[1])


def bhattacharyya(p: np.ndarray, q: np.ndarray) -> float:
    return float(np.sum(np.sqrt(p * q)))


def section_overlap(a: PoincareSection, b: PoincareSection, bins: int = 64) -> float:
    """Bhattacharyya coefficient of the two sections' occupancy histograms
    on their joint bounding box."""
    bounds = joint_bounds(a.points, b.points)
    return bhattacharyya(occupancy_histogram(a.points, bounds, bins),
                         occupancy_histogram(b.points, bounds, bins))
