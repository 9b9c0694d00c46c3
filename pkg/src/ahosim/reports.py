"""Artifact serialization: delimited data files, density-matrix snapshots,
gnuplot matrices and rendered matplotlib figures."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import InvalidStateError  # noqa: E402
from .fock import DensityMatrix  # noqa: E402


def write_trajectory_csv(path, rec):
    with open(path, "w") as f:
        f.write("t,mean_n,re_a,im_a,mean_n2,mandel_q,norm_defect\n")
        for i in range(rec.times.size):
            f.write(f"{rec.times[i]:.12g},{rec.mean_n[i]:.12g},"
                    f"{rec.mean_a[i].real:.12g},{rec.mean_a[i].imag:.12g},"
                    f"{rec.mean_n2[i]:.12g},{rec.mandel_q[i]:.12g},"
                    f"{rec.norm_defect[i]:.12g}\n")


def write_ensemble_csv(path, res):
    with open(path, "w") as f:
        f.write("t,mean_n,se_n,re_a,se_re_a,im_a,se_im_a,mean_n2,mandel_q\n")
        for i in range(res.times.size):
            f.write(f"{res.times[i]:.12g},{res.mean_n[i]:.12g},{res.se_n[i]:.12g},"
                    f"{res.mean_a[i].real:.12g},{res.se_re_a[i]:.12g},"
                    f"{res.mean_a[i].imag:.12g},{res.se_im_a[i]:.12g},"
                    f"{res.mean_n2[i]:.12g},{res.mandel_q[i]:.12g}\n")


def write_section_csv(path, section):
    with open(path, "w") as f:
        f.write("n,x,y\n")
        for i, (x, y) in enumerate(section.points):
            f.write(f"{i},{x:.12g},{y:.12g}\n")


def write_density_csv(path, rho: DensityMatrix, t: float):
    """Row-major complex pairs; first line carries dim and snapshot time."""
    with open(path, "w") as f:
        f.write(f"{rho.dim},{t:.12g}\n")
        for v in rho.entries.ravel():
            f.write(f"{v.real:.17g},{v.imag:.17g}\n")


def read_density_csv(path):
    with open(path) as f:
        head = f.readline().strip().split(",")
        dim, t = int(head[0]), float(head[1])
        data = np.loadtxt(f, delimiter=",")
    if data.shape != (dim * dim, 2):
        raise InvalidStateError(f"density file {path} has wrong shape {data.shape}")
    return DensityMatrix((data[:, 0] + 1j * data[:, 1]).reshape(dim, dim)), t


def write_wigner_csv(path, grid):
    with open(path, "w") as f:
        f.write("x,y,w\n")
        for j, yv in enumerate(grid.y):
            for i, xv in enumerate(grid.x):
                f.write(f"{xv:.9g},{yv:.9g},{grid.values[j, i]:.12g}\n")


def write_wigner_matrix(path, grid):
    """Gnuplot nonuniform-matrix layout: first row holds x coordinates."""
    with open(path, "w") as f:
        f.write(" ".join([str(grid.x.size)] + [f"{v:.9g}" for v in grid.x]) + "\n")
        for j, yv in enumerate(grid.y):
            row = " ".join(f"{v:.9g}" for v in grid.values[j])
            f.write(f"{yv:.9g} {row}\n")


def write_contours_csv(path, contour_sets):
    with open(path, "w") as f:
        f.write("level,segment_id,x,y\n")
        for level, polylines in contour_sets:
            for sid, line in enumerate(polylines):
                for x, y in line:
                    f.write(f"{level:.9g},{sid},{x:.12g},{y:.12g}\n")


def write_json(path, payload):
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------

def fig_sections(path, sections, labels=None, title=None):
    fig, ax = plt.subplots(figsize=(6, 6))
    for i, sec in enumerate(sections):
        lbl = labels[i] if labels else None
        ax.plot(sec.points[:, 0], sec.points[:, 1], ".", ms=1.5, label=lbl)
    ax.set_xlabel("x = Re alpha")
    ax.set_ylabel("y = Im alpha")
    if title:
        ax.set_title(title)
    if labels:
        ax.legend(markerscale=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def fig_series(path, t, y, ylabel, se=None, title=None):
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t, y, lw=0.8)
    if se is not None:
        ax.fill_between(t, y - se, y + se, alpha=0.3, lw=0)
    ax.set_xlabel("gamma t")
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def fig_wigner(path, grid, levels=None, title=None):
    fig, ax = plt.subplots(figsize=(6.4, 5.4))
    vmax = float(np.max(np.abs(grid.values)))
    im = ax.pcolormesh(grid.x, grid.y, grid.values, cmap="RdBu_r",
                       vmin=-vmax, vmax=vmax, shading="auto")
    if levels:
        ax.contour(grid.x, grid.y, grid.values, levels=sorted(levels),
                   colors="k", linewidths=0.5)
    fig.colorbar(im, ax=ax, label="W")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
