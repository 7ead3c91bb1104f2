"""Vietoris-Rips filtrations and radius x density bifiltrations of point clouds."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .complex_core import Cell, CellComplex, Filtration, InputError


class PointCloud:
    def __init__(self, points, dim: Optional[int] = None):
        arr = np.asarray(points, dtype=float)
        if arr.size == 0:
            arr = arr.reshape(0, dim or 1)
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise InputError("points must form an (n, d) array with d >= 1")
        self.points = arr
        self.points.setflags(write=False)

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def scaled(self, c: float) -> "PointCloud":
        return PointCloud(self.points * c)

    def sq_distances(self) -> np.ndarray:
        diff = self.points[:, None, :] - self.points[None, :, :]
        return np.einsum("ijk,ijk->ij", diff, diff)


def _simplex_cells(simplices: list[tuple[int, ...]], p: int) -> list[Cell]:
    cells = []
    for sigma in simplices:
        if len(sigma) == 1:
            cells.append(Cell(sigma, 0))
            continue
        faces = tuple((sigma[:i] + sigma[i + 1:], 1 if i % 2 == 0 else p - 1)
                      for i in range(len(sigma)))
        cells.append(Cell(sigma, len(sigma) - 1, faces))
    return cells


def _cliques(close: np.ndarray, vertices: Sequence[int], max_dim: int) -> list[tuple[int, ...]]:
    """All cliques of up to ``max_dim + 1`` vertices, as sorted index tuples."""
    vertices = sorted(vertices)
    out = [(v,) for v in vertices]
    frontier = list(out)
    for _ in range(max_dim):
        nxt = []
        for sigma in frontier:
            last = sigma[-1]
            for v in vertices:
                if v > last and all(close[u, v] for u in sigma):
                    nxt.append(sigma + (v,))
        out.extend(nxt)
        frontier = nxt
    return out


def rips_complex(cloud: PointCloud, r: float, max_dim: int = 2, p: int = 2,
                 vertices: Optional[Sequence[int]] = None) -> CellComplex:
    """Rips complex at radius ``r``: simplices of points pairwise within distance ``<= r``.

    ``vertices`` restricts the construction to a subset of point indices.
    """
    if r < 0 or max_dim < 0:
        raise InputError("radius and max_dim must be non-negative")
    if vertices is None:
        vertices = range(len(cloud))
    close = cloud.sq_distances() <= r * r
    simplices = _cliques(close, vertices, max_dim)
    simplices.sort(key=lambda s: (len(s), s))
    return CellComplex(_simplex_cells(simplices, p), p)


def _check_increasing(values, name: str) -> list[float]:
    values = [float(v) for v in values]
    if not values:
        raise InputError("%s: at least one value is required" % name)
    if any(b <= a for a, b in zip(values, values[1:])):
        raise InputError("%s must strictly increase: %r" % (name, values))
    return values


def rips_filtration(cloud: PointCloud, radii: Sequence[float], max_dim: int = 2,
                    p: int = 2) -> Filtration:
    radii = _check_increasing(radii, "radii")
    if radii[0] < 0:
        raise InputError("radii must be non-negative")
    return Filtration([rips_complex(cloud, r, max_dim, p) for r in radii], radii, p)


def neighbor_counts(cloud: PointCloud, density_radius: float) -> np.ndarray:
    """Number of *other* points within ``density_radius`` of each point."""
    close = cloud.sq_distances() <= density_radius * density_radius
    return close.sum(axis=1) - 1


def density_radius_bifiltration(cloud: PointCloud, radii: Sequence[float],
                                density_thresholds: Sequence[int], density_radius: float,
                                max_dim: int = 2, p: int = 2):
    """Grid ``K[n][m]``: Rips at ``radii[n]`` on points with at least
    ``density_thresholds[m]`` neighbors within ``density_radius``."""
    from .multiparam import Bifiltration

    radii = _check_increasing(radii, "radii")
    thresholds = [int(t) for t in density_thresholds]
    if not thresholds:
        raise InputError("density thresholds: at least one value is required")
    if any(b >= a for a, b in zip(thresholds, thresholds[1:])) or min(thresholds) < 0:
        raise InputError("density thresholds must be non-negative and strictly decrease: %r"
                         % (thresholds,))
    counts = neighbor_counts(cloud, density_radius) if len(cloud) else np.zeros(0, int)
    grid = []
    for r in radii:
        row = []
        for t in thresholds:
            keep = [i for i in range(len(cloud)) if counts[i] >= t]
            row.append(rips_complex(cloud, r, max_dim, p, vertices=keep))
        grid.append(row)
    return Bifiltration(grid, p=p, params=(radii, thresholds))


def read_csv_cloud(path) -> PointCloud:
    """One point per line, comma-separated; lines starting with ``#`` are skipped."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError("cannot read %s: %s" % (path, exc.strerror)) from None
    rows = []
    lines = (line for line in text.splitlines() if not line.lstrip().startswith("#"))
    reader = csv.reader(lines, skipinitialspace=True)
    for record in reader:
        if not any(field.strip() for field in record):
            continue
        try:
            rows.append([float(t) for t in record])
        except ValueError:
            raise InputError("%s: record %d: non-numeric coordinate" % (path, reader.line_num)) from None
        if len(rows[-1]) != len(rows[0]):
            raise InputError("%s: record %d: expected %d coordinates"
                             % (path, reader.line_num, len(rows[0])))
    return PointCloud(rows)
