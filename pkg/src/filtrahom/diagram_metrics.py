"""Bottleneck distance between persistence diagrams and the sup-norm stability check."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .builders_image import GrayscaleImage, threshold_filtration
from .complex_core import InputError
from .filtration_groups import PersistenceDiagram, barcode, filtration_homology

INF = math.inf
DIAGONAL = None

Pair = tuple[float, float]


@dataclass
class Matching:
    """Pairs of points (``None`` stands for the diagonal) and the bottleneck cost."""

    pairs: list[tuple[Optional[Pair], Optional[Pair]]]
    cost: float


def _linf(a: Pair, b: Pair) -> float:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def _half_life(a: Pair) -> float:
    return (a[1] - a[0]) / 2.0


def _finite_matching(A: Sequence[Pair], B: Sequence[Pair], eps: float):
    """Perfect matching of the diagonal-augmented diagrams at cost ``<= eps``, or None.

    Rows are ``A + diagonal copies of B``, columns ``B + diagonal copies of A``.
    """
    na, nb = len(A), len(B)
    size = na + nb
    if size == 0:
        return []
    rows, cols = [], []
    for i, a in enumerate(A):
        for j, b in enumerate(B):
            if _linf(a, b) <= eps:
                rows.append(i)
                cols.append(j)
        if _half_life(a) <= eps:
            rows.append(i)
            cols.append(nb + i)
    for j, b in enumerate(B):
        if _half_life(b) <= eps:
            rows.append(na + j)
            cols.append(j)
        for i in range(na):
            rows.append(na + j)
            cols.append(nb + i)
    graph = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(size, size))
    match = maximum_bipartite_matching(graph, perm_type="column")
    if (match < 0).any():
        return None
    pairs = []
    for r, c in enumerate(match):
        left = A[r] if r < na else DIAGONAL
        right = B[c] if c < nb else DIAGONAL
        if left is not DIAGONAL or right is not DIAGONAL:
            pairs.append((left, right))
    return pairs


def bottleneck_matching(D1: Sequence[Pair], D2: Sequence[Pair]) -> Matching:
    """Optimal bottleneck matching of two diagrams given as (birth, death) pairs.

    Points with infinite death are matched among themselves by sorted birth;
    unequal counts give an infinite distance.
    """
    fin1 = [tuple(map(float, x)) for x in D1 if x[1] != INF]
    fin2 = [tuple(map(float, x)) for x in D2 if x[1] != INF]
    inf1 = sorted(float(x[0]) for x in D1 if x[1] == INF)
    inf2 = sorted(float(x[0]) for x in D2 if x[1] == INF)
    if len(inf1) != len(inf2):
        return Matching([], INF)
    inf_pairs = [((a, INF), (b, INF)) for a, b in zip(inf1, inf2)]
    inf_cost = max((abs(a - b) for a, b in zip(inf1, inf2)), default=0.0)

    candidates = {0.0}
    candidates.update(_half_life(a) for a in fin1)
    candidates.update(_half_life(b) for b in fin2)
    candidates.update(_linf(a, b) for a in fin1 for b in fin2)
    candidates = sorted(candidates)
    lo, hi = 0, len(candidates) - 1
    best = _finite_matching(fin1, fin2, candidates[hi])
    while lo < hi:
        mid = (lo + hi) // 2
        found = _finite_matching(fin1, fin2, candidates[mid])
        if found is None:
            lo = mid + 1
        else:
            hi, best = mid, found
    return Matching(best + inf_pairs, max(candidates[lo], inf_cost))


def bottleneck_distance(D1, D2, dim: Optional[int] = None) -> float:
    """Bottleneck distance; accepts :class:`PersistenceDiagram` (with ``dim``) or pair lists."""
    if isinstance(D1, PersistenceDiagram):
        D1 = D1.pairs(dim)
    if isinstance(D2, PersistenceDiagram):
        D2 = D2.pairs(dim)
    return bottleneck_matching(D1, D2).cost


def sup_norm_diff(f: GrayscaleImage, g: GrayscaleImage) -> int:
    if f.levels.shape != g.levels.shape:
        raise InputError("images differ in size: %r vs %r" % (f.levels.shape, g.levels.shape))
    if f.levels.size == 0:
        return 0
    return int(np.abs(f.levels - g.levels).max())


def aligned_thresholds(f: GrayscaleImage, g: GrayscaleImage) -> list[int]:
    """Every integer from the smallest gray level to the largest plus one."""
    values = np.concatenate([f.levels.ravel(), g.levels.ravel()])
    if values.size == 0:
        return [0]
    return list(range(int(values.min()), int(values.max()) + 2))


@dataclass
class StabilityReport:
    sup_norm: float
    distances: dict[int, float]
    diagrams: tuple[PersistenceDiagram, PersistenceDiagram] = field(repr=False)
    persistence_diffs: dict[int, list[float]] = field(repr=False, default_factory=dict)

    @property
    def holds(self) -> bool:
        return all(d <= self.sup_norm for d in self.distances.values())


def stability_report(f: GrayscaleImage, g: GrayscaleImage, thresholds=None,
                     dims: Sequence[int] = (0, 1), p: int = 2) -> StabilityReport:
    """Diagrams of both images on one threshold grid, their distances and the sup-norm."""
    sup = sup_norm_diff(f, g)
    if thresholds is None:
        thresholds = aligned_thresholds(f, g)
    diagrams = tuple(barcode(filtration_homology(threshold_filtration(img, thresholds, p), max(dims)))
                     for img in (f, g))
    distances, diffs = {}, {}
    for d in dims:
        m = bottleneck_matching(diagrams[0].pairs(d), diagrams[1].pairs(d))
        distances[d] = m.cost
        diffs[d] = [_persistence_gap(a, b) for a, b in m.pairs]
    return StabilityReport(sup, distances, diagrams, diffs)


def _persistence_gap(a: Optional[Pair], b: Optional[Pair]) -> float:
    """Difference of the ``death - birth`` values of a matched pair (diagonal counts as 0)."""
    pa = 0.0 if a is None else a[1] - a[0]
    pb = 0.0 if b is None else b[1] - b[0]
    if pa == INF and pb == INF:
        return 0.0
    return abs(pa - pb)
