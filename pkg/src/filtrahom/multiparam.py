"""Two-parameter filtrations (bifiltrations) and their homology, noise and persistent groups.

Grid positions are 1-based ``(n, m)``: ``n`` grows along the first parameter
("rightward"), ``m`` along the second ("upward").  Zero maps are appended past
the last row and column.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from . import gf_linalg as gf
from .complex_core import (Cell, CellComplex, InputError, _check_nested, _check_prime,
                           _ordered, _parse_cells, _validated, inclusion_matrices)
from .homology_engine import HomologyError, homology_basis, induced_matrix


class Bifiltration:
    """Grid of complexes ``K[n][m]`` nested along both indices."""

    def __init__(self, grid: Sequence[Sequence[CellComplex]], p: int = 2, params=None):
        self.grid = [list(row) for row in grid]
        self.p = p
        self.params = params
        widths = {len(row) for row in self.grid}
        if len(widths) > 1:
            raise InputError("bifiltration rows have different lengths")
        self.s1 = len(self.grid)
        self.s2 = widths.pop() if widths else 0
        for n in range(1, self.s1 + 1):
            for m in range(1, self.s2 + 1):
                K = self[n, m]
                if K.p != p:
                    raise InputError("all grid complexes must share one field")
                if n < self.s1:
                    _check_nested(K, self[n + 1, m], "(%d,%d)" % (n, m), "(%d,%d)" % (n + 1, m))
                if m < self.s2:
                    _check_nested(K, self[n, m + 1], "(%d,%d)" % (n, m), "(%d,%d)" % (n, m + 1))

    def __getitem__(self, nm: tuple[int, int]) -> CellComplex:
        n, m = nm
        if not (1 <= n <= self.s1 and 1 <= m <= self.s2):
            raise IndexError("grid position %r out of range" % (nm,))
        return self.grid[n - 1][m - 1]

    @property
    def top_dim(self) -> int:
        return max((K.top_dim for row in self.grid for K in row), default=-1)

    def positions(self):
        for n in range(1, self.s1 + 1):
            for m in range(1, self.s2 + 1):
                yield n, m


class BifiltrationHomology:
    """Homology bases on the grid, unit maps in both directions, and slot groups."""

    def __init__(self, BF: Bifiltration, max_dim: Optional[int] = None):
        self.BF = BF
        self.p = BF.p
        top = BF.top_dim if max_dim is None else max_dim
        self.dims = list(range(max(top, 0) + 1))
        self.bases = {(n, m, d): homology_basis(BF[n, m], d)
                      for n, m in BF.positions() for d in self.dims}
        self.right: dict = {}
        self.up: dict = {}
        for n, m in BF.positions():
            for direction, (n2, m2) in (("right", (n + 1, m)), ("up", (n, m + 1))):
                table = self.right if direction == "right" else self.up
                inside = n2 <= BF.s1 and m2 <= BF.s2
                inc = inclusion_matrices(BF[n, m], BF[n2, m2]) if inside else None
                for d in self.dims:
                    src = self.bases[n, m, d]
                    if inside:
                        K, L = BF[n, m], BF[n2, m2]
                        push = inc.get(d, np.zeros((L.count(d), K.count(d)), np.int64))
                        table[n, m, d] = induced_matrix(src, self.bases[n2, m2, d], push)
                    else:
                        table[n, m, d] = np.zeros((0, src.betti), dtype=np.int64)
        self._composites: dict = {}
        self.slots = {(n, m, d): self._slot(n, m, d) for n, m in BF.positions() for d in self.dims}

    def betti(self, n: int, m: int, d: int) -> int:
        return self.bases[n, m, d].betti

    def composite(self, a: int, b: int, n: int, m: int, d: int) -> np.ndarray:
        """Matrix of ``i_*(a, b, n, m)``; positions past the grid give the zero group."""
        key = (a, b, n, m, d)
        if key in self._composites:
            return self._composites[key]
        if n > self.BF.s1 or m > self.BF.s2:
            M = np.zeros((0, self.betti(a, b, d)), dtype=np.int64)
        elif (a, b) == (n, m):
            M = np.eye(self.betti(a, b, d), dtype=np.int64)
        elif m > b:
            M = (self.up[n, m - 1, d] @ self.composite(a, b, n, m - 1, d)) % self.p
        else:
            M = (self.right[n - 1, m, d] @ self.composite(a, b, n - 1, m, d)) % self.p
        self._composites[key] = M
        return M

    def _slot(self, n: int, m: int, d: int) -> gf.Subspace:
        if self.betti(n, m, d) == 0:
            return gf.Subspace.zero(0, self.p)
        return gf.intersect(gf.kernel_basis(self.right[n, m, d], self.p),
                            gf.kernel_basis(self.up[n, m, d], self.p))

    def rank(self, d: int) -> int:
        return sum(self.slots[n, m, d].dim for n, m in self.BF.positions())

    def persistent_part(self, n: int, m: int, d: int, p: int, q: int) -> gf.Subspace:
        """Slot group at ``(n, m)`` intersected with the image from ``(n+1-p, m+1-q)``."""
        slot = self.slots[n, m, d]
        a, b = n + 1 - p, m + 1 - q
        if a < 1 or b < 1 or slot.dim == 0:
            return gf.Subspace.zero(slot.ambient_dim, self.p)
        return gf.intersect(slot, gf.image_basis(self.composite(a, b, n, m, d), self.p))


def bifiltration_homology(BF: Bifiltration, max_dim: Optional[int] = None) -> BifiltrationHomology:
    return BifiltrationHomology(BF, max_dim)


def bipersistence_region(BH: BifiltrationHomology, n: int, m: int, d: int, x) -> tuple[int, int]:
    """Corner ``(p, q)`` of the region where ``x`` dies in both directions.

    ``p`` is the least rightward step count killing ``x`` and ``q`` the least
    upward one; every ``(p', q')`` with ``p' >= p`` and ``q' >= q`` also works.
    """
    x = gf.as_field(x, BH.p).ravel()
    if x.shape[0] != BH.betti(n, m, d):
        raise InputError("class has the wrong number of coordinates")
    if not x.any():
        raise InputError("the persistence of the zero class is undefined")
    corner = []
    for steps, along in ((BH.BF.s1 + 1 - n, lambda j: (n + j, m)),
                         (BH.BF.s2 + 1 - m, lambda j: (n, m + j))):
        for j in range(1, steps + 1):
            n2, m2 = along(j)
            if not ((BH.composite(n, m, n2, m2, d) @ x) % BH.p).any():
                corner.append(j)
                break
        else:
            raise HomologyError("class survived the appended zero map")
    return corner[0], corner[1]


def persistent_group_of_bifiltration(BH: BifiltrationHomology, p: int, q: int) -> dict:
    """Ranks of ``H``, ``N^{pq}`` and ``H^{pq}`` per dimension."""
    if p < 1 or q < 1:
        raise InputError("p and q must be >= 1")
    H = {d: BH.rank(d) for d in BH.dims}
    P = {d: sum(BH.persistent_part(n, m, d, p, q).dim for n, m in BH.BF.positions())
         for d in BH.dims}
    return {"H": H, "persistent": P, "noise": {d: H[d] - P[d] for d in BH.dims}}


def bifiltration_from_json(doc: dict, p: Optional[int] = None) -> Bifiltration:
    """Parse ``{"field": p, "grid": [[cells, ...], ...]}``.

    Entry ``grid[n][m]`` lists the cells added at ``(n, m)``; the complex at
    ``(n, m)`` is the union of all entries ``(a, b)`` with ``a <= n`` and ``b <= m``.
    """
    if not isinstance(doc, dict):
        raise InputError("$: expected an object")
    p = _check_prime(p if p is not None else doc.get("field", 2), "$.field")
    raw = doc.get("grid")
    if not isinstance(raw, list) or not all(isinstance(r, list) for r in raw):
        raise InputError("$.grid: expected an array of arrays")
    new = [[_parse_cells(entry, "$.grid[%d][%d]" % (n, m), p) for m, entry in enumerate(row)]
           for n, row in enumerate(raw)]
    grid = []
    for n, row in enumerate(new):
        out_row = []
        for m in range(len(row)):
            cells: list[Cell] = []
            seen: dict = {}
            for a in range(n + 1):
                for b in range(m + 1):
                    if b >= len(new[a]):
                        raise InputError("$.grid[%d]: rows have different lengths" % a)
                    for c in new[a][b]:
                        if c.id in seen:
                            raise InputError("$.grid[%d][%d]: duplicate cell id %r" % (a, b, c.id))
                        seen[c.id] = c
                        cells.append(c)
            out_row.append(_validated(CellComplex(_ordered(cells), p), "$.grid[%d][%d]" % (n, m)))
        grid.append(out_row)
    return Bifiltration(grid, p)


def constant_bifiltration(K: CellComplex, s1: int, s2: int) -> Bifiltration:
    return Bifiltration([[K] * s2 for _ in range(s1)], K.p)


def row_constant_bifiltration(steps: Sequence[CellComplex], s2: int) -> Bifiltration:
    """Grid whose rows repeat a one-parameter filtration: ``K[n][m] = steps[n]``."""
    p = steps[0].p if steps else 2
    return Bifiltration([[K] * s2 for K in steps], p)
