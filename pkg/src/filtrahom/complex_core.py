"""Cell complexes, boundary operators and filtrations of nested complexes.

Cells carry stable hashable ids.  A filtration's inclusions are the identity
on ids, so every inclusion chain map is a 0/1 selection matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Optional, Sequence

import numpy as np


class InputError(ValueError):
    """Malformed user input (fixtures, images, thresholds)."""


@dataclass(frozen=True)
class Cell:
    id: Hashable
    dim: int
    faces: tuple[tuple[Hashable, int], ...] = ()


class CellComplex:
    """A finite cell complex over GF(p).

    Cells are grouped by dimension and keep the order in which they were given;
    that order indexes the rows and columns of every boundary matrix.
    """

    def __init__(self, cells: Iterable[Cell] = (), p: int = 2):
        self.p = p
        self._by_dim: dict[int, list[Cell]] = {}
        self._where: dict[Hashable, tuple[int, int]] = {}
        for cell in cells:
            if cell.id in self._where:
                raise InputError("duplicate cell id %r" % (cell.id,))
            bucket = self._by_dim.setdefault(cell.dim, [])
            self._where[cell.id] = (cell.dim, len(bucket))
            bucket.append(cell)

    @property
    def top_dim(self) -> int:
        """Largest dimension present, -1 for the empty complex."""
        return max(self._by_dim, default=-1)

    def cells(self, k: int) -> list[Cell]:
        return self._by_dim.get(k, [])

    def all_cells(self) -> list[Cell]:
        return [c for k in sorted(self._by_dim) for c in self._by_dim[k]]

    def count(self, k: int) -> int:
        return len(self._by_dim.get(k, ()))

    def position(self, cell_id: Hashable) -> int:
        return self._where[cell_id][1]

    def __contains__(self, cell_id) -> bool:
        return cell_id in self._where

    def __len__(self) -> int:
        return len(self._where)

    def cell(self, cell_id: Hashable) -> Cell:
        k, i = self._where[cell_id]
        return self._by_dim[k][i]

    @cached_property
    def _boundaries(self) -> dict[int, np.ndarray]:
        return {}

    def boundary_matrix(self, k: int) -> np.ndarray:
        """Matrix of the boundary map from k-chains to (k-1)-chains.

        Columns index k-cells, rows index (k-1)-cells.  Faces that are missing
        from the complex are skipped; :func:`validate` reports them.
        """
        if k in self._boundaries:
            return self._boundaries[k]
        rows, cols = self.count(k - 1), self.count(k)
        D = np.zeros((rows, cols), dtype=np.int64)
        if k >= 1:
            for j, cell in enumerate(self.cells(k)):
                for face_id, coeff in cell.faces:
                    where = self._where.get(face_id)
                    if where is None or where[0] != k - 1:
                        continue
                    D[where[1], j] = (D[where[1], j] + coeff) % self.p
        D.setflags(write=False)
        self._boundaries[k] = D
        return D

    def chain(self, k: int, ids: Iterable[Hashable]) -> np.ndarray:
        v = np.zeros(self.count(k), dtype=np.int64)
        for cid in ids:
            v[self.position(cid)] = 1
        return v

    def support(self, k: int, vector) -> list[Hashable]:
        """Ids of the k-cells with nonzero coefficient in ``vector``."""
        cells = self.cells(k)
        return [cells[i].id for i in np.flatnonzero(np.asarray(vector) % self.p)]

    def __repr__(self):
        counts = ", ".join("%d:%d" % (k, len(v)) for k, v in sorted(self._by_dim.items()))
        return "CellComplex(p=%d, cells={%s})" % (self.p, counts)


def boundary_matrix(K: CellComplex, k: int) -> np.ndarray:
    return K.boundary_matrix(k)


def validate(K: CellComplex) -> list[str]:
    """Check face closure, dimension consistency and that the boundary squares to zero.

    Returns the list of violations; an empty list means the complex is valid.
    """
    problems = []
    for k in range(0, K.top_dim + 1):
        for cell in K.cells(k):
            if k == 0 and cell.faces:
                problems.append("0-cell %r has faces" % (cell.id,))
            for face_id, _ in cell.faces:
                if face_id not in K:
                    problems.append("cell %r: face %r is missing" % (cell.id, face_id))
                elif K.cell(face_id).dim != k - 1:
                    problems.append("cell %r: face %r has dimension %d, expected %d"
                                    % (cell.id, face_id, K.cell(face_id).dim, k - 1))
    for k in range(2, K.top_dim + 1):
        prod = (K.boundary_matrix(k - 1) @ K.boundary_matrix(k)) % K.p
        for j in np.flatnonzero(prod.any(axis=0)):
            problems.append("boundary of boundary of %r is nonzero" % (K.cells(k)[j].id,))
    return problems


class Filtration:
    """Nested complexes ``K^1 ⊆ K^2 ⊆ ... ⊆ K^s`` sharing cell ids."""

    def __init__(self, steps: Sequence[CellComplex],
                 param_values: Optional[Sequence[float]] = None, p: Optional[int] = None):
        self.steps = list(steps)
        if p is None:
            p = self.steps[0].p if self.steps else 2
        self.p = p
        if any(K.p != p for K in self.steps):
            raise InputError("all steps must share one coefficient field")
        if param_values is not None:
            param_values = [float(r) for r in param_values]
            if len(param_values) != len(self.steps):
                raise InputError("got %d parameter values for %d steps"
                                 % (len(param_values), len(self.steps)))
            if any(b <= a for a, b in zip(param_values, param_values[1:])):
                raise InputError("parameter values must strictly increase")
        self.param_values = param_values
        for n in range(len(self.steps) - 1):
            _check_nested(self.steps[n], self.steps[n + 1], "step %d" % (n + 1), "step %d" % (n + 2))

    @property
    def s(self) -> int:
        return len(self.steps)

    def __len__(self):
        return len(self.steps)

    def __getitem__(self, n: int) -> CellComplex:
        """1-based access to the steps."""
        if not 1 <= n <= self.s:
            raise IndexError("step %d out of range 1..%d" % (n, self.s))
        return self.steps[n - 1]

    @property
    def top_dim(self) -> int:
        return max((K.top_dim for K in self.steps), default=-1)

    @classmethod
    def from_increments(cls, increments: Sequence[Iterable[Cell]], p: int = 2,
                        param_values=None) -> "Filtration":
        """Build steps cumulatively; each increment lists only the new cells."""
        steps, acc = [], []
        for new in increments:
            acc = acc + list(new)
            steps.append(CellComplex(acc, p))
        return cls(steps, param_values, p)


def _check_nested(K: CellComplex, L: CellComplex, k_name: str, l_name: str) -> None:
    for cell in K.all_cells():
        if cell.id not in L:
            raise InputError("%s is not contained in %s: cell %r missing" % (k_name, l_name, cell.id))
        other = L.cell(cell.id)
        if (other is cell or other == cell) and K.p == L.p:
            continue
        if other.dim != cell.dim or _norm_faces(other, L.p) != _norm_faces(cell, K.p):
            raise InputError("cell %r differs between %s and %s" % (cell.id, k_name, l_name))


def _norm_faces(cell: Cell, p: int) -> dict:
    out: dict = {}
    for fid, c in cell.faces:
        out[fid] = (out.get(fid, 0) + c) % p
    return {f: c for f, c in out.items() if c}


def inclusion_chain_map(F: Filtration, n: int, m: int) -> dict[int, np.ndarray]:
    """Per-dimension 0/1 matrices of the inclusion ``K^n -> K^m`` (1-based)."""
    if not (1 <= n <= m <= F.s):
        raise IndexError("need 1 <= n <= m <= %d, got n=%d, m=%d" % (F.s, n, m))
    return inclusion_matrices(F[n], F[m])


def inclusion_matrices(K: CellComplex, L: CellComplex) -> dict[int, np.ndarray]:
    top = max(K.top_dim, L.top_dim)
    out = {}
    for k in range(top + 1):
        M = np.zeros((L.count(k), K.count(k)), dtype=np.int64)
        for j, cell in enumerate(K.cells(k)):
            M[L.position(cell.id), j] = 1
        out[k] = M
    return out


def disjoint_union(K: CellComplex, L: CellComplex, tags=("K", "L")) -> CellComplex:
    """Union of two complexes with ids tagged ``(tag, id)`` to keep them apart."""
    cells = []
    for tag, X in zip(tags, (K, L)):
        for c in X.all_cells():
            cells.append(Cell((tag, c.id), c.dim, tuple(((tag, f), a) for f, a in c.faces)))
    return CellComplex(sorted(cells, key=lambda c: c.dim), K.p)


def disjoint_union_filtration(F: Filtration, G: Filtration) -> Filtration:
    if F.s != G.s:
        raise InputError("filtrations have different lengths")
    return Filtration([disjoint_union(K, L) for K, L in zip(F.steps, G.steps)], p=F.p)


# --- fixture JSON -----------------------------------------------------------

def _parse_cells(raw, where: str, p: int) -> list[Cell]:
    if not isinstance(raw, list):
        raise InputError("%s: expected an array of cells" % where)
    cells = []
    for i, entry in enumerate(raw):
        here = "%s[%d]" % (where, i)
        if not isinstance(entry, dict):
            raise InputError("%s: expected an object" % here)
        cid, dim, faces = entry.get("id"), entry.get("dim"), entry.get("faces", [])
        if not isinstance(cid, str):
            raise InputError("%s.id: expected a string" % here)
        if not isinstance(dim, int) or isinstance(dim, bool) or dim < 0:
            raise InputError("%s.dim: expected a non-negative integer" % here)
        if not isinstance(faces, list):
            raise InputError("%s.faces: expected an array" % here)
        parsed = []
        for j, face in enumerate(faces):
            if (not isinstance(face, list) or len(face) != 2 or not isinstance(face[0], str)
                    or not isinstance(face[1], int) or isinstance(face[1], bool)):
                raise InputError("%s.faces[%d]: expected [face_id, coefficient]" % (here, j))
            parsed.append((face[0], face[1] % p))
        cells.append(Cell(cid, dim, tuple(parsed)))
    return cells


def _check_prime(p, where: str) -> int:
    if not isinstance(p, int) or isinstance(p, bool) or p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
        raise InputError("%s: expected a prime, got %r" % (where, p))
    return p


def _ordered(cells: list[Cell]) -> list[Cell]:
    return sorted(cells, key=lambda c: c.dim)


def _validated(K: CellComplex, where: str) -> CellComplex:
    problems = validate(K)
    if problems:
        raise InputError("%s: %s" % (where, problems[0]))
    return K


def filtration_from_json(doc: dict, p: Optional[int] = None) -> Filtration:
    """Parse the fixture format ``{"field": p, "steps": [[cell, ...], ...]}``.

    Later steps list only newly added cells.  ``p`` overrides ``field``.
    """
    if not isinstance(doc, dict):
        raise InputError("$: expected an object")
    p = _check_prime(p if p is not None else doc.get("field", 2), "$.field")
    raw_steps = doc.get("steps")
    if not isinstance(raw_steps, list):
        raise InputError("$.steps: expected an array")
    acc: list[Cell] = []
    steps = []
    for n, raw in enumerate(raw_steps):
        where = "$.steps[%d]" % n
        acc = acc + _parse_cells(raw, where, p)
        try:
            K = CellComplex(_ordered(acc), p)
        except InputError as exc:
            raise InputError("%s: %s" % (where, exc)) from None
        steps.append(_validated(K, where))
    params = doc.get("param_values")
    return Filtration(steps, params, p)


def filtration_to_json(F: Filtration) -> dict:
    steps, seen = [], set()
    for K in F.steps:
        new = [c for c in K.all_cells() if c.id not in seen]
        seen.update(c.id for c in new)
        steps.append([{"id": str(c.id), "dim": c.dim,
                       "faces": [[str(f), int(a)] for f, a in c.faces]} for c in new])
    doc = {"field": F.p, "steps": steps}
    if F.param_values is not None:
        doc["param_values"] = list(F.param_values)
    return doc
