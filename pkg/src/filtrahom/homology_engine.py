"""Homology bases, inclusion-induced maps and mapping cones."""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import gf_linalg as gf
from .complex_core import CellComplex, Filtration, inclusion_matrices


class HomologyError(RuntimeError):
    """An internal invariant of the homology computation failed."""


@dataclass(frozen=True, eq=False)
class HomologyBasis:
    """Cycle representatives of a basis of ``H_k(K)``.

    ``generators`` holds one cycle per row (coordinates over the k-cells).
    ``coords`` is a linear functional with ``coords @ z`` the class of a cycle
    ``z`` in this basis.
    """

    complex: CellComplex = field(repr=False)
    dim: int
    generators: np.ndarray = field(repr=False)
    coords: np.ndarray = field(repr=False)

    @property
    def betti(self) -> int:
        return self.generators.shape[0]

    @property
    def p(self) -> int:
        return self.complex.p

    def class_of(self, cycle) -> np.ndarray:
        return (self.coords @ np.asarray(cycle)) % self.p

    def cycle_of(self, class_coords) -> np.ndarray:
        """A cycle representing the class with the given coordinates."""
        return (np.asarray(class_coords, dtype=np.int64) @ self.generators) % self.p


_REDUCED: "weakref.WeakKeyDictionary[CellComplex, dict]" = weakref.WeakKeyDictionary()


def _reduced_boundary(K: CellComplex, k: int):
    """Row transform ``(R, T, pivots)`` of ``∂_k``, computed once per complex."""
    memo = _REDUCED.setdefault(K, {})
    if k not in memo:
        memo[k] = gf.row_transform(K.boundary_matrix(k), K.p)
    return memo[k]


def cycle_basis(K: CellComplex, k: int) -> gf.Subspace:
    n = K.count(k)
    if k == 0 or K.count(k - 1) == 0:
        return gf.Subspace.full(n, K.p)
    R, _, pivots = _reduced_boundary(K, k)
    return gf.kernel_from_rref(R, pivots, n, K.p)


def homology_basis(K: CellComplex, k: int) -> HomologyBasis:
    """Deterministic basis of ``H_k(K)``: cycles of ``ker ∂_k`` independent modulo ``im ∂_{k+1}``."""
    p = K.p
    n = K.count(k)
    Z = cycle_basis(K, k).basis
    if Z.shape[0] == 0:
        empty = np.zeros((0, n), dtype=np.int64)
        return HomologyBasis(K, k, empty, empty)
    # Row-reduce [∂_{k+1} | Z^T | I]: the boundary block is the cached transform
    # (R_B, T_B), so elimination resumes on [T_B Z^T | T_B] below rank(∂_{k+1}).
    # Pivots in the cycle block pick cycles independent modulo boundaries, and
    # the matching rows of the accumulated transform read off class coordinates.
    _, TB, pivB = _reduced_boundary(K, k + 1)
    rB, z = len(pivB), Z.shape[0]
    aug, pivZ = gf.continue_elimination(
        np.concatenate([gf.matmul(TB, Z.T, p), TB], axis=1), p, z, rB)
    G = Z[pivZ]
    Q = aug[rB:rB + len(pivZ), z:]
    G.setflags(write=False)
    Q.setflags(write=False)
    return HomologyBasis(K, k, G, Q)


def all_bases(K: CellComplex, top: int) -> list[HomologyBasis]:
    return [homology_basis(K, k) for k in range(top + 1)]


def betti_numbers(K: CellComplex, top: int | None = None) -> list[int]:
    top = K.top_dim if top is None else top
    return [homology_basis(K, k).betti for k in range(top + 1)]


def is_boundary(K: CellComplex, k: int, chain) -> bool:
    return np.asarray(chain) in gf.image_basis(K.boundary_matrix(k + 1), K.p)


@dataclass(frozen=True, eq=False)
class InducedMap:
    source: HomologyBasis = field(repr=False)
    target: HomologyBasis = field(repr=False)
    matrix: np.ndarray

    @property
    def rank(self) -> int:
        return gf.rank(self.matrix, self.source.p)


def induced_matrix(src: HomologyBasis, dst: HomologyBasis, push: np.ndarray,
                   check: bool = False) -> np.ndarray:
    """Matrix of the map on homology induced by the chain map ``push`` (dst cells x src cells)."""
    p = src.p
    if src.betti == 0 or dst.betti == 0:
        return np.zeros((dst.betti, src.betti), dtype=np.int64)
    pushed = (src.generators @ push.T) % p
    M = (dst.coords @ pushed.T) % p
    if check:
        residual = (pushed - M.T @ dst.generators) % p
        for j, r in enumerate(residual):
            if r.any() and not is_boundary(dst.complex, dst.dim, r):
                raise HomologyError("pushed generator %d is not homologous to its solved class" % j)
    return M


def induced_map(F: Filtration, n: int, m: int, k: int,
                bases: dict | None = None, check: bool = False) -> InducedMap:
    """Induced map ``H_k(K^n) -> H_k(K^m)`` in the deterministic bases (1-based steps)."""
    if not 1 <= n <= m <= F.s:
        raise IndexError("need 1 <= n <= m <= %d" % F.s)
    src = bases[n][k] if bases else homology_basis(F[n], k)
    dst = bases[m][k] if bases else homology_basis(F[m], k)
    push = inclusion_matrices(F[n], F[m]).get(k, np.zeros((0, 0), np.int64))
    return InducedMap(src, dst, induced_matrix(src, dst, push, check))


def compose(maps: Sequence[InducedMap]) -> InducedMap:
    """Composite of ``maps`` applied left to right."""
    if not maps:
        raise ValueError("nothing to compose")
    M = maps[0].matrix
    for prev, nxt in zip(maps, maps[1:]):
        if prev.target is not nxt.source:
            raise ValueError("cannot compose: target and source bases differ")
        M = (nxt.matrix @ M) % nxt.source.p
    return InducedMap(maps[0].source, maps[-1].target, M)


# --- chain complexes and cones ---------------------------------------------

@dataclass
class ChainComplex:
    """Finite chain complex: ``dims[k]`` chain ranks, ``differentials[k]`` from degree k to k-1."""

    dims: dict[int, int]
    differentials: dict[int, np.ndarray]
    p: int = 2

    def differential(self, k: int) -> np.ndarray:
        if k in self.differentials:
            return self.differentials[k]
        return np.zeros((self.dims.get(k - 1, 0), self.dims.get(k, 0)), dtype=np.int64)

    def betti(self, k: int) -> int:
        n = self.dims.get(k, 0)
        return n - gf.rank(self.differential(k), self.p) - gf.rank(self.differential(k + 1), self.p)

    def squares_to_zero(self) -> bool:
        for k in self.dims:
            prod = (self.differential(k) @ self.differential(k + 1)) % self.p
            if prod.any():
                return False
        return True

    @property
    def degrees(self) -> range:
        return range(min(self.dims, default=0), max(self.dims, default=-1) + 1)


def cone_of_inclusion(K: CellComplex, L: CellComplex) -> ChainComplex:
    """Mapping cone of ``K ⊆ L``: degree k is ``C_{k-1}(K) ⊕ C_k(L)``.

    The differential is ``(a, b) -> (-∂a, i(a) + ∂b)``.
    """
    p = K.p
    top = max(K.top_dim, L.top_dim) + 1
    inc = inclusion_matrices(K, L)
    dims = {k: K.count(k - 1) + L.count(k) for k in range(top + 1)}
    diffs = {}
    for k in range(1, top + 1):
        nK_src, nL_src = K.count(k - 1), L.count(k)
        nK_dst, nL_dst = K.count(k - 2), L.count(k - 1)
        D = np.zeros((nK_dst + nL_dst, nK_src + nL_src), dtype=np.int64)
        if k >= 2:
            D[:nK_dst, :nK_src] = (-K.boundary_matrix(k - 1)) % p
        D[nK_dst:, :nK_src] = inc.get(k - 1, np.zeros((nL_dst, nK_src), np.int64))
        D[nK_dst:, nK_src:] = L.boundary_matrix(k)
        diffs[k] = D
    cone = ChainComplex(dims, diffs, p)
    if not cone.squares_to_zero():
        raise HomologyError("cone differential does not square to zero")
    return cone


def mapping_cone(F: Filtration, n: int, m: int | None = None) -> ChainComplex:
    """Cone of the inclusion ``K^n -> K^{n+1}`` (1-based)."""
    if m is None:
        m = n + 1
    if m != n + 1 or not 1 <= n < F.s:
        raise IndexError("the cone is built for consecutive steps only")
    return cone_of_inclusion(F[n], F[m])
