"""Homology group of a filtration, noise groups and persistent quotient groups.

The homology group of a filtration is the direct sum over slots ``k`` of
``ker i_*^{k,k+1}``, with ``i_*^{s,s+1}`` the zero map.  Each slot kernel gets
an adapted basis along the images ``im i_*^{b,k}``, so every generator has a
birth ``b``, death ``k+1`` and persistence ``k+1-b``.  Ranks are canonical;
the individual generators (and their cycle representatives) depend on the
deterministic pivoting and are not canonical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Optional

import numpy as np

from . import gf_linalg as gf
from .complex_core import CellComplex, Filtration, InputError, inclusion_matrices
from .homology_engine import HomologyBasis, HomologyError, homology_basis, induced_matrix

INF = math.inf


@dataclass(frozen=True)
class Generator:
    dim: int
    slot: int
    birth: int
    death: int
    coords: tuple[int, ...] = field(repr=False)
    representative: tuple = field(repr=False)

    @property
    def persistence(self) -> int:
        return self.death - self.birth


@dataclass
class SlotKernel:
    """``ker i_*^{k,k+1}`` inside ``H_d(K^k)`` with an adapted, birth-labeled basis."""

    slot: int
    dim: int
    kernel: gf.Subspace
    basis: np.ndarray
    births: list[int]

    @property
    def rank(self) -> int:
        return len(self.births)

    def surviving(self, p: int) -> int:
        """Number of basis vectors with persistence ``>= p`` (a prefix of the basis)."""
        return sum(1 for b in self.births if self.slot + 1 - b >= p)


class FiltrationHomology:
    """Per-step homology bases, step maps and slot kernels of a filtration."""

    def __init__(self, F: Filtration, max_dim: Optional[int] = None):
        self.F = F
        self.p = F.p
        self.s = F.s
        top = F.top_dim if max_dim is None else max_dim
        self.dims = list(range(max(top, 0) + 1))
        self.bases: list[list[HomologyBasis]] = [
            [homology_basis(K, d) for d in self.dims] for K in F.steps]
        # step_maps[d][n-1]: matrix of i_*^{n,n+1} on H_d; the last one is the appended zero
        self.step_maps: dict[int, list[np.ndarray]] = {d: [] for d in self.dims}
        for n in range(1, self.s + 1):
            if n < self.s:
                inc = inclusion_matrices(F[n], F[n + 1])
            for d in self.dims:
                src = self.basis(n, d)
                if n < self.s:
                    push = inc.get(d, np.zeros((F[n + 1].count(d), F[n].count(d)), np.int64))
                    M = induced_matrix(src, self.basis(n + 1, d), push)
                else:
                    M = np.zeros((0, src.betti), dtype=np.int64)
                self.step_maps[d].append(M)
        self._composites: dict = {}
        self.slots: dict[tuple[int, int], SlotKernel] = {}
        for d in self.dims:
            for k in range(1, self.s + 1):
                self.slots[k, d] = self._slot_kernel(k, d)

    def basis(self, n: int, d: int) -> HomologyBasis:
        return self.bases[n - 1][d]

    def betti(self, n: int, d: int) -> int:
        return self.basis(n, d).betti

    def composite(self, n: int, m: int, d: int) -> np.ndarray:
        """Matrix of ``i_*^{n,m}`` on ``H_d``; ``m = s+1`` is the appended zero group."""
        key = (n, m, d)
        if key not in self._composites:
            if m == n:
                M = np.eye(self.betti(n, d), dtype=np.int64)
            elif m > self.s:
                M = np.zeros((0, self.betti(n, d)), dtype=np.int64)
            else:
                M = (self.step_maps[d][m - 2] @ self.composite(n, m - 1, d)) % self.p
            self._composites[key] = M
        return self._composites[key]

    def image(self, b: int, k: int, d: int) -> gf.Subspace:
        """``im i_*^{b,k}`` inside ``H_d(K^k)``."""
        return gf.image_basis(self.composite(b, k, d), self.p)

    def _slot_kernel(self, k: int, d: int) -> SlotKernel:
        beta = self.betti(k, d)
        if beta == 0:
            return SlotKernel(k, d, gf.Subspace.zero(0, self.p), np.zeros((0, 0), np.int64), [])
        ker = gf.kernel_basis(self.step_maps[d][k - 1], self.p)
        if ker.dim == 0:
            return SlotKernel(k, d, ker, np.zeros((0, beta), np.int64), [])
        # images shrink as b decreases, so the chain is built from b = k-1 downward
        # and stops at the first zero intersection
        chain = [ker]
        for b in range(k - 1, 0, -1):
            V = gf.intersect(chain[0], self.image(b, k, d))
            if V.dim == 0:
                break
            chain.insert(0, V)
        offset = k - len(chain)
        basis, levels = gf.adapted_basis(chain)
        births = [offset + lev for lev in levels]
        return SlotKernel(k, d, ker, basis, births)

    def slot(self, k: int, d: int) -> SlotKernel:
        return self.slots[k, d]

    def rank(self, d: int) -> int:
        return sum(self.slots[k, d].rank for k in range(1, self.s + 1))

    def generators(self) -> list[Generator]:
        out = []
        for d in self.dims:
            for k in range(1, self.s + 1):
                sk = self.slots[k, d]
                B = self.basis(k, d)
                for vec, b in zip(sk.basis, sk.births):
                    cycle = B.cycle_of(vec)
                    out.append(Generator(d, k, b, k + 1, tuple(int(x) for x in vec),
                                         tuple(self.F[k].support(d, cycle))))
        return out


def filtration_homology(F: Filtration, max_dim: Optional[int] = None) -> FiltrationHomology:
    return FiltrationHomology(F, max_dim)


# --- per-complex groups -------------------------------------------------------

def _class_vector(FH: FiltrationHomology, n: int, d: int, x) -> np.ndarray:
    x = gf.as_field(x, FH.p).ravel()
    if x.shape[0] != FH.betti(n, d):
        raise InputError("class has %d coordinates, H_%d(K^%d) has rank %d"
                         % (x.shape[0], d, n, FH.betti(n, d)))
    return x


def persistence_of(FH: FiltrationHomology, n: int, d: int, x) -> int:
    """Least ``p`` with ``i_*^{n,n+p}(x) = 0`` for a nonzero class ``x`` of ``H_d(K^n)``."""
    x = _class_vector(FH, n, d, x)
    if not x.any():
        raise InputError("the persistence of the zero class is undefined")
    for q in range(1, FH.s + 2 - n):
        if not ((FH.composite(n, n + q, d) @ x) % FH.p).any():
            return q
    raise HomologyError("class survived the appended zero map")


def noise_group_of_complex(FH: FiltrationHomology, n: int, p: int, d: int) -> gf.Subspace:
    """Classes of ``H_d(K^n)`` with persistence below ``p``, i.e. ``ker i_*^{n,n+p-1}``."""
    if p < 1 or not 1 <= n <= FH.s:
        raise InputError("need p >= 1 and 1 <= n <= s")
    beta = FH.betti(n, d)
    if n + p - 1 > FH.s:
        return gf.Subspace.full(beta, FH.p)
    return gf.kernel_basis(FH.composite(n, n + p - 1, d), FH.p)


@dataclass
class ComplexPersistentGroup:
    n: int
    p: int
    dim: int
    rank: int
    image_rank: int
    generators: np.ndarray = field(repr=False)


def persistent_group_of_complex(FH: FiltrationHomology, n: int, p: int, d: int) -> ComplexPersistentGroup:
    """``H_d(K^n) / N^p(K^n)``, cross-checked against the rank of ``im i_*^{n,n+p-1}``."""
    N = noise_group_of_complex(FH, n, p, d)
    beta = FH.betti(n, d)
    quotient = beta - N.dim
    image_rank = gf.rank(FH.composite(n, min(n + p - 1, FH.s + 1), d), FH.p)
    if quotient != image_rank:
        raise HomologyError("first isomorphism check failed at n=%d, p=%d, dim %d" % (n, p, d))
    gens = gf.complement_basis(N, gf.Subspace.full(beta, FH.p))
    return ComplexPersistentGroup(n, p, d, quotient, image_rank, gens)


# --- groups of the filtration ---------------------------------------------------

def noise_group_of_filtration(FH: FiltrationHomology, p: int) -> dict[tuple[int, int], gf.Subspace]:
    """Per ``(slot, dim)``: the span of slot generators with persistence ``< p``."""
    if p < 1:
        raise InputError("p must be >= 1")
    out = {}
    for (k, d), sk in FH.slots.items():
        keep = sk.surviving(p)
        noise = gf.Subspace(sk.kernel.ambient_dim, sk.basis[keep:], FH.p)
        if not sk.kernel.contains_subspace(noise):
            raise HomologyError("noise generator outside slot kernel (%d, %d)" % (k, d))
        out[k, d] = noise
    return out


@dataclass
class PersistentGroupReport:
    p: int
    H: dict[int, int]
    noise: dict[int, int]
    persistent: dict[int, int]
    surviving: list[Generator] = field(repr=False)


def persistent_group_of_filtration(FH: FiltrationHomology, p: int) -> PersistentGroupReport:
    if p < 1:
        raise InputError("p must be >= 1")
    H = {d: FH.rank(d) for d in FH.dims}
    P = {d: sum(FH.slots[k, d].surviving(p) for k in range(1, FH.s + 1)) for d in FH.dims}
    N = {d: H[d] - P[d] for d in FH.dims}
    gens = [g for g in FH.generators() if g.persistence >= p]
    return PersistentGroupReport(p, H, N, P, gens)


# --- diagrams -----------------------------------------------------------------

@dataclass
class PersistenceDiagram:
    """Multiset of ``(dim, birth, death)`` step indices; death ``s+1`` means never dies."""

    points: list[tuple[int, int, int]]
    s: int
    param_values: Optional[list[float]] = None

    def index_points(self, dim: Optional[int] = None) -> list[tuple[int, int, int]]:
        return sorted(pt for pt in self.points if dim is None or pt[0] == dim)

    def param_point(self, pt) -> tuple[int, float, float]:
        if self.param_values is None:
            raise ValueError("diagram carries no parameter values")
        d, b, e = pt
        death = INF if e > self.s else self.param_values[e - 1]
        return d, self.param_values[b - 1], death

    def param_points(self, dim: Optional[int] = None) -> list[tuple[int, float, float]]:
        return sorted(self.param_point(pt) for pt in self.index_points(dim))

    def pairs(self, dim: int) -> list[tuple[float, float]]:
        """``(birth, death)`` parameter pairs in one dimension."""
        return [(b, e) for _, b, e in self.param_points(dim)]


def barcode(FH: FiltrationHomology) -> PersistenceDiagram:
    pts = [(g.dim, g.birth, g.death) for g in FH.generators()]
    return PersistenceDiagram(sorted(pts), FH.s, FH.F.param_values)


def barcode_by_reduction(F: Filtration, max_dim: Optional[int] = None) -> PersistenceDiagram:
    """Barcode from a single column reduction of the whole filtration's boundary matrix."""
    p, s = F.p, F.s
    if s == 0:
        return PersistenceDiagram([], 0, F.param_values)
    final = F[s]
    birth: dict[Hashable, int] = {}
    for n, K in enumerate(F.steps, start=1):
        for c in K.all_cells():
            birth.setdefault(c.id, n)
    order = sorted(final.all_cells(), key=lambda c: (birth[c.id], c.dim))
    index = {c.id: i for i, c in enumerate(order)}
    reduced: dict[int, dict[int, int]] = {}
    low_owner: dict[int, int] = {}
    paired = set()
    pts = []
    for j, cell in enumerate(order):
        col: dict[int, int] = {}
        for fid, a in cell.faces:
            i = index[fid]
            col[i] = (col.get(i, 0) + a) % p
        col = {i: a for i, a in col.items() if a}
        while col:
            low = max(col)
            if low not in low_owner:
                break
            other = reduced[low_owner[low]]
            factor = col[low] * gf.inverse(other[low], p) % p
            for i, a in other.items():
                v = (col.get(i, 0) - factor * a) % p
                if v:
                    col[i] = v
                else:
                    col.pop(i, None)
        if col:
            low = max(col)
            low_owner[low] = j
            reduced[j] = col
            paired.update((low, j))
            b, e = birth[order[low].id], birth[cell.id]
            if b < e:
                pts.append((order[low].dim, b, e))
    for j, cell in enumerate(order):
        if j not in paired:
            pts.append((cell.dim, birth[cell.id], s + 1))
    if max_dim is not None:
        pts = [pt for pt in pts if pt[0] <= max_dim]
    return PersistenceDiagram(sorted(pts), s, F.param_values)


def verify_barcode(FH: FiltrationHomology) -> None:
    """Raise if the slot-kernel barcode disagrees with the reduction oracle."""
    mine = barcode(FH).index_points()
    oracle = barcode_by_reduction(FH.F, max(FH.dims)).index_points()
    if mine != oracle:
        raise HomologyError("barcode mismatch: kernels give %r, reduction gives %r" % (mine, oracle))


def persistence_measure(birth: float, death: float, mode: str = "diff") -> float:
    """``death - birth`` or the scale-free ``death / birth``."""
    if mode == "diff":
        return INF if death == INF else death - birth
    if mode == "ratio":
        if birth <= 0:
            raise InputError("ratio persistence needs a positive birth value")
        return INF if death == INF else death / birth
    raise InputError("unknown persistence measure %r" % mode)


# --- maps between filtrations -----------------------------------------------

def _cell_map_matrix(K: CellComplex, L: CellComplex, f: Mapping, signs: Mapping, k: int) -> np.ndarray:
    M = np.zeros((L.count(k), K.count(k)), dtype=np.int64)
    for j, cell in enumerate(K.cells(k)):
        target = f[cell.id]
        if L.cell(target).dim == k:
            M[L.position(target), j] = signs.get(cell.id, 1) % K.p
    return M


def filtration_map(FH: FiltrationHomology, GH: FiltrationHomology, f: Mapping,
                   signs: Optional[Mapping] = None) -> dict[tuple[int, int], np.ndarray]:
    """Slot-wise map ``ker i_*^{k,k+1}(F) -> ker i_*^{k,k+1}(G)`` induced by a cellular map.

    ``f`` sends every cell id of the final step of F to a cell id of the final
    step of G; ``signs`` optionally gives the incidence of each image (default
    1).  Cells sent to a lower dimensional cell vanish at chain level.
    Returned matrices use the adapted slot bases of both filtrations.
    """
    F, G = FH.F, GH.F
    signs = signs or {}
    if F.s != G.s:
        raise InputError("filtrations have %d and %d steps" % (F.s, G.s))
    if F.p != G.p:
        raise InputError("filtrations use different fields")
    if F.s == 0:
        return {}
    KS, LS = F[F.s], G[G.s]
    for n in range(1, F.s + 1):
        for cell in F[n].all_cells():
            if cell.id not in f:
                raise InputError("cell map is undefined on %r" % (cell.id,))
            t = f[cell.id]
            if t not in G[n]:
                raise InputError("step %d: cell %r maps to %r outside the target step" % (n, cell.id, t))
            if G[n].cell(t).dim > cell.dim:
                raise InputError("cell %r maps to a higher-dimensional cell" % (cell.id,))
    top = max(KS.top_dim, 0)
    chain = {k: _cell_map_matrix(KS, LS, f, signs, k) for k in range(top + 1)}
    for k in range(1, top + 1):
        lhs = (LS.boundary_matrix(k) @ chain[k]) % F.p
        rhs = (chain[k - 1] @ KS.boundary_matrix(k)) % F.p
        if not np.array_equal(lhs, rhs):
            raise InputError("the cell map does not commute with the boundary in degree %d" % k)
    out = {}
    dims = [d for d in FH.dims if d in GH.dims]
    for k in range(1, F.s + 1):
        K, L = F[k], G[k]
        for d in dims:
            restrict = _restrict(KS, K, LS, L, chain.get(d), d)
            fk = induced_matrix(FH.basis(k, d), GH.basis(k, d), restrict)
            src, dst = FH.slot(k, d), GH.slot(k, d)
            M = np.zeros((dst.rank, src.rank), dtype=np.int64)
            if src.rank:
                target_space = gf.Subspace(GH.betti(k, d), dst.basis, F.p)
                for j, x in enumerate(src.basis):
                    c = gf.solve_membership(target_space, (fk @ x) % F.p)
                    if c is None:
                        raise HomologyError("slot %d, dim %d: image leaves the target kernel" % (k, d))
                    M[:, j] = c
            out[k, d] = M
    return out


def _restrict(KS, K, LS, L, full: Optional[np.ndarray], d: int) -> np.ndarray:
    """Chain map of ``f`` restricted to ``K -> L`` in degree d."""
    M = np.zeros((L.count(d), K.count(d)), dtype=np.int64)
    if full is None:
        return M
    for j, cell in enumerate(K.cells(d)):
        col = full[:, KS.position(cell.id)]
        for i in np.flatnonzero(col):
            M[L.position(LS.cells(d)[i].id), j] = col[i]
    return M
