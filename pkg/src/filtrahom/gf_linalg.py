"""Exact linear algebra over a prime field GF(p).

Matrices are dense ``numpy`` int64 arrays whose entries are residues in
``[0, p)``.  Subspaces keep their basis as the rows of a 2-D array.
Pivoting is deterministic (leftmost column, first nonzero row), so every
basis produced here is reproducible for a fixed entry order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


def as_field(M, p: int = 2) -> np.ndarray:
    return np.asarray(M, dtype=np.int64) % p


def _work(M, p: int) -> np.ndarray:
    """Fresh working copy for elimination; GF(2) uses bytes to halve memory traffic."""
    R = as_field(M, p)
    return R.astype(np.uint8) if p == 2 else R.copy()


def matmul(A, B, p: int = 2) -> np.ndarray:
    """``A @ B`` mod p via floating-point BLAS, exact while sums stay below 2**53."""
    A, B = np.asarray(A), np.asarray(B)
    if A.shape[1] * (p - 1) ** 2 >= 2 ** 53:
        return (A.astype(np.int64) @ B.astype(np.int64)) % p
    return (A.astype(np.float64) @ B.astype(np.float64)).astype(np.int64) % p


def inverse(a: int, p: int) -> int:
    a = int(a) % p
    if a == 0:
        raise ZeroDivisionError("zero has no inverse in GF(%d)" % p)
    return pow(a, p - 2, p)


def _eliminate(R: np.ndarray, p: int, n_pivot_cols: int | None = None,
               start_row: int = 0) -> list[int]:
    """Row-reduce ``R`` in place to reduced row-echelon form; return pivots.

    Pivots are searched in rows ``start_row`` and below only, which continues
    an elimination whose earlier pivot rows are already fixed.
    """
    rows, cols = R.shape
    if n_pivot_cols is None:
        n_pivot_cols = cols
    pivots: list[int] = []
    r = start_row
    for c in range(n_pivot_cols):
        if r == rows:
            break
        column = R[r:, c]
        i = int(column.argmax()) if p == 2 else int((column != 0).argmax())
        if column[i] == 0:
            continue
        i += r
        if i != r:
            R[[r, i]] = R[[i, r]]
        if p != 2 and R[r, c] != 1:
            R[r] = (R[r] * inverse(R[r, c], p)) % p
        others = R[:, c].nonzero()[0]
        if others.size > 1:
            others = others[others != r]
            if p == 2:
                R[others] ^= R[r]
            else:
                R[others] = (R[others] - np.outer(R[others, c], R[r])) % p
        pivots.append(c)
        r += 1
    return pivots


def reduce(M, p: int = 2) -> tuple[np.ndarray, int, list[int]]:
    """Reduced row-echelon form of ``M`` over GF(p).

    Returns ``(R, rank, pivot_columns)``.
    """
    R = _work(M, p)
    if R.ndim != 2:
        raise ValueError("expected a 2-D matrix, got shape %r" % (R.shape,))
    pivots = _eliminate(R, p)
    return R.astype(np.int64), len(pivots), pivots


def rank(M, p: int = 2) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return reduce(M, p)[1]


def row_transform(A, p: int = 2) -> tuple[np.ndarray, np.ndarray, list[int]]:
    """Return ``(R, T, pivots)`` with ``T @ A == R`` (mod p) and ``R`` in RREF.

    ``T`` is invertible, so ``A x = v`` is solvable iff the rows of ``T v``
    past the rank vanish.
    """
    A = _work(A, p)
    n, m = A.shape
    aug = np.concatenate([A, np.eye(n, dtype=A.dtype)], axis=1)
    pivots = _eliminate(aug, p, n_pivot_cols=m)
    aug = aug.astype(np.int64)
    return aug[:, :m], aug[:, m:], pivots


def continue_elimination(A, p: int, n_pivot_cols: int, start_row: int) -> tuple[np.ndarray, list[int]]:
    """Reduce a copy of ``A`` further, pivoting on its first ``n_pivot_cols`` columns
    from row ``start_row`` on.  Rows above ``start_row`` are treated as fixed pivots."""
    R = _work(A, p)
    pivots = _eliminate(R, p, n_pivot_cols, start_row)
    return R.astype(np.int64), pivots


def kernel_from_rref(R: np.ndarray, pivots: Sequence[int], cols: int, p: int = 2) -> "Subspace":
    """Kernel basis read off a reduced row-echelon form with the given pivots."""
    r = len(pivots)
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    K = np.zeros((len(free), cols), dtype=np.int64)
    K[np.arange(len(free)), free] = 1
    K[:, list(pivots)] = (-R[:r, free].T) % p
    return Subspace(cols, K, p)


@dataclass(frozen=True)
class Subspace:
    """A subspace of GF(p)^ambient_dim spanned by linearly independent rows."""

    ambient_dim: int
    basis: np.ndarray = field(repr=False)
    p: int = 2

    def __post_init__(self):
        b = as_field(self.basis, self.p)
        if b.ndim != 2:
            b = b.reshape(-1, self.ambient_dim) if self.ambient_dim else b.reshape(0, 0)
        if b.shape[1] != self.ambient_dim:
            raise ValueError("basis vectors have %d coordinates, expected %d"
                             % (b.shape[1], self.ambient_dim))
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @classmethod
    def zero(cls, ambient_dim: int, p: int = 2) -> "Subspace":
        return cls(ambient_dim, np.zeros((0, ambient_dim), dtype=np.int64), p)

    @classmethod
    def full(cls, ambient_dim: int, p: int = 2) -> "Subspace":
        return cls(ambient_dim, np.eye(ambient_dim, dtype=np.int64), p)

    def __contains__(self, v) -> bool:
        return solve_membership(self, v) is not None

    def contains_subspace(self, other: "Subspace") -> bool:
        if other.ambient_dim != self.ambient_dim:
            raise ValueError("ambient dimensions differ: %d vs %d" % (self.ambient_dim, other.ambient_dim))
        if other.dim == 0:
            return True
        return rank(np.concatenate([self.basis, other.basis]), self.p) == self.dim

    def equals(self, other: "Subspace") -> bool:
        return (self.dim == other.dim and self.ambient_dim == other.ambient_dim
                and self.contains_subspace(other))


def span(vectors, ambient_dim: int, p: int = 2) -> Subspace:
    """Subspace spanned by ``vectors`` (rows, possibly dependent)."""
    if ambient_dim == 0:
        return Subspace.zero(0, p)
    V = as_field(vectors, p).reshape(-1, ambient_dim)
    if V.shape[0] == 0:
        return Subspace.zero(ambient_dim, p)
    R, r, _ = reduce(V, p)
    return Subspace(ambient_dim, R[:r], p)


def kernel_basis(M, p: int = 2) -> Subspace:
    """Basis of ``{x : M x = 0}``, one vector per free column of the RREF."""
    M = as_field(M, p)
    rows, cols = M.shape
    if rows == 0:
        return Subspace.full(cols, p)
    R, _, pivots = reduce(M, p)
    return kernel_from_rref(R, pivots, cols, p)


def image_basis(M, p: int = 2) -> Subspace:
    """Column space of ``M``, spanned by its pivot columns."""
    M = as_field(M, p)
    rows, cols = M.shape
    if cols == 0 or rows == 0:
        return Subspace.zero(rows, p)
    _, _, pivots = reduce(M, p)
    return Subspace(rows, M[:, pivots].T, p)


def solve_membership(S: Subspace, v) -> Optional[np.ndarray]:
    """Coordinates of ``v`` in the basis of ``S``, or ``None`` if ``v`` is not in ``S``."""
    p = S.p
    v = as_field(v, p).ravel()
    if v.shape[0] != S.ambient_dim:
        raise ValueError("vector has %d coordinates, subspace ambient dimension is %d"
                         % (v.shape[0], S.ambient_dim))
    if S.dim == 0:
        return np.zeros(0, dtype=np.int64) if not v.any() else None
    A = S.basis.T
    _, T, pivots = row_transform(A, p)
    w = (T @ v) % p
    r = len(pivots)
    if w[r:].any():
        return None
    x = np.zeros(S.dim, dtype=np.int64)
    x[pivots] = w[:r]
    return x


def intersect(S1: Subspace, S2: Subspace) -> Subspace:
    """Basis of ``S1 ∩ S2`` from the kernel of ``[B1^T | -B2^T]``."""
    if S1.ambient_dim != S2.ambient_dim:
        raise ValueError("ambient dimensions differ: %d vs %d" % (S1.ambient_dim, S2.ambient_dim))
    if S1.p != S2.p:
        raise ValueError("subspaces live over different fields")
    p, n = S1.p, S1.ambient_dim
    if S1.dim == 0 or S2.dim == 0:
        return Subspace.zero(n, p)
    stacked = np.concatenate([S1.basis.T, (-S2.basis.T) % p], axis=1)
    K = kernel_basis(stacked, p)
    vectors = (K.basis[:, :S1.dim] @ S1.basis) % p
    return span(vectors, n, p)


def sum_space(S1: Subspace, S2: Subspace) -> Subspace:
    return span(np.concatenate([S1.basis, S2.basis]), S1.ambient_dim, S1.p)


def adapted_basis(chain: Sequence[Subspace]) -> tuple[np.ndarray, list[int]]:
    """Basis of the last space of a nested chain ``V1 ⊆ V2 ⊆ ... ⊆ Vk``.

    The first ``dim(Vi)`` returned vectors span ``Vi``.  Each vector is labeled
    with the (1-based) index of the first space containing it.
    """
    if not chain:
        raise ValueError("empty chain")
    n, p = chain[0].ambient_dim, chain[0].p
    for i in range(len(chain) - 1):
        if not chain[i + 1].contains_subspace(chain[i]):
            raise ValueError("chain is not nested: level %d is not contained in level %d"
                             % (i + 1, i + 2))
    basis = np.zeros((0, n), dtype=np.int64)
    labels: list[int] = []
    for level, V in enumerate(chain, start=1):
        if V.dim == 0:
            continue
        # pivot columns of [basis^T | V^T] keep the old vectors and pick new ones greedily
        m = basis.shape[0]
        _, _, pivots = reduce(np.concatenate([basis, V.basis]).T, p)
        new = [c - m for c in pivots if c >= m]
        basis = np.concatenate([basis, V.basis[new]])
        labels.extend([level] * len(new))
    return basis, labels


def complement_basis(S: Subspace, T: Subspace) -> np.ndarray:
    """Rows extending a basis of ``S`` to one of ``T`` (requires ``S ⊆ T``)."""
    basis, labels = adapted_basis([S, T])
    return basis[[i for i, lab in enumerate(labels) if lab == 2]]
