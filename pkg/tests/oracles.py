"""Random instance generators and independent reference computations for the tests.

The oracles here avoid the package's linear algebra: GF(2) ranks use Python
integers as bit rows, GF(p) ranks use plain Python lists.
"""

from __future__ import annotations

import itertools

import numpy as np

from filtrahom.complex_core import Cell, CellComplex, Filtration


def simplex_cells(simplices, p=2):
    """Cells of an oriented simplicial complex; face i of a simplex has sign (-1)^i."""
    cells = []
    for s in sorted(set(simplices), key=lambda t: (len(t), t)):
        faces = tuple((s[:i] + s[i + 1:], (-1) ** i % p) for i in range(len(s))) if len(s) > 1 else ()
        cells.append(Cell(s, len(s) - 1, faces))
    return cells


def closure(simplices):
    out = set()
    for s in simplices:
        for k in range(1, len(s) + 1):
            out.update(itertools.combinations(s, k))
    return out


def random_simplicial(rng, max_vertices=6, max_cells=40, edge_prob=0.5, tri_prob=0.5, offset=0):
    nv = int(rng.integers(1, max_vertices + 1))
    verts = [(offset + i,) for i in range(nv)]
    edges = [(offset + a, offset + b) for a, b in itertools.combinations(range(nv), 2)
             if rng.random() < edge_prob]
    eset = set(edges)
    tris = [t for t in itertools.combinations(range(offset, offset + nv), 3)
            if all(e in eset for e in itertools.combinations(t, 2)) and rng.random() < tri_prob]
    ordered = verts + edges + tris
    return ordered[:max_cells]


def random_filtration(rng, max_steps=5, max_cells=40, p=None, min_steps=1):
    """Random simplicial filtration; every face is born no later than its cofaces."""
    if p is None:
        p = int(rng.choice([2, 2, 3]))
    s = int(rng.integers(min_steps, max_steps + 1))
    simplices = random_simplicial(rng, max_cells=max_cells)
    birth = {sx: int(rng.integers(1, s + 1)) for sx in simplices}
    for sx in sorted(simplices, key=len, reverse=True):
        for i in range(len(sx)):
            face = sx[:i] + sx[i + 1:]
            if face:
                birth[face] = min(birth[face], birth[sx])
    steps = [CellComplex(simplex_cells([x for x in simplices if birth[x] <= n], p), p)
             for n in range(1, s + 1)]
    return Filtration(steps, p=p)


def random_image(rng, shape=(8, 8), levels=5):
    return rng.integers(0, levels, size=shape)


# --- reference ranks ------------------------------------------------------------

def rank_gf2_bits(M) -> int:
    """Rank over GF(2) with each row packed into a Python integer."""
    rows = [int("".join("1" if x % 2 else "0" for x in row) or "0", 2) for row in np.asarray(M)]
    rank = 0
    while rows:
        pivot = rows.pop()
        if pivot == 0:
            continue
        rank += 1
        top = pivot.bit_length() - 1
        rows = [r ^ pivot if (r >> top) & 1 else r for r in rows]
    return rank


def rank_mod_p(M, p) -> int:
    """Rank over GF(p) by textbook elimination on nested lists."""
    A = [[int(x) % p for x in row] for row in np.asarray(M)]
    if not A or not A[0]:
        return 0
    rows, cols = len(A), len(A[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], p - 2, p)
        A[r] = [x * inv % p for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
        r += 1
        if r == rows:
            break
    return r


def oracle_rank(M, p) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return rank_gf2_bits(M) if p == 2 else rank_mod_p(M, p)


def oracle_betti(K, k) -> int:
    n = K.count(k)
    return n - oracle_rank(K.boundary_matrix(k), K.p) - oracle_rank(K.boundary_matrix(k + 1), K.p)


def components(K) -> int:
    """Number of connected components by union-find over the 1-skeleton."""
    parent = {c.id: c.id for c in K.cells(0)}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in K.cells(1):
        ends = [f for f, _ in e.faces]
        if len(ends) == 2:
            parent[find(ends[0])] = find(ends[1])
    return len({find(v) for v in parent})


def pixel_components(mask) -> int:
    """Components of a binary image where pixels touching at a corner are connected."""
    mask = np.asarray(mask, dtype=bool)
    seen = np.zeros_like(mask)
    count = 0
    H, W = mask.shape
    for y0, x0 in zip(*np.nonzero(mask)):
        if seen[y0, x0]:
            continue
        count += 1
        stack = [(y0, x0)]
        seen[y0, x0] = True
        while stack:
            y, x = stack.pop()
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    v, u = y + dy, x + dx
                    if 0 <= v < H and 0 <= u < W and mask[v, u] and not seen[v, u]:
                        seen[v, u] = True
                        stack.append((v, u))
    return count


def cubical_euler(mask) -> int:
    """Euler characteristic of the union of closed unit squares at the set pixels."""
    mask = np.asarray(mask, dtype=bool)
    verts, edges = set(), set()
    for y, x in zip(*np.nonzero(mask)):
        verts.update({(y, x), (y + 1, x), (y, x + 1), (y + 1, x + 1)})
        edges.update({("h", y, x), ("h", y + 1, x), ("v", y, x), ("v", y, x + 1)})
    return len(verts) - len(edges) + int(mask.sum())


def lifespans(points):
    """Per-dimension list of ``death - birth`` from index diagram points."""
    out = {}
    for d, b, e in points:
        out.setdefault(d, []).append(e - b)
    return out


def brute_bottleneck(A, B) -> float:
    """Bottleneck distance by enumerating all matchings of diagonal-augmented diagrams."""
    import math

    def cost(a, b):
        if a is None and b is None:
            return 0.0
        if a is None:
            return (b[1] - b[0]) / 2 if math.isfinite(b[1]) else math.inf
        if b is None:
            return (a[1] - a[0]) / 2 if math.isfinite(a[1]) else math.inf
        db = abs(a[0] - b[0])
        if math.isinf(a[1]) and math.isinf(b[1]):
            de = 0.0
        elif math.isinf(a[1]) or math.isinf(b[1]):
            de = math.inf
        else:
            de = abs(a[1] - b[1])
        return max(db, de)

    left = list(A) + [None] * len(B)
    right = list(B) + [None] * len(A)
    best = math.inf
    for perm in itertools.permutations(range(len(right))):
        worst = max((cost(left[i], right[j]) for i, j in enumerate(perm)), default=0.0)
        best = min(best, worst)
    return best
