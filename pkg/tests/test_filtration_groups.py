import math

import numpy as np
import pytest

from filtrahom import gf_linalg as gf
from filtrahom.builders_cloud import PointCloud, rips_filtration
from filtrahom.complex_core import (Cell, CellComplex, Filtration, InputError,
                                    disjoint_union_filtration)
from filtrahom.filtration_groups import (barcode, barcode_by_reduction, filtration_homology,
                                         filtration_map, noise_group_of_complex,
                                         noise_group_of_filtration, persistence_measure,
                                         persistence_of, persistent_group_of_complex,
                                         persistent_group_of_filtration, verify_barcode)
from oracles import lifespans, random_filtration, simplex_cells


def class_of(FH, n, d, cell_ids):
    K = FH.F[n]
    return FH.basis(n, d).class_of(K.chain(d, cell_ids))


# --- FIG1 ------------------------------------------------------------------------

def test_fig1_ranks(fig1):
    rep = persistent_group_of_filtration(fig1, 3)
    assert (rep.H[0], rep.H[1]) == (3, 3)
    assert (rep.persistent[0], rep.persistent[1]) == (2, 1)
    assert (rep.noise[0], rep.noise[1]) == (1, 2)


def test_fig1_barcode(fig1):
    dg = barcode(fig1)
    assert dg.index_points(0) == [(0, 1, 4), (0, 1, 4), (0, 2, 4)]
    assert dg.index_points(1) == [(1, 1, 2), (1, 1, 4), (1, 3, 4)]
    verify_barcode(fig1)


def test_fig1_noise_of_filtration(fig1):
    noise = noise_group_of_filtration(fig1, 3)
    assert sum(noise[k, 0].dim for k in range(1, 4)) == 1
    assert sum(noise[k, 1].dim for k in range(1, 4)) == 2
    assert all(N.dim == 0 for N in noise_group_of_filtration(fig1, 1).values())


def test_fig1_persistence_of_classes(fig1_abstract_fh):
    FH = fig1_abstract_fh
    a = class_of(FH, 1, 1, ["a01", "a12", "a23", "a30"])
    b = class_of(FH, 1, 1, ["b01", "b12", "b23", "b30"])
    assert persistence_of(FH, 1, 1, a) == 3
    assert persistence_of(FH, 1, 1, b) == 1
    N2 = noise_group_of_complex(FH, 1, 2, 1)
    assert N2.dim == 1 and b in N2 and a not in N2
    assert persistent_group_of_complex(FH, 1, 3, 1).rank == 1
    assert persistent_group_of_complex(FH, 1, 3, 0).rank == 2
    with pytest.raises(InputError):
        persistence_of(FH, 1, 1, [0, 0])


def test_classes_of_last_step_have_persistence_one(fig1):
    s = fig1.s
    for d in fig1.dims:
        for x in np.eye(fig1.betti(s, d), dtype=int):
            assert persistence_of(fig1, s, d, x) == 1


def test_per_complex_noise_edges(fig1):
    s = fig1.s
    for n in range(1, s + 1):
        for d in fig1.dims:
            beta = fig1.betti(n, d)
            assert noise_group_of_complex(fig1, n, 1, d).dim == 0
            assert persistent_group_of_complex(fig1, n, 1, d).rank == beta
            assert noise_group_of_complex(fig1, n, s + 2 - n, d).dim == beta
    with pytest.raises(InputError):
        noise_group_of_complex(fig1, 0, 1, 0)


# --- random filtrations ---------------------------------------------------------

def random_cases(seed, count, **kw):
    rng = np.random.default_rng(seed)
    return [random_filtration(rng, max_steps=6, max_cells=60, **kw) for _ in range(count)]


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_slot_kernels_match_reduction_oracle(seed):
    for F in random_cases(seed, 25):
        FH = filtration_homology(F, 2)
        oracle = barcode_by_reduction(F, 2).index_points()
        assert barcode(FH).index_points() == oracle
        spans = lifespans(oracle)
        for d in FH.dims:
            assert FH.rank(d) == len(spans.get(d, []))
            for p in range(1, F.s + 2):
                rep = persistent_group_of_filtration(FH, p)
                assert rep.persistent[d] == sum(1 for L in spans.get(d, []) if L >= p)


def test_monotone_in_p():
    for F in random_cases(5, 25):
        FH = filtration_homology(F, 2)
        reps = [persistent_group_of_filtration(FH, p) for p in range(1, F.s + 2)]
        for d in FH.dims:
            ranks = [r.persistent[d] for r in reps]
            assert ranks == sorted(ranks, reverse=True)
            assert ranks[0] == reps[0].H[d] and ranks[-1] == 0
            assert all(r.H[d] == r.noise[d] + r.persistent[d] for r in reps)


def test_noise_lies_in_slot_kernels():
    for F in random_cases(6, 25):
        FH = filtration_homology(F, 2)
        for p in range(1, F.s + 2):
            for (k, d), N in noise_group_of_filtration(FH, p).items():
                step = FH.step_maps[d][k - 1]
                assert not ((step @ N.basis.T) % FH.p).any()


def test_per_complex_noise_grows_with_p():
    for F in random_cases(7, 25):
        FH = filtration_homology(F, 2)
        for n in range(1, F.s + 1):
            for d in FH.dims:
                for p in range(1, F.s + 2 - n):
                    small = noise_group_of_complex(FH, n, p, d)
                    large = noise_group_of_complex(FH, n, p + 1, d)
                    assert large.contains_subspace(small)


def test_first_isomorphism_identity():
    for F in random_cases(8, 25):
        FH = filtration_homology(F, 2)
        for n in range(1, F.s + 1):
            for d in FH.dims:
                for p in range(1, F.s + 2 - n):
                    M = FH.composite(n, n + p, d)
                    assert FH.betti(n, d) - gf.kernel_basis(M, FH.p).dim == gf.rank(M, FH.p)
                    persistent_group_of_complex(FH, n, p, d)


def test_restricted_maps_preserve_kernels():
    rng = np.random.default_rng(9)
    for F in random_cases(9, 25):
        FH = filtration_homology(F, 2)
        for k in range(1, F.s):
            for d in FH.dims:
                for p in range(1, F.s + 1 - k):
                    ker = gf.kernel_basis(FH.composite(k, k + p, d), FH.p)
                    if ker.dim == 0:
                        continue
                    x = (rng.integers(0, FH.p, ker.dim) @ ker.basis) % FH.p
                    y = (FH.composite(k, k + 1, d) @ x) % FH.p
                    assert not ((FH.composite(k + 1, min(k + 1 + p, F.s + 1), d) @ y) % FH.p).any()


def test_birth_is_least_image_index():
    for F in random_cases(10, 20):
        FH = filtration_homology(F, 2)
        for (k, d), sk in FH.slots.items():
            for vec, b in zip(sk.basis, sk.births):
                assert vec in FH.image(b, k, d)


# --- structural identities -------------------------------------------------------

def test_constant_filtration_is_single_complex():
    rng = np.random.default_rng(20)
    for _ in range(20):
        K = random_filtration(rng, max_steps=1)[1]
        FH = filtration_homology(Filtration([K, K, K]), 2)
        for d in FH.dims:
            assert FH.slot(1, d).rank == FH.slot(2, d).rank == 0
            assert FH.rank(d) == FH.betti(1, d)


def test_wedge_of_growing_circles():
    # step n adds a new loop at the base vertex; nothing dies before the end
    cells = [Cell("v", 0)]
    steps = []
    for n in range(4):
        cells = cells + [Cell("w%d" % n, 0), Cell("e%d" % n, 1, (("w%d" % n, 1), ("v", 1))),
                         Cell("f%d" % n, 1, (("w%d" % n, 1), ("v", 1)))]
        steps.append(CellComplex(sorted(cells, key=lambda c: c.dim)))
    FH = filtration_homology(Filtration(steps), 1)
    assert FH.rank(1) == FH.betti(4, 1) == 4
    assert FH.slot(4, 1).rank == 4


def test_disjoint_union_additivity_and_injective_slot_maps():
    rng = np.random.default_rng(21)
    for _ in range(20):
        F = random_filtration(rng, max_steps=4, p=2)
        G = random_filtration(rng, min_steps=F.s, max_steps=F.s, p=2)
        U = disjoint_union_filtration(F, G)
        FH, GH, UH = (filtration_homology(X, 2) for X in (F, G, U))
        for d in FH.dims:
            assert UH.rank(d) == FH.rank(d) + GH.rank(d)
        f = {c.id: ("K", c.id) for c in F[F.s].all_cells()}
        for M in filtration_map(FH, UH, f).values():
            assert gf.rank(M, 2) == M.shape[1]


# --- maps ------------------------------------------------------------------------

def test_identity_map_is_identity_on_slots(fig1_abstract_fh):
    FH = fig1_abstract_fh
    f = {c.id: c.id for c in FH.F[FH.s].all_cells()}
    for M in filtration_map(FH, FH, f).values():
        assert np.array_equal(M, np.eye(M.shape[0], dtype=int))


def test_collapse_to_a_point():
    K1 = CellComplex(simplex_cells([(0,), (1,)]))
    K2 = CellComplex(simplex_cells([(0,), (1,), (0, 1)]))
    F = Filtration([K1, K2])
    P = CellComplex(simplex_cells([(9,)]))
    G = Filtration([P, P])
    FH, GH = filtration_homology(F), filtration_homology(G)
    f = {(0,): (9,), (1,): (9,), (0, 1): (9,)}
    maps = filtration_map(FH, GH, f)
    assert maps[1, 0].shape == (0, 1)
    assert maps[2, 0].shape == (1, 1) and maps[2, 0][0, 0] == 1


def test_map_restriction_violation_names_step_and_cell():
    K1 = CellComplex(simplex_cells([(0,)]))
    F = Filtration([K1, K1])
    L1 = CellComplex(simplex_cells([(5,)]))
    L2 = CellComplex(simplex_cells([(5,), (6,)]))
    G = Filtration([L1, L2])
    with pytest.raises(InputError, match=r"step 1: cell \(0,\)"):
        filtration_map(filtration_homology(F), filtration_homology(G), {(0,): (6,)})


# --- diagrams and measures -------------------------------------------------------

def test_empty_filtration():
    FH = filtration_homology(Filtration([]))
    assert barcode(FH).points == []
    assert barcode_by_reduction(Filtration([])).points == []


def test_unit_square_rips_barcode():
    cloud = PointCloud([[0, 0], [1, 0], [1, 1], [0, 1]])
    FH = filtration_homology(rips_filtration(cloud, [1.0, 1.5]))
    assert barcode(FH).pairs(1) == [(1.0, 1.5)]


def test_param_points_use_infinity():
    FH = filtration_homology(rips_filtration(PointCloud([[0.0]]), [1.0]))
    assert barcode(FH).pairs(0) == [(1.0, math.inf)]


def test_persistence_measure():
    assert persistence_measure(1, 4) == 3
    assert persistence_measure(2, 4, "ratio") == 2.0
    assert persistence_measure(2, math.inf, "ratio") == math.inf
    with pytest.raises(InputError):
        persistence_measure(0, 4, "ratio")
    with pytest.raises(InputError):
        persistence_measure(1, 2, "log")
