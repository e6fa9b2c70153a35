"""Persistence engine against union-find, MST, dense-rank, and cross-algorithm oracles."""

import numpy as np
import pytest
from scipy.sparse.csgraph import minimum_spanning_tree

from talktopo._reduction import tree_edge_mask
from talktopo.filtration import Filtration, _binom_table, build_filtration
from talktopo.metrics import DistanceMatrix, PointCloud, pairwise_distances
from talktopo.persistence import (
    PersistenceDiagram,
    _cone_positive_mask,
    betti_bruteforce,
    boundary_state,
    compute_h0_unionfind,
    compute_persistence,
    reduce_standard,
    reduce_with_clearing,
)


def random_cloud_dm(rng, n, dim=3, metric="euclidean"):
    pts = rng.standard_normal((n, dim))
    return pairwise_distances(PointCloud(points=pts, id="t"), metric=metric)


def hexagon_dm():
    angles = np.arange(6) * (np.pi / 3.0)
    pts = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    return pairwise_distances(PointCloud(points=pts, id="hexagon"), metric="angular")


def vertices_only_filtration(n):
    binom = _binom_table(max(n, 1), 3)
    return Filtration(
        n_points=n, max_dim=0, threshold=1.0,
        index_by_dim=[np.arange(n, dtype=np.int64)],
        diam_by_dim=[np.zeros(n)],
        binom=binom,
    )


def bars_from_standard_reduction(filt):
    """All bars, zero-persistence included, from the unoptimized reduction."""
    state = reduce_standard(boundary_state(filt))
    dims_g, pos_g = filt.global_order()
    diam_of = np.empty(len(dims_g))
    for d in range(filt.max_dim + 1):
        sel = dims_g == d
        diam_of[np.flatnonzero(sel)] = filt.diameters(d)[pos_g[sel]]
    bars = []
    paired_rows = set(state.pivots)
    paired_cols = set(state.pivots.values())
    for r, c in state.pivots.items():
        bars.append((float(diam_of[r]), float(diam_of[c]), int(dims_g[r])))
    for g in range(len(dims_g)):
        if g in paired_cols or g in paired_rows:
            continue
        if len(state.columns[g]) == 0 and int(dims_g[g]) < filt.max_dim:
            bars.append((float(diam_of[g]), np.inf, int(dims_g[g])))
    bars.sort(key=lambda p: (p[2], p[0], p[1]))
    return bars


class TestDiagramType:
    def test_sorted_canonically(self):
        d = PersistenceDiagram(
            dims=np.array([1, 0, 0]),
            births=np.array([0.5, 0.0, 0.0]),
            deaths=np.array([0.9, np.inf, 0.3]),
        )
        assert d.as_tuples() == [(0.0, 0.3, 0), (0.0, np.inf, 0), (0.5, 0.9, 1)]

    def test_rejects_birth_after_death(self):
        with pytest.raises(ValueError):
            PersistenceDiagram(
                dims=np.array([0]), births=np.array([1.0]), deaths=np.array([0.5])
            )

    def test_multiset_equality_ignores_order(self):
        a = PersistenceDiagram(
            dims=np.array([0, 1]), births=np.array([0.0, 0.2]),
            deaths=np.array([0.1, 0.4]),
        )
        b = PersistenceDiagram(
            dims=np.array([1, 0]), births=np.array([0.2, 0.0]),
            deaths=np.array([0.4, 0.1]),
        )
        assert a.equal_multiset(b)


class TestH0:
    def test_two_points_single_merge(self):
        pts = np.array([[1.0, 0.0], [1.0, 0.4]])
        dm = pairwise_distances(PointCloud(points=pts, id="p"), metric="euclidean")
        filt = build_filtration(dm, max_hom_dim=0)
        diag = compute_persistence(filt)
        assert diag.as_tuples() == [(0.0, 0.4, 0), (0.0, np.inf, 0)]

    def test_single_point(self):
        pts = np.array([[1.0, 2.0]])
        dm = pairwise_distances(PointCloud(points=pts, id="p"), metric="euclidean")
        filt = build_filtration(dm, max_hom_dim=0)
        for diag in (compute_persistence(filt), compute_h0_unionfind(filt)):
            assert diag.as_tuples() == [(0.0, np.inf, 0)]

    def test_collinear_path_two_merges(self):
        pts = np.array([[1.0, 0.0], [1.1, 0.0], [1.3, 0.0]])
        dm = pairwise_distances(PointCloud(points=pts, id="p"), metric="euclidean")
        filt = build_filtration(dm, max_hom_dim=0)
        diag = compute_h0_unionfind(filt)
        got = diag.as_tuples()
        assert len(got) == 3
        assert got[0] == pytest.approx((0.0, 0.1, 0))
        assert got[1] == pytest.approx((0.0, 0.2, 0))
        assert got[2] == (0.0, np.inf, 0)

    def test_finite_deaths_are_mst_edge_weights(self):
        rng = np.random.default_rng(41)
        for n in (10, 25, 50):
            dm = random_cloud_dm(rng, n)
            filt = build_filtration(dm, max_hom_dim=0)
            diag = compute_persistence(filt)
            finite = diag.finite_pairs(0)
            mst = minimum_spanning_tree(dm.entries).toarray()
            mst_weights = np.sort(mst[mst > 0])
            assert len(finite) == n - 1
            np.testing.assert_allclose(np.sort(finite[:, 1]), mst_weights, rtol=0, atol=0)

    def test_unionfind_agrees_with_reduction(self):
        rng = np.random.default_rng(43)
        for n in (5, 20, 50):
            dm = random_cloud_dm(rng, n)
            filt = build_filtration(dm, max_hom_dim=1)
            a = compute_persistence(filt)
            b = compute_h0_unionfind(filt)
            a0 = a.pairs(0)
            b0 = b.pairs(0)
            np.testing.assert_array_equal(a0, b0)

    def test_exactly_one_infinite_bar_at_auto_threshold(self):
        rng = np.random.default_rng(47)
        dm = random_cloud_dm(rng, 12)
        diag = compute_persistence(build_filtration(dm, max_hom_dim=1))
        d0 = diag.pairs(0)
        assert int(np.sum(np.isinf(d0[:, 1]))) == 1

    def test_zero_persistence_flag(self):
        pts = np.array([[1.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
        dm = pairwise_distances(PointCloud(points=pts, id="p"), metric="euclidean")
        filt = build_filtration(dm, max_hom_dim=0)
        default = compute_persistence(filt)
        kept = compute_persistence(filt, include_zero_persistence=True)
        assert len(kept) == len(default) + 1
        zero = [p for p in kept.as_tuples() if p[0] == p[1]]
        assert zero == [(0.0, 0.0, 0)]
        uf = compute_h0_unionfind(filt, include_zero_persistence=True)
        assert uf.equal_multiset(kept)


class TestH1:
    def test_hexagon_single_loop(self):
        dm = hexagon_dm()
        diag = compute_persistence(build_filtration(dm, max_hom_dim=1))
        d1 = diag.pairs(1)
        assert d1.shape == (1, 2)
        np.testing.assert_allclose(d1[0], [1 / 3, 2 / 3], atol=1e-12)

    def test_hexagon_h0(self):
        dm = hexagon_dm()
        diag = compute_persistence(build_filtration(dm, max_hom_dim=1))
        d0 = diag.pairs(0)
        assert len(d0) == 6
        finite = d0[np.isfinite(d0[:, 1])]
        np.testing.assert_allclose(finite[:, 1], np.full(5, 1 / 3), atol=1e-12)

    def test_hexagon_matches_betti_curve(self):
        dm = hexagon_dm()
        diag = compute_persistence(build_filtration(dm, max_hom_dim=1))
        for t in (0.2, 0.34, 0.5, 0.66, 0.7, 1.0):
            alive = diag.pairs(1)
            count = int(np.sum((alive[:, 0] <= t) & (t < alive[:, 1])))
            assert count == betti_bruteforce(dm, t, 1), f"t={t}"

    def test_all_h1_bars_finite_at_auto_threshold(self):
        rng = np.random.default_rng(53)
        for n in (8, 15):
            dm = random_cloud_dm(rng, n)
            diag = compute_persistence(build_filtration(dm, max_hom_dim=1))
            d1 = diag.pairs(1)
            assert np.all(np.isfinite(d1[:, 1]))


class TestBettiOracle:
    def test_filled_triangle(self):
        D = np.zeros((3, 3))
        for i in range(3):
            for j in range(3):
                if i != j:
                    D[i, j] = 1.0
        dm = DistanceMatrix(entries=D, metric="euclidean", source_id="tri")
        assert betti_bruteforce(dm, 1.0, 1) == 0
        assert betti_bruteforce(dm, 0.5, 0) == 3

    def test_square_cycle(self):
        pts = np.array([[1.0, 1.0], [1.0, 2.0], [2.0, 2.0], [2.0, 1.0]])
        dm = pairwise_distances(PointCloud(points=pts, id="sq"), metric="euclidean")
        assert betti_bruteforce(dm, 1.0, 1) == 1
        assert betti_bruteforce(dm, 1.2, 1) == 1
        assert betti_bruteforce(dm, np.sqrt(2), 1) == 0

    def test_isolated_vertices(self):
        rng = np.random.default_rng(59)
        dm = random_cloud_dm(rng, 7)
        t = float(dm.entries[dm.entries > 0].min()) / 2
        assert betti_bruteforce(dm, t, 0) == 7
        assert betti_bruteforce(dm, t, 1) == 0

    def test_large_n_rejected(self):
        rng = np.random.default_rng(61)
        dm = random_cloud_dm(rng, 13)
        with pytest.raises(ValueError):
            betti_bruteforce(dm, 1.0, 0)

    def test_diagram_betti_consistency_exhaustive(self):
        rng = np.random.default_rng(67)
        for n in (6, 8, 10):
            dm = random_cloud_dm(rng, n)
            filt = build_filtration(dm, max_hom_dim=1)
            diag = compute_persistence(filt)
            diams = np.unique(np.concatenate([filt.diameters(d) for d in range(3)]))
            grid = np.concatenate([diams, (diams[:-1] + diams[1:]) / 2, [0.0]])
            for t in grid:
                for q in (0, 1):
                    bars = diag.pairs(q)
                    alive = int(np.sum((bars[:, 0] <= t) & (t < bars[:, 1])))
                    assert alive == betti_bruteforce(dm, float(t), q), f"n={n} t={t} q={q}"


class TestReduction:
    def test_clearing_matches_standard_pairing(self):
        rng = np.random.default_rng(71)
        for n in (5, 8, 10):
            dm = random_cloud_dm(rng, n)
            filt = build_filtration(dm, max_hom_dim=1)
            state = boundary_state(filt)
            std = reduce_standard(state)
            clr = reduce_with_clearing(state, filt)
            assert std.pivots == clr.pivots

    def test_pivot_rows_distinct_and_lowest(self):
        rng = np.random.default_rng(73)
        dm = random_cloud_dm(rng, 8)
        filt = build_filtration(dm, max_hom_dim=1)
        red = reduce_standard(boundary_state(filt))
        seen = set()
        for j, col in enumerate(red.columns):
            if len(col):
                piv = int(col[-1])
                assert piv not in seen
                seen.add(piv)
                assert red.pivots[piv] == j

    def test_empty_filtration(self):
        filt = vertices_only_filtration(0)
        state = boundary_state(filt)
        assert reduce_with_clearing(state, filt).pivots == {}
        assert reduce_standard(state).pivots == {}
        assert len(compute_persistence(filt)) == 0

    def test_vertices_only_all_essential(self):
        filt = vertices_only_filtration(4)
        state = boundary_state(filt)
        red = reduce_with_clearing(state, filt)
        assert red.pivots == {}
        diag = compute_persistence(filt)
        assert diag.as_tuples() == [(0.0, np.inf, 0)] * 4

    def test_kernel_pairing_matches_standard_reduction(self):
        # the compiled path and the pure reduction must emit identical bars
        rng = np.random.default_rng(79)
        for n in (5, 8, 10):
            dm = random_cloud_dm(rng, n)
            filt = build_filtration(dm, max_hom_dim=1)
            diag = compute_persistence(filt, include_zero_persistence=True)
            got = sorted(diag.as_tuples(), key=lambda p: (p[2], p[0], p[1]))
            assert got == bars_from_standard_reduction(filt)

    def test_fast_path_matches_standard_at_screening_scale(self):
        # large enough that the positivity screen and row deletion engage
        rng = np.random.default_rng(101)
        dm = random_cloud_dm(rng, 26, metric="angular")
        filt = build_filtration(dm, max_hom_dim=1)
        assert filt.counts()[2] >= 2048
        diag = compute_persistence(filt, include_zero_persistence=True)
        got = sorted(diag.as_tuples(), key=lambda p: (p[2], p[0], p[1]))
        assert got == bars_from_standard_reduction(filt)

    def test_fast_path_matches_standard_truncated_threshold(self):
        # absent edges must fail every certificate rather than corrupt one
        rng = np.random.default_rng(103)
        dm = random_cloud_dm(rng, 32)
        t = float(np.quantile(dm.entries[np.triu_indices(32, k=1)], 0.8))
        filt = build_filtration(dm, max_hom_dim=1, threshold=t)
        assert filt.counts()[2] >= 2048
        diag = compute_persistence(filt, include_zero_persistence=True)
        got = sorted(diag.as_tuples(), key=lambda p: (p[2], p[0], p[1]))
        assert got == bars_from_standard_reduction(filt)

    def test_positivity_certificates_are_sound(self):
        # a certified column must reduce to zero in the ground-truth reduction
        rng = np.random.default_rng(107)
        for n, metric, quantile in ((12, "euclidean", None), (14, "angular", None),
                                    (16, "euclidean", 0.8)):
            dm = random_cloud_dm(rng, n, metric=metric)
            t = None
            if quantile is not None:
                t = float(np.quantile(dm.entries[np.triu_indices(n, k=1)], quantile))
            filt = build_filtration(dm, max_hom_dim=1, threshold=t)
            certified = _cone_positive_mask(filt, 2, min_columns=1)
            assert certified.any()
            state = reduce_standard(boundary_state(filt))
            dims_g, pos_g = filt.global_order()
            global_of = np.empty(filt.counts()[2], dtype=np.int64)
            sel = dims_g == 2
            global_of[pos_g[sel]] = np.flatnonzero(sel)
            for p in np.flatnonzero(certified):
                assert len(state.columns[global_of[p]]) == 0

    def test_negative_edges_match_standard_reduction(self):
        # union-find must flag exactly the edge columns that keep a pivot
        rng = np.random.default_rng(109)
        for n in (8, 15, 25):
            dm = random_cloud_dm(rng, n)
            filt = build_filtration(dm, max_hom_dim=1)
            edges = filt.vertices(1)
            tree = tree_edge_mask(
                np.ascontiguousarray(edges[:, 0]),
                np.ascontiguousarray(edges[:, 1]),
                n,
            )
            state = reduce_standard(boundary_state(filt))
            dims_g, pos_g = filt.global_order()
            sel = dims_g == 1
            global_of = np.empty(filt.counts()[1], dtype=np.int64)
            global_of[pos_g[sel]] = np.flatnonzero(sel)
            from_reduction = np.array(
                [len(state.columns[g]) > 0 for g in global_of], dtype=bool
            )
            assert np.array_equal(tree, from_reduction)


class TestDiagramInvariances:
    def test_label_permutation_invariance(self):
        rng = np.random.default_rng(83)
        dm = random_cloud_dm(rng, 12)
        perm = rng.permutation(12)
        permuted = DistanceMatrix(
            entries=dm.entries[np.ix_(perm, perm)], metric=dm.metric, source_id="perm"
        )
        a = compute_persistence(build_filtration(dm, max_hom_dim=1))
        b = compute_persistence(build_filtration(permuted, max_hom_dim=1))
        assert a.equal_multiset(b)

    def test_distance_scaling_scales_diagram(self):
        rng = np.random.default_rng(89)
        dm = random_cloud_dm(rng, 10)
        for c in (2.0, 0.5):
            scaled = DistanceMatrix(
                entries=dm.entries * c, metric=dm.metric, source_id="scaled"
            )
            a = compute_persistence(build_filtration(dm, max_hom_dim=1))
            b = compute_persistence(build_filtration(scaled, max_hom_dim=1))
            assert np.array_equal(a.dims, b.dims)
            np.testing.assert_array_equal(a.births * c, b.births)
            np.testing.assert_array_equal(a.deaths * c, b.deaths)

    def test_determinism(self):
        rng = np.random.default_rng(97)
        dm = random_cloud_dm(rng, 15)
        a = compute_persistence(build_filtration(dm, max_hom_dim=1))
        b = compute_persistence(build_filtration(dm, max_hom_dim=1))
        assert a.equal_multiset(b)
