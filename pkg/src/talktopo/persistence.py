"""Persistence diagrams of Rips filtrations over the two-element field.

``compute_persistence`` pairs simplices dimension by dimension from the
bottom up. A union-find sweep over the edges yields the dimension-0
bars and the set of negative edges. Each higher boundary matrix is then
reduced left to right after two pairing-preserving preprocessing steps:
rows of negative simplices one dimension down are deleted (a pivot row
always belongs to a positive simplex, so no pivot is lost), and columns
certified positive by a cone argument are skipped without reduction.
The pairing is checked in the test suite against an unoptimized
left-to-right reduction, a union-find computation for dimension 0, and
a dense rank oracle for Betti numbers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ._reduction import reduce_columns, tree_edge_mask
from .filtration import Filtration
from .metrics import DistanceMatrix

_BETTI_MAX_POINTS = 12


@dataclass
class PersistenceDiagram:
    """Multiset of (birth, death, dim) points plus provenance metadata.

    Points are kept canonically sorted by (dim, birth, death); death may
    be +inf. Zero-persistence points are dropped at construction unless
    the computation asked to retain them.
    """

    dims: np.ndarray
    births: np.ndarray
    deaths: np.ndarray
    source_id: str = ""
    metric: str = ""
    threshold: float = float("nan")

    def __post_init__(self):
        dims = np.asarray(self.dims, dtype=np.int32).ravel()
        births = np.asarray(self.births, dtype=np.float64).ravel()
        deaths = np.asarray(self.deaths, dtype=np.float64).ravel()
        if not (len(dims) == len(births) == len(deaths)):
            raise ValueError("dims, births, deaths must have equal length")
        if np.any(births > deaths):
            bad = int(np.argmax(births > deaths))
            raise ValueError(
                f"point {bad} has birth {births[bad]} after death {deaths[bad]}"
            )
        if np.any(~np.isfinite(births)):
            raise ValueError("births must be finite")
        order = np.lexsort((deaths, births, dims))
        object.__setattr__(self, "dims", dims[order])
        object.__setattr__(self, "births", births[order])
        object.__setattr__(self, "deaths", deaths[order])

    def __len__(self) -> int:
        return len(self.dims)

    def as_tuples(self) -> list[tuple[float, float, int]]:
        return [
            (float(b), float(d), int(q))
            for q, b, d in zip(self.dims, self.births, self.deaths)
        ]

    def pairs(self, dim: int) -> np.ndarray:
        """(k, 2) array of (birth, death) for one dimension, sorted."""
        mask = self.dims == dim
        return np.stack([self.births[mask], self.deaths[mask]], axis=1)

    def finite_pairs(self, dim: int) -> np.ndarray:
        p = self.pairs(dim)
        return p[np.isfinite(p[:, 1])]

    def equal_multiset(self, other: "PersistenceDiagram", tol: float = 0.0) -> bool:
        if len(self) != len(other) or not np.array_equal(self.dims, other.dims):
            return False
        if tol == 0.0:
            return bool(
                np.array_equal(self.births, other.births)
                and np.array_equal(self.deaths, other.deaths)
            )
        both_inf = np.isinf(self.deaths) & np.isinf(other.deaths)
        close_b = np.abs(self.births - other.births) <= tol
        close_d = both_inf | (np.abs(self.deaths - other.deaths) <= tol)
        return bool(np.all(close_b) and np.all(close_d))


def _drop_zero_persistence(dims, births, deaths, keep):
    if keep:
        return dims, births, deaths
    alive = births != deaths
    return dims[alive], births[alive], deaths[alive]


def _facet_rows(f: Filtration, d: int) -> np.ndarray:
    """(m, d+1) int32: sorted row positions of each d-simplex's facets.

    The facet obtained by dropping vertex position i of (v_0..v_d) has
    combinatorial rank sum_{t<i} C(v_t, t+1) + sum_{t>i} C(v_t, t); ranks
    are then located in the stored (d-1)-simplex order. Built one drop
    position at a time to keep peak memory at O(m) temporaries.
    """
    verts = f.vertices(d)
    binom = f._binom
    m = verts.shape[0]
    prev_ranks = f.ranks(d - 1)
    order = np.argsort(prev_ranks, kind="stable")
    sorted_prev = prev_ranks[order]
    rows = np.empty((m, d + 1), dtype=np.int32)
    for i in range(d + 1):
        r = np.zeros(m, dtype=np.int64)
        for t in range(d + 1):
            if t == i:
                continue
            r += binom[verts[:, t], t + 1 if t < i else t]
        pos = np.searchsorted(sorted_prev, r)
        if len(sorted_prev) and (pos.max(initial=0) >= len(sorted_prev)
                                 or not np.array_equal(sorted_prev[pos], r)):
            raise AssertionError("facet missing from filtration; enumeration is broken")
        rows[:, i] = order[pos]
    rows.sort(axis=1)
    return rows


def _edge_lookup(f: Filtration) -> np.ndarray:
    """(n, n) diameter of each edge present in the filtration, inf if absent."""
    n = f.n_points
    E = np.full((n, n), np.inf)
    np.fill_diagonal(E, 0.0)
    if f.max_dim >= 1 and f.counts()[1] > 0:
        edges = f.vertices(1)
        w = f.diameters(1)
        E[edges[:, 0], edges[:, 1]] = w
        E[edges[:, 1], edges[:, 0]] = w
    return E


def _cone_positive_mask(
    f: Filtration, d: int, min_columns: int = 2048, max_passes: int = 64
) -> np.ndarray:
    """Columns of dimension d provably positive before any reduction.

    Over the two-element field the boundary of a simplex equals the sum
    of the boundaries of the cones w * facet over any apex w outside the
    simplex. When every one of those cone simplices enters the
    filtration strictly before the simplex itself, its column is a sum
    of strictly earlier columns, so it reduces to zero in every valid
    reduction. Sufficient conditions for apex w: every vertex sits
    closer to w than the simplex diameter (cones over non-maximal facets
    then enter strictly earlier, and absent edges read as inf), and w is
    smaller than every vertex opposite a diameter-realizing facet (the
    cones sharing the diameter then win the lexicographic tie-break).

    Apexes are tried most-central first, each pass vectorized over the
    still-uncertified columns. Certifying nothing is always sound, so
    small matrices are returned unscreened and passes stop once the
    leftovers are cheap enough to reduce directly.
    """
    verts = f.vertices(d)
    diam = f.diameters(d)
    m = verts.shape[0]
    certified = np.zeros(m, dtype=bool)
    if m < min_columns:
        return certified
    n = f.n_points
    k = d + 1
    E = _edge_lookup(f)

    w_opp = np.full(m, n, dtype=np.int64)
    for i in range(k):
        fd = None
        for a in range(k):
            for b in range(a + 1, k):
                if a == i or b == i:
                    continue
                e = E[verts[:, a], verts[:, b]]
                fd = e if fd is None else np.maximum(fd, e, out=fd)
        tie = fd == diam
        w_opp = np.where(tie & (verts[:, i] < w_opp), verts[:, i], w_opp)

    remaining = np.flatnonzero(~certified)
    floor = max(64, m // 1024)
    apexes = np.argsort(E.max(axis=1), kind="stable")
    for w in apexes[:max_passes]:
        r = remaining
        cd = E[verts[r, 0], w].copy()
        contains = verts[r, 0] == w
        for t in range(1, k):
            np.maximum(cd, E[verts[r, t], w], out=cd)
            contains |= verts[r, t] == w
        ok = (cd < diam[r]) & (w < w_opp[r]) & ~contains
        certified[r[ok]] = True
        remaining = r[~ok]
        if remaining.size <= floor:
            break
    return certified


def compute_persistence(f: Filtration, include_zero_persistence: bool = False) -> PersistenceDiagram:
    """Persistence diagram for dimensions 0..f.max_dim-1.

    Finite bars in dimension q come from pivot pairs of the dimension-q+1
    boundary matrix; essential bars are the q-columns that reduce to zero
    and are never a pivot row one dimension up. Dimension 0 is paired by
    union-find, which also hands the negative-edge rows to the dimension-2
    reduction for deletion.
    """
    top = f.max_dim
    counts = f.counts()
    n = counts[0]
    dims_l, births_l, deaths_l = [], [], []

    if top >= 1 and counts[1] > 0:
        edges = f.vertices(1)
        negative = tree_edge_mask(
            np.ascontiguousarray(edges[:, 0]),
            np.ascontiguousarray(edges[:, 1]),
            n,
        )
        h0_deaths = f.diameters(1)[negative]
    else:
        negative = np.zeros(counts[1] if top >= 1 else 0, dtype=bool)
        h0_deaths = np.empty(0, dtype=np.float64)
    n_components = n - len(h0_deaths)
    dims_l.append(np.zeros(len(h0_deaths) + n_components, dtype=np.int32))
    births_l.append(np.zeros(len(h0_deaths) + n_components))
    deaths_l.append(np.concatenate([h0_deaths, np.full(n_components, np.inf)]))

    positive = ~negative
    for d in range(2, top + 1):
        q = d - 1
        claimed = np.zeros(counts[q], dtype=bool)
        if counts[d] > 0:
            rows = _facet_rows(f, d)
            rows = np.where(negative[rows], np.int32(-1), rows)
            rows.sort(axis=1)
            certified = _cone_positive_mask(f, d)
            _, status, _, _, _, prow, pcol = reduce_columns(rows, certified, counts[q])
            del rows
            claimed[prow] = True
            b = f.diameters(q)[prow]
            dth = f.diameters(d)[pcol]
            dims_l.append(np.full(len(b), q, dtype=np.int32))
            births_l.append(b)
            deaths_l.append(dth)
            negative = status == 1
        else:
            negative = np.zeros(0, dtype=bool)
        ess = positive & ~claimed
        eb = f.diameters(q)[ess]
        dims_l.append(np.full(len(eb), q, dtype=np.int32))
        births_l.append(eb)
        deaths_l.append(np.full(len(eb), np.inf))
        positive = ~negative

    dims = np.concatenate(dims_l) if dims_l else np.empty(0, np.int32)
    births = np.concatenate(births_l) if births_l else np.empty(0)
    deaths = np.concatenate(deaths_l) if deaths_l else np.empty(0)
    dims, births, deaths = _drop_zero_persistence(
        dims, births, deaths, include_zero_persistence
    )
    return PersistenceDiagram(
        dims=dims, births=births, deaths=deaths,
        source_id=f.source_id, metric=f.metric, threshold=f.threshold,
    )


def compute_h0_unionfind(f: Filtration, include_zero_persistence: bool = False) -> PersistenceDiagram:
    """Dimension-0 diagram by Kruskal-style merging over the sorted edges.

    Every vertex is born at 0; an edge that joins two components kills one
    at the edge diameter. Components alive at the end give infinite bars.
    Must agree with compute_persistence restricted to dimension 0.
    """
    n = f.n_points
    parent = np.arange(n, dtype=np.int64)
    rank = np.zeros(n, dtype=np.int64)

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    deaths = []
    if f.max_dim >= 1:
        edges = f.vertices(1)
        diams = f.diameters(1)
        for (u, v), w in zip(edges, diams):
            ru, rv = find(int(u)), find(int(v))
            if ru == rv:
                continue
            if rank[ru] < rank[rv]:
                ru, rv = rv, ru
            parent[rv] = ru
            if rank[ru] == rank[rv]:
                rank[ru] += 1
            deaths.append(float(w))
    n_inf = n - len(deaths)
    deaths_arr = np.concatenate([np.array(deaths), np.full(n_inf, np.inf)])
    births_arr = np.zeros(len(deaths_arr))
    dims_arr = np.zeros(len(deaths_arr), dtype=np.int32)
    dims_arr, births_arr, deaths_arr = _drop_zero_persistence(
        dims_arr, births_arr, deaths_arr, include_zero_persistence
    )
    return PersistenceDiagram(
        dims=dims_arr, births=births_arr, deaths=deaths_arr,
        source_id=f.source_id, metric=f.metric, threshold=f.threshold,
    )


def _gf2_rank(mat: np.ndarray) -> int:
    """Rank over the two-element field by in-place elimination."""
    m = mat.copy().astype(np.uint8)
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if m[i, c]:
                piv = i
                break
        if piv is None:
            continue
        m[[r, piv]] = m[[piv, r]]
        hit = m[:, c].astype(bool)
        hit[r] = False
        m[hit] ^= m[r]
        r += 1
        if r == rows:
            break
    return r


def betti_bruteforce(dm: DistanceMatrix, t: float, dim: int) -> int:
    """Betti number of the Rips complex at scale t by dense rank-nullity.

    beta_k = #k-simplices - rank(boundary_k) - rank(boundary_{k+1}),
    with simplices enumerated directly from the distance matrix. Guarded
    to small point counts; this is a test oracle, not a fast path.
    """
    n = dm.n
    if n > _BETTI_MAX_POINTS:
        raise ValueError(
            f"brute-force Betti limited to {_BETTI_MAX_POINTS} points, got {n}"
        )
    if dim < 0:
        raise ValueError(f"dim must be >= 0, got {dim}")
    D = dm.entries

    def simplices(k: int) -> list[tuple[int, ...]]:
        out = []
        for verts in itertools.combinations(range(n), k + 1):
            diam = max((D[a, b] for a, b in itertools.combinations(verts, 2)), default=0.0)
            if diam <= t:
                out.append(verts)
        return out

    def boundary_rank(k: int) -> int:
        # rank of the map from k-simplices to (k-1)-simplices
        if k == 0:
            return 0
        rows = {s: i for i, s in enumerate(simplices(k - 1))}
        cols = simplices(k)
        if not rows or not cols:
            return 0
        mat = np.zeros((len(rows), len(cols)), dtype=np.uint8)
        for j, s in enumerate(cols):
            for drop in range(k + 1):
                face = s[:drop] + s[drop + 1:]
                mat[rows[face], j] = 1
        return _gf2_rank(mat)

    n_k = len(simplices(dim))
    return n_k - boundary_rank(dim) - boundary_rank(dim + 1)


@dataclass
class ReductionState:
    """Boundary matrix over the whole filtration in global column order.

    columns[g] is the sorted array of global row indices of simplex g's
    facets (empty for vertices and for columns reduced to zero); pivots
    maps a row index to the column that owns it.
    """

    columns: list[np.ndarray]
    pivots: dict[int, int] = field(default_factory=dict)
    dims: np.ndarray = field(default_factory=lambda: np.empty(0, np.int32))

    def pivot_pairs(self) -> list[tuple[int, int]]:
        return sorted((r, c) for r, c in self.pivots.items())


def boundary_state(f: Filtration) -> ReductionState:
    """Unreduced global boundary matrix of a filtration."""
    dims_g, pos_g = f.global_order()
    global_of: list[np.ndarray] = []
    for d in range(f.max_dim + 1):
        gi = np.empty(f.counts()[d], dtype=np.int64)
        sel = dims_g == d
        gi[pos_g[sel]] = np.flatnonzero(sel)
        global_of.append(gi)
    columns: list[np.ndarray] = [np.empty(0, np.int64)] * len(dims_g)
    for d in range(1, f.max_dim + 1):
        if f.counts()[d] == 0:
            continue
        rows = _facet_rows(f, d)
        grows = np.sort(global_of[d - 1][rows], axis=1)
        col_ids = global_of[d]
        for p in range(len(col_ids)):
            columns[col_ids[p]] = grows[p].astype(np.int64)
    return ReductionState(columns=columns, pivots={}, dims=dims_g)


def reduce_standard(state: ReductionState) -> ReductionState:
    """Plain left-to-right column reduction, no optimizations (oracle)."""
    columns = [c.copy() for c in state.columns]
    pivots: dict[int, int] = {}
    for j in range(len(columns)):
        col = columns[j]
        while len(col) > 0:
            piv = int(col[-1])
            owner = pivots.get(piv)
            if owner is None:
                pivots[piv] = j
                break
            col = np.setxor1d(col, columns[owner], assume_unique=True)
        columns[j] = col
    return ReductionState(columns=columns, pivots=pivots, dims=state.dims)


def reduce_with_clearing(state: ReductionState, f: Filtration) -> ReductionState:
    """Reduction processing dimensions top-down, skipping cleared columns.

    A pivot row found in dimension d+1 is a column of dimension d that
    must reduce to zero, so it is emptied without any column operations.
    The resulting pairing equals the one from reduce_standard.
    """
    columns = [c.copy() for c in state.columns]
    pivots: dict[int, int] = {}
    dims_g = state.dims
    cleared: set[int] = set()
    for d in range(f.max_dim, 0, -1):
        col_ids = np.flatnonzero(dims_g == d)
        new_cleared: set[int] = set()
        for j in col_ids:
            j = int(j)
            if j in cleared:
                columns[j] = np.empty(0, np.int64)
                continue
            col = columns[j]
            while len(col) > 0:
                piv = int(col[-1])
                owner = pivots.get(piv)
                if owner is None:
                    pivots[piv] = j
                    new_cleared.add(piv)
                    break
                col = np.setxor1d(col, columns[owner], assume_unique=True)
            columns[j] = col
        cleared = new_cleared
    return ReductionState(columns=columns, pivots=pivots, dims=dims_g)
