"""Vietoris-Rips filtrations over a distance matrix.

A simplex enters the filtration at its diameter (max pairwise distance
among its vertices, 0 for vertices). The total order is ascending
(diameter, dimension, lexicographic vertex tuple), which respects faces:
every facet of a simplex sorts strictly before it.

Simplices are stored implicitly, one combinatorial-number-system rank plus
one diameter per simplex (~16 bytes); vertex tuples are reconstructed on
demand. The rank of a strictly increasing tuple (v0, ..., vk) is

    sum_t C(v_t, t + 1)

which enumerates k-simplices in colexicographic order independent of the
number of points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import ResourceLimitError
from .metrics import DistanceMatrix

DEFAULT_MEMORY_BUDGET_BYTES = 2_000_000_000
_BYTES_PER_SIMPLEX = 16  # int64 rank + float64 diameter


def simplex_index(vertices) -> int:
    """Combinatorial rank of a strictly increasing vertex tuple."""
    verts = tuple(int(v) for v in vertices)
    if len(verts) == 0:
        raise ValueError("empty vertex tuple")
    if any(b <= a for a, b in zip(verts, verts[1:])) or verts[0] < 0:
        raise ValueError(f"vertices must be strictly increasing and non-negative, got {verts}")
    return sum(math.comb(v, t + 1) for t, v in enumerate(verts))


def index_to_simplex(index: int, dim: int, n_points: int | None = None) -> tuple[int, ...]:
    """Inverse of ``simplex_index`` for a simplex of dimension ``dim``.

    If ``n_points`` is given, the index is range-checked against
    C(n_points, dim+1).
    """
    index = int(index)
    if index < 0:
        raise ValueError(f"index must be non-negative, got {index}")
    if dim < 0:
        raise ValueError(f"dim must be non-negative, got {dim}")
    if n_points is not None and index >= math.comb(n_points, dim + 1):
        raise ValueError(
            f"index {index} out of range for dim-{dim} simplices on {n_points} points"
        )
    verts = [0] * (dim + 1)
    rem = index
    for t in range(dim, -1, -1):
        # largest v with C(v, t+1) <= rem
        v = t  # C(t, t+1) == 0, always admissible
        step = 1
        while math.comb(v + step, t + 1) <= rem:
            step *= 2
        while step > 0:
            if math.comb(v + step, t + 1) <= rem:
                v += step
            step //= 2
        verts[t] = v
        rem -= math.comb(v, t + 1)
    return tuple(verts)


def _binom_table(n: int, max_k: int) -> np.ndarray:
    """table[i, k] = C(i, k) for 0 <= i <= n, 0 <= k <= max_k (exact int64)."""
    table = np.zeros((n + 1, max_k + 1), dtype=np.int64)
    table[:, 0] = 1
    for i in range(1, n + 1):
        upto = min(i, max_k)
        table[i, 1 : upto + 1] = table[i - 1, 1 : upto + 1] + table[i - 1, 0:upto]
    return table


def _ranks_from_vertices(verts: np.ndarray, binom: np.ndarray) -> np.ndarray:
    """Vectorized combinatorial rank of each row of ``verts``."""
    k1 = verts.shape[1]
    out = np.zeros(verts.shape[0], dtype=np.int64)
    for t in range(k1):
        out += binom[verts[:, t], t + 1]
    return out


def _vertices_from_ranks(ranks: np.ndarray, dim: int, binom: np.ndarray) -> np.ndarray:
    """Vectorized unranking; returns an (m, dim+1) int32 array."""
    m = ranks.shape[0]
    verts = np.empty((m, dim + 1), dtype=np.int32)
    rem = ranks.astype(np.int64, copy=True)
    for t in range(dim, 0, -1):
        col = binom[:, t + 1]
        v = np.searchsorted(col, rem, side="right") - 1
        verts[:, t] = v
        rem -= col[v]
    verts[:, 0] = rem  # C(v, 1) == v
    return verts


@dataclass(frozen=True)
class FiltrationSimplex:
    vertices: tuple[int, ...]
    diameter: float

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1


class Filtration:
    """All simplices of dimension <= max_dim with diameter <= threshold.

    Per dimension, ranks and diameters are stored sorted by
    (diameter, lexicographic vertex tuple); the global filtration order
    interleaves dimensions by (diameter, dimension, vertex tuple).
    """

    def __init__(self, n_points, max_dim, threshold, index_by_dim, diam_by_dim,
                 binom, metric="", source_id=""):
        self.n_points = int(n_points)
        self.max_dim = int(max_dim)
        self.threshold = float(threshold)
        self.metric = metric
        self.source_id = source_id
        self._index_by_dim = index_by_dim
        self._diam_by_dim = diam_by_dim
        self._binom = binom

    def counts(self) -> list[int]:
        return [len(a) for a in self._index_by_dim]

    def __len__(self) -> int:
        return sum(self.counts())

    def diameters(self, dim: int) -> np.ndarray:
        return self._diam_by_dim[dim]

    def ranks(self, dim: int) -> np.ndarray:
        return self._index_by_dim[dim]

    def vertices(self, dim: int) -> np.ndarray:
        """(count, dim+1) vertex array in stored (filtration) order."""
        return _vertices_from_ranks(self._index_by_dim[dim], dim, self._binom)

    def global_order(self) -> tuple[np.ndarray, np.ndarray]:
        """Global filtration order as parallel (dim, within-dim position) arrays."""
        dims = np.concatenate(
            [np.full(len(a), d, dtype=np.int32) for d, a in enumerate(self._diam_by_dim)]
        )
        pos = np.concatenate(
            [np.arange(len(a), dtype=np.int64) for a in self._diam_by_dim]
        )
        diams = np.concatenate(self._diam_by_dim)
        order = np.lexsort((pos, dims, diams))
        return dims[order], pos[order]

    def simplices(self) -> Iterator[FiltrationSimplex]:
        dims, pos = self.global_order()
        verts = [self.vertices(d) for d in range(self.max_dim + 1)]
        for d, p in zip(dims, pos):
            yield FiltrationSimplex(
                vertices=tuple(int(v) for v in verts[d][p]),
                diameter=float(self._diam_by_dim[d][p]),
            )

    def dump_csv(self, path) -> None:
        """Debug dump: one simplex per row, (dim, v0..vk, diameter), filtration order."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("dim,vertices,diameter\n")
            for s in self.simplices():
                vs = " ".join(str(v) for v in s.vertices)
                fh.write(f"{s.dim},{vs},{s.diameter!r}\n")


def _sort_by_diam_then_lex(verts: np.ndarray, diams: np.ndarray):
    keys = tuple(verts[:, t] for t in range(verts.shape[1] - 1, -1, -1)) + (diams,)
    order = np.lexsort(keys)
    return verts[order], diams[order]


def build_filtration(dm: DistanceMatrix, max_hom_dim: int = 1, threshold=None,
                     memory_budget_bytes: int = DEFAULT_MEMORY_BUDGET_BYTES) -> Filtration:
    """Enumerate the Rips filtration up to simplex dimension max_hom_dim + 1.

    Cofaces one dimension above the homology of interest are required to
    kill cycles, hence the +1. ``threshold=None`` means auto (the largest
    matrix entry), which makes every bar in dimensions <= max_hom_dim
    finite except the last connected component.
    """
    n = dm.n
    if max_hom_dim < 0:
        raise ValueError(f"max_hom_dim must be >= 0, got {max_hom_dim}")
    if max_hom_dim + 1 >= n and not (n == 1 and max_hom_dim == 0):
        raise ValueError(
            f"max_hom_dim={max_hom_dim} needs simplices of dimension {max_hom_dim + 1}, "
            f"impossible on {n} points"
        )
    if threshold is None or threshold == "auto":
        thr = dm.max_distance()
    else:
        thr = float(threshold)
        if thr <= 0.0:
            raise ValueError(f"threshold must be positive, got {thr}")

    top_dim = max_hom_dim + 1
    D = dm.entries
    binom = _binom_table(n, top_dim + 2)

    budget_count = memory_budget_bytes // _BYTES_PER_SIMPLEX
    total = 0

    def charge(count: int):
        nonlocal total
        total += count
        if total > budget_count:
            raise ResourceLimitError(
                f"filtration needs at least {total} simplices, exceeding the "
                f"budget of {budget_count} ({memory_budget_bytes} bytes)"
            )

    index_by_dim: list[np.ndarray] = []
    diam_by_dim: list[np.ndarray] = []

    # dimension 0: all vertices at diameter 0, already in (diam, lex) order
    charge(n)
    index_by_dim.append(np.arange(n, dtype=np.int64))
    diam_by_dim.append(np.zeros(n, dtype=np.float64))

    verts_prev = np.arange(n, dtype=np.int32).reshape(-1, 1)
    diam_prev = np.zeros(n, dtype=np.float64)

    for k in range(1, top_dim + 1):
        if k == 1:
            i, j = np.triu_indices(n, 1)
            verts = np.stack([i.astype(np.int32), j.astype(np.int32)], axis=1)
            diams = D[i, j]
        else:
            # grow each (k-1)-simplex by every vertex above its current max;
            # the new diameter is the max of the old one and the new edges
            pieces_v, pieces_d = [], []
            last = verts_prev[:, -1]
            order = np.argsort(last, kind="stable")
            sv, sd = verts_prev[order], diam_prev[order]
            slast = last[order]
            for v in range(k, n):
                hi = np.searchsorted(slast, v, side="left")
                if hi == 0:
                    continue
                block = sv[:hi]
                d_new = np.maximum(sd[:hi], D[block, v].max(axis=1))
                keep = d_new <= thr
                if not np.any(keep):
                    continue
                ext = np.empty((int(keep.sum()), k + 1), dtype=np.int32)
                ext[:, :k] = block[keep]
                ext[:, k] = v
                pieces_v.append(ext)
                pieces_d.append(d_new[keep])
            if pieces_v:
                verts = np.concatenate(pieces_v)
                diams = np.concatenate(pieces_d)
            else:
                verts = np.empty((0, k + 1), dtype=np.int32)
                diams = np.empty(0, dtype=np.float64)
        if k == 1:
            keep = diams <= thr
            verts, diams = verts[keep], diams[keep]
        charge(len(diams))
        verts, diams = _sort_by_diam_then_lex(verts, diams)
        index_by_dim.append(_ranks_from_vertices(verts.astype(np.int64), binom))
        diam_by_dim.append(diams)
        verts_prev, diam_prev = verts, diams

    return Filtration(
        n_points=n,
        max_dim=top_dim,
        threshold=thr,
        index_by_dim=index_by_dim,
        diam_by_dim=diam_by_dim,
        binom=binom,
        metric=dm.metric,
        source_id=dm.source_id,
    )
