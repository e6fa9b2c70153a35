"""Compiled boundary-matrix reduction over the two-element field.

Columns are processed left to right in filtration order. A column is
repeatedly replaced by its symmetric difference with the frozen column
owning its current pivot (largest remaining row index) until it either
empties out or claims an unowned pivot. Frozen pivot columns live in a
single growable pool; in-flight entries stay in two swap buffers, kept
sorted so the merge is a linear two-pointer walk.

Facet entries of -1 are padding for deleted rows and are dropped when a
column is loaded. ``known_zero`` marks columns the caller has proved
reduce to zero; they are skipped outright. Neither shortcut can change
the pairing: a pivot row always belongs to a positive simplex, so
deleting rows of negative simplices never removes a pivot, and a column
that reduces to zero never takes part in another column's reduction.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def reduce_columns(facets, known_zero, n_rows):
    """Reduce a boundary matrix given per-column sorted facet row indices.

    facets: (m, k) int32, each row sorted ascending, -1 entries padding
    known_zero: (m,) bool, columns to skip as already proved zero
    n_rows: row count of the matrix

    Returns (pivot_owner, status, pool, col_start, col_len, pair_row, pair_col):
    pivot_owner[r] = owning column or -1; status per column is 0 for a
    column that reduced to zero, 1 for a pivot column, 2 for skipped;
    pool/col_start/col_len hold the frozen pivot columns; pair arrays
    list the (row, column) pivot pairs in column order.
    """
    m, k = facets.shape
    pivot_owner = np.full(n_rows, -1, dtype=np.int64)
    status = np.zeros(m, dtype=np.int8)
    col_start = np.full(m, -1, dtype=np.int64)
    col_len = np.zeros(m, dtype=np.int64)

    cap = 2 * n_rows + 64
    pool = np.empty(cap, dtype=np.int32)
    used = 0

    buf_a = np.empty(n_rows + 1, dtype=np.int32)
    buf_b = np.empty(n_rows + 1, dtype=np.int32)

    max_pairs = m if m < n_rows else n_rows
    pair_row = np.empty(max_pairs, dtype=np.int64)
    pair_col = np.empty(max_pairs, dtype=np.int64)
    n_pairs = 0

    for j in range(m):
        if known_zero[j]:
            status[j] = 2
            continue
        ln = 0
        for t in range(k):
            v = facets[j, t]
            if v >= 0:
                buf_a[ln] = v
                ln += 1
        cur, other = buf_a, buf_b
        while ln > 0:
            piv = cur[ln - 1]
            owner = pivot_owner[piv]
            if owner < 0:
                break
            cs = col_start[owner]
            cl = col_len[owner]
            a = 0
            b = 0
            w = 0
            while a < ln and b < cl:
                x = cur[a]
                y = pool[cs + b]
                if x < y:
                    other[w] = x
                    w += 1
                    a += 1
                elif y < x:
                    other[w] = y
                    w += 1
                    b += 1
                else:
                    a += 1
                    b += 1
            while a < ln:
                other[w] = cur[a]
                w += 1
                a += 1
            while b < cl:
                other[w] = pool[cs + b]
                w += 1
                b += 1
            tmp = cur
            cur = other
            other = tmp
            ln = w
        if ln == 0:
            status[j] = 0
        else:
            piv = cur[ln - 1]
            pivot_owner[piv] = j
            status[j] = 1
            if used + ln > cap:
                while cap < used + ln:
                    cap *= 2
                grown = np.empty(cap, dtype=np.int32)
                grown[:used] = pool[:used]
                pool = grown
            col_start[j] = used
            for t in range(ln):
                pool[used + t] = cur[t]
            used += ln
            col_len[j] = ln
            pair_row[n_pairs] = piv
            pair_col[n_pairs] = j
            n_pairs += 1

    return (
        pivot_owner,
        status,
        pool[:used].copy(),
        col_start,
        col_len,
        pair_row[:n_pairs].copy(),
        pair_col[:n_pairs].copy(),
    )


@njit(cache=True, nogil=True)
def tree_edge_mask(edge_u, edge_v, n_points):
    """Mark the edges that merge two components, scanning in given order.

    Union-find with path halving and union by rank. Fed edges in
    filtration order, the marked set is exactly the negative edges of
    the boundary reduction and the unmarked finite edges are positive.
    """
    parent = np.arange(n_points, dtype=np.int64)
    rank = np.zeros(n_points, dtype=np.int64)
    out = np.zeros(edge_u.shape[0], dtype=np.bool_)
    for i in range(edge_u.shape[0]):
        x = edge_u[i]
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        y = edge_v[i]
        while parent[y] != y:
            parent[y] = parent[parent[y]]
            y = parent[y]
        if x == y:
            continue
        if rank[x] < rank[y]:
            x, y = y, x
        parent[y] = x
        if rank[x] == rank[y]:
            rank[x] += 1
        out[i] = True
    return out
