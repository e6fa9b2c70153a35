"""p-Wasserstein distances between persistence diagrams.

Diagrams of unequal size are compared by letting every point either
match a point of the other diagram at L-infinity ground cost or retire
to its own orthogonal diagonal projection at half its persistence;
leftover projection slots pair off at zero cost. The optimum over the
augmented square cost matrix is found exactly by a Hungarian-style
assignment solve. Ground costs are summed in p-th powers and the
conventional outer 1/p root is applied, which keeps the result a metric
(for p = 1 the root changes nothing).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .persistence import PersistenceDiagram

_BRUTEFORCE_MAX_POINTS = 8


@dataclass(frozen=True)
class DiagonalAugmentedMatching:
    """An optimal matching between two diagonal-augmented diagrams.

    pairs holds one ((birth, death), (birth, death)) entry per
    off-diagonal point of either diagram; a point matched to the
    diagonal appears with its orthogonal projection as the partner.
    cost is the raw sum of L-infinity ground distances to the power p,
    before the outer 1/p root.
    """

    pairs: list[tuple[tuple[float, float], tuple[float, float]]]
    cost: float
    p: float


def _check_p(p: float) -> float:
    p = float(p)
    if not (p >= 1.0 and math.isfinite(p)):
        raise ValueError(f"p must satisfy 1 <= p < inf, got {p}")
    return p


def _finite_points(diag: PersistenceDiagram, dim: int) -> np.ndarray:
    pts = diag.pairs(dim)
    if np.any(np.isinf(pts[:, 1])):
        raise ValueError(
            f"dimension {dim} contains infinite-death points; "
            "filter essentials first (finite_pairs)"
        )
    return pts


def _augmented_cost(a: np.ndarray, b: np.ndarray, p: float) -> np.ndarray:
    """Square (n1+n2) cost matrix in p-th powers of the ground distance.

    Rows are a's points then b's projection slots, columns are b's
    points then a's projection slots. Retiring to the diagonal costs the
    same for every slot, so slot identity is irrelevant and the
    assignment optimum equals the augmented-bijection optimum.
    """
    n1, n2 = len(a), len(b)
    M = np.zeros((n1 + n2, n1 + n2))
    if n1 and n2:
        M[:n1, :n2] = np.max(np.abs(a[:, None, :] - b[None, :, :]), axis=2) ** p
    M[:n1, n2:] = (((a[:, 1] - a[:, 0]) / 2.0) ** p)[:, None]
    M[n1:, :n2] = (((b[:, 1] - b[:, 0]) / 2.0) ** p)[None, :]
    return M


def wasserstein(
    d1: PersistenceDiagram, d2: PersistenceDiagram, p: float = 1.0, dim: int = 0
) -> float:
    """p-Wasserstein distance between the dimension-dim finite points.

    Exactly symmetric in its arguments (the two point sets are put in a
    canonical order before any arithmetic) and zero iff the point
    multisets agree. Infinite-death points in the selected dimension are
    rejected; other dimensions are ignored entirely.
    """
    p = _check_p(p)
    a = _finite_points(d1, dim)
    b = _finite_points(d2, dim)
    if (len(a), a.tobytes()) > (len(b), b.tobytes()):
        a, b = b, a
    if len(a) == 0 and len(b) == 0:
        return 0.0
    M = _augmented_cost(a, b, p)
    rows, cols = linear_sum_assignment(M)
    return float(M[rows, cols].sum()) ** (1.0 / p)


def wasserstein_matching(
    d1: PersistenceDiagram, d2: PersistenceDiagram, p: float = 1.0, dim: int = 0
) -> DiagonalAugmentedMatching:
    """Optimal matching realizing the p-Wasserstein cost, orientation kept.

    Unlike ``wasserstein`` this does not reorder its arguments, so the
    pair tuples read (point of d1 or projection, point of d2 or
    projection); the summed cost can differ from the symmetric distance
    by float rounding only.
    """
    p = _check_p(p)
    a = _finite_points(d1, dim)
    b = _finite_points(d2, dim)
    n1, n2 = len(a), len(b)
    if n1 == 0 and n2 == 0:
        return DiagonalAugmentedMatching(pairs=[], cost=0.0, p=p)
    M = _augmented_cost(a, b, p)
    rows, cols = linear_sum_assignment(M)
    pairs = []
    for r, c in zip(rows, cols):
        if r < n1 and c < n2:
            pairs.append((tuple(map(float, a[r])), tuple(map(float, b[c]))))
        elif r < n1:
            mid = float(a[r].sum() / 2.0)
            pairs.append((tuple(map(float, a[r])), (mid, mid)))
        elif c < n2:
            mid = float(b[c].sum() / 2.0)
            pairs.append(((mid, mid), tuple(map(float, b[c]))))
    return DiagonalAugmentedMatching(
        pairs=pairs, cost=float(M[rows, cols].sum()), p=p
    )


def wasserstein_bruteforce(
    d1: PersistenceDiagram, d2: PersistenceDiagram, p: float = 1.0, dim: int = 0
) -> float:
    """Exact p-Wasserstein by exhausting every augmented bijection.

    Enumerates which subset of each diagram matches across (all
    bijections between same-size subsets) with every unmatched point
    retiring to the diagonal. Deliberately shares no code with the
    assignment formulation so the two can check each other; guarded to
    small inputs because the enumeration is factorial.
    """
    p = _check_p(p)
    a = _finite_points(d1, dim)
    b = _finite_points(d2, dim)
    na, nb = len(a), len(b)
    if na + nb > _BRUTEFORCE_MAX_POINTS:
        raise ValueError(
            f"brute force limited to {_BRUTEFORCE_MAX_POINTS} total points, "
            f"got {na + nb}"
        )
    if na + nb == 0:
        return 0.0
    pa = ((a[:, 1] - a[:, 0]) / 2.0) ** p
    pb = ((b[:, 1] - b[:, 0]) / 2.0) ** p
    ground = None
    if na and nb:
        ground = np.max(np.abs(a[:, None, :] - b[None, :, :]), axis=2) ** p
    best = math.inf
    for r in range(min(na, nb) + 1):
        for sa in itertools.combinations(range(na), r):
            base_a = float(pa.sum() - pa[list(sa)].sum())
            for sb in itertools.combinations(range(nb), r):
                base = base_a + float(pb.sum() - pb[list(sb)].sum())
                if r == 0:
                    best = min(best, base)
                    continue
                for perm in itertools.permutations(sb):
                    cost = base + sum(ground[i, j] for i, j in zip(sa, perm))
                    if cost < best:
                        best = cost
    return best ** (1.0 / p)
