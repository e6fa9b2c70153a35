"""
Wasserstein distance between diagrams
=====================================

"""

import numpy as np

from talktopo import PersistenceDiagram, wasserstein

# two small dimension-1 diagrams given directly as (dim, birth, death) bars
a = PersistenceDiagram(
    dims=np.array([1, 1]),
    births=np.array([0.2, 0.5]),
    deaths=np.array([0.9, 0.8]),
)
b = PersistenceDiagram(
    dims=np.array([1]),
    births=np.array([0.25]),
    deaths=np.array([0.85]),
)

# points may match each other or be retired to the diagonal, whichever
# assignment is cheapest overall
for p in (1.0, 2.0):
    d = wasserstein(a, b, p=p, dim=1)
    print(f"W_{p:g}(a, b) = {d:.6f}")

# the distance is a metric: zero on identical diagrams and symmetric
print("W_1(a, a) =", wasserstein(a, a, p=1.0, dim=1))
print("symmetric:", wasserstein(a, b, p=1.0, dim=1) == wasserstein(b, a, p=1.0, dim=1))

# an unmatched bar costs its distance to the diagonal; against an empty
# diagram that is half the persistence of each bar (in the sup ground metric)
empty = PersistenceDiagram(dims=np.array([], dtype=int),
                           births=np.array([]), deaths=np.array([]))
print("W_1(a, empty) =", wasserstein(a, empty, p=1.0, dim=1))
print("half-persistence sum =", 0.5 * ((0.9 - 0.2) + (0.8 - 0.5)))
