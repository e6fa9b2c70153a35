"""
Persistence of a hexagon point cloud
====================================

"""

import numpy as np

# six unit vectors at 60 degree spacing form a regular hexagon
angles = np.arange(6) * (2.0 * np.pi / 6.0)
points = np.stack([np.cos(angles), np.sin(angles)], axis=1)

# wrap the array in a PointCloud and compute angular distances
from talktopo import PointCloud, pairwise_distances

cloud = PointCloud(points)
dm = pairwise_distances(cloud, metric="angular")

# adjacent vertices sit 1/3 apart in angular distance, opposite ones 1 apart
print("distance matrix:")
print(np.round(dm.entries, 6))

# build the Vietoris-Rips filtration up to dimension-1 homology
from talktopo import build_filtration, compute_persistence

filt = build_filtration(dm, max_hom_dim=1)
diagram = compute_persistence(filt)

# one component lives forever; the loop is born at 1/3 and dies at 2/3,
# when the short chords triangulate the hexagon away
for birth, death, dim in diagram.as_tuples():
    print(f"dim {dim}: birth {birth:.6f}, death {death:.6f}")
