"""
From a diagram to a persistence image
=====================================

"""

import numpy as np

# sample a noisy circle in the plane; its one loop should dominate
rng = np.random.default_rng(7)
angles = rng.uniform(0.0, 2.0 * np.pi, 80)
points = np.stack([np.cos(angles), np.sin(angles)], axis=1)
points += 0.05 * rng.standard_normal(points.shape)

# distances, filtration, persistence, as in the hexagon demo
from talktopo import PointCloud, pairwise_distances, build_filtration, compute_persistence

cloud = PointCloud(points)
dm = pairwise_distances(cloud, metric="euclidean")
diagram = compute_persistence(build_filtration(dm, max_hom_dim=1))

h1 = diagram.finite_pairs(1)
print(f"{len(diagram)} bars in total, {len(h1)} finite ones in dimension 1")
print(f"longest loop: birth {h1[-1, 0]:.4f}, death {h1[-1, 1]:.4f}")

# rasterize the dimension-1 bars into a persistence image
from talktopo import PivConfig, rasterize

# persistence_range must cover the longest bar; ~1.7 for a unit circle here
cfg = PivConfig(pixels_per_axis=30, variance=0.01,
                birth_range=(0.0, 2.0), persistence_range=(0.0, 2.0))
piv = rasterize(diagram, dim=1, cfg=cfg)

print(f"image vector: {piv.values.size} pixels, "
      f"mass {piv.values.sum():.4f}, peak {piv.values.max():.4f}")

# render both as standalone SVG files next to this script
from pathlib import Path
from talktopo import plot_diagram_svg, plot_piv_svg

out = Path(__file__).resolve().parent
plot_diagram_svg(diagram, out / "circle_diagram.svg")
plot_piv_svg(piv, out / "circle_piv.svg")
print(f"wrote {out / 'circle_diagram.svg'}")
print(f"wrote {out / 'circle_piv.svg'}")
