"""
Shrinking holes in preimage sets
================================

The largest ball avoiding ``T^-1 z, ..., T^-n z`` shrinks geometrically.
When the image of the domain fits in a single row of translates the ratio
stays below ``2/beta``; in general it stays below ``(m+1)/beta``.
"""

import numpy as np
import matplotlib.pyplot as plt

from _common import OUT
from rotbeta import LatticeDomain, RotBetaMap, check_slab_condition, hole_radii, preimage_tree, rotation

slab = RotBetaMap(2.5, rotation(np.pi / 2), LatticeDomain.from_vectors([[1, 0], [0, 3]]))
print("image in one row of translates:", check_slab_condition(slab, [1, 0]))

z = [0.3141, 1.2718]
tree = preimage_tree(slab, z, 6)
reps = hole_radii(slab, z, 6, tree=tree)
for h in reps:
    ratio = "" if h.ratio is None else f"  ratio {h.ratio:.3f}"
    print(f"level {h.level}: {h.count:6d} points, r = {h.radius:.5f}{ratio}")
print("2/beta =", 2 / slab.beta)

fig, ax = plt.subplots(figsize=(3, 6))
pts = np.vstack(tree[0][1:5])
ax.plot(pts[:, 0], pts[:, 1], ".", ms=1)
h = reps[4]
ax.add_patch(plt.Circle(h.center, h.radius, fill=False, color="r"))
ax.set_aspect("equal")
ax.set_xlim(0, 1)
ax.set_ylim(0, 3)
fig.savefig(OUT / "holes.png", dpi=120)

# %%
# Same experiment on the unit square with an eighth turn
sq = RotBetaMap(3.5, rotation(np.pi / 4), LatticeDomain.unit_cube(2))
reps = hole_radii(sq, [0.3141, 0.2718], 5)
print("square map ratios:", [round(h.ratio, 3) for h in reps[1:]], "3/beta =", 3 / 3.5)
