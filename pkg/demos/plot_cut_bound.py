"""
Balls between lines in a disk
=============================

However ``k`` lines cut the unit disk, some cell holds a ball of radius
``1/(k+1)``.  Equally spaced parallel lines are the only tight case.
"""

import numpy as np
import matplotlib.pyplot as plt

from _common import OUT
from rotbeta.plank import LineConfig, max_inscribed_radius, random_line_config, verify_cut_bound

for k in (1, 2, 3):
    rep = verify_cut_bound(k, 500, seed=k)
    print(f"k={k}: min radius {rep.min_radius:.5f}, bound {rep.bound:.5f}, "
          f"parallel {rep.parallel_radius:.5f}, passed {rep.passed}")

# %%
# Moving the middle line of three parallel ones off its equal-spacing spot
# only makes room
for shift in (0.0, 0.05, 0.1, 0.2):
    cfg = LineConfig.from_angles([0, 0, 0], [-0.5, shift, 0.5])
    print(f"middle line at {shift:.2f}: radius {max_inscribed_radius(cfg).value:.5f}")

rng = np.random.default_rng(1)
cfg = random_line_config(rng, 3)
res = max_inscribed_radius(cfg)
fig, ax = plt.subplots(figsize=(4, 4))
ax.add_patch(plt.Circle((0, 0), 1, fill=False))
t = np.linspace(-2, 2, 2)
for n, c in zip(cfg.normals, cfg.offsets):
    p = c * n
    d = np.array([-n[1], n[0]])
    ax.plot(p[0] + t * d[0], p[1] + t * d[1], "k", lw=0.8)
ax.add_patch(plt.Circle(res.point, res.value, fill=False, color="r"))
ax.set_xlim(-1.1, 1.1)
ax.set_ylim(-1.1, 1.1)
ax.set_aspect("equal")
fig.savefig(OUT / "cut_bound.png", dpi=120)
