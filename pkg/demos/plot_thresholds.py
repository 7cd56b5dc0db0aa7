"""
Expansion thresholds against the lattice angle
==============================================

B1 guarantees a unique invariant density, B2 one equivalent to Lebesgue
measure.  Both stay below 3 for every angle, so any planar map with
``beta >= 3`` is covered whatever the shape of its fundamental domain.
"""

import numpy as np
import matplotlib.pyplot as plt

from _common import OUT
from rotbeta.bounds import b1_branch, bounds_table, default_grid

tab = bounds_table(default_grid(2000))
print("max B2 =", tab.B2.max())

# the kinks sit where B1 switches formula
switch = np.flatnonzero(np.diff(tab.branch_b1))
print("B1 branch switches at theta =", tab.theta[switch])

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(tab.theta, tab.B1, label="B1")
ax.plot(tab.theta, tab.B2, label="B2")
ax.plot(tab.theta, np.minimum(tab.C, 4), "--", lw=0.8, label="C (clipped)")
ax.axhline(3, color="k", lw=0.5)
ax.set_xlabel("theta")
ax.set_ylim(1, 4)
ax.legend()
fig.savefig(OUT / "thresholds.png", dpi=120)

# %%
# Reading the second B1 switch with sin(theta) instead of sin(theta/2)
# would move it to a point where the two formulas disagree.
t = np.arcsin(np.sqrt(5) - 2)
print("switch angles:", t, 2 * t)
print("branches just above arcsin(sqrt5 - 2):", b1_branch(t + 1e-3), b1_branch(t + 1e-3, literal=True))
