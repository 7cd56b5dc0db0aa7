"""
Ulam densities of full-branch maps
==================================

For the doubling map and the x3 map of the torus Lebesgue measure is
invariant, and the Ulam matrix reproduces the uniform density exactly once
the sample points line up with the image grid.
"""

from pathlib import Path

import numpy as np

from rotbeta import LatticeDomain, RotBetaMap, build_ulam, stationary
from rotbeta.specs import load_map

T = load_map(Path(__file__).parent / "maps" / "doubling1d.json")
for N in (8, 64, 512):
    d = stationary(build_ulam(T, N))[0]
    print(f"doubling N={N:4d}: l1 to uniform {np.abs(d.values - 1 / N).sum():.2e}")

# %%
# x3 on the square: with s=3 each sample image lands in the same relative
# spot of its target cell, with s=4 a few samples straddle
T3 = RotBetaMap(3.0, np.eye(2), LatticeDomain.unit_cube(2))
for s in (3, 4):
    d = stationary(build_ulam(T3, 27, s))[0]
    print(f"x3 N=27 s={s}: l1 to uniform {np.abs(d.values - 1 / 27**2).sum():.2e}")
