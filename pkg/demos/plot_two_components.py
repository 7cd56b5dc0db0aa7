"""
Two invariant densities on the square
=====================================

For ``x -> beta x - floor(beta x + 1/2)`` on ``[-1/2, 1/2)`` with
``beta <= sqrt 2`` two intervals A and B are swapped.  On the square the
product map then keeps ``A x A + B x B`` and ``A x B + B x A`` apart.
"""

import numpy as np
import matplotlib.pyplot as plt

from _common import OUT
from rotbeta.cases import case_square, check_invariance, square_sizes, y_pieces

beta = 1.4
print("square sides:", square_sizes(beta))
Y1, Y2 = y_pieces(beta)
print("offending rectangles:", len(check_invariance(beta, Y1)), len(check_invariance(beta, Y2)))

# %%
# The Ulam grid only separates the two pieces when the left end of A,
# (1/2 - b)/beta, lies on a cell edge; N=120 does, N=96 does not
for N in (96, 120):
    rep = case_square(beta, N=N)
    print(f"N={N}: {rep['components']} recurrent class(es)")

rep = case_square(beta, N=120)
for c in rep["classes"]:
    print(f"class {c['label']}: mass in Y1 {c['massInY1']:.3f}, in Y2 {c['massInY2']:.3f}")

fig, ax = plt.subplots(figsize=(4, 4))
for rects, col in ((Y1, "C0"), (Y2, "C1")):
    for (x0, x1), (y0, y1) in rects:
        ax.add_patch(plt.Rectangle((x0, y0), x1 - x0, y1 - y0, color=col, alpha=0.6))
ax.set_xlim(-0.5, 0.5)
ax.set_ylim(-0.5, 0.5)
ax.set_aspect("equal")
fig.savefig(OUT / "two_components.png", dpi=120)

# %%
# From beta = 2 on there is a single class with a positive density
rep = case_square(2.0, N=64)
print("beta=2:", rep["components"], "class, equivalent:", rep["lebesgueEquivalent"])
