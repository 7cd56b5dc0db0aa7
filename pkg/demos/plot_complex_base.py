"""
Complex bases
=============

Multiplication by ``zeta = beta e^{i theta}`` modulo the lattice spanned by
``1`` and ``-conj(zeta)``.  The predicted regime is ``beta > max(2, C(theta))``.
"""

import numpy as np

from rotbeta.bounds import c_theta
from rotbeta.cases import case_complex_base

for beta, theta in ((2.1, 3 * np.pi / 4), (2.05, np.arcsin(2 / np.sqrt(15))), (1.5, np.pi / 2),
                    (2.5, 0.4)):
    rep = case_complex_base(beta, theta, N=48)
    print(f"beta={beta:.2f} theta={theta:.3f} C={rep['C']:.3f}: {rep['prediction']}; "
          f"{rep['components']} class(es), equivalent={rep['lebesgueEquivalent']}")

# %%
# C blows up like 1/sin(theta) for thin lattices
for t in (0.05, 0.2, 0.5, np.pi / 2):
    print(f"C({t:.2f}) = {c_theta(t):.3f}")
