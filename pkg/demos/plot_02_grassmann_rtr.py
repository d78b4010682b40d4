"""
Trace maximization on the Grassmannian
======================================

The trust-region solver finds the dominant k-dimensional invariant
subspace of a symmetric matrix. An eigensolver gives the same answer,
which makes it a convenient check.
"""

import numpy as np

from mhscg.manifold import (
    QuadraticTraceObjective,
    dominant_subspace,
    principal_angles,
    random_point,
    rtr_maximize,
)

rng = np.random.default_rng(0)
n, k = 60, 4
Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
M = (Q * np.linspace(3.0, 0.0, n)) @ Q.T

# %%
# Start from a random orthonormal basis and climb.
res = rtr_maximize(QuadraticTraceObjective(M), random_point(n, k, rng))
print(f"converged={res.converged} after {res.iterations} outer iterations")
for t, (f, why) in enumerate(zip(res.values[1:], res.stop_reasons), start=1):
    print(f"  iter {t:2d}  f = {f:.12f}  inner stop: {why}")

# %%
# Principal angles to the eigensolver's subspace should be at round-off level.
angles = principal_angles(res.point, dominant_subspace(M, k))
print("max principal angle:", angles.max())
