"""
Building a view hypergraph
==========================

Each sample spawns one hyperedge: itself plus its sparse neighbours,
weighted by the closed-form simplex solution.
"""

import numpy as np

from mhscg.hypergraph import build_incidence, laplacian, pairwise_sq_dists, sparse_similarity

# %%
# Four points on a line. With two neighbours per row, point 0 links to
# points 1 and 2 with weights 6/11 and 5/11.
X = np.array([0.0, 1.0, 3.0, 7.0])
S = sparse_similarity(pairwise_sq_dists(X), sigma=2)
np.set_printoptions(precision=4, suppress=True)
print("similarity rows:\n", S.A)

# %%
# Column j of the incidence matrix is hyperedge j. Every hyperedge has
# degree 2: the centre contributes 1, the neighbour weights another 1.
hg = build_incidence(S)
print("incidence:\n", hg.incidence)
print("edge degrees:", hg.edge_degrees)

# %%
# Theta is the normalized affinity, Delta = I - Theta its Laplacian.
# The spectrum of Theta lies in [0, 1] and sqrt(dv) is a fixed vector.
L = laplacian(hg.incidence, hg.weights, hg.vertex_degrees, hg.edge_degrees)
print("eigenvalues of Theta:", np.linalg.eigvalsh(L.theta))
u = np.sqrt(hg.vertex_degrees)
print("Theta @ sqrt(dv) - sqrt(dv):", L.theta @ u - u)
