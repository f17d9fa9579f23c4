"""
Factoring -Delta + V into first-order difference operators
==========================================================
"""

import numpy as np

from bohl import lattice as L
from bohl import oracles

rng = np.random.default_rng(3)
V = L.LatticePotential(L.LatticeWindow(0, 24), rng.uniform(0.5, 4.0, 25))
z = L.diagonal_sequence(L.positive_green_matrix(V))

Q = L.darboux_discrete_q(z)
phi = L.bohl_reconstruct(z, 12).plus.values
print("(forward difference + Q) phi+ :", np.max(np.abs(phi[1:] - phi[:-1] + Q * phi[:-1]) / np.abs(phi[1:])))

# %%
# Build the operator column by column and compare with the tridiagonal matrix.
eye = np.eye(V.window.size)
factored = np.column_stack([L.darboux_discrete_apply(z, e) for e in eye])
direct = np.column_stack([oracles.apply_operator(V, e) for e in eye])
print("max entry difference:", np.max(np.abs(factored - direct)))
print("row 10 of the factored operator:", np.round(factored[9, 8:13], 6))
