"""
Diagonal function, Bohl basis and Green function on a grid
==========================================================
"""

import numpy as np

from bohl import continuum as C

V = C.ContinuumPotential.affine(1.0, 0.0)  # V(x) = x
grid = C.Grid.from_step(1.0, 5.0, 1e-3)

u1, u2 = C.positive_pair(V, grid)
Z = C.diagonal_function(u1, u2)
print("max |J[Z]| =", Z.j_max)

B = C.bohl_basis(Z, x0=3.0)
print("SLE residuals of phi+/phi-:", B.residual_plus, B.residual_minus)
print("W[phi-, phi+] =", C.wronskian_grid(B.minus, B.plus, rtol=1e-6))

# %%
x = grid.x
print("G(x,x) = Z^2:", np.max(np.abs(C.green_function(Z, x, x) - Z.Z**2)))
print("derivative jump at 3:", C.green_derivative_jump(Z, 3.0))

# %%
# Constant V = 1: the kernel is the classical one-half exp(-|x - y|).
one = C.ContinuumPotential.constant(1.0)
g = C.Grid.from_step(0.0, 1.0)
Z1 = C.diagonal_for_potential(one, g)
print("G(0, 1) =", C.green_function(Z1, 0.0, 1.0), " exact", 0.5 * np.exp(-1.0))

# %%
# Darboux factorization on a padded test function.
f = C.bump(grid, 3.0, 1.8)
print("factorization residual:", C.darboux_factorization_residual(Z, f))
