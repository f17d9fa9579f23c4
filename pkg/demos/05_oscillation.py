"""
Oscillation through the phase of the special diagonal function
==============================================================

For a complex solution ``u`` there is a constant ``alpha`` with
``W[u, alpha^2 conj(u)] = 1``; then ``Z = alpha |u|`` and the phase
``int 1/(2|Z|^2)`` tells oscillatory from non-oscillatory.
"""

import cmath

import numpy as np

from bohl import continuum as C

quartic = C.ContinuumPotential.power(-1.0, -4)
grid = C.Grid.from_step(1.0, 50.0, 1e-3)
u = C.integrate_sle(quartic, grid, cmath.exp(1j), cmath.exp(1j) * (1 - 1j))  # x exp(i/x)

sa = C.special_alpha(u)
print("alpha =", sa.alpha, " arg/(pi/4) =", sa.k)

Z = C.special_diagonal(u)
res = C.oscillation_classify(Z)
print(res.kind, "total phase", res.total_phase, "(1 - 1/50 =", 1 - 1 / 50, ")")
print("tail increments:", np.round(res.increments, 5))

# |Z| solves the companion nonlinear equation
print("residual for w = |Z|:", C.rab_residual(np.abs(Z.Z), quartic, grid).residual)

# %%
for value in (1.0, -1.0):
    g = C.Grid.from_step(0.0, 20.0)
    r = C.oscillation_classify(C.diagonal_for_potential(C.ContinuumPotential.constant(value), g))
    print(f"V = {value:+}: {r.kind}")
