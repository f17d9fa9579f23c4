"""
Decay of the subdominant lattice solution
=========================================

Two-sided bounds on ``G_nn`` and ``S_n`` when ``V_n > C > 0``, and the two
lattice distances that control how fast the recessive solution decays.
"""

import numpy as np

from bohl import lattice as L

C = 1.0
print("K_A(C=1) =", L.agmon_constant(C), " simplified bound sqrt(1+4/C^2) =", np.sqrt(1 + 4 / C**2))

n = np.arange(0, 81)
V = L.LatticePotential(L.LatticeWindow(0, 80), 2.0 + 3.0 / (1.0 + n))
G = L.positive_green_matrix(V)
rep = L.agmon_bound_report(V, G, C)
print("all bounds hold:", rep.all_ok)
c = rep.checks[40]
print(f"n=40: {c.g_lower:.5f} <= G_nn={c.g:.5f} <= {c.g_upper:.5f}")
print(f"      {c.s_lower:.5f} <= S_n={c.s:.5f} <= {c.s_upper:.5f}")

# %%
# Sum of ln S_n is the exact decay exponent of phi-/z; distance (a) sits below it,
# distance (b) tracks it.
z = L.diagonal_sequence(G)
exact = np.concatenate(([0.0], np.cumsum(np.log(L.s_factor(z).values))))
for m in (20, 40, 80):
    print(
        f"0 -> {m}: exact {exact[m]:8.4f}   d_a {L.agmon_distance(V, 0, m, 'a', C):8.4f}"
        f"   d_b {L.agmon_distance(V, 0, m, 'b'):8.4f}"
    )
