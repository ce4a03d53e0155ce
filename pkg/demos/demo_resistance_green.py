"""Electrical identities on sampled graphs: series/parallel laws, the Green
function identity R_eff(x, A) = G_A(x, x), the exit-time identity
E tau = sum G mu, and the bound E tau <= R_eff * V.
"""

import numpy as np

from iiclab.explore import StopRule, explore_cluster
from iiclab.graphs import SiteGraph
from iiclab.kernels import KernelSpec
from iiclab.oracle import exact_chain_solve
from iiclab.resistance import (check_reff_dominated, effective_resistance,
                               expected_exit_time, green_function)
from iiclab.walk import exit_time

print("== closed forms ==")
path = SiteGraph.from_edges(6, [(i, i + 1) for i in range(5)])
print("  5-edge path: R =", effective_resistance(path, [0], [5]).r_eff)
tri = SiteGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
print("  triangle:    R =", effective_resistance(tri, [0], [1]).r_eff, "(= 2/3)")

print("\n== identities on a percolation sample ==")
spec = KernelSpec("nn", d=2, p=1.9)
c = explore_cluster(spec, StopRule(max_vertices=300), rng=np.random.default_rng(4))
g = c.graph
far = int(np.argmax(g.euclid_norms()))
absorbing = [far]
r_eff = effective_resistance(g, [0], absorbing).r_eff
green = green_function(g, absorbing, 0, 0)
print(f"  sample: {g.n_vertices} vertices; R_eff(0, x_far) = {r_eff:.6f}")
print(f"  G_A(0,0) = {green:.6f}  (identity holds to {abs(green - r_eff):.1e})")

region = [v for v in range(g.n_vertices) if v != far]
value, solve = expected_exit_time(g, 0, region)
oracle = exact_chain_solve(g, absorbing).expected_absorption_time(0)
mc = exit_time(g, 0, region, trials=4000, seed=9)
print(f"  E tau: solve {value:.3f} | dense oracle {oracle:.3f} | "
      f"Monte Carlo {mc.mean:.3f} +- {mc.se:.3f}")
print(f"  bound R_eff * V = {solve.appendix_bound:.1f} >= {value:.1f}")
print(f"  resistance below graph distance: {check_reff_dominated(g, [0], absorbing)}")
