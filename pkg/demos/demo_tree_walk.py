"""Random walk on the tree-shaped IIC stand-in (critical tree conditioned to
survive: infinite spine plus size-biased bushes).

The walk is strongly subdiffusive: the return probability decays like
n^(-2/3) (spectral dimension 4/3), the range grows like n^(2/3), and exit
times from intrinsic balls scale like r^3.  Restricted to the spine the
walk is one-dimensional and the return exponent drops to -1/2.
"""

import numpy as np

from iiclab.harness import fit_exponent, RunRecord
from iiclab.iic import Offspring, sample_tree_iic, spine_edges
from iiclab.metrics import intrinsic_ball
from iiclab.resistance import expected_exit_time
from iiclab.walk import return_probability, displacement_profile, walk_on_subgraph

ns = [16, 32, 64, 128, 256, 512]
trees = 40
records = []
print(f"sampling {trees} trees and walking on them ...")
for t in range(trees):
    s = sample_tree_iic(Offspring.poisson(1.0), depth=600, seed=100 + t,
                        radius_cap=200)
    g = s.site_graph
    rp = return_probability(g, 0, ns, trials=400, seed=t, exact_limit=0)
    prof = displacement_profile(g, 0, ns, trials=200, seed=t, range_trials=64)
    for j, n in enumerate(ns):
        records.append(RunRecord("demo", t, n, "p2n", float(rp.p2n[j])))
        records.append(RunRecord("demo", t, n, "wrange", float(prof.range_mean[j])))
    # exact exit times via the Green identity, radii small enough to stay
    # well inside the generated window
    dep = s.graph.depths
    for r in (4, 8, 16, 32):
        v, _ = expected_exit_time(g, 0, np.flatnonzero(dep <= r),
                                  check_bound=False)
        records.append(RunRecord("demo", t, r, "etau_br", v))

for stat, target in (("p2n", -2 / 3), ("wrange", 2 / 3), ("etau_br", 3.0)):
    fit = fit_exponent(records, stat, target=target, tolerance=0.25)
    print(" ", fit.summary())

print("\nspine-restricted walk (one-dimensional backbone) ...")
s = sample_tree_iic(Offspring.poisson(1.0), depth=1024, seed=7, radius_cap=4)
spine = walk_on_subgraph(s.site_graph, spine_edges(s))
rp = return_probability(spine, 0, ns, trials=4000, seed=8, exact_limit=0)
recs = [RunRecord("demo", 0, n, "p2n_bb", float(p)) for n, p in zip(ns, rp.p2n)]
fit = fit_exponent(recs, "p2n_bb", target=-0.5, tolerance=0.2, weighted=False)
print(" ", fit.summary())
