"""Backbone decomposition of conditioned clusters and good-radii tables.

A cluster conditioned to reach outside Q_n carries a backbone toward the
outside (the stand-in for infinity): vertices with edge-disjoint routes to
the origin and to the target side, the ordered pivotal edges every crossing
path must use, and the sausages between them.  Good radii are those whose
volume and resistance sit inside the polynomial windows.
"""

import numpy as np

from iiclab.explore import CriticalPoint
from iiclab.harness import classify_good_radii, measure_for_jsets, report
from iiclab.iic import sample_conditioned_iic
from iiclab.kernels import KernelSpec
from iiclab.metrics import backbone, pivotal_stats
from iiclab.resistance import resistance_to_complement

spec = KernelSpec("nn", d=2, p=2.0)
pc = CriticalPoint(p_hat=2.0, ci_halfwidth=0.02, method="known", kernel=spec)
n = 12

print(f"== conditioned sample reaching outside Q_{n} ==")
s = sample_conditioned_iic(pc, n, seed=3)
g = s.site_graph
print(f"  {g.n_vertices} vertices, acceptance rate {s.acceptance_rate:.3f}")

dec = backbone(g, s.target_ids().tolist())
print(f"  backbone: {len(dec.backbone_vertices)} vertices, "
      f"{len(dec.pivotals)} pivotal edges, {len(dec.sausages)} sausages")
st = pivotal_stats(g, dec, radii=[4, 8])
print(f"  N_bb(4) = {st.n_bb[0]}, N_bb(8) = {st.n_bb[1]}, "
      f"H(4) = {st.h[0]}, H(8) = {st.h[1]}")

for r in (4, 8):
    npiv = len([1 for b, t in dec.pivotals])
    u = resistance_to_complement(g, 0, np.flatnonzero(
        np.sqrt((g.coords ** 2).sum(1)) <= r).tolist())
    print(f"  r={r}: R_eff(0, Q_r^c) = {u.r_eff:.3f}")

print("\n== good-radii classification ==")
verdicts = []
for seed in range(12):
    s = sample_conditioned_iic(pc, n, seed=100 + seed)
    for r in (3, 5):
        m = measure_for_jsets(s, r, include_modified=False)
        verdicts.extend(classify_good_radii(m, r, lambdas=(2, 10, 50)))
tables = report([], verdicts=verdicts)
print(tables["jsets.csv"])
