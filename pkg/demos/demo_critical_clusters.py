"""Cluster exploration and critical diagnostics, checked against the exactly
solvable one-dimensional model (per-edge probability q, so tau(x) = q^|x|,
chi = 1 + 2q/(1-q)).
"""

import numpy as np

from iiclab.explore import (estimate_pc, one_arm_extrinsic, susceptibility,
                            triangle_diagram, two_point)
from iiclab.kernels import KernelSpec

q = 1 / 3
spec = KernelSpec("nn", d=1, p=2 * q)

print("== two-point function on Z^1 ==")
for x in (1, 2, 3):
    est, se, _ = two_point(spec, (x,), 4000, seed=1)
    print(f"  tau(({x},)) = {est:.4f} +- {se:.4f}   exact {q ** x:.4f}")

print("\n== susceptibility ==")
chi, se, cap_rate, flagged = susceptibility(spec, 4000, seed=2)
print(f"  chi = {chi:.3f} +- {se:.3f}   exact {1 + 2 * q / (1 - q):.3f} "
      f"(cap rate {cap_rate:.3f})")

print("\n== triangle diagram ==")
tri, se, _ = triangle_diagram(spec, 2000, seed=3)
xs = np.arange(-60, 61)
tau = q ** np.abs(xs)
exact = sum(tau[i] * tau[j] * q ** abs(xs[j] - xs[i])
            for i in range(len(xs)) for j in range(len(xs)))
print(f"  triangle = {tri:.3f} +- {se:.3f}   exact {exact:.3f}")

print("\n== one-arm probabilities decrease with the radius ==")
spec2 = KernelSpec("nn", d=2, p=1.9)
for r in (4, 8, 16):
    p_arm, se = one_arm_extrinsic(spec2, r, 1500, seed=4)
    print(f"  P(0 <-> outside Q_{r}) = {p_arm:.3f} +- {se:.3f}")

print("\n== calibrating the critical point in d=2 (exact value: q = 1/2) ==")
pc = estimate_pc(KernelSpec("nn", d=2, p=1.0), target_scale=24,
                 tolerance=0.06, seed=5, trials_per_probe=300)
print(f"  per-edge q_hat = {pc.p_hat / 4:.4f}  ({pc.method})")
