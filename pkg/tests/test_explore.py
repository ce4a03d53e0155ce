import math

import numpy as np
import pytest

from iiclab.explore import (CriticalPoint, ExplorationAudit, StopRule,
                            cluster_size_samples, explore_cluster, one_arm_extrinsic,
                            one_arm_intrinsic, susceptibility, triangle_diagram,
                            two_point)
from iiclab.kernels import KernelSpec
from iiclab.oracle import TinyConfigSpace, exact_event_probability
from iiclab.util import rng_for


def nn1(q):
    # per-edge probability q on Z^1 edges
    return KernelSpec("nn", d=1, p=2 * q)


def test_p_zero_singleton():
    c = explore_cluster(KernelSpec("nn", d=2, p=0.0), rng=rng_for(0))
    assert c.n_vertices == 1
    assert c.graph.n_edges == 0
    assert c.graph.edge_volume() == 0


def test_deterministic_line_with_cap():
    c = explore_cluster(KernelSpec("nn", d=1, p=2.0), StopRule(max_vertices=5),
                        rng=rng_for(0))
    assert c.n_vertices == 5
    assert c.truncated
    assert c.graph.n_edges == 4


def test_stop_rule_needs_a_bound():
    with pytest.raises(ValueError):
        StopRule(max_vertices=None)


def test_two_point_at_origin_and_p0():
    spec = nn1(0.3)
    assert two_point(spec, (0,), 10)[0] == 1.0
    assert two_point(KernelSpec("nn", d=1, p=0.0), (2,), 200)[0] == 0.0


def test_two_point_1d_exact():
    q = 1 / 3
    est, se, trunc = two_point(nn1(q), (2,), 3000, seed=2)
    assert abs(est - q * q) <= 3 * se
    assert trunc == 0.0


def test_two_point_beyond_bound_rejected():
    with pytest.raises(ValueError):
        two_point(nn1(0.3), (9,), 10, stop=StopRule(max_radius_extrinsic=5))


def test_susceptibility_1d_geometric():
    # chi = 1 + 2q/(1-q); q = 1/3 -> 2.0
    chi, se, cap_rate, flagged = susceptibility(nn1(1 / 3), 3000, cap=4000, seed=4)
    assert abs(chi - 2.0) <= 3 * se
    assert not flagged
    assert susceptibility(KernelSpec("nn", d=2, p=0.0), 50)[0] == 1.0


def test_susceptibility_monotone_in_p():
    lo, se1, _, _ = susceptibility(nn1(0.25), 2000, seed=5)
    hi, se2, _, _ = susceptibility(nn1(0.40), 2000, seed=6)
    assert lo <= hi + 3 * (se1 + se2)


def test_triangle_p0_is_one():
    est, se, _ = triangle_diagram(KernelSpec("nn", d=2, p=0.0), 50)
    assert est == 1.0


def test_triangle_1d_exact_and_monotone():
    q = 0.25
    xs = np.arange(-50, 51)
    tau = q ** np.abs(xs)
    exact = sum(tau[i] * tau[j] * q ** abs(xs[j] - xs[i])
                for i in range(len(xs)) for j in range(len(xs)))
    est, se, _ = triangle_diagram(nn1(q), 2500, seed=7)
    assert abs(est - exact) <= 3 * se
    lo, se1, _ = triangle_diagram(nn1(0.15), 1500, seed=8)
    hi, se2, _ = triangle_diagram(nn1(0.3), 1500, seed=9)
    assert lo <= hi + 3 * (se1 + se2)


def test_one_arm_trivial_and_monotone():
    assert one_arm_extrinsic(KernelSpec("nn", d=2, p=0.0), 1, 100)[0] == 0.0
    assert one_arm_intrinsic(KernelSpec("nn", d=2, p=0.0), 1, 100)[0] == 0.0
    spec = KernelSpec("nn", d=2, p=1.6)
    p4, se4 = one_arm_extrinsic(spec, 4, 1200, seed=3)
    p8, se8 = one_arm_extrinsic(spec, 8, 1200, seed=4)
    assert p8 <= p4 + 3 * (se4 + se8)
    q4, t4 = one_arm_intrinsic(spec, 4, 1200, seed=5)
    q8, t8 = one_arm_intrinsic(spec, 8, 1200, seed=6)
    assert q8 <= q4 + 3 * (t4 + t8)


def test_cluster_size_tail_basics():
    sizes, vols = cluster_size_samples(nn1(0.3), 500, cap=64, seed=11)
    assert (sizes >= 1).all()
    # tail nonincreasing by construction of indicators
    t4 = (sizes >= 4).mean()
    t16 = (sizes >= 16).mean()
    assert t16 <= t4


def test_exploration_matches_enumeration_tiny():
    # restricted to Q_1, the open graph at the origin of Z^2 is the 4-edge
    # star, so the cluster-size distribution is 1 + Binomial(4, q); compare
    # the explorer against the enumeration oracle outcome by outcome
    q = 0.45
    star = [((0, 0), (1, 0)), ((0, 0), (-1, 0)), ((0, 0), (0, 1)), ((0, 0), (0, -1))]
    space = TinyConfigSpace(edges=star, probs=[q] * 4)
    exact = {k: exact_event_probability(space, lambda bits, k=k: bits.sum(axis=1) == k - 1)
             for k in range(1, 6)}
    spec = KernelSpec("nn", d=2, p=4 * q)
    trials = 4000
    counts = {k: 0 for k in range(1, 6)}
    for t in range(trials):
        c = explore_cluster(spec, StopRule(region=1.0, max_vertices=None),
                            rng=rng_for(20, t))
        counts[c.n_vertices] += 1
    for k in range(1, 6):
        se = math.sqrt(exact[k] * (1 - exact[k]) / trials)
        assert abs(counts[k] / trials - exact[k]) <= 3.5 * se + 1e-12


def test_audit_no_double_decisions():
    audit = ExplorationAudit()
    explore_cluster(KernelSpec("nn", d=2, p=1.8), StopRule(max_vertices=400),
                    rng=rng_for(9), audit=audit)
    assert audit.conflicts == 0
    assert audit.decisions > 0


def test_hashed_strategy_monotone_coupling():
    shared = 37
    sizes = []
    sets = []
    for p in (1.2, 1.6, 2.0):
        c = explore_cluster(KernelSpec("nn", d=2, p=p), StopRule(max_vertices=2000),
                            seed=shared, strategy="hashed")
        sets.append(set(c.coord_index))
        sizes.append(c.n_vertices)
    assert sets[0] <= sets[1] <= sets[2]
    assert sizes[0] <= sizes[1] <= sizes[2]


def test_hashed_restriction_semantics():
    # exploring "on Q_r" equals exploring fully then deleting outside edges
    spec = KernelSpec("nn", d=2, p=1.7)
    for seed in range(12):
        r = 4.0
        on = explore_cluster(spec, StopRule(region=r, max_vertices=None),
                             seed=seed, strategy="hashed")
        full = explore_cluster(spec, StopRule(max_vertices=5000),
                               seed=seed, strategy="hashed")
        # delete edges not inside Q_r, take origin's component
        keep = []
        g = full.graph
        for u, v in g.edge_array().tolist():
            cu, cv = g.coords[u], g.coords[v]
            if (cu @ cu) <= r * r and (cv @ cv) <= r * r:
                keep.append((u, v))
        sub = g.subgraph_from_edges(keep)
        comp = set(map(tuple, g.coords[sub.component_of(0)].tolist()))
        assert comp == set(on.coord_index)


def test_blocked_edges_off_variant():
    spec = KernelSpec("nn", d=1, p=2.0)     # deterministic line
    blocked = [((0,), (1,))]
    c = explore_cluster(spec, StopRule(max_vertices=10), rng=rng_for(0),
                        blocked_edges=blocked)
    assert (1,) not in c.coord_index       # can only grow to the left
    assert (-1,) in c.coord_index


def test_critical_point_validation():
    spec = KernelSpec("nn", d=2, p=1.0)
    with pytest.raises(ValueError):
        CriticalPoint(p_hat=5.0, ci_halfwidth=0.1, method="m", kernel=spec)
    with pytest.raises(ValueError):
        CriticalPoint(p_hat=2.0, ci_halfwidth=0.0, method="m", kernel=spec)
    pc = CriticalPoint(p_hat=2.0, ci_halfwidth=0.05, method="m", kernel=spec)
    assert pc.at_p(0.5).p == pytest.approx(1.0)
