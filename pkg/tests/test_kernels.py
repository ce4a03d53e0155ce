import itertools
import math

import numpy as np
import pytest

from iiclab.kernels import (KernelSpec, edge_probability, finite_range_offsets,
                            kernel_value, mass_accounting, norm_shell_counts,
                            sample_incident_open_edges, tail_mass)
from iiclab.util import rng_for


def test_nn_kernel_value():
    spec = KernelSpec("nn", d=2, p=1.0)
    assert kernel_value(spec, (1, 0)) == 0.25
    assert kernel_value(spec, (0, -1)) == 0.25
    assert kernel_value(spec, (1, 1)) == 0.0
    assert kernel_value(spec, (0, 0)) == 0.0


def test_frso_kernel_value():
    spec = KernelSpec("frso", d=1, L=1, p=1.0)
    assert kernel_value(spec, (1,)) == 0.5
    assert kernel_value(spec, (2,)) == 0.0
    spec2 = KernelSpec("frso", d=2, L=2, p=1.0)
    assert kernel_value(spec2, (2, 2)) == pytest.approx(1 / 24)
    assert kernel_value(spec2, (3, 0)) == 0.0


def test_lrso_power_law_ratio():
    spec = KernelSpec("lrso", d=1, L=1, alpha=1.5, p=0.5)
    # the normalizer cancels in ratios; D(3)/D(1) = 3^-(d+alpha)
    ratio = kernel_value(spec, (3,)) / kernel_value(spec, (1,))
    assert ratio == pytest.approx(3.0 ** -2.5, rel=1e-12)
    # plateau below L
    spec_l4 = KernelSpec("lrso", d=1, L=4, alpha=2.5, p=0.5)
    assert kernel_value(spec_l4, (2,)) == pytest.approx(kernel_value(spec_l4, (4,)))


def test_alpha_two_rejected():
    with pytest.raises(ValueError):
        KernelSpec("lrso", d=1, L=1, alpha=2.0, p=0.5)
    with pytest.raises(ValueError):
        KernelSpec("lrso", d=1, L=1, alpha=-1.0, p=0.5)


def test_p_out_of_range_rejected():
    with pytest.raises(ValueError):
        KernelSpec("nn", d=2, p=4.5)     # p_max = 2d = 4
    KernelSpec("nn", d=2, p=4.0)


@pytest.mark.parametrize("d", [1, 2, 3, 7])
def test_mass_within_tolerance_all_families(d):
    specs = [KernelSpec("nn", d=d, p=1.0), KernelSpec("frso", d=d, L=1, p=1.0)]
    if d <= 3:
        specs.append(KernelSpec("lrso", d=d, L=1, alpha=2.5, p=1.0))
    for spec in specs:
        window, remainder, width = mass_accounting(spec)
        assert abs(window + remainder - 1.0) <= 1e-6
        assert width <= 1e-6 + 1e-12


def test_norm_shell_counts_exact():
    tables = norm_shell_counts(3, 25)
    # d=3: r3(1) = 6, r3(2) = 12, r3(3) = 8, r3(4) = 6, r3(9) = 30
    c3 = tables[2]
    assert c3[0] == 1 and c3[1] == 6 and c3[2] == 12 and c3[3] == 8
    assert c3[4] == 6 and c3[9] == 30
    # cross-check against direct enumeration in d=2
    c2 = tables[1]
    for m in range(26):
        direct = sum(1 for x in range(-5, 6) for y in range(-5, 6)
                     if x * x + y * y == m)
        assert c2[m] == direct


def test_kernel_lattice_symmetry():
    for spec in (KernelSpec("nn", d=3, p=1.0),
                 KernelSpec("frso", d=3, L=2, p=1.0),
                 KernelSpec("lrso", d=3, L=1, alpha=2.5, p=1.0)):
        x = (1, 2, 0)
        base = kernel_value(spec, x)
        for perm in itertools.permutations(range(3)):
            for signs in itertools.product((1, -1), repeat=3):
                y = tuple(signs[i] * x[perm[i]] for i in range(3))
                assert kernel_value(spec, y) == pytest.approx(base, rel=1e-12)


def test_tail_mass_finite_range():
    assert tail_mass(KernelSpec("nn", d=3, p=1.0), 1) == 0.0
    spec = KernelSpec("frso", d=2, L=3, p=1.0)
    assert tail_mass(spec, spec.L * math.sqrt(spec.d) / 2) == 0.0
    assert tail_mass(spec, 1.0) > 0.0


def test_tail_mass_monotone_and_bounded():
    spec = KernelSpec("lrso", d=2, L=1, alpha=1.5, p=1.0)
    rs = [0.5, 1, 2, 4, 8, 16, 32]
    vals = [tail_mass(spec, r) for r in rs]
    assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))
    assert vals[0] <= 1.0


@pytest.mark.parametrize("alpha", [1.5, 2.5])
def test_tail_mass_power_law_slope(alpha):
    # lattice discreteness still bends the tail at r ~ 4; fit past it
    spec = KernelSpec("lrso", d=1, L=1, alpha=alpha, p=1.0)
    rs = np.array([8, 16, 32, 64, 128], dtype=float)
    tm = np.array([tail_mass(spec, r) for r in rs])
    slope = np.polyfit(np.log(rs), np.log(tm), 1)[0]
    assert abs(slope + alpha) <= 0.05


def test_sampling_p_zero_empty():
    spec = KernelSpec("nn", d=2, p=0.0)
    assert sample_incident_open_edges(spec, (0, 0), rng_for(0)).size == 0
    lr = KernelSpec("lrso", d=1, L=1, alpha=2.5, p=0.0)
    assert sample_incident_open_edges(lr, (0,), rng_for(0)).size == 0


def test_sampling_all_open_limit():
    spec = KernelSpec("nn", d=2, p=4.0)      # p * D = 1 on unit edges
    out = sample_incident_open_edges(spec, (3, -2), rng_for(1))
    got = sorted(map(tuple, out.tolist()))
    assert got == sorted([(4, -2), (2, -2), (3, -1), (3, -3)])


def test_sampling_mean_count_matches_mass():
    # E[# open] = p * (D-mass inside truncation); check within 3 SE
    spec = KernelSpec("lrso", d=2, L=1, alpha=2.5, p=0.7)
    rng = rng_for(7)
    n = 4000
    counts = np.array([len(sample_incident_open_edges(spec, (0, 0), rng))
                       for _ in range(n)])
    expect = spec.p * (1.0 - tail_mass(spec, spec.truncation_radius / 2.0))
    se = counts.std(ddof=1) / math.sqrt(n)
    assert abs(counts.mean() - expect) <= 3 * se + 1e-9


def test_sampling_per_site_frequency_lrso():
    # each candidate site opens with probability p*D(x) independently
    spec = KernelSpec("lrso", d=1, L=1, alpha=1.5, p=1.0)
    rng = rng_for(3)
    n = 20000
    hit1 = hit3 = 0
    for _ in range(n):
        out = {tuple(w) for w in sample_incident_open_edges(spec, (0,), rng).tolist()}
        hit1 += (1,) in out
        hit3 += (-3,) in out
    for hits, x in ((hit1, (1,)), (hit3, (-3,))):
        q = spec.p * kernel_value(spec, x)
        se = math.sqrt(q * (1 - q) / n)
        assert abs(hits / n - q) <= 3.5 * se


def test_sampling_reproducible():
    spec = KernelSpec("lrso", d=2, L=1, alpha=2.5, p=1.0)
    a = sample_incident_open_edges(spec, (0, 0), rng_for(11)).tolist()
    b = sample_incident_open_edges(spec, (0, 0), rng_for(11)).tolist()
    assert a == b


def test_edge_probability_translation_invariance():
    spec = KernelSpec("lrso", d=2, L=1, alpha=2.5, p=0.9)
    assert edge_probability(spec, (5, 5), (7, 6)) == pytest.approx(
        edge_probability(spec, (0, 0), (2, 1)), rel=1e-12)


def test_offsets_complete():
    spec = KernelSpec("frso", d=2, L=1, p=1.0)
    offs = finite_range_offsets(spec)
    assert len(offs) == 8
    with pytest.raises(ValueError):
        finite_range_offsets(KernelSpec("lrso", d=1, L=1, alpha=2.5, p=0.1))


def test_config_round_trip():
    spec = KernelSpec("lrso", d=2, L=3, alpha=1.5, p=0.4, truncation_radius=900)
    again = KernelSpec.from_config(spec.config_dict())
    assert again == spec
