"""Z^d geometry and the three edge-probability kernels.

A percolation model is a translation-invariant kernel D(x, y) = D(0, y - x)
together with an edge parameter p: the edge {x, y} is open independently
with probability p * D(x, y).  Three families are supported:

* nearest-neighbor ("nn"):    D(0, x) = 1/(2d) for |x| = 1;
* finite-range spread-out ("frso"): uniform over 0 < sup-norm <= L;
* long-range spread-out ("lrso"):   D(0, x) = N_L / max(|x|/L, 1)^(d+alpha).

The long-range normalizer N_L is fixed so the total mass is 1: lattice sites
are grouped by squared Euclidean norm (counts come from an exact iterated
convolution of the one-dimensional square-count sequence), summed out to a
truncation radius, and the un-enumerated tail is bracketed by radial
integrals.  The bracket midpoint closes the mass budget; the bracket width
is the (reported) truncation uncertainty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .util import euclid_norm, sup_norm

__all__ = [
    "KernelSpec",
    "kernel_value",
    "edge_probability",
    "tail_mass",
    "sample_incident_open_edges",
    "finite_range_offsets",
    "mass_accounting",
]

_FAMILIES = ("nn", "frso", "lrso")


@dataclass(frozen=True)
class KernelSpec:
    """Immutable percolation model description.

    Parameters
    ----------
    family : "nn", "frso" or "lrso".
    d : lattice dimension, >= 1.
    p : edge parameter in [0, 1/max_x D(0,x)].
    L : spread-out range (ignored for "nn").
    alpha : long-range decay exponent, required for "lrso"; alpha = 2 is
        rejected (the boundary case changes the scaling laws).
    truncation_radius : Euclidean cutoff for long-range enumeration and
        sampling.  Default: smallest radius for which the tail bracket
        contributes less than 1e-6 uncertainty to the total D-mass.
    """

    family: str
    d: int
    p: float
    L: int = 1
    alpha: float | None = None
    truncation_radius: int | None = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if self.family != "nn" and self.L < 1:
            raise ValueError("spread-out range L must be >= 1")
        if self.family == "lrso":
            if self.alpha is None or self.alpha <= 0:
                raise ValueError("lrso needs alpha > 0")
            if self.alpha == 2:
                raise ValueError("alpha = 2 is excluded")
            if self.truncation_radius is None:
                object.__setattr__(self, "truncation_radius",
                                   _default_truncation(self.d, self.alpha, self.L))
            if self.truncation_radius <= self.L + math.sqrt(self.d):
                raise ValueError("truncation_radius too small for the tail bracket")
        if self.p < 0 or self.p > self.p_max() + 1e-12:
            raise ValueError(f"p={self.p} outside [0, {self.p_max()}]")

    # -- derived scalars ----------------------------------------------------

    def d_sup(self):
        """max_x D(0, x)."""
        if self.family == "nn":
            return 1.0 / (2 * self.d)
        if self.family == "frso":
            return 1.0 / ((2 * self.L + 1) ** self.d - 1)
        return _lrso_tables(self)[0]

    def p_max(self):
        return 1.0 / self.d_sup()

    def config_dict(self):
        return {"family": self.family, "d": self.d, "L": self.L,
                "alpha": self.alpha, "p": self.p,
                "truncation_radius": self.truncation_radius}

    @classmethod
    def from_config(cls, cfg):
        alpha = cfg.get("alpha")
        tr = cfg.get("truncation_radius")
        return cls(family=cfg["family"], d=int(cfg["d"]), p=float(cfg["p"]),
                   L=int(cfg.get("L", 1)),
                   alpha=None if alpha in (None, "", "None") else float(alpha),
                   truncation_radius=None if tr in (None, "", "None") else int(tr))


# -- exact square-norm shell counts -----------------------------------------


@lru_cache(maxsize=32)
def norm_shell_counts(d, m_max):
    """counts[j-1][m] = #{x in Z^j : |x|^2 = m} for j = 1..d, m = 0..m_max.

    Exact int64 arithmetic via repeated convolution with the square counts
    of Z^1 (1 at m=0, 2 at each positive perfect square).
    """
    base = np.zeros(m_max + 1, dtype=np.int64)
    base[0] = 1
    ks = np.arange(1, int(math.isqrt(m_max)) + 1)
    base[ks * ks] = 2
    tables = [base]
    for _ in range(d - 1):
        prev = tables[-1]
        nxt = prev.copy()
        for k in ks:
            nxt[k * k:] += 2 * prev[:m_max + 1 - k * k]
        tables.append(nxt)
    return tables


def _sphere_area(d):
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def _tail_bracket(d, alpha, L, R):
    """[lower, upper] bounds on sum_{|x| > R} max(|x|/L,1)^-(d+alpha).

    Unit-cube comparison against radial integrals; requires R > L + sqrt(d)
    so the integrand is in its power-law regime on the whole tail.
    """
    s = math.sqrt(d)
    if R <= L + s:
        raise ValueError("truncation radius too small for the tail bracket")
    upper = _sphere_area(d) * _radial_integral(d, alpha, L, R - s, +s / 2.0)
    lower = _sphere_area(d) * _radial_integral(d, alpha, L, R + s, -s / 2.0)
    return lower, upper


def _radial_integral(d, alpha, L, A, c):
    """integral_A^inf (t/L)^-(d+alpha) (t+c)^(d-1) dt, closed form."""
    total = 0.0
    for k in range(d):
        expo = d + alpha - k - 1
        total += math.comb(d - 1, k) * c ** (d - 1 - k) * A ** (-expo) / expo
    return L ** (d + alpha) * total


def _default_truncation(d, alpha, L):
    # Coarse normalizer estimate first, then pick R so that the bracket
    # width times N_L stays below 1e-6 total-mass uncertainty.
    R = max(8 * L, int(L + math.sqrt(d)) + 2)
    z_coarse = _window_sum(d, alpha, L, R) + sum(_tail_bracket(d, alpha, L, R)) / 2
    target = 1e-6 * z_coarse
    while True:
        lo, hi = _tail_bracket(d, alpha, L, R)
        if hi - lo < target:
            return R
        R = int(R * 1.3) + 1


def _window_sum(d, alpha, L, R):
    counts = norm_shell_counts(d, R * R)[d - 1]
    m = np.arange(1, R * R + 1)
    f = np.maximum(np.sqrt(m) / L, 1.0) ** (-(d + alpha))
    return float(f @ counts[1:])


@lru_cache(maxsize=32)
def _lrso_tables_cached(d, alpha, L, R):
    counts = norm_shell_counts(d, R * R)[d - 1]
    m = np.arange(R * R + 1, dtype=np.float64)
    f = np.ones_like(m)
    f[1:] = np.maximum(np.sqrt(m[1:]) / L, 1.0) ** (-(d + alpha))
    window = float(f[1:] @ counts[1:])
    lo, hi = _tail_bracket(d, alpha, L, R)
    remainder = (lo + hi) / 2.0
    n_l = 1.0 / (window + remainder)
    return n_l, counts, f, window, remainder, (hi - lo)


def _lrso_tables(spec):
    """(N_L, shell counts, raw kernel values per norm^2, window mass,
    tail remainder estimate, bracket width) for an lrso spec."""
    return _lrso_tables_cached(spec.d, spec.alpha, spec.L, spec.truncation_radius)


# -- kernel evaluation -------------------------------------------------------


def kernel_value(spec: KernelSpec, x):
    """D(0, x).  Returns 0 at the origin (no self-loops)."""
    x = tuple(int(c) for c in x)
    if len(x) != spec.d:
        raise ValueError("coordinate dimension mismatch")
    if all(c == 0 for c in x):
        return 0.0
    if spec.family == "nn":
        return 1.0 / (2 * spec.d) if sum(c * c for c in x) == 1 else 0.0
    if spec.family == "frso":
        return spec.d_sup() if sup_norm(x) <= spec.L else 0.0
    n_l = _lrso_tables(spec)[0]
    return n_l / max(euclid_norm(x) / spec.L, 1.0) ** (spec.d + spec.alpha)


def edge_probability(spec: KernelSpec, x, y):
    """p * D(x, y) for the undirected edge {x, y}."""
    delta = tuple(int(b) - int(a) for a, b in zip(x, y))
    return spec.p * kernel_value(spec, delta)


def mass_accounting(spec: KernelSpec):
    """(window mass of D, tail remainder estimate, bracket width).

    window + remainder = 1 at the spec's own normalizer; the width is the
    rigorous uncertainty of that accounting.  Finite-range kernels sum to 1
    exactly inside the window.
    """
    if spec.family in ("nn", "frso"):
        return 1.0, 0.0, 0.0
    n_l, _, _, window, remainder, width = _lrso_tables(spec)
    return n_l * window, n_l * remainder, n_l * width


def tail_mass(spec: KernelSpec, r):
    """sum_{|x| > 2r} D(0, x).

    Exact within the truncation window; beyond it the bracketed remainder
    midpoint is used.  Finite-range kernels return exactly 0 once 2r reaches
    the maximal edge length.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    cut = 2.0 * r
    if spec.family == "nn":
        return 0.0 if cut >= 1.0 else 1.0
    if spec.family == "frso":
        if cut >= spec.L * math.sqrt(spec.d):
            return 0.0
        offs = finite_range_offsets(spec)
        norms2 = (offs.astype(float) ** 2).sum(axis=1)
        return float((norms2 > cut * cut).sum()) * spec.d_sup()
    n_l, counts, f, _, remainder, _ = _lrso_tables(spec)
    if cut >= spec.truncation_radius:
        lo, hi = _tail_bracket(spec.d, spec.alpha, spec.L, cut)
        return n_l * (lo + hi) / 2.0
    m_cut = int(math.floor(cut * cut))
    inside = float(f[m_cut + 1:] @ counts[m_cut + 1:])
    return n_l * (inside + remainder)


# -- neighbor enumeration and sampling ---------------------------------------


@lru_cache(maxsize=32)
def _offsets_cached(family, d, L):
    if family == "nn":
        out = []
        for i in range(d):
            for s in (1, -1):
                v = [0] * d
                v[i] = s
                out.append(tuple(v))
        return np.array(out, dtype=np.int64)
    rng = range(-L, L + 1)
    grids = np.meshgrid(*([list(rng)] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)
    pts = pts[np.any(pts != 0, axis=1)]
    return pts


def finite_range_offsets(spec: KernelSpec):
    """All offsets x with D(0, x) > 0; finite-range families only."""
    if spec.family == "lrso":
        raise ValueError("lrso neighborhoods are not enumerable")
    return _offsets_cached(spec.family, spec.d, spec.L)


def sample_incident_open_edges(spec: KernelSpec, v, rng):
    """Open-neighbor coordinates of vertex v under the product measure.

    Each candidate edge {v, v+x} is open independently with probability
    p * D(0, x).  Long-range neighborhoods are sampled exactly out to the
    truncation radius without enumerating sites: the Bernoulli product over
    a norm shell is realized by a thinned Poisson race over the per-shell
    hazards, and sampled shell members are placed uniformly by the exact
    coordinate-count recursion.
    """
    v = np.asarray(v, dtype=np.int64)
    if spec.p == 0.0:
        return np.empty((0, spec.d), dtype=np.int64)
    if spec.family in ("nn", "frso"):
        offs = finite_range_offsets(spec)
        q = spec.p * spec.d_sup()
        if len(offs) <= 64:
            keep = rng.random(len(offs)) < q
            return v[None, :] + offs[keep]
        # large neighborhoods: binomial count + uniform distinct subset is
        # the same product law at O(count) instead of O(neighborhood)
        k = int(rng.binomial(len(offs), q))
        picked = set()
        while len(picked) < k:
            picked.add(int(rng.integers(len(offs))))
        return v[None, :] + offs[sorted(picked)]
    offs = _sample_lrso_offsets(spec, rng)
    return v[None, :] + offs


def _sample_lrso_offsets(spec, rng):
    n_l, counts, f, _, _, _ = _lrso_tables(spec)
    q = np.minimum(spec.p * n_l * f, 1.0)          # per-site open probability by |x|^2
    lam, cum = _hazard_tables(spec)
    n_pts = rng.poisson(lam)
    picked = {}
    if n_pts:
        u = rng.random(n_pts) * lam
        bins = np.searchsorted(cum, u, side="right")  # index into norm^2 values
        for b in bins:
            m = int(b)
            c_m = int(counts[m])
            labels = picked.setdefault(m, set())
            if len(labels) < c_m:
                labels.add(int(rng.integers(c_m)))
    out = []
    if picked:
        tables = norm_shell_counts(spec.d, spec.truncation_radius ** 2)
        for m, labels in picked.items():
            sites = _distinct_sites_with_norm(spec.d, m, len(labels), rng, tables)
            out.extend(sites)
    # certain edges (q == 1) are not reachable by the hazard race; add them
    sure = np.flatnonzero(q >= 1.0)
    for m in sure:
        if counts[m] and m > 0:
            out.extend(_all_sites_with_norm(spec.d, int(m)))
    if not out:
        return np.empty((0, spec.d), dtype=np.int64)
    return np.array(out, dtype=np.int64)


@lru_cache(maxsize=32)
def _hazard_tables_cached(d, alpha, L, R, p):
    n_l, counts, f, _, _, _ = _lrso_tables_cached(d, alpha, L, R)
    q = np.minimum(p * n_l * f, 1.0)
    with np.errstate(divide="ignore"):
        haz = np.where(q < 1.0, -np.log1p(-q), 0.0) * counts
    haz[0] = 0.0
    cum = np.cumsum(haz)
    return float(cum[-1]), cum


def _hazard_tables(spec):
    return _hazard_tables_cached(spec.d, spec.alpha, spec.L,
                                 spec.truncation_radius, spec.p)


def _sample_site_with_norm(d, m, rng, tables):
    """One uniform lattice point with |x|^2 = m (exact, via count recursion)."""
    coord = []
    rem = m
    for j in range(d, 1, -1):
        sub = tables[j - 2]
        ks = np.arange(int(math.isqrt(rem)) + 1)
        w = sub[rem - ks * ks].astype(np.float64)
        w[1:] *= 2.0
        cw = np.cumsum(w)
        k = int(np.searchsorted(cw, rng.random() * cw[-1], side="right"))
        sign = 1 if k == 0 else (1 if rng.random() < 0.5 else -1)
        coord.append(sign * k)
        rem -= k * k
    k = int(math.isqrt(rem))
    assert k * k == rem
    sign = 1 if k == 0 else (1 if rng.random() < 0.5 else -1)
    coord.append(sign * k)
    return tuple(coord)


def _distinct_sites_with_norm(d, m, n, rng, tables):
    """n distinct uniform lattice points with |x|^2 = m (rejection on repeats)."""
    sites = set()
    while len(sites) < n:
        sites.add(_sample_site_with_norm(d, m, rng, tables))
    return sorted(sites)


@lru_cache(maxsize=256)
def _all_sites_with_norm(d, m):
    out = []

    def rec(j, rem, prefix):
        if j == 1:
            k = math.isqrt(rem)
            if k * k == rem:
                if k == 0:
                    out.append(prefix + (0,))
                else:
                    out.append(prefix + (k,))
                    out.append(prefix + (-k,))
            return
        for k in range(int(math.isqrt(rem)) + 1):
            signs = (k,) if k == 0 else (k, -k)
            for s in signs:
                rec(j - 1, rem - k * k, prefix + (s,))

    rec(d, m, ())
    return [tuple(c) for c in out]
