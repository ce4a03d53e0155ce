"""Electrical-network computations on unit resistors.

Effective resistance is the reciprocal of the minimal Dirichlet energy with
potential 1 on the source set and 0 on the sink set; the Green's function of
an absorbed walk is the inverse grounded Laplacian; expected exit times come
from one linear solve through the Green identity

    E^z[exit steps from R] = sum_{y in R} G(z, y) mu_y,

which is also bounded above by R_eff(z, R^c) * V(R).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graphs import SiteGraph, bfs_distances

__all__ = [
    "ResistanceSolve",
    "effective_resistance",
    "green_function",
    "green_column",
    "expected_exit_time",
    "exit_time_profile",
    "check_reff_dominated",
    "resistance_to_complement",
    "resistance_diagonal_from_origin",
    "max_resistance_from_origin",
]

DENSE_LIMIT = 500


@dataclass
class ResistanceSolve:
    """Result of one boundary-value solve on the unit-resistor network."""

    r_eff: float
    source: np.ndarray
    sink: np.ndarray
    potential: Optional[np.ndarray] = None   # full-length array, NaN off-component
    residual: float = 0.0
    iterations: int = 0
    method: str = "dense"
    energy: float = 0.0
    appendix_bound: Optional[float] = None

    @property
    def infinite(self):
        return math.isinf(self.r_eff)


def _laplacian(g: SiteGraph, interior, index):
    """Grounded Laplacian over `interior` (full degrees on the diagonal,
    couplings only between interior vertices)."""
    interior = np.asarray(interior, dtype=np.int64)
    k = len(interior)
    mu = g.degrees
    inv = np.full(g.n_vertices, -1, dtype=np.int64)
    inv[interior] = np.arange(k)
    heads = np.repeat(np.arange(g.n_vertices), mu)
    hi = inv[heads]
    ti = inv[g.indices]
    keep = (hi >= 0) & (ti >= 0)
    rows = np.concatenate([np.arange(k), hi[keep]])
    cols = np.concatenate([np.arange(k), ti[keep]])
    vals = np.concatenate([mu[interior].astype(float), -np.ones(int(keep.sum()))])
    return sp.csr_matrix((vals, (rows, cols)), shape=(k, k))


def _solve(lap, rhs, method):
    """Solve the SPD grounded-Laplacian system; returns (x, iters, method)."""
    k = lap.shape[0]
    if k == 0:
        return np.empty(0), 0, method
    if method == "auto":
        method = "dense" if k < DENSE_LIMIT else "splu"
    if method == "dense":
        return np.linalg.solve(lap.toarray(), rhs), 0, "dense"
    if method == "cg":
        d = lap.diagonal()
        pre = sp.diags(1.0 / d)
        iters = [0]

        def cb(_):
            iters[0] += 1

        x, info = spla.cg(lap, rhs, rtol=1e-14, atol=1e-13, maxiter=50 * k,
                          M=pre, callback=cb)
        if info != 0:                      # fall back to a factorization
            return spla.spsolve(lap.tocsc(), rhs), iters[0], "cg->splu"
        return x, iters[0], "cg"
    return spla.spsolve(lap.tocsc(), rhs), 0, "splu"


def effective_resistance(g: SiteGraph, source, sink, method="auto"):
    """R_eff(A, B) by minimizing the Dirichlet energy.

    Returns a ResistanceSolve; disconnected A and B yield the distinguished
    infinite-resistance result.  A and B must be nonempty and disjoint.
    """
    a = np.asarray(sorted(set(int(v) for v in source)), dtype=np.int64)
    b = np.asarray(sorted(set(int(v) for v in sink)), dtype=np.int64)
    if a.size == 0 or b.size == 0:
        raise ValueError("source and sink must be nonempty")
    if set(a.tolist()) & set(b.tolist()):
        raise ValueError("source and sink must be disjoint")
    dist_from_a = bfs_distances(g, a)
    if np.all(dist_from_a[b] < 0):
        return ResistanceSolve(r_eff=math.inf, source=a, sink=b, method="none")

    comp = np.flatnonzero(dist_from_a >= 0)
    boundary = set(a.tolist()) | set(b.tolist())
    interior = np.array([v for v in comp.tolist() if v not in boundary],
                        dtype=np.int64)
    index = {int(v): i for i, v in enumerate(interior)}
    lap = _laplacian(g, interior, index)
    rhs = np.zeros(len(interior))
    a_set = set(a.tolist())
    for i, v in enumerate(interior):
        for w in g.neighbors(v):
            if int(w) in a_set:
                rhs[i] += 1.0
    x, iters, used = _solve(lap, rhs, method)

    f = np.full(g.n_vertices, np.nan)
    f[comp] = 0.0
    f[a] = 1.0
    f[b] = 0.0
    f[interior] = x
    residual = float(np.max(np.abs(lap @ x - rhs))) if len(interior) else 0.0

    e = g.edge_array()
    on = ~(np.isnan(f[e[:, 0]]) | np.isnan(f[e[:, 1]]))
    energy = float(((f[e[on, 0]] - f[e[on, 1]]) ** 2).sum())
    r_eff = math.inf if energy == 0 else 1.0 / energy
    return ResistanceSolve(r_eff=r_eff, source=a, sink=b, potential=f,
                           residual=residual, iterations=iters, method=used,
                           energy=energy)


def resistance_to_complement(g: SiteGraph, x, region, method="auto"):
    """R_eff(x, region^c): every vertex outside `region` merges into one sink."""
    region = set(int(v) for v in region)
    outside = [v for v in range(g.n_vertices) if v not in region]
    if not outside:
        return ResistanceSolve(r_eff=math.inf, source=np.array([int(x)]),
                               sink=np.empty(0, np.int64), method="none")
    return effective_resistance(g, [int(x)], outside, method=method)


def green_function(g: SiteGraph, absorbing, x, y, method="auto"):
    """G_A(x, y): expected visits to y before hitting A, divided by mu_y.

    Equals the (x, y) entry of the inverse grounded Laplacian, hence is
    symmetric in x and y; G_A(x, x) equals R_eff(x, A).
    """
    col = green_column(g, absorbing, y, method=method)
    return float(col[int(x)])


def green_column(g: SiteGraph, absorbing, y, method="auto"):
    """G_A(. , y) as a full-length vector (0 on A and off-component)."""
    a = sorted(set(int(v) for v in absorbing))
    if not a:
        raise ValueError("absorbing set must be nonempty")
    y = int(y)
    if y in set(a):
        raise ValueError("y must not be absorbing")
    dist = bfs_distances(g, a)
    if dist[y] < 0:
        raise ValueError("y cannot reach the absorbing set")
    interior = np.array([v for v in range(g.n_vertices)
                         if v not in set(a) and dist[v] >= 0], dtype=np.int64)
    index = {int(v): i for i, v in enumerate(interior)}
    lap = _laplacian(g, interior, index)
    rhs = np.zeros(len(interior))
    rhs[index[y]] = 1.0
    x, _, _ = _solve(lap, rhs, method)
    out = np.zeros(g.n_vertices)
    out[interior] = x
    return out


def expected_exit_time(g: SiteGraph, z, region, method="auto", check_bound=True):
    """E^z[steps to leave `region`] via one Green-identity linear solve.

    Also evaluates the bound R_eff(z, region^c) * V(region) and asserts the
    identity value never exceeds it.  Returns a ResistanceSolve whose r_eff
    is the resistance to the complement and whose `appendix_bound` carries
    the product bound; the exit time itself is the first return value.
    """
    z = int(z)
    region = sorted(set(int(v) for v in region))
    rset = set(region)
    if z not in rset:
        raise ValueError("start must lie inside the region")
    comp_all = set(g.component_of(z).tolist())
    if comp_all <= rset:
        return math.inf, None
    interior = np.array([v for v in region if v in comp_all], dtype=np.int64)
    index = {int(v): i for i, v in enumerate(interior)}
    lap = _laplacian(g, interior, index)
    mu = g.degrees[interior].astype(float)
    x, iters, used = _solve(lap, mu, method)
    value = float(x[index[z]])

    solve = resistance_to_complement(g, z, region, method=method)
    vol = int(g.degrees[interior].sum())
    bound = solve.r_eff * vol
    solve.appendix_bound = bound
    solve.iterations = max(solve.iterations, iters)
    if check_bound and value > bound * (1 + 1e-9) + 1e-9:
        raise AssertionError("Green-identity exit time exceeded its bound")
    return value, solve


def exit_time_profile(g: SiteGraph, z, regions, method="auto"):
    """Expected exit times from a nested family of regions (one solve each)."""
    return [expected_exit_time(g, z, r, method=method)[0] for r in regions]


def resistance_diagonal_from_origin(g: SiteGraph, members, method="auto"):
    """R_eff(origin, x) for every x in `members`, in one factorization.

    Grounding the Laplacian at the origin makes R_eff(origin, x) the x-th
    diagonal entry of the inverse; one sparse LU plus |members| solves.
    """
    o = g.origin
    comp = g.component_of(o)
    cset = set(comp.tolist())
    interior = np.array([v for v in comp.tolist() if v != o], dtype=np.int64)
    index = {int(v): i for i, v in enumerate(interior)}
    lap = _laplacian(g, interior, index)
    members = [int(v) for v in members]
    out = np.full(g.n_vertices, math.inf)
    out[o] = 0.0
    if len(interior) == 0:
        return out[members]
    if lap.shape[0] < DENSE_LIMIT:
        inv = np.linalg.inv(lap.toarray())
        diag = np.diag(inv)
    else:
        lu = spla.splu(lap.tocsc())
        diag = np.empty(len(interior))
        chunk = 64
        for start in range(0, len(interior), chunk):
            stop = min(start + chunk, len(interior))
            rhs = np.zeros((len(interior), stop - start))
            rhs[np.arange(start, stop), np.arange(stop - start)] = 1.0
            sol = lu.solve(rhs)
            diag[start:stop] = sol[np.arange(start, stop), np.arange(stop - start)]
    out[interior] = diag
    return np.array([out[v] if v in cset else math.inf for v in members])


def max_resistance_from_origin(g: SiteGraph, members, method="auto"):
    """max over `members` of the point-to-point resistance from the origin."""
    vals = resistance_diagonal_from_origin(g, members, method=method)
    return float(vals.max()) if vals.size else 0.0


def check_reff_dominated(g: SiteGraph, source, sink, tol=1e-9):
    """R_eff(A, B) <= d_G(A, B) + tol (resistance below intrinsic metric)."""
    solve = effective_resistance(g, source, sink)
    dist = bfs_distances(g, source)
    dd = dist[np.asarray(sorted(set(int(v) for v in sink)))]
    dd = dd[dd >= 0]
    d_g = float(dd.min()) if dd.size else math.inf
    if math.isinf(solve.r_eff):
        return math.isinf(d_g)
    return solve.r_eff <= d_g + tol
