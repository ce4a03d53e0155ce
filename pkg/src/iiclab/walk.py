"""Discrete-time simple random walk on a sampled graph.

The walker is non-lazy: from x it moves to a uniformly chosen neighbor, so
its transition density is p_n(x, y) = P^x(X_n = y)/mu_y.  All estimators run
many independent walks simultaneously on the CSR arrays; a fixed seed gives
bit-identical trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graphs import SiteGraph, bfs_distances
from .util import rng_for

__all__ = [
    "ExitTimeResult",
    "ReturnProbability",
    "DisplacementProfile",
    "exit_time",
    "modified_exit_time",
    "return_probability",
    "displacement_profile",
    "walk_on_subgraph",
]

DEFAULT_STEP_BUDGET = 100_000_000


@dataclass
class ExitTimeResult:
    mean: float
    se: float
    quantiles: dict
    samples: np.ndarray            # exit steps; censored trials excluded
    censored: int
    trials: int

    @property
    def censor_rate(self):
        return self.censored / self.trials


@dataclass
class ReturnProbability:
    ns: np.ndarray                 # checkpoint values of n (even steps 2n)
    p2n: np.ndarray                # estimates of p_{2n}(x, x)
    se: np.ndarray
    trials: int
    mu_x: int
    exact: Optional[np.ndarray] = None   # transition-power oracle, small graphs


@dataclass
class DisplacementProfile:
    ns: np.ndarray
    mean_extrinsic: Optional[np.ndarray]     # E|X_n|
    mean_intrinsic: np.ndarray               # E d(0, X_n)
    max_extrinsic: Optional[np.ndarray]      # E[max_{k<=n} |X_k|]
    max_intrinsic: np.ndarray                # E[max_{k<=n} d(0, X_k)]
    range_mean: Optional[np.ndarray]         # E|W_n|
    trials: int
    max_intrinsic_extreme: float = 0.0       # max over walks of d(0, X_k)


def _steps(g, pos, rng):
    deg = g.degrees
    u = rng.random(pos.shape[0])
    k = (u * deg[pos]).astype(np.int64)
    return g.indices[g.indptr[pos] + k]


def exit_time(g: SiteGraph, start, region, trials, seed=0,
              step_budget=DEFAULT_STEP_BUDGET,
              quantiles=(0.5, 0.9, 0.99)):
    """Monte-Carlo exit times from a vertex region.

    Walks exceeding the step budget are censored and reported separately,
    never silently truncated into the mean.
    """
    start = int(start)
    inside = np.zeros(g.n_vertices, dtype=bool)
    inside[np.asarray(list(region), dtype=np.int64)] = True
    if not inside[start]:
        raise ValueError("start must lie inside the region")
    rng = rng_for(seed)
    pos = np.full(trials, start, dtype=np.int64)
    alive_ids = np.arange(trials)
    exit_steps = np.full(trials, -1, dtype=np.int64)
    t = 0
    while alive_ids.size and t < step_budget:
        pos = _steps(g, pos, rng)
        t += 1
        out = ~inside[pos]
        if out.any():
            exit_steps[alive_ids[out]] = t
            pos = pos[~out]
            alive_ids = alive_ids[~out]
    done = exit_steps[exit_steps > 0]
    censored = trials - done.size
    mean = float(done.mean()) if done.size else math.nan
    se = float(done.std(ddof=1) / math.sqrt(done.size)) if done.size > 1 else math.nan
    qs = {q: float(np.quantile(done, q)) if done.size else math.nan
          for q in quantiles}
    return ExitTimeResult(mean=mean, se=se, quantiles=qs, samples=done,
                          censored=censored, trials=trials)


def modified_exit_time(g: SiteGraph, r, backbone_edges, region, trials,
                       seed=0, step_budget=1_000_000):
    """Exit time where only backbone crossings of Q_r stop the clock.

    The walk moves over every sample edge touching the region.  Landing
    outside Q_r through a non-backbone edge keeps the clock running and the
    next step is the forced return to the interior endpoint (two clock
    ticks per excursion); landing outside through a backbone edge ends the
    walk.  `region` is normally U_r.
    """
    inside_q = np.zeros(g.n_vertices, dtype=bool)
    norms = np.sqrt((g.coords.astype(float) ** 2).sum(axis=1))
    inside_q[norms <= r] = True
    in_region = np.zeros(g.n_vertices, dtype=bool)
    in_region[np.asarray(list(region), dtype=np.int64)] = True

    bb = np.zeros(len(g.indices), dtype=bool)
    bb_set = {(min(u, v), max(u, v)) for u, v in backbone_edges}
    heads = np.repeat(np.arange(g.n_vertices), g.degrees)
    for slot, (u, w) in enumerate(zip(heads.tolist(), g.indices.tolist())):
        if (min(u, w), max(u, w)) in bb_set:
            bb[slot] = True

    rng = rng_for(seed)
    start = g.origin
    if not in_region[start]:
        raise ValueError("origin must lie inside the region")
    pos = np.full(trials, start, dtype=np.int64)
    clock = np.zeros(trials, dtype=np.int64)
    alive_ids = np.arange(trials)
    exit_steps = np.full(trials, -1, dtype=np.int64)
    deg = g.degrees
    while alive_ids.size:
        u = rng.random(pos.shape[0])
        k = (u * deg[pos]).astype(np.int64)
        slot = g.indptr[pos] + k
        nxt = g.indices[slot]
        went_out = ~inside_q[nxt]
        via_bb = bb[slot]
        stopped = went_out & via_bb
        bounced = went_out & ~via_bb
        clock += np.where(bounced, 2, 1)
        if stopped.any():
            exit_steps[alive_ids[stopped]] = clock[stopped]
        keep = ~stopped
        moved = keep & ~bounced
        pos = np.where(moved, nxt, pos)[keep]
        clock = clock[keep]
        alive_ids = alive_ids[keep]
        if alive_ids.size and clock.min() >= step_budget:
            break
    done = exit_steps[exit_steps > 0]
    censored = trials - done.size
    mean = float(done.mean()) if done.size else math.nan
    se = float(done.std(ddof=1) / math.sqrt(done.size)) if done.size > 1 else math.nan
    return ExitTimeResult(mean=mean, se=se,
                          quantiles={0.5: float(np.median(done)) if done.size else math.nan},
                          samples=done, censored=censored, trials=trials)


def return_probability(g: SiteGraph, x, ns, trials, seed=0, exact_limit=300):
    """p_{2n}(x, x) estimates at the requested n checkpoints.

    Sampled at even steps only (the walk is periodic on bipartite pieces).
    On graphs small enough, the exact value by spectral transition powers is
    attached for cross-checking.
    """
    x = int(x)
    ns = np.asarray(sorted(int(n) for n in ns), dtype=np.int64)
    mu_x = int(g.degrees[x])
    if mu_x < 1:
        raise ValueError("x has no neighbors")
    rng = rng_for(seed)
    pos = np.full(trials, x, dtype=np.int64)
    hits = np.zeros(len(ns), dtype=np.int64)
    targets = {int(n): i for i, n in enumerate(ns)}
    for t in range(1, int(ns[-1]) + 1):
        pos = _steps(g, pos, rng)
        pos = _steps(g, pos, rng)
        if t in targets:
            hits[targets[t]] = int((pos == x).sum())
    p_hat = hits / trials / mu_x
    se = np.sqrt(np.maximum(hits / trials * (1 - hits / trials), 1e-300) / trials) / mu_x
    exact = None
    if g.n_vertices <= exact_limit:
        from .oracle import exact_return_probabilities
        exact = exact_return_probabilities(g, x, (2 * ns).tolist())
    return ReturnProbability(ns=ns, p2n=p_hat, se=se, trials=trials,
                             mu_x=mu_x, exact=exact)


def displacement_profile(g: SiteGraph, start, ns, trials, seed=0,
                         track_range=True, range_trials=None):
    """Checkpointed displacement statistics of the walk.

    Tracks E|X_n| and running max (extrinsic, when the graph is embedded),
    E d(0, X_n) and running max (intrinsic), and the mean range |W_n| from
    a trajectory-recording subset of walks.
    """
    start = int(start)
    ns = np.asarray(sorted(int(n) for n in ns), dtype=np.int64)
    n_max = int(ns[-1])
    dist0 = bfs_distances(g, [start])
    norms = None
    if g.coords is not None:
        norms = np.sqrt(((g.coords - g.coords[start]).astype(float) ** 2).sum(axis=1))
    rng = rng_for(seed)
    pos = np.full(trials, start, dtype=np.int64)
    zmax = np.zeros(trials) if norms is not None else None
    ymax = np.zeros(trials, dtype=np.int64)
    targets = {int(n): i for i, n in enumerate(ns)}
    me = np.zeros(len(ns)) if norms is not None else None
    mi = np.zeros(len(ns))
    ze = np.zeros(len(ns)) if norms is not None else None
    yi = np.zeros(len(ns))
    for t in range(1, n_max + 1):
        pos = _steps(g, pos, rng)
        if norms is not None:
            np.maximum(zmax, norms[pos], out=zmax)
        np.maximum(ymax, dist0[pos], out=ymax)
        if t in targets:
            i = targets[t]
            if norms is not None:
                me[i] = float(norms[pos].mean())
                ze[i] = float(zmax.mean())
            mi[i] = float(dist0[pos].mean())
            yi[i] = float(ymax.mean())
    range_mean = None
    if track_range:
        m = range_trials or min(trials, 256)
        traj = np.empty((m, n_max + 1), dtype=np.int64)
        traj[:, 0] = start
        rng2 = rng_for(seed, 1)
        p2 = np.full(m, start, dtype=np.int64)
        for t in range(1, n_max + 1):
            p2 = _steps(g, p2, rng2)
            traj[:, t] = p2
        range_mean = np.zeros(len(ns))
        for w in range(m):
            _, first = np.unique(traj[w], return_index=True)
            first.sort()
            range_mean += np.searchsorted(first, ns, side="right")
        range_mean /= m
    return DisplacementProfile(ns=ns, mean_extrinsic=me, mean_intrinsic=mi,
                               max_extrinsic=ze, max_intrinsic=yi,
                               range_mean=range_mean, trials=trials,
                               max_intrinsic_extreme=float(ymax.max()))


def walk_on_subgraph(g: SiteGraph, keep_edges):
    """Graph restricted to an edge mask; every walk op composes with it.

    The ids, coordinates and origin are preserved so results remain
    comparable with the unrestricted walk.
    """
    return g.subgraph_from_edges(keep_edges)
