"""Independent brute-force ground truth.

Everything here is deliberately dumb and exact: full enumeration of product
measures on tiny edge sets, dense absorbing-chain linear algebra with partial
pivoting, and spectral transition powers.  The stochastic modules are tested
against these routines, so nothing in this file may call them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .graphs import SiteGraph

__all__ = [
    "TinyConfigSpace",
    "exact_event_probability",
    "connection_event",
    "check_bk",
    "check_fkg",
    "ChainSolve",
    "exact_chain_solve",
    "exact_return_probabilities",
    "gw_total_progeny",
    "gw_survival_depth",
]

_MAX_EDGES = 24
_BLOCK = 1 << 16


@dataclass
class TinyConfigSpace:
    """Explicit product measure on the open/closed states of <= 24 edges.

    edges : sequence of (u, v) vertex pairs (vertex labels are arbitrary
        hashables; connectivity helpers build their own indexing).
    probs : per-edge open probabilities.
    """

    edges: Sequence[tuple]
    probs: Sequence[float]

    def __post_init__(self):
        if len(self.edges) > _MAX_EDGES:
            raise ValueError(f"enumeration capped at {_MAX_EDGES} edges")
        if len(self.probs) != len(self.edges):
            raise ValueError("one probability per edge required")
        self.probs = [float(p) for p in self.probs]
        if any(p < 0 or p > 1 for p in self.probs):
            raise ValueError("probabilities must lie in [0, 1]")

    @property
    def m(self):
        return len(self.edges)

    def config_blocks(self):
        """Yields (ids, bits, weights) over all 2^m configurations."""
        m = self.m
        p = np.asarray(self.probs)
        for start in range(0, 1 << m, _BLOCK):
            ids = np.arange(start, min(start + _BLOCK, 1 << m), dtype=np.int64)
            bits = ((ids[:, None] >> np.arange(m)) & 1).astype(bool)
            w = np.prod(np.where(bits, p, 1.0 - p), axis=1)
            yield ids, bits, w


def exact_event_probability(space: TinyConfigSpace, event: Callable):
    """P(event) by full enumeration.

    `event` maps a (block, m) boolean matrix of edge states to a boolean
    vector, one entry per configuration.
    """
    total = 0.0
    for _, bits, w in space.config_blocks():
        hit = np.asarray(event(bits), dtype=bool)
        total += float(w[hit].sum())
    return total


def connection_event(space: TinyConfigSpace, a, b):
    """Vectorized predicate for {a <-> b} through the open edges."""
    verts = sorted({v for e in space.edges for v in e}, key=repr)
    index = {v: i for i, v in enumerate(verts)}
    ea = np.array([index[u] for u, _ in space.edges])
    eb = np.array([index[v] for _, v in space.edges])
    ia, ib = index.get(a), index.get(b)
    n = len(verts)

    def event(bits):
        out = np.empty(len(bits), dtype=bool)
        if a == b:
            out[:] = True
            return out
        if ia is None or ib is None:
            out[:] = False
            return out
        for r in range(len(bits)):
            parent = list(range(n))

            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            for k in np.flatnonzero(bits[r]):
                ra, rb = find(ea[k]), find(eb[k])
                if ra != rb:
                    parent[ra] = rb
            out[r] = find(ia) == find(ib)
        return out

    return event


def _family_masks(space, family):
    masks = []
    for witness in family:
        mask = 0
        for e in witness:
            mask |= 1 << int(e)
        masks.append(mask)
    return masks


def check_bk(space: TinyConfigSpace, family_a, family_b):
    """P(A)P(B) - P(A o B) for increasing events in witness-family form.

    A family is a collection of witness edge sets (edge indices into
    `space.edges`); the event holds when some witness set is fully open.
    The disjoint occurrence A o B requires a pair of disjoint witnesses
    both fully open.  The returned margin is >= 0 up to roundoff.
    """
    ma = _family_masks(space, family_a)
    mb = _family_masks(space, family_b)
    pairs = [a | b for a in ma for b in mb if (a & b) == 0]
    p_a = p_b = p_ab = 0.0
    for ids, _, w in space.config_blocks():
        hit_a = np.zeros(len(ids), dtype=bool)
        for m in ma:
            hit_a |= (ids & m) == m
        hit_b = np.zeros(len(ids), dtype=bool)
        for m in mb:
            hit_b |= (ids & m) == m
        hit_ab = np.zeros(len(ids), dtype=bool)
        for m in pairs:
            hit_ab |= (ids & m) == m
        p_a += float(w[hit_a].sum())
        p_b += float(w[hit_b].sum())
        p_ab += float(w[hit_ab].sum())
    return p_a * p_b - p_ab


def check_fkg(space: TinyConfigSpace, family_a, family_b):
    """P(A and B) - P(A)P(B) >= 0 for increasing events (Harris/FKG)."""
    ma = _family_masks(space, family_a)
    mb = _family_masks(space, family_b)
    p_a = p_b = p_both = 0.0
    for ids, _, w in space.config_blocks():
        hit_a = np.zeros(len(ids), dtype=bool)
        for m in ma:
            hit_a |= (ids & m) == m
        hit_b = np.zeros(len(ids), dtype=bool)
        for m in mb:
            hit_b |= (ids & m) == m
        p_a += float(w[hit_a].sum())
        p_b += float(w[hit_b].sum())
        p_both += float(w[hit_a & hit_b].sum())
    return p_both - p_a * p_b


# -- dense absorbing-chain algebra -------------------------------------------


@dataclass
class ChainSolve:
    """Exact quantities of the simple random walk absorbed on a vertex set."""

    graph: SiteGraph
    absorbing: np.ndarray          # absorbing vertex ids
    interior: np.ndarray           # non-absorbing ids, walk's state space
    fundamental: np.ndarray        # N = (I - Q)^-1 over interior states
    _index: dict

    def expected_absorption_time(self, x):
        """E^x[steps until the absorbing set is hit]; inf if unreachable."""
        i = self._index.get(int(x))
        if i is None:
            return 0.0
        t = self.fundamental[i].sum()
        return float(t)

    def expected_visits(self, x, y):
        """E^x[# visits to y strictly before absorption] (time 0 counts)."""
        i, j = self._index.get(int(x)), self._index.get(int(y))
        if i is None or j is None:
            return 0.0
        return float(self.fundamental[i, j])

    def green(self, x, y):
        """Visit counts normalized by degree."""
        mu_y = self.graph.degrees[int(y)]
        return self.expected_visits(x, y) / mu_y

    def return_probability(self, x, n):
        """P^x(X_n = x, not yet absorbed) / mu_x."""
        i = self._index.get(int(x))
        if i is None:
            return 0.0
        return float(self._powers(np.array([n]))[0][i, i] / self.graph.degrees[int(x)])

    def _powers(self, ns):
        mu = self.graph.degrees[self.interior].astype(float)
        q = self._q_matrix()
        s = np.sqrt(mu)[:, None] * q / np.sqrt(mu)[None, :]
        vals, vecs = np.linalg.eigh((s + s.T) / 2)
        out = []
        for n in ns:
            sn = (vecs * vals ** int(n)) @ vecs.T
            out.append(sn / np.sqrt(mu)[:, None] * np.sqrt(mu)[None, :])
        return out

    def _q_matrix(self):
        g = self.graph
        k = len(self.interior)
        q = np.zeros((k, k))
        for i, v in enumerate(self.interior):
            mu = g.degrees[v]
            for w in g.neighbors(v):
                j = self._index.get(int(w))
                if j is not None:
                    q[i, j] += 1.0 / mu
        return q

    def hitting_probability(self, x, targets):
        """P^x(the walk is absorbed in `targets` rather than elsewhere)."""
        t = set(int(v) for v in targets)
        g = self.graph
        rhs = np.zeros(len(self.interior))
        for i, v in enumerate(self.interior):
            mu = g.degrees[v]
            for w in g.neighbors(v):
                if int(w) in t:
                    rhs[i] += 1.0 / mu
        h = self.fundamental @ rhs
        i = self._index.get(int(x))
        if i is None:
            return 1.0 if int(x) in t else 0.0
        return float(h[i])


def exact_chain_solve(g: SiteGraph, absorbing):
    """Dense solution of the absorbed chain; absorbing set must be nonempty.

    Vertices with no path to the absorbing set are rejected (their
    absorption time is infinite, which the dense algebra cannot express).
    """
    absorbing = np.asarray(sorted(set(int(v) for v in absorbing)), dtype=np.int64)
    if absorbing.size == 0:
        raise ValueError("absorbing set must be nonempty")
    from .graphs import bfs_distances
    reach = bfs_distances(g, absorbing)
    absorbed = set(absorbing.tolist())
    interior = np.array([v for v in range(g.n_vertices) if v not in absorbed],
                        dtype=np.int64)
    if np.any(reach[interior] < 0):
        raise ValueError("some interior vertex cannot reach the absorbing set")
    index = {int(v): i for i, v in enumerate(interior)}
    solve = ChainSolve(graph=g, absorbing=absorbing, interior=interior,
                       fundamental=np.empty(0), _index=index)
    q = solve._q_matrix()
    solve.fundamental = np.linalg.solve(np.eye(len(interior)) - q,
                                        np.eye(len(interior)))
    return solve


def gw_total_progeny(offspring_sampler, trials, cap, rng, block=256):
    """Total progeny of independent Galton-Watson trees, censored at `cap`.

    Uses the first-passage representation: the total progeny is the first
    time the walk with steps (offspring - 1) hits -1.  Only the indicator
    structure up to `cap` is needed for tail estimates, so the walk stops
    there.  `offspring_sampler(rng, size)` draws offspring counts.
    """
    out = np.full(trials, cap, dtype=np.int64)
    chunk = 20_000
    for start in range(0, trials, chunk):
        m = min(chunk, trials - start)
        s = np.zeros(m, dtype=np.int64)
        alive = np.arange(m)
        done_at = np.full(m, cap, dtype=np.int64)
        steps = 0
        while alive.size and steps < cap:
            b = min(block, cap - steps)
            draws = offspring_sampler(rng, (alive.size, b)).astype(np.int64) - 1
            cum = np.cumsum(draws, axis=1) + s[alive][:, None]
            hit = cum == -1
            any_hit = hit.any(axis=1)
            first = np.where(any_hit, hit.argmax(axis=1), b)
            done_at[alive[any_hit]] = steps + first[any_hit] + 1
            s[alive] = cum[np.arange(alive.size), np.minimum(first, b - 1)]
            alive = alive[~any_hit]
            steps += b
        out[start:start + m] = done_at
    return out


def gw_survival_depth(offspring_sampler, trials, depth_max, rng):
    """Largest generation reached by each tree, censored at depth_max.

    Simulates the generation-size chain Z_{k+1} = sum of Z_k offspring
    draws; the survival probability of a critical tree decays like
    2/(variance * depth).
    """
    z = np.ones(trials, dtype=np.int64)
    depth = np.zeros(trials, dtype=np.int64)
    alive = np.arange(trials)
    for k in range(depth_max):
        totals = np.zeros(alive.size, dtype=np.int64)
        zs = z[alive]
        # one draw per individual, aggregated per tree
        reps = np.repeat(np.arange(alive.size), zs)
        if reps.size:
            draws = offspring_sampler(rng, reps.size).astype(np.int64)
            np.add.at(totals, reps, draws)
        z[alive] = totals
        survived = totals > 0
        depth[alive[survived]] = k + 1
        alive = alive[survived]
        if not alive.size:
            break
    return depth


def exact_return_probabilities(g: SiteGraph, x, ns):
    """p_n(x, x) = P^x(X_n = x)/mu_x for each n, by spectral transition powers.

    Works on one connected component; the chain is not absorbed anywhere.
    """
    comp = g.component_of(int(x))
    index = {int(v): i for i, v in enumerate(comp)}
    k = len(comp)
    mu = g.degrees[comp].astype(float)
    if np.any(mu == 0):
        raise ValueError("isolated vertex has no walk")
    p = np.zeros((k, k))
    for i, v in enumerate(comp):
        for w in g.neighbors(v):
            p[i, index[int(w)]] += 1.0 / mu[i]
    s = np.sqrt(mu)[:, None] * p / np.sqrt(mu)[None, :]
    vals, vecs = np.linalg.eigh((s + s.T) / 2)
    i = index[int(x)]
    vi = vecs[i]
    out = []
    for n in ns:
        out.append(float((vi * vals ** int(n) * vi).sum() / mu[i]))
    return np.array(out)
