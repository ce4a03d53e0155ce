"""Approximate samples of the incipient infinite cluster.

Three flavors:

* conditioned   - rejection-sample critical clusters until one connects the
                  origin to a point outside Q_n; trustworthy out to n/2;
* size-biased   - clusters just below criticality accepted proportionally to
                  their size inside the observation window, mirroring the
                  limiting scheme that weights configurations by |C(0)|;
* tree oracle   - the critical Galton-Watson tree conditioned to survive
                  (infinite spine with size-biased bushes), built exactly by
                  the spine decomposition.  Random walk on this tree obeys
                  the same scaling exponents the lattice theorems assert, so
                  it serves as ground truth for exponent tests.

Tree vertices are embedded in Z^1 by their depth, so extrinsic and intrinsic
balls coincide there and the pivotal displacement along the spine is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .explore import CriticalPoint, StopRule, explore_cluster
from .graphs import ClusterGraph, SiteGraph
from .util import rng_for

__all__ = [
    "IICSample",
    "Offspring",
    "sample_conditioned_iic",
    "sample_size_biased",
    "sample_tree_iic",
    "spine_edges",
]


@dataclass
class IICSample:
    graph: ClusterGraph
    flavor: str
    valid_window: float
    window: int                      # the n (or depth) used to build it
    rejections: int = 0
    acceptance_rate: float = 1.0
    spine: Optional[np.ndarray] = None   # vertex ids of the spine (tree flavor)

    @property
    def site_graph(self) -> SiteGraph:
        return self.graph.graph

    def target_ids(self):
        """Finite stand-in for infinity: outside-window vertices, or the
        deepest spine vertex for the tree oracle."""
        if self.spine is not None:
            return np.array([self.spine[-1]], dtype=np.int64)
        g = self.site_graph
        norms = np.sqrt((g.coords.astype(float) ** 2).sum(axis=1))
        return np.flatnonzero(norms > self.window)


@dataclass(frozen=True)
class Offspring:
    """Offspring distribution descriptor for Galton-Watson trees."""

    kind: str
    mean_value: float
    pmf: Optional[tuple] = None

    @classmethod
    def poisson(cls, mean=1.0):
        return cls(kind="poisson", mean_value=float(mean))

    @classmethod
    def from_pmf(cls, probs):
        probs = tuple(float(q) for q in probs)
        if abs(sum(probs) - 1.0) > 1e-12 or any(q < 0 for q in probs):
            raise ValueError("pmf must be nonnegative and sum to 1")
        mean = sum(k * q for k, q in enumerate(probs))
        return cls(kind="pmf", mean_value=mean, pmf=probs)

    @property
    def mean(self):
        return self.mean_value

    def sample(self, rng, size):
        if self.kind == "poisson":
            return rng.poisson(self.mean_value, size=size)
        cum = np.cumsum(self.pmf)
        return np.searchsorted(cum, rng.random(size), side="right")

    def sample_size_biased_minus_one(self, rng, size):
        """K - 1 where P(K = k) is proportional to k * q_k (spine law)."""
        if self.kind == "poisson":
            return rng.poisson(self.mean_value, size=size)
        w = np.array([(k + 1) * q for k, q in enumerate(self.pmf[1:], start=0)])
        # w[j] = (j+1) * q_{j+1}; normalizing by the mean gives P(K-1 = j)
        cum = np.cumsum(w / self.mean_value)
        return np.searchsorted(cum, rng.random(size), side="right")


# -- lattice flavors ----------------------------------------------------------


def sample_conditioned_iic(pc: CriticalPoint, n, stop: StopRule | None = None,
                           seed=0, max_rejections=100_000):
    """Critical cluster conditioned on {0 <-> outside Q_n}.

    Straight rejection sampling at the operating critical estimate; the
    acceptance rate is the one-arm probability at scale n.  The far field
    of the sample is distorted by the conditioning, so only the window of
    radius n/2 should be trusted.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    stop = stop or StopRule(max_vertices=500_000, max_radius_extrinsic=2 * max(n, 1))
    spec = pc.at_p()
    for k in range(max_rejections):
        c = explore_cluster(spec, stop, rng=rng_for(seed, k))
        norms = c.graph.euclid_norms()
        if n == 0 or bool((norms > n).any()):
            return IICSample(graph=c, flavor="conditioned_extrinsic",
                             valid_window=n / 2, window=n, rejections=k,
                             acceptance_rate=1.0 / (k + 1))
    raise RuntimeError(
        f"rejection budget exhausted; empirical acceptance < {1.0 / max_rejections:.2e}")


def sample_size_biased(pc: CriticalPoint, n, stop: StopRule | None = None,
                       seed=0, max_rejections=1_000_000):
    """Size-biased cluster law restricted to the window Q_n.

    Clusters are drawn at p = p_hat * (1 - 1/n), approaching criticality at
    the observation scale while keeping the cluster size integrable, and
    accepted with probability |C weighted by the window| / cap.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    stop = stop or StopRule(max_vertices=100_000)
    if stop.max_vertices is None:
        raise ValueError("size-biased sampling needs a vertex cap")
    spec = pc.at_p(1.0 - 1.0 / n)
    cap = stop.max_vertices
    for k in range(max_rejections):
        rng = rng_for(seed, k)
        c = explore_cluster(spec, stop, rng=rng)
        norms = c.graph.euclid_norms()
        w = int((norms <= n).sum())
        if rng.random() < w / cap:
            return IICSample(graph=c, flavor="size_biased",
                             valid_window=n / 2, window=n, rejections=k,
                             acceptance_rate=1.0 / (k + 1))
    raise RuntimeError("rejection budget exhausted for size-biased sampling")


# -- tree oracle ---------------------------------------------------------------


def sample_tree_iic(offspring: Offspring, depth, seed=0, radius_cap=None):
    """Kesten tree: spine of the given depth plus critical bushes.

    Every spine vertex sprouts size-biased-minus-one off-spine children,
    each rooting an independent unconditioned critical tree; the whole
    object is generated level by level out to `radius_cap` (default: depth,
    i.e. the exact law of the tree intersected with the intrinsic ball of
    radius `depth`).
    """
    if abs(offspring.mean - 1.0) > 1e-9:
        raise ValueError("offspring distribution must be critical (mean 1)")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    radius_cap = depth if radius_cap is None else min(int(radius_cap), int(depth))
    rng = rng_for(seed)

    par_chunks = [np.array([-1], dtype=np.int64)]
    level_sizes = [1]
    spine_ids = [0]
    bush_level = np.empty(0, dtype=np.int64)    # bush vertices at current level
    spine_vertex = 0
    next_id = 1
    for lvl in range(0, max(depth, radius_cap)):
        new_parents = []
        # spine child (kept out to `depth`) plus off-spine bush roots
        if spine_vertex is not None and lvl < depth:
            spine_child = next_id
            new_parents.append(np.full(1, spine_vertex, dtype=np.int64))
            next_id += 1
            n_off = (int(offspring.sample_size_biased_minus_one(rng, 1)[0])
                     if lvl + 1 <= radius_cap else 0)
            if n_off:
                new_parents.append(np.full(n_off, spine_vertex, dtype=np.int64))
                next_id += n_off
        else:
            spine_child = None
        bush_children_parent = np.empty(0, dtype=np.int64)
        if bush_level.size and lvl + 1 <= radius_cap:
            counts = offspring.sample(rng, bush_level.size)
            bush_children_parent = np.repeat(bush_level, counts)
            next_id += int(bush_children_parent.size)
            new_parents.append(bush_children_parent)
        if not new_parents:
            break
        level_parents = np.concatenate(new_parents)
        par_chunks.append(level_parents)
        level_sizes.append(level_parents.size)
        first_new = next_id - level_parents.size
        if spine_child is not None:
            spine_ids.append(spine_child)
            bush_level = np.arange(first_new + 1, next_id, dtype=np.int64)
        else:
            bush_level = np.arange(first_new, next_id, dtype=np.int64)
        spine_vertex = spine_child

    par = np.concatenate(par_chunks)
    n = par.size
    depths = np.repeat(np.arange(len(level_sizes), dtype=np.int64), level_sizes)
    g = _tree_csr(par, depths)
    cluster = ClusterGraph(graph=g, seed=seed, spec=None,
                           bfs_order=np.arange(n, dtype=np.int64),
                           truncated=True, depths=depths)
    return IICSample(graph=cluster, flavor="tree",
                     valid_window=min(depth, radius_cap), window=depth,
                     spine=np.array(spine_ids, dtype=np.int64))


def _tree_csr(par, depths):
    """CSR adjacency of a tree given parent pointers, children contiguous."""
    n = par.size
    child_count = np.bincount(par[1:], minlength=n)
    deg = child_count + 1
    deg[0] -= 1
    indptr = np.concatenate([[0], np.cumsum(deg)])
    indices = np.empty(int(indptr[-1]), dtype=np.int64)
    # parent slot: first slot of every non-root vertex
    indices[indptr[1:n]] = par[1:n]
    # child slots: children are generated in id order grouped by parent level
    # by construction, but parents at one level interleave, so group stably.
    if n > 1:
        order = np.argsort(par[1:], kind="stable")
        kids = order + 1
        parents = par[kids]
        starts = np.flatnonzero(np.concatenate([[True], parents[1:] != parents[:-1]]))
        offsets = np.arange(parents.size) - np.repeat(starts, np.diff(
            np.concatenate([starts, [parents.size]])))
        base = indptr[parents] + np.where(parents == 0, 0, 1)
        indices[base + offsets] = kids
    coords = depths[:, None]
    return SiteGraph(indptr, indices, coords=coords, origin=0)


def spine_edges(sample: IICSample):
    """Edge list of the spine, the tree backbone toward infinity."""
    s = sample.spine
    if s is None:
        raise ValueError("sample has no spine")
    return [(int(s[i]), int(s[i + 1])) for i in range(len(s) - 1)]
