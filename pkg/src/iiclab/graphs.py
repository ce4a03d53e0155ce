"""Graph containers shared by all modules.

A sampled percolation cluster, an IIC approximant or a Galton-Watson tree is
stored as a `SiteGraph`: integer vertex ids with CSR adjacency, optionally
embedded in Z^d through an integer coordinate array.  All heavy per-vertex
work (walks, solves, breadth-first searches) runs on the CSR arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "SiteGraph",
    "ClusterGraph",
    "bfs_distances",
    "write_edge_list",
    "read_edge_list",
]


class SiteGraph:
    """Undirected graph on vertices 0..n-1 with CSR adjacency.

    Parameters
    ----------
    indptr, indices : CSR arrays; each undirected edge {u, v} appears as the
        two directed entries u->v and v->u.
    coords : optional (n, d) integer array embedding the vertices in Z^d.
        Coordinates need not be unique (tree samples are embedded by depth).
    origin : vertex id of the distinguished root, default 0.
    """

    def __init__(self, indptr, indices, coords=None, origin=0):
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.coords = None if coords is None else np.asarray(coords, dtype=np.int64)
        self.origin = int(origin)
        if self.coords is not None and self.coords.ndim == 1:
            self.coords = self.coords[:, None]

    # -- construction -----------------------------------------------------

    @classmethod
    def from_edges(cls, n_vertices, edges, coords=None, origin=0):
        """Build from an iterable of (u, v) id pairs; self-loops rejected."""
        e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if e.size and np.any(e[:, 0] == e[:, 1]):
            raise ValueError("self-loops are not allowed")
        heads = np.concatenate([e[:, 0], e[:, 1]]) if e.size else np.empty(0, np.int64)
        tails = np.concatenate([e[:, 1], e[:, 0]]) if e.size else np.empty(0, np.int64)
        order = np.argsort(heads, kind="stable")
        heads, tails = heads[order], tails[order]
        indptr = np.zeros(n_vertices + 1, dtype=np.int64)
        np.add.at(indptr, heads + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(indptr, tails, coords=coords, origin=origin)

    # -- basic queries -----------------------------------------------------

    @property
    def n_vertices(self):
        return len(self.indptr) - 1

    @property
    def n_edges(self):
        return len(self.indices) // 2

    @property
    def degrees(self):
        """mu_x: number of open edges incident to each vertex."""
        return np.diff(self.indptr)

    def neighbors(self, v):
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def edge_array(self):
        """Canonical (E, 2) array of undirected edges with u < v, sorted."""
        heads = np.repeat(np.arange(self.n_vertices, dtype=np.int64), self.degrees)
        mask = heads < self.indices
        e = np.stack([heads[mask], self.indices[mask]], axis=1)
        order = np.lexsort((e[:, 1], e[:, 0]))
        return e[order]

    def has_edge(self, u, v):
        return v in self.neighbors(u)

    def edge_volume(self, members=None):
        """Sum of degrees over `members` (default: all vertices)."""
        mu = self.degrees
        if members is None:
            return int(mu.sum())
        members = np.asarray(list(members) if not isinstance(members, np.ndarray) else members)
        return int(mu[members].sum()) if members.size else 0

    # -- derived graphs ----------------------------------------------------

    def subgraph_from_edges(self, keep_edges):
        """Same vertex ids, keeping only the given undirected edges.

        `keep_edges` is an iterable of (u, v) pairs in either orientation.
        Vertices that lose all edges stay in the graph with degree 0.
        """
        keep = {(min(u, v), max(u, v)) for u, v in keep_edges}
        edges = [tuple(e) for e in self.edge_array() if (e[0], e[1]) in keep]
        return SiteGraph.from_edges(self.n_vertices, edges,
                                    coords=self.coords, origin=self.origin)

    def without_edge(self, u, v):
        edges = [tuple(e) for e in self.edge_array()
                 if not (e[0] == min(u, v) and e[1] == max(u, v))]
        return SiteGraph.from_edges(self.n_vertices, edges,
                                    coords=self.coords, origin=self.origin)

    # -- geometry ----------------------------------------------------------

    def euclid_norms(self):
        """Extrinsic |x| of every vertex; requires an embedding."""
        if self.coords is None:
            raise ValueError("graph has no Z^d embedding")
        return np.sqrt((self.coords.astype(float) ** 2).sum(axis=1))

    def component_of(self, v):
        """Vertex ids of the connected component containing v."""
        dist = bfs_distances(self, [v])
        return np.flatnonzero(dist >= 0)


def bfs_distances(g: SiteGraph, sources, blocked_vertices=None, max_dist=None):
    """Hop distances from a source set; -1 marks unreachable vertices.

    `blocked_vertices` are never entered (sources may not be blocked).
    """
    dist = np.full(g.n_vertices, -1, dtype=np.int64)
    src = np.asarray(list(sources), dtype=np.int64)
    dist[src] = 0
    if blocked_vertices is not None:
        blocked = np.zeros(g.n_vertices, dtype=bool)
        blocked[np.asarray(list(blocked_vertices), dtype=np.int64)] = True
    else:
        blocked = None
    frontier = src
    d = 0
    while frontier.size:
        if max_dist is not None and d >= max_dist:
            break
        nxt = g.indices[_slices(g, frontier)]
        nxt = np.unique(nxt)
        nxt = nxt[dist[nxt] < 0]
        if blocked is not None:
            nxt = nxt[~blocked[nxt]]
        d += 1
        dist[nxt] = d
        frontier = nxt
    return dist


def _slices(g, vs):
    # Vectorized gather of all CSR ranges [indptr[v], indptr[v+1]) for v in vs.
    starts = g.indptr[vs]
    counts = g.indptr[vs + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, np.int64)
    excl = np.concatenate([[0], np.cumsum(counts)[:-1]])
    return (np.arange(total, dtype=np.int64)
            - np.repeat(excl, counts) + np.repeat(starts, counts))


@dataclass
class ClusterGraph:
    """An explored open subgraph of Z^d with its provenance.

    `graph.coords` holds the lattice coordinates; `coord_index` maps a
    coordinate tuple back to its vertex id.  The origin is always vertex 0.
    """

    graph: SiteGraph
    seed: Optional[int] = None
    spec: Optional[object] = None
    restriction: Optional[float] = None   # radius of the "on Q_r" restriction
    bfs_order: Optional[np.ndarray] = None
    truncated: bool = False
    coord_index: dict = field(default_factory=dict)
    depths: Optional[np.ndarray] = None
    halt_reason: Optional[str] = None

    @property
    def origin(self):
        return self.graph.origin

    @property
    def n_vertices(self):
        return self.graph.n_vertices

    def vertex_id(self, coord):
        return self.coord_index[tuple(int(c) for c in coord)]

    def contains_coord(self, coord):
        return tuple(int(c) for c in coord) in self.coord_index

    def degrees(self):
        return self.graph.degrees


# -- edge-list persistence --------------------------------------------------


def write_edge_list(path, cluster: ClusterGraph, extra_header=()):
    """Write a cluster as line-delimited text, one edge per line.

    Lattice graphs use the coordinate-pair form ``x1,...,xd<TAB>y1,...,yd``;
    headers are ``# key=value`` lines carrying spec and seed.  Graphs without
    a unique embedding (tree samples) fall back to vertex-id pairs plus a
    vertex table.
    """
    g = cluster.graph
    lines = []
    if cluster.spec is not None:
        lines.append(f"# spec={cluster.spec}")
    lines.append(f"# seed={cluster.seed}")
    if cluster.restriction is not None:
        lines.append(f"# restriction=Q_{cluster.restriction}")
    for h in extra_header:
        lines.append(f"# {h}")
    unique_embed = (g.coords is not None and
                    len({tuple(c) for c in g.coords.tolist()}) == g.n_vertices)
    if unique_embed:
        lines.append("# format=coords")
        for u, v in g.edge_array():
            cu = ",".join(str(int(c)) for c in g.coords[u])
            cv = ",".join(str(int(c)) for c in g.coords[v])
            lines.append(f"{cu}\t{cv}")
        if g.n_vertices == 1:
            lines.append(",".join(str(int(c)) for c in g.coords[0]))
    else:
        lines.append("# format=ids")
        if g.coords is not None:
            for i in range(g.n_vertices):
                lines.append("v %d %s" % (i, ",".join(str(int(c)) for c in g.coords[i])))
        for u, v in g.edge_array():
            lines.append(f"{u}\t{v}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_edge_list(path):
    """Inverse of `write_edge_list`; returns a ClusterGraph."""
    header = {}
    edges_c, verts, edges_i = [], {}, []
    fmt = "coords"
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, v = body.split("=", 1)
                    header[k.strip()] = v.strip()
                if body.startswith("format="):
                    fmt = body.split("=", 1)[1]
                continue
            if line.startswith("v "):
                _, i, cs = line.split()
                verts[int(i)] = tuple(int(c) for c in cs.split(","))
                continue
            parts = line.split("\t")
            if fmt == "coords":
                if len(parts) == 1:
                    edges_c.append((tuple(int(c) for c in parts[0].split(",")),))
                else:
                    edges_c.append(tuple(tuple(int(c) for c in p.split(",")) for p in parts))
            else:
                edges_i.append((int(parts[0]), int(parts[1])))
    seed = header.get("seed")
    seed = None if seed in (None, "None") else int(seed)
    if fmt == "coords":
        index = {}
        for e in edges_c:
            for c in e:
                index.setdefault(c, len(index))
        pairs = [(index[a], index[b]) for e in edges_c if len(e) == 2 for a, b in [e]]
        coords = np.array(list(index.keys()), dtype=np.int64)
        g = SiteGraph.from_edges(len(index), pairs, coords=coords, origin=0)
        return ClusterGraph(graph=g, seed=seed, coord_index=index)
    n = (max(verts) + 1) if verts else (max(max(e) for e in edges_i) + 1 if edges_i else 1)
    coords = None
    if verts:
        coords = np.array([verts[i] for i in range(n)], dtype=np.int64)
    g = SiteGraph.from_edges(n, edges_i, coords=coords, origin=0)
    return ClusterGraph(graph=g, seed=seed)
