"""Structural objects of a sampled graph: balls, restricted clusters, edge
volume, backbone, ordered pivotal edges, sausages and pivotal counting.

The backbone toward a finite target set (the stand-in for infinity) is the
set of vertices reachable from the origin and from the target set by
edge-disjoint paths.  Operationally: contract the target set to a single
terminal, take the bridge decomposition, and read the two-edge-connected
components along the bridge-tree path from the origin's component to the
terminal's.  The bridges on that path are exactly the pivotal edges, already
in crossing order; the components between consecutive pivotals are the
sausages.  A per-vertex max-flow routine and a brute-force edge-removal scan
are kept as independent validation routes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graphs import SiteGraph, bfs_distances

__all__ = [
    "BallView",
    "BackboneDecomposition",
    "PivotalStats",
    "extrinsic_ball",
    "intrinsic_ball",
    "restricted_cluster",
    "edge_volume",
    "backbone",
    "backbone_via_maxflow",
    "brute_force_pivotals",
    "pivotal_stats",
    "pivotal_count_to_complement",
    "pivotal_displacement",
    "export_decomposition",
]


@dataclass
class BallView:
    center: int
    radius: float
    kind: str                      # "extrinsic", "intrinsic", "restricted"
    members: np.ndarray            # vertex ids
    boundary: np.ndarray           # exact shell for intrinsic balls

    @property
    def member_set(self):
        return set(self.members.tolist())


@dataclass
class BackboneDecomposition:
    backbone_vertices: np.ndarray
    backbone_edges: list                      # canonical (u, v) pairs
    pivotals: list                            # directed (bottom, top), in order
    sausages: list                            # vertex-id arrays S_1, S_2, ...
    target: np.ndarray
    edge_bottoms: dict = field(default_factory=dict)   # backbone edge -> bottom vertex

    @property
    def n_pivotals(self):
        return len(self.pivotals)


@dataclass
class PivotalStats:
    n_piv: np.ndarray             # per-vertex pivotal count N_piv(0, x); -1 unreachable
    radii: np.ndarray
    n_bb: np.ndarray              # backbone edges with bottom inside Q_r
    h: np.ndarray                 # pivotal exit index per radius
    h_censored: np.ndarray        # True when no pivotal top ever left Q_r
    s_tops: np.ndarray            # vertex ids: origin, top(e_1), top(e_2), ...

    def b_piv(self, r):
        """Vertices reachable with at most r pivotal crossings."""
        return np.flatnonzero((self.n_piv >= 0) & (self.n_piv <= r))


# -- balls -------------------------------------------------------------------


def _norms_from(g, center):
    x = g.coords - g.coords[center]
    return np.sqrt((x.astype(float) ** 2).sum(axis=1))


def extrinsic_ball(g: SiteGraph, r, center=None):
    """Q_r: vertices within Euclidean distance r of the center."""
    center = g.origin if center is None else int(center)
    norms = _norms_from(g, center)
    members = np.flatnonzero(norms <= r)
    inside = np.zeros(g.n_vertices, dtype=bool)
    inside[members] = True
    bnd = [v for v in members.tolist()
           if any(not inside[w] for w in g.neighbors(v))]
    return BallView(center=center, radius=float(r), kind="extrinsic",
                    members=members, boundary=np.array(bnd, dtype=np.int64))


def intrinsic_ball(g: SiteGraph, x, r):
    """B_r(x): vertices at hop distance <= r, boundary exactly at r."""
    dist = bfs_distances(g, [int(x)], max_dist=int(r))
    members = np.flatnonzero(dist >= 0)
    return BallView(center=int(x), radius=float(r), kind="intrinsic",
                    members=members,
                    boundary=np.flatnonzero(dist == int(r)))


def restricted_cluster(g: SiteGraph, r, center=None):
    """U_r: vertices reachable from the origin using only edges with both
    endpoints in Q_r."""
    center = g.origin if center is None else int(center)
    norms = _norms_from(g, center)
    outside = np.flatnonzero(norms > r)
    dist = bfs_distances(g, [center], blocked_vertices=outside)
    members = np.flatnonzero(dist >= 0)
    return BallView(center=center, radius=float(r), kind="restricted",
                    members=members, boundary=np.empty(0, dtype=np.int64))


def edge_volume(g: SiteGraph, members):
    """V = sum of mu_x over the members (degrees in the full sample)."""
    return g.edge_volume(members)


# -- bridge machinery ----------------------------------------------------------


def _bridges_and_comps(n, adj, root):
    """Iterative Tarjan bridge finding on the component of `root`.

    adj: per-vertex list of (neighbor, edge_id); parallel edges allowed and
    handled correctly (only the tree-entering edge instance is skipped).
    Returns (bridge edge ids, component label per vertex with -1 off the
    root's component), where labels identify two-edge-connected components.
    """
    disc = [-1] * n
    low = [0] * n
    ptr = [0] * n
    parent_edge = [-1] * n
    bridges = set()
    timer = 0
    disc[root] = low[root] = timer
    timer += 1
    stack = [root]
    while stack:
        v = stack[-1]
        if ptr[v] < len(adj[v]):
            w, eid = adj[v][ptr[v]]
            ptr[v] += 1
            if eid == parent_edge[v]:
                continue
            if disc[w] == -1:
                disc[w] = low[w] = timer
                timer += 1
                parent_edge[w] = eid
                stack.append(w)
            else:
                low[v] = min(low[v], disc[w])
        else:
            stack.pop()
            if stack:
                u = stack[-1]
                low[u] = min(low[u], low[v])
                if low[v] > disc[u]:
                    bridges.add(parent_edge[v])
    comp = [-1] * n
    label = 0
    for s in range(n):
        if disc[s] == -1 or comp[s] != -1:
            continue
        comp[s] = label
        bag = [s]
        while bag:
            v = bag.pop()
            for w, eid in adj[v]:
                if eid not in bridges and comp[w] == -1 and disc[w] != -1:
                    comp[w] = label
                    bag.append(w)
        label += 1
    return bridges, comp, label


def backbone(g: SiteGraph, target) -> BackboneDecomposition:
    """Backbone, ordered pivotal edges and sausages toward a target set.

    The target set stands in for infinity; the origin must be connected to
    it.  Pivotal edges are returned as directed (bottom, top) pairs in
    crossing order; every origin-to-target self-avoiding path crosses them
    in exactly this order.
    """
    targets = sorted(set(int(v) for v in target))
    if not targets:
        raise ValueError("target set must be nonempty")
    o = g.origin
    dist = bfs_distances(g, [o])
    reach_t = [t for t in targets if dist[t] >= 0]
    if o in targets:
        raise ValueError("origin cannot be its own target")
    if not reach_t:
        raise ValueError("origin is not connected to the target set")
    tset = set(reach_t)

    # contract the target set into terminal node `tstar`
    tstar = g.n_vertices
    n = g.n_vertices + 1
    raw = g.edge_array()
    edges = []          # contracted endpoints
    orig = []           # original endpoints
    for u, v in raw.tolist():
        cu = tstar if u in tset else u
        cv = tstar if v in tset else v
        if cu == cv:
            continue
        edges.append((cu, cv))
        orig.append((u, v))
    adj = [[] for _ in range(n)]
    for eid, (u, v) in enumerate(edges):
        adj[u].append((v, eid))
        adj[v].append((u, eid))

    bridges, comp, _ = _bridges_and_comps(n, adj, o)
    if comp[tstar] == -1:
        raise ValueError("origin is not connected to the target set")

    # bridge-tree path comp(o) -> comp(tstar)
    ctree = {}
    for eid in bridges:
        u, v = edges[eid]
        cu, cv = comp[u], comp[v]
        ctree.setdefault(cu, []).append((cv, eid))
        ctree.setdefault(cv, []).append((cu, eid))
    path_edges, path_comps = _tree_path(ctree, comp[o], comp[tstar])

    # ordered directed pivotals (bottom on the origin side)
    pivotals = []
    for k, eid in enumerate(path_edges):
        u, v = edges[eid]
        bottom_c = path_comps[k]
        bu, bv = (u, v) if comp[u] == bottom_c else (v, u)
        ou, ov = orig[eid]
        cu = tstar if ou in tset else ou
        bottom, top = (ou, ov) if cu == bu else (ov, ou)
        pivotals.append((int(bottom), int(top)))

    on_path = set(path_comps)
    bb_vertices = [v for v in range(g.n_vertices)
                   if v not in tset and comp[v] != -1 and comp[v] in on_path]
    bb_edges = []
    for eid, (u, v) in enumerate(edges):
        if comp[u] in on_path and comp[v] in on_path:
            if eid in bridges and eid not in set(path_edges):
                continue          # off-path bridge: dangling decoration
            ou, ov = orig[eid]
            bb_edges.append((min(ou, ov), max(ou, ov)))
    bb_vertex_set = set(bb_vertices)
    for u, v in bb_edges:
        bb_vertex_set.update((u, v))

    sausages, bottoms = _sausages_and_bottoms(g, pivotals, bb_edges)
    return BackboneDecomposition(
        backbone_vertices=np.array(sorted(bb_vertex_set), dtype=np.int64),
        backbone_edges=sorted(set(bb_edges)),
        pivotals=pivotals,
        sausages=sausages,
        target=np.array(targets, dtype=np.int64),
        edge_bottoms=bottoms,
    )


def _tree_path(tree, a, b):
    """Edge ids and node sequence along the unique a->b path in a tree."""
    if a == b:
        return [], [a]
    prev = {a: (None, None)}
    bag = [a]
    while bag:
        v = bag.pop()
        for w, eid in tree.get(v, ()):
            if w not in prev:
                prev[w] = (v, eid)
                if w == b:
                    bag = []
                    break
                bag.append(w)
    if b not in prev:
        raise ValueError("no path in bridge tree")
    nodes, eids = [b], []
    v = b
    while prev[v][0] is not None:
        v, eid = prev[v]
        eids.append(eid)
        nodes.append(v)
    return eids[::-1], nodes[::-1]


def _sausages_and_bottoms(g: SiteGraph, pivotals, bb_edges):
    """Sausage vertex sets and a bottom vertex for every backbone edge.

    Sausage m is the component of top(e_{m-1}) (origin for m = 1) once all
    pivotal edges are removed.  A non-pivotal backbone edge is oriented away
    from its sausage's entry vertex; ties break toward the smaller vertex id.
    """
    piv_set = {(min(u, v), max(u, v)) for u, v in pivotals}
    keep = [e for e in g.edge_array().tolist()
            if (e[0], e[1]) not in piv_set]
    stripped = SiteGraph.from_edges(g.n_vertices, keep, origin=g.origin)
    entries = [g.origin] + [top for _, top in pivotals]
    sausages = []
    bottoms = {}
    for m, entry in enumerate(entries):
        dist = bfs_distances(stripped, [entry])
        if m < len(pivotals) or not pivotals:
            sausages.append(np.flatnonzero(dist >= 0))
        for u, v in bb_edges:
            if dist[u] >= 0 and dist[v] >= 0:
                if dist[u] < dist[v] or (dist[u] == dist[v] and u < v):
                    bottoms[(u, v)] = u
                else:
                    bottoms[(u, v)] = v
    for bottom, top in pivotals:
        bottoms[(min(bottom, top), max(bottom, top))] = bottom
    return sausages, bottoms


# -- validation routes ---------------------------------------------------------


def brute_force_pivotals(g: SiteGraph, target):
    """Pivotal edges for {origin <-> target set} by single-edge removal."""
    targets = sorted(set(int(v) for v in target))
    out = []
    for u, v in g.edge_array().tolist():
        h = g.without_edge(u, v)
        dist = bfs_distances(h, [g.origin])
        if all(dist[t] < 0 for t in targets):
            out.append((min(u, v), max(u, v)))
    return sorted(out)


def backbone_via_maxflow(g: SiteGraph, target):
    """Backbone vertex set via per-vertex unit-capacity max-flow of value 2.

    A two-terminal super-source feeds one unit through the origin and one
    through the contracted target terminal; x is a backbone vertex iff two
    units reach it along edge-disjoint routes.
    """
    targets = set(int(v) for v in target)
    tstar = g.n_vertices
    source = g.n_vertices + 1
    n = g.n_vertices + 2
    cap = {}

    def add(u, v, c):
        cap[(u, v)] = cap.get((u, v), 0) + c
        cap.setdefault((v, u), 0)

    for u, v in g.edge_array().tolist():
        cu = tstar if u in targets else u
        cv = tstar if v in targets else v
        if cu == cv:
            continue
        add(cu, cv, 1)
        add(cv, cu, 1)
    add(source, g.origin, 1)
    add(source, tstar, 1)

    adj = {}
    for (u, v) in cap:
        adj.setdefault(u, set()).add(v)

    def maxflow_to(x, need=2):
        flow = 0
        res = dict(cap)
        while flow < need:
            prev = {source: None}
            bag = [source]
            found = False
            while bag and not found:
                u = bag.pop()
                for v in adj.get(u, ()):
                    if v not in prev and res.get((u, v), 0) > 0:
                        prev[v] = u
                        if v == x:
                            found = True
                            break
                        bag.append(v)
            if not found:
                return flow
            v = x
            while prev[v] is not None:
                u = prev[v]
                res[(u, v)] -= 1
                res[(v, u)] += 1
                v = u
            flow += 1
        return flow

    out = []
    for x in range(g.n_vertices):
        if x in targets:
            continue
        if maxflow_to(x) >= 2:
            out.append(x)
    return np.array(sorted(out), dtype=np.int64)


# -- pivotal statistics ---------------------------------------------------------


def pivotal_stats(g: SiteGraph, dec: BackboneDecomposition, radii):
    """All pivotal counting statistics for the given radii.

    N_piv(0, x) is the bridge-tree depth of x's two-edge-connected component
    (bridges of the plain graph, no target involved); h(r) counts pivotal
    crossings strictly before the top process first leaves Q_r; n_bb(r)
    counts backbone edges whose bottom vertex lies inside Q_r.
    """
    adj = [[] for _ in range(g.n_vertices)]
    for eid, (u, v) in enumerate(g.edge_array().tolist()):
        adj[u].append((v, eid))
        adj[v].append((u, eid))
    bridges, comp, n_comp = _bridges_and_comps(g.n_vertices, adj, g.origin)
    edges = g.edge_array().tolist()
    ctree = {}
    for eid in bridges:
        u, v = edges[eid]
        ctree.setdefault(comp[u], []).append(comp[v])
        ctree.setdefault(comp[v], []).append(comp[u])
    depth = {comp[g.origin]: 0}
    bag = [comp[g.origin]]
    while bag:
        c = bag.pop()
        for w in ctree.get(c, ()):
            if w not in depth:
                depth[w] = depth[c] + 1
                bag.append(w)
    n_piv = np.full(g.n_vertices, -1, dtype=np.int64)
    for v in range(g.n_vertices):
        if comp[v] != -1:
            n_piv[v] = depth[comp[v]]

    radii = np.asarray(list(radii), dtype=float)
    norms = _norms_from(g, g.origin)
    s_tops = np.array([g.origin] + [top for _, top in dec.pivotals], dtype=np.int64)
    top_norms = norms[s_tops]

    h = np.empty(len(radii), dtype=np.int64)
    h_cens = np.zeros(len(radii), dtype=bool)
    n_bb = np.empty(len(radii), dtype=np.int64)
    bottoms = np.array([dec.edge_bottoms[e] for e in dec.backbone_edges],
                       dtype=np.int64) if dec.backbone_edges else np.empty(0, np.int64)
    for i, r in enumerate(radii):
        out = np.flatnonzero(top_norms[1:] > r)    # S_{n+1} outside Q_r at n = out
        if out.size:
            h[i] = int(out[0])
        else:
            h[i] = len(dec.pivotals)
            h_cens[i] = True
        n_bb[i] = int((norms[bottoms] <= r).sum()) if bottoms.size else 0
    return PivotalStats(n_piv=n_piv, radii=radii, n_bb=n_bb, h=h,
                        h_censored=h_cens, s_tops=s_tops)


def pivotal_count_to_complement(g: SiteGraph, r):
    """N_piv(0, Q_r^c): pivotal edges for reaching outside the extrinsic ball.

    Infinity (-1) when the cluster never leaves Q_r.
    """
    norms = _norms_from(g, g.origin)
    outside = np.flatnonzero(norms > r)
    if outside.size == 0:
        return -1
    dec = backbone(g, outside.tolist())
    return dec.n_pivotals


def pivotal_displacement(g: SiteGraph, dec: BackboneDecomposition, n):
    """First n top positions of the ordered backbone pivotals.

    Returns (tops, norms, shortfall): vertex ids starting at the origin,
    their extrinsic displacement |S_k| and a flag set when fewer than n
    pivotals exist.
    """
    tops = [g.origin] + [top for _, top in dec.pivotals[:n]]
    shortfall = len(dec.pivotals) < n
    ids = np.array(tops, dtype=np.int64)
    return ids, _norms_from(g, g.origin)[ids], shortfall


def export_decomposition(path, g: SiteGraph, dec: BackboneDecomposition):
    """Edge list with per-edge backbone / pivotal(i) / sausage(i) tags."""
    piv_index = {(min(u, v), max(u, v)): i for i, (u, v) in enumerate(dec.pivotals)}
    sausage_of = {}
    for i, members in enumerate(dec.sausages):
        for v in members.tolist():
            sausage_of[v] = i
    bb = set(dec.backbone_edges)
    with open(path, "w") as fh:
        fh.write("# columns: u v tags\n")
        for u, v in g.edge_array().tolist():
            key = (min(u, v), max(u, v))
            tags = []
            if key in bb:
                tags.append("backbone")
            if key in piv_index:
                tags.append(f"pivotal({piv_index[key]})")
            su, sv = sausage_of.get(u), sausage_of.get(v)
            if su is not None and su == sv:
                tags.append(f"sausage({su})")
            fh.write(f"{u}\t{v}\t{','.join(tags)}\n")
