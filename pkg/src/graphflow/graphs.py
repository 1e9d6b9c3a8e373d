"""Weighted-graph neighbor oracles, metric balls, regions and cutoffs.

Infinite graphs are represented by a neighbor oracle ``x -> [(y, w), ...]``
and are never materialized globally; only combinatorial balls are turned
into concrete :class:`Region` objects.  Vertex ids are hashable values with
a per-generator total order (integer coordinate tuples for lattices and
products, file insertion order for custom graphs), which fixes every
summation order and makes runs bitwise reproducible.

Degrees are always computed from the full oracle, so boundary vertices of
a truncated region carry the same weighted degree ``d_w(x)`` as in the
infinite graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np


class UnknownVertexError(ValueError):
    """Raised when a vertex id is not valid for the generator."""


class GraphError(ValueError):
    """Raised for malformed graph descriptions (asymmetry, self loops, ...)."""


class GraphGenerator:
    """Lazily enumerable weighted graph given by a neighbor oracle.

    Parameters
    ----------
    neighbor_fn : callable
        Maps a vertex id to a list of ``(neighbor, weight)`` pairs in a
        deterministic order.  Weights must be strictly positive and
        symmetric; the oracle must raise :class:`UnknownVertexError` for
        ids outside the vertex set.
    name : str
        Descriptive name, used in reports.
    dimension : int, optional
        Lattice dimension when meaningful (number of unbounded directions).
    sort_key : callable, optional
        Total order on vertex ids; defaults to the identity (works for
        coordinate tuples).
    """

    def __init__(self, neighbor_fn, name, dimension=None, sort_key=None):
        self._neighbor_fn = neighbor_fn
        self.name = name
        self.dimension = dimension
        self._sort_key = sort_key if sort_key is not None else lambda v: v

    def neighbors(self, x):
        """Neighbor list ``[(y, w), ...]`` of ``x`` with positive weights."""
        return self._neighbor_fn(x)

    def degree(self, x):
        """Weighted degree ``d_w(x)``, the sum of incident edge weights."""
        d = 0.0
        for _, w in self._neighbor_fn(x):
            d += w
        if d <= 0.0:
            raise GraphError(f"vertex {x!r} has nonpositive degree {d}")
        return d

    def sort_key(self, x):
        return self._sort_key(x)

    def __repr__(self):
        return f"GraphGenerator({self.name!r})"


@dataclass
class Region:
    """Finite materialized vertex set with oracle degrees cached.

    ``vertices`` are in canonical order; ``distances`` holds combinatorial
    distances from ``center`` when the region is a ball, else ``None``.
    """

    generator: GraphGenerator
    vertices: tuple
    degrees: np.ndarray
    center: object = None
    radius: int | None = None
    distances: np.ndarray | None = None
    index: dict = field(default=None, repr=False)

    def __post_init__(self):
        if self.index is None:
            self.index = {v: i for i, v in enumerate(self.vertices)}

    @property
    def measure(self):
        """Weighted measure ``mu_w`` = sum of degrees over the region."""
        return float(self.degrees.sum())

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, x):
        return x in self.index


def region_from_vertices(g, vertices):
    """Region over an explicit vertex collection, canonically ordered."""
    verts = tuple(sorted(set(vertices), key=g.sort_key))
    if not verts:
        raise ValueError("empty vertex set")
    degs = np.array([g.degree(v) for v in verts])
    return Region(g, verts, degs)


def ball(g, x0, R):
    """Combinatorial ball ``B_R(x0)`` as a :class:`Region`.

    BFS from ``x0`` truncated at radius ``R``; degrees are taken from the
    full oracle, not the truncation.
    """
    if R < 0 or int(R) != R:
        raise ValueError(f"radius must be a nonnegative integer, got {R}")
    dist = _bfs(g, x0, int(R))
    verts = sorted(dist, key=g.sort_key)
    degs = np.array([g.degree(v) for v in verts])
    dists = np.array([dist[v] for v in verts], dtype=np.int64)
    return Region(g, tuple(verts), degs, center=x0, radius=int(R), distances=dists)


def _bfs(g, x0, r_max):
    # truncated breadth-first search; returns {vertex: distance}
    g.degree(x0)  # validates the id
    dist = {x0: 0}
    frontier = deque([x0])
    while frontier:
        x = frontier.popleft()
        d = dist[x]
        if d == r_max:
            continue
        for y, _ in g.neighbors(x):
            if y not in dist:
                dist[y] = d + 1
                frontier.append(y)
    return dist


def distance(g, x, y, r_max):
    """Combinatorial distance from ``x`` to ``y``, or ``None`` beyond ``r_max``.

    ``None`` (unreachable within ``r_max``) is a regular outcome, not an
    error; BFS never explores past the cap.
    """
    if r_max < 0:
        raise ValueError("r_max must be >= 0")
    g.degree(y)  # validates the target id
    if x == y:
        return 0
    dist = {x: 0}
    frontier = deque([x])
    g.degree(x)
    while frontier:
        z = frontier.popleft()
        d = dist[z]
        if d == r_max:
            continue
        for u, _ in g.neighbors(z):
            if u not in dist:
                if u == y:
                    return d + 1
                dist[u] = d + 1
                frontier.append(u)
    return None


def distances_within(g, region, x0):
    """Graph distances from ``x0`` to every vertex of ``region``.

    Distances are measured in the full graph (paths may leave the region).
    ``x0`` must itself belong to the region.
    """
    if x0 not in region:
        raise ValueError(f"{x0!r} is not in the region")
    if region.center is not None and x0 == region.center and region.distances is not None:
        return region.distances
    # the region lies inside B_{radius}(center); any region vertex is within
    # radius + d(x0, center) of x0
    cap = 2 * (region.radius if region.radius is not None else len(region))
    dist = _bfs(g, x0, cap)
    missing = [v for v in region.vertices if v not in dist]
    if missing:
        raise GraphError(f"could not reach {len(missing)} region vertices from {x0!r}")
    return np.array([dist[v] for v in region.vertices], dtype=np.int64)


def ball_measure_profile(g, x0, R_max):
    """Cumulative measures ``mu_w(B_r(x0))`` for ``r = 0..R_max``."""
    dist = _bfs(g, x0, int(R_max))
    per_radius = np.zeros(int(R_max) + 1)
    for v, d in dist.items():
        per_radius[d] += g.degree(v)
    return np.cumsum(per_radius)


@dataclass
class RegionEdges:
    """Edge arrays of a region: internal pairs (i < j) and outgoing stubs."""

    ei: np.ndarray        # internal edge tail indices
    ej: np.ndarray        # internal edge head indices, ej > ei
    w: np.ndarray         # internal edge weights
    bi: np.ndarray        # region-side indices of edges leaving the region
    bw: np.ndarray        # their weights


def region_edges(g, region):
    """Materialize the edge structure of a region against the full oracle."""
    ei, ej, w, bi, bw = [], [], [], [], []
    for i, x in enumerate(region.vertices):
        for y, wt in g.neighbors(x):
            j = region.index.get(y)
            if j is None:
                bi.append(i)
                bw.append(wt)
            elif j > i:
                ei.append(i)
                ej.append(j)
                w.append(wt)
    return RegionEdges(
        np.array(ei, dtype=np.int64), np.array(ej, dtype=np.int64),
        np.array(w, dtype=np.float64),
        np.array(bi, dtype=np.int64), np.array(bw, dtype=np.float64))


@dataclass
class Cutoff:
    """Radial cutoff: 1 on ``B_{R1}``, 0 outside ``B_{R2}``, linear between.

    Satisfies the edge-Lipschitz bound ``|z(y) - z(x)| <= 1/(R2 - R1)``
    for every edge ``x ~ y``.
    """

    generator: GraphGenerator
    center: object
    R1: int
    R2: int
    _dist: dict = field(default=None, repr=False)

    def __post_init__(self):
        if self.R1 < 0:
            raise ValueError("R1 must be >= 0")
        if self.R2 <= self.R1:
            raise ValueError(f"need R2 >= R1 + 1, got R1={self.R1}, R2={self.R2}")
        if self._dist is None:
            self._dist = _bfs(self.generator, self.center, self.R2)

    def value(self, x):
        d = self._dist.get(x)
        if d is None:
            return 0.0
        if d <= self.R1:
            return 1.0
        return (self.R2 - d) / (self.R2 - self.R1)


def cutoff_value(c: Cutoff, x):
    """Evaluate the piecewise-linear-in-distance cutoff at ``x``."""
    return c.value(x)


# ----------------------------------------------------------------------
# graph families


def lattice_generator(N):
    """Standard integer lattice in ``N`` dimensions with unit edge weights."""
    if N < 1 or int(N) != N:
        raise ValueError(f"lattice dimension must be a positive integer, got {N}")
    N = int(N)

    def nbrs(x):
        if not (isinstance(x, tuple) and len(x) == N
                and all(isinstance(c, int) for c in x)):
            raise UnknownVertexError(f"not a {N}-tuple of ints: {x!r}")
        out = []
        for k in range(N):
            for s in (-1, 1):
                y = x[:k] + (x[k] + s,) + x[k + 1:]
                out.append((y, 1.0))
        out.sort(key=lambda e: e[0])
        return out

    return GraphGenerator(nbrs, name=f"Z^{N}", dimension=N)


class FiniteGraph:
    """Small finite weighted graph (adjacency kept in insertion order)."""

    def __init__(self, edges, name="finite"):
        self.name = name
        self.nodes = []
        self._node_pos = {}
        self.adj = {}
        for u, v, w in edges:
            w = float(w)
            if u == v:
                raise GraphError(f"self loop at {u!r}")
            if w <= 0:
                raise GraphError(f"nonpositive weight {w} on edge {u!r}-{v!r}")
            for z in (u, v):
                if z not in self._node_pos:
                    self._node_pos[z] = len(self.nodes)
                    self.nodes.append(z)
                    self.adj[z] = []
            if any(y == v for y, _ in self.adj[u]):
                raise GraphError(f"duplicate edge {u!r}-{v!r}")
            self.adj[u].append((v, w))
            self.adj[v].append((u, w))
        if not self.nodes:
            raise GraphError("graph has no edges")

    def node_position(self, u):
        return self._node_pos[u]

    def is_connected(self):
        seen = {self.nodes[0]}
        frontier = deque([self.nodes[0]])
        while frontier:
            u = frontier.popleft()
            for v, _ in self.adj[u]:
                if v not in seen:
                    seen.add(v)
                    frontier.append(v)
        return len(seen) == len(self.nodes)


def complete_graph(k, name=None):
    """Unit-weight complete graph on ``k`` vertices labeled ``0..k-1``."""
    if k < 2:
        raise ValueError("need at least 2 vertices")
    edges = [(i, j, 1.0) for i in range(k) for j in range(i + 1, k)]
    return FiniteGraph(edges, name=name or f"K_{k}")


def product_generator(H: FiniteGraph, N):
    """Product of a finite connected graph with the ``N``-dim unit lattice.

    Vertices are tuples ``(h, x_1, ..., x_N)`` where ``h`` indexes the
    finite factor in insertion order; two vertices are adjacent iff they
    differ in exactly one factor by one edge of that factor.
    """
    if not isinstance(H, FiniteGraph):
        raise TypeError("H must be a FiniteGraph")
    if not H.is_connected():
        raise GraphError("finite factor must be connected")
    if N < 1 or int(N) != N:
        raise ValueError(f"lattice dimension must be a positive integer, got {N}")
    N = int(N)
    nH = len(H.nodes)
    # adjacency of the finite factor by node position
    adj_idx = [
        sorted((H.node_position(v), w) for v, w in H.adj[u])
        for u in H.nodes
    ]

    def nbrs(x):
        if not (isinstance(x, tuple) and len(x) == N + 1
                and all(isinstance(c, int) for c in x)
                and 0 <= x[0] < nH):
            raise UnknownVertexError(f"not a valid product vertex: {x!r}")
        out = [((j,) + x[1:], w) for j, w in adj_idx[x[0]]]
        for k in range(1, N + 1):
            for s in (-1, 1):
                y = x[:k] + (x[k] + s,) + x[k + 1:]
                out.append((y, 1.0))
        out.sort(key=lambda e: e[0])
        return out

    return GraphGenerator(nbrs, name=f"{H.name} x Z^{N}", dimension=N)


def generator_from_edges(edges, name="custom"):
    """Finite oracle graph from a ``(u, v, w)`` edge list with string ids.

    The canonical vertex order is file/insertion order.  Connectivity is
    only checked here, on the materialized graph; oracle-defined graphs in
    general admit only probe-wise connectivity checks.
    """
    G = FiniteGraph(edges, name=name)
    if not G.is_connected():
        raise GraphError("custom graph is not connected")

    def nbrs(x):
        if x not in G.adj:
            raise UnknownVertexError(f"unknown vertex id {x!r}")
        return list(G.adj[x])

    return GraphGenerator(nbrs, name=name, dimension=None,
                          sort_key=G.node_position)


def generator_from_file(path, name=None):
    """Load a custom graph from a text file, one edge per line: ``x y weight``."""
    edges = []
    with open(path) as f:
        for ln, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise GraphError(f"{path}:{ln}: expected 'x y weight', got {line!r}")
            u, v, w = parts[0], parts[1], float(parts[2])
            edges.append((u, v, w))
    return generator_from_edges(edges, name=name or str(path))
