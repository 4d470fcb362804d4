"""Small undirected graphs as int bitsets.

Vertices are 0..n-1 and every vertex set, including adjacency rows, is an
int with bit i standing for vertex i.  Everything here assumes n <= 64 and
no self-loops; adjacency is symmetric by construction.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class RamseyType:
    """Parameters (s, t) of the Ramsey property: no K_s, no independent t-set."""

    s: int
    t: int

    def __post_init__(self):
        if self.s < 2 or self.t < 2:
            raise ValueError(f"RamseyType needs s, t >= 2, got ({self.s}, {self.t})")

    def dual(self) -> "RamseyType":
        return RamseyType(self.t, self.s)


def _bits(mask):
    """Yield set bit positions of mask, ascending."""
    while mask:
        b = mask & -mask
        yield b.bit_length() - 1
        mask ^= b


class Graph:
    """Immutable undirected graph on vertices 0..n-1, adjacency as bitset rows."""

    __slots__ = ("n", "adj", "_hash")

    def __init__(self, n, adj):
        if n < 0 or n > 64:
            raise ValueError(f"graph order must be in 0..64, got {n}")
        adj = tuple(adj)
        if len(adj) != n:
            raise ValueError("adjacency row count does not match n")
        full = (1 << n) - 1
        for v, row in enumerate(adj):
            if row & ~full:
                raise ValueError(f"adjacency row {v} has bits outside 0..{n - 1}")
            if row >> v & 1:
                raise ValueError(f"self-loop at vertex {v}")
        for v, row in enumerate(adj):
            for u in _bits(row):
                if not adj[u] >> v & 1:
                    raise ValueError(f"asymmetric adjacency between {u} and {v}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "adj", adj)
        object.__setattr__(self, "_hash", hash((n, adj)))

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    def __reduce__(self):
        return (Graph, (self.n, self.adj))

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Graph(n={self.n}, edges={sorted(self.edges())})"

    # -- basic queries ----------------------------------------------------

    def has_edge(self, u, v):
        return bool(self.adj[u] >> v & 1)

    def degree(self, v):
        return self.adj[v].bit_count()

    def degrees(self):
        return tuple(row.bit_count() for row in self.adj)

    def edge_count(self):
        return sum(row.bit_count() for row in self.adj) // 2

    def edges(self):
        out = []
        for v in range(self.n):
            for u in _bits(self.adj[v] >> (v + 1) << (v + 1)):
                out.append((v, u))
        return out

    def vertex_mask(self):
        return (1 << self.n) - 1

    # -- derived graphs ---------------------------------------------------

    def complement(self):
        full = (1 << self.n) - 1
        return Graph(self.n, tuple((full & ~row) & ~(1 << v) for v, row in enumerate(self.adj)))

    def induced(self, mask):
        """Subgraph on the vertices of mask, relabeled ascending to 0..k-1."""
        verts = list(_bits(mask))
        pos = {v: i for i, v in enumerate(verts)}
        rows = []
        for v in verts:
            row = 0
            for u in _bits(self.adj[v] & mask):
                row |= 1 << pos[u]
            rows.append(row)
        return Graph(len(verts), rows)

    def relabel(self, perm):
        """New graph where input vertex v becomes perm[v]."""
        if sorted(perm) != list(range(self.n)):
            raise ValueError("perm is not a permutation of 0..n-1")
        rows = [0] * self.n
        for v, row in enumerate(self.adj):
            new_row = 0
            for u in _bits(row):
                new_row |= 1 << perm[u]
            rows[perm[v]] = new_row
        return Graph(self.n, rows)

    def add_vertex(self, neighbors_mask):
        """Graph on n+1 vertices; the new vertex n is joined to neighbors_mask."""
        if neighbors_mask & ~self.vertex_mask():
            raise ValueError("neighbor mask has bits outside the graph")
        bit = 1 << self.n
        rows = [row | bit if neighbors_mask >> v & 1 else row for v, row in enumerate(self.adj)]
        rows.append(neighbors_mask)
        return Graph(self.n + 1, rows)


# -- constructors ----------------------------------------------------------


def empty_graph(n):
    return Graph(n, (0,) * n)


def complete_graph(n):
    full = (1 << n) - 1
    return Graph(n, tuple(full & ~(1 << v) for v in range(n)))


def cycle_graph(n):
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n):
    return from_edges(n, [(i, i + 1) for i in range(n - 1)])


def from_edges(n, edges):
    rows = [0] * n
    for u, v in edges:
        if u == v:
            raise ValueError(f"self-loop at {u}")
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return Graph(n, rows)


# -- clique / independence ----------------------------------------------------


def _has_clique_in(adj, cand, k):
    """Exact: does the subgraph induced on candidate set cand hold a k-clique.

    k >= 2 on entry.  Greedy coloring of cand gives an upper bound on its
    clique number; fewer than k color classes rules the clique out.
    """
    if cand.bit_count() < k:
        return False
    if k >= 4:
        m = cand
        colors = 0
        while m and colors < k:
            colors += 1
            avail = m
            while avail:
                b = avail & -avail
                m ^= b
                avail &= ~(adj[b.bit_length() - 1] | b)
        if colors < k:
            return False
    while cand:
        b = cand & -cand
        cand ^= b
        if k == 2:
            if adj[b.bit_length() - 1] & cand:
                return True
        elif _has_clique_in(adj, adj[b.bit_length() - 1] & cand, k - 1):
            return True
        if cand.bit_count() < k - 1:
            return False
    return False


def has_clique(g, k):
    """True iff g contains a complete subgraph on k vertices (k == 0 is always true)."""
    if k <= 0:
        return True
    if k == 1:
        return g.n >= 1
    if k > g.n:
        return False
    return _has_clique_in(g.adj, g.vertex_mask(), k)


def has_independent_set(g, k):
    """True iff g contains k pairwise non-adjacent vertices."""
    if k <= 0:
        return True
    if k == 1:
        return g.n >= 1
    if k > g.n:
        return False
    return _has_clique_in(g.complement().adj, g.vertex_mask(), k)


def is_ramsey(g, rt):
    """True iff g has no K_s and no independent set of size t."""
    return not has_clique(g, rt.s) and not has_independent_set(g, rt.t)


# -- vertex split -----------------------------------------------------------


@dataclass(frozen=True)
class VertexSplit:
    """Neighborhood / non-neighborhood decomposition at a vertex.

    plus is the subgraph induced on N(v), minus the one induced on the
    non-neighbors other than v itself.  The vertex tuples record which
    original vertices the relabeled subgraph vertices came from, ascending.
    """

    vertex: int
    plus: Graph
    minus: Graph
    plus_vertices: tuple
    minus_vertices: tuple


def vertex_split(g, v):
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} out of range")
    nb = g.adj[v]
    rest = g.vertex_mask() & ~nb & ~(1 << v)
    return VertexSplit(
        vertex=v,
        plus=g.induced(nb),
        minus=g.induced(rest),
        plus_vertices=tuple(_bits(nb)),
        minus_vertices=tuple(_bits(rest)),
    )


# -- induced subgraph search --------------------------------------------------


def contains_induced(g, h):
    """True iff some vertex subset of g induces a graph isomorphic to h."""
    if h.n == 0:
        return True
    if h.n > g.n:
        return False
    hd = h.degrees()
    gd = g.degrees()
    order = sorted(range(h.n), key=lambda u: (-hd[u], u))
    gmask = g.vertex_mask()
    # initial candidates: degree of the image can only be larger in g
    init = []
    for u in order:
        cand = 0
        for x in range(g.n):
            if gd[x] >= hd[u]:
                cand |= 1 << x
        if not cand:
            return False
        init.append(cand)
    gadj = g.adj
    hadj = h.adj

    def rec(depth, cands, used):
        if depth == len(order):
            return True
        u = order[depth]
        for x in _bits(cands[depth] & ~used):
            xbit = 1 << x
            nxt = list(cands)
            ok = True
            for later in range(depth + 1, len(order)):
                w = order[later]
                if hadj[u] >> w & 1:
                    nxt[later] &= gadj[x]
                else:
                    nxt[later] &= gmask & ~gadj[x] & ~xbit
                if not nxt[later] & ~(used | xbit):
                    ok = False
                    break
            if ok and rec(depth + 1, nxt, used | xbit):
                return True
        return False

    return rec(0, init, 0)
