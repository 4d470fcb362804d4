"""Counting identities and structural queries over Ramsey graphs.

The central identity: summing e(F_v^-) - e(F_v^+) - d(v)(n-2d(v))/2 over all
vertices of any simple graph gives zero.  Contributions are handled as
doubled integers so the half terms stay exact, surfacing as Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from fractions import Fraction
from itertools import combinations

from .catalog import Catalog
from .graph6 import graph6_decode
from .graphs import Graph, RamseyType, _bits, contains_induced
from .workpool import map_units, make_units

#: Established small Ramsey numbers usable for degree windows and pruning.
KNOWN_RAMSEY = {
    (3, 3): 6,
    (3, 4): 9,
    (3, 5): 14,
    (3, 6): 18,
    (3, 7): 23,
    (3, 8): 28,
    (3, 9): 36,
    (4, 4): 18,
    (4, 5): 25,
}


def known_ramsey(s, t, table=None):
    """R(s,t) from the table (symmetric lookup), or None; R(2,k)=k built in."""
    if s == 2:
        return t
    if t == 2:
        return s
    table = KNOWN_RAMSEY if table is None else table
    return table.get((s, t), table.get((t, s)))


@dataclass(frozen=True)
class DegreeBounds:
    lo: int
    hi: int


def degree_bounds(rt: RamseyType, m: int, table=None) -> DegreeBounds:
    """Inclusive vertex-degree window forced on every graph in R(s,t,m).

    A vertex v splits the rest into its neighborhood (an (s-1,t) graph, so
    under R(s-1,t) vertices) and its non-neighborhood (under R(s,t-1)).
    """
    r_down_t = known_ramsey(rt.s, rt.t - 1, table)
    r_s_down = known_ramsey(rt.s - 1, rt.t, table)
    if r_down_t is None:
        raise ValueError(f"no table entry for R({rt.s},{rt.t - 1})")
    if r_s_down is None:
        raise ValueError(f"no table entry for R({rt.s - 1},{rt.t})")
    return DegreeBounds(lo=max(0, m - r_down_t), hi=min(m - 1, r_s_down - 1))


# -- the excess identity -----------------------------------------------------


@dataclass(frozen=True)
class ExcessReport:
    """Per-vertex rows (v, d, e_minus, e_plus, contribution) and their sum."""

    total: int
    per_vertex: tuple


def _split_edge_counts_x2(adj, full, n, v):
    """(2*e in non-neighborhood, 2*e in neighborhood, degree) at vertex v."""
    nb = adj[v]
    rest = full & ~nb & ~(1 << v)
    ep2 = 0
    m = nb
    while m:
        b = m & -m
        m ^= b
        ep2 += (adj[b.bit_length() - 1] & nb).bit_count()
    em2 = 0
    m = rest
    while m:
        b = m & -m
        m ^= b
        em2 += (adj[b.bit_length() - 1] & rest).bit_count()
    return em2, ep2, nb.bit_count()


def excess(g: Graph) -> ExcessReport:
    """Evaluate the identity; total is always 0 for simple graphs."""
    n = g.n
    full = g.vertex_mask()
    adj = g.adj
    rows = []
    total_x2 = 0
    for v in range(n):
        em2, ep2, d = _split_edge_counts_x2(adj, full, n, v)
        c_x2 = em2 - ep2 - d * (n - 2 * d)
        total_x2 += c_x2
        rows.append((v, d, em2 // 2, ep2 // 2, Fraction(c_x2, 2)))
    if total_x2 % 2:
        raise AssertionError("doubled excess total must be even")
    return ExcessReport(total=total_x2 // 2, per_vertex=tuple(rows))


def excess_total(g: Graph) -> int:
    """The identity's total alone, skipping the per-vertex report.

    Same arithmetic as excess(); cheap enough to sweep large catalogs.
    """
    n = g.n
    full = g.vertex_mask()
    adj = g.adj
    total_x2 = 0
    for v in range(n):
        em2, ep2, d = _split_edge_counts_x2(adj, full, n, v)
        total_x2 += em2 - ep2 - d * (n - 2 * d)
    if total_x2 % 2:
        raise AssertionError("doubled excess total must be even")
    return total_x2 // 2


def check_reference_offsets(n, offsets):
    """Validate reference constants: co - ref - d(n-2d)/2 must equal 1.

    offsets maps degree -> (co_edge_ref, edge_ref).  The degree-d term
    d(n-2d)/2 can be half-integral, so the check runs doubled.
    """
    for d, (co, ref) in offsets.items():
        if 2 * (co - ref) - d * (n - 2 * d) != 2:
            raise ValueError(
                f"inconsistent reference constants for degree {d}: "
                f"co={co}, ref={ref} fail co - ref - d(n-2d)/2 = 1"
            )


def excess_contributions(g: Graph, offsets) -> list:
    """Per-vertex (e(F_v^-) - co) + (ref - e(F_v^+)) + 1 with degree-keyed offsets.

    Requires an offsets entry for every degree present, each satisfying the
    consistency equation; the returned values then sum to excess(g).total.
    """
    n = g.n
    full = g.vertex_mask()
    adj = g.adj
    degs = set(g.degrees())
    missing = degs - set(offsets)
    if missing:
        raise ValueError(f"offsets missing degrees {sorted(missing)}")
    check_reference_offsets(n, {d: offsets[d] for d in degs})
    out = []
    for v in range(n):
        em2, ep2, d = _split_edge_counts_x2(adj, full, n, v)
        co, ref = offsets[d]
        out.append((em2 // 2 - co) + (ref - ep2 // 2) + 1)
    if sum(out) != excess(g).total:
        raise AssertionError("normalized contributions drifted from the identity")
    return out


# -- clique neighborhood bookkeeping ------------------------------------------


@dataclass(frozen=True)
class CliqueNeighborReport:
    clique: tuple
    mode: str
    sets: tuple  # bitset per clique vertex
    intersections: dict  # sorted index tuple -> size, all nonempty subsets
    histogram: tuple  # N_k: universe vertices in exactly k of the sets
    union_size: int


def _as_mask(vertices):
    if isinstance(vertices, int):
        return vertices
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def clique_neighbor_partition(g: Graph, clique, universe, mode="neighbors") -> CliqueNeighborReport:
    """Intersection sizes and coverage histogram of per-clique-vertex sets.

    A_i collects the universe vertices adjacent (mode="neighbors") or
    non-adjacent (mode="non-neighbors") to the i-th clique vertex.
    """
    clique = tuple(clique)
    if mode not in ("neighbors", "non-neighbors"):
        raise ValueError(f"unknown mode {mode!r}")
    for u, v in combinations(clique, 2):
        if not g.has_edge(u, v):
            raise ValueError(f"vertices {u} and {v} are not adjacent; not a clique")
    uni = _as_mask(universe)
    if uni & _as_mask(clique):
        raise ValueError("universe overlaps the clique")
    if uni & ~g.vertex_mask():
        raise ValueError("universe has bits outside the graph")
    if mode == "neighbors":
        sets = tuple(g.adj[w] & uni for w in clique)
    else:
        sets = tuple(uni & ~g.adj[w] for w in clique)
    k = len(clique)
    inter = {}
    for r in range(1, k + 1):
        for idx in combinations(range(k), r):
            m = uni
            for i in idx:
                m &= sets[i]
            inter[idx] = m.bit_count()
    hist = [0] * (k + 1)
    for v in _bits(uni):
        hist[sum(1 for s in sets if s >> v & 1)] += 1
    union = 0
    for s in sets:
        union |= s
    return CliqueNeighborReport(
        clique=clique,
        mode=mode,
        sets=sets,
        intersections=inter,
        histogram=tuple(hist),
        union_size=union.bit_count(),
    )


def find_clique_with_degree_bound(g: Graph, k, degree_sum_max):
    """Some k-clique whose degree sum in g is at most the bound, else None.

    Exhaustive: vertices are scanned in ascending degree order and partial
    sums are cut off against the smallest degrees still available.
    """
    if k <= 0:
        return () if degree_sum_max >= 0 else None
    if k > g.n:
        return None
    deg = g.degrees()
    order = sorted(range(g.n), key=lambda v: (deg[v], v))
    adj = g.adj
    found = []

    def rec(start, cand_mask, chosen, dsum):
        if len(chosen) == k:
            found.append(tuple(sorted(chosen)))
            return True
        need = k - len(chosen)
        # candidates ahead, cheapest-first; cut on the optimistic sum
        ahead = [v for v in order[start:] if cand_mask >> v & 1]
        if len(ahead) < need:
            return False
        if dsum + sum(deg[v] for v in ahead[:need]) > degree_sum_max:
            return False
        for pos, v in enumerate(ahead):
            if rec(
                order.index(v) + 1,
                cand_mask & adj[v],
                chosen + [v],
                dsum + deg[v],
            ):
                return True
        return False

    if rec(0, g.vertex_mask(), [], 0):
        return found[0]
    return None


# -- catalog filtering ---------------------------------------------------------


@dataclass(frozen=True)
class FilterSpec:
    """Predicate bundle for catalog sweeps; None fields are inactive."""

    min_degree: int | None = None
    max_degree: int | None = None
    e_min: int | None = None
    e_max: int | None = None
    contains: Graph | None = None
    lacks: Graph | None = None
    nonadjacent_pair_degree_max: int | None = None

    def describe(self):
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            out[f.name] = repr(v) if isinstance(v, Graph) else v
        return out


def _passes_filter(g: Graph, fs: FilterSpec) -> bool:
    degs = g.degrees()
    if fs.min_degree is not None and (g.n == 0 or min(degs) < fs.min_degree):
        return False
    if fs.max_degree is not None and g.n and max(degs) > fs.max_degree:
        return False
    e = g.edge_count()
    if fs.e_min is not None and e < fs.e_min:
        return False
    if fs.e_max is not None and e > fs.e_max:
        return False
    if fs.nonadjacent_pair_degree_max is not None:
        low = 0
        for v in range(g.n):
            if degs[v] <= fs.nonadjacent_pair_degree_max:
                low |= 1 << v
        ok = False
        for v in _bits(low):
            if low & ~g.adj[v] & ~(1 << v):
                ok = True
                break
        if not ok:
            return False
    if fs.contains is not None and not contains_induced(g, fs.contains):
        return False
    if fs.lacks is not None and contains_induced(g, fs.lacks):
        return False
    return True


def _filter_unit(args):
    keys, fs = args
    return [k for k in keys if _passes_filter(graph6_decode(k), fs)]


def catalog_filter(cat: Catalog, fs: FilterSpec, workers=1) -> Catalog:
    """Subset catalog of the members satisfying every active predicate."""
    out = Catalog(
        cat.spec,
        provenance={
            "generator": "catalog_filter",
            "filter": fs.describe(),
            "source": cat.provenance,
        },
    )
    units = make_units(sorted(cat.members))
    for kept in map_units(_filter_unit, [(u, fs) for u in units], workers):
        for key in kept:
            out.insert_key(key)
    return out
