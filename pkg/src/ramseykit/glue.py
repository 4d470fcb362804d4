"""Gluing pointed graphs into larger clique/independence-bounded graphs.

A graph F with adjacent vertices a and b decomposes into the two open
neighborhoods G = F[N(b)] (which contains a) and H = F[N(a)] (which
contains b), overlapping in K = N(a) & N(b), plus a remainder C seen by
neither a nor b.  Reversing this: pick pointed graphs (G, a) and (H, b),
identify their point neighborhoods via an isomorphism, add C slots, and
every pair not determined by G or H becomes a boolean unknown.  The SAT
layer enumerates completions; seed rules fix a few pairs up front to cut
symmetry, justified by degree bounds and small Ramsey numbers.
"""

from dataclasses import dataclass, field

from .graphs import Graph, RamseyType, has_clique
from .graph6 import graph6_decode
from .canon import (
    canonical_key,
    canonical_key_raw,
    isomorphisms,
    automorphism_count,
)
from .analysis import degree_bounds, known_ramsey
from . import sat as satmod
from .workpool import make_units, map_units

__all__ = [
    "PointedGraph",
    "GlueProblem",
    "SeedRule",
    "GlueSolutions",
    "CampaignConfig",
    "CampaignReport",
    "pointed_graphs",
    "build_glue_problem",
    "glue_problem_variants",
    "default_seed_rules",
    "seed_c1",
    "solve_glue",
    "schedule_pairs",
    "run_campaign",
]


def _bits(mask):
    while mask:
        b = mask & -mask
        yield b.bit_length() - 1
        mask ^= b


@dataclass(frozen=True)
class PointedGraph:
    """A graph with a distinguished vertex and its neighborhood subgraph.

    k is the induced subgraph on the neighbors of a; k_map[i] is the
    vertex of g realizing k's vertex i (ascending).  difficulty is the
    rank in the hardest-first order over all points of g (0 = hardest).
    """

    g: Graph
    a: int
    k: Graph
    k_map: tuple
    difficulty: int


@dataclass(frozen=True)
class GlueProblem:
    """A partially fixed graph plus the ordered list of undecided pairs.

    Slot layout: 0 and 1 are the two anchors, then the shared
    neighborhood K, then the anchors' private sides A and B, then the
    expansion block C1.  rows holds the fixed adjacency; free_pairs the
    undecided pairs in encoding order.  c_total is the expansion size of
    the full target order (c1 grows toward it across phases).
    """

    rt: RamseyType
    n: int
    rows: tuple
    free_pairs: tuple
    k_mask: int
    a_side_mask: int
    b_side_mask: int
    c1_mask: int
    c_total: int
    meta: dict = field(default_factory=dict)

    @property
    def c1_size(self):
        return self.c1_mask.bit_count()

    @property
    def final_n(self):
        return self.n - self.c1_size + self.c_total

    def free_adjacency(self):
        free_adj = [0] * self.n
        for u, v in self.free_pairs:
            free_adj[u] |= 1 << v
            free_adj[v] |= 1 << u
        return free_adj

    def has_fixed_violation(self):
        """True when the fixed part alone already breaks a bound.

        Checks for an s-clique among fixed edges and a t-independent set
        among fixed non-edges (pairs that are neither edges nor free).
        Such problems are legal inputs; they simply have no completion.
        """
        if has_clique(Graph(self.n, self.rows), self.rt.s):
            return True
        full = (1 << self.n) - 1
        free_adj = self.free_adjacency()
        co = tuple(
            full & ~self.rows[v] & ~free_adj[v] & ~(1 << v)
            for v in range(self.n)
        )
        return has_clique(Graph(self.n, co), self.rt.t)

    def with_seeds(self, edges=(), nonedges=(), rule=None):
        """Fix some currently free pairs; returns a new problem.

        A pair already fixed in the same state is a no-op; fixing a pair
        against its current state raises.  Seeded pairs leave free_pairs,
        the rest keep their order.
        """
        rows = list(self.rows)
        free = {}
        for i, (u, v) in enumerate(self.free_pairs):
            free[(u, v)] = i
            free[(v, u)] = i
        drop = set()
        for want_edge, pairs in ((True, edges), (False, nonedges)):
            for u, v in pairs:
                if u == v or not (0 <= u < self.n and 0 <= v < self.n):
                    raise ValueError(f"bad seed pair {(u, v)}")
                cur = bool(rows[u] >> v & 1)
                if (u, v) in free:
                    idx = free[(u, v)]
                    if idx in drop:
                        # pair seeded earlier in this call; must agree
                        if cur != want_edge:
                            raise ValueError(f"conflicting seeds for {(u, v)}")
                        continue
                    drop.add(idx)
                    if want_edge:
                        rows[u] |= 1 << v
                        rows[v] |= 1 << u
                    # a non-edge seed just fixes the pair by removing it
                    # from the free list
                elif cur != want_edge:
                    raise ValueError(f"seed contradicts fixed pair {(u, v)}")
        new_free = tuple(
            p for i, p in enumerate(self.free_pairs) if i not in drop
        )
        meta = dict(self.meta)
        seeds = list(meta.get("seeds", ()))
        if rule is not None and (edges or nonedges):
            seeds.append(
                {
                    "rule": rule,
                    "edges": [list(p) for p in edges],
                    "nonedges": [list(p) for p in nonedges],
                }
            )
        meta["seeds"] = seeds
        return GlueProblem(
            rt=self.rt,
            n=self.n,
            rows=tuple(rows),
            free_pairs=new_free,
            k_mask=self.k_mask,
            a_side_mask=self.a_side_mask,
            b_side_mask=self.b_side_mask,
            c1_mask=self.c1_mask,
            c_total=self.c_total,
            meta=meta,
        )


@dataclass(frozen=True)
class SeedRule:
    """One pair-fixing rule, identified by name with data parameters."""

    name: str
    params: dict = field(default_factory=dict)


@dataclass
class GlueSolutions:
    status: str  # "sat", "unsat" or "undecided"
    graphs: list  # canonical representatives, deduplicated, sorted
    assignment_count: int
    stats: dict


def pointed_graphs(g, k=1):
    """Pointed versions of g, hardest first, with the first k-1 dropped.

    Difficulty orders by largest neighborhood first, then fewest
    neighborhood edges, then largest neighborhood automorphism group;
    ties break on the pointed canonical form, then the vertex index.
    After dropping, pointed-isomorphic duplicates are removed (keeping
    the hardest representative).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    items = []
    full = g.vertex_mask()
    for a in range(g.n):
        nb = g.adj[a]
        k_map = tuple(_bits(nb))
        kg = g.induced(nb)
        pkey = canonical_key_raw(g.adj, g.n, [1 << a, full & ~(1 << a)])
        items.append(
            (
                -kg.n,
                kg.edge_count(),
                -automorphism_count(kg),
                pkey,
                a,
                kg,
                k_map,
            )
        )
    items.sort(key=lambda it: it[:5])
    out = []
    seen = set()
    for rank, it in enumerate(items):
        if rank < k - 1:
            continue
        pkey = it[3]
        if pkey in seen:
            continue
        seen.add(pkey)
        out.append(
            PointedGraph(
                g=g, a=it[4], k=it[5], k_map=it[6], difficulty=rank
            )
        )
    return out


def build_glue_problem(pg1, pg2, iso, target_n, rt, final_n=None):
    """Assemble the fixed graph and free-pair list for one gluing.

    iso maps vertices of pg1.k onto pg2.k and must be an isomorphism
    between them.  Slot layout: anchor of pg1 at 0, anchor of pg2 at 1,
    K at 2..2+k-1 (slot 2+j is pg1.k vertex j and pg2.k vertex iso[j]),
    then the private sides of pg1 and pg2, then target_n - base slots of
    expansion block C1.  Anchor 0 is adjacent to anchor 1, everything in
    K and all of pg2's side; anchor 1 symmetrically; neither touches C1.
    Free pairs: side x side, side(1) x C1, side(2) x C1, C1 internal,
    then K x C1, each block in lexicographic slot order.
    """
    G, a = pg1.g, pg1.a
    H, b = pg2.g, pg2.a
    k = pg1.k.n
    if pg2.k.n != k or len(iso) != k or sorted(iso) != list(range(k)):
        raise ValueError("iso must be a bijection between the two K graphs")
    for i in range(k):
        for j in range(i + 1, k):
            if pg1.k.has_edge(i, j) != pg2.k.has_edge(iso[i], iso[j]):
                raise ValueError("iso is not an isomorphism of the K graphs")
    base = G.n + H.n - k
    if final_n is None:
        final_n = target_n
    c1 = target_n - base
    c_total = final_n - base
    if c1 < 0:
        raise ValueError(f"target order {target_n} below base {base}")
    if c_total < c1:
        raise ValueError("final order below target order")
    if target_n > 62:
        raise ValueError("order above 62 unsupported")
    n = target_n

    k_start = 2
    a_start = k_start + k
    k_set1 = set(pg1.k_map)
    k_set2 = set(pg2.k_map)
    side_a = [v for v in range(G.n) if v != a and v not in k_set1]
    side_b = [v for v in range(H.n) if v != b and v not in k_set2]
    b_start = a_start + len(side_a)
    c_start = b_start + len(side_b)
    assert c_start == base

    gmap = {a: 0}
    for j in range(k):
        gmap[pg1.k_map[j]] = k_start + j
    for i, v in enumerate(side_a):
        gmap[v] = a_start + i
    hmap = {b: 1}
    for j in range(k):
        hmap[pg2.k_map[iso[j]]] = k_start + j
    for i, v in enumerate(side_b):
        hmap[v] = b_start + i

    rows = [0] * n

    def add(u, v):
        rows[u] |= 1 << v
        rows[v] |= 1 << u

    for u, v in G.edges():
        add(gmap[u], gmap[v])
    for u, v in H.edges():
        add(hmap[u], hmap[v])
    add(0, 1)
    for i in range(len(side_a)):
        add(1, a_start + i)
    for i in range(len(side_b)):
        add(0, b_start + i)

    a_slots = list(range(a_start, b_start))
    b_slots = list(range(b_start, c_start))
    c_slots = list(range(c_start, n))
    k_slots = list(range(k_start, a_start))
    free = []
    free.extend((u, v) for u in a_slots for v in b_slots)
    free.extend((u, v) for u in a_slots for v in c_slots)
    free.extend((u, v) for u in b_slots for v in c_slots)
    free.extend(
        (c_slots[i], c_slots[j])
        for i in range(len(c_slots))
        for j in range(i + 1, len(c_slots))
    )
    free.extend((u, v) for u in k_slots for v in c_slots)

    def mask(slots):
        m = 0
        for v in slots:
            m |= 1 << v
        return m

    meta = {"seeds": [], "notices": [], "branch_vertex": None}
    return GlueProblem(
        rt=rt,
        n=n,
        rows=tuple(rows),
        free_pairs=tuple(free),
        k_mask=mask(k_slots),
        a_side_mask=mask(a_slots),
        b_side_mask=mask(b_slots),
        c1_mask=mask(c_slots),
        c_total=c_total,
        meta=meta,
    )


def _problem_class_key(p):
    """Canonical key of the fixed graph with role blocks as colors."""
    cells = [
        c
        for c in (
            1,
            2,
            p.k_mask,
            p.a_side_mask,
            p.b_side_mask,
            p.c1_mask,
        )
        if c
    ]
    return canonical_key_raw(p.rows, p.n, cells)


def glue_problem_variants(pg1, pg2, target_n, rt, final_n=None):
    """One problem per genuinely distinct neighborhood identification.

    Different isomorphisms between the two K graphs can yield the same
    problem up to a role-preserving relabeling; those duplicates are
    removed by hashing the role-colored fixed graph.  Returns [] when
    the K graphs are not isomorphic.
    """
    out = []
    seen = set()
    for iso in isomorphisms(pg1.k, pg2.k):
        p = build_glue_problem(pg1, pg2, iso, target_n, rt, final_n=final_n)
        key = _problem_class_key(p)
        if key in seen:
            continue
        seen.add(key)
        out.append(p)
    return out


TWO_TRIANGLES_EDGES = ((0, 1), (0, 2), (1, 2), (0, 3), (1, 3))
TWO_TRIANGLES_NONEDGES = ((2, 3),)


def default_seed_rules(min_degree=None):
    """The standard rule stack, thresholds derived from the degree target.

    min_degree overrides the minimum-degree target D; by default it is
    derived from the degree window of the problem's full target order.
    Size-5 expansions have no default pair data (rule ships disabled and
    reports a notice) and can be supplied via a custom gadget rule.
    """
    return (
        SeedRule("degree-target", {"min_degree": min_degree}),
        SeedRule("attach-w", {"min_degree": min_degree}),
        SeedRule("edge-pair", {"min_degree": min_degree}),
        SeedRule("triangle", {"min_degree": min_degree}),
        SeedRule(
            "gadget",
            {
                "size": 4,
                "edges": TWO_TRIANGLES_EDGES,
                "nonedges": TWO_TRIANGLES_NONEDGES,
                "min_c": 13,
            },
        ),
        SeedRule(
            "gadget",
            {"size": 5, "edges": None, "nonedges": None, "min_c": 14},
        ),
    )


def _degree_target(p, params, table=None):
    d = params.get("min_degree")
    if d is not None:
        return d
    return degree_bounds(p.rt, p.final_n, table=table).lo


def seed_c1(problem, rules=None, table=None):
    """Apply seed rules to the expansion block; returns a new problem.

    Rules targeting a different expansion size are skipped silently; a
    rule that matches the size but cannot fire (no qualifying vertex,
    precondition on the full expansion size fails, missing data or
    degree bound) records a notice in meta["notices"] instead.  Seeds
    from distinct rules may repeat pairs but never contradict; a
    contradiction raises.
    """
    p = problem
    if rules is None:
        rules = default_seed_rules()
    c1_slots = sorted(_bits(p.c1_mask))
    c1 = len(c1_slots)
    k_slots = sorted(_bits(p.k_mask))
    base_mask = ~p.c1_mask
    kdeg = {v: (p.rows[v] & base_mask).bit_count() for v in k_slots}
    notices = []
    t = p.rt.t

    for rule in rules:
        name, params = rule.name, rule.params
        if name == "degree-target":
            if c1 < 1:
                continue
            if not k_slots:
                notices.append("degree-target: no shared-neighborhood vertices")
                continue
            try:
                target = _degree_target(p, params, table)
            except (KeyError, ValueError) as e:
                notices.append(f"degree-target: {e}")
                continue
            vstar = max(k_slots, key=lambda v: (kdeg[v], -v))
            meta = dict(p.meta)
            meta["branch_vertex"] = vstar
            p = GlueProblem(
                rt=p.rt, n=p.n, rows=p.rows, free_pairs=p.free_pairs,
                k_mask=p.k_mask, a_side_mask=p.a_side_mask,
                b_side_mask=p.b_side_mask, c1_mask=p.c1_mask,
                c_total=p.c_total, meta=meta,
            )
            want = min(c1, target - kdeg[vstar])
            if want >= 1:
                p = p.with_seeds(
                    edges=[(vstar, c1_slots[i]) for i in range(want)],
                    rule="degree-target",
                )
        elif name == "attach-w":
            if c1 != 1:
                continue
            try:
                target = _degree_target(p, params, table)
            except (KeyError, ValueError) as e:
                notices.append(f"attach-w: {e}")
                continue
            below = [v for v in k_slots if kdeg[v] < target]
            if not below:
                notices.append("attach-w: every shared vertex meets the degree target")
                continue
            w = max(below, key=lambda v: (kdeg[v], -v))
            p = p.with_seeds(edges=[(w, c1_slots[0])], rule="attach-w")
        elif name == "edge-pair":
            if c1 != 2:
                continue
            if p.c_total < t - 1:
                notices.append("edge-pair: expansion too small to force an edge")
                continue
            if not k_slots:
                notices.append("edge-pair: no shared-neighborhood vertices")
                continue
            try:
                target = _degree_target(p, params, table)
            except (KeyError, ValueError) as e:
                notices.append(f"edge-pair: {e}")
                continue
            vmin = min(k_slots, key=lambda v: (kdeg[v], v))
            k_min = kdeg[vmin]
            both_max = target - (t - 1)
            one_max = target - 2
            if k_min <= both_max:
                p = p.with_seeds(
                    edges=[
                        (c1_slots[0], c1_slots[1]),
                        (vmin, c1_slots[0]),
                        (vmin, c1_slots[1]),
                    ],
                    rule="edge-pair",
                )
            elif k_min <= one_max:
                p = p.with_seeds(
                    edges=[(c1_slots[0], c1_slots[1]), (vmin, c1_slots[0])],
                    rule="edge-pair",
                )
            else:
                notices.append("edge-pair: no shared vertex forces enough expansion edges")
        elif name == "triangle":
            if c1 != 3:
                continue
            need = known_ramsey(3, t - 1, table=table)
            if need is None:
                notices.append(f"triangle: no table entry for R(3,{t - 1})")
                continue
            if p.c_total < need:
                notices.append("triangle: expansion too small to force a triangle")
                continue
            edges = [
                (c1_slots[0], c1_slots[1]),
                (c1_slots[0], c1_slots[2]),
                (c1_slots[1], c1_slots[2]),
            ]
            if k_slots:
                try:
                    target = _degree_target(p, params, table)
                except (KeyError, ValueError):
                    target = None
                if target is not None:
                    vmin = min(k_slots, key=lambda v: (kdeg[v], v))
                    if kdeg[vmin] <= target - 7:
                        edges.append((vmin, c1_slots[0]))
            p = p.with_seeds(edges=edges, rule="triangle")
        elif name == "gadget":
            size = params.get("size")
            if c1 != size:
                continue
            if params.get("edges") is None:
                notices.append(
                    f"gadget: no pair data for expansion size {size}, left unseeded"
                )
                continue
            min_c = params.get("min_c", 0)
            if p.c_total < min_c:
                notices.append(
                    f"gadget: full expansion below {min_c}, premise unavailable"
                )
                continue
            edges = [
                (c1_slots[i], c1_slots[j]) for i, j in params["edges"]
            ]
            nonedges = [
                (c1_slots[i], c1_slots[j])
                for i, j in params.get("nonedges", ())
            ]
            p = p.with_seeds(edges=edges, nonedges=nonedges, rule="gadget")
        else:
            raise ValueError(f"unknown seed rule {name!r}")

    meta = dict(p.meta)
    meta["notices"] = list(meta.get("notices", ())) + notices
    return GlueProblem(
        rt=p.rt, n=p.n, rows=p.rows, free_pairs=p.free_pairs,
        k_mask=p.k_mask, a_side_mask=p.a_side_mask,
        b_side_mask=p.b_side_mask, c1_mask=p.c1_mask,
        c_total=p.c_total, meta=meta,
    )


def _branch_priority(p, cnf):
    v = p.meta.get("branch_vertex")
    if v is None:
        return None
    first = [
        i + 1
        for i, (x, y) in enumerate(cnf.decode)
        if x == v or y == v
    ]
    return first


def solve_glue(problem, mode="all", budget=None, symmetry=True):
    """Enumerate completions of a gluing problem via the SAT layer.

    Returns canonical, deduplicated solution graphs (empty in count
    mode) plus the raw satisfying-assignment count.  Branching follows
    the recorded branch vertex when a seed rule set one.  status is
    "undecided" when the decision budget ran out; solutions found before
    that are still reported.
    """
    cnf = satmod.encode(problem, symmetry=symmetry)
    pri = _branch_priority(problem, cnf)
    out = satmod.solve(cnf, mode=mode, budget=budget, priority=pri)
    graphs = []
    if mode != "count":
        seen = set()
        for m in out.models:
            g = satmod.from_model(cnf, m, problem)
            seen.add(canonical_key(g))
        graphs = [graph6_decode(key) for key in sorted(seen)]
    stats = dict(out.stats)
    stats["vars"] = cnf.var_count
    stats["clauses"] = len(cnf.clauses)
    return GlueSolutions(
        status=out.status,
        graphs=graphs,
        assignment_count=out.stats["models"],
        stats=stats,
    )


@dataclass(frozen=True)
class CampaignConfig:
    rt: RamseyType
    final_n: int
    c1_start: int = 1
    budget: int = None
    symmetry: bool = True
    rules: tuple = None  # None: default_seed_rules()
    workers: int = 1
    table: dict = None


@dataclass
class CampaignReport:
    phases: list  # one JSON-ready dict per phase
    solutions: list  # canonical graphs at the full target order
    undecided: list  # (pair index, variant index) never resolved
    status: str  # "complete" or "undecided"


def schedule_pairs(graphs, k=1):
    """All glueable pointed pairs from a list of graphs.

    Takes pointed graphs of every input graph (hardest-first, first k-1
    dropped, deduplicated), then forms all unordered pairs whose K
    graphs are isomorphic.  Swapping the two sides yields isomorphic
    completions, so ordered duplicates are skipped.
    """
    pointed = []
    for g in graphs:
        pointed.extend(pointed_graphs(g, k=k))
    pairs = []
    for i in range(len(pointed)):
        for j in range(i, len(pointed)):
            p1, p2 = pointed[i], pointed[j]
            if p1.k.n != p2.k.n:
                continue
            if not isomorphisms(p1.k, p2.k, limit=1):
                continue
            pairs.append((p1, p2))
    return pairs


def _campaign_unit(unit):
    out = []
    for problem, rules, mode, budget, symmetry, table, tag in unit:
        seeded = seed_c1(problem, rules=rules, table=table)
        res = solve_glue(seeded, mode=mode, budget=budget, symmetry=symmetry)
        out.append(
            (
                tag,
                res.status,
                res.assignment_count,
                [canonical_key(g) for g in res.graphs],
                seeded.meta.get("notices", []),
            )
        )
    return out


def run_campaign(pairs, config, progress=None):
    """Drive gluing pairs through growing expansion sizes.

    Phase i solves every still-active pair variant with expansion size
    min(c1_start + i, full expansion).  Variants that come back
    unsatisfiable are eliminated; satisfiable or budget-limited ones
    move on with one more expansion slot.  A variant reaching its full
    expansion contributes its solutions and retires (unless undecided,
    which is recorded).  Non-final phases only decide satisfiability;
    the final size enumerates all solutions.
    """
    rules = config.rules if config.rules is not None else default_seed_rules()
    # expand each pair into iso-class variants once, at the base order
    active = []
    for pi, (pg1, pg2) in enumerate(pairs):
        base = pg1.g.n + pg2.g.n - pg1.k.n
        if base > config.final_n:
            continue
        variants = glue_problem_variants(
            pg1, pg2, base, config.rt, final_n=config.final_n
        )
        for vi, _ in enumerate(variants):
            active.append((pi, vi))
    phases = []
    solutions = {}
    undecided = []
    phase = 0
    while active:
        stage = []
        for pi, vi in active:
            pg1, pg2 = pairs[pi]
            base = pg1.g.n + pg2.g.n - pg1.k.n
            c_total = config.final_n - base
            c1 = min(config.c1_start + phase, c_total)
            final = c1 == c_total
            problem = glue_problem_variants(
                pg1, pg2, base + c1, config.rt, final_n=config.final_n
            )[vi]
            mode = "all" if final else "first"
            stage.append(
                (
                    (problem, rules, mode, config.budget, config.symmetry,
                     config.table, (pi, vi)),
                    final,
                    c1,
                )
            )
        unit_args = [s[0] for s in stage]
        counts = {"sat": 0, "unsat": 0, "undecided": 0}
        phase_solutions = 0
        next_active = []
        results = []
        for chunk in map_units(
            _campaign_unit,
            make_units(unit_args),
            workers=config.workers,
        ):
            results.extend(chunk)
        for (tag, status, acount, keys, notices), (_, final, c1) in zip(
            results, stage
        ):
            counts[status] += 1
            if final:
                for key in keys:
                    solutions[key] = None
                phase_solutions += len(keys)
                if status == "undecided":
                    undecided.append(tag)
            else:
                if status in ("sat", "undecided"):
                    next_active.append(tag)
        rec = {
            "phase": phase,
            "c1": config.c1_start + phase,
            "problems": len(stage),
            "sat": counts["sat"],
            "unsat": counts["unsat"],
            "undecided": counts["undecided"],
            "solutions": phase_solutions,
        }
        phases.append(rec)
        if progress is not None:
            progress(dict(rec))
        active = next_active
        phase += 1

    sol_graphs = [graph6_decode(key) for key in sorted(solutions)]
    return CampaignReport(
        phases=phases,
        solutions=sol_graphs,
        undecided=sorted(undecided),
        status="undecided" if undecided else "complete",
    )
