"""CNF encoding of gluing problems and an all-solutions DPLL solver.

A gluing problem fixes some vertex pairs (edge or non-edge) and leaves the
rest free.  Each free pair becomes a boolean variable; every potential
s-clique yields a clause forbidding it and every potential independent
t-set yields a clause forcing an edge inside it.  The solver enumerates
models by depth-first search with two watched literals per clause; a
found model counts as a conflict, so chronological backtracking walks past
it and every total assignment is visited at most once.  No blocking
clauses, no learning, no restarts: enumeration must be exhaustive and
deterministic, and the instances are small enough that neither buys
anything (blocking clauses in particular pile up on the deepest decision
variables and rescanning them is quadratic in the model count).
"""

import time
from dataclasses import dataclass, field

__all__ = [
    "Cnf",
    "SolveOutcome",
    "encode",
    "solve",
    "to_dimacs",
    "from_model",
]

SYMMETRY_SCHEME = "lex-rows-v1"


@dataclass
class Cnf:
    """A CNF formula over free-pair variables plus optional auxiliaries.

    Variables 1..len(decode) correspond to free pairs, in order: variable
    i+1 is decode[i].  Any variables past len(decode) are auxiliaries
    introduced by symmetry-breaking constraints and carry no meaning in a
    decoded graph.
    """

    var_count: int
    clauses: list
    decode: tuple
    meta: dict = field(default_factory=dict)


@dataclass
class SolveOutcome:
    status: str  # "sat", "unsat" or "undecided"
    models: list  # each model: tuple of bools, index v-1 for variable v
    stats: dict


def _subset_clauses(n, allowed, free_index, size, want_free_positive):
    """Clauses over all size-subsets whose pairs are all allowed.

    allowed[v] is a bitmask of vertices u such that the pair {u, v} may
    appear inside a subset (fixed in the right state, or free).  For each
    admissible subset the clause contains one literal per free pair inside
    it; fixed pairs contribute nothing.  A subset with no free pair yields
    the empty clause: the fixed part alone is already a violation.
    """
    out = []
    chosen = []

    def rec(cand):
        if len(chosen) == size:
            lits = []
            for i in range(size):
                u = chosen[i]
                for j in range(i + 1, size):
                    var = free_index.get((u, chosen[j]))
                    if var is not None:
                        lits.append(var if want_free_positive else -var)
            out.append(tuple(lits))
            return
        need = size - len(chosen)
        m = cand
        while m:
            if m.bit_count() < need:
                return
            b = m & -m
            m ^= b
            v = b.bit_length() - 1
            chosen.append(v)
            rec(m & allowed[v])
            chosen.pop()

    rec((1 << n) - 1)
    return out


def _lex_chain(var_count, clauses, xs, ys):
    """Append clauses forcing row(xs) <=lex row(ys), returning new var count.

    xs and ys are equal-length lists of pair variables.  Auxiliary
    variables encode prefix equality: e_i is true exactly when
    xs[:i+1] == ys[:i+1], so models restricted to pair variables stay in
    bijection with constrained assignments.
    """
    m = len(xs)
    if m == 0:
        return var_count
    clauses.append((-xs[0], ys[0]))
    prev = None
    for i in range(m):
        if i > 0:
            # ordering under prefix equality: e_{i-1} -> (x_i -> y_i)
            clauses.append((-prev, -xs[i], ys[i]))
        if i == m - 1:
            break
        var_count += 1
        e = var_count
        if prev is None:
            # e <-> (x_0 == y_0)
            clauses.append((-e, -xs[0], ys[0]))
            clauses.append((-e, xs[0], -ys[0]))
            clauses.append((e, xs[0], ys[0]))
            clauses.append((e, -xs[0], -ys[0]))
        else:
            # e <-> e_prev and (x_i == y_i)
            clauses.append((-e, prev))
            clauses.append((-e, -xs[i], ys[i]))
            clauses.append((-e, xs[i], -ys[i]))
            clauses.append((e, -prev, -xs[i], -ys[i]))
            clauses.append((e, -prev, xs[i], ys[i]))
        prev = e
    return var_count


def _interchangeable_runs(n, rows, free_adj, c1_mask):
    """Maximal runs of consecutive last-block vertices that can be swapped.

    Two vertices u < v are interchangeable when the transposition (u v)
    preserves both the fixed rows and the free-pair set; the check below
    compares their rows with the bits at u and v masked off, which is
    exactly that condition for a transposition.
    """
    verts = [v for v in range(n) if (c1_mask >> v) & 1]
    runs = []
    run = []
    for v in verts:
        if run:
            u = run[-1]
            keep = ~((1 << u) | (1 << v))
            same = (
                rows[u] & keep == rows[v] & keep
                and free_adj[u] & keep == free_adj[v] & keep
                and u + 1 == v
            )
            if not same:
                if len(run) > 1:
                    runs.append(run)
                run = []
        run.append(v)
    if len(run) > 1:
        runs.append(run)
    return runs


def encode(problem, symmetry=True):
    """Build the CNF for a gluing problem.

    Free pairs become variables 1..k in problem order.  Clauses forbid
    every s-subset whose pairs are all edges-or-free (negative literals on
    the free pairs) and force an edge in every t-subset whose pairs are
    all non-edges-or-free (positive literals).  Subsets ruled out by the
    fixed adjacency never generate a clause.  With symmetry=True, runs of
    interchangeable expansion vertices get lexicographic row ordering
    constraints using auxiliary prefix-equality variables.
    """
    n = problem.n
    rows = problem.rows
    s, t = problem.rt.s, problem.rt.t
    free_pairs = tuple(problem.free_pairs)
    free_index = {}
    free_adj = [0] * n
    for i, (u, v) in enumerate(free_pairs):
        free_index[(u, v)] = i + 1
        free_index[(v, u)] = i + 1
        free_adj[u] |= 1 << v
        free_adj[v] |= 1 << u

    full = (1 << n) - 1
    allowed_clique = [(rows[v] | free_adj[v]) & ~(1 << v) for v in range(n)]
    allowed_indep = [(~rows[v]) & full & ~(1 << v) for v in range(n)]

    clauses = []
    seen = set()
    for cl in _subset_clauses(n, allowed_clique, free_index, s, False):
        key = tuple(sorted(cl))
        if key not in seen:
            seen.add(key)
            clauses.append(cl)
    for cl in _subset_clauses(n, allowed_indep, free_index, t, True):
        key = tuple(sorted(cl))
        if key not in seen:
            seen.add(key)
            clauses.append(cl)

    var_count = len(free_pairs)
    meta = {"pair_vars": len(free_pairs), "symmetry": None}
    if symmetry:
        c1_mask = getattr(problem, "c1_mask", 0)
        runs = _interchangeable_runs(n, rows, free_adj, c1_mask)
        applied = False
        for run in runs:
            for u, v in zip(run, run[1:]):
                cols = []
                both = free_adj[u] & free_adj[v] & ~(1 << u) & ~(1 << v)
                m = both
                while m:
                    w = (m & -m).bit_length() - 1
                    m &= m - 1
                    cols.append(w)
                xs = [free_index[(u, w)] for w in cols]
                ys = [free_index[(v, w)] for w in cols]
                if xs:
                    var_count = _lex_chain(var_count, clauses, xs, ys)
                    applied = True
        if applied:
            meta["symmetry"] = SYMMETRY_SCHEME
    return Cnf(var_count, clauses, free_pairs, meta)


def to_dimacs(cnf):
    """Serialize to DIMACS CNF bytes."""
    parts = ["p cnf %d %d\n" % (cnf.var_count, len(cnf.clauses))]
    for c in cnf.clauses:
        parts.append(" ".join([*(str(l) for l in c), "0"]) + "\n")
    return "".join(parts).encode("ascii")


def _normalize_model(cnf, assignment):
    vals = list(assignment)
    if len(vals) != cnf.var_count:
        raise ValueError("assignment length %d, expected %d"
                         % (len(vals), cnf.var_count))
    if vals and all(isinstance(x, int) and not isinstance(x, bool) for x in vals):
        absv = sorted(abs(x) for x in vals)
        if absv == list(range(1, cnf.var_count + 1)):
            out = [False] * cnf.var_count
            for lit in vals:
                out[abs(lit) - 1] = lit > 0
            return out
    out = []
    for x in vals:
        if x in (0, 1, True, False):
            out.append(bool(x))
        else:
            raise ValueError("assignment entries must be 0/1 or signed literals")
    return out


def from_model(cnf, assignment, problem):
    """Decode a satisfying assignment into the completed graph.

    Accepts either a sequence of booleans (one per variable, in order) or
    a sequence of signed DIMACS literals covering each variable once.
    The result must satisfy the problem's arrowing-free condition; a
    violation raises ValueError since it means the encoding and the
    checker disagree.
    """
    from .graphs import Graph, is_ramsey

    vals = _normalize_model(cnf, assignment)
    adj = list(problem.rows)
    for i, (u, v) in enumerate(cnf.decode):
        if vals[i]:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
    g = Graph(problem.n, tuple(adj))
    if not is_ramsey(g, problem.rt):
        raise ValueError("model decodes to a graph violating the clique "
                         "or independence bound")
    return g


def solve(cnf, mode="all", budget=None, priority=None):
    """Enumerate models of a CNF by DPLL with two watched literals.

    mode: "all" collects every model, "first" stops at one, "count" counts
    without storing (the outcome's stats carry the count).  budget caps
    the number of decisions; exceeding it returns status "undecided" with
    whatever models were found.  priority optionally orders decision
    variables; unlisted variables follow in ascending order.  Branching
    tries False before True.  Every model is re-checked against the
    original clause list before it is reported.
    """
    if mode not in ("all", "first", "count"):
        raise ValueError("mode must be all, first or count")
    t0 = time.perf_counter()
    nv = cnf.var_count
    original = [tuple(c) for c in cnf.clauses]
    stats = {"decisions": 0, "propagations": 0, "models": 0, "time_s": 0.0}

    def finish(status, models):
        stats["time_s"] = time.perf_counter() - t0
        stats["models"] = counted[0]
        for m in models:
            for c in original:
                if not any((m[abs(l) - 1] if l > 0 else not m[abs(l) - 1])
                           for l in c):
                    raise AssertionError("model fails re-check")
        return SolveOutcome(status, models, stats)

    counted = [0]
    if any(len(c) == 0 for c in original):
        return finish("unsat", [])
    if nv == 0:
        counted[0] = 1
        return finish("sat", [()] if mode != "count" else [])

    order = []
    seen_v = set()
    if priority:
        for v in priority:
            if 1 <= v <= nv and v not in seen_v:
                seen_v.add(v)
                order.append(v)
    order.extend(v for v in range(1, nv + 1) if v not in seen_v)

    clauses = [list(c) for c in original]
    watches = [[] for _ in range(2 * nv + 1)]  # index: lit + nv

    def widx(lit):
        return lit + nv

    assign = [0] * (nv + 1)  # 0 unassigned, 1 true, -1 false
    trail = []
    queue = []

    for ci, c in enumerate(clauses):
        if len(c) == 1:
            queue.append(c[0])
        else:
            watches[widx(c[0])].append(ci)
            watches[widx(c[1])].append(ci)

    def lit_val(l):
        a = assign[abs(l)]
        if a == 0:
            return 0
        return 1 if (a > 0) == (l > 0) else -1

    def enqueue(lit):
        """Assign lit true; returns False on immediate conflict."""
        v = abs(lit)
        cur = assign[v]
        want = 1 if lit > 0 else -1
        if cur != 0:
            return cur == want
        assign[v] = want
        trail.append(lit)
        return True

    def propagate():
        """Drain the queue; returns False on conflict."""
        while queue:
            lit = queue.pop()
            if not enqueue(lit):
                queue.clear()
                return False
            stats["propagations"] += 1
            neg = -lit
            wl = watches[widx(neg)]
            i = 0
            while i < len(wl):
                ci = wl[i]
                c = clauses[ci]
                if c[0] == neg:
                    c[0], c[1] = c[1], c[0]
                w0 = c[0]
                if lit_val(w0) == 1:
                    i += 1
                    continue
                moved = False
                for j in range(2, len(c)):
                    if lit_val(c[j]) != -1:
                        watches[widx(c[j])].append(ci)
                        c[1], c[j] = c[j], c[1]
                        wl[i] = wl[-1]
                        wl.pop()
                        moved = True
                        break
                if moved:
                    continue
                if lit_val(w0) == -1:
                    queue.clear()
                    return False
                queue.append(w0)
                i += 1
        return True

    def undo(mark):
        while len(trail) > mark:
            assign[abs(trail.pop())] = 0

    models = []
    status = "sat"
    # stack entries: (var, trail mark before the decision, flipped)
    stack = []
    exhausted = False

    while True:
        ok = propagate()
        if ok and len(trail) == nv:
            counted[0] += 1
            if mode != "count":
                models.append(tuple(assign[v] > 0 for v in range(1, nv + 1)))
            if mode == "first":
                break
            ok = False  # treat the model as a conflict and search on
        if ok:
            var = None
            for v in order:
                if assign[v] == 0:
                    var = v
                    break
            stats["decisions"] += 1
            if budget is not None and stats["decisions"] > budget:
                status = "undecided"
                break
            stack.append((var, len(trail), False))
            queue.append(-var)
            continue
        # conflict: backtrack to the deepest unflipped decision
        while stack:
            var, mark, flipped = stack.pop()
            undo(mark)
            if not flipped:
                stack.append((var, mark, True))
                queue.append(var)
                break
        else:
            exhausted = True
            break

    if status != "undecided":
        if exhausted or mode == "first":
            status = "sat" if counted[0] else "unsat"
    return finish(status, models)
