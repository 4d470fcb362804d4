"""Censuses of Ramsey graphs: one-vertex extensions and cone gluing.

The extension census climbs order by order: every graph in R(s,t,k+1)
restricted to the first k vertices sits in R(s,t,k), so extending each
member of level k by one vertex in all admissible ways and deduping by
canonical key yields level k+1 exactly.  Cone gluing builds the same
censuses around a distinguished apex whose neighborhood and
non-neighborhood come from the two smaller Ramsey classes.
"""

from __future__ import annotations

import hashlib
import json
import os

from .analysis import known_ramsey
from .canon import canonical_key_raw
from .catalog import Catalog, CensusSpec
from .graph6 import graph6_decode, graph6_edge_count, graph6_encode
from .graphs import Graph, RamseyType, _bits, _has_clique_in, is_ramsey
from .workpool import make_units, map_units

#: Attachment degree sequence (d_0, ..., d_{q-1}) of the non-apex side's
#: vertices in one cone gluing, indexed by that graph's own vertex ids.
DegreeTuple = tuple


def _holds_clique(adj, cand, k):
    """True when the candidate set already contains a k-clique (k <= 0: yes)."""
    if k <= 0:
        return True
    if k == 1:
        return cand != 0
    return _has_clique_in(adj, cand, k)


def _soft_degree_window(rt, m, table=None):
    """Degree window at order m from known Ramsey numbers; unknowns stay loose."""
    lo, hi = 0, max(0, m - 1)
    r = known_ramsey(rt.s, rt.t - 1, table)
    if r is not None:
        lo = max(lo, m - r)
    r = known_ramsey(rt.s - 1, rt.t, table)
    if r is not None:
        hi = min(hi, r - 1)
    return lo, hi


def _children_keys(parent_key, s, t, lo, hi, e_lo=None, e_hi=None):
    """Canonical keys of all one-vertex extensions of one parent.

    lo/hi bound every vertex degree at the child's order; e_lo/e_hi, when
    given, bound the child's edge count.
    """
    g = graph6_decode(parent_key)
    n = g.n
    rows = g.adj
    full = (1 << n) - 1
    co = tuple(full & ~rows[v] & ~(1 << v) for v in range(n))
    smin, smax = max(0, lo), min(n, hi)
    if e_lo is not None or e_hi is not None:
        e_par = g.edge_count()
        if e_lo is not None:
            smin = max(smin, e_lo - e_par)
        if e_hi is not None:
            smax = min(smax, e_hi - e_par)
    if smin > smax:
        return []
    forced_in = 0
    forced_out = 0
    for v in range(n):
        d = rows[v].bit_count()
        if d < lo - 1 or d > hi:
            return []
        if d == lo - 1:
            forced_in |= 1 << v
        elif d == hi:
            forced_out |= 1 << v
    out = set()
    newbit = 1 << n
    s_need = s - 2
    t_need = t - 2

    def rec(v, S, Out, scount):
        if scount > smax or scount + (n - v) < smin:
            return
        if v == n:
            child = tuple(rows[u] | newbit if S >> u & 1 else rows[u] for u in range(n)) + (S,)
            out.add(canonical_key_raw(child, n + 1))
            return
        bit = 1 << v
        if not forced_out >> v & 1 and not _holds_clique(rows, S & rows[v], s_need):
            rec(v + 1, S | bit, Out, scount + 1)
        if not forced_in >> v & 1 and not _holds_clique(co, Out & co[v], t_need):
            rec(v + 1, S, Out | bit, scount)

    rec(0, 0, 0, 0)
    return sorted(out)


def _extension_unit(args):
    keys, s, t, lo, hi, e_lo, e_hi = args
    out = set()
    for key in keys:
        out.update(_children_keys(key, s, t, lo, hi, e_lo, e_hi))
    return sorted(out)


def extensions(g: Graph, rt: RamseyType, table=None):
    """All Ramsey one-vertex extensions of g, canonical and sorted.

    Every clique or independent set a new vertex could complete is excluded
    during the neighborhood search, so the results need no rechecking.
    """
    if not is_ramsey(g, rt):
        raise ValueError(f"graph is not in R({rt.s},{rt.t})")
    lo, hi = _soft_degree_window(rt, g.n + 1, table)
    keys = _children_keys(graph6_encode(g), rt.s, rt.t, lo, hi)
    return [graph6_decode(k) for k in keys]


# -- leveled census with checkpoints ------------------------------------------


def _max_addable(spec, k, table=None):
    """Upper bound on edges gained raising order k to spec.n."""
    total = 0
    for m in range(k + 1, spec.n + 1):
        _, hi = _soft_degree_window(spec.rt, m, table)
        total += min(m - 1, hi)
    return total


def _emit(progress, payload):
    if progress is not None:
        progress(payload)


def _level_dir(checkpoint_dir, spec, m):
    return os.path.join(checkpoint_dir, spec.dirname(), f"level{m:02d}")


def _write_bytes(path, data):
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _load_checkpoint(checkpoint_dir, spec):
    """Highest completed level below spec.n, as (order, key set), or None."""
    for m in range(spec.n - 1, 0, -1):
        lvl = _level_dir(checkpoint_dir, spec, m)
        done = os.path.join(lvl, "done.json")
        members = os.path.join(lvl, "members.g6")
        if os.path.exists(done) and os.path.exists(members):
            with open(done) as fh:
                meta = json.load(fh)
            with open(members, "rb") as fh:
                keys = set(fh.read().splitlines())
            if meta.get("members") == len(keys):
                return m, keys
    return None


def census(spec: CensusSpec, *, workers=1, checkpoint_dir=None, progress=None, base=None, table=None) -> Catalog:
    """Full census of spec by repeated one-vertex extension.

    base, when given, must be an unbounded catalog of the same Ramsey type
    at some order <= spec.n to start from instead of the one-vertex level.
    Checkpoints are journaled per level under checkpoint_dir and runs
    resume from the last completed level; results are independent of
    workers and of resume points.
    """
    rt = spec.rt
    if base is not None:
        if base.spec.rt != rt:
            raise ValueError("base catalog has a different Ramsey type")
        if base.spec.n > spec.n:
            raise ValueError("base catalog order exceeds the target")
        if base.spec.e_min is not None or base.spec.e_max is not None:
            raise ValueError("base catalog must be unbounded")
        k, current = base.spec.n, set(base.members)
    else:
        k, current = 0, {bytes([63])}
    if checkpoint_dir is not None:
        resumed = _load_checkpoint(checkpoint_dir, spec)
        if resumed is not None and resumed[0] > k:
            k, current = resumed
            _emit(progress, {"event": "resume", "n": k, "members": len(current)})

    while k < spec.n:
        m = k + 1
        lo, hi = _soft_degree_window(rt, m, table)
        e_lo = spec.e_min if m == spec.n else None
        e_hi = spec.e_max if m == spec.n else None
        parents = sorted(current)
        if spec.e_max is not None:
            parents = [p for p in parents if graph6_edge_count(p) <= spec.e_max]
        if spec.e_min is not None:
            slack = _max_addable(spec, k, table)
            parents = [p for p in parents if graph6_edge_count(p) + slack >= spec.e_min]
        units = make_units(parents)
        _emit(progress, {"event": "level_start", "n": m, "parents": len(parents), "units": len(units)})

        done_units = {}
        lvl = None
        if checkpoint_dir is not None:
            lvl = _level_dir(checkpoint_dir, spec, m)
            os.makedirs(lvl, exist_ok=True)
            psha = hashlib.sha256(b"\n".join(parents)).hexdigest()[:16]
            journal = os.path.join(lvl, "journal.jsonl")
            lines = []
            if os.path.exists(journal):
                with open(journal) as fh:
                    lines = [json.loads(x) for x in fh.read().splitlines() if x]
            if lines and lines[0].get("parents_sha") == psha and lines[0].get("units") == len(units):
                for row in lines[1:]:
                    done_units[row["unit"]] = row["file"]
            else:
                for name in os.listdir(lvl):
                    os.unlink(os.path.join(lvl, name))
                with open(journal, "w") as fh:
                    fh.write(json.dumps({"parents_sha": psha, "units": len(units), "n": m}) + "\n")

        current = set()
        for uid, fname in done_units.items():
            with open(os.path.join(lvl, fname), "rb") as fh:
                current.update(fh.read().splitlines())
        pending = [i for i in range(len(units)) if i not in done_units]
        unit_args = [(units[i], rt.s, rt.t, lo, hi, e_lo, e_hi) for i in pending]
        for uid, keys in zip(pending, map_units(_extension_unit, unit_args, workers)):
            current.update(keys)
            if lvl is not None:
                fname = f"unit{uid:05d}.g6"
                _write_bytes(os.path.join(lvl, fname), b"\n".join(keys) + b"\n" if keys else b"")
                with open(os.path.join(lvl, "journal.jsonl"), "a") as fh:
                    fh.write(json.dumps({"unit": uid, "file": fname, "count": len(keys)}) + "\n")
            _emit(progress, {"event": "unit_done", "n": m, "unit": uid, "members": len(current)})
        if lvl is not None and m < spec.n:
            _write_bytes(os.path.join(lvl, "members.g6"), b"\n".join(sorted(current)) + b"\n" if current else b"")
            with open(os.path.join(lvl, "done.json"), "w") as fh:
                json.dump({"n": m, "members": len(current)}, fh)
        _emit(progress, {"event": "level_done", "n": m, "members": len(current)})
        k = m

    out = Catalog(
        spec,
        provenance={
            "generator": "extension_census",
            "degree_table": "builtin" if table is None else "custom",
        },
    )
    for key in current:
        if spec.admits_edges(graph6_edge_count(key)):
            out.insert_key(key)
    return out


# -- cone gluing ----------------------------------------------------------------


def _glue_order(h: Graph):
    """Static placement order: densest-into-prefix first, ties by degree, index."""
    degs = h.degrees()
    placed = []
    placed_mask = 0
    rest = list(range(h.n))
    while rest:
        best = max(rest, key=lambda v: ((h.adj[v] & placed_mask).bit_count(), degs[v], -v))
        placed.append(best)
        placed_mask |= 1 << best
        rest.remove(best)
    return placed


def cone_glue(g: Graph, h: Graph, rt: RamseyType, *, e_min=None, e_max=None, table=None, dedup_depth=None, with_tuples=False):
    """All Ramsey graphs whose apex has neighborhood g and non-neighborhood h.

    The apex is adjacent to every vertex of g and none of h; h's vertices
    are placed one at a time, each attached to some subset of g's vertices,
    with clique, independence, degree-window, and edge-budget pruning.
    dedup_depth prunes search states at placement depths >= that value by
    colored canonical key; the final set is unchanged.  Returns canonical
    graphs sorted by key, or (graph, DegreeTuple) pairs with attachment
    counts indexed by h's own vertex ids.
    """
    s, t = rt.s, rt.t
    # the apex neighborhood must avoid K_{s-1} (s=2 forces it empty), the
    # non-neighborhood must avoid independent (t-1)-sets (t=2 likewise)
    g_ok = g.n == 0 if s == 2 else is_ramsey(g, RamseyType(s - 1, t))
    if not g_ok:
        raise ValueError(f"apex neighborhood is not in R({s - 1},{t})")
    h_ok = h.n == 0 if t == 2 else is_ramsey(h, RamseyType(s, t - 1))
    if not h_ok:
        raise ValueError(f"apex non-neighborhood is not in R({s},{t - 1})")
    p, q = g.n, h.n
    m = p + q + 1
    if m > 62:
        raise ValueError(f"glued order {m} exceeds graph6 short form")
    lo, hi = _soft_degree_window(rt, m, table)
    if not lo <= p <= hi:
        return []
    order = _glue_order(h)
    hdeg = h.degrees()
    # per-step attachment windows from the degree window at the final order
    s_lo = [max(0, lo - hdeg[order[i]]) for i in range(q)]
    s_hi = [min(p, hi - hdeg[order[i]]) for i in range(q)]
    if any(s_lo[i] > s_hi[i] for i in range(q)):
        return []
    cap_g = [hi - 1 - g.adj[u].bit_count() for u in range(p)]
    need_g = [max(0, lo - 1 - g.adj[u].bit_count()) for u in range(p)]
    if any(c < 0 for c in cap_g):
        return []
    # h-internal edges not yet placed after step i, plus loose future bounds
    prefix_edges = []
    pm = 0
    for i in range(q):
        pm |= 1 << order[i]
        prefix_edges.append(h.induced(pm).edge_count() if i else 0)
    e_h = h.edge_count()
    # all h-internal edges still unplaced entering step i (mandatory later)
    fixed_before = [e_h - (prefix_edges[i - 1] if i else 0) for i in range(q)]
    max_future = [sum(s_hi[j] for j in range(i + 1, q)) for i in range(q)]
    min_future = [sum(s_lo[j] for j in range(i + 1, q)) for i in range(q)]

    apex = p
    gmask = (1 << p) - 1
    rows = [g.adj[u] | 1 << apex for u in range(p)] + [gmask] + [0] * q
    attach = [0] * p
    results = {}
    seen = [set() for _ in range(q)]
    base_edges = g.edge_count() + p
    s_need = s - 2
    t_need = t - 2
    tuples = [0] * q

    def place(i, cur_edges):
        if i == q:
            if e_min is not None and cur_edges < e_min:
                return
            if e_max is not None and cur_edges > e_max:
                return
            key = canonical_key_raw(tuple(rows), m)
            if key not in results:
                results[key] = tuple(tuples[order.index(j)] for j in range(q)) if with_tuples else None
            return
        hv = order[i]
        w = apex + 1 + i
        wbit = 1 << w
        placed = (1 << w) - 1
        n0 = 0
        out0 = 1 << apex
        for j in range(i):
            sl = apex + 1 + j
            if h.adj[hv] >> order[j] & 1:
                n0 |= 1 << sl
            else:
                out0 |= 1 << sl
        co = [placed & ~rows[v] & ~(1 << v) for v in range(w)]
        if _holds_clique(rows, n0, s - 1) or _holds_clique(co, out0, t - 1):
            return
        if e_min is not None and cur_edges + fixed_before[i] + s_hi[i] + max_future[i] < e_min:
            return
        if e_max is not None and cur_edges + fixed_before[i] + s_lo[i] + min_future[i] > e_max:
            return
        remaining = q - i
        if any(attach[u] + remaining < need_g[u] for u in range(p)):
            return
        new_h_edges = prefix_edges[i] - (prefix_edges[i - 1] if i else 0)

        def pick(u, S, OutG, scount):
            if scount > s_hi[i] or scount + (p - u) < s_lo[i]:
                return
            if u == p:
                nb = n0 | S
                rows[w] = nb
                for x in _bits(nb):
                    rows[x] |= wbit
                for x in _bits(S):
                    attach[x] += 1
                tuples[i] = scount
                ok = True
                if dedup_depth is not None and i >= dedup_depth:
                    cells = [c for c in [gmask, 1 << apex] if c]
                    cells += [1 << (apex + 1 + j) for j in range(i + 1)]
                    state = canonical_key_raw(tuple(rr & (placed | wbit) for rr in rows[: w + 1]), w + 1, cells)
                    if state in seen[i]:
                        ok = False
                    else:
                        seen[i].add(state)
                if ok:
                    place(i + 1, cur_edges + scount + new_h_edges)
                for x in _bits(S):
                    attach[x] -= 1
                for x in _bits(nb):
                    rows[x] &= ~wbit
                rows[w] = 0
                return
            ubit = 1 << u
            if attach[u] < cap_g[u] and not _holds_clique(rows, (n0 | S) & rows[u], s_need):
                pick(u + 1, S | ubit, OutG, scount + 1)
            if not _holds_clique(co, (out0 | OutG) & co[u], t_need):
                pick(u + 1, S, OutG | ubit, scount)

        pick(0, 0, 0, 0)

    place(0, base_edges)
    if with_tuples:
        return [(graph6_decode(k), results[k]) for k in sorted(results)]
    return [graph6_decode(k) for k in sorted(results)]


def _cone_unit(args):
    pairs, s, t, e_lo, e_hi, dedup_depth = args
    rt = RamseyType(s, t)
    out = set()
    for gkey, hkey in pairs:
        for f in cone_glue(
            graph6_decode(gkey),
            graph6_decode(hkey),
            rt,
            e_min=e_lo,
            e_max=e_hi,
            dedup_depth=dedup_depth,
        ):
            out.add(graph6_encode(f))
    return sorted(out)


def census_by_cone_glue(spec: CensusSpec, *, workers=1, progress=None, table=None, dedup_depth=3) -> Catalog:
    """The spec census assembled from cone gluings over every apex degree.

    Every member F arises from any of its vertices v as apex with
    neighborhood and non-neighborhood graphs from the two smaller Ramsey
    classes, so the union over admissible apex degrees p and all pairs of
    smaller-class members equals the extension census exactly.
    """
    rt = spec.rt
    if rt.s < 3 or rt.t < 3:
        raise ValueError("cone-glue census needs s >= 3 and t >= 3")
    if spec.n < 1:
        raise ValueError("cone-glue census needs n >= 1")
    n = spec.n
    lo, hi = _soft_degree_window(rt, n, table)
    out = Catalog(
        spec,
        provenance={
            "generator": "cone_glue_census",
            "vertex_order": "prefix-dense-v1",
            "dedup_depth": dedup_depth,
        },
    )
    left_rt = RamseyType(rt.s - 1, rt.t)
    right_rt = RamseyType(rt.s, rt.t - 1)
    for p in range(max(0, lo), min(n - 1, hi) + 1):
        qn = n - 1 - p
        left = census(CensusSpec(left_rt, p), workers=workers, table=table)
        right = census(CensusSpec(right_rt, qn), workers=workers, table=table)
        pairs = [(gk, hk) for gk in sorted(left.members) for hk in sorted(right.members)]
        _emit(progress, {"event": "apex_degree", "p": p, "pairs": len(pairs)})
        units = make_units(pairs)
        unit_args = [(u, rt.s, rt.t, spec.e_min, spec.e_max, dedup_depth) for u in units]
        for keys in map_units(_cone_unit, unit_args, workers):
            for key in keys:
                if key not in out.members:
                    out.insert_key(key)
    return out
