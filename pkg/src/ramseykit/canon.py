"""Canonical labeling and automorphisms via refinement plus individualization.

The canonical key of a graph is the graph6 encoding of a relabeled copy,
minimized over the leaves of an individualization-refinement search tree, so
two graphs are isomorphic exactly when their keys are equal.  An ordered
initial partition restricts relabelings to those keeping each part's
vertices in its block of positions, giving a colored canonical form.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import Graph, _bits


@dataclass(frozen=True)
class CanonicalForm:
    key: bytes
    perm: tuple


@dataclass(frozen=True)
class AutomorphismSet:
    elements: tuple
    complete: bool


def _refine(adj, cells, work=None):
    """Coarsest equitable partition refining cells, order-preserving.

    Cells are bitsets; a split replaces the cell in place by its parts
    ordered by neighbor count toward the splitter, ascending.  Mutates and
    returns cells.  work, when given, holds the only splitters that can
    still cause splits (the rest of the partition is already equitable);
    stale splitters are supersets of current cells, which keeps the result
    correct.  Stops as soon as every cell is a singleton.
    """
    nonsingle = 0
    for c in cells:
        if c & (c - 1):
            nonsingle += 1
    if nonsingle == 0:
        return cells
    work = list(cells) if work is None else list(work)
    wi = 0
    while wi < len(work):
        s = work[wi]
        wi += 1
        i = 0
        ncells = len(cells)
        while i < ncells:
            c = cells[i]
            if c & (c - 1):
                groups = {}
                cc = c
                while cc:
                    b = cc & -cc
                    cc ^= b
                    k = (adj[b.bit_length() - 1] & s).bit_count()
                    g = groups.get(k)
                    groups[k] = b if g is None else g | b
                if len(groups) > 1:
                    parts = [groups[k] for k in sorted(groups)]
                    cells[i : i + 1] = parts
                    work.extend(parts)
                    np = len(parts)
                    ncells += np - 1
                    i += np
                    nonsingle -= 1
                    for x in parts:
                        if x & (x - 1):
                            nonsingle += 1
                    if nonsingle == 0:
                        return cells
                    continue
            i += 1
    return cells


def _key_from_inv(adj, n, inv):
    """graph6 bytes of the graph relabeled so position p holds vertex inv[p]."""
    out = [n + 63]
    bits = 0
    nbits = 0
    for j in range(1, n):
        aj = adj[inv[j]]
        for i in range(j):
            bits = bits << 1 | (aj >> inv[i] & 1)
            nbits += 1
            if nbits == 6:
                out.append(bits + 63)
                bits = 0
                nbits = 0
    if nbits:
        out.append((bits << (6 - nbits)) + 63)
    return bytes(out)


_AUTO_CAP = 500  # automorphisms kept for orbit pruning during search


def _search(adj, n, init_cells):
    """Full canonical search; returns (best key, best inv list, autos found)."""
    best = [None, None]  # key, inv list (position -> vertex)
    leaf_invs = {}  # key -> inv of the first leaf reaching it
    autos = []
    auto_fixed = []  # per automorphism, bitmask of its fixed points
    auto_seen = set()
    first = [None, None]  # branching sequence and key of the first leaf
    jump = [None]  # unwind target depth, or None

    def note_leaf(cells, prefix):
        inv = [c.bit_length() - 1 for c in cells]
        key = _key_from_inv(adj, n, inv)
        if first[0] is None:
            first[0] = prefix
            first[1] = key
        prev = leaf_invs.get(key)
        if prev is None:
            leaf_invs[key] = inv
        elif len(autos) < _AUTO_CAP:
            # two labelings with equal key compose to an automorphism
            alpha = [0] * n
            for p in range(n):
                alpha[prev[p]] = inv[p]
            alpha = tuple(alpha)
            if any(alpha[v] != v for v in range(n)) and alpha not in auto_seen:
                auto_seen.add(alpha)
                autos.append(alpha)
                fixed = 0
                for v in range(n):
                    if alpha[v] == v:
                        fixed |= 1 << v
                auto_fixed.append(fixed)
        if key == first[1] and prefix != first[0]:
            # the subtree between here and the deepest ancestor shared with
            # the first leaf's path is an automorphic image of explored
            # territory, so unwind straight back to that ancestor
            d = 0
            fp = first[0]
            while d < len(prefix) and d < len(fp) and prefix[d] == fp[d]:
                d += 1
            jump[0] = d
        if best[0] is None or key < best[0]:
            best[0] = key
            best[1] = inv

    full = (1 << n) - 1

    def rec(cells, prefix, pmask, fresh):
        cells = _refine(adj, cells, fresh)
        target = -1
        for i, c in enumerate(cells):
            if c & (c - 1):
                target = i
                break
        if target < 0:
            note_leaf(cells, prefix)
            return
        cell = cells[target]
        # orbit pruning: among automorphisms fixing the prefix pointwise,
        # only one candidate per orbit needs expanding
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, fixed in zip(autos, auto_fixed):
            if pmask & ~fixed:
                continue
            moved = full & ~fixed
            while moved:
                v = moved & -moved
                moved ^= v
                v = v.bit_length() - 1
                rv, ra = find(v), find(a[v])
                if rv != ra:
                    parent[rv] = ra
        tried = []
        for v in _bits(cell):
            if any(find(v) == find(u) for u in tried):
                continue
            tried.append(v)
            bit = 1 << v
            rest = cell ^ bit
            child = cells[:target] + [bit, rest] + cells[target + 1 :]
            rec(child, prefix + (v,), pmask | bit, [bit, rest])
            if jump[0] is not None:
                if len(prefix) > jump[0]:
                    return
                jump[0] = None

    rec(list(init_cells), (), 0, None)
    return best[0], best[1], autos


def _check_cells(g, cells):
    if cells is None:
        return [g.vertex_mask()] if g.n else []
    seen = 0
    out = []
    for c in cells:
        if c == 0:
            raise ValueError("empty cell in initial partition")
        if c & seen:
            raise ValueError("overlapping cells in initial partition")
        seen |= c
        out.append(c)
    if seen != g.vertex_mask():
        raise ValueError("initial partition does not cover all vertices")
    return out


def canonical_form(g: Graph, cells=None) -> CanonicalForm:
    """Canonical key plus a relabeling realizing it.

    perm[v] is the position of v in the canonical labeling; relabeling g by
    perm and encoding as graph6 reproduces key exactly.  With cells given,
    only relabelings preserving the ordered partition blocks compete.
    """
    if g.n == 0:
        return CanonicalForm(key=bytes([63]), perm=())
    key, inv, _ = _search(g.adj, g.n, _check_cells(g, cells))
    perm = [0] * g.n
    for p, v in enumerate(inv):
        perm[v] = p
    return CanonicalForm(key=key, perm=tuple(perm))


def canonical_key(g: Graph, cells=None) -> bytes:
    if g.n == 0:
        return bytes([63])
    key, _, _ = _search(g.adj, g.n, _check_cells(g, cells))
    return key


def canonical_key_raw(adj, n, cells=None) -> bytes:
    """canonical_key for a trusted raw adjacency tuple, skipping validation.

    adj must be symmetric, loop-free, and confined to bits 0..n-1; hot
    loops that build rows directly use this to avoid Graph construction.
    """
    if n == 0:
        return bytes([63])
    key, _, _ = _search(adj, n, [(1 << n) - 1] if cells is None else list(cells))
    return key


def is_isomorphic(g: Graph, h: Graph) -> bool:
    if g.n != h.n or g.edge_count() != h.edge_count():
        return False
    if sorted(g.degrees()) != sorted(h.degrees()):
        return False
    return canonical_key(g) == canonical_key(h)


def isomorphisms(g: Graph, h: Graph, limit=None) -> tuple:
    """All isomorphisms from g onto h as tuples mapping g-vertex to h-vertex.

    Requires n <= 16 (exhaustive backtracking).  With limit set, stops
    after that many mappings.  Returns () when none exist.
    """
    if g.n != h.n:
        return ()
    if g.n > 16:
        raise ValueError(f"isomorphism enumeration limited to n <= 16, got {g.n}")
    n = g.n
    if n == 0:
        return ((),)
    if sorted(g.degrees()) != sorted(h.degrees()):
        return ()
    adj, bdj = g.adj, h.adj
    hdeg = h.degrees()
    cand0 = []
    for v in range(n):
        dv = g.degree(v)
        m = 0
        for x in range(n):
            if hdeg[x] == dv:
                m |= 1 << x
        cand0.append(m)
    found = []
    assign = [0] * n
    full = (1 << n) - 1

    def rec(v, used, cands):
        if v == n:
            found.append(tuple(assign))
            return limit is None or len(found) < limit
        for x in _bits(cands[v] & ~used):
            assign[v] = x
            ok = True
            nxt = list(cands)
            for w in range(v + 1, n):
                if adj[v] >> w & 1:
                    nxt[w] &= bdj[x]
                else:
                    nxt[w] &= full & ~bdj[x] & ~(1 << x)
                if not nxt[w] & ~(used | (1 << x)):
                    ok = False
                    break
            if ok and not rec(v + 1, used | (1 << x), nxt):
                return False
        return True

    rec(0, 0, cand0)
    return tuple(found)


def automorphism_count(g: Graph) -> int:
    """Order of the automorphism group; exact for n <= 16.

    For larger graphs returns a deterministic lower bound (the generators
    discovered during canonical search), which suffices for ranking.
    """
    if g.n <= 16:
        return len(automorphisms(g).elements)
    if g.n == 0:
        return 1
    autos = _search(g.adj, g.n, [g.vertex_mask()])[2]
    return max(1, len(autos))


def automorphisms(g: Graph, limit=None) -> AutomorphismSet:
    """All automorphisms of g by exhaustive backtracking.

    Requires n <= 16.  With limit set, enumeration stops once limit
    permutations are stored and the result is flagged incomplete.
    """
    if g.n > 16:
        raise ValueError(f"automorphism enumeration limited to n <= 16, got {g.n}")
    n = g.n
    if n == 0:
        return AutomorphismSet(elements=((),), complete=True)
    adj = g.adj
    cells = _refine(adj, [g.vertex_mask()])
    class_of = [0] * n
    for c in cells:
        for v in _bits(c):
            class_of[v] = c
    found = []
    assign = [0] * n
    full = g.vertex_mask()

    def rec(v, used, cands):
        if v == n:
            found.append(tuple(assign))
            return limit is None or len(found) < limit
        for x in _bits(cands[v] & ~used):
            assign[v] = x
            ok = True
            nxt = list(cands)
            for w in range(v + 1, n):
                if adj[v] >> w & 1:
                    nxt[w] &= adj[x]
                else:
                    nxt[w] &= full & ~adj[x] & ~(1 << x)
                if not nxt[w] & ~(used | (1 << x)):
                    ok = False
                    break
            if ok and not rec(v + 1, used | (1 << x), nxt):
                return False
        return True

    complete = rec(0, 0, list(class_of))
    return AutomorphismSet(elements=tuple(found), complete=complete)
