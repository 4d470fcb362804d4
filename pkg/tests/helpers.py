"""Brute-force oracles shared across the test modules.

Everything here is written independently of the package internals:
plain itertools enumeration over subsets and labeled graphs, so package
results can be checked against first-principles recomputation.
"""

import itertools
import random

from ramseykit.graphs import Graph, RamseyType, is_ramsey
from ramseykit.canon import canonical_key


def all_pairs(n):
    return [(u, v) for u in range(n) for v in range(u + 1, n)]


def all_graphs(n):
    """Every labeled graph on n vertices."""
    pairs = all_pairs(n)
    for bits in itertools.product([0, 1], repeat=len(pairs)):
        adj = [0] * n
        for b, (u, v) in zip(bits, pairs):
            if b:
                adj[u] |= 1 << v
                adj[v] |= 1 << u
        yield Graph(n, tuple(adj))


def brute_census_keys(s, t, n):
    """Canonical keys of the census computed by raw enumeration."""
    rt = RamseyType(s, t)
    return {canonical_key(g) for g in all_graphs(n) if is_ramsey(g, rt)}


def brute_has_clique(g, k):
    if k <= 0:
        return True
    if k > g.n:
        return False
    for sub in itertools.combinations(range(g.n), k):
        if all(g.has_edge(u, v) for u, v in itertools.combinations(sub, 2)):
            return True
    return False


def brute_has_indep(g, k):
    if k <= 0:
        return True
    if k > g.n:
        return False
    for sub in itertools.combinations(range(g.n), k):
        if not any(g.has_edge(u, v) for u, v in itertools.combinations(sub, 2)):
            return True
    return False


def random_graph(rng, n, p=0.5):
    adj = [0] * n
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                adj[u] |= 1 << v
                adj[v] |= 1 << u
    return Graph(n, tuple(adj))


def random_permutation(rng, n):
    perm = list(range(n))
    rng.shuffle(perm)
    return tuple(perm)


def brute_glue_solutions(problem):
    """(labeled completion count, canonical key set) by trying every
    assignment of the free pairs."""
    count = 0
    keys = set()
    for bits in itertools.product([0, 1], repeat=len(problem.free_pairs)):
        adj = list(problem.rows)
        for b, (u, v) in zip(bits, problem.free_pairs):
            if b:
                adj[u] |= 1 << v
                adj[v] |= 1 << u
        g = Graph(problem.n, tuple(adj))
        if is_ramsey(g, problem.rt):
            count += 1
            keys.add(canonical_key(g))
    return count, keys


def truth_table_models(var_count, clauses):
    """All satisfying assignments as tuples of bools."""
    out = set()
    for bits in itertools.product([False, True], repeat=var_count):
        if all(any((l > 0) == bits[abs(l) - 1] for l in c) for c in clauses):
            out.add(bits)
    return out


def paley_17():
    """The quadratic-residue graph on 17 vertices."""
    qr = {1, 2, 4, 8, 9, 13, 15, 16}
    adj = [0] * 17
    for u in range(17):
        for v in range(u + 1, 17):
            if (u - v) % 17 in qr or (v - u) % 17 in qr:
                adj[u] |= 1 << v
                adj[v] |= 1 << u
    return Graph(17, tuple(adj))
