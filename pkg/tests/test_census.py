import itertools
import random

import pytest

from ramseykit.graphs import (
    Graph,
    RamseyType,
    complete_graph,
    cycle_graph,
    empty_graph,
    is_ramsey,
)
from ramseykit.canon import canonical_key
from ramseykit.catalog import CensusSpec
from ramseykit.census import (
    census,
    census_by_cone_glue,
    cone_glue,
    extensions,
)

from helpers import all_graphs, brute_census_keys


class TestExtensions:
    def test_matches_brute_force(self):
        # every (n+1)-member restricts to an n-member at each vertex, so
        # extending all n-members covers the (n+1) census
        rt = RamseyType(3, 3)
        for n in range(0, 5):
            children = set()
            for g in all_graphs(n):
                if is_ramsey(g, rt):
                    for h in extensions(g, rt):
                        children.add(canonical_key(h))
            assert children == brute_census_keys(3, 3, n + 1)

    def test_results_are_members(self):
        rt = RamseyType(3, 4)
        for g in [cycle_graph(5), empty_graph(3)]:
            for h in extensions(g, rt):
                assert h.n == g.n + 1
                assert is_ramsey(h, rt)
                assert canonical_key(h) == canonical_key(h.relabel(tuple(range(h.n))))

    def test_rejects_nonmember(self):
        with pytest.raises(ValueError):
            extensions(complete_graph(3), RamseyType(3, 3))

    def test_sorted_canonical(self):
        out = extensions(cycle_graph(5), RamseyType(3, 4))
        keys = [canonical_key(h) for h in out]
        assert keys == sorted(keys)
        assert len(set(keys)) == len(keys)


class TestCensus:
    @pytest.mark.parametrize(
        "s,t,max_n",
        [(3, 3, 6), (2, 4, 5), (3, 4, 6), (4, 3, 6)],
    )
    def test_matches_brute_force(self, s, t, max_n):
        prev = None
        for n in range(1, max_n + 1):
            cat = census(CensusSpec(RamseyType(s, t), n), base=prev)
            assert cat.members == brute_census_keys(s, t, n), (s, t, n)
            prev = cat

    def test_known_counts(self):
        # triangle-and-independent-3-free graph counts: the (3,3) census
        # dies exactly at n=6, with C5 the unique member at n=5
        sizes = []
        prev = None
        for n in range(1, 7):
            prev = census(CensusSpec(RamseyType(3, 3), n), base=prev)
            sizes.append(len(prev))
        assert sizes == [1, 2, 2, 3, 1, 0]
        five = census(CensusSpec(RamseyType(3, 3), 5))
        assert five.members == {canonical_key(cycle_graph(5))}

    def test_edge_window_slice(self):
        full = census(CensusSpec(RamseyType(3, 4), 6))
        lo, hi = full.edge_range()
        window = census(CensusSpec(RamseyType(3, 4), 6, e_min=lo + 1, e_max=hi - 1))
        from ramseykit.graph6 import graph6_edge_count

        want = {
            k
            for k in full.members
            if lo + 1 <= graph6_edge_count(k) <= hi - 1
        }
        assert window.members == want

    def test_base_reuse_matches_scratch(self):
        rt = RamseyType(3, 4)
        base = census(CensusSpec(rt, 5))
        from_base = census(CensusSpec(rt, 7), base=base)
        scratch = census(CensusSpec(rt, 7))
        assert from_base.members == scratch.members

    def test_base_validation(self):
        rt = RamseyType(3, 4)
        base = census(CensusSpec(rt, 5))
        # base at the target order is a no-op pass-through
        assert census(CensusSpec(rt, 5), base=base).members == base.members
        with pytest.raises(ValueError):
            census(CensusSpec(rt, 4), base=base)  # base above the target
        with pytest.raises(ValueError):
            census(CensusSpec(RamseyType(3, 3), 6), base=base)  # type mismatch
        windowed = census(CensusSpec(rt, 5, e_min=2))
        with pytest.raises(ValueError):
            census(CensusSpec(rt, 6), base=windowed)  # windowed base unsafe

    def test_worker_count_invariance(self):
        spec = CensusSpec(RamseyType(3, 4), 7)
        serial = census(spec, workers=1)
        for w in (4, 16):
            assert census(spec, workers=w).members == serial.members

    def test_checkpoint_resume(self, tmp_path):
        spec = CensusSpec(RamseyType(3, 4), 7)
        want = census(spec).members
        ck = tmp_path / "ck"
        first = census(spec, checkpoint_dir=ck)
        assert first.members == want
        # a fresh run against the same checkpoint dir reloads finished levels
        events = []
        second = census(spec, checkpoint_dir=ck, progress=events.append)
        assert second.members == want
        assert any(e.get("event") == "resume" for e in events)

    def test_progress_events(self):
        events = []
        census(CensusSpec(RamseyType(3, 3), 5), progress=events.append)
        levels = [e["n"] for e in events if e.get("event") == "level_done"]
        assert levels == [1, 2, 3, 4, 5]


class TestConeGlue:
    def test_single_glue_brute(self):
        # take g=C5 neighborhood, h=empty non-neighborhood for (3,4):
        # results must be exactly the census members with an apex vertex
        # of that split, computed by brute force over attachments
        rt = RamseyType(3, 4)
        g = empty_graph(2)
        h = cycle_graph(5).induced(0b00111)  # path on 3 vertices
        out = cone_glue(g, h, rt)
        keys = {canonical_key(x) for x in out}

        brute = set()
        p, q = g.n, h.n
        m = p + q + 1
        apex = m - 1
        for attach in itertools.product(range(1 << p), repeat=q):
            rows = list(g.adj) + [0] * (q + 1)
            for j in range(q):
                for i in range(q):
                    if h.adj[j] >> i & 1:
                        rows[p + j] |= 1 << (p + i)
                for i in range(p):
                    if attach[j] >> i & 1:
                        rows[p + j] |= 1 << i
                        rows[i] |= 1 << (p + j)
            for v in range(p):
                rows[v] |= 1 << apex
                rows[apex] |= 1 << v
            cand = Graph(m, rows)
            if is_ramsey(cand, rt):
                brute.add(canonical_key(cand))
        assert keys == brute

    def test_validates_sides(self):
        rt = RamseyType(3, 4)
        with pytest.raises(ValueError):
            cone_glue(complete_graph(2), empty_graph(2), rt)  # K2 has a K_{s-1}
        with pytest.raises(ValueError):
            cone_glue(empty_graph(2), empty_graph(3), rt)  # independent 3-set

    def test_with_tuples(self):
        rt = RamseyType(3, 4)
        g = empty_graph(2)
        h = cycle_graph(5).induced(0b00111)  # path on 3 vertices
        out = cone_glue(g, h, rt, with_tuples=True)
        assert out
        for glued, tup in out:
            assert glued.n == g.n + h.n + 1
            assert len(tup) == h.n
            assert all(0 <= c <= g.n for c in tup)

    def test_dedup_depth_irrelevant_to_result(self):
        rt = RamseyType(3, 4)
        g = empty_graph(3)
        h = cycle_graph(5).induced(0b00111)
        a = {canonical_key(x) for x in cone_glue(g, h, rt, dedup_depth=None)}
        b = {canonical_key(x) for x in cone_glue(g, h, rt, dedup_depth=1)}
        assert a == b


class TestConeCensus:
    @pytest.mark.parametrize("s,t,max_n", [(3, 3, 6), (3, 4, 7)])
    def test_matches_extension_census(self, s, t, max_n):
        rt = RamseyType(s, t)
        prev = None
        for n in range(1, max_n + 1):
            ext = census(CensusSpec(rt, n), base=prev)
            cone = census_by_cone_glue(CensusSpec(rt, n))
            assert cone.members == ext.members, (s, t, n)
            prev = ext

    def test_rejects_small_types(self):
        with pytest.raises(ValueError):
            census_by_cone_glue(CensusSpec(RamseyType(2, 4), 4))

    def test_worker_count_invariance(self):
        spec = CensusSpec(RamseyType(3, 4), 6)
        serial = census_by_cone_glue(spec, workers=1)
        assert census_by_cone_glue(spec, workers=4).members == serial.members
