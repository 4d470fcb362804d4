"""Persistent catalogs of canonical graph6 keys.

A catalog holds the members of one census slice: all graphs with a fixed
Ramsey type and order, optionally restricted to an edge-count window.
Members are canonical graph6 byte strings, so set union is isomorphism-safe
dedup.  On-disk layout is a meta.json plus sorted .g6 line files; outputs
carry no timestamps or machine details and are byte-identical across runs.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .graphs import Graph, RamseyType, is_ramsey
from .graph6 import graph6_decode, graph6_edge_count, graph6_encode

CATALOG_FORMAT = 1


@dataclass(frozen=True)
class CensusSpec:
    """One census slice: Ramsey type, order, optional closed edge window."""

    rt: RamseyType
    n: int
    e_min: int | None = None
    e_max: int | None = None

    def __post_init__(self):
        if self.n < 0 or self.n > 62:
            raise ValueError(f"census order must be in 0..62, got {self.n}")
        maxe = self.n * (self.n - 1) // 2
        for name, b in (("e_min", self.e_min), ("e_max", self.e_max)):
            if b is not None and not 0 <= b <= maxe:
                raise ValueError(f"{name}={b} outside 0..{maxe}")
        if self.e_min is not None and self.e_max is not None and self.e_min > self.e_max:
            raise ValueError("e_min exceeds e_max")

    def edge_window(self):
        maxe = self.n * (self.n - 1) // 2
        lo = 0 if self.e_min is None else self.e_min
        hi = maxe if self.e_max is None else self.e_max
        return lo, hi

    def admits_edges(self, e):
        lo, hi = self.edge_window()
        return lo <= e <= hi

    def dirname(self):
        s = f"r{self.rt.s}-{self.rt.t}-n{self.n}"
        if self.e_min is not None or self.e_max is not None:
            lo, hi = self.edge_window()
            s += f"-e{lo}-{hi}"
        return s


class Catalog:
    """Mutable in-memory census slice keyed by canonical graph6 bytes."""

    def __init__(self, spec: CensusSpec, provenance=None):
        self.spec = spec
        self.members = set()
        self.counts = {}  # edge count -> members with that many edges
        self.provenance = dict(provenance or {})

    def __len__(self):
        return len(self.members)

    def __contains__(self, key):
        return key in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def insert_key(self, key: bytes) -> bool:
        """Add an already-canonical key; returns False on duplicate.

        Only the order and edge window are re-checked here; the caller
        vouches for canonicity and the Ramsey property.
        """
        if key[0] - 63 != self.spec.n:
            raise ValueError(f"key order {key[0] - 63} does not match spec n={self.spec.n}")
        if key in self.members:
            return False
        e = graph6_edge_count(key)
        if not self.spec.admits_edges(e):
            raise ValueError(f"edge count {e} outside spec window")
        self.members.add(key)
        self.counts[e] = self.counts.get(e, 0) + 1
        return True

    def insert(self, g: Graph) -> bool:
        """Validate a graph against the spec, canonicalize, insert."""
        from .canon import canonical_key

        if g.n != self.spec.n:
            raise ValueError(f"graph order {g.n} does not match spec n={self.spec.n}")
        if not self.spec.admits_edges(g.edge_count()):
            raise ValueError("edge count outside spec window")
        if not is_ramsey(g, self.spec.rt):
            raise ValueError("graph violates the Ramsey property of the spec")
        return self.insert_key(canonical_key(g))

    def graphs(self):
        for key in self:
            yield graph6_decode(key)

    def counts_by_edges(self):
        return dict(sorted(self.counts.items()))

    def edge_range(self):
        """(min, max) edge count over members; None when empty."""
        if not self.counts:
            return None
        return min(self.counts), max(self.counts)

    def merge(self, other: "Catalog") -> "Catalog":
        if self.spec != other.spec:
            raise ValueError(f"cannot merge {self.spec} with {other.spec}")
        out = Catalog(self.spec, provenance={"merge_of": [self.provenance, other.provenance]})
        out.members = self.members | other.members
        for key in out.members:
            e = graph6_edge_count(key)
            out.counts[e] = out.counts.get(e, 0) + 1
        return out

    # -- persistence -------------------------------------------------------

    def save(self, root, shard_by_edges=False):
        """Write under root/<spec dirname>; returns the directory path."""
        path = os.path.join(root, self.spec.dirname())
        os.makedirs(path, exist_ok=True)
        lo_hi = self.edge_range()
        meta = {
            "format": CATALOG_FORMAT,
            "s": self.spec.rt.s,
            "t": self.spec.rt.t,
            "n": self.spec.n,
            "e_min": self.spec.e_min,
            "e_max": self.spec.e_max,
            "member_count": len(self.members),
            "edge_range": list(lo_hi) if lo_hi else None,
            "counts": {str(k): v for k, v in sorted(self.counts.items())},
            "provenance": self.provenance,
        }
        if shard_by_edges:
            shards = {}
            for key in sorted(self.members):
                shards.setdefault(graph6_edge_count(key), []).append(key)
            meta["shards"] = [f"e{k}.g6" for k in sorted(shards)]
            for k, keys in shards.items():
                with open(os.path.join(path, f"e{k}.g6"), "wb") as fh:
                    fh.write(b"\n".join(keys) + b"\n" if keys else b"")
        else:
            meta["shards"] = ["members.g6"]
            with open(os.path.join(path, "members.g6"), "wb") as fh:
                data = b"\n".join(sorted(self.members))
                fh.write(data + b"\n" if data else b"")
        with open(os.path.join(path, "meta.json"), "w") as fh:
            json.dump(meta, fh, indent=1, sort_keys=True)
            fh.write("\n")
        return path


def load_catalog(path) -> Catalog:
    """Read a saved catalog; verifies counts against the member lines."""
    with open(os.path.join(path, "meta.json")) as fh:
        meta = json.load(fh)
    if meta.get("format") != CATALOG_FORMAT:
        raise ValueError(f"unsupported catalog format {meta.get('format')!r}")
    spec = CensusSpec(
        rt=RamseyType(meta["s"], meta["t"]),
        n=meta["n"],
        e_min=meta["e_min"],
        e_max=meta["e_max"],
    )
    cat = Catalog(spec, provenance=meta.get("provenance"))
    for shard in meta["shards"]:
        with open(os.path.join(path, shard), "rb") as fh:
            for line in fh.read().splitlines():
                if line and not cat.insert_key(line):
                    raise ValueError(f"duplicate member {line!r} in {path}")
    if len(cat) != meta["member_count"]:
        raise ValueError(f"member_count {meta['member_count']} != {len(cat)} lines")
    want_counts = {int(k): v for k, v in meta["counts"].items()}
    if want_counts != cat.counts:
        raise ValueError("edge-count tallies do not match the stored counts")
    return cat


def verify_catalog(cat: Catalog, deep=False):
    """Recheck catalog invariants; deep also recanonicalizes every member.

    Returns the number of members checked; raises on the first violation.
    """
    from .canon import canonical_key

    tally = {}
    for key in cat.members:
        e = graph6_edge_count(key)
        tally[e] = tally.get(e, 0) + 1
        if not cat.spec.admits_edges(e):
            raise ValueError(f"member {key!r} outside edge window")
        if deep:
            g = graph6_decode(key)
            if g.n != cat.spec.n:
                raise ValueError(f"member {key!r} has wrong order")
            if not is_ramsey(g, cat.spec.rt):
                raise ValueError(f"member {key!r} violates the Ramsey property")
            if canonical_key(g) != key:
                raise ValueError(f"member {key!r} is not canonical")
    if tally != cat.counts:
        raise ValueError("counts drifted from members")
    return len(cat)
