"""graph6 serialization (short form, n <= 62).

Layout: one byte n+63, then the upper triangle of the adjacency matrix in
column-major order ((0,1), (0,2), (1,2), (0,3), ...) packed big-endian into
6-bit groups, each +63.  Trailing pad bits must be zero.
"""

from __future__ import annotations

from .graphs import Graph


def graph6_encode(g: Graph) -> bytes:
    if g.n > 62:
        raise ValueError(f"short-form graph6 holds at most 62 vertices, got {g.n}")
    out = [g.n + 63]
    bits = 0
    nbits = 0
    for j in range(1, g.n):
        col = g.adj[j]
        for i in range(j):
            bits = bits << 1 | (col >> i & 1)
            nbits += 1
            if nbits == 6:
                out.append(bits + 63)
                bits = 0
                nbits = 0
    if nbits:
        out.append((bits << (6 - nbits)) + 63)
    return bytes(out)


def graph6_decode(data: bytes | str) -> Graph:
    if isinstance(data, str):
        data = data.encode("ascii")
    if not data:
        raise ValueError("empty graph6 string")
    n = data[0] - 63
    if not 0 <= n <= 62:
        raise ValueError(f"unsupported graph6 header byte {data[0]}")
    npairs = n * (n - 1) // 2
    want = 1 + (npairs + 5) // 6
    if len(data) != want:
        raise ValueError(f"graph6 for n={n} must be {want} bytes, got {len(data)}")
    rows = [0] * n
    idx = 0
    for c in data[1:]:
        if not 63 <= c <= 126:
            raise ValueError(f"graph6 byte {c} out of range")
        group = c - 63
        for shift in (5, 4, 3, 2, 1, 0):
            if idx >= npairs:
                if group >> shift & 1:
                    raise ValueError("nonzero padding bits")
                continue
            if group >> shift & 1:
                i, j = _pair(idx)
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            idx += 1
    return Graph(n, rows)


def _pair(idx):
    # inverse of column-major upper-triangle enumeration
    j = 1
    while idx >= j:
        idx -= j
        j += 1
    return idx, j


def graph6_edge_count(data: bytes) -> int:
    """Edge count straight from the encoded bytes, without building a Graph."""
    if isinstance(data, str):
        data = data.encode("ascii")
    total = 0
    for c in data[1:]:
        total += (c - 63).bit_count()
    return total
