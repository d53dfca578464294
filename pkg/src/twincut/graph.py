"""Immutable simple undirected graphs, small-graph isomorphism and file formats."""

from __future__ import annotations

import json
from collections import Counter
from typing import Any, Hashable, Iterable, Sequence

Edge = tuple[int, int]

DEFAULT_ISO_CAP = 64


class GraphError(ValueError):
    """Raised for malformed graphs, bad vertex references and decode failures."""


class IsomorphismRefused(RuntimeError):
    """Raised when an isomorphism query exceeds the configured size cap."""


class Graph:
    """A simple undirected graph on the dense vertex ids ``0..n-1``.

    Optional ``labels`` give each vertex a stable external name and ``origin``
    maps each vertex back to its id in the graph it was derived from.
    Equality and hashing only look at ``n`` and the edge set.
    """

    __slots__ = ("_n", "_edges", "_adj", "_masks", "_labels", "_origin", "_label_index")

    def __init__(
        self,
        n: int,
        edges: Iterable[Sequence[int]] = (),
        labels: Sequence[Hashable] | None = None,
        origin: Sequence[int] | None = None,
    ) -> None:
        if n < 0:
            raise GraphError(f"negative vertex count {n}")
        adj: list[set[int]] = [set() for _ in range(n)]
        for e in edges:
            u, v = e
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            adj[u].add(v)
            adj[v].add(u)
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != n:
                raise GraphError(f"{len(labels)} labels for {n} vertices")
        if origin is not None:
            origin = tuple(origin)
            if len(origin) != n:
                raise GraphError(f"{len(origin)} origin entries for {n} vertices")
        self._n = n
        self._adj = tuple(frozenset(a) for a in adj)
        self._edges = tuple(sorted((u, v) for u in range(n) for v in adj[u] if u < v))
        self._masks: tuple[int, ...] | None = None
        self._labels = labels
        self._origin = origin
        self._label_index: dict[Hashable, int] | None = None

    # -- basic queries -------------------------------------------------

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> tuple[Edge, ...]:
        """Edges as ``(u, v)`` with ``u < v``, sorted lexicographically."""
        return self._edges

    @property
    def vertices(self) -> range:
        return range(self._n)

    @property
    def labels(self) -> tuple[Hashable, ...] | None:
        return self._labels

    @property
    def origin(self) -> tuple[int, ...] | None:
        return self._origin

    def adj(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    @property
    def masks(self) -> tuple[int, ...]:
        """Neighborhood bitsets; bit ``u`` of ``masks[v]`` is set iff ``uv`` is an edge.

        Built on first use, so very large graphs that never need them pay nothing.
        """
        if self._masks is None:
            masks = []
            for nbrs in self._adj:
                bits = 0
                for u in nbrs:
                    bits |= 1 << u
                masks.append(bits)
            self._masks = tuple(masks)
        return self._masks

    def label(self, v: int) -> Hashable:
        return self._labels[v] if self._labels is not None else v

    def index_of(self, label: Hashable) -> int:
        if self._labels is None:
            raise GraphError("graph carries no label table")
        if self._label_index is None:
            self._label_index = {lab: i for i, lab in enumerate(self._labels)}
        try:
            return self._label_index[label]
        except KeyError:
            raise GraphError(f"no vertex labelled {label!r}") from None

    def _check_vertex(self, v: int) -> None:
        if not (isinstance(v, int) and 0 <= v < self._n):
            raise GraphError(f"unknown vertex {v!r}")

    # -- derived graphs ------------------------------------------------

    def induced_subgraph(self, vertices: Iterable[int]) -> Graph:
        """Graph induced on ``vertices``, relabelled densely in ascending id order.

        ``origin`` of the result maps each new id back to its id here.
        """
        keep = sorted(set(vertices))
        for v in keep:
            self._check_vertex(v)
        pos = {v: i for i, v in enumerate(keep)}
        edges = [(pos[u], pos[w]) for u in keep for w in self._adj[u] if w in pos and u < w]
        labels = [self._labels[v] for v in keep] if self._labels is not None else None
        return Graph(len(keep), edges, labels=labels, origin=keep)

    def delete_edge(self, u: int, v: int) -> Graph:
        if not self.has_edge(u, v):
            raise GraphError(f"({u}, {v}) is not an edge")
        e = (min(u, v), max(u, v))
        return Graph(
            self._n,
            [f for f in self._edges if f != e],
            labels=self._labels,
            origin=tuple(range(self._n)),
        )

    def add_edge(self, u: int, v: int) -> Graph:
        return Graph(self._n, self._edges + ((u, v),), labels=self._labels, origin=tuple(range(self._n)))

    def permuted(self, perm: Sequence[int]) -> Graph:
        """Copy with vertex ``v`` renamed to ``perm[v]``."""
        if sorted(perm) != list(range(self._n)):
            raise GraphError("not a permutation of the vertex set")
        labels = None
        if self._labels is not None:
            labels = [None] * self._n
            for v, p in enumerate(perm):
                labels[p] = self._labels[v]
        origin = [0] * self._n
        for v, p in enumerate(perm):
            origin[p] = v
        return Graph(self._n, [(perm[u], perm[v]) for u, v in self._edges], labels=labels, origin=origin)

    def components(self, removed: Iterable[int] = ()) -> list[list[int]]:
        """Connected components of the graph minus ``removed``, each sorted, ordered by minimum."""
        seen = set(removed)
        comps = []
        for s in range(self._n):
            if s in seen:
                continue
            seen.add(s)
            comp = [s]
            stack = [s]
            while stack:
                x = stack.pop()
                for y in self._adj[x]:
                    if y not in seen:
                        seen.add(y)
                        comp.append(y)
                        stack.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    # -- dunder --------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._n, self._edges))

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, m={self.m})"

    def __setattr__(self, name: str, value: Any) -> None:
        if name in Graph.__slots__ and not hasattr(self, name):
            object.__setattr__(self, name, value)
        elif name in ("_masks", "_label_index"):
            object.__setattr__(self, name, value)
        else:
            raise AttributeError("Graph is immutable")


def build_graph(n: int, edge_list: Iterable[Sequence[int]]) -> Graph:
    return Graph(n, edge_list)


def induced_subgraph(g: Graph, s: Iterable[int]) -> Graph:
    return g.induced_subgraph(s)


# -- named small graphs ------------------------------------------------


def complete_graph(n: int) -> Graph:
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cube_graph() -> Graph:
    """The 3-cube: vertices are 3-bit words, adjacent when they differ in one bit."""
    return Graph(8, [(u, u ^ (1 << b)) for u in range(8) for b in range(3) if u < u ^ (1 << b)])


def disjoint_union(g: Graph, h: Graph) -> Graph:
    return Graph(g.n + h.n, list(g.edges) + [(u + g.n, v + g.n) for u, v in h.edges])


# -- isomorphism ---------------------------------------------------------


def _refine(graphs: Sequence[Graph]) -> list[list[int]]:
    """Joint colour refinement so colours are comparable across ``graphs``."""
    colors = [[g.degree(v) for v in g.vertices] for g in graphs]
    n_classes = -1
    while True:
        sigs = [
            [(col[v], tuple(sorted(col[u] for u in g.adj(v)))) for v in g.vertices]
            for g, col in zip(graphs, colors)
        ]
        table = {s: i for i, s in enumerate(sorted({s for per in sigs for s in per}))}
        colors = [[table[s] for s in per] for per in sigs]
        if len(table) == n_classes:
            return colors
        n_classes = len(table)


def find_isomorphism(g1: Graph, g2: Graph, max_vertices: int = DEFAULT_ISO_CAP) -> list[int] | None:
    """Return ``phi`` with ``phi[v]`` in ``g2`` for each ``v`` in ``g1``, or None."""
    if g1.n != g2.n or g1.m != g2.m:
        return None
    if max(g1.n, g2.n) > max_vertices:
        raise IsomorphismRefused(f"isomorphism test capped at {max_vertices} vertices")
    if sorted(g1.degree(v) for v in g1.vertices) != sorted(g2.degree(v) for v in g2.vertices):
        return None
    c1, c2 = _refine([g1, g2])
    if Counter(c1) != Counter(c2):
        return None
    n = g1.n
    by_color: dict[int, list[int]] = {}
    for v in g2.vertices:
        by_color.setdefault(c2[v], []).append(v)

    # Order g1 so each vertex after the first in its component has a mapped neighbour;
    # rarest colour classes first.
    rarity = Counter(c1)
    order: list[int] = []
    placed = [False] * n
    for _ in range(n):
        best = None
        for v in g1.vertices:
            if placed[v]:
                continue
            key = (-sum(placed[u] for u in g1.adj(v)), rarity[c1[v]], v)
            if best is None or key < best[0]:
                best = (key, v)
        placed[best[1]] = True
        order.append(best[1])

    m1, m2 = g1.masks, g2.masks
    phi = [-1] * n
    used = [False] * n

    def extend(i: int) -> bool:
        if i == n:
            return True
        v = order[i]
        for w in by_color[c1[v]]:
            if used[w]:
                continue
            ok = True
            for u in order[:i]:
                if ((m1[v] >> u) & 1) != ((m2[w] >> phi[u]) & 1):
                    ok = False
                    break
            if not ok:
                continue
            phi[v] = w
            used[w] = True
            if extend(i + 1):
                return True
            used[w] = False
            phi[v] = -1
        return False

    return phi if extend(0) else None


def is_isomorphic(g1: Graph, g2: Graph, max_vertices: int = DEFAULT_ISO_CAP) -> bool:
    return find_isomorphism(g1, g2, max_vertices) is not None


# -- graph6 ------------------------------------------------------------


def _size_field(n: int) -> bytes:
    if n < 63:
        return bytes([n + 63])
    if n < 258048:
        return b"~" + bytes(((n >> s) & 63) + 63 for s in (12, 6, 0))
    if n < 1 << 36:
        return b"~~" + bytes(((n >> s) & 63) + 63 for s in (30, 24, 18, 12, 6, 0))
    raise GraphError(f"graph6 cannot encode n={n}")


def encode_graph6(g: Graph) -> bytes:
    """graph6 bytes of ``g`` without header or trailing newline."""
    out = bytearray(_size_field(g.n))
    masks = g.masks if g.n <= 4096 else None
    acc = nbits = 0
    for j in range(1, g.n):
        row = masks[j] if masks is not None else None
        for i in range(j):
            bit = (row >> i) & 1 if row is not None else int(g.has_edge(i, j))
            acc = (acc << 1) | bit
            nbits += 1
            if nbits == 6:
                out.append(acc + 63)
                acc = nbits = 0
    if nbits:
        out.append((acc << (6 - nbits)) + 63)
    return bytes(out)


def decode_graph6(data: bytes | str) -> Graph:
    if isinstance(data, str):
        data = data.encode("ascii")
    data = data.strip()
    if data.startswith(b">>graph6<<"):
        data = data[len(b">>graph6<<"):]
    if not data or any(not 63 <= c <= 126 for c in data):
        raise GraphError("graph6 data empty or outside the printable range 63..126")
    vals = [c - 63 for c in data]
    if vals[0] != 63:
        n, body = vals[0], vals[1:]
    elif len(vals) >= 2 and vals[1] == 63:
        if len(vals) < 8:
            raise GraphError("truncated graph6 size field")
        n = 0
        for x in vals[2:8]:
            n = (n << 6) | x
        body = vals[8:]
    else:
        if len(vals) < 4:
            raise GraphError("truncated graph6 size field")
        n = (vals[1] << 12) | (vals[2] << 6) | vals[3]
        body = vals[4:]
    nbits = n * (n - 1) // 2
    if len(body) != (nbits + 5) // 6:
        raise GraphError(f"graph6 body has {len(body)} chars, expected {(nbits + 5) // 6} for n={n}")
    pad = len(body) * 6 - nbits
    if pad and body[-1] & ((1 << pad) - 1):
        raise GraphError("graph6 padding bits are not zero")
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            if (body[k // 6] >> (5 - k % 6)) & 1:
                edges.append((i, j))
            k += 1
    return Graph(n, edges)


# -- DIMACS and JSON ---------------------------------------------------


def encode_dimacs(g: Graph) -> str:
    lines = [f"p edge {g.n} {g.m}"]
    lines += [f"e {u + 1} {v + 1}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def decode_dimacs(text: str) -> Graph:
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise GraphError(f"line {lineno}: bad problem line {raw!r}")
            n = int(parts[2])
        elif parts[0] == "e":
            if n is None or len(parts) != 3:
                raise GraphError(f"line {lineno}: bad edge line {raw!r}")
            edges.append((int(parts[1]) - 1, int(parts[2]) - 1))
        else:
            raise GraphError(f"line {lineno}: unknown record {raw!r}")
    if n is None:
        raise GraphError("missing 'p edge' line")
    return Graph(n, edges)


def graph_to_dict(g: Graph) -> dict[str, Any]:
    return {
        "n": g.n,
        "edges": [list(e) for e in g.edges],
        "labels": [str(x) for x in g.labels] if g.labels is not None else None,
    }


def encode_json(g: Graph) -> str:
    return json.dumps(graph_to_dict(g)) + "\n"


def decode_json(text: str) -> Graph:
    try:
        obj = json.loads(text)
        return Graph(obj["n"], obj["edges"], labels=obj.get("labels"))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise GraphError(f"bad graph JSON: {exc}") from exc


def load_graph(data: bytes, fmt: str = "auto") -> Graph:
    """Parse a graph file; ``auto`` sniffs JSON, then DIMACS, then graph6."""
    if fmt == "auto":
        tokens = data.split(None, 1)
        first = tokens[0] if tokens else b""
        if first.startswith(b"{"):
            fmt = "json"
        elif first in (b"p", b"c"):
            fmt = "dimacs"
        else:
            fmt = "graph6"
    if fmt == "json":
        return decode_json(data.decode())
    if fmt == "dimacs":
        return decode_dimacs(data.decode())
    if fmt == "graph6":
        return decode_graph6(data)
    raise GraphError(f"unknown graph format {fmt!r}")


def dump_graph(g: Graph, fmt: str) -> bytes:
    if fmt == "graph6":
        return encode_graph6(g) + b"\n"
    if fmt == "dimacs":
        return encode_dimacs(g).encode()
    if fmt == "json":
        return encode_json(g).encode()
    raise GraphError(f"unknown graph format {fmt!r}")
