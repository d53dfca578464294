"""Structured trees and their realizations.

A structured tree is a rooted, ordered tree together with a graph on the
children of every internal node.  Its realization has one vertex per tree
node plus one *branch vertex* per root-to-leaf path; the branch vertex is
adjacent to every node of its path, and siblings are adjacent exactly as in
their parent's graph.  Tree edges themselves are not realized.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterator, Mapping

from twincut.graph import Graph, GraphError

Path = tuple[int, ...]


class TreeError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Address:
    """Name of a realization vertex: tree node ``T`` or branch vertex ``B``, by path."""

    kind: str
    path: Path

    def __post_init__(self) -> None:
        if self.kind not in ("T", "B"):
            raise ValueError(f"address kind must be 'T' or 'B', not {self.kind!r}")

    @property
    def is_branch(self) -> bool:
        return self.kind == "B"

    def __str__(self) -> str:
        return f"{self.kind}:" + ".".join(map(str, self.path))

    @classmethod
    def parse(cls, text: str) -> Address:
        kind, sep, rest = text.partition(":")
        if not sep:
            raise ValueError(f"malformed address {text!r}")
        path = tuple(int(x) for x in rest.split(".")) if rest else ()
        return cls(kind, path)


def tree_vertex(*path: int) -> Address:
    return Address("T", tuple(path))


def branch_vertex(*path: int) -> Address:
    return Address("B", tuple(path))


@dataclass(frozen=True)
class Branch:
    """Root-to-leaf node sequence."""

    nodes: tuple[Path, ...]

    @property
    def leaf(self) -> Path:
        return self.nodes[-1]

    def __len__(self) -> int:
        return len(self.nodes)


def _path_key(p: Path) -> str:
    return ".".join(map(str, p))


def _parse_path(s: str) -> Path:
    return tuple(int(x) for x in s.split(".")) if s else ()


class StructuredTree:
    """Rooted ordered tree with a graph on the children of each internal node.

    ``internal_graphs`` maps the path of every internal node to a graph on
    child indices ``0..d-1``; the number of children of a node is the vertex
    count of its graph, and nodes without an entry are leaves.
    """

    __slots__ = ("_graphs", "_nodes", "_leaves")

    def __init__(self, internal_graphs: Mapping[Path, Graph]) -> None:
        graphs = {tuple(p): g for p, g in internal_graphs.items()}
        for p, g in graphs.items():
            if g.n == 0:
                raise TreeError(f"internal node {p} has an empty graph")
        # Walk from the root; every internal node must be reachable.
        nodes: list[Path] = []
        level: list[Path] = [()]
        while level:
            nodes.extend(level)
            nxt = []
            for p in level:
                g = graphs.get(p)
                if g is not None:
                    nxt.extend(p + (i,) for i in range(g.n))
            level = nxt
        if len(graphs) > 0:
            reached = set(nodes)
            stray = [p for p in graphs if p not in reached]
            if stray:
                raise TreeError(f"internal graph at {min(stray)} is not attached to the tree")
        self._graphs = graphs
        self._nodes = tuple(nodes)
        self._leaves = tuple(sorted(p for p in nodes if p not in graphs))

    @property
    def nodes(self) -> tuple[Path, ...]:
        """All nodes in BFS order (root first, children in order)."""
        return self._nodes

    @property
    def leaves(self) -> tuple[Path, ...]:
        """Leaves in depth-first order."""
        return self._leaves

    @property
    def internal_graphs(self) -> Mapping[Path, Graph]:
        return self._graphs

    def children(self, p: Path) -> list[Path]:
        g = self._graphs.get(p)
        return [] if g is None else [p + (i,) for i in range(g.n)]

    def is_leaf(self, p: Path) -> bool:
        return p not in self._graphs

    def graph_at(self, p: Path) -> Graph:
        return self._graphs[p]

    def subtree(self, p: Path) -> StructuredTree:
        k = len(p)
        return StructuredTree({q[k:]: g for q, g in self._graphs.items() if q[:k] == p})

    def branches(self) -> list[Branch]:
        return list(self.iter_branches())

    def iter_branches(self) -> Iterator[Branch]:
        for leaf in self._leaves:
            yield Branch(tuple(leaf[:i] for i in range(len(leaf) + 1)))

    def __len__(self) -> int:
        return len(self._nodes)

    def __repr__(self) -> str:
        return f"StructuredTree(nodes={len(self._nodes)}, leaves={len(self._leaves)})"

    # -- JSON --------------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        internal = [p for p in self._nodes if p in self._graphs]
        return {
            "children": {_path_key(p): self._graphs[p].n for p in internal},
            "graphs": {_path_key(p): [list(e) for e in self._graphs[p].edges] for p in internal},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict()) + "\n"

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any]) -> StructuredTree:
        try:
            counts = obj["children"]
            edges = obj["graphs"]
            return cls({_parse_path(k): Graph(d, edges.get(k, [])) for k, d in counts.items()})
        except (KeyError, TypeError, AttributeError, GraphError) as exc:
            raise TreeError(f"bad structured-tree JSON: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> StructuredTree:
        return cls.from_dict(json.loads(text))


def single_node_tree() -> StructuredTree:
    return StructuredTree({})


def branches(t: StructuredTree) -> list[Branch]:
    return t.branches()


def realize(t: StructuredTree) -> Graph:
    """The realization of ``t``.

    Vertex ids: tree nodes in BFS order, then branch vertices in DFS leaf
    order.  Labels are :class:`Address` values.
    """
    nodes = t.nodes
    index = {p: i for i, p in enumerate(nodes)}
    edges: list[tuple[int, int]] = []
    for z, g in t.internal_graphs.items():
        for a, b in g.edges:
            edges.append((index[z + (a,)], index[z + (b,)]))
    labels = [Address("T", p) for p in nodes]
    bid = len(nodes)
    for leaf in t.leaves:
        for i in range(len(leaf) + 1):
            edges.append((index[leaf[:i]], bid))
        labels.append(Address("B", leaf))
        bid += 1
    return Graph(bid, edges, labels=labels)
