"""The twincut graphs G_k and their structured trees T_k.

``G_1`` is a single vertex.  For ``k >= 2``, ``T_k`` has ``k - 1`` levels
(root at level 1) and each node at level ``i < k - 1`` gets one child per
vertex of ``G_{i+1}``, with ``G_{i+1}`` as the graph on those children.
``G_k`` is the realization of ``T_k``.
"""

from __future__ import annotations

from functools import lru_cache

from twincut.graph import Graph, GraphError
from twincut.tree import Address, Path, StructuredTree, realize

DEFAULT_MAX_K = 6


class FeasibilityError(ValueError):
    """Raised when a requested G_k is too large to materialize."""


def level_sizes(k: int) -> list[int]:
    """Number of tree nodes on each level 1..k-1 of T_k."""
    sizes = [1]
    for i in range(1, k - 1):
        sizes.append(sizes[-1] * vertex_count(i + 1))
    return sizes


@lru_cache(maxsize=None)
def vertex_count(k: int) -> int:
    """|V(G_k)|, exact for every k (big integers)."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if k == 1:
        return 1
    sizes = level_sizes(k)
    return sum(sizes) + sizes[-1]


@lru_cache(maxsize=None)
def edge_count(k: int) -> int:
    """|E(G_k)|: edges of every internal copy plus k-1 per branch vertex."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if k == 1:
        return 0
    sizes = level_sizes(k)
    inner = sum(sizes[i - 1] * edge_count(i + 1) for i in range(1, k - 1))
    return inner + sizes[-1] * (k - 1)


def _check_feasible(k: int, max_k: int) -> None:
    if k > max_k:
        raise FeasibilityError(
            f"G_{k} has {vertex_count(k)} vertices; refusing to build beyond k={max_k}"
        )


@lru_cache(maxsize=None)
def _tree(k: int) -> StructuredTree:
    graphs: dict[Path, Graph] = {}
    level: list[Path] = [()]
    for i in range(1, k - 1):
        part = _graph(i + 1)
        nxt = []
        for p in level:
            graphs[p] = part
            nxt.extend(p + (j,) for j in range(part.n))
        level = nxt
    return StructuredTree(graphs)


@lru_cache(maxsize=None)
def _graph(k: int) -> Graph:
    if k == 1:
        return Graph(1, [], labels=[Address("T", ())])
    return realize(_tree(k))


def twincut_tree(k: int, max_k: int = DEFAULT_MAX_K) -> StructuredTree:
    """The structured tree T_k (k >= 2).

    All nodes on one level share a single ``G_{i+1}`` instance as their graph.
    """
    if k < 2:
        raise ValueError(f"T_k exists only for k >= 2, got {k}")
    _check_feasible(k, max_k)
    return _tree(k)


def twincut_graph(k: int, max_k: int = DEFAULT_MAX_K) -> Graph:
    """G_k with :class:`Address` labels; G_1 is the single vertex ``T:``."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    _check_feasible(k, max_k)
    return _graph(k)


def address_of(g: Graph, v: int) -> Address:
    labels = g.labels
    if labels is None or not (0 <= v < g.n):
        raise GraphError("vertex does not belong to a twincut graph")
    a = labels[v]
    if isinstance(a, str):
        a = Address.parse(a)
    if not isinstance(a, Address):
        raise GraphError("graph is not labelled with twincut addresses")
    return a


def vertex_of(g: Graph, address: Address | str) -> int:
    if g.labels is None:
        raise GraphError("graph is not labelled with twincut addresses")
    if isinstance(g.labels[0], str):
        return g.index_of(str(address))
    if isinstance(address, str):
        address = Address.parse(address)
    return g.index_of(address)


def level_of(path: Path) -> int:
    """Tree level of a node (root is level 1)."""
    return len(path) + 1


def infer_k(g: Graph) -> int:
    """Recover k from a twincut-labelled graph by its branch length."""
    if g.n == 1:
        return 1
    a = address_of(g, g.n - 1)
    if not a.is_branch:
        raise GraphError("graph is not labelled with twincut addresses")
    return len(a.path) + 2
