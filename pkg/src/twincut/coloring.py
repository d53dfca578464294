"""Colorings: verification, exact chromatic number, CNF export and the
explicit colorings of twincut graphs (constructive, rainbow branch,
unique top colour, edge deletion)."""

from __future__ import annotations

import os
import shutil
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Mapping, Sequence

from twincut.construction import _graph, _tree
from twincut.graph import Graph, GraphError
from twincut.tree import Branch, Path

Assignment = Sequence[int]


class ColoringError(ValueError):
    pass


class ConstructionFault(RuntimeError):
    """An explicit construction produced something it should not have."""


class BudgetExceeded(Exception):
    pass


@dataclass(frozen=True)
class Coloring:
    """Colour per vertex id, colours numbered from 1."""

    assignment: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "assignment", tuple(self.assignment))

    @property
    def palette(self) -> int:
        return max(self.assignment, default=0)

    def __getitem__(self, v: int) -> int:
        return self.assignment[v]

    def __len__(self) -> int:
        return len(self.assignment)

    def permuted_colors(self, perm: Mapping[int, int]) -> Coloring:
        return Coloring(tuple(perm[c] for c in self.assignment))

    def to_dict(self, g: Graph) -> dict[str, Any]:
        return {
            "palette": self.palette,
            "assignment": {str(g.label(v)): c for v, c in enumerate(self.assignment)},
        }

    @classmethod
    def from_dict(cls, g: Graph, obj: Mapping[str, Any]) -> Coloring:
        """Inverse of :meth:`to_dict`; keys may be vertex labels or decimal ids."""
        names = {str(g.label(v)): v for v in g.vertices}
        colors: list[int | None] = [None] * g.n
        for key, c in obj["assignment"].items():
            v = names.get(key)
            if v is None:
                try:
                    v = int(key)
                except ValueError:
                    raise ColoringError(f"unknown vertex {key!r}") from None
                if not 0 <= v < g.n:
                    raise ColoringError(f"unknown vertex {key!r}")
            colors[v] = c
        missing = [v for v, c in enumerate(colors) if c is None]
        if missing:
            raise ColoringError(f"coloring is partial; vertex {g.label(missing[0])} has no colour")
        return cls(tuple(colors))


def _check_total(g: Graph, c: Coloring | Assignment) -> tuple[int, ...]:
    a = c.assignment if isinstance(c, Coloring) else tuple(c)
    if len(a) != g.n:
        raise ColoringError(f"coloring covers {len(a)} of {g.n} vertices")
    for v, x in enumerate(a):
        if not isinstance(x, int) or x < 1:
            raise ColoringError(f"vertex {v} has invalid colour {x!r}")
    return a


def is_proper(g: Graph, c: Coloring | Assignment) -> bool:
    a = _check_total(g, c)
    return all(a[u] != a[v] for u, v in g.edges)


def monochromatic_edge(g: Graph, c: Coloring | Assignment) -> tuple[int, int] | None:
    a = _check_total(g, c)
    for u, v in g.edges:
        if a[u] == a[v]:
            return (u, v)
    return None


# -- exact chromatic number ------------------------------------------------


@dataclass
class Budget:
    """Search limits; ``None`` means unlimited."""

    max_nodes: int | None = None
    time_limit: float | None = None

    @property
    def limited(self) -> bool:
        return self.max_nodes is not None or self.time_limit is not None

    @classmethod
    def from_env(cls) -> Budget:
        nodes = os.environ.get("TWINCUT_NODE_LIMIT")
        secs = os.environ.get("TWINCUT_TIME_LIMIT")
        return cls(int(nodes) if nodes else None, float(secs) if secs else None)


@dataclass
class ChiResult:
    """Outcome of :func:`chromatic_number`.

    ``chi`` is None when the budget ran out; ``lower``/``upper`` then carry the
    best proven bounds and ``witness`` a colouring with ``upper`` colours.
    """

    chi: int | None
    lower: int
    upper: int
    witness: Coloring
    nodes: int = 0
    elapsed: float = 0.0

    @property
    def exact(self) -> bool:
        return self.chi is not None

    def to_dict(self, g: Graph) -> dict[str, Any]:
        return {
            "status": "exact" if self.exact else "unknown",
            "chi": self.chi,
            "lower": self.lower,
            "upper": self.upper,
            "nodes": self.nodes,
            "elapsed": round(self.elapsed, 6),
            "witness": self.witness.to_dict(g),
        }


@dataclass
class _Search:
    budget: Budget
    started: float = field(default_factory=time.perf_counter)
    nodes: int = 0

    def tick(self) -> None:
        self.nodes += 1
        b = self.budget
        if b.max_nodes is not None and self.nodes > b.max_nodes:
            raise BudgetExceeded
        if b.time_limit is not None and self.nodes % 256 == 0:
            if time.perf_counter() - self.started > b.time_limit:
                raise BudgetExceeded


def greedy_clique(g: Graph) -> list[int]:
    """Clique grown greedily from a highest-degree vertex."""
    if g.n == 0:
        return []
    start = max(g.vertices, key=lambda v: (g.degree(v), -v))
    clique = [start]
    cand = set(g.adj(start))
    while cand:
        v = max(cand, key=lambda u: (g.degree(u), -u))
        clique.append(v)
        cand &= g.adj(v)
    return clique


def dsatur_greedy(g: Graph) -> list[int]:
    colors = [0] * g.n
    sat: list[set[int]] = [set() for _ in g.vertices]
    uncolored = set(g.vertices)
    while uncolored:
        v = max(uncolored, key=lambda u: (len(sat[u]), g.degree(u), -u))
        c = 1
        while c in sat[v]:
            c += 1
        colors[v] = c
        uncolored.discard(v)
        for u in g.adj(v):
            sat[u].add(c)
    return colors


def _peel(g: Graph, q: int) -> tuple[list[int], list[int]]:
    """Split off vertices that reach degree < q; a q-colouring of the core extends to them."""
    deg = [g.degree(v) for v in g.vertices]
    removed = [False] * g.n
    stack = [v for v in g.vertices if deg[v] < q]
    for v in stack:
        removed[v] = True
    order = []
    while stack:
        v = stack.pop()
        order.append(v)
        for u in g.adj(v):
            if not removed[u]:
                deg[u] -= 1
                if deg[u] < q:
                    removed[u] = True
                    stack.append(u)
    core = [v for v in g.vertices if not removed[v]]
    return core, order


def _backtrack(g: Graph, core: list[int], q: int, search: _Search) -> list[int] | None:
    """DSATUR backtracking restricted to ``core``; returns a colour list or None."""
    if not core:
        return [0] * g.n
    masks = g.masks
    in_core = 0
    for v in core:
        in_core |= 1 << v
    deg = {v: bin(masks[v] & in_core).count("1") for v in core}
    colors = [0] * g.n
    sat = [0] * g.n  # bit c-1 set when colour c is on a neighbour
    full = (1 << q) - 1

    def assign(v: int, c: int) -> list[int]:
        """Colour v and return the uncoloured neighbours whose saturation grew."""
        colors[v] = c
        bit = 1 << (c - 1)
        touched = []
        rest = masks[v] & in_core
        while rest:
            low = rest & -rest
            u = low.bit_length() - 1
            rest ^= low
            if colors[u] == 0 and not sat[u] & bit:
                sat[u] |= bit
                touched.append(u)
        return touched

    def undo(v: int, c: int, touched: list[int]) -> None:
        colors[v] = 0
        bit = ~(1 << (c - 1))
        for u in touched:
            sat[u] &= bit

    uncolored = set(core)
    # Fix colours 1 and 2 on the endpoints of one core edge.
    a = max(core, key=lambda v: (deg[v], -v))
    nbrs = [u for u in core if (masks[a] >> u) & 1]
    used = 0
    if nbrs and q >= 2:
        b = max(nbrs, key=lambda v: (deg[v], -v))
        for v, c in ((a, 1), (b, 2)):
            assign(v, c)
            uncolored.discard(v)
        used = 2
        if any(sat[u] == full for u in uncolored):
            return None

    def solve(used: int) -> bool:
        if not uncolored:
            return True
        search.tick()
        v = max(uncolored, key=lambda u: (bin(sat[u]).count("1"), deg[u], -u))
        uncolored.discard(v)
        top = min(used + 1, q)
        for c in range(1, top + 1):
            if sat[v] & (1 << (c - 1)):
                continue
            touched = assign(v, c)
            if all(sat[u] != full for u in touched) and solve(max(used, c)):
                return True
            undo(v, c, touched)
        uncolored.add(v)
        return False

    limit = sys.getrecursionlimit()
    if limit < len(core) + 100:
        sys.setrecursionlimit(len(core) + 100)
    return colors if solve(used) else None


def _q_coloring(g: Graph, q: int, search: _Search) -> list[int] | None:
    if q < 1:
        return None if g.n else []
    if g.m and q < 2:
        return None
    core, peeled = _peel(g, q)
    colors = _backtrack(g, core, q, search)
    if colors is None:
        return None
    for v in reversed(peeled):
        taken = {colors[u] for u in g.adj(v)}
        colors[v] = next(c for c in range(1, q + 1) if c not in taken)
    return colors


def q_coloring(g: Graph, q: int, budget: Budget | None = None) -> Coloring | None:
    """A proper colouring with at most ``q`` colours, or None if none exists.

    Raises :class:`BudgetExceeded` if the search is cut off.
    """
    colors = _q_coloring(g, q, _Search(budget or Budget()))
    return None if colors is None else Coloring(tuple(colors))


def chromatic_number(g: Graph, budget: Budget | None = None) -> ChiResult:
    """Exact chromatic number by DSATUR branch and bound, one component at a time.

    Each component is bracketed between a greedy clique and a greedy DSATUR
    colouring; the gap is closed by deciding q-colourability for increasing q.
    """
    search = _Search(budget or Budget())
    colors = [1] * g.n
    lower = upper = 1 if g.n else 0
    exact = True
    for comp in g.components():
        h = g.induced_subgraph(comp)
        if h.m == 0:
            continue
        best = dsatur_greedy(h)
        hi = max(best)
        lo = max(2, len(greedy_clique(h)))
        if exact:
            try:
                while lo < hi:
                    found = _q_coloring(h, lo, search)
                    if found is None:
                        lo += 1
                    else:
                        best, hi = found, lo
            except BudgetExceeded:
                exact = False
        for i, v in enumerate(comp):
            colors[v] = best[i]
        lower = max(lower, lo)
        upper = max(upper, hi)
    elapsed = time.perf_counter() - search.started
    return ChiResult(upper if exact else None, lower, upper, Coloring(tuple(colors)), search.nodes, elapsed)


# -- CNF -----------------------------------------------------------------


def export_kcolor_cnf(g: Graph, q: int) -> str:
    """DIMACS CNF that is satisfiable iff ``g`` is ``q``-colourable.

    Variable ``v*q + c`` (1-based colour ``c``) means vertex ``v`` gets ``c``.
    """
    if q < 1:
        raise ValueError("need at least one colour")

    def var(v: int, c: int) -> int:
        return v * q + c

    clauses = [[var(v, c) for c in range(1, q + 1)] for v in g.vertices]
    for u, v in g.edges:
        for c in range(1, q + 1):
            clauses.append([-var(u, c), -var(v, c)])
    if g.m and q >= 2:
        u, v = g.edges[0]
        clauses += [[var(u, 1)], [var(v, 2)]]
    lines = [f"p cnf {g.n * q} {len(clauses)}"]
    lines += [" ".join(map(str, cl)) + " 0" for cl in clauses]
    return "\n".join(lines) + "\n"


SAT_SOLVERS = ("kissat", "cadical", "minisat", "glucose")


def find_sat_solver() -> str | None:
    for name in SAT_SOLVERS:
        path = shutil.which(name)
        if path:
            return path
    return None


def run_sat_solver(cnf: str, solver: str | None = None, timeout: float | None = None) -> bool | None:
    """Run an external DIMACS solver if one is installed.

    Returns True/False for SAT/UNSAT and None when no solver is available or
    it gave no verdict.
    """
    solver = solver or find_sat_solver()
    if solver is None:
        return None
    with tempfile.NamedTemporaryFile("w", suffix=".cnf", delete=False) as fh:
        fh.write(cnf)
        path = fh.name
    try:
        proc = subprocess.run([solver, path], capture_output=True, text=True, timeout=timeout)
    except subprocess.TimeoutExpired:
        return None
    finally:
        os.unlink(path)
    # Competition exit codes: 10 SAT, 20 UNSAT.
    if proc.returncode == 10:
        return True
    if proc.returncode == 20:
        return False
    return None


# -- explicit colourings of G_k ----------------------------------------------


@lru_cache(maxsize=None)
def _layout(k: int) -> tuple[dict[Path, int], dict[Path, int]]:
    """Ids of tree nodes and of branch vertices (keyed by leaf) in G_k."""
    t = _tree(k)
    nodes = {p: i for i, p in enumerate(t.nodes)}
    base = len(t.nodes)
    leaves = {leaf: base + i for i, leaf in enumerate(t.leaves)}
    return nodes, leaves


def _part_k(z: Path) -> int:
    # The graph on the children of a level-i node is G_{i+1}; level i = len(z) + 1.
    return len(z) + 2


@lru_cache(maxsize=None)
def _constructive(k: int) -> tuple[int, ...]:
    if k == 1:
        return (1,)
    t = _tree(k)
    nodes, leaves = _layout(k)
    colors = [0] * (len(nodes) + len(leaves))
    colors[nodes[()]] = 1
    for z, part in t.internal_graphs.items():
        sub = _constructive(_part_k(z))
        for j in range(part.n):
            colors[nodes[z + (j,)]] = sub[j]
    for b in leaves.values():
        colors[b] = k
    return tuple(colors)


def constructive_coloring(k: int) -> Coloring:
    """k-colouring of G_k: branch vertices get k, each internal copy of G_j is
    coloured the same way recursively and the root gets 1."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    return Coloring(_constructive(k))


def rainbow_branch(k: int, c: Coloring | Assignment) -> Branch:
    """Branch of T_k whose tree nodes get k-1 distinct colours under ``c``.

    Descends from the root, always taking the first child with an unseen colour;
    such a child exists because the children span a copy of a graph that needs
    one more colour than has been seen so far.
    """
    if k < 2:
        raise ValueError("rainbow branches need k >= 2")
    g = _graph(k)
    if not is_proper(g, c):
        raise ColoringError("coloring is not proper")
    a = c.assignment if isinstance(c, Coloring) else tuple(c)
    t = _tree(k)
    nodes, leaves = _layout(k)
    path: Path = ()
    seen = [a[nodes[path]]]
    trail = [path]
    while not t.is_leaf(path):
        for child in t.children(path):
            if a[nodes[child]] not in seen:
                break
        else:
            raise ConstructionFault(f"no child of {path} has a new colour")
        path = child
        seen.append(a[nodes[path]])
        trail.append(path)
    if len(set(seen)) != k - 1 or a[leaves[path]] in seen:
        raise ConstructionFault("rainbow branch post-check failed")
    return Branch(tuple(trail))


def _smallest_free(taken: set[int], q: int) -> int:
    for c in range(1, q + 1):
        if c not in taken:
            return c
    raise ConstructionFault(f"no free colour in 1..{q}")


def _first_leaf_below(k: int, p: Path) -> Path:
    return p + (0,) * (k - 2 - len(p))


@lru_cache(maxsize=None)
def _branch_top(k: int, leaf: Path) -> tuple[int, ...]:
    """k-colouring of G_k with the branch vertex of ``leaf`` the only colour k and
    its level-i neighbour coloured i."""
    t = _tree(k)
    nodes, leaves = _layout(k)
    colors = [0] * (len(nodes) + len(leaves))
    colors[nodes[()]] = 1
    for z, part in t.internal_graphs.items():
        pk = _part_k(z)
        if leaf[: len(z)] == z:
            sub = _unique_top(pk, leaf[len(z)])
        else:
            sub = _constructive(pk)
        for j in range(part.n):
            colors[nodes[z + (j,)]] = sub[j]
    for other, b in leaves.items():
        if other != leaf:
            taken = {colors[nodes[other[:i]]] for i in range(len(other) + 1)}
            colors[b] = _smallest_free(taken, k - 1)
    colors[leaves[leaf]] = k
    return tuple(colors)


@lru_cache(maxsize=None)
def _unique_top(k: int, v: int) -> tuple[int, ...]:
    if k == 1:
        return (1,)
    nodes, leaves = _layout(k)
    address = _graph(k).labels[v]
    if address.is_branch:
        return _branch_top(k, address.path)
    leaf = _first_leaf_below(k, address.path)
    colors = list(_branch_top(k, leaf))
    b = leaves[leaf]
    colors[v], colors[b] = colors[b], colors[v]
    return tuple(colors)


def unique_top_coloring(k: int, v: int) -> Coloring:
    """Proper k-colouring of G_k in which ``v`` is the only vertex of colour k.

    When ``v`` is a branch vertex its neighbour on level i also gets colour i.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if not 0 <= v < _graph(k).n:
        raise GraphError(f"vertex {v} is not in G_{k}")
    return Coloring(_unique_top(k, v))


def _edge_deleted(k: int, u: int, v: int) -> list[int]:
    g = _graph(k)
    nodes, leaves = _layout(k)
    au, av = g.labels[u], g.labels[v]
    if av.is_branch:
        au, av, u, v = av, au, v, u
    if au.is_branch:
        colors = list(_unique_top(k, u))
        colors[u] = _smallest_free({colors[x] for x in g.adj(u) if x != v}, k - 1)
        return colors
    w = au.path[:-1]
    if av.path[:-1] != w or not au.path:
        raise ConstructionFault(f"{au} and {av} are not siblings")
    colors = list(_branch_top(k, _first_leaf_below(k, w)))
    sub = _edge_deleted(_part_k(w), au.path[-1], av.path[-1])
    for j, c in enumerate(sub):
        colors[nodes[w + (j,)]] = c
    for leaf, b in leaves.items():
        if leaf[: len(w)] == w:
            taken = {colors[nodes[leaf[:i]]] for i in range(len(leaf) + 1)}
            colors[b] = _smallest_free(taken, k - 1)
    return colors


@dataclass(frozen=True)
class DeletionColoring:
    coloring: Coloring
    path: str  # "constructive" or "solver-fallback"


def edge_deleted_coloring(
    k: int, e: tuple[int, int], budget: Budget | None = None, constructive: bool = True
) -> DeletionColoring:
    """Proper (k-1)-colouring of G_k minus the edge ``e``.

    The explicit construction is tried first and its output verified; if it
    fails (or ``constructive`` is False) the exact solver is used instead.
    Raises :class:`BudgetExceeded` if the fallback runs out of budget.
    """
    if k < 2:
        raise ValueError("edge deletion needs k >= 2")
    g = _graph(k)
    u, v = e
    if not (0 <= u < g.n and 0 <= v < g.n and g.has_edge(u, v)):
        raise GraphError(f"{e} is not an edge of G_{k}")
    h = g.delete_edge(u, v)
    if constructive:
        try:
            colors = _edge_deleted(k, u, v)
        except ConstructionFault:
            colors = None
        if colors is not None and max(colors) <= k - 1 and is_proper(h, colors):
            return DeletionColoring(Coloring(tuple(colors)), "constructive")
    found = q_coloring(h, k - 1, budget)
    if found is None:
        raise ConstructionFault(f"G_{k} minus {e} is not {k - 1}-colourable")
    return DeletionColoring(found, "solver-fallback")
