"""Triangles, non-adjacent twins, small edgeless cutsets and induced cubes."""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Iterator

from twincut.graph import Graph, cube_graph, is_isomorphic

DEFAULT_CUBE_CAP = 1000


class SearchRefused(RuntimeError):
    pass


def has_triangle(g: Graph) -> tuple[int, int, int] | None:
    """Lexicographically first triangle ``(u, v, w)``, ``u < v < w``, or None."""
    for u, v in g.edges:
        common = g.adj(u) & g.adj(v)
        later = [w for w in common if w > v]
        if later:
            return (u, v, min(later))
    return None


def find_nonadjacent_twins(g: Graph) -> tuple[int, int] | None:
    """First pair ``u < v`` (lex order) with ``N(u) == N(v)``.

    Equal neighbourhoods already force non-adjacency in a loopless graph.
    """
    first: dict[frozenset[int], int] = {}
    best = None
    for v in g.vertices:
        nb = g.adj(v)
        u = first.get(nb)
        if u is None:
            first[nb] = v
        elif best is None or (u, v) < best:
            best = (u, v)
    return best


def articulation_points(g: Graph, removed: frozenset[int] | set[int] = frozenset()) -> list[int]:
    """Cut vertices of ``g - removed`` (iterative Tarjan), ascending."""
    n = g.n
    disc = [-1] * n
    low = [0] * n
    cut = set()
    t = 0
    for root in range(n):
        if root in removed or disc[root] != -1:
            continue
        disc[root] = low[root] = t
        t += 1
        root_children = 0
        stack: list[tuple[int, int, Iterator[int]]] = [(root, -1, iter(g.adj(root)))]
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w in removed:
                    continue
                if disc[w] == -1:
                    disc[w] = low[w] = t
                    t += 1
                    if v == root:
                        root_children += 1
                    stack.append((w, v, iter(g.adj(w))))
                    advanced = True
                    break
                if w != parent:
                    low[v] = min(low[v], disc[w])
            if advanced:
                continue
            stack.pop()
            if parent != -1:
                low[parent] = min(low[parent], low[v])
                if parent != root and low[v] >= disc[parent]:
                    cut.add(parent)
        if root_children > 1:
            cut.add(root)
    return sorted(cut)


def find_edgeless_cutset(g: Graph, max_size: int = 2) -> tuple[int, ...] | None:
    """Smallest independent ``S`` with ``|S| <= max_size`` whose removal leaves
    at least two non-empty components; lexicographically first among equals.

    The empty tuple means ``g`` itself is disconnected.
    """
    if g.n == 0:
        return None
    if len(g.components()) >= 2:
        return ()
    if max_size >= 1:
        cuts = articulation_points(g)
        if cuts:
            return (cuts[0],)
    if max_size >= 2:
        for u in g.vertices:
            for v in articulation_points(g, frozenset((u,))):
                if v > u and not g.has_edge(u, v):
                    return (u, v)
    return None


@dataclass(frozen=True)
class DecompositionWitness:
    """Why a graph decomposes: ``kind`` is one of twins, cutset, disconnected, none."""

    kind: str
    vertices: tuple[int, ...] = ()
    components: tuple[tuple[int, ...], ...] = ()

    def to_dict(self, g: Graph | None = None) -> dict[str, Any]:
        def name(v: int) -> Any:
            return str(g.label(v)) if g is not None and g.labels is not None else v

        return {
            "kind": self.kind,
            "vertices": [name(v) for v in self.vertices],
            "components": [[name(v) for v in c] for c in self.components],
        }


def decompose(g: Graph) -> DecompositionWitness:
    comps = g.components()
    if len(comps) >= 2:
        return DecompositionWitness("disconnected", (), tuple(map(tuple, comps)))
    twins = find_nonadjacent_twins(g)
    if twins is not None:
        return DecompositionWitness("twins", twins)
    cut = find_edgeless_cutset(g, 2)
    if cut:
        return DecompositionWitness("cutset", cut, tuple(map(tuple, g.components(cut))))
    return DecompositionWitness("none")


def witness_is_valid(g: Graph, w: DecompositionWitness) -> bool:
    """Independent check of a witness against its definition."""
    if w.kind == "disconnected":
        return len(g.components()) >= 2
    if w.kind == "twins":
        u, v = w.vertices
        return u != v and not g.has_edge(u, v) and g.adj(u) == g.adj(v)
    if w.kind == "cutset":
        s = w.vertices
        if not 1 <= len(s) <= 2 or any(g.has_edge(a, b) for a, b in combinations(s, 2)):
            return False
        comps = g.components(s)
        covered = sorted(v for c in w.components for v in c)
        if len(comps) < 2 or covered != sorted(set(g.vertices) - set(s)):
            return False
        where = {v: i for i, c in enumerate(w.components) for v in c}
        return all(where.get(a) == where.get(b) for a, b in g.edges if a not in s and b not in s)
    return False


def random_connected_subset(g: Graph, rng: random.Random, min_size: int = 3) -> list[int] | None:
    """Grow a random connected vertex set from a random seed vertex.

    The target size is uniform on ``[min_size, n]``; returns None if the
    seed's component is too small.
    """
    if g.n < min_size:
        return None
    target = rng.randint(min_size, g.n)
    start = rng.randrange(g.n)
    chosen = [start]
    inside = {start}
    frontier = sorted(g.adj(start))
    in_frontier = set(frontier)
    while len(chosen) < target and frontier:
        i = rng.randrange(len(frontier))
        v = frontier[i]
        frontier[i] = frontier[-1]
        frontier.pop()
        in_frontier.discard(v)
        chosen.append(v)
        inside.add(v)
        for w in sorted(g.adj(v)):
            if w not in inside and w not in in_frontier:
                frontier.append(w)
                in_frontier.add(w)
    return chosen if len(chosen) >= min_size else None


def sample_decompositions(
    g: Graph, count: int, rng: random.Random, min_size: int = 3
) -> Iterator[tuple[Graph, DecompositionWitness]]:
    """Decompose ``count`` random connected induced subgraphs with >= ``min_size`` vertices."""
    done = misses = 0
    while done < count:
        s = random_connected_subset(g, rng, min_size)
        if s is None:
            misses += 1
            if g.n < min_size or misses > 100 * count:
                return
            continue
        h = g.induced_subgraph(s)
        yield h, decompose(h)
        done += 1


# -- induced 3-cube ----------------------------------------------------------

_CUBE = cube_graph()


def contains_induced_cube(g: Graph, max_vertices: int = DEFAULT_CUBE_CAP) -> tuple[int, ...] | None:
    """An 8-set of vertices inducing the 3-cube, or None.

    Anchors the search at the smallest vertex ``a`` of a candidate cube and
    its three neighbours ``x < y < z``; the rest of the cube is then forced
    up to the choice of common neighbours.
    """
    if g.n > max_vertices:
        raise SearchRefused(f"induced-cube search capped at {max_vertices} vertices")
    masks = g.masks
    for a in g.vertices:
        above = ~((1 << (a + 1)) - 1)
        nbrs = sorted(u for u in g.adj(a) if u > a and g.degree(u) >= 3)
        if len(nbrs) < 3 or g.degree(a) < 3:
            continue
        ma = masks[a]
        for x, y in combinations(nbrs, 2):
            if (masks[x] >> y) & 1:
                continue
            pxy_all = masks[x] & masks[y] & above & ~ma
            if not pxy_all:
                continue
            for z in nbrs:
                if z <= y or (masks[x] >> z) & 1 or (masks[y] >> z) & 1:
                    continue
                pxz_all = masks[x] & masks[z] & above & ~ma & ~masks[y]
                pyz_all = masks[y] & masks[z] & above & ~ma & ~masks[x]
                pxy_ok = pxy_all & ~masks[z]
                if not (pxz_all and pyz_all and pxy_ok):
                    continue
                found = _close_cube(g, a, x, y, z, pxy_ok, pxz_all, pyz_all, above)
                if found is not None:
                    return found
    return None


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _close_cube(
    g: Graph, a: int, x: int, y: int, z: int, pxy: int, pxz: int, pyz: int, above: int
) -> tuple[int, ...] | None:
    masks = g.masks
    for p in _bits(pxy):
        for q in _bits(pxz & ~masks[p] & ~(1 << p)):
            for r in _bits(pyz & ~masks[p] & ~masks[q] & ~(1 << p) & ~(1 << q)):
                opp = masks[p] & masks[q] & masks[r] & above
                opp &= ~(masks[a] | masks[x] | masks[y] | masks[z] | (1 << a))
                for w in _bits(opp):
                    cube = tuple(sorted((a, x, y, z, p, q, r, w)))
                    if len(set(cube)) == 8 and is_isomorphic(g.induced_subgraph(cube), _CUBE):
                        return cube
    return None
