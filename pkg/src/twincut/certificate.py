"""Closure certificates: build scripts over base graphs, vertex substitution
and gluing on small stable sets, with a replaying checker.

A certificate is a linear list of steps, each defining a new named graph:

* ``Base``: a graph with at most two vertices;
* ``Substitute``: a copy of an earlier graph where ``vertex`` gets a new
  non-adjacent twin ``twin`` (same neighbourhood);
* ``Glue``: disjoint union of two earlier graphs with up to two pairs of
  vertices identified; each side of the identification must be a stable
  set.  Labels of the left operand survive.

Vertices are named by string labels throughout, so a replayed graph can be
compared label-for-label with the graph it claims to build.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Any, Callable, Mapping, Union

from twincut.construction import twincut_tree
from twincut.graph import Graph
from twincut.tree import Address, Path, StructuredTree


class CertificateError(ValueError):
    """A certificate step failed to check."""

    def __init__(self, step: int | None, op: str | None, message: str) -> None:
        self.step = step
        self.op = op
        self.message = message
        where = f"step {step} ({op}): " if step is not None else ""
        super().__init__(where + message)

    def record(self) -> dict[str, Any]:
        return {"error": "invalid-certificate", "step": self.step, "op": self.op, "message": self.message}


@dataclass(frozen=True)
class Base:
    name: str
    labels: tuple[str, ...]
    edges: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class Substitute:
    name: str
    source: str
    vertex: str
    twin: str


@dataclass(frozen=True)
class Glue:
    name: str
    left: str
    right: str
    identify: tuple[tuple[str, str], ...]


Step = Union[Base, Substitute, Glue]


@dataclass(frozen=True)
class ClosureCertificate:
    steps: tuple[Step, ...]
    result: str

    def to_dict(self) -> dict[str, Any]:
        out = []
        for s in self.steps:
            if isinstance(s, Base):
                out.append({"op": "base", "name": s.name, "labels": list(s.labels), "edges": [list(e) for e in s.edges]})
            elif isinstance(s, Substitute):
                out.append({"op": "substitute", "name": s.name, "source": s.source, "vertex": s.vertex, "twin": s.twin})
            else:
                out.append({"op": "glue", "name": s.name, "left": s.left, "right": s.right,
                            "identify": [list(p) for p in s.identify]})
        return {"steps": out, "result": self.result}

    def to_json(self) -> str:
        return json.dumps(self.to_dict()) + "\n"

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any]) -> ClosureCertificate:
        steps: list[Step] = []
        for i, s in enumerate(obj.get("steps", ())):
            op = s.get("op") if isinstance(s, Mapping) else None
            try:
                if op == "base":
                    steps.append(Base(s["name"], tuple(s["labels"]), tuple(tuple(e) for e in s.get("edges", ()))))
                elif op == "substitute":
                    steps.append(Substitute(s["name"], s["source"], s["vertex"], s["twin"]))
                elif op == "glue":
                    steps.append(Glue(s["name"], s["left"], s["right"], tuple(tuple(p) for p in s["identify"])))
                else:
                    raise CertificateError(i, op, "unknown step kind")
            except (KeyError, TypeError) as exc:
                raise CertificateError(i, op, f"malformed step: {exc}") from None
        if "result" not in obj:
            raise CertificateError(None, None, "certificate has no result")
        return cls(tuple(steps), obj["result"])

    @classmethod
    def from_json(cls, text: str) -> ClosureCertificate:
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise CertificateError(None, None, f"not JSON: {exc}") from None


# -- replay ----------------------------------------------------------------

_Adj = dict[str, set[str]]


def _triangle(adj: _Adj) -> tuple[str, str, str] | None:
    for u, nu in adj.items():
        for v in nu:
            if u < v:
                common = nu & adj[v]
                if common:
                    return (u, v, min(common))
    return None


def replay(
    cert: ClosureCertificate,
    require_triangle_free: bool = False,
    on_step: Callable[[int, Step, _Adj], None] | None = None,
) -> Graph:
    """Execute ``cert`` and return the labelled result graph.

    Every rule of the closure operations is checked; the first violation
    raises :class:`CertificateError` naming the step.
    """
    last_use: dict[str, int] = {}
    for i, s in enumerate(cert.steps):
        refs = (s.source,) if isinstance(s, Substitute) else (s.left, s.right) if isinstance(s, Glue) else ()
        for r in refs:
            last_use[r] = i
    table: dict[str, _Adj] = {}
    for i, s in enumerate(cert.steps):
        op = type(s).__name__.lower()

        def fail(msg: str) -> CertificateError:
            return CertificateError(i, op, msg)

        if s.name in table or s.name in last_use and last_use[s.name] <= i:
            raise fail(f"name {s.name!r} is redefined or used before definition")
        if isinstance(s, Base):
            if len(s.labels) > 2 or len(set(s.labels)) != len(s.labels):
                raise fail("base graphs have at most two distinct vertices")
            adj: _Adj = {lab: set() for lab in s.labels}
            for a, b in s.edges:
                if a not in adj or b not in adj or a == b:
                    raise fail(f"bad base edge ({a}, {b})")
                adj[a].add(b)
                adj[b].add(a)
        elif isinstance(s, Substitute):
            src = table.get(s.source)
            if src is None:
                raise fail(f"unknown graph {s.source!r}")
            if s.vertex not in src:
                raise fail(f"{s.vertex!r} is not a vertex of {s.source!r}")
            if s.twin in src:
                raise fail(f"twin label {s.twin!r} already used in {s.source!r}")
            adj = {lab: set(nb) for lab, nb in src.items()}
            adj[s.twin] = set(src[s.vertex])
            for u in src[s.vertex]:
                adj[u].add(s.twin)
        else:
            left, right = table.get(s.left), table.get(s.right)
            if left is None or right is None:
                raise fail(f"unknown operand {s.left if left is None else s.right!r}")
            if len(s.identify) > 2:
                raise fail("gluing set has more than two vertices")
            ls = [a for a, _ in s.identify]
            rs = [b for _, b in s.identify]
            if len(set(ls)) != len(ls) or len(set(rs)) != len(rs):
                raise fail("two vertices of one operand are identified together")
            if any(a not in left for a in ls) or any(b not in right for b in rs):
                raise fail("identified vertex missing from its operand")
            for (a1, b1), (a2, b2) in combinations(s.identify, 2):
                if a2 in left[a1] or b2 in right[b1]:
                    raise fail("gluing set is not stable")
            rename = {b: a for a, b in s.identify}
            for b in right:
                if b not in rename:
                    if b in left:
                        raise fail(f"label {b!r} occurs in both operands")
                    rename[b] = b
            adj = {lab: set(nb) for lab, nb in left.items()}
            for b, nb in right.items():
                adj.setdefault(rename[b], set()).update(rename[x] for x in nb)
        if require_triangle_free:
            tri = _triangle(adj)
            if tri is not None:
                raise fail(f"intermediate graph has triangle {tri}")
        if on_step is not None:
            on_step(i, s, adj)
        table[s.name] = adj
        for r in ((s.source,) if isinstance(s, Substitute) else (s.left, s.right) if isinstance(s, Glue) else ()):
            if last_use.get(r) == i and r != cert.result:
                table.pop(r, None)
    final = table.get(cert.result)
    if final is None:
        raise CertificateError(None, None, f"result {cert.result!r} is not defined")
    labels = list(final)
    index = {lab: i for i, lab in enumerate(labels)}
    edges = [(index[a], index[b]) for a in labels for b in final[a] if index[a] < index[b]]
    return Graph(len(labels), edges, labels=labels)


def same_labelled_graph(g: Graph, h: Graph) -> bool:
    """True when ``g`` and ``h`` have the same label set and the same edges between labels."""
    if g.labels is None or h.labels is None or g.n != h.n:
        return False
    gl = [str(x) for x in g.labels]
    hl = [str(x) for x in h.labels]
    if set(gl) != set(hl) or len(set(gl)) != g.n:
        return False
    ge = {frozenset((gl[u], gl[v])) for u, v in g.edges}
    he = {frozenset((hl[u], hl[v])) for u, v in h.edges}
    return ge == he


def certificate_stats(cert: ClosureCertificate) -> dict[str, int]:
    """Step counts by kind and the largest intermediate vertex count."""
    counts = Counter(type(s).__name__ for s in cert.steps)
    size: dict[str, int] = {}
    for s in cert.steps:
        if isinstance(s, Base):
            size[s.name] = len(s.labels)
        elif isinstance(s, Substitute):
            size[s.name] = size[s.source] + 1
        else:
            size[s.name] = size[s.left] + size[s.right] - len(s.identify)
    return {
        "base": counts["Base"],
        "substitute": counts["Substitute"],
        "glue": counts["Glue"],
        "max_size": max(size.values(), default=0),
    }


# -- derivation for realizations -------------------------------------------


def part_label(g: Graph, j: int) -> str:
    """Label a part certificate must use for vertex ``j`` of ``g``."""
    return str(g.labels[j]) if g.labels is not None else str(j)


class _Script:
    def __init__(self) -> None:
        self.steps: list[Step] = []

    def fresh(self) -> str:
        return f"g{len(self.steps)}"

    def add(self, step: Step) -> str:
        self.steps.append(step)
        return step.name

    def inline(self, cert: ClosureCertificate, relabel: Mapping[str, str], scope: str) -> str:
        def lab(x: str) -> str:
            return relabel.get(x, f"{scope}~{x}")

        names: dict[str, str] = {}
        for s in cert.steps:
            new = self.fresh()
            if isinstance(s, Base):
                step: Step = Base(new, tuple(map(lab, s.labels)), tuple((lab(a), lab(b)) for a, b in s.edges))
            elif isinstance(s, Substitute):
                step = Substitute(new, names[s.source], lab(s.vertex), lab(s.twin))
            else:
                step = Glue(new, names[s.left], names[s.right], tuple((lab(a), lab(b)) for a, b in s.identify))
            names[s.name] = self.add(step)
        return names[cert.result]


def derive_certificate(
    t: StructuredTree, parts: Mapping[Path, ClosureCertificate] | None = None
) -> ClosureCertificate:
    """Certificate that the realization of ``t`` lies in the closure class.

    ``parts[z]`` certifies the graph on the children of ``z``, with vertex
    ``j`` named :func:`part_label`.  Graphs on at most two vertices need no
    part certificate.  Bottom-up: a leaf gives an edge; an internal node ``v``
    starts from its part graph and, for each child ``u``, glues in the
    child's realization after giving ``u`` a twin that stands for ``v``.
    """
    parts = parts or {}
    script = _Script()

    def t_lab(p: Path) -> str:
        return str(Address("T", p))

    def build(p: Path) -> str:
        if t.is_leaf(p):
            lab = (t_lab(p), str(Address("B", p)))
            return script.add(Base(script.fresh(), lab, (lab,)))
        g = t.graph_at(p)
        relabel = {part_label(g, j): t_lab(p + (j,)) for j in range(g.n)}
        cert = parts.get(p)
        if cert is not None:
            host = script.inline(cert, relabel, t_lab(p))
        elif g.n <= 2:
            host = script.add(Base(
                script.fresh(),
                tuple(t_lab(p + (j,)) for j in range(g.n)),
                tuple((t_lab(p + (a,)), t_lab(p + (b,))) for a, b in g.edges),
            ))
        else:
            raise CertificateError(None, None, f"missing sub-certificate for the graph at node {p}")
        for child in t.children(p):
            sub = build(child)
            twin = script.add(Substitute(script.fresh(), sub, t_lab(child), t_lab(p)))
            pairs = ((t_lab(child), t_lab(child)),)
            if child[-1] > 0:
                pairs = ((t_lab(p), t_lab(p)),) + pairs
            host = script.add(Glue(script.fresh(), host, twin, pairs))
        return host

    result = build(())
    return ClosureCertificate(tuple(script.steps), result)


@lru_cache(maxsize=None)
def twincut_certificate(k: int) -> ClosureCertificate:
    """Certificate for G_k, reusing the certificate of each G_j on every copy."""
    if k == 1:
        return ClosureCertificate((Base("g0", (str(Address("T", ())),)),), "g0")
    t = twincut_tree(k)
    parts = {z: twincut_certificate(len(z) + 2) for z in t.internal_graphs}
    return derive_certificate(t, parts)
