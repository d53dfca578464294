"""Command-line interface.

Exit codes: 0 success, 1 a checked property failed (a witness is printed),
2 usage or input error, 3 a search ran out of budget.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import tempfile
from dataclasses import dataclass
from typing import Callable

from twincut.certificate import CertificateError, ClosureCertificate, replay, same_labelled_graph, twincut_certificate
from twincut.coloring import (
    Budget,
    BudgetExceeded,
    Coloring,
    ColoringError,
    chromatic_number,
    constructive_coloring,
    export_kcolor_cnf,
    is_proper,
    monochromatic_edge,
    q_coloring,
    rainbow_branch,
)
from twincut.construction import (
    DEFAULT_MAX_K,
    FeasibilityError,
    edge_count,
    twincut_graph,
    twincut_tree,
    vertex_count,
)
from twincut.criticality import verify_critical
from twincut.graph import Graph, GraphError, dump_graph, graph_to_dict, load_graph
from twincut.structure import (
    DEFAULT_CUBE_CAP,
    contains_induced_cube,
    decompose,
    has_triangle,
    sample_decompositions,
)
from twincut.tree import tree_vertex

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

# `check` is a battery, so an unbounded search would stall every later check.
CHECK_BUDGET = Budget(time_limit=60.0)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    budget: Budget
    seed: int = 0
    verbose: int = 0


def write_atomic(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(data: bytes, out: str | None) -> None:
    if out:
        write_atomic(out, data)
    else:
        sys.stdout.write(data.decode())
        sys.stdout.flush()


def read_graph(path: str, fmt: str = "auto") -> Graph:
    try:
        with open(path, "rb") as fh:
            return load_graph(fh.read(), fmt)
    except OSError as exc:
        raise UsageError(str(exc)) from None


def _budget(args: argparse.Namespace) -> Budget:
    env = Budget.from_env()
    return Budget(
        args.node_limit if getattr(args, "node_limit", None) is not None else env.max_nodes,
        args.time_limit if getattr(args, "time_limit", None) is not None else env.time_limit,
    )


def _dumps(obj: object) -> bytes:
    return (json.dumps(obj) + "\n").encode()


# -- subcommands -----------------------------------------------------------


def cmd_generate(args: argparse.Namespace, cfg: RunConfig) -> int:
    g = twincut_graph(args.k, max_k=args.max_k)
    emit(dump_graph(g, args.format), args.output)
    if args.output:
        write_atomic(args.output + ".labels.json", _dumps({"labels": [str(a) for a in g.labels]}))
    return EXIT_OK


def cmd_tree(args: argparse.Namespace, cfg: RunConfig) -> int:
    emit(twincut_tree(args.k, max_k=args.max_k).to_json().encode(), args.output)
    return EXIT_OK


def cmd_chi(args: argparse.Namespace, cfg: RunConfig) -> int:
    g = read_graph(args.file, args.format)
    res = chromatic_number(g, cfg.budget)
    if res.exact:
        print(f"chi = {res.chi}")
    else:
        print(f"chi unknown within budget: {res.lower} <= chi <= {res.upper}")
    emit(_dumps(res.to_dict(g)), args.output)
    return EXIT_OK if res.exact else EXIT_BUDGET


def cmd_cnf(args: argparse.Namespace, cfg: RunConfig) -> int:
    g = read_graph(args.file, args.format)
    emit(export_kcolor_cnf(g, args.q).encode(), args.output)
    return EXIT_OK


def cmd_verify_coloring(args: argparse.Namespace, cfg: RunConfig) -> int:
    g = read_graph(args.file, args.format)
    try:
        with open(args.coloring) as fh:
            c = Coloring.from_dict(g, json.load(fh))
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read coloring: {exc}") from None
    bad = monochromatic_edge(g, c)
    if bad is None:
        print(f"proper coloring with {c.palette} colours")
        return EXIT_OK
    u, v = bad
    print(f"improper: edge {g.label(u)} -- {g.label(v)} has both ends coloured {c[u]}")
    return EXIT_VIOLATION


def cmd_certify(args: argparse.Namespace, cfg: RunConfig) -> int:
    if args.check:
        try:
            with open(args.check) as fh:
                cert = ClosureCertificate.from_json(fh.read())
            g = replay(cert, require_triangle_free=args.triangle_free)
        except OSError as exc:
            raise UsageError(str(exc)) from None
        except CertificateError as exc:
            print(json.dumps(exc.record()))
            return EXIT_VIOLATION
        print(json.dumps({"valid": True, "n": g.n, "m": g.m}))
        return EXIT_OK
    if args.k is None:
        raise UsageError("certify needs k or --check FILE")
    twincut_graph(args.k, max_k=args.max_k)
    cert = twincut_certificate(args.k)
    try:
        g = replay(cert, require_triangle_free=True)
    except CertificateError as exc:
        print(json.dumps(exc.record()))
        return EXIT_VIOLATION
    if not same_labelled_graph(g, twincut_graph(args.k)):
        print(json.dumps({"error": "replay-mismatch", "k": args.k}))
        return EXIT_VIOLATION
    if args.output:
        write_atomic(args.output, cert.to_json().encode())
    print(json.dumps({"valid": True, "k": args.k, "n": g.n, "m": g.m, "steps": len(cert.steps)}))
    return EXIT_OK


def cmd_decompose(args: argparse.Namespace, cfg: RunConfig) -> int:
    g = read_graph(args.file, args.format)
    print(json.dumps(decompose(g).to_dict(g)))
    return EXIT_OK


def _sample_records(g: Graph, count: int, min_size: int, rng: random.Random):
    for i, (h, w) in enumerate(sample_decompositions(g, count, rng, min_size)):
        rec = {"index": i, "n": h.n, "m": h.m, **w.to_dict(h)}
        if w.kind == "none":
            rec["subgraph"] = [str(x) for x in h.labels] if h.labels else list(h.origin)
        yield rec


def cmd_sample_decompose(args: argparse.Namespace, cfg: RunConfig) -> int:
    g = twincut_graph(args.k, max_k=args.max_k)
    rng = random.Random(cfg.seed)
    lines = []
    failures = 0
    for rec in _sample_records(g, args.count, args.min_size, rng):
        failures += rec["kind"] == "none"
        lines.append(json.dumps(rec))
    emit(("\n".join(lines) + "\n" if lines else "").encode(), args.output)
    if failures:
        print(f"{failures} sampled subgraphs have neither twins nor a small edgeless cutset", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_critical(args: argparse.Namespace, cfg: RunConfig) -> int:
    twincut_graph(args.k, max_k=args.max_k)
    rep = verify_critical(args.k, cfg.budget, workers=args.workers)
    print(f"{'k':>3} {'edges':>7} {'verified':>9} {'fallback':>9} {'chi':>5} {'seconds':>9}")
    chi = rep.chi if rep.chi is not None else "?"
    print(f"{rep.k:>3} {len(rep.per_edge):>7} {rep.verified:>9} {rep.fallbacks:>9} {chi:>5} {rep.elapsed:>9.3f}")
    if args.output:
        write_atomic(args.output, _dumps(rep.to_dict()))
    if any(r.status == "failed" for r in rep.per_edge) or (rep.chi is not None and rep.chi != rep.k):
        return EXIT_VIOLATION
    if rep.chi is None or any(r.status == "unknown" for r in rep.per_edge):
        return EXIT_BUDGET
    return EXIT_OK


# -- property battery ------------------------------------------------------


class _Battery:
    def __init__(self) -> None:
        self.failed = False
        self.unknown = False

    def run(self, name: str, fn: Callable[[], tuple[str, str, object]]) -> None:
        status, detail, witness = fn()
        print(f"{status:<7} {name}: {detail}")
        if witness is not None:
            print(json.dumps({"check": name, "witness": witness}))
        if status == "FAIL":
            self.failed = True
        elif status == "UNKNOWN":
            self.unknown = True


def cmd_check(args: argparse.Namespace, cfg: RunConfig) -> int:
    k = args.k
    constructed = args.graph is None
    g = twincut_graph(k, max_k=args.max_k) if constructed else read_graph(args.graph, args.format)
    bat = _Battery()
    budget = cfg.budget if cfg.budget.limited else CHECK_BUDGET

    def names(vs):
        return [str(g.label(v)) for v in vs]

    def size():
        want = (vertex_count(k), edge_count(k))
        ok = (g.n, g.m) == want
        return ("PASS" if ok else "FAIL", f"n={g.n} m={g.m}, expected n={want[0]} m={want[1]}", None)

    def triangle():
        tri = has_triangle(g)
        return ("PASS", "no triangle", None) if tri is None else ("FAIL", "triangle found", names(tri))

    def chi():
        res = chromatic_number(g, budget)
        if not res.exact:
            return ("UNKNOWN", f"{res.lower} <= chi <= {res.upper} within budget", None)
        if res.chi != k:
            return ("FAIL", f"chi = {res.chi}, expected {k}", res.witness.to_dict(g))
        return ("PASS", f"chi = {k}", None)

    def upper():
        c = constructive_coloring(k)
        ok = is_proper(g, c) and c.palette == k
        return ("PASS" if ok else "FAIL", f"explicit coloring with {c.palette} colours", None)

    def rainbow():
        b = rainbow_branch(k, constructive_coloring(k))
        return ("PASS", "branch " + " ".join(str(tree_vertex(*p)) for p in b.nodes) + " is rainbow", None)

    def cube():
        if g.n > DEFAULT_CUBE_CAP:
            return ("SKIP", f"more than {DEFAULT_CUBE_CAP} vertices", None)
        found = contains_induced_cube(g)
        return ("PASS", "no induced cube", None) if found is None else ("FAIL", "induced cube", names(found))

    def certificate():
        cert = twincut_certificate(k)
        try:
            h = replay(cert, require_triangle_free=True)
        except CertificateError as exc:
            return ("FAIL", str(exc), exc.record())
        ok = same_labelled_graph(h, g)
        return ("PASS" if ok else "FAIL", f"{len(cert.steps)} steps replay to G_{k}", None)

    def decomposition():
        if g.n < 3:
            return ("SKIP", "fewer than 3 vertices", None)
        w = decompose(g)
        if w.kind == "none":
            return ("FAIL", "no twins and no edgeless cutset of size <= 2", graph_to_dict(g))
        bad = [r for r in _sample_records(g, args.samples, 3, random.Random(cfg.seed)) if r["kind"] == "none"]
        if bad:
            return ("FAIL", f"{len(bad)} sampled subgraphs do not decompose", bad[0])
        return ("PASS", f"{w.kind} {names(w.vertices)}; {args.samples} samples decompose", None)

    def critical():
        if k < 2:
            return ("SKIP", "no edges", None)
        if constructed:
            rep = verify_critical(k, budget, compute_chi=False)
            bad = [r for r in rep.per_edge if r.status != "verified"]
            if any(r.status == "failed" for r in bad):
                return ("FAIL", "some edge deletion not (k-1)-colourable", [r.edge for r in bad])
            if bad:
                return ("UNKNOWN", f"{len(bad)} edges undecided", None)
            return ("PASS", f"all {len(rep.per_edge)} edge deletions {k - 1}-colourable", None)
        for u, v in g.edges:
            try:
                c = q_coloring(g.delete_edge(u, v), k - 1, budget)
            except BudgetExceeded:
                return ("UNKNOWN", "budget exhausted", None)
            if c is None:
                return ("FAIL", "edge deletion keeps chi >= k", names((u, v)))
        return ("PASS", f"all {g.m} edge deletions {k - 1}-colourable", None)

    bat.run("size", size)
    bat.run("triangle-free", triangle)
    if constructed:
        bat.run("upper-bound", upper)
        if k >= 2:
            bat.run("rainbow-branch", rainbow)
    bat.run("chromatic-number", chi)
    bat.run("cube-free", cube)
    if constructed:
        bat.run("certificate", certificate)
    bat.run("decomposition", decomposition)
    bat.run("critical", critical)
    if bat.failed:
        return EXIT_VIOLATION
    return EXIT_BUDGET if bat.unknown else EXIT_OK


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    # Shared options are accepted before or after the subcommand.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for sampling sweeps (default 0)")
    common.add_argument("--time-limit", type=float, default=argparse.SUPPRESS, help="search time limit in seconds")
    common.add_argument("--node-limit", type=int, default=argparse.SUPPRESS, help="search node limit")
    parser = argparse.ArgumentParser(
        prog="twincut", description="Twincut graph construction and verification.", parents=[common]
    )
    parser.set_defaults(verbose=0, seed=0, time_limit=None, node_limit=None)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, fn, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help, parents=[common])
        p.set_defaults(func=fn)
        return p

    def k_arg(p: argparse.ArgumentParser, optional: bool = False) -> None:
        p.add_argument("k", type=int, nargs="?" if optional else None)
        p.add_argument("--max-k", type=int, default=DEFAULT_MAX_K, help="feasibility bound on k")

    def file_arg(p: argparse.ArgumentParser) -> None:
        p.add_argument("file")
        p.add_argument("--format", choices=("auto", "graph6", "dimacs", "json"), default="auto")

    p = add("generate", cmd_generate, "emit G_k")
    k_arg(p)
    p.add_argument("--format", choices=("graph6", "dimacs", "json"), default="graph6")
    p.add_argument("-o", "--output")

    p = add("tree", cmd_tree, "emit the structured tree T_k as JSON")
    k_arg(p)
    p.add_argument("-o", "--output")

    p = add("chi", cmd_chi, "exact chromatic number with witness")
    file_arg(p)
    p.add_argument("-o", "--output")

    p = add("cnf", cmd_cnf, "DIMACS CNF for q-colourability")
    file_arg(p)
    p.add_argument("q", type=int)
    p.add_argument("-o", "--output")

    p = add("verify-coloring", cmd_verify_coloring, "check a coloring JSON against a graph")
    file_arg(p)
    p.add_argument("coloring")

    p = add("certify", cmd_certify, "derive and replay the closure certificate of G_k")
    k_arg(p, optional=True)
    p.add_argument("--check", metavar="CERT", help="replay a certificate file instead")
    p.add_argument("--triangle-free", action="store_true", help="with --check, require triangle-free intermediates")
    p.add_argument("-o", "--output")

    p = add("decompose", cmd_decompose, "twins / small edgeless cutset witness")
    file_arg(p)

    p = add("sample-decompose", cmd_sample_decompose, "decompose random connected induced subgraphs of G_k")
    k_arg(p)
    p.add_argument("--count", type=int, default=500)
    p.add_argument("--min-size", type=int, default=3)
    p.add_argument("-o", "--output")

    p = add("critical", cmd_critical, "edge-criticality sweep of G_k")
    k_arg(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output")

    p = add("check", cmd_check, "run the full property battery on G_k")
    k_arg(p)
    p.add_argument("--graph", help="check this graph file against the claims for G_k instead")
    p.add_argument("--format", choices=("auto", "graph6", "dimacs", "json"), default="auto")
    p.add_argument("--samples", type=int, default=100)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig(args.command, _budget(args), args.seed, args.verbose)
    try:
        return args.func(args, cfg)
    except (UsageError, GraphError, ColoringError, FeasibilityError, ValueError) as exc:
        print(f"twincut: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
