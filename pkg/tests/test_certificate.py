from __future__ import annotations

import json

import pytest

import oracles
from twincut.certificate import (
    Base,
    CertificateError,
    ClosureCertificate,
    Glue,
    Substitute,
    certificate_stats,
    derive_certificate,
    replay,
    same_labelled_graph,
    twincut_certificate,
)
from twincut.construction import twincut_graph
from twincut.graph import Graph, cycle_graph, is_isomorphic, path_graph
from twincut.tree import StructuredTree, realize


def cert(*steps, result=None):
    return ClosureCertificate(tuple(steps), result or steps[-1].name)


def _graph(adj):
    labels = sorted(adj)
    index = {lab: i for i, lab in enumerate(labels)}
    return Graph(len(labels), [(index[a], index[b]) for a in labels for b in adj[a]], labels=labels)


def test_single_vertex():
    g = replay(cert(Base("a", ("x",))))
    assert g.n == 1 and g.m == 0 and g.labels == ("x",)


def test_path_from_edge_and_twin():
    c = cert(Base("a", ("x", "y"), (("x", "y"),)), Substitute("b", "a", "x", "z"))
    g = replay(c)
    assert is_isomorphic(g, path_graph(3))
    assert {frozenset((g.labels[u], g.labels[v])) for u, v in g.edges} == {
        frozenset("xy"), frozenset("zy")}


def test_glue_keeps_left_labels():
    c = cert(
        Base("a", ("x", "y"), (("x", "y"),)),
        Base("b", ("p", "q"), (("p", "q"),)),
        Glue("c", "a", "b", (("y", "p"),)),
    )
    g = replay(c)
    assert sorted(g.labels) == ["q", "x", "y"] and g.m == 2


def test_stats():
    k2 = twincut_certificate(2)
    assert certificate_stats(k2) == {"base": 1, "substitute": 0, "glue": 0, "max_size": 2}
    assert certificate_stats(twincut_certificate(3))["glue"] == 2
    # 12 glues at tree level in G4, plus 2 in each of the two inlined
    # certificates of the five-cycle parts.
    s4 = certificate_stats(twincut_certificate(4))
    assert s4["glue"] == 16 and s4["substitute"] == 16 and s4["base"] == 17
    assert s4["max_size"] == 23


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_replay_matches_construction(k):
    g = replay(twincut_certificate(k), require_triangle_free=True)
    assert same_labelled_graph(g, twincut_graph(k))


def test_g3_is_five_cycle():
    assert is_isomorphic(replay(twincut_certificate(3)), cycle_graph(5))


def test_same_labelled_graph_detects_difference(g4):
    h = replay(twincut_certificate(4))
    assert same_labelled_graph(h, g4)
    assert not same_labelled_graph(h, g4.delete_edge(*g4.edges[0]))
    assert not same_labelled_graph(h, Graph(g4.n, g4.edges))


EDGE = Base("a", ("x", "y"), (("x", "y"),))


@pytest.mark.parametrize(
    "bad, step",
    [
        (cert(Base("a", ("x", "y", "z"))), 0),
        (cert(Base("a", ("x", "x"))), 0),
        (cert(Base("a", ("x",), (("x", "x"),))), 0),
        (cert(EDGE, Substitute("b", "a", "x", "y")), 1),
        (cert(EDGE, Substitute("b", "a", "w", "z")), 1),
        (cert(EDGE, Substitute("b", "nope", "x", "z")), 1),
        (cert(EDGE, Glue("c", "a", "a", (("x", "x"),))), 1),
        (cert(EDGE, Base("b", ("p", "q"), (("p", "q"),)), Glue("c", "a", "b", (("x", "p"), ("y", "q")))), 2),
        (cert(EDGE, Base("b", ("x", "q"))), None),
        (cert(EDGE, Base("b", ("x", "q")), Glue("c", "a", "b", (("y", "q"),))), 2),
        (cert(EDGE, Base("b", ("p", "q")), Glue("c", "a", "b", (("x", "p"), ("x", "q")))), 2),
        (cert(EDGE, EDGE), 1),
        (cert(EDGE, result="zz"), None),
    ],
)
def test_tampered_certificates(bad, step):
    try:
        replay(bad)
    except CertificateError as exc:
        if step is not None:
            assert exc.step == step
        assert exc.record()["error"] == "invalid-certificate"
    else:
        # label reuse across separate graphs is legal until they meet in a glue
        assert step is None and bad.steps[1].labels == ("x", "q")


def test_triangle_closing_glue_is_unstable():
    # Stable gluing sets cannot close a triangle, so the attempt fails the
    # stability rule before any triangle check.
    c = cert(
        EDGE,
        Base("b", ("x", "z"), (("x", "z"),)),
        Glue("c", "a", "b", (("x", "x"),)),
        Base("d", ("y", "z"), (("y", "z"),)),
        Glue("e", "c", "d", (("y", "y"), ("z", "z"))),
    )
    with pytest.raises(CertificateError) as info:
        replay(c, require_triangle_free=True)
    assert info.value.step == 4 and "stable" in info.value.message


def test_tampered_twincut_certificate():
    good = twincut_certificate(4).to_dict()
    for i, s in enumerate(good["steps"]):
        if s["op"] == "glue" and len(s["identify"]) == 2:
            s["identify"][0][1] = s["identify"][1][1]
            break
    with pytest.raises(CertificateError) as info:
        replay(ClosureCertificate.from_dict(good))
    assert info.value.step == i


def test_substitution_preserves_chi_on_small_intermediates():
    seen: dict[str, dict] = {}
    checked = 0

    def on_step(i, step, adj):
        nonlocal checked
        seen[step.name] = adj
        if isinstance(step, Substitute) and len(adj) <= 9:
            src = seen[step.source]
            assert oracles.chromatic_number(_graph(adj)) == oracles.chromatic_number(_graph(src))
            checked += 1

    replay(twincut_certificate(4), on_step=on_step)
    assert checked > 0


@pytest.mark.parametrize("k", [2, 3, 4])
def test_json_round_trip(k):
    c = twincut_certificate(k)
    text = c.to_json()
    assert ClosureCertificate.from_json(text) == c
    assert json.loads(text)["result"] == c.result


@pytest.mark.parametrize("text", ["{", "[]", '{"steps": []}', '{"steps": [{"op": "twist"}], "result": "a"}',
                                  '{"steps": [{"op": "base"}], "result": "a"}'])
def test_malformed_json(text):
    with pytest.raises((CertificateError, AttributeError)):
        ClosureCertificate.from_json(text)


def test_derive_general_tree():
    c5 = cycle_graph(5)
    t = StructuredTree({(): c5, (2,): path_graph(2), (4,): Graph(1)})
    c5_cert = twincut_certificate(3)
    relabelled = _relabel_to_ids(c5_cert, c5)
    out = derive_certificate(t, {(): relabelled})
    assert is_isomorphic(replay(out), realize(t))
    with pytest.raises(CertificateError):
        derive_certificate(t, {})


def _relabel_to_ids(c: ClosureCertificate, target: Graph) -> ClosureCertificate:
    """Rename the labels of a certificate for a five-cycle to vertex ids of ``target``."""
    g = replay(c)
    iso = _iso(g, target)
    names = {g.labels[v]: str(iso[v]) for v in g.vertices}
    steps = []
    for s in c.steps:
        def r(x):
            return names.get(x, x)

        if isinstance(s, Base):
            steps.append(Base(s.name, tuple(map(r, s.labels)), tuple((r(a), r(b)) for a, b in s.edges)))
        elif isinstance(s, Substitute):
            steps.append(Substitute(s.name, s.source, r(s.vertex), r(s.twin)))
        else:
            steps.append(Glue(s.name, s.left, s.right, tuple((r(a), r(b)) for a, b in s.identify)))
    return ClosureCertificate(tuple(steps), c.result)


def _iso(g, h):
    from twincut.graph import find_isomorphism

    m = find_isomorphism(g, h)
    assert m is not None
    return m
