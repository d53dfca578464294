from __future__ import annotations

import json

import pytest

from twincut.coloring import Budget
from twincut.criticality import verify_critical


@pytest.mark.parametrize("k, m", [(2, 1), (3, 5), (4, 41)])
def test_complete(k, m):
    rep = verify_critical(k)
    assert rep.complete and rep.chi == k and rep.chi_status == "exact"
    assert len(rep.per_edge) == m and rep.fallbacks == 0
    assert all(r.palette <= k - 1 for r in rep.per_edge)


def test_workers_keep_order():
    one = verify_critical(4, compute_chi=False)
    two = verify_critical(4, workers=2, compute_chi=False)
    assert [r.edge for r in one.per_edge] == [r.edge for r in two.per_edge]
    assert one.per_edge == two.per_edge
    assert one.chi_status == "skipped" and not one.complete


def test_chi_budget_reported_unknown():
    rep = verify_critical(5, chi_budget=Budget(max_nodes=500))
    assert rep.chi is None and rep.chi_status == "unknown"
    assert rep.verified == len(rep.per_edge) == 1341


def test_report_json():
    d = verify_critical(3).to_dict()
    assert d["edges"] == d["verified"] == 5 and d["fallbacks"] == 0
    assert json.loads(json.dumps(d))["per_edge"][0] == {
        "edge": ["T:", "B:0"], "palette": 2, "status": "verified", "path": "constructive"}


def test_rejects_small_k():
    with pytest.raises(ValueError):
        verify_critical(1)
