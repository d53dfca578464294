"""Edge-criticality sweep over G_k."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any

from twincut.coloring import (
    Budget,
    BudgetExceeded,
    ChiResult,
    ConstructionFault,
    chromatic_number,
    edge_deleted_coloring,
    is_proper,
)
from twincut.construction import twincut_graph

DEFAULT_CHI_BUDGET = Budget(time_limit=60.0)


@dataclass
class EdgeRecord:
    edge: tuple[str, str]
    palette: int | None
    status: str  # "verified", "failed" or "unknown"
    path: str | None  # "constructive" or "solver-fallback"


@dataclass
class CriticalityReport:
    k: int
    chi: int | None
    chi_status: str
    per_edge: list[EdgeRecord] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def verified(self) -> int:
        return sum(r.status == "verified" for r in self.per_edge)

    @property
    def fallbacks(self) -> int:
        return sum(r.path == "solver-fallback" for r in self.per_edge)

    @property
    def complete(self) -> bool:
        """Every edge certified and chi(G_k) = k confirmed."""
        return self.chi == self.k and self.verified == len(self.per_edge)

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "chi": self.chi,
            "chi_status": self.chi_status,
            "edges": len(self.per_edge),
            "verified": self.verified,
            "fallbacks": self.fallbacks,
            "elapsed": round(self.elapsed, 6),
            "per_edge": [asdict(r) for r in self.per_edge],
        }


def _check_edge(k: int, e: tuple[int, int], budget: Budget | None) -> EdgeRecord:
    g = twincut_graph(k)
    name = (str(g.label(e[0])), str(g.label(e[1])))
    try:
        res = edge_deleted_coloring(k, e, budget)
    except BudgetExceeded:
        return EdgeRecord(name, None, "unknown", "solver-fallback")
    except ConstructionFault:
        return EdgeRecord(name, None, "failed", "solver-fallback")
    ok = res.coloring.palette <= k - 1 and is_proper(g.delete_edge(*e), res.coloring)
    return EdgeRecord(name, res.coloring.palette, "verified" if ok else "failed", res.path)


def verify_critical(
    k: int,
    budget: Budget | None = None,
    workers: int = 1,
    chi_budget: Budget | None = None,
    compute_chi: bool = True,
) -> CriticalityReport:
    """Certify that deleting any edge of G_k drops its chromatic number.

    Records come back in edge order whatever ``workers`` is.  The exact
    chromatic number uses the first limited one of ``chi_budget`` and
    ``budget``, else a one-minute limit.
    """
    if k < 2:
        raise ValueError("criticality is checked for k >= 2")
    started = time.perf_counter()
    g = twincut_graph(k)
    chi: ChiResult | None = None
    if compute_chi:
        limited = [b for b in (chi_budget, budget) if b is not None and b.limited]
        chi = chromatic_number(g, limited[0] if limited else DEFAULT_CHI_BUDGET)
    edges = list(g.edges)
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            records = list(pool.map(_check_edge, [k] * len(edges), edges, [budget] * len(edges), chunksize=64))
    else:
        records = [_check_edge(k, e, budget) for e in edges]
    return CriticalityReport(
        k=k,
        chi=chi.chi if chi else None,
        chi_status="skipped" if chi is None else "exact" if chi.exact else "unknown",
        per_edge=records,
        elapsed=time.perf_counter() - started,
    )
