"""KS comparison of global graph statistics before and after growth."""

from __future__ import annotations

from dataclasses import dataclass

from netform.graph import Graph, GraphError, edge_diff
from netform.metrics.stats import TestResult, ks_two_sample

STATISTICS = ("degrees", "component_sizes", "spectrum", "local_clustering")


@dataclass(frozen=True)
class ChangeReport:
    tests: dict[str, TestResult]
    percent_new_edges: float
    n_new_edges: int

    def as_dict(self) -> dict:
        out = {name: {"ks": r.statistic, "p": r.p_value} for name, r in self.tests.items()}
        out["percent_new_edges"] = self.percent_new_edges
        out["n_new_edges"] = self.n_new_edges
        return out


def _summaries(g: Graph) -> dict:
    return {
        "degrees": g.degrees(),
        "component_sizes": [len(c) for c in g.connected_components()],
        "spectrum": g.singular_values(),
        "local_clustering": g.local_clustering(),
    }


def graph_change_report(g1: Graph, gT: Graph) -> ChangeReport:
    if g1.n != gT.n:
        raise GraphError(f"node sets differ: {g1.n} vs {gT.n} nodes")
    a, b = _summaries(g1), _summaries(gT)
    tests = {name: ks_two_sample(a[name], b[name]) for name in STATISTICS}
    diff = edge_diff(g1, gT)
    base = g1.edge_count
    pct = 100.0 * len(diff) / base if base else (0.0 if len(diff) == 0 else float("inf"))
    return ChangeReport(tests, pct, len(diff))
