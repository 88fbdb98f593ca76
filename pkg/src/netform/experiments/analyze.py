"""Per-kind reports for run artifacts and summaries across seeded runs."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from netform.choice.borda import borda_alignment
from netform.choice.dataset import ChoiceDataset, ChoiceObservation
from netform.choice.mnl import (
    FEATURE_LABELS, NonIdentifiableError, average_marginal_effects, dataset_sampler, fit_mnl, tv_distance,
)
from netform.choice.dataset import ChoiceDataError
from netform.experiments.artifact import RunArtifact
from netform.experiments.config import ExperimentConfig
from netform.experiments.drivers import random_null_growth
from netform.experiments.realworld import accuracy_vs_random, original_graph
from netform.graph import Graph, edge_diff
from netform.metrics import (
    DegenerateInputError, PowerLawError, UndefinedMetricError, attribute_assortativity, bonferroni,
    graph_change_report, linreg, louvain_modularity, marginal_transitivity, power_law_fit,
    shared_attribute_weight, small_world_metrics, spearman, t_test_one_sample, t_test_two_sample, topk_curve,
    transitivity, within_community_edge_prob,
)
from netform.netgen import watts_strogatz
from netform.rng import stream


class AnalysisError(ValueError):
    pass


def _fit_report(data: ChoiceDataset) -> dict:
    try:
        fit = fit_mnl(data)
    except (NonIdentifiableError, ChoiceDataError) as exc:
        return {"error": str(exc)}
    ame = average_marginal_effects(fit, data)
    return {
        "coefficients": fit.table(),
        "log_likelihood": fit.log_likelihood,
        "aic": fit.aic,
        "aic_k4": fit.aic_k4,
        "n_obs": fit.n_obs,
        "grad_norm": fit.grad_norm,
        "ame": ame.as_dict(),
    }


def _curve(c) -> dict:
    return {"grid": list(c.grid), "prob": c.prob.tolist(), "null": c.null.tolist(), "n": c.n_decisions,
            "ties": c.ties}


def _safe(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (UndefinedMetricError, DegenerateInputError, PowerLawError, ValueError) as exc:
        return {"undefined": str(exc)}


def analyze_p1(art: RunArtifact) -> dict:
    gT = art.gT()
    deg = gT.degrees()
    data = art.choice_dataset()
    out = {
        "n_decisions": len(art.decisions),
        "power_law": _safe(lambda: power_law_fit(deg).__dict__),
        "power_law_scan": _safe(lambda: power_law_fit(deg, scan=True).__dict__),
        "topk_degree": _curve(topk_curve(data, "degree")),
        "max_degree": int(deg.max()) if deg.size else 0,
    }
    return out


def null_D(g1: Graph, steps: int, delta: int, runs: int, seed: int) -> list[float]:
    out = []
    for r in range(runs):
        gT = random_null_growth(g1, steps, delta, stream(seed, "null", r))
        out.append(marginal_transitivity(g1, gT))
    return out


def analyze_p2(art: RunArtifact) -> dict:
    cfg = art.config
    traj = art.trajectories[0]
    g1, gT = art.g1(), art.gT()
    D = marginal_transitivity(g1, gT)
    diff = edge_diff(g1, gT)
    out: dict = {"D": D, "transitivity_g1": transitivity(g1), "transitivity_gT": transitivity(gT),
                 "n_new_edges": len(diff)}
    if traj.labels is not None:
        out["p_hat"] = _safe(within_community_edge_prob, diff, traj.labels)
    if gT.edge_count:
        out["Q_gT"] = louvain_modularity(gT, seed=stream(int(cfg["seed"]), "louvain")).q
    if g1.edge_count:
        out["Q_g1"] = louvain_modularity(g1, seed=stream(int(cfg["seed"]), "louvain")).q
    nulls = null_D(g1, int(cfg["T"]), int(cfg["delta"]), int(cfg["null_runs"]), int(cfg["seed"]))
    out["D_null"] = {"values": nulls, "mean": float(np.mean(nulls)), "std": float(np.std(nulls, ddof=1))
                     if len(nulls) > 1 else 0.0}
    return out


def analyze_p3(art: RunArtifact) -> dict:
    gT = art.gT()
    attrs = art.attribute_table()
    out: dict = {"n_edges": gT.edge_count, "assortativity": {}}
    for name in attrs.names:
        out["assortativity"][name] = _safe(attribute_assortativity, gT, attrs.column(name))
    if gT.edge_count:
        try:
            res = louvain_modularity(gT, shared_attribute_weight(attrs), seed=stream(int(art.config["seed"]), "louvain"))
            out["modularity"] = {"q": res.q, "communities": res.n_communities}
        except ValueError as exc:
            out["modularity"] = {"undefined": str(exc)}
    return out


def beta_hat(c_target: float, n: int, k: int, reps: int = 10, seed: int = 0, iters: int = 30) -> float:
    """Classical WS rewiring probability whose mean clustering matches ``c_target``.

    Bisection on beta with the same random streams at every probe, so the
    mean clustering is a step function of beta rather than a noisy one.
    """
    def mean_c(beta):
        return float(np.mean([small_world_metrics(watts_strogatz(n, k, beta, stream(seed, "ws", r)))[1]
                              for r in range(reps)]))

    lo, hi = 0.0, 1.0
    if c_target >= mean_c(lo):
        return 0.0
    if c_target <= mean_c(hi):
        return 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mean_c(mid) > c_target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def analyze_p5(art: RunArtifact, beta_reps: int = 5) -> dict:
    k = int(art.config["k"])
    seed = int(art.config["seed"])
    rows = []
    for i, traj in enumerate(art.trajectories):
        L, C = small_world_metrics(art.gT(i))
        rows.append({"n": traj.n, "L": L, "C": C, "skipped": traj.meta.get("skipped", 0),
                     "beta_hat": beta_hat(C, traj.n, k, beta_reps, seed)})
    out: dict = {"series": rows}
    if len(rows) >= 3:
        ns = np.array([r["n"] for r in rows], dtype=np.float64)
        L = np.array([r["L"] for r in rows])
        C = np.array([r["C"] for r in rows])
        out["L_vs_ln_n"] = _safe(lambda: linreg(L, np.log(ns)).__dict__)
        out["C_vs_inv_ln_n"] = _safe(lambda: linreg(C, 1.0 / np.log(ns)).__dict__)
    return out


def analyze_realworld(art: RunArtifact, louvain_runs: int | None = None) -> dict:
    A = int(art.config["A"])
    data = art.choice_dataset()
    hits = [rec.chosen[:1] == [rec.extra["removed_friend"]] for rec in art.decisions]
    acc = float(np.mean(hits)) if hits else float("nan")
    g0, g1, gT = original_graph(art), art.g1(), art.gT()
    runs = int(art.config["louvain_runs"]) if louvain_runs is None else louvain_runs
    seed = int(art.config["seed"])
    q0 = [louvain_modularity(g0, seed=stream(seed, "louvain", r)).q for r in range(runs)]
    qT = [louvain_modularity(gT, seed=stream(seed, "louvain", r)).q for r in range(runs)]
    out = {
        "fit": _fit_report(data),
        "accuracy": acc,
        "random_accuracy": 1.0 / A,
        "percent_change_vs_random": accuracy_vs_random(acc, A),
        "in_set_rate": float(np.mean([rec.extra.get("in_set", False) for rec in art.decisions])),
        "graph_change": graph_change_report(g1, gT).as_dict(),
        "modularity_change": {"q_original": q0, "q_final": qT,
                              "t_test": _safe(lambda: t_test_two_sample(q0, qT).__dict__)},
    }
    if "recsys" in art.extra:
        out["recsys"] = art.extra["recsys"]
    return out


def survey_dataset(art: RunArtifact, context: str) -> ChoiceDataset:
    obs = [ChoiceObservation(rec.chooser, tuple(rec.candidates), np.asarray(rec.raw), rec.chosen[0])
           for rec in art.decisions if rec.extra.get("context") == context]
    return ChoiceDataset(obs)


def analyze_survey(art: RunArtifact) -> dict:
    contexts = list(art.config["contexts"])
    groups = {c: [rec.extra["rankings"] for rec in art.decisions if rec.extra.get("context") == c]
              for c in contexts}
    align = borda_alignment(groups)
    fits = {}
    for c in contexts:
        try:
            fits[c] = fit_mnl(survey_dataset(art, c))
        except (ChoiceDataError, NonIdentifiableError) as exc:
            fits[c] = str(exc)
    out: dict = {"alignment": align.as_dict(), "dropped": art.extra.get("dropped", {}),
                 "fits": {c: (f.table() if not isinstance(f, str) else {"error": f}) for c, f in fits.items()}}
    pairs = {}
    seed = int(art.config["seed"])
    for i, a in enumerate(contexts):
        for b in contexts[i + 1:]:
            fa, fb = fits[a], fits[b]
            if isinstance(fa, str) or isinstance(fb, str):
                continue
            sampler = dataset_sampler(ChoiceDataset(list(survey_dataset(art, a)) + list(survey_dataset(art, b))))
            pairs[f"{a}|{b}"] = {
                "tv": tv_distance(fa, fb, sampler, 1000, stream(seed, "tv")),
                "spearman_theta": _safe(spearman, fa.theta, fb.theta),
            }
    out["between_fits"] = pairs
    return out


ANALYZERS = {"p1": analyze_p1, "p2": analyze_p2, "p3": analyze_p3, "p5": analyze_p5,
             "realworld": analyze_realworld, "survey": analyze_survey}


def analyze(art: RunArtifact, kind: str | None = None) -> dict:
    """Kind-appropriate metrics report; pure in the artifact contents."""
    if kind is not None and kind != art.kind:
        raise AnalysisError(f"artifact is a {art.kind!r} run, not {kind!r}")
    if art.kind not in ANALYZERS:
        raise AnalysisError(f"no analysis for kind {art.kind!r}")
    report = {"kind": art.kind, "status": art.status, "replay_ok": art.replay_ok(),
              "config_fingerprint": art.config_fingerprint}
    report.update(ANALYZERS[art.kind](art))
    return report


# --------------------------------------------------------------------------
# across-run summaries

def summarize_runs(reports: Sequence[dict]) -> dict:
    if not reports:
        raise AnalysisError("no reports to summarise")
    kind = reports[0]["kind"]
    if any(r["kind"] != kind for r in reports):
        raise AnalysisError("cannot summarise reports of different kinds")
    out: dict = {"kind": kind, "runs": len(reports)}
    if kind == "p1":
        prob = np.array([r["topk_degree"]["prob"] for r in reports])
        n = sum(r["topk_degree"]["n"] for r in reports)
        null = np.array(reports[0]["topk_degree"]["null"])
        mean = prob.mean(axis=0)
        se = np.sqrt(null * (1 - null) / n)
        out["topk_mean"] = mean.tolist()
        out["topk_max_z"] = float(np.max(np.abs(mean - null) / np.where(se > 0, se, np.inf)))
    elif kind == "p2":
        D = [r["D"] for r in reports]
        D_null = [v for r in reports for v in r["D_null"]["values"]]
        out["D"] = D
        out["D_vs_zero"] = _safe(lambda: t_test_one_sample(D, 0.0).__dict__)
        out["D_vs_null"] = _safe(lambda: t_test_two_sample(D, D_null).__dict__)
        p_hat = [r["p_hat"] for r in reports if isinstance(r.get("p_hat"), float)]
        if p_hat:
            out["p_hat"] = p_hat
            out["p_hat_vs_half"] = _safe(lambda: t_test_one_sample(p_hat, 0.5).__dict__)
    elif kind == "p3":
        feats = list(reports[0]["assortativity"])
        n_tests = len(feats)
        out["assortativity"] = {}
        for f in feats:
            vals = [r["assortativity"][f] for r in reports if isinstance(r["assortativity"][f], float)]
            res = _safe(t_test_one_sample, vals, 0.0)
            entry = {"values": vals, "mean": float(np.mean(vals)) if vals else float("nan")}
            if not isinstance(res, dict):
                entry.update(t=res.statistic, p=res.p_value, p_bonferroni=bonferroni(res.p_value, n_tests))
            out["assortativity"][f] = entry
    elif kind == "p5":
        out["series"] = [r["series"] for r in reports]
    elif kind == "realworld":
        out["accuracy"] = [r["accuracy"] for r in reports]
        out["percent_change_vs_random"] = [r["percent_change_vs_random"] for r in reports]
    elif kind == "survey":
        out["alignment"] = [r["alignment"] for r in reports]
    return out


def classical_ws_band(n: int, k: int, beta: float, runs: int, seed: int) -> tuple[list[float], list[float]]:
    L, C = [], []
    for r in range(runs):
        l, c = small_world_metrics(watts_strogatz(n, k, beta, stream(seed, "classical-ws", r)))
        L.append(l)
        C.append(c)
    return L, C


def fit_label_order(theta) -> list[str]:
    return [FEATURE_LABELS[i] for i in np.argsort(-np.asarray(theta), kind="stable")]
