"""Held-out friend recovery on an observed (or synthetic) attributed graph."""

from __future__ import annotations

import numpy as np

from netform.choice.recsys import RecsysModel, recsys_rank, train_recsys
from netform.experiments.artifact import RunArtifact, Trajectory
from netform.experiments.config import ExperimentConfig
from netform.experiments.drivers import Recorder, _new_artifact, make_policy
from netform.graph import Graph
from netform.netgen import AttributeSchema, AttributeTable, attributed_graph
from netform.policies import prompts
from netform.policies.agents import Policy
from netform.rng import stream

SYNTHETIC_VOCABULARIES = {
    "status": ["student", "faculty", "alumni"],
    "major": list(range(10)),
    "accommodation": ["house", "dorm", "apartment"],
    "year": [2005, 2006, 2007, 2008],
}


class RealWorldError(ValueError):
    pass


def synthetic_network(cfg: ExperimentConfig) -> tuple[Graph, AttributeTable]:
    schema = AttributeSchema.from_mapping(SYNTHETIC_VOCABULARIES)
    return attributed_graph(cfg.n, schema, cfg.mean_degree, cfg.homophily, stream(cfg.seed, "graph"))


def remove_friends(g0: Graph, n_choosers: int, rng) -> tuple[Graph, list[tuple[int, int]]]:
    """Pick choosers in random order and drop one random neighbour each.

    Nodes without neighbours at their turn are skipped and the next one is tried.
    """
    g = g0.copy()
    removed: list[tuple[int, int]] = []
    for i in rng.permutation(g.n):
        if len(removed) == n_choosers:
            break
        i = int(i)
        nb = g.neighbors(i)
        if not nb:
            continue
        j = nb[int(rng.integers(len(nb)))]
        g._remove_edge(i, j)
        removed.append((i, j))
    if len(removed) < n_choosers:
        raise RealWorldError(f"only {len(removed)} nodes could lose a friend; {n_choosers} requested")
    return g, removed


def run_realworld(cfg: ExperimentConfig, g0: Graph | None = None, attrs: AttributeTable | None = None,
                  policy: Policy | None = None) -> RunArtifact:
    if g0 is None:
        g0, attrs = synthetic_network(cfg)
    if attrs is None:
        raise RealWorldError("real-world runs need an attribute table")
    art = _new_artifact(cfg)
    policy = policy or make_policy(cfg)
    art.attributes = {"columns": attrs.to_columns(), "vocab": attrs.vocab}

    g1, removed = remove_friends(g0, cfg.n_choosers, stream(cfg.seed, "removal"))
    art.removed_edges = removed
    traj = Trajectory(g1.n, g1.edges(), meta={"strategy": cfg.strategy, "A": cfg.A})
    art.trajectories.append(traj)
    g = g1.copy()
    rec = Recorder(cfg, policy, art, attrs)
    cand_rng = stream(cfg.seed, "candidates")
    model: RecsysModel | None = None
    if cfg.strategy == "recsys":
        model = train_recsys(g1, attrs, cfg.recsys_sample, stream(cfg.seed, "recsys"))
        art.extra["recsys"] = {"psi": model.psi.tolist(), "auc": model.auc, "n_pos": model.n_pos,
                               "n_neg": model.n_neg, "ridge": model.ridge}

    def profile(gr, i, v):
        return prompts.realworld_profile(gr, attrs, i, v)

    def self_profile(gr, i):
        p = prompts.attribute_profile(attrs, i)
        return prompts.CandidateProfile(p.display_name, {**p.features, "degree": gr.degree(i)})

    for i, j in removed:
        pool = g.non_neighbors(i)
        if len(pool) < cfg.A:
            raise RealWorldError(f"node {i} has {len(pool)} non-neighbours, fewer than A={cfg.A}")
        if cfg.strategy == "uniform":
            if j in pool:
                others = [v for v in pool if v != j]
                picks = cand_rng.choice(len(others), size=cfg.A - 1, replace=False)
                cands = [j] + [others[int(p)] for p in picks]
            else:
                picks = cand_rng.choice(len(pool), size=cfg.A, replace=False)
                cands = [pool[int(p)] for p in picks]
            cands = [cands[int(p)] for p in cand_rng.permutation(len(cands))]
        else:
            cands = recsys_rank(model, g, attrs, i, pool, cfg.A)
        raw, decision, chosen = rec.ask(g, i, cands, 1, self_profile, profile)
        step = rec.t
        rec.record(0, i, cands, raw, decision, chosen, extra={"removed_friend": j, "in_set": j in cands})
        for v in chosen:
            g.add_edge(i, v)
            traj.events.append((step, "add", i, v))
    return art


def accuracy_vs_random(accuracy: float, A: int) -> float:
    """Percent improvement of accuracy over the ``1/A`` random baseline."""
    base = 1.0 / A
    return (accuracy - base) / base * 100.0


def original_graph(art: RunArtifact) -> Graph:
    g = Graph(art.trajectories[0].n, art.trajectories[0].g1_edges)
    for u, v in art.removed_edges:
        g.add_edge(u, v)
    return g.freeze()
