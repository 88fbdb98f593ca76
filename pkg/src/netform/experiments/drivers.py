"""Seeded growth drivers: preferential attachment, triadic closure, homophily, small world."""

from __future__ import annotations

import logging
from typing import Callable, Sequence

import numpy as np

from netform.experiments.artifact import DecisionRecord, RunArtifact, Trajectory
from netform.experiments.config import ExperimentConfig
from netform.graph import Graph
from netform.netgen import (
    AttributeSchema, AttributeTable, SeedSpec, generate_attributes, generate_seed, ring_lattice,
)
from netform.policies import prompts
from netform.policies.agents import (
    AbstainPolicy, ArgmaxPolicy, DecisionContext, LlmPolicy, MnlPolicy, Policy, PolicyError, RandomPolicy,
)
from netform.policies.llm import LlmClient, LlmEndpointConfig
from netform.policies.prompts import CandidateProfile, PromptBundle
from netform.rng import stream

log = logging.getLogger(__name__)


class RunAborted(RuntimeError):
    """A policy failure stopped the run; ``artifact`` holds everything recorded so far."""

    def __init__(self, message: str, artifact: RunArtifact):
        super().__init__(message)
        self.artifact = artifact


def make_policy(cfg: ExperimentConfig, client: LlmClient | None = None) -> Policy:
    pol = cfg.policy
    rng = stream(cfg.seed, "policy", pol.seed)
    if pol.kind == "random":
        return RandomPolicy(rng)
    if pol.kind == "mnl":
        return MnlPolicy(pol.theta, rng)
    if pol.kind == "argmax":
        return ArgmaxPolicy(pol.key)
    if pol.kind == "abstain":
        return AbstainPolicy()
    if client is None:
        client = LlmClient(llm_config(cfg))
    return LlmPolicy(client)


def llm_config(cfg: ExperimentConfig) -> LlmEndpointConfig:
    pol = cfg.policy
    return LlmEndpointConfig(pol.endpoint, pol.model, pol.temperature, pol.timeout, pol.max_retries,
                             pol.cache_dir or None, attempt_offset=pol.attempt_offset,
                             max_concurrency=pol.max_concurrency)


def raw_features(g: Graph, attrs: AttributeTable | None, chooser: int, candidates: Sequence[int]) -> np.ndarray:
    """Rows of (degree, shared attributes, common neighbours) at the current state."""
    cands = np.asarray(candidates, dtype=np.int64)
    deg = np.array([g.degree(v) for v in cands], dtype=np.float64)
    sim = (attrs.similarity_to(chooser, cands).astype(np.float64) if attrs is not None
           else np.zeros(cands.size))
    nb = g.neighbor_set(chooser)
    common = np.array([len(nb & g.neighbor_set(v)) for v in cands], dtype=np.float64)
    return np.column_stack([deg, sim, common]).reshape(-1, 3)


ProfileFn = Callable[[Graph, int, int], CandidateProfile]  # (graph, chooser, candidate)
SelfFn = Callable[[Graph, int], CandidateProfile]


class Recorder:
    """Queries the policy and logs every decision with strictly increasing ``t``."""

    def __init__(self, cfg: ExperimentConfig, policy: Policy, artifact: RunArtifact,
                 attrs: AttributeTable | None = None):
        self.cfg = cfg
        self.policy = policy
        self.art = artifact
        self.attrs = attrs
        self.t = 0
        self.order_rng = stream(cfg.seed, "presentation")

    def present(self, candidates: Sequence[int]) -> list[int]:
        cands = [int(v) for v in candidates]
        if self.cfg.shuffle_candidates:
            perm = self.order_rng.permutation(len(cands))
            cands = [cands[i] for i in perm]
        return cands

    def ask(self, g: Graph, chooser: int, candidates: Sequence[int], delta: int,
            self_fn: SelfFn, profile_fn: ProfileFn):
        raw = raw_features(g, self.attrs, chooser, candidates)

        def bundle():
            return PromptBundle(self.cfg.environment, self_fn(g, chooser),
                                tuple(profile_fn(g, chooser, v) for v in candidates), delta, self.cfg.variant)

        ctx = DecisionContext(chooser, list(candidates), raw, delta, bundle)
        try:
            decision = self.policy.decide(ctx)
        except PolicyError as exc:
            self.art.status = "aborted"
            self.art.error = str(exc)
            raise RunAborted(str(exc), self.art) from exc
        chosen = [int(candidates[i]) for i in decision.indices]
        return raw, decision, chosen

    def record(self, traj: int, chooser: int, candidates, raw, decision, chosen, removed=None, extra=None):
        rec = DecisionRecord(self.t, traj, int(chooser), [int(v) for v in candidates], raw.tolist(), chosen,
                             list(decision.names) if decision is not None else [],
                             decision.raw_response if decision is not None else None,
                             decision.fingerprint if decision is not None else "forced",
                             None if removed is None else [int(removed[0]), int(removed[1])], extra or {})
        self.art.decisions.append(rec)
        self.t += 1
        return rec

    def confirm(self, g: Graph, proposer: int, target: int, self_fn, profile_fn) -> bool:
        """Mutual-agreement mode: the target must also pick the proposer."""
        _, decision, chosen = self.ask(g, target, [proposer], 1, self_fn, profile_fn)
        return chosen == [proposer]


def _new_artifact(cfg: ExperimentConfig) -> RunArtifact:
    return RunArtifact(cfg.kind, cfg.to_dict(), cfg.fingerprint())


def _commit(rec: Recorder, g: Graph, traj: Trajectory, traj_idx: int, chooser: int, candidates, raw,
            decision, chosen, self_fn, profile_fn) -> None:
    rejected = False
    if rec.cfg.mutual and chosen:
        accepted = [v for v in chosen if rec.confirm(g, chooser, v, self_fn, profile_fn)]
        rejected = len(accepted) < len(chosen)
        if rejected:
            # log the proposal, then the accepted subset as its own decision
            rec.record(traj_idx, chooser, candidates, raw, decision, chosen, extra={"rejected": True})
            chosen = accepted
            decision = None if not accepted else decision
    step = rec.t
    rec.record(traj_idx, chooser, candidates, raw, decision, chosen,
               extra={"confirmed": True} if rejected else None)
    for v in chosen:
        g.add_edge(chooser, v)
        traj.events.append((step, "add", chooser, v))


# --------------------------------------------------------------------------
# preferential attachment: sequential arrivals

def run_principle1(cfg: ExperimentConfig, policy: Policy | None = None) -> RunArtifact:
    art = _new_artifact(cfg)
    policy = policy or make_policy(cfg)
    n = cfg.n
    g = Graph(n)
    traj = Trajectory(n, [], meta={"growth": "sequential arrivals", "order": "ascending id"})
    art.trajectories.append(traj)
    rec = Recorder(cfg, policy, art)

    if cfg.degree_only:
        def profile(gr, i, v):
            return prompts.degree_profile(gr, v)

        def self_profile(gr, i):
            return prompts.degree_profile(gr, i)
    else:
        def profile(gr, i, v):
            return prompts.neighbors_profile(gr, v)

        def self_profile(gr, i):
            return prompts.neighbors_profile(gr, i)

    for arrival in range(1, n):
        existing = list(range(arrival))
        if arrival == 1:
            raw = raw_features(g, None, arrival, existing)
            rec.record(0, arrival, existing, raw, None, [0], extra={"forced": True})
            g.add_edge(arrival, 0)
            traj.events.append((rec.t - 1, "add", arrival, 0))
            continue
        cands = rec.present(existing)
        raw, decision, chosen = rec.ask(g, arrival, cands, cfg.delta, self_profile, profile)
        _commit(rec, g, traj, 0, arrival, cands, raw, decision, chosen, self_profile, profile)
    return art


# --------------------------------------------------------------------------
# triadic closure on a seeded graph

def p2_seed(cfg: ExperimentConfig) -> tuple[Graph, np.ndarray | None]:
    if cfg.seed_graph == "sbm":
        spec = SeedSpec("sbm", cfg.n, {"p_in": cfg.p_in, "p_out": cfg.p_out}, cfg.seed)
    elif cfg.seed_graph == "er":
        spec = SeedSpec("er", cfg.n, {"p": cfg.p}, cfg.seed)
    else:
        spec = SeedSpec("empty", cfg.n, {}, cfg.seed)
    g, labels = generate_seed_stream(spec)
    return g, labels


def generate_seed_stream(spec: SeedSpec):
    """Seed graph drawn from the dedicated ``graph`` stream of the master seed."""
    from netform import netgen

    rng = stream(spec.seed, "graph")
    p = spec.params
    if spec.kind == "sbm":
        return netgen.stochastic_block_model(spec.n, float(p["p_in"]), float(p["p_out"]), rng)
    if spec.kind == "er":
        return netgen.erdos_renyi(spec.n, float(p["p"]), rng), None
    return generate_seed(spec)


def run_principle2(cfg: ExperimentConfig, policy: Policy | None = None) -> RunArtifact:
    """``T`` decision steps; step ``t`` queries node ``t mod n`` (ascending id order)."""
    art = _new_artifact(cfg)
    policy = policy or make_policy(cfg)
    g1, labels = p2_seed(cfg)
    g = g1.copy()
    traj = Trajectory(cfg.n, g1.edges(), labels=None if labels is None else [str(x) for x in labels],
                      meta={"order": "ascending id, cyclic", "steps": cfg.T})
    art.trajectories.append(traj)
    rec = Recorder(cfg, policy, art)

    def profile(gr, i, v):
        return prompts.common_neighbors_profile(gr, i, v, cfg.common_as_count)

    def self_profile(gr, i):
        return prompts.neighbors_profile(gr, i)

    for step in range(cfg.T):
        chooser = step % cfg.n
        pool = g.non_neighbors(chooser)
        if not pool:
            continue
        cands = rec.present(pool)
        raw, decision, chosen = rec.ask(g, chooser, cands, cfg.delta, self_profile, profile)
        _commit(rec, g, traj, 0, chooser, cands, raw, decision, chosen, self_profile, profile)
    return art


def random_null_growth(g1: Graph, steps: int, delta: int, rng) -> Graph:
    """Reference process for the triadic-closure null: uniform non-neighbour picks.

    Written independently of the policy machinery so it can serve as an oracle.
    """
    n = g1.n
    adj = [set(g1.neighbors(u)) for u in range(n)]
    for step in range(steps):
        u = step % n
        pool = [v for v in range(n) if v != u and v not in adj[u]]
        if not pool:
            continue
        k = min(delta, len(pool))
        for j in rng.choice(len(pool), size=k, replace=False):
            v = pool[int(j)]
            adj[u].add(v)
            adj[v].add(u)
    return Graph(n, ((u, v) for u in range(n) for v in adj[u] if u < v))


# --------------------------------------------------------------------------
# homophily on an empty graph with attributes

def p3_attributes(cfg: ExperimentConfig) -> AttributeTable:
    return generate_attributes(cfg.n, AttributeSchema.default(cfg.distractor), stream(cfg.seed, "attributes"))


def run_principle3(cfg: ExperimentConfig, policy: Policy | None = None) -> RunArtifact:
    """Each node, in ascending id order, picks up to ``delta`` partners from its non-neighbours."""
    art = _new_artifact(cfg)
    policy = policy or make_policy(cfg)
    attrs = p3_attributes(cfg)
    art.attributes = {"columns": attrs.to_columns(), "vocab": attrs.vocab}
    g = Graph(cfg.n)
    traj = Trajectory(cfg.n, [], meta={"order": "ascending id"})
    art.trajectories.append(traj)
    rec = Recorder(cfg, policy, art, attrs)

    def profile(gr, i, v):
        return prompts.attribute_profile(attrs, v)

    def self_profile(gr, i):
        return prompts.attribute_profile(attrs, i)

    for chooser in range(cfg.n):
        pool = g.non_neighbors(chooser)
        if not pool:
            continue
        cands = rec.present(pool)
        raw, decision, chosen = rec.ask(g, chooser, cands, cfg.delta, self_profile, profile)
        _commit(rec, g, traj, 0, chooser, cands, raw, decision, chosen, self_profile, profile)
    return art


# --------------------------------------------------------------------------
# small world: policy-driven rewiring of a ring lattice

def rewire_lattice(n: int, k: int, beta: float, rec: Recorder, traj_idx: int, rewire_rng) -> Trajectory:
    """Node-outer pass over each node's ``k // 2`` clockwise edges.

    A selected edge ``(u, v)`` is replaced by ``(u, w)`` with ``w`` picked by the
    policy among ``u``'s non-neighbours.  An empty answer is re-queried once and
    then skipped.
    """
    g = ring_lattice(n, k)
    traj = Trajectory(n, g.edges(), meta={"beta": beta, "k": k, "skipped": 0})
    rec.art.trajectories.append(traj)

    def profile(gr, i, v):
        return prompts.neighbors_profile(gr, v)

    def self_profile(gr, i):
        return prompts.neighbors_profile(gr, i)

    for u in range(n):
        for j in range(1, k // 2 + 1):
            v = (u + j) % n
            if rewire_rng.random() >= beta:
                continue
            if not g.has_edge(u, v):
                continue
            pool = g.non_neighbors(u)
            if not pool:
                continue
            cands = rec.present(pool)
            raw, decision, chosen = rec.ask(g, u, cands, 1, self_profile, profile)
            if not chosen:
                raw, decision, chosen = rec.ask(g, u, cands, 1, self_profile, profile)
            if not chosen:
                traj.meta["skipped"] += 1
                log.info("rewire of (%d, %d) skipped: no valid target", u, v)
                rec.record(traj_idx, u, cands, raw, decision, [], extra={"skipped": [u, v]})
                continue
            w = chosen[0]
            step = rec.t
            rec.record(traj_idx, u, cands, raw, decision, [w], removed=(u, v))
            g._remove_edge(u, v)
            g.add_edge(u, w)
            traj.events.append((step, "remove", u, v))
            traj.events.append((step, "add", u, w))
    return traj


def run_principle5(cfg: ExperimentConfig, policy: Policy | None = None) -> RunArtifact:
    art = _new_artifact(cfg)
    policy = policy or make_policy(cfg)
    rec = Recorder(cfg, policy, art)
    sizes = cfg.sizes or (cfg.n,)
    for idx, n in enumerate(sizes):
        rewire_lattice(int(n), cfg.k, cfg.beta, rec, idx, stream(cfg.seed, "rewire", int(n)))
    return art
