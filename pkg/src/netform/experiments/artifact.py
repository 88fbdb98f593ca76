"""Run artifacts: in-memory form, replay, and on-disk persistence."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from netform.choice.dataset import ChoiceDataset, ChoiceObservation
from netform.graph import Graph
from netform.netgen import AttributeTable
from netform.rng import RNG_VERSION

FORMAT_VERSION = 1
MANIFEST = "manifest.json"
DECISIONS = "decisions.jsonl"


class CorruptionError(ValueError):
    """Artifact on disk does not match its recorded fingerprints."""


class ArtifactError(ValueError):
    pass


@dataclass
class DecisionRecord:
    t: int
    trajectory: int
    chooser: int
    candidates: list[int]  # presented order
    raw: list[list[float]]  # (d, w, c) per candidate at decision time
    chosen: list[int]  # node ids, ranked
    names: list[str]
    raw_response: str | None
    fingerprint: str
    removed: list[int] | None = None  # rewired edge, small-world runs only
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "t": self.t, "trajectory": self.trajectory, "chooser": self.chooser,
            "candidates": self.candidates, "raw": self.raw, "chosen": self.chosen, "names": self.names,
            "raw_response": self.raw_response, "fingerprint": self.fingerprint, "removed": self.removed,
            "extra": self.extra,
        }

    @classmethod
    def from_json(cls, d: dict) -> "DecisionRecord":
        return cls(int(d["t"]), int(d["trajectory"]), int(d["chooser"]), [int(v) for v in d["candidates"]],
                   [[float(x) for x in row] for row in d["raw"]], [int(v) for v in d["chosen"]],
                   list(d["names"]), d["raw_response"], d["fingerprint"], d.get("removed"), d.get("extra", {}))


@dataclass
class Trajectory:
    """One growing graph: its start state and the ordered edge events applied to it."""

    n: int
    g1_edges: list[tuple[int, int]]
    events: list[tuple[int, str, int, int]] = field(default_factory=list)  # (t, "add"|"remove", u, v)
    labels: list | None = None
    meta: dict = field(default_factory=dict)

    def g1(self) -> Graph:
        return Graph(self.n, self.g1_edges).freeze()

    def gT(self) -> Graph:
        g = Graph(self.n, self.g1_edges)
        for _, op, u, v in self.events:
            if op == "add":
                g.add_edge(u, v)
            elif op == "remove":
                g._remove_edge(u, v)
            else:
                raise ArtifactError(f"unknown edge event {op!r}")
        return g.freeze()

    def to_json(self) -> dict:
        return {"n": self.n, "g1_edges": [list(e) for e in self.g1_edges],
                "events": [list(e) for e in self.events], "labels": self.labels, "meta": self.meta}

    @classmethod
    def from_json(cls, d: dict) -> "Trajectory":
        return cls(int(d["n"]), [tuple(e) for e in d["g1_edges"]],
                   [(int(t), str(op), int(u), int(v)) for t, op, u, v in d["events"]], d.get("labels"),
                   d.get("meta", {}))


@dataclass
class RunArtifact:
    kind: str
    config: dict
    config_fingerprint: str
    trajectories: list[Trajectory] = field(default_factory=list)
    decisions: list[DecisionRecord] = field(default_factory=list)
    attributes: dict | None = None  # {"columns": ..., "vocab": ...}
    removed_edges: list[tuple[int, int]] = field(default_factory=list)
    status: str = "complete"
    error: str | None = None
    report: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    rng_version: str = RNG_VERSION

    # -- derived views ----------------------------------------------------
    def attribute_table(self) -> AttributeTable | None:
        if self.attributes is None:
            return None
        return AttributeTable(self.attributes["columns"], self.attributes["vocab"])

    def g1(self, i: int = 0) -> Graph:
        return self.trajectories[i].g1()

    def gT(self, i: int = 0) -> Graph:
        return self.trajectories[i].gT()

    def replay(self, i: int = 0) -> Graph:
        """Rebuild the final graph from the decision log alone."""
        traj = self.trajectories[i]
        g = Graph(traj.n, traj.g1_edges)
        for rec in self.decisions:
            if rec.trajectory != i:
                continue
            if rec.removed is not None and rec.chosen:
                g._remove_edge(*rec.removed)
            for v in rec.chosen:
                if rec.extra.get("rejected"):
                    continue
                g.add_edge(rec.chooser, v)
        return g.freeze()

    def replay_ok(self) -> bool:
        return all(self.replay(i) == self.gT(i) for i in range(len(self.trajectories)))

    def choice_dataset(self, trajectory: int | None = None, min_size: int = 1) -> ChoiceDataset:
        """First-ranked choice of each logged decision as a choice observation."""
        obs = []
        for rec in self.decisions:
            if trajectory is not None and rec.trajectory != trajectory:
                continue
            if not rec.chosen or len(rec.candidates) < min_size or rec.extra.get("rejected"):
                continue
            obs.append(ChoiceObservation(rec.chooser, tuple(rec.candidates), np.asarray(rec.raw),
                                         rec.candidates.index(rec.chosen[0])))
        return ChoiceDataset(obs)

    # -- serialisation ----------------------------------------------------
    def manifest(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "kind": self.kind,
            "config": self.config,
            "config_fingerprint": self.config_fingerprint,
            "rng_version": self.rng_version,
            "trajectories": [t.to_json() for t in self.trajectories],
            "attributes": self.attributes,
            "removed_edges": [list(e) for e in self.removed_edges],
            "status": self.status,
            "error": self.error,
            "report": self.report,
            "extra": self.extra,
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RunArtifact):
            return NotImplemented
        return (_canon(self.manifest()) == _canon(other.manifest())
                and _decision_lines(self.decisions) == _decision_lines(other.decisions))


def _canon(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=True,
                      default=_json_default)


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def _decision_lines(decisions: Iterable[DecisionRecord]) -> str:
    return "".join(_canon(d.to_json()) + "\n" for d in decisions)


def _sha(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(f".{path.name}.tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def write_artifact(art: RunArtifact, directory: str | os.PathLike) -> Path:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    lines = _decision_lines(art.decisions).encode("utf-8")
    manifest = art.manifest()
    manifest["decisions_sha256"] = _sha(lines)
    manifest["content_sha256"] = _sha(_canon(manifest).encode("utf-8"))
    _atomic_write(d / DECISIONS, lines)
    # canonical compact form, so any byte edit is detectable
    _atomic_write(d / MANIFEST, (_canon(manifest) + "\n").encode("utf-8"))
    return d


def read_decisions(path: str | os.PathLike) -> list[DecisionRecord]:
    out: list[DecisionRecord] = []
    last = -1
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = DecisionRecord.from_json(json.loads(line))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise CorruptionError(f"{path}:{lineno}: unreadable decision record ({exc})") from None
            if rec.t <= last:
                raise CorruptionError(f"{path}:{lineno}: decision t={rec.t} is not after t={last}")
            last = rec.t
            out.append(rec)
    return out


def read_artifact(directory: str | os.PathLike) -> RunArtifact:
    d = Path(directory)
    try:
        raw_manifest = (d / MANIFEST).read_bytes()
        lines = (d / DECISIONS).read_bytes()
    except OSError as exc:
        raise ArtifactError(f"cannot read artifact at {d}: {exc}") from None
    try:
        manifest = json.loads(raw_manifest)
    except (json.JSONDecodeError, UnicodeDecodeError):
        raise CorruptionError(f"{d / MANIFEST} is not valid JSON") from None
    if raw_manifest != (_canon(manifest) + "\n").encode("utf-8"):
        raise CorruptionError("manifest is not in canonical form")
    claimed = manifest.pop("content_sha256", None)
    if claimed != _sha(_canon(manifest).encode("utf-8")):
        raise CorruptionError("manifest content fingerprint mismatch")
    if manifest.pop("decisions_sha256", None) != _sha(lines):
        raise CorruptionError("decision log fingerprint mismatch")
    decisions = read_decisions(d / DECISIONS)
    return RunArtifact(
        kind=manifest["kind"],
        config=manifest["config"],
        config_fingerprint=manifest["config_fingerprint"],
        trajectories=[Trajectory.from_json(t) for t in manifest["trajectories"]],
        decisions=decisions,
        attributes=manifest["attributes"],
        removed_edges=[tuple(e) for e in manifest["removed_edges"]],
        status=manifest["status"],
        error=manifest["error"],
        report=manifest["report"],
        extra=manifest["extra"],
        rng_version=manifest["rng_version"],
    )
