"""Experiment configuration: schema, validation and TOML loading."""

from __future__ import annotations

import dataclasses
import hashlib
import itertools
import json
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from netform.policies.prompts import ENVIRONMENTS, VARIANTS

KINDS = ("p1", "p2", "p3", "p5", "realworld", "survey")
POLICY_KINDS = ("random", "mnl", "argmax", "abstain", "llm")


class ConfigError(ValueError):
    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


@dataclass(frozen=True)
class PolicySpec:
    kind: str = "random"
    theta: tuple[float, float, float] = (0.0, 0.0, 0.0)
    key: str = "degree"
    seed: int = 0
    endpoint: str = ""
    model: str = ""
    temperature: float = 1.0
    timeout: float = 60.0
    max_retries: int = 3
    cache_dir: str = ""
    attempt_offset: int = 0
    max_concurrency: int = 1


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    seed: int = 0
    n: int = 50
    T: int = 50
    delta: int = 1
    A: int = 15
    environment: str = "baseline"
    variant: str = "standard"
    shuffle_candidates: bool = False
    policy: PolicySpec = field(default_factory=PolicySpec)
    # p1
    degree_only: bool = False
    # p2
    seed_graph: str = "sbm"
    p_in: float = 0.5
    p_out: float = 0.1
    p: float = 0.1
    common_as_count: bool = False
    null_runs: int = 10
    # p3
    distractor: bool = False
    # p5
    beta: float = 0.25
    k: int = 4
    sizes: tuple[int, ...] = ()
    # realworld
    strategy: str = "uniform"
    n_choosers: int = 200
    edges_path: str = ""
    attrs_path: str = ""
    mean_degree: float = 12.0
    homophily: float = 0.6
    recsys_sample: int = 1000
    louvain_runs: int = 10
    # survey
    contexts: tuple[str, ...] = ("social", "company")
    respondents: int = 100
    # shared
    mutual: bool = False
    runs: int = 1
    grid: Mapping[str, tuple] = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["grid"] = {k: list(v) for k, v in sorted(self.grid.items())}
        return d

    def fingerprint(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()

    def replace(self, **changes) -> "ExperimentConfig":
        pol = changes.pop("policy", None)
        pol_changes = {k[len("policy."):]: changes.pop(k) for k in list(changes) if k.startswith("policy.")}
        cfg = dataclasses.replace(self, **changes)
        if pol is not None:
            cfg = dataclasses.replace(cfg, policy=pol)
        if pol_changes:
            cfg = dataclasses.replace(cfg, policy=dataclasses.replace(cfg.policy, **pol_changes))
        validate(cfg)
        return cfg

    def expand(self) -> list["ExperimentConfig"]:
        """Cartesian product over ``grid``; each point keeps the other fields."""
        if not self.grid:
            return [self]
        keys = sorted(self.grid)
        out = []
        for values in itertools.product(*(self.grid[k] for k in keys)):
            out.append(dataclasses.replace(self, grid={}).replace(**dict(zip(keys, values))))
        return out


def _check(cond: bool, message: str, fld: str) -> None:
    if not cond:
        raise ConfigError(message, fld)


def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    _check(cfg.kind in KINDS, f"unknown experiment kind {cfg.kind!r}; expected one of {', '.join(KINDS)}", "kind")
    _check(cfg.seed >= 0, "must be non-negative", "seed")
    for name in ("n", "T", "delta", "A", "n_choosers", "respondents", "runs", "louvain_runs", "null_runs",
                 "recsys_sample"):
        _check(getattr(cfg, name) >= 1, "must be a positive count", name)
    for name in ("p_in", "p_out", "p", "beta"):
        _check(0.0 <= getattr(cfg, name) <= 1.0, "must lie in [0, 1]", name)
    _check(cfg.environment in ENVIRONMENTS, f"unknown environment {cfg.environment!r}", "environment")
    _check(cfg.variant in VARIANTS, f"unknown variant {cfg.variant!r}", "variant")
    _check(cfg.seed_graph in ("sbm", "er", "empty"), "must be sbm, er or empty", "seed_graph")
    _check(cfg.strategy in ("uniform", "recsys"), "must be uniform or recsys", "strategy")
    _check(cfg.k >= 2, "must be >= 2", "k")
    _check(all(s > cfg.k for s in cfg.sizes), "every size must exceed k", "sizes")
    _check(all(c in ("social", "company") for c in cfg.contexts) and len(cfg.contexts) > 0,
           "contexts must be drawn from social, company", "contexts")
    _check(cfg.mean_degree > 0, "must be positive", "mean_degree")
    if cfg.kind == "p2" and cfg.seed_graph == "sbm":
        _check(cfg.n % 2 == 0, "SBM seed graph needs an even node count", "n")
    pol = cfg.policy
    _check(pol.kind in POLICY_KINDS, f"unknown policy kind {pol.kind!r}", "policy.kind")
    _check(len(pol.theta) == 3, "theta needs three coefficients (PA, H, TC)", "policy.theta")
    _check(0.0 <= pol.temperature <= 2.0, "must lie in [0, 2]", "policy.temperature")
    _check(pol.max_retries >= 0, "must be non-negative", "policy.max_retries")
    _check(pol.max_concurrency >= 1, "must be >= 1", "policy.max_concurrency")
    if pol.kind == "llm":
        _check(bool(pol.endpoint), "llm policy needs an endpoint", "policy.endpoint")
        _check(bool(pol.model), "llm policy needs a model", "policy.model")
    for key in cfg.grid:
        _check(key in _FIELDS or key.startswith("policy."), f"unknown grid field {key!r}", "grid")
    return cfg


_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
_POLICY_FIELDS = {f.name: f for f in dataclasses.fields(PolicySpec)}
_TUPLES = {"sizes": int, "contexts": str}


def _coerce(name: str, value: Any, default: Any, where: str):
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"expected true/false, got {value!r}", where)
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}", where)
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}", where)
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"expected a string, got {value!r}", where)
        return value
    if isinstance(default, tuple):
        if not isinstance(value, list):
            raise ConfigError(f"expected a list, got {value!r}", where)
        elem = _TUPLES.get(name, float)
        try:
            return tuple(elem(v) for v in value)
        except (TypeError, ValueError):
            raise ConfigError(f"list entries must be {elem.__name__}", where) from None
    return value


def config_from_dict(data: Mapping[str, Any]) -> ExperimentConfig:
    data = dict(data)
    if "kind" not in data:
        raise ConfigError("missing required field", "kind")
    pol_data = data.pop("policy", {})
    if not isinstance(pol_data, Mapping):
        raise ConfigError("must be a table", "policy")
    grid_data = data.pop("grid", {})
    if not isinstance(grid_data, Mapping):
        raise ConfigError("must be a table", "grid")
    kwargs = {}
    defaults = ExperimentConfig(kind="p1")
    for key, value in data.items():
        if key not in _FIELDS:
            raise ConfigError("unknown field", key)
        kwargs[key] = _coerce(key, value, getattr(defaults, key), key)
    pkw = {}
    pdef = PolicySpec()
    for key, value in pol_data.items():
        if key not in _POLICY_FIELDS:
            raise ConfigError("unknown field", f"policy.{key}")
        pkw[key] = _coerce(key, value, getattr(pdef, key), f"policy.{key}")
    if "theta" in pkw and len(pkw["theta"]) != 3:
        raise ConfigError("theta needs three coefficients (PA, H, TC)", "policy.theta")
    grid = {}
    for key, values in grid_data.items():
        if not isinstance(values, list) or not values:
            raise ConfigError("grid values must be a non-empty list", f"grid.{key}")
        grid[key] = tuple(values)
    kwargs["grid"] = grid
    return validate(ExperimentConfig(policy=PolicySpec(**pkw), **kwargs))


_LINE_RE = re.compile(r"line (\d+)")


def _line_of(text: str, fld: str | None) -> int | None:
    if not fld:
        return None
    key = fld.split(".")[-1]
    table = fld.split(".")[0] if "." in fld else None
    in_table = table is None
    for i, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if s.startswith("["):
            in_table = table is not None and s.strip("[] ") == table
            continue
        if in_table and re.match(rf"{re.escape(key)}\s*=", s):
            return i
    return None


def parse_config(text: str) -> ExperimentConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = _LINE_RE.search(str(exc))
        raise ConfigError(f"syntax error: {exc}", None, int(m.group(1)) if m else None) from None
    try:
        return config_from_dict(data)
    except ConfigError as exc:
        if exc.line is None:
            line = _line_of(text, exc.field)
            msg = str(exc).split(": ", 1)[-1]
            raise ConfigError(msg, exc.field, line) from None
        raise


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse_config(text)
