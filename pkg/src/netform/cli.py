"""Command-line entry point: ``netform <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import httpx

from netform.choice.dataset import ChoiceDataError, ChoiceDataset, ChoiceObservation
from netform.choice.mnl import average_marginal_effects, fit_mnl
from netform.experiments import analyze as analyze_mod
from netform.experiments.artifact import (
    DECISIONS, ArtifactError, CorruptionError, read_artifact, read_decisions, write_artifact,
)
from netform.experiments.config import ConfigError, ExperimentConfig, load_config
from netform.experiments.drivers import RunAborted
from netform.experiments.realworld import RealWorldError
from netform.io import DataError, load_dataset, report_to_csv, report_to_json, series_to_csv, write_edge_list
from netform.policies.agents import PolicyError
from netform.policies.llm import LlmError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_POLICY = 3
EXIT_DATA = 4

log = logging.getLogger("netform")


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.temperature is not None:
        changes["policy.temperature"] = args.temperature
    if args.endpoint is not None:
        changes["policy.endpoint"] = args.endpoint
    if getattr(args, "runs", None) is not None:
        changes["runs"] = args.runs
    return cfg.replace(**changes) if changes else cfg


def _run_one(cfg: ExperimentConfig, out: Path):
    from netform.experiments import run

    kwargs = {}
    if cfg.kind == "realworld" and cfg.edges_path:
        ds = load_dataset(cfg.edges_path, cfg.attrs_path)
        kwargs = {"g0": ds.graph, "attrs": ds.attrs}
    try:
        art = run(cfg, **kwargs)
    except RunAborted as exc:
        write_artifact(exc.artifact, out)
        raise
    art.report = analyze_mod.analyze(art)
    write_artifact(art, out)
    return art


def cmd_simulate(args, expected_kind: str | None = None) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    if expected_kind is not None and cfg.kind != expected_kind:
        raise ConfigError(f"expected a {expected_kind} config, got {cfg.kind!r}", "kind")
    points = cfg.expand()
    jobs = [(p.replace(seed=p.seed + r, runs=1), f"{i:02d}-{r:02d}") for i, p in enumerate(points)
            for r in range(p.runs)]
    out = Path(args.out or f"runs/{cfg.kind}-{cfg.fingerprint()[:10]}")
    if len(jobs) == 1:
        art = _run_one(jobs[0][0], out)
        print(f"wrote {out} ({len(art.decisions)} decisions)")
        return EXIT_OK
    reports = []
    for job_cfg, tag in jobs:
        art = _run_one(job_cfg, out / f"run-{tag}")
        reports.append(art.report)
    summary = {"config_fingerprint": cfg.fingerprint(), "run_dirs": [f"run-{t}" for _, t in jobs]}
    try:
        summary.update(analyze_mod.summarize_runs(reports))
    except analyze_mod.AnalysisError as exc:
        summary["error"] = str(exc)
    (out / "summary.json").write_text(report_to_json(summary), encoding="utf-8", newline="\n")
    print(f"wrote {len(jobs)} runs under {out}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    art = read_artifact(args.artifact)
    report = analyze_mod.analyze(art)
    sys.stdout.write(report_to_json(report))
    return EXIT_OK


def _load_log(path: Path):
    p = path / DECISIONS if path.is_dir() else path
    if not p.exists():
        raise DataError(f"no decision log at {p}")
    return read_decisions(p)


def format_fit_table(fit, ame) -> str:
    lines = [f"{'feature':<8}{'coef':>12}{'std.err':>12}{'p':>12}  {'AME':>10}", "-" * 58]
    for row, (label, eff) in zip(fit.table(), ame.as_dict().items()):
        lines.append(f"{row['feature']:<8}{row['coef']:>12.4f}{row['std_err']:>12.4f}{row['p_value']:>12.3g}"
                     f"  {eff['ame']:>10.4f} {row['stars']}")
    lines.append("-" * 58)
    lines.append(f"log-likelihood {fit.log_likelihood:.2f}   AIC(k=3) {fit.aic:.2f}   AIC(k=4) {fit.aic_k4:.2f}"
                 f"   N {fit.n_obs}")
    lines.append("* p<0.05, ** p<0.01, *** p<0.001")
    return "\n".join(lines) + "\n"


def cmd_fit(args) -> int:
    records = _load_log(Path(args.log))
    obs = [ChoiceObservation(r.chooser, tuple(r.candidates), r.raw, r.candidates.index(r.chosen[0]))
           for r in records if r.chosen and not r.extra.get("rejected")]
    data = ChoiceDataset(obs)
    fit = fit_mnl(data)
    sys.stdout.write(format_fit_table(fit, average_marginal_effects(fit, data)))
    return EXIT_OK


def cmd_ingest(args) -> int:
    ds = load_dataset(args.edges, args.attrs)
    summary = {"nodes": ds.graph.n, "edges": ds.graph.edge_count, "features": ds.attrs.names}
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_edge_list(ds.graph.edges(), out / "edges.tsv")
        (out / "mapping.json").write_text(json.dumps({str(k): v for k, v in ds.mapping.items()}, indent=1) + "\n",
                                          encoding="utf-8", newline="\n")
    sys.stdout.write(report_to_json(summary))
    return EXIT_OK


def cmd_report(args) -> int:
    art = read_artifact(args.artifact)
    report = art.report or analyze_mod.analyze(art)
    if args.format == "json":
        text = report_to_json(report)
    elif args.series:
        text = series_to_csv(report)
    else:
        text = report_to_csv(report)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="netform", description="Network formation experiments")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def overrides(sp):
        sp.add_argument("--seed", type=int)
        sp.add_argument("--temperature", type=float)
        sp.add_argument("--endpoint")
        sp.add_argument("--out", help="artifact directory")

    sp = sub.add_parser("simulate", help="run an experiment config")
    sp.add_argument("config")
    sp.add_argument("--runs", type=int)
    overrides(sp)
    sp = sub.add_parser("survey", help="run a survey config")
    sp.add_argument("config")
    sp.add_argument("--runs", type=int)
    overrides(sp)
    sp = sub.add_parser("analyze", help="recompute the report of an artifact")
    sp.add_argument("artifact")
    sp = sub.add_parser("fit", help="fit the choice model to a decision log")
    sp.add_argument("log", help="decisions.jsonl or an artifact directory")
    sp = sub.add_parser("ingest", help="validate and normalise an edge list + attribute file")
    sp.add_argument("edges")
    sp.add_argument("attrs")
    sp.add_argument("--out")
    sp = sub.add_parser("report", help="emit an artifact report")
    sp.add_argument("artifact")
    sp.add_argument("--format", choices=("csv", "json"), default="json")
    sp.add_argument("--series", action="store_true", help="figure series instead of the flat metric table")
    sp.add_argument("--output")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handlers = {
        "simulate": cmd_simulate,
        "survey": lambda a: cmd_simulate(a, "survey"),
        "analyze": cmd_analyze,
        "fit": cmd_fit,
        "ingest": cmd_ingest,
        "report": cmd_report,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RunAborted, PolicyError, LlmError, httpx.HTTPError) as exc:
        print(f"policy failure: {exc}", file=sys.stderr)
        return EXIT_POLICY
    except (DataError, CorruptionError, ArtifactError, RealWorldError, ChoiceDataError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
