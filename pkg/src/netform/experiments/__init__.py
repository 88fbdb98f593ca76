from netform.experiments import analyze
from netform.experiments.analyze import AnalysisError, beta_hat, classical_ws_band, summarize_runs
from netform.experiments.analyze import analyze as analyze_run
from netform.experiments.artifact import (
    ArtifactError, CorruptionError, DecisionRecord, RunArtifact, Trajectory, read_artifact, read_decisions,
    write_artifact,
)
from netform.experiments.config import ConfigError, ExperimentConfig, PolicySpec, load_config, parse_config
from netform.experiments.drivers import (
    RunAborted, make_policy, random_null_growth, run_principle1, run_principle2, run_principle3,
    run_principle5,
)
from netform.experiments.realworld import RealWorldError, accuracy_vs_random, run_realworld
from netform.experiments.survey import SurveyInstance, generate_instance, run_survey

RUNNERS = {
    "p1": run_principle1, "p2": run_principle2, "p3": run_principle3, "p5": run_principle5,
    "realworld": run_realworld, "survey": run_survey,
}


def run(cfg: ExperimentConfig, **kwargs) -> RunArtifact:
    """Dispatch to the driver for ``cfg.kind``."""
    return RUNNERS[cfg.kind](cfg, **kwargs)


__all__ = [name for name in dir() if not name.startswith("_")]
