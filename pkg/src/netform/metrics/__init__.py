from netform.metrics.change import ChangeReport, graph_change_report
from netform.metrics.community import (
    ModularityResult, louvain_modularity, modularity, shared_attribute_weight, unit_weight,
)
from netform.metrics.powerlaw import PowerLawError, PowerLawFit, power_law_fit
from netform.metrics.stats import (
    DegenerateInputError, LinregResult, TestResult, bonferroni, ks_two_sample, linreg,
    spearman, stars, t_test_one_sample, t_test_two_sample,
)
from netform.metrics.structure import (
    UndefinedMetricError, attribute_assortativity, average_clustering, average_shortest_path,
    marginal_transitivity, small_world_metrics, transitivity, within_community_edge_prob,
)
from netform.metrics.topk import TopKCurve, topk_curve, topk_curve_from_pairs

__all__ = [name for name in dir() if not name.startswith("_")]
