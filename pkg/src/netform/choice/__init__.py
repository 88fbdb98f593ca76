from netform.choice.dataset import FEATURE_LABELS, FEATURES, ChoiceDataError, ChoiceDataset, ChoiceObservation
from netform.choice.mnl import (
    MarginalEffects, MnlFit, MnlParams, NonIdentifiableError, aic, average_marginal_effects,
    choice_probabilities, feature_transform, fit_mnl, mnl_hessian, mnl_loglik, set_probabilities,
    tv_between, tv_distance,
)
from netform.choice.borda import AlignmentReport, RankingError, borda_alignment, borda_vector
from netform.choice.recsys import (
    RecsysError, RecsysModel, fit_logistic, pair_features, recsys_rank, roc_auc, train_recsys,
)

__all__ = [name for name in dir() if not name.startswith("_")]
