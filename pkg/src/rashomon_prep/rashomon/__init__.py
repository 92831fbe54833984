"""Model pools, Rashomon sets and multiplicity metrics."""

from .metrics import (LOSS_KINDS, MultiplicityReport, PredictionMatrix, binarize, discrepancy,
                      loss_from_scores, multiplicity_report, obscurity, per_model_disagreement,
                      per_obs_conflict, performance_gain, roc_auc)
from .pool import (FAMILIES, GRIDS, ModelSpec, TrainedModel, build_estimator, fit_model,
                   sample_model_specs, train_pool)
from .rset import (RashomonSet, build_rashomon_set, prediction_matrix, rashomon_members,
                   reference_model)


def evaluate_loss(model, eval_ds, loss_kind: str = "one_minus_auc") -> float:
    """Loss of a trained model on ``eval_ds`` (default 1 - AUC)."""
    return loss_from_scores(eval_ds.y, model.predict_scores(eval_ds.X), loss_kind)


__all__ = [
    "LOSS_KINDS", "MultiplicityReport", "PredictionMatrix", "binarize", "discrepancy",
    "loss_from_scores", "multiplicity_report", "obscurity", "per_model_disagreement",
    "per_obs_conflict", "performance_gain", "roc_auc", "FAMILIES", "GRIDS", "ModelSpec",
    "TrainedModel", "build_estimator", "fit_model", "sample_model_specs", "train_pool",
    "RashomonSet", "build_rashomon_set", "prediction_matrix", "rashomon_members",
    "reference_model", "evaluate_loss",
]
