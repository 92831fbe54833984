"""Losses and predictive-multiplicity metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from ..errors import SingleClassEval

THRESHOLD = 0.5
LOSS_KINDS = ("one_minus_auc", "error_rate")


def roc_auc(y, scores) -> float:
    """Area under the ROC curve via the Mann-Whitney rank sum (ties count 1/2)."""
    y = np.asarray(y).astype(int)
    s = np.asarray(scores, dtype=float)
    n1 = int(y.sum())
    n0 = y.size - n1
    if n0 == 0 or n1 == 0:
        raise SingleClassEval("AUC needs both classes in the evaluation data")
    ranks = rankdata(s)
    return float((ranks[y == 1].sum() - n1 * (n1 + 1) / 2.0) / (n0 * n1))


def binarize(scores) -> np.ndarray:
    """Class predictions at the fixed threshold; scores >= 0.5 map to 1."""
    return (np.asarray(scores, dtype=float) >= THRESHOLD).astype(np.int8)


def loss_from_scores(y, scores, loss_kind: str = "one_minus_auc") -> float:
    if loss_kind == "one_minus_auc":
        return 1.0 - roc_auc(y, scores)
    if loss_kind == "error_rate":
        return float((binarize(scores) != np.asarray(y)).mean())
    raise ValueError(f"unknown loss kind {loss_kind!r}; choose from {LOSS_KINDS}")


@dataclass(frozen=True, eq=False)
class PredictionMatrix:
    """Binary predictions, one column per Rashomon member."""

    preds: np.ndarray
    reference_column: int
    obs_ids: np.ndarray = None
    member_indices: tuple = ()

    def __post_init__(self):
        P = np.asarray(self.preds)
        if P.ndim != 2 or not np.isin(P, (0, 1)).all():
            raise ValueError("preds must be a 2-D 0/1 matrix")
        if not 0 <= self.reference_column < P.shape[1]:
            raise ValueError("reference column out of range")
        object.__setattr__(self, "preds", P.astype(np.int8))
        if self.obs_ids is None:
            object.__setattr__(self, "obs_ids", np.arange(P.shape[0]))


def _conflicts(pm: PredictionMatrix, include_reference: bool) -> np.ndarray:
    P = pm.preds
    ref = P[:, pm.reference_column]
    diff = P != ref[:, None]
    if include_reference:
        return diff
    return np.delete(diff, pm.reference_column, axis=1)


def per_model_disagreement(pm: PredictionMatrix, include_reference: bool = False) -> np.ndarray:
    """Fraction of observations on which each member differs from the reference."""
    return _conflicts(pm, include_reference).mean(axis=0)


def per_obs_conflict(pm: PredictionMatrix, include_reference: bool = False) -> np.ndarray:
    """Fraction of members differing from the reference on each observation."""
    c = _conflicts(pm, include_reference)
    if c.shape[1] == 0:
        return np.zeros(c.shape[0])
    return c.mean(axis=1)


def discrepancy(pm: PredictionMatrix, include_reference: bool = False) -> float:
    """Largest fraction of observations on which one member contradicts the
    reference; 0 when the set holds only the reference."""
    d = per_model_disagreement(pm, include_reference)
    return float(d.max()) if d.size else 0.0


def obscurity(pm: PredictionMatrix, include_reference: bool = False) -> float:
    """Average over observations of the share of members contradicting the
    reference. ``include_reference`` counts the reference in the denominator."""
    if pm.preds.shape[1] == 1 and not include_reference:
        return 0.0
    c = _conflicts(pm, include_reference)
    # one division over the total count keeps small hand examples exact
    return float(c.sum()) / c.size if c.size else 0.0


@dataclass(frozen=True, eq=False)
class MultiplicityReport:
    discrepancy: float
    obscurity: float
    per_model_disagreement: np.ndarray
    per_obs_conflict: np.ndarray
    epsilon: float
    n_members: int


def multiplicity_report(pm: PredictionMatrix, epsilon: float,
                        include_reference: bool = False) -> MultiplicityReport:
    return MultiplicityReport(
        discrepancy=discrepancy(pm, include_reference),
        obscurity=obscurity(pm, include_reference),
        per_model_disagreement=per_model_disagreement(pm, include_reference),
        per_obs_conflict=per_obs_conflict(pm, include_reference),
        epsilon=epsilon, n_members=pm.preds.shape[1])


def performance_gain(auc_after: float, auc_before: float) -> float:
    for v in (auc_after, auc_before):
        if not 0.0 <= v <= 1.0:
            raise ValueError("AUC values must lie in [0, 1]")
    return float(auc_after - auc_before)
