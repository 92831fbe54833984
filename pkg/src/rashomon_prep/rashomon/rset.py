"""Empirical reference model and epsilon-Rashomon set."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch
from ..tabular import Dataset
from .metrics import PredictionMatrix, binarize, loss_from_scores

# absorbs floating noise in loss_ref + epsilon comparisons
_MEMBERSHIP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class RashomonSet:
    pool: list
    losses: np.ndarray
    reference_index: int
    member_indices: tuple
    epsilon: float
    loss_kind: str = "one_minus_auc"

    def members_at(self, epsilon: float) -> tuple:
        return rashomon_members(self.losses, epsilon)


def reference_model(losses) -> int:
    """Index of the smallest loss; the lowest index wins ties."""
    losses = np.asarray(losses, dtype=float)
    if losses.size == 0:
        raise ValueError("losses must be nonempty")
    return int(np.argmin(losses))


def rashomon_members(losses, epsilon: float) -> tuple:
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    losses = np.asarray(losses, dtype=float)
    ref = losses[reference_model(losses)]
    return tuple(int(i) for i in np.flatnonzero(losses <= ref + epsilon + _MEMBERSHIP_TOL))


def build_rashomon_set(pool, eval_ds: Dataset, epsilon: float = 0.05,
                       loss_kind: str = "one_minus_auc") -> RashomonSet:
    """Score every pool model on ``eval_ds`` and keep those within epsilon of
    the best loss."""
    if not pool:
        raise ValueError("pool must be nonempty")
    losses = np.array([loss_from_scores(eval_ds.y, m.predict_scores(eval_ds.X), loss_kind)
                       for m in pool])
    return RashomonSet(pool=list(pool), losses=losses, reference_index=reference_model(losses),
                       member_indices=rashomon_members(losses, epsilon), epsilon=epsilon,
                       loss_kind=loss_kind)


def prediction_matrix(rset: RashomonSet, X, obs_ids=None) -> PredictionMatrix:
    """Thresholded predictions of every member; column order follows
    ``member_indices``."""
    X = np.asarray(X, dtype=float)
    n_features = getattr(rset.pool[0].estimator, "n_features_in_", X.shape[1])
    if X.ndim != 2 or X.shape[1] != n_features:
        raise DimensionMismatch(f"expected {n_features} columns, got {X.shape}")
    cols = [binarize(rset.pool[i].predict_scores(X)) for i in rset.member_indices]
    return PredictionMatrix(np.column_stack(cols),
                            reference_column=rset.member_indices.index(rset.reference_index),
                            obs_ids=obs_ids, member_indices=rset.member_indices)
