"""Seeded random-search pool of tree-based classifiers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.ensemble import GradientBoostingClassifier, RandomForestClassifier
from sklearn.tree import DecisionTreeClassifier

from ..errors import SingleClass
from ..seeding import stable_seed
from ..tabular import Dataset

FAMILIES = ("DecisionTree", "RandomForest", "GradientBoostedTrees")

# Documented hyperparameter grids; every pool member draws one value per key.
GRIDS = {
    "DecisionTree": {
        "max_depth": [2, 3, 4, 5, 6, 8, 10, None],
        "min_leaf": [1, 2, 5, 10, 20],
        "criterion": ["gini", "entropy"],
    },
    "RandomForest": {
        "n_trees": [10, 25, 50],
        "max_depth": [4, 6, 8, None],
        "feature_subsample": ["sqrt", 0.5, 1.0],
        "min_leaf": [1, 2, 5],
    },
    "GradientBoostedTrees": {
        "n_trees": [20, 50, 100],
        "learning_rate": [0.03, 0.1, 0.3],
        "max_depth": [2, 3, 4],
        "row_subsample": [0.7, 1.0],
        "min_leaf": [1, 5],
    },
}


@dataclass(frozen=True)
class ModelSpec:
    family: str
    params: dict
    seed: int

    def to_dict(self) -> dict:
        return {"family": self.family, "params": dict(self.params), "seed": self.seed}


@dataclass(eq=False)
class TrainedModel:
    spec: ModelSpec
    estimator: object
    summary: dict = field(default_factory=dict)

    def predict_scores(self, X) -> np.ndarray:
        """Probability of class 1, clipped to [0, 1]."""
        proba = self.estimator.predict_proba(np.asarray(X, dtype=float))
        classes = list(self.estimator.classes_)
        col = proba[:, classes.index(1)] if 1 in classes else np.zeros(proba.shape[0])
        return np.clip(col, 0.0, 1.0)


def sample_model_specs(pool_size: int, seed: int) -> list:
    """Draw ``pool_size`` specs: family uniformly, then one value per grid key."""
    if pool_size < 2:
        raise ValueError("pool_size must be at least 2")
    rng = np.random.default_rng(seed)
    specs = []
    for i in range(pool_size):
        family = FAMILIES[int(rng.integers(len(FAMILIES)))]
        params = {}
        for key, values in GRIDS[family].items():
            params[key] = values[int(rng.integers(len(values)))]
        specs.append(ModelSpec(family, params, stable_seed(seed, i)))
    return specs


def build_estimator(spec: ModelSpec):
    p = spec.params
    if spec.family == "DecisionTree":
        return DecisionTreeClassifier(max_depth=p["max_depth"], min_samples_leaf=p["min_leaf"],
                                      criterion=p["criterion"], random_state=spec.seed)
    if spec.family == "RandomForest":
        return RandomForestClassifier(n_estimators=p["n_trees"], max_depth=p["max_depth"],
                                      max_features=p["feature_subsample"],
                                      min_samples_leaf=p["min_leaf"], n_jobs=1,
                                      random_state=spec.seed)
    if spec.family == "GradientBoostedTrees":
        return GradientBoostingClassifier(n_estimators=p["n_trees"],
                                          learning_rate=p["learning_rate"],
                                          max_depth=p["max_depth"],
                                          subsample=p["row_subsample"],
                                          min_samples_leaf=p["min_leaf"],
                                          random_state=spec.seed)
    raise ValueError(f"unknown model family {spec.family!r}")


def fit_model(spec: ModelSpec, train: Dataset) -> TrainedModel:
    est = build_estimator(spec).fit(train.X, train.y)
    model = TrainedModel(spec, est)
    model.summary["train_error"] = float(((model.predict_scores(train.X) >= 0.5)
                                          != train.y).mean())
    return model


def train_pool(train: Dataset, pool_size: int = 50, seed: int = 0) -> list:
    """Fit ``pool_size`` seeded models on ``train``."""
    n0, n1 = train.class_counts
    if n0 == 0 or n1 == 0:
        raise SingleClass(f"{train.name}: cannot train on a single class")
    return [fit_model(spec, train) for spec in sample_model_specs(pool_size, seed)]
