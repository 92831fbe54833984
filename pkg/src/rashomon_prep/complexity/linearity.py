"""Linearity measures L1, L2, L3 based on a soft-margin linear SVM."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ..errors import SingleClass
from ..tabular import Dataset

_TIE_TOL = 1e-9


def minmax_scale(X: np.ndarray, reference: np.ndarray = None) -> tuple:
    ref = X if reference is None else reference
    lo = ref.min(axis=0)
    span = ref.max(axis=0) - lo
    span = np.where(span > 0, span, 1.0)
    return (X - lo) / span, lo, span


@dataclass(frozen=True, eq=False)
class LinearModel:
    """Linear decision function ``w . scale(x) + b``; positive side is class 1."""

    weights: np.ndarray
    bias: float
    loss_trace: tuple = ()
    offset: np.ndarray = None
    span: np.ndarray = None
    converged: bool = True

    def decision_function(self, X) -> np.ndarray:
        Z = (np.asarray(X, dtype=float) - self.offset) / self.span
        d = Z @ self.weights + self.bias
        d[np.abs(d) < _TIE_TOL] = 0.0
        return d

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) >= 0).astype(np.int64)


def _duality_gap(V, alpha, w, C) -> tuple:
    primal = 0.5 * (w @ w) + C * np.maximum(0.0, 1.0 - V @ w).sum()
    dual = alpha.sum() - 0.5 * (w @ w)
    return primal, primal - dual


def train_linear_classifier(ds: Dataset, seed: int = 0, C: float = 1.0,
                            gap_tol: float = 1e-5, max_epochs: int = 2000) -> LinearModel:
    """Soft-margin linear SVM (hinge loss, L2 penalty, C=1) on min-max scaled X.

    The bias is folded into the weight vector through a constant unit
    feature. The box-constrained dual is first solved approximately by
    L-BFGS-B from the zero start, then polished by cyclic dual coordinate
    descent until the relative duality gap drops below ``gap_tol``. Both
    stages are deterministic; ``seed`` is accepted for interface symmetry and
    does not influence the solution.
    """
    n0, n1 = ds.class_counts
    if n0 == 0 or n1 == 0:
        raise SingleClass(f"{ds.name}: linear classifier needs both classes")
    Z, lo, span = minmax_scale(ds.X)
    s = np.where(ds.y == 1, 1.0, -1.0)
    V = s[:, None] * np.hstack([Z, np.ones((Z.shape[0], 1))])
    n = V.shape[0]

    def objective(alpha):
        w = V.T @ alpha
        return 0.5 * (w @ w) - alpha.sum(), V @ w - 1.0

    res = minimize(objective, np.zeros(n), jac=True, method="L-BFGS-B",
                   bounds=[(0.0, C)] * n,
                   options={"maxiter": 20000, "ftol": 1e-12, "gtol": 1e-8, "maxcor": 20})
    alpha = np.clip(res.x, 0.0, C)
    w = V.T @ alpha
    q = (V * V).sum(axis=1)
    primal, gap = _duality_gap(V, alpha, w, C)
    trace = [primal]
    epochs = 0
    while gap > gap_tol * max(primal, 1.0) and epochs < max_epochs:
        for i in range(n):
            a = alpha[i]
            new = min(max(a - (V[i] @ w - 1.0) / q[i], 0.0), C)
            if new != a:
                w += (new - a) * V[i]
                alpha[i] = new
        epochs += 1
        primal, gap = _duality_gap(V, alpha, w, C)
        trace.append(primal)
    return LinearModel(weights=w[:-1].copy(), bias=float(w[-1]), loss_trace=tuple(trace),
                       offset=lo, span=span, converged=bool(gap <= gap_tol * max(primal, 1.0)))


def interpolate_within_classes(X: np.ndarray, y: np.ndarray, rng) -> tuple:
    """n seeded interpolants: for each class c, n_c points on segments between
    random same-class pairs with uniform weights."""
    parts, labels = [], []
    for c in (0, 1):
        idx = np.flatnonzero(y == c)
        if idx.size == 0:
            continue
        pairs = rng.choice(idx, size=(idx.size, 2))
        lam = rng.random((idx.size, 1))
        parts.append(X[pairs[:, 0]] + lam * (X[pairs[:, 1]] - X[pairs[:, 0]]))
        labels.append(np.full(idx.size, c))
    return np.vstack(parts), np.concatenate(labels)


def linearity_metrics(ds: Dataset, seed: int = 0, model: LinearModel = None) -> tuple:
    """Return ``(l1, l2, l3)``.

    l1 is the mean hinge slack ``H`` mapped to ``H/(1+H)``; l2 is the
    training error; l3 is the error on ``n`` within-class interpolants.
    """
    model = model or train_linear_classifier(ds, seed=seed)
    s = np.where(ds.y == 1, 1.0, -1.0)
    dec = model.decision_function(ds.X)
    slack = np.maximum(0.0, 1.0 - s * dec).mean()
    l1 = slack / (1.0 + slack)
    l2 = float((model.predict(ds.X) != ds.y).mean())
    Xi, yi = interpolate_within_classes(ds.X, ds.y, np.random.default_rng(seed))
    l3 = float((model.predict(Xi) != yi).mean())
    return float(l1), l2, l3
