"""Dimensionality measures T2, T3, T4."""

from __future__ import annotations

import numpy as np

from ..tabular import Dataset, zscore


def pca_components_95(X: np.ndarray, standardize: bool = False, level: float = 0.95) -> int:
    """Fewest principal components whose cumulative variance reaches ``level``.

    PCA runs on the column-centred data; ``standardize`` additionally scales
    columns to unit variance.
    """
    X = np.asarray(X, dtype=float)
    Xc = zscore(X) if standardize else X - X.mean(axis=0)
    if Xc.shape[1] == 1:
        return 1
    ev = np.linalg.eigvalsh(np.cov(Xc, rowvar=False))[::-1]
    ev = np.clip(ev, 0.0, None)
    total = ev.sum()
    if total <= 0:
        return 1
    cum = np.cumsum(ev) / total
    return int(min(np.searchsorted(cum, level - 1e-12) + 1, ev.size))


def dimensionality_metrics(ds: Dataset, standardize: bool = False,
                           inverted: bool = False) -> tuple:
    """Return ``(t2, t3, t4)``.

    ``t2 = p/n``, ``t3 = k95/n`` and ``t4 = k95/p``. With ``inverted=True``
    the reciprocal orientation ``(n/p, n/k95, p/k95)`` is returned instead.
    """
    n, p = ds.X.shape
    k95 = pca_components_95(ds.X, standardize=standardize)
    if inverted:
        return n / p, n / k95, p / k95
    return p / n, k95 / n, k95 / p
