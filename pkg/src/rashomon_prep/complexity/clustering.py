"""k-means grouping of datasets by their complexity profiles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import TooFewProfiles
from .profile import MEASURES


@dataclass(frozen=True, eq=False)
class ClusterAssignment:
    """Cluster ids are 1..k, numbered by first appearance in input order."""

    assignment: dict
    centroids: np.ndarray
    inertia: float
    inertia_trace: tuple
    measures: tuple


def profile_matrix(profiles, measures=MEASURES) -> tuple:
    """Median-imputed, z-scored measure matrix; all-NA measures are dropped."""
    M = np.array([[p.values[m] for m in measures] for p in profiles], dtype=float)
    keep = ~np.isnan(M).all(axis=0)
    M = M[:, keep]
    used = tuple(m for m, k in zip(measures, keep) if k)
    med = np.nanmedian(M, axis=0)
    rows, cols = np.nonzero(np.isnan(M))
    M[rows, cols] = med[cols]
    sd = M.std(axis=0)
    Z = (M - M.mean(axis=0)) / np.where(sd > 0, sd, 1.0)
    return Z, used


def lloyd(Z: np.ndarray, init: np.ndarray, max_iter: int = 300) -> tuple:
    """Batch k-means from the given centroids.

    Returns labels, centroids and the inertia recorded after every
    assignment step (nonincreasing).
    """
    C = init.astype(float).copy()
    labels = None
    trace = []
    for _ in range(max_iter):
        d2 = ((Z[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)
        new = np.argmin(d2, axis=1)
        trace.append(float(d2[np.arange(Z.shape[0]), new].sum()))
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for c in range(C.shape[0]):
            members = Z[labels == c]
            if members.shape[0]:
                C[c] = members.mean(axis=0)
    return labels, C, trace


def cluster_datasets(profiles, k: int = 3, seed: int = 0, restarts: int = 20,
                     max_iter: int = 300) -> ClusterAssignment:
    """Group profiles with k-means on z-scored measures.

    Each of the ``restarts`` runs starts from k distinct profiles drawn by a
    seeded generator; the lowest final inertia wins (earliest run on ties).
    """
    profiles = list(profiles)
    if k < 1 or len(profiles) < k:
        raise TooFewProfiles(f"need at least k={k} profiles, got {len(profiles)}")
    Z, used = profile_matrix(profiles)
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        start = rng.choice(Z.shape[0], size=k, replace=False)
        labels, C, trace = lloyd(Z, Z[start], max_iter)
        if best is None or trace[-1] < best[2][-1] - 1e-12:
            best = (labels, C, trace)
    labels, C, trace = best
    relabel = {}
    for lab in labels:
        relabel.setdefault(int(lab), len(relabel) + 1)
    order = sorted(relabel, key=relabel.get)
    assignment = {p.dataset_name: relabel[int(lab)] for p, lab in zip(profiles, labels)}
    return ClusterAssignment(assignment=assignment, centroids=C[order], inertia=trace[-1],
                             inertia_trace=tuple(trace), measures=used)
