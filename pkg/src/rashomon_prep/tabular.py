"""Tabular data container, CSV ingestion, stratified splitting and exact kNN."""

from __future__ import annotations

import logging
import os
import warnings
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.spatial.distance import cdist

from .errors import (
    DegenerateClassSize,
    EmptyAfterCleaning,
    KTooLarge,
    NonBinaryTarget,
    SingleClass,
)

logger = logging.getLogger(__name__)

NUMERIC = "numeric"
CATEGORICAL = "categorical"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Encoded binary-labelled tabular data.

    Attributes
    ----------
    name : str
    feature_names : tuple of str
        Post-encoding column names.
    feature_kinds : tuple of str
        ``"numeric"`` or ``"categorical"`` per post-encoding column.
    X : ndarray of shape (n, p)
    y : ndarray of shape (n,)
        Labels in {0, 1}; 1 is the minority (positive) class.
    positive_label : str
        Original target level mapped to 1.
    row_ids : ndarray of shape (n,)
        Stable integer provenance ids.
    source_columns : tuple of str
        Original column each encoded column came from.
    """

    name: str
    feature_names: tuple
    feature_kinds: tuple
    X: np.ndarray
    y: np.ndarray
    positive_label: str = "1"
    row_ids: Optional[np.ndarray] = None
    source_columns: tuple = field(default=())

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        if X.ndim != 2:
            raise ValueError("X must be two-dimensional")
        y = np.asarray(self.y).astype(np.int64)
        n, p = X.shape
        if y.shape != (n,):
            raise ValueError("y length must match rows of X")
        if n < 2 or p < 1:
            raise ValueError("a dataset needs n >= 2 rows and p >= 1 columns")
        if not np.isin(y, (0, 1)).all():
            raise ValueError("labels must be 0/1")
        if not np.isfinite(X).all():
            raise ValueError("X contains NaN or infinite values")
        row_ids = (np.arange(n, dtype=np.int64) if self.row_ids is None
                   else np.asarray(self.row_ids, dtype=np.int64))
        if row_ids.shape != (n,):
            raise ValueError("row_ids length must match rows of X")
        names = tuple(self.feature_names) or tuple(f"x{j}" for j in range(p))
        kinds = tuple(self.feature_kinds) or (NUMERIC,) * p
        sources = tuple(self.source_columns) or names
        if not (len(names) == len(kinds) == len(sources) == p):
            raise ValueError("feature metadata length must equal p")
        for arr in (X, y, row_ids):
            arr.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "row_ids", row_ids)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "feature_kinds", kinds)
        object.__setattr__(self, "source_columns", sources)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def class_counts(self) -> tuple:
        n1 = int(self.y.sum())
        return self.n - n1, n1

    def take(self, rows) -> "Dataset":
        """Row subset preserving provenance ids."""
        rows = np.asarray(rows, dtype=np.int64)
        return self.replace(X=self.X[rows], y=self.y[rows], row_ids=self.row_ids[rows])

    def select_columns(self, cols: Sequence[int]) -> "Dataset":
        cols = [int(c) for c in cols]
        return self.replace(
            X=self.X[:, cols],
            feature_names=tuple(self.feature_names[c] for c in cols),
            feature_kinds=tuple(self.feature_kinds[c] for c in cols),
            source_columns=tuple(self.source_columns[c] for c in cols),
        )

    def replace(self, **changes) -> "Dataset":
        fields = dict(
            name=self.name, feature_names=self.feature_names,
            feature_kinds=self.feature_kinds, X=self.X, y=self.y,
            positive_label=self.positive_label, row_ids=self.row_ids,
            source_columns=self.source_columns,
        )
        fields.update(changes)
        return Dataset(**fields)


def make_dataset(X, y, name: str = "data", feature_names=None, positive_label: str = "1",
                 row_ids=None) -> Dataset:
    """Build an all-numeric dataset from arrays."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    names = tuple(feature_names) if feature_names is not None else tuple(
        f"x{j}" for j in range(X.shape[1]))
    return Dataset(name=name, feature_names=names, feature_kinds=(NUMERIC,) * X.shape[1],
                   X=X, y=y, positive_label=positive_label, row_ids=row_ids)


@dataclass(frozen=True)
class ClassStats:
    n_min: int
    n_maj: int
    ir: float


@dataclass(frozen=True)
class SplitPair:
    train: Dataset
    test: Dataset
    test_fraction: float
    seed: int


@dataclass(frozen=True, eq=False)
class NeighborGraph:
    """Exact k-nearest-neighbour lists.

    ``indices`` refer to rows of the matrix passed to :func:`knn`.
    """

    k: int
    indices: np.ndarray
    distances: np.ndarray
    labels: Optional[np.ndarray] = None


# ---------------------------------------------------------------------------
# ingestion
# ---------------------------------------------------------------------------

def load_csv(path, target_column: str, positive_label: Optional[str] = None,
             categorical: str = "onehot", name: Optional[str] = None) -> Dataset:
    """Read a CSV file into an encoded :class:`Dataset`.

    Parameters
    ----------
    path : path-like
        UTF-8 CSV with a header row.
    target_column : str
        Name of the binary label column.
    positive_label : str, optional
        Level to map to 1. The minority level is always mapped to 1; this
        argument only breaks exact ties in class counts.
    categorical : {"onehot", "ordinal"}
        Encoding of non-numeric feature columns. ``"onehot"`` emits one
        indicator per level; ``"ordinal"`` emits one column of sorted level
        codes.
    name : str, optional
        Dataset name; defaults to the file stem.

    Returns
    -------
    Dataset
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"no such file: {path}")
    if categorical not in ("onehot", "ordinal"):
        raise ValueError("categorical must be 'onehot' or 'ordinal'")
    df = pd.read_csv(path, skipinitialspace=True)
    if target_column not in df.columns:
        raise KeyError(f"target column {target_column!r} not in {list(df.columns)}")
    n_raw = len(df)
    df = df.dropna(axis=0, how="any").reset_index(drop=True)
    dropped = n_raw - len(df)
    if dropped:
        warnings.warn(f"dropped {dropped} rows with missing values", stacklevel=2)
    if len(df) == 0:
        raise EmptyAfterCleaning(f"{path}: no rows left after dropping missing values")

    target = df[target_column].astype(str).str.strip()
    levels = sorted(target.unique())
    if len(levels) == 1:
        raise SingleClass(f"target {target_column!r} has the single level {levels[0]!r}")
    if len(levels) != 2:
        raise NonBinaryTarget(f"target {target_column!r} has {len(levels)} distinct values")
    counts = target.value_counts()
    a, b = levels
    if counts[a] != counts[b]:
        pos = a if counts[a] < counts[b] else b
        if positive_label is not None and str(positive_label) != pos:
            warnings.warn(f"positive level {positive_label!r} is the majority; "
                          f"mapping minority level {pos!r} to 1", stacklevel=2)
    elif positive_label is not None and str(positive_label) in levels:
        pos = str(positive_label)
    else:
        pos = b
    y = (target == pos).to_numpy().astype(np.int64)

    blocks, names, kinds, sources = [], [], [], []
    for col in df.columns:
        if col == target_column:
            continue
        s = df[col]
        if pd.api.types.is_numeric_dtype(s):
            blocks.append(s.to_numpy(dtype=float)[:, None])
            names.append(str(col))
            kinds.append(NUMERIC)
            sources.append(str(col))
            continue
        s = s.astype(str).str.strip()
        cats = sorted(s.unique())
        if categorical == "ordinal":
            codes = pd.Categorical(s, categories=cats).codes.astype(float)
            blocks.append(codes[:, None])
            names.append(str(col))
            kinds.append(CATEGORICAL)
            sources.append(str(col))
        else:
            for level in cats:
                blocks.append((s == level).to_numpy(dtype=float)[:, None])
                names.append(f"{col}={level}")
                kinds.append(CATEGORICAL)
                sources.append(str(col))
    if not blocks:
        raise ValueError("no feature columns besides the target")
    X = np.hstack(blocks)
    ds_name = name or os.path.splitext(os.path.basename(str(path)))[0]
    return Dataset(name=ds_name, feature_names=tuple(names), feature_kinds=tuple(kinds),
                   X=X, y=y, positive_label=pos, source_columns=tuple(sources))


def class_stats(ds: Dataset) -> ClassStats:
    n0, n1 = ds.class_counts
    if n0 == 0 or n1 == 0:
        raise SingleClass(f"{ds.name}: only one class present")
    n_min, n_maj = min(n0, n1), max(n0, n1)
    return ClassStats(n_min=n_min, n_maj=n_maj, ir=n_maj / n_min)


def stratified_split(ds: Dataset, test_fraction: float, seed: int) -> SplitPair:
    """Seeded per-class holdout split.

    Each class contributes ``round(n_c * test_fraction)`` rows to the test
    part, clipped so both parts keep at least one row of the class.
    """
    if not 0.0 < test_fraction < 1.0:
        raise DegenerateClassSize(f"test_fraction must lie in (0, 1), got {test_fraction}")
    rng = np.random.default_rng(seed)
    test_rows = []
    for c in (0, 1):
        rows = np.flatnonzero(ds.y == c)
        if rows.size < 2:
            raise DegenerateClassSize(f"class {c} has {rows.size} rows; need at least 2")
        m = int(np.clip(round(rows.size * test_fraction), 1, rows.size - 1))
        test_rows.append(rng.permutation(rows)[:m])
    test_rows = np.sort(np.concatenate(test_rows))
    mask = np.zeros(ds.n, dtype=bool)
    mask[test_rows] = True
    return SplitPair(train=ds.take(np.flatnonzero(~mask)), test=ds.take(test_rows),
                     test_fraction=test_fraction, seed=seed)


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------

def zscore(X: np.ndarray, reference: Optional[np.ndarray] = None) -> np.ndarray:
    """Standardize columns with statistics of ``reference`` (default ``X``)."""
    ref = X if reference is None else reference
    mu = ref.mean(axis=0)
    sd = ref.std(axis=0)
    sd[sd == 0] = 1.0
    return (X - mu) / sd


def pairwise_chunks(Q: np.ndarray, R: np.ndarray, chunk: int = 512
                    ) -> Iterator[tuple]:
    """Yield ``(start, D)`` with exact Euclidean distances of row blocks of Q to R."""
    step = max(1, min(chunk, int(2e7 // max(R.shape[0], 1))))
    for start in range(0, Q.shape[0], step):
        yield start, cdist(Q[start:start + step], R)


def neighbors(Q: np.ndarray, R: np.ndarray, k: int, self_index: Optional[np.ndarray] = None,
              chunk: int = 512) -> tuple:
    """k nearest rows of ``R`` for each row of ``Q``.

    ``self_index[i]`` is the row of R that coincides with query i and must be
    skipped (use -1 for none). Ties are resolved toward the lower R index.
    """
    nq, nr = Q.shape[0], R.shape[0]
    avail = nr - (0 if self_index is None else 1)
    if k < 1 or k > avail:
        raise KTooLarge(f"k={k} but only {avail} candidate neighbours")
    idx = np.empty((nq, k), dtype=np.int64)
    dist = np.empty((nq, k))
    for start, D in pairwise_chunks(Q, R, chunk):
        rows = np.arange(start, start + D.shape[0])
        if self_index is not None:
            own = self_index[rows]
            ok = own >= 0
            D[np.flatnonzero(ok), own[ok]] = np.inf
        order = np.argsort(D, axis=1, kind="stable")[:, :k]
        idx[rows] = order
        dist[rows] = np.take_along_axis(D, order, axis=1)
    return idx, dist


def knn(X, k: int, query_rows=None, *, standardize: bool = False, labels=None,
        candidates=None) -> NeighborGraph:
    """Exact k nearest neighbours under Euclidean distance.

    Parameters
    ----------
    X : array_like of shape (n, p)
    k : int
        Neighbour count, ``k < n``.
    query_rows : array_like of int, optional
        Rows to query (default: all). A query row is never its own neighbour.
    standardize : bool
        Z-score columns of ``X`` before measuring distances.
    labels : array_like, optional
        Labels of ``X`` rows; neighbour labels are attached when given.
    candidates : array_like of int, optional
        Restrict neighbours to these rows of ``X``.

    Returns
    -------
    NeighborGraph
        ``indices`` are rows of ``X``; ties go to the lower row index.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if k >= n:
        raise KTooLarge(f"k={k} must be smaller than n={n}")
    Z = zscore(X) if standardize else X
    q = np.arange(n) if query_rows is None else np.asarray(query_rows, dtype=np.int64)
    cand = np.arange(n) if candidates is None else np.asarray(candidates, dtype=np.int64)
    pos = np.full(n, -1, dtype=np.int64)
    pos[cand] = np.arange(cand.size)
    local, dist = neighbors(Z[q], Z[cand], k, self_index=pos[q])
    idx = cand[local]
    lab = None if labels is None else np.asarray(labels)[idx]
    return NeighborGraph(k=k, indices=idx, distances=dist, labels=lab)
