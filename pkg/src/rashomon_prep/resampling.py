"""Data-level class balancing: random over/undersampling, NearMiss-1 and the
SMOTE family (SMOTE, ADASYN, Borderline-SMOTE, DBSMOTE, Safe-Level SMOTE,
relocating Safe-Level SMOTE, adaptive-neighbour SMOTE).

Every method takes a training :class:`~rashomon_prep.tabular.Dataset` and a
:class:`BalanceSpec` and returns a :class:`ResampleOutcome`. Neighbour
searches run on z-scored features by default; synthetic rows are
interpolated in the original feature space (z-scoring is affine, so the
segments coincide).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyDangerSet, KTooLarge, NoSafeAnchors, SingleClass, UnknownMethod
from .tabular import Dataset, neighbors, zscore

ORIGINAL = "original"
DUPLICATE = "duplicate"
SYNTHETIC = "synthetic"
REMOVED = "removed"

METHODS = ("oversample", "undersample", "nearmiss", "smote", "adasyn", "blsmote",
           "dbsmote", "rslsmote", "ansmote", "slsmote")
SMOTE_FAMILY = ("smote", "adasyn", "blsmote", "dbsmote", "rslsmote", "ansmote", "slsmote")

_ALIASES = {
    "none": "none", "oversample": "oversample", "ros": "oversample",
    "undersample": "undersample", "rus": "undersample",
    "nearmiss": "nearmiss", "near_miss": "nearmiss", "nearmiss1": "nearmiss",
    "smote": "smote", "adasyn": "adasyn",
    "blsmote": "blsmote", "borderline_smote": "blsmote", "borderlinesmote": "blsmote",
    "dbsmote": "dbsmote", "db_smote": "dbsmote",
    "rslsmote": "rslsmote", "rsl_smote": "rslsmote",
    "ansmote": "ansmote", "an_smote": "ansmote",
    "slsmote": "slsmote", "safe_level_smote": "slsmote", "safelevelsmote": "slsmote",
}


def normalize_method(name: str) -> str:
    """Canonical lower-case method name; raises UnknownMethod."""
    key = str(name).strip().lower().replace("-", "_")
    if key not in _ALIASES:
        raise UnknownMethod(f"unknown balancing method {name!r}; choose from "
                            f"{', '.join(('none',) + METHODS)}")
    return _ALIASES[key]


@dataclass(frozen=True)
class BalanceSpec:
    method: str = "smote"
    k: int = 5
    target_ratio: float = 1.0
    seed: int = 0
    standardize: bool = True

    def __post_init__(self):
        object.__setattr__(self, "method", normalize_method(self.method))
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.target_ratio < 1:
            raise ValueError("target_ratio must be >= 1")


@dataclass(frozen=True, eq=False)
class ResampleOutcome:
    """Balanced data plus provenance.

    Attributes
    ----------
    data : Dataset
        Retained originals first (input order), then added rows.
    provenance : ndarray of str
        Tag per row of ``data``: original, duplicate or synthetic.
    removed_ids : ndarray of int
        ``row_ids`` of input rows dropped by undersampling methods.
    parents : ndarray of shape (n_added, 3)
        Input-row positions each added row derives from (anchor, partner,
        relocation neighbour); -1 marks an unused slot.
    method_trace : dict
        Tag counts plus method-specific diagnostics.
    """

    data: Dataset
    provenance: np.ndarray
    removed_ids: np.ndarray
    parents: np.ndarray
    method_trace: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def largest_remainder(weights, total: int) -> np.ndarray:
    """Integer allocation of ``total`` proportional to ``weights``.

    Floors the exact quotas, then hands the leftover units to the largest
    fractional parts (lower index first on ties). The result sums to
    ``total`` exactly.
    """
    w = np.asarray(weights, dtype=float)
    if total <= 0 or w.size == 0:
        return np.zeros(w.size, dtype=np.int64)
    s = w.sum()
    if not np.isfinite(s) or s <= 0:
        raise ValueError("weights must have a positive finite sum")
    quota = w / s * total
    base = np.floor(quota).astype(np.int64)
    short = int(total - base.sum())
    if short > 0:
        order = np.argsort(-(quota - base), kind="stable")
        base[order[:short]] += 1
    return base


def adasyn_allocation(r, total: int) -> np.ndarray:
    """Per-anchor synthetic counts from ADASYN difficulty ratios ``r``.

    Falls back to uniform allocation when every ratio is zero.
    """
    r = np.asarray(r, dtype=float)
    if r.sum() <= 0:
        return largest_remainder(np.ones_like(r), total)
    return largest_remainder(r, total)


def dbsmote_allocation(d, total: int) -> np.ndarray:
    """Per-anchor counts proportional to inverse mean neighbour distance."""
    d = np.maximum(np.asarray(d, dtype=float), np.finfo(float).eps)
    return largest_remainder(1.0 / d, total)


def _half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


class _Context:
    """Per-call state: class roles, neighbour space and generator."""

    def __init__(self, train: Dataset, spec: BalanceSpec):
        n0, n1 = train.class_counts
        if n0 == 0 or n1 == 0:
            raise SingleClass(f"{train.name}: balancing needs both classes")
        self.train = train
        self.spec = spec
        self.min_label = 1 if n1 <= n0 else 0
        self.min_rows = np.flatnonzero(train.y == self.min_label)
        self.maj_rows = np.flatnonzero(train.y != self.min_label)
        self.n_min, self.n_maj = self.min_rows.size, self.maj_rows.size
        self.Z = zscore(train.X) if spec.standardize else train.X
        self.rng = np.random.default_rng(spec.seed)

    @property
    def deficit(self) -> int:
        """Rows to add to the minority so the IR reaches the target."""
        return max(0, _half_up(self.n_maj / self.spec.target_ratio) - self.n_min)

    @property
    def keep_majority(self) -> int:
        return min(self.n_maj, max(1, _half_up(self.spec.target_ratio * self.n_min)))

    def require_minority_k(self):
        if self.spec.k >= self.n_min:
            raise KTooLarge(f"k={self.spec.k} must be smaller than the minority count "
                            f"{self.n_min}")

    def minority_neighbors(self):
        """k nearest minority rows of each minority row, as input positions."""
        self.require_minority_k()
        Zm = self.Z[self.min_rows]
        idx, dist = neighbors(Zm, Zm, self.spec.k, self_index=np.arange(self.n_min))
        return self.min_rows[idx], dist

    def full_neighbors(self, k=None):
        """k nearest rows (any class) of each minority row."""
        k = self.spec.k if k is None else k
        if k >= self.train.n:
            raise KTooLarge(f"k={k} must be smaller than n={self.train.n}")
        idx, dist = neighbors(self.Z[self.min_rows], self.Z, k, self_index=self.min_rows)
        return idx, dist

    def majority_count(self):
        idx, _ = self.full_neighbors()
        return (self.train.y[idx] != self.min_label).sum(axis=1)


def _identity(ctx: _Context, **trace) -> ResampleOutcome:
    return _assemble(ctx, np.empty((0, ctx.train.p)), np.empty((0, 3), dtype=np.int64),
                     SYNTHETIC, **trace)


def _assemble(ctx: _Context, new_X, parents, tag, removed=None, **trace) -> ResampleOutcome:
    train = ctx.train
    keep = np.ones(train.n, dtype=bool)
    if removed is not None and len(removed):
        keep[np.asarray(removed)] = False
    kept = np.flatnonzero(keep)
    m = new_X.shape[0]
    next_id = int(train.row_ids.max()) + 1 if train.n else 0
    X = np.vstack([train.X[kept], new_X]) if m else train.X[kept]
    y = np.concatenate([train.y[kept], np.full(m, ctx.min_label, dtype=np.int64)])
    ids = np.concatenate([train.row_ids[kept], next_id + np.arange(m, dtype=np.int64)])
    data = train.replace(X=X, y=y, row_ids=ids)
    prov = np.array([ORIGINAL] * kept.size + [tag] * m, dtype=object)
    removed_ids = train.row_ids[~keep]
    counts = {ORIGINAL: int(kept.size), DUPLICATE: 0, SYNTHETIC: 0,
              REMOVED: int(removed_ids.size)}
    counts[tag] += m
    counts.update(trace)
    counts["method"] = ctx.spec.method
    return ResampleOutcome(data=data, provenance=prov, removed_ids=removed_ids,
                           parents=np.asarray(parents, dtype=np.int64).reshape(-1, 3),
                           method_trace=counts)


def _interpolate(ctx: _Context, anchors, partners, lam, base=None):
    """x_new = base + lam * (x_partner - base); base defaults to the anchor."""
    X = ctx.train.X
    A = X[anchors] if base is None else base
    return A + lam[:, None] * (X[partners] - A)


def _round_robin(ctx: _Context, pool: np.ndarray, total: int) -> np.ndarray:
    order = ctx.rng.permutation(pool)
    return order[np.arange(total) % order.size]


def _smote_from(ctx: _Context, anchors: np.ndarray, nbr_idx, pos_of, **trace):
    """Interpolate each anchor toward a uniformly chosen minority neighbour."""
    G = anchors.size
    pick = ctx.rng.integers(0, ctx.spec.k, size=G)
    partners = nbr_idx[pos_of[anchors], pick]
    lam = ctx.rng.random(G)
    new_X = _interpolate(ctx, anchors, partners, lam)
    parents = np.column_stack([anchors, partners, np.full(G, -1)])
    return _assemble(ctx, new_X, parents, SYNTHETIC, **trace)


def _position_map(ctx: _Context) -> np.ndarray:
    pos = np.full(ctx.train.n, -1, dtype=np.int64)
    pos[ctx.min_rows] = np.arange(ctx.n_min)
    return pos


# ---------------------------------------------------------------------------
# methods
# ---------------------------------------------------------------------------

def random_oversample(train: Dataset, spec: BalanceSpec) -> ResampleOutcome:
    """Duplicate minority rows uniformly at random with replacement."""
    ctx = _Context(train, spec)
    G = ctx.deficit
    picks = ctx.min_rows[ctx.rng.integers(0, ctx.n_min, size=G)]
    parents = np.column_stack([picks, np.full(G, -1), np.full(G, -1)])
    return _assemble(ctx, train.X[picks], parents, DUPLICATE)


def random_undersample(train: Dataset, spec: BalanceSpec) -> ResampleOutcome:
    """Drop majority rows uniformly at random without replacement."""
    ctx = _Context(train, spec)
    drop = ctx.n_maj - ctx.keep_majority
    removed = np.sort(ctx.rng.choice(ctx.maj_rows, size=drop, replace=False))
    return _assemble(ctx, np.empty((0, train.p)), np.empty((0, 3)), SYNTHETIC,
                     removed=removed)


def near_miss(train: Dataset, spec: BalanceSpec) -> ResampleOutcome:
    """NearMiss-1: keep the majority rows closest on average to their k
    nearest minority rows."""
    ctx = _Context(train, spec)
    keep = ctx.keep_majority
    if keep >= ctx.n_maj:
        return _identity(ctx)
    if spec.k > ctx.n_min:
        raise KTooLarge(f"k={spec.k} exceeds the minority count {ctx.n_min}")
    _, dist = neighbors(ctx.Z[ctx.maj_rows], ctx.Z[ctx.min_rows], spec.k)
    score = dist.mean(axis=1)
    order = np.argsort(score, kind="stable")
    removed = np.sort(ctx.maj_rows[order[keep:]])
    return _assemble(ctx, np.empty((0, train.p)), np.empty((0, 3)), SYNTHETIC,
                     removed=removed)


def smote(train: Dataset, spec: BalanceSpec) -> ResampleOutcome:
    ctx = _Context(train, spec)
    G = ctx.deficit
    if G == 0:
        return _identity(ctx)
    nbr, _ = ctx.minority_neighbors()
    anchors = _round_robin(ctx, ctx.min_rows, G)
    return _smote_from(ctx, anchors, nbr, _position_map(ctx))


def adasyn(train: Dataset, spec: BalanceSpec) -> ResampleOutcome:
    """Allocate synthetics in proportion to the majority share of each
    minority row's neighbourhood."""
    ctx = _Context(train, spec)
    G = ctx.deficit
    if G == 0:
        return _identity(ctx)
    nbr, _ = ctx.minority_neighbors()
    r = ctx.majority_count() / spec.k
    alloc = adasyn_allocation(r, G)
    anchors = np.repeat(ctx.min_rows, alloc)
    return _smote_from(ctx, anchors, nbr, _position_map(ctx),
                       uniform_fallback=bool(r.sum() == 0))


def borderline_smote(train: Dataset, spec: BalanceSpec) -> ResampleOutcome:
    """Interpolate only from DANGER minority rows (k/2 <= majority
    neighbours < k)."""
    ctx = _Context(train, spec)
    G = ctx.deficit
    if G == 0:
        return _identity(ctx)
    nbr, _ = ctx.minority_neighbors()
    delta = ctx.majority_count()
    danger = (delta >= spec.k / 2) & (delta < spec.k)
    if not danger.any():
        raise EmptyDangerSet(f"{train.name}: no minority row is in DANGER")
    anchors = _round_robin(ctx, ctx.min_rows[danger], G)
    return _smote_from(ctx, anchors, nbr, _position_map(ctx),
                       n_safe=int((delta < spec.k / 2).sum()), n_danger=int(danger.sum()),
                       n_noise=int((delta == spec.k).sum()))


def db_smote(train: Dataset, spec: BalanceSpec) -> ResampleOutcome:
    """Allocate synthetics by inverse mean distance to the k nearest
    minority neighbours (denser regions receive more)."""
    ctx = _Context(train, spec)
    G = ctx.deficit
    if G == 0:
        return _identity(ctx)
    nbr, dist = ctx.minority_neighbors()
    alloc = dbsmote_allocation(dist.mean(axis=1), G)
    anchors = np.repeat(ctx.min_rows, alloc)
    return _smote_from(ctx, anchors, nbr, _position_map(ctx))


def safe_levels(train: Dataset, spec: BalanceSpec) -> np.ndarray:
    """Same-class fraction of each minority row's k nearest neighbours."""
    ctx = _Context(train, spec)
    return 1.0 - ctx.majority_count() / spec.k


def _safe_level_core(ctx: _Context, relocate: bool) -> ResampleOutcome:
    G = ctx.deficit
    if G == 0:
        return _identity(ctx)
    k = ctx.spec.k
    nbr, _ = ctx.minority_neighbors()
    pos = _position_map(ctx)
    s = 1.0 - ctx.majority_count() / k
    safe = s > 0.5
    if relocate:
        pool = ctx.min_rows
    else:
        if not safe.any():
            raise NoSafeAnchors(f"{ctx.train.name}: no minority row has safe level > 0.5")
        pool = ctx.min_rows[safe]
    anchors = _round_robin(ctx, pool, G)
    pick = ctx.rng.integers(0, k, size=G)
    partners = nbr[pos[anchors], pick]
    u = ctx.rng.random(G)

    a_pos = pos[anchors]
    s_anchor = s[a_pos].copy()
    base = ctx.train.X[anchors].copy()
    helper = np.full(G, -1, dtype=np.int64)
    if relocate:
        # safest minority neighbour of each unsafe anchor; first in distance order on ties
        nbr_s = s[pos[nbr]]
        best = nbr[np.arange(ctx.n_min), np.argmax(nbr_s, axis=1)]
        unsafe = ~safe[a_pos]
        helper[unsafe] = best[a_pos[unsafe]]
        base[unsafe] = 0.5 * (base[unsafe] + ctx.train.X[helper[unsafe]])
        s_anchor[unsafe] = 0.5 * (s_anchor[unsafe] + s[pos[helper[unsafe]]])
    s_partner = s[pos[partners]]
    denom = s_anchor + s_partner
    scale = np.divide(s_partner, denom, out=np.full(G, 0.5), where=denom > 0)
    lam = u * scale
    new_X = _interpolate(ctx, anchors, partners, lam, base=base)
    parents = np.column_stack([anchors, partners, helper])
    trace = {"n_safe_anchors": int(safe.sum())}
    if relocate:
        trace["n_relocated"] = int((helper >= 0).sum())
    return _assemble(ctx, new_X, parents, SYNTHETIC, **trace)


def safe_level_smote(train: Dataset, spec: BalanceSpec) -> ResampleOutcome:
    """Anchors restricted to safe level > 0.5; the interpolation weight is
    shrunk by s(partner) / (s(anchor) + s(partner))."""
    return _safe_level_core(_Context(train, spec), relocate=False)


def rsl_smote(train: Dataset, spec: BalanceSpec) -> ResampleOutcome:
    """Safe-level SMOTE where unsafe anchors (s <= 0.5) are first moved to
    the midpoint with their safest minority neighbour."""
    return _safe_level_core(_Context(train, spec), relocate=True)


def an_smote(train: Dataset, spec: BalanceSpec) -> ResampleOutcome:
    """Adaptive neighbourhood: each anchor's neighbourhood grows from k'=1
    until it contains a minority row (at most 3k); that row is the partner.
    Anchors without one are skipped as noise."""
    ctx = _Context(train, spec)
    G = ctx.deficit
    if G == 0:
        return _identity(ctx)
    ctx.require_minority_k()
    cap = min(3 * spec.k, train.n - 1)
    idx, _ = ctx.full_neighbors(cap)
    is_min = train.y[idx] == ctx.min_label
    found = is_min.any(axis=1)
    first = np.argmax(is_min, axis=1)
    partner_of = np.full(train.n, -1, dtype=np.int64)
    partner_of[ctx.min_rows[found]] = idx[found, first[found]]
    if not found.any():
        raise NoSafeAnchors(f"{train.name}: every minority row is isolated within 3k neighbours")
    anchors = _round_robin(ctx, ctx.min_rows[found], G)
    partners = partner_of[anchors]
    lam = ctx.rng.random(G)
    new_X = _interpolate(ctx, anchors, partners, lam)
    parents = np.column_stack([anchors, partners, np.full(G, -1)])
    k_adaptive = np.where(found, first + 1, 0)
    return _assemble(ctx, new_X, parents, SYNTHETIC,
                     skipped_noise=int((~found).sum()),
                     mean_k_adaptive=float(k_adaptive[found].mean()))


_DISPATCH = {
    "oversample": random_oversample, "undersample": random_undersample,
    "nearmiss": near_miss, "smote": smote, "adasyn": adasyn, "blsmote": borderline_smote,
    "dbsmote": db_smote, "rslsmote": rsl_smote, "ansmote": an_smote,
    "slsmote": safe_level_smote,
}


def balance(train: Dataset, spec: BalanceSpec, fallback: bool = False) -> ResampleOutcome:
    """Run the method named by ``spec.method``.

    With ``fallback=True``, methods that find no usable anchor
    (EmptyDangerSet, NoSafeAnchors) are replaced by plain SMOTE and the
    substitution is noted in ``method_trace["fallback"]``.
    """
    if spec.method == "none":
        return _identity(_Context(train, spec))
    try:
        return _DISPATCH[spec.method](train, spec)
    except (EmptyDangerSet, NoSafeAnchors) as exc:
        if not fallback:
            raise
        out = smote(train, BalanceSpec("smote", spec.k, spec.target_ratio, spec.seed,
                                       spec.standardize))
        out.method_trace["fallback"] = "smote"
        out.method_trace["fallback_reason"] = type(exc).__name__
        out.method_trace["method"] = spec.method
        return out
