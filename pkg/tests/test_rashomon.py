import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as hst

from conftest import blobs
from oracles import auc_pairwise, disagreement_double_loop
from rashomon_prep.errors import DimensionMismatch, SingleClass, SingleClassEval
from rashomon_prep.rashomon import (PredictionMatrix, build_rashomon_set, discrepancy,
                                    evaluate_loss, multiplicity_report, obscurity,
                                    performance_gain, prediction_matrix, reference_model,
                                    roc_auc, sample_model_specs, train_pool)
from rashomon_prep.rashomon.metrics import binarize, loss_from_scores
from rashomon_prep.rashomon.pool import GRIDS
from rashomon_prep.rashomon.rset import rashomon_members
from rashomon_prep.tabular import make_dataset, stratified_split


class ConstantModel:
    """Stand-in pool member returning fixed scores."""

    def __init__(self, scores):
        self.scores = np.asarray(scores, dtype=float)

    def predict_scores(self, X):
        return self.scores[: len(X)]


# ---------------------------------------------------------------------------
# AUC and losses
# ---------------------------------------------------------------------------

class TestAuc:
    def test_four_rows(self):
        assert roc_auc([1, 1, 0, 0], [0.9, 0.2, 0.6, 0.1]) == 0.75
        assert loss_from_scores([1, 1, 0, 0], [0.9, 0.2, 0.6, 0.1]) == 0.25

    def test_perfect_and_constant(self):
        assert roc_auc([0, 0, 1], [0.1, 0.2, 0.9]) == 1.0
        assert roc_auc([0, 1, 0, 1], [0.5] * 4) == 0.5

    def test_single_class(self):
        with pytest.raises(SingleClassEval):
            roc_auc([1, 1], [0.2, 0.3])

    def test_error_rate(self):
        assert loss_from_scores([1, 0, 1, 0], [0.5, 0.49, 0.2, 0.9], "error_rate") == 0.5

    def test_threshold_tie_predicts_one(self):
        assert binarize([0.5, 0.4999, 1.0]).tolist() == [1, 0, 1]

    @given(hst.lists(hst.tuples(hst.integers(0, 1), hst.integers(0, 6)), min_size=2,
                     max_size=100))
    def test_pairwise_oracle(self, rows):
        y = [r[0] for r in rows]
        if len(set(y)) < 2:
            return
        s = [r[1] / 6 for r in rows]
        assert roc_auc(y, s) == pytest.approx(auc_pairwise(y, s), abs=1e-12)

    def test_performance_gain(self):
        assert performance_gain(0.8, 0.7) == pytest.approx(0.1)
        assert performance_gain(0.7, 0.7) == 0.0
        assert performance_gain(0.6, 0.9) == pytest.approx(-0.3)
        with pytest.raises(ValueError):
            performance_gain(1.2, 0.5)


# ---------------------------------------------------------------------------
# reference model and membership
# ---------------------------------------------------------------------------

class TestMembership:
    def test_reference(self):
        assert reference_model([0.3, 0.1, 0.2]) == 1
        assert reference_model([0.2, 0.2, 0.2]) == 0
        assert reference_model([0.7]) == 0

    def test_threshold_example(self):
        assert rashomon_members([0.10, 0.12, 0.16], 0.05) == (0, 1)

    def test_epsilon_zero_keeps_ties(self):
        assert rashomon_members([0.2, 0.1, 0.1, 0.3], 0.0) == (1, 2)

    def test_saturation(self):
        assert rashomon_members([0.2, 0.1, 0.3], 0.2) == (0, 1, 2)

    def test_float_noise_at_boundary(self):
        # 0.15 - 0.10 is not exactly 0.05 in binary floating point
        assert rashomon_members([0.10, 0.15], 0.05) == (0, 1)

    @given(hst.lists(hst.floats(0, 1), min_size=1, max_size=30),
           hst.lists(hst.floats(0, 0.5), min_size=2, max_size=5))
    def test_monotone_in_epsilon(self, losses, eps):
        eps = sorted(eps)
        sets = [set(rashomon_members(losses, e)) for e in eps]
        ref = reference_model(losses)
        for small, big in zip(sets, sets[1:]):
            assert small <= big
        assert all(ref in s for s in sets)

    def test_built_set(self):
        ev = make_dataset(np.zeros((4, 1)), [1, 1, 0, 0])
        pool = [ConstantModel([0.9, 0.8, 0.1, 0.2]), ConstantModel([0.9, 0.2, 0.6, 0.1]),
                ConstantModel([0.2, 0.1, 0.8, 0.9])]
        rset = build_rashomon_set(pool, ev, 0.3)
        assert rset.reference_index == 0
        assert rset.member_indices == (0, 1)
        assert rset.losses.tolist() == [0.0, 0.25, 1.0]
        assert evaluate_loss(pool[1], ev) == 0.25


# ---------------------------------------------------------------------------
# discrepancy and obscurity
# ---------------------------------------------------------------------------

def pm_from_columns(cols, ref=0):
    return PredictionMatrix(np.column_stack(cols), reference_column=ref)


class TestMultiplicity:
    REF = np.array([0, 0, 0, 0])

    def test_identical_columns(self):
        pm = pm_from_columns([self.REF] * 4)
        assert discrepancy(pm) == 0.0 and obscurity(pm) == 0.0

    def test_hand_example(self):
        cols = [self.REF, [1, 0, 0, 0], [1, 1, 0, 0], [1, 1, 1, 0]]
        pm = pm_from_columns(cols)
        assert discrepancy(pm) == 0.75
        assert obscurity(pm) == 0.5

    def test_complement(self):
        assert discrepancy(pm_from_columns([self.REF, 1 - self.REF])) == 1.0

    def test_single_observation(self):
        pm = pm_from_columns([[0], [1], [0], [1], [0]])
        assert obscurity(pm) == 0.5

    def test_reference_only(self):
        pm = pm_from_columns([self.REF])
        assert discrepancy(pm) == 0.0 and obscurity(pm) == 0.0

    def test_include_reference(self):
        cols = [self.REF, [1, 0, 0, 0], [1, 1, 0, 0], [1, 1, 1, 0]]
        pm = pm_from_columns(cols)
        assert obscurity(pm, include_reference=True) == pytest.approx(6 / 16)

    def test_report(self):
        cols = [self.REF, [1, 0, 0, 0], [1, 1, 0, 0]]
        rep = multiplicity_report(pm_from_columns(cols), 0.05)
        assert rep.per_model_disagreement.tolist() == [0.25, 0.5]
        assert rep.n_members == 3 and rep.discrepancy == 0.5

    @given(hst.integers(1, 20), hst.integers(1, 10), hst.integers(0, 10**6))
    def test_double_loop_oracle(self, n, m, seed):
        rng = np.random.default_rng(seed)
        P = rng.integers(0, 2, size=(n, m))
        ref = int(rng.integers(m))
        pm = PredictionMatrix(P, reference_column=ref)
        d, o = disagreement_double_loop(P, ref)
        assert discrepancy(pm) == d and obscurity(pm) == o
        assert obscurity(pm) <= discrepancy(pm)
        # column and row permutations leave both metrics unchanged
        others = [j for j in range(m) if j != ref]
        cols = [ref] + list(rng.permutation(others))
        Q = P[rng.permutation(n)][:, cols]
        pq = PredictionMatrix(Q, reference_column=0)
        assert discrepancy(pq) == d and obscurity(pq) == obscurity(pm)


# ---------------------------------------------------------------------------
# model pool
# ---------------------------------------------------------------------------

class TestPool:
    def test_specs_reproducible_and_on_grid(self):
        a, b = sample_model_specs(50, 7), sample_model_specs(50, 7)
        assert a == b and len(a) == 50
        for spec in a:
            for key, value in spec.params.items():
                assert value in GRIDS[spec.family][key]
        assert len({s.seed for s in a}) == 50

    def test_pool_size_one_rejected(self):
        with pytest.raises(ValueError):
            sample_model_specs(1, 0)

    def test_single_class_training(self):
        with pytest.raises(SingleClass):
            train_pool(make_dataset(np.arange(4.0), [1, 1, 1, 1]), 2)

    def test_separable_data_memorised(self):
        ds = blobs(30, 30, p=2, shift=6.0, seed=0)
        pool = train_pool(ds, 12, seed=1)
        assert min(m.summary["train_error"] for m in pool) == 0.0

    def test_scores_in_unit_interval_and_deterministic(self):
        ds = blobs(80, 30, seed=2)
        a, b = train_pool(ds, 6, seed=5), train_pool(ds, 6, seed=5)
        for ma, mb in zip(a, b):
            sa, sb = ma.predict_scores(ds.X), mb.predict_scores(ds.X)
            np.testing.assert_array_equal(sa, sb)
            assert ((sa >= 0) & (sa <= 1)).all()

    def test_prediction_matrix(self):
        ds = blobs(120, 40, seed=3)
        sp = stratified_split(ds, 0.3, 0)
        pool = train_pool(sp.train, 5, seed=0)
        rset = build_rashomon_set(pool, sp.test, 1.0)
        pm = prediction_matrix(rset, sp.test.X)
        assert pm.preds.shape == (sp.test.n, 5)
        ref = pool[rset.reference_index].predict_scores(sp.test.X) >= 0.5
        np.testing.assert_array_equal(pm.preds[:, pm.reference_column], ref)
        with pytest.raises(DimensionMismatch):
            prediction_matrix(rset, sp.test.X[:, :2])

    def test_single_member_matrix(self):
        ds = blobs(120, 40, seed=3)
        pool = train_pool(ds, 3, seed=0)
        rset = build_rashomon_set(pool, ds, 0.0)
        pm = prediction_matrix(rset, ds.X)
        assert pm.preds.shape[1] == len(rset.member_indices)
        if pm.preds.shape[1] == 1:
            assert discrepancy(pm) == 0.0
