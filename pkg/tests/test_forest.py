import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from texrd.regression import ForestHyper, ForestModel, predict_forest, train_forest

SMALL = ForestHyper(n_trees=20, max_depth=8, min_leaf=2)


def _linear_task(seed, n=500, d=3, noise=0.1):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, d))
    return X, 3 * X[:, 0] + rng.normal(0, noise, n)


def test_constant_target_predicts_constant(rng):
    X = rng.standard_normal((60, 4))
    m = train_forest(X, np.full(60, 7.0), SMALL, seed=3)
    assert np.all(predict_forest(m, rng.standard_normal((25, 4))) == 7.0)


def test_constant_features_and_target_train():
    m = train_forest(np.ones((10, 2)), np.full(10, -2.5), SMALL)
    assert predict_forest(m, [0.0, 9.0]) == -2.5


def test_single_row_predicts_its_target(rng):
    m = train_forest([[0.3, -1.0]], [4.25], SMALL)
    assert np.all(predict_forest(m, rng.standard_normal((10, 2))) == 4.25)
    assert predict_forest(m, [0.3, -1.0]) == 4.25


def test_linear_target_held_out_r2_near_ols_ceiling():
    X, y = _linear_task(11)
    tr, te = slice(0, 400), slice(400, 500)
    A = np.column_stack([X[tr], np.ones(400)])
    coef = np.linalg.lstsq(A, y[tr], rcond=None)[0]
    ols = np.column_stack([X[te], np.ones(100)]) @ coef

    def r2(pred):
        return 1 - ((y[te] - pred) ** 2).sum() / ((y[te] - y[te].mean()) ** 2).sum()

    rf = r2(predict_forest(train_forest(X[tr], y[tr], ForestHyper(), seed=5), X[te]))
    assert r2(ols) > 0.99
    assert rf > 0.9


def test_deterministic_and_byte_identical_serialization():
    X, y = _linear_task(2, n=200)
    a = train_forest(X, y, SMALL, seed=9)
    b = train_forest(X, y, SMALL, seed=9)
    ja, jb = json.dumps(a.to_json()), json.dumps(b.to_json())
    assert ja == jb
    c = train_forest(X, y, SMALL, seed=10)
    assert json.dumps(c.to_json()) != ja
    x = X[:7]
    assert np.array_equal(predict_forest(a, x), predict_forest(a, x))


def test_threads_do_not_change_the_model():
    X, y = _linear_task(4, n=200)
    a = train_forest(X, y, SMALL, seed=1, jobs=1)
    b = train_forest(X, y, SMALL, seed=1, jobs=3)
    assert json.dumps(a.to_json()) == json.dumps(b.to_json())


def test_json_round_trip():
    X, y = _linear_task(5, n=150)
    m = train_forest(X, y, SMALL, seed=2)
    back = ForestModel.from_json(json.loads(json.dumps(m.to_json())))
    assert np.array_equal(predict_forest(back, X), predict_forest(m, X))
    assert back.hyper == m.hyper and back.seed == m.seed


def test_split_indices_in_range_and_leaves_finite():
    X, y = _linear_task(6, n=200, d=5)
    m = train_forest(X, y, SMALL, seed=1)
    for t in m.trees:
        inner = t.feature >= 0
        assert np.all(t.feature[inner] < 5)
        assert np.all(np.isfinite(t.value))


def test_importances_favor_signal_feature():
    X, y = _linear_task(7, d=6)
    imp = train_forest(X, y, SMALL, seed=1).importances()
    assert imp.argmax() == 0
    assert imp.sum() == pytest.approx(1.0)


def test_dimension_mismatch_and_bad_hyper(rng):
    m = train_forest(rng.standard_normal((20, 3)), rng.standard_normal(20), SMALL)
    with pytest.raises(ValueError):
        predict_forest(m, np.zeros((2, 4)))
    for bad in (ForestHyper(n_trees=0), ForestHyper(n_trees=1001), ForestHyper(max_depth=0),
                ForestHyper(max_depth=65)):
        with pytest.raises(ValueError):
            train_forest(np.zeros((5, 1)), np.zeros(5), bad)
    with pytest.raises(ValueError):
        train_forest(np.zeros((5, 1)), np.zeros(4), SMALL)


def test_default_mtry_is_a_third_rounded_up():
    assert ForestHyper().resolve_mtry(44) == 15
    assert ForestHyper().resolve_mtry(1) == 1
    assert ForestHyper(mtry=2).resolve_mtry(44) == 2


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 40))
def test_predictions_within_training_range(seed, n):
    rng = np.random.default_rng(seed)
    X, y = rng.standard_normal((n, 3)), rng.standard_normal(n) * 5
    m = train_forest(X, y, ForestHyper(n_trees=5, max_depth=6, min_leaf=1), seed=seed)
    p = predict_forest(m, rng.standard_normal((30, 3)) * 4)
    assert np.all(p >= y.min() - 1e-12) and np.all(p <= y.max() + 1e-12)


def test_duplicated_column_barely_changes_mae():
    X, y = _linear_task(8)
    tr, te = slice(0, 400), slice(400, 500)

    def mae(M):
        m = train_forest(M[tr], y[tr], ForestHyper(), seed=1)
        return np.abs(predict_forest(m, M[te]) - y[te]).mean()

    assert mae(np.column_stack([X, X[:, 0]])) <= 1.10 * mae(X)
