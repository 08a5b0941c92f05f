"""Tree and forest behavior against exhaustive and hand-computed oracles."""

import numpy as np
import pytest

from gaussfeat.errors import ConfigError, PersistenceError
from gaussfeat.forest import (
    CartTree,
    GaussForest,
    best_split,
    fit_tree,
    gini_impurity,
    load_model,
    save_model,
    tree_apply,
)
from gaussfeat.validation import NotFittedError

from oracle_cart import assert_same_tree, oracle_tree


def two_blob_data(rng, n=60, spread=0.6):
    half = n // 2
    a = rng.normal(loc=(0.0, 0.0), scale=spread, size=(half, 2))
    b = rng.normal(loc=(3.0, 2.0), scale=spread, size=(n - half, 2))
    X = np.vstack([a, b])
    y = np.array([0] * half + [1] * (n - half))
    return X, y


def test_gini_values():
    assert gini_impurity([1, 1]) == 0.5
    assert gini_impurity([5, 0]) == 0.0
    assert gini_impurity([0, 0]) == 0.0
    assert abs(gini_impurity([1, 1, 1, 1]) - 0.75) < 1e-15


def test_best_split_two_points():
    X = np.array([[0.0], [1.0]])
    y = np.array([0, 1])
    f, thr, dec = best_split(X, y, 2)
    assert f == 0
    assert thr == 0.5
    assert dec == 0.5


def test_best_split_prefers_lower_feature_on_tie():
    # both columns separate perfectly, identical scores
    X = np.array([[0.0, 10.0], [1.0, 11.0], [0.1, 10.1], [0.9, 10.9]])
    y = np.array([0, 1, 0, 1])
    f, thr, dec = best_split(X, y, 2)
    assert f == 0
    assert thr == 0.5


def test_best_split_prefers_lower_threshold_on_tie():
    # three levels, the outer class split twice as well either side:
    # thresholds 0.5 and 1.5 tie exactly, the lower one must win
    X = np.array([[0.0], [1.0], [2.0], [1.0]])
    y = np.array([0, 1, 0, 1])
    f, thr, dec = best_split(X, y, 2)
    assert thr == 0.5


def test_best_split_restricted_features():
    X = np.array([[0.0, 5.0], [1.0, 6.0], [0.0, 5.0], [1.0, 6.0]])
    y = np.array([0, 1, 0, 1])
    f, thr, _ = best_split(X, y, 2, feature_indices=[1])
    assert f == 1
    assert thr == 5.5


def test_best_split_none_when_constant():
    X = np.ones((6, 3))
    y = np.array([0, 1, 0, 1, 0, 1])
    assert best_split(X, y, 2) is None


def test_best_split_none_when_pure():
    X = np.arange(8.0).reshape(4, 2)
    y = np.zeros(4, dtype=int)
    assert best_split(X, y, 1) is None


def test_best_split_single_sample():
    assert best_split(np.zeros((1, 2)), np.zeros(1, dtype=int), 1) is None


def test_fit_tree_memorizes_training_data():
    rng = np.random.default_rng(5)
    X, y = two_blob_data(rng, n=80, spread=1.5)
    tree = fit_tree(X, y, 2)
    leaves = tree_apply(tree, X)
    pred = np.argmax(tree.counts[leaves], axis=1)
    assert np.array_equal(pred, y)


def test_fit_tree_depth_limit():
    rng = np.random.default_rng(6)
    X = rng.random((50, 3))
    y = rng.integers(0, 3, size=50)
    stump = fit_tree(X, y, 3, max_depth=1)
    assert stump.n_nodes <= 3
    assert np.all(stump.feature[stump.left >= 0] >= 0)


def test_fit_tree_min_samples_split():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0, 1, 0, 1])
    tree = fit_tree(X, y, 2, min_samples_split=5)
    assert tree.n_nodes == 1
    assert tree.feature[0] == -1


def test_fit_tree_needs_rng_for_subsampling():
    X = np.zeros((4, 5))
    y = np.array([0, 1, 0, 1])
    with pytest.raises(ConfigError):
        fit_tree(X, y, 2, features_per_split=2)


def test_exhaustive_oracle_equality_on_random_datasets():
    # discretized features force plenty of exact score ties, which is
    # exactly where the tie rules have to agree
    for seed in range(5):
        rng = np.random.default_rng(1000 + seed)
        X = rng.integers(0, 4, size=(50, 6)).astype(float) / 3.0
        y = rng.integers(0, 4, size=50)
        tree = fit_tree(X, y, 4)
        ref = oracle_tree(X, y, 4)
        assert_same_tree(tree, ref)


def test_oracle_equality_continuous_features():
    rng = np.random.default_rng(77)
    X = rng.normal(size=(50, 4))
    y = rng.integers(0, 3, size=50)
    tree = fit_tree(X, y, 3)
    assert_same_tree(tree, oracle_tree(X, y, 3))


def test_oracle_equality_respects_depth_limit():
    rng = np.random.default_rng(78)
    X = rng.normal(size=(40, 3))
    y = rng.integers(0, 2, size=40)
    tree = fit_tree(X, y, 2, max_depth=3)
    assert_same_tree(tree, oracle_tree(X, y, 2, max_depth=3))


# -- estimators -----------------------------------------------------------------


def test_cart_tree_estimator_roundtrip():
    rng = np.random.default_rng(8)
    X, y = two_blob_data(rng)
    model = CartTree().fit(X, y)
    assert np.array_equal(model.predict(X), y)
    proba = model.predict_proba(X)
    assert proba.shape == (len(X), 2)
    assert np.allclose(proba.sum(axis=1), 1.0)


def test_labels_need_not_be_contiguous():
    rng = np.random.default_rng(9)
    X, y01 = two_blob_data(rng)
    y = np.where(y01 == 0, 7, 23)
    model = GaussForest(n_estimators=5).fit(X, y)
    pred = model.predict(X)
    assert set(np.unique(pred)) <= {7, 23}
    assert np.array_equal(np.unique(model.classes_), [7, 23])


def test_forest_fit_predict_accuracy():
    rng = np.random.default_rng(10)
    X, y = two_blob_data(rng, n=120, spread=0.8)
    model = GaussForest(n_estimators=20, seed=3).fit(X, y)
    assert (model.predict(X) == y).mean() >= 0.95


def test_forest_determinism_same_seed():
    rng = np.random.default_rng(11)
    X, y = two_blob_data(rng, n=40)
    m1 = GaussForest(n_estimators=8, seed=42).fit(X, y)
    m2 = GaussForest(n_estimators=8, seed=42).fit(X, y)
    for t1, t2 in zip(m1.trees_, m2.trees_):
        assert np.array_equal(t1.feature, t2.feature)
        assert np.array_equal(t1.threshold, t2.threshold)
        assert np.array_equal(t1.counts, t2.counts)


def test_forest_seed_changes_trees():
    rng = np.random.default_rng(12)
    X, y = two_blob_data(rng, n=40)
    m1 = GaussForest(n_estimators=4, seed=1).fit(X, y)
    m2 = GaussForest(n_estimators=4, seed=2).fit(X, y)
    same = all(
        t1.n_nodes == t2.n_nodes and np.array_equal(t1.counts, t2.counts)
        for t1, t2 in zip(m1.trees_, m2.trees_))
    assert not same


def test_forest_rejects_bad_params():
    X = np.zeros((4, 2))
    y = np.array([0, 1, 0, 1])
    with pytest.raises(ConfigError):
        GaussForest(n_estimators=0).fit(X, y)
    with pytest.raises(ConfigError):
        GaussForest(features_per_split=99).fit(X, y)
    with pytest.raises(ConfigError):
        GaussForest(seed=-1).fit(X, y)


def test_predict_requires_fit():
    with pytest.raises(NotFittedError):
        GaussForest().predict(np.zeros((1, 2)))
    with pytest.raises(NotFittedError):
        CartTree().predict_proba(np.zeros((1, 2)))


def test_feature_importances_focus():
    # only feature 1 carries signal
    rng = np.random.default_rng(13)
    X = rng.random((200, 3))
    y = (X[:, 1] > 0.5).astype(int)
    model = GaussForest(n_estimators=10, seed=0).fit(X, y)
    imp = model.feature_importances_
    assert abs(imp.sum() - 1.0) < 1e-9
    assert imp[1] > 0.8


def test_get_params_roundtrip():
    model = GaussForest(n_estimators=7, seed=5)
    params = model.get_params()
    clone = GaussForest(**params)
    assert clone.get_params() == params


# -- persistence ------------------------------------------------------------------


def test_save_load_identical_predictions(tmp_path):
    rng = np.random.default_rng(14)
    X, y = two_blob_data(rng, n=50)
    model = GaussForest(n_estimators=6, seed=9).fit(X, y)
    path = tmp_path / "model.json"
    save_model(path, model)
    loaded = load_model(path)
    assert np.array_equal(loaded.predict(X), model.predict(X))
    assert np.array_equal(loaded.predict_proba(X), model.predict_proba(X))
    assert loaded.get_params() == model.get_params()


def test_save_is_byte_deterministic(tmp_path):
    rng = np.random.default_rng(15)
    X, y = two_blob_data(rng, n=50)
    p1 = tmp_path / "a.json"
    p2 = tmp_path / "b.json"
    save_model(p1, GaussForest(n_estimators=5, seed=4).fit(X, y))
    save_model(p2, GaussForest(n_estimators=5, seed=4).fit(X, y))
    assert p1.read_bytes() == p2.read_bytes()


def test_save_load_single_tree(tmp_path):
    rng = np.random.default_rng(16)
    X, y = two_blob_data(rng, n=30)
    model = CartTree(max_depth=4).fit(X, y)
    path = tmp_path / "tree.json"
    save_model(path, model)
    loaded = load_model(path)
    assert isinstance(loaded, CartTree)
    assert np.array_equal(loaded.predict(X), model.predict(X))


def test_load_rejects_truncated_file(tmp_path):
    rng = np.random.default_rng(17)
    X, y = two_blob_data(rng, n=30)
    path = tmp_path / "model.json"
    save_model(path, CartTree().fit(X, y))
    data = path.read_bytes()
    path.write_bytes(data[:len(data) // 2])
    with pytest.raises(PersistenceError):
        load_model(path)


def test_load_rejects_wrong_version(tmp_path):
    import json
    rng = np.random.default_rng(18)
    X, y = two_blob_data(rng, n=30)
    path = tmp_path / "model.json"
    save_model(path, CartTree().fit(X, y))
    payload = json.loads(path.read_text())
    payload["format_version"] = 999
    path.write_text(json.dumps(payload))
    with pytest.raises(PersistenceError, match="version"):
        load_model(path)


def test_load_rejects_missing_keys(tmp_path):
    path = tmp_path / "model.json"
    path.write_text('{"format":"gauss-forest-model","format_version":1}')
    with pytest.raises(PersistenceError):
        load_model(path)


def test_save_requires_fitted(tmp_path):
    with pytest.raises(NotFittedError):
        save_model(tmp_path / "x.json", GaussForest())
