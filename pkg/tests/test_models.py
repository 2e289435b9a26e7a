import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unrest import models
from unrest.errors import InputError
from unrest.models import (
    FittedModel,
    ModelConfig,
    Standardizer,
    best_split,
    fit_linear_svm,
    fit_logit,
    fit_naive_bayes,
    fit_tree,
    oner_cutoff,
    penalized_gradient,
    penalized_loglik,
    predict,
    predict_proba,
)

import oracles


def test_toy_logit_matches_grid():
    x = np.array([[-1.0], [1.0], [-1.0], [1.0]])
    y = np.array([0, 1, 0, 1])
    m = fit_logit(x, y)
    assert m.converged
    w, b = m.params["weights"][0], m.params["intercept"][0]
    assert w > 0 and abs(b) < 1e-6
    ref = oracles.grid_argmax(oracles.standardize(x), y, 1e-4, half=32.0)
    assert np.max(np.abs(np.array([w, b]) - ref)) < 1e-3
    # hand evaluation of the logistic at x = 1 (standardized value 1 too)
    assert predict_proba(m, [[1.0]])[0] == pytest.approx(1 / (1 + np.exp(-(w + b))), rel=1e-12)


def test_constant_column_gets_zero_weight():
    rng = np.random.default_rng(3)
    X = np.column_stack([rng.standard_normal(40), np.full(40, 7.0)])
    y = (X[:, 0] + rng.standard_normal(40) > 0).astype(int)
    assert fit_logit(X, y).params["weights"][1] == 0.0


def test_all_zero_labels():
    X = np.arange(10.0)[:, None]
    m = models.fit("logit", X, np.zeros(10))
    assert (predict_proba(m, X) < 0.5).all()
    assert m.cutoff == 1.0 and not predict(m, X).any()


def test_predict_proba_basics():
    m = FittedModel("logit", {"weights": np.zeros(2), "intercept": np.zeros(1)}, Standardizer.identity(2))
    assert predict_proba(m, [[3.0, -4.0]])[0] == 0.5
    m2 = FittedModel("logit", {"weights": np.array([1.0, 2.0]), "intercept": np.zeros(1)}, Standardizer.identity(2))
    rows = np.array([[0, 0], [1, 0], [1, 1], [2, 3]], dtype=float)
    assert np.all(np.diff(predict_proba(m2, rows)) > 0)
    with pytest.raises(InputError):
        predict_proba(m2, [[1.0]])


def test_non_finite_is_fatal():
    with pytest.raises(InputError):
        fit_logit([[1.0], [np.nan]], [0, 1])


@pytest.mark.parametrize("probs,labels,cut", [
    ([0.2, 0.8], [0, 1], 0.5),
    ([0.1, 0.3, 0.4, 0.9], [0, 1, 0, 1], 0.2),
    ([0.3, 0.6, 0.9], [0, 0, 0], 1.0),
])
def test_oner_examples(probs, labels, cut):
    assert oner_cutoff(probs, labels) == pytest.approx(cut)


def test_oner_tie_accuracy_then_tpr():
    # 0.2 and 0.65 both reach 3/4; 0.2 keeps both positives
    p, y = [0.1, 0.3, 0.4, 0.9], [0, 1, 0, 1]
    acc = {c: np.mean((np.array(p) > c) == np.array(y)) for c in (0.2, 0.65)}
    assert acc[0.2] == acc[0.65] == 0.75


@settings(max_examples=200)
@given(st.lists(st.tuples(st.sampled_from([0.0, 0.1, 0.25, 0.5, 0.5, 0.75, 0.9, 1.0]) | st.floats(0, 1),
                          st.integers(0, 1)), min_size=1, max_size=25))
def test_oner_equals_scan(pairs):
    p, y = zip(*pairs)
    assert oner_cutoff(p, y) == oracles.oner_scan(list(p), list(y))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((15, 3))
    y = rng.integers(0, 2, 15).astype(float)
    beta = rng.standard_normal(4)
    g = penalized_gradient(beta, Z, y, 0.1)
    fd = oracles.fd_gradient(lambda b: penalized_loglik(b, Z, y, 0.1), beta)
    assert np.allclose(g, fd, rtol=1e-5, atol=1e-7)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_logit_converged_gradient_below_tol(seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((30, 2))
    y = (X @ [1.0, -0.5] + rng.standard_normal(30) > 0).astype(float)
    m = fit_logit(X, y)
    beta = np.append(m.params["weights"], m.params["intercept"])
    g = penalized_gradient(beta, m.standardizer.transform(X), y, 1e-4)
    assert m.converged and np.max(np.abs(g)) < 1e-8


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.randoms())
def test_row_order_and_rescaling_invariance(seed, rnd):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((40, 3))
    y = (X[:, 0] + rng.standard_normal(40) > 0).astype(int)
    perm = list(range(40))
    rnd.shuffle(perm)
    probe = rng.standard_normal((10, 3))
    for kind in ("logit", "naive_bayes"):
        a = models.fit(kind, X, y)
        b = models.fit(kind, X[perm], y[perm])
        assert np.allclose(predict_proba(a, probe), predict_proba(b, probe), atol=1e-6)
    scale = np.array([1000.0, 0.001, 3.0])
    a, b = fit_logit(X, y), fit_logit(X * scale, y)
    assert np.allclose(predict_proba(a, probe), predict_proba(b, probe * scale), atol=1e-6)


def test_standardizer():
    X = np.column_stack([np.arange(10.0), np.full(10, 2.0)])
    st_ = Standardizer.fit(X)
    Z = st_.transform(X)
    assert np.allclose(Z[:, 0].mean(), 0) and np.allclose(Z[:, 0].var(), 1)
    assert (st_.std >= 1e-9).all()


# --- naive Bayes ------------------------------------------------------------

def test_nb_symmetric_posterior_half():
    X = np.array([[-2.0], [-1.0], [1.0], [2.0]])
    m = fit_naive_bayes(X, [0, 0, 1, 1])
    assert predict_proba(m, [[0.0]])[0] == pytest.approx(0.5, abs=1e-12)


def test_nb_single_class():
    m = fit_naive_bayes([[1.0], [2.0]], [1, 1])
    assert predict_proba(m, [[-50.0], [3.0]]).tolist() == [1.0, 1.0]


def test_nb_matches_hand_bayes_rule():
    X = [[0.0, 1.0], [1.0, 3.0], [2.0, 2.0], [4.0, 5.0]]
    y = [0, 0, 1, 1]
    m = fit_naive_bayes(np.array(X), y)
    for x in ([1.0, 2.0], [3.0, 4.0], [-1.0, 0.5]):
        assert predict_proba(m, [x])[0] == pytest.approx(oracles.gaussian_nb_posterior(X, y, x), abs=1e-9)


# --- tree / svm -------------------------------------------------------------

def test_tree_pure_labels_single_leaf():
    m = fit_tree(np.arange(6.0)[:, None], np.ones(6))
    assert len(m.params["feature"]) == 1
    assert predict_proba(m, [[100.0]])[0] == 1.0


def test_tree_root_split_at_separating_midpoint():
    X = np.array([[1.0], [2.0], [3.0], [7.0], [8.0], [9.0]])
    y = np.array([0, 0, 0, 1, 1, 1])
    feat, thr = best_split(X, y)[:2]
    # the separating midpoint is the only candidate with zero child entropy
    assert (feat, thr) == (0, 5.0)
    m = fit_tree(X, y)
    assert predict(models.fit("tree", X, y), X).tolist() == y.tolist()
    assert m.params["threshold"][0] == 5.0


def test_svm_separable_training_accuracy():
    rng = np.random.default_rng(0)
    X = np.vstack([rng.normal([-2, -2], 0.5, (20, 2)), rng.normal([2, 2], 0.5, (20, 2))])
    y = np.array([0] * 20 + [1] * 20)
    m = fit_linear_svm(X, y, seed=1)
    signs = models.decision_function(m, X) > 0
    assert (signs == y.astype(bool)).all()
    assert np.array_equal(m.params["weights"], fit_linear_svm(X, y, seed=1).params["weights"])


# --- serialization ----------------------------------------------------------

@pytest.mark.parametrize("kind", ["logit", "nb", "tree", "svm"])
def test_model_json_round_trip(kind, tmp_path):
    rng = np.random.default_rng(5)
    X = rng.standard_normal((60, 3))
    y = (X[:, 0] > 0).astype(int)
    m = ModelConfig(kind=models.canonical_kind(kind)).fit(X, y)
    m.save(tmp_path / "m.json")
    back = FittedModel.load(tmp_path / "m.json")
    assert np.array_equal(predict_proba(back, X), predict_proba(m, X))
    assert back.cutoff == m.cutoff and back.kind == m.kind
    back.save(tmp_path / "n.json")
    assert (tmp_path / "m.json").read_bytes() == (tmp_path / "n.json").read_bytes()
    assert 0 <= json.loads((tmp_path / "m.json").read_text())["cutoff"] <= 1
