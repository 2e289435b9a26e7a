"""From-scratch binary classifiers and the OneR probability cutoff.

Four model kinds share one ``FittedModel`` container:

* ``logit``: ridge-penalized logistic regression fitted by IRLS on
  standardized features (intercept unpenalized).
* ``naive_bayes``: Gaussian class-conditional densities, floored variances.
* ``tree``: C4.5-style binary splits chosen by gain ratio.
* ``linear_svm``: hinge loss + L2, subgradient descent; the probability is
  the logistic of the margin, a ranking surrogate rather than a calibrated
  posterior. The tree's leaf frequencies are likewise only approximate.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Any

import numpy as np

from unrest.errors import InputError

log = logging.getLogger(__name__)

KINDS = ("logit", "naive_bayes", "tree", "linear_svm")
KIND_ALIASES = {"logit": "logit", "lr": "logit", "nb": "naive_bayes", "naive_bayes": "naive_bayes",
                "tree": "tree", "c45": "tree", "svm": "linear_svm", "linear_svm": "linear_svm"}
STD_FLOOR = 1e-9


def canonical_kind(kind: str) -> str:
    try:
        return KIND_ALIASES[kind.lower()]
    except KeyError:
        raise InputError(f"unknown classifier {kind!r}; choose logit, nb, tree or svm") from None


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "Standardizer":
        X = np.asarray(X, dtype=float)
        return cls(X.mean(axis=0), np.maximum(X.std(axis=0), STD_FLOOR))

    @classmethod
    def identity(cls, k: int) -> "Standardizer":
        return cls(np.zeros(k), np.ones(k))

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) / self.std


@dataclass(frozen=True)
class FittedModel:
    kind: str
    params: dict[str, np.ndarray]
    standardizer: Standardizer
    cutoff: float = 0.5
    converged: bool = True
    n_iter: int = 0

    @property
    def n_features(self) -> int:
        return len(self.standardizer.mean)

    def with_cutoff(self, cutoff: float) -> "FittedModel":
        if not 0.0 <= cutoff <= 1.0:
            raise InputError(f"cutoff {cutoff} outside [0, 1]")
        return replace(self, cutoff=float(cutoff))

    # JSON floats use repr, which round-trips binary64 exactly.
    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "params": {k: np.asarray(v).tolist() for k, v in sorted(self.params.items())},
            "standardizer": {"mean": self.standardizer.mean.tolist(), "std": self.standardizer.std.tolist()},
            "cutoff": self.cutoff,
            "converged": self.converged,
            "n_iter": self.n_iter,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "FittedModel":
        kind = d["kind"]
        if kind not in KINDS:
            raise InputError(f"unknown model kind {kind!r}")
        params = {k: np.asarray(v, dtype=int if k in _INT_PARAMS else float) for k, v in d["params"].items()}
        std = Standardizer(np.asarray(d["standardizer"]["mean"], float), np.asarray(d["standardizer"]["std"], float))
        return cls(kind, params, std, float(d["cutoff"]), bool(d.get("converged", True)), int(d.get("n_iter", 0)))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "FittedModel":
        try:
            return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
        except (OSError, ValueError, KeyError) as exc:
            raise InputError(f"cannot load model {path}: {exc}") from exc


_INT_PARAMS = {"feature", "left", "right"}


def _check_xy(X, y=None):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise InputError(f"expected a 2-D feature matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InputError("feature matrix contains non-finite values")
    if y is None:
        return X
    y = np.asarray(y).astype(float).ravel()
    if len(y) != len(X):
        raise InputError(f"{len(X)} rows but {len(y)} labels")
    if not np.all((y == 0) | (y == 1)):
        raise InputError("labels must be 0/1")
    return X, y


# --- logistic regression ----------------------------------------------------

def penalized_loglik(beta: np.ndarray, Z: np.ndarray, y: np.ndarray, ridge: float) -> float:
    """Bernoulli log-likelihood minus ridge/2 * |w|^2; ``beta = [w..., b]``."""
    eta = Z @ beta[:-1] + beta[-1]
    ll = np.sum(y * eta - np.logaddexp(0.0, eta))
    return float(ll - 0.5 * ridge * beta[:-1] @ beta[:-1])


def penalized_gradient(beta: np.ndarray, Z: np.ndarray, y: np.ndarray, ridge: float) -> np.ndarray:
    p = sigmoid(Z @ beta[:-1] + beta[-1])
    r = y - p
    gw = Z.T @ r - ridge * beta[:-1]
    return np.append(gw, r.sum())


def irls(Z: np.ndarray, y: np.ndarray, ridge: float = 1e-4, tol: float = 1e-8, max_iter: int = 100):
    """Newton/IRLS ascent on the penalized log-likelihood.

    Returns ``(beta, converged, iterations)``. Step halving guards against
    overshoot far from the optimum.
    """
    n, k = Z.shape
    A = np.hstack([Z, np.ones((n, 1))])
    P = np.full(k + 1, ridge)
    P[-1] = 0.0
    beta = np.zeros(k + 1)
    obj = penalized_loglik(beta, Z, y, ridge)
    for it in range(1, max_iter + 1):
        g = penalized_gradient(beta, Z, y, ridge)
        if np.max(np.abs(g)) < tol:
            return beta, True, it - 1
        p = sigmoid(A @ beta)
        w = p * (1.0 - p)
        H = A.T @ (A * w[:, None]) + np.diag(P)
        H[-1, -1] += 1e-12  # all-one-class data: intercept curvature vanishes
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, g, rcond=None)[0]
        t = 1.0
        while True:
            cand = beta + t * step
            new = penalized_loglik(cand, Z, y, ridge)
            if new >= obj - 1e-12 or t < 1e-10:
                break
            t *= 0.5
        beta, obj = cand, new
    g = penalized_gradient(beta, Z, y, ridge)
    return beta, bool(np.max(np.abs(g)) < tol), max_iter


def fit_logit(X, y, ridge: float = 1e-4, tol: float = 1e-8, max_iter: int = 100) -> FittedModel:
    X, y = _check_xy(X, y)
    if len(X) < 2:
        raise InputError("logistic regression needs at least 2 rows")
    if ridge <= 0:
        raise InputError("ridge must be > 0")
    st = Standardizer.fit(X)
    beta, converged, n_iter = irls(st.transform(X), y, ridge, tol, max_iter)
    if not converged:
        log.warning("IRLS hit the iteration cap (%d) before |grad| < %g", max_iter, tol)
    return FittedModel("logit", {"weights": beta[:-1], "intercept": beta[-1:]}, st,
                       converged=converged, n_iter=n_iter)


# --- naive Bayes ------------------------------------------------------------

def fit_naive_bayes(X, y, var_floor: float = 1e-9) -> FittedModel:
    X, y = _check_xy(X, y)
    k = X.shape[1]
    means = np.zeros((2, k))
    variances = np.ones((2, k))
    priors = np.zeros(2)
    for c in (0, 1):
        rows = X[y == c]
        priors[c] = len(rows) / len(X)
        if len(rows):
            means[c] = rows.mean(axis=0)
            variances[c] = np.maximum(rows.var(axis=0), var_floor)
    return FittedModel("naive_bayes", {"means": means, "variances": variances, "priors": priors},
                       Standardizer.identity(k))


def _nb_proba(m: FittedModel, X: np.ndarray) -> np.ndarray:
    mu, var, pri = m.params["means"], m.params["variances"], m.params["priors"]
    if pri[1] == 0.0:
        return np.zeros(len(X))
    if pri[0] == 0.0:
        return np.ones(len(X))
    logp = np.empty((len(X), 2))
    for c in (0, 1):
        ll = -0.5 * (np.log(2 * np.pi * var[c]) + (X - mu[c]) ** 2 / var[c])
        logp[:, c] = math.log(pri[c]) + ll.sum(axis=1)
    return sigmoid(logp[:, 1] - logp[:, 0])


# --- C4.5-style tree --------------------------------------------------------

def _entropy(pos: np.ndarray, tot: np.ndarray) -> np.ndarray:
    p = np.divide(pos, tot, out=np.zeros_like(pos, dtype=float), where=tot > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(np.where(p > 0, p * np.log2(p), 0.0) + np.where(p < 1, (1 - p) * np.log2(1 - p), 0.0))
    return np.nan_to_num(h)


def best_split(X: np.ndarray, y: np.ndarray, min_leaf: int = 1):
    """Highest gain-ratio (feature, midpoint threshold), or None.

    Only splits with positive information gain and at least ``min_leaf``
    rows per side qualify; ties keep the lowest feature then threshold.
    """
    n = len(y)
    base = _entropy(np.array([y.sum()]), np.array([n]))[0]
    best = None
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="stable")
        xs, ys = X[order, j], y[order]
        left_n = np.arange(1, n)
        left_pos = np.cumsum(ys)[:-1]
        valid = (xs[1:] > xs[:-1]) & (left_n >= min_leaf) & (n - left_n >= min_leaf)
        if not valid.any():
            continue
        right_n = n - left_n
        right_pos = ys.sum() - left_pos
        cond = (left_n * _entropy(left_pos, left_n) + right_n * _entropy(right_pos, right_n)) / n
        gain = base - cond
        fl = left_n / n
        split_info = -(fl * np.log2(fl) + (1 - fl) * np.log2(1 - fl))
        ratio = np.where(valid & (gain > 1e-12), gain / split_info, -np.inf)
        i = int(np.argmax(ratio))
        if ratio[i] == -np.inf:
            continue
        if best is None or ratio[i] > best[0] + 1e-12:
            best = (float(ratio[i]), j, float((xs[i] + xs[i + 1]) / 2.0))
    return None if best is None else best[1:]


def fit_tree(X, y, max_depth: int = 4, min_leaf: int = 2) -> FittedModel:
    X, y = _check_xy(X, y)
    feature, threshold, left, right, value = [], [], [], [], []

    def grow(idx: np.ndarray, depth: int) -> int:
        node = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(float(y[idx].mean()) if len(idx) else 0.0)
        ys = y[idx]
        if depth >= max_depth or len(idx) < 2 * min_leaf or ys.min() == ys.max():
            return node
        split = best_split(X[idx], ys, min_leaf)
        if split is None:
            return node
        j, t = split
        mask = X[idx, j] <= t
        feature[node], threshold[node] = j, t
        left[node] = grow(idx[mask], depth + 1)
        right[node] = grow(idx[~mask], depth + 1)
        return node

    grow(np.arange(len(y)), 0)
    params = {
        "feature": np.array(feature, dtype=int),
        "threshold": np.array(threshold),
        "left": np.array(left, dtype=int),
        "right": np.array(right, dtype=int),
        "value": np.array(value),
    }
    return FittedModel("tree", params, Standardizer.identity(X.shape[1]))


def _tree_proba(m: FittedModel, X: np.ndarray) -> np.ndarray:
    f, t, l, r, v = (m.params[k] for k in ("feature", "threshold", "left", "right", "value"))
    out = np.empty(len(X))
    for i, x in enumerate(X):
        node = 0
        while f[node] >= 0:
            node = l[node] if x[f[node]] <= t[node] else r[node]
        out[i] = v[node]
    return out


# --- linear SVM -------------------------------------------------------------

def fit_linear_svm(X, y, reg: float = 1e-3, epochs: int = 200, seed: int = 0) -> FittedModel:
    """Pegasos-style subgradient descent on the L2-regularized hinge loss."""
    X, y = _check_xy(X, y)
    if reg <= 0:
        raise InputError("svm reg must be > 0")
    st = Standardizer.fit(X)
    Z = st.transform(X)
    s = 2.0 * y - 1.0
    n, k = Z.shape
    rng = np.random.default_rng(seed)
    w = np.zeros(k)
    b = 0.0
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (reg * (t + 1.0 / reg))  # bounded first steps
            margin = s[i] * (Z[i] @ w + b)
            w *= 1.0 - eta * reg
            if margin < 1.0:
                w += eta * s[i] * Z[i]
                b += eta * s[i]
    return FittedModel("linear_svm", {"weights": w, "intercept": np.array([b])}, st, n_iter=epochs)


# --- shared -----------------------------------------------------------------

def decision_function(m: FittedModel, X) -> np.ndarray:
    """Linear score for logit/svm; log-odds of the probability otherwise."""
    X = _check_xy(X)
    if X.shape[1] != m.n_features:
        raise InputError(f"model expects {m.n_features} features, got {X.shape[1]}")
    if m.kind in ("logit", "linear_svm"):
        return m.standardizer.transform(X) @ m.params["weights"] + m.params["intercept"][0]
    p = np.clip(predict_proba(m, X), 1e-300, 1 - 1e-16)
    return np.log(p) - np.log1p(-p)


def predict_proba(m: FittedModel, X) -> np.ndarray:
    X = _check_xy(X)
    if X.shape[1] != m.n_features:
        raise InputError(f"model expects {m.n_features} features, got {X.shape[1]}")
    if m.kind in ("logit", "linear_svm"):
        return sigmoid(m.standardizer.transform(X) @ m.params["weights"] + m.params["intercept"][0])
    if m.kind == "naive_bayes":
        return _nb_proba(m, X)
    return _tree_proba(m, X)


def predict(m: FittedModel, X) -> np.ndarray:
    return (predict_proba(m, X) > m.cutoff).astype(int)


def oner_cutoff(probs, labels) -> float:
    """Training-accuracy-maximizing threshold on predicted probabilities.

    Candidates are 0, 1 and the midpoints between adjacent distinct sorted
    probabilities; a row is predicted positive when its probability exceeds
    the cutoff. Ties prefer higher TPR, then the lower cutoff.
    """
    p = np.asarray(probs, dtype=float).ravel()
    y = np.asarray(labels).astype(int).ravel()
    if len(p) == 0:
        raise InputError("oner_cutoff needs at least one probability")
    if len(p) != len(y):
        raise InputError("probabilities and labels differ in length")
    uniq, inverse = np.unique(p, return_inverse=True)
    pos_at = np.bincount(inverse, weights=y, minlength=len(uniq))
    tot_at = np.bincount(inverse, minlength=len(uniq))
    # suffix sums: rows whose value index is >= k
    pos_from = np.concatenate([np.cumsum(pos_at[::-1])[::-1], [0]]).astype(int)
    tot_from = np.concatenate([np.cumsum(tot_at[::-1])[::-1], [0]]).astype(int)
    cands = np.concatenate([[0.0], (uniq[:-1] + uniq[1:]) / 2.0, [1.0]])
    k = np.searchsorted(uniq, cands, side="right")
    tp = pos_from[k]
    tn = (len(y) - int(y.sum())) - (tot_from[k] - pos_from[k])
    correct = tp + tn
    order = np.lexsort((cands, -tp, -correct))
    return float(cands[order[0]])


def fit(kind: str, X, y, *, ridge: float = 1e-4, tol: float = 1e-8, max_iter: int = 100,
        var_floor: float = 1e-9, max_depth: int = 4, min_leaf: int = 2,
        reg: float = 1e-3, epochs: int = 200, seed: int = 0, with_cutoff: bool = True) -> FittedModel:
    """Fit any kind and, by default, tune its OneR cutoff on the training rows."""
    kind = canonical_kind(kind)
    if kind == "logit":
        m = fit_logit(X, y, ridge, tol, max_iter)
    elif kind == "naive_bayes":
        m = fit_naive_bayes(X, y, var_floor)
    elif kind == "tree":
        m = fit_tree(X, y, max_depth, min_leaf)
    else:
        m = fit_linear_svm(X, y, reg, epochs, seed)
    if with_cutoff:
        m = m.with_cutoff(oner_cutoff(predict_proba(m, X), y))
    return m


@dataclass(frozen=True)
class ModelConfig:
    kind: str = "logit"
    ridge: float = 1e-4
    tol: float = 1e-8
    max_iter: int = 100
    var_floor: float = 1e-9
    max_depth: int = 4
    min_leaf: int = 2
    reg: float = 1e-3
    epochs: int = 200
    seed: int = 0

    def fit(self, X, y) -> FittedModel:
        """Fit with OneR cutoff tuned on the same rows."""
        kw = asdict(self)
        kind = kw.pop("kind")
        return fit(kind, X, y, **kw)
