"""Wrapper feature-subset selection: best-first search scored by stratified CV."""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from unrest import models
from unrest.errors import InputError
from unrest.featmat import FEATURES
from unrest.models import ModelConfig

IMPROVEMENT_EPS = 1e-6


@dataclass(frozen=True)
class SubsetEvaluation:
    subset: tuple[int, ...]  # column indices, ascending
    cv_accuracy: float
    fold_count: int
    evaluated: int = 0  # subsets scored during the search

    def names(self, names: Sequence[str] = FEATURES) -> list[str]:
        return [names[i] for i in self.subset]


@dataclass(frozen=True)
class InclusionReport:
    fractions: tuple[float, ...]
    fold_count: int
    subsets: tuple[tuple[int, ...], ...] = ()

    def percentages(self, names: Sequence[str] = FEATURES) -> dict[str, float]:
        return {n: 100.0 * f for n, f in zip(names, self.fractions)}


def stratified_folds(y, folds: int, seed: int) -> np.ndarray:
    """Fold id per row; each class is shuffled then dealt round-robin."""
    y = np.asarray(y).astype(int)
    if folds < 2:
        raise InputError("need at least 2 folds")
    if len(y) < folds:
        raise InputError(f"{len(y)} rows cannot fill {folds} folds")
    rng = np.random.default_rng(seed)
    fold = np.empty(len(y), dtype=int)
    offset = 0
    for c in (0, 1):
        idx = np.flatnonzero(y == c)
        idx = idx[rng.permutation(len(idx))]
        fold[idx] = (np.arange(len(idx)) + offset) % folds
        offset += len(idx)
    return fold


def _majority_predict(y_train: np.ndarray, n: int) -> np.ndarray:
    # ties go to the positive class, matching the OneR tie-break on TPR
    return np.full(n, int(y_train.mean() >= 0.5))


def make_scorer(X: np.ndarray, y: np.ndarray, fold: np.ndarray, config) -> Callable[[tuple[int, ...]], float]:
    """Mean per-fold accuracy of ``config`` trained on a column subset."""
    folds = int(fold.max()) + 1
    cache: dict[tuple[int, ...], float] = {}

    def score(subset: tuple[int, ...]) -> float:
        if subset in cache:
            return cache[subset]
        accs = []
        for k in range(folds):
            tr, te = fold != k, fold == k
            if not te.any():
                continue
            if not subset or y[tr].min() == y[tr].max():
                pred = _majority_predict(y[tr], int(te.sum()))
            else:
                cols = list(subset)
                m = config.fit(X[tr][:, cols], y[tr])
                pred = models.predict(m, X[te][:, cols])
            accs.append(float(np.mean(pred == y[te])))
        cache[subset] = float(np.mean(accs))
        return cache[subset]

    score.cache = cache  # type: ignore[attr-defined]
    return score


def best_first(score: Callable[[tuple[int, ...]], float], n_features: int, stale_limit: int = 5) -> tuple[tuple[int, ...], float]:
    """Forward best-first search from the empty subset.

    Pops the best open node, expands it by adding one feature, and stops
    once ``stale_limit`` consecutive expansions fail to beat the incumbent
    by more than ``IMPROVEMENT_EPS``.
    """
    start: tuple[int, ...] = ()
    best, best_score = start, score(start)
    # heap entries sort by score desc, then smaller subsets, then lexicographic
    open_heap = [(-best_score, 0, start)]
    closed = {start}
    stale = 0
    while open_heap and stale < stale_limit:
        _, _, node = heapq.heappop(open_heap)
        improved = False
        for j in range(n_features):
            if j in node:
                continue
            child = tuple(sorted(node + (j,)))
            if child in closed:
                continue
            closed.add(child)
            s = score(child)
            heapq.heappush(open_heap, (-s, len(child), child))
            if s > best_score + IMPROVEMENT_EPS:
                best, best_score = child, s
                improved = True
        stale = 0 if improved else stale + 1
    return best, best_score


def wrapper_select(
    X,
    y,
    config=None,
    folds: int = 10,
    stale_limit: int = 5,
    seed: int = 0,
) -> SubsetEvaluation:
    """Best-first wrapper search scored by seeded stratified k-fold accuracy."""
    config = config or ModelConfig()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y).astype(int)
    if X.size == 0 or len(y) == 0:
        raise InputError("cannot select features on an empty matrix")
    if X.ndim != 2 or len(X) != len(y):
        raise InputError(f"matrix shape {X.shape} does not match {len(y)} labels")
    fold = stratified_folds(y, folds, seed)
    score = make_scorer(X, y, fold, config)
    subset, acc = best_first(score, X.shape[1], stale_limit)
    return SubsetEvaluation(subset, acc, folds, len(score.cache))


def exhaustive_select(X, y, config=None, folds: int = 10, seed: int = 0) -> SubsetEvaluation:
    """Score every nonempty subset on the same folds; reference oracle for small k."""
    from itertools import combinations

    config = config or ModelConfig()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y).astype(int)
    fold = stratified_folds(y, folds, seed)
    score = make_scorer(X, y, fold, config)
    best, best_score = (), -1.0
    for size in range(1, X.shape[1] + 1):
        for sub in combinations(range(X.shape[1]), size):
            s = score(sub)
            if s > best_score + IMPROVEMENT_EPS:
                best, best_score = sub, s
    return SubsetEvaluation(best, best_score, folds, len(score.cache))


def fold_inclusion(
    X,
    y,
    config=None,
    folds: int = 10,
    seed: int = 0,
    stale_limit: int = 5,
) -> InclusionReport:
    """Per-feature share of outer folds whose wrapper subset contains it.

    Each outer fold is held out in turn and the wrapper runs on the rest.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y).astype(int)
    if X.size == 0:
        raise InputError("cannot select features on an empty matrix")
    outer = stratified_folds(y, folds, seed)
    counts = np.zeros(X.shape[1], dtype=int)
    subsets = []
    for k in range(folds):
        keep = outer != k
        ev = wrapper_select(X[keep], y[keep], config, folds, stale_limit, seed + 1 + k)
        counts[list(ev.subset)] += 1
        subsets.append(ev.subset)
    return InclusionReport(tuple((counts / folds).tolist()), folds, tuple(subsets))


def write_report(
    path: str | Path,
    best: SubsetEvaluation,
    inclusion: InclusionReport | None,
    names: Sequence[str] = FEATURES,
    metadata: dict | None = None,
) -> None:
    out = {
        "best_subset": best.names(names),
        "cv_accuracy": best.cv_accuracy,
        "folds": best.fold_count,
        "subsets_evaluated": best.evaluated,
        "inclusion_pct": inclusion.percentages(names) if inclusion else None,
        "metadata": metadata or {},
    }
    Path(path).write_text(json.dumps(out, indent=2, sort_keys=True) + "\n", encoding="utf-8")
