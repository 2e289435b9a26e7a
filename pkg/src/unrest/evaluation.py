"""Progressive day-by-day evaluation, confusion rates, and ROC/AUC."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from datetime import date
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from unrest import models
from unrest.models import ModelConfig
from unrest.corpus import ProtestEvent
from unrest.errors import InputError
from unrest.featmat import FEATURES, FeatureMatrix, mask_indices


@dataclass(frozen=True)
class PredictionLabel:
    region: str
    date: date
    probability: float
    label: int


@dataclass(frozen=True)
class DailyReport:
    """One day's confusion counts over all regions.

    With no actual positives TPR is reported as 1.0 (nothing was missed);
    the same convention applies to TNR with no actual negatives.
    """

    date: date
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def tpr_exact(self) -> Fraction:
        p = self.tp + self.fn
        return Fraction(self.tp, p) if p else Fraction(1)

    @property
    def tnr_exact(self) -> Fraction:
        q = self.tn + self.fp
        return Fraction(self.tn, q) if q else Fraction(1)

    @property
    def accuracy_exact(self) -> Fraction:
        return Fraction(self.tp + self.tn, self.n) if self.n else Fraction(1)

    @property
    def tpr(self) -> float:
        return float(self.tpr_exact)

    @property
    def tnr(self) -> float:
        return float(self.tnr_exact)

    @property
    def accuracy(self) -> float:
        return float(self.accuracy_exact)

    def to_dict(self) -> dict[str, Any]:
        return {
            "date": self.date.isoformat(),
            "tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn,
            "tpr": self.tpr, "tnr": self.tnr, "accuracy": self.accuracy,
        }


def confusion(pred, truth) -> tuple[int, int, int, int]:
    pred = np.asarray(pred).astype(bool)
    truth = np.asarray(truth).astype(bool)
    return (int(np.sum(pred & truth)), int(np.sum(pred & ~truth)),
            int(np.sum(~pred & ~truth)), int(np.sum(~pred & truth)))


def daily_metrics(
    predictions: Sequence[PredictionLabel],
    truth: Iterable[ProtestEvent],
    day: date,
    regions: Sequence[str] | None = None,
) -> DailyReport:
    """Score one day's predictions; every region needs exactly one prediction."""
    by_region: dict[str, PredictionLabel] = {}
    for p in predictions:
        if p.date != day:
            continue
        if p.region in by_region:
            raise InputError(f"two predictions for {p.region} on {day}")
        by_region[p.region] = p
    if regions is not None:
        missing = [r for r in regions if r not in by_region]
        if missing:
            raise InputError(f"no prediction on {day} for {', '.join(missing)}")
    actual = {e.region for e in truth if e.date == day}
    keys = sorted(by_region)
    tp, fp, tn, fn = confusion([by_region[r].label for r in keys], [r in actual for r in keys])
    return DailyReport(day, tp, fp, tn, fn)


# --- ROC ----------------------------------------------------------------------

@dataclass(frozen=True)
class RocCurve:
    """Points ordered by decreasing threshold; a score >= threshold counts as positive."""

    thresholds: tuple[float, ...]
    fpr: tuple[float, ...]
    tpr: tuple[float, ...]
    auc: float

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["threshold", "fpr", "tpr"])
            for t, f, r in zip(self.thresholds, self.fpr, self.tpr):
                w.writerow([_fmt(t), repr(float(f)), repr(float(r))])
            fh.write(f"# auc={self.auc!r}\n")


def _fmt(t: float) -> str:
    return "inf" if t == float("inf") else repr(float(t))


def roc(scores, labels) -> RocCurve:
    """Threshold sweep over distinct scores with trapezoidal AUC.

    Tied scores enter the curve together as one diagonal segment.
    """
    s = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels).astype(int).ravel()
    if len(s) != len(y):
        raise InputError("scores and labels differ in length")
    P = int(y.sum())
    N = len(y) - P
    if P == 0 or N == 0:
        raise InputError("ROC needs at least one positive and one negative label")
    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]
    last = np.r_[np.nonzero(np.diff(s))[0], len(s) - 1]
    tps = np.cumsum(y)[last]
    fps = (last + 1) - tps
    tpr = np.r_[0.0, tps / P]
    fpr = np.r_[0.0, fps / N]
    thresholds = np.r_[np.inf, s[last]]
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))
    return RocCurve(tuple(thresholds.tolist()), tuple(fpr.tolist()), tuple(tpr.tolist()), auc)


def mann_whitney_auc(scores, labels) -> float:
    """P(score_pos > score_neg) + 0.5 P(tie), by rank sums with midranks."""
    s = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels).astype(int).ravel()
    P = int(y.sum())
    N = len(y) - P
    if P == 0 or N == 0:
        raise InputError("AUC needs at least one positive and one negative label")
    order = np.argsort(s, kind="stable")
    ranks = np.empty(len(s))
    sorted_s = s[order]
    i = 0
    while i < len(s):
        j = i
        while j + 1 < len(s) and sorted_s[j + 1] == sorted_s[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    u = ranks[y == 1].sum() - P * (P + 1) / 2.0
    return float(u / (P * N))


# --- protocols ----------------------------------------------------------------

@dataclass
class RunResult:
    reports: list[DailyReport]
    roc: RocCurve | None
    predictions: list[PredictionLabel]
    truth_labels: list[int]
    train_sizes: list[int]
    model: models.FittedModel | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "metadata": self.metadata,
            "days": [r.to_dict() for r in self.reports],
            "train_sizes": self.train_sizes,
            "auc": None if self.roc is None else self.roc.auc,
        }

    def write_report(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    def write_predictions(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["date", "state", "probability", "label", "truth"])
            for p, t in zip(self.predictions, self.truth_labels):
                w.writerow([p.date.isoformat(), p.region, repr(float(p.probability)), p.label, t])


def _truth_labels(matrix: FeatureMatrix, truth: Iterable[ProtestEvent] | None) -> np.ndarray:
    if truth is None:
        return matrix.y
    events = {(e.date, e.region) for e in truth}
    return np.array([int((d, r) in events) for d, r in zip(matrix.row_dates, matrix.row_regions)])


def _pooled_roc(scores: list[float], labels: list[int]) -> RocCurve | None:
    if 0 < sum(labels) < len(labels):
        return roc(scores, labels)
    return None


def progressive_run(
    matrix: FeatureMatrix,
    truth: Iterable[ProtestEvent] | None = None,
    config: ModelConfig = ModelConfig(),
    feature_mask: Sequence[str] = FEATURES,
    start_date: date | None = None,
    end_date: date | None = None,
) -> RunResult:
    """Refit on every earlier day, predict the next, pool scores for one ROC.

    The default window predicts every matrix day after the first.
    """
    y_all = _truth_labels(matrix, truth)
    cols = mask_indices(feature_mask)
    dates = list(matrix.dates)
    start = start_date or (dates[1] if len(dates) > 1 else dates[0])
    end = end_date or dates[-1]
    pred_days = [d for d in dates if start <= d <= end]
    if not pred_days:
        raise InputError(f"no matrix days in {start}..{end}")
    k = len(matrix.regions)
    reports, preds, truth_labels, sizes = [], [], [], []
    scores: list[float] = []
    model = None
    for d in pred_days:
        i = dates.index(d)
        if i == 0:
            raise InputError(f"no training rows before {d}")
        train = slice(0, i * k)
        test = matrix.day_slice(d)
        model = config.fit(matrix.X[train][:, cols], y_all[train])
        prob = models.predict_proba(model, matrix.X[test][:, cols])
        lab = (prob > model.cutoff).astype(int)
        day_preds = [PredictionLabel(r, d, float(p), int(l)) for r, p, l in zip(matrix.regions, prob, lab)]
        yt = y_all[test]
        reports.append(DailyReport(d, *confusion(lab, yt)))
        preds.extend(day_preds)
        truth_labels.extend(int(v) for v in yt)
        scores.extend(prob.tolist())
        sizes.append(i * k)
    meta = {"protocol": "progressive", "classifier": config.kind, "features": list(feature_mask),
            "seed": config.seed}
    return RunResult(reports, _pooled_roc(scores, truth_labels), preds, truth_labels, sizes, model, meta)


def transfer_run(
    train: FeatureMatrix,
    test: FeatureMatrix,
    config: ModelConfig = ModelConfig(),
    feature_mask: Sequence[str] = FEATURES,
    test_truth: Iterable[ProtestEvent] | None = None,
) -> RunResult:
    """One fit on every row of ``train``; score every day of ``test``."""
    if len(test) == 0:
        raise InputError("transfer test matrix is empty")
    if train.X.shape[1] != test.X.shape[1]:
        raise InputError("train and test matrices have different feature schemas")
    cols = mask_indices(feature_mask)
    y_test = _truth_labels(test, test_truth)
    model = config.fit(train.X[:, cols], train.y)
    prob = models.predict_proba(model, test.X[:, cols])
    lab = (prob > model.cutoff).astype(int)
    reports, preds = [], []
    for d in test.dates:
        sl = test.day_slice(d)
        reports.append(DailyReport(d, *confusion(lab[sl], y_test[sl])))
    for r, d, p, l in zip(test.row_regions, test.row_dates, prob, lab):
        preds.append(PredictionLabel(r, d, float(p), int(l)))
    truth_labels = [int(v) for v in y_test]
    meta = {"protocol": "transfer", "classifier": config.kind, "features": list(feature_mask),
            "seed": config.seed}
    return RunResult(reports, _pooled_roc(prob.tolist(), truth_labels), preds, truth_labels,
                     [len(train)], model, meta)


def single_feature_baselines(
    matrix: FeatureMatrix,
    features: Sequence[str],
    truth: Iterable[ProtestEvent] | None = None,
    config: ModelConfig = ModelConfig(),
) -> dict[str, RunResult]:
    if not features:
        raise InputError("no baseline features given")
    return {f: progressive_run(matrix, truth, config, (f,)) for f in features}


def format_grid(reports: Sequence[DailyReport], title: str | None = None) -> str:
    """Per-day TPR / TNR / accuracy laid out with dates as columns."""
    head = ["Predicted date"] + [r.date.strftime("%b %d") for r in reports]
    rows = [
        ["TPR"] + [_pct(r.tpr) for r in reports],
        ["TNR"] + [_pct(r.tnr) for r in reports],
        ["Overall accuracy"] + [_pct(r.accuracy) for r in reports],
    ]
    widths = [max(len(row[i]) for row in [head] + rows) for i in range(len(head))]
    lines = [title] if title else []
    for row in [head] + rows:
        lines.append("  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths))))
    return "\n".join(lines)


def _pct(v: float) -> str:
    return f"{100 * v:.2f}%"


def write_baselines(results: Mapping[str, RunResult], path: str | Path) -> None:
    out = {f: r.to_dict() for f, r in results.items()}
    Path(path).write_text(json.dumps(out, indent=2, sort_keys=True) + "\n", encoding="utf-8")
