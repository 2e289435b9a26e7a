"""Region x day feature matrix (seven predictors), correlation, and pruning.

Column order is fixed::

    f1  mention count targeting (region, day), cumulative over earlier days
    f2  corpus-wide count of negative tweets on the previous day
    f3  candidate vote share in the region
    f4  mean polarity of the region's negative tweets on the previous day
    f5  mean violent words per region tweet on the previous day
    f6  region tweet count (or hourly pace) on the previous day
    f7  county lead-vote flag

Every tweet-derived column is lagged one day: the row for day ``d`` only
sees tweets dated before ``d``.
"""

from __future__ import annotations

import csv
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone, tzinfo
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from unrest.corpus import Corpus, ElectionStats, ProtestEvent
from unrest.errors import InputError
from unrest.textfeat import DEFAULT_HORIZON_DAYS, Resources, TweetAnalysis, analyze

FEATURES = ("f1", "f2", "f3", "f4", "f5", "f6", "f7")
FEATURE_LABELS = {
    "f1": "mention count",
    "f2": "global negative tweets",
    "f3": "vote share",
    "f4": "negative polarity",
    "f5": "violent words / tweet",
    "f6": "tweet count",
    "f7": "lead-vote flag",
}
TWEET_FEATURES = ("f1", "f2", "f4", "f5", "f6")
INT_COLUMNS = {"f1", "f2", "f7"}
DEFAULT_LEAD_THRESHOLD = 100_000
DEFAULT_CORR_THRESHOLD = 0.8


@dataclass(frozen=True)
class StateDayFeatures:
    region: str
    date: date
    f1_mention_count: int
    f2_global_negative_count: int
    f3_vote_pct: float
    f4_avg_negative_polarity: float
    f5_avg_violent_per_tweet: float
    f6_daily_tweet_count: float
    f7_lead_flag: int
    label: int


@dataclass(frozen=True)
class FeatureMatrix:
    """Dense rows in canonical (date, region) order."""

    dates: tuple[date, ...]
    regions: tuple[str, ...]
    X: np.ndarray  # (rows, 7)
    y: np.ndarray  # (rows,) int

    def __post_init__(self):
        n = len(self.dates) * len(self.regions)
        if self.X.shape != (n, len(FEATURES)) or self.y.shape != (n,):
            raise InputError(
                f"matrix shape {self.X.shape} / {self.y.shape} does not match "
                f"{len(self.dates)} dates x {len(self.regions)} regions"
            )

    def __len__(self) -> int:
        return len(self.y)

    @property
    def row_dates(self) -> list[date]:
        return [d for d in self.dates for _ in self.regions]

    @property
    def row_regions(self) -> list[str]:
        return list(self.regions) * len(self.dates)

    def day_slice(self, d: date) -> slice:
        i = self.dates.index(d)
        k = len(self.regions)
        return slice(i * k, (i + 1) * k)

    def column(self, name: str) -> np.ndarray:
        return self.X[:, FEATURES.index(name)]

    def rows(self) -> list[StateDayFeatures]:
        out = []
        for i, (d, r) in enumerate(zip(self.row_dates, self.row_regions)):
            x = self.X[i]
            out.append(StateDayFeatures(
                r, d, int(x[0]), int(x[1]), float(x[2]), float(x[3]),
                float(x[4]), float(x[5]), int(x[6]), int(self.y[i]),
            ))
        return out

    def events(self) -> frozenset[ProtestEvent]:
        return frozenset(
            ProtestEvent(d, r)
            for d, r, lab in zip(self.row_dates, self.row_regions, self.y)
            if lab
        )


def lead_flag(stats: ElectionStats, threshold: int = DEFAULT_LEAD_THRESHOLD) -> int:
    if threshold < 0:
        raise InputError("lead threshold must be >= 0")
    return int(stats.max_opposition_county_lead >= threshold)


def date_range(start: date, end: date) -> list[date]:
    if end < start:
        raise InputError(f"empty date range {start}..{end}")
    return [start + timedelta(days=i) for i in range((end - start).days + 1)]


def day_windows(corpus: Corpus, days: Iterable[date], tz: tzinfo = timezone.utc) -> dict[date, float]:
    """Observed hours per day, rounded out to whole hours at the corpus edges."""
    stamps = [r.created_at.astimezone(tz) for r in corpus]
    out = {}
    if not stamps:
        return {d: 24.0 for d in days}
    first, last = min(stamps), max(stamps)
    for d in days:
        lo = datetime(d.year, d.month, d.day, tzinfo=tz)
        hi = lo + timedelta(days=1)
        a = max(lo, first.replace(minute=0, second=0))
        b = min(hi, last.replace(minute=0, second=0) + timedelta(hours=1))
        out[d] = max((b - a).total_seconds() / 3600.0, 0.0) if b > a else 0.0
    return out


def build_matrix(
    analyses: Sequence[TweetAnalysis],
    election: Mapping[str, ElectionStats],
    protests: Iterable[ProtestEvent],
    dates: Sequence[date],
    regions: Sequence[str],
    lead_threshold: int = DEFAULT_LEAD_THRESHOLD,
    pace_hours: Mapping[date, float] | None = None,
) -> FeatureMatrix:
    """Aggregate per-tweet analyses into the region x day matrix.

    When ``pace_hours`` is given, f6 becomes tweets per observed hour of
    the previous day instead of the raw count.
    """
    if not dates:
        raise InputError("date range is empty")
    missing = [r for r in regions if r not in election]
    if missing:
        raise InputError(f"no election stats for {', '.join(missing)}")
    dates = tuple(sorted(dates))
    regions = tuple(regions)
    truth = {(e.date, e.region) for e in protests}

    count: Counter = Counter()
    neg_count: Counter = Counter()
    neg_sum: defaultdict = defaultdict(float)
    violent: Counter = Counter()
    global_neg: Counter = Counter()
    # mention hits keyed by target, with the emitting tweet's date
    mentions: defaultdict = defaultdict(list)
    for a in analyses:
        key = (a.region, a.date)
        count[key] += 1
        violent[key] += a.violent
        if a.is_negative:
            neg_count[key] += 1
            neg_sum[key] += a.polarity
            global_neg[a.date] += 1
        for h in a.hits:
            mentions[(h.target_region, h.target_date)].append(a.date)

    X = np.zeros((len(dates) * len(regions), len(FEATURES)))
    y = np.zeros(len(dates) * len(regions), dtype=int)
    i = 0
    for d in dates:
        prev = d - timedelta(days=1)
        for r in regions:
            key = (r, prev)
            n = count[key]
            f6 = float(n)
            if pace_hours is not None:
                hours = pace_hours.get(prev, 24.0)
                f6 = n / hours if hours > 0 else 0.0
            X[i] = (
                sum(1 for src in mentions[(r, d)] if src < d),
                global_neg[prev],
                election[r].candidate_vote_pct,
                neg_sum[key] / neg_count[key] if neg_count[key] else 0.0,
                violent[key] / n if n else 0.0,
                f6,
                lead_flag(election[r], lead_threshold),
            )
            y[i] = int((d, r) in truth)
            i += 1
    return FeatureMatrix(dates, regions, X, y)


def featurize(
    corpus: Corpus,
    res: Resources,
    election: Mapping[str, ElectionStats],
    protests: Iterable[ProtestEvent],
    regions: Sequence[str],
    dates: Sequence[date] | None = None,
    lead_threshold: int = DEFAULT_LEAD_THRESHOLD,
    horizon_days: int = DEFAULT_HORIZON_DAYS,
    tz: tzinfo = timezone.utc,
    pace: str = "auto",
) -> FeatureMatrix:
    """Analyze a cleansed corpus and build its matrix.

    Default dates are the day after each corpus day. ``pace`` is ``"count"``,
    ``"pace"``, or ``"auto"`` (pace only when day windows differ).
    """
    analyses = [analyze(t, res, horizon_days, tz) for t in corpus]
    if dates is None:
        if not analyses:
            raise InputError("empty corpus and no date range")
        lo = min(a.date for a in analyses)
        hi = max(a.date for a in analyses)
        dates = date_range(lo + timedelta(days=1), hi + timedelta(days=1))
    if pace not in ("auto", "count", "pace"):
        raise InputError(f"pace must be auto, count or pace, not {pace!r}")
    hours = None
    if pace != "count":
        prev_days = [d - timedelta(days=1) for d in dates]
        windows = day_windows(corpus, prev_days, tz)
        observed = {w for w in windows.values() if w > 0}
        if pace == "pace" or len(observed) > 1:
            hours = windows
    return build_matrix(analyses, election, protests, dates, regions, lead_threshold, hours)


def pearson(x, y) -> float:
    """Pearson coefficient; 0 when either vector is constant."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise InputError(f"pearson needs equal-length vectors, got {x.shape} and {y.shape}")
    if len(x) < 2:
        raise InputError("pearson needs at least 2 points")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        return 0.0
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def correlation_matrix(X: np.ndarray) -> np.ndarray:
    k = X.shape[1]
    C = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            C[i, j] = C[j, i] = pearson(X[:, i], X[:, j])
    return C


def prune_correlated(
    X: np.ndarray,
    names: Sequence[str],
    significance: Mapping[str, int],
    corr_threshold: float = DEFAULT_CORR_THRESHOLD,
) -> list[str]:
    """Drop the less significant member of every pair with |r| > threshold.

    ``significance`` maps feature name to rank (1 = most significant); unranked
    features count as least significant, ties fall back to column order.
    """
    order = {n: (significance.get(n, math.inf), i) for i, n in enumerate(names)}
    C = correlation_matrix(X)
    dropped = set()
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            if abs(C[i, j]) > corr_threshold:
                worse = max(names[i], names[j], key=order.__getitem__)
                dropped.add(worse)
    return [n for n in names if n not in dropped]


def write_features(m: FeatureMatrix, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "state", *FEATURES, "label"])
        for d, r, x, lab in zip(m.row_dates, m.row_regions, m.X, m.y):
            cells = [
                str(int(v)) if name in INT_COLUMNS else f"{v:.6f}"
                for name, v in zip(FEATURES, x)
            ]
            w.writerow([d.isoformat(), r, *cells, int(lab)])


def read_features(path: str | Path) -> FeatureMatrix:
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            if header != ["date", "state", *FEATURES, "label"]:
                raise InputError(f"{path}: unexpected header {header}")
            rows = list(reader)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise InputError(f"{path}: no rows")
    try:
        keys = [(date.fromisoformat(r["date"]), r["state"]) for r in rows]
        X = np.array([[float(r[f]) for f in FEATURES] for r in rows])
        y = np.array([int(r["label"]) for r in rows])
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    dates = tuple(sorted({k[0] for k in keys}))
    regions = tuple(dict.fromkeys(k[1] for k in keys))
    expected = [(d, r) for d in dates for r in regions]
    if keys != expected:
        raise InputError(f"{path}: rows are not a dense (date, state) grid in canonical order")
    if not np.all(np.isfinite(X)):
        raise InputError(f"{path}: non-finite feature values")
    return FeatureMatrix(dates, regions, X, y)


def parse_mask(text: str | Sequence[str] | None) -> tuple[str, ...]:
    """Feature subset from ``"f1,f3"``, ``"1,3"``, a 7-char bit string, or ``"all"``/``"tweet"``."""
    if text is None:
        return FEATURES
    if not isinstance(text, str):
        text = ",".join(text)
    s = text.strip().lower()
    if s in ("", "all"):
        return FEATURES
    if s in ("tweet", "tweets"):
        return TWEET_FEATURES
    if len(s) == len(FEATURES) and set(s) <= {"0", "1"}:
        chosen = {f for f, bit in zip(FEATURES, s) if bit == "1"}
    else:
        chosen = set()
        for part in s.replace(" ", "").split(","):
            name = part if part.startswith("f") else f"f{part}"
            if name not in FEATURES:
                raise InputError(f"unknown feature {part!r}; expected f1..f7")
            chosen.add(name)
    if not chosen:
        raise InputError(f"feature mask {text!r} selects nothing")
    return tuple(f for f in FEATURES if f in chosen)


def mask_indices(mask: Sequence[str]) -> list[int]:
    return [FEATURES.index(f) for f in mask]
