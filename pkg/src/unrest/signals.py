"""Early-warning scan: keyword counts in tumbling windows, then hashtag ranking."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Sequence

from unrest.corpus import Corpus, TweetRecord, format_timestamp
from unrest.errors import InputError
from unrest.textfeat import tokenize

DEFAULT_KEYWORDS = frozenset({"protest", "protests", "rally", "march", "demonstration", "walkout"})
_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class SignalTrigger:
    window_start: datetime
    window_end: datetime
    keyword_count: int
    threshold: int

    @property
    def fired(self) -> bool:
        return self.keyword_count >= self.threshold


@dataclass(frozen=True)
class HashtagRanking:
    entries: tuple[tuple[str, int, float], ...]  # (hashtag, count, share)


def has_keyword(record: TweetRecord, keywords: frozenset[str]) -> bool:
    return any(t.lstrip("#") in keywords for t in tokenize(record.text).tokens)


def scan_signals(
    corpus: Corpus | Iterable[TweetRecord],
    keywords: Iterable[str] = DEFAULT_KEYWORDS,
    window: timedelta = timedelta(hours=1),
    threshold: int = 10,
) -> list[SignalTrigger]:
    """Keyword-bearing tweet counts per tumbling window.

    Windows are aligned to multiples of ``window`` since the Unix epoch and
    span the corpus from its first to its last record, empty ones included.
    """
    kw = frozenset(k.lower().lstrip("#") for k in keywords)
    if not kw:
        raise InputError("keyword set is empty")
    if window <= timedelta(0):
        raise InputError("window must be positive")
    records = list(corpus)
    if not records:
        return []
    width = window.total_seconds()

    def bucket(ts: datetime) -> int:
        return int((ts - _EPOCH).total_seconds() // width)

    counts: Counter = Counter(bucket(r.created_at) for r in records if has_keyword(r, kw))
    lo = min(bucket(r.created_at) for r in records)
    hi = max(bucket(r.created_at) for r in records)
    out = []
    for b in range(lo, hi + 1):
        start = _EPOCH + timedelta(seconds=b * width)
        out.append(SignalTrigger(start, start + window, counts.get(b, 0), threshold))
    return out


def first_fired(triggers: Sequence[SignalTrigger]) -> SignalTrigger | None:
    return next((t for t in triggers if t.fired), None)


def trending_hashtags(
    corpus: Corpus | Iterable[TweetRecord],
    window: SignalTrigger,
    top_k: int = 10,
    keywords: Iterable[str] = DEFAULT_KEYWORDS,
) -> HashtagRanking:
    """Rank hashtags among keyword tweets inside ``window``.

    Each tweet counts a hashtag at most once. Shares are relative to the
    number of signal tweets, or to the total hashtag count when tweets
    carry several tags, so they never sum past 1. Ties sort lexicographically.
    """
    kw = frozenset(k.lower().lstrip("#") for k in keywords)
    counts: Counter = Counter()
    signal_tweets = 0
    for r in corpus:
        if not window.window_start <= r.created_at < window.window_end:
            continue
        toks = tokenize(r.text).tokens
        if not any(t.lstrip("#") in kw for t in toks):
            continue
        signal_tweets += 1
        counts.update({t for t in toks if t.startswith("#")})
    denom = max(signal_tweets, sum(counts.values()))
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top_k]
    return HashtagRanking(tuple((h, c, c / denom) for h, c in ranked))


def write_signals(triggers: Sequence[SignalTrigger], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["window_start", "window_end", "count", "fired"])
        for t in triggers:
            w.writerow([format_timestamp(t.window_start), format_timestamp(t.window_end),
                        t.keyword_count, int(t.fired)])


def write_hashtags(ranking: HashtagRanking, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["hashtag", "count", "share"])
        for h, c, s in ranking.entries:
            w.writerow([h, c, f"{s:.6f}"])
