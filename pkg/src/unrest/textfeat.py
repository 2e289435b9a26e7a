"""Per-tweet text analysis: tokens, date/place mentions, violent words, sentiment."""

from __future__ import annotations

import csv
import re
from collections import defaultdict
from dataclasses import dataclass
from datetime import date, timedelta, timezone, tzinfo
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from unrest.corpus import TweetRecord
from unrest.errors import InputError

DEFAULT_HORIZON_DAYS = 7

_TOKEN = re.compile(r"#?\w+(?:'\w+)*")


@dataclass(frozen=True)
class TokenizedTweet:
    tokens: tuple[str, ...]

    @property
    def hashtags(self) -> tuple[str, ...]:
        return tuple(t for t in self.tokens if t.startswith("#"))


def tokenize(text: str) -> TokenizedTweet:
    """Lowercase word tokens; '#'-prefixed tokens are kept whole."""
    return TokenizedTweet(tuple(_TOKEN.findall(text.lower())))


class MentionSource(str, Enum):
    EXPLICIT_DATE = "explicit_date"
    WEEKDAY = "weekday"
    RELATIVE_WORD = "relative_word"
    TWEET_GEO = "tweet_geo"


@dataclass(frozen=True)
class MentionHit:
    target_date: date
    target_region: str
    source: MentionSource


@dataclass(frozen=True)
class SentimentScore:
    polarity: float
    is_negative: bool


@dataclass(frozen=True)
class Gazetteer:
    """Place names (normalized, space-joined tokens) to candidate regions."""

    places: Mapping[str, frozenset[str]]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]]) -> "Gazetteer":
        acc: dict[str, set[str]] = defaultdict(set)
        for place, region in pairs:
            key = " ".join(_TOKEN.findall(place.lower().replace("#", "")))
            if key:
                acc[key].add(region.strip().upper())
        return cls({k: frozenset(v) for k, v in acc.items()})

    def __post_init__(self):
        squashed: dict[str, frozenset[str]] = {}
        for k, v in self.places.items():
            s = k.replace(" ", "")
            squashed[s] = squashed.get(s, frozenset()) | v
        object.__setattr__(self, "_squashed", squashed)
        object.__setattr__(
            self, "_max_len", max((k.count(" ") + 1 for k in self.places), default=0)
        )

    def find(self, tokens: tuple[str, ...]) -> list[frozenset[str]]:
        """Greedy longest-first scan; each hit is the candidate region set."""
        hits = []
        i, n = 0, len(tokens)
        while i < n:
            tok = tokens[i]
            if tok.startswith("#"):
                regions = self._squashed.get(tok[1:])
                if regions:
                    hits.append(regions)
                i += 1
                continue
            for span in range(min(self._max_len, n - i), 0, -1):
                regions = self.places.get(" ".join(tokens[i : i + span]))
                if regions:
                    hits.append(regions)
                    i += span
                    break
            else:
                i += 1
        return hits


@dataclass(frozen=True)
class Resources:
    violent: frozenset[str]
    sentiment: Mapping[str, float]
    gazetteer: Gazetteer


def _data_path(name: str) -> Path:
    return Path(str(resources.files("unrest") / "data" / name))


def load_violent_lexicon(path: str | Path | None = None) -> frozenset[str]:
    path = Path(path) if path else _data_path("violent_lexicon.txt")
    words = (ln.strip().lower() for ln in path.read_text(encoding="utf-8").splitlines())
    return frozenset(w for w in words if w and not w.startswith("#"))


def load_sentiment_lexicon(path: str | Path | None = None) -> dict[str, float]:
    path = Path(path) if path else _data_path("sentiment_lexicon.csv")
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            pol = float(row["polarity"])
            if not -1.0 <= pol <= 1.0:
                raise InputError(f"{path}: polarity {pol} for {row['term']!r} outside [-1, 1]")
            out[row["term"].strip().lower()] = pol
    return out


def load_gazetteer(path: str | Path | None = None) -> Gazetteer:
    path = Path(path) if path else _data_path("gazetteer.csv")
    with open(path, newline="", encoding="utf-8") as fh:
        return Gazetteer.from_pairs((r["place"], r["state"]) for r in csv.DictReader(fh))


def load_resources(violent=None, sentiment=None, gazetteer=None) -> Resources:
    """Load lexicons and gazetteer; ``None`` means the bundled default."""
    return Resources(
        load_violent_lexicon(violent),
        load_sentiment_lexicon(sentiment),
        load_gazetteer(gazetteer),
    )


# --- mention extraction -----------------------------------------------------

_MONTHS = {
    "january": 1, "jan": 1, "february": 2, "feb": 2, "march": 3, "mar": 3,
    "april": 4, "apr": 4, "may": 5, "june": 6, "jun": 6, "july": 7, "jul": 7,
    "august": 8, "aug": 8, "september": 9, "sep": 9, "sept": 9, "october": 10,
    "oct": 10, "november": 11, "nov": 11, "december": 12, "dec": 12,
}
_WEEKDAYS = {
    "monday": 0, "tuesday": 1, "wednesday": 2, "thursday": 3,
    "friday": 4, "saturday": 5, "sunday": 6,
}
_MONTH_ALT = "|".join(sorted(_MONTHS, key=len, reverse=True))
_SUFFIX = r"(?:st|nd|rd|th)?"
# "november 14th", "nov. 14", "14th of november", "11/14"
_MONTH_DAY = re.compile(rf"\b({_MONTH_ALT})\.?\s+(\d{{1,2}}){_SUFFIX}\b(?!:)")
_DAY_MONTH = re.compile(rf"\b(\d{{1,2}}){_SUFFIX}\s+(?:of\s+)?({_MONTH_ALT})\b")
_NUMERIC = re.compile(r"(?<![\d/])(\d{1,2})/(\d{1,2})(?:/(\d{2}|\d{4}))?(?![\d/])")
_WEEKDAY = re.compile(r"\b(" + "|".join(_WEEKDAYS) + r")\b")
_RELATIVE = re.compile(r"\b(tomorrow|tonight|today)\b")


def next_weekday(d: date, weekday: int) -> date:
    """The first date strictly after ``d`` falling on ``weekday`` (Mon=0)."""
    ahead = (weekday - d.weekday() - 1) % 7 + 1
    return d + timedelta(days=ahead)


def _calendar_date(year: int, month: int, day: int) -> date | None:
    try:
        return date(year, month, day)
    except ValueError:
        return None


def _explicit(month: int, day: int, year: int | None, ref: date) -> date | None:
    if year is not None:
        return _calendar_date(year if year >= 100 else 2000 + year, month, day)
    d = _calendar_date(ref.year, month, day)
    if d is not None and d <= ref:
        d = _calendar_date(ref.year + 1, month, day)
    return d


def resolve_dates(text: str, ref: date) -> list[tuple[date, MentionSource]]:
    """All date expressions in ``text`` resolved against tweet date ``ref``.

    Explicit and weekday dates must fall strictly after ``ref``; "today" and
    "tonight" resolve to ``ref`` itself.
    """
    low = text.lower()
    found: list[tuple[date, MentionSource]] = []
    for m in _MONTH_DAY.finditer(low):
        found.append((_explicit(_MONTHS[m.group(1)], int(m.group(2)), None, ref), MentionSource.EXPLICIT_DATE))
    for m in _DAY_MONTH.finditer(low):
        found.append((_explicit(_MONTHS[m.group(2)], int(m.group(1)), None, ref), MentionSource.EXPLICIT_DATE))
    for m in _NUMERIC.finditer(low):
        year = int(m.group(3)) if m.group(3) else None
        found.append((_explicit(int(m.group(1)), int(m.group(2)), year, ref), MentionSource.EXPLICIT_DATE))
    for m in _WEEKDAY.finditer(low):
        found.append((next_weekday(ref, _WEEKDAYS[m.group(1)]), MentionSource.WEEKDAY))
    for m in _RELATIVE.finditer(low):
        offset = 1 if m.group(1) == "tomorrow" else 0
        found.append((ref + timedelta(days=offset), MentionSource.RELATIVE_WORD))

    out, seen = [], set()
    for d, src in found:
        if d is None or d in seen:
            continue
        if d <= ref and src is not MentionSource.RELATIVE_WORD:
            continue
        seen.add(d)
        out.append((d, src))
    return out


def extract_mentions(
    tweet: TweetRecord,
    gazetteer: Gazetteer,
    horizon_days: int = DEFAULT_HORIZON_DAYS,
    tz: tzinfo = timezone.utc,
    tokens: TokenizedTweet | None = None,
) -> list[MentionHit]:
    """Future (date, region) pairs announced in a tweet.

    Place comes from the gazetteer when the text names one, otherwise from
    the tweet's own geo tag. An ambiguous place name resolves to the geo
    region when that is one of its candidates and is dropped otherwise.
    Emits one hit per distinct (date, region) pair within the horizon.
    """
    ref = tweet.local_date(tz)
    dates = [
        (d, src) for d, src in resolve_dates(tweet.text, ref)
        if (d - ref).days <= horizon_days
    ]
    if not dates:
        return []
    toks = tokens if tokens is not None else tokenize(tweet.text)
    regions: list[str] = []
    named = gazetteer.find(toks.tokens)
    for cands in named:
        if len(cands) == 1:
            (r,) = cands
        elif tweet.region in cands:
            r = tweet.region
        else:
            continue
        if r not in regions:
            regions.append(r)
    if not named:
        # a named but unresolvable place is not silently replaced by geo
        if tweet.region is None:
            return []
        regions = [tweet.region]
    return [MentionHit(d, r, src) for d, src in dates for r in regions]


# --- bag-of-words scoring ---------------------------------------------------

_SUFFIXES = ("ings", "ing", "ers", "er", "ed", "es", "s")


def lemma_candidates(token: str) -> list[str]:
    """Token itself plus crude suffix-stripped forms (riots -> riot, burning -> burn)."""
    word = token.lstrip("#")
    out = [word]
    for suf in _SUFFIXES:
        if word.endswith(suf) and len(word) - len(suf) >= 3:
            stem = word[: -len(suf)]
            out.append(stem)
            if suf in ("ing", "ed", "er", "ers") and len(stem) > 3 and stem[-1] == stem[-2]:
                out.append(stem[:-1])  # doubled consonant: smashing ok, stabbing -> stab
            if suf in ("ing", "ed"):
                out.append(stem + "e")  # destroyed -> destroy (no-op), vandalized -> vandalize
    return out


def _lookup(token: str, table) -> str | None:
    for cand in lemma_candidates(token):
        if cand in table:
            return cand
    return None


def violent_word_count(tweet: TokenizedTweet, lexicon: Iterable[str]) -> int:
    lex = lexicon if isinstance(lexicon, (set, frozenset)) else frozenset(lexicon)
    if not lex:
        return 0
    return sum(1 for t in tweet.tokens if _lookup(t, lex) is not None)


def sentiment(tweet: TokenizedTweet, lexicon: Mapping[str, float]) -> SentimentScore:
    """Mean polarity over lexicon-matched tokens; neutral when nothing matches."""
    scores = []
    for t in tweet.tokens:
        hit = _lookup(t, lexicon)
        if hit is not None:
            scores.append(lexicon[hit])
    if not scores:
        return SentimentScore(0.0, False)
    pol = sum(sorted(scores)) / len(scores)
    return SentimentScore(pol, pol < 0)


@dataclass(frozen=True)
class TweetAnalysis:
    """Everything the feature matrix needs from one tweet."""

    id: str
    date: date
    region: str
    hits: tuple[MentionHit, ...]
    polarity: float
    is_negative: bool
    violent: int


def analyze(
    tweet: TweetRecord,
    res: Resources,
    horizon_days: int = DEFAULT_HORIZON_DAYS,
    tz: tzinfo = timezone.utc,
) -> TweetAnalysis:
    if tweet.region is None:
        raise InputError(f"tweet {tweet.id} has no region; cleanse the corpus first")
    toks = tokenize(tweet.text)
    s = sentiment(toks, res.sentiment)
    return TweetAnalysis(
        tweet.id,
        tweet.local_date(tz),
        tweet.region,
        tuple(extract_mentions(tweet, res.gazetteer, horizon_days, tz, toks)),
        s.polarity,
        s.is_negative,
        violent_word_count(toks, res.violent),
    )
