"""Seeded synthetic corpus with planted protest signal.

For every region and label day a latent mobilization level drives the
previous day's tweet volume, negativity, violent vocabulary and the number
of tweets announcing a protest for that day. Protest labels are then drawn
from a logistic model over the standardized realized quantities::

    volume      region tweets on the previous day
    mentions    tweets announcing (region, day), emitted before the day
    vote        candidate vote share
    lead        county lead-vote flag
    negativity  mean |polarity| of the previous day's negative tweets

Text is built from templates so the pipeline's extractors recover those
quantities from the raw corpus. Geo-less, spam and retweet records are
mixed in to exercise cleansing.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from datetime import date, datetime, timedelta, timezone
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from unrest import US_STATES
from unrest.corpus import ElectionStats, ProtestEvent, TweetRecord, write_election, write_ground_truth, write_jsonl
from unrest.errors import InputError
from unrest.featmat import DEFAULT_LEAD_THRESHOLD
from unrest.textfeat import load_gazetteer, load_sentiment_lexicon

WEIGHT_KEYS = ("volume", "mentions", "vote", "lead", "negativity")
_VIOLENT_WORDS = ("riot", "violence", "fight", "clash", "chaos", "vandalize", "destruction",
                  "attack", "smash", "threat", "mayhem", "brawl", "damage")
_WEEKDAY_NAMES = ("Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday")


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    regions: int = 50
    days: int = 7
    start_date: str = "2016-11-09"  # first tweet day; label days start one day later
    base_daily_tweets: int = 100
    protest_logit_weights: dict[str, float] = field(default_factory=lambda: {
        "volume": 1.5, "mentions": 2.5, "vote": -1.5, "lead": 0.8, "negativity": 0.8})
    protest_bias: float = -2.5
    mention_rate: float = 0.05
    negative_rate: float = 0.35
    violent_rate: float = 0.1
    vote_pcts: tuple[float, ...] | None = None
    lead_flags: tuple[int, ...] | None = None
    lead_threshold: int = DEFAULT_LEAD_THRESHOLD
    geo_missing_rate: float = 0.05
    spam_rate: float = 0.02
    retweet_rate: float = 0.3
    mobilization_sd: float = 1.0
    horizon_days: int = 7

    def __post_init__(self):
        for name in ("mention_rate", "negative_rate", "violent_rate", "geo_missing_rate",
                     "spam_rate", "retweet_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InputError(f"{name}={v} outside [0, 1]")
        if not 1 <= self.regions <= len(US_STATES):
            raise InputError(f"regions must be in 1..{len(US_STATES)}")
        if self.days < 2:
            raise InputError("days must be >= 2")
        if self.base_daily_tweets < 0:
            raise InputError("base_daily_tweets must be >= 0")
        unknown = set(self.protest_logit_weights) - set(WEIGHT_KEYS)
        if unknown:
            raise InputError(f"unknown protest weight(s) {sorted(unknown)}")
        for name, n in (("vote_pcts", self.vote_pcts), ("lead_flags", self.lead_flags)):
            if n is not None and len(n) != self.regions:
                raise InputError(f"{name} needs one value per region")
        if self.vote_pcts is not None and not all(0 <= v <= 1 for v in self.vote_pcts):
            raise InputError("vote_pcts must lie in [0, 1]")
        try:
            date.fromisoformat(self.start_date)
        except ValueError as exc:
            raise InputError(f"start_date: {exc}") from exc

    @property
    def region_codes(self) -> tuple[str, ...]:
        return US_STATES[: self.regions]

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        for k in ("vote_pcts", "lead_flags"):
            if d[k] is not None:
                d[k] = list(d[k])
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "GenConfig":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise InputError(f"unknown config keys {sorted(extra)}")
        d = dict(d)
        for k in ("vote_pcts", "lead_flags"):
            if d.get(k) is not None:
                d[k] = tuple(d[k])
        return cls(**d)

    @classmethod
    def load(cls, path: str | Path) -> "GenConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read generator config {path}: {exc}") from exc
        if "preset" in raw:
            base = preset(raw.pop("preset")).to_dict()
            base.update(raw)
            raw = base
        return cls.from_dict(raw)


def preset(name: str, **overrides) -> GenConfig:
    """Named configurations: ``desk`` (strong signal), ``vote``, ``null``, ``event_b``."""
    if name == "desk":
        cfg = GenConfig()
    elif name == "vote":
        cfg = GenConfig(protest_logit_weights={
            "volume": 0.8, "mentions": 0.8, "vote": -2.0, "lead": 0.3, "negativity": 0.3})
    elif name == "null":
        cfg = GenConfig(protest_logit_weights={k: 0.0 for k in WEIGHT_KEYS}, protest_bias=-1.5)
    elif name == "event_b":
        cfg = GenConfig(start_date="2017-01-27", days=3)
    else:
        raise InputError(f"unknown preset {name!r}")
    if overrides:
        d = cfg.to_dict()
        d.update(overrides)
        cfg = GenConfig.from_dict(d)
    return cfg


@dataclass
class Synthetic:
    tweets: list[TweetRecord]
    protests: frozenset[ProtestEvent]
    election: dict[str, ElectionStats]
    latent: dict[str, np.ndarray]  # realized generator-side quantities, (regions, days)
    protest_prob: np.ndarray

    def write(self, out_dir: str | Path) -> dict[str, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {"tweets": out / "tweets.jsonl", "protests": out / "protests.csv", "votes": out / "votes.csv"}
        write_jsonl(self.tweets, paths["tweets"])
        write_ground_truth(self.protests, paths["protests"])
        write_election(self.election.values(), paths["votes"])
        return paths


def _templates() -> dict[str, list[str]]:
    path = resources.files("unrest") / "data" / "templates.json"
    return json.loads(path.read_text(encoding="utf-8"))


def _ordinal(n: int) -> str:
    suffix = "th" if 10 <= n % 100 <= 20 else {1: "st", 2: "nd", 3: "rd"}.get(n % 10, "th")
    return f"{n}{suffix}"


def _when_phrase(tweet_day: date, target: date, rng) -> str:
    gap = (target - tweet_day).days
    if gap == 1:
        return "tomorrow"
    if gap <= 7 and rng.random() < 0.6:
        return f"this {_WEEKDAY_NAMES[target.weekday()]}"
    return f"{target.strftime('%B')} {_ordinal(target.day)}"


def _standardize(v: np.ndarray) -> np.ndarray:
    sd = v.std()
    return (v - v.mean()) / sd if sd > 1e-12 else np.zeros_like(v)


def generate(config: GenConfig) -> Synthetic:
    """Draw one synthetic event; identical configs give identical output."""
    cfg = config
    rng = np.random.default_rng(cfg.seed)
    tpl = _templates()
    sent = load_sentiment_lexicon()
    neg_strong = sorted(w for w, p in sent.items() if p <= -0.7)
    neg_mild = sorted(w for w, p in sent.items() if -0.7 < p < 0)
    pos_words = sorted(w for w, p in sent.items() if p > 0)
    gaz = load_gazetteer()
    cities: dict[str, list[str]] = {}
    for place, regs in sorted(gaz.places.items()):
        if len(regs) == 1:
            cities.setdefault(next(iter(regs)), []).append(place.title())

    regions = cfg.region_codes
    R, D = len(regions), cfg.days
    start = date.fromisoformat(cfg.start_date)
    tweet_days = [start + timedelta(days=j) for j in range(D)]
    label_days = [d + timedelta(days=1) for d in tweet_days]

    vote = np.asarray(cfg.vote_pcts) if cfg.vote_pcts is not None else rng.uniform(0.25, 0.72, R)
    lead = (np.asarray(cfg.lead_flags, dtype=int) if cfg.lead_flags is not None
            else (rng.random(R) < 0.35).astype(int))
    lead_votes = np.where(lead == 1,
                          rng.integers(cfg.lead_threshold, 4 * cfg.lead_threshold + 1, R),
                          rng.integers(0, max(cfg.lead_threshold, 1), R))
    pop = np.exp(rng.normal(0.0, 0.6, R))
    pop /= pop.mean()
    profile = 1.0 + 0.4 * np.exp(-0.5 * np.arange(D))  # early surge, then decay

    # latent mobilization for (region, label day k); tweet day k feeds label day k
    region_level = rng.normal(0.0, 0.6, R)
    u = cfg.mobilization_sd * (region_level[:, None] + 0.8 * rng.normal(0.0, 1.0, (R, D)))

    raw: list[tuple[date, str | None, str, bool]] = []  # (day, region, text, retweet)
    volume = np.zeros((R, D))
    negativity = np.zeros((R, D))
    mentions = np.zeros((R, D))

    def decorate(text: str) -> tuple[str, bool]:
        if rng.random() < cfg.retweet_rate:
            return f"RT @user{int(rng.integers(1, 10_000))}: {text}", True
        return text, False

    def ordinary(ri: int, j: int, q: float, strength: float, vrate: float) -> tuple[str, float | None]:
        parts = [str(rng.choice(tpl["opener"]))]
        pol = None
        r = rng.random()
        if r < q:
            pool = neg_strong if rng.random() < strength else neg_mild
            t = str(rng.choice(tpl["negative"]))
            words = [str(rng.choice(pool)) for _ in range(t.count("{neg}"))]
            for w in words:
                t = t.replace("{neg}", w, 1)
            parts.append(t)
            pol = sum(sorted(sent[w] for w in words)) / len(words)
        elif r < q + 0.3 * (1 - q):
            parts.append(str(rng.choice(tpl["positive"])).replace("{pos}", str(rng.choice(pos_words))))
        if rng.random() < vrate:
            parts.append(str(rng.choice(tpl["violent"])).replace("{v}", str(rng.choice(_VIOLENT_WORDS))))
        tags = str(rng.choice(tpl["tags"]))
        text = ", ".join(parts)
        return (f"{text} {tags}".strip(), pol)

    for ri, region in enumerate(regions):
        for j, day in enumerate(tweet_days):
            lvl = u[ri, j]
            n = int(rng.poisson(cfg.base_daily_tweets * pop[ri] * profile[j] * math.exp(0.5 * lvl)))
            q = min(0.95, cfg.negative_rate * math.exp(0.3 * lvl))
            strength = 1.0 / (1.0 + math.exp(-1.2 * lvl))
            vrate = min(1.0, cfg.violent_rate * math.exp(0.4 * lvl))
            neg_pols = []
            for _ in range(n):
                text, pol = ordinary(ri, j, q, strength, vrate)
                if pol is not None and pol < 0:
                    neg_pols.append(-pol)
                text, rt = decorate(text)
                raw.append((day, region, text, rt))
            volume[ri, j] += n
            negativity[ri, j] = float(np.mean(neg_pols)) if neg_pols else 0.0

        for k, target in enumerate(label_days):
            m = int(rng.poisson(cfg.mention_rate * cfg.base_daily_tweets * pop[ri] * math.exp(0.9 * u[ri, k])))
            earliest = max(0, k + 1 - cfg.horizon_days)
            for _ in range(m):
                e = k if (k == earliest or rng.random() < 0.6) else int(rng.integers(earliest, k))
                when = _when_phrase(tweet_days[e], target, rng)
                at_place = ""
                if region in cities and rng.random() < 0.5:
                    at_place = f" in {rng.choice(cities[region])}"
                text = str(rng.choice(tpl["call"])).format(when=when, at_place=at_place)
                text, rt = decorate(text)
                raw.append((tweet_days[e], region, text, rt))
                volume[ri, e] += 1
            mentions[ri, k] = m

    # noise records removed by cleansing; they carry no signal
    n_real = len(raw)
    for _ in range(int(rng.binomial(n_real, cfg.geo_missing_rate))):
        day = tweet_days[int(rng.integers(0, D))]
        text, _ = ordinary(0, 0, cfg.negative_rate, 0.5, cfg.violent_rate)
        raw.append((day, None, text, False))
    for _ in range(int(rng.binomial(n_real, cfg.spam_rate))):
        day = tweet_days[int(rng.integers(0, D))]
        raw.append((day, regions[int(rng.integers(0, R))], str(rng.choice(tpl["spam"])), False))

    latent = {
        "volume": volume,
        "mentions": mentions,
        "vote": np.repeat(vote[:, None], D, axis=1),
        "lead": np.repeat(lead[:, None].astype(float), D, axis=1),
        "negativity": negativity,
    }
    eta = np.full((R, D), cfg.protest_bias)
    for key in WEIGHT_KEYS:
        w = cfg.protest_logit_weights.get(key, 0.0)
        if w:
            eta += w * _standardize(latent[key])
    prob = 1.0 / (1.0 + np.exp(-eta))
    hits = rng.random((R, D)) < prob
    protests = frozenset(
        ProtestEvent(label_days[k], regions[ri]) for ri in range(R) for k in range(D) if hits[ri, k]
    )

    seconds = rng.integers(0, 86_400, len(raw))
    stamped = []
    for (day, region, text, rt), s in zip(raw, seconds):
        ts = datetime(day.year, day.month, day.day, tzinfo=timezone.utc) + timedelta(seconds=int(s))
        stamped.append((ts, region, text, rt))
    order = sorted(range(len(stamped)), key=lambda i: (stamped[i][0], i))
    tweets = [
        TweetRecord(f"t{n:07d}", stamped[i][0], stamped[i][1], stamped[i][2], stamped[i][3])
        for n, i in enumerate(order, 1)
    ]
    election = {
        r: ElectionStats(r, round(float(vote[i]), 6), int(lead_votes[i])) for i, r in enumerate(regions)
    }
    return Synthetic(tweets, protests, election, latent, prob)


def planted_matrix(
    n_rows: int = 350,
    n_noise: int = 6,
    separation: float = 2.0,
    positive_rate: float = 0.3,
    seed: int = 0,
    signal_column: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """A labelled matrix with one informative column among pure noise.

    The informative column is N(separation * y, 1); the others are N(0, 1)
    and independent of the label.
    """
    if n_rows < 2 or n_noise < 0 or not 0 < positive_rate < 1:
        raise InputError("planted_matrix needs n_rows >= 2, n_noise >= 0, 0 < positive_rate < 1")
    if not 0 <= signal_column <= n_noise:
        raise InputError(f"signal_column must lie in [0, {n_noise}]")
    rng = np.random.default_rng(seed)
    y = (rng.random(n_rows) < positive_rate).astype(int)
    X = rng.standard_normal((n_rows, n_noise + 1))
    X[:, signal_column] += separation * y
    return X, y
