"""Tweet ingestion, cleansing, and ground-truth loaders.

Input formats:

- ``tweets.jsonl``: one object per line with keys ``id``, ``created_at``,
  ``state`` (nullable), ``text``, ``is_retweet``.
- ``protests.csv``: header ``date,state``.
- ``votes.csv``: header ``state,candidate_vote_pct,max_opposition_county_lead``.
"""

from __future__ import annotations

import csv
import json
import logging
import re
from dataclasses import dataclass
from datetime import date, datetime, timezone, tzinfo
from pathlib import Path
from typing import Iterable, Sequence

from unrest import US_STATES
from unrest.errors import InputError

log = logging.getLogger(__name__)

MAX_MALFORMED_FRACTION = 0.5


@dataclass(frozen=True)
class TweetRecord:
    id: str
    created_at: datetime  # tz-aware, UTC, second precision
    region: str | None
    text: str
    is_retweet: bool = False

    def local_date(self, tz: tzinfo = timezone.utc) -> date:
        return self.created_at.astimezone(tz).date()

    def to_json(self) -> str:
        obj = {
            "id": self.id,
            "created_at": format_timestamp(self.created_at),
            "state": self.region,
            "text": self.text,
            "is_retweet": self.is_retweet,
        }
        return json.dumps(obj, ensure_ascii=False)


@dataclass(frozen=True)
class Corpus:
    records: tuple[TweetRecord, ...] = ()
    skipped: int = 0
    duplicates: int = 0

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def with_records(self, records: Iterable[TweetRecord]) -> "Corpus":
        return Corpus(tuple(records), self.skipped, self.duplicates)


@dataclass(frozen=True)
class ProtestEvent:
    date: date
    region: str


@dataclass(frozen=True)
class ElectionStats:
    region: str
    candidate_vote_pct: float
    max_opposition_county_lead: int


def parse_timestamp(value: str) -> datetime:
    """Parse ISO-8601; naive stamps are taken as UTC. Result is UTC, whole seconds."""
    if not isinstance(value, str) or not value:
        raise ValueError(f"bad timestamp {value!r}")
    s = value.strip()
    if s.endswith("Z") or s.endswith("z"):
        s = s[:-1] + "+00:00"
    dt = datetime.fromisoformat(s)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _parse_record(obj: object, region_set: frozenset[str]) -> TweetRecord:
    if not isinstance(obj, dict):
        raise ValueError("not an object")
    rid = obj.get("id")
    if isinstance(rid, int) and not isinstance(rid, bool):
        rid = str(rid)
    if not isinstance(rid, str) or not rid:
        raise ValueError("missing id")
    text = obj.get("text")
    if not isinstance(text, str):
        raise ValueError("missing text")
    region = obj.get("state")
    if region is not None:
        if not isinstance(region, str):
            raise ValueError("bad state")
        region = region.strip().upper() or None
        if region is not None and region not in region_set:
            raise ValueError(f"unknown region {region}")
    rt = obj.get("is_retweet", False)
    if not isinstance(rt, bool):
        raise ValueError("bad is_retweet")
    return TweetRecord(rid, parse_timestamp(obj.get("created_at")), region, text, rt)


def ingest(path: str | Path, region_set: Iterable[str] = US_STATES) -> Corpus:
    """Read a JSONL tweet file.

    Malformed lines are skipped and counted; repeated ids keep the first
    occurrence. More than half the non-blank lines malformed is treated as
    a wrong input format.
    """
    path = Path(path)
    regions = frozenset(region_set)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc

    records: list[TweetRecord] = []
    seen: set[str] = set()
    skipped = dups = total = 0
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        total += 1
        try:
            rec = _parse_record(json.loads(line), regions)
        except (ValueError, TypeError) as exc:
            log.debug("%s:%d skipped: %s", path, lineno, exc)
            skipped += 1
            continue
        if rec.id in seen:
            dups += 1
            continue
        seen.add(rec.id)
        records.append(rec)

    if total and skipped / total > MAX_MALFORMED_FRACTION:
        raise InputError(
            f"{path}: {skipped}/{total} lines malformed; not a tweets.jsonl file?"
        )
    if skipped or dups:
        log.info("%s: %d records, %d malformed, %d duplicate ids", path, len(records), skipped, dups)
    return Corpus(tuple(records), skipped, dups)


def write_jsonl(records: Iterable[TweetRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(rec.to_json())
            fh.write("\n")


_URL = re.compile(r"https?://\S+|www\.\S+", re.IGNORECASE)
_HASHTAG = re.compile(r"#\w+")
_WORD = re.compile(r"\w+")


@dataclass(frozen=True)
class RelevanceRule:
    """Deny-list for advertisement and other off-topic tweets.

    Campaign hashtags are stripped first. The remaining text is irrelevant
    when it is empty or URL-only, carries ``max_unrelated_hashtags`` or more
    other hashtags, or contains any spam phrase.
    """

    campaign_hashtags: frozenset[str] = frozenset(
        {"#notmypresident", "#muslimban", "#travelban"}
    )
    spam_phrases: tuple[str, ...] = (
        "buy now",
        "click here",
        "free shipping",
        "discount code",
        "limited offer",
        "follow back",
        "promo code",
    )
    max_unrelated_hashtags: int = 3

    def is_relevant(self, text: str) -> bool:
        lowered = text.lower()
        tags = [t for t in _HASHTAG.findall(lowered) if t not in self.campaign_hashtags]
        if len(tags) >= self.max_unrelated_hashtags:
            return False
        body = _HASHTAG.sub(" ", lowered)
        if not _WORD.search(_URL.sub(" ", body)):
            return False
        squashed = " ".join(_WORD.findall(body))
        return not any(p in squashed for p in self.spam_phrases)


def cleanse(corpus: Corpus, rule: RelevanceRule | None = None) -> Corpus:
    """Keep geo-tagged, relevant records. Retweets stay as independent records."""
    rule = rule or RelevanceRule()
    kept = [r for r in corpus if r.region is not None and rule.is_relevant(r.text)]
    return corpus.with_records(kept)


def _read_csv(path: Path, columns: Sequence[str]) -> list[dict[str, str]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            missing = set(columns) - set(reader.fieldnames or ())
            if missing:
                raise InputError(f"{path}: missing columns {sorted(missing)}")
            return list(reader)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def load_ground_truth(path: str | Path) -> frozenset[ProtestEvent]:
    path = Path(path)
    events: set[ProtestEvent] = set()
    for i, row in enumerate(_read_csv(path, ("date", "state")), 2):
        try:
            ev = ProtestEvent(date.fromisoformat(row["date"].strip()), row["state"].strip().upper())
        except ValueError as exc:
            raise InputError(f"{path}:{i}: {exc}") from exc
        if ev in events:
            raise InputError(f"{path}:{i}: duplicate event {ev.date} {ev.region}")
        events.add(ev)
    return frozenset(events)


def load_election(path: str | Path, regions: Iterable[str] | None = US_STATES) -> dict[str, ElectionStats]:
    """Per-region vote stats; every region in ``regions`` must have a row.

    With ``regions=None`` the file defines the region set, restricted to
    known state codes and returned in canonical order.
    """
    path = Path(path)
    out: dict[str, ElectionStats] = {}
    for i, row in enumerate(
        _read_csv(path, ("state", "candidate_vote_pct", "max_opposition_county_lead")), 2
    ):
        region = row["state"].strip().upper()
        try:
            pct = float(row["candidate_vote_pct"])
            lead = int(float(row["max_opposition_county_lead"]))
        except ValueError as exc:
            raise InputError(f"{path}:{i}: {exc}") from exc
        if not 0.0 <= pct <= 1.0:
            raise InputError(f"{path}:{i}: vote pct {pct} outside [0, 1]")
        if lead < 0:
            raise InputError(f"{path}:{i}: negative county lead {lead}")
        if region in out:
            raise InputError(f"{path}:{i}: duplicate region {region}")
        out[region] = ElectionStats(region, pct, lead)
    if regions is None:
        unknown = sorted(set(out) - set(US_STATES))
        if unknown:
            raise InputError(f"{path}: unknown region(s) {', '.join(unknown)}")
        if not out:
            raise InputError(f"{path}: no election rows")
        return {r: out[r] for r in US_STATES if r in out}
    missing = [r for r in regions if r not in out]
    if missing:
        raise InputError(f"{path}: no election row for {', '.join(missing)}")
    return out


def write_ground_truth(events: Iterable[ProtestEvent], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "state"])
        for ev in sorted(events, key=lambda e: (e.date, e.region)):
            w.writerow([ev.date.isoformat(), ev.region])


def write_election(stats: Iterable[ElectionStats], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["state", "candidate_vote_pct", "max_opposition_county_lead"])
        for s in stats:
            w.writerow([s.region, f"{s.candidate_vote_pct:.6f}", s.max_opposition_county_lead])
