from datetime import date, datetime, timedelta, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from unrest.corpus import TweetRecord
from unrest.textfeat import (
    Gazetteer,
    MentionHit,
    MentionSource,
    SentimentScore,
    TokenizedTweet,
    analyze,
    extract_mentions,
    load_gazetteer,
    load_resources,
    next_weekday,
    resolve_dates,
    sentiment,
    tokenize,
    violent_word_count,
)

GAZ = load_gazetteer()


def tweet(text, day=date(2016, 11, 12), region="NY", hour=15):
    ts = datetime(day.year, day.month, day.day, hour, tzinfo=timezone.utc)
    return TweetRecord("1", ts, region, text, False)


@pytest.mark.parametrize("text,expected", [
    ("", ()),
    ("Protest NOW #NotMyPresident", ("protest", "now", "#notmypresident")),
    ("rally, RALLY!", ("rally", "rally")),
])
def test_tokenize(text, expected):
    tt = tokenize(text)
    assert tt.tokens == expected
    assert set(tt.hashtags) <= set(tt.tokens)


# the three worked mention examples
def test_relative_word_uses_geo():
    hits = extract_mentions(tweet("Protest in my city planned for tomorrow evening #NotMyPresident"), GAZ)
    assert hits == [MentionHit(date(2016, 11, 13), "NY", MentionSource.RELATIVE_WORD)]


def test_weekday_and_named_city():
    t = tweet("Anti-Trump rally planned for Downtown Indianapolis on Saturday", day=date(2016, 11, 10))
    assert date(2016, 11, 10).weekday() == 3  # Thursday
    assert extract_mentions(t, GAZ) == [MentionHit(date(2016, 11, 12), "IN", MentionSource.WEEKDAY)]


def test_hashtag_city_and_explicit_date():
    t = tweet("#LosAngeles high schools will be walking out November 14th 9:15AM", region="NV")
    assert extract_mentions(t, GAZ) == [MentionHit(date(2016, 11, 14), "CA", MentionSource.EXPLICIT_DATE)]


def test_no_place_no_geo_is_empty():
    assert extract_mentions(tweet("march tomorrow", region=None), GAZ) == []


def test_horizon_drops_far_dates():
    t = tweet("big march on December 25")
    assert extract_mentions(t, GAZ, horizon_days=7) == []
    assert len(extract_mentions(t, GAZ, horizon_days=60)) == 1


def test_ambiguous_place_resolves_by_geo():
    gaz = Gazetteer.from_pairs([("portland", "OR"), ("portland", "ME")])
    assert [h.target_region for h in extract_mentions(tweet("Portland march tomorrow", region="ME"), gaz)] == ["ME"]
    assert extract_mentions(tweet("Portland march tomorrow", region="TX"), gaz) == []


def test_multiple_dates_and_places_cross():
    gaz = Gazetteer.from_pairs([("boston", "MA"), ("chicago", "IL")])
    hits = extract_mentions(tweet("Boston and Chicago marches tomorrow and Saturday"), gaz)
    assert {(h.target_date, h.target_region) for h in hits} == {
        (date(2016, 11, 13), "MA"), (date(2016, 11, 13), "IL"),
        (date(2016, 11, 19), "MA"), (date(2016, 11, 19), "IL"),
    }


def test_today_and_tonight_are_tweet_date():
    ref = date(2016, 11, 12)
    assert resolve_dates("rally tonight", ref) == [(ref, MentionSource.RELATIVE_WORD)]
    assert resolve_dates("rally today", ref) == [(ref, MentionSource.RELATIVE_WORD)]


def test_past_explicit_date_rolls_to_next_year():
    assert resolve_dates("remember 11/1", date(2016, 11, 12)) == [(date(2017, 11, 1), MentionSource.EXPLICIT_DATE)]
    assert resolve_dates("on 11/1/2016", date(2016, 11, 12)) == []


def test_multiword_place_longest_first():
    gaz = Gazetteer.from_pairs([("kansas city", "MO"), ("kansas", "KS")])
    assert gaz.find(tokenize("kansas city tonight").tokens) == [frozenset({"MO"})]


@pytest.mark.parametrize("lex,text,expected", [
    ({"riot", "burn"}, "calm streets", 0),
    ({"riot", "burn"}, "peaceful riot riot", 2),
    (set(), "riot riot burn", 0),
    ({"riot", "burn"}, "riots burning", 2),
])
def test_violent_word_count(lex, text, expected):
    assert violent_word_count(tokenize(text), lex) == expected


def test_sentiment_examples():
    lex = {"bad": -0.8, "love": 0.6}
    assert sentiment(tokenize("nothing here"), lex) == SentimentScore(0.0, False)
    s = sentiment(tokenize("bad bad love"), lex)
    assert s.polarity == pytest.approx(-1 / 3, abs=1e-12) and s.is_negative
    assert sentiment(tokenize("love love"), lex) == SentimentScore(0.6, False)


def test_analyze_requires_region():
    from unrest.errors import InputError

    with pytest.raises(InputError):
        analyze(tweet("x", region=None), load_resources())


def test_bundled_resources_load():
    res = load_resources()
    assert "riot" in res.violent
    assert all(-1 <= v <= 1 for v in res.sentiment.values())
    assert GAZ.places["springfield"] >= {"IL", "MA"}


# --- properties -------------------------------------------------------------

_days = st.dates(min_value=date(2000, 1, 1), max_value=date(2099, 12, 1))


@given(_days, st.integers(0, 6))
def test_weekday_resolution_window(d, wd):
    r = next_weekday(d, wd)
    assert d < r <= d + timedelta(days=7)
    assert r.weekday() == wd


_phrases = st.sampled_from([
    "tomorrow", "tonight", "today", "monday", "friday", "saturday", "november 14th", "11/20",
    "3rd of december", "1/1/2017", "march", "rally", "in boston", "#losangeles", "seattle",
])


@given(st.lists(_phrases, max_size=6).map(" ".join), _days, st.sampled_from([None, "NY", "WA"]))
def test_mentions_never_precede_tweet(text, d, region):
    t = TweetRecord("x", datetime(d.year, d.month, d.day, tzinfo=timezone.utc), region, text, False)
    for h in extract_mentions(t, GAZ, horizon_days=400):
        if h.source is MentionSource.RELATIVE_WORD:
            assert h.target_date >= d
        else:
            assert h.target_date > d


_words = st.sampled_from(["riot", "riots", "burn", "fire", "calm", "smash", "love", "bad", "hate"])


@given(st.lists(_words, max_size=12), st.sets(_words), st.sets(_words))
def test_violent_count_monotone_in_lexicon(words, a, b):
    t = TokenizedTweet(tuple(words))
    assert violent_word_count(t, a | b) >= max(violent_word_count(t, a), violent_word_count(t, b))


@given(st.lists(_words, max_size=12), st.randoms())
def test_sentiment_permutation_invariant(words, rnd):
    lex = {"love": 0.6, "bad": -0.8, "hate": -0.9, "calm": 0.3, "fire": -0.1}
    shuffled = list(words)
    rnd.shuffle(shuffled)
    a = sentiment(TokenizedTweet(tuple(words)), lex)
    b = sentiment(TokenizedTweet(tuple(shuffled)), lex)
    assert a == b
    assert a.is_negative == (a.polarity < 0)
    assert -1 <= a.polarity <= 1
