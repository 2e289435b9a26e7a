import json
from pathlib import Path

import pytest

from unrest import US_STATES
from unrest.corpus import Corpus, ElectionStats, cleanse, write_election


def write_lines(path: Path, lines) -> Path:
    path.write_text("".join(l + "\n" for l in lines), encoding="utf-8")
    return path


def tweet_line(id_, ts="2016-11-10T12:00:00Z", state="NY", text="protest tonight", rt=False) -> str:
    return json.dumps({"id": id_, "created_at": ts, "state": state, "text": text, "is_retweet": rt})


@pytest.fixture
def votes_csv(tmp_path):
    stats = [ElectionStats(r, 0.5, 150_000 if i % 2 else 0) for i, r in enumerate(US_STATES)]
    path = tmp_path / "votes.csv"
    write_election(stats, path)
    return path


@pytest.fixture(scope="session")
def desk():
    """Desk-preset synthetic event (seed 0) and its feature matrix."""
    from unrest import datagen
    from unrest.featmat import featurize
    from unrest.textfeat import load_resources

    syn = datagen.generate(datagen.preset("desk", seed=0))
    corpus = cleanse(Corpus(tuple(syn.tweets)))
    m = featurize(corpus, load_resources(), syn.election, syn.protests, US_STATES)
    return syn, m


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES, key=lambda l: int(l.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
