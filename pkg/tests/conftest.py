from __future__ import annotations

from pathlib import Path

import pytest

from hedonet.lexicon import filter_stop_words, load_lexicon

DATA = Path(__file__).parent / "data"
FIXTURE_LEXICON = DATA / "labmt_fixture.tsv"


@pytest.fixture(scope="session")
def lexicon_path() -> Path:
    return FIXTURE_LEXICON


@pytest.fixture(scope="session")
def raw_lexicon():
    return load_lexicon(FIXTURE_LEXICON)


@pytest.fixture(scope="session")
def lexicon(raw_lexicon):
    return filter_stop_words(raw_lexicon, 1.0)


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
