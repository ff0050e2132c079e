import datetime as dt
import json
from pathlib import Path

import pytest

from caltalk import ontology
from caltalk.context import ContextState
from caltalk.grammar import load_grammar_file
from caltalk.semantics import DomainMapping

GRAMMAR_PATH = Path(__file__).resolve().parents[1] / "src" / "caltalk" / "data" / "calendar.grammar"
FRAGMENTS_PATH = GRAMMAR_PATH.parent / "fragments.jsonl"
TODAY = dt.date(1995, 7, 1)  # a Saturday; "monday" resolves to July 3


@pytest.fixture(scope="session")
def grammar():
    return load_grammar_file(GRAMMAR_PATH)


@pytest.fixture(scope="session")
def dm(grammar):
    return DomainMapping.from_grammar(grammar)


def make_ctx(question=None, discourse=(), domain="calendar"):
    ctx = ContextState(
        current_domain=domain,
        current_application="desk_calendar",
        language="english",
        current_discourse=list(discourse),
        defaults={"today": TODAY},
    )
    if question is not None:
        ctx.current_question = ontology.parse_category(question)
    return ctx


@pytest.fixture
def calendar_ctx():
    return make_ctx()


@pytest.fixture
def time_question_ctx():
    return make_ctx(question="time(_)")


def fragment_corpus():
    rows = []
    for line in FRAGMENTS_PATH.read_text().splitlines():
        if line.strip():
            rows.append(json.loads(line))
    return rows
