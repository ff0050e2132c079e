"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import time

import pytest

from caltalk import messages as msg_mod
from caltalk import ontology
from caltalk.context import ContextState, Utterance
from caltalk.dialogue import Session
from caltalk.grammar import load_grammar, validate_grammar
from caltalk.lexicon import ORDINAL_SUFFIXES, form_ordinal, tokenize
from caltalk.parser import parse, trigger
from caltalk.semantics import interpret, render_slots
from conftest import GRAMMAR_PATH, fragment_corpus, make_ctx
from test_lexicon import ORDINAL_ORACLE
from test_parser import ORACLE_GRAMMAR, ORACLE_UTTERANCES, enumerate_readings


def ok(line):
    print(f"\nACCEPTANCE PASS: {line}")


def test_golden_dialog_section_2():
    """Seven-turn transcript: exact questions, exact final slot block, < 1 s."""
    started = time.perf_counter()
    session = Session(str(GRAMMAR_PATH), today="1995-07-01")
    replies = [
        session.run_turn(u).reply
        for u in [
            "Schedule a meeting with Bob.",
            "On August 30th.",
            "8.",
            "In the evening.",
        ]
    ]
    elapsed = time.perf_counter() - started
    assert [r.surface_text for r in replies[:3]] == [
        "At what time and date?",
        "At what time?",
        "Morning or afternoon?",
    ]
    assert replies[3].kind == "execute"
    assert render_slots(replies[3].content) == (
        "[[action_name schedule],[event_name meeting],"
        "[event_time [[minute 0],[hour 20],[day 30],[month 8]]],[event_partner [bob]]]"
    )
    assert elapsed < 1.0
    ok(f"golden dialog: question sequence and final slot block exact ({elapsed:.3f}s)")


def test_golden_parse_sentence(grammar, dm):
    """"I want to set up an appointment on November 11." -> schedule slots."""
    ctx = make_ctx()
    readings, _ = parse(
        tokenize("I want to set up an appointment on November 11."), ctx, grammar
    )
    assert len(readings) == 1
    slots = interpret(readings[0], ctx, dm)
    assert slots.action_name == "schedule"
    assert slots.event_name == "meeting"
    assert (slots.event_time.month, slots.event_time.day) == (11, 11)
    assert render_slots(slots) == (
        "[[action_name schedule],[event_name meeting],[event_time [[day 11],[month 11]]]]"
    )
    ok("golden sentence: action_name schedule, event_name meeting, month 11 day 11")


GOLDEN_CHART_LINES = [
    "* 1,2,[november] : n(time(month)) -> [november]",
    "* 2,4,[11,th] : ordinal -> [numeral,st_nd_rd_th]",
    "* 1,4,[november,11,th] : np(time(day)) -> [np(time(month)),ordinal]",
    "* 0,4,[on,november,11,th] : pp(on,time) -> [prep(on),np(time(day))]",
]


def test_golden_fragment(grammar, dm):
    """Fragment under a time question: slots plus exact chart lines."""
    from caltalk.parser import chart_trace

    ctx = make_ctx(question="time(_)")
    readings, diag = parse(tokenize("on November 11th with Martin."), ctx, grammar)
    slots = interpret(readings[0], ctx, dm)
    assert (slots.event_time.month, slots.event_time.day) == (11, 11)
    assert slots.event_partner == ["martin"]
    lines = chart_trace(diag)
    for golden in GOLDEN_CHART_LINES:
        assert golden in lines, golden
    ok("golden fragment: event_time {month 11, day 11}, partner martin, chart lines exact")


def test_parse_dedup(grammar):
    """Two spanning pp-list derivations collapse to one message set."""
    ctx = make_ctx(question="time(_)")
    readings, diag = parse(tokenize("on November 11th with Martin."), ctx, grammar)
    assert len(diag.spanning_edges) >= 2
    assert len(readings) == 1
    ok(f"parse dedup: {len(diag.spanning_edges)} spanning edges, 1 distinct message set")


def test_ordinal_oracle():
    """All 124 numeral-suffix pairs decided exactly as the hand oracle says."""
    cases = 0
    for n in range(1, 32):
        for suffix in ORDINAL_SUFFIXES:
            expected = ORDINAL_ORACLE[n] == suffix
            actual = form_ordinal(n, suffix) is not None
            assert actual == expected, (n, suffix)
            cases += 1
    assert cases == 124
    assert form_ordinal(3, "th") is None
    ok("ordinal oracle: 124/124 suffix decisions match; (3, th) rejected")


def test_filters(grammar):
    """PP attachment to actions pruned; 5-minute filter disambiguates 4 to 6."""
    ctx = make_ctx()
    readings, _ = parse(tokenize("Schedule a meeting with Bob."), ctx, grammar)
    assert readings
    for reading in readings:
        for inner in msg_mod.get_all(reading, "act_pp_msg"):
            assert msg_mod.get(inner, "type") in ("new_event_time", "new_event_place"), (
                "a with-PP modified the action"
            )
    tctx = make_ctx(question="time(_)")
    filtered_on, _ = parse(tokenize("4 to 6"), tctx, grammar)
    filtered_off, _ = parse(tokenize("4 to 6"), tctx, grammar, disable_filters=True)
    assert len(filtered_on) == 1
    assert msg_mod.get(msg_mod.get(filtered_on[0], "den"), "from_hour") == 4
    assert len(filtered_off) == 2
    ok("filters: with-PP never modifies the action; 4 to 6 -> 1 reading on, 2 off")


def test_context_gating_measurement(grammar):
    """Inactive-edge total with the right question < the empty-context total."""
    empty = ContextState()
    total_question, total_empty = 0, 0
    for row in fragment_corpus():
        tokens = tokenize(row["utterance"])
        n_q = parse(tokens, make_ctx(question=row["question"]), grammar)[1].inactive_edge_count
        n_e = parse(tokens, empty, grammar)[1].inactive_edge_count
        total_question += n_q
        total_empty += n_e
    assert total_question < total_empty
    ok(
        "context gating: corpus inactive edges "
        f"{total_question} (question set) < {total_empty} (empty context)"
    )


def test_no_but_gating(grammar):
    """no.but.S fires only after a question, and asserts truth_value 0."""
    utterance = tokenize("no, but I want a meeting on Monday")
    nobut = grammar.find("sent(assrt,no.but.S)")[0]

    ctx = make_ctx()
    assert not trigger(nobut, ctx)
    assert parse(utterance, ctx, grammar)[0] == []

    ctx.previous_utterance = Utterance(
        "At what time?", ontology.parse_category("sent(ques,wh(time))")
    )
    assert trigger(nobut, ctx)
    readings, _ = parse(utterance, ctx, grammar)
    assert len(readings) == 1
    assert ("truth_value", 0) in readings[0]
    ok("no.but.S: gated on a question previous_utterance; message carries truth_value 0")


def test_brute_force_oracle_equivalence():
    """Chart output equals exhaustive enumeration on the 10-construction grammar."""
    g = load_grammar(ORACLE_GRAMMAR)
    assert len(g.constructions) == 10
    checked = 0
    for utterance in ORACLE_UTTERANCES:
        for question in (None, "time(_)"):
            ctx = make_ctx(question=question)
            tokens = tokenize(utterance)
            assert len(tokens) <= 6
            chart_readings, _ = parse(tokens, ctx, g)
            oracle = enumerate_readings(tokens, ctx, g)
            key = msg_mod.canonical_key
            assert sorted(map(key, chart_readings)) == sorted(map(key, oracle)), utterance
            checked += 1
    ok(f"brute-force oracle: chart = enumerator on {checked} utterance/context pairs")


def test_grammar_scale(grammar):
    """At least 40 constructions and 150 lexical entries, zero lint errors."""
    n_constructions = len(grammar.phrasal_constructions)
    n_lexical = len(grammar.lexical_entries)
    diagnostics = validate_grammar(grammar)
    errors = [d for d in diagnostics if d.severity == "error"]
    assert n_constructions >= 40
    assert n_lexical >= 150
    assert errors == []
    ok(
        f"grammar scale: {n_constructions} constructions, {n_lexical} lexical entries, "
        f"{len(errors)} lint errors"
    )
