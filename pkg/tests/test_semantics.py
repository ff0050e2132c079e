import pytest
from hypothesis import given, strategies as st

from caltalk.lexicon import tokenize
from caltalk.messages import pairs
from caltalk.parser import parse
from caltalk.semantics import (
    AM_PM_UNKNOWN,
    SlotConflictError,
    SlotSet,
    TimeRecord,
    TimeRangeError,
    interpret,
    merge_slots,
    normalize_time,
    render_slots,
    slots_block,
    slots_to_json,
)
from conftest import make_ctx


def reading_of(grammar, text, **ctx_kwargs):
    ctx = make_ctx(**ctx_kwargs)
    readings, _ = parse(tokenize(text), ctx, grammar)
    assert readings, text
    return readings, ctx


# --- interpret -----------------------------------------------------------------

def test_interpret_scheduling_sentence(grammar, dm):
    readings, ctx = reading_of(grammar, "I want to set up an appointment on November 11.")
    slots = interpret(readings[0], ctx, dm)
    assert render_slots(slots) == (
        "[[action_name schedule],[event_name meeting],[event_time [[day 11],[month 11]]]]"
    )


def test_interpret_date_partner_fragment(grammar, dm):
    readings, ctx = reading_of(grammar, "on November 11th with Martin.", question="time(_)")
    slots = interpret(readings[0], ctx, dm)
    assert render_slots(slots) == (
        "[[event_time [[day 11],[month 11]]],[event_partner [martin]]]"
    )


def test_interpret_empty_message_is_empty_slots(dm):
    assert interpret((), make_ctx(), dm) == SlotSet()


def test_interpret_drops_unmapped_attributes(grammar, dm):
    message = pairs(("truth_value", 0), ("mystery", "x"))
    slots = interpret(message, make_ctx(), dm)
    assert slots.is_empty()
    assert ("truth_value", 0) in slots.dropped and ("mystery", "x") in slots.dropped


def test_interpret_conflicting_slot_raises(grammar, dm):
    readings, ctx = reading_of(grammar, "on November 11th on August 30th", question="time(_)")
    with pytest.raises(SlotConflictError) as err:
        for r in readings:
            interpret(r, ctx, dm)
    assert "event_time" in str(err.value)


def test_interpret_partner_accumulates(grammar, dm):
    readings, ctx = reading_of(grammar, "with Bob and Ann")
    slots = interpret(readings[0], ctx, dm)
    assert slots.event_partner == ["bob", "ann"]


def test_interpret_move_sentence(grammar, dm):
    readings, ctx = reading_of(
        grammar, "Postpone the interview at 10 to Monday.", discourse=["interview"]
    )
    candidates = [interpret(r, ctx, dm) for r in readings]
    slots = candidates[0]
    assert all(c == slots for c in candidates)
    assert slots.action_name == "move"
    assert slots.event_name == "interview"
    assert slots.event_time.hour == 10
    assert slots.event_time_ambiguity == AM_PM_UNKNOWN
    assert (slots.new_event_time.month, slots.new_event_time.day) == (7, 3)


def test_interpret_place_and_duration(grammar, dm):
    readings, ctx = reading_of(
        grammar, "Schedule a lunch at the office for 2 hours", discourse=["office"]
    )
    slots = interpret(readings[0], ctx, dm)
    assert slots.event_name == "lunch"
    assert slots.event_place == "office"
    assert slots.event_time.duration_minutes == 120


# --- normalize_time --------------------------------------------------------------

def _time_msg(**fields):
    return pairs(("type", "time"), ("den", tuple(fields.items())))


def test_normalize_bare_hour_is_ambiguous():
    record, ambiguity = normalize_time(_time_msg(hour=8), make_ctx())
    assert record == TimeRecord(minute=0, hour=8)
    assert ambiguity == AM_PM_UNKNOWN


def test_normalize_hour_with_day_part():
    record, ambiguity = normalize_time(_time_msg(hour=8, day_part="evening"), make_ctx())
    assert (record.hour, record.minute) == (20, 0)
    assert ambiguity is None


def test_normalize_date():
    record, ambiguity = normalize_time(_time_msg(month=8, day=30), make_ctx())
    assert (record.month, record.day) == (8, 30)
    assert record.hour is None and ambiguity is None


def test_normalize_meridiem():
    record, _ = normalize_time(_time_msg(hour=8, meridiem="pm"), make_ctx())
    assert record.hour == 20
    record, _ = normalize_time(_time_msg(hour=12, meridiem="am"), make_ctx())
    assert record.hour == 0


def test_normalize_weekday_and_relative():
    record, _ = normalize_time(_time_msg(weekday="monday"), make_ctx())
    assert (record.month, record.day) == (7, 3)  # next monday after Sat 1995-07-01
    record, _ = normalize_time(_time_msg(relative="tomorrow"), make_ctx())
    assert (record.month, record.day) == (7, 2)


def test_normalize_day_part_alone_kept():
    record, ambiguity = normalize_time(_time_msg(day_part="evening"), make_ctx())
    assert record.day_part == "evening" and record.hour is None
    assert ambiguity is None


def test_normalize_range_errors():
    with pytest.raises(TimeRangeError):
        normalize_time(_time_msg(month=13), make_ctx())
    with pytest.raises(TimeRangeError):
        normalize_time(_time_msg(day=32), make_ctx())
    with pytest.raises(TimeRangeError):
        normalize_time(_time_msg(hour=8, minute=56), make_ctx())  # off the grid


field_values = st.integers(min_value=-2, max_value=65)
raw_time_messages = st.fixed_dictionaries(
    {},
    optional={
        "minute": field_values,
        "hour": field_values,
        "day": field_values,
        "month": field_values,
        "day_part": st.sampled_from(["morning", "afternoon", "evening", "night"]),
        "meridiem": st.sampled_from(["am", "pm"]),
        "weekday": st.sampled_from(["monday", "friday", "sunday"]),
        "relative": st.sampled_from(["today", "tomorrow", "yesterday"]),
    },
)


@given(raw_time_messages)
def test_normalize_never_emits_out_of_range(fields):
    try:
        record, ambiguity = normalize_time(_time_msg(**fields), make_ctx())
    except TimeRangeError:
        return
    if record.hour is not None:
        assert 0 <= record.hour <= 23
    if record.minute is not None:
        assert record.minute % 5 == 0 and 0 <= record.minute <= 59
    if ambiguity == AM_PM_UNKNOWN:
        assert 1 <= record.hour <= 12
    if record.day is not None:
        assert 1 <= record.day <= 31
    if record.month is not None:
        assert 1 <= record.month <= 12


# --- merge_slots ------------------------------------------------------------------

def test_merge_identity():
    x = SlotSet(action_name="schedule", event_partner=["bob"], event_time=TimeRecord(hour=20))
    assert merge_slots(SlotSet(), x) == x


def test_merge_golden_dialog_sequence():
    acc = SlotSet()
    acc = merge_slots(acc, SlotSet(event_time=TimeRecord(day=30, month=8)))
    acc = merge_slots(
        acc,
        SlotSet(event_time=TimeRecord(minute=0, hour=8), event_time_ambiguity=AM_PM_UNKNOWN),
    )
    assert acc.event_time_ambiguity == AM_PM_UNKNOWN
    acc = merge_slots(acc, SlotSet(event_time=TimeRecord(day_part="evening")))
    assert acc.event_time == TimeRecord(minute=0, hour=20, day=30, month=8)
    assert acc.event_time_ambiguity is None
    assert acc.corrections == []


def test_merge_day_part_first_then_hour():
    acc = merge_slots(SlotSet(), SlotSet(event_time=TimeRecord(day_part="evening")))
    acc = merge_slots(
        acc,
        SlotSet(event_time=TimeRecord(minute=0, hour=8), event_time_ambiguity=AM_PM_UNKNOWN),
    )
    assert acc.event_time.hour == 20 and acc.event_time_ambiguity is None


def test_merge_restatement_wins_and_flags_correction():
    # oracle: replay both orders; whichever value comes last must win
    first = SlotSet(event_time=TimeRecord(minute=0, hour=9))
    second = SlotSet(event_time=TimeRecord(minute=0, hour=10))
    a = merge_slots(merge_slots(SlotSet(), first), second)
    b = merge_slots(merge_slots(SlotSet(), second), first)
    assert a.event_time.hour == 10 and b.event_time.hour == 9
    assert "event_time.hour" in a.corrections and "event_time.hour" in b.corrections


def test_merge_associative_on_disjoint_updates():
    updates = [
        SlotSet(action_name="schedule"),
        SlotSet(event_time=TimeRecord(day=30, month=8)),
        SlotSet(event_partner=["bob"]),
        SlotSet(event_place="office"),
    ]
    import itertools

    for a, b, c in itertools.permutations(updates, 3):
        left = merge_slots(merge_slots(a, b), c)
        right = merge_slots(a, merge_slots(b, c))
        assert left == right


# --- rendering --------------------------------------------------------------------

def test_render_canonical_order():
    slots = SlotSet(
        action_name="schedule",
        event_name="meeting",
        event_time=TimeRecord(minute=0, hour=20, day=30, month=8),
        event_partner=["bob"],
    )
    assert render_slots(slots) == (
        "[[action_name schedule],[event_name meeting],"
        "[event_time [[minute 0],[hour 20],[day 30],[month 8]]],[event_partner [bob]]]"
    )


def test_slots_block_shape():
    slots = SlotSet(action_name="schedule", event_name="meeting")
    block = slots_block(slots)
    assert block == (
        "***Slots:\n[  [  action_name schedule]\n   [  event_name meeting]]"
    )
    assert block.count("[") == block.count("]")
    assert slots_block(SlotSet()) == "***Slots:\n[]"


def test_slots_to_json():
    slots = SlotSet(
        action_name="schedule",
        event_time=TimeRecord(hour=20, minute=0),
        event_partner=["bob"],
    )
    assert slots_to_json(slots) == {
        "action_name": "schedule",
        "event_time": {"minute": 0, "hour": 20},
        "event_partner": ["bob"],
    }
