"""The interpretation module: parser messages in, domain slot sets out.

Messages are linguistic; slots are what the calendar application acts
on.  This module knows that "set up" means schedule, that an appointment
is stored as a meeting, how clock fragments resolve against day parts,
and how slots accumulate over the turns of a dialog.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field, replace

from . import messages as msg_mod
from .context import ContextState

WEEKDAYS = ("monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday")
MINUTE_INCREMENT = 5


class TimeRangeError(ValueError):
    """An ill-formed time value (month 13, day 32, minute off the grid)."""


class SlotConflictError(ValueError):
    """One reading supplied two different values for the same slot."""

    def __init__(self, slot, old, new):
        super().__init__(f"conflicting values for {slot}: {old} vs {new}")
        self.slot = slot


@dataclass(frozen=True)
class TimeRecord:
    """An event time being assembled; day_part is transient and resolves
    a pending am/pm ambiguity when an hour is known."""

    minute: int | None = None
    hour: int | None = None
    day: int | None = None
    month: int | None = None
    day_part: str | None = None
    to_hour: int | None = None
    duration_minutes: int | None = None

    def is_empty(self) -> bool:
        return self == TimeRecord()

    def fields(self):
        out = []
        for name in ("minute", "hour", "day", "month", "day_part", "to_hour", "duration_minutes"):
            value = getattr(self, name)
            if value is not None:
                out.append((name, value))
        return out

    def has_date(self) -> bool:
        return self.day is not None and self.month is not None

    def has_hour(self) -> bool:
        return self.hour is not None


AM_PM_UNKNOWN = "am_pm_unknown"


@dataclass
class SlotSet:
    """Domain-level interpretation accumulated across turns."""

    action_name: str | None = None
    event_name: str | None = None
    event_time: TimeRecord | None = None
    event_time_ambiguity: str | None = None
    event_partner: list = field(default_factory=list)
    event_place: str | None = None
    new_event_time: TimeRecord | None = None
    new_event_place: str | None = None
    choice: int | None = None
    corrections: list = field(default_factory=list, compare=False)
    dropped: list = field(default_factory=list, compare=False)

    def is_empty(self) -> bool:
        return self == SlotSet()

    def schedule_complete(self) -> bool:
        t = self.event_time
        return (
            t is not None
            and t.has_date()
            and t.has_hour()
            and self.event_time_ambiguity is None
        )


@dataclass
class DomainMapping:
    """Application knowledge: verbs to actions, nouns to event names,
    meaning types to slots."""

    verb_actions: dict = field(default_factory=dict)
    event_names: dict = field(default_factory=dict)
    type_slots: dict = field(default_factory=dict)

    @classmethod
    def from_grammar(cls, grammar) -> "DomainMapping":
        raw = grammar.domain_mapping or {}
        return cls(
            verb_actions=dict(raw.get("verb_actions", {})),
            event_names=dict(raw.get("event_names", {})),
            type_slots=dict(raw.get("type_slots", {})),
        )

    def slot_for_type(self, type_value) -> str | None:
        """Which slot a meaning type lands in; time subtypes count as time."""
        if not isinstance(type_value, str):
            return None
        hit = self.type_slots.get(type_value)
        if hit:
            return hit
        base = type_value.split("(", 1)[0]
        return self.type_slots.get(base)


# ---------------------------------------------------------------------------
# Time normalization
# ---------------------------------------------------------------------------


def _today(ctx: ContextState) -> dt.date:
    today = ctx.defaults.get("today") if ctx and ctx.defaults else None
    if isinstance(today, str):
        today = dt.date.fromisoformat(today)
    return today or dt.date.today()


def _check_range(name, value, lo, hi):
    if not isinstance(value, int) or not lo <= value <= hi:
        raise TimeRangeError(f"{name} {value!r} out of range {lo}..{hi}")


def _resolve_day_part(hour: int, day_part: str) -> int:
    if day_part in ("evening", "afternoon", "night"):
        if 1 <= hour <= 11:
            return hour + 12
        if day_part == "night" and hour == 12:
            return 0
        return hour
    if day_part == "morning":
        return 0 if hour == 12 else hour
    return hour


def normalize_time(raw, ctx: ContextState | None = None):
    """Turn one time message into a TimeRecord plus an ambiguity marker.

    A bare hour 1..12 with neither meridiem nor day part is marked
    am_pm_unknown for the dialog to resolve; day parts shift hours into
    the 24h range; minutes default to 0 once an hour is known.  Raises
    TimeRangeError for impossible values.
    """
    den = msg_mod.get(raw, "den") if msg_mod.get(raw, "den") is not None else raw
    type_value = msg_mod.get(raw, "type")
    fields = {}
    if msg_mod.is_pairs(den) and isinstance(den, tuple):
        for attr, value in den:
            fields[attr] = value
    else:
        # atom denotation: key it by the message's time subtype
        from .grammar import time_record

        for attr, value in time_record(den, type_value):
            fields[attr] = value

    minute = fields.get("minute")
    hour = fields.get("hour")
    day = fields.get("day")
    month = fields.get("month")
    day_part = fields.get("day_part")
    meridiem = fields.get("meridiem")
    to_hour = fields.get("to_hour")
    if "from_hour" in fields:
        hour = fields["from_hour"]
    if "value" in fields:
        raise TimeRangeError(f"cannot interpret time denotation {fields['value']!r}")

    if month is not None:
        _check_range("month", month, 1, 12)
    if day is not None:
        _check_range("day", day, 1, 31)
    if hour is not None:
        _check_range("hour", hour, 0, 23)
    if to_hour is not None:
        _check_range("hour", to_hour, 0, 23)
    if minute is not None:
        _check_range("minute", minute, 0, 59)
        if minute % MINUTE_INCREMENT != 0:
            raise TimeRangeError(f"minute {minute} is off the {MINUTE_INCREMENT}-minute grid")

    today = _today(ctx)
    if "weekday" in fields:
        name = fields["weekday"]
        if name not in WEEKDAYS:
            raise TimeRangeError(f"unknown weekday {name!r}")
        ahead = (WEEKDAYS.index(name) - today.weekday()) % 7 or 7
        target = today + dt.timedelta(days=ahead)
        day, month = target.day, target.month
    if "relative" in fields:
        offset = {"today": 0, "tomorrow": 1, "yesterday": -1}.get(fields["relative"])
        if offset is None:
            raise TimeRangeError(f"unknown relative day {fields['relative']!r}")
        target = today + dt.timedelta(days=offset)
        day, month = target.day, target.month

    ambiguity = None
    if hour is not None:
        if meridiem is not None and not 1 <= hour <= 12:
            raise TimeRangeError(f"hour {hour} cannot take {meridiem}")
        if meridiem == "pm":
            hour = 12 if hour == 12 else hour + 12
            if to_hour is not None and 1 <= to_hour <= 11:
                to_hour += 12
        elif meridiem == "am":
            hour = 0 if hour == 12 else hour
        elif day_part is not None:
            hour = _resolve_day_part(hour, day_part)
            if to_hour is not None:
                to_hour = _resolve_day_part(to_hour, day_part)
            day_part = None
        elif 1 <= hour <= 12:
            ambiguity = AM_PM_UNKNOWN
        if minute is None:
            minute = 0

    record = TimeRecord(
        minute=minute,
        hour=hour,
        day=day,
        month=month,
        day_part=day_part,
        to_hour=to_hour,
        duration_minutes=fields.get("duration_minutes"),
    )
    return record, ambiguity


def duration_minutes(den) -> int | None:
    if not (msg_mod.is_pairs(den) and isinstance(den, tuple)):
        return None
    amount = msg_mod.get(den, "amount")
    unit = msg_mod.get(den, "unit")
    if not isinstance(amount, int):
        return None
    return amount * 60 if unit == "hour" else amount


# ---------------------------------------------------------------------------
# Interpretation: one reading -> one SlotSet
# ---------------------------------------------------------------------------


def _merge_time(slot_name, existing, new, corrections=None):
    """Field-wise record merge; conflicts either raise or flag a correction."""
    if existing is None:
        return new
    values = {}
    for name in ("minute", "hour", "day", "month", "day_part", "to_hour", "duration_minutes"):
        old_v, new_v = getattr(existing, name), getattr(new, name)
        if old_v is None or new_v is None or old_v == new_v:
            values[name] = new_v if new_v is not None else old_v
        elif corrections is None:
            raise SlotConflictError(f"{slot_name}.{name}", old_v, new_v)
        else:
            values[name] = new_v
            corrections.append(f"{slot_name}.{name}")
    return TimeRecord(**values)


def interpret(message, ctx: ContextState, dm: DomainMapping) -> SlotSet:
    """Map one deduped reading to its slots.

    Typed sub-messages land in their mapped slots; unmapped attributes
    are dropped and listed in ``SlotSet.dropped``; conflicting values for
    one slot raise SlotConflictError.
    """
    slots = SlotSet()

    def set_scalar(name, value):
        old = getattr(slots, name)
        if old is not None and old != value:
            raise SlotConflictError(name, old, value)
        setattr(slots, name, value)

    def add_time(slot_name, record, ambiguity):
        existing = getattr(slots, slot_name)
        merged = _merge_time(slot_name, existing, record)
        resolved, ambiguity = _settle_day_part(merged, ambiguity)
        setattr(slots, slot_name, resolved)
        if slot_name == "event_time":
            if ambiguity:
                slots.event_time_ambiguity = ambiguity
            elif resolved.has_hour():
                slots.event_time_ambiguity = None

    def route(type_value, den, sub_message, recurse_groups=False):
        if recurse_groups:
            # a grouped sub-message may wrap further pps one level down
            for inner in msg_mod.get_all(sub_message, "pp_msg"):
                route(msg_mod.get(inner, "type"), msg_mod.get(inner, "den"), inner, True)
        slot = dm.slot_for_type(type_value)
        if slot in ("event_time", "new_event_time"):
            record, ambiguity = normalize_time(sub_message, ctx)
            add_time(slot, record, ambiguity)
        elif slot == "event_partner":
            for name in msg_mod.get_all(sub_message, "den"):
                if name not in slots.event_partner:
                    slots.event_partner.append(name)
        elif slot == "event_name":
            set_scalar("event_name", dm.event_names.get(den, den))
        elif slot == "event_place":
            set_scalar("event_place", den)
        elif slot == "new_event_place":
            set_scalar("new_event_place", den)
        elif slot == "event_duration":
            minutes = duration_minutes(den)
            if minutes is not None:
                add_time("event_time", TimeRecord(duration_minutes=minutes), None)
        elif slot == "choice":
            set_scalar("choice", den)
        else:
            slots.dropped.append(("type", type_value))

    top_type = msg_mod.get(message, "type")
    for attr, value in message:
        if attr == "action":
            action = dm.verb_actions.get(value, "__missing__")
            if action is None:
                slots.dropped.append((attr, value))  # verb without a calendar action
            elif action == "__missing__":
                slots.dropped.append((attr, value))
            else:
                set_scalar("action_name", action)
        elif attr in ("object", "object_type"):
            continue  # handled as a pair below
        elif attr in ("pp_msg", "act_pp_msg"):
            inner_type = msg_mod.get(value, "type")
            if attr == "act_pp_msg" and dm.slot_for_type(inner_type) not in (
                "new_event_time",
                "new_event_place",
            ):
                slots.dropped.append((attr, inner_type))
                continue
            route(inner_type, msg_mod.get(value, "den"), value, recurse_groups=True)
        elif attr == "type":
            continue
        elif attr == "den" and top_type is not None:
            route(top_type, value, message)
            top_type = None  # a reading carries one top-level denotation
        else:
            slots.dropped.append((attr, value))

    obj = msg_mod.get(message, "object")
    obj_type = msg_mod.get(message, "object_type")
    if obj is not None:
        slot = dm.slot_for_type(obj_type)
        if slot == "event_name":
            set_scalar("event_name", dm.event_names.get(obj, obj))
        elif slot == "event_partner":
            if obj not in slots.event_partner:
                slots.event_partner.append(obj)
        else:
            slots.dropped.append(("object", obj))
    return slots


def _settle_day_part(record: TimeRecord, ambiguity):
    """Apply a known day part to a pending 1..12 hour; keep it otherwise."""
    if record.day_part and record.hour is not None and 1 <= record.hour <= 12:
        hour = _resolve_day_part(record.hour, record.day_part)
        to_hour = record.to_hour
        if to_hour is not None:
            to_hour = _resolve_day_part(to_hour, record.day_part)
        return replace(record, hour=hour, to_hour=to_hour, day_part=None), None
    if record.hour is not None and not 1 <= record.hour <= 12:
        ambiguity = None
    return record, ambiguity


# ---------------------------------------------------------------------------
# Cross-turn merging
# ---------------------------------------------------------------------------


def merge_slots(acc: SlotSet, new: SlotSet) -> SlotSet:
    """Fold one turn's slots into the accumulated set.

    New values fill empty slots; a restatement of a filled slot wins and
    is flagged as a correction; a later day part resolves a pending
    am/pm ambiguity (and the other way around).  Left-associative over
    the turn sequence; merging into an empty set is identity.
    """
    out = SlotSet(
        action_name=acc.action_name,
        event_name=acc.event_name,
        event_time=acc.event_time,
        event_time_ambiguity=acc.event_time_ambiguity,
        event_partner=list(acc.event_partner),
        event_place=acc.event_place,
        new_event_time=acc.new_event_time,
        new_event_place=acc.new_event_place,
        choice=acc.choice,
        corrections=list(acc.corrections),
        dropped=list(acc.dropped) + list(new.dropped),
    )
    for name in ("action_name", "event_name", "event_place", "new_event_place", "choice"):
        value = getattr(new, name)
        if value is None:
            continue
        if getattr(out, name) is not None and getattr(out, name) != value:
            out.corrections.append(name)
        setattr(out, name, value)
    for partner in new.event_partner:
        if partner not in out.event_partner:
            out.event_partner.append(partner)

    if new.event_time is not None:
        out.event_time = _merge_time("event_time", out.event_time, new.event_time, out.corrections)
        if new.event_time.has_hour():
            out.event_time_ambiguity = new.event_time_ambiguity
    if new.event_time_ambiguity and out.event_time_ambiguity is None:
        if out.event_time is None or not out.event_time.has_hour() or (
            new.event_time is not None and new.event_time.has_hour()
        ):
            out.event_time_ambiguity = new.event_time_ambiguity
    if out.event_time is not None:
        out.event_time, out.event_time_ambiguity = _settle_day_part(
            out.event_time, out.event_time_ambiguity
        )
    if new.new_event_time is not None:
        out.new_event_time = _merge_time(
            "new_event_time", out.new_event_time, new.new_event_time, out.corrections
        )
    return out


# ---------------------------------------------------------------------------
# Rendering ("***Slots:" blocks and the service JSON form)
# ---------------------------------------------------------------------------

_SLOT_ORDER = (
    "action_name",
    "event_name",
    "event_time",
    "event_time_ambiguity",
    "event_partner",
    "event_place",
    "new_event_time",
    "new_event_place",
)


def _slot_items(slots: SlotSet):
    for name in _SLOT_ORDER:
        value = getattr(slots, name)
        if value is None or value == []:
            continue
        if isinstance(value, TimeRecord):
            if value.is_empty():
                continue
            rendered = "[" + ",".join(f"[{k} {v}]" for k, v in value.fields()) + "]"
        elif isinstance(value, list):
            rendered = "[" + ",".join(str(v) for v in value) + "]"
        else:
            rendered = str(value)
        yield name, rendered


def render_slots(slots: SlotSet) -> str:
    """Canonical one-line form, e.g.
    [[action_name schedule],[event_name meeting],[event_time [[minute 0],
    [hour 20],[day 30],[month 8]]],[event_partner [bob]]]"""
    items = [f"[{name} {rendered}]" for name, rendered in _slot_items(slots)]
    return "[" + ",".join(items) + "]"


def slots_block(slots: SlotSet) -> str:
    """The multi-line ***Slots: block printed by the REPL and transcripts."""
    items = list(_slot_items(slots))
    if not items:
        return "***Slots:\n[]"
    lines = []
    for i, (name, rendered) in enumerate(items):
        head = "[  " if i == 0 else "   "
        tail = "]" if i == len(items) - 1 else ""
        lines.append(f"{head}[  {name} {rendered}]{tail}")
    return "***Slots:\n" + "\n".join(lines)


def slots_to_json(slots: SlotSet) -> dict:
    out = {}
    for name in _SLOT_ORDER + ("choice",):
        value = getattr(slots, name)
        if value is None or value == []:
            continue
        if isinstance(value, TimeRecord):
            if value.is_empty():
                continue
            out[name] = dict(value.fields())
        else:
            out[name] = value
    if slots.corrections:
        out["corrections"] = list(slots.corrections)
    return out
