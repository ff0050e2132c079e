"""Event store behind the dialog: scheduling, canceling, moving meetings.

Stands in for an external desktop diary.  Events persist as one JSON
document per line in a session-configured file; conflict detection is
additive and can be switched off.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, replace
from pathlib import Path

from .semantics import AM_PM_UNKNOWN, SlotSet, TimeRecord

DEFAULT_DURATION_MINUTES = 60


class CalendarError(ValueError):
    pass


class ConflictError(CalendarError):
    """Scheduling into an already occupied start slot."""


class NotFoundError(CalendarError):
    """Cancel/move referenced no stored event."""


class AmbiguousReferenceError(CalendarError):
    """Cancel/move matched more than one stored event."""

    def __init__(self, matches):
        super().__init__(f"{len(matches)} events match")
        self.matches = matches


@dataclass(frozen=True)
class CalendarEvent:
    id: str
    name: str
    start: dt.datetime
    duration_minutes: int = DEFAULT_DURATION_MINUTES
    partners: tuple = ()
    place: str | None = None

    def __post_init__(self):
        if self.start.minute % 5 != 0:
            raise CalendarError(f"start minute {self.start.minute} off the 5-minute grid")

    def describe(self) -> str:
        parts = [f"{self.name} on {self.start.month}/{self.start.day}"
                 f" at {self.start.hour:02d}:{self.start.minute:02d}"]
        if self.partners:
            parts.append("with " + " and ".join(self.partners))
        if self.place:
            parts.append(f"in {self.place}")
        return " ".join(parts)

    def to_json(self) -> dict:
        out = {
            "id": self.id,
            "name": self.name,
            "start": self.start.isoformat(timespec="minutes"),
            "duration_minutes": self.duration_minutes,
            "partners": list(self.partners),
        }
        if self.place:
            out["place"] = self.place
        return out

    @classmethod
    def from_json(cls, doc: dict) -> "CalendarEvent":
        return cls(
            id=doc["id"],
            name=doc["name"],
            start=dt.datetime.fromisoformat(doc["start"]),
            duration_minutes=doc.get("duration_minutes", DEFAULT_DURATION_MINUTES),
            partners=tuple(doc.get("partners", [])),
            place=doc.get("place"),
        )


def resolve_year(month: int, day: int, today: dt.date) -> int:
    """Dates without a year mean the next future occurrence."""
    if (month, day) >= (today.month, today.day):
        return today.year
    return today.year + 1


class EventStore:
    """All events of one session, optionally persisted to a JSONL file."""

    def __init__(self, path: str | Path | None = None, conflict_checks: bool = True):
        self.path = Path(path) if path else None
        self.conflict_checks = conflict_checks
        self.events: list[CalendarEvent] = []
        self._next_id = 1
        if self.path and self.path.exists():
            self.load()

    # -- persistence --------------------------------------------------------

    def load(self):
        self.events = []
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    self.events.append(CalendarEvent.from_json(json.loads(line)))
        if self.events:
            numeric = [int(e.id.split("-")[-1]) for e in self.events if e.id.startswith("ev-")]
            self._next_id = max(numeric, default=0) + 1

    def save(self):
        if not self.path:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "w", encoding="utf-8") as fh:
            for event in self.events:
                fh.write(json.dumps(event.to_json(), separators=(",", ":")) + "\n")

    # -- queries ------------------------------------------------------------

    def query(self, description: SlotSet | dict) -> list[CalendarEvent]:
        """Events consistent with every given field of the description."""
        if isinstance(description, dict):
            description = _slots_from_dict(description)
        out = []
        for event in self.events:
            if _matches(event, description):
                out.append(event)
        return out

    def find_unique(self, description: SlotSet) -> CalendarEvent:
        matches = self.query(description)
        if not matches:
            raise NotFoundError("no matching event")
        if len(matches) > 1:
            raise AmbiguousReferenceError(matches)
        return matches[0]

    # -- actions ------------------------------------------------------------

    def apply(self, action: SlotSet, today: dt.date | None = None) -> CalendarEvent:
        """Perform a complete action slot set; returns the affected event."""
        today = today or dt.date.today()
        kind = action.action_name
        if kind == "schedule":
            return self._schedule(action, today)
        if kind == "cancel":
            event = self.find_unique(_description_of(action))
            self.events.remove(event)
            self.save()
            return event
        if kind == "move":
            return self._move(action, today)
        raise CalendarError(f"unsupported action {kind!r}")

    def _schedule(self, action: SlotSet, today: dt.date) -> CalendarEvent:
        t = action.event_time
        if t is None or not (t.has_date() and t.has_hour()):
            raise CalendarError("schedule needs month, day and hour")
        start = dt.datetime(
            resolve_year(t.month, t.day, today), t.month, t.day, t.hour, t.minute or 0
        )
        if self.conflict_checks:
            taken = [e for e in self.events if e.start == start]
            if taken:
                raise ConflictError(f"that slot is taken by {taken[0].describe()}")
        duration = t.duration_minutes
        if duration is None and t.to_hour is not None:
            duration = max(t.to_hour - t.hour, 0) * 60
        event = CalendarEvent(
            id=f"ev-{self._next_id:04d}",
            name=action.event_name or "meeting",
            start=start,
            duration_minutes=duration or DEFAULT_DURATION_MINUTES,
            partners=tuple(action.event_partner),
            place=action.event_place,
        )
        self._next_id += 1
        self.events.append(event)
        self.save()
        return event

    def _move(self, action: SlotSet, today: dt.date) -> CalendarEvent:
        event = self.find_unique(_description_of(action))
        start = event.start
        t = action.new_event_time
        if t is not None:
            year = start.year
            month = t.month if t.month is not None else start.month
            day = t.day if t.day is not None else start.day
            if t.month is not None or t.day is not None:
                year = resolve_year(month, day, today)
            start = dt.datetime(
                year,
                month,
                day,
                t.hour if t.hour is not None else start.hour,
                t.minute if t.minute is not None else start.minute,
            )
        moved = replace(
            event,
            start=start,
            place=action.new_event_place or event.place,
        )
        self.events[self.events.index(event)] = moved
        self.save()
        return moved

    def to_ical(self) -> str:
        """Best-effort iCalendar rendering of the store."""
        lines = ["BEGIN:VCALENDAR", "VERSION:2.0", "PRODID:-//caltalk//EN"]
        for e in self.events:
            end = e.start + dt.timedelta(minutes=e.duration_minutes)
            lines += [
                "BEGIN:VEVENT",
                f"UID:{e.id}",
                f"SUMMARY:{e.name}" + (f" with {', '.join(e.partners)}" if e.partners else ""),
                f"DTSTART:{e.start.strftime('%Y%m%dT%H%M%S')}",
                f"DTEND:{end.strftime('%Y%m%dT%H%M%S')}",
            ]
            if e.place:
                lines.append(f"LOCATION:{e.place}")
            lines.append("END:VEVENT")
        lines.append("END:VCALENDAR")
        return "\n".join(lines) + "\n"


def _description_of(action: SlotSet) -> SlotSet:
    """The fields of a cancel/move request that describe the target event."""
    return SlotSet(
        event_name=action.event_name,
        event_time=action.event_time,
        event_time_ambiguity=action.event_time_ambiguity,
        event_partner=list(action.event_partner),
        event_place=action.event_place,
    )


def _slots_from_dict(description: dict) -> SlotSet:
    time_fields = {
        k: description[k] for k in ("minute", "hour", "day", "month") if k in description
    }
    return SlotSet(
        event_name=description.get("event_name"),
        event_time=TimeRecord(**time_fields) if time_fields else None,
        event_partner=list(description.get("event_partner", [])),
        event_place=description.get("event_place"),
    )


def _matches(event: CalendarEvent, description: SlotSet) -> bool:
    if description.event_name and event.name != description.event_name:
        return False
    if description.event_place and event.place != description.event_place:
        return False
    for partner in description.event_partner:
        if partner not in event.partners:
            return False
    t = description.event_time
    if t is not None:
        if t.month is not None and event.start.month != t.month:
            return False
        if t.day is not None and event.start.day != t.day:
            return False
        if t.hour is not None:
            hours = {t.hour}
            if description.event_time_ambiguity == AM_PM_UNKNOWN and 1 <= t.hour <= 12:
                hours.add((t.hour + 12) % 24)
            if event.start.hour not in hours:
                return False
        if t.minute is not None and event.start.minute != t.minute:
            return False
    return True


def apply(store: EventStore, action: SlotSet, today: dt.date | None = None):
    """Module-level convenience: mutate the store, return the affected event."""
    return store.apply(action, today)


def query(store: EventStore, description) -> list[CalendarEvent]:
    return store.query(description)
