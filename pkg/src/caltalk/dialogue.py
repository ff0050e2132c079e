"""The discourse module: owns the context, picks the next dialog act,
and drives the calendar.

A session is a strictly serialized state machine.  Each turn parses the
utterance under the current context, interprets the surviving readings,
merges the slots, decides what to ask or do next, and updates the
context so the following fragment ("8", "in the evening") lands where
the pending question expects it.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

from . import calendar as cal
from . import messages as msg_mod
from . import ontology
from .calendar import AmbiguousReferenceError, CalendarError, EventStore, NotFoundError
from .context import ContextState, Sentence, Utterance
from .grammar import Grammar, load_grammar_file
from .lexicon import Lexicon, tokenize
from .parser import chart_trace, parse
from .semantics import (
    DomainMapping,
    SlotConflictError,
    SlotSet,
    TimeRecord,
    interpret,
    merge_slots,
    render_slots,
    slots_block,
)

ASK_REQUEST = "What would you like me to do?"
ASK_TIME_AND_DATE = "At what time and date?"
ASK_TIME = "At what time?"
ASK_DATE = "At what date?"
ASK_AM_PM = "Morning or afternoon?"
ASK_NEW_TIME = "To what time or date?"
DID_NOT_UNDERSTAND = "Sorry, I did not understand."


@dataclass
class DialogAct:
    """What the system does next: ask, clarify, execute, inform, or fail."""

    kind: str  # ask | clarify | confirm | execute | inform | fail
    surface_text: str
    content: object = None  # question Category, SlotSet, or alternatives list
    question: ontology.Term | None = None

    def construction_name(self) -> ontology.Category:
        if self.kind in ("ask", "clarify"):
            topic = "choice" if self.kind == "clarify" else _question_topic(self.question)
            return ontology.parse_category(f"sent(ques,wh({topic}))")
        return ontology.parse_category("sent(assert,system)")


def _question_topic(question) -> str:
    if question is None:
        return "unknown"
    functor = question.functor if isinstance(question, ontology.Category) else "unknown"
    return functor


@dataclass
class TurnResult:
    reply: DialogAct
    slots: SlotSet
    readings: list = field(default_factory=list)
    trace: list | None = None
    event: cal.CalendarEvent | None = None


def next_action(ctx: ContextState, acc: SlotSet, store_view: EventStore) -> DialogAct:
    """Decide the next act from the accumulated slots.

    Priority: missing request, missing date+time, missing time, pending
    am/pm ambiguity, then execution.  Cancel and move resolve their event
    reference against the store first; zero or multiple matches clarify.
    """
    if acc.action_name is None:
        return DialogAct("ask", ASK_REQUEST, question=ontology.parse_category("action(_)"))

    if acc.action_name in ("cancel", "move"):
        return _reference_action(ctx, acc, store_view)

    t = acc.event_time
    has_date = t is not None and t.has_date()
    has_hour = t is not None and t.has_hour()
    if not has_date and not has_hour:
        return DialogAct("ask", ASK_TIME_AND_DATE, question=ontology.parse_category("time(_)"))
    if has_date and not has_hour:
        return DialogAct("ask", ASK_TIME, question=ontology.parse_category("time(_)"))
    if not has_date and has_hour:
        return DialogAct("ask", ASK_DATE, question=ontology.parse_category("time(day)"))
    if acc.event_time_ambiguity is not None:
        return DialogAct("ask", ASK_AM_PM, question=ontology.parse_category("day_part"))
    return DialogAct("execute", "", content=acc)


def _reference_action(ctx: ContextState, acc: SlotSet, store: EventStore) -> DialogAct:
    description = cal._description_of(acc)
    matches = store.query(description)
    if len(matches) != 1:
        if not matches:
            text = "I could not find such an event. Which event do you mean?"
            alternatives = list(store.events)
        else:
            listing = " or ".join(
                f"({i}) {e.describe()}" for i, e in enumerate(matches, start=1)
            )
            text = f"Which one do you mean: {listing}?"
            alternatives = matches
        return DialogAct(
            "clarify", text, content=alternatives,
            question=ontology.parse_category("choice(_)"),
        )
    event = matches[0]
    if acc.action_name == "move" and acc.new_event_time is None and acc.new_event_place is None:
        return DialogAct("ask", ASK_NEW_TIME, question=ontology.parse_category("time(_)"))
    return DialogAct("execute", "", content=acc)


def update_context(ctx: ContextState, act: DialogAct | None, user_turn: dict | None) -> ContextState:
    """Fold the latest exchange into the context.

    The user turn sets previous_utterance/previous_sentence and marks a
    truth value on the questioned proposition; the system act then
    becomes the previous utterance and installs (or clears) the current
    question.  Mentioned entities accumulate in current_discourse.
    """
    if user_turn is not None:
        name = user_turn.get("construction_name")
        ctx.previous_utterance = Utterance(user_turn.get("text", ""), name)
        reading = user_turn.get("reading") or ()
        truth = msg_mod.get(reading, "truth_value")
        if truth is not None and ctx.previous_sentence is not None:
            ctx.previous_sentence.truth_value = truth
        elif reading and name is not None and _is_assertion(name):
            ctx.previous_sentence = Sentence(user_turn.get("text", ""), reading)
        for entity in user_turn.get("mentions", []):
            ctx.mention(entity)
    if act is not None:
        ctx.previous_utterance = Utterance(act.surface_text, act.construction_name())
        if act.kind in ("ask", "clarify"):
            ctx.current_question = act.question
            # the questioned proposition, so an answer can deny or affirm it
            ctx.previous_sentence = Sentence(act.surface_text)
        elif act.kind != "fail":
            ctx.current_question = None
    return ctx


def _is_assertion(name: ontology.Category) -> bool:
    return ontology.patterns_compatible(ontology.parse_category("sent(assert,_)"), name) or (
        ontology.patterns_compatible(ontology.parse_category("sent(assrt,_)"), name)
    )


class Session:
    """One dialog: grammar, context, slot accumulator, and event store."""

    def __init__(
        self,
        grammar: Grammar | str,
        store: EventStore | str | None = None,
        today: dt.date | str | None = None,
        trace: bool = False,
        seed_discourse_from_store: bool = True,
    ):
        self.grammar = load_grammar_file(grammar) if isinstance(grammar, str) else grammar
        self.lexicon = Lexicon(self.grammar)
        self.domain_mapping = DomainMapping.from_grammar(self.grammar)
        self.store = store if isinstance(store, EventStore) else EventStore(store)
        if isinstance(today, str):
            today = dt.date.fromisoformat(today)
        self.today = today or dt.date.today()
        self.trace = trace
        self.acc = SlotSet()
        self.transcript: list[str] = []
        self.pending_alternatives: list = []
        self.expecting_new_time = False
        self.last_diagnostics = None
        self.ctx = ContextState(
            current_domain=self.grammar.domain,
            current_application=self.grammar.application,
            language="english",
            defaults={"today": self.today},
        )
        if seed_discourse_from_store:
            # Stored events are shared ground: "the interview" may refer
            # to them on the first turn.
            for event in self.store.events:
                self.ctx.mention(event.name)
                for partner in event.partners:
                    self.ctx.mention(partner)

    # -- one turn -----------------------------------------------------------

    def run_turn(self, utterance: str) -> TurnResult:
        tokens = tokenize(utterance)
        readings, diagnostics = parse(tokens, self.ctx, self.grammar, lexicon=self.lexicon)
        self.last_diagnostics = diagnostics
        trace = chart_trace(diagnostics) if self.trace else None

        interpretations = []
        conflicts = []
        for reading in readings:
            try:
                slots = interpret(reading, self.ctx, self.domain_mapping)
            except (SlotConflictError, cal.CalendarError, ValueError) as err:
                conflicts.append(str(err))
                continue
            if not slots.is_empty():
                interpretations.append((reading, slots))

        self.transcript.append(f"U: {utterance}")
        if not interpretations:
            # reprompt; session state unchanged except previous_utterance
            reply = self._fail_act(diagnostics, conflicts)
            update_context(self.ctx, None, {"text": utterance, "construction_name": None})
            self.transcript.append(f"S: {reply.surface_text}")
            return TurnResult(reply, self.acc, readings, trace)

        reading, slots, divergent = self._select(interpretations)
        if divergent:
            reply = DialogAct(
                "clarify",
                "Did you mean: "
                + " or ".join(
                    f"({i}) {render_slots(s)}" for i, (_, s) in enumerate(interpretations, 1)
                )
                + "?",
                content=[s for _, s in interpretations],
                question=ontology.parse_category("choice(_)"),
            )
            self.pending_alternatives = [s for _, s in interpretations]
            self._finish_turn(utterance, reading, slots, reply)
            return TurnResult(reply, self.acc, readings, trace)

        if self.expecting_new_time and slots.event_time is not None and slots.new_event_time is None:
            slots.new_event_time, slots.event_time = slots.event_time, None
            slots.event_time_ambiguity = None
        self.expecting_new_time = False

        self.acc = merge_slots(self.acc, slots)
        if self.acc.choice and self.pending_alternatives:
            index = self.acc.choice - 1
            if 0 <= index < len(self.pending_alternatives):
                chosen = self.pending_alternatives[index]
                self.acc.choice = None
                if isinstance(chosen, SlotSet):
                    self.acc = merge_slots(self.acc, chosen)
                elif isinstance(chosen, cal.CalendarEvent):
                    # narrow an ambiguous event description to the chosen one
                    self.acc.event_name = chosen.name
                    self.acc.event_time = TimeRecord(
                        minute=chosen.start.minute,
                        hour=chosen.start.hour,
                        day=chosen.start.day,
                        month=chosen.start.month,
                    )
                    self.acc.event_time_ambiguity = None
            self.pending_alternatives = []

        reply = next_action(self.ctx, self.acc, self.store)
        if reply.kind == "clarify":
            self.pending_alternatives = list(reply.content or [])
        event = None
        executed = self.acc
        if reply.kind == "execute":
            reply, event = self._execute(reply)
            executed = reply.content if isinstance(reply.content, SlotSet) else self.acc
        if reply.surface_text == ASK_NEW_TIME:
            self.expecting_new_time = True

        self._finish_turn(utterance, reading, slots, reply)
        result = TurnResult(reply, executed, readings, trace, event)
        if event is not None and reply.kind == "execute":
            self.acc = SlotSet()  # the task is done; a new request may follow
        return result

    # -- helpers ------------------------------------------------------------

    def _select(self, interpretations):
        distinct = []
        for reading, slots in interpretations:
            if not any(slots == seen for _, seen in distinct):
                distinct.append((reading, slots))
        if len(distinct) == 1:
            reading, slots = distinct[0]
            return reading, slots, False
        return distinct[0][0], distinct[0][1], True

    def _fail_act(self, diagnostics, conflicts) -> DialogAct:
        if conflicts:
            text = f"{DID_NOT_UNDERSTAND} ({conflicts[0]})"
        elif diagnostics.unknown_tokens:
            text = f"{DID_NOT_UNDERSTAND} I do not know: " + ", ".join(diagnostics.unknown_tokens) + "."
        else:
            text = DID_NOT_UNDERSTAND
        pending = self.ctx.current_question
        if pending is not None and self.ctx.previous_utterance is not None:
            text += f" {self.ctx.previous_utterance.text}"
        return DialogAct("fail", text)

    def _execute(self, reply: DialogAct):
        try:
            event = self.store.apply(self.acc, self.today)
        except (NotFoundError, AmbiguousReferenceError, CalendarError) as err:
            return DialogAct("fail", f"I cannot do that: {err}."), None
        verb = {"schedule": "Scheduled", "cancel": "Canceled", "move": "Moved"}[
            self.acc.action_name
        ]
        act = DialogAct("execute", f"OK. {verb} {event.describe()}.", content=self.acc)
        return act, event

    def _finish_turn(self, utterance, reading, slots, reply):
        mentions = []
        if slots.event_name:
            mentions.append(slots.event_name)
        mentions += slots.event_partner
        if slots.event_place:
            mentions.append(slots.event_place)
        name = None
        if self.last_diagnostics and self.last_diagnostics.spanning_edges:
            for edge in self.last_diagnostics.spanning_edges:
                if edge.message == reading:
                    name = edge.cat
                    break
        update_context(
            self.ctx,
            reply,
            {"text": utterance, "construction_name": name, "reading": reading, "mentions": mentions},
        )
        self.transcript.append(f"S: {reply.surface_text}")

    def transcript_text(self) -> str:
        return "\n".join(self.transcript + [slots_block(self.acc)])


def run_turn(session: Session, utterance: str) -> TurnResult:
    """Module-level alias matching the operation name."""
    return session.run_turn(utterance)
