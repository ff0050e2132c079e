"""Agenda-driven bottom-up chart parser over constructions.

Edges combine by the fundamental rule: an active edge waiting for a
category meets an adjacent inactive edge whose category unifies with it.
Context gates which constructions may seed edges at all, filters prune
implausible readings as they complete, and the surviving spanning
messages are deduplicated -- two derivations with the same meaning are
one reading.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from . import messages as msg_mod
from . import ontology
from .context import ContextState
from .grammar import (
    Construction,
    Grammar,
    Literal,
    Slot,
    TemplateEnv,
    instantiate_template,
    side_condition_dict,
)
from .lexicon import Lexicon, Token, form_ordinal


class ChartOverflow(RuntimeError):
    """The chart exceeded the configured edge budget."""


@dataclass(frozen=True)
class Edge:
    """One chart entry: a word, or a (partial) construction instance.

    An edge with ``cursor < len(vehicle.sequence)`` is active and still
    looking for material; an inactive edge carries its instantiated
    category and message.
    """

    start: int
    end: int
    construction: Construction | None = None
    surface: str | None = None  # word edges only
    cat: ontology.Category | None = None
    children: tuple = ()
    message: tuple = ()
    cursor: int = 0
    bindings: tuple = ()

    @property
    def is_word(self) -> bool:
        return self.construction is None

    @property
    def is_inactive(self) -> bool:
        return self.is_word or self.cursor >= len(self.construction.vehicle.sequence)

    @property
    def is_active(self) -> bool:
        return not self.is_inactive

    def next_element(self):
        return self.construction.vehicle.sequence[self.cursor]

    def label(self) -> str:
        if self.is_word:
            return self.surface
        return ontology.render(self.cat if self.cat is not None else self.construction.name)

    def __repr__(self):
        state = "word" if self.is_word else ("inactive" if self.is_inactive else f"active@{self.cursor}")
        return f"Edge({self.start},{self.end},{self.label()},{state})"


@dataclass(frozen=True)
class Filter:
    """A domain/application pruning rule; filters only ever remove candidates."""

    name: str
    applicability: tuple = ()  # ((relation, pattern), ...)
    predicate: tuple = ()  # frozen dict items

    def applies_in(self, ctx: ContextState) -> bool:
        from .context import constraint_holds

        return all(
            constraint_holds(relation, pattern, "require", ctx)
            for relation, pattern in self.applicability
        )

    def rejects(self, edge: Edge) -> bool:
        spec = dict(self.predicate)
        kind = spec.get("kind")
        if kind == "act_pp_type_not_in":
            allowed = set(spec.get("types", []))
            for inner in msg_mod.get_all(edge.message, "act_pp_msg"):
                if msg_mod.get(inner, "type") not in allowed:
                    return True
            return False
        if kind == "pp_mod_on_category":
            pattern = ontology.parse_category(spec["category"])
            if edge.cat is None or ontology.unify(pattern, edge.cat) is None:
                return False
            return msg_mod.get(edge.message, "pp_msg") is not None
        if kind == "minute_off_grid":
            increment = spec.get("increment", 5)
            return any(m % increment != 0 for m in _minutes_in(edge.message))
        raise ValueError(f"unknown filter predicate kind {kind!r}")


def _minutes_in(value):
    if msg_mod.is_pairs(value) and isinstance(value, tuple):
        for attr, inner in value:
            if attr == "minute" and isinstance(inner, int):
                yield inner
            else:
                yield from _minutes_in(inner)


def build_filters(specs) -> list[Filter]:
    out = []
    for spec in specs:
        out.append(
            Filter(
                name=spec["name"],
                applicability=tuple(sorted(spec.get("applicability", {}).items())),
                predicate=tuple(sorted(spec.get("predicate", {}).items())),
            )
        )
    return out


def trigger(construction: Construction, ctx: ContextState) -> bool:
    """May this construction seed edges under the given context?

    Every context constraint must hold; a construction with an empty C
    always triggers.
    """
    return all(constraint.holds(ctx) for constraint in construction.context)


def apply_filters(candidates, ctx: ContextState, grammar: Grammar, disabled=frozenset()):
    """Remove every candidate edge rejected by an applicable filter."""
    kept, _ = _apply_filters(candidates, ctx, grammar.filters, disabled)
    return kept


def _apply_filters(candidates, ctx, filters, disabled):
    active = [f for f in filters if f.name not in disabled and f.applies_in(ctx)]
    kept, fired = [], []
    for edge in candidates:
        rejected = next((f.name for f in active if f.rejects(edge)), None)
        if rejected is None:
            kept.append(edge)
        else:
            fired.append((edge, rejected))
    return kept, fired


@dataclass
class ParseDiagnostics:
    """Everything a caller may want to inspect about one parse."""

    tokens: list = field(default_factory=list)
    inactive_edges: list = field(default_factory=list)  # construction edges, in addition order
    spanning_edges: list = field(default_factory=list)
    unknown_tokens: list = field(default_factory=list)
    filtered: list = field(default_factory=list)  # (edge, filter name)
    active_edge_count: int = 0

    @property
    def inactive_edge_count(self) -> int:
        return len(self.inactive_edges)


def _ordinal_den(message):
    return msg_mod.get(message, "den")


def _side_conditions_hold(construction, child_edges, bindings) -> bool:
    for raw in construction.vehicle.side_conditions:
        sc = side_condition_dict(raw)
        kind = sc.get("kind")
        if kind == "subcat":
            continue  # lexical metadata consumed by default resolution
        if kind == "ordinal_suffix":
            numeral = child_edges.get(sc["numeral"])
            suffix = child_edges.get(sc["suffix"])
            if numeral is None or suffix is None:
                return False
            if form_ordinal(_ordinal_den(numeral.message), _ordinal_den(suffix.message)) is None:
                return False
        elif kind == "den_range":
            child = child_edges.get(sc["var"])
            value = _ordinal_den(child.message) if child else None
            if not isinstance(value, int) or not sc["min"] <= value <= sc["max"]:
                return False
        else:
            raise ValueError(f"unknown side condition kind {kind!r}")
    return True


def _freeze_bindings(bindings: dict) -> tuple:
    return tuple(sorted(bindings.items()))


def combine(active: Edge, inactive: Edge, grammar: Grammar, ctx: ContextState | None = None) -> Edge | None:
    """The fundamental rule: extend an active edge with an adjacent inactive one.

    Returns the advanced edge, the completed (instantiated) edge, or None
    when the next vehicle element does not match or a side condition or
    context re-check fails at completion.
    """
    if active.end != inactive.start:
        return None
    element = active.next_element()
    bindings = dict(active.bindings)
    if isinstance(element, Literal):
        if not inactive.is_word or inactive.surface != element.token:
            return None
    else:
        if inactive.is_word or not inactive.is_inactive:
            return None
        unified = ontology.unify(element.cat, inactive.cat, bindings)
        if unified is None:
            return None
        bindings = unified
    children = active.children + (inactive,)
    cursor = active.cursor + 1
    edge = Edge(
        start=active.start,
        end=inactive.end,
        construction=active.construction,
        children=children,
        cursor=cursor,
        bindings=_freeze_bindings(bindings),
    )
    if cursor < len(active.construction.vehicle.sequence):
        return edge
    return _complete(edge, bindings, grammar, ctx)


def _complete(edge: Edge, bindings: dict, grammar: Grammar, ctx: ContextState | None) -> Edge | None:
    construction = edge.construction
    child_edges = {}
    for element, child in zip(construction.vehicle.sequence, edge.children):
        if isinstance(element, Slot):
            child_edges[element.var] = child
    if not _side_conditions_hold(construction, child_edges, bindings):
        return None
    if ctx is not None and not trigger(construction, ctx):
        return None  # completion-time re-check of the preconditions
    cat = ontology.apply_bindings(construction.name, bindings)
    if not ontology.is_ground(cat):
        return None
    env = TemplateEnv(
        child_messages={var: e.message for var, e in child_edges.items()},
        child_cats={var: e.cat for var, e in child_edges.items()},
        bindings=bindings,
        meaning_types=grammar.meaning_types,
    )
    message = instantiate_template(construction.message, env)
    return Edge(
        start=edge.start,
        end=edge.end,
        construction=construction,
        cat=cat,
        children=edge.children,
        message=message,
        cursor=edge.cursor,
        bindings=edge.bindings,
    )


def _seed(construction: Construction, first_inactive: Edge, grammar: Grammar, ctx) -> Edge | None:
    stub = Edge(
        start=first_inactive.start,
        end=first_inactive.start,
        construction=construction,
        cursor=0,
    )
    return combine(stub, first_inactive, grammar, ctx)


def parse(
    tokens,
    ctx: ContextState,
    grammar: Grammar,
    *,
    lexicon: Lexicon | None = None,
    disable_filters=frozenset(),
    max_edges: int = 50_000,
):
    """Parse tokens under a context, returning (readings, diagnostics).

    Readings are the distinct messages of inactive edges spanning the
    whole input; an unparseable utterance yields an empty list and the
    diagnostics carry the chart and unknown-token list.  Pass
    ``disable_filters=True`` (or a set of names) to switch pruning off.
    """
    if tokens and isinstance(tokens[0], str):
        tokens = [Token(t, i) for i, t in enumerate(tokens)]
    lexicon = lexicon or Lexicon(grammar)
    if disable_filters is True:
        filters = []
    else:
        filters = [f for f in grammar.filters if f.name not in disable_filters]

    diagnostics = ParseDiagnostics(tokens=list(tokens))
    diagnostics.unknown_tokens = lexicon.unknown_tokens(tokens)
    n = len(tokens)

    phrasal = [c for c in grammar.phrasal_constructions if trigger(c, ctx)]
    literal_first: dict[str, list[Construction]] = {}
    slot_first: list[tuple[Construction, Slot]] = []
    for c in phrasal:
        head = c.vehicle.sequence[0]
        if isinstance(head, Literal):
            literal_first.setdefault(head.token, []).append(c)
        else:
            slot_first.append((c, head))

    chart: set[Edge] = set()
    inactive_by_start: dict[int, list[Edge]] = {}
    active_by_end: dict[int, list[Edge]] = {}
    agenda = deque(Edge(start=t.position, end=t.position + 1, surface=t.surface) for t in tokens)

    def push(edge: Edge | None):
        if edge is not None:
            agenda.append(edge)

    def completed(edge: Edge | None) -> Edge | None:
        """Run filters over a freshly completed inactive edge."""
        if edge is None or edge.is_active:
            return edge
        kept, fired = _apply_filters([edge], ctx, filters, frozenset())
        diagnostics.filtered.extend(fired)
        return kept[0] if kept else None

    while agenda:
        edge = agenda.popleft()
        if edge in chart:
            continue
        if len(chart) >= max_edges:
            raise ChartOverflow(f"chart exceeded {max_edges} edges")
        chart.add(edge)

        if edge.is_inactive:
            inactive_by_start.setdefault(edge.start, []).append(edge)
            if not edge.is_word:
                diagnostics.inactive_edges.append(edge)
            # fundamental rule against waiting active edges
            for active in list(active_by_end.get(edge.start, ())):
                push(completed(combine(active, edge, grammar, ctx)))
            # bottom-up seeding
            if edge.is_word:
                for entry in lexicon.lookup(edge.surface, ctx):
                    push(completed(_seed(entry, edge, grammar, ctx)))
                for c in literal_first.get(edge.surface, ()):
                    push(completed(_seed(c, edge, grammar, ctx)))
            else:
                for c, head in slot_first:
                    if ontology.unify(head.cat, edge.cat) is not None:
                        push(completed(_seed(c, edge, grammar, ctx)))
        else:
            active_by_end.setdefault(edge.end, []).append(edge)
            diagnostics.active_edge_count += 1
            for inactive in list(inactive_by_start.get(edge.end, ())):
                push(completed(combine(edge, inactive, grammar, ctx)))

    diagnostics.spanning_edges = [
        e for e in diagnostics.inactive_edges if e.start == 0 and e.end == n
    ]
    readings = msg_mod.dedup(e.message for e in diagnostics.spanning_edges)
    return readings, diagnostics


# ---------------------------------------------------------------------------
# Trace rendering (the "| ?- li." chart listing)
# ---------------------------------------------------------------------------


def edge_line(edge: Edge, tokens) -> str:
    covered = ",".join(t.surface for t in tokens[edge.start : edge.end])
    children = ",".join(child.label() for child in edge.children)
    return f"* {edge.start},{edge.end},[{covered}] : {edge.label()} -> [{children}]"


def chart_trace(diagnostics: ParseDiagnostics) -> list[str]:
    """One line per inactive edge, plus an indented message line when non-empty."""
    lines = []
    for edge in diagnostics.inactive_edges:
        lines.append(edge_line(edge, diagnostics.tokens))
        if edge.message:
            lines.append("  " + msg_mod.render(edge.message))
    return lines
