"""Discourse context: the parameters construction preconditions talk about."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import ontology
from .ontology import Category, Term


@dataclass
class Utterance:
    """What the context remembers about one utterance."""

    text: str
    construction_name: Category | None = None


@dataclass
class Sentence:
    """Propositional record of the last content-bearing utterance."""

    text: str
    message: tuple = ()
    truth_value: int | None = None


@dataclass
class ContextState:
    """Session-scoped discourse parameters consulted during parsing.

    ``current_question`` holds the category pattern of the system's
    pending question (set iff the last system act asked one);
    ``current_discourse`` grows monotonically with mentioned entities.
    """

    previous_utterance: Utterance | None = None
    previous_sentence: Sentence | None = None
    current_question: Term | None = None
    current_domain: str | None = None
    current_application: str | None = None
    current_discourse: list = field(default_factory=list)
    speaker: str | None = None
    hearer: str | None = None
    topic: str | None = None
    language: str | None = None
    tags: list = field(default_factory=list)
    defaults: dict = field(default_factory=dict)

    def mention(self, entity):
        if entity not in self.current_discourse:
            self.current_discourse.append(entity)

    def is_empty(self) -> bool:
        return self == ContextState()


def constraint_holds(relation: str, pattern, mode: str, ctx: ContextState) -> bool:
    """Evaluate one context constraint.

    ``require`` constraints demand the parameter be present and match;
    ``focus`` constraints only restrict when the parameter is set, so an
    empty context triggers everything and a set one narrows the grammar.
    """
    value = _relation_value(relation, ctx)
    if value is None or value == [] or value == "":
        return mode != "require"
    return _matches(relation, pattern, value)


def _relation_value(relation: str, ctx: ContextState):
    if relation == "previous_utterance":
        return ctx.previous_utterance
    if relation == "previous_sentence":
        return ctx.previous_sentence
    if relation == "current_question":
        return ctx.current_question
    if relation == "current_domain":
        return ctx.current_domain
    if relation == "current_application":
        return ctx.current_application
    if relation == "current_discourse":
        return ctx.current_discourse
    if relation == "speaker":
        return ctx.speaker
    if relation == "hearer":
        return ctx.hearer
    if relation == "topic":
        return ctx.topic
    if relation == "language":
        return ctx.language
    if relation == "tag":
        return ctx.tags
    if relation == "default_value":
        return ctx.defaults or None
    return None


def _matches(relation: str, pattern, value) -> bool:
    if relation == "previous_utterance":
        name = value.construction_name if isinstance(value, Utterance) else None
        if name is None:
            return False
        return ontology.patterns_compatible(pattern, name)
    if relation == "current_question":
        return ontology.patterns_compatible(pattern, value)
    if relation == "current_discourse":
        if pattern == "nonempty":
            return bool(value)
        return pattern in value
    if relation == "tag":
        return pattern in value
    if relation == "default_value":
        return str(pattern) in value
    if isinstance(pattern, (Category, ontology.Variable)):
        target = value if isinstance(value, (Category, ontology.Variable)) else None
        if target is None and isinstance(value, str):
            try:
                target = ontology.parse_category(value)
            except ontology.CategoryError:
                return False
        return target is not None and ontology.patterns_compatible(pattern, target)
    return str(pattern) == str(value)
