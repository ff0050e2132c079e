"""Tokenization and token-to-lexical-construction lookup.

Lexical entries live in the grammar file as constructions whose vehicle
is all literals; this module indexes them and adds the closed-class form
rules the parser needs: digit numerals, clock times, and the English
ordinal-suffix table that keeps "3 th" out of the chart.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import ontology
from .grammar import Construction, Grammar, Vehicle, Literal

_SPLIT_ORDINAL = re.compile(r"^(\d+)(st|nd|rd|th)$")
_NUMERAL = re.compile(r"^\d+$")
_CLOCKTIME = re.compile(r"^(\d{1,2})[:.](\d{2})$")
# Punctuation is stripped except when it glues digits together (8:30, 8.00).
_STRIP = re.compile(r"(?<!\d)[.,!?;:()\"](?!\d)|[.,!?;:()\"]+$")


@dataclass(frozen=True)
class Token:
    surface: str
    position: int


def tokenize(utterance: str) -> list[Token]:
    """Lowercase, strip punctuation, split ordinal suffixes off numerals.

    "on November 11th with Martin." -> [on, november, 11, th, with, martin]
    Times written 8:30 or 8.00 stay whole.  Idempotent on its own output.
    """
    out = []
    for chunk in utterance.lower().split():
        prev = None
        while chunk and chunk != prev:  # strip to a fixpoint: ' and : can nest
            prev = chunk
            chunk = _STRIP.sub("", chunk.strip("'\""))
        if not chunk:
            continue
        m = _SPLIT_ORDINAL.match(chunk)
        if m:
            out.append(m.group(1))
            out.append(m.group(2))
        else:
            out.append(chunk)
    return [Token(surface, i) for i, surface in enumerate(out)]


# ---------------------------------------------------------------------------
# Ordinal suffixes
# ---------------------------------------------------------------------------

ORDINAL_SUFFIXES = ("st", "nd", "rd", "th")


def ordinal_suffix(n: int) -> str:
    """The one correct English suffix for a positive integer."""
    if n <= 0:
        raise ValueError("ordinals are positive")
    if n % 100 in (11, 12, 13):
        return "th"
    return {1: "st", 2: "nd", 3: "rd"}.get(n % 10, "th")


def form_ordinal(n, suffix: str):
    """Combine a numeral with a suffix token into an ordinal message.

    Returns ((den, n),) when the suffix is the correct one for n, else
    None -- the parser creates no edge for mismatches like "3 th".
    """
    try:
        value = int(n)
    except (TypeError, ValueError):
        return None
    if value <= 0 or suffix not in ORDINAL_SUFFIXES:
        return None
    if ordinal_suffix(value) != suffix:
        return None
    return (("den", value),)


# ---------------------------------------------------------------------------
# Lookup
# ---------------------------------------------------------------------------

NUMERAL_CAT = ontology.Category("numeral")
CLOCKTIME_CAT = ontology.Category("clocktime")


def _synthetic(name: str, token: str, message) -> Construction:
    return Construction(
        name=ontology.Category(name),
        ctype="constituency",
        context=(),
        vehicle=Vehicle((Literal(token),)),
        message=tuple(("pair", attr, ("lit", value)) for attr, value in message),
    )


class Lexicon:
    """Index over the grammar's lexical entries plus synthetic number forms."""

    def __init__(self, grammar: Grammar):
        self.grammar = grammar
        self._by_first: dict[str, list[Construction]] = {}
        self._all_literals: set[str] = set()
        for c in grammar.constructions:
            for el in c.vehicle.sequence:
                if isinstance(el, Literal):
                    self._all_literals.add(el.token)
            if c.is_lexical:
                first = c.vehicle.sequence[0].token
                self._by_first.setdefault(first, []).append(c)

    def lookup(self, token: Token | str, ctx) -> list[Construction]:
        """Lexical constructions whose first literal matches the token and
        whose context constraints hold.  Multiword entries come back as
        partial matches for the parser to complete."""
        surface = token.surface if isinstance(token, Token) else token
        found = [
            c
            for c in self._by_first.get(surface, [])
            if all(constraint.holds(ctx) for constraint in c.context)
        ]
        synth = self._synthetic_for(surface)
        if synth is not None:
            found.append(synth)
        return found

    def _synthetic_for(self, surface: str) -> Construction | None:
        if _NUMERAL.match(surface):
            return _synthetic("numeral", surface, (("den", int(surface)),))
        m = _CLOCKTIME.match(surface)
        if m:
            hour, minute = int(m.group(1)), int(m.group(2))
            if hour <= 23 and minute <= 59:
                den = (("hour", hour), ("minute", minute))
                return _synthetic("clocktime", surface, (("den", den),))
        return None

    def known(self, surface: str) -> bool:
        """Context-independent: could any entry or vehicle literal cover this?"""
        return (
            surface in self._all_literals
            or self._synthetic_for(surface) is not None
        )

    def unknown_tokens(self, tokens: list[Token]) -> list[str]:
        return [t.surface for t in tokens if not self.known(t.surface)]
