"""Category terms and the subsumption/unification operations over them.

Grammar categories double as an ontology: the nesting of a term encodes
its position in the semantic taxonomy, so ``np(time(month))`` is a noun
phrase whose referent is a month, and ``np(time)`` subsumes it.  Category
terms may contain variables (``np(X)``); unifying such a pattern against
a ground category binds the variables.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

DEFAULT_MAX_DEPTH = 6

_ANON = itertools.count(1)

_IDENT_RE = re.compile(r"[A-Za-z0-9_.'+-]+")
_VAR_RE = re.compile(r"^[A-Z][A-Za-z0-9_]*$")


class CategoryError(ValueError):
    """Raised for malformed category terms."""


@dataclass(frozen=True)
class Variable:
    """A named hole in a category pattern; ``_`` parses to a fresh one."""

    id: str

    def __repr__(self):
        return f"Variable({self.id})"

    @property
    def anonymous(self) -> bool:
        return self.id.startswith("_")


@dataclass(frozen=True)
class Category:
    """A functor with zero or more category/variable arguments."""

    functor: str
    args: tuple = field(default_factory=tuple)

    def __repr__(self):
        return f"Category({render(self)})"


Term = Category | Variable
Bindings = dict  # variable id -> ground Category


def parse_category(text: str, max_depth: int = DEFAULT_MAX_DEPTH) -> Term:
    """Parse a term like ``np(time(month))`` or ``pp(on,time)``.

    Identifiers matching ``[A-Z]...`` are variables; ``_`` is a fresh
    anonymous variable per occurrence.  Raises CategoryError on syntax
    errors or when nesting exceeds ``max_depth``.
    """
    pos = 0
    text = text.strip()

    def error(msg):
        return CategoryError(f"{msg} at position {pos} in {text!r}")

    def parse_term():
        nonlocal pos
        m = _IDENT_RE.match(text, pos)
        if not m:
            raise error("expected identifier")
        name = m.group(0)
        pos = m.end()
        if name == "_":
            return Variable(f"_{next(_ANON)}")
        if _VAR_RE.match(name):
            return Variable(name)
        args = []
        if pos < len(text) and text[pos] == "(":
            pos += 1
            while True:
                args.append(parse_term())
                if pos >= len(text):
                    raise error("unterminated argument list")
                if text[pos] == ",":
                    pos += 1
                    continue
                if text[pos] == ")":
                    pos += 1
                    break
                raise error(f"unexpected character {text[pos]!r}")
        return Category(name, tuple(args))

    term = parse_term()
    while pos < len(text) and text[pos] == " ":
        pos += 1
    if pos != len(text):
        raise error("trailing input")
    d = depth(term)
    if d > max_depth:
        raise CategoryError(f"category {text!r} nests {d} levels, limit is {max_depth}")
    return term


def render(term: Term) -> str:
    """Inverse of parse_category; no whitespace, anonymous vars as ``_``."""
    if isinstance(term, Variable):
        return "_" if term.anonymous else term.id
    if not term.args:
        return term.functor
    return f"{term.functor}({','.join(render(a) for a in term.args)})"


def depth(term: Term) -> int:
    if isinstance(term, Variable) or not term.args:
        return 1
    return 1 + max(depth(a) for a in term.args)


def size(term: Term) -> int:
    if isinstance(term, Variable):
        return 1
    return 1 + sum(size(a) for a in term.args)


def is_ground(term: Term) -> bool:
    if isinstance(term, Variable):
        return False
    return all(is_ground(a) for a in term.args)


def variables_of(term: Term) -> set:
    """Named (non-anonymous) variable ids occurring in a pattern."""
    if isinstance(term, Variable):
        return set() if term.anonymous else {term.id}
    out = set()
    for a in term.args:
        out |= variables_of(a)
    return out


def functors_of(term: Term) -> set:
    if isinstance(term, Variable):
        return set()
    out = {term.functor}
    for a in term.args:
        out |= functors_of(a)
    return out


def apply_bindings(term: Term, bindings: Bindings) -> Term:
    """Substitute bound variables; unbound variables stay in place."""
    if isinstance(term, Variable):
        return bindings.get(term.id, term)
    if not term.args:
        return term
    return Category(term.functor, tuple(apply_bindings(a, bindings) for a in term.args))


def subsumes(general: Category, specific: Category) -> bool:
    """Is ``specific`` at or below ``general`` in the category tree?

    Nesting induces the ordering: ``f`` subsumes ``f(anything)`` and
    ``f(a)`` subsumes ``f(a(b))``.  Both terms must be ground.
    """
    if not (is_ground(general) and is_ground(specific)):
        raise ValueError("subsumes is defined on ground categories only")
    return _subsumes(general, specific)


def _subsumes(general: Category, specific: Category) -> bool:
    if general.functor != specific.functor:
        return False
    if len(general.args) > len(specific.args):
        return False
    return all(_subsumes(g, s) for g, s in zip(general.args, specific.args))


def unify(pattern: Term, ground: Category, bindings: Bindings | None = None) -> Bindings | None:
    """Match a pattern against a ground category, returning bindings.

    Succeeds when the pattern, after substitution, subsumes the ground
    term; repeated variables must bind to equal categories.  Returns
    None on failure (failure is an ordinary result, not an error).
    """
    if not is_ground(ground):
        raise ValueError("unify target must be ground")
    out = dict(bindings) if bindings else {}
    if _unify(pattern, ground, out):
        return out
    return None


def _unify(pattern: Term, ground: Category, bindings: Bindings) -> bool:
    if isinstance(pattern, Variable):
        if pattern.anonymous:
            return True
        bound = bindings.get(pattern.id)
        if bound is not None:
            return bound == ground
        bindings[pattern.id] = ground
        return True
    if pattern.functor != ground.functor:
        return False
    if len(pattern.args) > len(ground.args):
        return False
    return all(_unify(p, g, bindings) for p, g in zip(pattern.args, ground.args))


def patterns_compatible(a: Term, b: Term) -> bool:
    """Can two patterns describe a common ground category?

    Used for context gating, where both the constraint and the current
    context value may contain variables.  Variables match anything;
    missing trailing arguments on either side are unconstrained.
    """
    if isinstance(a, Variable) or isinstance(b, Variable):
        return True
    if a.functor != b.functor:
        return False
    return all(patterns_compatible(x, y) for x, y in zip(a.args, b.args))


class MeaningTypeTable:
    """Maps grammar categories to the attribute naming their meaning type.

    Lookup is by subsumption with the most specific entry winning, so a
    table holding ``np(time) -> event_time`` answers for
    ``np(time(hour))`` as well.
    """

    def __init__(self, entries=()):
        self._entries: list[tuple[Category, str]] = []
        for cat, attr in entries:
            self.add(cat, attr)

    def add(self, cat: Category | str, attr: str):
        if isinstance(cat, str):
            cat = parse_category(cat)
        if not is_ground(cat):
            raise CategoryError(f"meaning-type key {render(cat)} must be ground")
        self._entries.append((cat, attr))

    def meaning_type_of(self, cat: Category) -> str | None:
        """The meaning-type attribute for a category, or None if unregistered."""
        best = None
        best_size = -1
        for key, attr in self._entries:
            if _subsumes(key, cat) and size(key) > best_size:
                best, best_size = attr, size(key)
        return best

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)
