"""Flat attribute-value messages, the meaning side of every construction.

A message is a tuple of ``(attribute, value)`` pairs; a value is an atom
(symbol or number) or one nested pair tuple.  Grouping attributes such as
``pp_msg`` wrap a complete sub-message and are transparent to the
flatness bound.
"""

from __future__ import annotations

# Attributes that wrap a whole sub-message rather than adding a semantic
# nesting level of their own.
GROUP_ATTRS = frozenset({"pp_msg", "act_pp_msg", "stmt"})

Value = object  # str | int | tuple of pairs
Message = tuple  # tuple of (attr, Value) pairs


def pairs(*items) -> Message:
    """Build a message from (attr, value) items, freezing nested lists."""
    return tuple((a, freeze(v)) for a, v in items)


def freeze(value):
    if isinstance(value, (list, tuple)):
        return tuple((a, freeze(v)) for a, v in value)
    return value


def is_pairs(value) -> bool:
    return isinstance(value, tuple) and all(
        isinstance(p, tuple) and len(p) == 2 and isinstance(p[0], str) for p in value
    )


def get(message: Message, attr: str, default=None):
    """First value for an attribute, or default."""
    for a, v in message:
        if a == attr:
            return v
    return default


def get_all(message: Message, attr: str) -> list:
    return [v for a, v in message if a == attr]


def semantic_depth(message: Message) -> int:
    """Attribute-nesting depth, not counting grouping wrappers."""
    best = 0
    for attr, value in message:
        if is_pairs(value):
            inner = semantic_depth(value)
            best = max(best, inner if attr in GROUP_ATTRS else inner + 1)
        else:
            best = max(best, 1)
    return best


def is_flat(message: Message, limit: int = 2) -> bool:
    """True when the message respects the two-level flatness bound."""
    return semantic_depth(message) <= limit


def render_value(value) -> str:
    if is_pairs(value) and isinstance(value, tuple):
        return render(value)
    if isinstance(value, bool):
        return "1" if value else "0"
    text = str(value)
    if any(ch in text for ch in " ,[]"):
        return f'"{text}"'
    return text


def render(message: Message) -> str:
    """Trace rendering: ``[[type,time(month)],[den,11]]``."""
    return "[" + ",".join(f"[{a},{render_value(v)}]" for a, v in message) + "]"


def canonical_key(message: Message):
    """Equality key for parse dedup.

    Order-insensitive at the top level of pairs, order-sensitive inside
    nested values: two groupings of the same pp list differ only in
    their top-level pair order and must collapse to one reading.
    """
    return tuple(sorted((a, _value_key(v)) for a, v in message))


def _value_key(value):
    if is_pairs(value) and isinstance(value, tuple):
        return ("pairs",) + tuple((a, _value_key(v)) for a, v in value)
    return ("atom", str(type(value).__name__), str(value))


def dedup(messages) -> list:
    """Distinct messages by canonical_key, keeping first-seen order."""
    seen = set()
    out = []
    for m in messages:
        key = canonical_key(m)
        if key not in seen:
            seen.add(key)
            out.append(m)
    return out
