"""Constructions and the grammar file that declares them.

A construction pairs a named category with three fields: context
preconditions (C), a vehicle describing its form (V), and a message
template describing its meaning (M).  The grammar file is line-oriented
UTF-8: one JSON document per line, ``#`` comments and blank lines
allowed.  A header document declares the category alphabet, the
meaning-type table, verb-class defaults and filters; every other
document is one construction.  Lexical entries are ordinary
constructions whose vehicle is all literals.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace

from . import context as context_mod
from . import messages as msg_mod
from . import ontology
from .ontology import Category, MeaningTypeTable, Term, Variable

DEFAULT_CONTEXT_VOCABULARY = (
    "previous_utterance",
    "previous_sentence",
    "current_question",
    "current_domain",
    "current_application",
    "current_discourse",
    "topic",
    "speaker",
    "hearer",
    "default_value",
    "language",
    "tag",
)

CTYPES = ("sentence_type", "constituency", "valency", "substitution")


class GrammarError(ValueError):
    """Raised when a grammar file cannot be loaded."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class Literal:
    """A vehicle element matched against one surface token."""

    token: str


@dataclass(frozen=True)
class Slot:
    """A vehicle element filled by a sub-construction of a given category."""

    var: str
    cat: Term


@dataclass(frozen=True)
class Vehicle:
    sequence: tuple
    side_conditions: tuple = ()

    @property
    def is_lexical(self) -> bool:
        return all(isinstance(e, Literal) for e in self.sequence)

    def literals(self):
        return [e.token for e in self.sequence if isinstance(e, Literal)]


@dataclass(frozen=True)
class ContextConstraint:
    relation: str
    pattern: object
    mode: str = "focus"  # "focus": restrict only when the parameter is set

    def holds(self, ctx) -> bool:
        return context_mod.constraint_holds(self.relation, self.pattern, self.mode, ctx)


@dataclass(frozen=True)
class Construction:
    name: Term
    ctype: str
    context: tuple = ()
    vehicle: Vehicle = None
    message: tuple = ()  # template elements
    source_line: int | None = None

    @property
    def is_lexical(self) -> bool:
        return self.vehicle.is_lexical

    def render_name(self) -> str:
        return ontology.render(self.name)

    def __repr__(self):
        return f"Construction({self.render_name()})"


# ---------------------------------------------------------------------------
# Message templates
#
# A template is a tuple of elements; each element is either
#   ("pair", attr, vexpr)           one attribute-value pair
#   ("splice", var, attrs, retag)   the pairs of a child's message
# and a vexpr is one of
#   ("lit", atom)                   literal symbol or number
#   ("var", name)                   a category variable's binding
#                                   (strings starting uppercase are variables;
#                                   grammar atoms are lowercase by convention)
#   ("msg", var)                    child's full message as nested value
#   ("proj", var, attr)             one attribute of a child's message
#   ("mtype", var)                  meaning type of the child's category
#   ("fn", name, (vexpr, ...))      registered combination function
#   ("pairs", ((attr, vexpr), ...)) nested pair template
# ---------------------------------------------------------------------------

_MSG_REF = re.compile(r"^m\(([A-Za-z0-9_]+)\)$")
_MSG_PROJ = re.compile(r"^m\(([A-Za-z0-9_]+)\)\.([A-Za-z0-9_]+)$")
_MTYPE_REF = re.compile(r"^mtype\(([A-Za-z0-9_]+)\)$")
_VAR_REF = re.compile(r"^[A-Z][A-Za-z0-9_]*$")


def _parse_vexpr(raw, line):
    if isinstance(raw, bool):
        return ("lit", int(raw))
    if isinstance(raw, (int, float)):
        return ("lit", raw)
    if isinstance(raw, str):
        m = _MSG_PROJ.match(raw)
        if m:
            return ("proj", m.group(1), m.group(2))
        m = _MSG_REF.match(raw)
        if m:
            return ("msg", m.group(1))
        m = _MTYPE_REF.match(raw)
        if m:
            return ("mtype", m.group(1))
        if _VAR_REF.match(raw):
            return ("var", raw)
        return ("lit", raw)
    if isinstance(raw, dict):
        if "fn" in raw:
            args = tuple(_parse_vexpr(a, line) for a in raw.get("args", []))
            if raw["fn"] not in TEMPLATE_FUNCTIONS:
                raise GrammarError(f"unknown template function {raw['fn']!r}", line)
            return ("fn", raw["fn"], args)
        raise GrammarError(f"bad value expression {raw!r}", line)
    if isinstance(raw, list):
        inner = []
        for item in raw:
            if not (isinstance(item, list) and len(item) == 2 and isinstance(item[0], str)):
                raise GrammarError(f"bad nested pair {item!r}", line)
            inner.append((item[0], _parse_vexpr(item[1], line)))
        return ("pairs", tuple(inner))
    raise GrammarError(f"bad value expression {raw!r}", line)


def _parse_template(raw, line):
    if raw in (None, []):
        return ()
    if not isinstance(raw, list):
        raise GrammarError("message must be a list", line)
    out = []
    for el in raw:
        if isinstance(el, str):
            m = _MSG_REF.match(el)
            if not m:
                raise GrammarError(f"bad message element {el!r}", line)
            out.append(("splice", m.group(1), None, None))
        elif isinstance(el, dict) and "splice" in el:
            attrs = el.get("attrs")
            out.append(("splice", el["splice"], tuple(attrs) if attrs else None, el.get("retag")))
        elif isinstance(el, list) and len(el) == 2 and isinstance(el[0], str):
            out.append(("pair", el[0], _parse_vexpr(el[1], line)))
        else:
            raise GrammarError(f"bad message element {el!r}", line)
    return tuple(out)


def template_variables(template) -> set:
    """Variables a template consumes (message or child references)."""
    out = set()

    def walk_vexpr(v):
        kind = v[0]
        if kind in ("msg", "proj", "mtype"):
            out.add(v[1])
        elif kind == "var":
            out.add(v[1])
        elif kind == "fn":
            for a in v[2]:
                walk_vexpr(a)
        elif kind == "pairs":
            for _, inner in v[1]:
                walk_vexpr(inner)

    for el in template:
        if el[0] == "splice":
            out.add(el[1])
        else:
            walk_vexpr(el[2])
    return out


def minutes_before_hour(minutes, hour):
    """Clock arithmetic for the "<m> to <h>" time reading (4 to 6 = 5:56)."""
    h = 12 if hour == 1 else hour - 1
    return (("hour", h), ("minute", 60 - minutes))


_TIME_FIELDS = ("minute", "hour", "day", "month", "weekday", "day_part", "relative")


def time_record(den, type_=None):
    """Normalize a time denotation into a keyed record.

    Lexical time entries carry atom denotations (november -> 11) typed by
    their category; composite time nps already build records.  Keying by
    the type keeps "on november" (month 11) distinct from "at 11" (hour).
    """
    if msg_mod.is_pairs(den) and isinstance(den, tuple):
        return den
    inner = None
    if isinstance(type_, str) and type_.startswith("time(") and type_.endswith(")"):
        inner = type_[5:-1]
    if inner in _TIME_FIELDS:
        return ((inner, den),)
    return ((("value"), den),)


def clock_with_meridiem(den, meridiem):
    """Attach am/pm to a clock-time record ("8:30 pm")."""
    return tuple(den) + (("meridiem", meridiem),)


TEMPLATE_FUNCTIONS = {
    "minutes_before_hour": minutes_before_hour,
    "time_record": time_record,
    "clock_with_meridiem": clock_with_meridiem,
}


class TemplateEnv:
    """Everything instantiation needs: children and variable bindings."""

    def __init__(self, child_messages, child_cats, bindings, meaning_types):
        self.child_messages = child_messages
        self.child_cats = child_cats
        self.bindings = bindings
        self.meaning_types = meaning_types


_MISSING = object()


def _eval_vexpr(v, env: TemplateEnv):
    kind = v[0]
    if kind == "lit":
        return v[1]
    if kind == "var":
        bound = env.bindings.get(v[1])
        return ontology.render(bound) if bound is not None else _MISSING
    if kind == "msg":
        m = env.child_messages.get(v[1])
        return m if m else _MISSING
    if kind == "proj":
        m = env.child_messages.get(v[1])
        if not m:
            return _MISSING
        value = msg_mod.get(m, v[2], _MISSING)
        return value
    if kind == "mtype":
        cat = env.child_cats.get(v[1])
        if cat is None or env.meaning_types is None:
            return _MISSING
        attr = env.meaning_types.meaning_type_of(cat)
        return attr if attr is not None else _MISSING
    if kind == "fn":
        args = [_eval_vexpr(a, env) for a in v[2]]
        if any(a is _MISSING for a in args):
            return _MISSING
        return msg_mod.freeze(TEMPLATE_FUNCTIONS[v[1]](*args))
    if kind == "pairs":
        out = []
        for attr, inner in v[1]:
            value = _eval_vexpr(inner, env)
            if value is not _MISSING:
                out.append((attr, value))
        return tuple(out) if out else _MISSING
    raise AssertionError(kind)


def instantiate_template(template, env: TemplateEnv) -> tuple:
    """Fill a template; pairs whose value cannot be computed are dropped."""
    out = []
    for el in template:
        if el[0] == "splice":
            _, var, attrs, retag = el
            child = env.child_messages.get(var) or ()
            for attr, value in child:
                if attrs is not None and attr not in attrs:
                    continue
                out.append((retag or attr, value))
        else:
            _, attr, vexpr = el
            value = _eval_vexpr(vexpr, env)
            if value is not _MISSING:
                out.append((attr, value))
    return tuple(out)


# ---------------------------------------------------------------------------
# Grammar container and loading
# ---------------------------------------------------------------------------


@dataclass
class Grammar:
    constructions: list = field(default_factory=list)
    category_alphabet: set = field(default_factory=set)
    context_vocabulary: tuple = DEFAULT_CONTEXT_VOCABULARY
    meaning_types: MeaningTypeTable = field(default_factory=MeaningTypeTable)
    filter_specs: list = field(default_factory=list)
    defaults: dict = field(default_factory=dict)
    domain: str | None = None
    application: str | None = None
    domain_mapping: dict = field(default_factory=dict)

    @property
    def lexical_entries(self) -> list:
        return [c for c in self.constructions if c.is_lexical]

    @property
    def phrasal_constructions(self) -> list:
        return [c for c in self.constructions if not c.is_lexical]

    @property
    def filters(self) -> list:
        from . import parser  # deferred: parser owns the Filter type

        return parser.build_filters(self.filter_specs)

    def find(self, name_pattern) -> list:
        """Constructions whose name is compatible with a pattern string."""
        if isinstance(name_pattern, str):
            name_pattern = ontology.parse_category(name_pattern)
        return [
            c
            for c in self.constructions
            if ontology.patterns_compatible(name_pattern, c.name)
        ]


def _parse_constraint(raw, vocabulary, line) -> ContextConstraint:
    if not isinstance(raw, dict) or "relation" not in raw:
        raise GrammarError(f"bad context constraint {raw!r}", line)
    relation = raw["relation"]
    if relation not in vocabulary:
        raise GrammarError(f"unknown context relation {relation!r}", line)
    pattern = raw.get("pattern")
    if relation in ("previous_utterance", "current_question") and isinstance(pattern, str):
        pattern = ontology.parse_category(pattern)
    mode = raw.get("mode", "focus")
    if mode not in ("focus", "require"):
        raise GrammarError(f"bad constraint mode {mode!r}", line)
    return ContextConstraint(relation, pattern, mode)


def _parse_vehicle(raw, line) -> Vehicle:
    if not isinstance(raw, dict) or "sequence" not in raw:
        raise GrammarError("vehicle must have a sequence", line)
    seq = []
    for el in raw["sequence"]:
        if isinstance(el, str):
            seq.append(Literal(el))
        elif isinstance(el, dict) and "var" in el and "cat" in el:
            seq.append(Slot(el["var"], ontology.parse_category(el["cat"])))
        else:
            raise GrammarError(f"bad vehicle element {el!r}", line)
    if not seq:
        raise GrammarError("vehicle sequence is empty", line)
    side = tuple(_freeze_json(sc) for sc in raw.get("side_conditions", []))
    return Vehicle(tuple(seq), side)


def _freeze_json(value):
    if isinstance(value, dict):
        return tuple(sorted((k, _freeze_json(v)) for k, v in value.items()))
    if isinstance(value, list):
        return tuple(_freeze_json(v) for v in value)
    return value


def side_condition_dict(sc) -> dict:
    return {k: list(v) if isinstance(v, tuple) else v for k, v in sc}


def _check_alphabet(term: Term, alphabet, line):
    unknown = ontology.functors_of(term) - alphabet
    if unknown:
        raise GrammarError(
            f"unknown category symbol(s) {sorted(unknown)} in {ontology.render(term)}", line
        )


def _construction_from_doc(doc, alphabet, vocabulary, line) -> Construction:
    for key in ("name", "ctype", "vehicle"):
        if key not in doc:
            raise GrammarError(f"construction missing {key!r}", line)
    name = ontology.parse_category(doc["name"])
    ctype = doc["ctype"]
    if ctype not in CTYPES:
        raise GrammarError(f"ctype must be one of {CTYPES}, got {ctype!r}", line)
    constraints = tuple(
        _parse_constraint(c, vocabulary, line) for c in doc.get("context", [])
    )
    vehicle = _parse_vehicle(doc["vehicle"], line)
    template = _parse_template(doc.get("message"), line)

    if alphabet:
        _check_alphabet(name, alphabet, line)
        for el in vehicle.sequence:
            if isinstance(el, Slot):
                _check_alphabet(el.cat, alphabet, line)

    # Every variable the message or context consumes must be introduced by
    # the vehicle (slots or subcat side conditions) or the name.
    introduced = ontology.variables_of(name)
    for el in vehicle.sequence:
        if isinstance(el, Slot):
            introduced.add(el.var)
            introduced |= ontology.variables_of(el.cat)
    for sc in vehicle.side_conditions:
        sc = side_condition_dict(sc)
        if sc.get("kind") == "subcat":
            for frame_slot in sc.get("frame", []):
                term = ontology.parse_category(frame_slot)
                introduced |= ontology.variables_of(term)
    used = template_variables(template)
    for constraint in constraints:
        if isinstance(constraint.pattern, (Category, Variable)):
            used |= ontology.variables_of(constraint.pattern)
    for missing in sorted(used - introduced):
        raise GrammarError(
            f"{ontology.render(name)} uses variable {missing!r}"
            " in message or context but not in vehicle or name",
            line,
        )
    return Construction(name, ctype, constraints, vehicle, template, line)


def load_grammar(source: str) -> Grammar:
    """Load a grammar from file text; raises GrammarError with a line number."""
    g = Grammar()
    saw_header = False
    for lineno, raw_line in enumerate(source.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as e:
            raise GrammarError(f"JSON syntax error at column {e.colno}: {e.msg}", lineno)
        if not isinstance(doc, dict):
            raise GrammarError("each document must be a JSON object", lineno)
        if "header" in doc:
            if saw_header:
                raise GrammarError("duplicate header document", lineno)
            saw_header = True
            _load_header(g, doc["header"], lineno)
        elif "domain_mapping" in doc:
            g.domain_mapping = doc["domain_mapping"]
        else:
            c = _construction_from_doc(
                doc, g.category_alphabet, g.context_vocabulary, lineno
            )
            g.constructions.append(c)
    g.constructions = [resolve_defaults(c, g) for c in g.constructions]
    return g


def load_grammar_file(path) -> Grammar:
    with open(path, encoding="utf-8") as fh:
        return load_grammar(fh.read())


def _load_header(g: Grammar, header, line):
    if not isinstance(header, dict):
        raise GrammarError("header must be an object", line)
    g.domain = header.get("domain")
    g.application = header.get("application")
    g.category_alphabet = set(header.get("category_alphabet", []))
    if header.get("context_vocabulary"):
        g.context_vocabulary = tuple(header["context_vocabulary"])
    for cat, attr in header.get("meaning_types", []):
        key = ontology.parse_category(cat)
        if g.category_alphabet:
            _check_alphabet(key, g.category_alphabet, line)
        g.meaning_types.add(key, attr)
    g.defaults = header.get("verb_class_defaults", {})
    g.filter_specs = list(header.get("filters", []))


# ---------------------------------------------------------------------------
# Verb-class defaults (nonmonotonic: explicit fields win)
# ---------------------------------------------------------------------------

_FRAME_SLOT = re.compile(r"^(subj|obj|comp)\(([A-Za-z0-9_]+)\)$")


def _subcat_frame(c: Construction):
    for sc in c.vehicle.side_conditions:
        sc = side_condition_dict(sc)
        if sc.get("kind") == "subcat":
            return sc.get("frame", [])
    return None


def verb_class(c: Construction) -> str | None:
    if isinstance(c.name, Category) and c.name.functor == "verb" and c.name.args:
        head = c.name.args[0]
        if isinstance(head, Category):
            return head.functor
    return None


def resolve_defaults(c: Construction, g: Grammar) -> Construction:
    """Fill unspecified semantic roles from the verb-class default table.

    Only verb entries carrying a subcat frame are affected.  A role is
    "specified" when the template already mentions the frame variable or
    the role attribute, so explicit fields always override the default.
    Idempotent.
    """
    frame = _subcat_frame(c)
    cls = verb_class(c)
    if frame is None or cls is None:
        return c
    table = g.defaults.get(cls)
    if not table:
        return c
    used_vars = template_variables(c.message)
    used_attrs = {el[1] for el in c.message if el[0] == "pair"}
    additions = []
    for frame_slot in frame:
        m = _FRAME_SLOT.match(frame_slot)
        if not m:
            continue
        kind, var = m.groups()
        role = table.get(kind)
        if role is None or var in used_vars or role in used_attrs:
            continue
        additions.append(("pair", role, ("var", var)))
        used_attrs.add(role)
        used_vars.add(var)
    if not additions:
        return c
    return replace(c, message=c.message + tuple(additions))


# ---------------------------------------------------------------------------
# Grammar lint
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str

    def __str__(self):
        return f"{self.severity}: {self.message}"


def _canonical_vehicle(v: Vehicle):
    """Vehicle shape with variables renamed positionally, for comparisons."""
    renames = {}

    def rename_term(t):
        if isinstance(t, Variable):
            if t.anonymous:
                return "_"
            return renames.setdefault(t.id, f"V{len(renames)}")
        return (t.functor, tuple(rename_term(a) for a in t.args))

    out = []
    for el in v.sequence:
        if isinstance(el, Literal):
            out.append(("lit", el.token))
        else:
            renames.setdefault(el.var, f"V{len(renames)}")
            out.append(("slot", renames[el.var], rename_term(el.cat)))
    return tuple(out), v.side_conditions


def _canonical_context(constraints):
    return tuple(
        sorted(
            (c.relation, ontology.render(c.pattern) if isinstance(c.pattern, (Category, Variable)) else str(c.pattern), c.mode)
            for c in constraints
        )
    )


def validate_grammar(g: Grammar) -> list:
    """Cross-construction checks; an empty list means the grammar is clean.

    Errors: duplicate (name, vehicle) pairs.  Warnings: two constructions
    with equivalent vehicle and context but different messages, which
    violates the principle that a difference of form implies a difference
    of meaning (same form + same context should not mean two things).
    """
    diagnostics = []
    by_name_vehicle = {}
    by_form = {}
    for c in g.constructions:
        vkey = _canonical_vehicle(c.vehicle)
        nkey = (ontology.render(c.name), vkey)
        if nkey in by_name_vehicle:
            diagnostics.append(
                Diagnostic(
                    "error",
                    f"duplicate construction {c.render_name()} with identical vehicle"
                    f" (lines {by_name_vehicle[nkey].source_line} and {c.source_line})",
                )
            )
        else:
            by_name_vehicle[nkey] = c
        fkey = (vkey, _canonical_context(c.context))
        by_form.setdefault(fkey, []).append(c)
    for group in by_form.values():
        if len(group) < 2:
            continue
        templates = {repr(c.message) for c in group}
        if len(templates) > 1:
            names = ", ".join(sorted(c.render_name() for c in group))
            diagnostics.append(
                Diagnostic(
                    "warning",
                    f"constructions {names} share vehicle and context but differ in message",
                )
            )
    return diagnostics
