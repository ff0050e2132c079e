"""caltalk: a construction-grammar dialog engine for calendar scheduling.

The grammar pairs forms with meanings and application contexts; the
chart parser emits flat attribute-value messages; the semantic engine
fills slots; the dialogue manager asks for what is missing and drives
the calendar.
"""

from .context import ContextState
from .grammar import Grammar, load_grammar, load_grammar_file, validate_grammar
from .lexicon import Lexicon, tokenize
from .ontology import Category, Variable, parse_category, subsumes, unify
from .parser import chart_trace, parse

__all__ = [
    "Category",
    "ContextState",
    "Grammar",
    "Lexicon",
    "Variable",
    "chart_trace",
    "load_grammar",
    "load_grammar_file",
    "parse",
    "parse_category",
    "subsumes",
    "tokenize",
    "unify",
]

__version__ = "0.1.0"
