import pytest
from hypothesis import given, strategies as st

from caltalk import ontology
from caltalk.grammar import (
    Grammar,
    GrammarError,
    load_grammar,
    resolve_defaults,
    template_variables,
    validate_grammar,
)

HEADER = (
    '{"header": {"domain": "calendar", "category_alphabet": '
    '["np","n","vp","verb","time","month","day","person","action","affect",'
    '"stative","x","y","z","go","hit","know"], '
    '"verb_class_defaults": {"action": {"subj": "agent", "obj": "object"}, '
    '"affect": {"subj": "agent", "obj": "target", "comp": "manip"}, "stative": {}}}}'
)


def _grammar(*docs):
    return load_grammar("\n".join((HEADER,) + docs))


# --- loading -----------------------------------------------------------------

def test_empty_file_is_a_valid_empty_grammar():
    g = load_grammar("")
    assert g.constructions == []
    assert validate_grammar(g) == []


def test_calendar_grammar_loads_cleanly(grammar):
    assert len(grammar.phrasal_constructions) >= 40
    assert len(grammar.lexical_entries) >= 150
    assert validate_grammar(grammar) == []


def test_core_constructions_present(grammar):
    expected = [
        "sent(assert,svo(_))",
        "sent(imp)",
        "sent(assrt,no.but.S)",
        "np(X)",
        "np(time(day))",
        "pp(on,time)",
        "pp_list(_,_)",
        "ordinal",
        "verb(perception(see))",
        "verb(affect(hit))",
        "pronoun(him)",
        "determiner(the)",
    ]
    for pattern in expected:
        assert grammar.find(pattern), f"{pattern} missing from the shipped grammar"


def test_syntax_error_reports_line():
    with pytest.raises(GrammarError) as err:
        load_grammar(HEADER + "\n{not json}")
    assert "line 2" in str(err.value)


def test_unknown_category_symbol_rejected():
    with pytest.raises(GrammarError) as err:
        _grammar('{"name": "np(bogus)", "ctype": "constituency",'
                 ' "vehicle": {"sequence": ["w"]}, "message": []}')
    assert "bogus" in str(err.value)


def test_message_variable_must_come_from_vehicle():
    with pytest.raises(GrammarError) as err:
        _grammar('{"name": "np(x)", "ctype": "constituency",'
                 ' "vehicle": {"sequence": ["w"]}, "message": [["den", "m(Z)"]]}')
    assert "Z" in str(err.value)


def test_unknown_context_relation_rejected():
    with pytest.raises(GrammarError):
        _grammar('{"name": "np(x)", "ctype": "constituency",'
                 ' "context": [{"relation": "weather", "pattern": "sunny"}],'
                 ' "vehicle": {"sequence": ["w"]}, "message": []}')


def test_bad_ctype_rejected():
    with pytest.raises(GrammarError):
        _grammar('{"name": "np(x)", "ctype": "thing",'
                 ' "vehicle": {"sequence": ["w"]}, "message": []}')


# --- validation --------------------------------------------------------------

def test_duplicate_name_vehicle_is_an_error():
    doc = ('{"name": "np(x)", "ctype": "constituency",'
           ' "vehicle": {"sequence": ["w"]}, "message": []}')
    diagnostics = validate_grammar(_grammar(doc, doc))
    assert any(d.severity == "error" and "duplicate" in d.message for d in diagnostics)


def test_same_form_different_meaning_warns():
    a = ('{"name": "np(x)", "ctype": "constituency",'
         ' "vehicle": {"sequence": ["w"]}, "message": [["den", "left"]]}')
    b = ('{"name": "np(y)", "ctype": "constituency",'
         ' "vehicle": {"sequence": ["w"]}, "message": [["den", "right"]]}')
    diagnostics = validate_grammar(_grammar(a, b))
    warnings = [d for d in diagnostics if d.severity == "warning"]
    assert len(warnings) == 1
    assert "np(x)" in warnings[0].message and "np(y)" in warnings[0].message


def test_same_form_same_meaning_is_fine():
    a = ('{"name": "np(x)", "ctype": "constituency",'
         ' "vehicle": {"sequence": ["w"]}, "message": [["den", "w"]]}')
    b = ('{"name": "np(y)", "ctype": "constituency",'
         ' "vehicle": {"sequence": ["v"]}, "message": [["den", "w"]]}')
    assert validate_grammar(_grammar(a, b)) == []


# --- verb-class defaults -------------------------------------------------------

def _verb(doc):
    g = _grammar(doc)
    return g.constructions[-1], g


def test_affect_verb_gets_agent_default():
    c, g = _verb(
        '{"name": "verb(affect(hit))", "ctype": "valency",'
        ' "vehicle": {"sequence": ["hit"], "side_conditions":'
        ' [{"kind": "subcat", "frame": ["subj(X)", "obj(Y)", "comp(Z)"]}]},'
        ' "message": [["den", "hit"], ["target", "Y"], ["manip", "Z"]]}'
    )
    attrs = [el[1] for el in c.message if el[0] == "pair"]
    assert attrs == ["den", "target", "manip", "agent"]


def test_stative_verb_gets_no_defaults():
    c, g = _verb(
        '{"name": "verb(stative(know))", "ctype": "valency",'
        ' "vehicle": {"sequence": ["know"], "side_conditions":'
        ' [{"kind": "subcat", "frame": ["subj(X)", "obj(Y)"]}]},'
        ' "message": [["den", "know"]]}'
    )
    attrs = [el[1] for el in c.message if el[0] == "pair"]
    assert attrs == ["den"]


def test_fully_specified_verb_unchanged():
    c, g = _verb(
        '{"name": "verb(affect(hit))", "ctype": "valency",'
        ' "vehicle": {"sequence": ["hit"], "side_conditions":'
        ' [{"kind": "subcat", "frame": ["subj(X)", "obj(Y)", "comp(Z)"]}]},'
        ' "message": [["den", "hit"], ["agent", "X"], ["target", "Y"], ["manip", "Z"]]}'
    )
    assert resolve_defaults(c, g) == c


def test_resolve_defaults_idempotent(grammar):
    for c in grammar.constructions:
        once = resolve_defaults(c, grammar)
        assert resolve_defaults(once, grammar) == once


# explicit fields always survive randomized default tables
roles = st.sampled_from(["agent", "object", "target", "manip", "perceiver"])


@given(
    table=st.fixed_dictionaries(
        {}, optional={"subj": roles, "obj": roles, "comp": roles}
    ),
    explicit=st.lists(st.sampled_from(["X", "Y", "Z"]), max_size=3, unique=True),
)
def test_explicit_roles_override_random_defaults(table, explicit):
    doc = {
        "name": "verb(action(go))",
        "ctype": "valency",
        "vehicle": {
            "sequence": ["go"],
            "side_conditions": [{"kind": "subcat", "frame": ["subj(X)", "obj(Y)", "comp(Z)"]}],
        },
        "message": [["den", "go"]] + [[f"role_{v.lower()}", v] for v in explicit],
    }
    import json

    header = {
        "header": {
            "category_alphabet": ["verb", "action", "go"],
            "verb_class_defaults": {"action": table},
        }
    }
    g = load_grammar(json.dumps(header) + "\n" + json.dumps(doc))
    c = g.constructions[0]
    pairs = [(el[1], el[2]) for el in c.message if el[0] == "pair"]
    # every explicit pair is intact
    for v in explicit:
        assert (f"role_{v.lower()}", ("var", v)) in pairs
    # no default was added for a variable that already has an explicit role
    for attr, vexpr in pairs:
        if attr.startswith("role_"):
            continue
        if vexpr[0] == "var":
            assert vexpr[1] not in explicit
    # idempotent under a second resolution
    assert resolve_defaults(c, g) == c


def test_template_variables_collects_references():
    from caltalk.grammar import _parse_template

    template = _parse_template(
        [["a", "m(X).den"], ["b", "mtype(Y)"], "m(Z)", ["c", [["d", "m(W)"]]]], None
    )
    assert template_variables(template) == {"X", "Y", "Z", "W"}
