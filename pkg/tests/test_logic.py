from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from caio.logic import (
    And,
    Atom,
    Bel,
    DEFAULT_PRIORITY,
    Emo,
    EmotionCategory,
    FormulaSyntaxError,
    FVar,
    Goal,
    Ideal,
    Not,
    Resp,
    Substitution,
    UnboundVariable,
    contradiction_renderings,
    is_ground,
    match,
    negate,
    parse_formula,
    parse_pattern,
    planning_key,
    render_formula,
    substitute,
    validate_formula,
)


def test_parse_ideal_with_priority():
    f = parse_formula("Ideal(nao, not unplugged, 0.8)")
    assert f == Ideal("nao", Not(Atom("unplugged")), 0.8)


def test_parse_nested_belief():
    f = parse_formula("Bel(nao, Resp(wafa, unplugged))")
    assert f == Bel("nao", Resp("wafa", Atom("unplugged")))


def test_parse_double_negation_normalizes():
    assert parse_formula("not not p") == Atom("p")


def test_parse_defaults_priority():
    assert parse_formula("Goal(nao, tidy)") == Goal("nao", Atom("tidy"), DEFAULT_PRIORITY)


def test_parse_case_insensitive_lowercases():
    assert parse_formula("BEL(Nao, Unplugged)") == Bel("nao", Atom("unplugged"))


def test_parse_atom_with_args():
    assert parse_formula("known(paris, t8)") == Atom("known", ("paris", "t8"))


def test_parse_errors_carry_position_and_expectation():
    with pytest.raises(FormulaSyntaxError) as exc:
        parse_formula("Bel(nao unplugged)")
    assert exc.value.position == 8
    assert "','" in exc.value.expected


def test_parse_rejects_priority_on_bel():
    with pytest.raises(FormulaSyntaxError):
        parse_formula("Bel(nao, p, 0.3)")


def test_parse_rejects_out_of_range_priority():
    with pytest.raises(FormulaSyntaxError):
        parse_formula("Goal(nao, p, 1.5)")


def test_parse_rejects_variables_in_ground_mode():
    with pytest.raises(FormulaSyntaxError):
        parse_formula("Bel(?a, p)")


def test_parse_emo_target_arity():
    f = parse_formula("Emo(reproach, nao, wafa, unplugged)")
    assert f == Emo(EmotionCategory.REPROACH, "nao", "wafa", Atom("unplugged"))
    g = parse_formula("Emo(joy, nao, tidy)")
    assert g == Emo(EmotionCategory.JOY, "nao", None, Atom("tidy"))


def test_render_examples():
    f = Ideal("nao", Not(Atom("unplugged")), 0.8)
    assert render_formula(f) == "Ideal(nao, not unplugged, 0.8)"
    e = Emo(EmotionCategory.REPROACH, "nao", "wafa", Atom("unplugged"))
    assert render_formula(e) == "Emo(reproach, nao, wafa, unplugged)"


def test_render_conjunction_canonical_order():
    a = parse_formula("and(q, p)")
    b = parse_formula("and(p, q)")
    assert render_formula(a) == render_formula(b) == "and(p, q)"
    assert a == b


def test_conjunction_flattens_and_dedupes():
    f = parse_formula("and(p, and(q, p))")
    assert f == And((Atom("p"), Atom("q")))
    assert parse_formula("and(p, p)") == Atom("p")


def test_negate_atom_roundtrip():
    p = Atom("unplugged")
    assert negate(p) == Not(p)
    assert negate(negate(p)) == p


def test_negate_modal_shallow():
    b = parse_formula("Bel(nao, p)")
    assert negate(b) == Not(b)
    assert negate(negate(b)) == b


def test_negate_conjunction_is_rejected():
    with pytest.raises(ValueError):
        negate(parse_formula("and(p, q)"))


def test_match_binds_agents_and_formula():
    p = parse_pattern("Bel(?A, Resp(?B, ?F))")
    g = parse_formula("Bel(nao, Resp(wafa, unplugged))")
    subst = match(p, g)
    assert subst is not None
    assert subst.bindings == {"a": "nao", "b": "wafa", "f": Atom("unplugged")}


def test_match_operator_mismatch():
    assert match(parse_pattern("Goal(?A, ?F)"), parse_formula("Ideal(nao, p)")) is None


def test_match_priority_wildcard_records_value():
    p = parse_pattern("Goal(?A, ?F)")
    g = parse_formula("Goal(nao, tidy, 0.6)")
    subst = match(p, g)
    assert subst is not None
    assert subst.priorities == {(): 0.6}
    assert substitute(p, subst) == g


def test_match_explicit_priority_must_agree():
    p = parse_pattern("Goal(?A, ?F, 0.6)")
    assert match(p, parse_formula("Goal(nao, tidy, 0.6)")) is not None
    assert match(p, parse_formula("Goal(nao, tidy, 0.7)")) is None


def test_match_inconsistent_binding_fails():
    p = parse_pattern("Bel(?A, Resp(?A, ?F))")
    assert match(p, parse_formula("Bel(nao, Resp(wafa, p))")) is None
    assert match(p, parse_formula("Bel(nao, Resp(nao, p))")) is not None


def test_substitute_emotion_pattern():
    p = parse_pattern("Emo(reproach, ?A, ?B, ?F)")
    subst = Substitution({"a": "nao", "b": "wafa", "f": Atom("unplugged")})
    assert substitute(p, subst) == parse_formula("Emo(reproach, nao, wafa, unplugged)")


def test_substitute_no_variables_identity():
    p = parse_formula("p")
    assert substitute(p, Substitution()) == p


def test_substitute_unbound_raises():
    p = parse_pattern("Bel(?A, ?F)")
    with pytest.raises(UnboundVariable):
        substitute(p, Substitution({"a": "nao"}))


def test_substitute_token_coercion_both_ways():
    # A bare token can stand in for a zero-argument atom and vice versa.
    p1 = parse_pattern("known(?F)")
    out = substitute(p1, Substitution({"f": Atom("departure_time")}))
    assert out == Atom("known", ("departure_time",))
    p2 = parse_pattern("Bel(?h, ?state)")
    out2 = substitute(p2, Substitution({"h": "nao", "state": "raining"}))
    assert out2 == Bel("nao", Atom("raining"))


def test_substitute_negated_variable_normalizes():
    p = parse_pattern("Ideal(?A, not ?F)")
    out = substitute(p, Substitution({"a": "nao", "f": Not(Atom("tidy"))}))
    assert out == Ideal("nao", Atom("tidy"), DEFAULT_PRIORITY)


def test_not_pattern_only_matches_not_nodes():
    p = parse_pattern("Goal(?A, not ?F)")
    assert match(p, parse_formula("Goal(nao, tidy)")) is None
    subst = match(p, parse_formula("Goal(nao, not tidy)"))
    assert subst is not None and subst.bindings["f"] == Atom("tidy")


def test_planning_key_strips_priorities():
    f = parse_formula("Ideal(nao, not unplugged, 0.8)")
    assert planning_key(f) == "Ideal(nao, not unplugged)"


def test_contradiction_renderings_cover_all_prefixes():
    f = parse_formula("Bel(nao, Bel(wafa, p))")
    keys = contradiction_renderings(f)
    assert "not Bel(nao, Bel(wafa, p))" in keys
    assert "Bel(nao, not Bel(wafa, p))" in keys
    assert "Bel(nao, Bel(wafa, not p))" in keys


# --- randomized properties ---

_idents = st.sampled_from(["p", "q", "tidy", "unplugged", "raining", "booked"])
_agents = st.sampled_from(["nao", "wafa", "robot", "user"])
_priorities = st.sampled_from([0.1, 0.25, 0.5, 0.75, 0.8, 1.0])
_categories = st.sampled_from(list(EmotionCategory))


def _formulas(depth: int = 4) -> st.SearchStrategy:
    atoms = st.builds(
        Atom,
        _idents,
        st.lists(_idents, max_size=2).map(tuple),
    )
    if depth <= 1:
        return atoms
    sub = _formulas(depth - 1)
    return st.one_of(
        atoms,
        sub.map(lambda f: f if isinstance(f, (Not, And)) else Not(f)),
        st.builds(Bel, _agents, sub),
        st.builds(Resp, _agents, sub),
        st.builds(Goal, _agents, sub, _priorities),
        st.builds(Ideal, _agents, sub, _priorities),
        st.builds(
            lambda cat, holder, target, inner: Emo(
                cat,
                holder,
                target if cat.value in ("gratitude", "disappointment", "admiration", "reproach") else None,
                inner,
            ),
            _categories,
            _agents,
            _agents,
            sub,
        ),
        st.lists(sub.filter(lambda f: not isinstance(f, And)), min_size=2, max_size=3).map(
            lambda cs: _safe_and(cs)
        ),
    )


def _safe_and(conjuncts):
    from caio.logic import make_and

    try:
        return make_and(list(conjuncts))
    except ValueError:
        return conjuncts[0]


@settings(max_examples=200, deadline=None)
@given(_formulas())
def test_parse_render_roundtrip(f):
    validate_formula(f)
    assert parse_formula(render_formula(f)) == f


@settings(max_examples=200, deadline=None)
@given(_formulas())
def test_negate_is_involutive(f):
    if isinstance(f, And):
        return
    assert negate(negate(f)) == f


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_match_substitute_inverse(data):
    # Build a pattern by abstracting pieces of a ground formula, then check
    # that matching recovers the substitution that grounds it back.
    agent_bindings = {"a": data.draw(_agents), "b": data.draw(_agents)}
    content = data.draw(_formulas(3))
    if isinstance(content, And):
        content = content.conjuncts[0]
    shape = data.draw(st.sampled_from(["bel_resp", "goal", "ideal_not", "emo"]))
    if shape == "bel_resp":
        pattern = parse_pattern("Bel(?A, Resp(?B, ?F))")
    elif shape == "goal":
        pattern = parse_pattern("Goal(?A, ?F)")
    elif shape == "ideal_not":
        pattern = parse_pattern("Ideal(?A, not ?F)")
        if isinstance(content, Not):
            content = content.inner
    else:
        pattern = parse_pattern("Emo(gratitude, ?A, ?B, ?F)")
        if agent_bindings["a"] == agent_bindings["b"]:
            agent_bindings["b"] = "other"
    priorities = {}
    for path_needed in _wildcard_paths(pattern):
        priorities[path_needed] = data.draw(_priorities)
    subst = Substitution({**agent_bindings, "f": content}, priorities)
    ground = substitute(pattern, subst)
    assert is_ground(ground)
    recovered = match(pattern, ground)
    assert recovered is not None
    assert substitute(pattern, recovered) == ground


def _wildcard_paths(pattern, path=()):
    out = []
    if isinstance(pattern, (Goal, Ideal)) and pattern.priority is None:
        out.append(path)
    inner = getattr(pattern, "inner", None)
    if inner is not None:
        out.extend(_wildcard_paths(inner, path + (0,)))
    if isinstance(pattern, And):
        for i, c in enumerate(pattern.conjuncts):
            out.extend(_wildcard_paths(c, path + (i,)))
    return out
