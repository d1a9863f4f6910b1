from __future__ import annotations

import pytest

from caio import defaults, logic
from caio.acts import (
    ActInstance,
    CORE_ACTS,
    apply_reception_effects,
    apply_sending_effects,
    check_expressive_consistency,
    check_preconditions,
    expressive_semantics,
    load_catalog,
    surface_text,
)
from caio.logic import EmotionCategory, parse_formula, render_formula
from caio.memory import EpisodicStore, ValidationError


def _act(name, speaker, addressee, content, direction, own_action=False, tick=0):
    return ActInstance(
        id=f"act-{tick}",
        definition=name,
        speaker=speaker,
        addressee=addressee,
        content=parse_formula(content),
        direction=direction,
        tick=tick,
        own_action=own_action,
    )


def test_default_catalog_has_core_set(catalog):
    assert CORE_ACTS <= set(catalog.acts)


def test_reject_undeclared_variable():
    doc = defaults.catalog_doc()
    doc[0] = dict(doc[0], preconditions=["Bel(?X, ?F)"])
    with pytest.raises(ValidationError):
        load_catalog(doc)


def test_empty_catalog_rejected():
    with pytest.raises(ValidationError):
        load_catalog([])


def test_rejoice_preconditions_match_definition(catalog):
    rejoice = catalog.get("rejoice")
    assert [render_formula(p) for p in rejoice.preconditions] == [
        "Goal(?s, ?f)",
        "Bel(?s, Resp(?s, ?f))",
    ]


def test_rejoice_sending_effect_is_published_emotion(catalog):
    rejoice = catalog.get("rejoice")
    assert [render_formula(p) for p in rejoice.sending_effects] == [
        "Bel(?s, Bel(?h, Emo(rejoicing, ?s, ?f)))"
    ]


def test_rejoice_reception_effects_attribute_states_to_speaker(catalog):
    rejoice = catalog.get("rejoice")
    assert [render_formula(p) for p in rejoice.reception_effects] == [
        "Bel(?h, Goal(?s, ?f))",
        "Bel(?h, Bel(?s, Resp(?s, ?f)))",
    ]


def test_every_expressive_act_consistent_with_emotion_rules(catalog, emotion_rules):
    assert check_expressive_consistency(catalog, emotion_rules) == []


def test_inconsistent_expressive_act_is_detected(emotion_rules):
    doc = defaults.catalog_doc()
    for entry in doc:
        if entry["name"] == "rejoice":
            entry["preconditions"] = ["Goal(?S, ?F)"]
    with pytest.raises(ValidationError):
        load_catalog(doc, emotion_rules)


def test_expressive_semantics_generated_from_rule(emotion_rules):
    rule = next(r for r in emotion_rules if r.name == "reproach")
    pre, send, recv = expressive_semantics(EmotionCategory.REPROACH, rule)
    assert sorted(render_formula(p) for p in pre) == [
        "Bel(?s, Resp(?h, ?f))",
        "Ideal(?s, not ?f)",
    ]
    assert [render_formula(p) for p in send] == [
        "Bel(?s, Bel(?h, Emo(reproach, ?s, ?h, ?f)))"
    ]


def test_check_preconditions_rejoice_holds(catalog):
    store = EpisodicStore()
    store.assert_fact(parse_formula("Goal(nao, tidy, 0.6)"), "scenario-init")
    store.assert_fact(parse_formula("Bel(nao, Resp(nao, tidy))"), "scenario-init")
    act = _act("rejoice", "nao", "wafa", "tidy", "sent")
    assert check_preconditions(act, store.snapshot(), catalog).holds


def test_check_preconditions_reports_missing(catalog):
    act = _act("rejoice", "nao", "wafa", "tidy", "sent")
    check = check_preconditions(act, EpisodicStore().snapshot(), catalog)
    assert not check.holds
    assert len(check.missing) == 2


def test_check_preconditions_reproach_scenario(catalog):
    store = EpisodicStore()
    store.assert_fact(parse_formula("Ideal(nao, not unplugged, 0.8)"), "scenario-init")
    store.assert_fact(parse_formula("Bel(nao, Resp(wafa, unplugged))"), "reception-effect")
    act = _act("reproach", "nao", "wafa", "unplugged", "sent")
    assert check_preconditions(act, store.snapshot(), catalog).holds


def test_apply_sending_effects_rejoice(catalog):
    store = EpisodicStore()
    act = _act("rejoice", "nao", "wafa", "tidy", "sent")
    report = apply_sending_effects(act, store, catalog)
    assert [f.key for f in report.added] == [
        "Bel(nao, Bel(wafa, Emo(rejoicing, nao, tidy)))"
    ]
    assert store.dialogue_history == [act]


def test_sending_twice_second_noop_on_facts(catalog):
    store = EpisodicStore()
    act = _act("rejoice", "nao", "wafa", "tidy", "sent")
    apply_sending_effects(act, store, catalog)
    report = apply_sending_effects(act, store, catalog)
    assert not report.added and not report.retracted
    assert len(store.dialogue_history) == 2


def test_apply_reception_effects_rejoice(catalog):
    store = EpisodicStore()
    act = _act("rejoice", "wafa", "nao", "tidy", "received")
    report = apply_reception_effects(act, store, catalog)
    assert sorted(f.key for f in report.added) == [
        "Bel(nao, Bel(wafa, Resp(wafa, tidy)))",
        "Bel(nao, Goal(wafa, tidy, 0.5))",
    ]


def test_reception_inform_with_stimulus_semantics(catalog):
    store = EpisodicStore()
    act = _act("inform", "wafa", "nao", "unplugged", "received", own_action=True)
    report = apply_reception_effects(act, store, catalog)
    assert sorted(f.key for f in report.added) == [
        "Bel(nao, Resp(wafa, unplugged))",
        "Bel(nao, unplugged)",
    ]


def test_reception_with_no_effects_changes_history_only(catalog):
    store = EpisodicStore()
    act = _act("ask-if", "wafa", "nao", "raining", "received")
    report = apply_reception_effects(act, store, catalog)
    assert report.empty
    assert len(store.dialogue_history) == 1


def test_surface_text(catalog):
    act = _act("reproach", "nao", "wafa", "unplugged", "sent")
    assert surface_text(act, catalog) == "I reproach you for unplugged."
