from __future__ import annotations

import pytest

from caio import defaults
from caio.engine import (
    AssertionFailure,
    Event,
    ScriptError,
    Session,
    SessionClosed,
    SessionSpec,
    check_expectations,
    run_scenario,
)
from caio.logic import parse_formula
from caio.perception import Stimulus


def _scenario_session(**overrides) -> Session:
    doc = {"agents": {"self": "nao", "interlocutor": "wafa"},
           "init_facts": ["Ideal(nao, not unplugged, 0.8)"]}
    doc.update(overrides)
    return Session(SessionSpec.load(doc))


def _kinds(events):
    return [e.kind for e in events]


def test_golden_utterance_pipeline():
    session = _scenario_session()
    events = session.handle_utterance("Nao, I am going to unplug you")
    kinds = _kinds(events)
    assert kinds[:4] == ["act_received", "sec_profile", "expression_rendered", "facts_asserted"]
    assert "emotion_triggered" in kinds
    assert kinds[-1] == "utterance_out"
    out = events[-1].payload
    assert out["definition"] == "reproach"
    assert out["content"] == "unplugged"
    assert [pair[1] for pair in out["expression"]] == [
        "Nouveau",
        "Déplaisant",
        "Attentes-insatisfaites",
        "Peu-de-contrôle",
        "Norme-violée",
    ]


def test_stimulus_pipeline_matches_utterance_semantics():
    session = _scenario_session()
    events = session.handle_stimulus(Stimulus(parse_formula("unplugged"), "wafa", "nao"))
    facts = next(e for e in events if e.kind == "facts_asserted")
    assert facts.payload["added"] == [
        "Bel(nao, unplugged)",
        "Bel(nao, Resp(wafa, unplugged))",
    ]
    assert any(
        e.kind == "emotion_triggered" and e.payload["category"] == "reproach" for e in events
    )
    assert _kinds(events)[-1] == "utterance_out"


def test_stimulus_without_responsibility_no_emotion():
    session = _scenario_session()
    events = session.handle_stimulus(Stimulus(parse_formula("raining"), None, "nao"))
    kinds = _kinds(events)
    assert "facts_asserted" in kinds
    assert "emotion_triggered" not in kinds
    assert "intention_adopted" not in kinds


def test_second_identical_stimulus_triggers_nothing_new():
    session = _scenario_session()
    session.handle_stimulus(Stimulus(parse_formula("unplugged"), "wafa", "nao"))
    events = session.handle_stimulus(Stimulus(parse_formula("unplugged"), "wafa", "nao"))
    assert "emotion_triggered" not in _kinds(events)
    assert "utterance_out" not in _kinds(events)


def test_closed_session_raises():
    session = _scenario_session()
    session.close()
    with pytest.raises(SessionClosed):
        session.handle_utterance("hello")


def test_execute_without_plan_raises():
    from caio.engine import NoPlan

    session = _scenario_session()
    with pytest.raises(NoPlan):
        session.execute_next_action()


def test_unrecognized_input_leads_to_clarification_request():
    session = _scenario_session()
    events = session.handle_utterance("zzz gibberish")
    assert events[0].payload.get("unrecognized") is True
    out = [e for e in events if e.kind == "utterance_out"]
    assert out and out[0].payload["definition"] == "ask-ref"
    assert out[0].payload["content"] == "clarification"


def test_repeated_gibberish_asks_again():
    session = _scenario_session()
    session.handle_utterance("zzz gibberish")
    events = session.handle_utterance("more zzz nonsense")
    out = [e for e in events if e.kind == "utterance_out"]
    assert out and out[0].payload["definition"] == "ask-ref"


def test_reactive_precedes_deliberative_every_input():
    session = _scenario_session()
    for text in ("Nao, I am going to unplug you", "thank you for tidying"):
        events = session.handle_utterance(text)
        assert not events[0].payload.get("unrecognized")
        sec_ticks = [e.tick for e in events if e.kind == "sec_profile"]
        plan_ticks = [e.tick for e in events if e.kind == "plan_found"]
        assert sec_ticks, "every input act gets a sensorimotor appraisal"
        if plan_ticks:
            assert sec_ticks[0] < plan_ticks[0]


def test_sincerity_gate_blocks_unbacked_expressive_act(catalog):
    # force a plan whose act preconditions no longer hold at execution time
    session = _scenario_session()
    session.handle_utterance("Nao, I am going to unplug you")
    from caio.planner import GroundOperator

    reproach2 = GroundOperator(
        name="reproach",
        args=("tidy",),
        pre_pos=frozenset(),
        pre_neg=frozenset(),
        add=frozenset({"expressed(reproach, wafa, tidy)"}),
        delete=frozenset(),
        kind="conversation_act",
        act_binding=("nao", "wafa", parse_formula("tidy")),
    )
    session.current_plan = [reproach2]
    session.plan_index = 0
    session.current_intention = None
    event = session.execute_next_action()
    assert event.kind == "action_failed"
    assert event.payload["reason"] == "preconditions"


def test_gratitude_intensity_picks_stronger_act():
    doc = {"agents": {"self": "nao", "interlocutor": "wafa"},
           "init_facts": ["Goal(nao, tidy, 0.9)"]}
    session = Session(SessionSpec.load(doc))
    events = session.handle_utterance("I tidied the room")
    out = [e for e in events if e.kind == "utterance_out"]
    assert out and out[0].payload["definition"] == "congratulate"


def test_gratitude_low_intensity_thanks():
    doc = {"agents": {"self": "nao", "interlocutor": "wafa"},
           "init_facts": ["Goal(nao, tidy, 0.4)"]}
    session = Session(SessionSpec.load(doc))
    events = session.handle_utterance("I tidied the room")
    out = [e for e in events if e.kind == "utterance_out"]
    assert out and out[0].payload["definition"] == "thank"


def test_request_obligation_accept_and_achieve(tmp_path):
    domain = tmp_path / "fetch.pddl"
    domain.write_text(
        "(:action fetch :parameters () :precondition (ball_visible) :effect (fetch_ball))",
        encoding="utf-8",
    )
    doc = {
        "agents": {"self": "nao", "interlocutor": "wafa"},
        "init_facts": ["Bel(nao, ball_visible)"],
        "domain": str(domain),
    }
    session = Session(SessionSpec.load(doc))
    events = session.handle_utterance("please fetch ball")
    kinds = _kinds(events)
    outs = [e.payload["definition"] for e in events if e.kind == "utterance_out"]
    assert "accept" in outs
    executed = [e.payload["step"] for e in events if e.kind == "action_executed"]
    assert "fetch" in executed
    request_obs = [ob for ob in session.obligations if ob.kind == "address_request"]
    assert request_obs and all(ob.discharged for ob in request_obs)
    achieve_obs = [ob for ob in session.obligations if ob.kind == "achieve"]
    assert achieve_obs and all(ob.discharged for ob in achieve_obs)


def test_plan_failure_abandons_and_falls_back():
    # an emotion with no expressing act is abandoned with plan_failed logged
    doc = {"agents": {"self": "nao", "interlocutor": "wafa"},
           "init_facts": ["Goal(nao, sunshine, 0.7)"]}
    session = Session(SessionSpec.load(doc))
    events = session.handle_utterance("is it sunshine")
    # answering the question requires Bel(nao, sunshine) or its negation,
    # neither of which holds, so the obligation intention is abandoned too
    kinds = _kinds(events)
    assert "plan_failed" in kinds
    abandoned = [i for i in session.intentions.values() if i.status == "abandoned"]
    assert abandoned


def test_abandoned_intentions_never_reselected():
    doc = {"agents": {"self": "nao", "interlocutor": "wafa"},
           "init_facts": []}
    session = Session(SessionSpec.load(doc))
    session.handle_utterance("is it sunshine")
    first_failures = sum(1 for e in session.events if e.kind == "plan_failed")
    session.handle_utterance("zzz nonsense zzz")
    # the old answer_if intention must not be replanned on the next input
    second_failures = [
        e for e in session.events[first_failures:] if e.kind == "plan_failed"
        and e.payload.get("goal") == "answered(if, sunshine)"
    ]
    assert len([e for e in session.events if e.kind == "plan_failed"
                and e.payload.get("goal") == "answered(if, sunshine)"]) == 1


def test_answer_if_with_belief_informs():
    doc = {"agents": {"self": "nao", "interlocutor": "wafa"},
           "init_facts": ["Bel(nao, raining)"]}
    session = Session(SessionSpec.load(doc))
    events = session.handle_utterance("is it raining")
    outs = [e.payload for e in events if e.kind == "utterance_out"]
    assert outs and outs[0]["definition"] in ("inform", "assert")
    assert outs[0]["content"] == "raining"
    answered = [ob for ob in session.obligations if ob.kind == "answer_if"]
    assert answered and answered[0].discharged


def test_answer_if_negative_belief_denies():
    doc = {"agents": {"self": "nao", "interlocutor": "wafa"},
           "init_facts": ["Bel(nao, not raining)"]}
    session = Session(SessionSpec.load(doc))
    events = session.handle_utterance("is it raining")
    outs = [e.payload for e in events if e.kind == "utterance_out"]
    assert outs and outs[0]["definition"] == "deny"


def test_fault_injected_physical_action_replans(tmp_path):
    domain = tmp_path / "domain.pddl"
    domain.write_text(
        """
        (:action fetch :parameters () :precondition (ball_visible) :effect (fetch_ball))
        (:action roll :parameters () :precondition (ball_visible) :effect (fetch_ball))
        """,
        encoding="utf-8",
    )
    doc = {
        "agents": {"self": "nao", "interlocutor": "wafa"},
        "init_facts": ["Bel(nao, ball_visible)"],
        "domain": str(domain),
        "config": {"fail_actions": ["fetch"]},
    }
    session = Session(SessionSpec.load(doc))
    events = session.handle_utterance("please fetch ball")
    kinds = _kinds(events)
    assert "action_failed" in kinds
    replans = [e for e in events if e.kind == "plan_found" and e.payload.get("replan")]
    assert replans
    executed = [e.payload["step"] for e in events if e.kind == "action_executed"]
    assert "roll" in executed


def test_promise_installs_global_commitment():
    session = _scenario_session()
    session.handle_utterance("can you sing")
    # the robot accepts the request; its accept installs a commitment
    assert session.commitment is not None
    assert session.commitment.adopted_via == "accept-act"


def test_expression_totality():
    session = _scenario_session()
    session.handle_utterance("Nao, I am going to unplug you")
    session.handle_utterance("thank you for tidying")
    for record in session.memory.episodic.emotions:
        if record.expressed:
            continue
        intention = next(
            (i for i in session.intentions.values() if i.origin == record.id), None
        )
        assert intention is not None and intention.status == "abandoned"
        assert any(e.kind == "plan_failed" for e in session.events)


def test_determinism_same_script_same_log():
    doc = defaults.scenario_doc("nao_unplugged")
    first = run_scenario(doc, raise_on_failure=False)
    second = run_scenario(defaults.scenario_doc("nao_unplugged"), raise_on_failure=False)
    assert first.log_text() == second.log_text()
    assert first.passed and second.passed


def test_run_scenario_golden_passes():
    transcript = run_scenario(defaults.scenario_doc("nao_unplugged"))
    assert transcript.passed


def test_run_scenario_wrong_expectation_fails():
    doc = defaults.scenario_doc("nao_unplugged")
    doc["steps"][0]["expect"] = [{"kind": "emotion_triggered", "category": "joy"}]
    with pytest.raises(AssertionFailure) as exc:
        run_scenario(doc)
    assert exc.value.step == 0


def test_run_scenario_rejects_bad_script():
    with pytest.raises(ScriptError):
        run_scenario({"steps": [{"noinput": True}]})
    with pytest.raises(ScriptError):
        run_scenario({})


def test_empty_script_only_init():
    doc = {"init_facts": ["Bel(nao, p)"], "steps": []}
    transcript = run_scenario(doc)
    assert transcript.passed
    assert [e.kind for e in transcript.events] == ["facts_asserted"]


def test_check_expectations_subsequence_semantics():
    events = [
        Event(1, "a", {"x": 1}),
        Event(2, "b", {"x": 2}),
        Event(3, "c", {"x": 3, "list": ["p", "q"]}),
    ]
    assert check_expectations([{"kind": "a"}, {"kind": "c", "list": ["q"]}], events) is None
    assert check_expectations([{"kind": "c"}, {"kind": "a"}], events) == {"kind": "a"}
    assert check_expectations([{"kind": "b", "x": 5}], events) == {"kind": "b", "x": 5}


def test_event_log_replay_reconstructs_memory():
    session = _scenario_session()
    session.handle_utterance("Nao, I am going to unplug you")
    replayed = session.memory.episodic.replay_log()
    assert sorted(f.key for f in replayed.facts()) == sorted(
        f.key for f in session.memory.episodic.facts()
    )


def test_state_view_shape():
    session = _scenario_session()
    session.handle_utterance("Nao, I am going to unplug you")
    view = session.state_view()
    assert view["agents"] == {"self": "nao", "interlocutor": "wafa"}
    assert any(e["category"] == "reproach" and e["intensity"] == 0.8 for e in view["emotions"])
    assert all(g["priority"] is not None for g in view["ideals"])
    assert view["history"][0]["definition"] == "inform"
    assert view["last_sec"] is not None
    assert len(view["last_sec"]["labels"]) == 5
