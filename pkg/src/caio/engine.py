"""The agent engine: one session, two loops, an append-only event log.

Every input (utterance or stimulus) runs the fast sensorimotor path first
(appraise the act, emit the expression) and then the deliberative path
(revise memory, derive emotions, pick an intention, plan, execute). The
tick is an event counter, never wall clock, so a session is replayable and
two runs of the same script produce identical logs.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import acts as acts_mod
from . import appraisal, defaults, deliberation, logic, perception, planner
from .acts import ActInstance, Catalog
from .appraisal import EmotionRecord, SecConfig
from .deliberation import GlobalCommitment, Intention, Obligation
from .logic import Formula
from .memory import Clock, Memory, load_procedural, load_rules, load_semantic


class SessionClosed(RuntimeError):
    pass


class NoPlan(RuntimeError):
    pass


class ScriptError(ValueError):
    pass


class AssertionFailure(AssertionError):
    def __init__(self, step: int, expected: dict, actual: list):
        self.step = step
        self.expected = expected
        self.actual = actual
        super().__init__(f"step {step}: no event matching {expected!r}")


@dataclass(frozen=True)
class Event:
    tick: int
    kind: str
    payload: dict

    def to_json(self) -> str:
        return json.dumps(
            {"tick": self.tick, "kind": self.kind, "payload": self.payload},
            sort_keys=True,
            ensure_ascii=False,
        )


@dataclass(frozen=True)
class RenderDirective:
    surface_text: Optional[str]
    expression_sequence: tuple
    physical_action: Optional[str] = None


@dataclass(frozen=True)
class EngineConfig:
    sec: SecConfig = SecConfig()
    planner_depth: int = 12
    planner_deadline: float = 2.0
    inference_limit: int = 1000
    global_score: float = 0.5
    expressive_intensity_threshold: float = 0.7
    max_cycles: int = 64
    fail_actions: tuple[str, ...] = ()

    @classmethod
    def from_dict(cls, raw: dict) -> "EngineConfig":
        raw = dict(raw or {})
        sec = SecConfig.from_dict(raw.pop("sec", {}))
        known = {k: v for k, v in raw.items() if k in cls.__dataclass_fields__ and k != "sec"}
        if "fail_actions" in known:
            known["fail_actions"] = tuple(known["fail_actions"])
        return cls(sec=sec, **known)


def _env_config_dict(path: Optional[str] = None) -> dict:
    path = path or os.environ.get("CAIO_CONFIG")
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def load_engine_config(path: Optional[str] = None, overrides: Optional[dict] = None) -> EngineConfig:
    """Config from the CAIO_CONFIG file (or explicit path), with per-session
    overrides layered on top."""
    merged = _env_config_dict(path)
    for key, value in (overrides or {}).items():
        if key == "sec" and isinstance(value, dict):
            base = dict(merged.get("sec", {}))
            base.update(value)
            merged["sec"] = base
        else:
            merged[key] = value
    return EngineConfig.from_dict(merged)


@dataclass
class SessionSpec:
    """Everything needed to start a session; documents already parsed."""

    self_agent: str = "nao"
    interlocutor: str = "wafa"
    init_facts: tuple[Formula, ...] = ()
    catalog: Optional[Catalog] = None
    emotion_rules: tuple = ()
    inference_rules: tuple = ()
    discourse_rules: tuple = ()
    patterns: tuple = ()
    physical_operators: tuple = ()
    objects: tuple[tuple[str, Optional[str]], ...] = ()
    global_goal: Optional[Formula] = None
    dialogue_type: str = "deliberation"
    config: EngineConfig = EngineConfig()

    @classmethod
    def load(cls, doc: dict, base_dir: Optional[Path] = None) -> "SessionSpec":
        base = Path(base_dir) if base_dir else None

        def read(key: str, fallback):
            ref = doc.get(key)
            if ref is None:
                return fallback()
            path = Path(ref)
            if base and not path.is_absolute():
                path = base / path
            try:
                text = path.read_text(encoding="utf-8")
            except OSError as exc:
                raise ScriptError(f"cannot read {key} file {path}: {exc}") from exc
            return text if key == "domain" else json.loads(text)

        agents = doc.get("agents", {})
        self_agent = agents.get("self", "nao")
        interlocutor = agents.get("interlocutor", agents.get("user", "wafa"))
        for name in (self_agent, interlocutor):
            if not logic.IDENT_RE.match(name):
                raise ScriptError(f"bad agent name {name!r}")

        emotion_doc = read("emotion_rules", defaults.emotion_rules_doc)
        semantic = load_semantic(emotion_doc)
        catalog = acts_mod.load_catalog(read("catalog", defaults.catalog_doc), semantic.emotion_rules)
        patterns = perception.load_patterns(read("patterns", defaults.patterns_doc), catalog)
        discourse = deliberation.load_discourse_rules(read("discourse_rules", defaults.discourse_rules_doc))
        inference = tuple(load_rules(read("inference_rules", defaults.inference_rules_doc)))
        domain_ref = doc.get("domain")
        domain_text = read("domain", lambda: "") if domain_ref else ""
        physical = tuple(planner.parse_domain(domain_text)) if domain_text else ()

        try:
            init_facts = tuple(logic.parse_formula(t) for t in doc.get("init_facts", []))
        except logic.FormulaSyntaxError as exc:
            raise ScriptError(f"bad init fact: {exc}") from exc
        global_goal = None
        if doc.get("global_goal"):
            global_goal = logic.parse_formula(doc["global_goal"])
        objects = tuple((o, None) if isinstance(o, str) else (o[0], o[1]) for o in doc.get("objects", []))
        config = load_engine_config(overrides=doc.get("config", {}))
        return cls(
            self_agent=self_agent,
            interlocutor=interlocutor,
            init_facts=init_facts,
            catalog=catalog,
            emotion_rules=semantic.emotion_rules,
            inference_rules=inference,
            discourse_rules=discourse,
            patterns=patterns,
            physical_operators=physical,
            objects=objects,
            global_goal=global_goal,
            dialogue_type=doc.get("dialogue_type", "deliberation"),
            config=config,
        )

    @classmethod
    def default(cls) -> "SessionSpec":
        return cls.load({"init_facts": ["Ideal(nao, not unplugged, 0.8)"]})


class Session:
    """One dyadic conversation; all mutation flows through its methods in
    submission order, so event ticks strictly increase."""

    def __init__(self, spec: SessionSpec, session_id: str = "local"):
        if spec.catalog is None:
            spec = SessionSpec.load({})
        self.id = session_id
        self.spec = spec
        self.config = spec.config
        self.self_agent = spec.self_agent
        self.interlocutor = spec.interlocutor
        self.clock = Clock()
        semantic = load_semantic_from(spec)
        procedural = load_procedural(spec.physical_operators, spec.discourse_rules)
        self.memory = Memory(semantic, procedural, self.clock)
        self.act_operators = planner.compile_acts_to_operators(spec.catalog)
        self.events: list[Event] = []
        self.obligations: list[Obligation] = []
        self.intentions: dict[tuple, Intention] = {}
        self.commitment: Optional[GlobalCommitment] = None
        if spec.global_goal is not None:
            self.commitment = GlobalCommitment(spec.global_goal, spec.dialogue_type, "config")
        self.current_plan: Optional[list] = None
        self.plan_index = 0
        self.current_intention: Optional[Intention] = None
        self.last_profile = None
        self.last_labels: tuple = ()
        self.failed_steps: set[str] = set()
        self.closed = False
        self._ob_counter = 0
        self._bootstrap()

    # --- plumbing ---

    def _emit(self, kind: str, payload: dict) -> Event:
        event = Event(self.clock.next(), kind, payload)
        self.events.append(event)
        return event

    def _bootstrap(self) -> None:
        store = self.memory.episodic
        added = []
        for f in self.spec.init_facts:
            report = store.assert_fact(f, "scenario-init")
            added.extend(fact.key for fact in report.added)
        if added:
            self._emit("facts_asserted", {"source": "scenario-init", "added": added, "retracted": []})
        derived = store.run_inference(self.spec.inference_rules, self.config.inference_limit)
        if derived:
            self._emit(
                "facts_asserted",
                {"source": "inference", "added": [f.key for f in derived], "retracted": []},
            )

    def close(self) -> None:
        self.closed = True

    def _require_open(self) -> None:
        if self.closed:
            raise SessionClosed(self.id)

    # --- input handling ---

    def handle_utterance(self, text: str) -> list[Event]:
        self._require_open()
        start = len(self.events)
        parsed = perception.parse_utterance(
            text,
            self.spec.patterns,
            speaker=self.interlocutor,
            addressee=self.self_agent,
        )
        if isinstance(parsed, perception.Unrecognized):
            event = self._emit("act_received", {"unrecognized": True, "text": text})
            self._add_clarification_obligation(event.tick)
            self._deliberate_and_act()
            return self.events[start:]
        event = self._emit(
            "act_received",
            {
                "definition": parsed.definition,
                "speaker": parsed.speaker,
                "addressee": parsed.addressee,
                "content": logic.render_formula(parsed.content),
                "text": text,
            },
        )
        act = parsed
        act.tick = event.tick
        act.id = f"act-{event.tick}"
        self._process_received_act(act)
        return self.events[start:]

    def handle_stimulus(self, stimulus: perception.Stimulus) -> list[Event]:
        """A perceived event enters the same pipeline as an announcement of
        it would: an inform act, marked own-action when someone is
        responsible."""
        self._require_open()
        start = len(self.events)
        speaker = stimulus.agent_responsible or self.interlocutor
        event = self._emit(
            "act_received",
            {
                "definition": "inform",
                "speaker": speaker,
                "addressee": stimulus.perceiver,
                "content": logic.render_formula(stimulus.content),
                "stimulus": True,
            },
        )
        act = ActInstance(
            id=f"act-{event.tick}",
            definition="inform",
            speaker=speaker,
            addressee=stimulus.perceiver,
            content=stimulus.content,
            direction="received",
            tick=event.tick,
            own_action=stimulus.agent_responsible is not None,
        )
        self._process_received_act(act)
        return self.events[start:]

    def _process_received_act(self, act: ActInstance) -> None:
        # sensorimotor loop first: appraise against the state at arrival and
        # express reactively, independent of anything deliberative
        self._reactive(act)
        # memory update in three steps: add, revise (inside assert), infer
        store = self.memory.episodic
        report = acts_mod.apply_reception_effects(act, store, self.spec.catalog)
        if not report.empty:
            self._emit(
                "facts_asserted",
                {
                    "source": "reception-effect",
                    "added": [f.key for f in report.added],
                    "retracted": [f.key for f in report.retracted],
                },
            )
        derived = store.run_inference(self.spec.inference_rules, self.config.inference_limit)
        if derived:
            self._emit(
                "facts_asserted",
                {"source": "inference", "added": [f.key for f in derived], "retracted": []},
            )
        self._update_obligations(act)
        self._deliberate_and_act()

    def _reactive(self, act: ActInstance) -> None:
        snap = self.memory.snapshot()
        profile = appraisal.appraise_sensorimotor(
            act,
            snap,
            self.obligations,
            self.spec.catalog,
            self.spec.physical_operators,
            self.config.sec,
            self_agent=self.self_agent,
        )
        labels = appraisal.sec_to_labels(profile, self.config.sec)
        self.last_profile = profile
        self.last_labels = labels
        self._emit(
            "sec_profile",
            {
                "act": act.id,
                "direction": act.direction,
                "novelty": profile.novelty,
                "pleasantness": profile.pleasantness,
                "goal_congruence": profile.goal_congruence,
                "coping_potential": profile.coping_potential,
                "norm_compatibility": profile.norm_compatibility,
            },
        )
        if act.direction == "received":
            self._emit(
                "expression_rendered",
                {"act": act.id, "expression": [list(pair) for pair in labels]},
            )

    def _add_clarification_obligation(self, tick: int) -> None:
        # incomprehensible input is evidence the meaning is not known, which
        # also reopens the goal if an earlier clarification was assumed
        unknown = logic.Bel(
            self.self_agent, logic.Not(logic.Atom("known", ("clarification",)))
        )
        report = self.memory.episodic.assert_fact(unknown, "perception")
        if not report.empty:
            self._emit(
                "facts_asserted",
                {
                    "source": "perception",
                    "added": [f.key for f in report.added],
                    "retracted": [f.key for f in report.retracted],
                },
            )
        self._ob_counter += 1
        self.obligations.append(
            Obligation(
                id=f"ob-clarify-{self._ob_counter}",
                bearer=self.self_agent,
                kind="achieve",
                content=logic.Atom("known", ("clarification",)),
                source_act=f"act-{tick}",
                tick=tick,
            )
        )

    def _update_obligations(self, act: ActInstance) -> None:
        deliberation.discharge_with_act(act, self.obligations)
        new = deliberation.derive_obligations(
            act, self.self_agent, self.spec.discourse_rules, next_id=self._ob_counter
        )
        self._ob_counter += len(new)
        self.obligations.extend(new)
        if act.direction == "sent" and act.definition in ("promise", "accept"):
            self.commitment = GlobalCommitment(
                act.content,
                self.spec.dialogue_type,
                "promise-act" if act.definition == "promise" else "accept-act",
            )

    # --- deliberative loop ---

    def _deliberate_and_act(self) -> None:
        for _ in range(self.config.max_cycles):
            self._discharge_achieved()
            snap = self.memory.snapshot()
            new_records = appraisal.appraise_cognitive(snap, self.self_agent, self.spec.emotion_rules)
            for record in new_records:
                event = self._emit(
                    "emotion_triggered",
                    {
                        "category": record.category.value,
                        "holder": record.holder,
                        "target": record.target,
                        "content": logic.render_formula(record.content),
                        "intensity": record.intensity,
                    },
                )
                record.tick = event.tick
                record.id = f"emo-{event.tick}"
                self.memory.episodic.emotions.append(record)
            chosen = self._next_intention()
            if chosen is None:
                return
            self._emit(
                "intention_adopted",
                {
                    "intention": chosen.kind,
                    "band": chosen.priority_band,
                    "score": chosen.score,
                    "goal": chosen.goal_key,
                    "origin": chosen.origin,
                },
            )
            result = self._plan_for(chosen)
            if isinstance(result, planner.Unreachable):
                self._emit("plan_failed", {"goal": chosen.goal_key, "reason": result.reason})
                chosen.status = "abandoned"
                continue
            self._emit(
                "plan_found",
                {
                    "goal": chosen.goal_key,
                    "steps": [step.display for step in result.steps],
                    "cost": result.cost,
                },
            )
            chosen.status = "planned"
            self.current_plan = list(result.steps)
            self.plan_index = 0
            self.current_intention = chosen
            while self.current_plan is not None and self.plan_index < len(self.current_plan):
                self.execute_next_action()
            if self.current_plan is not None:
                chosen.status = "achieved"
            self.current_plan = None
            self.current_intention = None
        self._emit("plan_failed", {"goal": "", "reason": "cycle-limit"})

    def _discharge_achieved(self) -> None:
        snap = self.memory.snapshot()
        state = planner.project_snapshot(snap, self.self_agent, self.interlocutor)
        for ob in self.obligations:
            if ob.kind == "achieve" and not ob.discharged:
                if logic.planning_key(ob.content) in state:
                    ob.discharged = True

    def _next_intention(self) -> Optional[Intention]:
        fresh = deliberation.generate_intentions(
            self.memory.episodic.emotions,
            self.obligations,
            self.commitment,
            self.self_agent,
            self.interlocutor,
            self.clock.current,
            self.config.global_score,
        )
        candidates = []
        for intention in fresh:
            existing = self.intentions.get(intention.identity)
            if existing is None:
                self.intentions[intention.identity] = intention
                candidates.append(intention)
            elif existing.status == "pending":
                existing.score = intention.score
                candidates.append(existing)
        return deliberation.select_intention(candidates)

    # --- planning ---

    def _emotion_for(self, intention: Intention) -> Optional[EmotionRecord]:
        for record in self.memory.episodic.emotions:
            if record.id == intention.origin:
                return record
        return None

    def _obligation_for(self, intention: Intention) -> Optional[Obligation]:
        for ob in self.obligations:
            if ob.id == intention.origin:
                return ob
        return None

    def _intention_content(self, intention: Intention) -> Optional[Formula]:
        if intention.kind == "emotional":
            record = self._emotion_for(intention)
            return record.content if record else None
        if intention.kind == "obligation":
            ob = self._obligation_for(intention)
            return ob.content if ob else None
        return self.commitment.goal if self.commitment else None

    def _plan_for(self, intention: Intention) -> planner.PlanResult:
        snap = self.memory.snapshot()
        state = planner.project_snapshot(snap, self.self_agent, self.interlocutor)
        goal = {intention.goal_key}

        physical = planner.ground_operators(self.spec.physical_operators, self._object_universe())
        addressee = self.interlocutor
        costs: dict[str, float] = {}
        if intention.kind == "emotional":
            record = self._emotion_for(intention)
            if record is not None:
                addressee = record.target or self.interlocutor
                try:
                    chosen_act = planner.select_expressive_act(
                        record, self.spec.catalog, self.config.expressive_intensity_threshold
                    )
                except planner.NoExpressingAct:
                    chosen_act = None
                if chosen_act is not None:
                    for act in self.spec.catalog.expressing(record.category):
                        costs[act.name] = 1.0 if act.name == chosen_act else 2.0
        contents = self._content_candidates(intention, physical)
        act_ops = planner.ground_act_operators(
            self.act_operators, self.self_agent, addressee, contents, self.self_agent, costs
        )
        operators = [
            op
            for op in physical + act_ops
            if op.display not in self.failed_steps
        ]
        operators = planner.relevant_operators(operators, goal)
        result = planner.plan(
            state,
            goal,
            operators,
            bound=self.config.planner_depth,
            deadline=self.config.planner_deadline,
        )
        if isinstance(result, planner.Plan):
            planner.validate_plan(state, goal, result.steps)
        return result

    def _object_universe(self) -> list[tuple[str, Optional[str]]]:
        objects = dict(self.spec.objects)
        for agent in (self.self_agent, self.interlocutor):
            objects.setdefault(agent, None)
        for fact in self.memory.episodic.facts():
            for token in _atom_args(fact.formula):
                objects.setdefault(token, None)
        return sorted(objects.items())

    def _content_candidates(self, intention: Intention, physical_ground) -> list[Formula]:
        candidates: dict[str, Formula] = {}

        def add(f: Formula) -> None:
            candidates.setdefault(logic.render_formula(f), f)
            if isinstance(f, logic.Atom):
                for arg in f.args:
                    candidates.setdefault(arg, logic.Atom(arg))

        content = self._intention_content(intention)
        if content is not None:
            add(content)
        for op in physical_ground:
            for lit in sorted(op.pre_pos):
                try:
                    add(logic.parse_formula(lit))
                except logic.FormulaSyntaxError:
                    continue
        try:
            add(logic.parse_formula(intention.goal_key))
        except logic.FormulaSyntaxError:
            pass
        ordered = [candidates[k] for k in sorted(candidates)]
        return ordered[:32]

    # --- execution (the scheduler + simulated renderer) ---

    def execute_next_action(self) -> Event:
        if not self.current_plan or self.plan_index >= len(self.current_plan):
            raise NoPlan("no plan step to execute")
        step = self.current_plan[self.plan_index]
        if step.kind == "conversation_act":
            return self._execute_conversation_act(step)
        return self._execute_physical(step)

    def _execute_conversation_act(self, step) -> Event:
        speaker, addressee, content = step.act_binding
        act = ActInstance(
            id="",
            definition=step.name,
            speaker=speaker,
            addressee=addressee,
            content=content,
            direction="sent",
            tick=0,
        )
        snap = self.memory.snapshot()
        check = acts_mod.check_preconditions(act, snap, self.spec.catalog)
        if not check.holds:
            event = self._emit(
                "action_failed",
                {
                    "step": step.display,
                    "reason": "preconditions",
                    "missing": [logic.render_formula(m) for m in check.missing],
                },
            )
            self._handle_step_failure(step)
            return event
        act.tick = self.clock.current + 1
        act.id = f"act-{act.tick}"
        # the robot also appraises its own act; the resulting expression is
        # what the renderer plays alongside the words
        self._reactive(act)
        store = self.memory.episodic
        report = acts_mod.apply_sending_effects(act, store, self.spec.catalog)
        if not report.empty:
            self._emit(
                "facts_asserted",
                {
                    "source": "sending-effect",
                    "added": [f.key for f in report.added],
                    "retracted": [f.key for f in report.retracted],
                },
            )
        self._update_obligations(act)
        self._mark_expressed(act)
        event = self._emit(
            "action_executed",
            {"step": step.display, "step_kind": "conversation_act", "act": act.id},
        )
        directive = RenderDirective(
            surface_text=acts_mod.surface_text(act, self.spec.catalog),
            expression_sequence=self.last_labels,
        )
        self._emit(
            "utterance_out",
            {
                "act": act.id,
                "definition": act.definition,
                "speaker": act.speaker,
                "addressee": act.addressee,
                "content": logic.render_formula(act.content),
                "text": directive.surface_text,
                "expression": [list(pair) for pair in directive.expression_sequence],
            },
        )
        self.plan_index += 1
        return event

    def _execute_physical(self, step) -> Event:
        if step.name in self.config.fail_actions:
            event = self._emit(
                "action_failed", {"step": step.display, "reason": "executor-fault"}
            )
            self._handle_step_failure(step)
            return event
        store = self.memory.episodic
        added, retracted = [], []
        for lit in sorted(step.delete):
            report = store.assert_fact(
                logic.Bel(self.self_agent, logic.negate(logic.parse_formula(lit))), "perception"
            )
            added.extend(f.key for f in report.added)
            retracted.extend(f.key for f in report.retracted)
        for lit in sorted(step.add):
            report = store.assert_fact(
                logic.Bel(self.self_agent, logic.parse_formula(lit)), "perception"
            )
            added.extend(f.key for f in report.added)
            retracted.extend(f.key for f in report.retracted)
        if added or retracted:
            self._emit(
                "facts_asserted",
                {"source": "perception", "added": added, "retracted": retracted},
            )
        event = self._emit(
            "action_executed",
            {
                "step": step.display,
                "step_kind": "physical",
                "expression": [list(pair) for pair in self.last_labels],
            },
        )
        self.plan_index += 1
        return event

    def _handle_step_failure(self, step) -> None:
        """Feedback channel: replan without the failed step; abandon if the
        intention is no longer reachable."""
        self.failed_steps.add(step.display)
        intention = self.current_intention
        if intention is None:
            self.current_plan = None
            return
        result = self._plan_for(intention)
        if isinstance(result, planner.Plan):
            self._emit(
                "plan_found",
                {
                    "goal": intention.goal_key,
                    "steps": [s.display for s in result.steps],
                    "cost": result.cost,
                    "replan": True,
                },
            )
            self.current_plan = list(result.steps)
            self.plan_index = 0
        else:
            self._emit("plan_failed", {"goal": intention.goal_key, "reason": result.reason})
            intention.status = "abandoned"
            self.current_plan = None

    def _mark_expressed(self, act: ActInstance) -> None:
        definition = self.spec.catalog.get(act.definition)
        if definition.expresses is None:
            return
        for record in self.memory.episodic.emotions:
            if (
                not record.expressed
                and record.category == definition.expresses
                and record.content == act.content
                and (record.target or self.interlocutor) == act.addressee
            ):
                record.expressed = True

    # --- views ---

    def state_view(self) -> dict:
        snap = self.memory.snapshot()
        groups = {"beliefs": [], "goals": [], "ideals": [], "responsibilities": [], "other": []}
        for fact in snap.facts:
            f = fact.formula
            entry = {"formula": fact.key, "tick": fact.tick, "source": fact.source}
            if isinstance(f, logic.Bel):
                groups["beliefs"].append(entry)
            elif isinstance(f, logic.Goal):
                entry["priority"] = f.priority
                groups["goals"].append(entry)
            elif isinstance(f, logic.Ideal):
                entry["priority"] = f.priority
                groups["ideals"].append(entry)
            elif isinstance(f, logic.Resp):
                groups["responsibilities"].append(entry)
            else:
                groups["other"].append(entry)
        emotions = [
            {
                "id": r.id,
                "category": r.category.value,
                "holder": r.holder,
                "target": r.target,
                "content": logic.render_formula(r.content),
                "intensity": r.intensity,
                "expressed": r.expressed,
                "tick": r.tick,
            }
            for r in snap.emotions
        ]
        intentions = [
            {
                "kind": i.kind,
                "band": i.priority_band,
                "goal": i.goal_key,
                "score": i.score,
                "status": i.status,
                "origin": i.origin,
            }
            for i in self.intentions.values()
        ]
        obligations = [
            {
                "id": ob.id,
                "bearer": ob.bearer,
                "kind": ob.kind,
                "content": logic.render_formula(ob.content),
                "discharged": ob.discharged,
                "tick": ob.tick,
            }
            for ob in self.obligations
        ]
        plan_view = None
        if self.current_plan is not None:
            plan_view = {
                "steps": [s.display for s in self.current_plan],
                "index": self.plan_index,
            }
        last_sec = None
        if self.last_profile is not None:
            last_sec = {
                "novelty": self.last_profile.novelty,
                "pleasantness": self.last_profile.pleasantness,
                "goal_congruence": self.last_profile.goal_congruence,
                "coping_potential": self.last_profile.coping_potential,
                "norm_compatibility": self.last_profile.norm_compatibility,
                "labels": [list(pair) for pair in self.last_labels],
            }
        return {
            "tick": snap.tick,
            "agents": {"self": self.self_agent, "interlocutor": self.interlocutor},
            "dialogue_type": self.commitment.dialogue_type if self.commitment else self.spec.dialogue_type,
            **groups,
            "emotions": emotions,
            "intentions": intentions,
            "obligations": obligations,
            "plan": plan_view,
            "last_sec": last_sec,
            "history": [
                {
                    "id": a.id,
                    "definition": a.definition,
                    "speaker": a.speaker,
                    "addressee": a.addressee,
                    "content": logic.render_formula(a.content),
                    "direction": a.direction,
                    "tick": a.tick,
                }
                for a in snap.dialogue_history
            ],
        }

    def event_log_text(self) -> str:
        return "\n".join(e.to_json() for e in self.events) + ("\n" if self.events else "")


def load_semantic_from(spec: SessionSpec):
    from .memory import SemanticStore

    return SemanticStore(emotion_rules=tuple(spec.emotion_rules), act_catalog=spec.catalog)


def _atom_args(f: Formula):
    if isinstance(f, logic.Atom):
        yield from f.args
    elif isinstance(f, logic.Not):
        yield from _atom_args(f.inner)
    elif isinstance(f, (logic.Bel, logic.Resp, logic.Goal, logic.Ideal, logic.Emo)):
        yield from _atom_args(f.inner)
    elif isinstance(f, logic.And):
        for c in f.conjuncts:
            yield from _atom_args(c)


# --- scenario runner ---


@dataclass
class StepResult:
    index: int
    input: dict
    passed: bool
    failures: list[str] = field(default_factory=list)


@dataclass
class Transcript:
    events: list[Event]
    steps: list[StepResult]

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.steps)

    def log_text(self) -> str:
        return "\n".join(e.to_json() for e in self.events) + ("\n" if self.events else "")


def _event_matches(matcher: dict, event: Event) -> bool:
    if matcher.get("kind") != event.kind:
        return False
    for key, want in matcher.items():
        if key == "kind":
            continue
        got = event.payload.get(key)
        if isinstance(want, list) and isinstance(got, list):
            if any(item not in got for item in want):
                return False
        elif got != want:
            return False
    return True


def check_expectations(expect: Sequence[dict], events: Sequence[Event]) -> Optional[dict]:
    """Expected matchers must appear in order (subsequence); returns the first
    unmatched matcher or None."""
    i = 0
    for matcher in expect:
        while i < len(events) and not _event_matches(matcher, events[i]):
            i += 1
        if i == len(events):
            return matcher
        i += 1
    return None


def run_scenario(
    doc: dict,
    base_dir: Optional[Path] = None,
    raise_on_failure: bool = True,
) -> Transcript:
    if not isinstance(doc, dict) or "steps" not in doc:
        raise ScriptError("script must be an object with a 'steps' list")
    spec = SessionSpec.load(doc, base_dir)
    session = Session(spec, session_id=doc.get("name", "scenario"))
    results: list[StepResult] = []
    for index, step in enumerate(doc["steps"]):
        if not isinstance(step, dict) or "input" not in step:
            raise ScriptError(f"step {index}: needs an 'input'")
        inp = step["input"]
        if "utterance" in inp:
            events = session.handle_utterance(inp["utterance"])
        elif "stimulus" in inp:
            raw = inp["stimulus"]
            try:
                content = logic.parse_formula(raw["content"])
            except (KeyError, logic.FormulaSyntaxError) as exc:
                raise ScriptError(f"step {index}: bad stimulus: {exc}") from exc
            stimulus = perception.Stimulus(
                content=content,
                agent_responsible=raw.get("responsible"),
                perceiver=raw.get("perceiver", spec.self_agent),
            )
            events = session.handle_stimulus(stimulus)
        else:
            raise ScriptError(f"step {index}: input must have 'utterance' or 'stimulus'")
        unmatched = check_expectations(step.get("expect", []), events)
        if unmatched is not None:
            if raise_on_failure:
                raise AssertionFailure(index, unmatched, [e.to_json() for e in events])
            results.append(
                StepResult(index, inp, False, [f"no event matching {json.dumps(unmatched, sort_keys=True)}"])
            )
        else:
            results.append(StepResult(index, inp, True))
    return Transcript(events=list(session.events), steps=results)
