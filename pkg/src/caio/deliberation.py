"""Decide the next intention from emotions, discourse obligations and the
session's global commitment.

Priority is layered, not weighted: emotional intentions always dominate
obligation-based ones, which dominate the global intention. Within a layer
the score orders candidates (emotion intensity; obligation recency; a config
value for the global goal), and the remaining ties fall to the most recent
origin and finally the goal rendering, so selection is a total order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import logic
from .acts import ActInstance
from .logic import Atom, Formula
from .memory import ValidationError

OBLIGATION_KINDS = ("achieve", "address_request", "answer_if", "inform_ref")

BANDS = {"emotional": "high", "obligation": "medium", "global": "low"}
_BAND_RANK = {"emotional": 0, "obligation": 1, "global": 2}


@dataclass
class Obligation:
    id: str
    bearer: str
    kind: str
    content: Formula
    source_act: str
    tick: int
    discharged: bool = False


@dataclass(frozen=True)
class ObligationRule:
    name: str
    trigger_acts: tuple[str, ...]
    direction: str  # received | sent | any
    bearer: str  # speaker | addressee
    obligation: str


@dataclass(frozen=True)
class GlobalCommitment:
    goal: Formula
    dialogue_type: str = "deliberation"
    adopted_via: str = "config"  # promise-act | accept-act | config


@dataclass
class Intention:
    kind: str  # emotional | obligation | global
    goal: Formula
    score: float
    origin: str
    origin_tick: int
    status: str = "pending"  # pending | planned | achieved | abandoned

    @property
    def priority_band(self) -> str:
        return BANDS[self.kind]

    @property
    def goal_key(self) -> str:
        return logic.planning_key(self.goal)

    @property
    def identity(self) -> tuple[str, str, str]:
        return (self.kind, self.goal_key, self.origin)


def load_discourse_rules(doc: list) -> tuple[ObligationRule, ...]:
    rules = []
    kinds_seen = set()
    for i, raw in enumerate(doc):
        where = f"discourse_rules[{i}]"
        kind = raw.get("obligation")
        if kind not in OBLIGATION_KINDS:
            raise ValidationError(where, f"obligation must be one of {OBLIGATION_KINDS}")
        if raw.get("bearer") not in ("speaker", "addressee"):
            raise ValidationError(where, "bearer must be 'speaker' or 'addressee'")
        if raw.get("direction", "any") not in ("received", "sent", "any"):
            raise ValidationError(where, "direction must be received/sent/any")
        triggers = tuple(raw.get("trigger_acts", ()))
        if not triggers:
            raise ValidationError(where, "trigger_acts must not be empty")
        kinds_seen.add(kind)
        rules.append(
            ObligationRule(
                name=raw.get("name", f"rule-{i}"),
                trigger_acts=triggers,
                direction=raw.get("direction", "any"),
                bearer=raw["bearer"],
                obligation=kind,
            )
        )
    if len(rules) != 4 or kinds_seen != set(OBLIGATION_KINDS):
        raise ValidationError("discourse_rules", "expected exactly the four discourse rules")
    return tuple(rules)


def derive_obligations(
    act: ActInstance,
    self_agent: str,
    rules: Sequence[ObligationRule],
    next_id: int = 0,
) -> list[Obligation]:
    """Obligations the act creates, for either party (the interlocutor's are
    tracked too; they only feed expectation checks)."""
    out = []
    for rule in rules:
        if act.definition not in rule.trigger_acts:
            continue
        if rule.direction != "any" and act.direction != rule.direction:
            continue
        bearer = act.speaker if rule.bearer == "speaker" else act.addressee
        out.append(
            Obligation(
                id=f"ob-{act.tick}-{next_id + len(out)}",
                bearer=bearer,
                kind=rule.obligation,
                content=act.content,
                source_act=act.id,
                tick=act.tick,
            )
        )
    return out


def act_discharges(act: ActInstance, obligation: Obligation) -> bool:
    """Whether performing this act fulfills the obligation."""
    if obligation.discharged or act.speaker != obligation.bearer:
        return False
    content = act.content
    target = obligation.content
    if obligation.kind == "address_request":
        return act.definition in ("accept", "refuse") and content == target
    if obligation.kind == "answer_if":
        if act.definition not in ("inform", "assert", "deny"):
            return False
        try:
            return content == target or content == logic.negate(target)
        except ValueError:
            return content == target
    if obligation.kind == "inform_ref":
        if act.definition not in ("inform", "assert"):
            return False
        if content == target:
            return True
        token = logic.content_token(target)
        return isinstance(content, Atom) and token in content.args
    return False  # achieve is discharged against memory, not by an act


def discharge_with_act(act: ActInstance, obligations: Sequence[Obligation]) -> list[Obligation]:
    """Mark and return the obligations this act discharges."""
    done = []
    for ob in obligations:
        if act_discharges(act, ob):
            ob.discharged = True
            done.append(ob)
    return done


def obligation_goal(ob: Obligation) -> Formula:
    token = logic.content_token(ob.content)
    if ob.kind == "achieve":
        return ob.content
    if ob.kind == "address_request":
        return Atom("addressed", ("request", token))
    if ob.kind == "answer_if":
        return Atom("answered", ("if", token))
    return Atom("answered", ("ref", token))


def emotional_goal(record, interlocutor: str) -> Formula:
    addressee = record.target or interlocutor
    return Atom(
        "expressed",
        (record.category.value, addressee, logic.content_token(record.content)),
    )


def generate_intentions(
    emotions: Sequence,
    obligations: Sequence[Obligation],
    commitment: Optional[GlobalCommitment],
    self_agent: str,
    interlocutor: str,
    now_tick: int,
    global_score: float = 0.5,
) -> list[Intention]:
    """One high-band intention per unexpressed emotion, one medium-band per
    undischarged own obligation (newer scores higher), at most one low-band
    global intention."""
    intentions = []
    for record in emotions:
        if record.expressed or record.holder != self_agent:
            continue
        intentions.append(
            Intention(
                kind="emotional",
                goal=emotional_goal(record, interlocutor),
                score=record.intensity,
                origin=record.id,
                origin_tick=record.tick,
            )
        )
    for ob in obligations:
        if ob.discharged or ob.bearer != self_agent:
            continue
        age = max(0, now_tick - ob.tick)
        intentions.append(
            Intention(
                kind="obligation",
                goal=obligation_goal(ob),
                score=1.0 / (1.0 + age),
                origin=ob.id,
                origin_tick=ob.tick,
            )
        )
    if commitment is not None:
        intentions.append(
            Intention(
                kind="global",
                goal=commitment.goal,
                score=global_score,
                origin=f"commitment:{commitment.dialogue_type}",
                origin_tick=0,
            )
        )
    return intentions


def select_intention(intentions: Sequence[Intention]) -> Optional[Intention]:
    """Highest band wins; then score, then most recent origin, then the goal
    rendering. Permutation-invariant by construction."""
    candidates = [i for i in intentions if i.status == "pending"]
    if not candidates:
        return None
    return min(
        candidates,
        key=lambda i: (_BAND_RANK[i.kind], -i.score, -i.origin_tick, i.goal_key, i.origin),
    )
