"""Emotion appraisal: the cognitive path and the sensorimotor path.

Cognitive: instantiate the twelve emotion-derivation rules against episodic
memory; each complete grounding yields an emotion record whose intensity is
the priority of the goal or ideal that fired the rule.

Sensorimotor: score every conversation act (incoming or outgoing) on the
five sequential checks (novelty, intrinsic pleasantness, goal congruence,
coping potential, norm compatibility) and map the scalars to categorical
expression labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import deliberation, logic, planner
from .acts import ActInstance, Catalog
from .logic import (
    BASIC_EMOTIONS,
    EmotionCategory,
    Formula,
    Goal,
    Ideal,
    OTHER_DIRECTED,
    Substitution,
)
from .memory import Fact, InferenceRule, Snapshot


@dataclass
class EmotionRecord:
    id: str
    category: EmotionCategory
    holder: str
    target: Optional[str]
    content: Formula
    intensity: float
    tick: int
    expressed: bool = False

    @property
    def key(self) -> tuple:
        return (self.category, self.target, logic.render_formula(self.content))


@dataclass(frozen=True)
class SecProfile:
    novelty: float
    pleasantness: float
    goal_congruence: float
    coping_potential: float
    norm_compatibility: float
    act_id: str = ""

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (
            self.novelty,
            self.pleasantness,
            self.goal_congruence,
            self.coping_potential,
            self.norm_compatibility,
        )


@dataclass(frozen=True)
class SecConfig:
    novelty_expected: float = 0.2
    novelty_unexpected: float = 1.0
    coping_low: float = 0.2
    coping_high: float = 1.0
    novelty_threshold: float = 0.5
    valence_threshold: float = 0.3
    coping_threshold: float = 0.4

    @classmethod
    def from_dict(cls, raw: dict) -> "SecConfig":
        known = {k: float(v) for k, v in raw.items() if k in cls.__dataclass_fields__}
        return cls(**known)


CHECK_ORDER = (
    "novelty",
    "pleasantness",
    "goal_congruence",
    "coping_potential",
    "norm_compatibility",
)

#: Which (motivator, polarity) row of the derivation table a category sits on;
#: a freshly fired basic emotion is subsumed by a responsibility-aware one
#: from the same row about the same content.
_ROW = {
    EmotionCategory.JOY: ("goal", "pos"),
    EmotionCategory.REJOICING: ("goal", "pos"),
    EmotionCategory.GRATITUDE: ("goal", "pos"),
    EmotionCategory.SADNESS: ("goal", "neg"),
    EmotionCategory.REGRET: ("goal", "neg"),
    EmotionCategory.DISAPPOINTMENT: ("goal", "neg"),
    EmotionCategory.APPROVAL: ("ideal", "pos"),
    EmotionCategory.MORAL_SATISFACTION: ("ideal", "pos"),
    EmotionCategory.ADMIRATION: ("ideal", "pos"),
    EmotionCategory.DISAPPROVAL: ("ideal", "neg"),
    EmotionCategory.GUILT: ("ideal", "neg"),
    EmotionCategory.REPROACH: ("ideal", "neg"),
}


def emotion_intensity(grounding: Fact) -> float:
    """Intensity is the priority of the Goal/Ideal fact that fired the rule."""
    f = grounding.formula
    if isinstance(f, (Goal, Ideal)) and f.priority is not None:
        return f.priority
    return logic.DEFAULT_PRIORITY


def appraise_cognitive(
    snap: Snapshot, self_agent: str, rules: Sequence[InferenceRule]
) -> list[EmotionRecord]:
    """New emotion records derivable for self from the snapshot.

    Deduplicates against records already stored (same category, target and
    content), and keeps only the most specific firing per derivation row:
    when a responsibility-aware emotion fires, the plain believed-fact
    emotion of the same row and content stays silent.
    """
    existing = {r.key for r in snap.emotions}
    candidates: list[EmotionRecord] = []
    seen: set[tuple] = set()
    for rule in rules:
        for subst, matched in _join_snapshot(snap, rule.premises, {"a": self_agent}):
            if not _distinct_ok(rule, subst):
                continue
            emo = logic.substitute(rule.conclusion, subst)
            record = EmotionRecord(
                id="",
                category=emo.category,
                holder=emo.holder,
                target=emo.target,
                content=emo.inner,
                intensity=_intensity_from_match(matched),
                tick=snap.tick,
            )
            if record.key in existing or record.key in seen:
                continue
            seen.add(record.key)
            candidates.append(record)
    return _suppress_subsumed(candidates, snap.emotions)


def _intensity_from_match(matched: tuple[Fact, ...]) -> float:
    for fact in matched:
        if isinstance(fact.formula, (Goal, Ideal)):
            return emotion_intensity(fact)
    return logic.DEFAULT_PRIORITY


def _suppress_subsumed(candidates: list[EmotionRecord], stored: Sequence) -> list[EmotionRecord]:
    specific_rows = {
        (_ROW[r.category], r.holder, logic.render_formula(r.content))
        for r in list(candidates) + list(stored)
        if r.category not in BASIC_EMOTIONS
    }
    out = []
    for r in candidates:
        if r.category in BASIC_EMOTIONS:
            row = (_ROW[r.category], r.holder, logic.render_formula(r.content))
            if row in specific_rows:
                continue
        out.append(r)
    return out


def _join_snapshot(snap: Snapshot, premises, seed: dict):
    def extend(i: int, subst: Substitution, matched: tuple):
        if i == len(premises):
            yield subst, matched
            return
        for fact in snap.facts:
            one = logic.match(premises[i], fact.formula)
            if one is None:
                continue
            merged = _merge(subst, one)
            if merged is not None:
                yield from extend(i + 1, merged, matched + (fact,))

    yield from extend(0, Substitution(dict(seed), {}), ())


def _merge(base: Substitution, extra: Substitution) -> Optional[Substitution]:
    bindings = dict(base.bindings)
    for name, value in extra.bindings.items():
        if name in bindings:
            if not logic._values_equal(bindings[name], value):
                return None
        else:
            bindings[name] = value
    priorities = dict(base.priorities)
    priorities.update(extra.priorities)
    return Substitution(bindings, priorities)


def _distinct_ok(rule: InferenceRule, subst: Substitution) -> bool:
    from .memory import _distinct_ok as check

    return check(rule, subst)


# --- sensorimotor path ---


def appraise_sensorimotor(
    act: ActInstance,
    snap: Snapshot,
    pending_obligations: Sequence,
    catalog: Catalog,
    physical_operators: Sequence = (),
    config: SecConfig = SecConfig(),
    self_agent: Optional[str] = None,
) -> SecProfile:
    """The five checks for one act, pure in its inputs.

    Novelty asks whether the act was anticipated by a pending obligation;
    pleasantness mixes the act type's intrinsic valence with the content's
    bearing on self's goals and ideals; congruence sums signed priorities of
    the goals and ideals the content touches; coping asks whether anything
    can be done about an offending content (or nothing needs doing); norm
    compatibility is the strongest upheld or violated ideal.
    """
    me = self_agent or (act.addressee if act.direction == "received" else act.speaker)
    definition = catalog.get(act.definition)
    content = act.content

    anticipated = any(
        not ob.discharged and deliberation.act_discharges(act, ob)
        for ob in pending_obligations
    )
    novelty = config.novelty_expected if anticipated else config.novelty_unexpected

    signed = _signed_priorities(snap, me, content)
    supports = any(s > 0 for s, _ in signed)
    contradicts = any(s < 0 for s, _ in signed)
    content_valence = (1.0 if supports else 0.0) - (1.0 if contradicts else 0.0)
    pleasantness = _clamp(0.5 * definition.valence + 0.5 * content_valence, -1.0, 1.0)

    goal_congruence = _clamp(sum(s for s, _ in signed), -1.0, 1.0)

    if contradicts:
        fixable = False
        try:
            fixable = planner.can_produce(physical_operators, logic.negate(content))
        except ValueError:
            fixable = False
        coping = config.coping_high if fixable else config.coping_low
    elif supports:
        coping = config.coping_high
    else:
        coping = config.coping_low

    upheld = max((s for s, kind in signed if kind == "ideal" and s > 0), default=0.0)
    violated = max((-s for s, kind in signed if kind == "ideal" and s < 0), default=0.0)
    if violated >= upheld and violated > 0:
        norm = -violated
    elif upheld > 0:
        norm = upheld
    else:
        norm = 0.0

    return SecProfile(
        novelty=_clamp(novelty, 0.0, 1.0),
        pleasantness=pleasantness,
        goal_congruence=goal_congruence,
        coping_potential=_clamp(coping, 0.0, 1.0),
        norm_compatibility=_clamp(norm, -1.0, 1.0),
        act_id=act.id,
    )


def _signed_priorities(snap: Snapshot, me: str, content: Formula) -> list[tuple[float, str]]:
    """(signed priority, goal|ideal) for each of self's goals/ideals the
    content satisfies (+) or contradicts (-)."""
    try:
        complement = logic.negate(content)
    except ValueError:
        complement = None
    out = []
    for fact in snap.facts:
        f = fact.formula
        if not isinstance(f, (Goal, Ideal)) or f.agent != me:
            continue
        kind = "goal" if isinstance(f, Goal) else "ideal"
        priority = f.priority if f.priority is not None else logic.DEFAULT_PRIORITY
        if f.inner == content:
            out.append((priority, kind))
        elif complement is not None and f.inner == complement:
            out.append((-priority, kind))
    return out


def _clamp(x: float, lo: float, hi: float) -> float:
    return max(lo, min(hi, x))


# --- categorical expression labels ---

LABELS = {
    "novelty": ("Nouveau", "Attendu"),
    "pleasantness": ("Déplaisant", "Neutre", "Plaisant"),
    "goal_congruence": ("Attentes-insatisfaites", "Neutre", "Attentes-satisfaites"),
    "coping_potential": ("Peu-de-contrôle", "Contrôle-élevé"),
    "norm_compatibility": ("Norme-violée", "Neutre", "Norme-respectée"),
}

ExpressionSequence = tuple[tuple[str, str], ...]


def sec_to_labels(profile: SecProfile, config: SecConfig = SecConfig()) -> ExpressionSequence:
    """Threshold the five scalars into the fixed check order's labels."""
    novel, expected = LABELS["novelty"]
    low_c, high_c = LABELS["coping_potential"]
    out = [
        ("novelty", novel if profile.novelty >= config.novelty_threshold else expected),
        ("pleasantness", _tri(profile.pleasantness, config.valence_threshold, LABELS["pleasantness"])),
        ("goal_congruence", _tri(profile.goal_congruence, config.valence_threshold, LABELS["goal_congruence"])),
        ("coping_potential", low_c if profile.coping_potential <= config.coping_threshold else high_c),
        ("norm_compatibility", _tri(profile.norm_compatibility, config.valence_threshold, LABELS["norm_compatibility"])),
    ]
    return tuple(out)


def _tri(value: float, threshold: float, labels: tuple[str, str, str]) -> str:
    negative, neutral, positive = labels
    if value <= -threshold:
        return negative
    if value >= threshold:
        return positive
    return neutral
