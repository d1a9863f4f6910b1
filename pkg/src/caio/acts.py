"""The multimodal conversation-act language.

Acts carry sincerity preconditions, sending effects and reception effects,
all written as patterns over the speaker ?S, the addressee ?H and the
propositional content ?F. Expressive acts are the surface form of one
emotion category: their preconditions are exactly that emotion's defining
mental states, their sending effect publishes the emotion, and their
reception effects attribute the defining states to the speaker.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import logic
from .logic import Bel, Emo, EmotionCategory, Formula, Substitution
from .memory import EpisodicStore, InferenceRule, RevisionReport, Snapshot, ValidationError

ACT_CLASSES = ("assertive", "directive", "commissive", "expressive")

ALLOWED_VARS = frozenset({"s", "h", "f"})

#: The smallest catalog the engine accepts.
CORE_ACTS = frozenset(
    {
        "inform", "assert", "deny",
        "request", "suggest", "demand", "ask-if", "ask-ref",
        "promise", "accept", "refuse",
        "thank", "congratulate", "reproach", "rejoice", "regret", "apologize",
    }
)


class UnknownAct(KeyError):
    pass


@dataclass(frozen=True)
class ActDefinition:
    name: str
    act_class: str
    valence: float
    preconditions: tuple[Formula, ...]
    sending_effects: tuple[Formula, ...]
    reception_effects: tuple[Formula, ...]
    surface_template: str
    expresses: Optional[EmotionCategory] = None
    strength: str = "mild"


@dataclass
class ActInstance:
    id: str
    definition: str
    speaker: str
    addressee: str
    content: Formula
    direction: str  # sent | received
    tick: int
    own_action: bool = False  # speaker declared their own doing (stimulus semantics)

    def substitution(self) -> Substitution:
        return Substitution({"s": self.speaker, "h": self.addressee, "f": self.content})

    def render(self) -> str:
        arrow = "->" if self.direction == "sent" else "<-"
        return f"{self.definition}({self.speaker}{arrow}{self.addressee}, {logic.render_formula(self.content)})"


@dataclass
class Catalog:
    acts: dict[str, ActDefinition] = field(default_factory=dict)

    def __contains__(self, name: str) -> bool:
        return name in self.acts

    def __len__(self) -> int:
        return len(self.acts)

    def get(self, name: str) -> ActDefinition:
        try:
            return self.acts[name]
        except KeyError:
            raise UnknownAct(name) from None

    def expressing(self, category: EmotionCategory) -> list[ActDefinition]:
        return [a for a in self.acts.values() if a.expresses == category]


@dataclass(frozen=True)
class PreconditionCheck:
    holds: bool
    missing: tuple[Formula, ...] = ()


def load_catalog(doc: list, emotion_rules: Optional[tuple[InferenceRule, ...]] = None) -> Catalog:
    """Validate a catalog document; with emotion rules given, also check that
    every expressive act's semantics agrees with its emotion's definition."""
    catalog = Catalog()
    for i, raw in enumerate(doc):
        where = f"catalog[{i}]"
        name = raw.get("name")
        if not name:
            raise ValidationError(where, "act needs a name")
        if name in catalog.acts:
            raise ValidationError(where, f"duplicate act name {name!r}")
        act_class = raw.get("class")
        if act_class not in ACT_CLASSES:
            raise ValidationError(where, f"class must be one of {ACT_CLASSES}")
        valence = float(raw.get("valence", 0.0))
        if not -1.0 <= valence <= 1.0:
            raise ValidationError(where, f"valence {valence} outside [-1,1]")
        expresses = None
        if raw.get("expresses"):
            try:
                expresses = EmotionCategory(raw["expresses"])
            except ValueError:
                raise ValidationError(where, f"unknown emotion {raw['expresses']!r}") from None
        if act_class == "expressive" and expresses is None:
            raise ValidationError(where, "expressive act must declare the emotion it expresses")

        def patterns(key: str) -> tuple[Formula, ...]:
            out = []
            for text in raw.get(key, []):
                try:
                    p = logic.parse_pattern(text)
                except logic.FormulaSyntaxError as exc:
                    raise ValidationError(f"{where}.{key}", str(exc)) from exc
                stray = set(logic.variables(p)) - ALLOWED_VARS
                if stray:
                    raise ValidationError(
                        f"{where}.{key}", f"only ?S/?H/?F allowed, found {sorted(stray)}"
                    )
                out.append(p)
            return tuple(out)

        definition = ActDefinition(
            name=name,
            act_class=act_class,
            valence=valence,
            preconditions=patterns("preconditions"),
            sending_effects=patterns("sending_effects"),
            reception_effects=patterns("reception_effects"),
            surface_template=raw.get("surface_template", name + ": {content}"),
            expresses=expresses,
            strength=raw.get("strength", "mild"),
        )
        catalog.acts[name] = definition

    missing = CORE_ACTS - set(catalog.acts)
    if missing:
        raise ValidationError("catalog", f"core acts missing: {sorted(missing)}")
    if emotion_rules is not None:
        problems = check_expressive_consistency(catalog, emotion_rules)
        if problems:
            raise ValidationError("catalog", "; ".join(problems))
    return catalog


def expressive_semantics(
    category: EmotionCategory, rule: InferenceRule
) -> tuple[tuple[Formula, ...], tuple[Formula, ...], tuple[Formula, ...]]:
    """Generate (preconditions, sending effects, reception effects) for an act
    expressing `category` from the emotion's derivation rule.

    The defining mental states become the sincerity preconditions (holder
    renamed to the speaker, target to the addressee). Sending publishes the
    emotion to the hearer. Reception attributes the defining states to the
    speaker, from the receiving agent's point of view.
    """
    rename = Substitution({"a": "?s", "b": "?h", "f": logic.FVar("f")})
    preconditions = tuple(logic.substitute(p, rename, keep_wildcards=True) for p in rule.premises)
    emo_pattern = logic.substitute(rule.conclusion, rename, keep_wildcards=True)
    sending = (Bel("?s", Bel("?h", emo_pattern)),)
    reception = tuple(Bel("?h", p) for p in preconditions)
    return preconditions, sending, reception


def check_expressive_consistency(
    catalog: Catalog, emotion_rules: tuple[InferenceRule, ...]
) -> list[str]:
    """Compare every expressive act against the semantics generated from its
    emotion's definition; returns a list of discrepancies (empty = consistent)."""
    by_category = {}
    for rule in emotion_rules:
        by_category[rule.conclusion.category] = rule
    problems = []
    for act in catalog.acts.values():
        if act.act_class != "expressive" or act.expresses is None:
            continue
        rule = by_category.get(act.expresses)
        if rule is None:
            problems.append(f"{act.name}: no definition for {act.expresses.value}")
            continue
        want_pre, want_send, want_recv = expressive_semantics(act.expresses, rule)
        for label, want, got in (
            ("preconditions", want_pre, act.preconditions),
            ("sending_effects", want_send, act.sending_effects),
            ("reception_effects", want_recv, act.reception_effects),
        ):
            want_keys = sorted(logic.render_formula(p) for p in want)
            got_keys = sorted(logic.render_formula(p) for p in got)
            if want_keys != got_keys:
                problems.append(
                    f"{act.name}.{label}: expected {want_keys}, found {got_keys}"
                )
    return problems


def check_preconditions(act: ActInstance, snap: Snapshot, catalog: Catalog) -> PreconditionCheck:
    """Sincerity gate: every instantiated precondition must hold in episodic
    memory; preconditions rooted in an emotion check the emotion records."""
    definition = catalog.get(act.definition)
    subst = act.substitution()
    missing = []
    for pattern in definition.preconditions:
        instantiated = logic.substitute(pattern, subst, keep_wildcards=True)
        if isinstance(instantiated, Emo):
            if not _emotion_present(instantiated, snap):
                missing.append(instantiated)
        elif not snap.holds(instantiated):
            missing.append(instantiated)
    return PreconditionCheck(holds=not missing, missing=tuple(missing))


def _emotion_present(emo: Emo, snap: Snapshot) -> bool:
    for record in snap.emotions:
        if (
            record.category == emo.category
            and record.holder == emo.holder
            and record.target == emo.target
            and record.content == emo.inner
        ):
            return True
    return False


def apply_sending_effects(act: ActInstance, store: EpisodicStore, catalog: Catalog) -> RevisionReport:
    if act.direction != "sent":
        raise ValueError("sending effects apply to sent acts")
    return _apply_effects(act, store, catalog.get(act.definition).sending_effects,
                          "sending-effect")


def apply_reception_effects(act: ActInstance, store: EpisodicStore, catalog: Catalog) -> RevisionReport:
    if act.direction != "received":
        raise ValueError("reception effects apply to received acts")
    definition = catalog.get(act.definition)
    effects = list(definition.reception_effects)
    if act.own_action:
        # the speaker announced their own doing: credit them with it
        effects.append(logic.parse_pattern("Bel(?H, Resp(?S, ?F))"))
    return _apply_effects(act, store, effects, "reception-effect")


def _apply_effects(act: ActInstance, store: EpisodicStore, effects, source: str) -> RevisionReport:
    subst = act.substitution()
    report = RevisionReport()
    for pattern in effects:
        ground = logic.substitute(pattern, subst)
        report = report.merge(store.assert_fact(ground, source))
    store.dialogue_history.append(act)
    return report


def surface_text(act: ActInstance, catalog: Catalog) -> str:
    template = catalog.get(act.definition).surface_template
    return template.replace("{content}", logic.render_formula(act.content, with_priorities=False))
