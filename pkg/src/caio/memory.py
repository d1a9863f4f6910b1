"""Three-part agent memory.

Episodic: timestamped ground facts (the agent's own mental states and its
picture of the interlocutor's), emotion records and the dialogue history.
Semantic: the emotion-derivation rules and the conversation-act catalog.
Procedural: planning operators and the discourse rules.

Updates happen in three steps: new facts are added, facts contradicting them
at the same modal prefix are retracted (newest wins), then forward-chaining
inference runs to fixpoint.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional

from . import logic
from .logic import Formula, Substitution

SOURCES = ("perception", "reception-effect", "sending-effect", "inference", "scenario-init")


class NotGround(ValueError):
    pass


class ValidationError(ValueError):
    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


class DepthLimitExceeded(RuntimeError):
    pass


class Clock:
    """Monotonic event counter shared by a session's stores and event log."""

    def __init__(self, start: int = 0):
        self._tick = start

    def next(self) -> int:
        self._tick += 1
        return self._tick

    @property
    def current(self) -> int:
        return self._tick


@dataclass(frozen=True)
class Fact:
    formula: Formula
    source: str
    tick: int

    @property
    def key(self) -> str:
        return logic.render_formula(self.formula)


@dataclass(frozen=True)
class RevisionReport:
    added: tuple[Fact, ...] = ()
    retracted: tuple[Fact, ...] = ()

    @property
    def empty(self) -> bool:
        return not self.added and not self.retracted

    def merge(self, other: "RevisionReport") -> "RevisionReport":
        return RevisionReport(self.added + other.added, self.retracted + other.retracted)


@dataclass(frozen=True)
class InferenceRule:
    name: str
    premises: tuple[Formula, ...]
    conclusion: Formula
    distinct: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class Snapshot:
    """Immutable view of the episodic store at a tick."""

    facts: tuple[Fact, ...]
    emotions: tuple
    dialogue_history: tuple
    tick: int

    def query(self, pattern: Formula) -> list[tuple[Fact, Substitution]]:
        hits = []
        for fact in self.facts:
            subst = logic.match(pattern, fact.formula)
            if subst is not None:
                hits.append((fact, subst))
        hits.sort(key=lambda pair: -pair[0].tick)
        return hits

    def holds(self, pattern: Formula) -> bool:
        return any(logic.match(pattern, fact.formula) is not None for fact in self.facts)


class EpisodicStore:
    """Ground facts keyed by canonical rendering, with newest-wins revision."""

    def __init__(self, clock: Optional[Clock] = None):
        self.clock = clock or Clock()
        self._facts: dict[str, Fact] = {}
        # priority-stripped rendering -> full keys, for contradiction lookup
        self._stripped: dict[str, dict[str, None]] = {}
        self.emotions: list = []
        self.dialogue_history: list = []
        self.log: list[dict] = []

    def __len__(self) -> int:
        return len(self._facts)

    def facts(self) -> list[Fact]:
        return list(self._facts.values())

    @property
    def last_tick(self) -> int:
        return self.clock.current

    def assert_fact(self, f: Formula, source: str, tick: Optional[int] = None) -> RevisionReport:
        if not logic.is_ground(f):
            raise NotGround(logic.render_formula(f))
        logic.validate_formula(f)
        key = logic.render_formula(f)
        if key in self._facts:
            return RevisionReport()
        retracted = []
        for contra_key in logic.contradiction_renderings(f):
            for full_key in list(self._stripped.get(contra_key, ())):
                retracted.append(self._remove(full_key))
        # a re-assertion that differs only in priority supersedes the old value
        stripped = logic.planning_key(f)
        for full_key in list(self._stripped.get(stripped, ())):
            retracted.append(self._remove(full_key))
        fact = Fact(f, source, self.clock.next() if tick is None else tick)
        self._facts[key] = fact
        self._stripped.setdefault(stripped, {})[key] = None
        for old in retracted:
            self.log.append({"tick": fact.tick, "op": "retract", "formula": old.key,
                             "source": source})
        self.log.append({"tick": fact.tick, "op": "assert", "formula": key, "source": source})
        return RevisionReport(added=(fact,), retracted=tuple(retracted))

    def _remove(self, key: str) -> Fact:
        fact = self._facts.pop(key)
        stripped = logic.planning_key(fact.formula)
        bucket = self._stripped.get(stripped)
        if bucket is not None:
            bucket.pop(key, None)
            if not bucket:
                del self._stripped[stripped]
        return fact

    def query(self, pattern: Formula) -> list[tuple[Fact, Substitution]]:
        hits = []
        for fact in self._facts.values():
            subst = logic.match(pattern, fact.formula)
            if subst is not None:
                hits.append((fact, subst))
        hits.sort(key=lambda pair: -pair[0].tick)
        return hits

    def holds(self, pattern: Formula) -> bool:
        return any(logic.match(pattern, f.formula) is not None for f in self._facts.values())

    def snapshot(self) -> Snapshot:
        return Snapshot(
            facts=tuple(self._facts.values()),
            emotions=tuple(self.emotions),
            dialogue_history=tuple(self.dialogue_history),
            tick=self.clock.current,
        )

    def run_inference(self, rules: Iterable[InferenceRule], limit: int = 1000) -> list[Fact]:
        """Forward chaining to fixpoint; derived facts get source 'inference'."""
        derived: list[Fact] = []
        total = 0
        changed = True
        while changed:
            changed = False
            for rule in rules:
                pending: dict[str, Formula] = {}
                for subst, matched in _join(self, rule.premises):
                    if not _distinct_ok(rule, subst):
                        continue
                    try:
                        conclusion = logic.substitute(rule.conclusion, subst)
                    except ValueError:
                        continue
                    if logic.formula_depth(conclusion) > max(
                        logic.formula_depth(m.formula) for m in matched
                    ) + 1:
                        continue  # termination bound on derived depth
                    key = logic.render_formula(conclusion)
                    if key not in self._facts:
                        pending.setdefault(key, conclusion)
                for conclusion in pending.values():
                    total += 1
                    if total > limit:
                        raise DepthLimitExceeded(f"more than {limit} derivations")
                    report = self.assert_fact(conclusion, "inference")
                    derived.extend(report.added)
                    if report.added:
                        changed = True
        return derived

    def replay_log(self) -> "EpisodicStore":
        """Rebuild a store purely from the event log (determinism check)."""
        fresh = EpisodicStore()
        for entry in self.log:
            f = logic.parse_formula(entry["formula"])
            if entry["op"] == "assert":
                fact = Fact(f, entry["source"], entry["tick"])
                fresh._facts[fact.key] = fact
                fresh._stripped.setdefault(logic.planning_key(f), {})[fact.key] = None
            else:
                if logic.render_formula(f) in fresh._facts:
                    fresh._remove(logic.render_formula(f))
        return fresh

    def dump_log(self) -> str:
        return "\n".join(json.dumps(entry, sort_keys=True) for entry in self.log)


def _join(store: EpisodicStore, premises: tuple[Formula, ...]):
    """All substitutions satisfying every premise, with the matched facts."""

    def extend(i: int, subst: Substitution, matched: tuple[Fact, ...]):
        if i == len(premises):
            yield subst, matched
            return
        for fact in store._facts.values():
            extended = _match_with(premises[i], fact.formula, subst)
            if extended is not None:
                yield from extend(i + 1, extended, matched + (fact,))

    yield from extend(0, Substitution({}, {}), ())


def _match_with(pattern: Formula, g: Formula, base: Substitution) -> Optional[Substitution]:
    subst = logic.match(pattern, g)
    if subst is None:
        return None
    merged = dict(base.bindings)
    for name, value in subst.bindings.items():
        if name in merged:
            if not logic._values_equal(merged[name], value):
                return None
        else:
            merged[name] = value
    priorities = dict(base.priorities)
    priorities.update(subst.priorities)
    return Substitution(merged, priorities)


def _distinct_ok(rule: InferenceRule, subst: Substitution) -> bool:
    for left, right in rule.distinct:
        lv = subst.get(_distinct_name(left))
        rv = subst.get(_distinct_name(right))
        if lv is not None and rv is not None and logic._values_equal(lv, rv):
            return False
    return True


def _distinct_name(token: str) -> str:
    return (logic.var_name(token) if logic.is_var(token) else token).lower()


def load_rules(doc: list, path: str = "rules") -> list[InferenceRule]:
    """Parse a JSON rule list: {name, premises: [pattern], conclusion, distinct?}."""
    rules = []
    names = set()
    for i, raw in enumerate(doc):
        where = f"{path}[{i}]"
        if not isinstance(raw, dict):
            raise ValidationError(where, "rule must be an object")
        name = raw.get("name")
        if not name or name in names:
            raise ValidationError(where, "missing or duplicate rule name")
        names.add(name)
        try:
            premises = tuple(logic.parse_pattern(p) for p in raw["premises"])
            conclusion = logic.parse_pattern(raw["conclusion"])
        except (KeyError, logic.FormulaSyntaxError) as exc:
            raise ValidationError(where, f"bad pattern: {exc}") from exc
        premise_vars = set()
        for p in premises:
            premise_vars.update(logic.variables(p))
        unbound = set(logic.variables(conclusion)) - premise_vars
        if unbound:
            raise ValidationError(where, f"conclusion variables not in premises: {sorted(unbound)}")
        distinct = tuple(
            (str(a), str(b)) for a, b in raw.get("distinct", [])
        )
        rules.append(InferenceRule(name, premises, conclusion, distinct))
    return rules


@dataclass
class SemanticStore:
    emotion_rules: tuple[InferenceRule, ...]
    act_catalog: object = None  # a Catalog; typed loosely to avoid an import cycle

    def rule_for(self, category) -> InferenceRule:
        for rule in self.emotion_rules:
            if rule.name == category.value:
                return rule
        raise KeyError(category)


@dataclass
class ProceduralStore:
    operators: tuple = ()
    discourse_rules: tuple = ()


def load_semantic(rules_doc: list, catalog=None, path: str = "emotion_rules") -> SemanticStore:
    """Validate and load the emotion-derivation rules (one per category)."""
    from .logic import Emo, EmotionCategory

    rules = load_rules(rules_doc, path)
    seen: dict[str, str] = {}
    for rule in rules:
        if not isinstance(rule.conclusion, Emo):
            raise ValidationError(path, f"rule {rule.name}: conclusion must be an Emo pattern")
        category = rule.conclusion.category.value
        if category in seen:
            raise ValidationError(path, f"category {category} appears more than once")
        seen[category] = rule.name
    missing = {c.value for c in EmotionCategory} - set(seen)
    if missing:
        raise ValidationError(path, f"missing emotion rules: {sorted(missing)}")
    if len(rules) != len(EmotionCategory):
        raise ValidationError(path, f"expected {len(EmotionCategory)} rules, got {len(rules)}")
    return SemanticStore(emotion_rules=tuple(rules), act_catalog=catalog)


def load_procedural(operators=(), discourse_rules=()) -> ProceduralStore:
    names = [op.name for op in operators]
    if len(names) != len(set(names)):
        raise ValidationError("operators", "duplicate operator names")
    return ProceduralStore(operators=tuple(operators), discourse_rules=tuple(discourse_rules))


class Memory:
    """The full memory bank a session operates on."""

    def __init__(self, semantic: SemanticStore, procedural: ProceduralStore,
                 clock: Optional[Clock] = None):
        self.clock = clock or Clock()
        self.episodic = EpisodicStore(self.clock)
        self.semantic = semantic
        self.procedural = procedural

    def snapshot(self) -> Snapshot:
        return self.episodic.snapshot()
