"""STRIPS planning over a PDDL subset, with conversation acts as operators.

Operators come from two places: physical actions parsed from a PDDL domain
file, and conversation acts compiled from the catalog (their sincerity
preconditions become precondition literals, their sending effects plus a
bookkeeping literal such as expressed(...) become add effects). Plans may
mix both kinds. Ground literals are canonical formula renderings, so the
planner works directly over the agent's projected mental state.
"""

from __future__ import annotations

import heapq
import itertools
import re
import time
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from . import logic
from .acts import Catalog
from .logic import Atom, Bel, Formula, Not, Substitution
from .memory import Snapshot, ValidationError


class PddlSyntaxError(ValueError):
    pass


class NoExpressingAct(LookupError):
    pass


class InvalidPlan(AssertionError):
    pass


@dataclass(frozen=True)
class Operator:
    name: str
    parameters: tuple[str, ...]
    param_types: tuple[Optional[str], ...]
    pre_pos: tuple[Formula, ...]
    pre_neg: tuple[Formula, ...]
    add_effects: tuple[Formula, ...]
    del_effects: tuple[Formula, ...]
    cost: float = 1.0
    kind: str = "physical"  # physical | conversation_act


@dataclass(frozen=True)
class GroundOperator:
    name: str
    args: tuple[str, ...]
    pre_pos: frozenset[str]
    pre_neg: frozenset[str]
    add: frozenset[str]
    delete: frozenset[str]
    cost: float = 1.0
    kind: str = "physical"
    # (speaker, addressee, content) for conversation acts
    act_binding: Optional[tuple[str, str, Formula]] = None

    @property
    def display(self) -> str:
        if self.args:
            return f"{self.name}({', '.join(self.args)})"
        return self.name

    @property
    def sort_key(self) -> tuple:
        return (self.name, self.args)


@dataclass(frozen=True)
class Plan:
    steps: tuple[GroundOperator, ...]
    cost: float


@dataclass(frozen=True)
class Unreachable:
    reason: str = "exhausted"  # exhausted | depth | timeout


PlanResult = Union[Plan, Unreachable]


# --- PDDL subset parsing ---


def _sexpr_tokens(text: str) -> list[str]:
    text = re.sub(r";[^\n]*", "", text)
    return re.findall(r"\(|\)|[^\s()]+", text.lower())


def _parse_sexpr(tokens: list[str], i: int = 0):
    if i >= len(tokens):
        raise PddlSyntaxError("unexpected end of input")
    tok = tokens[i]
    if tok == "(":
        items = []
        i += 1
        while i < len(tokens) and tokens[i] != ")":
            item, i = _parse_sexpr(tokens, i)
            items.append(item)
        if i >= len(tokens):
            raise PddlSyntaxError("missing ')'")
        return items, i + 1
    if tok == ")":
        raise PddlSyntaxError("unexpected ')'")
    return tok, i + 1


def _parse_all(text: str) -> list:
    tokens = _sexpr_tokens(text)
    forms = []
    i = 0
    while i < len(tokens):
        form, i = _parse_sexpr(tokens, i)
        forms.append(form)
    return forms


def _atom_from_sexpr(sexpr) -> Atom:
    if not isinstance(sexpr, list) or not sexpr or any(isinstance(x, list) for x in sexpr):
        raise PddlSyntaxError(f"expected an atom, got {sexpr!r}")
    return Atom(sexpr[0], tuple(sexpr[1:]))


def _literals_from_gd(sexpr) -> tuple[list[Atom], list[Atom]]:
    pos: list[Atom] = []
    neg: list[Atom] = []
    if isinstance(sexpr, list) and sexpr and sexpr[0] == "and":
        parts = sexpr[1:]
    else:
        parts = [sexpr]
    for part in parts:
        if isinstance(part, list) and part and part[0] == "not":
            if len(part) != 2:
                raise PddlSyntaxError(f"bad negation {part!r}")
            neg.append(_atom_from_sexpr(part[1]))
        else:
            pos.append(_atom_from_sexpr(part))
    return pos, neg


def _typed_list(items: list) -> list[tuple[str, Optional[str]]]:
    out: list[tuple[str, Optional[str]]] = []
    pending: list[str] = []
    i = 0
    while i < len(items):
        tok = items[i]
        if tok == "-":
            if i + 1 >= len(items):
                raise PddlSyntaxError("dangling '-' in typed list")
            type_name = items[i + 1]
            out.extend((name, type_name) for name in pending)
            pending = []
            i += 2
        else:
            pending.append(tok)
            i += 1
    out.extend((name, None) for name in pending)
    return out


def parse_domain(text: str) -> list[Operator]:
    """Parse the :action forms of a PDDL domain (STRIPS subset)."""
    operators: list[Operator] = []
    for form in _iter_forms(_parse_all(text)):
        if not (isinstance(form, list) and form and form[0] == ":action"):
            continue
        if len(form) < 2 or isinstance(form[1], list):
            raise PddlSyntaxError("action needs a name")
        name = form[1]
        sections = _sections(form[2:])
        params = _typed_list(sections.get(":parameters", []))
        parameters = tuple(p for p, _ in params)
        param_types = tuple(t for _, t in params)
        for p in parameters:
            if not p.startswith("?"):
                raise PddlSyntaxError(f"parameter {p!r} must start with '?'")
        pre_pos, pre_neg = _literals_from_gd(sections[":precondition"]) if ":precondition" in sections else ([], [])
        add_effects, del_effects = _literals_from_gd(sections[":effect"]) if ":effect" in sections else ([], [])
        cost = float(sections.get(":cost", 1.0))
        if cost <= 0:
            raise ValidationError(name, "cost must be positive")
        op = Operator(
            name=name,
            parameters=parameters,
            param_types=param_types,
            pre_pos=tuple(pre_pos),
            pre_neg=tuple(pre_neg),
            add_effects=tuple(add_effects),
            del_effects=tuple(del_effects),
            cost=cost,
            kind="physical",
        )
        _validate_operator(op)
        operators.append(op)
    return operators


def _iter_forms(forms):
    for form in forms:
        yield form
        if isinstance(form, list):
            yield from _iter_forms(form)


def _sections(body: list) -> dict:
    sections = {}
    i = 0
    while i < len(body):
        key = body[i]
        if not (isinstance(key, str) and key.startswith(":")):
            raise PddlSyntaxError(f"expected a :keyword, got {key!r}")
        if i + 1 >= len(body):
            raise PddlSyntaxError(f"{key} needs a value")
        sections[key] = body[i + 1]
        i += 2
    return sections


def _validate_operator(op: Operator) -> None:
    declared = set(op.parameters)
    for group, label in (
        (op.pre_pos, "precondition"),
        (op.pre_neg, "precondition"),
        (op.add_effects, "effect"),
        (op.del_effects, "effect"),
    ):
        for atom in group:
            for name in logic.variables(atom):
                if "?" + name not in declared:
                    raise ValidationError(op.name, f"{label} variable ?{name} not in parameters")
    adds = {logic.planning_key(a) for a in op.add_effects}
    dels = {logic.planning_key(a) for a in op.del_effects}
    if adds & dels:
        raise ValidationError(op.name, f"add and delete effects overlap: {sorted(adds & dels)}")


@dataclass(frozen=True)
class Problem:
    name: str
    objects: tuple[tuple[str, Optional[str]], ...]
    init: frozenset[str]
    goal_pos: frozenset[str]
    goal_neg: frozenset[str]


def parse_problem(text: str) -> Problem:
    name = "problem"
    objects: list[tuple[str, Optional[str]]] = []
    init: set[str] = set()
    goal_pos: set[str] = set()
    goal_neg: set[str] = set()
    for form in _iter_forms(_parse_all(text)):
        if not isinstance(form, list) or not form:
            continue
        head = form[0]
        if head == "problem" and len(form) > 1 and isinstance(form[1], str):
            name = form[1]
        elif head == ":objects":
            objects = _typed_list(form[1:])
        elif head == ":init":
            for part in form[1:]:
                init.add(logic.planning_key(_atom_from_sexpr(part)))
        elif head == ":goal":
            if len(form) != 2:
                raise PddlSyntaxError(":goal takes one goal description")
            pos, neg = _literals_from_gd(form[1])
            goal_pos.update(logic.planning_key(a) for a in pos)
            goal_neg.update(logic.planning_key(a) for a in neg)
    return Problem(name, tuple(objects), frozenset(init), frozenset(goal_pos), frozenset(goal_neg))


# --- grounding ---


def ground_operators(
    operators: Sequence[Operator], objects: Sequence[tuple[str, Optional[str]]]
) -> list[GroundOperator]:
    """Instantiate parameterized operators over the object universe."""
    grounded: dict[tuple, GroundOperator] = {}
    for op in operators:
        pools = []
        for p_type in op.param_types:
            pool = [name for name, o_type in objects if p_type is None or o_type in (None, p_type)]
            pools.append(pool)
        for combo in itertools.product(*pools):
            subst = Substitution(
                {logic.var_name(p): v for p, v in zip(op.parameters, combo)}
            )
            try:
                ground = _ground(op, subst, combo)
            except logic.UnboundVariable:
                continue
            grounded.setdefault((ground.name, ground.args), ground)
    return sorted(grounded.values(), key=lambda g: g.sort_key)


def _ground(op: Operator, subst: Substitution, args: tuple[str, ...],
            self_agent: Optional[str] = None,
            act_binding: Optional[tuple[str, str, Formula]] = None) -> GroundOperator:
    def keys(templates: tuple[Formula, ...], unwrap: bool) -> frozenset[str]:
        out = set()
        for t in templates:
            g = logic.substitute(t, subst, keep_wildcards=True)
            out.add(logic.planning_key(g))
            if unwrap and isinstance(g, Bel) and g.agent == self_agent and not isinstance(g.inner, Not):
                out.add(logic.planning_key(g.inner))
        return frozenset(out)

    return GroundOperator(
        name=op.name,
        args=args,
        pre_pos=keys(op.pre_pos, unwrap=False),
        pre_neg=keys(op.pre_neg, unwrap=False),
        add=keys(op.add_effects, unwrap=self_agent is not None),
        delete=keys(op.del_effects, unwrap=False),
        cost=op.cost,
        kind=op.kind,
        act_binding=act_binding,
    )


# --- conversation acts as operators ---

# bookkeeping literals added on top of each act's sending effects, so that
# obligations and emotional intentions are planning goals
_ACT_EXTRA_EFFECTS = {
    "accept": (Atom("addressed", ("request", "?f")),),
    "refuse": (Atom("addressed", ("request", "?f")),),
    "inform": (Atom("answered", ("if", "?f")), Atom("answered", ("ref", "?f"))),
    "assert": (Atom("answered", ("if", "?f")), Atom("answered", ("ref", "?f"))),
    "deny": (Atom("answered", ("if", "?f")),),
}


def compile_acts_to_operators(catalog: Catalog) -> list[Operator]:
    """One operator per catalog act, over parameters ?s (speaker), ?h
    (addressee) and ?f (content)."""
    operators = []
    for act in catalog.acts.values():
        extras = list(_ACT_EXTRA_EFFECTS.get(act.name, ()))
        if act.expresses is not None:
            extras.append(Atom("expressed", (act.expresses.value, "?h", "?f")))
        operators.append(
            Operator(
                name=act.name,
                parameters=("?s", "?h", "?f"),
                param_types=(None, None, None),
                pre_pos=act.preconditions,
                pre_neg=(),
                add_effects=tuple(act.sending_effects) + tuple(extras),
                del_effects=(),
                cost=1.0,
                kind="conversation_act",
            )
        )
    return operators


def ground_act_operators(
    act_operators: Sequence[Operator],
    speaker: str,
    addressee: str,
    contents: Iterable[Formula],
    self_agent: str,
    costs: Optional[dict[str, float]] = None,
) -> list[GroundOperator]:
    """Ground conversation-act operators for the given content candidates."""
    grounded: dict[tuple, GroundOperator] = {}
    for op in act_operators:
        for content in contents:
            subst = Substitution({"s": speaker, "h": addressee, "f": content})
            try:
                g = _ground(
                    op,
                    subst,
                    (logic.planning_key(content),),
                    self_agent=self_agent,
                    act_binding=(speaker, addressee, content),
                )
            except (logic.UnboundVariable, ValueError):
                continue
            if costs and op.name in costs:
                g = GroundOperator(
                    g.name, g.args, g.pre_pos, g.pre_neg, g.add, g.delete,
                    costs[op.name], g.kind, g.act_binding,
                )
            grounded.setdefault((g.name, g.args), g)
    return sorted(grounded.values(), key=lambda g: g.sort_key)


# --- memory projection ---


def emotion_formula(record) -> Formula:
    from .logic import Emo

    return Emo(record.category, record.holder, record.target, record.content)


def expressed_literal(category, addressee: str, content: Formula) -> str:
    return logic.planning_key(
        Atom("expressed", (category.value, addressee, logic.content_token(content)))
    )


def project_snapshot(snap: Snapshot, self_agent: str, interlocutor: str) -> set[str]:
    """Planning state: every fact's canonical (priority-free) rendering, the
    agent's own beliefs additionally unwrapped to their content, and the
    emotion records (with expressed(...) markers once voiced)."""
    state: set[str] = set()
    for fact in snap.facts:
        f = fact.formula
        state.add(logic.planning_key(f))
        if isinstance(f, Bel) and f.agent == self_agent and not isinstance(f.inner, Not):
            state.add(logic.planning_key(f.inner))
    for record in snap.emotions:
        state.add(logic.planning_key(emotion_formula(record)))
        if record.expressed:
            addressee = record.target or interlocutor
            state.add(expressed_literal(record.category, addressee, record.content))
    return state


# --- search ---


def plan(
    initial: Iterable[str],
    goal_pos: Iterable[str],
    operators: Sequence[GroundOperator],
    bound: int = 12,
    goal_neg: Iterable[str] = (),
    deadline: float = 2.0,
) -> PlanResult:
    """Minimal-cost plan by best-first search (cost order, goal-count ties).

    Deterministic: successor operators are tried in (name, args) order and
    equal-priority nodes pop in insertion order. Returns Unreachable with a
    reason instead of ever returning an invalid plan.
    """
    goal_pos = frozenset(goal_pos)
    goal_neg = frozenset(goal_neg)
    start = frozenset(initial)
    ops = sorted(operators, key=lambda o: o.sort_key)

    def h(state: frozenset) -> int:
        return len(goal_pos - state) + len(goal_neg & state)

    def satisfied(state: frozenset) -> bool:
        return goal_pos <= state and not (goal_neg & state)

    started = time.monotonic()
    counter = itertools.count()
    heap: list[tuple] = [(0.0, h(start), next(counter), start, ())]
    best_g: dict[frozenset, float] = {start: 0.0}
    depth_pruned = False

    while heap:
        g, _, _, state, steps = heapq.heappop(heap)
        if g > best_g.get(state, float("inf")):
            continue
        if satisfied(state):
            return Plan(tuple(steps), g)
        if time.monotonic() - started > deadline:
            return Unreachable("timeout")
        if len(steps) >= bound:
            depth_pruned = True
            continue
        for op in ops:
            if not (op.pre_pos <= state) or (op.pre_neg & state):
                continue
            nxt = frozenset((state - op.delete) | op.add)
            ng = g + op.cost
            if ng < best_g.get(nxt, float("inf")):
                best_g[nxt] = ng
                heapq.heappush(heap, (ng, h(nxt), next(counter), nxt, steps + (op,)))
    return Unreachable("depth" if depth_pruned else "exhausted")


def validate_plan(
    initial: Iterable[str],
    goal_pos: Iterable[str],
    steps: Sequence[GroundOperator],
    goal_neg: Iterable[str] = (),
) -> None:
    """Independent replay of STRIPS semantics; raises InvalidPlan on any gap."""
    state = set(initial)
    for i, op in enumerate(steps):
        if not (op.pre_pos <= state):
            raise InvalidPlan(f"step {i} ({op.display}): preconditions not met")
        if op.pre_neg & state:
            raise InvalidPlan(f"step {i} ({op.display}): negative preconditions violated")
        state = (state - op.delete) | op.add
    if not (set(goal_pos) <= state):
        raise InvalidPlan("goal not reached")
    if set(goal_neg) & state:
        raise InvalidPlan("negative goal violated")


def relevant_operators(
    operators: Sequence[GroundOperator],
    goal_pos: Iterable[str],
    goal_neg: Iterable[str] = (),
) -> list[GroundOperator]:
    """Backward relevance filter: keep operators that can contribute a needed
    add (or a needed delete) transitively; prunes the grounding blow-up
    before search without losing reachability."""
    needed_pos = set(goal_pos)
    needed_neg = set(goal_neg)
    kept: dict[tuple, GroundOperator] = {}
    changed = True
    while changed:
        changed = False
        for op in operators:
            key = op.sort_key
            if key in kept:
                continue
            if (op.add & needed_pos) or (op.delete & needed_neg):
                kept[key] = op
                before = (len(needed_pos), len(needed_neg))
                needed_pos.update(op.pre_pos)
                needed_neg.update(op.pre_neg)
                if before != (len(needed_pos), len(needed_neg)):
                    changed = True
                changed = True
    return sorted(kept.values(), key=lambda g: g.sort_key)


def can_produce(operators: Sequence[Operator], target: Formula) -> bool:
    """Whether any (lifted) physical operator can make `target` true: an add
    effect unifying with it, or a delete effect unifying with its positive
    part when the target is negative."""
    if isinstance(target, Not):
        inner = target.inner
        if not isinstance(inner, Atom):
            return False
        return any(
            _template_covers(t, inner) for op in operators for t in op.del_effects
        )
    if not isinstance(target, Atom):
        return False
    return any(_template_covers(t, target) for op in operators for t in op.add_effects)


def _template_covers(template: Formula, ground: Atom) -> bool:
    if not isinstance(template, Atom):
        return False
    if template.predicate != ground.predicate or len(template.args) != len(ground.args):
        return False
    return all(logic.is_var(t) or t == g for t, g in zip(template.args, ground.args))


def select_expressive_act(record, catalog: Catalog, threshold: float = 0.7) -> str:
    """Pick the act voicing an emotion: the strong variant for intense
    emotions (congratulate over thank), the mild one otherwise."""
    variants = sorted(catalog.expressing(record.category), key=lambda a: a.name)
    if not variants:
        raise NoExpressingAct(record.category.value)
    strong = [a for a in variants if a.strength == "strong"]
    mild = [a for a in variants if a.strength != "strong"]
    if record.intensity >= threshold and strong:
        return strong[0].name
    return (mild or strong)[0].name
