"""Mental-state formulas: parsing, printing, matching and substitution.

A formula is a tree of modal operators (Bel, Goal, Ideal, Resp, Emo) over
ground atoms, with shallow negation and flattened n-ary conjunction.
Patterns extend formulas with variables (``?a`` in agent/term slots,
``?f`` as a whole sub-formula) so rule files can be written as text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping, Optional, Union


class EmotionCategory(str, Enum):
    JOY = "joy"
    SADNESS = "sadness"
    APPROVAL = "approval"
    DISAPPROVAL = "disapproval"
    REJOICING = "rejoicing"
    REGRET = "regret"
    MORAL_SATISFACTION = "moral_satisfaction"
    GUILT = "guilt"
    GRATITUDE = "gratitude"
    DISAPPOINTMENT = "disappointment"
    ADMIRATION = "admiration"
    REPROACH = "reproach"


BASIC_EMOTIONS = (
    EmotionCategory.JOY,
    EmotionCategory.SADNESS,
    EmotionCategory.APPROVAL,
    EmotionCategory.DISAPPROVAL,
)

#: Emotions directed at another agent; only these carry a target.
OTHER_DIRECTED = frozenset(
    {
        EmotionCategory.GRATITUDE,
        EmotionCategory.DISAPPOINTMENT,
        EmotionCategory.ADMIRATION,
        EmotionCategory.REPROACH,
    }
)

IDENT_RE = re.compile(r"[a-z][a-z0-9_]*\Z")

RESERVED = frozenset({"not", "and", "bel", "goal", "ideal", "resp", "emo"})

DEFAULT_PRIORITY = 0.5


class FormulaSyntaxError(ValueError):
    """Malformed formula text; carries the offset and the expected token."""

    def __init__(self, position: int, expected: str, found: str = ""):
        self.position = position
        self.expected = expected
        self.found = found
        msg = f"at position {position}: expected {expected}"
        if found:
            msg += f", found {found!r}"
        super().__init__(msg)


class UnboundVariable(KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound variable ?{name}")


def is_var(token: str) -> bool:
    return token.startswith("?")


def var_name(token: str) -> str:
    return token[1:]


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class Not:
    inner: "Formula"


@dataclass(frozen=True)
class Bel:
    agent: str
    inner: "Formula"


@dataclass(frozen=True)
class Goal:
    agent: str
    inner: "Formula"
    priority: Optional[float] = DEFAULT_PRIORITY


@dataclass(frozen=True)
class Ideal:
    agent: str
    inner: "Formula"
    priority: Optional[float] = DEFAULT_PRIORITY


@dataclass(frozen=True)
class Resp:
    agent: str
    inner: "Formula"


@dataclass(frozen=True)
class Emo:
    category: EmotionCategory
    holder: str
    target: Optional[str]
    inner: "Formula"


@dataclass(frozen=True)
class And:
    conjuncts: tuple["Formula", ...]


@dataclass(frozen=True)
class FVar:
    """A variable standing for a whole sub-formula (pattern-only node)."""

    name: str


Formula = Union[Atom, Not, Bel, Goal, Ideal, Resp, Emo, And, FVar]

MODAL_TYPES = (Bel, Goal, Ideal, Resp, Emo)


@dataclass(frozen=True)
class Substitution:
    """Variable bindings plus the priorities recorded for wildcard slots.

    ``priorities`` is keyed by the pattern-node path (child indices from the
    root) so that applying the substitution back onto the pattern restores
    the exact ground formula it was matched against.
    """

    bindings: Mapping[str, Union[str, "Formula"]] = field(default_factory=dict)
    priorities: Mapping[tuple[int, ...], float] = field(default_factory=dict)

    def get(self, name: str):
        return self.bindings.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self.bindings


# --- construction helpers (keep stored formulas normalized) ---


def make_not(inner: Formula) -> Formula:
    if isinstance(inner, Not):
        return inner.inner
    if isinstance(inner, And):
        raise ValueError("cannot negate a conjunction: no disjunction in the language")
    return Not(inner)


def make_and(conjuncts: list[Formula]) -> Formula:
    flat: list[Formula] = []
    for c in conjuncts:
        if isinstance(c, And):
            flat.extend(c.conjuncts)
        else:
            flat.append(c)
    seen: dict[str, Formula] = {}
    for c in flat:
        seen.setdefault(render_formula(c), c)
    ordered = [seen[k] for k in sorted(seen)]
    if len(ordered) == 1:
        return ordered[0]
    if not ordered:
        raise ValueError("empty conjunction")
    return And(tuple(ordered))


def negate(f: Formula) -> Formula:
    """Logical complement at the content level; no modal distribution."""
    return make_not(f)


# --- rendering ---


def _format_priority(p: float) -> str:
    return repr(float(p))


def render_formula(f: Formula, with_priorities: bool = True) -> str:
    """Canonical text; equal formulas always render identically."""
    if isinstance(f, Atom):
        if f.args:
            return f"{f.predicate}({', '.join(f.args)})"
        return f.predicate
    if isinstance(f, FVar):
        return f"?{f.name}"
    if isinstance(f, Not):
        return "not " + render_formula(f.inner, with_priorities)
    if isinstance(f, Bel):
        return f"Bel({f.agent}, {render_formula(f.inner, with_priorities)})"
    if isinstance(f, Resp):
        return f"Resp({f.agent}, {render_formula(f.inner, with_priorities)})"
    if isinstance(f, (Goal, Ideal)):
        op = "Goal" if isinstance(f, Goal) else "Ideal"
        inner = render_formula(f.inner, with_priorities)
        if with_priorities and f.priority is not None:
            return f"{op}({f.agent}, {inner}, {_format_priority(f.priority)})"
        return f"{op}({f.agent}, {inner})"
    if isinstance(f, Emo):
        inner = render_formula(f.inner, with_priorities)
        if f.target is not None:
            return f"Emo({f.category.value}, {f.holder}, {f.target}, {inner})"
        return f"Emo({f.category.value}, {f.holder}, {inner})"
    if isinstance(f, And):
        parts = sorted(render_formula(c, with_priorities) for c in f.conjuncts)
        return "and(" + ", ".join(parts) + ")"
    raise TypeError(f"not a formula: {f!r}")


def planning_key(f: Formula) -> str:
    """Rendering with priorities stripped; the planner's literal space."""
    return render_formula(f, with_priorities=False)


def content_token(f: Formula) -> str:
    """Collapse a formula to a single identifier token (planning-goal args)."""
    if isinstance(f, Atom) and not f.args:
        return f.predicate
    token = re.sub(r"[^a-z0-9_]+", "_", render_formula(f).lower()).strip("_")
    return token or "content"


# --- parsing ---

_TOKEN_RE = re.compile(r"\s*(?:(?P<lpar>\()|(?P<rpar>\))|(?P<comma>,)|"
                       r"(?P<num>\d+(?:\.\d+)?|\.\d+)|(?P<var>\?[A-Za-z_][A-Za-z0-9_]*)|"
                       r"(?P<ident>[A-Za-z_][A-Za-z0-9_]*))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise FormulaSyntaxError(pos, "identifier, '(' , ')' or ','", stripped[0])
        kind = m.lastgroup
        assert kind is not None
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, allow_vars: bool,
                 absent_priority: Optional[float] = DEFAULT_PRIORITY):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.allow_vars = allow_vars
        self.absent_priority = absent_priority

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, what: str):
        tok = self.next()
        if tok[0] != kind:
            raise FormulaSyntaxError(tok[2], what, tok[1])
        return tok

    def parse(self) -> Formula:
        f = self.formula()
        tok = self.peek()
        if tok[0] != "eof":
            raise FormulaSyntaxError(tok[2], "end of input", tok[1])
        return f

    def formula(self) -> Formula:
        kind, value, pos = self.peek()
        if kind == "var":
            if not self.allow_vars:
                raise FormulaSyntaxError(pos, "ground formula (no variables)", value)
            self.next()
            return FVar(value[1:].lower())
        if kind != "ident":
            raise FormulaSyntaxError(pos, "formula", value)
        low = value.lower()
        if low == "not":
            self.next()
            return make_not(self.formula())
        if low == "and":
            self.next()
            self.expect("lpar", "'('")
            conjuncts = [self.formula()]
            while self.peek()[0] == "comma":
                self.next()
                conjuncts.append(self.formula())
            self.expect("rpar", "')'")
            if len(conjuncts) < 2:
                raise FormulaSyntaxError(pos, "at least two conjuncts")
            return make_and(conjuncts)
        if low in ("bel", "goal", "ideal", "resp"):
            return self.modal(low)
        if low == "emo":
            return self.emo()
        return self.atom()

    def agent_slot(self) -> str:
        kind, value, pos = self.next()
        if kind == "var":
            if not self.allow_vars:
                raise FormulaSyntaxError(pos, "agent name", value)
            return "?" + value[1:].lower()
        if kind != "ident":
            raise FormulaSyntaxError(pos, "agent name", value)
        name = value.lower()
        if not IDENT_RE.match(name):
            raise FormulaSyntaxError(pos, "lowercase identifier", value)
        return name

    def modal(self, op: str) -> Formula:
        self.next()
        self.expect("lpar", "'('")
        agent = self.agent_slot()
        self.expect("comma", "','")
        inner = self.formula()
        priority: Optional[float] = self.absent_priority if op in ("goal", "ideal") else None
        if self.peek()[0] == "comma":
            self.next()
            kind, value, pos = self.next()
            if kind != "num":
                raise FormulaSyntaxError(pos, "priority in [0,1]", value)
            if op not in ("goal", "ideal"):
                raise FormulaSyntaxError(pos, f"')' ({op.capitalize()} carries no priority)", value)
            priority = float(value)
            if not 0.0 <= priority <= 1.0:
                raise FormulaSyntaxError(pos, "priority in [0,1]", value)
        self.expect("rpar", "')'")
        if op == "bel":
            return Bel(agent, inner)
        if op == "resp":
            return Resp(agent, inner)
        if op == "goal":
            return Goal(agent, inner, priority)
        return Ideal(agent, inner, priority)

    def emo(self) -> Formula:
        self.next()
        self.expect("lpar", "'('")
        kind, value, pos = self.next()
        if kind != "ident":
            raise FormulaSyntaxError(pos, "emotion category", value)
        try:
            category = EmotionCategory(value.lower())
        except ValueError:
            raise FormulaSyntaxError(pos, "one of the 12 emotion categories", value) from None
        self.expect("comma", "','")
        holder = self.agent_slot()
        self.expect("comma", "','")
        target: Optional[str] = None
        if category in OTHER_DIRECTED:
            target = self.agent_slot()
            self.expect("comma", "','")
        inner = self.formula()
        self.expect("rpar", "')'")
        return Emo(category, holder, target, inner)

    def atom(self) -> Formula:
        kind, value, pos = self.next()
        predicate = value.lower()
        if not IDENT_RE.match(predicate):
            raise FormulaSyntaxError(pos, "lowercase identifier", value)
        if predicate in RESERVED:
            raise FormulaSyntaxError(pos, "non-reserved predicate name", value)
        args: list[str] = []
        if self.peek()[0] == "lpar":
            self.next()
            args.append(self.term())
            while self.peek()[0] == "comma":
                self.next()
                args.append(self.term())
            self.expect("rpar", "')'")
        return Atom(predicate, tuple(args))

    def term(self) -> str:
        kind, value, pos = self.next()
        if kind == "var":
            if not self.allow_vars:
                raise FormulaSyntaxError(pos, "identifier term", value)
            return "?" + value[1:].lower()
        if kind != "ident":
            raise FormulaSyntaxError(pos, "identifier term", value)
        term = value.lower()
        if not IDENT_RE.match(term):
            raise FormulaSyntaxError(pos, "lowercase identifier", value)
        return term


def parse_formula(text: str) -> Formula:
    """Parse ground formula text; normalizes negation and defaults priorities."""
    return _Parser(text, allow_vars=False).parse()


def parse_pattern(text: str) -> Formula:
    """Like parse_formula but accepts ?variables; omitted Goal/Ideal priorities
    become wildcards instead of the 0.5 default."""
    return _Parser(text, allow_vars=True, absent_priority=None).parse()


# --- inspection ---


def is_ground(f: Formula) -> bool:
    return not any(True for _ in variables(f))


def variables(f: Formula) -> Iterator[str]:
    if isinstance(f, FVar):
        yield f.name
    elif isinstance(f, Atom):
        for a in f.args:
            if is_var(a):
                yield var_name(a)
    elif isinstance(f, Not):
        yield from variables(f.inner)
    elif isinstance(f, (Bel, Resp, Goal, Ideal)):
        if is_var(f.agent):
            yield var_name(f.agent)
        yield from variables(f.inner)
    elif isinstance(f, Emo):
        if is_var(f.holder):
            yield var_name(f.holder)
        if f.target is not None and is_var(f.target):
            yield var_name(f.target)
        yield from variables(f.inner)
    elif isinstance(f, And):
        for c in f.conjuncts:
            yield from variables(c)


def formula_depth(f: Formula) -> int:
    if isinstance(f, (Atom, FVar)):
        return 1
    if isinstance(f, Not):
        return 1 + formula_depth(f.inner)
    if isinstance(f, (Bel, Resp, Goal, Ideal, Emo)):
        return 1 + formula_depth(f.inner)
    if isinstance(f, And):
        return 1 + max(formula_depth(c) for c in f.conjuncts)
    raise TypeError(f"not a formula: {f!r}")


def validate_formula(f: Formula, ground: bool = True) -> None:
    """Walk the tree and assert every normalization invariant."""
    if isinstance(f, FVar):
        if ground:
            raise ValueError("variable in ground formula")
        return
    if isinstance(f, Atom):
        for name in (f.predicate, *f.args):
            if is_var(name):
                if ground:
                    raise ValueError("variable in ground formula")
            elif not IDENT_RE.match(name):
                raise ValueError(f"bad identifier {name!r}")
        if f.predicate in RESERVED:
            raise ValueError(f"reserved predicate {f.predicate!r}")
        return
    if isinstance(f, Not):
        if isinstance(f.inner, (Not, And)):
            raise ValueError("negation must apply to an atom or modal node")
        validate_formula(f.inner, ground)
        return
    if isinstance(f, (Bel, Resp)):
        _validate_agent(f.agent, ground)
        validate_formula(f.inner, ground)
        return
    if isinstance(f, (Goal, Ideal)):
        _validate_agent(f.agent, ground)
        if f.priority is not None and not 0.0 <= f.priority <= 1.0:
            raise ValueError(f"priority {f.priority} outside [0,1]")
        if f.priority is None and ground:
            raise ValueError("ground formula with wildcard priority")
        validate_formula(f.inner, ground)
        return
    if isinstance(f, Emo):
        _validate_agent(f.holder, ground)
        if (f.target is not None) != (f.category in OTHER_DIRECTED):
            raise ValueError(
                f"{f.category.value} must carry a target iff it is other-directed"
            )
        if f.target is not None:
            _validate_agent(f.target, ground)
        validate_formula(f.inner, ground)
        return
    if isinstance(f, And):
        if len(f.conjuncts) < 2:
            raise ValueError("conjunction needs at least two conjuncts")
        renders = [render_formula(c) for c in f.conjuncts]
        if renders != sorted(renders):
            raise ValueError("conjuncts not in canonical order")
        if len(set(renders)) != len(renders):
            raise ValueError("duplicate conjuncts")
        for c in f.conjuncts:
            if isinstance(c, And):
                raise ValueError("nested conjunction")
            validate_formula(c, ground)
        return
    raise TypeError(f"not a formula: {f!r}")


def _validate_agent(name: str, ground: bool) -> None:
    if is_var(name):
        if ground:
            raise ValueError("variable in ground formula")
        return
    if not IDENT_RE.match(name):
        raise ValueError(f"bad agent name {name!r}")


# --- matching ---


def match(pattern: Formula, g: Formula) -> Optional[Substitution]:
    """The unique substitution mapping pattern onto the ground formula g.

    Goal/Ideal priorities left unspecified in the pattern act as wildcards;
    the matched value is recorded (keyed by node path) so the substitution
    restores g exactly when applied back.
    """
    bindings: dict[str, Union[str, Formula]] = {}
    priorities: dict[tuple[int, ...], float] = {}
    if _match(pattern, g, bindings, priorities, ()):
        return Substitution(bindings, priorities)
    return None


def _bind(bindings: dict, name: str, value: Union[str, Formula]) -> bool:
    if name in bindings:
        return _values_equal(bindings[name], value)
    bindings[name] = value
    return True


def _values_equal(a, b) -> bool:
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    # A zero-argument atom and its bare token denote the same thing; this
    # lets one variable appear both as a term and as a content formula.
    if isinstance(a, str):
        a, b = b, a
    if isinstance(b, str):
        return isinstance(a, Atom) and not a.args and a.predicate == b
    return a == b


def _match(p: Formula, g: Formula, bindings, priorities, path) -> bool:
    if isinstance(p, FVar):
        return _bind(bindings, p.name, g)
    if isinstance(p, Atom):
        if not isinstance(g, Atom) or p.predicate != g.predicate:
            return False
        if len(p.args) != len(g.args):
            return False
        for pa, ga in zip(p.args, g.args):
            if is_var(pa):
                if not _bind(bindings, var_name(pa), ga):
                    return False
            elif pa != ga:
                return False
        return True
    if isinstance(p, Not):
        return isinstance(g, Not) and _match(p.inner, g.inner, bindings, priorities, path + (0,))
    if isinstance(p, (Bel, Resp)):
        if type(p) is not type(g):
            return False
        if not _match_agent(p.agent, g.agent, bindings):
            return False
        return _match(p.inner, g.inner, bindings, priorities, path + (0,))
    if isinstance(p, (Goal, Ideal)):
        if type(p) is not type(g):
            return False
        if not _match_agent(p.agent, g.agent, bindings):
            return False
        if p.priority is None:
            if g.priority is not None:
                priorities[path] = g.priority
        elif p.priority != g.priority:
            return False
        return _match(p.inner, g.inner, bindings, priorities, path + (0,))
    if isinstance(p, Emo):
        if not isinstance(g, Emo) or p.category != g.category:
            return False
        if not _match_agent(p.holder, g.holder, bindings):
            return False
        if (p.target is None) != (g.target is None):
            return False
        if p.target is not None and not _match_agent(p.target, g.target, bindings):
            return False
        return _match(p.inner, g.inner, bindings, priorities, path + (0,))
    if isinstance(p, And):
        if not isinstance(g, And) or len(p.conjuncts) != len(g.conjuncts):
            return False
        return _match_conjuncts(list(enumerate(p.conjuncts)), list(g.conjuncts),
                                bindings, priorities, path)
    raise TypeError(f"not a formula: {p!r}")


def _match_agent(p_agent: str, g_agent: str, bindings) -> bool:
    if is_var(p_agent):
        return _bind(bindings, var_name(p_agent), g_agent)
    return p_agent == g_agent


def _match_conjuncts(pats, grounds, bindings, priorities, path) -> bool:
    # Conjunct order is canonical on both sides but substitution can reorder,
    # so search for a bijection with backtracking.
    if not pats:
        return not grounds
    (idx, p), rest = pats[0], pats[1:]
    for j, g in enumerate(grounds):
        trial_b = dict(bindings)
        trial_p = dict(priorities)
        if _match(p, g, trial_b, trial_p, path + (idx,)):
            if _match_conjuncts(rest, grounds[:j] + grounds[j + 1:], trial_b, trial_p, path):
                bindings.clear()
                bindings.update(trial_b)
                priorities.clear()
                priorities.update(trial_p)
                return True
    return False


# --- substitution ---


def substitute(pattern: Formula, subst: Substitution, keep_wildcards: bool = False) -> Formula:
    """Ground a pattern; every variable must be bound.

    Wildcard Goal/Ideal priorities take the value recorded in the
    substitution for that node, or the 0.5 default when absent. With
    ``keep_wildcards`` unrecorded priorities stay open (the result is then a
    pattern suitable for matching, not a ground formula).
    """
    return _substitute(pattern, subst, (), keep_wildcards)


def _subst_formula(value: Union[str, Formula]) -> Formula:
    if isinstance(value, str):
        return Atom(value)
    return value


def _subst_token(value: Union[str, Formula], name: str) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, Atom) and not value.args:
        return value.predicate
    # Compound formulas collapse to a sanitized token in term position; lets
    # bookkeeping atoms such as expressed(...) mention arbitrary contents.
    return content_token(value)


def _substitute(p: Formula, subst: Substitution, path, keep_wildcards: bool = False) -> Formula:
    if isinstance(p, FVar):
        if p.name not in subst:
            raise UnboundVariable(p.name)
        return _subst_formula(subst.bindings[p.name])
    if isinstance(p, Atom):
        args = []
        for a in p.args:
            if is_var(a):
                name = var_name(a)
                if name not in subst:
                    raise UnboundVariable(name)
                args.append(_subst_token(subst.bindings[name], name))
            else:
                args.append(a)
        return Atom(p.predicate, tuple(args))
    if isinstance(p, Not):
        return make_not(_substitute(p.inner, subst, path + (0,), keep_wildcards))
    if isinstance(p, Bel):
        return Bel(_subst_agent(p.agent, subst),
                   _substitute(p.inner, subst, path + (0,), keep_wildcards))
    if isinstance(p, Resp):
        return Resp(_subst_agent(p.agent, subst),
                    _substitute(p.inner, subst, path + (0,), keep_wildcards))
    if isinstance(p, (Goal, Ideal)):
        priority = p.priority
        if priority is None:
            priority = subst.priorities.get(path)
            if priority is None and not keep_wildcards:
                priority = DEFAULT_PRIORITY
        cls = Goal if isinstance(p, Goal) else Ideal
        return cls(_subst_agent(p.agent, subst),
                   _substitute(p.inner, subst, path + (0,), keep_wildcards), priority)
    if isinstance(p, Emo):
        target = _subst_agent(p.target, subst) if p.target is not None else None
        return Emo(p.category, _subst_agent(p.holder, subst), target,
                   _substitute(p.inner, subst, path + (0,), keep_wildcards))
    if isinstance(p, And):
        return make_and(
            [_substitute(c, subst, path + (i,), keep_wildcards) for i, c in enumerate(p.conjuncts)]
        )
    raise TypeError(f"not a formula: {p!r}")


def _subst_agent(agent: str, subst: Substitution) -> str:
    if not is_var(agent):
        return agent
    name = var_name(agent)
    if name not in subst:
        raise UnboundVariable(name)
    return _subst_token(subst.bindings[name], name)


# --- contradiction candidates (used by memory revision) ---


def contradiction_renderings(f: Formula) -> list[str]:
    """Priority-stripped renderings of every formula that contradicts f at
    some modal prefix (same prefix, complementary content)."""
    out: list[str] = []
    try:
        out.append(planning_key(make_not(f)))
    except ValueError:
        pass
    if isinstance(f, Not):
        out.append(planning_key(f.inner))
        return out
    inner_candidates: list[Formula] = []
    if isinstance(f, MODAL_TYPES):
        inner_candidates = _contradictions(f.inner)
        for c in inner_candidates:
            out.append(planning_key(_rewrap(f, c)))
    return out


def _contradictions(f: Formula) -> list[Formula]:
    out: list[Formula] = []
    try:
        out.append(make_not(f))
    except ValueError:
        return out
    if isinstance(f, MODAL_TYPES):
        for c in _contradictions(f.inner):
            out.append(_rewrap(f, c))
    return out


def _rewrap(f: Formula, new_inner: Formula) -> Formula:
    if isinstance(f, Bel):
        return Bel(f.agent, new_inner)
    if isinstance(f, Resp):
        return Resp(f.agent, new_inner)
    if isinstance(f, Goal):
        return Goal(f.agent, new_inner, f.priority)
    if isinstance(f, Ideal):
        return Ideal(f.agent, new_inner, f.priority)
    if isinstance(f, Emo):
        return Emo(f.category, f.holder, f.target, new_inner)
    raise TypeError(f"not a modal node: {f!r}")
