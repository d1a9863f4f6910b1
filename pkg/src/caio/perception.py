"""Turn user text into conversation acts and stimuli into belief updates.

Utterance understanding is an ordered, case-insensitive pattern table: the
first matching template wins and builds the act's propositional content from
its named captures. Anything that matches nothing becomes an Unrecognized
value so the dialogue loop can ask for clarification instead of stalling.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from . import logic
from .acts import ActInstance, Catalog
from .logic import Formula, Substitution
from .memory import ValidationError


@dataclass(frozen=True)
class UtterancePattern:
    template: re.Pattern
    act: str
    content: Formula  # pattern over the template's named captures
    responsibility: bool = False


@dataclass(frozen=True)
class Unrecognized:
    text: str


@dataclass(frozen=True)
class Stimulus:
    content: Formula
    agent_responsible: Optional[str]
    perceiver: str


def load_patterns(doc: list, catalog: Catalog) -> tuple[UtterancePattern, ...]:
    patterns = []
    for i, raw in enumerate(doc):
        where = f"patterns[{i}]"
        try:
            template = re.compile(raw["template"], re.IGNORECASE)
        except (KeyError, re.error) as exc:
            raise ValidationError(where, f"bad template: {exc}") from exc
        act = raw.get("act")
        if act not in catalog:
            raise ValidationError(where, f"unknown act {act!r}")
        try:
            content = logic.parse_pattern(raw["content"])
        except (KeyError, logic.FormulaSyntaxError) as exc:
            raise ValidationError(where, f"bad content pattern: {exc}") from exc
        captures = {name.lower() for name in template.groupindex}
        unbound = set(logic.variables(content)) - captures
        if unbound:
            raise ValidationError(where, f"content variables not captured: {sorted(unbound)}")
        patterns.append(
            UtterancePattern(template, act, content, bool(raw.get("responsibility", False)))
        )
    return tuple(patterns)


def _capture_token(text: str) -> Optional[str]:
    token = re.sub(r"[^a-z0-9_]+", "_", text.strip().lower()).strip("_")
    token = re.sub(r"_+", "_", token)
    if token and logic.IDENT_RE.match(token):
        return token
    return None


def parse_utterance(
    text: str,
    patterns: tuple[UtterancePattern, ...],
    speaker: str,
    addressee: str,
    tick: int = 0,
    act_id: str = "act-0",
) -> Union[ActInstance, Unrecognized]:
    """First matching pattern (file order) wins; pure in (text, patterns)."""
    cleaned = text.strip()
    for pattern in patterns:
        m = pattern.template.fullmatch(cleaned)
        if m is None:
            continue
        bindings = {}
        ok = True
        for name, value in m.groupdict().items():
            token = _capture_token(value or "")
            if token is None:
                ok = False
                break
            bindings[name.lower()] = token
        if not ok:
            continue
        try:
            content = logic.substitute(pattern.content, Substitution(bindings))
        except logic.UnboundVariable:
            continue
        return ActInstance(
            id=act_id,
            definition=pattern.act,
            speaker=speaker,
            addressee=addressee,
            content=content,
            direction="received",
            tick=tick,
            own_action=pattern.responsibility,
        )
    return Unrecognized(text)


def ingest_stimulus(stimulus: Stimulus) -> list[Formula]:
    """Mental-state translation of a perceived event; the caller asserts them."""
    facts = [logic.Bel(stimulus.perceiver, stimulus.content)]
    if stimulus.agent_responsible is not None:
        facts.append(
            logic.Bel(stimulus.perceiver, logic.Resp(stimulus.agent_responsible, stimulus.content))
        )
    return facts
