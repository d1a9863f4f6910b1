"""caio: a cognitive-affective dialogue agent engine.

Library, scenario runner, interactive CLI and HTTP/WebSocket service for an
agent that keeps formal mental states (beliefs, ideals, goals, responsibility
attributions, emotions), appraises incoming conversation acts both cognitively
and reactively, deliberates over prioritized intentions, and plans sequences
of conversation acts and physical actions.
"""

__version__ = "0.1.0"

from .logic import (  # noqa: F401
    And,
    Atom,
    Bel,
    Emo,
    EmotionCategory,
    Formula,
    FVar,
    Goal,
    Ideal,
    Not,
    Resp,
    Substitution,
    match,
    negate,
    parse_formula,
    parse_pattern,
    render_formula,
    substitute,
)
