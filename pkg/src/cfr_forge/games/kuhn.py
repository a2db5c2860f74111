"""Three-card Kuhn poker."""

from __future__ import annotations

from ..efg import GameTree, TreeBuilder

CARDS = "JQK"

# Betting histories: "p" = pass (check/fold), "b" = bet (bet/call).
_TERMINAL = {"pp", "bp", "bb", "pbp", "pbb"}


def _payoff0(history: str, c0: int, c1: int) -> float:
    if history == "bp":
        return 1.0
    if history == "pbp":
        return -1.0
    stake = 2.0 if "b" in history else 1.0
    return stake if c0 > c1 else -stake


def build_kuhn() -> GameTree:
    """Ante 1, one bet of size 1; player 0 acts first."""
    b = TreeBuilder("kuhn")
    root = b.chance(-1, 0, [1 / 3] * 3)
    for c0 in range(3):
        deal0 = b.chance(root, c0, [0.5, 0.5])
        others = [c for c in range(3) if c != c0]
        for k, c1 in enumerate(others):
            _betting(b, deal0, k, "", c0, c1)
    return b.build()


def _betting(b: TreeBuilder, parent: int, action: int, history: str, c0: int, c1: int) -> None:
    if history in _TERMINAL:
        b.terminal(parent, action, _payoff0(history, c0, c1))
        return
    player = len(history) % 2
    card = c0 if player == 0 else c1
    facing_bet = history.endswith("b")
    labels = ("fold", "call") if facing_bet else ("check", "bet")
    node = b.decision(parent, action, player, (CARDS[card], history), 2, labels)
    for a, move in enumerate("pb"):
        _betting(b, node, a, history + move, c0, c1)
