"""Leduc hold'em with a configurable number of ranks.

The deck holds ``ranks`` ranks in two suits. Each player antes 1 and receives
one private card; after a betting round a public card is revealed and a second
betting round follows. Bets are 2 in the first round and 4 in the second, with
at most two raises per round. Fold is only available when facing a bet.
"""

from __future__ import annotations

from ..efg import GameError, GameTree, TreeBuilder

SUITS = 2
RAISE_SIZES = (2, 4)
MAX_RAISES = 2
ANTE = 1

FOLD, CALL, RAISE = "f", "c", "r"


def _round_moves(history: str) -> tuple[str, ...]:
    raises = history.count(RAISE)
    facing = raises > 0 and history.endswith(RAISE)
    moves = []
    if facing:
        moves.append(FOLD)
    moves.append(CALL)
    if raises < MAX_RAISES:
        moves.append(RAISE)
    return tuple(moves)


def _round_over(history: str) -> bool:
    if history.endswith(FOLD):
        return True
    # A call ends the round unless it is the opening check.
    return len(history) >= 2 and history.endswith(CALL)


def _contributions(rounds: list[str]) -> tuple[list[float], int | None]:
    """Chips put in by each player and the folding player, if any."""
    put = [float(ANTE), float(ANTE)]
    folded = None
    for rnd, history in enumerate(rounds):
        player = 0
        for move in history:
            other = 1 - player
            if move == FOLD:
                folded = player
                break
            if move == CALL:
                put[player] = put[other]
            else:
                put[player] = put[other] + RAISE_SIZES[rnd]
            player = other
    return put, folded


def _showdown(c0: int, c1: int, board: int) -> int:
    """+1 if player 0 wins, -1 if player 1 wins, 0 on a split."""
    r0, r1, rb = c0 // SUITS, c1 // SUITS, board // SUITS
    if r0 == rb and r1 != rb:
        return 1
    if r1 == rb and r0 != rb:
        return -1
    return (r0 > r1) - (r0 < r1)


def build_leduc(ranks: int = 3) -> GameTree:
    if ranks < 3:
        raise GameError(f"leduc needs at least 3 ranks, got {ranks}")
    deck = list(range(ranks * SUITS))
    name = "leduc" if ranks == 3 else f"leduc_{ranks}"
    b = TreeBuilder(name)
    root = b.chance(-1, 0, [1 / len(deck)] * len(deck))
    for c0 in deck:
        rest = [c for c in deck if c != c0]
        node = b.chance(root, c0, [1 / len(rest)] * len(rest))
        for k, c1 in enumerate(rest):
            _betting(b, node, k, [""], c0, c1, None, deck)
    return b.build()


def _betting(b, parent, action, rounds, c0, c1, board, deck):
    history = rounds[-1]
    if _round_over(history):
        put, folded = _contributions(rounds)
        if folded is not None:
            winner = 1 - folded
            b.terminal(parent, action, put[1] if winner == 0 else -put[0])
            return
        if board is None:
            rest = [c for c in deck if c not in (c0, c1)]
            node = b.chance(parent, action, [1 / len(rest)] * len(rest))
            for k, card in enumerate(rest):
                _betting(b, node, k, rounds + [""], c0, c1, card, deck)
            return
        result = _showdown(c0, c1, board)
        b.terminal(parent, action, result * put[0])
        return
    player = len(history) % 2
    own = c0 if player == 0 else c1
    moves = _round_moves(history)
    key = (own, board, tuple(rounds))
    labels = tuple({FOLD: "fold", CALL: "call", RAISE: "raise"}[m] for m in moves)
    node = b.decision(parent, action, player, key, len(moves), labels)
    for a, move in enumerate(moves):
        _betting(b, node, a, rounds[:-1] + [history + move], c0, c1, board, deck)
