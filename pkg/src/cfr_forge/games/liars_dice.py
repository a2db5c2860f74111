"""One-die-per-player Liar's Dice.

Each player privately rolls a single ``sides``-sided die. Players alternate
strictly increasing bids ``(quantity, face)`` over the two dice, encoded as
``bid = (quantity - 1) * sides + (face - 1)``; player 0 opens and may not
call. Any later player may call "liar" instead of raising, and after the top
bid calling is the only move. The highest face is wild. If the called bid is
met the bidder wins +1, otherwise the caller does.
"""

from __future__ import annotations

from ..efg import GameError, GameTree, TreeBuilder

NUM_DICE = 2


def build_liars_dice(sides: int = 4) -> GameTree:
    if not 2 <= sides <= 6:
        raise GameError(f"liar's dice supports 2..6 sides, got {sides}")
    b = TreeBuilder(f"liars_dice_{sides}")
    probs = [1 / sides] * sides
    root = b.chance(-1, 0, probs)
    for d0 in range(1, sides + 1):
        node = b.chance(root, d0 - 1, probs)
        for d1 in range(1, sides + 1):
            _bid(b, node, d1 - 1, sides, (d0, d1), ())
    return b.build()


def bid_met(bid: int, dice: tuple[int, ...], sides: int) -> bool:
    quantity, face = bid // sides + 1, bid % sides + 1
    count = sum(1 for d in dice if d == face or d == sides)
    return count >= quantity


def _bid(b, parent, action, sides, dice, history):
    num_bids = NUM_DICE * sides
    player = len(history) % 2
    last = history[-1] if history else -1
    options = list(range(last + 1, num_bids))
    can_call = bool(history)
    labels = [f"{o // sides + 1}-{o % sides + 1}" for o in options]
    if can_call:
        labels.append("liar")
    node = b.decision(parent, action, player, (dice[player], history), len(labels), labels)
    for a, o in enumerate(options):
        _bid(b, node, a, sides, dice, history + (o,))
    if can_call:
        bidder = 1 - player
        winner = bidder if bid_met(last, dice, sides) else player
        b.terminal(node, len(options), 1.0 if winner == 0 else -1.0)
