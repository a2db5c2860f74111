"""Imperfect-information Goofspiel with a fixed descending prize order.

Both players hold cards ``1..n`` and bid simultaneously for prizes ``n, n-1,
..., 1``. The simultaneous bid is serialized: player 0 bids first and player
1's infoset does not reveal that bid. After each turn only the outcome (who
won the prize, or a tie) becomes public; tied prizes are discarded. The last
turn is forced and played automatically. The winner of the most prize points
gets +1, the loser -1, and a tie on points scores 0.
"""

from __future__ import annotations

from ..efg import GameError, GameTree, TreeBuilder

TIE = 2


def build_goofspiel(cards: int = 4) -> GameTree:
    if not 3 <= cards <= 5:
        raise GameError(f"goofspiel supports 3..5 cards, got {cards}")
    b = TreeBuilder(f"goofspiel_{cards}")
    prizes = tuple(range(cards, 0, -1))
    hand = tuple(range(1, cards + 1))
    _turn(b, -1, 0, prizes, 0, hand, hand, (), (), (), 0, 0)
    return b.build()


def _outcome(bid0: int, bid1: int) -> int:
    if bid0 > bid1:
        return 0
    if bid1 > bid0:
        return 1
    return TIE


def _turn(b, parent, action, prizes, k, hand0, hand1, bids0, bids1, wins, pts0, pts1):
    if len(hand0) == 1:
        # Forced final turn.
        w = _outcome(hand0[0], hand1[0])
        if w == 0:
            pts0 += prizes[k]
        elif w == 1:
            pts1 += prizes[k]
        b.terminal(parent, action, float((pts0 > pts1) - (pts0 < pts1)))
        return
    labels0 = tuple(f"bid {c}" for c in hand0)
    n0 = b.decision(parent, action, 0, (bids0, wins), len(hand0), labels0)
    labels1 = tuple(f"bid {c}" for c in hand1)
    for a0, bid0 in enumerate(hand0):
        n1 = b.decision(n0, a0, 1, (bids1, wins), len(hand1), labels1)
        rest0 = hand0[:a0] + hand0[a0 + 1:]
        for a1, bid1 in enumerate(hand1):
            w = _outcome(bid0, bid1)
            p0 = pts0 + (prizes[k] if w == 0 else 0)
            p1 = pts1 + (prizes[k] if w == 1 else 0)
            _turn(b, n1, a1, prizes, k + 1, rest0, hand1[:a1] + hand1[a1 + 1:],
                  bids0 + (bid0,), bids1 + (bid1,), wins + (w,), p0, p1)
