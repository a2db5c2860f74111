"""Exact best responses and exploitability."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .efg import GameError, GameTree, PlayerId, profile_vector, top_down_product

NEGATIVE_FLOOR = 1e-10


@dataclass(frozen=True)
class BestResponseValue:
    player: int
    value: float


def _check_single_depth(tree: GameTree) -> None:
    indptr, nodes = tree.members()
    d = tree.depth[nodes]
    lo = np.minimum.reduceat(d, indptr[:-1]) if len(nodes) else d
    hi = np.maximum.reduceat(d, indptr[:-1]) if len(nodes) else d
    if np.any(lo != hi):
        raise GameError("best response needs every infoset's members at one depth")


def best_response_value(tree: GameTree, profile, player: int) -> BestResponseValue:
    """Value of ``player``'s best response to the opponent's part of ``profile``.

    Works bottom-up on opponent-and-chance weighted values ``W(h) =
    pi_{-i}(h) * V(h)`` so that a responder infoset picks the action with the
    largest summed child weight across its members. Ties go to the lowest
    action index. The responder's own entries of ``profile`` are ignored.
    """
    x = np.array(getattr(profile, "x", profile), dtype=np.float64, copy=True)
    if x.shape != (tree.num_sequences,):
        raise GameError(f"profile has shape {x.shape}, expected ({tree.num_sequences},)")
    x[tree.player_sequences[player]] = 0.0
    profile_vector(tree, x)
    _check_single_depth(tree)

    prob = tree.extended(x)[tree.edge_index]
    own = tree.edge_owner == player
    opp_reach = top_down_product(tree, np.where(own, 1.0, prob))

    W = opp_reach * tree.utility(player)
    not_own = ~own
    for d in range(tree.num_levels - 1, 0, -1):
        sl = tree.level(d)
        lo = sl.start
        par = tree.parent[sl]
        prev = tree.level(d - 1)
        local_par = par - prev.start
        w = W[sl]
        # Chance and opponent children: plain sums (reach already in W).
        m = not_own[sl]
        sums = np.bincount(local_par[m], weights=w[m], minlength=prev.stop - prev.start)
        W[prev] += sums
        # Responder children: aggregate per sequence, then pick the best per infoset.
        m = own[sl]
        if not m.any():
            continue
        seq = tree.edge_index[sl][m]
        q = np.bincount(seq, weights=w[m], minlength=tree.num_sequences)
        best = _best_actions(tree, q)
        child_seq_best = best[tree.seq_infoset[seq]]
        chosen = seq == child_seq_best
        idx = np.nonzero(m)[0][chosen] + lo
        W[par[idx - lo]] += W[idx]
    return BestResponseValue(int(player), float(W[0]))


def _best_actions(tree: GameTree, q: np.ndarray) -> np.ndarray:
    """Map infoset -> chosen sequence index (argmax of ``q``, lowest on ties)."""
    starts = tree.seq_offset[:-1]
    top = np.maximum.reduceat(q, starts)
    hit = q == top[tree.seq_infoset]
    cand = np.where(hit, np.arange(tree.num_sequences), tree.num_sequences)
    return np.minimum.reduceat(cand, starts)


def expected_utility(tree: GameTree, profile) -> float:
    """Player 0's expected normalized utility under ``profile``."""
    x = profile_vector(tree, profile)
    prob = tree.extended(x)[tree.edge_index]
    reach = top_down_product(tree, prob)
    return float(np.dot(reach, tree.payoff))


def exploitability(tree: GameTree, profile) -> float:
    """Average best-response gain over the two players, in normalized units."""
    br0 = best_response_value(tree, profile, PlayerId.PLAYER0).value
    br1 = best_response_value(tree, profile, PlayerId.PLAYER1).value
    eps = (br0 + br1) / 2.0
    if -NEGATIVE_FLOOR <= eps < 0.0:
        eps = 0.0
    return eps


def nash_conv(tree: GameTree, profile) -> float:
    """Sum (not average) of both best-response gains."""
    return 2.0 * exploitability(tree, profile)
