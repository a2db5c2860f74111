import numpy as np

from cfr_forge.efg import TreeBuilder
from cfr_forge.regret import normalize_segments


def random_profile(tree, rng, power=1.0):
    """A strictly mixed profile; larger ``power`` skews it towards pure."""
    w = rng.random(tree.num_sequences) ** power + 1e-3
    return normalize_segments(w, tree.seq_offset[:-1], tree.infoset_num_actions)


def single_decision(payoffs=(0.3, -0.2)):
    b = TreeBuilder("single")
    root = b.decision(-1, 0, 0, "root", len(payoffs))
    for a, u in enumerate(payoffs):
        b.terminal(root, a, u)
    return b.build(payoff_scale=1.0)


def chance_then_decision():
    """Chance 0.5/0.5, then player 0 chooses among 4 actions, then terminals."""
    b = TreeBuilder("chance-decision")
    root = b.chance(-1, 0, [0.5, 0.5])
    for c in range(2):
        node = b.decision(root, c, 0, ("deal", c), 4)
        for a in range(4):
            b.terminal(node, a, 0.25 * a - 0.5 * c)
    return b.build(payoff_scale=1.0)


# One member of Kuhn's equilibrium family (first player never bets). Action 0
# is check/fold, action 1 is bet/call.
KUHN_NASH = {
    ("J", ""): [1, 0], ("Q", ""): [1, 0], ("K", ""): [1, 0],
    ("J", "pb"): [1, 0], ("Q", "pb"): [2 / 3, 1 / 3], ("K", "pb"): [0, 1],
    ("J", "p"): [2 / 3, 1 / 3], ("J", "b"): [1, 0],
    ("Q", "p"): [1, 0], ("Q", "b"): [2 / 3, 1 / 3],
    ("K", "p"): [0, 1], ("K", "b"): [0, 1],
}


def kuhn_nash(tree):
    x = np.empty(tree.num_sequences)
    for i in range(tree.num_infosets):
        x[tree.infoset_slice(i)] = KUHN_NASH[tree.infoset_keys[i]]
    return x
