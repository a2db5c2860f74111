"""Array-backed extensive-form game trees.

A :class:`GameTree` is immutable once built. Nodes are stored in breadth-first
order so that every level is a contiguous slice and the children of a node are
contiguous as well; traversals then become a handful of numpy operations per
level instead of a Python recursion over millions of nodes.

Strategies live in a flat "sequence" vector: infoset ``I`` owns the slice
``seq_offset[I] : seq_offset[I] + num_actions[I]``. Player 0's infosets come
first, so each player's strategy is a contiguous block as well.
"""

from __future__ import annotations

import enum
from array import array
from dataclasses import dataclass
from typing import Hashable, Iterator, Sequence, TextIO

import numpy as np


class PlayerId(enum.IntEnum):
    PLAYER0 = 0
    PLAYER1 = 1
    CHANCE = 2


class NodeKind(enum.IntEnum):
    TERMINAL = 0
    CHANCE = 1
    DECISION = 2


TERMINAL = NodeKind.TERMINAL
CHANCE = NodeKind.CHANCE
DECISION = NodeKind.DECISION

NO_PLAYER = -1


class GameError(ValueError):
    """Raised for malformed game parameters or inconsistent profiles."""


@dataclass(frozen=True)
class TreeStats:
    histories: int
    infosets: int
    terminal_histories: int
    depth: int
    max_infoset_size: int

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (
            self.histories,
            self.infosets,
            self.terminal_histories,
            self.depth,
            self.max_infoset_size,
        )


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    node: int | None = None
    infoset: int | None = None

    def __str__(self) -> str:
        where = []
        if self.node is not None:
            where.append(f"node {self.node}")
        if self.infoset is not None:
            where.append(f"infoset {self.infoset}")
        loc = f" ({', '.join(where)})" if where else ""
        return f"{self.code}{loc}: {self.message}"


class TreeBuilder:
    """Incremental depth-first construction of a :class:`GameTree`.

    Generators call :meth:`chance`, :meth:`decision` and :meth:`terminal` with
    the parent node id and the index of the action (or chance outcome) leading
    to the new node. Nothing is validated here; call :func:`validate` on the
    finished tree.
    """

    def __init__(self, name: str = "game") -> None:
        self.name = name
        self._parent = array("q")
        self._action = array("q")
        self._kind = array("b")
        self._player = array("b")
        self._infoset = array("q")
        self._depth = array("q")
        self._payoff = array("d")
        self._chance_probs: dict[int, tuple[float, ...]] = {}
        self._infoset_index: dict[Hashable, int] = {}
        self._infoset_player = array("b")
        self._infoset_actions = array("q")
        self._infoset_labels: list[tuple[str, ...] | None] = []
        self._infoset_keys: list[Hashable] = []

    def __len__(self) -> int:
        return len(self._kind)

    def _add(self, parent: int, action: int, kind: int, player: int,
             infoset: int, payoff: float) -> int:
        node = len(self._kind)
        self._parent.append(parent)
        self._action.append(action)
        self._kind.append(kind)
        self._player.append(player)
        self._infoset.append(infoset)
        self._depth.append(0 if parent < 0 else self._depth[parent] + 1)
        self._payoff.append(payoff)
        return node

    def chance(self, parent: int, action: int, probs: Sequence[float]) -> int:
        node = self._add(parent, action, CHANCE, PlayerId.CHANCE, -1, 0.0)
        self._chance_probs[node] = tuple(float(p) for p in probs)
        return node

    def decision(self, parent: int, action: int, player: int, key: Hashable,
                 num_actions: int, labels: Sequence[str] | None = None) -> int:
        full_key = (player, key)
        infoset = self._infoset_index.get(full_key)
        if infoset is None:
            infoset = len(self._infoset_player)
            self._infoset_index[full_key] = infoset
            self._infoset_player.append(player)
            self._infoset_actions.append(num_actions)
            self._infoset_labels.append(tuple(labels) if labels is not None else None)
            self._infoset_keys.append(key)
        return self._add(parent, action, DECISION, player, infoset, 0.0)

    def terminal(self, parent: int, action: int, payoff0: float) -> int:
        return self._add(parent, action, TERMINAL, NO_PLAYER, -1, float(payoff0))

    def build(self, payoff_scale: float | None = None) -> GameTree:
        """Freeze into a breadth-first ordered :class:`GameTree`.

        Payoffs are divided by ``payoff_scale`` (default: the largest absolute
        terminal payoff) so that they lie in [-1, 1].
        """
        n = len(self._kind)
        if n == 0:
            raise GameError("empty tree")
        depth = np.frombuffer(self._depth, dtype=np.int64)
        # Stable sort by depth keeps siblings adjacent and in parent order.
        order = np.argsort(depth, kind="stable")
        new_id = np.empty(n, dtype=np.int64)
        new_id[order] = np.arange(n, dtype=np.int64)

        parent_old = np.frombuffer(self._parent, dtype=np.int64)[order]
        parent = np.where(parent_old >= 0, new_id[np.maximum(parent_old, 0)], -1)
        kind = np.frombuffer(self._kind, dtype=np.int8)[order]
        player = np.frombuffer(self._player, dtype=np.int8)[order]
        action = np.frombuffer(self._action, dtype=np.int64)[order]
        payoff = np.frombuffer(self._payoff, dtype=np.float64)[order]
        infoset_old = np.frombuffer(self._infoset, dtype=np.int64)[order]
        depth = depth[order]

        chance_probs = {int(new_id[k]): v for k, v in self._chance_probs.items()}

        # Renumber infosets: player 0 first, each player in order of first
        # appearance in breadth-first order.
        n_inf = len(self._infoset_player)
        inf_player_old = np.asarray(self._infoset_player, dtype=np.int8)
        first_seen = np.full(n_inf, n, dtype=np.int64)
        dec = np.nonzero(infoset_old >= 0)[0]
        np.minimum.at(first_seen, infoset_old[dec], dec)
        inf_order = np.lexsort((first_seen, inf_player_old))
        inf_new = np.empty(n_inf, dtype=np.int64)
        inf_new[inf_order] = np.arange(n_inf, dtype=np.int64)
        infoset = np.full(n, -1, dtype=np.int64)
        infoset[dec] = inf_new[infoset_old[dec]]

        labels = [self._infoset_labels[i] for i in inf_order]
        keys = [self._infoset_keys[i] for i in inf_order]

        if payoff_scale is None:
            term = kind == TERMINAL
            payoff_scale = float(np.max(np.abs(payoff[term]))) if term.any() else 1.0
            if payoff_scale == 0.0:
                payoff_scale = 1.0

        return GameTree(
            name=self.name,
            parent=parent,
            action=action,
            kind=kind,
            player=player,
            infoset=infoset,
            depth=depth,
            payoff=payoff / payoff_scale,
            payoff_scale=float(payoff_scale),
            chance_probs=chance_probs,
            infoset_player=inf_player_old[inf_order],
            infoset_num_actions=np.asarray(self._infoset_actions, dtype=np.int64)[inf_order],
            infoset_labels=labels,
            infoset_keys=keys,
        )


class GameTree:
    """Immutable two-player zero-sum game tree.

    ``payoff`` holds player 0's normalized utility at terminal nodes (0
    elsewhere); player 1's utility is its negation. ``payoff_scale`` recovers
    raw game units.
    """

    def __init__(self, *, name, parent, action, kind, player, infoset, depth,
                 payoff, payoff_scale, chance_probs, infoset_player,
                 infoset_num_actions, infoset_labels=None, infoset_keys=None):
        self.name = name
        self.parent = parent
        self.action = action
        self.kind = kind
        self.player = player
        self.infoset = infoset
        self.depth = depth
        self.payoff = payoff
        self.payoff_scale = payoff_scale
        self.infoset_player = infoset_player
        self.infoset_num_actions = infoset_num_actions
        self.infoset_labels = infoset_labels or [None] * len(infoset_player)
        self.infoset_keys = infoset_keys or [None] * len(infoset_player)
        self.root = 0

        n = len(kind)
        self.num_nodes = n
        self.num_infosets = len(infoset_player)

        # Children are contiguous in breadth-first order.
        has_parent = parent >= 0
        self.num_children = np.bincount(parent[has_parent], minlength=n).astype(np.int64)
        child_ids = np.nonzero(has_parent)[0]
        first_child = np.full(n, n, dtype=np.int64)
        np.minimum.at(first_child, parent[child_ids], child_ids)
        first_child[self.num_children == 0] = -1
        self.first_child = first_child

        max_depth = int(depth.max())
        self.level_offsets = np.searchsorted(depth, np.arange(max_depth + 2)).astype(np.int64)

        # Sequence layout.
        self.seq_offset = np.zeros(self.num_infosets + 1, dtype=np.int64)
        np.cumsum(infoset_num_actions, out=self.seq_offset[1:])
        self.num_sequences = int(self.seq_offset[-1])
        self.seq_infoset = np.repeat(np.arange(self.num_infosets), infoset_num_actions)
        n0 = int(np.sum(infoset_player == PlayerId.PLAYER0))
        self.player_infosets = (slice(0, n0), slice(n0, self.num_infosets))
        self.player_sequences = (
            slice(0, int(self.seq_offset[n0])),
            slice(int(self.seq_offset[n0]), self.num_sequences),
        )

        # Chance outcome probabilities, one per chance edge.
        self.chance_probs = chance_probs
        chance_parent = np.zeros(n, dtype=bool)
        chance_parent[child_ids] = kind[parent[child_ids]] == CHANCE
        edge_prob = np.ones(n, dtype=np.float64)
        chance_nodes = np.nonzero(chance_parent)[0]
        for c in chance_nodes:
            probs = chance_probs[int(parent[c])]
            a = int(action[c])
            edge_prob[c] = probs[a] if a < len(probs) else 0.0
        self.chance_edge_prob = edge_prob

        # Index of each node's incoming edge in the "extended" vector
        # [sequences..., chance edge probabilities..., 1.0].
        self._chance_edge_nodes = chance_nodes
        edge_index = np.full(n, self.num_sequences + len(chance_nodes), dtype=np.int64)
        edge_index[chance_nodes] = self.num_sequences + np.arange(len(chance_nodes))
        dec_parent = np.zeros(n, dtype=bool)
        dec_parent[child_ids] = kind[parent[child_ids]] == DECISION
        dec_children = np.nonzero(dec_parent)[0]
        inf_of_parent = infoset[parent[dec_children]]
        edge_index[dec_children] = self.seq_offset[inf_of_parent] + action[dec_children]
        self.edge_index = edge_index
        self.edge_owner = np.full(n, NO_PLAYER, dtype=np.int8)
        self.edge_owner[child_ids] = player[parent[child_ids]]
        self._ext_tail = np.concatenate([edge_prob[chance_nodes], [1.0]])

        self._members = None
        self._infoset_parent_seq = None

    # -- basic queries -----------------------------------------------------

    def level(self, d: int) -> slice:
        return slice(int(self.level_offsets[d]), int(self.level_offsets[d + 1]))

    @property
    def num_levels(self) -> int:
        return len(self.level_offsets) - 1

    def children(self, node: int) -> range:
        k = int(self.num_children[node])
        if k == 0:
            return range(0)
        start = int(self.first_child[node])
        return range(start, start + k)

    def infoset_slice(self, infoset: int) -> slice:
        return slice(int(self.seq_offset[infoset]), int(self.seq_offset[infoset + 1]))

    def infosets_of(self, player: int) -> range:
        s = self.player_infosets[player]
        return range(s.start, s.stop)

    def utility(self, player: int) -> np.ndarray:
        """Normalized terminal utility of ``player`` at every node."""
        return self.payoff if player == PlayerId.PLAYER0 else -self.payoff

    def extended(self, x: np.ndarray) -> np.ndarray:
        """Append chance edge probabilities (and the root's 1.0) to a sequence vector."""
        return np.concatenate([x, self._ext_tail])

    def members(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR layout of infoset members: ``(indptr, node_ids)``."""
        if self._members is None:
            dec = np.nonzero(self.infoset >= 0)[0]
            order = np.argsort(self.infoset[dec], kind="stable")
            nodes = dec[order]
            counts = np.bincount(self.infoset[dec], minlength=self.num_infosets)
            indptr = np.zeros(self.num_infosets + 1, dtype=np.int64)
            np.cumsum(counts, out=indptr[1:])
            self._members = (indptr, nodes)
        return self._members

    def infoset_members(self, infoset: int) -> np.ndarray:
        indptr, nodes = self.members()
        return nodes[indptr[infoset]:indptr[infoset + 1]]

    def infoset_parent_sequence(self) -> np.ndarray:
        """Last own sequence preceding each infoset (-1 for none).

        Taken from the first member node; :func:`validate` checks that all
        members agree (perfect recall).
        """
        if self._infoset_parent_seq is None:
            last = _last_own_sequence(self)
            indptr, nodes = self.members()
            rep = nodes[indptr[:-1]]
            self._infoset_parent_seq = last[rep]
        return self._infoset_parent_seq

    def describe_infoset(self, infoset: int) -> str:
        return f"infoset {infoset} (player {int(self.infoset_player[infoset])}, key={self.infoset_keys[infoset]!r})"

    def __repr__(self) -> str:
        return f"GameTree({self.name!r}, nodes={self.num_nodes}, infosets={self.num_infosets})"


def last_sequences(tree: GameTree) -> list[np.ndarray]:
    """Per player, the last own sequence on the path to every node (-1 for none)."""
    n = tree.num_nodes
    last = [np.full(n, -1, dtype=np.int64), np.full(n, -1, dtype=np.int64)]
    for d in range(1, tree.num_levels):
        sl = tree.level(d)
        par = tree.parent[sl]
        owner = tree.edge_owner[sl]
        eidx = tree.edge_index[sl]
        for p in (0, 1):
            last[p][sl] = np.where(owner == p, eidx, last[p][par])
    return last


def _last_own_sequence(tree: GameTree) -> np.ndarray:
    """For every node, the acting player's last sequence on the path to it.

    The result at a decision node refers to the player who acts there; other
    nodes get -1.
    """
    last = last_sequences(tree)
    out = np.full(tree.num_nodes, -1, dtype=np.int64)
    for p in (0, 1):
        mask = (tree.kind == DECISION) & (tree.player == p)
        out[mask] = last[p][mask]
    return out


# -- operations ------------------------------------------------------------


def tree_stats(tree: GameTree) -> TreeStats:
    """Structural sizes of ``tree``.

    ``depth`` is the number of nodes on the longest root-to-leaf path, i.e.
    one more than the number of actions on it; this is the convention under
    which the published benchmark sizes (Kuhn = 6, Leduc = 12) are stated.
    """
    dec = tree.infoset[tree.infoset >= 0]
    sizes = np.bincount(dec, minlength=tree.num_infosets) if tree.num_infosets else np.zeros(1, int)
    terminals = tree.kind == TERMINAL
    return TreeStats(
        histories=int(tree.num_nodes),
        infosets=int(tree.num_infosets),
        terminal_histories=int(np.sum(terminals)),
        depth=int(tree.depth[terminals].max()) + 1 if terminals.any() else 1,
        max_infoset_size=int(sizes.max()) if tree.num_infosets else 0,
    )


def validate(tree: GameTree, tol: float = 1e-12) -> list[Violation]:
    """Every violated structural invariant of ``tree``; empty if well formed."""
    out: list[Violation] = []
    n = tree.num_nodes

    roots = np.nonzero(tree.parent < 0)[0]
    if len(roots) != 1 or roots[0] != 0:
        out.append(Violation("root", f"expected a single root at node 0, found {roots.tolist()[:5]}"))
    bad_parent = np.nonzero((tree.parent >= 0) & (tree.parent >= np.arange(n)))[0]
    for node in bad_parent[:20]:
        out.append(Violation("parent-order", "parent does not precede child", node=int(node)))
    bad_parent_kind = np.nonzero((tree.parent >= 0) & (tree.kind[np.maximum(tree.parent, 0)] == TERMINAL))[0]
    for node in bad_parent_kind[:20]:
        out.append(Violation("terminal-parent", "node hangs below a terminal", node=int(node)))

    nonterm = np.nonzero(tree.kind != TERMINAL)[0]
    for node in nonterm[tree.num_children[nonterm] == 0][:20]:
        out.append(Violation("no-children", "non-terminal node has no children", node=int(node)))

    for node, probs in tree.chance_probs.items():
        k = int(tree.num_children[node])
        if len(probs) != k:
            out.append(Violation("chance-arity", f"{len(probs)} probabilities for {k} children", node=node))
        if any(p < 0 for p in probs):
            out.append(Violation("chance-negative", "negative chance probability", node=node))
        total = float(sum(probs))
        if abs(total - 1.0) > tol:
            out.append(Violation("chance-sum", f"chance probabilities sum to {total!r}", node=node))

    term = tree.kind == TERMINAL
    big = np.nonzero(term & (np.abs(tree.payoff) > 1.0 + 1e-12))[0]
    for node in big[:20]:
        out.append(Violation("payoff-range", "normalized payoff outside [-1, 1]", node=int(node)))

    dec = np.nonzero(tree.kind == DECISION)[0]
    no_inf = dec[tree.infoset[dec] < 0]
    for node in no_inf[:20]:
        out.append(Violation("no-infoset", "decision node without infoset", node=int(node)))
    stray = np.nonzero((tree.kind != DECISION) & (tree.infoset >= 0))[0]
    for node in stray[:20]:
        out.append(Violation("stray-infoset", "non-decision node assigned to an infoset", node=int(node)))
    if len(no_inf) or len(stray):
        return out

    inf = tree.infoset[dec]
    wrong_player = dec[tree.player[dec] != tree.infoset_player[inf]]
    for node in wrong_player[:20]:
        out.append(Violation("infoset-player", "member owned by a different player",
                             node=int(node), infoset=int(tree.infoset[node])))
    chance_inf = np.nonzero(tree.infoset_player == PlayerId.CHANCE)[0]
    for i in chance_inf[:20]:
        out.append(Violation("infoset-player", "infoset owned by chance", infoset=int(i)))
    wrong_arity = dec[tree.num_children[dec] != tree.infoset_num_actions[inf]]
    for node in wrong_arity[:20]:
        out.append(Violation(
            "action-count",
            f"member has {int(tree.num_children[node])} actions, infoset expects "
            f"{int(tree.infoset_num_actions[tree.infoset[node]])}",
            node=int(node), infoset=int(tree.infoset[node])))
    empty = np.nonzero(np.bincount(inf, minlength=tree.num_infosets) == 0)[0]
    for i in empty[:20]:
        out.append(Violation("empty-infoset", "infoset has no members", infoset=int(i)))
    if len(wrong_arity) or len(empty):
        return out

    last = _last_own_sequence(tree)
    indptr, nodes = tree.members()
    first = last[nodes[indptr[:-1]]]
    per_member_first = np.repeat(first, np.diff(indptr))
    broken = np.nonzero(last[nodes] != per_member_first)[0]
    seen: set[int] = set()
    for k in broken:
        i = int(tree.infoset[nodes[k]])
        if i in seen:
            continue
        seen.add(i)
        out.append(Violation("perfect-recall", "members disagree on the player's own history",
                             node=int(nodes[k]), infoset=i))
        if len(seen) >= 20:
            break
    return out


@dataclass(frozen=True)
class ReachProbabilities:
    """Per-node reach probability split by contributor."""

    player0: np.ndarray
    player1: np.ndarray
    chance: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.player0 * self.player1 * self.chance

    def own(self, player: int) -> np.ndarray:
        return self.player0 if player == 0 else self.player1

    def others(self, player: int) -> np.ndarray:
        """Opponent-and-chance contribution."""
        return (self.player1 if player == 0 else self.player0) * self.chance


def top_down_product(tree: GameTree, factor: np.ndarray) -> np.ndarray:
    """Product of per-edge ``factor`` along the path from the root to each node."""
    out = np.empty(tree.num_nodes, dtype=np.float64)
    out[0] = 1.0
    for d in range(1, tree.num_levels):
        sl = tree.level(d)
        out[sl] = out[tree.parent[sl]] * factor[sl]
    return out


def reach_probabilities(tree: GameTree, profile) -> ReachProbabilities:
    """Reach probabilities of every node under ``profile``."""
    x = profile_vector(tree, profile)
    prob = tree.extended(x)[tree.edge_index]
    owner = tree.edge_owner
    reach = []
    for who in (PlayerId.PLAYER0, PlayerId.PLAYER1, PlayerId.CHANCE):
        reach.append(top_down_product(tree, np.where(owner == who, prob, 1.0)))
    return ReachProbabilities(*reach)


def profile_vector(tree: GameTree, profile) -> np.ndarray:
    """Flat sequence vector of a profile-like object, with a missing-entry check."""
    x = getattr(profile, "x", profile)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (tree.num_sequences,):
        raise GameError(f"profile has shape {x.shape}, expected ({tree.num_sequences},)")
    missing = np.isnan(x)
    if missing.any():
        i = int(tree.seq_infoset[np.argmax(missing)])
        raise GameError(f"missing strategy at {tree.describe_infoset(i)}")
    return x


def dump(tree: GameTree, out: TextIO) -> None:
    """Line-oriented debug dump: ``id kind parent action payload``."""
    for line in iter_dump(tree):
        out.write(line + "\n")


def iter_dump(tree: GameTree) -> Iterator[str]:
    names = {TERMINAL: "terminal", CHANCE: "chance", DECISION: "decision"}
    for node in range(tree.num_nodes):
        k = int(tree.kind[node])
        par = int(tree.parent[node])
        act = "-" if par < 0 else str(int(tree.action[node]))
        if par >= 0 and tree.kind[par] == DECISION:
            labels = tree.infoset_labels[int(tree.infoset[par])]
            if labels is not None:
                act = labels[int(tree.action[node])]
        if k == TERMINAL:
            payload = f"u0={tree.payoff[node] * tree.payoff_scale:.17g}"
        elif k == CHANCE:
            payload = "p=" + ",".join(f"{p:.17g}" for p in tree.chance_probs[node])
        else:
            payload = f"player={int(tree.player[node])} infoset={int(tree.infoset[node])}"
        yield f"{node}\t{names[k]}\t{par}\t{act}\t{payload}"
