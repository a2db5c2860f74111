"""The CFR solve loop.

Full-width tree walks over the array layout of :class:`~cfr_forge.efg.GameTree`:
one top-down pass for opponent-and-chance reach, one bottom-up pass for
expected utilities, and a scatter-add to turn them into counterfactual values
per infoset action. Local regret minimizers from :mod:`cfr_forge.regret` are
updated per player, either alternately (player 0 then player 1, each seeing
the other's freshest strategy) or simultaneously.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import diagnostics as diag_mod
from .efg import GameTree, NodeKind, PlayerId, last_sequences, profile_vector, top_down_product
from .exploitability import exploitability
from .regret import (
    Algorithm,
    RegretState,
    Variant,
    compute_alpha,
    normalize_segments,
    observe_regret,
    predict_strategy,
    segment_sum,
)

PLAYERS = (PlayerId.PLAYER0, PlayerId.PLAYER1)


class UpdateMode(str, enum.Enum):
    ALTERNATING = "alternating"
    SIMULTANEOUS = "simultaneous"


class Averaging(str, enum.Enum):
    LINEAR = "linear"
    QUADRATIC = "quadratic"
    APD = "apd"
    APD_PLAIN = "apd-plain"


APD_SCHEMES = (Averaging.APD, Averaging.APD_PLAIN)


class InvariantError(AssertionError):
    """A runtime invariant of the solver failed (only raised with checks on)."""


class StrategyProfile:
    """Behavioral strategies of both players as one flat sequence vector."""

    def __init__(self, tree: GameTree, x: np.ndarray) -> None:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (tree.num_sequences,):
            raise ValueError(f"profile has shape {x.shape}, expected ({tree.num_sequences},)")
        self.tree = tree
        self.x = x

    @classmethod
    def uniform(cls, tree: GameTree) -> StrategyProfile:
        return cls(tree, np.repeat(1.0 / tree.infoset_num_actions, tree.infoset_num_actions))

    @classmethod
    def from_dict(cls, tree: GameTree, strategies: dict[int, Iterable[float]]) -> StrategyProfile:
        """Build from ``{infoset: probabilities}``; missing infosets are NaN."""
        x = np.full(tree.num_sequences, np.nan)
        for infoset, probs in strategies.items():
            x[tree.infoset_slice(infoset)] = list(probs)
        return cls(tree, x)

    def __getitem__(self, infoset: int) -> np.ndarray:
        return self.x[self.tree.infoset_slice(infoset)]

    def player_block(self, player: int) -> np.ndarray:
        return self.x[self.tree.player_sequences[player]]

    def copy(self) -> StrategyProfile:
        return StrategyProfile(self.tree, self.x.copy())

    def is_valid(self, tol: float = 1e-12) -> bool:
        x = self.x
        if np.any(np.isnan(x)) or np.any(x < 0):
            return False
        sums = segment_sum(x, self.tree.seq_offset[:-1])
        return bool(np.all(np.abs(sums - 1.0) <= tol))


def instantaneous_regret(v, sigma) -> np.ndarray:
    """``r = v - <v, sigma> 1`` for a single infoset."""
    v = np.asarray(v, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    if v.shape != sigma.shape:
        raise ValueError(f"length mismatch: {v.shape} vs {sigma.shape}")
    return v - np.dot(v, sigma)


def _segment_regret(cfv: np.ndarray, sigma: np.ndarray, offsets: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """:func:`instantaneous_regret` applied to every segment of a block."""
    ev = segment_sum(cfv * sigma, offsets)
    return cfv - np.repeat(ev, counts)


class _Walker:
    """Sequence-form view of one tree for repeated value computations.

    Terminals collapse into ``(seq0, seq1, chance * payoff)`` triples, so a
    player's counterfactual values take one pass over that table and one
    bottom-up pass over the player's own infosets. Slot ``num_sequences`` of
    every sequence-indexed work vector stands for the empty sequence.
    """

    def __init__(self, tree: GameTree) -> None:
        self.tree = tree
        S = tree.num_sequences
        last = last_sequences(tree)
        chance = top_down_product(tree, tree.chance_edge_prob)
        z = np.nonzero(tree.kind == NodeKind.TERMINAL)[0]
        c = chance[z] * tree.payoff[z]
        keep = c != 0.0
        s0, s1 = (np.where(last[p][z] < 0, S, last[p][z])[keep] for p in PLAYERS)
        uniq, inv = np.unique(s0 * (S + 1) + s1, return_inverse=True)
        self.term_value = np.bincount(inv, weights=c[keep])
        self.term_seq = (uniq // (S + 1), uniq % (S + 1))
        pseq = tree.infoset_parent_sequence()
        self.parent_seq = np.where(pseq < 0, S, pseq)
        self.layers = [self._layers(p) for p in PLAYERS]

    def _layers(self, player: int):
        """``player``'s infosets grouped by own-history length, shallowest first."""
        tree = self.tree
        S = tree.num_sequences
        infs = np.arange(tree.num_infosets)[tree.player_infosets[player]]
        ps = self.parent_seq[infs]
        has = ps < S
        parent_inf = tree.seq_infoset[ps[has]]
        depth = np.zeros(tree.num_infosets, dtype=np.int64)
        while True:
            new = depth.copy()
            new[infs[has]] = depth[parent_inf] + 1
            if np.array_equal(new, depth):
                break
            depth = new
        layers = []
        for d in np.unique(depth[infs]):
            group = infs[depth[infs] == d]
            counts = tree.infoset_num_actions[group]
            local = np.repeat(np.arange(len(group)), counts)
            first = np.repeat(np.cumsum(counts) - counts, counts)
            seqs = tree.seq_offset[group][local] + np.arange(int(counts.sum())) - first
            layers.append((seqs, local, self.parent_seq[group], len(group)))
        return layers

    def realization(self, x: np.ndarray, player: int) -> np.ndarray:
        """Sequence-form realization plan of ``player`` (other entries zero)."""
        y = np.zeros(self.tree.num_sequences + 1)
        y[-1] = 1.0
        for seqs, local, par, _ in self.layers[player]:
            y[seqs] = y[par][local] * x[seqs]
        return y

    def cfv(self, x: np.ndarray, player: int) -> np.ndarray:
        """Counterfactual values over all sequences (zero outside ``player``'s block)."""
        S = self.tree.num_sequences
        y = self.realization(x, 1 - player)
        sign = 1.0 if player == PlayerId.PLAYER0 else -1.0
        own, opp = self.term_seq[player], self.term_seq[1 - player]
        g = np.bincount(own, weights=sign * self.term_value * y[opp], minlength=S + 1)
        for seqs, local, par, m in reversed(self.layers[player]):
            ev = np.bincount(local, weights=g[seqs] * x[seqs], minlength=m)
            g += np.bincount(par, weights=ev, minlength=S + 1)
        return g[:S]

    def own_infoset_reach(self, x: np.ndarray, player: int) -> np.ndarray:
        """``pi_player(I)`` for every infoset (only ``player``'s entries meaningful)."""
        reach = np.ones(self.tree.num_infosets)
        infs = self.tree.player_infosets[player]
        reach[infs] = self.realization(x, player)[self.parent_seq[infs]]
        return reach


def _walker(tree: GameTree) -> _Walker:
    w = getattr(tree, "_walker", None)
    if w is None:
        w = _Walker(tree)
        tree._walker = w
    return w


def counterfactual_values(tree: GameTree, profile, player: int) -> np.ndarray:
    """``v(I, a)`` for every infoset of ``player``, as a full-length sequence vector.

    Entries of the other player's infosets are zero.
    """
    x = profile_vector(tree, profile)
    return _walker(tree).cfv(x, player)


class AverageStrategy:
    """Weighted accumulators of past strategies, per sequence."""

    def __init__(self, tree: GameTree, scheme: Averaging | str = Averaging.QUADRATIC) -> None:
        self.tree = tree
        self.scheme = Averaging(scheme)
        self.acc = np.zeros(tree.num_sequences)
        self.weight = np.zeros(tree.num_infosets)


def accumulate_average(avg: AverageStrategy, sigma: np.ndarray, reach: np.ndarray, t: int,
                       player: int | None = None) -> AverageStrategy:
    """Add iterate ``t`` to ``avg`` in place.

    ``sigma`` is a full-length sequence vector and ``reach`` the own reach
    ``pi_i(I)`` per infoset. With ``player`` given only that player's block is
    touched.
    """
    tree = avg.tree
    seqs = tree.player_sequences[player] if player is not None else slice(None)
    infs = tree.player_infosets[player] if player is not None else slice(None)
    counts = tree.infoset_num_actions[infs]
    if avg.scheme is Averaging.APD_PLAIN:
        reach = np.ones(tree.num_infosets)
    contrib = np.repeat(reach[infs], counts) * sigma[seqs]
    if avg.scheme is Averaging.LINEAR:
        avg.acc[seqs] += contrib
        avg.weight[infs] += reach[infs]
    elif avg.scheme is Averaging.QUADRATIC:
        w = float(t) * float(t)
        avg.acc[seqs] += w * contrib
        avg.weight[infs] += w * reach[infs]
    else:
        decay = ((t - 1) / t) ** 2.5
        avg.acc[seqs] = decay * avg.acc[seqs] + contrib
        avg.weight[infs] = decay * avg.weight[infs] + reach[infs]
    return avg


def extract_average(avg: AverageStrategy) -> StrategyProfile:
    tree = avg.tree
    x = normalize_segments(avg.acc, tree.seq_offset[:-1], tree.infoset_num_actions)
    return StrategyProfile(tree, x)


def normalize_accumulator(acc) -> np.ndarray:
    """Normalize one accumulator vector; all-zero maps to uniform."""
    acc = np.asarray(acc, dtype=np.float64)
    total = acc.sum()
    if total > 0:
        return acc / total
    return np.full(len(acc), 1.0 / len(acc))


# -- log schedules ---------------------------------------------------------


class LogSchedule:
    """Predicate over iterations at which a record is emitted.

    ``log`` (default): 1..10, 20, 30, ..., 100, 200, ...; ``pow2``: powers of
    two; ``every:N``; ``final``; or an explicit iterable of iterations. The
    final iteration is always included.
    """

    def __init__(self, kind: str | Iterable[int] = "log") -> None:
        self.every = None
        self.explicit = None
        if isinstance(kind, str):
            if kind.startswith("every:"):
                self.every = int(kind.split(":", 1)[1])
                if self.every < 1:
                    raise ValueError("every:N needs N >= 1")
                self.kind = "every"
            elif kind in ("log", "pow2", "final"):
                self.kind = kind
            else:
                raise ValueError(f"unknown log schedule {kind!r} (log, pow2, every:N, final)")
        else:
            self.kind = "explicit"
            self.explicit = frozenset(int(t) for t in kind)

    def __call__(self, t: int, total: int) -> bool:
        if t == total:
            return True
        if self.kind == "final":
            return False
        if self.kind == "every":
            return t % self.every == 0
        if self.kind == "pow2":
            return t & (t - 1) == 0
        if self.kind == "explicit":
            return t in self.explicit
        scale = 10 ** int(math.floor(math.log10(t)))
        return t % scale == 0

    def __repr__(self) -> str:
        if self.kind == "every":
            return f"LogSchedule('every:{self.every}')"
        if self.kind == "explicit":
            return f"LogSchedule({sorted(self.explicit)})"
        return f"LogSchedule({self.kind!r})"


# -- solver ----------------------------------------------------------------


@dataclass
class RunConfig:
    game: object
    variant: Variant
    iterations: int = 5000
    update_mode: UpdateMode = UpdateMode.ALTERNATING
    averaging: Averaging = Averaging.QUADRATIC
    log_schedule: LogSchedule = field(default_factory=LogSchedule)
    diagnostics: bool = False
    timing: bool = True

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        self.update_mode = UpdateMode(self.update_mode)
        self.averaging = Averaging(self.averaging)
        if self.variant.algorithm is Algorithm.APDCFR_PLUS and self.averaging not in APD_SCHEMES:
            self.averaging = Averaging.APD
        if not isinstance(self.log_schedule, LogSchedule):
            self.log_schedule = LogSchedule(self.log_schedule)


@dataclass(frozen=True)
class ConvergenceRecord:
    iteration: int
    exploitability: float
    total_pred_gap: float
    total_state_gap: float
    bound_thm1: float
    bound_thm2: float
    mean_alpha: float
    max_alpha: float
    wall_time_s: float


class Solver:
    """Engine state for one run: regret minimizers, average strategy, diagnostics.

    ``x`` always holds the strategies the next update will be evaluated
    against. Under alternating updates a player's strategy is re-derived
    right after its own update, so the opponent responds to it within the same
    iteration.

    ``averaging`` defaults to apd for APDCFR+ and quadratic otherwise; an
    explicit scheme is used as given (:class:`RunConfig` is what pins APDCFR+
    to apd).
    """

    def __init__(self, tree: GameTree, variant: Variant,
                 update_mode: UpdateMode | str = UpdateMode.ALTERNATING,
                 averaging: Averaging | str | None = None,
                 diagnostics: bool = False, check_invariants: bool = False) -> None:
        self.tree = tree
        self.variant = variant
        self.update_mode = UpdateMode(update_mode)
        if averaging is None:
            averaging = Averaging.APD if variant.algorithm is Algorithm.APDCFR_PLUS else Averaging.QUADRATIC
        self.avg = AverageStrategy(tree, averaging)
        self.check_invariants = check_invariants
        self._w = _walker(tree)
        self.states = [RegretState(tree.infoset_num_actions[tree.player_infosets[p]]) for p in PLAYERS]
        self.diags = [diag_mod.InfosetDiagnostics.like(s) for s in self.states] if diagnostics else None
        self.x = np.zeros(tree.num_sequences)
        self.t = 0
        # alpha used for the strategy currently in x, per player
        self._alpha = [self._predict(p, 1) for p in PLAYERS]

    @property
    def current_profile(self) -> StrategyProfile:
        """Strategies the next iteration starts from."""
        return StrategyProfile(self.tree, self.x.copy())

    def average_profile(self) -> StrategyProfile:
        return extract_average(self.avg)

    def alphas(self) -> list[np.ndarray]:
        """Alpha behind each infoset's current strategy."""
        return [a.copy() for a in self._alpha]

    def _predict(self, player: int, t: int) -> np.ndarray:
        state = self.states[player]
        alpha = compute_alpha(state, self.variant)
        sigma = predict_strategy(state, self.variant, t, alpha)
        self.x[self.tree.player_sequences[player]] = sigma
        return alpha

    def _observe(self, player: int, t: int, cfv: np.ndarray) -> None:
        tree = self.tree
        state = self.states[player]
        block = tree.player_sequences[player]
        sigma = self.x[block]
        r = _segment_regret(cfv[block], sigma, state.offsets, state.counts)
        R_old, r_prev = state.R, state.r_prev
        res = observe_regret(state, r, self.variant, t)
        if self.diags is not None:
            diag_mod.record_step(self.diags[player], r, r_prev, state.R, R_old, self._alpha[player])
        if self.check_invariants:
            self._check(player, sigma, r, res)

    def _check(self, player, sigma, r, res) -> None:
        state = self.states[player]
        sums = segment_sum(sigma, state.offsets)
        if np.any(sigma < 0) or np.any(np.abs(sums - 1.0) > 1e-12):
            raise InvariantError(f"player {player} strategy left the simplex at t={self.t}")
        ip = segment_sum(r * sigma, state.offsets)
        if np.any(np.abs(ip) > 1e-9 * (1.0 + np.abs(r).max(initial=0.0))):
            raise InvariantError(f"<r, sigma> != 0 for player {player} at t={self.t}")
        if self.variant.is_plus:
            if np.any(state.R < 0):
                raise InvariantError(f"negative accumulated regret for player {player} at t={self.t}")
            if self.variant.algorithm is not Algorithm.APDCFR_PLUS and \
                    np.any(res.state_gap > res.regret_sq + 1e-9):
                raise InvariantError(f"state gap exceeds regret norm for player {player} at t={self.t}")

    def _accumulate(self, player: int, t: int) -> None:
        reach = self._w.own_infoset_reach(self.x, player)
        accumulate_average(self.avg, self.x, reach, t, player)

    def iterate(self) -> None:
        self.t += 1
        t = self.t
        w = self._w
        if self.update_mode is UpdateMode.ALTERNATING:
            for p in PLAYERS:
                self._observe(p, t, w.cfv(self.x, p))
                self._accumulate(p, t)
                self._alpha[p] = self._predict(p, t + 1)
        else:
            cfvs = [w.cfv(self.x, p) for p in PLAYERS]
            for p in PLAYERS:
                self._observe(p, t, cfvs[p])
                self._accumulate(p, t)
            for p in PLAYERS:
                self._alpha[p] = self._predict(p, t + 1)

    def summary(self) -> diag_mod.Aggregate:
        return diag_mod.aggregate(self.diags, self.states, self.alphas())

    def record(self, wall_time: float = 0.0) -> ConvergenceRecord:
        agg = self.summary()
        eps = exploitability(self.tree, self.average_profile())
        return ConvergenceRecord(
            iteration=self.t,
            exploitability=eps,
            total_pred_gap=agg.total_pred_gap,
            total_state_gap=agg.total_state_gap,
            bound_thm1=agg.total_bound1,
            bound_thm2=agg.total_bound2,
            mean_alpha=agg.mean_alpha,
            max_alpha=agg.max_alpha,
            wall_time_s=wall_time,
        )


@dataclass
class RunResult:
    config: RunConfig
    tree: GameTree
    solver: Solver
    records: list[ConvergenceRecord]

    @property
    def average(self) -> StrategyProfile:
        return self.solver.average_profile()

    @property
    def final_exploitability(self) -> float:
        return self.records[-1].exploitability


def _resolve_tree(game) -> GameTree:
    if isinstance(game, GameTree):
        return game
    from .games import build_game

    return build_game(game)


def run(config: RunConfig, sink: Callable[[ConvergenceRecord], None] | None = None,
        tree: GameTree | None = None) -> RunResult:
    """Execute ``config`` and return the solver plus every logged record."""
    tree = tree if tree is not None else _resolve_tree(config.game)
    solver = Solver(tree, config.variant, config.update_mode, config.averaging, config.diagnostics)
    records = []
    start = time.perf_counter()
    for _ in range(config.iterations):
        solver.iterate()
        if config.log_schedule(solver.t, config.iterations):
            elapsed = time.perf_counter() - start if config.timing else 0.0
            rec = solver.record(elapsed)
            records.append(rec)
            if sink is not None:
                sink(rec)
    return RunResult(config, tree, solver, records)
