"""Regret-bound bookkeeping.

For every infoset we track the realized counterfactual regret (through the
signed cumulative instantaneous regret) next to the two bound expressions it
is known to satisfy for the predictive RM+ family with step asymmetry alpha:

    bound1 = sum_t ||r_t - r_{t-1}||^2 / (1 + alpha_t) + alpha_t ||R_{t+1} - R_t||^2
    bound2 = sum_t ||r_t - r_{t-1} / (1 + alpha_t)||^2

and ``R^T(I) <= min(sqrt(bound1), sqrt(bound2))``. The alpha fed in must be
the one actually used for the prediction at that step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .regret import RegretState, segment_max, segment_sum

BOUND_TOL = 1e-6


class InfosetDiagnostics:
    """Bound accumulators for a block of infosets (same layout as :class:`RegretState`)."""

    def __init__(self, num_actions, keep_alpha_history: bool = False) -> None:
        counts = np.asarray(num_actions, dtype=np.int64).reshape(-1)
        self.counts = counts
        self.offsets = np.zeros(len(counts), dtype=np.int64)
        np.cumsum(counts[:-1], out=self.offsets[1:])
        self.cum_regret = np.zeros(int(counts.sum()))
        self.bound1_sum = np.zeros(len(counts))
        self.bound2_sum = np.zeros(len(counts))
        self.steps = 0
        self.alpha_history: list[float] | None = [] if keep_alpha_history else None

    @classmethod
    def single(cls, num_actions: int, keep_alpha_history: bool = False) -> InfosetDiagnostics:
        return cls([num_actions], keep_alpha_history)

    @classmethod
    def like(cls, state: RegretState, keep_alpha_history: bool = False) -> InfosetDiagnostics:
        return cls(state.counts, keep_alpha_history)

    def _sq(self, v: np.ndarray) -> np.ndarray:
        return segment_sum(v * v, self.offsets)


def record_step(diag: InfosetDiagnostics, r_t, r_prev, R_new, R_old, alpha) -> InfosetDiagnostics:
    """Add one update's terms to ``diag`` (in place; also returned)."""
    r_t, r_prev, R_new, R_old = (np.asarray(v, dtype=np.float64) for v in (r_t, r_prev, R_new, R_old))
    n = len(diag.cum_regret)
    for name, v in (("r_t", r_t), ("r_prev", r_prev), ("R_new", R_new), ("R_old", R_old)):
        if v.shape != (n,):
            raise ValueError(f"{name} has shape {v.shape}, expected ({n},)")
    alpha = np.broadcast_to(np.asarray(alpha, dtype=np.float64), diag.bound1_sum.shape)
    step = np.repeat(1.0 / (1.0 + alpha), diag.counts)
    diag.cum_regret += r_t
    diag.bound1_sum += diag._sq(r_t - r_prev) / (1.0 + alpha) + alpha * diag._sq(R_new - R_old)
    diag.bound2_sum += diag._sq(r_t - step * r_prev)
    diag.steps += 1
    if diag.alpha_history is not None:
        diag.alpha_history.append(float(np.mean(alpha)) if alpha.size else 0.0)
    return diag


def realized_regret(diag: InfosetDiagnostics) -> np.ndarray:
    """``max_a sum_t r_t(I, a)`` per infoset (may be negative)."""
    return segment_max(diag.cum_regret, diag.offsets)


@dataclass
class BoundCheck:
    realized: np.ndarray
    bound1: np.ndarray
    bound2: np.ndarray
    satisfied: np.ndarray

    @property
    def all_satisfied(self) -> bool:
        return bool(np.all(self.satisfied))

    @property
    def worst_slack(self) -> float:
        """Smallest ``min(bound1, bound2) - realized`` over infosets."""
        if len(self.realized) == 0:
            return float("inf")
        return float(np.min(np.minimum(self.bound1, self.bound2) - self.realized))


def bound_check(diag: InfosetDiagnostics, tol: float = BOUND_TOL) -> BoundCheck:
    realized = realized_regret(diag)
    b1 = np.sqrt(diag.bound1_sum)
    b2 = np.sqrt(diag.bound2_sum)
    return BoundCheck(realized, b1, b2, realized <= np.minimum(b1, b2) + tol)


@dataclass(frozen=True)
class Aggregate:
    total_pred_gap: float
    total_state_gap: float
    total_bound1: float
    total_bound2: float
    mean_alpha: float
    max_alpha: float


def aggregate(diags, states, alphas) -> Aggregate:
    """Fold per-infoset accumulators of all players into game-wide totals.

    ``diags`` may be ``None`` (diagnostics disabled), in which case the bound
    totals are NaN. ``alphas`` are the per-infoset alpha values to summarize.
    """
    pred = sum(float(np.sum(s.sum_pred_gap)) for s in states)
    state_gap = sum(float(np.sum(s.sum_state_gap)) for s in states)
    if diags is None:
        b1 = b2 = float("nan")
    else:
        b1 = sum(float(np.sum(d.bound1_sum)) for d in diags)
        b2 = sum(float(np.sum(d.bound2_sum)) for d in diags)
    a = np.concatenate([np.asarray(x, dtype=np.float64) for x in alphas]) if alphas else np.zeros(0)
    mean_alpha = float(np.mean(a)) if a.size else 0.0
    max_alpha = float(np.max(a)) if a.size else 0.0
    return Aggregate(pred, state_gap, b1, b2, mean_alpha, max_alpha)
