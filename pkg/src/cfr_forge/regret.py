"""Local regret minimizers, vectorized over many infosets at once.

A :class:`RegretState` holds the state of one regret minimizer per infoset
for a block of infosets whose action vectors are laid out back to back (the
same layout as a player's block of the game's sequence vector). A single
infoset is just a block of length one, see :meth:`RegretState.single`.

All variants share the two-step shape

* predict: build the explicit regret ``R_hat`` from the implicit regret ``R``
  and the last observed instantaneous regret, normalize its positive part;
* observe: fold the new instantaneous regret into ``R``.

The step-size asymmetry ``alpha`` is recomputed on demand from the running
gap accumulators, so the state is a pure fold over observed regrets.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np


class Algorithm(str, enum.Enum):
    CFR = "cfr"
    CFR_PLUS = "cfr+"
    DCFR = "dcfr"
    PCFR_PLUS = "pcfr+"
    APCFR_PLUS = "apcfr+"
    APCFR_PLUS_V2 = "apcfr+v2"
    SAPCFR_PLUS = "sapcfr+"
    APDCFR_PLUS = "apdcfr+"


PLUS_FAMILY = frozenset({
    Algorithm.CFR_PLUS,
    Algorithm.PCFR_PLUS,
    Algorithm.APCFR_PLUS,
    Algorithm.APCFR_PLUS_V2,
    Algorithm.SAPCFR_PLUS,
    Algorithm.APDCFR_PLUS,
})
PREDICTIVE = frozenset({
    Algorithm.PCFR_PLUS,
    Algorithm.APCFR_PLUS,
    Algorithm.APCFR_PLUS_V2,
    Algorithm.SAPCFR_PLUS,
    Algorithm.APDCFR_PLUS,
})
LEARNED_ALPHA = frozenset({Algorithm.APCFR_PLUS, Algorithm.APCFR_PLUS_V2, Algorithm.APDCFR_PLUS})

SAPCFR_ALPHA = 2.0


@dataclass(frozen=True)
class Variant:
    """An algorithm tag plus its hyperparameters.

    ``fixed_alpha`` pins the step-size asymmetry of the learned-alpha variants
    (used to check that they reduce to PCFR+ at 0 and SAPCFR+ at 2).
    """

    algorithm: Algorithm
    alpha_max: float = 5.0
    lam: float = 20.0
    kappa: float = 500.0
    beta: float = 1.5
    dcfr_alpha: float = 1.5
    dcfr_beta: float = 0.5
    dcfr_gamma: float = 2.0
    fixed_alpha: float | None = None

    def __post_init__(self) -> None:
        if self.alpha_max <= 0:
            raise ValueError(f"alpha_max must be positive, got {self.alpha_max}")
        if min(self.lam, self.kappa, self.beta) <= 0:
            raise ValueError("lambda, kappa and beta must be positive")
        if self.fixed_alpha is not None and self.fixed_alpha < 0:
            raise ValueError(f"fixed_alpha must be nonnegative, got {self.fixed_alpha}")

    @classmethod
    def of(cls, algorithm: str | Algorithm, **overrides) -> Variant:
        algorithm = Algorithm(algorithm.lower() if isinstance(algorithm, str) else algorithm)
        defaults = {"alpha_max": 9.0} if algorithm is Algorithm.APDCFR_PLUS else {}
        defaults.update({k: v for k, v in overrides.items() if v is not None})
        return cls(algorithm, **defaults)

    @property
    def name(self) -> str:
        return self.algorithm.value

    @property
    def is_plus(self) -> bool:
        return self.algorithm in PLUS_FAMILY

    def with_fixed_alpha(self, alpha: float) -> Variant:
        return replace(self, fixed_alpha=float(alpha))

    def discount(self, t: int) -> float:
        """``lambda t^beta / (kappa + t^beta)``, the APDCFR+ regret weight."""
        tb = float(t) ** self.beta
        return self.lam * tb / (self.kappa + tb)


def parse_variant(text: str, **overrides) -> Variant:
    try:
        return Variant.of(text.strip(), **overrides)
    except ValueError as exc:
        choices = ", ".join(a.value for a in Algorithm)
        raise ValueError(f"unknown algorithm {text!r} (choose from {choices})") from exc


def segment_sum(x: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Sum of ``x`` over each segment starting at ``offsets`` (all non-empty)."""
    if len(offsets) == 0:
        return np.zeros(0)
    return np.add.reduceat(x, offsets)


def segment_max(x: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    if len(offsets) == 0:
        return np.zeros(0)
    return np.maximum.reduceat(x, offsets)


def normalize_segments(w: np.ndarray, offsets: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Normalize nonnegative ``w`` per segment; all-zero segments become uniform."""
    tot = segment_sum(w, offsets)
    tot_rep = np.repeat(tot, counts)
    uniform = np.repeat(1.0 / counts, counts)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(tot_rep > 0, w / np.where(tot_rep > 0, tot_rep, 1.0), uniform)
    return out


class RegretState:
    """Per-infoset regret-minimizer state for a block of infosets."""

    def __init__(self, num_actions) -> None:
        counts = np.asarray(num_actions, dtype=np.int64).reshape(-1)
        if np.any(counts < 1):
            raise ValueError("every infoset needs at least one action")
        self.counts = counts
        self.offsets = np.zeros(len(counts), dtype=np.int64)
        np.cumsum(counts[:-1], out=self.offsets[1:])
        n = int(counts.sum())
        m = len(counts)
        self.R = np.zeros(n)
        self.r_prev = np.zeros(n)
        self.sum_pred_gap = np.zeros(m)
        self.sum_state_gap = np.zeros(m)
        self.max_pred_gap = np.zeros(m)
        self.max_state_gap = np.zeros(m)
        self.t_local = np.zeros(m, dtype=np.int64)

    @classmethod
    def single(cls, num_actions: int) -> RegretState:
        return cls([num_actions])

    @property
    def num_infosets(self) -> int:
        return len(self.counts)

    @property
    def size(self) -> int:
        return len(self.R)

    def segment_sq_norm(self, v: np.ndarray) -> np.ndarray:
        return segment_sum(v * v, self.offsets)

    def copy(self) -> RegretState:
        other = RegretState.__new__(RegretState)
        for k, v in self.__dict__.items():
            other.__dict__[k] = v.copy() if isinstance(v, np.ndarray) else v
        return other


def _alpha_ratio(num: np.ndarray, den: np.ndarray, alpha_max: float) -> np.ndarray:
    # 0/0 -> 0 and x/0 -> alpha_max; otherwise sqrt(num / den) clipped.
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.sqrt(num / np.where(den > 0, den, 1.0))
    alpha = np.where(den > 0, np.minimum(ratio, alpha_max), np.where(num > 0, alpha_max, 0.0))
    return alpha


def compute_alpha(state: RegretState, variant: Variant) -> np.ndarray:
    """Step-size asymmetry per infoset for the next prediction."""
    alg = variant.algorithm
    if variant.fixed_alpha is not None and alg in LEARNED_ALPHA:
        return np.full(state.num_infosets, variant.fixed_alpha)
    if alg is Algorithm.SAPCFR_PLUS:
        return np.full(state.num_infosets, SAPCFR_ALPHA)
    if alg in (Algorithm.APCFR_PLUS, Algorithm.APDCFR_PLUS):
        return _alpha_ratio(state.sum_pred_gap, state.sum_state_gap, variant.alpha_max)
    if alg is Algorithm.APCFR_PLUS_V2:
        return _alpha_ratio(state.max_pred_gap, state.max_state_gap, variant.alpha_max)
    return np.zeros(state.num_infosets)


def explicit_regret(state: RegretState, variant: Variant, t: int,
                    alpha: np.ndarray | None = None) -> np.ndarray:
    """The regret vector whose positive part defines the next strategy."""
    alg = variant.algorithm
    if alg in (Algorithm.CFR, Algorithm.CFR_PLUS, Algorithm.DCFR):
        return state.R.copy()
    if alg is Algorithm.PCFR_PLUS:
        return np.maximum(state.R + state.r_prev, 0.0)
    if alg is Algorithm.SAPCFR_PLUS and variant.fixed_alpha is None:
        return np.maximum(state.R + state.r_prev / 3.0, 0.0)
    if alpha is None:
        alpha = compute_alpha(state, variant)
    # Divide rather than multiply so alpha = 0 and 2 match PCFR+ / SAPCFR+ bit for bit.
    scale = np.repeat(1.0 + alpha, state.counts)
    base = state.R * variant.discount(t) if alg is Algorithm.APDCFR_PLUS else state.R
    return np.maximum(base + state.r_prev / scale, 0.0)


def predict_strategy(state: RegretState, variant: Variant, t: int,
                     alpha: np.ndarray | None = None) -> np.ndarray:
    """Current strategy at every infoset of the block (flat simplex vectors)."""
    r_hat = explicit_regret(state, variant, t, alpha)
    return normalize_segments(np.maximum(r_hat, 0.0), state.offsets, state.counts)


@dataclass
class ObserveResult:
    """Per-infoset squared norms of one observe step (for invariant checks)."""

    pred_gap: np.ndarray
    state_gap: np.ndarray
    regret_sq: np.ndarray


def observe_regret(state: RegretState, r_t: np.ndarray, variant: Variant, t: int) -> ObserveResult:
    """Fold the instantaneous regret ``r_t`` into ``state`` in place."""
    r_t = np.asarray(r_t, dtype=np.float64)
    if r_t.shape != state.R.shape:
        raise ValueError(f"regret vector has shape {r_t.shape}, expected {state.R.shape}")
    alg = variant.algorithm
    R_old = state.R
    if alg is Algorithm.CFR:
        R_new = R_old + r_t
    elif alg is Algorithm.DCFR:
        acc = R_old + r_t
        tf = float(t)
        pos = tf ** variant.dcfr_alpha / (tf ** variant.dcfr_alpha + 1.0)
        neg = tf ** variant.dcfr_beta / (tf ** variant.dcfr_beta + 1.0)
        R_new = np.where(acc > 0, acc * pos, acc * neg)
    elif alg is Algorithm.APDCFR_PLUS:
        R_new = np.maximum(R_old + variant.discount(t) * r_t, 0.0)
    else:
        R_new = np.maximum(R_old + r_t, 0.0)

    pred_gap = state.segment_sq_norm(r_t - state.r_prev)
    state_gap = state.segment_sq_norm(R_new - R_old)
    regret_sq = state.segment_sq_norm(r_t)

    state.R = R_new
    state.r_prev = r_t.copy()
    state.sum_pred_gap += pred_gap
    state.sum_state_gap += state_gap
    np.maximum(state.max_pred_gap, pred_gap, out=state.max_pred_gap)
    np.maximum(state.max_state_gap, state_gap, out=state.max_state_gap)
    state.t_local += 1
    return ObserveResult(pred_gap, state_gap, regret_sq)


def alpha_objective(alpha: float, E: float) -> float:
    """Worst-case per-step bound ``4E/alpha + alpha E``; minimized at alpha = 2."""
    return 4.0 * E / alpha + alpha * E
