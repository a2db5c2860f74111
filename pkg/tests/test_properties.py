import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cfr_forge.diagnostics import InfosetDiagnostics, record_step
from cfr_forge.efg import NodeKind, TreeBuilder, reach_probabilities, tree_stats, validate
from cfr_forge.engine import counterfactual_values, instantaneous_regret
from cfr_forge.exploitability import exploitability
from cfr_forge.regret import (
    PLUS_FAMILY,
    Algorithm,
    RegretState,
    Variant,
    compute_alpha,
    observe_regret,
    predict_strategy,
)
from helpers import random_profile
from oracles import cf_values

finite = st.floats(-10, 10, allow_nan=False)
PLUS = sorted(a.value for a in PLUS_FAMILY)
ALL = [a.value for a in Algorithm]


def vectors(n):
    return arrays(np.float64, n, elements=finite)


@st.composite
def state_and_regret(draw, algs=ALL):
    n = draw(st.integers(1, 5))
    alg = draw(st.sampled_from(algs))
    s = RegretState.single(n)
    s.R = np.abs(draw(vectors(n))) if Variant.of(alg).is_plus else draw(vectors(n))
    s.r_prev = draw(vectors(n))
    s.sum_pred_gap[:] = draw(st.floats(0, 50))
    s.sum_state_gap[:] = draw(st.floats(0, 50))
    return alg, s, draw(vectors(n)), draw(st.integers(1, 10_000))


@given(state_and_regret())
def test_predicted_strategy_is_a_simplex(case):
    alg, s, _, t = case
    sigma = predict_strategy(s, Variant.of(alg), t)
    assert np.all(sigma >= 0)
    assert abs(sigma.sum() - 1.0) <= 1e-12


@given(state_and_regret(PLUS))
def test_plus_regrets_stay_nonnegative(case):
    alg, s, r, t = case
    observe_regret(s, r, Variant.of(alg), t)
    assert np.all(s.R >= 0)


@given(state_and_regret([a for a in PLUS if a != "apdcfr+"]))
def test_state_gap_bounded_by_regret(case):
    alg, s, r, t = case
    res = observe_regret(s, r, Variant.of(alg), t)
    assert res.state_gap[0] <= res.regret_sq[0] + 1e-9


@given(st.sampled_from(["apcfr+", "apcfr+v2", "apdcfr+"]), st.floats(0, 1e6), st.floats(0, 1e6),
       st.floats(0, 1e3), st.floats(0, 1e3))
def test_alpha_in_range(alg, pred, state, mp, ms):
    s = RegretState.single(2)
    s.sum_pred_gap[:], s.sum_state_gap[:] = pred, state
    s.max_pred_gap[:], s.max_state_gap[:] = mp, ms
    v = Variant.of(alg)
    a = compute_alpha(s, v)[0]
    assert 0 <= a <= v.alpha_max


@given(st.integers(1, 6).flatmap(lambda n: st.tuples(vectors(n), arrays(np.float64, n, elements=st.floats(0, 1)))))
def test_regret_orthogonal_to_strategy(pair):
    v, w = pair
    sigma = w / w.sum() if w.sum() > 0 else np.full(len(w), 1 / len(w))
    r = instantaneous_regret(v, sigma)
    assert abs(np.dot(r, sigma)) <= 1e-12 * (1 + np.abs(v).max())


@given(st.lists(vectors(3), min_size=1, max_size=30), st.sampled_from([(0.0, "pcfr+"), (2.0, "sapcfr+")]))
def test_fixed_alpha_reduces_to_named_variant(stream, case):
    alpha, name = case
    a, b = RegretState.single(3), RegretState.single(3)
    va = Variant.of("apcfr+").with_fixed_alpha(alpha)
    vb = Variant.of(name)
    for t, r in enumerate(stream, start=1):
        assert np.array_equal(predict_strategy(a, va, t), predict_strategy(b, vb, t))
        observe_regret(a, r, va, t)
        observe_regret(b, r, vb, t)


@given(vectors(3), vectors(3), vectors(3), vectors(3), st.floats(0, 9))
def test_bound_increments_nonnegative(r, rp, rn, ro, alpha):
    d = record_step(InfosetDiagnostics.single(3), r, rp, rn, ro, alpha)
    assert d.bound1_sum[0] >= 0 and d.bound2_sum[0] >= 0


@st.composite
def small_games(draw):
    """Random perfect-recall trees: a chance deal, then up to two betting-like rounds."""
    deals = draw(st.integers(1, 3))
    probs = np.array(draw(st.lists(st.floats(0.05, 1), min_size=deals, max_size=deals)))
    probs = probs / probs.sum()
    arity = draw(st.lists(st.integers(1, 3), min_size=2, max_size=2))
    payoff_seed = draw(st.integers(0, 2**31))
    return probs, arity, payoff_seed


def build_small(probs, arity, payoff_seed, order=None):
    rng = np.random.default_rng(payoff_seed)
    order = list(range(len(probs))) if order is None else order
    pay = rng.uniform(-1, 1, size=(len(probs), arity[0], arity[1]))
    b = TreeBuilder()
    root = b.chance(-1, 0, [probs[c] for c in order])
    for slot, c in enumerate(order):
        n0 = b.decision(root, slot, 0, ("p0", c), arity[0])
        for a in range(arity[0]):
            n1 = b.decision(n0, a, 1, ("p1", a), arity[1])
            for k in range(arity[1]):
                b.terminal(n1, k, float(pay[c, a, k]))
    return b.build(payoff_scale=1.0)


def keyed_profile(tree, seed):
    x = np.empty(tree.num_sequences)
    for i in range(tree.num_infosets):
        rng = np.random.default_rng([seed, hash(tree.infoset_keys[i]) % 2**31])
        w = rng.random(tree.infoset_num_actions[i]) + 0.01
        x[tree.infoset_slice(i)] = w / w.sum()
    return x


@settings(max_examples=40, suppress_health_check=[HealthCheck.too_slow])
@given(small_games(), st.integers(0, 1000))
def test_child_order_does_not_matter(game, seed):
    probs, arity, ps = game
    a = build_small(probs, arity, ps)
    b = build_small(probs, arity, ps, order=list(range(len(probs)))[::-1])
    assert validate(a) == [] and validate(b) == []
    assert tree_stats(a) == tree_stats(b)
    assert abs(exploitability(a, keyed_profile(a, seed)) - exploitability(b, keyed_profile(b, seed))) <= 1e-12


@settings(max_examples=40, suppress_health_check=[HealthCheck.too_slow])
@given(small_games(), st.integers(0, 1000))
def test_values_and_reach_on_random_games(game, seed):
    tree = build_small(*game)
    x = random_profile(tree, np.random.default_rng(seed))
    reach = reach_probabilities(tree, x)
    term = tree.kind == NodeKind.TERMINAL
    assert abs(reach.total[term].sum() - 1.0) <= 1e-12
    for p in (0, 1):
        assert np.allclose(counterfactual_values(tree, x, p), cf_values(tree, x, p), atol=1e-12)
    assert exploitability(tree, x) >= 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.2, 5))
def test_kuhn_exploitability_nonnegative(seed, power):
    from cfr_forge.games import build_game

    tree = build_game("kuhn")
    assert exploitability(tree, random_profile(tree, np.random.default_rng(seed), power)) >= 0
