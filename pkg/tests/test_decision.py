import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from postselect.decision import (
    REJECT,
    DecisionRule,
    LikelihoodTable,
    LossMatrix,
    Posterior,
    Prior,
    bayes_risk_array,
    conditional_risk,
    conditional_risks,
    enumerate_deterministic_rules,
    optimal_decision,
    optimal_rule,
    posterior,
    total_risk,
)
from postselect.errors import DimensionError, DomainError, ZeroEvidenceError

probabilities = st.floats(0.0, 1.0, allow_nan=False)


def binary_posterior(p1):
    return Posterior(np.array([p1, 1.0 - p1]))


# -- posterior ---------------------------------------------------------------


@pytest.mark.parametrize(
    "prior, lik, expected",
    [
        ((0.5, 0.5), (0.8, 0.2), (0.8, 0.2)),
        ((1.0, 0.0), (0.3, 0.9), (1.0, 0.0)),
        # 0.25*0.4 = 0.1, 0.75*0.2 = 0.15 -> 0.1/0.25, 0.15/0.25
        ((0.25, 0.75), (0.4, 0.2), (0.4, 0.6)),
    ],
)
def test_posterior_examples(prior, lik, expected):
    post = posterior(Prior(np.array(prior)), lik)
    np.testing.assert_allclose(post.weights, expected, atol=1e-15)


def test_posterior_zero_evidence():
    with pytest.raises(ZeroEvidenceError):
        posterior(Prior(np.array([1.0, 0.0])), (0.0, 0.7))


def test_posterior_dimension_mismatch():
    with pytest.raises(DimensionError):
        posterior(Prior.uniform(2), (0.1, 0.2, 0.3))


@given(st.lists(probabilities, min_size=2, max_size=6), st.data())
def test_posterior_normalized(raw_prior, data):
    w = np.array(raw_prior)
    if w.sum() == 0:
        w = np.ones_like(w)
    prior = Prior(w / w.sum())
    lik = np.array(data.draw(st.lists(probabilities, min_size=w.size, max_size=w.size)))
    if (lik * prior.weights).sum() <= 0:
        with pytest.raises(ZeroEvidenceError):
            posterior(prior, lik)
        return
    post = posterior(prior, lik)
    assert abs(post.weights.sum() - 1.0) <= 1e-12
    assert np.all(post.weights >= 0)


def test_prior_validation():
    with pytest.raises(DomainError):
        Prior(np.array([0.6, 0.6]))
    with pytest.raises(DomainError):
        Prior(np.array([1.2, -0.2]))


def test_likelihood_table_validation():
    LikelihoodTable(np.array([[0.5, 0.1], [0.5, 0.9]]))
    with pytest.raises(DomainError):
        LikelihoodTable(np.array([[0.5, 0.1], [0.4, 0.9]]))


# -- loss matrices -----------------------------------------------------------


def test_zero_one_reject_entries():
    cost = LossMatrix.zero_one_reject(0.3).cost
    assert cost[1, 0] == cost[2, 1] == 0.0
    assert cost[1, 1] == cost[2, 0] == 1.0
    assert cost[0, 0] == cost[0, 1] == 0.3


def test_error_reject_entries():
    cost = LossMatrix.error_reject(2.0, 0.7).cost
    np.testing.assert_array_equal(cost, [[0.7, 0.7], [0.0, 2.0], [2.0, 0.0]])


def test_chow_order_flag():
    LossMatrix(LossMatrix.zero_one_reject(0.3).cost, chow_ordered=True)
    with pytest.raises(DomainError):
        LossMatrix(LossMatrix.zero_one_reject(1.5).cost, chow_ordered=True)
    # relaxed ordering is permitted when not flagged
    assert not LossMatrix.error_reject(1.0, 2.0).satisfies_chow_order()


def test_loss_shape_checked():
    with pytest.raises(DimensionError):
        LossMatrix(np.zeros((2, 2)))


def test_loss_matrix_immutable():
    loss = LossMatrix.zero_one_reject(0.2)
    with pytest.raises(ValueError):
        loss.cost[0, 0] = 5.0


# -- conditional risk --------------------------------------------------------


def test_conditional_risk_zero_one():
    loss = LossMatrix.zero_one_reject(0.3)
    post = binary_posterior(0.9)
    assert conditional_risk(loss, post, 1) == pytest.approx(0.1, abs=1e-15)
    assert conditional_risk(loss, post, 2) == pytest.approx(0.9, abs=1e-15)
    assert conditional_risk(loss, post, REJECT) == pytest.approx(0.3, abs=1e-15)


def test_conditional_risk_error_reject_boundary():
    # lambda_R = lambda_E / 2 with a flat posterior: all three risks coincide
    risks = conditional_risks(LossMatrix.error_reject(2.0, 1.0), binary_posterior(0.5))
    np.testing.assert_allclose(risks, [1.0, 1.0, 1.0], atol=1e-15)


def test_conditional_risk_matches_weighted_sum():
    rng = np.random.default_rng(3)
    cost = rng.uniform(0, 5, size=(4, 3))
    w = rng.dirichlet(np.ones(3))
    loss, post = LossMatrix(cost), Posterior(w)
    for i in range(4):
        oracle = sum(cost[i, j] * w[j] for j in range(3))
        assert conditional_risk(loss, post, i) == pytest.approx(oracle, rel=1e-14)


def test_conditional_risk_dimension_mismatch():
    with pytest.raises(DimensionError):
        conditional_risk(LossMatrix.zero_one_reject(0.2), Posterior(np.ones(3) / 3), 1)
    with pytest.raises(DomainError):
        conditional_risk(LossMatrix.zero_one_reject(0.2), binary_posterior(0.5), 3)


# -- optimal decision --------------------------------------------------------


@pytest.mark.parametrize(
    "lam, p1, expected",
    [(0.3, 0.9, 1), (0.3, 0.6, REJECT), (0.5, 0.5, 1), (0.3, 0.1, 2)],
)
def test_optimal_decision_examples(lam, p1, expected):
    assert optimal_decision(LossMatrix.zero_one_reject(lam), binary_posterior(p1)) == expected


def test_tie_choices_are_risk_equivalent():
    loss, post = LossMatrix.zero_one_reject(0.5), binary_posterior(0.5)
    risks = conditional_risks(loss, post)
    np.testing.assert_allclose(risks, 0.5, atol=0)
    rng = np.random.default_rng(0)
    seen = {optimal_decision(loss, post, tie_break=rng) for _ in range(200)}
    assert seen == {0, 1, 2}


def test_unknown_tie_break():
    with pytest.raises(ValueError):
        optimal_decision(LossMatrix.zero_one_reject(0.5), binary_posterior(0.5), "nope")


@given(
    st.integers(2, 4).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n),
            st.floats(0.01, 0.98),
        )
    )
)
def test_optimal_decision_minimizes_chow_ordered(args):
    n, raw, frac = args
    w = np.array(raw) / sum(raw)
    # 0 on the diagonal, 1 off it, reject strictly between
    cost = np.ones((n + 1, n))
    cost[1:][np.eye(n, dtype=bool)] = 0.0
    cost[0] = frac
    loss = LossMatrix(cost, chow_ordered=True)
    post = Posterior(w)
    best = optimal_decision(loss, post)
    risks = [conditional_risk(loss, post, d) for d in range(n + 1)]
    assert risks[best] <= min(risks)


@given(probabilities, st.floats(0.0, 1.0), st.sampled_from([0.125, 0.5, 2.0, 1024.0]))
def test_scale_invariance_power_of_two(p1, lam, c):
    loss = LossMatrix.zero_one_reject(lam)
    post = binary_posterior(p1)
    assert optimal_decision(loss, post) == optimal_decision(loss.scaled(c), post)


@given(probabilities, st.floats(0.0, 1.0))
def test_scale_invariance_general_factor_keeps_risk(p1, lam):
    loss = LossMatrix.zero_one_reject(lam)
    post = binary_posterior(p1)
    for c in (0.3, 7.1, 1e3):
        d = optimal_decision(loss.scaled(c), post)
        risks = conditional_risks(loss, post)
        assert risks[d] <= risks.min() + 1e-12


def _threshold_rule(p1, lam):
    """Largest posterior reported if it reaches 1 - lam, else reject."""
    top = 1 if p1 >= 1 - p1 else 2
    return top if max(p1, 1 - p1) >= 1 - lam else REJECT


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_threshold_form_equivalent_up_to_ties(p1, lam):
    loss = LossMatrix.zero_one_reject(lam)
    post = binary_posterior(p1)
    d = optimal_decision(loss, post)
    risks = conditional_risks(loss, post)
    expected = _threshold_rule(p1, lam)
    # both rules are minimizers; they may only differ on near-ties
    assert abs(risks[d] - risks[expected]) <= 1e-12


@given(st.floats(0.5, 1.0), probabilities)
def test_never_reject_when_lambda_at_least_half(lam, p1):
    assert optimal_decision(LossMatrix.zero_one_reject(lam), binary_posterior(p1)) != REJECT


@given(probabilities, st.floats(0.0, 0.4999), st.floats(0.1, 20.0))
def test_error_reject_matches_zero_one(p1, lam, lambda_e):
    post = binary_posterior(p1)
    general = LossMatrix.error_reject(lambda_e, lam * lambda_e)
    zero_one = LossMatrix.zero_one_reject(lam)
    d_general = optimal_decision(general, post)
    risks = conditional_risks(zero_one, post)
    assert risks[d_general] <= risks.min() + 1e-12


# -- rules and total risk ----------------------------------------------------


def _three_outcome_problem():
    prior = Prior(np.array([0.35, 0.65]))
    lik = LikelihoodTable(np.array([[0.2, 0.25], [0.7, 0.15], [0.1, 0.6]]))
    return prior, lik


def test_always_reject_costs_lambda():
    prior, lik = _three_outcome_problem()
    for lam in (0.0, 0.2, 0.45):
        rule = DecisionRule.constant(REJECT, 3)
        assert total_risk(LossMatrix.zero_one_reject(lam), prior, lik, rule) == pytest.approx(
            lam, abs=1e-15
        )


def test_total_risk_brute_force_sum():
    prior, lik = _three_outcome_problem()
    loss = LossMatrix.error_reject(1.7, 0.4)
    rule = DecisionRule.deterministic([0, 2, 1])
    oracle = 0.0
    for d, decision in enumerate([0, 2, 1]):
        for j in range(2):
            oracle += loss.cost[decision, j] * lik.entries[d, j] * prior.weights[j]
    assert total_risk(loss, prior, lik, rule) == pytest.approx(oracle, rel=1e-14)


@pytest.mark.parametrize("lam", [0.0, 0.1, 0.3, 0.5, 0.8])
def test_optimal_rule_beats_all_27_rules(lam):
    prior, lik = _three_outcome_problem()
    loss = LossMatrix.zero_one_reject(lam)
    best = total_risk(loss, prior, lik, optimal_rule(loss, prior, lik))
    rules = list(enumerate_deterministic_rules(3, 2))
    assert len(rules) == 27
    exhaustive = min(total_risk(loss, prior, lik, r) for r in rules)
    assert best == pytest.approx(exhaustive, abs=1e-15)
    assert all(best <= total_risk(loss, prior, lik, r) + 1e-15 for r in rules)


def test_randomized_rule_averages():
    prior, lik = _three_outcome_problem()
    loss = LossMatrix.zero_one_reject(0.3)
    mixed = DecisionRule(((0, 1), (1,), (2,)))
    a = total_risk(loss, prior, lik, DecisionRule.deterministic([0, 1, 2]))
    b = total_risk(loss, prior, lik, DecisionRule.deterministic([1, 1, 2]))
    assert total_risk(loss, prior, lik, mixed) == pytest.approx(0.5 * (a + b), rel=1e-14)


def test_randomize_keeps_all_minimizers():
    prior = Prior.uniform(2)
    lik = LikelihoodTable(np.array([[0.5, 0.5], [0.5, 0.0], [0.0, 0.5]]))
    rule = optimal_rule(LossMatrix.error_reject(2.0, 1.0), prior, lik, tie_break="randomize")
    assert rule.choices[0] == (0, 1, 2)


def test_zero_evidence_outcome_gets_prior_decision():
    prior = Prior.uniform(2)
    lik = LikelihoodTable(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    rule = optimal_rule(LossMatrix.zero_one_reject(0.3), prior, lik)
    assert rule.choices == ((0,), (1,), (2,))


def test_total_risk_errors():
    prior, lik = _three_outcome_problem()
    loss = LossMatrix.zero_one_reject(0.2)
    with pytest.raises(DimensionError):
        total_risk(loss, prior, lik, DecisionRule.deterministic([0, 1]))
    with pytest.raises(DomainError):
        total_risk(loss, prior, lik, DecisionRule.deterministic([0, 1, 5]))
    with pytest.raises(DimensionError):
        DecisionRule(((0,), ()))


@settings(max_examples=50)
@given(st.floats(0.0, 1.0), st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_bayes_risk_array_matches_total_risk(lam, a, b):
    prior = Prior.uniform(2)
    lik = LikelihoodTable(np.array([[a, b], [(1 - a) / 2, (1 - b) / 3], [(1 - a) / 2, 2 * (1 - b) / 3]]))
    loss = LossMatrix.zero_one_reject(lam)
    expected = total_risk(loss, prior, lik, optimal_rule(loss, prior, lik))
    assert bayes_risk_array(loss, prior, lik.entries) == pytest.approx(expected, abs=1e-15)


def test_enumeration_count_generic():
    assert sum(1 for _ in enumerate_deterministic_rules(2, 3)) == 16
