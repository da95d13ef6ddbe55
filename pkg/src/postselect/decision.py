"""Bayesian decision theory over a finite set of hypotheses with a reject option.

Hypotheses are labelled ``1..n`` and stored in array column ``j - 1``.
Decisions are labelled ``0..n`` where ``0`` is "reject" (abstain); a
:class:`LossMatrix` therefore has ``n + 1`` rows and ``n`` columns, row
``i`` holding the cost of reporting ``i`` under each true hypothesis.

Everything here is a pure function of immutable values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionError, DomainError, ZeroEvidenceError

REJECT = 0

#: Tolerance for checking that probability vectors are normalized.
NORMALIZATION_TOL = 1e-12


def _frozen(values: ArrayLike, ndim: int, name: str) -> NDArray[np.float64]:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise DimensionError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def _check_distribution(weights: NDArray[np.float64], name: str) -> None:
    if weights.size == 0:
        raise DimensionError(f"{name} is empty")
    if np.any(weights < 0):
        raise DomainError(f"{name} has negative weights: {weights}")
    if abs(weights.sum() - 1.0) > NORMALIZATION_TOL:
        raise DomainError(f"{name} weights sum to {weights.sum()!r}, not 1")


@dataclass(frozen=True)
class Prior:
    """Prior probability of each hypothesis, ``weights[j - 1] = Pr(H_j)``."""

    weights: NDArray[np.float64]

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", _frozen(self.weights, 1, "prior"))
        _check_distribution(self.weights, "prior")

    @classmethod
    def uniform(cls, n: int) -> Prior:
        return cls(np.full(n, 1.0 / n))

    @property
    def n_hypotheses(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class Posterior:
    """Posterior probability of each hypothesis given one observed outcome."""

    weights: NDArray[np.float64]

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", _frozen(self.weights, 1, "posterior"))
        _check_distribution(self.weights, "posterior")

    @property
    def n_hypotheses(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class LikelihoodTable:
    """Outcome probabilities ``entries[D, j - 1] = Pr(D | H_j)``.

    Rows are outcomes, columns hypotheses; every column is a distribution.
    """

    entries: NDArray[np.float64]

    def __post_init__(self) -> None:
        arr = _frozen(self.entries, 2, "likelihood table")
        if np.any(arr < 0) or np.any(arr > 1):
            raise DomainError("likelihood entries must lie in [0, 1]")
        sums = arr.sum(axis=0)
        if np.any(np.abs(sums - 1.0) > NORMALIZATION_TOL):
            raise DomainError(f"likelihood columns sum to {sums}, not 1")
        object.__setattr__(self, "entries", arr)

    @property
    def n_outcomes(self) -> int:
        return self.entries.shape[0]

    @property
    def n_hypotheses(self) -> int:
        return self.entries.shape[1]

    def column(self, outcome: int) -> NDArray[np.float64]:
        """Likelihoods ``Pr(D | H_j)`` of a single outcome ``D``."""
        return self.entries[outcome]


@dataclass(frozen=True)
class LossMatrix:
    """Cost ``cost[i, j - 1]`` of deciding ``i`` when hypothesis ``j`` holds.

    Row 0 is the reject decision. If ``chow_ordered`` is set, construction
    enforces ``cost[i, i] < cost[0, j] < cost[i, j]`` for ``i != j``.
    """

    cost: NDArray[np.float64]
    chow_ordered: bool = field(default=False)

    def __post_init__(self) -> None:
        arr = _frozen(self.cost, 2, "loss matrix")
        n_rows, n = arr.shape
        if n_rows != n + 1:
            raise DimensionError(
                f"loss matrix needs n + 1 rows for n hypotheses, got shape {arr.shape}"
            )
        if np.any(arr < 0):
            raise DomainError("losses must be nonnegative")
        object.__setattr__(self, "cost", arr)
        if self.chow_ordered and not self.satisfies_chow_order():
            raise DomainError("loss matrix is flagged Chow-ordered but violates the ordering")

    @property
    def n_hypotheses(self) -> int:
        return self.cost.shape[1]

    def satisfies_chow_order(self) -> bool:
        n = self.n_hypotheses
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i == j:
                    continue
                correct = self.cost[i, i - 1]
                reject = self.cost[0, j - 1]
                wrong = self.cost[i, j - 1]
                if not (correct < reject < wrong):
                    return False
        return True

    def scaled(self, factor: float) -> LossMatrix:
        if not factor > 0:
            raise DomainError("scale factor must be positive")
        return LossMatrix(self.cost * factor, chow_ordered=self.chow_ordered)

    @classmethod
    def zero_one_reject(cls, lam: float) -> LossMatrix:
        """Binary loss: 0 if correct, 1 if wrong, ``lam`` for rejecting."""
        if not 0.0 <= lam:
            raise DomainError(f"reject cost must be nonnegative, got {lam}")
        return cls(np.array([[lam, lam], [0.0, 1.0], [1.0, 0.0]]))

    @classmethod
    def error_reject(cls, lambda_e: float, lambda_r: float) -> LossMatrix:
        """Binary loss: 0 if correct, ``lambda_e`` if wrong, ``lambda_r`` for rejecting."""
        if lambda_e < 0 or lambda_r < 0:
            raise DomainError("error and reject costs must be nonnegative")
        return cls(
            np.array([[lambda_r, lambda_r], [0.0, lambda_e], [lambda_e, 0.0]])
        )


@dataclass(frozen=True)
class DecisionRule:
    """Map from outcome index to the decisions taken on that outcome.

    ``choices[D]`` lists the decisions made on outcome ``D``; more than one
    entry means one of them is picked uniformly at random.
    """

    choices: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        normalized = tuple(tuple(int(d) for d in c) for c in self.choices)
        for outcome, c in enumerate(normalized):
            if len(c) == 0:
                raise DimensionError(f"decision rule has no entry for outcome {outcome}")
            if len(set(c)) != len(c):
                raise DimensionError(f"duplicate decisions for outcome {outcome}: {c}")
            if min(c) < 0:
                raise DomainError(f"negative decision index for outcome {outcome}")
        object.__setattr__(self, "choices", normalized)

    @classmethod
    def deterministic(cls, decisions: Sequence[int]) -> DecisionRule:
        return cls(tuple((d,) for d in decisions))

    @classmethod
    def constant(cls, decision: int, n_outcomes: int) -> DecisionRule:
        return cls.deterministic([decision] * n_outcomes)

    @property
    def n_outcomes(self) -> int:
        return len(self.choices)

    @property
    def is_deterministic(self) -> bool:
        return all(len(c) == 1 for c in self.choices)

    def __getitem__(self, outcome: int) -> tuple[int, ...]:
        return self.choices[outcome]


TieBreak = Union[str, np.random.Generator]


def _check_decision(loss: LossMatrix, decision: int) -> None:
    if not 0 <= decision <= loss.n_hypotheses:
        raise DomainError(
            f"decision {decision} out of range 0..{loss.n_hypotheses}"
        )


def posterior(prior: Prior, likelihood_column: ArrayLike) -> Posterior:
    """Bayes' rule for one observed outcome.

    Raises
    ------
    ZeroEvidenceError
        If the outcome has zero probability under the prior.
    """
    lik = np.asarray(likelihood_column, dtype=np.float64)
    if lik.shape != prior.weights.shape:
        raise DimensionError(
            f"likelihood column has shape {lik.shape}, prior has {prior.weights.shape}"
        )
    joint = lik * prior.weights
    evidence = joint.sum()
    if evidence <= 0.0:
        raise ZeroEvidenceError("outcome has zero evidence under the prior")
    return Posterior(joint / evidence)


def conditional_risks(loss: LossMatrix, post: Posterior) -> NDArray[np.float64]:
    """Posterior expected loss of every decision ``0..n`` at once."""
    if post.n_hypotheses != loss.n_hypotheses:
        raise DimensionError(
            f"posterior over {post.n_hypotheses} hypotheses, loss over {loss.n_hypotheses}"
        )
    return loss.cost @ post.weights


def conditional_risk(loss: LossMatrix, post: Posterior, decision: int) -> float:
    _check_decision(loss, decision)
    return float(conditional_risks(loss, post)[decision])


def minimizing_decisions(loss: LossMatrix, post: Posterior) -> tuple[int, ...]:
    """All decisions attaining the minimum conditional risk (exact comparison)."""
    risks = conditional_risks(loss, post)
    return tuple(int(i) for i in np.flatnonzero(risks == risks.min()))


def _break_tie(candidates: tuple[int, ...], tie_break: TieBreak) -> int:
    if len(candidates) == 1:
        return candidates[0]
    if isinstance(tie_break, np.random.Generator):
        return candidates[int(tie_break.integers(len(candidates)))]
    if tie_break == "lowest":
        reports = [c for c in candidates if c != REJECT]
        return reports[0] if reports else REJECT
    raise ValueError(f"unknown tie-break policy {tie_break!r}")


def optimal_decision(
    loss: LossMatrix, post: Posterior, tie_break: TieBreak = "lowest"
) -> int:
    """Decision minimizing the conditional risk.

    Ties are broken by ``tie_break``: ``"lowest"`` picks the lowest-index
    non-reject decision among the minimizers (reject only if it is the sole
    minimizer); a :class:`numpy.random.Generator` picks uniformly among them.
    All minimizers carry identical risk, so the choice never changes it.
    """
    return _break_tie(minimizing_decisions(loss, post), tie_break)


def optimal_rule(
    loss: LossMatrix,
    prior: Prior,
    likelihood: LikelihoodTable,
    tie_break: str = "lowest",
) -> DecisionRule:
    """Optimal decision for every outcome of a finite experiment.

    With ``tie_break="randomize"`` each outcome keeps its full set of
    minimizers, giving the randomized rule. Outcomes with zero evidence
    contribute nothing to the total risk; they are assigned the decision
    that is optimal under the prior.
    """
    if likelihood.n_hypotheses != prior.n_hypotheses:
        raise DimensionError("likelihood and prior disagree on the number of hypotheses")
    choices = []
    for outcome in range(likelihood.n_outcomes):
        try:
            post = posterior(prior, likelihood.column(outcome))
        except ZeroEvidenceError:
            post = Posterior(prior.weights)
        best = minimizing_decisions(loss, post)
        if tie_break == "randomize":
            choices.append(best)
        else:
            choices.append((_break_tie(best, tie_break),))
    return DecisionRule(tuple(choices))


def total_risk(
    loss: LossMatrix,
    prior: Prior,
    likelihood: LikelihoodTable,
    rule: DecisionRule,
) -> float:
    """Bayes risk ``sum_D sum_j loss[rule(D), j] Pr(D | H_j) Pr(H_j)``.

    Randomized entries of ``rule`` are averaged uniformly.
    """
    if likelihood.n_hypotheses != prior.n_hypotheses or loss.n_hypotheses != prior.n_hypotheses:
        raise DimensionError("loss, prior and likelihood disagree on the number of hypotheses")
    if rule.n_outcomes != likelihood.n_outcomes:
        raise DimensionError(
            f"rule covers {rule.n_outcomes} outcomes, likelihood has {likelihood.n_outcomes}"
        )
    joint = likelihood.entries * prior.weights
    risk = 0.0
    for outcome, decisions in enumerate(rule.choices):
        for d in decisions:
            _check_decision(loss, d)
        expected_loss = loss.cost[list(decisions)].mean(axis=0)
        risk += float(expected_loss @ joint[outcome])
    return risk


def enumerate_deterministic_rules(n_outcomes: int, n_hypotheses: int):
    """Yield every deterministic rule; ``(n + 1) ** m`` of them."""
    for decisions in itertools.product(range(n_hypotheses + 1), repeat=n_outcomes):
        yield DecisionRule.deterministic(decisions)


def bayes_risk_array(
    loss: LossMatrix, prior: Prior, likelihoods: ArrayLike
) -> NDArray[np.float64]:
    """Risk of the optimal rule for a stack of likelihood tables.

    ``likelihoods`` has shape ``(..., m, n)``. Each outcome contributes
    ``min_i sum_j loss[i, j] Pr(D | H_j) Pr(H_j)``, which is the optimal
    rule's share of :func:`total_risk` without normalizing the posterior.
    """
    lik = np.asarray(likelihoods, dtype=np.float64)
    if lik.shape[-1] != loss.n_hypotheses or prior.n_hypotheses != loss.n_hypotheses:
        raise DimensionError("loss, prior and likelihood disagree on the number of hypotheses")
    joint = lik * prior.weights
    per_decision = np.einsum("ij,...dj->...di", loss.cost, joint)
    return per_decision.min(axis=-1).sum(axis=-1)
