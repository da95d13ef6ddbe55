"""Seeded Monte Carlo of the two-state discrimination game.

Each trial draws the true hypothesis from the prior, an outcome from the Born
probabilities, and applies a decision rule; the incurred loss is tallied.

Randomness comes from numpy's Philox4x64 counter-based generator keyed by
``(seed, stream)``. Trial ``t`` consumes exactly the four 64-bit words
produced at counter ``t``: word 0 picks the hypothesis, word 1 the outcome
(inverse CDF over E_0, E_1, E_2 in that order), word 2 breaks ties of a
randomized rule. The result therefore does not depend on chunking or on how
many worker threads run the chunks.

Losses are reduced through an integer (decision, truth) count table, so the
mean and variance are exact sums over at most nine distinct loss values.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from numpy.typing import NDArray

from .decision import REJECT, DecisionRule, LossMatrix, LikelihoodTable, optimal_rule
from .errors import DimensionError, DomainError
from .qubit import UNIFORM_PRIOR, born_array, check_angles
from .risk import analytic_risk, optimal_angle

CHUNK_SIZE = 1 << 16
Z_FLAG = 4.0
_WORDS_PER_TRIAL = 4
_UINT64_MAX = (1 << 64) - 1


def _uniform(words: NDArray[np.uint64]) -> NDArray[np.float64]:
    """Top 53 bits of each word as a double in [0, 1)."""
    return (words >> np.uint64(11)).astype(np.float64) * 2.0**-53


@dataclass(frozen=True)
class GameConfig:
    """One discrimination game: states, loss, measurement, rule, and RNG seed.

    ``stream`` selects an independent Philox key for the same seed; batch
    drivers use it to give each grid point its own stream.
    """

    theta: float
    loss: LossMatrix
    phi: float
    rule: DecisionRule
    trials: int
    seed: int
    stream: int = 0
    prior: NDArray[np.float64] = field(default_factory=lambda: UNIFORM_PRIOR.weights)

    def __post_init__(self) -> None:
        check_angles(self.theta, "theta")
        check_angles(self.phi, "phi")
        if self.loss.n_hypotheses != 2:
            raise DimensionError("the discrimination game has two hypotheses")
        if self.rule.n_outcomes != 3:
            raise DimensionError("the measurement has three outcomes")
        for decisions in self.rule.choices:
            if max(decisions) > 2:
                raise DomainError(f"decision out of range 0..2: {decisions}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError("trials must be a positive integer")
        if not 0 <= self.seed <= _UINT64_MAX:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if not 0 <= self.stream <= _UINT64_MAX:
            raise DomainError("stream must be a 64-bit unsigned integer")
        prior = np.array(self.prior, dtype=np.float64)
        if prior.shape != (2,) or np.any(prior < 0) or abs(prior.sum() - 1) > 1e-12:
            raise DomainError("prior must be a distribution over two hypotheses")
        prior.setflags(write=False)
        object.__setattr__(self, "prior", prior)

    @classmethod
    def optimal(
        cls,
        theta: float,
        loss: LossMatrix,
        phi: float,
        trials: int,
        seed: int,
        stream: int = 0,
    ) -> GameConfig:
        """Config that plays the optimal (lowest-index tie-break) rule at ``phi``."""
        likelihood = LikelihoodTable(born_array(theta, phi))
        rule = optimal_rule(loss, UNIFORM_PRIOR, likelihood)
        return cls(theta, loss, phi, rule, trials, seed, stream)


@dataclass(frozen=True)
class SimulationReport:
    empirical_risk: float
    std_error: float
    freq_correct: float
    freq_error: float
    freq_reject: float
    trials: int
    seed: int
    stream: int
    counts: tuple[tuple[int, int], ...]
    """``counts[i][j - 1]``: trials that decided ``i`` while ``H_j`` was true."""

    @property
    def n_correct(self) -> int:
        return self.counts[1][0] + self.counts[2][1]

    @property
    def n_error(self) -> int:
        return self.counts[1][1] + self.counts[2][0]

    @property
    def n_reject(self) -> int:
        return sum(self.counts[REJECT])

    def to_dict(self) -> dict:
        out = asdict(self)
        out["counts"] = [list(row) for row in self.counts]
        return out


def _run_chunk(
    key: int,
    start: int,
    size: int,
    prior: NDArray[np.float64],
    born: NDArray[np.float64],
    choices: NDArray[np.int64],
    n_choices: NDArray[np.int64],
) -> NDArray[np.int64]:
    words = np.random.Philox(key=key, counter=start).random_raw(size * _WORDS_PER_TRIAL)
    u = _uniform(words.reshape(size, _WORDS_PER_TRIAL))

    truth = (u[:, 0] >= prior[0]).astype(np.int64)  # 0 -> H_1, 1 -> H_2
    cdf = np.cumsum(born, axis=0)  # (3, 2), fixed order E_0, E_1, E_2
    outcome = (u[:, 1][:, None] >= cdf[:2, truth].T).sum(axis=1)

    k = n_choices[outcome]
    pick = np.minimum((u[:, 2] * k).astype(np.int64), k - 1)
    decision = choices[outcome, pick]

    counts = np.zeros((3, 2), dtype=np.int64)
    np.add.at(counts, (decision, truth), 1)
    return counts


def simulate_game(config: GameConfig, workers: int = 1) -> SimulationReport:
    """Play ``config.trials`` rounds and report the empirical risk.

    ``workers > 1`` runs chunks on a thread pool; the report is identical.
    """
    born = born_array(config.theta, config.phi)
    width = max(len(c) for c in config.rule.choices)
    choices = np.zeros((3, width), dtype=np.int64)
    n_choices = np.zeros(3, dtype=np.int64)
    for d, options in enumerate(config.rule.choices):
        choices[d, : len(options)] = options
        n_choices[d] = len(options)

    key = config.seed | (config.stream << 64)
    starts = range(0, config.trials, CHUNK_SIZE)
    jobs = [
        (key, s, min(CHUNK_SIZE, config.trials - s), config.prior, born, choices, n_choices)
        for s in starts
    ]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda args: _run_chunk(*args), jobs))
    else:
        parts = [_run_chunk(*args) for args in jobs]
    counts = np.sum(parts, axis=0)
    return _report(config, counts)


def _report(config: GameConfig, counts: NDArray[np.int64]) -> SimulationReport:
    n = config.trials
    cost = config.loss.cost
    mean = math.fsum(int(counts[i, j]) * float(cost[i, j]) for i in range(3) for j in range(2)) / n
    if n > 1:
        sq = math.fsum(
            int(counts[i, j]) * (float(cost[i, j]) - mean) ** 2 for i in range(3) for j in range(2)
        )
        std_error = math.sqrt(sq / (n - 1)) / math.sqrt(n)
    else:
        std_error = 0.0
    n_correct = int(counts[1, 0] + counts[2, 1])
    n_error = int(counts[1, 1] + counts[2, 0])
    n_reject = int(counts[0].sum())
    return SimulationReport(
        empirical_risk=mean,
        std_error=std_error,
        freq_correct=n_correct / n,
        freq_error=n_error / n,
        freq_reject=n_reject / n,
        trials=n,
        seed=config.seed,
        stream=config.stream,
        counts=tuple(tuple(int(c) for c in row) for row in counts),
    )


def z_score(empirical: float, analytic: float, std_error: float) -> float:
    """``(empirical - analytic) / std_error``; 0 when both the gap and error vanish."""
    diff = empirical - analytic
    if std_error == 0.0:
        return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
    return diff / std_error


@dataclass(frozen=True)
class ValidationRow:
    lam: float
    phi: float
    analytic_risk: float
    empirical_risk: float
    std_error: float
    z: float
    flagged: bool


def validate_risk_surface(
    theta: float,
    lambdas,
    trials: int,
    seed: int,
    workers: int = 1,
) -> list[ValidationRow]:
    """Simulate at the optimal angle for each reject cost and compare.

    Grid point ``k`` uses Philox stream ``k`` of ``seed``. Points with
    ``|z| > 4`` are flagged.
    """
    rows = []
    for k, lam in enumerate(np.asarray(lambdas, dtype=np.float64).ravel()):
        lam = float(lam)
        phi = optimal_angle(theta, lam)
        loss = LossMatrix.zero_one_reject(lam)
        report = simulate_game(GameConfig.optimal(theta, loss, phi, trials, seed, stream=k), workers)
        expected = analytic_risk(theta, lam, phi)
        z = z_score(report.empirical_risk, expected, report.std_error)
        rows.append(
            ValidationRow(
                lam=lam,
                phi=phi,
                analytic_risk=expected,
                empirical_risk=report.empirical_risk,
                std_error=report.std_error,
                z=z,
                flagged=abs(z) > Z_FLAG,
            )
        )
    return rows
