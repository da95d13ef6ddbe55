"""Closed-form risk and optimal measurement angle for the costed-reject losses.

For the 0-1-lambda loss with equal priors, the risk of the optimal decision
rule at measurement angle ``phi`` is

    lambda + min(0, [(2 lambda - 1)(cos theta cos phi - 1) - sin theta sin phi]
                    / [2 (1 + cos phi)])

for ``lambda <= 1/2``. Above 1/2 rejecting is never worthwhile (guessing
costs 1/2 in expectation), so the risk is frozen at its ``lambda = 1/2``
value. The minimizing angle is ``2 acot[(1 - 2 lambda) cot(theta/2)]`` below
the Helstrom threshold ``(1 - tan(theta/2)) / 2`` and ``pi/2`` above it.

:func:`brute_force_risk` recomputes any of these from Born probabilities and
the generic decision layer, and :func:`grid_search_optimal_angle` locates the
minimizer by exhaustive evaluation; both serve as independent checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .decision import (
    LikelihoodTable,
    LossMatrix,
    bayes_risk_array,
    optimal_rule,
    total_risk,
)
from .errors import DomainError
from .qubit import HALF_PI, UNIFORM_PRIOR, born_array, check_angles, half_tan

DEFAULT_RESOLUTION = 10_000
MIN_RESOLUTION = 1_000

Family = Literal["zero-one", "error-reject"]


def _scalar_or_array(x: NDArray[np.float64]):
    return float(x) if np.ndim(x) == 0 else x


def _check_lambda(lam: ArrayLike) -> NDArray[np.float64]:
    lam = np.asarray(lam, dtype=np.float64)
    if np.any(~np.isfinite(lam)) or np.any(lam < 0.0) or np.any(lam > 1.0):
        raise DomainError("reject cost lambda must lie in [0, 1]")
    return lam


def helstrom_threshold(theta: ArrayLike):
    """Smallest reject cost at which the Helstrom measurement is optimal."""
    theta = check_angles(theta, "theta")
    return _scalar_or_array(0.5 * (1.0 - half_tan(theta)))


def analytic_risk(theta: ArrayLike, lam: ArrayLike, phi: ArrayLike):
    """Expected 0-1-lambda loss at angle ``phi`` under the optimal decision rule.

    Broadcasts over array arguments; returns a float for scalar input.
    """
    theta = check_angles(theta, "theta")
    phi = check_angles(phi, "phi")
    lam = np.minimum(_check_lambda(lam), 0.5)
    numerator = (2 * lam - 1) * (np.cos(theta) * np.cos(phi) - 1) - np.sin(theta) * np.sin(phi)
    gain = numerator / (2 * (1 + np.cos(phi)))
    # rounding can leave -1e-17 where the exact risk is 0
    return _scalar_or_array(np.maximum(lam + np.minimum(0.0, gain), 0.0))


def optimal_angle(theta: ArrayLike, lam: ArrayLike):
    """Measurement angle minimizing :func:`analytic_risk`.

    ``acot`` takes values in ``(0, pi)``, which keeps the interior branch
    continuous and within ``(0, pi/2]``. ``theta = 0`` gives 0 (the limit of
    the interior branch).
    """
    theta = check_angles(theta, "theta")
    lam = _check_lambda(lam)
    t = half_tan(theta)
    interior = lam < 0.5 * (1.0 - t)
    # acot((1 - 2 lam) / t) == atan2(t, 1 - 2 lam) for t >= 0, 1 - 2 lam > 0
    with np.errstate(invalid="ignore"):
        phi = np.where(interior, 2.0 * np.arctan2(t, 1.0 - 2.0 * lam), HALF_PI)
    return _scalar_or_array(phi)


def is_helstrom_branch(theta: ArrayLike, lam: ArrayLike):
    theta = check_angles(theta, "theta")
    lam = _check_lambda(lam)
    out = lam >= 0.5 * (1.0 - half_tan(theta))
    return bool(out) if np.ndim(out) == 0 else out


def angle_grid(resolution: int = DEFAULT_RESOLUTION) -> NDArray[np.float64]:
    """``resolution`` equally spaced angles covering ``[0, pi/2]`` inclusive."""
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    grid = np.linspace(0.0, HALF_PI, resolution)
    grid[-1] = HALF_PI
    return grid


def grid_argmin(
    risk: Callable[[NDArray[np.float64]], NDArray[np.float64]],
    resolution: int = DEFAULT_RESOLUTION,
) -> tuple[float, float]:
    """Exhaustive minimization of a vectorized risk over the angle grid.

    Returns ``(phi, risk)`` at the first grid point attaining the minimum.
    """
    if resolution < MIN_RESOLUTION:
        raise ValueError(f"grid search needs at least {MIN_RESOLUTION} points")
    phis = angle_grid(resolution)
    values = np.asarray(risk(phis))
    k = int(np.argmin(values))
    return float(phis[k]), float(values[k])


def grid_search_optimal_angle(
    theta: float, lam: float, resolution: int = DEFAULT_RESOLUTION
) -> float:
    """Angle on a uniform grid with the least :func:`analytic_risk`.

    Where the risk is flat (for instance ``lambda = 0``, where rejecting
    everything costs nothing) any angle is optimal and the first grid point
    is returned; compare risks rather than angles there.
    """
    phi, _ = grid_argmin(lambda phis: analytic_risk(theta, lam, phis), resolution)
    return phi


def brute_force_risk(theta: float, loss: LossMatrix, phi: float) -> float:
    """Total risk of the optimal rule, rebuilt from Born probabilities.

    Goes through :func:`postselect.decision.optimal_rule` and
    :func:`postselect.decision.total_risk`; no closed forms involved.
    """
    check_angles(theta, "theta")
    check_angles(phi, "phi")
    likelihood = LikelihoodTable(born_array(theta, phi))
    rule = optimal_rule(loss, UNIFORM_PRIOR, likelihood)
    return total_risk(loss, UNIFORM_PRIOR, likelihood, rule)


def _check_costs(lambda_e: float, lambda_r: float) -> None:
    if not (np.isfinite(lambda_e) and np.isfinite(lambda_r)) or lambda_e < 0 or lambda_r < 0:
        raise DomainError("error and reject costs must be finite and nonnegative")


def generalized_risk(theta: float, lambda_e: float, lambda_r: float, phi: float) -> float:
    """Expected 0-lambda_E-lambda_R loss under the optimal decision rule.

    When ``lambda_r > lambda_e / 2`` the rule never rejects: the inconclusive
    outcome is answered with a guess, costing ``lambda_e / 2`` on average.
    """
    _check_costs(lambda_e, lambda_r)
    return brute_force_risk(theta, LossMatrix.error_reject(lambda_e, lambda_r), phi)


def generalized_risk_curve(
    theta: float, lambda_e: float, lambda_r: float, phis: ArrayLike
) -> NDArray[np.float64]:
    """Vectorized :func:`generalized_risk` over an array of angles."""
    _check_costs(lambda_e, lambda_r)
    check_angles(theta, "theta")
    phis = check_angles(phis, "phi")
    loss = LossMatrix.error_reject(lambda_e, lambda_r)
    return bayes_risk_array(loss, UNIFORM_PRIOR, born_array(theta, phis))


def grid_search_generalized_angle(
    theta: float,
    lambda_e: float,
    lambda_r: float,
    resolution: int = DEFAULT_RESOLUTION,
) -> float:
    phi, _ = grid_argmin(
        lambda phis: generalized_risk_curve(theta, lambda_e, lambda_r, phis), resolution
    )
    return phi


@dataclass(frozen=True)
class RiskPoint:
    theta: float
    lam: float
    phi: float
    risk: float


@dataclass(frozen=True)
class GeneralRiskPoint:
    theta: float
    lambda_e: float
    lambda_r: float
    phi: float
    risk: float


def optimal_risk_point(theta: float, lam: float) -> RiskPoint:
    phi = optimal_angle(theta, lam)
    return RiskPoint(float(theta), float(lam), phi, analytic_risk(theta, lam, phi))


def optimal_general_risk_point(
    theta: float, lambda_e: float, lambda_r: float, resolution: int = DEFAULT_RESOLUTION
) -> GeneralRiskPoint:
    """Grid-searched optimum of the generalized loss.

    No closed form is available here; reduces to :func:`optimal_angle` only
    when ``lambda_r / lambda_e < 1/2``.
    """
    phi = grid_search_generalized_angle(theta, lambda_e, lambda_r, resolution)
    risk = generalized_risk(theta, lambda_e, lambda_r, phi)
    return GeneralRiskPoint(float(theta), float(lambda_e), float(lambda_r), phi, risk)


@dataclass(frozen=True)
class DecisionRegionMap:
    """Optimal decision for each outcome over a grid of angles and costs.

    ``decisions[k, l, D]`` is the decision on outcome ``E_D`` at
    ``costs[k]`` (lambda, or lambda_E for the error-reject family) and
    ``phis[l]``. Outcomes that cannot occur at a cell get the decision
    optimal under the prior, which for equal priors coincides with the
    decision for the uninformative posterior (1/2, 1/2).
    """

    theta: float
    family: str
    phis: NDArray[np.float64]
    costs: NDArray[np.float64]
    lambda_r: float | None
    decisions: NDArray[np.int64]


def decision_region_map(
    theta: float,
    phis: ArrayLike,
    costs: ArrayLike,
    family: Family = "zero-one",
    lambda_r: float = 1.0,
) -> DecisionRegionMap:
    """Tabulate the optimal decision rule over ``(cost, phi)``.

    ``family="zero-one"`` reads ``costs`` as the reject cost lambda;
    ``family="error-reject"`` reads them as lambda_E with fixed ``lambda_r``.
    """
    check_angles(theta, "theta")
    phis = check_angles(phis, "phi").ravel()
    costs = np.asarray(costs, dtype=np.float64).ravel()
    if family == "zero-one":
        _check_lambda(costs)
        losses = [LossMatrix.zero_one_reject(c) for c in costs]
    elif family == "error-reject":
        for c in costs:
            _check_costs(c, lambda_r)
        losses = [LossMatrix.error_reject(c, lambda_r) for c in costs]
    else:
        raise ValueError(f"unknown loss family {family!r}")

    tables = [LikelihoodTable(p) for p in born_array(theta, phis)]
    decisions = np.empty((costs.size, phis.size, 3), dtype=np.int64)
    for k, loss in enumerate(losses):
        for l, table in enumerate(tables):
            rule = optimal_rule(loss, UNIFORM_PRIOR, table)
            decisions[k, l] = [c[0] for c in rule.choices]
    decisions.setflags(write=False)
    return DecisionRegionMap(
        theta=float(theta),
        family=family,
        phis=phis,
        costs=costs,
        lambda_r=float(lambda_r) if family == "error-reject" else None,
        decisions=decisions,
    )
