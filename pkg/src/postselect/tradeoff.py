"""Correct / error / reject / accept probabilities and the error-reject tradeoff.

At the optimal angle and equal priors the optimal rule is simply "report D
on outcome E_D, reject on E_0", so the four probabilities are read off the
Born table at ``optimal_angle(theta, lam)``. The optimal risk then obeys

    risk = Pr(error) + lam * Pr(reject) = integral_0^lam Pr(reject | lam') dlam'
    Pr(error) = -integral_0^lam lam' dPr(reject | lam')

with the integrands evaluated at the per-``lam'`` optimal angle. The reject
curve has a kink at the Helstrom threshold and vanishes beyond it, so the
quadratures below integrate only up to that point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DomainError, UnreachableError
from .qubit import born_array, check_angles
from .risk import helstrom_threshold, optimal_angle

DEFAULT_STEP = 1e-5
BISECTION_TOL = 1e-10
BISECTION_MAX_ITER = 200


def _check_lambda(lam: ArrayLike) -> NDArray[np.float64]:
    lam = np.asarray(lam, dtype=np.float64)
    if np.any(~np.isfinite(lam)) or np.any(lam < 0.0) or np.any(lam > 0.5):
        raise DomainError("reject cost lambda must lie in [0, 1/2]")
    return lam


def _optimal_born(theta: ArrayLike, lam: ArrayLike) -> NDArray[np.float64]:
    theta = check_angles(theta, "theta")
    lam = _check_lambda(lam)
    return born_array(theta, optimal_angle(theta, lam))


def reject_probability(theta: ArrayLike, lam: ArrayLike) -> NDArray[np.float64]:
    """Vectorized ``Pr(R | theta, lam)`` at the optimal angle."""
    return _optimal_born(theta, lam)[..., 0, 0]


def error_probability(theta: ArrayLike, lam: ArrayLike) -> NDArray[np.float64]:
    """Vectorized ``Pr(E | theta, lam)`` at the optimal angle."""
    return _optimal_born(theta, lam)[..., 2, 0]


@dataclass(frozen=True)
class OutcomeProbabilities:
    theta: float
    lam: float
    p_correct: float
    p_error: float
    p_reject: float
    p_accept: float


def outcome_probabilities(theta: float, lam: float) -> OutcomeProbabilities:
    p = _optimal_born(theta, lam)
    # equal priors; symmetry makes both hypotheses contribute identically
    p_correct = 0.5 * (p[1, 0] + p[2, 1])
    p_error = 0.5 * (p[2, 0] + p[1, 1])
    p_reject = 0.5 * (p[0, 0] + p[0, 1])
    return OutcomeProbabilities(
        theta=float(theta),
        lam=float(lam),
        p_correct=float(p_correct),
        p_error=float(p_error),
        p_reject=float(p_reject),
        p_accept=float(p_correct + p_error),
    )


def chow_identity_risk(theta: float, lam: float) -> float:
    """Optimal risk as ``Pr(error) + lam * Pr(reject)``."""
    probs = outcome_probabilities(theta, lam)
    return probs.p_error + lam * probs.p_reject


def _smooth_grid(theta: float, lam: float, step: float) -> NDArray[np.float64]:
    """Uniform grid on ``[0, min(lam, threshold)]`` with spacing at most ``step``."""
    if not step > 0:
        raise ValueError("quadrature step must be positive")
    upper = min(float(lam), float(helstrom_threshold(theta)))
    if upper <= 0.0:
        return np.zeros(1)
    n = max(1, math.ceil(upper / step))
    return upper * np.arange(n + 1) / n


def risk_from_reject_integral(theta: float, lam: float, step: float = DEFAULT_STEP) -> float:
    """Optimal risk as the area under the reject curve, by composite trapezoid."""
    _check_lambda(lam)
    grid = _smooth_grid(theta, lam, step)
    if grid.size < 2:
        return 0.0
    # beyond the Helstrom threshold the reject probability is identically 0
    return float(np.trapezoid(reject_probability(theta, grid), grid))


def error_from_reject_integral(theta: float, lam: float, step: float = DEFAULT_STEP) -> float:
    """Error probability as ``-integral lam' (dPr(R)/dlam') dlam'``.

    The derivative is a finite difference over each cell, paired with the
    cell midpoint (midpoint rule). The reject curve is continuous at the
    Helstrom threshold and flat after it, so that range adds nothing.
    """
    _check_lambda(lam)
    grid = _smooth_grid(theta, lam, step)
    if grid.size < 2:
        return 0.0
    reject = reject_probability(theta, grid)
    widths = np.diff(grid)
    derivative = np.diff(reject) / widths
    midpoints = 0.5 * (grid[1:] + grid[:-1])
    return float(-np.sum(midpoints * derivative * widths))


@dataclass(frozen=True)
class TradeoffCurve:
    """Samples of ``(Pr(R), Pr(E))`` along increasing ``lambdas`` at fixed theta."""

    theta: float
    lambdas: NDArray[np.float64]
    p_reject: NDArray[np.float64]
    p_error: NDArray[np.float64]

    def slopes(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Finite-difference ``-dPr(E)/dPr(R)`` between adjacent samples.

        Returns ``(midpoint lambdas, slopes)``; the slope approximates the
        reject cost. Segments where ``Pr(R)`` does not change give NaN.
        """
        d_reject = np.diff(self.p_reject)
        d_error = np.diff(self.p_error)
        with np.errstate(divide="ignore", invalid="ignore"):
            slopes = np.where(d_reject != 0, -d_error / d_reject, np.nan)
        return 0.5 * (self.lambdas[1:] + self.lambdas[:-1]), slopes


def tradeoff_curve(theta: float, lambdas: ArrayLike) -> TradeoffCurve:
    lambdas = _check_lambda(lambdas).ravel()
    if np.any(np.diff(lambdas) < 0):
        raise DomainError("lambda grid must be non-decreasing")
    born = _optimal_born(theta, lambdas)
    return TradeoffCurve(
        theta=float(theta),
        lambdas=lambdas,
        p_reject=born[:, 0, 0].copy(),
        p_error=born[:, 2, 0].copy(),
    )


def lambda_from_reject_probability(
    theta: float,
    target: float,
    tol: float = BISECTION_TOL,
    max_iter: int = BISECTION_MAX_ITER,
) -> float:
    """Reject cost at which the optimal strategy rejects with probability ``target``.

    The reject curve decreases strictly from ``cos(theta)`` at ``lam = 0`` to
    0 at the Helstrom threshold, so bisection on that interval is exact up to
    ``tol``. ``target = 0`` maps to the threshold itself.

    Raises
    ------
    UnreachableError
        If ``target`` exceeds the maximal reject probability ``cos(theta)``.
    """
    check_angles(theta, "theta")
    if not target >= 0.0:
        raise DomainError("target reject probability must be nonnegative")
    ceiling = float(reject_probability(theta, 0.0))
    if target > max(ceiling, math.cos(theta)) + 1e-12:
        raise UnreachableError(
            f"reject probability {target} exceeds its maximum {ceiling} at theta={theta}"
        )
    if target >= ceiling:
        return 0.0
    lo, hi = 0.0, float(helstrom_threshold(theta))
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if reject_probability(theta, mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
