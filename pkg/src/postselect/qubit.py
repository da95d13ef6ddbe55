"""Symmetric pure-state pair and the three-outcome measurement family.

The two states are

    |psi_1> = cos(theta/2)|0> + sin(theta/2)|1>
    |psi_2> = cos(theta/2)|0> - sin(theta/2)|1>

with overlap ``cos(theta)``, and the measurement family indexed by an angle
``phi`` in ``[0, pi/2]`` is, writing ``t = tan(phi/2)``,

    E_0 = [[1 - t^2, 0], [0, 0]]
    E_1 = 1/2 [[t^2,  t], [ t, 1]]
    E_2 = 1/2 [[t^2, -t], [-t, 1]]

``phi = pi/2`` is the Helstrom (minimum-error) measurement and
``phi = theta`` the unambiguous discrimination measurement. Everything is
real; no complex arithmetic is needed. The quantum layer assumes equal
priors throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .decision import LikelihoodTable, Prior
from .errors import DomainError

HALF_PI = math.pi / 2

#: Tolerance used for symmetry, completeness and positivity checks.
MATRIX_TOL = 1e-12

UNIFORM_PRIOR = Prior.uniform(2)


def _check_angle(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 <= value <= HALF_PI:
        raise DomainError(f"{name} must lie in [0, pi/2], got {value!r}")
    return value


def check_angles(values: ArrayLike, name: str) -> NDArray[np.float64]:
    """Vectorized domain check for angles in ``[0, pi/2]``."""
    arr = np.asarray(values, dtype=np.float64)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > HALF_PI):
        raise DomainError(f"{name} must lie in [0, pi/2]")
    return arr


def half_tan(phi: ArrayLike) -> NDArray[np.float64]:
    """``tan(phi/2)``, pinned to exactly 1 at ``phi = pi/2``."""
    phi = np.asarray(phi, dtype=np.float64)
    return np.where(phi == HALF_PI, 1.0, np.tan(phi / 2))


def is_symmetric(m: NDArray[np.float64], tol: float = MATRIX_TOL) -> bool:
    return m.shape == (2, 2) and abs(m[0, 1] - m[1, 0]) <= tol


def eigvalsh2(m: NDArray[np.float64]) -> tuple[float, float]:
    """Eigenvalues of a real symmetric 2x2 matrix, ascending, in closed form."""
    a, b, d = float(m[0, 0]), float(m[0, 1]), float(m[1, 1])
    mean = 0.5 * (a + d)
    radius = math.hypot(0.5 * (a - d), b)
    return mean - radius, mean + radius


@dataclass(frozen=True)
class StatePair:
    """The states ``|psi_1>``, ``|psi_2>`` separated by angle ``theta``."""

    theta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", _check_angle(self.theta, "theta"))

    def vectors(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        c, s = math.cos(self.theta / 2), math.sin(self.theta / 2)
        return np.array([c, s]), np.array([c, -s])

    def overlap(self) -> float:
        psi1, psi2 = self.vectors()
        return abs(float(psi2 @ psi1))


@dataclass(frozen=True)
class Povm:
    """Member ``phi`` of the three-outcome measurement family.

    Raises :class:`DomainError` for ``phi`` outside ``[0, pi/2]``; beyond
    ``pi/2`` the reject element has a negative eigenvalue.
    """

    phi: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "phi", _check_angle(self.phi, "phi"))

    def elements(self) -> tuple[NDArray[np.float64], ...]:
        """``(E_0, E_1, E_2)`` as 2x2 arrays."""
        return tuple(povm_elements(self.phi))

    def min_eigenvalues(self) -> tuple[float, float, float]:
        return tuple(eigvalsh2(e)[0] for e in self.elements())

    def is_complete(self, tol: float = MATRIX_TOL) -> bool:
        return bool(np.all(np.abs(sum(self.elements()) - np.eye(2)) <= tol))

    def is_positive(self, tol: float = MATRIX_TOL) -> bool:
        return min(self.min_eigenvalues()) >= -tol


def povm_elements(phi: ArrayLike) -> NDArray[np.float64]:
    """Elements of the family, shape ``phi.shape + (3, 2, 2)``.

    No domain check: callers outside this module go through :func:`build_povm`.
    """
    t = half_tan(phi)
    out = np.zeros(t.shape + (3, 2, 2))
    out[..., 0, 0, 0] = 1.0 - t * t
    for k, sign in ((1, 1.0), (2, -1.0)):
        out[..., k, 0, 0] = 0.5 * t * t
        out[..., k, 0, 1] = out[..., k, 1, 0] = sign * 0.5 * t
        out[..., k, 1, 1] = 0.5
    return out


def build_povm(phi: float) -> Povm:
    return Povm(phi)


def helstrom_povm() -> Povm:
    return Povm(HALF_PI)


def usd_povm(states: StatePair) -> Povm:
    return Povm(states.theta)


@dataclass(frozen=True)
class BornTable:
    """``probs[D, i - 1] = Pr(E_D | H_i, phi)`` for ``D = 0, 1, 2`` and ``i = 1, 2``."""

    theta: float
    phi: float
    probs: NDArray[np.float64]

    def __post_init__(self) -> None:
        probs = np.array(self.probs, dtype=np.float64)
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def likelihood(self) -> LikelihoodTable:
        return LikelihoodTable(self.probs)

    @property
    def p_reject(self) -> float:
        """``Pr(E_0 | H_i)``, equal for both hypotheses."""
        return float(self.probs[0, 0])

    @property
    def p_correct(self) -> float:
        """``Pr(E_1 | H_1) = Pr(E_2 | H_2)``."""
        return float(self.probs[1, 0])

    @property
    def p_error(self) -> float:
        """``Pr(E_2 | H_1) = Pr(E_1 | H_2)``."""
        return float(self.probs[2, 0])

    def symmetry_residual(self) -> float:
        """Largest violation of the equal-prior symmetry relations."""
        p = self.probs
        outcome_1 = 0.5 * (p[1, 0] + p[1, 1])
        outcome_2 = 0.5 * (p[2, 0] + p[2, 1])
        return float(
            max(
                abs(outcome_1 - outcome_2),
                abs(p[1, 0] - p[2, 1]),
                abs(p[1, 1] - p[2, 0]),
                abs(p[0, 0] - p[0, 1]),
            )
        )


def born_array(theta: ArrayLike, phi: ArrayLike) -> NDArray[np.float64]:
    """Vectorized Born probabilities, shape ``broadcast(theta, phi) + (3, 2)``.

    Computed as ``<psi_i| E_D |psi_i>`` from the explicit matrices, clipped
    to ``[0, 1]`` to remove rounding residue of order 1e-17.
    """
    theta, phi = np.broadcast_arrays(
        np.asarray(theta, dtype=np.float64), np.asarray(phi, dtype=np.float64)
    )
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    psi = np.stack([np.stack([c, s], -1), np.stack([c, -s], -1)], -2)  # (..., i, 2)
    elems = povm_elements(phi)  # (..., D, 2, 2)
    probs = np.einsum("...ia,...dab,...ib->...di", psi, elems, psi)
    return np.clip(probs, 0.0, 1.0)


def born_probabilities(states: StatePair, povm: Povm) -> BornTable:
    return BornTable(states.theta, povm.phi, born_array(states.theta, povm.phi))


def reject_probability_closed_form(theta: ArrayLike, phi: ArrayLike) -> NDArray[np.float64]:
    """``Pr(E_0 | H_i) = cos^2(theta/2) (1 - tan^2(phi/2))``."""
    theta = np.asarray(theta, dtype=np.float64)
    return np.cos(theta / 2) ** 2 * (1.0 - half_tan(phi) ** 2)
