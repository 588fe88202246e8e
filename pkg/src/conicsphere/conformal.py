"""Pointwise curvature of conformally flat metrics e^{2u} g_E on R^4.

For a conformal factor u the trace-adjusted Ricci tensor of e^{2u} g_E,
written in Euclidean coordinates, is

    A(u) = -Hess(u) + grad(u) x grad(u) - |grad(u)|^2 / 2 * I,

with all derivatives Euclidean.  The curvature sigma_k measured in the metric
itself is e^{-2ku} sigma_k(A(u)); on the round-sphere factor
u = ln(2 / (1 + |x|^2)) this equals binom(4, k) (1/2)^k for every k, which is
the normalisation every other module is checked against.

sigma_2(A(u)) also has a divergence form valid for arbitrary smooth u:

    sigma_2(A(u)) = -(1/2) d_i [ (-lap(u) d_ij + u_ij - u_i u_j) u_j ],

and ``divergence_residual`` measures how well a factor's oracles satisfy it,
differentiating the flux field numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .symfunc import sigma_k_matrix

__all__ = [
    "ConformalFactor",
    "FiniteDifferenceConfig",
    "constant_factor",
    "linear_factor",
    "round_sphere_factor",
    "polynomial_factor",
    "finite_difference_factor",
    "schouten_flat",
    "sigma_k_curvature",
    "divergence_residual",
]

_SCHEMES = ("central", "richardson")


@dataclass(frozen=True)
class FiniteDifferenceConfig:
    """Step size and scheme for the numerical differentiation helpers.

    scheme "central" is plain second-order central differencing; "richardson"
    adds one extrapolation level (combining steps h and h/2), which raises the
    order to four.
    """

    step: float = 1e-4
    scheme: str = "richardson"

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("finite-difference step must be positive")
        if self.scheme not in _SCHEMES:
            raise ValueError(f"scheme must be one of {_SCHEMES}")


@dataclass(frozen=True)
class ConformalFactor:
    """A conformal factor u with value, gradient and Hessian oracles.

    ``value_at`` maps a point of shape (4,) to a float; the factories in this
    package additionally accept batches of shape (n, 4).  ``gradient_at`` and
    ``hessian_at`` take a single point.  Oracles must be pure (safe for
    concurrent calls) and are undefined on ``singular_points``.
    """

    value_at: Callable[[np.ndarray], float]
    gradient_at: Callable[[np.ndarray], np.ndarray]
    hessian_at: Callable[[np.ndarray], np.ndarray]
    singular_points: tuple = field(default_factory=tuple)


def _point(x) -> np.ndarray:
    p = np.asarray(x, dtype=float)
    if p.shape != (4,):
        raise ValueError("expected a point of shape (4,)")
    return p


def _check_regular(u: ConformalFactor, x: np.ndarray) -> None:
    for p in u.singular_points:
        if np.array_equal(x, np.asarray(p, dtype=float)):
            raise ValueError(f"factor is singular at {x}")


def constant_factor(c: float) -> ConformalFactor:
    c = float(c)
    return ConformalFactor(
        value_at=lambda x: c * np.ones(np.shape(x)[:-1]) if np.ndim(x) > 1 else c,
        gradient_at=lambda x: np.zeros(4),
        hessian_at=lambda x: np.zeros((4, 4)),
    )


def linear_factor(a) -> ConformalFactor:
    a = np.asarray(a, dtype=float).reshape(4)
    return ConformalFactor(
        value_at=lambda x: np.asarray(x, dtype=float) @ a,
        gradient_at=lambda x: a.copy(),
        hessian_at=lambda x: np.zeros((4, 4)),
    )


def round_sphere_factor() -> ConformalFactor:
    """u = ln(2 / (1 + |x|^2)), the stereographic factor of the round sphere."""

    def value(x):
        x = np.asarray(x, dtype=float)
        return np.log(2.0) - np.log1p(np.sum(x * x, axis=-1))

    def gradient(x):
        x = _point(x)
        return -2.0 * x / (1.0 + x @ x)

    def hessian(x):
        x = _point(x)
        s = 1.0 + x @ x
        return -2.0 * np.eye(4) / s + 4.0 * np.outer(x, x) / (s * s)

    return ConformalFactor(value, gradient, hessian)


def polynomial_factor(terms: Sequence[tuple]) -> ConformalFactor:
    """Polynomial factor from (coefficient, (e0, e1, e2, e3)) monomial terms.

    Derivative oracles are exact, which makes these factors convenient probes
    for the divergence identity (only the outer divergence is then numerical).
    Exponent tables for the first two derivatives are precomputed so repeated
    oracle calls stay cheap.
    """
    coeffs = np.array([float(c) for c, _ in terms])
    exps = np.array([e for _, e in terms], dtype=int)
    if exps.ndim != 2 or exps.shape[1] != 4 or np.any(exps < 0):
        raise ValueError("each term needs four non-negative integer exponents")

    grad_coeffs = np.empty((4,) + coeffs.shape)
    grad_exps = np.empty((4,) + exps.shape, dtype=int)
    hess_coeffs = np.empty((4, 4) + coeffs.shape)
    hess_exps = np.empty((4, 4) + exps.shape, dtype=int)
    for i in range(4):
        grad_coeffs[i] = coeffs * exps[:, i]
        ei = exps.copy()
        ei[:, i] = np.maximum(ei[:, i] - 1, 0)
        grad_exps[i] = ei
        for j in range(4):
            hess_coeffs[i, j] = grad_coeffs[i] * ei[:, j]
            eij = ei.copy()
            eij[:, j] = np.maximum(eij[:, j] - 1, 0)
            hess_exps[i, j] = eij

    def value(x):
        x = np.asarray(x, dtype=float)
        return np.prod(x[..., None, :] ** exps, axis=-1) @ coeffs

    def gradient(x):
        x = _point(x)
        return np.sum(grad_coeffs * np.prod(x ** grad_exps, axis=-1), axis=-1)

    def hessian(x):
        x = _point(x)
        H = np.sum(hess_coeffs * np.prod(x ** hess_exps, axis=-1), axis=-1)
        return (H + H.T) / 2.0

    return ConformalFactor(value, gradient, hessian)


def finite_difference_factor(f: Callable, cfg: FiniteDifferenceConfig | None = None,
                             singular_points: tuple = ()) -> ConformalFactor:
    """Wrap a scalar oracle f with central-difference gradient and Hessian.

    The Hessian is symmetrised by averaging.  With the "richardson" scheme
    both oracles combine steps h and h/2 for fourth-order accuracy.
    """
    cfg = cfg or FiniteDifferenceConfig()

    def grad_step(x, s):
        g = np.zeros(4)
        for i in range(4):
            e = np.zeros(4)
            e[i] = s
            g[i] = (f(x + e) - f(x - e)) / (2.0 * s)
        return g

    def hess_step(x, s):
        H = np.zeros((4, 4))
        f0 = f(x)
        for i in range(4):
            ei = np.zeros(4)
            ei[i] = s
            H[i, i] = (f(x + ei) - 2.0 * f0 + f(x - ei)) / (s * s)
            for j in range(i + 1, 4):
                ej = np.zeros(4)
                ej[j] = s
                H[i, j] = H[j, i] = (
                    f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)
                ) / (4.0 * s * s)
        return H

    def gradient(x):
        x = _point(x)
        if cfg.scheme == "central":
            return grad_step(x, cfg.step)
        return (4.0 * grad_step(x, cfg.step / 2.0) - grad_step(x, cfg.step)) / 3.0

    def hessian(x):
        x = _point(x)
        if cfg.scheme == "central":
            H = hess_step(x, cfg.step)
        else:
            H = (4.0 * hess_step(x, cfg.step / 2.0) - hess_step(x, cfg.step)) / 3.0
        return (H + H.T) / 2.0

    return ConformalFactor(f, gradient, hessian, tuple(singular_points))


def schouten_flat(u: ConformalFactor, x) -> np.ndarray:
    """4x4 matrix of A(u) at x in Euclidean coordinates (no e^{-2u} weight)."""
    x = _point(x)
    _check_regular(u, x)
    g = np.asarray(u.gradient_at(x), dtype=float).reshape(4)
    H = np.asarray(u.hessian_at(x), dtype=float).reshape(4, 4)
    H = (H + H.T) / 2.0
    A = -H + np.outer(g, g) - 0.5 * (g @ g) * np.eye(4)
    return (A + A.T) / 2.0


def sigma_k_curvature(u: ConformalFactor, x, k: int) -> float:
    """sigma_k of the Schouten eigenvalues measured in the metric e^{2u} g_E.

    Returns e^{-2ku(x)} sigma_k(A(u)(x)); on the round-sphere factor this is
    binom(4, k) 2^{-k} for k = 1..4 at every point.
    """
    if not 1 <= k <= 4:
        raise ValueError("curvature order k must be 1..4")
    x = _point(x)
    A = schouten_flat(u, x)
    return float(np.exp(-2.0 * k * float(u.value_at(x))) * sigma_k_matrix(A, k))


def _flux(u: ConformalFactor, y: np.ndarray) -> np.ndarray:
    # (-lap(u) I + Hess(u) - grad x grad) @ grad, the field whose divergence
    # gives -2 sigma_2(A(u))
    g = np.asarray(u.gradient_at(y), dtype=float).reshape(4)
    H = np.asarray(u.hessian_at(y), dtype=float).reshape(4, 4)
    return -np.trace(H) * g + H @ g - (g @ g) * g


def _flux_divergence(u: ConformalFactor, x: np.ndarray, s: float) -> float:
    total = 0.0
    for i in range(4):
        e = np.zeros(4)
        e[i] = s
        total += (_flux(u, x + e)[i] - _flux(u, x - e)[i]) / (2.0 * s)
    return total


def divergence_residual(u: ConformalFactor, x, cfg: FiniteDifferenceConfig | None = None) -> float:
    """|sigma_2(A(u)) + (1/2) div flux| at x, the divergence-form defect.

    The identity holds for every smooth u, not only solutions of the constant
    curvature equation, so the residual is pure differentiation error.  When
    cfg is omitted the step is 1e-4 * (1 + |x|) with one Richardson level,
    which balances truncation against cancellation for the third derivatives
    implicit in the outer differencing.
    """
    x = _point(x)
    _check_regular(u, x)
    if cfg is None:
        cfg = FiniteDifferenceConfig(step=1e-4 * (1.0 + float(np.linalg.norm(x))))
    s2 = sigma_k_matrix(schouten_flat(u, x), 2)
    if cfg.scheme == "central":
        div = _flux_divergence(u, x, cfg.step)
    else:
        div = (4.0 * _flux_divergence(u, x, cfg.step / 2.0)
               - _flux_divergence(u, x, cfg.step)) / 3.0
    return abs(s2 + 0.5 * div)
