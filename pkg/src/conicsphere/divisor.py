"""Conic divisors, total-curvature defects, and the existence trichotomy.

A conic divisor records cone orders beta_i in (-1, 0) at marked points of the
4-sphere, optionally distinguishing the point at infinity.  Each cone point
subtracts a defect f(beta) from the smooth sphere's normalised total curvature
2; in dimension n = 2m the defect is

    f(beta) = 2^{2-n} sum_{k=0}^{m-1} binom(n-1, k) (2+beta)^k |beta|^{n-k-1},

which for n = 4 collapses to (beta^3 + 3 beta^2) / 2 and satisfies the
reflection identity f(beta) + f(-2-beta) = 2.

The classifier implements the purely numerical trichotomy: with
betatilde_j = (sum_{i != j} beta_i^3)^{1/3} (real cube root), compare

    (3/8) beta_j^2 (beta_j+2)^2
        vs (3/8) betatilde_j^2 (betatilde_j+2)^2
           + (betatilde_j + 3/2) (sum_{i != j} beta_i^2 - betatilde_j^2)

for every j; a strict ">" witness makes the divisor supercritical, equality
(within eps) makes it critical, otherwise it is subcritical.  The divisor is
treated symmetrically: the point at infinity enters as an ordinary entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConicDivisor",
    "Classification",
    "SUBCRITICAL",
    "CRITICAL",
    "SUPERCRITICAL",
    "defect",
    "gbc_total",
    "reflection_identity_gap",
    "beta_tilde",
    "classify",
    "football_invariant",
]

SUBCRITICAL = "subcritical"
CRITICAL = "critical"
SUPERCRITICAL = "supercritical"


@dataclass(frozen=True)
class ConicDivisor:
    """Ordered cone orders beta_i in (-1, 0); the last may sit at infinity."""

    betas: tuple
    includes_infinity: bool = False

    def __post_init__(self):
        betas = tuple(float(b) for b in self.betas)
        object.__setattr__(self, "betas", betas)
        for b in betas:
            if not (-1.0 < b < 0.0) or not math.isfinite(b):
                raise ValueError(f"cone order {b} outside (-1, 0)")
        if self.includes_infinity and not betas:
            raise ValueError("divisor marked at infinity must have an entry")

    def __len__(self):
        return len(self.betas)


@dataclass(frozen=True)
class Classification:
    """Outcome of the trichotomy at the witnessing index (1-based).

    ``witness_index`` is None for subcritical divisors; ``lhs`` and ``rhs``
    always hold the two sides of the comparison at the index maximising
    lhs - rhs.
    """

    kind: str
    witness_index: int | None
    lhs: float
    rhs: float


def _check_even_dimension(n: int) -> int:
    if not isinstance(n, (int,)) or n < 2 or n % 2 != 0:
        raise ValueError("dimension n must be an even integer >= 2")
    return n // 2


def _defect_sum(beta: float, n: int) -> float:
    # valid for beta in [-2, 0], where |beta| = -beta and 2 + beta >= 0
    m = _check_even_dimension(n)
    total = 0.0
    for k in range(m):
        total += math.comb(n - 1, k) * (2.0 + beta) ** k * (-beta) ** (n - k - 1)
    return total / 2.0 ** (n - 2)


def defect(beta: float, n: int = 4) -> float:
    """Total-curvature defect f(beta) of a cone point of order beta.

    Accepts beta in [-1, 0]; beta = -1 is the closed endpoint where the
    reflection identity is symmetric (f(-1) = 1).  Values below -1 are only
    reachable through the reflection identity, never directly.
    """
    beta = float(beta)
    if not (-1.0 <= beta <= 0.0):
        raise ValueError(f"cone order {beta} outside [-1, 0]")
    return _defect_sum(beta, n)


def gbc_total(d: ConicDivisor, n: int = 4) -> float:
    """Predicted normalised total curvature 2 - sum_i f(beta_i)."""
    _check_even_dimension(n)
    return 2.0 - sum(defect(b, n) for b in d.betas)


def reflection_identity_gap(beta: float, n: int = 4) -> float:
    """|f(beta) + f(-2 - beta) - 2|, evaluating the reflected side literally.

    The reflected argument -2 - beta lies in [-2, -1], where the general sum
    is still well defined with |(-2 - beta)| = 2 + beta; the gap is zero in
    exact arithmetic.
    """
    return abs(defect(beta, n) + _defect_sum(-2.0 - float(beta), n) - 2.0)


def beta_tilde(d: ConicDivisor, j: int) -> float:
    """Real cube root of sum_{i != j} beta_i^3 (1-based j; empty sum is 0).

    With a single remaining order b the cube root of b^3 is returned as b
    itself, which keeps the two sides of the trichotomy syntactically equal
    for two-point divisors with equal orders.
    """
    q = len(d)
    if not 1 <= j <= q:
        raise ValueError(f"index j={j} outside 1..{q}")
    rest = [b for i, b in enumerate(d.betas, start=1) if i != j]
    if not rest:
        return 0.0
    if len(rest) == 1:
        return rest[0]
    s = sum(b ** 3 for b in rest)
    # s < 0 always; the real cube root of a negative number is -|s|^(1/3)
    return float(np.cbrt(s))


def _threshold_sides(d: ConicDivisor, j: int) -> tuple[float, float]:
    bj = d.betas[j - 1]
    bt = beta_tilde(d, j)
    rest_sq = sum(b * b for i, b in enumerate(d.betas, start=1) if i != j)
    lhs = 0.375 * bj * bj * (bj + 2.0) ** 2
    rhs = 0.375 * bt * bt * (bt + 2.0) ** 2 + (bt + 1.5) * (rest_sq - bt * bt)
    return lhs, rhs


def classify(d: ConicDivisor, eps: float = 1e-9) -> Classification:
    """Subcritical / critical / supercritical trichotomy of a divisor.

    Supercritical if some index has lhs > rhs + eps; critical if no index
    exceeds eps but some index has |lhs - rhs| <= eps; subcritical otherwise.
    eps = 0 gives the exact comparison, which is attainable when the two
    sides are syntactically equal (equal cone orders).
    """
    if len(d) < 1:
        raise ValueError("classification needs at least one cone point")
    if eps < 0:
        raise ValueError("eps must be non-negative")
    best_j, best_lhs, best_rhs = 1, None, None
    for j in range(1, len(d) + 1):
        lhs, rhs = _threshold_sides(d, j)
        if best_lhs is None or lhs - rhs > best_lhs - best_rhs:
            best_j, best_lhs, best_rhs = j, lhs, rhs
    gap = best_lhs - best_rhs
    if gap > eps:
        return Classification(SUPERCRITICAL, best_j, best_lhs, best_rhs)
    if abs(gap) <= eps:
        return Classification(CRITICAL, best_j, best_lhs, best_rhs)
    return Classification(SUBCRITICAL, None, best_lhs, best_rhs)


def football_invariant(beta: float) -> float:
    """beta^2 (beta + 2)^2 / 4, the constant value of the monotone quantity
    along the radial solution with two cone points of order beta."""
    beta = float(beta)
    if not (-1.0 <= beta <= 0.0):
        raise ValueError(f"cone order {beta} outside [-1, 0]")
    return beta * beta * (beta + 2.0) ** 2 / 4.0
