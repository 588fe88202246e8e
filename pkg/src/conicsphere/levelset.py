"""Level-set quantities of radial profiles and their identities.

For a conformal factor u with superlevel sets S(t) = {u >= t} and level sets
L(t) = {u = t}, all normalised by the unit 3-sphere volume |S_3|:

    A(t) = avg_{S(t)} e^{4u}    (weighted volume)
    B(t) = avg_{S(t)} 1
    C(t) = e^{4t} B(t)
    Sigma0(t) = avg_{L(t)} |grad u|^3,        z = -Sigma0^{1/3}
    Sigma1(t) = avg_{L(t)} (2 H |grad u|^2 - 3 |grad u|^3)
    D(t) = (Sigma0 + Sigma1) / 4
    M(t) = (2/3) D + (4/9) D z + z^4 / 36 - C

with H = -div(grad u / |grad u|) the mean curvature of the level set, which
is +3/r on round spheres when u decreases outward.

Radial closed forms
-------------------
Along a radial profile, u = h(t) - t is strictly decreasing, so each level is
a single round sphere of radius r = e^{t*} at the cylinder time t* where
u(t*) equals the level.  With w = 1 - h'(t*), |grad u| = w / r and

    Sigma0 = w^3,   Sigma1 = 6 w^2 - 3 w^3,   D = (3 w^2 - w^3) / 2,
    z = -w,         B = r^4 / 4,              C = e^{4h} / 4,
    A = int_{-inf}^{t*} e^{4 h(s)} ds.

Substituting into M and simplifying,

    M = w^2 - w^3 + w^4 / 4 - e^{4h} / 4,

and since h'^2 - 1 = w (w - 2) gives (h'^2 - 1)^2 = w^4 - 4 w^3 + 4 w^2,

    (K + 1) / 4 = ((h'^2 - 1)^2 - e^{4h}) / 4 = M,

with K = h'^4 - 2 h'^2 - e^{4h} the conserved first integral.  M is therefore
exactly constant along radial solutions; at the origin-end limit, where
w -> |beta| and e^{4h} -> 0, its value is beta^2 (beta + 2)^2 / 4.

The module verifies, numerically and without assuming them, the identities
C' = A' + 4C and A = (2/3) (D - D_origin_limit), the end limits of D, z, C,
and the sharp form of the key estimate

    z' * avg_{L} sigma_1(Atilde) |grad u| * (z A')^2 >= (3/2) (4 C)^3,

where sigma_1(Atilde) = H |grad u| - (3/2) |grad u|^2 is the trace of the
tangential block of the Schouten matrix; along radial profiles the ratio of
the two sides is exactly 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ._fmt import f17
from .conformal import ConformalFactor
from .radial import RadialProfile
from .symfunc import sphere_volume

__all__ = [
    "LevelSetSummary",
    "RelationReport",
    "MonteCarloEstimate",
    "summary_at",
    "default_grid",
    "relation_report",
    "limit_errors",
    "key_inequality_ratio",
    "key_ratio_window",
    "gbc_from_profile",
    "montecarlo_volume_check",
    "d_limit_origin",
    "d_limit_infinity",
    "write_summary_csv",
    "SUMMARY_CSV_HEADER",
]

SUMMARY_CSV_HEADER = "t_u,A,B,C,D,z,M"

# step for the central differences in the level value; Richardson-extrapolated
# derivatives combine this step with its half
DERIVATIVE_STEP = 2e-3


@dataclass(frozen=True)
class LevelSetSummary:
    """One row of level-set data at level value t_u."""

    t_u: float
    A: float
    B: float
    C: float
    Sigma0: float
    Sigma1: float
    D: float
    z: float
    M: float


@dataclass(frozen=True)
class RelationReport:
    """Measured deviations from the level-set identities along a profile.

    ``limit_errors`` holds the end-behaviour deviations: z_end / D_end at the
    origin end against the cone order, z_start against -(2 + beta) at the
    infinity end, and the raw C values at both ends (their limits are 0).
    """

    max_abs_CA: float
    max_abs_AD: float
    min_M_slope: float
    M_spread: float
    limit_errors: dict


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Seeded Monte-Carlo estimates of A and B with standard errors."""

    A_est: float
    A_se: float
    B_est: float
    B_se: float
    n_samples: int
    seed: int


def d_limit_origin(beta: float) -> float:
    """Limit of D as the level approaches the cone point at the origin:
    (3/2) beta^2 - |beta|^3 / 2."""
    return 1.5 * beta * beta - abs(beta) ** 3 / 2.0


def d_limit_infinity(beta: float) -> float:
    """Limit of D as the level runs to the cone point at infinity:
    (3/2) (2 + beta)^2 - (2 + beta)^3 / 2."""
    w = 2.0 + beta
    return 1.5 * w * w - w ** 3 / 2.0


def summary_at(p: RadialProfile, t_u: float) -> LevelSetSummary:
    """Closed-form level-set summary of a radial profile at level t_u."""
    t_star = p.time_of_level(t_u)
    w = 1.0 - float(p.dh_of(t_star))
    e4h = math.exp(4.0 * float(p.h_of(t_star)))
    r = math.exp(t_star)

    sigma0 = w ** 3
    sigma1 = 6.0 * w * w - 3.0 * w ** 3
    D = 0.25 * (sigma0 + sigma1)
    z = -w
    B = r ** 4 / 4.0
    C = e4h / 4.0
    A = p.weighted_volume_to(t_star)
    M = (2.0 / 3.0) * D + (4.0 / 9.0) * D * z + z ** 4 / 36.0 - C
    return LevelSetSummary(t_u=float(t_u), A=A, B=B, C=C,
                           Sigma0=sigma0, Sigma1=sigma1, D=D, z=z, M=M)


def default_grid(p: RadialProfile, n: int = 400, floor: float = 1e-14,
                 margin: float = 0.01) -> np.ndarray:
    """Uniform grid of level values avoiding the flat tails.

    The grid spans the u-range restricted to cylinder times where
    e^{4h} >= floor, shrunk by ``margin`` at both ends so that the
    differencing stencils stay in range.
    """
    if n < 10:
        raise ValueError("grid needs at least 10 points")
    t_lo, t_hi = p.resolvable_window(floor)
    u_hi = float(p.u_of(t_lo)) - margin
    u_lo = float(p.u_of(t_hi)) + margin
    if not u_lo < u_hi:
        raise ValueError("profile interior too narrow for a grid")
    return np.linspace(u_lo, u_hi, n)


def _richardson(fn: Callable[[float], float], x: float, step: float) -> float:
    def central(s):
        return (fn(x + s) - fn(x - s)) / (2.0 * s)

    return (4.0 * central(step / 2.0) - central(step)) / 3.0


class _StencilDerivatives:
    """Richardson derivatives of several summary fields from one shared
    four-point stencil around t_u."""

    def __init__(self, p: RadialProfile, t_u: float, step: float = DERIVATIVE_STEP):
        self._step = step
        self._outer = (summary_at(p, t_u + step), summary_at(p, t_u - step))
        self._inner = (summary_at(p, t_u + step / 2.0), summary_at(p, t_u - step / 2.0))

    def d(self, attr: str) -> float:
        coarse = (getattr(self._outer[0], attr) - getattr(self._outer[1], attr)) \
            / (2.0 * self._step)
        fine = (getattr(self._inner[0], attr) - getattr(self._inner[1], attr)) \
            / self._step
        return (4.0 * fine - coarse) / 3.0


def relation_report(p: RadialProfile, grid: Sequence[float]) -> RelationReport:
    """Check C' = A' + 4C, A = (2/3)(D - D_limit), and M monotonicity.

    Derivatives in the level value use Richardson-extrapolated central
    differences with step ``DERIVATIVE_STEP``; the analytic origin-end limit
    of D (from the profile's nominal cone order) anchors the A relation, and
    the end limits are read off the raw profile ends.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 10:
        raise ValueError("relation report needs at least 10 grid points")

    d_plus = d_limit_origin(p.beta)
    max_ca = 0.0
    max_ad = 0.0
    min_slope = math.inf
    M_values = np.empty(grid.size)
    for i, t_u in enumerate(grid):
        s0 = summary_at(p, float(t_u))
        stencil = _StencilDerivatives(p, float(t_u))
        max_ca = max(max_ca, abs(stencil.d("C") - stencil.d("A") - 4.0 * s0.C))
        max_ad = max(max_ad, abs(s0.A - (2.0 / 3.0) * (s0.D - d_plus)))
        min_slope = min(min_slope, stencil.d("M"))
        M_values[i] = s0.M

    return RelationReport(max_abs_CA=max_ca, max_abs_AD=max_ad,
                          min_M_slope=float(min_slope),
                          M_spread=float(np.ptp(M_values)),
                          limit_errors=limit_errors(p))


def limit_errors(p: RadialProfile) -> dict:
    """End-behaviour deviations read off the raw profile ends.

    Toward the origin end z tends to the cone order beta and D to the defect
    value (3/2) beta^2 - |beta|^3 / 2; toward infinity z tends to -(2 + beta);
    C tends to 0 at both ends (the raw end values are reported).
    """
    w_origin = 1.0 - float(p.dh[0])
    w_infinity = 1.0 - float(p.dh[-1])
    d_origin = 1.5 * w_origin ** 2 - w_origin ** 3 / 2.0
    return {
        "z_end": abs(-w_origin - p.beta),
        "z_start": abs(-w_infinity + 2.0 + p.beta),
        "D_end": abs(d_origin - d_limit_origin(p.beta)),
        "C_end": math.exp(4.0 * float(p.h[0])) / 4.0,
        "C_start": math.exp(4.0 * float(p.h[-1])) / 4.0,
    }


def key_ratio_window(p: RadialProfile, floor: float = 3e-3) -> tuple[float, float]:
    """Level-value window where the key-estimate ratio is numerically clean.

    Outside e^{4h} >= floor the right-hand side (4C)^3 underflows relative to
    the differencing noise of z' and A', so ratios there are diagnostic only.
    """
    t_lo, t_hi = p.resolvable_window(floor)
    u_hi = float(p.u_of(t_lo)) - 2.0 * DERIVATIVE_STEP
    u_lo = float(p.u_of(t_hi)) + 2.0 * DERIVATIVE_STEP
    return u_lo, u_hi


def key_inequality_ratio(p: RadialProfile, t_u: float) -> float:
    """Ratio of the two sides of the sharp estimate

        z' * avg_L sigma_1(Atilde)|grad u| * (z A')^2  vs  (3/2) (4C)^3,

    with z' and A' measured by Richardson central differences.  Exactly 1
    along radial solutions; returns inf when the right-hand side underflows
    to zero (diagnostic regime near the range ends).
    """
    s0 = summary_at(p, float(t_u))
    t_star = p.time_of_level(float(t_u))
    r = math.exp(t_star)
    w = -s0.z
    # sigma_1 of the tangential Schouten block on a level sphere:
    # H |grad u| - (3/2)|grad u|^2 with H = 3/r and |grad u| = w/r, averaged
    # against |grad u| over the sphere (area r^3 in the |S_3| normalisation)
    grad = w / r
    sigma1_block = (3.0 / r) * grad - 1.5 * grad * grad
    flux = sigma1_block * grad * r ** 3

    stencil = _StencilDerivatives(p, float(t_u))
    lhs = stencil.d("z") * flux * (s0.z * stencil.d("A")) ** 2
    rhs = 1.5 * (4.0 * s0.C) ** 3
    if rhs == 0.0:
        return math.inf
    return lhs / rhs


def gbc_from_profile(p: RadialProfile) -> float:
    """Normalised total curvature (3/2) int e^{4h} dt over the whole line.

    The volume element reduction: the curvature integrand sigma_2 measured in
    the metric times its volume element equals (3/2) e^{4u} times Euclidean
    volume, and radially int e^{4u} rho^3 drho = int e^{4h} dt.  Beyond the
    tabulated range the analytic tail masses are added, so the result matches
    2 - sum of cone defects to quadrature accuracy.
    """
    return 1.5 * p.total_weighted_volume()


def montecarlo_volume_check(u: ConformalFactor, t_u: float, seed: int,
                            n_samples: int, box_halfwidth: float) -> MonteCarloEstimate:
    """Dimension-blind Monte-Carlo estimates of A(t_u) and B(t_u).

    Samples uniformly in the box [-R, R]^4 (counter-based Philox stream, so
    results are reproducible per seed regardless of execution order) and
    averages e^{4u} and 1 over the superlevel set {u >= t_u}.  Raises if the
    region evidently reaches the box boundary.
    """
    if n_samples < 10 ** 4:
        raise ValueError("need at least 1e4 samples")
    R = float(box_halfwidth)
    if not R > 0:
        raise ValueError("box halfwidth must be positive")
    for i in range(4):
        for sign in (-1.0, 1.0):
            probe = np.zeros(4)
            probe[i] = sign * R
            if float(u.value_at(probe)) >= t_u:
                raise ValueError("superlevel set reaches the sampling box boundary")

    rng = np.random.Generator(np.random.Philox(seed))
    pts = rng.uniform(-R, R, size=(int(n_samples), 4))
    vals = np.asarray(u.value_at(pts), dtype=float)
    inside = vals >= t_u
    if np.any(inside & (np.max(np.abs(pts), axis=1) > 0.99 * R)):
        raise ValueError("superlevel set reaches the sampling box boundary")

    scale = (2.0 * R) ** 4 / sphere_volume(3)
    n = float(n_samples)
    b_sample = inside.astype(float)
    a_sample = np.exp(np.where(inside, 4.0 * vals, -np.inf))
    return MonteCarloEstimate(
        A_est=float(scale * a_sample.mean()),
        A_se=float(scale * a_sample.std(ddof=1) / math.sqrt(n)),
        B_est=float(scale * b_sample.mean()),
        B_se=float(scale * b_sample.std(ddof=1) / math.sqrt(n)),
        n_samples=int(n_samples),
        seed=int(seed),
    )


def write_summary_csv(path, summaries: Sequence[LevelSetSummary]) -> None:
    """Write ``t_u,A,B,C,D,z,M`` rows at 17 significant digits."""
    lines = [SUMMARY_CSV_HEADER]
    for s in summaries:
        lines.append(",".join(f17(v) for v in (s.t_u, s.A, s.B, s.C, s.D, s.z, s.M)))
    Path(path).write_text("\n".join(lines) + "\n")
