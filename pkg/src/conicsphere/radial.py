"""Radial constant-curvature profiles in cylinder coordinates.

Writing e^{2u} g_E = e^{2h} (dt^2 + g_{S^3}) with t = ln r turns a radial
conformal factor u on R^4 minus the origin into h(t) = u + t.  For radial u
the Euclidean Schouten matrix has the eigenvalues

    radial:          -u'' + u'^2 / 2,
    tangential (x3): -u'/r - u'^2 / 2,

and with u' = (h' - 1)/r, u'' = (h'' - h' + 1)/r^2 these become

    tangential         = (1 - h'^2) / (2 r^2),
    radial + tangential = -h'' / r^2.

Hence sigma_2 = 3 * tangential * (radial + tangential), and requiring the
curvature of e^{2u} g_E to equal the round-sphere value 3/2, i.e.
sigma_2 = (3/2) e^{4(h - t)} in the flat normalisation, reduces to the
autonomous equation

    h'' (h'^2 - 1) = e^{4h}.

Multiplying by h' and integrating once yields the conserved first integral

    K = h'^4 - 2 h'^2 - e^{4h},

which is the backbone of every conservation and monotonicity check in this
package.  The round sphere is h = ln sech t with K = -1.  The two-cone
"football" of order beta in (-1, 0) is the even solution peaking at

    h(0) = (1/4) ln(2 a^2 - a^4),  h'(0) = 0,  a = 1 + beta,

so K = a^4 - 2 a^2 and the slopes tend to +-a; no shooting is needed because
the first integral fixes the peak height.  The measured slope at the ends
recovers the cone orders: h' -> a as t -> -inf gives order beta = a - 1 at
the origin, h' -> -a as t -> +inf gives order beta at infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import BPoly
from scipy.optimize import brentq

from .conformal import ConformalFactor

__all__ = [
    "RadialProfile",
    "AsymptoticData",
    "IntegrationError",
    "ProfileCsvError",
    "cylinder_rhs",
    "first_integral",
    "sphere_profile",
    "football_profile",
    "reconstruct_factor",
    "measured_asymptotics",
    "write_profile_csv",
    "read_profile_csv",
]

PROFILE_CSV_HEADER = "t,h,dh,K"


class IntegrationError(RuntimeError):
    """Raised when profile integration fails; carries the last good state."""

    def __init__(self, message: str, t_last: float, h_last: float, dh_last: float):
        super().__init__(message)
        self.t_last = t_last
        self.h_last = h_last
        self.dh_last = dh_last


class ProfileCsvError(ValueError):
    """Raised when a profile CSV does not parse or violates the invariants."""


def cylinder_rhs(h: float, dh: float) -> float:
    """h'' = e^{4h} / (h'^2 - 1), negative on the elliptic branch |h'| < 1."""
    if not abs(dh) < 1.0:
        raise ValueError(f"slope {dh} outside the elliptic range |h'| < 1")
    return math.exp(4.0 * h) / (dh * dh - 1.0)


def first_integral(h, dh):
    """Conserved quantity K = h'^4 - 2 h'^2 - e^{4h} (scalar or arrays)."""
    h = np.asarray(h, dtype=float)
    dh = np.asarray(dh, dtype=float)
    K = dh ** 4 - 2.0 * dh ** 2 - np.exp(4.0 * h)
    return float(K) if K.ndim == 0 else K


@dataclass
class RadialProfile:
    """Tabulated cylinder solution (t, h, h') with smooth interpolants.

    ``grid`` is strictly increasing; along solutions |h'| < 1, h is strictly
    concave and u = h - t strictly decreasing, so level sets of u are single
    round spheres.  The arrays are treated as immutable after construction.
    """

    grid: np.ndarray
    h: np.ndarray
    dh: np.ndarray
    beta: float
    t_max: float
    tol: float = 1e-10

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.h = np.asarray(self.h, dtype=float)
        self.dh = np.asarray(self.dh, dtype=float)
        if not (self.grid.ndim == 1 and self.grid.size >= 4):
            raise ValueError("profile grid needs at least 4 points")
        if self.h.shape != self.grid.shape or self.dh.shape != self.grid.shape:
            raise ValueError("grid, h, dh must have matching shapes")
        if not np.all(np.diff(self.grid) > 0):
            raise ValueError("grid must be strictly increasing")
        for name, arr in (("grid", self.grid), ("h", self.h), ("dh", self.dh)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")
        if not np.all(np.abs(self.dh) < 1.0):
            raise ValueError("profile violates the cone condition |h'| < 1")

    @cached_property
    def d2h(self) -> np.ndarray:
        return np.exp(4.0 * self.h) / (self.dh ** 2 - 1.0)

    @cached_property
    def d3h(self) -> np.ndarray:
        # differentiating h'' = e^{4h} / (h'^2 - 1) once more along solutions
        g = self.dh ** 2 - 1.0
        return 2.0 * self.dh * self.d2h * (2.0 * g - self.d2h) / g

    @cached_property
    def _h_poly(self) -> BPoly:
        # septic Hermite pieces from (h, h', h'', h''') at the nodes; the two
        # extra derivatives come from the cylinder equation and push the
        # between-node error of h' below the integrator's own error
        return BPoly.from_derivatives(
            self.grid, np.stack([self.h, self.dh, self.d2h, self.d3h], axis=1))

    @cached_property
    def _dh_poly(self) -> BPoly:
        return self._h_poly.derivative()

    @cached_property
    def _e4h_poly(self) -> BPoly:
        E = np.exp(4.0 * self.h)
        dE = 4.0 * self.dh * E
        d2E = (4.0 * self.d2h + 16.0 * self.dh ** 2) * E
        d3E = (4.0 * self.d3h + 48.0 * self.dh * self.d2h + 64.0 * self.dh ** 3) * E
        return BPoly.from_derivatives(self.grid, np.stack([E, dE, d2E, d3E], axis=1))

    @cached_property
    def _cum_e4h(self) -> BPoly:
        return self._e4h_poly.antiderivative()

    @cached_property
    def u_nodes(self) -> np.ndarray:
        return self.h - self.grid

    def h_of(self, t):
        return self._h_poly(t)

    def dh_of(self, t):
        return self._dh_poly(t)

    def d2h_of(self, t):
        return np.exp(4.0 * self._h_poly(t)) / (self._dh_poly(t) ** 2 - 1.0)

    def u_of(self, t):
        return self._h_poly(t) - t

    @property
    def u_range(self) -> tuple[float, float]:
        """(min, max) of u over the tabulated range; u decreases with t."""
        return float(self.u_nodes[-1]), float(self.u_nodes[0])

    def time_of_level(self, t_u: float) -> float:
        """Cylinder time where u = t_u, by bisection on the monotone u(t)."""
        u_min, u_max = self.u_range
        if not u_min <= t_u <= u_max:
            raise ValueError(f"level {t_u} outside the profile range [{u_min}, {u_max}]")
        # u_nodes is strictly decreasing: bracket with searchsorted, then refine
        idx = np.searchsorted(-self.u_nodes, -t_u)
        idx = min(max(idx, 1), self.grid.size - 1)
        lo, hi = self.grid[idx - 1], self.grid[idx]
        f_lo = self.u_of(lo) - t_u
        f_hi = self.u_of(hi) - t_u
        if f_lo == 0.0:
            return float(lo)
        if f_hi == 0.0:
            return float(hi)
        if f_lo < 0.0 or f_hi > 0.0:  # node rounding put t_u just outside the cell
            lo, hi = self.grid[0], self.grid[-1]
        return float(brentq(lambda s: self.u_of(s) - t_u, lo, hi, xtol=1e-13, rtol=1e-15))

    def resolvable_window(self, floor: float) -> tuple[float, float]:
        """Cylinder-time window where e^{4h} >= floor.

        Quantities that scale with e^{4h} (the curvature integrand, C, the
        key-estimate sides) drop below double-precision resolvability in the
        flat tails; measurements are meaningful inside this window.
        """
        ok = np.flatnonzero(np.exp(4.0 * self.h) >= floor)
        if ok.size < 2:
            raise ValueError(f"no grid window with e^(4h) >= {floor}")
        return float(self.grid[ok[0]]), float(self.grid[ok[-1]])

    def first_integral_values(self) -> np.ndarray:
        return first_integral(self.h, self.dh)

    def first_integral_drift(self) -> float:
        """Spread max K - min K over the grid; zero for exact solutions."""
        return float(np.ptp(self.first_integral_values()))

    def lower_tail_mass(self) -> float:
        """Analytic continuation of int e^{4h} dt over (-inf, grid start].

        In the tail e^{4h} decays like e^{4 |h'| (t - t0)} toward -inf, so the
        missing mass is e^{4 h} / (4 |h'|) at the end node, accurate to a
        relative O(e^{4h}) correction.
        """
        return math.exp(4.0 * self.h[0]) / (4.0 * abs(self.dh[0]))

    def upper_tail_mass(self) -> float:
        return math.exp(4.0 * self.h[-1]) / (4.0 * abs(self.dh[-1]))

    def weighted_volume_to(self, t: float) -> float:
        """int_{-inf}^{t} e^{4h(s)} ds including the analytic lower tail."""
        inc = float(self._cum_e4h(t) - self._cum_e4h(self.grid[0]))
        return inc + self.lower_tail_mass()

    def total_weighted_volume(self) -> float:
        return self.weighted_volume_to(float(self.grid[-1])) + self.upper_tail_mass()


@dataclass(frozen=True)
class AsymptoticData:
    """Measured end behaviour of a profile.

    ``beta_zero`` and ``beta_infinity`` are the cone orders read off the end
    slopes (slope - 1 at the origin end, -slope - 1 at the infinity end);
    ``mean_curvature_ratio`` is r * H for a level sphere near the origin end,
    with H measured from -div(grad u / |grad u|); ``decay_ok`` flags whether
    e^{4h} at both ends is below the requested truncation tolerance.
    """

    slope_minus: float
    slope_plus: float
    beta_zero: float
    beta_infinity: float
    mean_curvature_ratio: float
    decay_ok: bool


def sphere_profile(t_max: float = 15.0, step: float = 0.01) -> RadialProfile:
    """Round-sphere solution h = ln sech t, tabulated exactly."""
    if not (t_max > 0 and step > 0):
        raise ValueError("t_max and step must be positive")
    t = _symmetric_grid(t_max, step)
    h = np.log(2.0) - np.logaddexp(t, -t)  # ln sech t, overflow-safe
    dh = -np.tanh(t)
    return RadialProfile(t, h, dh, beta=0.0, t_max=float(t_max))


def _symmetric_grid(t_max: float, step: float) -> np.ndarray:
    n = max(int(round(t_max / step)), 2)
    half = np.linspace(0.0, t_max, n + 1)
    return np.concatenate([-half[::-1], half[1:]])


def _rhs(t, y):
    return (y[1], math.exp(4.0 * y[0]) / (y[1] * y[1] - 1.0))


# cap on the integrator step: keeps the dense-output values at the tabulation
# nodes at accepted-step accuracy (large steps make the interpolated output
# visibly noisier than the solution itself)
_MAX_STEP = 0.05


def _integrate_half(h0: float, t_end: float, tol: float, t_eval: np.ndarray,
                    guard: float) -> tuple[np.ndarray, np.ndarray]:
    def hit_guard(t, y):
        return abs(y[1]) - guard

    hit_guard.terminal = True
    sol = solve_ivp(_rhs, (0.0, t_end), (h0, 0.0), method="DOP853",
                    rtol=tol, atol=tol, t_eval=t_eval, events=hit_guard,
                    max_step=_MAX_STEP)
    if sol.status == 1:
        t_ev = float(sol.t_events[0][0])
        y_ev = sol.y_events[0][0]
        raise IntegrationError(
            f"slope reached the degeneracy guard |h'| = {guard} at t = {t_ev:.6g}",
            t_ev, float(y_ev[0]), float(y_ev[1]))
    if not sol.success:
        t_last = float(sol.t[-1]) if sol.t.size else 0.0
        h_last = float(sol.y[0][-1]) if sol.t.size else h0
        dh_last = float(sol.y[1][-1]) if sol.t.size else 0.0
        raise IntegrationError(f"integration failed: {sol.message}", t_last, h_last, dh_last)
    return sol.y[0], sol.y[1]


def football_profile(beta: float, t_max: float = 15.0, tol: float = 1e-10,
                     step: float = 0.01) -> RadialProfile:
    """Two-cone radial solution of order beta, integrated from the even peak.

    Accepts beta in (-1, 0]; beta = 0 is the round sphere, returned in closed
    form because the integrator cannot hold accuracy once |h'| enters the
    degenerate neighbourhood of 1 that the alpha = 1 tails require.  For
    beta < 0 both half-lines are integrated separately (DOP853, rtol = atol =
    tol) so the h(t) = h(-t) symmetry remains a measurable property rather
    than a construction artefact.  The degeneracy guard sits strictly between
    the limiting slope alpha = 1 + beta and 1, so it only trips on states
    violating the cone condition.
    """
    beta = float(beta)
    if not (-1.0 < beta <= 0.0):
        raise ValueError(f"cone order {beta} outside (-1, 0]")
    if not (t_max > 0 and tol > 0 and step > 0):
        raise ValueError("t_max, tol and step must be positive")
    if beta == 0.0:
        return sphere_profile(t_max, step)

    alpha = 1.0 + beta
    peak = 2.0 * alpha ** 2 - alpha ** 4
    h0 = 0.25 * math.log(peak)
    guard = 1.0 - min(1e-8, (1.0 - alpha) / 2.0)

    n = max(int(round(t_max / step)), 2)
    half = np.linspace(0.0, t_max, n + 1)
    h_plus, dh_plus = _integrate_half(h0, t_max, tol, half, guard)
    h_minus, dh_minus = _integrate_half(h0, -t_max, tol, -half, guard)

    t = np.concatenate([-half[::-1], half[1:]])
    h = np.concatenate([h_minus[::-1], h_plus[1:]])
    dh = np.concatenate([dh_minus[::-1], dh_plus[1:]])
    return RadialProfile(t, h, dh, beta=beta, t_max=float(t_max), tol=float(tol))


def reconstruct_factor(p: RadialProfile) -> ConformalFactor:
    """Conformal factor u(x) = h(ln |x|) - ln |x| with interpolant oracles.

    Values and gradients come from the quintic interpolation of (h, h'); the
    Hessian uses h'' supplied by the cylinder equation, so the oracles are of
    analytic quality on the annulus e^{-t_max} <= |x| <= e^{t_max}.  The
    origin is the (possible) cone point and is reported singular.
    """
    r_min = math.exp(float(p.grid[0]))
    r_max = math.exp(float(p.grid[-1]))

    def _radius_scalar(x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (4,):
            raise ValueError("expected a point of shape (4,)")
        r = float(np.linalg.norm(x))
        if r == 0.0:
            raise ValueError("factor is singular at the origin")
        if not r_min <= r <= r_max:
            raise ValueError(f"radius {r} outside the radial range [{r_min}, {r_max}]")
        return r

    def value(x):
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x, axis=-1)
        if np.any(r == 0.0) or np.any(r < r_min) or np.any(r > r_max):
            raise ValueError("point outside the radial range of the profile")
        t = np.log(r)
        return p.h_of(t) - t

    def gradient(x):
        x = np.asarray(x, dtype=float)
        r = _radius_scalar(x)
        du = (float(p.dh_of(math.log(r))) - 1.0) / r
        return du * x / r

    def hessian(x):
        x = np.asarray(x, dtype=float)
        r = _radius_scalar(x)
        t = math.log(r)
        dh = float(p.dh_of(t))
        d2h = cylinder_rhs(float(p.h_of(t)), dh)
        du = (dh - 1.0) / r
        d2u = (d2h - dh + 1.0) / (r * r)
        n = x / r
        P = np.eye(4) - np.outer(n, n)
        return d2u * np.outer(n, n) + (du / r) * P

    return ConformalFactor(value, gradient, hessian, singular_points=(np.zeros(4),))


def measured_asymptotics(p: RadialProfile, decay_tol: float = 1e-5) -> AsymptoticData:
    """End slopes, implied cone orders, and the level-sphere curvature ratio.

    The mean curvature is measured honestly: the unit field grad u / |grad u|
    of the reconstructed factor is numerically diverged at a probe point near
    the origin end, and r * H is returned (3 for round level spheres).
    """
    slope_minus = float(p.dh[0])
    slope_plus = float(p.dh[-1])
    decay_ok = bool(max(math.exp(4.0 * p.h[0]), math.exp(4.0 * p.h[-1])) < decay_tol)

    u = reconstruct_factor(p)
    r0 = math.exp(float(p.grid[0]) / 2.0)
    x0 = np.array([r0, 0.0, 0.0, 0.0])
    s = 1e-4 * r0

    def unit(y):
        g = u.gradient_at(y)
        return g / np.linalg.norm(g)

    div = 0.0
    for i in range(4):
        e = np.zeros(4)
        e[i] = s
        div += (unit(x0 + e)[i] - unit(x0 - e)[i]) / (2.0 * s)
    ratio = r0 * (-div)

    return AsymptoticData(
        slope_minus=slope_minus,
        slope_plus=slope_plus,
        beta_zero=slope_minus - 1.0,
        beta_infinity=-slope_plus - 1.0,
        mean_curvature_ratio=float(ratio),
        decay_ok=decay_ok,
    )


def write_profile_csv(path, p: RadialProfile) -> None:
    """Write the profile as ``t,h,dh,K`` rows, 17 significant digits."""
    from ._fmt import f17

    K = p.first_integral_values()
    lines = [PROFILE_CSV_HEADER]
    for i in range(p.grid.size):
        lines.append(",".join([f17(p.grid[i]), f17(p.h[i]), f17(p.dh[i]), f17(K[i])]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_profile_csv(path) -> RadialProfile:
    """Parse a ``t,h,dh,K`` CSV back into a profile.

    The nominal cone order is recovered from the measured slope at the origin
    end (beta = h'(t_min) - 1), which is exact up to the truncation error of
    the stored profile.
    """
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != PROFILE_CSV_HEADER:
        raise ProfileCsvError(f"expected header '{PROFILE_CSV_HEADER}'")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 4:
            raise ProfileCsvError(f"malformed row: {ln!r}")
        try:
            rows.append([float(v) for v in parts])
        except ValueError as exc:
            raise ProfileCsvError(f"malformed row: {ln!r}") from exc
    if len(rows) < 4:
        raise ProfileCsvError("profile needs at least 4 rows")
    data = np.array(rows)
    t, h, dh, K = data.T
    K_check = first_integral(h, dh)
    if np.max(np.abs(K - K_check)) > 1e-6 * (1.0 + np.max(np.abs(K_check))):
        raise ProfileCsvError("K column inconsistent with (h, dh) rows")
    beta = float(dh[0] - 1.0)
    try:
        return RadialProfile(t, h, dh, beta=beta, t_max=float(max(abs(t[0]), abs(t[-1]))))
    except ValueError as exc:
        raise ProfileCsvError(str(exc)) from exc
