"""Asymptotic behavior of the thresholded test under a local trend.

Everything here is analytic: the density of a pairwise error difference,
the exceedance moments as integrals against a supplied error density,
the drift of the standardized score under a trend that shrinks like
n^(-3/2), and the resulting power curve as a function of the threshold.
The point of the machinery is the tradeoff it exposes: a moderate
threshold can raise power above the classical d = 0 test, while an
oversized one destroys it.

Normal and uniform densities use closed forms wherever they exist
(difference density, single-comparator probabilities, and for the
uniform all four moments); only the normal triple-comparator moments
fall back to adaptive quadrature on the infinite domain. Tabulated
densities are handled with trapezoid sums on a refined grid, which
limits their accuracy to roughly the grid resolution.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import ndtri

from .errors import AnalyticUnavailable, DegenerateRegime, InputError, QuadratureError
from .variance import MomentSet

_SQRT2 = math.sqrt(2.0)
_SQRT_PI = math.sqrt(math.pi)

#: normalization tolerance for tabulated densities
NORMALIZATION_TOL = 1e-8
#: drift denominators at or below this are treated as fully tied
DENOM_FLOOR = 1e-15


def _phi(x: float) -> float:
    """Standard normal CDF via erfc (accurate into the far tail)."""
    return 0.5 * math.erfc(-x / _SQRT2)


# ── error densities ─────────────────────────────────────────────────────


@dataclass(frozen=True)
class ErrorDensity:
    """An error distribution the power machinery can integrate against.

    Parameters
    ----------
    kind : str
        "normal", "uniform", or "tabulated".
    sigma : float, optional
        Standard deviation (normal kind).
    lower, upper : float, optional
        Support endpoints (uniform kind), lower < upper.
    grid_x, grid_f : ndarray, optional
        Sample points and density values (tabulated kind); nonnegative,
        integrating to 1 within 1e-8 by the trapezoid rule.

    Use the classmethods rather than filling fields by hand.
    """

    kind: str
    sigma: float | None = None
    lower: float | None = None
    upper: float | None = None
    grid_x: np.ndarray | None = None
    grid_f: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == "normal":
            if self.sigma is None or not np.isfinite(self.sigma) or self.sigma <= 0:
                raise InputError(f"normal density needs sigma > 0, got {self.sigma!r}")
        elif self.kind == "uniform":
            if (
                self.lower is None
                or self.upper is None
                or not np.isfinite(self.lower)
                or not np.isfinite(self.upper)
                or not self.lower < self.upper
            ):
                raise InputError(
                    f"uniform density needs lower < upper, got "
                    f"({self.lower!r}, {self.upper!r})"
                )
        elif self.kind == "tabulated":
            x = np.asarray(self.grid_x, dtype=float)
            f = np.asarray(self.grid_f, dtype=float)
            if x.ndim != 1 or x.shape != f.shape or len(x) < 3:
                raise InputError("tabulated density needs matching 1-d grids, >= 3 points")
            if not (np.all(np.isfinite(x)) and np.all(np.isfinite(f))):
                raise InputError("tabulated density grids must be finite")
            if np.any(np.diff(x) <= 0):
                raise InputError("tabulated grid_x must be strictly increasing")
            if np.any(f < 0):
                raise InputError("tabulated density must be nonnegative")
            mass = float(np.trapezoid(f, x))
            if abs(mass - 1.0) > NORMALIZATION_TOL:
                raise InputError(
                    f"tabulated density integrates to {mass!r}, not 1 "
                    f"(tolerance {NORMALIZATION_TOL})"
                )
            x.setflags(write=False)
            f.setflags(write=False)
            object.__setattr__(self, "grid_x", x)
            object.__setattr__(self, "grid_f", f)
        else:
            raise InputError(f"unknown density kind {self.kind!r}")

    @classmethod
    def normal(cls, sigma: float = 1.0) -> "ErrorDensity":
        return cls(kind="normal", sigma=float(sigma))

    @classmethod
    def uniform(cls, lower: float, upper: float) -> "ErrorDensity":
        return cls(kind="uniform", lower=float(lower), upper=float(upper))

    @classmethod
    def tabulated(cls, grid_x, grid_f) -> "ErrorDensity":
        return cls(kind="tabulated", grid_x=np.asarray(grid_x), grid_f=np.asarray(grid_f))

    # -- basic functionals -- #

    def pdf(self, x: float) -> float:
        if self.kind == "normal":
            s = self.sigma
            return math.exp(-0.5 * (x / s) ** 2) / (s * math.sqrt(2 * math.pi))
        if self.kind == "uniform":
            return 1.0 / (self.upper - self.lower) if self.lower <= x <= self.upper else 0.0
        return float(np.interp(x, self.grid_x, self.grid_f, left=0.0, right=0.0))

    def cdf(self, x: float) -> float:
        if self.kind == "normal":
            return _phi(x / self.sigma)
        if self.kind == "uniform":
            if x <= self.lower:
                return 0.0
            if x >= self.upper:
                return 1.0
            return (x - self.lower) / (self.upper - self.lower)
        cum = self._cum()
        return float(np.clip(np.interp(x, self.grid_x, cum, left=0.0, right=1.0), 0.0, 1.0))

    def _cum(self) -> np.ndarray:
        cum = integrate.cumulative_trapezoid(self.grid_f, self.grid_x, initial=0.0)
        return cum / cum[-1]

    def sd(self) -> float:
        """Standard deviation of the density."""
        if self.kind == "normal":
            return self.sigma
        if self.kind == "uniform":
            return (self.upper - self.lower) / math.sqrt(12.0)
        x, f = self.grid_x, self.grid_f
        mean = float(np.trapezoid(x * f, x))
        return math.sqrt(float(np.trapezoid((x - mean) ** 2 * f, x)))

    def support(self) -> tuple[float, float]:
        if self.kind == "normal":
            return (-math.inf, math.inf)
        if self.kind == "uniform":
            return (self.lower, self.upper)
        return (float(self.grid_x[0]), float(self.grid_x[-1]))


# ── quadrature ──────────────────────────────────────────────────────────


def _quad(fn, lo: float, hi: float) -> float:
    """scipy.integrate.quad with failures converted to QuadratureError."""
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, abserr = integrate.quad(
                fn, lo, hi, epsabs=1e-12, epsrel=1e-12, limit=200
            )
        except integrate.IntegrationWarning as w:
            raise QuadratureError(f"quadrature did not converge: {w}") from w
    if abserr > 1e-8:
        raise QuadratureError(
            f"quadrature error estimate {abserr!r} too large for value {value!r}"
        )
    return value


def _dense_grid(density: ErrorDensity) -> np.ndarray:
    # refine the native grid so trapezoid error is dominated by the input data
    x = density.grid_x
    n = max(4001, 8 * len(x))
    return np.linspace(x[0], x[-1], n)


# ── difference density and moments ──────────────────────────────────────


def diff_density(density: ErrorDensity, d: float) -> float:
    """Density of the difference of two independent errors, at d.

    Parameters
    ----------
    density : ErrorDensity
    d : float
        Point of evaluation; the result is even in d.

    Returns
    -------
    float
        g(d) >= 0, with the maximum at 0.
    """
    if not np.isfinite(d):
        raise InputError(f"d must be finite, got {d!r}")
    a = abs(d)
    if density.kind == "normal":
        s = density.sigma
        # difference of two normals is normal with variance 2 sigma^2
        return math.exp(-(a * a) / (4 * s * s)) / (2 * s * _SQRT_PI)
    if density.kind == "uniform":
        w = density.upper - density.lower
        return (w - a) / (w * w) if a < w else 0.0
    x = _dense_grid(density)
    fx = np.interp(x, density.grid_x, density.grid_f, left=0.0, right=0.0)
    fxa = np.interp(x + a, density.grid_x, density.grid_f, left=0.0, right=0.0)
    return float(np.trapezoid(fx * fxa, x))


def moments(density: ErrorDensity, d: float) -> MomentSet:
    """Exceedance moments of the density at threshold d.

    Parameters
    ----------
    density : ErrorDensity
    d : float
        Threshold, >= 0.

    Returns
    -------
    MomentSet
        above_two  = integral of f(x) F(x-d)^2,
        below_two  = integral of f(x) (1-F(x+d))^2,
        above_below = integral of f(x) F(x-d) (1-F(x+d)),
        above_one  = P(X1 - X2 > d).
        At d = 0 every continuous density gives (1/3, 1/3, 1/6, 1/2).

    Raises
    ------
    QuadratureError
        When the normal triple-comparator integrals fail to converge.
    """
    if not np.isfinite(d) or d < 0:
        raise InputError(f"threshold d must be finite and >= 0, got {d!r}")

    if density.kind == "uniform":
        # closed forms from integrating the piecewise-linear CDF
        w = density.upper - density.lower
        r = max(w - d, 0.0)
        r2 = max(w - 2 * d, 0.0)
        return MomentSet(
            above_two=r**3 / (3 * w**3),
            below_two=r**3 / (3 * w**3),
            above_below=r2**3 / (6 * w**3),
            above_one=r**2 / (2 * w**2),
        )

    if density.kind == "normal":
        s = density.sigma
        above_one = 0.5 * math.erfc(d / (2 * s))
        pdf, cdf = density.pdf, density.cdf
        above_two = _quad(lambda x: pdf(x) * cdf(x - d) ** 2, -math.inf, math.inf)
        below_two = _quad(
            lambda x: pdf(x) * (1.0 - cdf(x + d)) ** 2, -math.inf, math.inf
        )
        above_below = _quad(
            lambda x: pdf(x) * cdf(x - d) * (1.0 - cdf(x + d)), -math.inf, math.inf
        )
        return MomentSet(above_two, below_two, above_below, above_one)

    x = _dense_grid(density)
    fx = np.interp(x, density.grid_x, density.grid_f, left=0.0, right=0.0)
    cum = density._cum()

    def cdf_at(t):
        return np.clip(np.interp(t, density.grid_x, cum, left=0.0, right=1.0), 0.0, 1.0)

    lo_t = cdf_at(x - d)
    hi_t = 1.0 - cdf_at(x + d)
    return MomentSet(
        above_two=float(np.trapezoid(fx * lo_t**2, x)),
        below_two=float(np.trapezoid(fx * hi_t**2, x)),
        above_below=float(np.trapezoid(fx * lo_t * hi_t, x)),
        above_one=float(np.trapezoid(fx * lo_t, x)),
    )


# ── drift and power ─────────────────────────────────────────────────────


def _drift(slope: float, g_d: float, m: MomentSet) -> float:
    denom = m.below_two + m.above_two - 2.0 * m.above_below
    if denom <= DENOM_FLOOR:
        raise DegenerateRegime(
            "all pairs are ties at this threshold; the standardized score "
            "has no nondegenerate limit (power tends to 1 for any real trend)"
        )
    return slope * g_d / math.sqrt(3.0 * denom)


def asymptotic_drift(density: ErrorDensity, slope: float, d: float) -> float:
    """Mean of the standardized score under a local trend, as n grows.

    The alternative adds slope * i * n^(-3/2) to the i-th observation,
    scaled so the limit is a fixed normal shift: the test then rejects
    with probability Phi(-crit + drift) + Phi(-crit - drift).

    Parameters
    ----------
    density : ErrorDensity
        Error distribution.
    slope : float
        Local trend coefficient (the Figure-style curves use 1).
    d : float
        Threshold, >= 0.

    Returns
    -------
    float
        slope * g(d) / sqrt(3 (below_two + above_two - 2 above_below)).

    Raises
    ------
    DegenerateRegime
        When the variance term vanishes (threshold at or beyond the
        support width of a bounded density).
    """
    if not np.isfinite(slope):
        raise InputError(f"slope must be finite, got {slope!r}")
    return _drift(slope, diff_density(density, d), moments(density, d))


@dataclass(frozen=True)
class PowerPoint:
    """One threshold on a power curve.

    ``drift`` is None and ``degenerate`` True where every pair is tied
    in the limit; the rejection probability is reported as 1.0 there
    (any real trend is eventually conclusive against a fully tied null).
    """

    d: float
    density_at_d: float
    moments: MomentSet
    drift: float | None
    power: float
    degenerate: bool = False


def power_curve(
    density: ErrorDensity,
    slope: float,
    d_grid,
    alpha_level: float = 0.05,
) -> tuple[PowerPoint, ...]:
    """Asymptotic rejection probability across a grid of thresholds.

    Parameters
    ----------
    density : ErrorDensity
    slope : float
        Local trend coefficient; 0 gives power = alpha_level everywhere.
    d_grid : sequence of float
        Thresholds, each >= 0.
    alpha_level : float
        Two-sided size of the test, in (0, 1).

    Returns
    -------
    tuple of PowerPoint
        One point per threshold, same order as the grid.
    """
    if not 0.0 < alpha_level < 1.0:
        raise InputError(f"alpha_level must be in (0, 1), got {alpha_level!r}")
    crit = -ndtri(alpha_level / 2.0)
    points = []
    for d in np.asarray(d_grid, dtype=float):
        d = float(d)
        g_d = diff_density(density, d)
        m = moments(density, d)
        try:
            drift = _drift(slope, g_d, m)
        except DegenerateRegime:
            points.append(PowerPoint(d, g_d, m, None, 1.0, degenerate=True))
            continue
        power = _phi(-crit + drift) + _phi(-crit - drift)
        points.append(PowerPoint(d, g_d, m, drift, power))
    return tuple(points)


# ── the second-derivative condition ─────────────────────────────────────


@dataclass(frozen=True)
class GainCondition:
    """Whether a small threshold helps at all for a given density.

    The drift gains from a small threshold exactly when
    lhs = (integral of f^2)(integral of f^3) exceeds
    rhs = (1/6)(integral of f'^2); the component integrals are kept for
    diagnostics.
    """

    holds: bool
    lhs: float
    rhs: float
    squared_mass: float
    cubed_mass: float
    derivative_mass: float


def power_gain_condition(density: ErrorDensity) -> GainCondition:
    """Evaluate the small-threshold power-gain condition for a density.

    Parameters
    ----------
    density : ErrorDensity
        Must be differentiable: normal uses closed forms; tabulated uses
        finite differences at the native grid resolution; uniform is
        rejected (its derivative is a pair of boundary spikes with no
        square-integrable version).

    Returns
    -------
    GainCondition
        holds is True when the power curve initially rises in d. Both
        sides scale as sigma^(-3) under rescaling, so the verdict is
        scale-free.
    """
    if density.kind == "uniform":
        raise AnalyticUnavailable(
            "the gain condition needs a differentiable density; "
            "uniform edges have no square-integrable derivative"
        )
    if density.kind == "normal":
        s = density.sigma
        squared = 1.0 / (2.0 * s * _SQRT_PI)
        cubed = 1.0 / (2.0 * math.pi * math.sqrt(3.0) * s * s)
        deriv = 1.0 / (4.0 * s**3 * _SQRT_PI)
    else:
        x, f = density.grid_x, density.grid_f
        squared = float(np.trapezoid(f**2, x))
        cubed = float(np.trapezoid(f**3, x))
        df = np.gradient(f, x)
        deriv = float(np.trapezoid(df**2, x))
    lhs = squared * cubed
    rhs = deriv / 6.0
    return GainCondition(
        holds=lhs > rhs,
        lhs=lhs,
        rhs=rhs,
        squared_mass=squared,
        cubed_mass=cubed,
        derivative_mass=deriv,
    )
