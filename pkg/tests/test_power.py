"""Analytic power machinery under contiguous trend alternatives."""

import math

import numpy as np
import pytest

from lrdkendall import (
    AnalyticUnavailable,
    DegenerateRegime,
    ErrorDensity,
    InputError,
    MomentSet,
    asymptotic_drift,
    diff_density,
    moments,
    power_curve,
    power_gain_condition,
    validate_moments,
)

# drift of the standardized statistic per unit slope, unit normal errors,
# frozen from an independent quadrature run at fifteen decimals
NORMAL_DRIFT = {
    0.0: 0.282094791773878,
    0.5: 0.283766084176666,
    1.0: 0.287164843046582,
    1.34: 0.288307683421073,
    2.0: 0.280857386114808,
    3.0: 0.234067446634022,
}

NULL_MOMENTS = MomentSet(1 / 3, 1 / 3, 1 / 6, 1 / 2)


def tabulated_normal(sigma=1.0, span=9.0, points=4001):
    xs = np.linspace(-span * sigma, span * sigma, points)
    fs = np.exp(-0.5 * (xs / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    return ErrorDensity.tabulated(xs, fs)


class TestErrorDensity:
    def test_normal_properties(self):
        density = ErrorDensity.normal(2.0)
        assert density.sd() == pytest.approx(2.0)
        assert density.pdf(0.0) == pytest.approx(1 / (2 * math.sqrt(2 * math.pi)))
        assert density.cdf(0.0) == pytest.approx(0.5)

    def test_uniform_properties(self):
        density = ErrorDensity.uniform(-3.0, 3.0)
        assert density.sd() == pytest.approx(6 / math.sqrt(12))
        assert density.pdf(0.0) == pytest.approx(1 / 6)
        assert density.pdf(4.0) == 0.0
        assert density.cdf(3.0) == pytest.approx(1.0)

    def test_tabulated_matches_closed_form(self):
        density = tabulated_normal()
        assert density.sd() == pytest.approx(1.0, abs=1e-4)
        assert density.cdf(1.0) == pytest.approx(0.8413447, abs=1e-4)

    def test_validation(self):
        with pytest.raises(InputError):
            ErrorDensity.normal(0.0)
        with pytest.raises(InputError):
            ErrorDensity.uniform(1.0, 1.0)
        with pytest.raises(InputError):
            ErrorDensity.tabulated([0.0, 1.0], [1.0, 1.0, 1.0])
        with pytest.raises(InputError):
            ErrorDensity.tabulated([0.0, 1.0, 0.5], [1.0, 1.0, 1.0])
        with pytest.raises(InputError):
            # mass far from one
            ErrorDensity.tabulated([0.0, 1.0, 2.0], [1.0, 1.0, 1.0])


class TestDiffDensity:
    def test_normal_closed_form(self):
        # the difference of two unit normals has variance 2
        assert diff_density(ErrorDensity.normal(1.0), 0.0) == pytest.approx(
            1 / (2 * math.sqrt(math.pi))
        )
        assert diff_density(ErrorDensity.normal(2.0), 1.0) == pytest.approx(
            math.exp(-1 / 16) / (4 * math.sqrt(math.pi))
        )

    def test_uniform_triangle(self):
        density = ErrorDensity.uniform(0.0, 1.0)
        assert diff_density(density, 0.0) == pytest.approx(1.0)
        assert diff_density(density, 0.5) == pytest.approx(0.5)
        assert diff_density(density, 1.0) == pytest.approx(0.0)
        assert diff_density(density, 1.5) == 0.0

    def test_symmetry(self):
        density = ErrorDensity.normal(1.5)
        for d in (0.3, 1.0, 2.2):
            assert diff_density(density, d) == pytest.approx(diff_density(density, -d))

    def test_tabulated_tracks_closed_form(self):
        density = tabulated_normal()
        for d in (0.0, 0.5, 1.5):
            want = math.exp(-(d**2) / 4) / (2 * math.sqrt(math.pi))
            assert diff_density(density, d) == pytest.approx(want, abs=1e-4)


class TestMoments:
    def test_threshold_zero_axioms(self):
        for density in (ErrorDensity.normal(1.0), ErrorDensity.uniform(0.0, 1.0)):
            m = moments(density, 0.0)
            assert m.above_two == pytest.approx(1 / 3, abs=1e-8)
            assert m.below_two == pytest.approx(1 / 3, abs=1e-8)
            assert m.above_below == pytest.approx(1 / 6, abs=1e-8)
            assert m.above_one == pytest.approx(1 / 2, abs=1e-8)

    def test_uniform_closed_forms(self):
        # width 1, d = 0.25: (w-d)^3/(3w^3), (w-2d)^3/(6w^3), (w-d)^2/(2w^2)
        m = moments(ErrorDensity.uniform(0.0, 1.0), 0.25)
        assert m.above_two == pytest.approx(0.75**3 / 3)
        assert m.below_two == pytest.approx(0.75**3 / 3)
        assert m.above_below == pytest.approx(0.5**3 / 6)
        assert m.above_one == pytest.approx(0.75**2 / 2)

    def test_uniform_beyond_support_degenerates(self):
        m = moments(ErrorDensity.uniform(0.0, 1.0), 1.5)
        assert m == MomentSet(0.0, 0.0, 0.0, 0.0)

    def test_chain_holds_along_grid(self):
        for density in (ErrorDensity.normal(1.0), ErrorDensity.uniform(-2.0, 2.0)):
            for d in np.linspace(0.0, 3.0, 13):
                validate_moments(moments(density, float(d)))

    def test_normal_exceedance_probability(self):
        # P(X1 - X2 > d) with difference sd sqrt(2)
        m = moments(ErrorDensity.normal(1.0), 1.0)
        assert m.above_one == pytest.approx(0.5 * math.erfc(0.5), rel=1e-10)

    def test_monte_carlo_cross_check(self):
        # triple probabilities vs 2e6 simulated triples, 4 sigma slack
        rng = np.random.default_rng(123)
        n_samples = 2_000_000
        x = rng.normal(size=(n_samples, 3))
        d = 1.0
        above = (x[:, 0] > x[:, 1] + d) & (x[:, 0] > x[:, 2] + d)
        mixed = (x[:, 0] > x[:, 1] + d) & (x[:, 0] < x[:, 2] - d)
        m = moments(ErrorDensity.normal(1.0), d)
        for want, flags in ((m.above_two, above), (m.above_below, mixed)):
            got = flags.mean()
            se = math.sqrt(got * (1 - got) / n_samples)
            assert abs(got - want) < 4 * se

    def test_tabulated_close_to_exact(self):
        exact = moments(ErrorDensity.normal(1.0), 0.5)
        table = moments(tabulated_normal(), 0.5)
        assert table.above_two == pytest.approx(exact.above_two, abs=2e-4)
        assert table.above_one == pytest.approx(exact.above_one, abs=2e-4)

    def test_rejects_negative_threshold(self):
        with pytest.raises(InputError):
            moments(ErrorDensity.normal(1.0), -0.5)


class TestDrift:
    def test_frozen_unit_normal_values(self):
        density = ErrorDensity.normal(1.0)
        for d, want in NORMAL_DRIFT.items():
            assert asymptotic_drift(density, 1.0, d) == pytest.approx(want, abs=1e-9)

    def test_linear_in_slope(self):
        density = ErrorDensity.normal(1.0)
        assert asymptotic_drift(density, 2.5, 0.7) == pytest.approx(
            2.5 * asymptotic_drift(density, 1.0, 0.7)
        )

    def test_interior_maximum(self):
        density = ErrorDensity.normal(1.0)
        grid = np.arange(0.0, 3.0, 0.01)
        drifts = [asymptotic_drift(density, 1.0, float(d)) for d in grid]
        best = grid[int(np.argmax(drifts))]
        assert 1.30 <= best <= 1.38

    def test_uniform_beyond_support_degenerates(self):
        with pytest.raises(DegenerateRegime):
            asymptotic_drift(ErrorDensity.uniform(0.0, 1.0), 1.0, 2.0)


class TestPowerCurve:
    def test_zero_slope_is_alpha(self):
        points = power_curve(ErrorDensity.normal(1.0), 0.0, [0.0, 1.0, 2.0])
        for pt in points:
            assert pt.power == pytest.approx(0.05)

    def test_follows_drift_ordering(self):
        points = power_curve(ErrorDensity.normal(1.0), 0.5, [0.0, 1.34, 3.0])
        by_d = {pt.d: pt for pt in points}
        assert by_d[1.34].power > by_d[0.0].power > by_d[3.0].power

    def test_degenerate_rows_are_flagged(self):
        points = power_curve(ErrorDensity.uniform(0.0, 1.0), 0.5, [0.5, 2.0])
        assert not points[0].degenerate
        assert points[1].degenerate
        assert points[1].drift is None
        assert points[1].power == 1.0

    def test_alpha_validated(self):
        with pytest.raises(InputError):
            power_curve(ErrorDensity.normal(1.0), 0.5, [0.0], alpha_level=0.0)

    def test_quadratic_start(self):
        # the curve is flat to first order at d = 0: finite differences of
        # the drift scale by 4 when the step doubles
        density = ErrorDensity.normal(1.0)
        base = asymptotic_drift(density, 1.0, 0.0)
        small = asymptotic_drift(density, 1.0, 0.01) - base
        double = asymptotic_drift(density, 1.0, 0.02) - base
        assert double / small == pytest.approx(4.0, rel=0.05)


class TestGainCondition:
    def test_normal_closed_forms(self):
        gain = power_gain_condition(ErrorDensity.normal(1.0))
        assert gain.holds
        assert gain.squared_mass == pytest.approx(1 / (2 * math.sqrt(math.pi)), abs=1e-10)
        assert gain.cubed_mass == pytest.approx(1 / (2 * math.pi * math.sqrt(3)), abs=1e-10)
        assert gain.derivative_mass == pytest.approx(1 / (4 * math.sqrt(math.pi)), abs=1e-10)
        assert gain.lhs == pytest.approx(0.02592117, abs=1e-7)
        assert gain.rhs == pytest.approx(0.02350790, abs=1e-7)

    def test_scale_leaves_verdict(self):
        # both sides shrink with the cube of the scale, verdict unchanged
        one = power_gain_condition(ErrorDensity.normal(1.0))
        two = power_gain_condition(ErrorDensity.normal(2.0))
        assert two.holds == one.holds
        assert two.lhs == pytest.approx(one.lhs / 8, rel=1e-9)
        assert two.rhs == pytest.approx(one.rhs / 8, rel=1e-9)

    def test_uniform_has_no_derivative(self):
        with pytest.raises(AnalyticUnavailable):
            power_gain_condition(ErrorDensity.uniform(0.0, 1.0))

    def test_tabulated_normal_agrees(self):
        gain = power_gain_condition(tabulated_normal())
        exact = power_gain_condition(ErrorDensity.normal(1.0))
        assert gain.holds
        assert gain.lhs == pytest.approx(exact.lhs, rel=1e-3)
        assert gain.rhs == pytest.approx(exact.rhs, rel=1e-3)
