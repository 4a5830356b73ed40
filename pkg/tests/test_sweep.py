"""Threshold search and growth-rate fits for coverage targets."""

from fractions import Fraction

import pytest

from hypercov.design import DesignSpec
from hypercov.errors import InvalidModeError, StructuralError
from hypercov.sampling import SampleKind
from hypercov.sweep import (
    SweepMode,
    closed_form_k,
    find_k_for_target,
    fit_slope,
    full_coverage_k,
    run_sweep,
    simulated_k,
)


class TestClosedFormThreshold:
    @pytest.mark.parametrize(
        "n,t,level,k_star",
        [
            (100, 2, 0.5, 69),
            (16, 3, 0.5, 178),
            (10, 1, 0.9, 1),  # width-1 slices are covered by any trial
            (2, 2, 0.5, 1),
            (2, 2, 0.75, 2),
        ],
    )
    def test_frozen_thresholds(self, n, t, level, k_star):
        assert closed_form_k(n, t, level) == k_star

    @pytest.mark.parametrize("n,t,level", [(7, 2, 0.3), (12, 2, 0.8), (5, 3, 0.62)])
    def test_threshold_is_a_crossing(self, n, t, level):
        # k* is minimal: the expected fraction reaches the level at k*
        # and not one trial earlier. Each trial covers n of the n^t
        # cells, so the per-cell miss base is 1 - n^(1-t). Checked in
        # exact arithmetic.
        k = closed_form_k(n, t, level)
        miss = Fraction(n ** (t - 1) - 1, n ** (t - 1))

        def covered(j):
            return 1 - miss**j

        assert covered(k) >= Fraction(level).limit_denominator(10**12)
        if k > 1:
            assert covered(k - 1) < Fraction(level).limit_denominator(10**12)

    def test_threshold_grows_linearly_in_n_for_pairs(self):
        ks = [closed_form_k(n, 2, 0.5) for n in (50, 100, 200)]
        # Doubling n should about double k at fixed level.
        assert 1.8 < ks[1] / ks[0] < 2.2
        assert 1.8 < ks[2] / ks[1] < 2.2

    def test_level_validation(self):
        with pytest.raises(InvalidModeError):
            closed_form_k(8, 2, 1.0)
        with pytest.raises(InvalidModeError):
            closed_form_k(8, 2, 0.0)


class TestSimulatedThreshold:
    def test_matches_closed_form_on_small_design(self):
        got = simulated_k(DesignSpec(2, 8), SampleKind.LHS, 2, 0.5, reps=100, seed=1)
        assert got == closed_form_k(8, 2, 0.5)

    def test_determinism(self):
        a = simulated_k(DesignSpec(2, 6), SampleKind.LHS, 2, 0.4, reps=60, seed=9)
        b = simulated_k(DesignSpec(2, 6), SampleKind.LHS, 2, 0.4, reps=60, seed=9)
        assert a == b

    def test_os_kind_accepted(self):
        got = simulated_k(DesignSpec(2, 4, p=2), SampleKind.OS, 2, 0.5, reps=80, seed=2)
        assert got >= 1


class TestFullCoverage:
    def test_small_design_stopping_time(self):
        got = full_coverage_k(DesignSpec(2, 4), SampleKind.LHS, 2, reps=50, seed=1)
        # Collecting all 16 cells takes at least universe/n = 4 trials.
        assert got >= 4
        assert got == full_coverage_k(DesignSpec(2, 4), SampleKind.LHS, 2, reps=50, seed=1)

    def test_find_k_dispatch(self):
        got = find_k_for_target(DesignSpec(2, 4), SampleKind.LHS, 2, 1.0, SweepMode.SIMULATED, reps=30, seed=3)
        assert isinstance(got, float)
        with pytest.raises(InvalidModeError):
            find_k_for_target(DesignSpec(2, 4), SampleKind.LHS, 2, 1.0, SweepMode.CLOSED_FORM)


class TestFitSlope:
    def test_exact_power_law(self):
        rows = [(10, 3.0 * 10**1.5), (100, 3.0 * 100**1.5), (1000, 3.0 * 1000**1.5)]
        fit = fit_slope(rows)
        assert fit.slope == pytest.approx(1.5, abs=1e-12)
        assert fit.intercept == pytest.approx(0.4771212547196626, abs=1e-12)
        assert fit.residual < 1e-12

    def test_flat_line(self):
        fit = fit_slope([(10, 7.0), (100, 7.0), (1000, 7.0)])
        assert fit.slope == pytest.approx(0.0, abs=1e-12)

    def test_needs_three_rows(self):
        with pytest.raises(StructuralError):
            fit_slope([(10, 5.0), (20, 9.0)])


class TestRunSweep:
    def test_closed_form_pair_slice(self):
        res = run_sweep(
            d=3, t=2, kind=SampleKind.LHS, levels=[0.5],
            n_grid=[64, 128, 256, 512], mode=SweepMode.CLOSED_FORM,
        )
        assert len(res) == 1
        r = res[0]
        assert r.rows == ((64, 45), (128, 89), (256, 178), (512, 355))
        assert abs(r.slope - 1.0) < 0.05

    def test_closed_form_triple_slice(self):
        r = run_sweep(
            d=3, t=3, kind=SampleKind.LHS, levels=[0.5],
            n_grid=[64, 128, 256, 512], mode=SweepMode.CLOSED_FORM,
        )[0]
        assert abs(r.slope - 2.0) < 0.05

    def test_multiple_levels(self):
        res = run_sweep(
            d=2, t=2, kind=SampleKind.LHS, levels=[0.25, 0.5],
            n_grid=[16, 32, 64], mode=SweepMode.CLOSED_FORM,
        )
        assert [r.level for r in res] == [0.25, 0.5]
        # Higher level needs more trials at every n.
        for (_, k_lo), (_, k_hi) in zip(res[0].rows, res[1].rows):
            assert k_lo < k_hi

    def test_simulated_mode_runs(self):
        r = run_sweep(
            d=2, t=2, kind=SampleKind.LHS, levels=[0.5],
            n_grid=[4, 8, 16], mode=SweepMode.SIMULATED, reps=60, seed=5,
        )[0]
        assert len(r.rows) == 3
        assert 0.5 < r.slope < 1.5

    def test_os_grid_infers_block_side(self):
        r = run_sweep(
            d=2, t=2, kind=SampleKind.OS, levels=[0.5],
            n_grid=[4, 9, 16], mode=SweepMode.SIMULATED, reps=60, seed=5,
        )[0]
        assert len(r.rows) == 3
