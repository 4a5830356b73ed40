"""Closed-form coverage laws, rarity rates, and asymptotic error bounds."""

import math
from fractions import Fraction

import pytest

from hypercov.design import DesignSpec
from hypercov.errors import StructuralError
from hypercov.exact import IntersectionKind, expected_coverage_multiset, kind_params
from hypercov.laws import (
    LawModel,
    asymptotic_law,
    bracket_exact_vs_asymptotic,
    conjecture_law,
    coverage_closed_form,
    error_bounds,
    iid_law,
    lambda_for,
    lambda_fraction,
)


class TestLambda:
    @pytest.mark.parametrize(
        "kind,spec,value",
        [
            (IntersectionKind.LHS_TUPLE, DesignSpec(2, 5), Fraction(1, 5)),
            (IntersectionKind.LHS_TUPLE, DesignSpec(3, 4), Fraction(1, 16)),
            (IntersectionKind.OS_TUPLE, DesignSpec(2, 9, p=3), Fraction(1, 9)),
            (IntersectionKind.OS_TUPLE, DesignSpec(3, 8, p=2), Fraction(1, 64)),
            (IntersectionKind.LH_EDGE_ALL, DesignSpec(4, 6), Fraction(1, 6)),
            (IntersectionKind.LH_EDGE_SUBBLOCK, DesignSpec(3, 8, p=2), Fraction(1, 8)),
        ],
    )
    def test_reduced_rate(self, kind, spec, value):
        # a/b collapses to the single-cell hit rate: n^-(d-1) for full
        # tuples, 1/n for axis pairs. Exact rational equality, so the
        # factorial towers in a and b must cancel perfectly.
        assert lambda_fraction(kind, spec) == value
        kp = kind_params(kind, spec)
        assert Fraction(kp.a, kp.b) == value

    @pytest.mark.parametrize("p", [2, 3])
    @pytest.mark.parametrize("d", [2, 3])
    def test_lh_and_os_rates_match_on_shared_grid(self, p, d):
        spec = DesignSpec(d, p**d, p=p)
        lh = lambda_fraction(IntersectionKind.LHS_TUPLE, spec)
        os_ = lambda_fraction(IntersectionKind.OS_TUPLE, spec)
        assert lh == os_ == Fraction(1, spec.n ** (d - 1))

    def test_lambda_for_is_float_of_fraction(self):
        spec = DesignSpec(2, 7)
        assert lambda_for(IntersectionKind.LHS_TUPLE, spec) == float(Fraction(1, 7))


class TestClosedForms:
    def test_iid_frozen(self):
        assert coverage_closed_form(iid_law(0.01, 100)) == pytest.approx(
            1 - 0.99**100, rel=1e-12
        )
        assert coverage_closed_form(iid_law(0.01, 100)) == pytest.approx(0.6339676587, abs=1e-9)

    def test_asymptotic_frozen(self):
        assert coverage_closed_form(asymptotic_law(0.01, 100)) == pytest.approx(
            -math.expm1(-1.0), rel=1e-12
        )

    def test_conjecture_frozen(self):
        # t=2 slice of a 27-wide design: same exponential family with
        # rate n^(1-t).
        got = coverage_closed_form(conjecture_law(27, 2, 27))
        assert got == pytest.approx(1 - (1 - 1 / 27) ** 27, rel=1e-12)

    def test_k_zero(self):
        assert coverage_closed_form(iid_law(0.3, 0)) == 0.0
        assert coverage_closed_form(asymptotic_law(0.3, 0)) == 0.0

    def test_full_rate_saturates(self):
        assert coverage_closed_form(iid_law(1.0, 3)) == 1.0

    def test_iid_monotone_in_k(self):
        vals = [coverage_closed_form(iid_law(0.05, k)) for k in range(0, 40)]
        assert all(x < y for x, y in zip(vals, vals[1:]))

    def test_small_k_precision(self):
        # k*lam near 1e-12 must not cancel to zero.
        v = coverage_closed_form(iid_law(1e-12, 1))
        assert v == pytest.approx(1e-12, rel=1e-6)
        assert v > 0

    def test_law_validation(self):
        with pytest.raises(StructuralError):
            iid_law(0.0, 3)
        with pytest.raises(StructuralError):
            iid_law(1.5, 3)
        with pytest.raises(StructuralError):
            iid_law(0.5, -1)

    def test_conjecture_validation(self):
        with pytest.raises(StructuralError):
            conjecture_law(10, 1, 5)
        with pytest.raises(StructuralError):
            conjecture_law(10, 4, 5, d=3)
        law = conjecture_law(10, 3, 5, d=3)
        assert law.model is LawModel.CONJECTURE_T
        assert law.lam == pytest.approx(10.0**-2)


class TestErrorBounds:
    def test_frozen_values(self):
        eb = error_bounds(IntersectionKind.LHS_TUPLE, DesignSpec(3, 8), 10)
        assert eb.a == math.factorial(7) ** 2
        assert eb.valid
        assert eb.e1_bound == pytest.approx(4.142284744081294e-06, rel=1e-12)
        assert eb.e2_bound == pytest.approx(0.002088245427996637, rel=1e-12)

    def test_validity_flag(self):
        # k(k-1) <= a is the precondition for the first bound; at
        # d=2, n=2 even k=2 breaks it.
        assert error_bounds(IntersectionKind.LHS_TUPLE, DesignSpec(2, 2), 1).valid
        assert not error_bounds(IntersectionKind.LHS_TUPLE, DesignSpec(2, 2), 2).valid

    @pytest.mark.parametrize("n", [4, 8, 16, 64])
    @pytest.mark.parametrize("k", [1, 2, 5, 10, 50, 200])
    def test_second_bound_controls_iid_vs_asymptotic(self, n, k):
        lam = lambda_for(IntersectionKind.LHS_TUPLE, DesignSpec(3, n))
        gap = abs(
            coverage_closed_form(iid_law(lam, k)) - coverage_closed_form(asymptotic_law(lam, k))
        )
        assert gap <= math.exp(-k * lam) * k * lam * lam + 1e-15


class TestBracket:
    def test_smallest_case(self):
        r = bracket_exact_vs_asymptotic(IntersectionKind.LHS_TUPLE, DesignSpec(2, 2), 1)
        assert r.lam == 0.5
        assert r.p_multiset == 0.5
        assert r.p_iid == 0.5
        assert r.p_asym == pytest.approx(-math.expm1(-0.5), rel=1e-12)
        assert r.valid and r.within_bounds

    @pytest.mark.parametrize("k", [2, 4, 8, 16, 32])
    def test_bounds_hold_when_valid(self, k):
        r = bracket_exact_vs_asymptotic(IntersectionKind.LHS_TUPLE, DesignSpec(3, 8), k)
        assert r.valid
        assert abs(r.p_multiset - r.p_asym) <= r.e1_bound + r.e2_bound
        assert r.within_bounds

    def test_invalid_case_reports_flag(self):
        r = bracket_exact_vs_asymptotic(IntersectionKind.LHS_TUPLE, DesignSpec(2, 2), 2)
        assert not r.valid

    def test_multiset_column_matches_exact_module(self):
        r = bracket_exact_vs_asymptotic(IntersectionKind.OS_TUPLE, DesignSpec(2, 4, p=2), 2)
        assert r.p_multiset == pytest.approx(
            float(expected_coverage_multiset(IntersectionKind.OS_TUPLE, DesignSpec(2, 4, p=2), 2)),
            rel=1e-15,
        )

    def test_multiset_converges_to_iid_as_trials_grow(self):
        # Fixed k, growing n: sampling without replacement looks more
        # and more like independent draws.
        gaps = []
        for n in (4, 8, 16, 32):
            r = bracket_exact_vs_asymptotic(IntersectionKind.LHS_TUPLE, DesignSpec(2, n), 3)
            gaps.append(abs(r.p_multiset - r.p_iid))
        assert all(x > y for x, y in zip(gaps, gaps[1:]))
