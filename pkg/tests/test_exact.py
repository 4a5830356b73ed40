"""Exact counts, intersection moments, and multiset coverage.

Every frozen fraction below is cross-checked against brute-force
enumeration over the complete trial set (see test_oracle.py); the
literals here keep the fast path honest when the enumeration guard
makes the oracle too slow to run inline.
"""

from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypercov.design import DesignSpec
from hypercov.errors import (
    CapExceededError,
    GuardExceededError,
    StructuralError,
    UnsupportedSpecError,
)
from hypercov.exact import (
    IntersectionKind,
    count_lh_trials,
    count_os_trials,
    count_trials_containing_edge,
    count_trials_containing_tuple,
    coverage_universe,
    expected_coverage_multiset,
    expected_covered_cells_multiset,
    expected_intersection,
    intersection_ratio,
    kind_params,
)
from hypercov.laws import lambda_fraction

F = Fraction


class TestCounting:
    @pytest.mark.parametrize(
        "d,n,count",
        [(2, 2, 2), (2, 3, 6), (3, 2, 4), (3, 3, 36), (2, 4, 24)],
    )
    def test_count_lh_trials(self, d, n, count):
        assert count_lh_trials(DesignSpec(d, n)) == count

    @pytest.mark.parametrize(
        "d,p,count",
        [(2, 2, 16), (2, 3, 46656), (3, 2, 24**6), (2, 1, 1)],
    )
    def test_count_os_trials(self, d, p, count):
        assert count_os_trials(DesignSpec(d, p**d, p=p)) == count

    def test_count_trials_containing_tuple(self):
        assert count_trials_containing_tuple(DesignSpec(2, 3), IntersectionKind.LHS_TUPLE) == 2
        assert count_trials_containing_tuple(DesignSpec(2, 4, p=2), IntersectionKind.OS_TUPLE) == 4

    def test_count_trials_containing_edge(self):
        assert count_trials_containing_edge(DesignSpec(3, 2)) == 2
        # d=2 degenerates to the tuple count.
        assert count_trials_containing_edge(DesignSpec(2, 3)) == 2

    def test_containment_never_exceeds_total(self):
        for n in (2, 3, 4, 5):
            spec = DesignSpec(3, n)
            assert count_trials_containing_tuple(spec, IntersectionKind.LHS_TUPLE) <= count_lh_trials(spec)


class TestKindParams:
    @pytest.mark.parametrize(
        "kind,spec,a,b,scale",
        [
            (IntersectionKind.LHS_TUPLE, DesignSpec(2, 2), 1, 2, 4),
            (IntersectionKind.LHS_TUPLE, DesignSpec(2, 3), 2, 6, 9),
            (IntersectionKind.LHS_TUPLE, DesignSpec(3, 2), 1, 4, 8),
            (IntersectionKind.OS_TUPLE, DesignSpec(2, 4, p=2), 4, 16, 16),
            (IntersectionKind.LH_EDGE_ALL, DesignSpec(3, 2), 2, 4, 12),
            (IntersectionKind.LH_EDGE_SUBBLOCK, DesignSpec(2, 4, p=2), 6, 24, 4),
        ],
    )
    def test_frozen_params(self, kind, spec, a, b, scale):
        kp = kind_params(kind, spec)
        assert (kp.a, kp.b, kp.scale) == (a, b, scale)

    def test_tuple_b_equals_trial_count(self):
        spec = DesignSpec(3, 3)
        assert kind_params(IntersectionKind.LHS_TUPLE, spec).b == count_lh_trials(spec)
        ospec = DesignSpec(2, 9, p=3)
        assert kind_params(IntersectionKind.OS_TUPLE, ospec).b == count_os_trials(ospec)

    def test_os_kinds_require_p(self):
        with pytest.raises(UnsupportedSpecError):
            kind_params(IntersectionKind.OS_TUPLE, DesignSpec(2, 4))
        with pytest.raises(UnsupportedSpecError):
            kind_params(IntersectionKind.LH_EDGE_SUBBLOCK, DesignSpec(2, 4))

    def test_edge_all_needs_two_axes(self):
        kp = kind_params(IntersectionKind.LH_EDGE_ALL, DesignSpec(2, 3))
        assert kp.scale == 9  # single axis pair


class TestExpectedIntersection:
    @pytest.mark.parametrize(
        "kind,spec,m,value",
        [
            (IntersectionKind.LHS_TUPLE, DesignSpec(2, 2), 1, F(2)),
            (IntersectionKind.LHS_TUPLE, DesignSpec(2, 2), 2, F(4, 3)),
            (IntersectionKind.LHS_TUPLE, DesignSpec(2, 3), 1, F(3)),
            (IntersectionKind.LHS_TUPLE, DesignSpec(2, 3), 2, F(9, 7)),
            (IntersectionKind.LHS_TUPLE, DesignSpec(3, 2), 2, F(4, 5)),
            (IntersectionKind.OS_TUPLE, DesignSpec(2, 4, p=2), 1, F(4)),
            (IntersectionKind.OS_TUPLE, DesignSpec(2, 4, p=2), 2, F(20, 17)),
            (IntersectionKind.LH_EDGE_ALL, DesignSpec(3, 2), 1, F(6)),
            (IntersectionKind.LH_EDGE_ALL, DesignSpec(3, 2), 2, F(18, 5)),
            (IntersectionKind.LH_EDGE_SUBBLOCK, DesignSpec(2, 4, p=2), 1, F(1)),
            (IntersectionKind.LH_EDGE_SUBBLOCK, DesignSpec(2, 4, p=2), 2, F(7, 25)),
        ],
    )
    def test_frozen_values(self, kind, spec, m, value):
        assert expected_intersection(kind, spec, m) == value

    def test_m_one_is_scale_times_lambda(self):
        for kind, spec in [
            (IntersectionKind.LHS_TUPLE, DesignSpec(2, 5)),
            (IntersectionKind.OS_TUPLE, DesignSpec(2, 9, p=3)),
            (IntersectionKind.LH_EDGE_ALL, DesignSpec(4, 3)),
            (IntersectionKind.LH_EDGE_SUBBLOCK, DesignSpec(3, 8, p=2)),
        ]:
            kp = kind_params(kind, spec)
            assert expected_intersection(kind, spec, 1) == kp.scale * F(kp.a, kp.b)

    def test_decreasing_in_m(self):
        spec = DesignSpec(2, 4)
        vals = [expected_intersection(IntersectionKind.LHS_TUPLE, spec, m) for m in range(1, 6)]
        assert all(x > y for x, y in zip(vals, vals[1:]))

    def test_m_zero_rejected(self):
        with pytest.raises(StructuralError):
            expected_intersection(IntersectionKind.LHS_TUPLE, DesignSpec(2, 3), 0)

    def test_ratio_is_falling_product(self):
        spec = DesignSpec(2, 3)
        kp = kind_params(IntersectionKind.LHS_TUPLE, spec)
        want = F(kp.a, kp.b) * F(kp.a + 1, kp.b + 1) * F(kp.a + 2, kp.b + 2)
        assert intersection_ratio(IntersectionKind.LHS_TUPLE, spec, 3) == want


class TestExpectedCoverage:
    @pytest.mark.parametrize(
        "kind,spec,k,value",
        [
            (IntersectionKind.LHS_TUPLE, DesignSpec(2, 2), 1, F(1, 2)),
            (IntersectionKind.LHS_TUPLE, DesignSpec(2, 2), 2, F(2, 3)),
            (IntersectionKind.LHS_TUPLE, DesignSpec(2, 2), 3, F(3, 4)),
            (IntersectionKind.LHS_TUPLE, DesignSpec(2, 3), 1, F(1, 3)),
            (IntersectionKind.LHS_TUPLE, DesignSpec(2, 3), 2, F(11, 21)),
            (IntersectionKind.LHS_TUPLE, DesignSpec(2, 3), 3, F(9, 14)),
            (IntersectionKind.LHS_TUPLE, DesignSpec(3, 2), 2, F(2, 5)),
            (IntersectionKind.OS_TUPLE, DesignSpec(2, 4, p=2), 2, F(29, 68)),
            (IntersectionKind.OS_TUPLE, DesignSpec(2, 4, p=2), 3, F(113, 204)),
            (IntersectionKind.LH_EDGE_ALL, DesignSpec(3, 2), 2, F(7, 10)),
            (IntersectionKind.LH_EDGE_SUBBLOCK, DesignSpec(2, 4, p=2), 2, F(43, 100)),
            (IntersectionKind.LH_EDGE_SUBBLOCK, DesignSpec(2, 4, p=2), 3, F(73, 130)),
        ],
    )
    def test_frozen_values(self, kind, spec, k, value):
        assert expected_coverage_multiset(kind, spec, k) == value

    def test_k_zero_covers_nothing(self):
        assert expected_coverage_multiset(IntersectionKind.LHS_TUPLE, DesignSpec(2, 3), 0) == 0

    def test_k_one_is_lambda(self):
        for kind, spec in [
            (IntersectionKind.LHS_TUPLE, DesignSpec(2, 6)),
            (IntersectionKind.OS_TUPLE, DesignSpec(2, 9, p=3)),
            (IntersectionKind.LH_EDGE_ALL, DesignSpec(3, 4)),
        ]:
            assert expected_coverage_multiset(kind, spec, 1) == lambda_fraction(kind, spec)

    def test_increasing_in_k(self):
        spec = DesignSpec(2, 3)
        vals = [expected_coverage_multiset(IntersectionKind.LHS_TUPLE, spec, k) for k in range(0, 12)]
        assert all(x < y for x, y in zip(vals, vals[1:]))
        assert all(0 <= v < 1 for v in vals)

    @pytest.mark.parametrize(
        "kind,spec",
        [
            (IntersectionKind.LHS_TUPLE, DesignSpec(2, 3)),
            (IntersectionKind.LHS_TUPLE, DesignSpec(3, 2)),
            (IntersectionKind.OS_TUPLE, DesignSpec(2, 4, p=2)),
            (IntersectionKind.LH_EDGE_ALL, DesignSpec(3, 2)),
            (IntersectionKind.LH_EDGE_SUBBLOCK, DesignSpec(2, 4, p=2)),
        ],
    )
    def test_drawing_without_order_identity(self, kind, spec):
        # The alternating sum telescopes to a ratio of two binomial
        # coefficients; checking both routes at larger k guards the
        # inclusion-exclusion bookkeeping.
        kp = kind_params(kind, spec)
        for k in (1, 2, 5, 13, 40):
            direct = expected_coverage_multiset(kind, spec, k)
            closed = 1 - F(comb(kp.b - kp.a + k - 1, k), comb(kp.b + k - 1, k))
            assert direct == closed

    def test_covered_cells_is_scaled_coverage(self):
        spec = DesignSpec(2, 4, p=2)
        kind = IntersectionKind.OS_TUPLE
        cov = expected_coverage_multiset(kind, spec, 2)
        assert expected_covered_cells_multiset(kind, spec, 2) == coverage_universe(kind, spec) * cov

    def test_universe_sizes(self):
        assert coverage_universe(IntersectionKind.LHS_TUPLE, DesignSpec(2, 3)) == 9
        assert coverage_universe(IntersectionKind.OS_TUPLE, DesignSpec(2, 4, p=2)) == 16
        assert coverage_universe(IntersectionKind.LH_EDGE_ALL, DesignSpec(3, 2)) == 12
        assert coverage_universe(IntersectionKind.LH_EDGE_SUBBLOCK, DesignSpec(2, 4, p=2)) == 4

    @given(k=st.integers(min_value=1, max_value=60))
    @settings(max_examples=40)
    def test_coverage_in_unit_interval(self, k):
        v = expected_coverage_multiset(IntersectionKind.LHS_TUPLE, DesignSpec(2, 4), k)
        assert 0 < v < 1


class TestEdgeTupleAgreement:
    @pytest.mark.parametrize("n", [2, 3, 4])
    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_two_axes_edge_equals_tuple(self, n, m):
        # With d=2 the single axis pair is the whole point, so both
        # intersection families must agree exactly.
        spec = DesignSpec(2, n)
        lhs = expected_intersection(IntersectionKind.LHS_TUPLE, spec, m)
        edge = expected_intersection(IntersectionKind.LH_EDGE_ALL, spec, m)
        assert lhs == edge


class TestGuards:
    def test_coverage_cap(self):
        with pytest.raises(CapExceededError):
            expected_coverage_multiset(IntersectionKind.LHS_TUPLE, DesignSpec(2, 3), 513)

    def test_coverage_cap_override(self):
        v = expected_coverage_multiset(IntersectionKind.LHS_TUPLE, DesignSpec(2, 2), 600, cap=600)
        assert 0 < v < 1

    def test_bigint_guard(self):
        with pytest.raises(GuardExceededError):
            count_lh_trials(DesignSpec(2, 1_000_000))

    def test_cap_error_is_guard_error(self):
        assert issubclass(CapExceededError, GuardExceededError)
