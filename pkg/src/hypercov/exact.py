"""Exact expected intersection and coverage counts, as rationals.

Every quantity here reduces to one pattern. Fix a family of "units"
(cells of the full grid, or axis-pair value pairs), a trial ensemble of
b equally likely trials, and suppose each unit lies in exactly a of
them. Draw m trials with repetition (a multiset). The expected number
of units common to all m drawn trials is

    x_m = scale * prod_{i=0}^{m-1} (a + i) / (b + i)

where scale is the number of units. The falling-product form is exact
and never evaluates a factorial of a shifted argument. The expected
fraction of units covered by at least one of k pooled trials follows by
inclusion-exclusion over the same products:

    P(k) = sum_{m=1}^{k} (-1)^(m+1) * C(k, m) * prod_{i=0}^{m-1} (a+i)/(b+i)

Parameter table (n levels, d axes, coarse base p where n = p^d):

    kind               a                                b              scale
    LHS_TUPLE          (n-1)!^(d-1)                     n!^(d-1)       n^d
    OS_TUPLE           p^(d(d-1)(p-1)) (p^(d-1)-1)!^(dp) (p^(d-1))!^(dp) p^(d^2)
    LH_EDGE_ALL        (n-1)!^(d-1) n^(d-2)             n!^(d-1)       n^2 C(d,2)
    LH_EDGE_SUBBLOCK   (p^d-1)!^(d-1) p^(d^2-2d)        (p^d)!^(d-1)   p^(2d-2)

For the tuple kinds, a is the number of trials containing a fixed grid
cell and scale the number of cells. For the edge kinds, units are value
pairs on axis pairs: a is the number of Latin trials containing a fixed
pair (equal to (n-1)! n!^(d-2)), and scale counts the pairs in play:
all n^2 C(d,2) of them, or the p^(2d-2) pairs of a single coarse cell
of one axis pair's quotient grid. Coverage is always reported against
scale, so it lies in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .design import DesignSpec
from .errors import CapExceededError, GuardExceededError, StructuralError

ExactRational = Fraction

# Refuse factorial work whose operands would exceed this many bits.
BIGINT_GUARD_BITS = 1_000_000

# Inclusion-exclusion term cap; beyond this the closed-form laws apply.
DEFAULT_COVERAGE_CAP = 512


class IntersectionKind(str, Enum):
    LHS_TUPLE = "lhs"
    OS_TUPLE = "os"
    LH_EDGE_ALL = "edge"
    LH_EDGE_SUBBLOCK = "edge-subblock"


@dataclass(frozen=True)
class KindParams:
    a: int  # trials containing a fixed unit
    b: int  # total trials
    scale: int  # number of units


def _check_bigint_guard(spec: DesignSpec) -> None:
    bits = math.ceil(spec.d * spec.n * math.log2(max(spec.n, 2)))
    if bits > BIGINT_GUARD_BITS:
        raise GuardExceededError(
            f"factorial work near {bits} bits exceeds guard of {BIGINT_GUARD_BITS}"
        )


def count_lh_trials(spec: DesignSpec) -> int:
    """Number of distinct Latin hypercube trials: n!^(d-1)."""
    _check_bigint_guard(spec)
    return math.factorial(spec.n) ** (spec.d - 1)


def count_os_trials(spec: DesignSpec) -> int:
    """Number of distinct orthogonal trials: (p^(d-1))!^(dp)."""
    p = spec.require_p()
    _check_bigint_guard(spec)
    return math.factorial(p ** (spec.d - 1)) ** (spec.d * p)


def count_trials_containing_tuple(spec: DesignSpec, kind: IntersectionKind) -> int:
    """Trials of the ensemble that contain one fixed grid cell."""
    if kind not in (IntersectionKind.LHS_TUPLE, IntersectionKind.OS_TUPLE):
        raise StructuralError(f"tuple containment undefined for kind {kind.value}")
    return kind_params(kind, spec).a


def count_trials_containing_edge(spec: DesignSpec) -> int:
    """Latin trials containing a fixed axis-pair value pair: (n-1)! n!^(d-2)."""
    _check_bigint_guard(spec)
    n, d = spec.n, spec.d
    return math.factorial(n - 1) * math.factorial(n) ** (d - 2)


def kind_params(kind: IntersectionKind, spec: DesignSpec) -> KindParams:
    """(a, b, scale) for the kind; see the module docstring table."""
    _check_bigint_guard(spec)
    n, d = spec.n, spec.d
    if kind is IntersectionKind.LHS_TUPLE:
        return KindParams(
            a=math.factorial(n - 1) ** (d - 1),
            b=math.factorial(n) ** (d - 1),
            scale=n**d,
        )
    if kind is IntersectionKind.OS_TUPLE:
        p = spec.require_p()
        w = p ** (d - 1)
        return KindParams(
            a=p ** (d * (d - 1) * (p - 1)) * math.factorial(w - 1) ** (d * p),
            b=math.factorial(w) ** (d * p),
            scale=p ** (d * d),
        )
    if kind is IntersectionKind.LH_EDGE_ALL:
        return KindParams(
            a=math.factorial(n - 1) ** (d - 1) * n ** (d - 2),
            b=math.factorial(n) ** (d - 1),
            scale=n * n * math.comb(d, 2),
        )
    if kind is IntersectionKind.LH_EDGE_SUBBLOCK:
        p = spec.require_p()
        return KindParams(
            a=math.factorial(p**d - 1) ** (d - 1) * p ** (d * d - 2 * d),
            b=math.factorial(p**d) ** (d - 1),
            scale=p ** (2 * d - 2),
        )
    raise StructuralError(f"unknown kind {kind!r}")


def intersection_ratio(kind: IntersectionKind, spec: DesignSpec, m: int) -> Fraction:
    """prod_{i=0}^{m-1} (a+i)/(b+i), the per-unit m-fold containment rate."""
    if m < 0:
        raise StructuralError(f"m must be >= 0, got {m}")
    kp = kind_params(kind, spec)
    out = Fraction(1)
    for i in range(m):
        out *= Fraction(kp.a + i, kp.b + i)
    return out


def expected_intersection(kind: IntersectionKind, spec: DesignSpec, m: int) -> Fraction:
    """Expected number of units common to m trials drawn with repetition."""
    if m < 1:
        raise StructuralError(f"m must be >= 1, got {m}")
    kp = kind_params(kind, spec)
    return kp.scale * intersection_ratio(kind, spec, m)


def expected_coverage_multiset(
    kind: IntersectionKind, spec: DesignSpec, k: int, cap: int = DEFAULT_COVERAGE_CAP
) -> Fraction:
    """Expected fraction of units covered by at least one of k pooled trials.

    Exact under drawing the k trials with repetition. k above the cap is
    refused; use the closed-form laws module for large k.
    """
    if k < 0:
        raise StructuralError(f"k must be >= 0, got {k}")
    if k > cap:
        raise CapExceededError(
            f"k={k} exceeds cap {cap}; use the closed-form coverage laws for large k"
        )
    kp = kind_params(kind, spec)
    total = Fraction(0)
    ratio = Fraction(1)
    binom = 1
    for m in range(1, k + 1):
        ratio *= Fraction(kp.a + m - 1, kp.b + m - 1)
        binom = binom * (k - m + 1) // m
        term = binom * ratio
        total += term if m % 2 == 1 else -term
    return total


def expected_covered_cells_multiset(
    kind: IntersectionKind, spec: DesignSpec, k: int, cap: int = DEFAULT_COVERAGE_CAP
) -> Fraction:
    """Expected number of distinct units covered by k pooled trials."""
    kp = kind_params(kind, spec)
    return kp.scale * expected_coverage_multiset(kind, spec, k, cap=cap)


def coverage_universe(kind: IntersectionKind, spec: DesignSpec) -> int:
    """Unit count that coverage for this kind is normalized against."""
    return kind_params(kind, spec).scale
