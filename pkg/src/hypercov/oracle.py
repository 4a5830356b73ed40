"""Brute-force oracles: enumerate whole trial ensembles and average.

Everything here is deliberately naive. Trials are enumerated outright,
multisets of trials are iterated with itertools, and expectations are
exact Fraction averages. Guards refuse anything that would not finish
at a desk; the point of this module is to check the closed-form module
on small instances, not to scale.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, permutations, product
from typing import Literal, Union

from .design import DesignSpec, EdgeProjection, Trial, all_edge_pairs, band_width
from .errors import GuardExceededError, StructuralError
from .exact import (
    IntersectionKind,
    count_os_trials,
    count_lh_trials,
    count_trials_containing_edge,
    count_trials_containing_tuple,
    expected_coverage_multiset,
    expected_intersection,
)
from .sampling import SampleKind, assemble_orthogonal

ENUM_GUARD = 100_000
MULTISET_GUARD = 10_000_000
GRID_GUARD = 1_000_000

Projection = Union[EdgeProjection, Literal["all-edges"], None]


@dataclass(frozen=True)
class EnumeratedTrialSet:
    spec: DesignSpec
    kind: SampleKind
    trials: tuple[Trial, ...]


def enumerate_trials(spec: DesignSpec, kind: SampleKind, guard: int = ENUM_GUARD) -> EnumeratedTrialSet:
    """Every distinct trial of the ensemble, exactly once.

    Latin trials are enumerated in canonical form: rows sorted by the
    first coordinate, which pins column 1 to (1..n) and leaves columns
    2..d as free permutations. Orthogonal trials are enumerated through
    the fine-permutation assembly bijection.
    """
    if kind is SampleKind.LHS:
        total = count_lh_trials(spec)
        if total > guard:
            raise GuardExceededError(f"{total} trials exceed enumeration guard {guard}")
        n, d = spec.n, spec.d
        base = list(permutations(range(1, n + 1)))
        trials = []
        for rest in product(base, repeat=d - 1):
            rows = tuple((r,) + tuple(col[r - 1] for col in rest) for r in range(1, n + 1))
            trials.append(Trial(spec, rows))
        assert len(trials) == total
        return EnumeratedTrialSet(spec, kind, tuple(trials))

    p = spec.require_p()
    total = count_os_trials(spec)
    if total > guard:
        raise GuardExceededError(f"{total} trials exceed enumeration guard {guard}")
    w = band_width(p, spec.d)
    slots = [(i, j) for i in range(1, spec.d + 1) for j in range(1, p + 1)]
    base = list(permutations(range(1, w + 1)))
    trials = []
    for choice in product(base, repeat=len(slots)):
        fine = dict(zip(slots, choice))
        trials.append(assemble_orthogonal(spec, fine))
    # the assembly is a bijection, so no duplicates can appear
    assert len(set(trials)) == total
    return EnumeratedTrialSet(spec, SampleKind.OS, tuple(trials))


def _unit_sets(ts: EnumeratedTrialSet, projection: Projection) -> list[frozenset]:
    if projection is None:
        return [frozenset(t.points) for t in ts.trials]
    if projection == "all-edges":
        pairs = [EdgeProjection(i, j) for i, j in all_edge_pairs(ts.spec.d)]
        out = []
        for t in ts.trials:
            units: set = set()
            for e in pairs:
                for a, b in _project(t, e):
                    units.add((e.i, e.j, a, b))
            out.append(frozenset(units))
        return out
    return [_project(t, projection) for t in ts.trials]


def _project(trial: Trial, e: EdgeProjection) -> frozenset:
    from .design import project_edges

    return project_edges(trial, e)


def _universe(ts: EnumeratedTrialSet, projection: Projection) -> int:
    n, d = ts.spec.n, ts.spec.d
    if projection is None:
        return n**d
    if projection == "all-edges":
        return n * n * math.comb(d, 2)
    if projection.coarse is not None:
        return band_width(ts.spec.require_p(), d) ** 2
    return n * n


def _check_multiset_guard(b: int, m: int, guard: int) -> None:
    if math.comb(b + m - 1, m) > guard:
        raise GuardExceededError(
            f"{math.comb(b + m - 1, m)} multisets exceed guard {guard}"
        )


def oracle_expected_intersection(
    ts: EnumeratedTrialSet,
    m: int,
    projection: Projection = None,
    guard: int = MULTISET_GUARD,
) -> Fraction:
    """Average number of units common to all trials of an m-multiset."""
    if m < 1:
        raise StructuralError(f"m must be >= 1, got {m}")
    _check_multiset_guard(len(ts.trials), m, guard)
    units = _unit_sets(ts, projection)
    total = 0
    count = 0
    for combo in combinations_with_replacement(range(len(units)), m):
        common = units[combo[0]]
        for idx in set(combo[1:]):
            common = common & units[idx]
        total += len(common)
        count += 1
    return Fraction(total, count)


def oracle_expected_coverage(
    ts: EnumeratedTrialSet,
    k: int,
    projection: Projection = None,
    guard: int = MULTISET_GUARD,
) -> Fraction:
    """Average fraction of the unit universe covered by a k-multiset."""
    if k < 1:
        raise StructuralError(f"k must be >= 1, got {k}")
    _check_multiset_guard(len(ts.trials), k, guard)
    units = _unit_sets(ts, projection)
    universe = _universe(ts, projection)
    total = 0
    count = 0
    for combo in combinations_with_replacement(range(len(units)), k):
        covered: set = set()
        for idx in set(combo):
            covered |= units[idx]
        total += len(covered)
        count += 1
    return Fraction(total, count * universe)


def tuple_occurrence_counts(ts: EnumeratedTrialSet) -> dict[tuple[int, ...], int]:
    """How many trials of the ensemble contain each grid cell (zeros kept)."""
    n, d = ts.spec.n, ts.spec.d
    if n**d > GRID_GUARD:
        raise GuardExceededError(f"grid of {n**d} cells exceeds guard {GRID_GUARD}")
    counts: Counter = Counter()
    for t in ts.trials:
        counts.update(t.points)
    return {cell: counts.get(cell, 0) for cell in product(range(1, n + 1), repeat=d)}


def edge_occurrence_counts(
    ts: EnumeratedTrialSet, e: EdgeProjection
) -> dict[tuple[int, int], int]:
    """How many trials contain each (a_i, a_j) value pair on axes (i, j)."""
    e.validate_for(ts.spec)
    n = ts.spec.n
    counts: Counter = Counter()
    for t in ts.trials:
        counts.update(_project(t, e))
    return {pair: counts.get(pair, 0) for pair in product(range(1, n + 1), repeat=2)}


# --- verification suite -----------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    oracle: str
    expected: str
    match: bool


def _intersection_check(
    name: str,
    ts: EnumeratedTrialSet,
    kind: IntersectionKind,
    m: int,
    projection: Projection = None,
) -> CheckResult:
    got = oracle_expected_intersection(ts, m, projection)
    want = expected_intersection(kind, ts.spec, m)
    return CheckResult(name, str(got), str(want), got == want)


def _coverage_check(
    name: str,
    ts: EnumeratedTrialSet,
    kind: IntersectionKind,
    k: int,
    projection: Projection = None,
) -> CheckResult:
    got = oracle_expected_coverage(ts, k, projection)
    want = expected_coverage_multiset(kind, ts.spec, k)
    return CheckResult(name, str(got), str(want), got == want)


def _constant_count_check(name: str, counts: dict, want: int) -> CheckResult:
    distinct = sorted(set(counts.values()))
    got = str(distinct[0]) if len(distinct) == 1 else f"varies {distinct}"
    return CheckResult(name, got, str(want), distinct == [want])


def default_verification_suite() -> list[CheckResult]:
    """Oracle vs exact-count agreement on the standard tiny instances."""
    d2n2 = DesignSpec(2, 2)
    d2n3 = DesignSpec(2, 3)
    d3n2 = DesignSpec(3, 2)
    d2p2 = DesignSpec(2, 4, 2)

    lhs_d2n2 = enumerate_trials(d2n2, SampleKind.LHS)
    lhs_d2n3 = enumerate_trials(d2n3, SampleKind.LHS)
    lhs_d3n2 = enumerate_trials(d3n2, SampleKind.LHS)
    lhs_d2p2 = enumerate_trials(d2p2, SampleKind.LHS)
    os_d2p2 = enumerate_trials(d2p2, SampleKind.OS)

    checks: list[CheckResult] = []
    for m in (1, 2, 3):
        checks.append(
            _intersection_check(
                f"intersection lhs d=2 n=2 m={m}", lhs_d2n2, IntersectionKind.LHS_TUPLE, m
            )
        )
    for m in (1, 2):
        checks.append(
            _intersection_check(
                f"intersection lhs d=2 n=3 m={m}", lhs_d2n3, IntersectionKind.LHS_TUPLE, m
            )
        )
        checks.append(
            _intersection_check(
                f"intersection lhs d=3 n=2 m={m}", lhs_d3n2, IntersectionKind.LHS_TUPLE, m
            )
        )
        checks.append(
            _intersection_check(
                f"intersection os d=2 p=2 m={m}", os_d2p2, IntersectionKind.OS_TUPLE, m
            )
        )
        checks.append(
            _intersection_check(
                f"intersection edges d=3 n=2 m={m}",
                lhs_d3n2,
                IntersectionKind.LH_EDGE_ALL,
                m,
                projection="all-edges",
            )
        )
        checks.append(
            _intersection_check(
                f"intersection sub-block edge d=2 p=2 m={m}",
                lhs_d2p2,
                IntersectionKind.LH_EDGE_SUBBLOCK,
                m,
                projection=EdgeProjection(1, 2, coarse=(1, 1)),
            )
        )
    for k in (1, 2, 3):
        checks.append(
            _coverage_check(
                f"coverage lhs d=2 n=2 k={k}", lhs_d2n2, IntersectionKind.LHS_TUPLE, k
            )
        )
    checks.append(
        _coverage_check(
            "coverage os d=2 p=2 k=2", os_d2p2, IntersectionKind.OS_TUPLE, 2
        )
    )
    checks.append(
        _coverage_check(
            "coverage sub-block edge d=2 p=2 k=2",
            lhs_d2p2,
            IntersectionKind.LH_EDGE_SUBBLOCK,
            2,
            projection=EdgeProjection(1, 2, coarse=(1, 1)),
        )
    )
    checks.append(
        CheckResult(
            "count os d=2 p=2",
            str(len(os_d2p2.trials)),
            str(count_os_trials(d2p2)),
            len(os_d2p2.trials) == count_os_trials(d2p2) == 16,
        )
    )
    checks.append(
        CheckResult(
            "count lhs d=2 n=3",
            str(len(lhs_d2n3.trials)),
            str(count_lh_trials(d2n3)),
            len(lhs_d2n3.trials) == count_lh_trials(d2n3) == 6,
        )
    )
    checks.append(
        _constant_count_check(
            "cell occurrence lhs d=2 n=3",
            tuple_occurrence_counts(lhs_d2n3),
            count_trials_containing_tuple(d2n3, IntersectionKind.LHS_TUPLE),
        )
    )
    checks.append(
        _constant_count_check(
            "cell occurrence os d=2 p=2",
            tuple_occurrence_counts(os_d2p2),
            count_trials_containing_tuple(d2p2, IntersectionKind.OS_TUPLE),
        )
    )
    for i, j in all_edge_pairs(3):
        checks.append(
            _constant_count_check(
                f"edge occurrence lhs d=3 n=2 axes=({i},{j})",
                edge_occurrence_counts(lhs_d3n2, EdgeProjection(i, j)),
                count_trials_containing_edge(d3n2),
            )
        )
    return checks
