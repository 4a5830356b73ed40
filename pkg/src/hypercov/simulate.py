"""Monte Carlo coverage estimation over replicated trial pools.

A replicate draws k i.i.d. trials (replicate r uses substream
fold(seed, r), trial t inside it fold(rep_seed, t)) and counts distinct
covered keys for each requested target:

    FULL_TUPLE      grid cells, universe n^d
    PROJECTED(t)    cells of a t-axis projection, universe n^t
                    (default axes 1..t, arbitrary subsets allowed)
    SUBBLOCK_EDGE   fine value pairs inside one coarse cell of an axis
                    pair's quotient grid, universe p^(2(d-1))

Keys are radix-encoded into int64 and counted with np.unique; when the
key space does not fit int64 the rows themselves are deduplicated
(np.unique over rows). Per-replicate coverage fractions are exact
integer ratios converted to float once; aggregation is sequential in
replicate order with math.fsum, so reports are bit-stable for a fixed
seed regardless of worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from statistics import NormalDist
from typing import Sequence, Union

import numpy as np

from . import rng
from .design import DesignSpec, EdgeProjection, Trial, band_width
from .errors import (
    CapExceededError,
    GuardExceededError,
    StructuralError,
    UnsupportedSpecError,
)
from .exact import IntersectionKind, expected_coverage_multiset
from .laws import asymptotic_law, coverage_closed_form, iid_law
from .sampling import SampleKind, points_batch, replicate_seed

MAX_TRACKED_KEYS = 20_000_000  # k * n per replicate

Z99 = NormalDist().inv_cdf(0.995)


@dataclass(frozen=True)
class FullTuple:
    pass


@dataclass(frozen=True)
class Projected:
    t: int
    dims: tuple[int, ...] | None = None  # default: axes 1..t


@dataclass(frozen=True)
class SubblockEdge:
    i: int
    j: int
    pi: int
    pj: int


Target = Union[FullTuple, Projected, SubblockEdge]


def target_label(target: Target) -> str:
    if isinstance(target, FullTuple):
        return "full"
    if isinstance(target, Projected):
        if target.dims is not None:
            return f"proj:{target.t}@" + ",".join(str(v) for v in target.dims)
        return f"proj:{target.t}"
    return f"edge:{target.i},{target.j},{target.pi},{target.pj}"


def validate_target(spec: DesignSpec, target: Target) -> None:
    if isinstance(target, Projected):
        if not (1 <= target.t <= spec.d):
            raise StructuralError(f"t must be in [1, {spec.d}], got {target.t}")
        if target.dims is not None:
            if len(target.dims) != target.t or len(set(target.dims)) != target.t:
                raise StructuralError(f"need {target.t} distinct axes, got {target.dims}")
            if any(not (1 <= v <= spec.d) for v in target.dims):
                raise StructuralError(f"axes {target.dims} outside [1, {spec.d}]")
    elif isinstance(target, SubblockEdge):
        p = spec.require_p()
        EdgeProjection(target.i, target.j, coarse=(target.pi, target.pj)).validate_for(spec)
        if not (1 <= target.pi <= p and 1 <= target.pj <= p):
            raise StructuralError(f"coarse bands outside [1, {p}]")


def _proj_dims(spec: DesignSpec, target: Target) -> tuple[int, ...]:
    if isinstance(target, FullTuple):
        return tuple(range(1, spec.d + 1))
    assert isinstance(target, Projected)
    return target.dims if target.dims is not None else tuple(range(1, target.t + 1))


def target_universe(spec: DesignSpec, target: Target) -> int:
    if isinstance(target, SubblockEdge):
        return band_width(spec.require_p(), spec.d) ** 2
    return spec.n ** len(_proj_dims(spec, target))


def target_lambda(spec: DesignSpec, target: Target) -> float:
    """Per-key hit rate of a single trial: n^(1-t) for t-axis keys, 1/n
    for sub-block edge keys. Holds for both samplers."""
    if isinstance(target, SubblockEdge):
        return 1.0 / spec.n
    t = len(_proj_dims(spec, target))
    return float(spec.n) ** (1 - t)


@dataclass(frozen=True)
class SimPlan:
    spec: DesignSpec
    kind: SampleKind
    k: int
    reps: int
    targets: tuple[Target, ...] = (FullTuple(),)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise StructuralError(f"k must be >= 1, got {self.k}")
        if self.reps < 1:
            raise StructuralError(f"reps must be >= 1, got {self.reps}")
        if not self.targets:
            raise StructuralError("at least one target required")
        if self.kind is SampleKind.OS:
            self.spec.require_p()
        for target in self.targets:
            validate_target(self.spec, target)
        if self.k * self.spec.n > MAX_TRACKED_KEYS:
            raise GuardExceededError(
                f"k*n = {self.k * self.spec.n} keys exceed guard {MAX_TRACKED_KEYS}"
            )


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    sd: float
    se: float
    ci_low: float
    ci_high: float


def summarize(values: Sequence[float]) -> SummaryStats:
    """Mean, sample sd (n-1), standard error, 99% normal interval."""
    vals = [float(v) for v in values]
    if not vals:
        raise StructuralError("cannot summarize an empty sequence")
    m = math.fsum(vals) / len(vals)
    if len(vals) > 1:
        sd = math.sqrt(math.fsum((v - m) ** 2 for v in vals) / (len(vals) - 1))
    else:
        sd = 0.0
    se = sd / math.sqrt(len(vals))
    return SummaryStats(m, sd, se, m - Z99 * se, m + Z99 * se)


@dataclass(frozen=True)
class CoverageReport:
    target: Target
    fractions: tuple[float, ...]
    mean: float
    sd: float
    se: float
    ci_low: float
    ci_high: float
    ref_iid: float
    ref_asym: float
    ref_multiset: float | None


def _keys_for_target(
    points: np.ndarray, spec: DesignSpec, target: Target
) -> tuple[np.ndarray, np.ndarray]:
    """(keys, per-trial key counts). keys is 1-D codes or 2-D rows."""
    k, n_rows = points.shape[0], points.shape[1]
    if isinstance(target, SubblockEdge):
        w = band_width(spec.require_p(), spec.d)
        ai = points[:, :, target.i - 1] - 1
        aj = points[:, :, target.j - 1] - 1
        mask = (ai // w == target.pi - 1) & (aj // w == target.pj - 1)
        codes = (ai % w)[mask] * np.int64(w) + (aj % w)[mask]
        return codes, mask.sum(axis=1)
    dims = _proj_dims(spec, target)
    sel = points[:, :, [v - 1 for v in dims]]
    counts = np.full(k, n_rows, dtype=np.int64)
    if spec.n ** len(dims) <= 2**63:
        codes = np.zeros((k, n_rows), dtype=np.int64)
        for q in range(len(dims)):
            codes = codes * np.int64(spec.n) + (sel[:, :, q] - 1)
        return codes.reshape(-1), counts
    return sel.reshape(-1, len(dims)), counts


def _covered_count(points: np.ndarray, spec: DesignSpec, target: Target) -> int:
    keys, _ = _keys_for_target(points, spec, target)
    if keys.ndim == 1:
        return int(np.unique(keys).size)
    return int(np.unique(keys, axis=0).shape[0])


def replicate_points(spec: DesignSpec, kind: SampleKind, rep_seed: int, k: int) -> np.ndarray:
    """The k trials of one replicate, shape (k, n, d)."""
    seeds = rng.fold_array(rep_seed, np.arange(1, k + 1))
    return points_batch(spec, kind, seeds)


def coverage_curve(
    spec: DesignSpec, kind: SampleKind, rep_seed: int, k: int, target: Target
) -> np.ndarray:
    """Distinct covered keys after each trial prefix 1..k (one replicate).

    Nondecreasing by construction; entry k-1 equals the replicate's
    final covered count.
    """
    validate_target(spec, target)
    if k * spec.n > MAX_TRACKED_KEYS:
        raise GuardExceededError(
            f"k*n = {k * spec.n} keys exceed guard {MAX_TRACKED_KEYS}"
        )
    points = replicate_points(spec, kind, rep_seed, k)
    keys, counts = _keys_for_target(points, spec, target)
    if keys.ndim == 1:
        first = np.unique(keys, return_index=True)[1]
    else:
        first = np.unique(keys, axis=0, return_index=True)[1]
    first.sort()
    return np.searchsorted(first, np.cumsum(counts), side="left").astype(np.int64)


def _replicate_counts(plan: SimPlan, rep_ids: Sequence[int]) -> list[tuple[int, list[int]]]:
    out = []
    for r in rep_ids:
        points = replicate_points(plan.spec, plan.kind, replicate_seed(plan.seed, r), plan.k)
        out.append((r, [_covered_count(points, plan.spec, tgt) for tgt in plan.targets]))
    return out


def _worker(args: tuple[SimPlan, list[int]]) -> list[tuple[int, list[int]]]:
    return _replicate_counts(*args)


def _ref_multiset(plan: SimPlan, target: Target) -> float | None:
    kind = None
    if isinstance(target, FullTuple) or (
        isinstance(target, Projected) and len(_proj_dims(plan.spec, target)) == plan.spec.d
    ):
        kind = (
            IntersectionKind.LHS_TUPLE
            if plan.kind is SampleKind.LHS
            else IntersectionKind.OS_TUPLE
        )
    elif isinstance(target, SubblockEdge) and plan.kind is SampleKind.LHS:
        kind = IntersectionKind.LH_EDGE_SUBBLOCK
    if kind is None:
        return None
    try:
        return float(expected_coverage_multiset(kind, plan.spec, plan.k))
    except (CapExceededError, GuardExceededError, UnsupportedSpecError):
        return None


def simulate_coverage(plan: SimPlan, workers: int = 1) -> list[CoverageReport]:
    """One CoverageReport per target, in plan order."""
    rep_ids = list(range(1, plan.reps + 1))
    if workers <= 1 or plan.reps < 4:
        rows = _replicate_counts(plan, rep_ids)
    else:
        chunks = [
            (plan, rep_ids[c::workers]) for c in range(min(workers, plan.reps))
        ]
        rows = []
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            for part in pool.map(_worker, chunks):
                rows.extend(part)
        rows.sort(key=lambda item: item[0])

    reports = []
    for ti, target in enumerate(plan.targets):
        universe = target_universe(plan.spec, target)
        fracs = tuple(counts[ti] / universe for _, counts in rows)
        stats = summarize(fracs)
        lam = target_lambda(plan.spec, target)
        reports.append(
            CoverageReport(
                target=target,
                fractions=fracs,
                mean=stats.mean,
                sd=stats.sd,
                se=stats.se,
                ci_low=stats.ci_low,
                ci_high=stats.ci_high,
                ref_iid=coverage_closed_form(iid_law(lam, plan.k)),
                ref_asym=coverage_closed_form(asymptotic_law(lam, plan.k)),
                ref_multiset=_ref_multiset(plan, target),
            )
        )
    return reports


@dataclass(frozen=True)
class UniformityStats:
    counts: tuple[int, ...]  # p*p coarse cells of axes (i, j), lex order
    mean_count: float
    count_variance: float  # population variance
    chi_square: float


def subblock_uniformity(trials: Sequence[Trial], e: EdgeProjection) -> UniformityStats:
    """Dispersion of pooled point counts over the p x p coarse grid of
    axes (i, j). A single orthogonal trial is perfectly even: variance 0."""
    if not trials:
        raise StructuralError("need at least one trial")
    spec = trials[0].spec
    p = spec.require_p()
    e.validate_for(spec)
    w = band_width(p, spec.d)
    cells = np.zeros(p * p, dtype=np.int64)
    for trial in trials:
        if trial.spec != spec:
            raise StructuralError("all trials must share one spec")
        for row in trial.points:
            bi = (row[e.i - 1] - 1) // w
            bj = (row[e.j - 1] - 1) // w
            cells[bi * p + bj] += 1
    total = int(cells.sum())
    mean = total / (p * p)
    var = math.fsum((int(c) - mean) ** 2 for c in cells) / (p * p)
    chi = math.fsum((int(c) - mean) ** 2 for c in cells) / mean if mean > 0 else 0.0
    return UniformityStats(tuple(int(c) for c in cells), mean, var, chi)
