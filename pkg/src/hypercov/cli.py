"""Command line interface.

Subcommands: gen, exact, law, simulate, oracle, sweep, verify.

Exit codes: 0 success, 2 usage, 3 guard/cap refusal, 4 verification
mismatch, 5 I/O failure.

Every artifact starts with a provenance header: package version, seed,
a 12-hex hash of the canonical run config, and the config JSON itself.
Feeding that JSON back through --config reproduces the artifact byte
for byte. Flags always win over --config values; the seed falls back
to the HYPERCOV_SEED environment variable, then to 0. Output paths and
worker counts are routing, not content, so they stay out of the hash.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Any, Sequence

from . import __version__
from .design import DesignSpec, EdgeProjection, trial_to_json
from .errors import (
    GuardExceededError,
    HypercovError,
    InvalidModeError,
    StructuralError,
    UnsupportedSpecError,
)
from .exact import (
    IntersectionKind,
    count_trials_containing_edge,
    count_trials_containing_tuple,
    expected_coverage_multiset,
    expected_intersection,
)
from .laws import (
    LawModel,
    asymptotic_law,
    bracket_exact_vs_asymptotic,
    conjecture_law,
    coverage_closed_form,
    iid_law,
    lambda_for,
)
from .oracle import (
    default_verification_suite,
    edge_occurrence_counts,
    enumerate_trials,
    oracle_expected_coverage,
    oracle_expected_intersection,
    tuple_occurrence_counts,
)
from .sampling import SampleKind, SamplerConfig, gen_trials, trial_seed
from .simulate import (
    FullTuple,
    Projected,
    SimPlan,
    SubblockEdge,
    Target,
    simulate_coverage,
    target_label,
)
from .sweep import SweepMode, run_sweep as sweep_run

REQUIRED = object()

# (default, type tag); type tags drive config-file normalization
SCHEMAS: dict[str, dict[str, tuple[Any, str]]] = {
    "gen": {
        "kind": ("lhs", "str"),
        "d": (REQUIRED, "int"),
        "n": (REQUIRED, "int"),
        "p": (None, "int"),
        "k": (1, "int"),
        "seed": (None, "seed"),
        "format": ("csv", "str"),
    },
    "exact": {
        "kind": (REQUIRED, "str"),
        "d": (REQUIRED, "int"),
        "n": (REQUIRED, "int"),
        "p": (None, "int"),
        "m": (None, "int_list"),
        "k": (None, "int_list"),
        "format": ("decimal:12", "str"),
    },
    "law": {
        "model": (REQUIRED, "str"),
        "kind": (None, "str"),
        "d": (None, "int"),
        "n": (None, "int"),
        "p": (None, "int"),
        "t": (None, "int"),
        "k": (REQUIRED, "int_list"),
    },
    "simulate": {
        "kind": ("lhs", "str"),
        "d": (REQUIRED, "int"),
        "n": (REQUIRED, "int"),
        "p": (None, "int"),
        "k": (REQUIRED, "int"),
        "reps": (REQUIRED, "int"),
        "target": (["full"], "str_list"),
        "dims": (None, "int_list"),
        "seed": (None, "seed"),
    },
    "oracle": {
        "kind": ("lhs", "str"),
        "d": (REQUIRED, "int"),
        "n": (REQUIRED, "int"),
        "p": (None, "int"),
        "mode": (REQUIRED, "str"),
        "m": (None, "int_list"),
        "k": (None, "int_list"),
        "edge": (None, "str"),
    },
    "sweep": {
        "kind": ("lhs", "str"),
        "d": (REQUIRED, "int"),
        "t": (REQUIRED, "int"),
        "levels": (REQUIRED, "float_list"),
        "n_grid": (REQUIRED, "int_list"),
        "mode": (REQUIRED, "str"),
        "reps": (400, "int"),
        "seed": (None, "seed"),
    },
    "verify": {},
}


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    params: dict


def canonical_config_json(config: RunConfig) -> str:
    return json.dumps(
        {"subcommand": config.subcommand, "params": config.params},
        sort_keys=True,
        separators=(",", ":"),
    )


def config_hash(config: RunConfig) -> str:
    return hashlib.sha256(canonical_config_json(config).encode()).hexdigest()[:12]


def provenance_lines(config: RunConfig) -> list[str]:
    seed = config.params.get("seed", "-")
    return [
        f"# hypercov {__version__}",
        f"# seed={seed}",
        f"# config_hash={config_hash(config)}",
        f"# config={canonical_config_json(config)}",
    ]


def _csv_row(fields: Sequence[Any]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="").writerow(list(fields))
    return buf.getvalue()


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def _emit(out: str | None, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# --- parameter resolution ---------------------------------------------------


def _normalize(tag: str, value: Any) -> Any:
    if value is None:
        return None
    if tag in ("int", "seed"):
        return int(value)
    if tag == "float":
        return float(value)
    if tag == "str":
        return str(value)
    if tag == "int_list":
        if isinstance(value, str):
            value = value.split(",")
        return [int(v) for v in value]
    if tag == "float_list":
        if isinstance(value, str):
            value = value.split(",")
        return [float(v) for v in value]
    if tag == "str_list":
        if isinstance(value, str):
            value = [value]
        return [str(v) for v in value]
    raise AssertionError(tag)


def _load_config_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise StructuralError("config file must hold a JSON object")
    if "params" in obj and isinstance(obj["params"], dict):
        obj = obj["params"]
    obj.pop("subcommand", None)
    return obj


def resolve_params(sub: str, args: argparse.Namespace) -> RunConfig:
    schema = SCHEMAS[sub]
    file_values: dict = {}
    if getattr(args, "config", None):
        file_values = _load_config_file(args.config)
        unknown = set(file_values) - set(schema) - {"out", "workers"}
        if unknown:
            raise StructuralError(f"unknown config keys: {sorted(unknown)}")
    params: dict = {}
    for name, (default, tag) in schema.items():
        value = getattr(args, name, None)
        if value is None and name in file_values:
            value = file_values[name]
        if value is None:
            if default is REQUIRED:
                raise StructuralError(f"missing required parameter --{name.replace('_', '-')}")
            value = default
        if tag == "seed" and value is None:
            env = os.environ.get("HYPERCOV_SEED")
            value = int(env) if env is not None else 0
        params[name] = _normalize(tag, value)
    return RunConfig(sub, params)


def _spec_from(params: dict) -> DesignSpec:
    return DesignSpec(params["d"], params["n"], params.get("p"))


def parse_target(text: str) -> Target:
    if text == "full":
        return FullTuple()
    if text.startswith("proj:"):
        body = text[len("proj:") :]
        if "@" in body:
            t_str, dims_str = body.split("@", 1)
            dims = tuple(int(v) for v in dims_str.split(","))
            return Projected(int(t_str), dims)
        return Projected(int(body))
    if text.startswith("edge:"):
        parts = text[len("edge:") :].split(",")
        if len(parts) != 4:
            raise StructuralError(f"edge target needs i,j,pi,pj, got {text!r}")
        i, j, pi, pj = (int(v) for v in parts)
        return SubblockEdge(i, j, pi, pj)
    raise StructuralError(f"unknown target {text!r}")


def _parse_edge(text: str | None, spec: DesignSpec) -> EdgeProjection | None:
    if text is None:
        return None
    parts = [int(v) for v in text.split(",")]
    if len(parts) == 2:
        e = EdgeProjection(parts[0], parts[1])
    elif len(parts) == 4:
        e = EdgeProjection(parts[0], parts[1], coarse=(parts[2], parts[3]))
    else:
        raise StructuralError(f"--edge needs i,j or i,j,pi,pj, got {text!r}")
    e.validate_for(spec)
    return e


# --- subcommand runners -----------------------------------------------------


def _run_gen(config: RunConfig, out: str | None) -> int:
    params = config.params
    spec = _spec_from(params)
    kind = SampleKind(params["kind"])
    seed = params["seed"]
    trials = gen_trials(SamplerConfig(spec, seed, kind), params["k"])
    if params["format"] == "json":
        doc = {
            "provenance": {
                "version": __version__,
                "seed": seed,
                "config_hash": config_hash(config),
                "config": json.loads(canonical_config_json(config)),
            },
            "trials": [
                json.loads(trial_to_json(trial, trial_seed(seed, t + 1), kind.value))
                for t, trial in enumerate(trials)
            ],
        }
        _emit(out, [json.dumps(doc, sort_keys=True, separators=(",", ":"))])
        return 0
    if params["format"] != "csv":
        raise StructuralError(f"unknown format {params['format']!r}")
    lines = provenance_lines(config)
    for t, trial in enumerate(trials, start=1):
        lines.append(f"# trial {t}")
        lines.extend(",".join(str(v) for v in row) for row in trial.points)
    _emit(out, lines)
    return 0


def _parse_format(text: str) -> int | None:
    """Digits of the decimal column; None means rational only."""
    if text == "rational":
        return None
    if text.startswith("decimal:"):
        digits = int(text[len("decimal:") :])
        if digits < 1:
            raise StructuralError("decimal digits must be >= 1")
        return digits
    raise StructuralError(f"--format must be rational or decimal:<digits>, got {text!r}")


def _decimal_str(value: Fraction, digits: int) -> str:
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(value.numerator) / Decimal(value.denominator))


def _run_exact(config: RunConfig, out: str | None) -> int:
    params = config.params
    kind = IntersectionKind(params["kind"])
    spec = _spec_from(params)
    digits = _parse_format(params["format"])
    ms, ks = params.get("m"), params.get("k")
    if (ms is None) == (ks is None):
        raise StructuralError("exactly one of --m and --k is required")
    lines = provenance_lines(config)
    lines.append("kind,d,n,p,m_or_k,value_num,value_den,value_decimal")
    for q in ms if ms is not None else ks:
        if ms is not None:
            value = expected_intersection(kind, spec, q)
        else:
            value = expected_coverage_multiset(kind, spec, q)
        dec = "" if digits is None else _decimal_str(value, digits)
        lines.append(
            _csv_row(
                [
                    kind.value,
                    spec.d,
                    spec.n,
                    "" if spec.p is None else spec.p,
                    q,
                    value.numerator,
                    value.denominator,
                    dec,
                ]
            )
        )
    _emit(out, lines)
    return 0


def _law_lambda(params: dict) -> tuple[float, int | str, int | str, int | str]:
    """Resolve lambda; returns (lambda, d, n, t) with '' for absent columns."""
    t, n = params.get("t"), params.get("n")
    if t is not None:
        if n is None:
            raise StructuralError("--t needs --n to fix lambda")
        if t == 1:
            return 1.0, params.get("d") or "", n, t
        law = conjecture_law(n, t, 1, d=params.get("d"))
        return law.lam, params.get("d") or "", n, t
    if params.get("kind") is None:
        raise StructuralError("need --kind or --t to fix lambda")
    kind = IntersectionKind(params["kind"])
    spec = _spec_from(params)
    return lambda_for(kind, spec), spec.d, spec.n, ""


def _run_law(config: RunConfig, out: str | None) -> int:
    params = config.params
    model = params["model"]
    lines = provenance_lines(config)
    lines.append("model,d,n,t,k,lambda,value,e1_bound,e2_bound,valid")

    if model == "bracket":
        if params.get("kind") is None:
            raise StructuralError("bracket needs --kind")
        kind = IntersectionKind(params["kind"])
        spec = _spec_from(params)
        for k in params["k"]:
            rep = bracket_exact_vs_asymptotic(kind, spec, k)
            base = [spec.d, spec.n, "", k, rep.lam]
            for name, value in (
                ("multiset", rep.p_multiset),
                ("iid", rep.p_iid),
                ("asymptotic", rep.p_asym),
            ):
                lines.append(_csv_row([name, *base, _fmt(value), "", "", ""]))
            lines.append(
                _csv_row(
                    [
                        "bracket",
                        *base,
                        _fmt(abs(rep.p_multiset - rep.p_asym)),
                        _fmt(rep.e1_bound),
                        _fmt(rep.e2_bound),
                        _fmt(rep.valid),
                    ]
                )
            )
        _emit(out, lines)
        return 0

    if model not in ("iid", "asymptotic", "conjecture"):
        raise StructuralError(f"unknown model {model!r}")
    lam, d_col, n_col, t_col = _law_lambda(params)
    if model == "conjecture" and params.get("t") is None:
        raise StructuralError("conjecture model needs --t")
    for k in params["k"]:
        if model == "asymptotic":
            value = coverage_closed_form(asymptotic_law(lam, k))
        else:
            value = coverage_closed_form(iid_law(lam, k))
        lines.append(
            _csv_row([model, d_col, n_col, t_col, k, _fmt(lam), _fmt(value), "", "", ""])
        )
    _emit(out, lines)
    return 0


def _run_simulate(config: RunConfig, out: str | None, workers: int) -> int:
    params = config.params
    spec = _spec_from(params)
    kind = SampleKind(params["kind"])
    targets = [parse_target(s) for s in params["target"]]
    if params.get("dims") is not None:
        dims = tuple(params["dims"])
        targets = [
            Projected(t.t, dims) if isinstance(t, Projected) else t for t in targets
        ]
    plan = SimPlan(
        spec=spec,
        kind=kind,
        k=params["k"],
        reps=params["reps"],
        targets=tuple(targets),
        seed=params["seed"],
    )
    reports = simulate_coverage(plan, workers=workers)
    lines = provenance_lines(config)
    lines.append("target,d,n,p,kind,k,reps,mean,sd,se,ref_iid,ref_asym")
    for target, rep in zip(targets, reports):
        lines.append(
            _csv_row(
                [
                    target_label(target),
                    spec.d,
                    spec.n,
                    "" if spec.p is None else spec.p,
                    kind.value,
                    plan.k,
                    plan.reps,
                    _fmt(rep.mean),
                    _fmt(rep.sd),
                    _fmt(rep.se),
                    _fmt(rep.ref_iid),
                    _fmt(rep.ref_asym),
                ]
            )
        )
    _emit(out, lines)
    return 0


def _run_oracle(config: RunConfig, out: str | None) -> int:
    params = config.params
    spec = _spec_from(params)
    kind = SampleKind(params["kind"])
    mode = params["mode"]
    edge = _parse_edge(params.get("edge"), spec)
    if edge is not None and kind is not SampleKind.LHS:
        raise StructuralError("edge comparisons are defined for the lhs ensemble")
    ts = enumerate_trials(spec, kind)
    tuple_kind = (
        IntersectionKind.LHS_TUPLE if kind is SampleKind.LHS else IntersectionKind.OS_TUPLE
    )

    rows: list[tuple[str, str, str, bool]] = []
    if mode in ("intersect", "cover"):
        qs = params.get("m") if mode == "intersect" else params.get("k")
        if qs is None:
            flag = "--m" if mode == "intersect" else "--k"
            raise StructuralError(f"mode {mode} needs {flag}")
        for q in qs:
            if mode == "intersect":
                got = oracle_expected_intersection(ts, q, projection=edge)
                if edge is None:
                    want = expected_intersection(tuple_kind, spec, q)
                elif edge.coarse is not None:
                    want = expected_intersection(IntersectionKind.LH_EDGE_SUBBLOCK, spec, q)
                else:
                    want = expected_intersection(
                        IntersectionKind.LH_EDGE_ALL, spec, q
                    ) / math.comb(spec.d, 2)
            else:
                got = oracle_expected_coverage(ts, q, projection=edge)
                if edge is None:
                    want = expected_coverage_multiset(tuple_kind, spec, q)
                elif edge.coarse is not None:
                    want = expected_coverage_multiset(
                        IntersectionKind.LH_EDGE_SUBBLOCK, spec, q
                    )
                else:
                    want = expected_coverage_multiset(IntersectionKind.LH_EDGE_ALL, spec, q)
            name = f"{mode} {kind.value} d={spec.d} n={spec.n}"
            if edge is not None:
                name += f" edge={params['edge']}"
            name += f" {'m' if mode == 'intersect' else 'k'}={q}"
            rows.append((name, str(got), str(want), got == want))
    elif mode == "occurrence":
        if edge is None:
            counts = tuple_occurrence_counts(ts)
            want = count_trials_containing_tuple(spec, tuple_kind)
            name = f"occurrence {kind.value} d={spec.d} n={spec.n}"
        else:
            if edge.coarse is not None:
                raise StructuralError("occurrence mode takes --edge i,j without bands")
            counts = edge_occurrence_counts(ts, edge)
            want = count_trials_containing_edge(spec)
            name = f"occurrence edges d={spec.d} n={spec.n} edge={params['edge']}"
        distinct = sorted(set(counts.values()))
        got = str(distinct[0]) if len(distinct) == 1 else f"varies {distinct}"
        rows.append((name, got, str(want), distinct == [want]))
    else:
        raise StructuralError(f"unknown mode {mode!r}")

    lines = provenance_lines(config)
    lines.append("check,oracle,expected,verdict")
    for name, got, want, okay in rows:
        lines.append(_csv_row([name, got, want, "MATCH" if okay else "MISMATCH"]))
    bad = sum(1 for row in rows if not row[3])
    lines.append(
        f"# all {len(rows)} checks MATCH"
        if bad == 0
        else f"# {bad} of {len(rows)} checks MISMATCH"
    )
    _emit(out, lines)
    if out not in (None, "-"):
        print(lines[-1].lstrip("# "))
    return 0 if bad == 0 else 4


def _run_sweep(config: RunConfig, out: str | None) -> int:
    params = config.params
    kind = SampleKind(params["kind"])
    mode = SweepMode(params["mode"])
    results = sweep_run(
        d=params["d"],
        t=params["t"],
        kind=kind,
        levels=params["levels"],
        n_grid=params["n_grid"],
        mode=mode,
        reps=params["reps"],
        seed=params["seed"],
    )
    tidy = provenance_lines(config)
    tidy.append("level,t,n,k_star")
    for res in results:
        for n, k_star in res.rows:
            k_txt = str(int(k_star)) if float(k_star).is_integer() else repr(k_star)
            tidy.append(_csv_row([_fmt(res.level), res.t, n, k_txt]))
    summary = provenance_lines(config)
    summary.append("level,t,slope,intercept,residual")
    for res in results:
        summary.append(
            _csv_row(
                [
                    _fmt(res.level),
                    res.t,
                    _fmt(res.slope),
                    _fmt(res.intercept),
                    _fmt(res.residual),
                ]
            )
        )
    if out in (None, "-"):
        _emit(out, tidy + ["# summary"] + summary[len(provenance_lines(config)) :])
    else:
        _emit(out, tidy)
        base = out[:-4] if out.endswith(".csv") else out
        _emit(base + ".summary.csv", summary)
    return 0


def _run_verify(config: RunConfig, out: str | None) -> int:
    checks = default_verification_suite()
    lines = provenance_lines(config)
    lines.append("check,oracle,expected,verdict")
    for c in checks:
        lines.append(
            _csv_row([c.name, c.oracle, c.expected, "MATCH" if c.match else "MISMATCH"])
        )
    bad = sum(1 for c in checks if not c.match)
    lines.append(
        f"# all {len(checks)} checks MATCH"
        if bad == 0
        else f"# {bad} of {len(checks)} checks MISMATCH"
    )
    _emit(out, lines)
    if out not in (None, "-"):
        print(lines[-1].lstrip("# "))
    return 0 if bad == 0 else 4


def run(config: RunConfig, out: str | None = None, workers: int = 1) -> int:
    """Execute a resolved run configuration; returns the exit code."""
    try:
        if config.subcommand == "gen":
            return _run_gen(config, out)
        if config.subcommand == "exact":
            return _run_exact(config, out)
        if config.subcommand == "law":
            return _run_law(config, out)
        if config.subcommand == "simulate":
            return _run_simulate(config, out, workers)
        if config.subcommand == "oracle":
            return _run_oracle(config, out)
        if config.subcommand == "sweep":
            return _run_sweep(config, out)
        if config.subcommand == "verify":
            return _run_verify(config, out)
        raise StructuralError(f"unknown subcommand {config.subcommand!r}")
    except GuardExceededError as exc:  # includes cap violations
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (StructuralError, UnsupportedSpecError, InvalidModeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HypercovError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5


# --- argument parsing -------------------------------------------------------


def _add_common(sp: argparse.ArgumentParser, names: Sequence[str]) -> None:
    for name in names:
        flag = "--" + name.replace("_", "-")
        if name in ("d", "n", "p", "k", "t", "reps", "seed", "workers"):
            sp.add_argument(flag, type=int)
        else:
            sp.add_argument(flag, type=str)
    sp.add_argument("--config", type=str, help="JSON file of parameters; flags win")
    sp.add_argument("--out", type=str, help="output path, '-' for stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypercov",
        description="Coverage statistics for Latin hypercube and orthogonal sampling",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    g = sub.add_parser("gen", help="generate trials")
    g.add_argument("--kind", choices=["lhs", "os"])
    g.add_argument("--format", choices=["csv", "json"])
    _add_common(g, ["d", "n", "p", "k", "seed"])

    e = sub.add_parser("exact", help="exact intersection/coverage values")
    e.add_argument("--kind", choices=[k.value for k in IntersectionKind])
    e.add_argument("--m", type=str)
    e.add_argument("--k", type=str)
    e.add_argument("--format", type=str)
    _add_common(e, ["d", "n", "p"])

    l = sub.add_parser("law", help="closed-form coverage laws")
    l.add_argument("--model", choices=["iid", "asymptotic", "conjecture", "bracket"])
    l.add_argument("--kind", choices=[k.value for k in IntersectionKind])
    l.add_argument("--k", type=str)
    _add_common(l, ["d", "n", "p", "t"])

    s = sub.add_parser("simulate", help="Monte Carlo coverage")
    s.add_argument("--kind", choices=["lhs", "os"])
    s.add_argument("--target", action="append", type=str)
    s.add_argument("--dims", type=str)
    _add_common(s, ["d", "n", "p", "k", "reps", "seed", "workers"])

    o = sub.add_parser("oracle", help="brute-force enumeration checks")
    o.add_argument("--kind", choices=["lhs", "os"])
    o.add_argument("--mode", choices=["intersect", "cover", "occurrence"])
    o.add_argument("--m", type=str)
    o.add_argument("--k", type=str)
    o.add_argument("--edge", type=str)
    _add_common(o, ["d", "n", "p"])

    w = sub.add_parser("sweep", help="k* threshold sweeps over n")
    w.add_argument("--kind", choices=["lhs", "os"])
    w.add_argument("--levels", type=str)
    w.add_argument("--n-grid", dest="n_grid", type=str)
    w.add_argument("--mode", choices=[m.value for m in SweepMode])
    _add_common(w, ["d", "t", "reps", "seed"])

    v = sub.add_parser("verify", help="oracle vs exact-count suite")
    v.add_argument("--config", type=str)
    v.add_argument("--out", type=str)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return 0 if code in (0, None) else 2
    try:
        config = resolve_params(args.subcommand, args)
    except (HypercovError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    workers = getattr(args, "workers", None) or 1
    return run(config, out=getattr(args, "out", None), workers=workers)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
