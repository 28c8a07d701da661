"""Command-line front end.

Subcommands: ``exact``, ``constants``, ``sample``, ``converge``, ``gof``.
Floats are printed with 12 significant digits; CSV uses ``\\n`` line endings.

Exit codes: 0 success, 1 a goodness-of-fit report failed, 2 invalid input,
3 the auto classifier landed in the gap regime, 4 the eigensolver failure
budget was exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import shlex
import sys

import numpy as np

from .limit_laws import (
    RegimeTag,
    RegimeThresholds,
    classify_regime,
    law_for_theorem,
    sup_distance_to_limit,
)
from .montecarlo import (
    MATRIX_DIM_CAP,
    ExperimentConfig,
    FailureBudgetExceeded,
    draw_radii,
    run_experiment,
)
from .order_stats import TruncationSpec, exact_radius_cdf, exact_radius_quantile

EXIT_OK = 0
EXIT_GOF_FAILED = 1
EXIT_USAGE = 2
EXIT_GAP = 3
EXIT_EIG_BUDGET = 4

CONVERGE_REGIMES = ("c1", "c2", "c3", "c4")
CONVERGE_COLUMNS = ("n", "p", "k", "theorem", "sup_distance")
GOF_KEYS = ("n", "p", "reference", "ks_statistic", "sample_count", "pass_threshold", "passed")


class UsageError(Exception):
    """Bad flags or values; reported on stderr with exit code 2."""


def fmt(v: float) -> str:
    return f"{v:.12g}"


def _round12(v):
    if isinstance(v, float) and math.isfinite(v):
        return float(fmt(v))
    return v


class _Parser(argparse.ArgumentParser):
    # flags files may hold "--seed 7" on one line
    def convert_arg_line_to_args(self, arg_line):
        return shlex.split(arg_line, comments=True)


def _make_spec(n, p) -> TruncationSpec:
    try:
        return TruncationSpec(n, p)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _parse_int(text: str, what: str) -> int:
    # accept 1e5 style for convenience, but only integral values
    try:
        v = float(text)
    except ValueError:
        raise UsageError(f"{what}: not a number: {text!r}") from None
    if not math.isfinite(v) or v != int(v):
        raise UsageError(f"{what}: not an integer: {text!r}")
    return int(v)


def parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be lo:hi:count, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError:
        raise UsageError(f"malformed grid {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or count < 1 or hi < lo or (count > 1 and hi == lo):
        raise UsageError(f"malformed grid {text!r}: need finite lo < hi and count >= 1")
    return np.linspace(lo, hi, count)


def parse_n_list(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    values = [_parse_int(tok.strip(), "n-list") for tok in text.split(",")]
    if any(b <= a for a, b in zip(values, values[1:])):
        raise UsageError("n-list must be strictly ascending")
    return values


def _thresholds(args) -> RegimeThresholds:
    return RegimeThresholds(
        fixed_k_max=args.fixed_k_max,
        very_light_max=args.very_light_max,
        heavy_cube_min=args.heavy_cube_min,
        light_k_over_n_max=args.light_k_over_n_max,
        bulk_low=args.bulk_low,
        bulk_high=args.bulk_high,
    )


def cmd_exact(args, out) -> int:
    spec = _make_spec(args.n, args.p)
    if args.r is not None:
        if not 0.0 <= args.r <= 1.0:
            raise UsageError("--r must lie in [0, 1]")
        value = exact_radius_cdf(spec, args.r)
    else:
        if not 0.0 < args.q < 1.0:
            raise UsageError("--q must lie in (0, 1)")
        value = exact_radius_quantile(spec, args.q)
    out.write(fmt(value) + "\n")
    return EXIT_OK


def constants_payload(spec: TruncationSpec, theorem: str, thresholds: RegimeThresholds, fixed_k_declared=None):
    """(payload dict, exit code) for the ``constants`` command."""
    regime = classify_regime(spec, fixed_k_declared, thresholds)
    thm = regime.theorem if theorem == "auto" else int(theorem)
    law = law_for_theorem(spec, thm)
    payload = {
        "regime": regime.tag.value,
        "theorem": thm,
        "A": law.A,
        "B": law.B,
        "limit": str(law.limit),
        "n": spec.n,
        "p": spec.p,
        "k": spec.k,
    }
    if "a_n" in law.details:
        payload["a_n"] = law.details["a_n"]
    code = EXIT_OK
    if regime.warning is not None:
        payload["warning"] = regime.warning
        if theorem == "auto" and regime.tag is RegimeTag.GAP:
            code = EXIT_GAP
    return {k: _round12(v) for k, v in payload.items()}, code


def cmd_constants(args, out) -> int:
    spec = _make_spec(args.n, args.p)
    try:
        payload, code = constants_payload(
            spec, args.theorem, _thresholds(args), True if args.declare_fixed_k else None
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out.write(json.dumps(payload, indent=2) + "\n")
    return code


def _csv_writer(out):
    return csv.writer(out, lineterminator="\n")


def cmd_sample(args, out) -> int:
    spec = _make_spec(args.n, args.p)
    if args.M < 0:
        raise UsageError("-M must be >= 0")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    max_dim = max(MATRIX_DIM_CAP, spec.n) if args.force else MATRIX_DIM_CAP
    if args.path == "matrix" and spec.n > max_dim:
        raise UsageError(f"matrix path limited to n <= {MATRIX_DIM_CAP}; pass --force to override")
    radii = draw_radii(spec, args.path, args.M, args.seed, args.workers, max_dim=max_dim)
    w = _csv_writer(out)
    w.writerow(("index", "radius"))
    for i, r in enumerate(radii):
        w.writerow((i, fmt(r)))
    return EXIT_OK


def converge_spec(regime: str, n: int, k_fixed: int | None) -> TruncationSpec:
    """Concrete (n, p) along the regime's default sequence."""
    if regime == "c1":
        return _make_spec(n, int(round(n**0.7)))
    if regime == "c2":
        k = int(round(2 * math.log(n) ** 3))
    elif regime == "c3":
        k = max(2, int(round(0.3 * math.log(n))))
    else:
        k = k_fixed
    return _make_spec(n, n - k)


CONVERGE_THEOREM = {"c1": 1, "c2": 1, "c3": 3, "c4": 4}
DEFAULT_GRIDS = {"c4": "-10:0:200"}


def converge_rows(regime: str, n_list, grid, k_fixed=None):
    rows = []
    for n in n_list:
        spec = converge_spec(regime, n, k_fixed)
        thm = CONVERGE_THEOREM[regime]
        try:
            law = law_for_theorem(spec, thm)
        except ValueError as exc:
            raise UsageError(f"n={n}: {exc}") from None
        rows.append((spec.n, spec.p, spec.k, thm, sup_distance_to_limit(spec, law, grid)))
    return rows


def cmd_converge(args, out) -> int:
    grid = parse_grid(args.grid or DEFAULT_GRIDS.get(args.regime, "-4:8:200"))
    n_list = parse_n_list(args.n_list)
    if args.regime == "c4" and (args.k is None or args.k < 1):
        raise UsageError("regime c4 needs --k >= 1")
    rows = converge_rows(args.regime, n_list, grid, args.k)
    w = _csv_writer(out)
    w.writerow(CONVERGE_COLUMNS)
    for n, p, k, thm, d in rows:
        w.writerow((n, p, k, thm, fmt(d)))
    return EXIT_OK


def _parse_spec_pair(text: str) -> TruncationSpec:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"--spec must be N,P, got {text!r}")
    return _make_spec(_parse_int(parts[0], "--spec"), _parse_int(parts[1], "--spec"))


def cmd_gof(args, out) -> int:
    if not args.spec:
        raise UsageError("gof needs at least one --spec N,P")
    specs = [_parse_spec_pair(s) for s in args.spec]
    target = args.target if args.target == "exact" else int(args.target)
    try:
        config = ExperimentConfig(
            specs=specs, path=args.path, M=args.M, seed=args.seed, workers=args.workers, target=target
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if config.path == "matrix" and not args.force:
        too_big = [s.n for s in specs if s.n > MATRIX_DIM_CAP]
        if too_big:
            raise UsageError(f"matrix path limited to n <= {MATRIX_DIM_CAP}; pass --force to override")
    try:
        reports = run_experiment(config, max_dim=max(MATRIX_DIM_CAP, *(s.n for s in specs)))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = []
    for spec, rep in zip(specs, reports):
        row = {"n": spec.n, "p": spec.p, **rep.to_dict()}
        rows.append({k: _round12(row[k]) for k in GOF_KEYS})
    out.write(json.dumps(rows, indent=2) + "\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_GOF_FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(
        prog="tcue",
        description="Spectral radius of truncated Haar unitaries: exact law, limit normalizations, simulation.",
        fromfile_prefix_chars="@",
    )
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("exact", help="exact CDF value or quantile of the spectral radius")
    p.add_argument("n", type=int)
    p.add_argument("p", type=int)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--r", type=float, help="evaluate P(radius <= r)")
    g.add_argument("--q", type=float, help="quantile at level q")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("constants", help="normalizing constants (JSON)")
    p.add_argument("n", type=int)
    p.add_argument("p", type=int)
    p.add_argument("--theorem", choices=("1", "2", "3", "4", "auto"), default="auto")
    p.add_argument("--declare-fixed-k", action="store_true", help="treat k as fixed regardless of its size")
    d = RegimeThresholds()
    p.add_argument("--fixed-k-max", type=int, default=d.fixed_k_max)
    p.add_argument("--very-light-max", type=float, default=d.very_light_max, help="k/ln n cut-off")
    p.add_argument("--heavy-cube-min", type=float, default=d.heavy_cube_min, help="k/(ln n)^3 cut-off")
    p.add_argument("--light-k-over-n-max", type=float, default=d.light_k_over_n_max)
    p.add_argument("--bulk-low", type=float, default=d.bulk_low)
    p.add_argument("--bulk-high", type=float, default=d.bulk_high)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("sample", help="spectral-radius draws (CSV)")
    p.add_argument("n", type=int)
    p.add_argument("p", type=int)
    p.add_argument("--path", choices=("beta", "matrix"), default="beta")
    p.add_argument("-M", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--force", action="store_true", help=f"allow the matrix path above n={MATRIX_DIM_CAP}")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("converge", help="sup distance between normalized exact law and its limit (CSV)")
    p.add_argument("--regime", choices=CONVERGE_REGIMES, required=True)
    p.add_argument("--n-list", default="", help="comma-separated ascending n values")
    p.add_argument("--grid", default=None, help="lo:hi:count; write --grid=-4:8:200 when lo is negative (default -4:8:200, or -10:0:200 for c4)")
    p.add_argument("--k", type=int, default=None, help="fixed truncation depth for c4")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("gof", help="Kolmogorov-Smirnov reports (JSON)")
    p.add_argument("--spec", action="append", default=[], metavar="N,P")
    p.add_argument("--path", choices=("beta", "matrix"), default="beta")
    p.add_argument("-M", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--target", choices=("exact", "1", "2", "3", "4"), default="exact")
    p.add_argument("--force", action="store_true", help=f"allow the matrix path above n={MATRIX_DIM_CAP}")
    p.set_defaults(func=cmd_gof)
    return ap


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags and 0 for --help
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"tcue {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FailureBudgetExceeded as exc:
        print(f"tcue {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_EIG_BUDGET


if __name__ == "__main__":
    sys.exit(main())
