"""Command-line front end.

Subcommands: report, construct, search, sample, verify.  Exit codes follow
a fixed contract: 0 success, 1 unreadable or invalid input, 2 a universal
invariant failed (library bug or corrupt data), 64 usage error.  All output
is deterministic given the flags and seed; numeric CSV cells use 17
significant digits so doubles round-trip losslessly.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import bounds, continuous, optimize, verification
from .constructions import FamilySpec
from .continuous import NonnegJoint
from .dist import JointBernoulli, MarginalVector, prob_hit_independent, sample
from .errors import InvalidDistributionError

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INVARIANT = 2
EXIT_USAGE = 64

DEFAULT_SEED = 0

FAMILY_BY_FLAG = {
    "one-hot": "one_hot_uniform",
    "extremal": "conjectured_extremal",
    "comonotone": "comonotone",
    "affine-hash": "affine_hash",
    "xor": "xor_parity",
    "product": "product",
}

MODE_BY_FLAG = {"equality": "pairwise_equality", "negcov": "negative_covariance"}

SWEEP_COLUMNS = (
    "n",
    "p",
    "mtilde",
    "lp_objective",
    "lp_ratio",
    "construction_ratio",
    "gap",
    "status",
)

CONTINUOUS_COLUMNS = ("emax", "emax_ind", "upper_holds", "pairwise_ok", "lower_holds")


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    """argparse's default usage exit code is 2; this contract reserves 2
    for invariant failures, so usage problems leave with 64 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt_cell(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _load_joint_file(path: str) -> JointBernoulli | NonnegJoint:
    with open(path, "r", encoding="utf-8") as handle:
        obj = json.load(handle)
    if not isinstance(obj, dict):
        raise InvalidDistributionError("joint document must be a JSON object")
    kind = obj.get("kind")
    if kind == "bernoulli-joint":
        return JointBernoulli.from_json_dict(obj)
    if kind == "nonneg-joint":
        return NonnegJoint.from_json_dict(obj)
    raise InvalidDistributionError(
        f"field 'kind' must be 'bernoulli-joint' or 'nonneg-joint', got {kind!r}"
    )


def _write_csv(stream, columns, rows) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt_cell(row[c]) for c in columns])


def _emit(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def _cmd_report(args) -> int:
    joint = _load_joint_file(args.input)
    if isinstance(joint, JointBernoulli):
        report = bounds.full_report(joint)
        if args.format == "json":
            print(json.dumps(report.to_json_dict(), indent=2))
        else:
            row = {name: getattr(report, name) for name in report._SCALAR_FIELDS}
            row["verdicts"] = ";".join(
                f"{k}={_fmt_cell(v)}" for k, v in report.verdicts.items()
            )
            _write_csv(sys.stdout, report._SCALAR_FIELDS + ("verdicts",), [row])
        return EXIT_OK if report.universal_ok else EXIT_INVARIANT

    check = continuous.decoupling_check_cont(joint)
    row = dict(zip(CONTINUOUS_COLUMNS, check))
    if args.format == "json":
        print(json.dumps(row, indent=2))
    else:
        _write_csv(sys.stdout, CONTINUOUS_COLUMNS, [row])
    universal_ok = check.upper_holds and (check.lower_holds or not check.pairwise_ok)
    return EXIT_OK if universal_ok else EXIT_INVARIANT


def _cmd_construct(args) -> int:
    params = {}
    if args.p is not None:
        try:
            params["p"] = tuple(float(tok) for tok in args.p.split(","))
        except ValueError:
            raise UsageError(f"--p must be a comma-separated float list, got {args.p!r}")
    spec = FamilySpec(
        kind=FAMILY_BY_FLAG[args.family],
        n=args.n,
        eps=args.eps,
        q=args.q,
        m=args.m,
        k=args.k,
        **params,
    )
    try:
        joint = spec.build()
    except (ValueError, InvalidDistributionError) as exc:
        raise UsageError(str(exc))
    _emit(args.out, json.dumps(joint.to_json_dict(), indent=2) + "\n")
    return EXIT_OK


def _cmd_search(args) -> int:
    if not 3 <= args.n_min <= args.n_max:
        raise UsageError(f"need 3 <= n-min <= n-max, got {args.n_min}..{args.n_max}")
    mode = MODE_BY_FLAG[args.mode]
    if args.reduction == "full":
        if args.n_max > optimize.FULL_VARIABLE_LIMIT:
            raise UsageError(
                f"full reduction supports n <= {optimize.FULL_VARIABLE_LIMIT}"
            )
        rows = [_full_sweep_row(n, mode) for n in range(args.n_min, args.n_max + 1)]
    else:
        # 'auto' takes the exact exchangeable route at every n; 'full' exists
        # for cross-validation at small n.
        rows = optimize.conjecture_sweep(args.n_min, args.n_max, mode)
    buffer = io.StringIO()
    _write_csv(buffer, SWEEP_COLUMNS, rows)
    _emit(args.out, buffer.getvalue())
    return EXIT_OK


def _full_sweep_row(n: int, mode: str) -> dict:
    p = Fraction(1, n - 1)
    solution = optimize.solve(optimize.build_full_lp(n, p, mode))
    mtilde = prob_hit_independent(MarginalVector((float(p),) * n))
    ratio = solution.objective / mtilde
    construction = (0.5 + 0.5 / (n - 1)) / mtilde
    return {
        "n": n,
        "p": float(p),
        "mtilde": mtilde,
        "lp_objective": solution.objective,
        "lp_ratio": ratio,
        "construction_ratio": construction,
        "gap": construction - ratio,
        "status": solution.status,
    }


def _cmd_sample(args) -> int:
    if args.count < 1:
        raise UsageError(f"--count must be at least 1, got {args.count}")
    joint = _load_joint_file(args.input)
    if not isinstance(joint, JointBernoulli):
        raise InvalidDistributionError("sample requires a bernoulli-joint file")
    draws = sample(joint, seed=args.seed, count=args.count)
    sys.stdout.write("\n".join(map(str, draws)))
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_verify(args) -> int:
    if args.trials < 1:
        raise UsageError(f"--trials must be at least 1, got {args.trials}")
    results = verification.run_battery(args.seed, args.trials)
    sys.stdout.write(verification.format_battery(args.seed, args.trials, results))
    return EXIT_OK if all(r.ok for r in results) else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="maxdecouple",
        description="Decoupling bounds for maxima of dependent random variables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_report = sub.add_parser("report", help="evaluate every bound on a joint file")
    p_report.add_argument("--in", dest="input", required=True, metavar="PATH")
    p_report.add_argument("--format", choices=("json", "csv"), default="json")
    p_report.set_defaults(func=_cmd_report)

    p_construct = sub.add_parser("construct", help="emit a named family as JSON")
    p_construct.add_argument(
        "--family", required=True, choices=sorted(FAMILY_BY_FLAG)
    )
    p_construct.add_argument("--n", type=int)
    p_construct.add_argument("--eps", type=float)
    p_construct.add_argument("--q", type=int)
    p_construct.add_argument("--m", type=int)
    p_construct.add_argument("--k", type=int, help="xor family: number of coins")
    p_construct.add_argument("--p", help="product family: comma-separated marginals")
    p_construct.add_argument("--out", metavar="PATH")
    p_construct.set_defaults(func=_cmd_construct)

    p_search = sub.add_parser("search", help="extremal-ratio sweep over n")
    p_search.add_argument("--n-min", type=int, required=True)
    p_search.add_argument("--n-max", type=int, required=True)
    p_search.add_argument("--mode", choices=sorted(MODE_BY_FLAG), default="equality")
    p_search.add_argument(
        "--reduction", choices=("auto", "full", "exchangeable"), default="auto"
    )
    p_search.add_argument("--out", metavar="PATH")
    p_search.set_defaults(func=_cmd_search)

    p_sample = sub.add_parser("sample", help="draw atom masks, one per line")
    p_sample.add_argument("--in", dest="input", required=True, metavar="PATH")
    p_sample.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_sample.add_argument("--count", type=int, required=True)
    p_sample.set_defaults(func=_cmd_sample)

    p_verify = sub.add_parser("verify", help="run the randomized property battery")
    p_verify.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_verify.add_argument("--trials", type=int, default=1000)
    p_verify.set_defaults(func=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"maxdecouple: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidDistributionError as exc:
        print(f"maxdecouple: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, json.JSONDecodeError) as exc:
        print(f"maxdecouple: cannot read input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
