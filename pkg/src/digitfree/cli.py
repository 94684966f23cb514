"""Batch command-line front-end.

Every analysis is exposed as a reproducible run that emits a CSV or JSON
table.  Fixed seed + fixed configuration gives byte-identical output.  Exit
codes: 0 on success, 1 when a mathematical inequality is violated, a power
iteration fails to converge, or a guard trips (statistical density misses are
data, not errors), 2 on usage errors.

Commands
--------
alpha-table B_MIN B_MAX   eigenvalue exponents for every (base, excluded digit)
count                     powerfree counts vs. predicted density for a family
verify                    hypothesis checks (linf, l1, decreasing, double-sum,
                          large-sieve, discrepancy)
eval                      one transform evaluation (product and/or brute)
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, replace
from fractions import Fraction

from . import bounds, expsum, powerfree
from .digit_sets import SetDescriptor


@dataclass(frozen=True)
class RunConfig:
    """Run-wide tolerances and guards; overridable by file and flags."""

    node_multiplier: int = 16
    power_tol: float = 1e-12
    power_max_iter: int = 100000
    window_grid: int = 1024
    refine_width: float = 1e-12
    seed: int = 20240801
    output_format: str = "csv"
    max_members: int = 10**8
    max_qk: int = 10**6
    split_exponent: float = 3.0  # B in the small/large denominator split
    delta: float = 0.0  # reported alongside split sums; 0 means "derive later"

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        values = {}
        fields = {f: t for f, t in cls.__annotations__.items()}
        with open(path) as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                key, _, raw = line.partition("=")
                key = key.strip()
                raw = raw.strip()
                if key not in fields:
                    raise ValueError(f"unknown config key {key!r}")
                kind = fields[key]
                if kind == "int":
                    values[key] = int(float(raw))
                elif kind == "float":
                    values[key] = float(raw)
                else:
                    values[key] = raw
        return cls(**values)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    if v is None:
        return ""
    return str(v)


def _emit(rows: list[dict], cfg: RunConfig, out) -> None:
    if cfg.output_format == "json":
        doc = {"config": asdict(cfg), "rows": rows}
        out.write(json.dumps(doc, indent=1, default=str))
        out.write("\n")
        return
    if not rows:
        return
    cols: list[str] = []
    for row in rows:
        for key in row:
            if key not in cols:
                cols.append(key)
    out.write(",".join(cols) + "\n")
    for row in rows:
        out.write(",".join(_fmt(row.get(c)) for c in cols) + "\n")


def _parse_int(text: str) -> int:
    v = float(text)
    iv = int(round(v))
    if abs(v - iv) > 1e-9 * max(abs(v), 1.0):
        raise argparse.ArgumentTypeError(f"{text} is not an integer")
    return iv


def _descriptor_from_args(args) -> SetDescriptor:
    kind = args.set
    coprime = args.coprime
    if coprime == "auto":
        if kind in ("palindromes", "reversible"):
            m = args.base**3 - args.base
        elif kind == "missing-digit":
            m = args.base
        else:
            m = 1
    else:
        m = _parse_int(coprime)
    if kind == "all":
        return SetDescriptor.all_integers(coprime_to=m)
    if kind == "palindromes":
        return SetDescriptor.palindromes(args.base, odd_length_only=args.odd_only,
                                         coprime_to=m)
    if kind == "missing-digit":
        excluded = [int(v) for v in args.exclude.split(",")] if args.exclude else []
        return SetDescriptor.missing_digit(args.base, excluded, coprime_to=m)
    if kind == "reversible":
        return SetDescriptor.reversible_pairs(args.base, coprime_to=m)
    raise argparse.ArgumentTypeError(f"unknown set {kind!r}")


def _family_from_args(args, cfg: RunConfig):
    name = args.family
    if name == "dirichlet":
        return expsum.dirichlet_family(args.x if args.x else 16)
    if name == "phi-tilde":
        return expsum.palindrome_envelope_family(args.base, args.digits)
    if name == "palindrome":
        return expsum.palindrome_family(args.base, args.digits)
    if name == "missing":
        return expsum.missing_digit_family(args.base, args.a0, args.digits)
    raise argparse.ArgumentTypeError(f"unknown family {name!r}")


def _parse_t(text: str):
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return float(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_alpha_table(args, cfg: RunConfig, out) -> int:
    rows = []
    any_failed = False
    for b in range(args.b_min, args.b_max + 1):
        for a0 in range(b):
            res = bounds.alpha_missing_digit(
                b, a0, grid=cfg.window_grid, refine_width=cfg.refine_width,
                tol=cfg.power_tol, max_iter=cfg.power_max_iter)
            any_failed |= not res.converged
            rows.append({"base": b, "digit": a0, "lambda": res.eigenvalue,
                         "alpha": res.alpha, "residual": res.residual,
                         "iterations": res.iterations, "converged": res.converged})
    _emit(rows, cfg, out)
    return 1 if any_failed else 0


def cmd_count(args, cfg: RunConfig, out) -> int:
    s = _descriptor_from_args(args)
    try:
        report = powerfree.count_powerfree_in_set(s, args.x, args.k,
                                                  max_members=cfg.max_members)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    rows = [{
        "descriptor": report.descriptor.label(), "x": report.x, "k": report.k,
        "raw_count": report.raw_count, "powerfree_count": report.powerfree_count,
        "density": report.density.value, "paired": report.density.paired,
        "local_modulus": report.density.local_modulus,
        "predicted": report.predicted, "relative_error": report.relative_error,
    }]
    _emit(rows, cfg, out)
    return 0


def _report_rows(report: bounds.BoundReport, keep_samples: bool) -> list[dict]:
    rows = []
    if keep_samples:
        for point, obs, ref in report.samples:
            rows.append({"row": "sample", "point": point, "observed": obs,
                         "reference": ref})
    summary = {"row": "summary", "hypothesis": report.hypothesis,
               "violations": report.violations, "worst_margin": report.worst_margin,
               "fitted_constant": report.fitted_constant,
               "tolerance": report.tolerance}
    for key, value in report.extra.items():
        summary[key] = value
    rows.append(summary)
    return rows


def cmd_verify(args, cfg: RunConfig, out) -> int:
    hyp = args.hypothesis
    rows: list[dict]
    exit_code = 0
    if hyp == "decreasing":
        kind = {"phi-tilde": "phi_tilde", "missing": "missing",
                "reversible": "reversible"}[args.family]
        report = bounds.check_decreasing(kind, args.base, excluded_digit=args.a0,
                                         samples=args.samples, max_digits=args.max_digits,
                                         seed=cfg.seed)
        rows = _report_rows(report, args.emit_samples)
        exit_code = 0 if report.holds else 1
    elif hyp == "linf":
        family = _family_from_args(args, cfg)
        reference = None
        if args.family == "dirichlet":
            x = family.scale
            reference = lambda a, d: d / x
        report = bounds.linf_scan(family, args.d_max, coprime_m=args.coprime_m,
                                  reference=reference)
        rows = _report_rows(report, args.emit_samples)
        exit_code = 0 if report.holds else 1
    elif hyp == "l1":
        family = _family_from_args(args, cfg)
        res = bounds.l1_norm(family, derivative=args.derivative,
                             node_multiplier=cfg.node_multiplier)
        lower_ratio = res.value * family.count / math.log(family.scale)
        rows = [{"row": "summary", "hypothesis": "l1", "family": family.name,
                 "value": res.value, "nodes": res.nodes,
                 "derivative": args.derivative,
                 "mps_lower_ratio": lower_ratio}]
    elif hyp == "double-sum":
        family = _family_from_args(args, cfg)
        split = bounds.double_sum_split(family, args.k,
                                        split_exponent=cfg.split_exponent,
                                        coprime_m=args.coprime_m or 1,
                                        q_max=args.q_max)
        rows = [{"row": "summary", "hypothesis": "double_sum", "family": family.name,
                 "k": args.k, "q_max": args.q_max, "total": split["total"],
                 "s1": split["s1"], "s2": split["s2"],
                 "threshold": split["threshold"], "B": cfg.split_exponent,
                 "delta": cfg.delta}]
    elif hyp == "large-sieve":
        family = _family_from_args(args, cfg)
        report = bounds.large_sieve_check(family, args.q, args.k,
                                          node_multiplier=cfg.node_multiplier)
        rows = _report_rows(report, args.emit_samples)
        exit_code = 0 if report.holds else 1
    elif hyp == "discrepancy":
        s = _descriptor_from_args(args)
        report = bounds.progression_discrepancy(s, args.x, args.d,
                                                max_members=cfg.max_members)
        rows = _report_rows(report, args.emit_samples)
        exit_code = 0 if report.holds else 1
    else:
        print(f"error: unknown hypothesis {hyp!r}", file=sys.stderr)
        return 2
    _emit(rows, cfg, out)
    return exit_code


def _eval_reversible_pair(args) -> tuple[dict, int]:
    alpha = _parse_t(args.alpha or "0")
    beta = _parse_t(args.beta or "0")
    value = expsum.reversible_transform(args.base, args.digits, alpha, beta)
    row = {"family": f"reversible b={args.base} digits={args.digits}",
           "alpha": float(alpha), "beta": float(beta), "method": "product",
           "value_re": value.real, "value_im": value.imag,
           "normalization": float(args.base**args.digits)}
    code = 0
    if args.check:
        brute = expsum.reversible_brute(args.base, args.digits, alpha, beta)
        row["brute_re"], row["brute_im"] = brute.real, brute.imag
        row["mismatch"] = abs(value - brute)
        code = 1 if row["mismatch"] > 1e-9 else 0
    return row, code


def _eval_stratum(args) -> tuple[dict, int]:
    """Exact-digit-count transform: palindrome stratum or missing-digit frame."""
    t = _parse_t(args.t)
    b, L = args.base, args.digits
    if args.set == "palindromes":
        fam = expsum.palindrome_family(b, L)
        brute_fn = lambda: expsum.palindrome_stratum_brute(b, L, t)
    elif args.set == "missing-digit":
        a0 = int(args.exclude.split(",")[0]) if args.exclude else 0
        fam = expsum.missing_digit_family(b, a0, L)
        brute_fn = lambda: expsum.missing_digit_frame_brute(b, a0, L, t)
    else:
        raise ValueError("stratum evaluation supports palindromes and missing-digit; "
                         "use --x for cumulative sets")
    value = complex(fam.value(t))
    row = {"family": fam.name, "t": float(t), "method": "product",
           "value_re": value.real, "value_im": value.imag,
           "normalization": fam.count}
    code = 0
    if args.check:
        brute = brute_fn()
        row["brute_re"], row["brute_im"] = brute.real, brute.imag
        row["mismatch"] = abs(value - brute)
        code = 1 if row["mismatch"] > 1e-9 * max(fam.count, 1.0) else 0
    return row, code


def _eval_cumulative(args) -> tuple[dict, int]:
    s = _descriptor_from_args(args)
    t = _parse_t(args.t)
    product = expsum.set_transform_product(s, args.x, t)
    if product is not None and not args.brute:
        value, count, method = complex(product), None, "product"
    else:
        sample = expsum.brute_transform(s, args.x, t)
        value, count, method = sample.value, sample.normalization, "brute"
    row = {"descriptor": s.label(), "x": args.x, "t": float(t),
           "method": method, "value_re": value.real, "value_im": value.imag}
    if count is not None:
        row["normalization"] = count
    code = 0
    if args.check and product is not None:
        sample = expsum.brute_transform(s, args.x, t)
        row["brute_re"], row["brute_im"] = sample.value.real, sample.value.imag
        row["mismatch"] = abs(complex(product) - sample.value)
        code = 1 if row["mismatch"] > 1e-9 * max(sample.normalization, 1.0) else 0
    return row, code


def cmd_eval(args, cfg: RunConfig, out) -> int:
    if args.alpha is not None or args.beta is not None:
        if args.set != "reversible":
            print("error: --alpha/--beta evaluation needs --set reversible",
                  file=sys.stderr)
            return 2
        row, code = _eval_reversible_pair(args)
    elif args.x is None:
        row, code = _eval_stratum(args)
    else:
        row, code = _eval_cumulative(args)
    _emit([row], cfg, out)
    return code


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------


def _add_set_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--set", choices=["all", "palindromes", "missing-digit", "reversible"],
                   default="all")
    p.add_argument("--base", type=int, default=10)
    p.add_argument("--odd-only", action="store_true")
    p.add_argument("--exclude", type=str, default="",
                   help="comma-separated excluded digits for missing-digit sets")
    p.add_argument("--coprime", type=str, default="auto",
                   help="coprimality modulus, or 'auto' for the family default")


def _add_family_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family",
                   choices=["dirichlet", "phi-tilde", "palindrome", "missing",
                            "reversible"], default="dirichlet")
    p.add_argument("--base", type=int, default=10)
    p.add_argument("--digits", type=int, default=3)
    p.add_argument("--a0", type=int, default=0)
    p.add_argument("--x", type=_parse_int, default=0)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None,
                        help="key=value config file overriding defaults")
    common.add_argument("--format", choices=["csv", "json"], default=None)
    common.add_argument("--out", type=str, default=None,
                        help="output path (default: stdout)")
    common.add_argument("--seed", type=int, default=None)

    parser = argparse.ArgumentParser(
        prog="digitfree", parents=[common],
        description="Powerfree integers in digit-defined sets: transforms, "
                    "bounds, and counts.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("alpha-table", parents=[common],
                       help="eigenvalue exponent table")
    p.add_argument("b_min", type=int)
    p.add_argument("b_max", type=int)

    p = sub.add_parser("count", parents=[common],
                       help="powerfree count vs. predicted density")
    _add_set_flags(p)
    p.add_argument("--x", type=_parse_int, required=True)
    p.add_argument("--k", type=int, default=2)

    p = sub.add_parser("verify", parents=[common], help="hypothesis checks")
    p.add_argument("--hypothesis",
                   choices=["linf", "l1", "decreasing", "double-sum",
                            "large-sieve", "discrepancy"], required=True)
    _add_family_flags(p)
    p.add_argument("--set", choices=["all", "palindromes", "missing-digit",
                                     "reversible"], default="all")
    p.add_argument("--odd-only", action="store_true")
    p.add_argument("--exclude", type=str, default="")
    p.add_argument("--coprime", type=str, default="auto")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--max-digits", type=int, default=8)
    p.add_argument("--d-max", type=int, default=100)
    p.add_argument("--d", type=int, default=7)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--q-max", type=int, default=None)
    p.add_argument("--coprime-m", type=int, default=None)
    p.add_argument("--derivative", action="store_true")
    p.add_argument("--emit-samples", action="store_true",
                   help="emit one row per sample before the summary row")

    p = sub.add_parser("eval", parents=[common], help="evaluate one transform point")
    _add_set_flags(p)
    p.set_defaults(coprime="1")
    p.add_argument("--x", type=_parse_int, default=None,
                   help="cumulative-set cutoff; omit to evaluate one stratum")
    p.add_argument("--digits", type=int, default=4)
    p.add_argument("--t", type=str, default="0")
    p.add_argument("--alpha", type=str, default=None)
    p.add_argument("--beta", type=str, default=None)
    p.add_argument("--check", action="store_true",
                   help="cross-check product vs brute; nonzero exit on mismatch")
    p.add_argument("--brute", action="store_true", help="force brute evaluation")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    if args.format:
        cfg = replace(cfg, output_format=args.format)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)

    handlers = {"alpha-table": cmd_alpha_table, "count": cmd_count,
                "verify": cmd_verify, "eval": cmd_eval}
    handler = handlers[args.command]
    try:
        if args.out:
            with open(args.out, "w") as fh:
                return handler(args, cfg, fh)
        return handler(args, cfg, sys.stdout)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
