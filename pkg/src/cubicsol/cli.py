"""Command-line interface: ``cubicsol <subcommand> ...``.

Coefficients are always given in the order a,b,c,d,e,f,g,h,i,j of
aX^3 + bX^2Y + cX^2Z + dXY^2 + eXYZ + fXZ^2 + gY^3 + hY^2Z + iYZ^2 + jZ^3.

Exit codes: 0 success / Soluble / pass, 1 Insoluble / fail, 2 Undetermined,
64 usage error, 70 internal defect.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__, density
from .census import CENSUS_MAX_P, census_ternary_cubics, default_workers
from .cubic_forms import UnclassifiableReduction
from .finite_field import (
    EnumerationTooLarge,
    binary_closed_forms,
    census_binary_cubics,
    census_monic_cubics,
    monic_closed_forms,
)
from .monomials import is_prime
from .oracle import brute_oracle
from .padic import DEFAULT_PRECISION, DEFAULT_WITNESS, Mode, SolverDefect, VerdictKind, decide

EXIT_OK, EXIT_FAIL, EXIT_UNDETERMINED, EXIT_USAGE, EXIT_DEFECT = 0, 1, 2, 64, 70
SEED_ENV = "CUBICSOL_SEED"
DEFAULT_SEED = 20240601


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def fraction_json(x: Fraction, digits: int = 15) -> dict:
    x = Fraction(x)
    return {"exact": f"{x.numerator}/{x.denominator}", "decimal": density.format_decimal(x, digits)}


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _prime(s: str) -> int:
    try:
        p = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{s!r} is not an integer") from None
    if not is_prime(p):
        raise argparse.ArgumentTypeError(f"{p} is not prime")
    return p


def _coeffs(s: str) -> tuple[int, ...]:
    try:
        values = tuple(int(t) for t in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("coefficients must be integers separated by commas") from None
    if len(values) != 10:
        raise argparse.ArgumentTypeError(f"expected 10 coefficients a..j, got {len(values)}")
    return values


# -- subcommands ---------------------------------------------------------------


def cmd_decide(args) -> int:
    mode = Mode.NR if args.nr else Mode.QP
    if args.witness > args.prec:
        raise UsageError(f"--witness {args.witness} exceeds --prec {args.prec}")
    v = decide(args.coeffs, args.p, args.prec, mode, witness=args.witness)
    payload = {"verdict": v.kind.value, "path": [s.value for s in v.path], "mode": mode.value}
    lines = [v.label, "path: " + " -> ".join(s.value for s in v.path)]
    if v.terminal is not None:
        payload["terminal_tag"] = v.terminal.value
    if v.reason is not None:
        payload["reason"] = v.reason.value
    if v.witness is not None:
        payload["witness"] = v.witness.digits()
        payload["witness_precision"] = v.witness.precision
        payload["witness_integers"] = list(v.witness.point)
        lines.append(
            f"witness (base {args.p}, {v.witness.precision} digits): [" + " : ".join(v.witness.digits()) + "]"
        )
    if args.oracle:
        o = brute_oracle(args.coeffs, args.p, args.oracle)
        payload["oracle"] = {"result": o.kind.value, "k": o.k, "witness": list(o.witness) if o.witness else None}
        lines.append(f"oracle mod {args.p}^{o.k}: {o.kind.value}")
    _emit(args, payload, "\n".join(lines))
    return {VerdictKind.SOLUBLE: EXIT_OK, VerdictKind.INSOLUBLE: EXIT_FAIL}.get(v.kind, EXIT_UNDETERMINED)


def cmd_rho(args) -> int:
    value = density.rho_nr(args.p) if args.nr else density.rho_p(args.p)
    payload = {"p": args.p, "mode": "nr" if args.nr else "qp", "rho": fraction_json(value)}
    _emit(args, payload, f"{value.numerator}/{value.denominator} ≈ {density.format_decimal(value, 10)}")
    return EXIT_OK


def cmd_rho_global(args) -> int:
    mode = "nr" if args.nr else "qp"
    tol = Fraction(1, 10**args.digits)
    r = density.euler_product(mode, args.pmax, tol)
    lo, hi = r.decimal(args.digits + 2)
    payload = {
        "mode": mode,
        "p_max": r.p_max,
        # the exact endpoints have tens of thousands of digits; decimals are rounded outward
        "lower": lo,
        "upper": hi,
        "value": density.format_decimal(r.upper, args.digits),
        "tail_constant": f"{r.tail_constant.numerator}/{r.tail_constant.denominator}",
        "tail_bound": fraction_json(r.tail_bound),
    }
    _emit(args, payload, f"[{lo}, {hi}]  (p <= {r.p_max}, tail factor >= 1 - {float(r.tail_bound):.3e})")
    return EXIT_OK


def _census_rows(p: int, workers: int) -> list[dict]:
    rows = []
    for kind, counts, closed in (
        ("monic", census_monic_cubics(p), monic_closed_forms(p)),
        ("binary", census_binary_cubics(p), binary_closed_forms(p)),
    ):
        for tag, count in counts.items():
            rows.append(
                {
                    "category": f"{kind}:{tag.value}",
                    "count_up_to_scaling": count,
                    "closed_form": closed[tag],
                    "match": count == closed[tag],
                }
            )
    if p <= CENSUS_MAX_P:
        rows += [row.as_dict() for row in census_ternary_cubics(p, workers)]
    return rows


def cmd_census(args) -> int:
    if args.p > CENSUS_MAX_P:
        raise UsageError(f"the ternary census is limited to p <= {CENSUS_MAX_P}")
    rows = [r.as_dict() for r in census_ternary_cubics(args.p, args.workers)]
    if args.json or args.format == "json":
        print(json.dumps(rows, indent=2))
    else:
        print(f"{'category':<28}{'count':>12}{'closed form':>14}  match")
        for r in rows:
            print(f"{r['category']:<28}{r['count_up_to_scaling']:>12}{r['closed_form']:>14}  {r['match']}")
    return EXIT_OK if all(r["match"] for r in rows) else EXIT_FAIL


def _verify_checks(p: int, level: str, workers: int) -> list[tuple[str, bool]]:
    q = Fraction(p)
    if level == "counts":
        return [(r["category"], r["match"]) for r in _census_rows(p, workers)]
    if level == "betas":
        b = density.betas(p)
        checks = [
            ("beta1_line = 1/p^4", b.beta1_line == 1 / q**4),
            ("beta1_point = (p+1)^2(p-1)/(3p^7)", b.beta1_point == (q + 1) ** 2 * (q - 1) / (3 * q**7)),
            ("beta2_line = 0", b.beta2_line == 0),
            ("beta2_point = 1/p^7", b.beta2_point == 1 / q**7),
            ("beta3_line = (p-1)/p^4", b.beta3_line == (q - 1) / q**4),
            ("beta3_point = (p+1)(p-1)^2/(3p^6)", b.beta3_point == (q + 1) * (q - 1) ** 2 / (3 * q**6)),
            ("beta4 = (p+1)(p-1)^2/(3p^3)", b.beta4 == (q + 1) * (q - 1) ** 2 / (3 * q**3)),
            ("all betas in [0, 1]", all(0 <= v <= 1 for v in vars(b).values())),
        ]
        if p <= CENSUS_MAX_P:
            counts = {r.category: r.count_up_to_scaling for r in census_ternary_cubics(p, workers)}
            scale = (q - 1) / q**10
            checks += [
                ("beta1 = stars (census)", b.beta1 == counts["conjugate star"] * scale),
                ("beta2 = triple lines (census)", b.beta2 == counts["L^3"] * scale),
                ("beta3 = triangles (census)", b.beta3 == counts["conjugate triangle"] * scale),
            ]
        return checks
    if level == "alphas":
        a1, a4 = density.alpha_system(p)
        a2, _ = density.alpha2_alpha5(p)
        n1, n2 = density.nu_system(p)
        n1r, n2r = density.nu_system_nr(p)
        return [
            ("alpha1 closed form", a1 == density.alpha1_closed(p)),
            ("alpha4 = (p^4 - p + alpha1)/p^4", a4 == (q**4 - q + a1) / q**4),
            ("alpha1 = (p^3 - p + alpha4)/p^4", a1 == (q**3 - q + a4) / q**4),
            ("nu1, nu2 closed forms", (n1, n2) == density.nu_closed(p)),
            ("alpha2 closed form", a2 == density.alpha2_closed(p)),
            ("nu1', nu2' closed forms", (n1r, n2r) == density.nu_nr_closed(p)),
            ("nu1' = nu2'/p^2", n1r == n2r / q**2),
            ("alpha2' closed form", density.alpha2_nr(p) == density.alpha2_nr_closed(p)),
        ]
    if level == "assembly":
        return [
            ("rho assembly = 1 - f/g", density.rho_via_assembly(p, "qp") == density.rho_p(p)),
            ("rho_nr assembly = closed form", density.rho_via_assembly(p, "nr") == density.rho_nr(p)),
        ]
    raise UsageError(f"unknown level {level}")


def cmd_verify(args) -> int:
    checks = _verify_checks(args.p, args.level, args.workers)
    ok = all(passed for _, passed in checks)
    payload = {"p": args.p, "level": args.level, "pass": ok, "checks": [{"name": n, "pass": c} for n, c in checks]}
    text = "\n".join(f"{'pass' if c else 'FAIL'}  {n}" for n, c in checks)
    _emit(args, payload, text + f"\n{'pass' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None
        print(f"seed {seed} (from {SEED_ENV})", file=sys.stderr)
        return seed
    print(f"seed {DEFAULT_SEED} (default)", file=sys.stderr)
    return DEFAULT_SEED


def cmd_estimate(args) -> int:
    from .montecarlo import SamplerSpec, UndeterminedFractionTooHigh, estimate

    seed = _seed(args)
    spec = SamplerSpec(args.p, args.prec, sample_count=args.samples, seed=seed)
    try:
        r = estimate(spec, args.target, workers=args.workers, progress=not args.json)
    except UndeterminedFractionTooHigh as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNDETERMINED
    lo, hi = r.ci99
    payload = {
        "target": r.target,
        "p": r.p,
        "exact": f"{r.exact.numerator}/{r.exact.denominator}",
        "estimate": r.estimate,
        "stderr": r.stderr,
        "ci99": [lo, hi],
        "z_score": r.z_score,
        "undetermined": r.undetermined,
        "samples": r.samples,
        "seed": r.seed,
    }
    text = (
        f"{r.target}(p={r.p}): {r.estimate:.6f} ± {r.stderr:.2e}  99% CI [{lo:.6f}, {hi:.6f}]\n"
        f"exact {r.exact.numerator}/{r.exact.denominator} ≈ {float(r.exact):.6f}  z = {r.z_score:+.2f}  "
        f"undetermined {r.undetermined}/{r.samples}"
    )
    _emit(args, payload, text)
    return EXIT_OK if r.within(4.0) else EXIT_FAIL


# -- parser ------------------------------------------------------------------------


def _version_string() -> str:
    status = "certified" if density.certify_tail_constant() else "NOT certified"
    c = density.TAIL_CONSTANT
    return f"cubicsol {__version__} (tail constant c = {c.numerator}/{c.denominator}: {status})"


class _VersionAction(argparse.Action):
    def __init__(self, option_strings, dest, **kwargs):
        super().__init__(option_strings, dest, nargs=0, help="show version and tail-bound status")

    def __call__(self, parser, namespace, values, option_string=None):
        print(_version_string())
        raise SystemExit(EXIT_OK)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cubicsol", description="Local solubility of ternary cubic forms.")
    parser.add_argument("--version", action=_VersionAction)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="emit a single JSON document")
        return sp

    sp = common(sub.add_parser("decide", help="decide solubility of one cubic"))
    sp.add_argument("--p", type=_prime, required=True)
    sp.add_argument("--coeffs", type=_coeffs, required=True, help="a,b,c,d,e,f,g,h,i,j")
    sp.add_argument("--prec", type=int, default=DEFAULT_PRECISION)
    sp.add_argument("--nr", action="store_true", help="solubility over the maximal unramified extension")
    sp.add_argument("--witness", type=int, default=DEFAULT_WITNESS, help="witness precision (0: none)")
    sp.add_argument("--oracle", type=int, default=0, metavar="K", help="also run brute force mod p^K")
    sp.set_defaults(func=cmd_decide)

    sp = common(sub.add_parser("rho", help="exact local density"))
    sp.add_argument("--p", type=_prime, required=True)
    sp.add_argument("--nr", action="store_true")
    sp.set_defaults(func=cmd_rho)

    sp = common(sub.add_parser("rho-global", help="enclosure of the Euler product"))
    sp.add_argument("--nr", action="store_true")
    sp.add_argument("--pmax", type=int, default=density.DEFAULT_PMAX)
    sp.add_argument("--digits", type=int, default=6)
    sp.set_defaults(func=cmd_rho_global)

    sp = common(sub.add_parser("census", help="classify all plane cubics over F_p"))
    sp.add_argument("--p", type=_prime, required=True)
    sp.add_argument("--format", choices=("table", "json"), default="table")
    sp.add_argument("--workers", type=int, default=default_workers())
    sp.set_defaults(func=cmd_census)

    sp = common(sub.add_parser("verify", help="check identities at one prime"))
    sp.add_argument("--p", type=_prime, required=True)
    sp.add_argument("--level", choices=("counts", "betas", "alphas", "assembly"), required=True)
    sp.add_argument("--workers", type=int, default=default_workers())
    sp.set_defaults(func=cmd_verify)

    from .montecarlo import TARGETS

    sp = common(sub.add_parser("estimate", help="Monte Carlo estimate of a density"))
    sp.add_argument("--p", type=_prime, required=True)
    sp.add_argument("--target", choices=sorted(TARGETS), required=True)
    sp.add_argument("--samples", type=int, default=10**5)
    sp.add_argument("--prec", type=int, default=DEFAULT_PRECISION)
    sp.add_argument("--seed", type=int, default=None, help=f"default: ${SEED_ENV} or {DEFAULT_SEED}")
    sp.add_argument("--workers", type=int, default=default_workers())
    sp.set_defaults(func=cmd_estimate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, EnumerationTooLarge, density.ToleranceUnachievable, ValueError) as exc:
        print(f"cubicsol: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverDefect, UnclassifiableReduction, AssertionError) as exc:
        print(f"cubicsol: internal defect: {exc}", file=sys.stderr)
        return EXIT_DEFECT


def run(argv=None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
