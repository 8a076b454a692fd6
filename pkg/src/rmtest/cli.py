"""Command-line surface: experiment runner and report emitter.

Every subcommand prints a JSON report to stdout (suppress with --quiet)
and can also write it to --json PATH and a flat CSV to --csv PATH.  All
randomness is seeded from --seed; exact enumerations respect --budget /
RMTEST_BUDGET.  Exit codes: 0 when the subcommand's expected relation held
(or none applies), 1 when it failed, 2 for usage errors, 3 when an exact
run would exceed the enumeration budget.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

import numpy as np

from . import algebra as alg
from . import combin, genbasis, multtests as mt, rmcode, setmultilin as sml, sztest
from . import suite as suite_mod
from .errors import InfeasibleInstanceError
from .estimator import estimate, mix64
from .rmcode import CodeParams

EXIT_OK = 0
EXIT_RELATION_FAILED = 1
EXIT_INFEASIBLE = 3

REPORT_COLUMNS = [
    "command",
    "q",
    "n",
    "d",
    "e",
    "k",
    "mode",
    "accept_count",
    "total",
    "p_hat",
    "ci_low",
    "ci_high",
    "bound",
    "bound_vacuous",
    "seed",
]


def _load_poly(path: str) -> alg.Polynomial:
    with open(path) as fh:
        return alg.poly_from_text(fh.read())


def _emit(report: dict, args) -> None:
    text = json.dumps(report, indent=2) + "\n"
    if not args.quiet:
        sys.stdout.write(text)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS, extrasaction="ignore")
            writer.writeheader()
            flat = dict(report.get("params", {}))
            flat.update({k: v for k, v in report.items() if not isinstance(v, (dict, list))})
            writer.writerow(flat)


def _write_rows(path_or_stdout, columns, rows, quiet):
    if path_or_stdout:
        fh = open(path_or_stdout, "w", newline="")
    else:
        if quiet:
            return
        fh = sys.stdout
    writer = csv.writer(fh)
    writer.writerow(columns)
    writer.writerows(rows)
    if path_or_stdout:
        fh.close()


def _pfloat(x) -> float | None:
    return float(x) if x is not None else None


def _test_report(command, params, mode, accept_count, total, p_hat, ci, bound, vacuous, seed):
    return {
        "command": command,
        "params": params,
        "mode": mode,
        "accept_count": accept_count,
        "total": total,
        "p_hat": _pfloat(p_hat),
        "p_exact": str(p_hat) if isinstance(p_hat, Fraction) else None,
        "ci_low": ci[0] if ci else None,
        "ci_high": ci[1] if ci else None,
        "bound": bound,
        "bound_vacuous": vacuous,
        "seed": seed,
    }


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_sz(args) -> int:
    ordering = (
        genbasis.FieldOrdering.reversed_natural(args.q)
        if args.ordering == "reverse"
        else genbasis.FieldOrdering.natural(args.q)
    )
    if args.poly:
        f = _load_poly(args.poly)
        witness = False
    else:
        f = sztest.tight_witness(args.q, args.n, args.d, ordering)
        witness = True
    if args.exact:
        rep = sztest.degree_drop_probability(f, args.e, args.s, budget=args.budget)
        p = rep.probability
        ci = None
        mode = "exact"
    else:
        rep = sztest.degree_drop_probability(
            f, args.e, args.s, trials=args.trials, seed=args.seed, budget=args.budget
        )
        p = rep.estimate.p_hat
        ci = (rep.estimate.ci_low, rep.estimate.ci_high)
        mode = "sampled"
    equal = mode == "exact" and p == rep.extremal_bound
    report = {
        "command": "sz",
        "params": {"q": args.q, "n": args.n, "d": int(f.degree), "e": args.e, "s": args.s},
        "mode": mode,
        "witness": witness,
        "probability": float(p),
        "probability_exact": str(p) if mode == "exact" else None,
        "ci_low": ci[0] if ci else None,
        "ci_high": ci[1] if ci else None,
        "bound": float(rep.bound),
        "extremal_bound": float(rep.extremal_bound),
        "rank": rep.rank,
        "vacuous": rep.vacuous,
        "equal": equal,
        "seed": args.seed,
    }
    _emit(report, args)
    if mode == "exact":
        held = p <= rep.bound and (not witness or equal)
        return EXIT_OK if held else EXIT_RELATION_FAILED
    return EXIT_OK


def cmd_combin(args) -> int:
    rows = []
    top = args.n * (args.q - 1)
    for d in range(0, top + 1):
        rows.append(["N", args.q, args.n, d, "", "", combin.monomial_count(args.q, args.n, d)])
    if args.m:
        monos = [alg.Monomial(args.q, tuple(int(x) for x in args.m.split(",")))]
    else:
        monos = [combin.extremal_monomial(args.q, args.n, d) for d in range(0, top + 1)]
    for m in monos:
        for s in range(0, top - m.degree + 1):
            rows.append(
                ["U", args.q, args.n, m.degree, s, str(m), combin.dominating_count(m, s)]
            )
            rows.append(
                ["D", args.q, args.n, m.degree, s, str(m), combin.disjoint_count(m, s)]
            )
    _write_rows(args.csv, ["kind", "q", "n", "d", "s", "monomial", "count"], rows, args.quiet)
    return EXIT_OK


def cmd_basis_dump(args) -> int:
    f = _load_poly(args.poly)
    ordering = (
        genbasis.FieldOrdering.reversed_natural(f.q)
        if args.ordering == "reverse"
        else genbasis.FieldOrdering.natural(f.q)
    )
    lines = [
        f"({','.join(str(i) for i in idx)}) -> {c}"
        for idx, c in genbasis.generalized_terms(f, ordering)
    ]
    out = "\n".join(lines) + ("\n" if lines else "")
    if not args.quiet:
        sys.stdout.write(out)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(
                {"command": "basis-dump", "terms": genbasis.generalized_terms(f, ordering)},
                fh,
                indent=2,
            )
    return EXIT_OK


def cmd_distance(args) -> int:
    f = _load_poly(args.poly)
    code = CodeParams(f.q, f.n, args.d)
    res = rmcode.distance(f, code, args.budget)
    report = {
        "command": "distance",
        "params": {"q": f.q, "n": f.n, "d": args.d},
        "distance": res.distance,
        "nearest": alg.poly_to_text(res.nearest),
        "method": res.method,
        "enumerated": res.enumerated,
    }
    _emit(report, args)
    return EXIT_OK


def _bound_fields(cfg: mt.TestConfig, f, args):
    """Soundness bound for the configured distance (explicit or computed)."""
    delta = args.delta
    if delta is None:
        try:
            delta = rmcode.distance(f, cfg.code, args.budget).distance
        except InfeasibleInstanceError:
            return None, None, None
    if delta < 1:
        return None, None, delta  # f is in the code; no bound applies
    bp = mt.soundness_bound(cfg, delta)
    premise = mt.soundness_premise(cfg, delta)
    return bp, premise, delta


def cmd_test_ek(args) -> int:
    f = _load_poly(args.poly)
    cfg = mt.TestConfig(CodeParams(f.q, f.n, args.d), e=args.e, k=args.k)
    params = {"q": f.q, "n": f.n, "d": args.d, "e": args.e, "k": args.k}
    bp, premise, delta = _bound_fields(cfg, f, args)
    if args.exact:
        p = mt.exact_acceptance_probability(f, cfg, args.budget)
        report = _test_report(
            "test-ek", params, "exact", p.numerator, p.denominator, p, None,
            bp.bound if bp else None, bp.vacuous if bp else None, args.seed,
        )
    else:
        res = estimate(
            lambda rng: mt.test_e_k(f, cfg, rng), args.trials, args.seed
        )
        report = _test_report(
            "test-ek", params, "sampled", res.successes, res.trials, res.p_hat,
            (res.ci_low, res.ci_high), bp.bound if bp else None,
            bp.vacuous if bp else None, args.seed,
        )
    report["test_vacuous"] = cfg.vacuous
    report["delta"] = delta
    if premise is not None:
        report["premise_vacuous"] = premise.vacuous
    if bp is not None:
        report["eta"] = bp.eta
        report["eta_alt_reading"] = bp.eta_alt_reading
    held = True
    if args.expect_min is not None:
        held &= float(report["p_hat"]) >= args.expect_min - 1e-12
    if args.expect_max is not None:
        held &= float(report["p_hat"]) <= args.expect_max + 1e-12
    report["relation_held"] = held
    _emit(report, args)
    return EXIT_OK if held else EXIT_RELATION_FAILED


def cmd_corr_h(args) -> int:
    f = _load_poly(args.poly)
    coeffs = tuple(int(x) for x in args.h.split(","))
    h = mt.UnivariatePoly(f.q, coeffs)
    cfg = mt.TestConfig(CodeParams(f.q, f.n, args.d), e=args.e, k=h.degree)
    params = {"q": f.q, "n": f.n, "d": args.d, "e": args.e, "k": h.degree}
    if args.exact:
        p = mt.exact_corr_h_probability(f, cfg, h, args.budget)
        report = _test_report(
            "corr-h", params, "exact", p.numerator, p.denominator, p, None, None, None,
            args.seed,
        )
    else:
        res = estimate(lambda rng: mt.corr_h(f, cfg, h, rng), args.trials, args.seed)
        report = _test_report(
            "corr-h", params, "sampled", res.successes, res.trials, res.p_hat,
            (res.ci_low, res.ci_high), None, None, args.seed,
        )
    report["h"] = list(coeffs)
    held = True
    if args.expect_min is not None:
        held &= float(report["p_hat"]) >= args.expect_min - 1e-12
    if args.expect_max is not None:
        held &= float(report["p_hat"]) <= args.expect_max + 1e-12
    report["relation_held"] = held
    _emit(report, args)
    return EXIT_OK if held else EXIT_RELATION_FAILED


def cmd_robust(args) -> int:
    f = _load_poly(args.poly)
    cfg = mt.TestConfig(CodeParams(f.q, f.n, args.d), e=args.e, k=1)
    dprimes = tuple(int(x) for x in args.dprimes.split(",")) if args.dprimes else None
    rep = mt.robust_distance_experiment(
        f,
        cfg,
        dprimes=dprimes,
        trials=None if args.exact else args.trials,
        seed=args.seed,
        budget=args.budget,
    )
    report = {
        "command": "robust",
        "params": {"q": f.q, "n": f.n, "d": args.d, "e": args.e},
        "mode": rep.mode,
        "samples": rep.samples,
        "distance_counts": {str(k): v for k, v in sorted(rep.distance_counts.items())},
        "fraction_below": {str(k): float(v) for k, v in sorted(rep.fraction_below.items())},
        "fraction_at_most": {
            str(k): float(v) for k, v in sorted(rep.fraction_at_most.items())
        },
        "min_distance": rep.min_distance,
        "median_distance": rep.median_distance,
        "seed": args.seed,
    }
    held = True
    if args.check_reduction and rep.mode == "exact":
        checks = {}
        for dp in report["fraction_at_most"]:
            lhs, rhs, ok = mt.reduction_check(f, cfg, int(dp), args.budget)
            checks[dp] = {"lucky": float(lhs), "bound": float(rhs), "held": ok}
            held &= ok
        report["reduction"] = checks
    report["relation_held"] = held
    _emit(report, args)
    if args.csv:
        rows = [
            [dp, report["fraction_below"][dp], report["fraction_at_most"][dp]]
            for dp in report["fraction_below"]
        ]
        _write_rows(args.csv, ["dprime", "fraction_below", "fraction_at_most"], rows, True)
    return EXIT_OK if held else EXIT_RELATION_FAILED


def cmd_akklr(args) -> int:
    f = _load_poly(args.poly)
    code = CodeParams(f.q, f.n, args.d)
    params = {"q": f.q, "n": f.n, "d": args.d}
    if args.exact:
        pr = mt.akklr_exact_rejection_probability(f, code, args.budget)
        report = _test_report(
            "akklr", params, "exact",
            (1 - pr).numerator, (1 - pr).denominator, 1 - pr, None, None, None, args.seed,
        )
        report["rejection_probability"] = float(pr)
    else:
        res = estimate(lambda rng: mt.akklr_test(f, code, rng), args.trials, args.seed)
        report = _test_report(
            "akklr", params, "sampled", res.successes, res.trials, res.p_hat,
            (res.ci_low, res.ci_high), None, None, args.seed,
        )
        report["rejection_probability"] = 1 - float(res.p_hat)
    report["relation_held"] = True
    _emit(report, args)
    return EXIT_OK


def cmd_setmultilin(args) -> int:
    sizes = [int(x) for x in args.blocks.split(",")]
    blocks, v = [], 0
    for s in sizes:
        blocks.append(tuple(range(v, v + s)))
        v += s
    part = sml.Partition(args.q, tuple(blocks))
    rng = np.random.Generator(np.random.Philox(key=mix64(args.seed)))
    systems = []
    held = True
    for i in range(args.count):
        system = sml.random_system(part, args.m, rng)
        p_full, p_sm = sml.system_vanishing_probability(system, args.budget)
        chain = sml.chain_probabilities(system, args.budget)
        monotone = all(chain[j] <= chain[j + 1] for j in range(len(chain) - 1))
        held &= p_full <= p_sm and monotone
        systems.append(
            {
                "p_full": float(p_full),
                "p_sm": float(p_sm),
                "chain": [float(c) for c in chain],
                "monotone": monotone,
            }
        )
    report = {
        "command": "setmultilin",
        "params": {"q": args.q, "blocks": sizes, "m": args.m, "count": args.count},
        "systems": systems,
        "relation_held": held,
        "seed": args.seed,
    }
    _emit(report, args)
    return EXIT_OK if held else EXIT_RELATION_FAILED


def cmd_suite(args) -> int:
    report = suite_mod.run_suite(seed=args.seed, budget=args.budget, quiet=args.quiet)
    text = suite_mod.suite_json(report)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text)
    elif not args.quiet:
        sys.stdout.write(text)
    return EXIT_OK if report["all_passed"] else EXIT_RELATION_FAILED


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master RNG seed")
    common.add_argument("--budget", type=int, default=None, help="enumeration cap")
    common.add_argument("--json", metavar="PATH", help="write the JSON report here")
    common.add_argument("--csv", metavar="PATH", help="write a CSV report here")
    common.add_argument("--quiet", action="store_true", help="suppress stdout")

    sampled = argparse.ArgumentParser(add_help=False)
    sampled.add_argument("--exact", action="store_true", help="exhaustive enumeration")
    sampled.add_argument("--trials", type=int, default=1000, help="Monte Carlo trials")

    parser = argparse.ArgumentParser(
        prog="rmtest", description="Reed-Muller multiplication-test workbench"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sz", parents=[common, sampled], help="degree-drop probability")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--poly", help="polynomial file (default: the tight witness)")
    p.add_argument("--ordering", choices=["natural", "reverse"], default="natural")
    p.set_defaults(fn=cmd_sz)

    p = sub.add_parser("combin", parents=[common], help="counting tables as CSV")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", help="comma-separated exponents of a specific monomial")
    p.set_defaults(fn=cmd_combin)

    p = sub.add_parser("basis-dump", parents=[common], help="generalized coefficients")
    p.add_argument("--poly", required=True)
    p.add_argument("--ordering", choices=["natural", "reverse"], default="natural")
    p.set_defaults(fn=cmd_basis_dump)

    p = sub.add_parser("distance", parents=[common], help="exact distance to the code")
    p.add_argument("--poly", required=True)
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(fn=cmd_distance)

    p = sub.add_parser("test-ek", parents=[common, sampled], help="multiplier test")
    p.add_argument("--poly", required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--delta", type=int, help="distance for the soundness bound")
    p.add_argument("--expect-min", type=float, help="fail unless p_hat >= this")
    p.add_argument("--expect-max", type=float, help="fail unless p_hat <= this")
    p.set_defaults(fn=cmd_test_ek)

    p = sub.add_parser("corr-h", parents=[common, sampled], help="shaped multiplier test")
    p.add_argument("--poly", required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--h", required=True, help="comma-separated c0,..,ck")
    p.add_argument("--expect-min", type=float)
    p.add_argument("--expect-max", type=float)
    p.set_defaults(fn=cmd_corr_h)

    p = sub.add_parser("robust", parents=[common, sampled], help="distance distribution")
    p.add_argument("--poly", required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--dprimes", help="comma-separated candidate radii")
    p.add_argument("--check-reduction", action="store_true")
    p.set_defaults(fn=cmd_robust)

    p = sub.add_parser("akklr", parents=[common, sampled], help="affine restriction test")
    p.add_argument("--poly", required=True)
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(fn=cmd_akklr)

    p = sub.add_parser("setmultilin", parents=[common], help="random partitioned systems")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--blocks", required=True, help="comma-separated block sizes")
    p.add_argument("--m", type=int, default=2, help="polynomials per system")
    p.add_argument("--count", type=int, default=1, help="number of systems")
    p.set_defaults(fn=cmd_setmultilin)

    p = sub.add_parser("suite", parents=[common], help="run the acceptance battery")
    p.set_defaults(fn=cmd_suite)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except InfeasibleInstanceError as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
