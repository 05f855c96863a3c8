"""Command-line laboratory.

Every output starts with a ``#`` header line recording the version, the
subcommand and every result-affecting flag (including the seed), which is
enough to rerun it. ``--threads``, ``--format`` and ``--out`` do not change
results and are left out of the header.

Exit codes: 0 success, 1 runtime or verification failure, 2 usage error.
The master seed defaults to ``$QUADVAR_SEED`` or 0; ``--seed`` wins.
"""
from __future__ import annotations

import argparse
import io
import os
import sys
from fractions import Fraction

from . import __version__
from .discrete import (
    KnowledgeState,
    as_spectrum,
    hypergeometric_distribution,
    quadrature_conditional_distribution,
    shuffle_marginalize,
    total_variance_check,
)
from .estimate import mc_integrate, quadrature_integrate
from .grid import RULES, integer_root
from .integrands import NAMES as INTEGRANDS, by_name
from .simlab import (
    ChiSimConfig,
    MCMCCompareConfig,
    mcmc_variance_compare,
    run_chi_experiment,
    totalvar_sweep,
    unknown_function_experiment,
)

SEED_ENV = "QUADVAR_SEED"
NOT_IN_HEADER = {"threads", "format", "out", "command", "func"}


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """Full-precision decimal for CSV; empty for missing values."""
    if x is None:
        return ""
    if isinstance(x, Fraction):
        x = float(x)
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _csv(header: list, rows: list) -> str:
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _table(header: list, rows: list, precision: int = 6) -> str:
    def cell(v):
        if isinstance(v, (float, Fraction)):
            return f"{float(v):.{precision}g}"
        return "" if v is None else str(v)

    cells = [header] + [[cell(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    out = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    out.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(out) + "\n"


def _header_line(args) -> str:
    parts = [f"quadvar {__version__}", args.command]
    for key, value in sorted(vars(args).items()):
        if key in NOT_IN_HEADER or value is None or value is False:
            continue
        if isinstance(value, list):
            value = ";".join("=".join(map(str, v)) if isinstance(v, tuple) else str(v) for v in value)
        parts.append(f"{key}={value}")
    return "# " + " ".join(parts) + "\n"


def _int_list(text: str) -> list:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _number(text: str):
    """Exact deck value: int when possible, otherwise a Fraction."""
    try:
        return int(text)
    except ValueError:
        try:
            return Fraction(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _deck(text: str) -> list:
    return [_number(t.strip()) for t in text.split(",") if t.strip()]


def _pin(text: str):
    pos, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"pin must look like POS=VALUE, got {text!r}")
    try:
        return int(pos), _number(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad pin position in {text!r}")


# --- subcommands ------------------------------------------------------------------


def cmd_integrate(args):
    """Estimate the integral of a built-in integrand."""
    D = args.dim
    oracle = by_name(args.fn, D)
    method = args.method or ("mc" if args.rule is None and args.points_per_axis is None
                             and args.n is not None else "quadrature")
    if method == "mc":
        if args.rule is not None or args.points_per_axis is not None:
            raise UsageError("--rule and -m apply to quadrature only")
        if args.n is None:
            raise UsageError("mc needs --n")
        report = mc_integrate(oracle, args.n, args.seed)
    else:
        if args.n is not None and args.points_per_axis is not None:
            raise UsageError("give either --n or -m, not both")
        m = args.points_per_axis if args.points_per_axis is not None else integer_root(args.n or 1, D)
        report = quadrature_integrate(oracle, args.rule or "midpoint", m)
    header = ["method", "dimension", "sample_count", "estimate", "theoretical_std", "empirical_std",
              "seed", "known_mean"]
    row = [report.method, D, report.sample_count, report.estimate, report.theoretical_std,
           report.empirical_std, report.seed, oracle.known_mean]
    return header, [row], 0, []


def cmd_chi_sim(args):
    """Simulated error-exponent table."""
    config = ChiSimConfig(
        rule=args.rule,
        dimensions=tuple(args.dims),
        n=args.n,
        inner_reps=args.inner_reps,
        outer_reps=args.outer_reps,
        master_seed=args.seed,
        eta=args.eta,
    )
    result = run_chi_experiment(config, threads=args.threads)
    print(f"chi-sim: {len(result.rows)} dimensions in {result.runtime:.2f}s", file=sys.stderr)
    if args.format == "table":
        header = ["Dimension D", "Error exponent", "Theory exponent chi", "Simulated exponent chi_hat"]
        rows = [[r.dimension, f"{r.error_exponent:g}", f"{r.theory_chi:g}", f"{r.chi_hat:.3f} +- {r.chi_hat_std:.3f}"]
                for r in result.rows]
        return header, rows, 0, []
    header = ["dimension", "error_exponent", "theory_chi", "chi_hat", "chi_hat_std"]
    rows = [[r.dimension, r.error_exponent, r.theory_chi, r.chi_hat, r.chi_hat_std] for r in result.rows]
    return header, rows, 0, []


def cmd_discrete_verify(args):
    """Exact shuffle-marginalisation and total-variance checks on one deck."""
    deck = args.deck
    if len(deck) > args.max_k:
        raise RuntimeError(
            f"deck has K={len(deck)} cards; exact enumeration is capped at --max-k {args.max_k}. "
            "Use a smaller deck or raise --max-k (cost grows like K!)."
        )
    if not 1 <= args.n <= len(deck):
        raise UsageError(f"--n must be in [1, {len(deck)}]")
    pins = dict(args.pin or [])
    if len(pins) != len(args.pin or []):
        raise UsageError("a position is pinned twice")
    state = KnowledgeState.pinned(deck, pins)
    marginal = shuffle_marginalize(state, args.n)
    hyper = hypergeometric_distribution(as_spectrum(deck), args.n)
    keys = sorted(set(marginal.probs) | set(hyper.probs))
    rows = []
    for k in keys:
        counts = ";".join(f"{fmt(v)}={c}" for v, c in zip(marginal.values, k))
        rows.append([counts, marginal[k], hyper[k], abs(marginal[k] - hyper[k])])
    max_dev = marginal.max_abs_diff(hyper)
    tv = total_variance_check(state, args.n)

    notes = []
    failed = False

    def verdict(name, ok, detail):
        nonlocal failed
        failed |= not ok
        notes.append(f"# {name}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())

    verdict("marginal_equals_hypergeometric", max_dev == 0, f"max_abs_diff={max_dev}")
    verdict("total_variance_inequality", tv.inequality_holds,
            f"E[Var|g]={tv.expected_conditional_variance} Var_MC={tv.mc_variance} "
            f"gap={tv.mc_variance - tv.expected_conditional_variance}")
    verdict("total_variance_identity",
            tv.expected_conditional_variance + tv.variance_of_conditional_means == tv.mc_variance,
            f"Var(E[.|g])={tv.variance_of_conditional_means}")
    if state.is_uninformed:
        verdict("uninformed_equality", tv.expected_conditional_variance == tv.mc_variance, "")
    if args.grid:
        if len(args.grid) != args.n:
            raise UsageError("--grid must list exactly --n positions")
        cond = quadrature_conditional_distribution(state.with_grid(args.grid))
        for k, p in sorted(cond.probs.items()):
            counts = ";".join(f"{fmt(v)}={c}" for v, c in zip(cond.values, k))
            notes.append(f"# conditional grid={args.grid} counts={counts} p={p}")
    return ["counts", "pmf_quadrature_marginal", "pmf_hypergeometric", "abs_diff"], rows, int(failed), notes


def cmd_unknown_fn(args):
    """Quadrature vs MC on unknown i.i.d. normal integrands."""
    header = ["dimension", "samples", "reps", "quadrature_mean", "quadrature_mean_se", "quadrature_std",
              "mc_mean", "mc_mean_se", "mc_std"]
    rows = []
    for D in args.dim:
        s = unknown_function_experiment(D, args.samples, args.reps, args.seed, std=args.std)
        rows.append([D, s.samples, s.reps, s.quadrature_mean, s.quadrature_mean_se, s.quadrature_std,
                     s.mc_mean, s.mc_mean_se, s.mc_std])
    return header, rows, 0, []


def cmd_mcmc_compare(args):
    """AR(1) chain-mean variance against tau * sigma^2 / N."""
    r = mcmc_variance_compare(MCMCCompareConfig(args.n, args.rho, args.reps, args.seed, args.sigma))
    header = ["rho", "chain_length", "replicates", "tau", "theory_variance", "empirical_variance",
              "relative_error", "finite_n_variance", "empirical_tau"]
    rel = r.empirical_variance / r.theory_variance - 1.0 if r.theory_variance else 0.0
    row = [args.rho, args.n, args.reps, r.tau, r.theory_variance, r.empirical_variance, rel,
           r.finite_n_variance, r.empirical_tau]
    return header, [row], 0, []


def cmd_totalvar_sweep(args):
    """Randomised exact total-variance checks; fails on any violation."""
    r = totalvar_sweep(args.count, args.max_k, args.seed)
    header = ["count", "max_k", "violations", "uninformed_cases", "equality_failures", "identity_failures"]
    bad = r.violations + r.equality_failures + r.identity_failures
    return header, [[r.count, args.max_k, r.violations, r.uninformed_cases, r.equality_failures,
                     r.identity_failures]], int(bad > 0), []


# --- parser -----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"master seed (default ${SEED_ENV} or 0)")
    common.add_argument("--format", choices=("csv", "table"), default="csv")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--threads", type=int, default=1, help="worker cap; never changes results")

    parser = _Parser(prog="quadvar", description="MC vs Newton-Cotes quadrature variance laboratory")
    parser.add_argument("--version", action="version", version=f"quadvar {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("integrate", parents=[common], help="integrate a built-in function",
                       description="CSV columns: method, dimension, sample_count, estimate, "
                                   "theoretical_std, empirical_std, seed, known_mean")
    p.add_argument("--method", choices=("quadrature", "mc"))
    p.add_argument("--rule", choices=sorted(RULES))
    p.add_argument("--dim", "-d", type=int, default=1)
    p.add_argument("-m", "--points-per-axis", dest="points_per_axis", type=int)
    p.add_argument("--n", type=int, help="sample count (MC) or total grid points (quadrature)")
    p.add_argument("--fn", default="linear", help=f"integrand: {', '.join(INTEGRANDS)}")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("chi-sim", parents=[common], help="error-exponent simulation",
                       description="CSV columns: dimension, error_exponent, theory_chi, chi_hat, chi_hat_std")
    p.add_argument("--rule", choices=sorted(RULES), required=True)
    p.add_argument("--dims", type=_int_list, default=[1, 2, 4, 8, 16])
    p.add_argument("--n", type=int, default=2 ** 16)
    p.add_argument("--inner-reps", type=int, default=100)
    p.add_argument("--outer-reps", type=int, default=10)
    p.add_argument("--eta", type=float, default=1.0, help="derivatives are uniform on [-eta, eta]")
    p.set_defaults(func=cmd_chi_sim)

    p = sub.add_parser("discrete-verify", parents=[common], help="exact deck checks",
                       description="CSV columns: counts, pmf_quadrature_marginal, pmf_hypergeometric, "
                                   "abs_diff; verdicts follow as '#' lines")
    p.add_argument("--deck", type=_deck, required=True, help="comma-separated card values")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--pin", type=_pin, action="append", help="POS=VALUE (0-based), repeatable")
    p.add_argument("--grid", type=_int_list, help="grid positions for the conditional law")
    p.add_argument("--max-k", type=int, default=8)
    p.set_defaults(func=cmd_discrete_verify)

    p = sub.add_parser("unknown-fn", parents=[common], help="unknown-function experiment",
                       description="CSV columns: dimension, samples, reps, quadrature_mean, "
                                   "quadrature_mean_se, quadrature_std, mc_mean, mc_mean_se, mc_std")
    p.add_argument("--dim", type=_int_list, default=[1])
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--std", type=float, default=1.0)
    p.set_defaults(func=cmd_unknown_fn)

    p = sub.add_parser("mcmc-compare", parents=[common], help="AR(1) chain variance vs tau",
                       description="CSV columns: rho, chain_length, replicates, tau, theory_variance, "
                                   "empirical_variance, relative_error, finite_n_variance, empirical_tau")
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--sigma", type=float, default=1.0)
    p.set_defaults(func=cmd_mcmc_compare)

    p = sub.add_parser("totalvar-sweep", parents=[common], help="random total-variance checks",
                       description="CSV columns: count, max_k, violations, uninformed_cases, "
                                   "equality_failures, identity_failures")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--max-k", type=int, default=8)
    p.set_defaults(func=cmd_totalvar_sweep)
    return parser


def _resolve_seed(args) -> None:
    if args.seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            args.seed = int(env) if env else 0
        except ValueError:
            raise UsageError(f"${SEED_ENV} must be an integer, got {env!r}")
    if args.seed < 0:
        raise UsageError("--seed must be non-negative")
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _resolve_seed(args)
        header, rows, code, notes = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"quadvar: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, OverflowError) as exc:
        print(f"quadvar: {exc}", file=sys.stderr)
        return 1

    buf = io.StringIO()
    buf.write(_header_line(args))
    buf.write(_csv(header, rows) if args.format == "csv" else _table(header, rows))
    for line in notes:
        buf.write(line + "\n")
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
