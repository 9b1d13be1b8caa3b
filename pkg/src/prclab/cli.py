"""Command-line experiment driver.

Four subcommands: `hyper` sweeps the norm-inequality and collision
checks over random instances, `prc-eval` compares Monte-Carlo code
estimates against closed forms, `compile` runs the oracle-removal
sweep, and `bounds` prints every closed-form bound for one parameter
point. Runs are deterministic functions of (flags, --seed); reports
start with a config echo so a file identifies its own run. Exit status:
0 clean, 1 when a checked inequality fails beyond its slack, 2 usage.

Grid cells go to a thread pool sized by PRCLAB_WORKERS (default 1);
cells derive independent child seeds, so pool size never changes
output. Results are written once, in grid order.
"""

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, _rng
from .boolfn import (
    INEQ_SLACK,
    FunctionTable,
    RandomizedFunctionTable,
    check_collision_bound,
    collision_exponent,
    noise_operator,
    p_norm,
)
from .compiler import (
    CompilerParams,
    bad1_bound,
    bad2_tau_term,
    run_completeness_experiment,
    theoretical_delta_prime,
)
from .infotheory import key_leakage_bound
from .prc import estimate_completeness, estimate_soundness
from .prfcode import (
    PrfPrcParams,
    PrfPrcScheme,
    closed_form_completeness,
    closed_form_soundness_bound,
)
from .reports import render_rows
from .toyschemes import PadScheme

HYPER_N_CAP = 12


def _worker_count(cells):
    raw = os.environ.get("PRCLAB_WORKERS", "1")
    try:
        workers = int(raw)
    except ValueError:
        raise ValueError(f"PRCLAB_WORKERS must be an integer, got {raw!r}")
    if workers < 1:
        raise ValueError("PRCLAB_WORKERS must be >= 1")
    return max(1, min(workers, cells))


def _pool_map(fn, items):
    workers = _worker_count(len(items))
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _emit(args, columns, rows, config):
    config = dict(config)
    config["seed"] = args.seed
    config["format"] = args.format
    text = render_rows(args.format, columns, rows, config, __version__)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _random_mass(rng, size, labels):
    mass = rng.random((size, labels))
    return mass / mass.sum(axis=1, keepdims=True)


def cmd_hyper(args):
    for n in args.n:
        if not 1 <= n <= HYPER_N_CAP:
            raise ValueError(f"--n values must be in 1..{HYPER_N_CAP}")
    for rho in args.rho:
        if not 0 <= rho <= 1:
            raise ValueError("--rho values must be in [0, 1]")
    cells = [(n, rho) for n in args.n for rho in args.rho]
    per_cell = max(1, math.ceil(args.trials / len(cells)))

    def run_cell(item):
        idx, (n, rho) = item
        rng = _rng.generator(_rng.split(args.seed, len(cells))[idx])
        rows = []
        for _ in range(per_cell):
            f = FunctionTable(n, rng.normal(size=1 << n))
            lhs = p_norm(noise_operator(f, rho), 2.0)
            rhs = p_norm(f, 1.0 + rho * rho)
            rows.append(["hyper", n, rho, lhs, rhs, rhs - lhs, lhs <= rhs + INEQ_SLACK])
        for _ in range(per_cell):
            labels = range(int(rng.integers(1, 5)))
            f = RandomizedFunctionTable(n, labels, _random_mass(rng, 1 << n, len(labels)))
            g = RandomizedFunctionTable(n, labels, _random_mass(rng, 1 << n, len(labels)))
            chk = check_collision_bound(f, g, rho)
            rows.append(
                ["collision", n, rho, chk.lhs, chk.rhs, chk.rhs - chk.lhs, chk.ok]
            )
        return rows

    results = _pool_map(run_cell, list(enumerate(cells)))
    rows = [row for cell_rows in results for row in cell_rows]
    columns = ["check", "n", "rho", "lhs", "rhs", "margin", "ok"]
    config = {
        "subcommand": "hyper",
        "n": ",".join(map(str, args.n)),
        "rho": ",".join(map(str, args.rho)),
        "trials": args.trials,
        "per_cell": per_cell,
    }
    _emit(args, columns, rows, config)
    return 0 if all(row[-1] for row in rows) else 1


def cmd_prc_eval(args):
    if not args.rho or not args.ell or not args.blocks:
        raise ValueError("grid must be nonempty")
    for rho in args.rho:
        if not 0 <= rho <= 1:
            raise ValueError("--rho values must be in [0, 1]")
    if args.trials < 100:
        raise ValueError("--trials must be at least 100")
    cells = [(r, e, b) for r in args.rho for e in args.ell for b in args.blocks]

    def run_cell(item):
        idx, (rho, ell, blocks) = item
        comp_seed, sound_seed = _rng.split(args.seed, 2 * len(cells))[2 * idx : 2 * idx + 2]
        scheme = PrfPrcScheme(PrfPrcParams(args.lam, rho_design=rho, ell=ell, blocks=blocks))
        comp = estimate_completeness(scheme, rho, args.trials, comp_seed)
        sound = estimate_soundness(scheme, args.trials, sound_seed)
        false_accept = 1.0 - sound.estimate
        closed = closed_form_completeness(rho, ell, blocks)
        bound = closed_form_soundness_bound(ell, blocks)
        # acceptance sits in [closed, closed + chance]: the closed form
        # counts only clean blocks, while a corrupted block still passes
        # when the resampled seed's tag matches by luck (< 2^-ell each)
        chance = min(1.0, blocks * 2.0**-ell)
        sigma = math.sqrt(
            max(closed * (1 - closed), comp.estimate * (1 - comp.estimate)) / args.trials
        )
        ok = (
            closed - 4 * sigma - 4 / args.trials <= comp.estimate
            and comp.estimate <= closed + chance + 4 * sigma + 4 / args.trials
            and false_accept <= bound + 4 * math.sqrt(0.25 / args.trials)
        )
        return [
            args.lam, rho, ell, blocks, scheme.codeword_len, args.trials,
            comp.estimate, comp.ci95_halfwidth, closed,
            false_accept, sound.ci95_halfwidth, bound, ok,
        ]

    rows = _pool_map(run_cell, list(enumerate(cells)))
    columns = [
        "lambda", "rho", "ell", "blocks", "n", "trials",
        "completeness_mc", "completeness_ci95", "completeness_closed",
        "false_accept_mc", "false_accept_ci95", "soundness_bound", "ok",
    ]
    config = {
        "subcommand": "prc-eval",
        "lambda": args.lam,
        "rho": ",".join(map(str, args.rho)),
        "ell": ",".join(map(str, args.ell)),
        "blocks": ",".join(map(str, args.blocks)),
        "trials": args.trials,
    }
    _emit(args, columns, rows, config)
    return 0 if all(row[-1] for row in rows) else 1


def _compile_scheme(args, rho):
    if args.scheme == "prf":
        return PrfPrcScheme(
            PrfPrcParams(args.lam, rho_design=rho, ell=args.ell, blocks=args.blocks)
        )
    return PadScheme(n=args.n, lam=args.lam)


def cmd_compile(args):
    if not args.rho or not args.tau:
        raise ValueError("grid must be nonempty")
    for tau in args.tau:
        if not 0 < tau < 1:
            raise ValueError("--tau values must be in (0, 1)")
    if args.trials < 100:
        raise ValueError("--trials must be at least 100")
    cells = [(r, t) for r in args.rho for t in args.tau]

    def run_cell(item):
        idx, (rho, tau) = item
        comp_seed, base_seed = _rng.split(args.seed, 2 * len(cells))[2 * idx : 2 * idx + 2]
        scheme = _compile_scheme(args, rho)
        report, bad = run_completeness_experiment(
            scheme, CompilerParams(tau), rho, args.trials, comp_seed
        )
        baseline = estimate_completeness(scheme, rho, args.trials, base_seed)
        bad1_freq = bad.bad1_count / args.trials
        bad2_freq = bad.bad2_count / args.trials
        b1_bound = bad1_bound(scheme.query_bound, tau, scheme.security_param)
        tau_term = bad2_tau_term(scheme.query_bound, tau, rho)
        theory = theoretical_delta_prime(
            1 - baseline.estimate, scheme.query_bound, tau, rho,
            0.0, scheme.codeword_len, scheme.security_param,
        )
        def sigma(f):
            return math.sqrt(f * (1 - f) / args.trials)
        ok = (
            bad1_freq <= b1_bound + 4 * sigma(bad1_freq) + INEQ_SLACK
            and bad2_freq <= tau_term + 5 * sigma(bad2_freq) + INEQ_SLACK
        )
        ell = args.ell if args.scheme == "prf" else ""
        blocks = args.blocks if args.scheme == "prf" else ""
        return [
            scheme.security_param, rho, tau, scheme.query_bound,
            scheme.codeword_len, args.trials,
            report.estimate, baseline.estimate,
            bad1_freq, b1_bound, bad2_freq, tau_term, theory,
            report.params["S_size_mean"],
            report.params["bad1_mode"], ell, blocks, args.scheme, ok,
        ]

    rows = _pool_map(run_cell, list(enumerate(cells)))
    columns = [
        "lambda", "rho", "tau", "Q", "n", "trials",
        "completeness_compiled", "completeness_uncompiled",
        "bad1_freq", "bad1_bound", "bad2_freq", "bad2_tau_term",
        "delta_prime_theory", "S_size_mean",
        "bad1_mode", "ell", "blocks", "scheme", "ok",
    ]
    config = {
        "subcommand": "compile",
        "scheme": args.scheme,
        "lambda": args.lam,
        "rho": ",".join(map(str, args.rho)),
        "tau": ",".join(map(str, args.tau)),
        "ell": args.ell,
        "blocks": args.blocks,
        "n": args.n,
        "trials": args.trials,
    }
    _emit(args, columns, rows, config)
    return 0 if all(row[-1] for row in rows) else 1


def cmd_bounds(args):
    if not 0 < args.tau < 1:
        raise ValueError("--tau must be in (0, 1)")
    if not 0 <= args.rho <= 1:
        raise ValueError("--rho must be in [0, 1]")
    if args.delta < 0 or args.eps < 0:
        raise ValueError("--delta and --eps must be nonnegative")
    q = args.q_bound
    lines = [
        ("exponent", collision_exponent(args.rho)),
        ("bad1_bound", bad1_bound(q, args.tau, args.lam)),
        ("bad2_tau_term", bad2_tau_term(q, args.tau, args.rho)),
        ("eps_term", q * q * math.sqrt(args.eps * args.n)),
        (
            "delta_prime_theory",
            theoretical_delta_prime(
                args.delta, q, args.tau, args.rho, args.eps, args.n, args.lam
            ),
        ),
    ]
    if args.ell is not None and args.blocks is not None:
        lines.append(
            ("closed_form_completeness",
             closed_form_completeness(args.rho, args.ell, args.blocks))
        )
        lines.append(
            ("closed_form_soundness_bound",
             closed_form_soundness_bound(args.ell, args.blocks))
        )
    if args.m is not None and args.ell is not None:
        lines.append(
            ("key_leakage_bound", key_leakage_bound(args.eps, args.n, args.m, args.ell))
        )
    if args.c is not None:
        tau_c = float(args.lam) ** (-args.c)
        lines.append(("tau_at_c", tau_c))
        lines.append(("tau_term_exponent_at_c", -args.c * collision_exponent(args.rho)))
        if 0 < tau_c < 1:
            lines.append(("bad2_tau_term_at_c", bad2_tau_term(q, tau_c, args.rho)))
    width = max(len(name) for name, _ in lines)
    for name, value in lines:
        print(f"{name:<{width}}  {value!r}")
    return 0


def _add_common(sub, trials_default):
    sub.add_argument("--seed", type=int, default=0, help="root seed (u64)")
    sub.add_argument("--trials", type=int, default=trials_default)
    sub.add_argument("--out", help="output path (default: stdout)")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="prclab",
        description="pseudorandom-code laboratory experiments",
    )
    parser.add_argument("--version", action="version", version=f"prclab {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    hyper = subs.add_parser("hyper", help="norm-inequality and collision sweeps")
    _add_common(hyper, trials_default=10_000)
    hyper.add_argument("--n", type=int, nargs="+", default=list(range(2, 11)))
    hyper.add_argument("--rho", type=float, nargs="+", default=[0.0, 0.25, 0.5, 0.75, 1.0])
    hyper.set_defaults(func=cmd_hyper)

    prc = subs.add_parser("prc-eval", help="code estimates vs closed forms")
    _add_common(prc, trials_default=1_000)
    prc.add_argument("--lambda", dest="lam", type=int, default=16)
    prc.add_argument("--rho", type=float, nargs="+", default=[0.5, 0.9])
    prc.add_argument("--ell", type=int, nargs="+", default=[8, 16])
    prc.add_argument("--blocks", type=int, nargs="+", default=[256])
    prc.set_defaults(func=cmd_prc_eval)

    comp = subs.add_parser("compile", help="oracle-removal sweep")
    _add_common(comp, trials_default=200)
    comp.add_argument("--scheme", choices=("prf", "pad"), default="prf")
    comp.add_argument("--lambda", dest="lam", type=int, default=16)
    comp.add_argument("--rho", type=float, nargs="+", default=[0.5])
    comp.add_argument("--tau", type=float, nargs="+", default=[0.1])
    comp.add_argument("--ell", type=int, default=8)
    comp.add_argument("--blocks", type=int, default=64)
    comp.add_argument("--n", type=int, default=64, help="codeword bits for --scheme pad")
    comp.set_defaults(func=cmd_compile)

    bounds = subs.add_parser("bounds", help="print closed-form bounds")
    bounds.add_argument("--lambda", dest="lam", type=int, default=16)
    bounds.add_argument("--rho", type=float, default=0.5)
    bounds.add_argument("--tau", type=float, default=0.1)
    bounds.add_argument("--q-bound", type=int, default=0)
    bounds.add_argument("--delta", type=float, default=0.0)
    bounds.add_argument("--eps", type=float, default=0.0)
    bounds.add_argument("--n", type=int, default=0)
    bounds.add_argument("--ell", type=int)
    bounds.add_argument("--blocks", type=int)
    bounds.add_argument("--m", type=int, help="samples for the key-leakage bound")
    bounds.add_argument("--c", type=float, help="print the tau = lambda^-c terms")
    bounds.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
