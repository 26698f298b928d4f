"""``agg`` command line.

Every invocation writes exactly one JSON document to stdout. Exit codes:
0 success, 1 validation or verification failure, 2 usage or input error,
3 computation failure.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time

import numpy as np

from . import io
from .continuation import PathFollowingError, SolverOptions, solve
from .game import InvalidProfileError, check_profile, validate_game
from .generators import (encode_graphical_game, encode_normal_form,
                         generate_ice_cream, random_game)
from .oracle import verify_nash
from .payoff import METHODS, NAIVE_CAP, EnumerationCapError, jacobian
from .symmetric import AsymmetricGameError, jacobian_symmetric

log = logging.getLogger("aggnash.cli")

OK, FAILED, USAGE, COMPUTE = 0, 1, 2, 3
ALL_METHODS = METHODS + ("symmetric",)


class CommandError(Exception):
    """Abort the command with an exit code and a JSON error document."""

    def __init__(self, code, message, **extra):
        super().__init__(message)
        self.code = code
        self.doc = {"error": message, **extra}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CommandError(USAGE, f"{self.prog}: {message}")


def _threads(args):
    if args.threads is not None:
        return args.threads
    env = os.environ.get("AGG_THREADS")
    if not env:
        return 1
    try:
        n = int(env)
    except ValueError:
        raise CommandError(USAGE, f"AGG_THREADS={env!r} is not an integer")
    if n < 1:
        raise CommandError(USAGE, "AGG_THREADS must be at least 1")
    return n


def _load_game(path, check=True):
    try:
        game = io.load_game(path)
    except io.FormatError as exc:
        raise CommandError(USAGE, str(exc))
    if check:
        report = validate_game(game)
        if not report.ok:
            raise CommandError(FAILED, "game failed validation",
                               **report.to_dict())
    return game


def _load_profile(path, game):
    try:
        sigma = io.load_strategies(path, game)
        return check_profile(game, sigma)
    except (io.FormatError, InvalidProfileError) as exc:
        raise CommandError(USAGE, str(exc))


def _write_out(doc, path):
    if path:
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(io.dumps(doc))
        except OSError as exc:
            raise CommandError(USAGE, f"cannot write {path}: {exc.strerror}")


def _symmetric_jacobian(game, sigma):
    try:
        return jacobian_symmetric(game, np.asarray(sigma))
    except AsymmetricGameError as exc:
        raise CommandError(USAGE, str(exc))


# commands

def cmd_validate(args):
    report = validate_game(_load_game(args.game, check=False))
    return (OK if report.ok else FAILED), report.to_dict()


def cmd_jacobian(args):
    game = _load_game(args.game)
    sigma = _load_profile(args.strategies, game)
    if args.method == "symmetric":
        jac = _symmetric_jacobian(game, sigma)
    else:
        try:
            jac = jacobian(game, sigma, args.method, cap=args.cap,
                           threads=_threads(args))
        except EnumerationCapError as exc:
            raise CommandError(COMPUTE, str(exc))
    doc = jac.to_dict()
    _write_out(doc, args.out)
    return OK, doc


def _parse_bonus(text, game):
    if text == "auto":
        return "auto"
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok in game.actions:
            out.append(game.actions.index(tok))
            continue
        try:
            out.append(int(tok))
        except ValueError:
            raise CommandError(USAGE, f"unknown bonus action {tok!r}")
    return out


def cmd_solve(args):
    game = _load_game(args.game)
    method = "symmetric" if args.symmetric else args.method
    if method == "symmetric" and not game.is_symmetric:
        raise CommandError(USAGE, "symmetric mode needs identical action "
                                  "sets for all agents")
    bonus = _parse_bonus(args.bonus, game)
    if bonus != "auto" and method == "symmetric" and len(bonus) == 1:
        bonus = bonus * game.num_agents
    opts = SolverOptions(eps=args.eps, max_steps=args.max_steps,
                         method=method,
                         threads=_threads(args))
    try:
        res = solve(game, bonus, symmetric=method == "symmetric",
                    options=opts, seed=args.seed)
    except ValueError as exc:
        raise CommandError(USAGE, str(exc))
    except PathFollowingError as exc:
        pt = exc.point
        raise CommandError(COMPUTE, str(exc), steps=exc.steps,
                           last_point={"w": pt.w.tolist(),
                                       "lambda": float(pt.lam)})
    except EnumerationCapError as exc:
        raise CommandError(COMPUTE, str(exc))
    doc = io.strategies_to_dict(res.sigma)
    doc.update({
        "steps": res.steps,
        "final_lambda": res.lam,
        "residual": res.residual_trace[-1] if res.residual_trace else None,
        "regret": res.regret.to_dict(),
    })
    _write_out(io.strategies_to_dict(res.sigma), args.out)
    if args.diagnostics:
        with open(args.diagnostics, "w", encoding="utf-8") as fh:
            for line in res.diagnostics_lines():
                fh.write(line + "\n")
    return (OK if res.regret.passed else FAILED), doc


def cmd_verify(args):
    game = _load_game(args.game)
    sigma = _load_profile(args.strategies, game)
    report = verify_nash(game, sigma, args.eps)
    return (OK if report.passed else FAILED), report.to_dict()


def _bench_profiles(game, k, seed, shared):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(k):
        if shared:
            q = rng.dirichlet(np.ones(len(game.action_sets[0])))
            out.append([q.copy() for _ in range(game.num_agents)])
        else:
            out.append([rng.dirichlet(np.ones(len(a)))
                        for a in game.action_sets])
    return out


def cmd_bench(args):
    game = _load_game(args.game)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    bad = [m for m in methods if m not in ALL_METHODS]
    if bad:
        raise CommandError(USAGE, f"unknown methods {bad}")
    if args.strategies < 1:
        raise CommandError(USAGE, "--strategies must be positive")
    if "symmetric" in methods and not game.is_symmetric:
        raise CommandError(USAGE, "symmetric method needs a symmetric game")
    profiles = _bench_profiles(game, args.strategies, args.seed,
                               "symmetric" in methods)
    threads = _threads(args)
    table = {}
    for method in methods:
        ue = pe = 0
        secs = 0.0
        row = {}
        try:
            for sigma in profiles:
                t0 = time.perf_counter()
                if method == "symmetric":
                    jac = jacobian_symmetric(game, sigma[0])
                else:
                    jac = jacobian(game, sigma, method, cap=args.cap,
                                   threads=threads)
                secs += time.perf_counter() - t0
                ue += jac.utility_evals
                pe += jac.prob_evals
        except EnumerationCapError as exc:
            table[method] = {"error": str(exc)}
            continue
        k = len(profiles)
        row["utility_evals"] = ue / k
        row["prob_evals"] = pe / k
        if args.timing:
            row["seconds"] = secs / k
        table[method] = row
    doc = {"num_agents": game.num_agents, "num_actions": game.num_actions,
           "max_in_degree": game.max_in_degree,
           "strategies": args.strategies, "seed": args.seed,
           "methods": table}
    return OK, doc


def cmd_generate(args):
    try:
        if args.family == "ice-cream":
            game = generate_ice_cream(args.n, args.locations, args.chocolate,
                                      shared=args.shared, w_c=args.wc,
                                      w_v=args.wv)
        elif args.family == "random":
            game = random_game(args.agents, args.actions, args.degree,
                               args.seed, shared=args.shared, kind=args.kind)
        elif args.family == "encode-normal-form":
            game = encode_normal_form(io.load_normal_form(args.input))
        else:
            game = encode_graphical_game(*io.load_graphical(args.input))
    except (io.FormatError, ValueError) as exc:
        raise CommandError(USAGE, str(exc))
    doc = io.game_to_dict(game)
    _write_out(doc, args.out)
    return OK, doc


# parser

def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _nonneg(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def build_parser():
    p = _Parser(prog="agg", description="Action-graph game toolkit.")
    p.add_argument("--threads", type=_positive, default=None,
                   help="worker threads for Jacobian rows "
                        "(default: $AGG_THREADS or 1)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True,
                           parser_class=_Parser)

    s = sub.add_parser("validate", help="check a game file")
    s.add_argument("game")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("jacobian", help="payoff Jacobian at a profile")
    s.add_argument("game")
    s.add_argument("-s", "--strategies", required=True)
    s.add_argument("-m", "--method", choices=ALL_METHODS,
                   default="partitioned")
    s.add_argument("-o", "--out")
    s.add_argument("--cap", type=_positive, default=NAIVE_CAP,
                   help="largest enumeration per row block")
    s.set_defaults(func=cmd_jacobian)

    s = sub.add_parser("solve", help="find a Nash equilibrium")
    s.add_argument("game")
    s.add_argument("--symmetric", action="store_true")
    s.add_argument("--method", choices=ALL_METHODS, default="partitioned")
    s.add_argument("--eps", type=float, default=1e-6)
    s.add_argument("--max-steps", type=_positive, default=100_000)
    s.add_argument("--bonus", default="auto",
                   help="'auto' or comma-separated action names/indices, "
                        "one per agent")
    s.add_argument("--seed", type=_nonneg, default=0)
    s.add_argument("-o", "--out", help="write the strategy file here")
    s.add_argument("--diagnostics", help="write per-step JSON lines here")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("verify", help="regret of a profile")
    s.add_argument("game")
    s.add_argument("strategies")
    s.add_argument("--eps", type=float, default=1e-6)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("bench", help="evaluation counters per method")
    s.add_argument("game")
    s.add_argument("--methods", default="naive,projected,partitioned")
    s.add_argument("--strategies", type=int, default=3)
    s.add_argument("--seed", type=_nonneg, default=0)
    s.add_argument("--cap", type=_positive, default=NAIVE_CAP)
    s.add_argument("--timing", action="store_true",
                   help="include wall times (output no longer "
                        "byte-identical across runs)")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("generate", help="write an example game")
    fam = s.add_subparsers(dest="family", required=True,
                           parser_class=_Parser)
    g = fam.add_parser("ice-cream")
    g.add_argument("--n", type=_positive, required=True)
    g.add_argument("--locations", type=_positive, required=True)
    g.add_argument("--chocolate", type=_nonneg, default=None)
    g.add_argument("--shared", action="store_true")
    g.add_argument("--wc", type=float, default=1.0)
    g.add_argument("--wv", type=float, default=1.0)
    g = fam.add_parser("random")
    g.add_argument("--agents", type=_positive, required=True)
    g.add_argument("--actions", type=_positive, required=True)
    g.add_argument("--degree", type=_nonneg, required=True)
    g.add_argument("--seed", type=_nonneg, default=0)
    g.add_argument("--shared", action="store_true")
    g.add_argument("--kind", choices=("table", "linear"), default="table")
    for name in ("encode-normal-form", "encode-graphical"):
        g = fam.add_parser(name)
        g.add_argument("input")
    for g in fam.choices.values():
        g.add_argument("-o", "--out")
    s.set_defaults(func=cmd_generate)
    return p


def main(argv=None, stdout=None):
    """Run one command; returns the exit code."""
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
        code, doc = args.func(args)
    except CommandError as exc:
        code, doc = exc.code, exc.doc
        print(exc, file=sys.stderr)
    stdout.write(io.dumps(doc))
    return code


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
