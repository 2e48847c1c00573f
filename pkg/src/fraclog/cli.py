"""Command-line front end.

Exit status: 0 success, 2 invalid arguments or domain error, 3 I/O error,
4 a tolerance could not be certified (or the solver diverged).
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import os
import sys
from typing import Sequence

import numpy as np

from fraclog.errors import DomainError, NotCertifiedError, SolverError
from fraclog.fde_solver import solve_fle
from fraclog.logistic_core import west_function
from fraclog.mfle_verifier import (
    DEFAULT_SAMPLES,
    DEFAULT_WINDOW,
    estimate_order,
    residual,
)
from fraclog.special_functions import MLQuery, mittag_leffler
from fraclog.stochastic import RngStream, mc_double_integral, mc_laplace_check, mc_west

log = logging.getLogger("fraclog")

EXIT_OK, EXIT_DOMAIN, EXIT_IO, EXIT_UNCERTIFIED = 0, 2, 3, 4
SEED_ENV = "FRACLOG_SEED"

FIGURES = {
    1: {"beta": 0.7, "u0": 0.75, "t_max": 5.0},
    2: {"beta": 0.9, "u0": 0.75, "t_max": 5.0},
    3: {"betas": (0.7, 0.8, 0.9), "u0": 0.75, "t_max": 10.0},
}
FIGURE_POINTS = 512
FIGURE_H = 2.0**-7


class _Parser(argparse.ArgumentParser):
    """Reports usage errors as a single line with the domain-error status."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.exit(EXIT_DOMAIN, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return f"{x:.15g}"


def _csv_text(header: Sequence[str], columns: Sequence[np.ndarray]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in zip(*columns):
        writer.writerow([_fmt(float(v)) for v in row])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def resolve_seed(flag: int | None) -> int:
    """``--seed`` beats the environment variable, which beats 0."""
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV, "").strip()
    if not env:
        return 0
    try:
        return int(env)
    except ValueError:
        raise DomainError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _uniform_grid(t_max: float, steps: int) -> np.ndarray:
    if not (t_max > 0 and math.isfinite(t_max)):
        raise DomainError(f"--t-max must be positive, got {t_max}")
    if steps < 1:
        raise DomainError(f"--steps must be at least 1, got {steps}")
    return np.linspace(0.0, t_max, steps + 1)


# ---------------------------------------------------------------- commands


def cmd_ml(args: argparse.Namespace) -> int:
    res = mittag_leffler(MLQuery(args.beta, args.z, args.tol))
    v = res.value
    print(f"{v:.10f}" if abs(v) < 1e6 else f"{v:.12e}")
    print(f"regime {res.regime.value}")
    print(f"terms {res.terms_used}")
    print(f"error_bound {res.error_bound:.3e}")
    return EXIT_OK


def figure_table(which: int, points: int = FIGURE_POINTS, h: float = FIGURE_H):
    """Header and columns of figure ``which`` (1, 2 or 3)."""
    if which not in FIGURES:
        raise DomainError(f"figure must be 1, 2 or 3, got {which}")
    cfg = FIGURES[which]
    t = np.linspace(0.0, cfg["t_max"], points)
    if which == 3:
        cols = [west_function(cfg["u0"], b, t)[0] for b in cfg["betas"]]
        return ["t", "wf_07", "wf_08", "wf_09"], [t, *cols]
    wf, _ = west_function(cfg["u0"], cfg["beta"], t)
    sol = solve_fle(cfg["u0"], cfg["beta"], cfg["t_max"], h)
    fde = np.interp(t, sol.grid, sol.values)
    return ["t", "wf", "fde"], [t, wf, fde]


def cmd_figure(args: argparse.Namespace) -> int:
    header, cols = figure_table(args.which, args.steps, args.h)
    _emit(_csv_text(header, cols), args.out)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    sol = solve_fle(args.u0, args.beta, args.t_max, args.h)
    _emit(_csv_text(["t", "w"], [sol.grid, sol.values]), args.out)
    return EXIT_OK


def cmd_west(args: argparse.Namespace) -> int:
    t = _uniform_grid(args.t_max, args.steps)
    w, spec = west_function(args.u0, args.beta, t, args.tol)
    log.info("west series: %d terms, tail bound %.2e", spec.n_terms, spec.tail_bound)
    _emit(_csv_text(["t", "w"], [t, w]), args.out)
    return EXIT_OK


def cmd_residual(args: argparse.Namespace) -> int:
    rep = residual(args.u0, args.beta, args.grid, args.convention, args.tol, args.h)
    text = _csv_text(["t", "lhs", "rhs", "residual"], [rep.t_grid, rep.lhs, rep.rhs, rep.residual])
    summary = f"max_abs_residual {rep.max_abs_residual:.6e}\n"
    if args.out is None or args.out == "-":
        sys.stdout.write(text)
        sys.stderr.write(summary)
    else:
        _emit(text, args.out)
        sys.stdout.write(summary)
    return EXIT_OK


def _read_samples(path: str) -> tuple[np.ndarray, np.ndarray]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    try:
        t = np.array([float(r["t"]) for r in rows])
        w = np.array([float(r["w"]) for r in rows])
    except (KeyError, ValueError) as exc:
        raise DomainError(f"{path}: expected numeric columns 't' and 'w' ({exc})") from None
    return t, w


def cmd_estimate(args: argparse.Namespace) -> int:
    if args.samples is not None:
        t, w = _read_samples(args.samples)
    elif args.beta_true is not None:
        t = np.geomspace(args.t_min, args.t_max, args.n_points)
        w, _ = west_function(args.u0, args.beta_true, t, args.tol)
    else:
        raise DomainError("give either --samples FILE or --beta-true for self-test samples")
    est = estimate_order(t, w, args.u0, args.method)
    flag = " saturated" if est.saturated else ""
    print(f"{est.beta_hat:.4f} {est.method.value}{flag}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    rng = RngStream(resolve_seed(args.seed))
    if args.kind == "laplace":
        est = mc_laplace_check(args.beta, args.lam, args.t, args.n, rng, workers=args.workers)
    elif args.kind == "west":
        est = mc_west(args.u0, args.beta, args.t, args.n, rng, workers=args.workers)
    else:
        est = mc_double_integral(args.u0, args.beta, args.t, args.n, rng, workers=args.workers)
    text = _csv_text(["mean", "std_error", "n"], [[est.mean], [est.std_error], [est.n]])
    _emit(text, args.out)
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fraclog", description="Fractional logistic numerics: Mittag-Leffler, West function, checks.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, *, beta=0.7, u0=0.75, out=True, tol=True):
        if beta is not None:
            sp.add_argument("--beta", type=float, default=beta, help=f"fractional order (default {beta})")
        if u0 is not None:
            sp.add_argument("--u0", type=float, default=u0, help=f"initial value (default {u0})")
        if tol:
            sp.add_argument("--tol", type=float, default=1e-12, help="absolute tolerance (default 1e-12)")
        if out:
            sp.add_argument("--out", default=None, help="output CSV path (default stdout)")

    sp = sub.add_parser("ml", help="evaluate the Mittag-Leffler function E_beta(z)")
    sp.add_argument("--beta", type=float, required=True, help="order in (0, 2)")
    sp.add_argument("--z", type=float, required=True, help="real argument")
    sp.add_argument("--tol", type=float, default=1e-12, help="error tolerance (default 1e-12)")
    sp.set_defaults(func=cmd_ml)

    sp = sub.add_parser("figure", help="write the data behind figure 1, 2 or 3 as CSV")
    sp.add_argument("--which", type=int, choices=(1, 2, 3), required=True, help="figure number")
    sp.add_argument("--steps", type=int, default=FIGURE_POINTS, help=f"number of output points (default {FIGURE_POINTS})")
    sp.add_argument("--h", type=float, default=FIGURE_H, help="solver step for the fde column (default 2^-7)")
    sp.add_argument("--out", default=None, help="output CSV path (default stdout)")
    sp.set_defaults(func=cmd_figure)

    sp = sub.add_parser("solve", help="integrate the fractional logistic equation (predictor-corrector)")
    common(sp, tol=False)
    sp.add_argument("--t-max", type=float, default=5.0, help="horizon (default 5)")
    sp.add_argument("--h", type=float, default=FIGURE_H, help="step size (default 2^-7)")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("west", help="tabulate the West function on a uniform grid")
    common(sp)
    sp.add_argument("--t-max", type=float, default=5.0, help="grid end (default 5)")
    sp.add_argument("--steps", type=int, default=FIGURE_POINTS - 1, help="number of grid intervals (default 511)")
    sp.set_defaults(func=cmd_west)

    sp = sub.add_parser("residual", help="residual of the modified equation under a derivative convention")
    common(sp)
    sp.add_argument("--grid", type=_float_list, default=[0.25, 0.5, 1.0, 2.0, 5.0, 10.0],
                    help="comma-separated positive times (default 0.25,0.5,1,2,5,10)")
    sp.add_argument("--convention", default="rl",
                    choices=("caputo", "rl", "l1", "caputo_series", "riemann_liouville_series", "numerical_l1"),
                    help="derivative convention (default rl)")
    sp.add_argument("--h", type=float, default=2.0**-10, help="sample spacing for the l1 convention (default 2^-10)")
    sp.set_defaults(func=cmd_residual)

    sp = sub.add_parser("estimate", help="estimate the fractional order from late-time samples")
    common(sp, beta=None, out=False)
    sp.add_argument("--beta-true", type=float, default=None, help="self-test: generate exact West samples of this order")
    sp.add_argument("--samples", default=None, help="CSV file with columns t,w")
    sp.add_argument("--method", default="regression",
                    choices=("regression", "limit", "loglog_regression", "limit_formula"),
                    help="estimator (default regression)")
    sp.add_argument("--t-min", type=float, default=DEFAULT_WINDOW[0], help="self-test window start (default 20)")
    sp.add_argument("--t-max", type=float, default=DEFAULT_WINDOW[1], help="self-test window end (default 200)")
    sp.add_argument("--n-points", type=int, default=DEFAULT_SAMPLES, help="self-test sample count (default 64)")
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("simulate", help="Monte Carlo check through the inverse stable subordinator")
    common(sp, beta=0.5, tol=False)
    sp.add_argument("--kind", default="laplace", choices=("laplace", "west", "double"),
                    help="E[exp(-lambda L_t)], E[u(L_t)] or the double-integral term (default laplace)")
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0, help="Laplace rate (default 1)")
    sp.add_argument("--t", type=float, default=1.0, help="time (default 1)")
    sp.add_argument("--n", type=int, default=10**6, help="sample count (default 1e6)")
    sp.add_argument("--seed", type=int, default=None, help=f"random seed (default ${SEED_ENV} or 0)")
    sp.add_argument("--workers", type=int, default=1, help="worker threads; results do not depend on it")
    sp.set_defaults(func=cmd_simulate)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except DomainError as exc:
        status, msg = EXIT_DOMAIN, str(exc)
    except (NotCertifiedError, SolverError) as exc:
        status, msg = EXIT_UNCERTIFIED, str(exc)
    except OSError as exc:
        status, msg = EXIT_IO, f"{exc.strerror or exc}: {exc.filename or ''}".rstrip(": ")
    print(f"fraclog: error: {msg}".replace("\n", " "), file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
