"""Command-line harness: ``rbf-euler {solve,converge,stability,reproduce}``.

Exit codes: 0 success, 1 usage error, 2 numerical abort.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

from .analysis import (
    convergence_orders,
    format_number,
    global_error,
    stability_scan,
)
from .problems import ProblemNotFoundError, get_problem
from .rbf import RbfDomainError
from .steppers import (
    IntegrationError,
    LRule,
    SchemeKind,
    ShapePolicy,
    Threshold,
    integrate,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2

BENCHMARK_N = {
    "ex1": [10, 20, 40, 80, 160, 320],
    "ex2": [10, 20, 40, 80, 160, 320],
    "ex3": [200, 400, 800, 1600, 3200, 6400],
    "ex4": [10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000],
}

# table id -> (problem, schemes, guard)
TABLES = {
    "ex1": ("ex1", ["euler", "imq", "iq"], None),
    "ex2": ("ex2", ["euler", "imq", "iq"], None),
    "ex3": ("ex3", ["euler", "imq", "iq"], None),
    "ex4-nc": ("ex4", ["euler", "imq", "iq"], None),
    "ex4-c1": ("ex4", ["imq", "iq"], Threshold(1.0, LRule.ZERO)),
    "ex4-c2": ("ex4", ["imq", "iq"], Threshold(1.0, LRule.INV_H)),
    "ex4-c3": ("ex4", ["imq", "iq"], Threshold(1.0, LRule.INV_SQRT_H)),
}
STABILITY_SCHEMES = ["euler", "imq", "iq"]

_L_ALIASES = {
    "zero": LRule.ZERO,
    "inv-h": LRule.INV_H,
    "one-over-h": LRule.INV_H,
    "inv-sqrt-h": LRule.INV_SQRT_H,
    "one-over-sqrt-h": LRule.INV_SQRT_H,
    "sqrt-h": LRule.INV_SQRT_H,
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    problem: str = "ex1"
    schemes: list = field(default_factory=lambda: ["euler"])
    policy: str = "fd"
    eps2: float = 0.0
    guard: str = "nc"
    p: float = 1.0
    L: str = "zero"
    bootstrap: str = "forward"
    n_list: list = field(default_factory=lambda: [10])
    out: Optional[str] = None
    re_range: tuple = (-4.0, 2.0)
    im_range: tuple = (-3.0, 3.0)
    nx: int = 200
    ny: int = 200
    n_iter: int = 50
    modified: bool = False
    table: Optional[str] = None

    def shape_policy(self) -> ShapePolicy:
        if self.policy == "fixed":
            return ShapePolicy.fixed(self.eps2)
        if self.policy == "exact":
            return ShapePolicy.exact_c1()
        guard = None
        if self.guard == "threshold":
            key = self.L.lower()
            if key in _L_ALIASES:
                L = _L_ALIASES[key]
            else:
                try:
                    L = float(self.L)
                except ValueError:
                    raise UsageError(f"bad --l value {self.L!r}") from None
            try:
                guard = Threshold(self.p, L)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        return ShapePolicy.finite_difference(guard, bootstrap=self.bootstrap)

    def scheme_kinds(self) -> list:
        out = []
        for name in self.schemes:
            try:
                kind = SchemeKind.parse(name)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            if self.modified:
                kind = {SchemeKind.IMQ: SchemeKind.IMQ_MOD, SchemeKind.IQ: SchemeKind.IQ_MOD}.get(kind, kind)
            out.append(kind)
        return out


@contextlib.contextmanager
def _open_out(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def run_solve(cfg: RunConfig) -> int:
    problem = get_problem(cfg.problem)
    kinds = cfg.scheme_kinds()
    if len(kinds) != 1 or len(cfg.n_list) != 1:
        raise UsageError("solve takes exactly one scheme and one N")
    traj = integrate(problem, kinds[0], cfg.shape_policy(), cfg.n_list[0])
    with _open_out(cfg.out) as fh:
        w = _writer(fh)
        w.writerow(["t", "u", "eps2", "flag"])
        for r in traj.records:
            w.writerow([format_number(r.t), format_number(r.u), format_number(r.eps2), r.flag.value])
    if problem.has_exact:
        stream = sys.stdout if cfg.out not in (None, "-") else sys.stderr
        print(f"endpoint error: {format_number(global_error(traj, problem))}", file=stream)
    return EXIT_OK


def _converge_rows(problem, kinds, policy, n_list):
    rows = []
    for kind in kinds:
        errors = [global_error(integrate(problem, kind, policy, N), problem) for N in n_list]
        orders = [None] + convergence_orders(errors, n_list)
        for N, e, o in zip(n_list, errors, orders):
            rows.append([kind.value, N, format_number(e), "" if o is None else format_number(o)])
    return rows


def _write_converge(fh, rows):
    w = _writer(fh)
    w.writerow(["scheme", "N", "error", "order"])
    w.writerows(rows)


def run_converge(cfg: RunConfig) -> int:
    problem = get_problem(cfg.problem)
    if len(cfg.n_list) < 2 or any(b <= a for a, b in zip(cfg.n_list, cfg.n_list[1:])):
        raise UsageError("converge needs a strictly increasing N list of length >= 2")
    rows = _converge_rows(problem, cfg.scheme_kinds(), cfg.shape_policy(), cfg.n_list)
    with _open_out(cfg.out) as fh:
        _write_converge(fh, rows)
    return EXIT_OK


def run_stability(cfg: RunConfig) -> int:
    kinds = cfg.scheme_kinds()
    if len(kinds) != 1:
        raise UsageError("stability takes exactly one scheme")
    try:
        grid = stability_scan(kinds[0], cfg.re_range, cfg.im_range, cfg.nx, cfg.ny, cfg.n_iter)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    with _open_out(cfg.out) as fh:
        grid.to_csv(fh)
    return EXIT_OK


def run_reproduce(cfg: RunConfig) -> list:
    """Write the CSV file(s) for one table id into ``cfg.out`` (a directory)."""
    table = cfg.table
    outdir = cfg.out or "."
    os.makedirs(outdir, exist_ok=True)
    written = []
    if table == "stability":
        for name in STABILITY_SCHEMES:
            grid = stability_scan(name, cfg.re_range, cfg.im_range, cfg.nx, cfg.ny, cfg.n_iter)
            path = os.path.join(outdir, f"stability_{name}.csv")
            with open(path, "w", newline="") as fh:
                grid.to_csv(fh)
            written.append(path)
        return written
    if table not in TABLES:
        raise UsageError(f"unknown table {table!r}; choose from {', '.join(list(TABLES) + ['stability'])}")
    pid, schemes, guard = TABLES[table]
    sub = RunConfig("converge", problem=pid, schemes=schemes, modified=cfg.modified, bootstrap=cfg.bootstrap)
    policy = ShapePolicy.finite_difference(guard, bootstrap=cfg.bootstrap)
    rows = _converge_rows(get_problem(pid), sub.scheme_kinds(), policy, BENCHMARK_N[pid])
    path = os.path.join(outdir, f"{table}.csv")
    with open(path, "w", newline="") as fh:
        _write_converge(fh, rows)
    written.append(path)
    return written


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None


def _add_policy_args(p):
    p.add_argument("--policy", choices=["fixed", "exact", "fd"], default="fd")
    p.add_argument("--eps2", type=float, default=0.0, help="shape parameter for --policy fixed")
    p.add_argument("--guard", choices=["nc", "threshold"], default="nc")
    p.add_argument("--p", type=float, default=1.0, help="threshold exponent: guard fires when |u| <= h^p")
    p.add_argument("--l", dest="L", default="zero", help="zero, inv-h, inv-sqrt-h or a number")
    p.add_argument("--bootstrap", choices=["forward", "zero", "exact"], default="forward")
    p.add_argument("--modified", action="store_true", help="use the Taylor-simplified IMQ/IQ schemes")


def _add_rect_args(p):
    p.add_argument("--re-min", type=float, default=-4.0)
    p.add_argument("--re-max", type=float, default=2.0)
    p.add_argument("--im-min", type=float, default=-3.0)
    p.add_argument("--im-max", type=float, default=3.0)
    p.add_argument("--nx", type=int, default=200)
    p.add_argument("--ny", type=int, default=200)
    p.add_argument("--n-iter", type=int, default=50)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rbf-euler", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ps = sub.add_parser("solve", help="integrate one problem and write t,u,eps2,flag")
    ps.add_argument("--problem", required=True)
    ps.add_argument("--scheme", default="euler")
    ps.add_argument("--n", type=_int_list, required=True)
    ps.add_argument("--out")
    _add_policy_args(ps)

    pc = sub.add_parser("converge", help="endpoint errors and orders for an N list")
    pc.add_argument("--problem", required=True)
    pc.add_argument("--scheme", default="euler,imq,iq")
    pc.add_argument("--n", type=_int_list, required=True)
    pc.add_argument("--out")
    _add_policy_args(pc)

    pst = sub.add_parser("stability", help="stability mask of one scheme as re,im,stable")
    pst.add_argument("--scheme", default="euler")
    pst.add_argument("--out")
    _add_rect_args(pst)

    pr = sub.add_parser("reproduce", help="regenerate a benchmark table or the stability masks")
    pr.add_argument("table", help=", ".join(list(TABLES) + ["stability"]))
    pr.add_argument("--out", default=".", help="output directory")
    pr.add_argument("--modified", action="store_true")
    pr.add_argument("--bootstrap", choices=["forward", "zero", "exact"], default="forward")
    _add_rect_args(pr)
    return parser


def config_from_args(args) -> RunConfig:
    cfg = RunConfig(args.command, out=args.out)
    if hasattr(args, "scheme"):
        cfg.schemes = [s for s in args.scheme.split(",") if s]
    for name in ("problem", "policy", "eps2", "guard", "p", "L", "bootstrap", "modified", "table", "nx", "ny", "n_iter"):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    if hasattr(args, "n"):
        cfg.n_list = args.n
    if hasattr(args, "re_min"):
        cfg.re_range = (args.re_min, args.re_max)
        cfg.im_range = (args.im_min, args.im_max)
    return cfg


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    cfg = config_from_args(args)
    runner = {"solve": run_solve, "converge": run_converge,
              "stability": run_stability, "reproduce": run_reproduce}[cfg.command]
    try:
        result = runner(cfg)
    except (UsageError, ProblemNotFoundError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"rbf-euler: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        if isinstance(exc, RbfDomainError):
            print(f"rbf-euler: numerical abort: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        print(f"rbf-euler: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IntegrationError as exc:
        print(f"rbf-euler: numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if cfg.command == "reproduce":
        for path in result:
            print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
