"""Command-line driver.

Tabular results go to standard output, diagnostics to standard error.
Exit status is 0 on success, 1 for usage or input errors and 2 for
internal failures.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .analyze import SolverParams, band_density, force_type, matrix_type
from .build import sprand
from .core import CscMatrix
from .errors import SparseError
from .fem import assemble_system, build_strip_mesh, solve_bvp, strip_boundary_conditions, surface_data
from .mmio import mm_read
from .ops import ewise_binary, matmul, pattern_union_transpose
from .order import amd_order, colperm, dmperm, etree
from .solve import backslash
from .viz import etreeplot_data, gplot_data, spy_data, write_plot_data

BENCH_COLUMNS = ("op", "order", "density", "nnz", "branch", "mean_seconds", "n_runs")
BENCH_OPS = ("add", "mul", "solve")


class UsageError(Exception):
    """Bad command line."""


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(name)
    return float(raw) if raw else default


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    return int(raw) if raw else default


def pick_clock() -> tuple[str, Callable[[], float]]:
    """Process CPU time when the platform provides it, else monotonic wall time."""
    try:
        time.process_time()
        return "process_time", time.process_time
    except OSError:
        return "perf_counter", time.perf_counter


@dataclass(frozen=True)
class BenchConfig:
    op: str = "add"
    order: int = 500
    density: float = 1e-2
    tmin: float = 1.0
    nrun: int = 5
    seed: Optional[int] = 0
    file: Optional[str] = None
    bandden: Optional[float] = None

    def __post_init__(self):
        if self.op not in BENCH_OPS:
            raise UsageError(f"unknown benchmark op {self.op!r}")
        if not self.tmin >= 0:
            raise UsageError("tmin must be non-negative")
        if self.nrun < 1:
            raise UsageError("nrun must be at least 1")
        if self.op == "solve" and not self.file:
            raise UsageError("solve benchmarks need a matrix file")
        if self.op != "solve" and (self.order < 0 or not 0 <= self.density <= 1):
            raise UsageError("order must be non-negative and density in [0, 1]")


@dataclass(frozen=True)
class BenchResult:
    op: str
    order: int
    density: float
    nnz: int
    branch: str
    mean_seconds: float
    n_runs: int

    def row(self) -> list:
        return [self.op, self.order, repr(self.density), self.nnz, self.branch,
                f"{self.mean_seconds:.9g}", self.n_runs]


def run_bench(cfg: BenchConfig, clock: Callable[[], float] | None = None) -> BenchResult:
    """Time one operator until both ``n >= nrun`` and accumulated time ``>= tmin``.

    add and mul draw a fresh random operand every iteration and time
    ``a + a`` or ``a * a``; ``nnz`` reports the first operand.  solve loads
    the file once and times ``a \\ ones``.
    """
    clock = clock or pick_clock()[1]
    params = SolverParams(bandden=cfg.bandden) if cfg.bandden is not None else SolverParams()
    if cfg.op == "solve":
        a = mm_read(cfg.file)
        order, nnz = a.nrows, a.nnz
        density = nnz / (a.nrows * a.ncols) if a.nrows and a.ncols else 0.0
        x = np.ones(a.nrows)
        mtype = matrix_type(a, params)
    else:
        rng = np.random.default_rng(cfg.seed)
        order, density, nnz = cfg.order, cfg.density, None
    branch = "-"
    elapsed, n = 0.0, 0
    while elapsed < cfg.tmin or n < cfg.nrun:
        if cfg.op == "solve":
            t = clock()
            _, report = backslash(a, x, params, known_type=mtype)
            elapsed += clock() - t
            branch = report.branch
        else:
            a = sprand(order, order, density, seed=rng)
            if nnz is None:
                nnz = a.nnz
            t = clock()
            if cfg.op == "add":
                ewise_binary(a, a, "+")
            else:
                matmul(a, a)
            elapsed += clock() - t
        n += 1
    return BenchResult(cfg.op, order, density, nnz, branch, elapsed / n, n)


def write_bench_csv(results: Sequence[BenchResult], out, clock_name: str) -> None:
    out.write(f"# clock: {clock_name}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    for r in results:
        w.writerow(r.row())


def _load_rhs(source: str, n: int):
    if source == "ones":
        return np.ones(n)
    if source.endswith(".mtx"):
        return mm_read(source)
    b = np.loadtxt(source, dtype=float, ndmin=1)
    if b.shape[0] != n:
        raise UsageError(f"right-hand side has {b.shape[0]} rows, matrix has {n}")
    return b


def _fmt(v) -> str:
    if np.iscomplexobj(v):
        return f"{float(v.real)!r}{float(v.imag):+}j"
    return repr(float(v))


def _circle_layout(n: int) -> np.ndarray:
    t = 2 * np.pi * np.arange(n) / max(n, 1)
    return np.column_stack((np.cos(t), np.sin(t)))


def _indices(p) -> str:
    return " ".join(str(int(i) + 1) for i in p)


def cmd_bench(args, out) -> None:
    cfg = BenchConfig(args.op, args.order, args.density, args.tmin, args.nrun, args.seed,
                      args.file, args.bandden)
    name, clock = pick_clock()
    write_bench_csv([run_bench(cfg, clock)], out, name)


def cmd_solve(args, out) -> None:
    a = mm_read(args.file)
    params = SolverParams(bandden=args.bandden) if args.bandden is not None else SolverParams()
    b = _load_rhs(args.rhs, a.nrows)
    target = force_type(a, args.force_type) if args.force_type else a
    x, report = backslash(target, b, params)
    out.write(f"# branch\t{report.branch}\n")
    out.write(f"# type\t{report.matrix_type}\n")
    out.write(f"# fallbacks\t{','.join(report.fallbacks)}\n")
    rc = "nan" if report.rcond is None else repr(report.rcond)
    out.write(f"# rcond\t{rc}\n")
    xd = x.todense() if isinstance(x, CscMatrix) else np.asarray(x)
    xd = xd.reshape(xd.shape[0], -1)
    out.write("row\t" + "\t".join(f"x{k + 1}" for k in range(xd.shape[1])) + "\n")
    for i, row in enumerate(xd):
        out.write(f"{i + 1}\t" + "\t".join(_fmt(v) for v in row) + "\n")


def cmd_analyze(args, out) -> None:
    a = mm_read(args.file)
    params = SolverParams(bandden=args.bandden) if args.bandden is not None else SolverParams()
    t = matrix_type(a, params)
    dens = band_density(a, t.kl, t.ku) if a.nrows == a.ncols else float("nan")
    rows = [("rows", a.nrows), ("cols", a.ncols), ("nnz", a.nnz), ("type", t.tag),
            ("kl", t.kl), ("ku", t.ku), ("band_density", repr(dens)),
            ("hermitian", str(t.hermitian).lower())]
    out.write("property\tvalue\n")
    for k, v in rows:
        out.write(f"{k}\t{v}\n")


def cmd_order(args, out) -> None:
    a = mm_read(args.file)
    out.write("field\tvalue\n")
    if args.mode == "amd":
        sym = a.nrows == a.ncols and not args.column
        p = amd_order(a, "symmetric" if sym else "column")
        out.write(f"perm\t{_indices(p)}\n")
    elif args.mode == "colperm":
        out.write(f"perm\t{_indices(colperm(a))}\n")
    else:
        d = dmperm(a)
        out.write(f"row_perm\t{_indices(d.row_perm)}\n")
        out.write(f"col_perm\t{_indices(d.col_perm)}\n")
        out.write(f"structural_rank\t{d.structural_rank}\n")
        out.write(f"coarse_rows\t{' '.join(map(str, d.coarse_rows))}\n")
        out.write(f"coarse_cols\t{' '.join(map(str, d.coarse_cols))}\n")
        out.write(f"fine_rows\t{' '.join(map(str, d.fine_rows))}\n")
        out.write(f"fine_cols\t{' '.join(map(str, d.fine_cols))}\n")


def cmd_spy(args, out) -> None:
    write_plot_data(spy_data(mm_read(args.file)), out)


def cmd_gplot(args, out) -> None:
    a = mm_read(args.file)
    xy = np.loadtxt(args.xy, dtype=float, ndmin=2) if args.xy else _circle_layout(a.nrows)
    write_plot_data(gplot_data(a, xy), out)


def cmd_etree(args, out) -> None:
    a = mm_read(args.file)
    if args.parents:
        out.write("node\tparent\n")
        for i, p in enumerate(etree(pattern_union_transpose(a)).parent):
            out.write(f"{i + 1}\t{int(p) + 1}\n")
    else:
        write_plot_data(etreeplot_data(a), out)


def cmd_fem_demo(args, out) -> None:
    mesh = build_strip_mesh()
    if args.uniform:
        mesh = mesh.with_conductivity(1.0)
    s, _, _ = assemble_system(mesh)
    v, report = solve_bvp(s, strip_boundary_conditions())
    print(f"solved {mesh.n_nodes} nodes, {mesh.n_elems} elements via {report.branch}",
          file=sys.stderr)
    out.write("node\tx\ty\tV\n")
    for i, ((x, y), vi) in enumerate(zip(mesh.nodes, v)):
        out.write(f"{i + 1}\t{_fmt(x)}\t{_fmt(y)}\t{_fmt(vi)}\n")
    if args.surface:
        with open(args.surface, "w", encoding="ascii") as fh:
            write_plot_data(surface_data(mesh, v), fh)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cscmat", description="Sparse matrix toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bench", help="time an operator and print one CSV row")
    b.add_argument("--op", choices=BENCH_OPS, default="add")
    b.add_argument("--order", type=int, default=500)
    b.add_argument("--density", type=float, default=1e-2)
    b.add_argument("--tmin", type=float, default=_env_float("CSCMAT_TMIN", 1.0))
    b.add_argument("--nrun", type=int, default=_env_int("CSCMAT_NRUN", 5))
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--file", help="Matrix Market file for --op solve")
    b.add_argument("--bandden", type=float)
    b.set_defaults(func=cmd_bench)

    s = sub.add_parser("solve", help="solve A x = b and report the solver branch")
    s.add_argument("file")
    s.add_argument("--rhs", default="ones", help="'ones', a text file, or a .mtx file")
    s.add_argument("--bandden", type=float)
    s.add_argument("--force-type", dest="force_type")
    s.set_defaults(func=cmd_solve)

    a = sub.add_parser("analyze", help="report the detected matrix type")
    a.add_argument("file")
    a.add_argument("--bandden", type=float)
    a.set_defaults(func=cmd_analyze)

    o = sub.add_parser("order", help="print a fill-reducing or block permutation (1-based)")
    o.add_argument("file")
    o.add_argument("--mode", choices=("amd", "colperm", "dmperm"), default="amd")
    o.add_argument("--column", action="store_true", help="column AMD even for square input")
    o.set_defaults(func=cmd_order)

    sp = sub.add_parser("spy", help="nonzero positions as plot data")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_spy)

    g = sub.add_parser("gplot", help="graph edges as plot segments")
    g.add_argument("file")
    g.add_argument("--xy", help="text file with one 'x y' pair per node (default: circle)")
    g.set_defaults(func=cmd_gplot)

    e = sub.add_parser("etree", help="elimination tree as plot data")
    e.add_argument("file")
    e.add_argument("--parents", action="store_true", help="print the parent vector instead")
    e.set_defaults(func=cmd_etree)

    f = sub.add_parser("fem-demo", help="solve the conductive strip and print node potentials")
    f.add_argument("--surface", help="also write the surface polylines to this file")
    f.add_argument("--uniform", action="store_true", help="use conductivity 1 everywhere")
    f.set_defaults(func=cmd_fem_demo)
    return p


def run_command(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        args.func(args, out)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"cscmat: error: {exc}", file=sys.stderr)
        return 1
    except (SparseError, OSError, ValueError, KeyError) as exc:
        print(f"cscmat: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"cscmat: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    return run_command(argv)


if __name__ == "__main__":
    sys.exit(main())
