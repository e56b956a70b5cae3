"""``hobokit`` command line: solve problems, report contraction costs, ship examples."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .compiler import compile_hobo
from .decomp import tt_contraction_spec, tt_decompose
from .encode import ResultView, decode_ndarray, decode_value, format_value
from .errors import CapabilityError, HoboError, ParseError, ResourceError
from .parse import ProblemSpec, load_problem, parse_problem
from .path import optimize_path
from .problems import EXAMPLES
from .sampler import Schedule, grad_run, sa_run
from .tensor import hobo_spec

EXIT_OK, EXIT_INPUT, EXIT_CAPABILITY = 0, 1, 2


@dataclass
class Problem:
    spec: ProblemSpec
    values: dict                 # name -> Polynomial read-out
    grids: list[str]             # name patterns decoded as 0/1 arrays


def _load(source: str) -> Problem:
    if not os.path.exists(source) and source in EXAMPLES:
        ex = EXAMPLES[source]
        built = ex.build()
        return Problem(parse_problem(ex.source(), name=source), built.values, built.grids)
    spec = load_problem(source)
    return Problem(spec, {}, [d.pattern for d in spec.declarations])


def _fmt_offset(offset: float) -> str:
    return "0" if offset == 0 else format_value(offset)


def _decoded(problem: Problem, view: ResultView) -> tuple[dict, dict]:
    values = {k: decode_value(view, p) for k, p in problem.values.items()}
    grids = {pat: decode_ndarray(view, pat) for pat in problem.grids}
    return values, grids


def _write_ppm(path: str, grid: np.ndarray, cell: int = 16) -> None:
    grid = np.atleast_2d(grid).reshape(grid.shape[0] if grid.ndim > 1 else 1, -1)
    img = np.kron(1 - grid, np.ones((cell, cell), dtype=np.int64)).astype(np.uint8) * 255
    rgb = np.repeat(img[:, :, None], 3, axis=2)
    with open(path, "wb") as fh:
        fh.write(f"P6\n{rgb.shape[1]} {rgb.shape[0]}\n255\n".encode())
        fh.write(rgb.tobytes())


def cmd_solve(args, out) -> int:
    problem = _load(args.input)
    h, offset = compile_hobo(problem.spec.objective, problem.spec.registry)
    if args.sampler == "sa":
        result = sa_run(h, shots=args.shots, schedule=Schedule.default_for(h, args.sweeps),
                        seed=args.seed, workers=args.workers)
    else:
        result = grad_run(h, shots=args.shots, steps=args.steps, seed=args.seed,
                          workers=args.workers)
    entries = []
    for sample in result[:args.top]:
        values, grids = _decoded(problem, ResultView.of(h, sample))
        entries.append((sample, values, grids))
    if args.ppm and entries and entries[0][2]:
        _write_ppm(args.ppm, next(iter(entries[0][2].values())))
    if args.json:
        doc = {"offset": offset, "shots": result.shots, "entries": [
            {"energy": s.energy, "occurrence": s.occurrence, "assignment": list(s.assignment),
             "names": list(h.axis_names), "values": values,
             "grids": {k: g.tolist() for k, g in grids.items()}}
            for s, values, grids in entries]}
        json.dump(doc, out, indent=1)
        out.write("\n")
        return EXIT_OK
    out.write(f"offset\n{_fmt_offset(offset)}\n")
    for s, values, grids in entries:
        out.write(f"Energy {format_value(s.energy)}, Occurrence {s.occurrence}\n")
        for g in grids.values():
            out.write(f"{g}\n")
        for k, v in values.items():
            out.write(f"{k} = {format_value(v)}\n")
    return EXIT_OK


def _dense(args):
    problem = _load(args.input)
    h, _ = compile_hobo(problem.spec.objective, problem.spec.registry)
    return h, h.dense


def cmd_path(args, out) -> int:
    h, _ = _dense(args)
    _, report = optimize_path(hobo_spec(h.n, h.d), args.method)
    if args.json:
        json.dump(report.to_dict(), out, indent=1)
        out.write("\n")
    else:
        out.write(report.format(with_steps=args.steps_table) + "\n")
    return EXIT_OK


def cmd_tt(args, out) -> int:
    _, dense = _dense(args)
    if dense.ndim < 2:
        raise CapabilityError("problem tensor has order 1; nothing to decompose")
    train = tt_decompose(dense, args.tol)
    _, report = optimize_path(tt_contraction_spec(train), args.method)
    shapes = train.shapes()
    if args.json:
        json.dump({"core_shapes": [list(s) for s in shapes], "report": report.to_dict()},
                  out, indent=1)
        out.write("\n")
    else:
        out.write(f"{shapes}\n{report.format(with_steps=args.steps_table)}\n")
    return EXIT_OK


def cmd_example(args, out) -> int:
    source = EXAMPLES[args.name].source()
    if args.run:
        args.input = args.name
        return cmd_solve(args, out)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(source)
    else:
        out.write(source)
    return EXIT_OK


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _tol(text: str) -> float:
    v = float(text)
    if not 0.0 <= v < 1.0:
        raise argparse.ArgumentTypeError("must lie in [0, 1)")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hobokit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    solve_opts = argparse.ArgumentParser(add_help=False)
    solve_opts.add_argument("--shots", type=_positive, default=10000)
    solve_opts.add_argument("--sweeps", type=_positive, default=1000)
    solve_opts.add_argument("--steps", type=_positive, default=200,
                            help="gradient iterations per restart (--sampler grad)")
    solve_opts.add_argument("--seed", type=int, default=42)
    solve_opts.add_argument("--sampler", choices=("sa", "grad"), default="sa")
    solve_opts.add_argument("--top", type=_positive, default=3)
    solve_opts.add_argument("--workers", type=_positive, default=os.cpu_count() or 1)
    solve_opts.add_argument("--ppm", metavar="PATH", help="write the best grid as a PPM image")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    plan = argparse.ArgumentParser(add_help=False)
    plan.add_argument("--method", choices=("optimal", "greedy"), default="optimal")
    plan.add_argument("--steps-table", action="store_true", help="also list each step")

    p = sub.add_parser("solve", parents=[solve_opts, common], help="sample a problem")
    p.add_argument("input", help=".hobo/.json file or example name")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("path", parents=[plan, common], help="contraction cost report")
    p.add_argument("input")
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("tt", parents=[plan, common], help="tensor-train decomposition report")
    p.add_argument("input")
    p.add_argument("--tol", type=_tol, default=1e-12)
    p.set_defaults(func=cmd_tt)

    p = sub.add_parser("example", parents=[solve_opts, common],
                       help="print, write or run a built-in example")
    p.add_argument("name", choices=sorted(EXAMPLES))
    p.add_argument("-o", "--output", metavar="FILE")
    p.add_argument("--run", action="store_true", help="solve it instead of printing the source")
    p.set_defaults(func=cmd_example)
    return parser


def main(argv=None, out=None) -> int:
    args = build_parser().parse_args(argv)
    out = out or sys.stdout
    try:
        return args.func(args, out)
    except (CapabilityError, ResourceError) as exc:
        print(f"hobokit: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (ParseError, OSError, HoboError) as exc:
        print(f"hobokit: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
