"""Command-line entry point wiring sampling, products, evaluation and rendering.

Exit codes: 0 on success, 1 on argument or domain errors, 2 on I/O errors.
The master seed comes from --seed, else the PERMUTON_SEED environment
variable, else 0.  Structured data is JSON (canonical form on output), bulk
statistics are CSV, graphics are SVG.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import analytic, experiments, hecke, pipedreams, shapes, svg, tasep

DEFAULT_SEED = 0


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _CliError(message)


def _fmt(value: float) -> str:
    return format(float(value), ".12g")


def _parse_perm(text: str) -> hecke.Permutation:
    return hecke.Permutation([int(v) for v in text.replace(" ", "").split(",")])


def _parse_word(text: str):
    if not text:
        return ()
    return tuple(int(v) for v in text.replace(" ", "").split(","))


def _parse_breakpoints(text: str) -> shapes.BoundaryFunction:
    """Format: 'z:v,z:v,...' e.g. '0:0,0.5:0.5,1:0.5'."""
    pts = []
    for item in text.split(","):
        z, _, v = item.partition(":")
        if not _:
            raise _CliError(f"bad breakpoint {item!r}; expected z:value")
        pts.append((float(z), float(v)))
    return shapes.BoundaryFunction(pts)


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _write_output(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _seed_from(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("PERMUTON_SEED")
    if env is not None:
        return int(env)
    return DEFAULT_SEED


def _build_parser() -> _Parser:
    parser = _Parser(prog="permuton", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("demazure", help="fold a word or multiply two permutations")
    p.add_argument("--n", type=int, help="alphabet bound for --word")
    p.add_argument("--word", help="comma-separated letters, e.g. 1,2,1")
    p.add_argument("--u", help="left factor in one-line notation, e.g. 2,1,3")
    p.add_argument("--v", help="right factor in one-line notation")
    p.add_argument("--out", help="write the result as JSON instead of stdout")

    p = sub.add_parser("sample", help="sample a thinned-word product over a shape file")
    p.add_argument("--shape", required=True, help="shape JSON path")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", help="output JSON path (defaults to stdout)")

    p = sub.add_parser("height", help="exact height grid of a permutation")
    p.add_argument("--perm", required=True, help="one-line values or a JSON file path")
    p.add_argument("--out")

    p = sub.add_parser("star", help="min-plus product of two height grids")
    p.add_argument("--a", required=True, help="grid JSON path")
    p.add_argument("--b", required=True, help="grid JSON path")
    p.add_argument("--out")

    p = sub.add_parser("analytic", help="evaluate a closed-form permuton family")
    p.add_argument("--family", required=True,
                   choices=["pipedream-limit", "bubble-nu", "uniform", "identity",
                            "antidiagonal"])
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--phi", help="breakpoints z:v,...")
    p.add_argument("--psi", help="breakpoints z:v,...")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--eval", dest="eval_point", help="x,y evaluation point")
    p.add_argument("--eval-grid", type=int, help="emit CSV of (x, y, H) on a k-grid")
    p.add_argument("--out")

    p = sub.add_parser("tasep", help="run the particle system or evaluate its limits")
    p.add_argument("--run", action="store_true")
    p.add_argument("--eval", dest="eval_name", choices=["cp", "qp", "rp", "vp"])
    p.add_argument("--k", type=int, default=100)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--m", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", help="trajectory CSV path")

    p = sub.add_parser("bubble", help="apply repeated one-pass sorting words")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--word", default="classical",
                   choices=["classical", "bipartite", "slope"])
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")

    p = sub.add_parser("experiment", help="run a named experiment")
    p.add_argument("name")
    p.add_argument("--config", help="JSON file of config fields")
    p.add_argument("--outdir", default=".")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("render", help="emit an SVG document")
    p.add_argument("--target", required=True, choices=["plot", "pipedream"])
    p.add_argument("--perm", help="one-line values or JSON path (plot)")
    p.add_argument("--shape", help="shape JSON path (pipedream)")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--resolve", action="store_true", help="resolve crossings first")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")

    return parser


def _perm_from_arg(text: str) -> hecke.Permutation:
    if os.path.exists(text) or text.endswith(".json"):
        return hecke.Permutation.from_json(_load_json(text))
    return _parse_perm(text)


def _cmd_demazure(args) -> int:
    if args.word is not None:
        if args.n is None:
            raise _CliError("--word requires --n")
        result = hecke.demazure_of_word(hecke.Word(args.n, _parse_word(args.word)))
    elif args.u is not None and args.v is not None:
        result = hecke.demazure_product(_perm_from_arg(args.u), _perm_from_arg(args.v))
    else:
        raise _CliError("provide --word with --n, or both --u and --v")
    if args.out:
        _write_output(experiments.canonical_json(result.to_json()), args.out)
    else:
        print(" ".join(map(str, result.values)))
    return 0


def _cmd_sample(args) -> int:
    shape = shapes.Shape.from_json(_load_json(args.shape))
    u = pipedreams.demazure_sample(shape, args.p, _seed_from(args))
    _write_output(experiments.canonical_json(u.to_json()), args.out)
    return 0


def _cmd_height(args) -> int:
    grid = hecke.height_grid(_perm_from_arg(args.perm))
    _write_output(experiments.canonical_json(grid.to_json()), args.out)
    return 0


def _cmd_star(args) -> int:
    a = hecke.HeightGrid.from_json(_load_json(args.a))
    b = hecke.HeightGrid.from_json(_load_json(args.b))
    if a.n != b.n:
        a, b = analytic.common_refinement(a, b)
    _write_output(experiments.canonical_json(analytic.star(a, b).to_json()), args.out)
    return 0


def _analytic_from_args(args) -> analytic.AnalyticPermuton:
    fam = args.family
    if fam == "uniform":
        return analytic.AnalyticPermuton.uniform()
    if fam == "identity":
        return analytic.AnalyticPermuton.identity()
    if fam == "antidiagonal":
        return analytic.AnalyticPermuton.antidiagonal()
    if fam == "pipedream-limit":
        if not args.phi or not args.psi:
            raise _CliError("pipedream-limit needs --phi and --psi")
        bp = analytic.BoundaryPair(_parse_breakpoints(args.phi),
                                   _parse_breakpoints(args.psi))
        return analytic.AnalyticPermuton.pipedream_limit(bp, args.p)
    if fam == "bubble-nu":
        if args.alpha is None or args.beta is None:
            raise _CliError("bubble-nu needs --alpha and --beta")
        return analytic.AnalyticPermuton.bubble_nu(args.alpha, args.beta)
    raise _CliError(f"unknown family {fam!r}")


def _cmd_analytic(args) -> int:
    perm = _analytic_from_args(args)
    if args.eval_point:
        x, y = (float(v) for v in args.eval_point.split(","))
        print(_fmt(perm.height(x, y)))
        return 0
    if args.eval_grid:
        k = args.eval_grid
        pts = np.arange(k + 1) / k
        rows = ["x,y,H"]
        for x in pts:
            for y in pts:
                rows.append(f"{_fmt(x)},{_fmt(y)},{_fmt(perm.height(x, y))}")
        _write_output("\n".join(rows) + "\n", args.out)
        return 0
    raise _CliError("provide --eval x,y or --eval-grid k")


def _cmd_tasep(args) -> int:
    if args.eval_name:
        p = args.p
        if args.eval_name == "cp":
            a = args.a if args.a is not None else args.m
            b = args.b if args.b is not None else args.t
            if a is None or b is None:
                raise _CliError("cp needs --a/--b (or --m/--t)")
            print(_fmt(tasep.c_p(p, a, b)))
            return 0
        if args.m is None or args.t is None:
            raise _CliError(f"{args.eval_name} needs --m and --t")
        fn = {"qp": tasep.q_p, "rp": tasep.r_p, "vp": tasep.v_p}[args.eval_name]
        print(_fmt(fn(p, args.m, args.t)))
        return 0
    if not args.run:
        raise _CliError("choose --run or --eval")
    seed = _seed_from(args)
    rows = ["trial,t,i,xi"]
    for trial in range(args.trials):
        rng = hecke.substream(seed, trial)
        state = tasep.TasepState.step_initial(args.k)
        for i, xi in enumerate(state.positions, start=1):
            rows.append(f"{trial},0,{i},{xi}")
        for _ in range(args.steps):
            state = tasep.tasep_step(state, args.p, rng)
            for i, xi in enumerate(state.positions, start=1):
                rows.append(f"{trial},{state.t},{i},{xi}")
    _write_output("\n".join(rows) + "\n", args.out)
    return 0


def _cmd_bubble(args) -> int:
    cfg = experiments.BubbleConfig(
        n=args.n, alpha=args.alpha, beta=args.beta, word=args.word,
        seed=_seed_from(args),
    )
    from .shapes import coxeter_power_shape

    t_power = int(cfg.alpha * cfg.n)
    if t_power < 1:
        raise _CliError("alpha * n must be at least 1")
    sw = experiments._bubble_word_path(cfg)
    letters = coxeter_power_shape(sw, t_power).word_letters()
    v = hecke.uniform_random_permutation(cfg.n, hecke.substream(cfg.seed, 0))
    u = experiments.fold_word_onto(v, letters)
    _write_output(experiments.canonical_json(u.to_json()), args.out)
    return 0


def _cmd_experiment(args) -> int:
    kwargs = {}
    if args.config:
        kwargs.update(_load_json(args.config))
    if args.seed is not None:
        kwargs["seed"] = args.seed
    if args.workers is not None:
        kwargs["workers"] = args.workers
    report = experiments.run_experiment(args.name, **kwargs)
    paths = experiments.write_report(report, args.outdir)
    print(paths["json"])
    return 0


def _cmd_render(args) -> int:
    if args.target == "plot":
        if not args.perm:
            raise _CliError("plot needs --perm")
        doc = svg.render_svg(_perm_from_arg(args.perm))
    else:
        if not args.shape:
            raise _CliError("pipedream needs --shape")
        shape = shapes.Shape.from_json(_load_json(args.shape))
        pd = pipedreams.sample_pipedream(shape, args.p, _seed_from(args))
        doc = svg.render_svg(pipedreams.resolve(pd) if args.resolve else pd)
    _write_output(doc, args.out)
    return 0


_COMMANDS = {
    "demazure": _cmd_demazure,
    "sample": _cmd_sample,
    "height": _cmd_height,
    "star": _cmd_star,
    "analytic": _cmd_analytic,
    "tasep": _cmd_tasep,
    "bubble": _cmd_bubble,
    "experiment": _cmd_experiment,
    "render": _cmd_render,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
