"""Command-line harness: bounds, run, compare, and fdcheck.

Exit codes: 0 success, 2 admissibility failure, 3 numerical failure,
64 usage error.

Every option can also come from a ``--config`` file of ``key=value``
lines whose keys mirror the long flag names without the leading dashes;
explicit flags win over the file, the file wins over defaults.

CSV output uses a single header row, ``.`` decimals, ``,`` separators,
LF line endings, and the literal ``inf`` for unbounded quantities.
Randomness is seeded through Philox counter-based generators; compare
splits per-repeat streams off the master seed, so results are
reproducible from the flag values alone (step timing columns aside).
"""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bounds import parameter_bounds
from .errors import EvaluationError, NotSneAdmissibleError
from .games import SmoothGame, eval_hessian
from .optimizers import METHODS, NUMERICAL_ERROR, SECANT_INITS, OptimizerConfig, run
from .oracle import fd_gradient, measure_linear_rate, solve_quadratic_equilibrium
from .problems import (PROBLEM_NAMES, ContrastiveGameSpec, make_bilinear_intro,
                       make_indefinite_example, make_random_sne_quadratic,
                       make_toy_contrastive, make_zero_sum_bilinear)

__all__ = ["main", "console_main"]

EX_OK = 0
EX_ADMISSIBILITY = 2
EX_NUMERICAL = 3
EX_USAGE = 64


class _Parser(argparse.ArgumentParser):
    """argparse parser that exits with the usage code on bad input."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _vector(text: str) -> np.ndarray:
    try:
        return np.array([float(tok) for tok in text.split(",") if tok.strip() != ""])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}") from exc


def _matrix(text: str) -> np.ndarray:
    try:
        rows = [[float(tok) for tok in row.split(",")] for row in text.split(";")]
        return np.array(rows)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected ';'-separated rows of comma-separated floats, got {text!r}") from exc


def _choice(valid: tuple[str, ...]) -> Callable[[str], str]:
    def conv(text: str) -> str:
        if text not in valid:
            raise argparse.ArgumentTypeError(f"must be one of {', '.join(valid)}; got {text!r}")
        return text
    return conv


@dataclass(frozen=True)
class _Opt:
    flag: str
    conv: Callable[[str], object]
    default: object = None
    help: str = ""
    required: bool = False

    @property
    def key(self) -> str:
        return self.flag.lstrip("-")

    @property
    def dest(self) -> str:
        return self.key.replace("-", "_")


_PROBLEM_OPTS = [
    _Opt("--problem", _choice(PROBLEM_NAMES), required=True,
         help=f"one of: {', '.join(PROBLEM_NAMES)}"),
    _Opt("--seed", int, 0, "master seed (Philox)"),
    _Opt("--payoff", _matrix, None, "payoff matrix for zero-sum-bilinear, rows split by ';'"),
    _Opt("--m", int, 3, "player-one dimension for random-quadratic"),
    _Opt("--n", int, 3, "player-two dimension for random-quadratic"),
    _Opt("--lambda-floor", float, 0.5, "eigenvalue floor of the random-quadratic generator"),
    _Opt("--coupling-scale", float, 0.2, "coupling-entry scale of the random-quadratic generator"),
    _Opt("--problem-seed", int, None, "game seed for random-quadratic (defaults to --seed)"),
    _Opt("--batch-size", int, 8, "contrastive batch size"),
    _Opt("--d-img", int, 6, "contrastive image feature dimension"),
    _Opt("--d-txt", int, 6, "contrastive text feature dimension"),
    _Opt("--embed-dim", int, 4, "contrastive embedding dimension"),
    _Opt("--temperature", float, 0.09, "contrastive softmax temperature"),
    _Opt("--data-seed", int, None, "contrastive feature seed (defaults to --seed)"),
]

_RUN_KNOBS = [
    _Opt("--eta", float, required=True, help="stepsize"),
    _Opt("--tau", float, 0.0, "adjustment strength (ignored by gd)"),
    _Opt("--iters", int, 1000, "iteration budget"),
    _Opt("--tol", float, 1e-8, "gradient-norm stopping tolerance"),
    _Opt("--cap", float, 1e8, "divergence cap on the iterate norm"),
    _Opt("--init", _choice(SECANT_INITS), "zero", "lrsga secant initialization"),
    _Opt("--init-scale", float, 0.1, "entry scale of the random secant initialization"),
    _Opt("--w0", _vector, None, "start point as comma-separated floats (default: seeded draw)"),
]

_OPTS = {
    "bounds": _PROBLEM_OPTS + [
        _Opt("--at", _vector, None, "evaluation point (default: the equilibrium when known)"),
        _Opt("--out", str, None, "write the CSV here instead of stdout"),
    ],
    "run": _PROBLEM_OPTS + [
        _Opt("--method", _choice(METHODS), required=True,
             help=f"one of: {', '.join(METHODS)}")] + _RUN_KNOBS + [
        _Opt("--out", str, None, "write the trace CSV here"),
    ],
    "compare": _PROBLEM_OPTS + [
        _Opt("--method-a", _choice(METHODS), required=True, help="first method"),
        _Opt("--method-b", _choice(METHODS), required=True, help="second method"),
        _Opt("--repeats", int, 5, "number of paired repeats")] + _RUN_KNOBS + [
        _Opt("--out", str, None, "write the comparison CSV here"),
    ],
    "fdcheck": _PROBLEM_OPTS + [
        _Opt("--points", int, 50, "number of probe points in [-2,2]^(m+n)"),
        _Opt("--fd-step", float, 1e-4, "central-difference step"),
        _Opt("--tol", float, None,
             "max allowed FD-vs-analytic deviation (default 1e-6; "
             "1e-5 for toy-contrastive, whose loss has steeper third derivatives)"),
        _Opt("--out", str, None, "write the report CSV here"),
    ],
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="nashopt",
                     description="Two-player smooth-game optimizers and analysis tools.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, opts in _OPTS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None,
                       help="key=value file; keys mirror flag names, flags win")
        for opt in opts:
            p.add_argument(opt.flag, dest=opt.dest, type=opt.conv, default=None,
                           help=opt.help)
    return parser


def _read_config(path: str, parser: _Parser) -> dict[str, str]:
    table: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    parser.error(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, value = line.split("=", 1)
                table[key.strip()] = value.strip()
    except OSError as exc:
        parser.error(f"cannot read config file: {exc}")
    return table


def _resolve(args: argparse.Namespace, opts: list[_Opt], parser: _Parser) -> dict:
    table = _read_config(args.config, parser) if args.config else {}
    known = {opt.key: opt for opt in opts}
    for key in table:
        if key not in known:
            parser.error(f"unknown config key {key!r}")
    values = {}
    for opt in opts:
        val = getattr(args, opt.dest)
        if val is None and opt.key in table:
            try:
                val = opt.conv(table[opt.key])
            except (ValueError, argparse.ArgumentTypeError) as exc:
                parser.error(f"config key {opt.key!r}: {exc}")
        if val is None:
            val = opt.default
        if val is None and opt.required:
            parser.error(f"--{opt.key} is required (flag or config)")
        values[opt.dest] = val
    return values


def _build_problem(o: dict, seed: int | None = None) -> tuple[SmoothGame, np.ndarray | None]:
    """Instantiate the selected problem; returns (game, equilibrium or None)."""
    seed = o["seed"] if seed is None else seed
    name = o["problem"]
    if name == "bilinear-intro":
        game = make_bilinear_intro()
    elif name == "indefinite-example":
        game = make_indefinite_example()
    elif name == "zero-sum-bilinear":
        game = make_zero_sum_bilinear(o["payoff"])
    elif name == "random-quadratic":
        gseed = o["problem_seed"] if o["problem_seed"] is not None else seed
        return make_random_sne_quadratic(gseed, o["m"], o["n"],
                                         lambda_floor=o["lambda_floor"],
                                         coupling_scale=o["coupling_scale"])
    else:
        dseed = o["data_seed"] if o["data_seed"] is not None else seed
        spec = ContrastiveGameSpec(batch_size=o["batch_size"], d_img=o["d_img"],
                                   d_txt=o["d_txt"], embed_dim=o["embed_dim"],
                                   temperature=o["temperature"], data_seed=dseed)
        return make_toy_contrastive(spec), None
    try:
        w_star = solve_quadratic_equilibrium(game)
    except ValueError:
        # no reliable equilibrium; admissibility checks will say why
        w_star = None
    return game, w_star


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _emit(lines: list[str], out_path: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _start_point(game: SmoothGame, o: dict, seed: int) -> np.ndarray:
    if o.get("w0") is not None:
        return np.asarray(o["w0"], dtype=np.float64)
    return game.default_start(np.random.Generator(np.random.Philox(seed)))


def cmd_bounds(o: dict) -> int:
    game, w_star = _build_problem(o)
    if o["at"] is not None:
        at = o["at"]
    elif w_star is not None:
        at = w_star
    else:
        at = _start_point(game, o, o["seed"])
    dec = eval_hessian(game, at)
    pb = parameter_bounds(dec)
    s = pb.summary
    lines = ["quantity,value"]
    for label, val in [("norm_S", s.norm_S), ("norm_A", s.norm_A), ("norm_H", s.norm_H),
                       ("lambda_min_real", s.lambda_min_real), ("sigma_min", s.sigma_min),
                       ("tau_max", pb.tau_max), ("tau_max_ism", pb.tau_max_ism)]:
        lines.append(f"{label},{_fmt(val)}")
    # With an unbounded tau range there is no scale to anchor the sweep;
    # report the step bound at reference taus instead.
    base = pb.tau_max if np.isfinite(pb.tau_max) else 1.0
    for frac in (0.5, 0.9, 0.99):
        tau = frac * base
        lines.append(f"eta_max(tau={_fmt(tau)}),{_fmt(pb.eta_max(tau))}")
    _emit(lines, o["out"])
    return EX_OK


def _trace_csv_lines(trace) -> list[str]:
    d = trace.iterates.shape[1]
    header = (["iter"] + [f"w_{i}" for i in range(d)]
              + ["grad_norm", "dist_to_star", "loss_f", "loss_g", "step_time_ns"])
    lines = [",".join(header)]
    has_dist = trace.dist_to_star is not None
    for k in range(len(trace)):
        fields = [str(k)]
        fields += [_fmt(x) for x in trace.iterates[k]]
        fields.append(_fmt(trace.grad_norms[k]))
        fields.append(_fmt(trace.dist_to_star[k]) if has_dist else "")
        fields.append(_fmt(trace.losses[k, 0]))
        fields.append(_fmt(trace.losses[k, 1]))
        fields.append(str(int(trace.step_times_ns[k])))
        lines.append(",".join(fields))
    return lines


def _measured_rate(trace, w_star) -> float:
    if w_star is None:
        return float("nan")
    try:
        return measure_linear_rate(trace, w_star).rate
    except ValueError:
        return float("nan")


def cmd_run(o: dict) -> int:
    game, w_star = _build_problem(o)
    w0 = _start_point(game, o, o["seed"])
    cfg = OptimizerConfig(eta=o["eta"], tau=o["tau"], max_iters=o["iters"],
                          grad_tol=o["tol"], divergence_cap=o["cap"], seed=o["seed"])
    t0 = time.perf_counter()
    trace = run(game, o["method"], cfg, w0, init=o["init"],
                init_scale=o["init_scale"], w_star=w_star)
    wall = time.perf_counter() - t0
    _emit(_trace_csv_lines(trace), o["out"])
    rate = _measured_rate(trace, w_star)
    print(f"status={trace.status} final_grad_norm={_fmt(trace.grad_norms[-1])} "
          f"rate={_fmt(rate)} wall_time_s={_fmt(wall)} iterations={trace.iterations}",
          file=sys.stdout if o["out"] else sys.stderr)
    if trace.status == NUMERICAL_ERROR:
        print(f"numerical failure: {trace.meta.get('error', 'unknown')}", file=sys.stderr)
        return EX_NUMERICAL
    return EX_OK


def cmd_compare(o: dict) -> int:
    repeats = o["repeats"]
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    child_seeds = np.random.SeedSequence(o["seed"]).generate_state(repeats, dtype=np.uint64)
    header = ["repeat", "seed"]
    for tag in ("a", "b"):
        header += [f"status_{tag}", f"iters_{tag}", f"final_loss_f_{tag}",
                   f"final_loss_g_{tag}", f"mean_step_ns_{tag}"]
    header.append("speedup_a_over_b")
    lines = [",".join(header)]
    means = {"a": [], "b": []}
    worst = EX_OK
    for i in range(repeats):
        child = int(child_seeds[i])
        game, w_star = _build_problem(o, seed=child)
        w0 = _start_point(game, o, child)
        cfg = OptimizerConfig(eta=o["eta"], tau=o["tau"], max_iters=o["iters"],
                              grad_tol=o["tol"], divergence_cap=o["cap"], seed=child)
        fields = [str(i), str(child)]
        step_ns = {}
        for tag, method in (("a", o["method_a"]), ("b", o["method_b"])):
            trace = run(game, method, cfg, w0, init=o["init"],
                        init_scale=o["init_scale"], w_star=w_star)
            if trace.status == NUMERICAL_ERROR:
                worst = EX_NUMERICAL
            step_ns[tag] = trace.mean_step_time_ns()
            means[tag].append(step_ns[tag])
            fields += [trace.status, str(trace.iterations),
                       _fmt(trace.losses[-1, 0]), _fmt(trace.losses[-1, 1]),
                       _fmt(step_ns[tag])]
        fields.append(_fmt(step_ns["a"] / step_ns["b"]))
        lines.append(",".join(fields))
    agg = (f"aggregate: mean_step_ns_a={_fmt(float(np.mean(means['a'])))} "
           f"mean_step_ns_b={_fmt(float(np.mean(means['b'])))} "
           f"speedup_a_over_b={_fmt(float(np.mean(means['a']) / np.mean(means['b'])))}")
    _emit(lines, o["out"])
    print(agg, file=sys.stdout if o["out"] else sys.stderr)
    return worst


def cmd_fdcheck(o: dict) -> int:
    game, _ = _build_problem(o)
    tol = o["tol"]
    if tol is None:
        tol = 1e-5 if o["problem"] == "toy-contrastive" else 1e-6
    lines = ["quantity,value", f"problem,{o['problem']}", f"points,{o['points']}",
             f"fd_step,{_fmt(o['fd_step'])}", f"tol,{_fmt(tol)}"]
    if not game.has_analytic_gradient:
        lines.append("status,skipped (no analytic gradients to check)")
        _emit(lines, o["out"])
        return EX_OK
    rng = np.random.Generator(np.random.Philox(o["seed"]))
    h = o["fd_step"]
    xs = np.arange(game.m)
    ys = np.arange(game.m, game.size)
    worst_x = worst_y = 0.0
    pts = [rng.uniform(-2.0, 2.0, game.size) for _ in range(o["points"])]
    for w in pts:
        gx = np.asarray(game.grad_x_f(w), dtype=np.float64)
        gy = np.asarray(game.grad_y_g(w), dtype=np.float64)
        worst_x = max(worst_x, float(np.max(np.abs(gx - fd_gradient(game.loss_f, w, h, coords=xs)))))
        worst_y = max(worst_y, float(np.max(np.abs(gy - fd_gradient(game.loss_g, w, h, coords=ys)))))
    lines.append(f"max_dev_grad_x,{_fmt(worst_x)}")
    lines.append(f"max_dev_grad_y,{_fmt(worst_y)}")
    if not game.constant_hessian:
        # halving h should shrink the central-difference error about 4x
        ratios = []
        for w in pts[:min(10, len(pts))]:
            gx = np.asarray(game.grad_x_f(w), dtype=np.float64)
            e1 = float(np.linalg.norm(fd_gradient(game.loss_f, w, h, coords=xs) - gx))
            e2 = float(np.linalg.norm(fd_gradient(game.loss_f, w, h / 2.0, coords=xs) - gx))
            if e2 > 0:
                ratios.append(e1 / e2)
        if ratios:
            lines.append(f"richardson_ratio_median,{_fmt(float(np.median(ratios)))}")
    ok = worst_x <= tol and worst_y <= tol
    lines.append(f"status,{'ok' if ok else 'violation'}")
    _emit(lines, o["out"])
    return EX_OK if ok else EX_NUMERICAL


_COMMANDS = {"bounds": cmd_bounds, "run": cmd_run,
             "compare": cmd_compare, "fdcheck": cmd_fdcheck}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.error("a command is required (bounds, run, compare, fdcheck)")
    sub_opts = _OPTS[args.command]
    o = _resolve(args, sub_opts, parser)
    try:
        return _COMMANDS[args.command](o)
    except NotSneAdmissibleError as exc:
        print(f"admissibility failure: {exc}", file=sys.stderr)
        return EX_ADMISSIBILITY
    except EvaluationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EX_NUMERICAL
    except ValueError as exc:
        print(f"invalid request: {exc}", file=sys.stderr)
        return EX_USAGE


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
