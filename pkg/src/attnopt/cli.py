"""Command-line frontend.

Subcommands: check, solve, oracle, scan, binary-choice, news-eq,
manipulate, simulate.  Structured results print to stdout as JSON
(+inf spelled "inf", source labels 1-based); time series are written as
CSV files under --out.  Exit codes: 0 success, 2 validation error,
3 unsupported prior where a theorem was required.
"""

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import io as aio
from .assumptions import Verdict, classify
from .binary_choice import BinaryChoiceProblem, solve_stopping_boundary, switch_time
from .errors import AttnOptError, ExistenceNotGuaranteedWarning, UnsupportedPriorError
from .manipulation import compare_cumulative
from .news import equilibrium, verify_equilibrium
from .oracle import constrained_t_optimal, monotonicity_scan, t_optimal
from .simulate import SimConfig, simulate
from .stages import beta_of_t, n_of_t, solve_stages

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_UNSUPPORTED = 3


def _parse_grid(spec: str) -> np.ndarray:
    try:
        start, stop, step = (float(x) for x in spec.split(":"))
    except ValueError as exc:
        raise aio.InvalidParamError("grid must look like start:stop:step") from exc
    if step <= 0 or stop < start:
        raise aio.InvalidParamError("grid must be increasing with positive step")
    n = int(round((stop - start) / step))
    return start + step * np.arange(n + 1)


def _out_dir(args) -> Path:
    out = Path(args.out if args.out is not None else ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _emit(obj) -> None:
    print(aio.dump_json(obj))


def cmd_check(args) -> int:
    pf = aio.load_problem_file(args.input)
    rep = classify(pf.problem)
    _emit(
        {
            "k2_cov_sum": rep.k2_cov_sum,
            "perpetual_substitutes": rep.perpetual_substitutes,
            "perpetual_complements": rep.perpetual_complements,
            "diagonal_dominance": rep.diagonal_dominance,
            "strict_diagonal_dominance": rep.strict_diagonal_dominance,
            "suff_2k3": rep.suff_2k3,
            "verdict": rep.verdict.value,
            "eventual_dominance_shift": rep.eventual_dominance_shift,
        }
    )
    if args.require_theorem and rep.verdict is Verdict.UNSUPPORTED:
        print("unsupported prior: no sufficiency condition holds", file=sys.stderr)
        return EXIT_UNSUPPORTED
    return EXIT_OK


def cmd_solve(args) -> int:
    pf = aio.load_problem_file(args.input)
    path = solve_stages(pf.problem)
    _emit(aio.stage_path_to_dict(path))
    if args.grid:
        ts = _parse_grid(args.grid)
        k = pf.problem.n_sources
        header = (
            ["t"]
            + [f"n{i + 1}" for i in range(k)]
            + [f"beta{i + 1}" for i in range(k)]
        )
        rows = [
            [float(t), *n_of_t(path, float(t)), *beta_of_t(path, float(t))] for t in ts
        ]
        target = _out_dir(args) / "solve_grid.csv"
        with open(target, "w", encoding="utf-8") as fh:
            aio.write_csv(fh, header, rows)
        print(f"wrote {target}", file=sys.stderr)
    return EXIT_OK


def cmd_oracle(args) -> int:
    pf = aio.load_problem_file(args.input)
    floor = np.zeros(pf.problem.n_sources)
    if args.floor:
        floor = np.asarray([float(x) for x in args.floor.split(",")])
    res = constrained_t_optimal(pf.problem, args.budget, floor)
    _emit(
        {
            "budget": args.budget,
            "q_star": res.q_star.q.tolist(),
            "value": res.value,
            "kkt_residual": res.kkt_residual,
            "iterations": res.iterations,
        }
    )
    return EXIT_OK


def cmd_scan(args) -> int:
    pf = aio.load_problem_file(args.input)
    ts = _parse_grid(args.grid if args.grid else "0.1:10:0.1")
    rep = monotonicity_scan(pf.problem, ts)
    _emit(
        {
            "monotone": rep.is_monotone(),
            "violations": [
                {"source": i + 1, "t": a, "t_next": b} for (i, a, b) in rep.violations
            ],
        }
    )
    if args.out is not None:
        target = _out_dir(args) / "scan_attention.csv"
        k = pf.problem.n_sources
        with open(target, "w", encoding="utf-8") as fh:
            aio.write_csv(
                fh,
                ["t"] + [f"n{i + 1}" for i in range(k)],
                [[float(t), *row] for t, row in zip(rep.t_grid, rep.attention)],
            )
        print(f"wrote {target}", file=sys.stderr)
    return EXIT_OK


def cmd_binary_choice(args) -> int:
    pf = aio.load_problem_file(args.input)
    if pf.binary_choice is None:
        raise aio.InvalidParamError("input file has no 'binary_choice' block")
    cost, grid = pf.binary_choice
    b = BinaryChoiceProblem(pf.problem.sigma, tuple(pf.problem.alpha), cost)
    sol = solve_stopping_boundary(b, grid)
    target = _out_dir(args) / "binary_choice_curves.csv"
    with open(target, "w", encoding="utf-8") as fh:
        aio.write_csv(
            fh,
            ["t", "state_variance", "boundary", "accuracy"],
            zip(sol.time_grid, sol.state_variance, sol.boundary, sol.accuracy),
        )
    _emit(
        {
            "switch_time": switch_time(b),
            "relabeled": b.relabeled,
            "boundary_at_zero": float(sol.boundary[0]),
            "accuracy_at_zero": float(sol.accuracy[0]),
            "grid_meta": sol.grid_meta,
            "curves_csv": str(target),
        }
    )
    return EXIT_OK


def cmd_news_eq(args) -> int:
    pf = aio.load_problem_file(args.input)
    if pf.news_game is None:
        raise aio.InvalidParamError("input file has no 'news_game' block")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExistenceNotGuaranteedWarning)
        eq = equilibrium(pf.news_game)
    out = {
        "phi_star": eq.phi_star,
        "zeta_star": eq.zeta_star,
        "t1_star": eq.t1_star,
        "shares": list(eq.shares),
        "payoffs": list(eq.payoffs),
        "existence_guaranteed": eq.existence_guaranteed,
    }
    if args.verify:
        scan = verify_equilibrium(pf.news_game)
        out["verification"] = {
            "max_gain": scan.max_gain,
            "best_phi": scan.best_phi,
            "best_zeta": scan.best_zeta,
            "grid": [scan.n_phi, scan.n_zeta],
        }
    _emit(out)
    return EXIT_OK


def cmd_manipulate(args) -> int:
    pf = aio.load_problem_file(args.input)
    if pf.manipulation is None:
        raise aio.InvalidParamError("input file has no 'manipulation' block")
    t_forced = pf.manipulation["T"]
    if args.grid:
        ts = _parse_grid(args.grid)
    elif pf.manipulation["t_grid"] is not None:
        ts = np.asarray(pf.manipulation["t_grid"], dtype=np.float64)
    else:
        ts = np.linspace(0.0, 4.0 * max(t_forced, 1.0), 81)
    rep = compare_cumulative(pf.problem, t_forced, ts)
    target = _out_dir(args) / "manipulation_diffs.csv"
    k = pf.problem.n_sources
    with open(target, "w", encoding="utf-8") as fh:
        aio.write_csv(
            fh,
            ["t"] + [f"diff{i + 1}" for i in range(k)],
            [[float(t), *row] for t, row in zip(rep.t_grid, rep.diffs)],
        )
    _emit({"T": rep.T, "T_star": rep.T_star, "diffs_csv": str(target)})
    return EXIT_OK


def cmd_simulate(args) -> int:
    pf = aio.load_problem_file(args.input)
    raw = dict(pf.sim) if pf.sim else {}
    if raw.get("seed") is None:
        raw["seed"] = args.seed
    cfg = SimConfig(**raw) if raw else SimConfig(seed=args.seed)
    path = solve_stages(pf.problem)
    res = simulate(pf.problem, path, cfg)
    out_dir = _out_dir(args)
    summary_csv = out_dir / "sim_summary.csv"
    with open(summary_csv, "w", encoding="utf-8") as fh:
        aio.write_csv(
            fh,
            ["t", "empirical_variance", "analytic_variance", "mean_of_means"],
            zip(
                res.times,
                res.empirical_variance,
                res.analytic_variance,
                res.mean_trajectories.mean(axis=0),
            ),
        )
    traj_csv = out_dir / "sim_trajectories.csv"
    with open(traj_csv, "w", encoding="utf-8") as fh:
        aio.write_csv(
            fh,
            ["path", "t", "posterior_mean"],
            (
                [i, float(t), float(res.mean_trajectories[i, c])]
                for i in range(res.mean_trajectories.shape[0])
                for c, t in enumerate(res.times)
            ),
        )
    _emit(
        {
            "n_paths": res.mean_trajectories.shape[0],
            "checkpoints": int(res.times.size),
            "seed": res.seed,
            "mode": res.mode.value,
            "summary_csv": str(summary_csv),
            "trajectories_csv": str(traj_csv),
        }
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="attnopt",
        description="Optimal dynamic attention allocation for correlated Gaussian sources",
    )
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for any randomized routine (default 0)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, grid_help="sampling grid start:stop:step"):
        sp.add_argument("--input", required=True, help="problem file (JSON)")
        sp.add_argument("--grid", default=None, help=grid_help)
        sp.add_argument("--out", default=None,
                        help="directory for emitted files (default: current)")

    sp = sub.add_parser("check", help="classify the prior against each condition")
    sp.add_argument("--input", required=True)
    sp.add_argument("--require-theorem", action="store_true",
                    help="exit 3 when no condition holds")
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("solve", help="compute the optimal stage path")
    common(sp)
    sp.set_defaults(fn=cmd_solve)

    sp = sub.add_parser("oracle", help="budget-optimal attention by convex search")
    sp.add_argument("--input", required=True)
    sp.add_argument("--budget", type=float, required=True)
    sp.add_argument("--floor", default=None,
                    help="comma-separated per-source lower bounds")
    sp.set_defaults(fn=cmd_oracle)

    sp = sub.add_parser("scan", help="scan the oracle path for non-monotonicity")
    common(sp)
    sp.set_defaults(fn=cmd_scan)

    sp = sub.add_parser("binary-choice", help="stopping boundary and accuracy curve")
    common(sp)
    sp.set_defaults(fn=cmd_binary_choice)

    sp = sub.add_parser("news-eq", help="biased-news equilibrium")
    sp.add_argument("--input", required=True)
    sp.add_argument("--verify", action="store_true",
                    help="certify by 200x200 grid best-response scan")
    sp.set_defaults(fn=cmd_news_eq)

    sp = sub.add_parser("manipulate", help="forced-attention counterfactual curves")
    common(sp)
    sp.set_defaults(fn=cmd_manipulate)

    sp = sub.add_parser("simulate", help="Monte Carlo replay of the optimal policy")
    common(sp)
    sp.set_defaults(fn=cmd_simulate)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UnsupportedPriorError as exc:
        print(f"unsupported prior: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (AttnOptError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
