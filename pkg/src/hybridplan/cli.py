"""Command-line entry point.

Subcommands: gen-maze, gen-blocks, build-controller-data, emit-datasets,
plan, eval, sweep. All stages are deterministic under --seed; an optional
JSON config file mirrors every flag, with flags taking precedence.

Exit codes: 0 success, 2 usage error, 3 data error, 4 generation
exhaustion.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .controller import ControllerConfig, HybridController, build_controller_dataset
from .evaluate import (
    PlannerConfig,
    budget_sweep,
    report_to_csv,
    report_to_markdown,
    report_to_plot_data,
    run_planner,
    average_se,
    plan_optimality_rate,
    plan_validity_rate,
)
from .generators import (
    BlocksDatasetConfig,
    GenerationExhausted,
    MazeDatasetConfig,
    generate_blocks_dataset,
    generate_maze_dataset,
)
from .hybrid import EnginesConfig
from .search import TraceConfig
from .textio import ParseError, load_problems, save_problems, write_jsonl_atomic, emit_datasets

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_EXHAUSTED = 4

DEFAULT_OUT_DIR_ENV = "HYBRIDPLAN_OUT_DIR"


class UsageError(Exception):
    pass


def _out_path(args, default_name):
    if args.out:
        return args.out
    return os.path.join(os.environ.get(DEFAULT_OUT_DIR_ENV, "."), default_name)


def _check_unit_interval(name, value):
    if not 0.0 <= value <= 1.0:
        raise UsageError(f"--{name} must lie in [0, 1], got {value}")


def _trace_config(args):
    caps = {}
    if getattr(args, "blocks_caps", False):
        caps = {"valid_cap": 3, "invalid_cap": 2}
    return TraceConfig(seed=args.seed, **caps)


def _planner_config(args, train_problems):
    if args.planner == "system1":
        return PlannerConfig(kind="sys1")
    if args.planner == "system2":
        return PlannerConfig(kind="sys2", engine=args.sys2, trace=_trace_config(args))
    _check_unit_interval("x", args.x)
    controller = HybridController(ControllerConfig(
        x=args.x, bias=args.bias, variant=args.variant,
        selector=args.selector, seed=args.seed,
    )).fit(train_problems)
    return PlannerConfig(kind="hybrid", engine=args.sys2,
                         trace=_trace_config(args), controller=controller)


def cmd_gen_maze(args):
    config = MazeDatasetConfig()
    try:
        splits = generate_maze_dataset(args.seed, config)
    except GenerationExhausted as exc:
        print(f"generation exhausted: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    path = _out_path(args, "maze_problems.jsonl")
    save_problems(path, splits)
    counts = {k: len(v) for k, v in splits.items()}
    print(f"gen-maze: wrote {sum(counts.values())} problems {counts} -> {path}")
    return 0


def cmd_gen_blocks(args):
    config = BlocksDatasetConfig()
    try:
        splits = generate_blocks_dataset(args.seed, config)
    except GenerationExhausted as exc:
        print(f"generation exhausted: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    path = _out_path(args, "blocks_problems.jsonl")
    save_problems(path, splits)
    counts = {k: len(v) for k, v in splits.items()}
    print(f"gen-blocks: wrote {sum(counts.values())} problems {counts} -> {path}")
    return 0


def _load_split(args, split):
    splits = load_problems(args.problems)
    if split not in splits:
        raise ParseError(f"split {split!r} not present in {args.problems}")
    return splits


def cmd_build_controller_data(args):
    _check_unit_interval("x", args.x)
    splits = _load_split(args, "train")
    config = ControllerConfig(x=args.x, variant=args.variant,
                              selector=args.selector, seed=args.seed)
    records = build_controller_dataset(splits["train"], config)
    from .textio import metaplan_mirror, verbalize_metaplan

    out = []
    for problem, meta in records:
        out.append({
            "id": problem.problem_id,
            "subgoals": metaplan_mirror(meta)["subgoals"],
            "target_text": verbalize_metaplan(meta),
        })
    path = _out_path(args, "controller_data.jsonl")
    write_jsonl_atomic(path, out)
    n_easy = sum(1 for r in out if len(r["subgoals"]) == 1 and r["subgoals"][0]["mode"] == "sys1")
    print(f"build-controller-data: {len(out)} records ({n_easy} fast-only) -> {path}")
    return 0


def cmd_emit_datasets(args):
    _check_unit_interval("x", args.x)
    splits = _load_split(args, "train")
    train = splits["train"]
    config = ControllerConfig(x=args.x, variant=args.variant,
                              selector=args.selector, seed=args.seed)
    records = build_controller_dataset(train, config)
    engines = EnginesConfig(sys2=args.sys2, trace=_trace_config(args))
    out_dir = args.out or os.path.join(os.environ.get(DEFAULT_OUT_DIR_ENV, "."), "datasets")
    manifest = emit_datasets(train, records, engines, out_dir, seed=args.seed)
    counts = {k: v["count"] for k, v in manifest["files"].items()}
    print(f"emit-datasets: {counts} -> {out_dir}")
    return 0


def cmd_plan(args):
    splits = _load_split(args, args.split)
    problems = splits[args.split]
    config = _planner_config(args, splits.get("train", problems))
    runs = run_planner(problems, config, budget=args.budget, workers=args.workers)
    from .textio import render_action

    out = [
        {"id": r.problem.problem_id,
         "plan": [render_action(a) for a in r.plan] if r.plan is not None else None,
         "states_explored": r.states_explored,
         "valid": r.valid}
        for r in runs
    ]
    path = _out_path(args, "runs.jsonl")
    write_jsonl_atomic(path, out)
    validity = plan_validity_rate(runs)
    print(f"plan: {config.label()} on {len(runs)} problems, validity {float(validity):.3f} -> {path}")
    return 0


def cmd_eval(args):
    splits = _load_split(args, args.split)
    problems = splits[args.split]
    config = _planner_config(args, splits.get("train", problems))
    runs = run_planner(problems, config, budget=args.budget, workers=args.workers)
    print(
        f"eval: {config.label()} n={len(runs)} "
        f"validity={float(plan_validity_rate(runs)):.3f} "
        f"optimality={float(plan_optimality_rate(runs)):.3f} "
        f"avg_se={float(average_se(runs)):.1f}"
    )
    return 0


def cmd_sweep(args):
    splits = _load_split(args, args.split)
    problems = splits[args.split]
    config = _planner_config(args, splits.get("train", problems))
    try:
        budgets = [int(b) for b in args.budgets.split(",") if b]
    except ValueError as exc:
        raise UsageError(f"--budgets must be comma-separated integers: {exc}") from None
    report = budget_sweep(problems, config, budgets, workers=args.workers)
    path = _out_path(args, "sweep.csv")
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(report_to_csv(report))
    os.replace(tmp, path)
    if args.plot_data:
        with open(args.plot_data + ".tmp", "w", encoding="utf-8") as fh:
            fh.write(report_to_plot_data([report]))
        os.replace(args.plot_data + ".tmp", args.plot_data)
    if args.markdown:
        print(report_to_markdown(report), end="")
    print(f"sweep: {config.label()} {len(report.rows)} rows -> {path}")
    return 0


def _add_common(parser, problems=True):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None, help="output path (default under $%s)" % DEFAULT_OUT_DIR_ENV)
    parser.add_argument("--config", default=None, help="JSON config file mirroring the flags")
    if problems:
        parser.add_argument("--problems", required=True, help="problem-set JSONL file")


def _add_planner_flags(parser):
    parser.add_argument("--planner", choices=("system1", "system2", "system1x"), default="system1x")
    parser.add_argument("--sys2", choices=("astar", "bfs", "dfs"), default="astar")
    parser.add_argument("--x", type=float, default=0.5)
    parser.add_argument("--bias", type=float, default=0.0)
    parser.add_argument("--variant", choices=("sliding-window", "edge-window", "no-subgoal", "random"),
                        default="sliding-window")
    parser.add_argument("--selector", choices=("maze-obstacles", "maze-manhattan", "blocks-distance"),
                        default=None)
    parser.add_argument("--split", default="test")
    parser.add_argument("--budget", type=int, default=None)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--blocks-caps", action="store_true",
                        help="record at most 3 valid / 2 invalid probes per expansion")


def build_parser():
    parser = argparse.ArgumentParser(prog="hybridplan",
                                     description="hybrid fast/deliberate planning pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-maze", help="generate the balanced maze problem set")
    _add_common(p, problems=False)

    p = sub.add_parser("gen-blocks", help="generate the blocks problem set")
    _add_common(p, problems=False)

    p = sub.add_parser("build-controller-data", help="decompose gold plans into labeled sub-goals")
    _add_common(p)
    p.add_argument("--x", type=float, default=0.5)
    p.add_argument("--variant", choices=("sliding-window", "edge-window", "no-subgoal"),
                   default="sliding-window")
    p.add_argument("--selector", default=None)

    p = sub.add_parser("emit-datasets", help="emit the three training corpora")
    _add_common(p)
    p.add_argument("--x", type=float, default=0.5)
    p.add_argument("--variant", choices=("sliding-window", "edge-window", "no-subgoal"),
                   default="sliding-window")
    p.add_argument("--selector", default=None)
    p.add_argument("--sys2", choices=("astar", "bfs", "dfs"), default="astar")
    p.add_argument("--blocks-caps", action="store_true")

    p = sub.add_parser("plan", help="run a planner over a split, write per-problem runs")
    _add_common(p)
    _add_planner_flags(p)

    p = sub.add_parser("eval", help="score a planner on a split")
    _add_common(p)
    _add_planner_flags(p)

    p = sub.add_parser("sweep", help="budget sweep producing a CSV report")
    _add_common(p)
    _add_planner_flags(p)
    p.add_argument("--budgets", default="5,10,15,20")
    p.add_argument("--markdown", action="store_true")
    p.add_argument("--plot-data", default=None)

    return parser


COMMANDS = {
    "gen-maze": cmd_gen_maze,
    "gen-blocks": cmd_gen_blocks,
    "build-controller-data": cmd_build_controller_data,
    "emit-datasets": cmd_emit_datasets,
    "plan": cmd_plan,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
}


def _apply_config_file(args):
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"bad config file {args.config}: {exc}")
        for key, value in values.items():
            attr = key.replace("-", "_")
            if not hasattr(args, attr):
                raise UsageError(f"unknown config key {key!r}")
            # flags given on the command line win; argparse defaults lose
            if getattr(args, attr) == _DEFAULTS.get(attr, None):
                setattr(args, attr, value)


_DEFAULTS = {}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    global _DEFAULTS
    _DEFAULTS = {
        action.dest: action.default
        for action in parser._subparsers._group_actions[0].choices[args.command]._actions
    }
    try:
        _apply_config_file(args)
        if hasattr(args, "x"):
            _check_unit_interval("x", args.x)
        if hasattr(args, "bias") and not -1.0 <= args.bias <= 1.0:
            raise UsageError(f"--bias must lie in [-1, 1], got {args.bias}")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except GenerationExhausted as exc:
        print(f"generation exhausted: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
