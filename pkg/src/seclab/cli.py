"""``seclab``: generate instances, check bounds on one instance, sweep a directory.

Exit codes: 0 when every judged check passes, 1 when a check still fails after
the flaky-guard re-run, 2 for usage or input errors.
"""
from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from pathlib import Path

from . import harness
from .instances import (
    GroupedInstance,
    HemHypergraph,
    HvmHypergraph,
    InstanceError,
    InstanceFormatError,
    UndirectedGraph,
    WeightedBipartiteGraph,
    WeightLaw,
    dumps_instance,
    gen_figure2,
    gen_groups_counterexample,
    gen_random_bipartite,
    gen_random_graph,
    gen_random_grouped,
    gen_random_hem,
    gen_random_hvm,
    gen_star,
    load_instance,
    reduce_hem_to_hvm,
)
from .oracles import (
    HYPERGRAPH_EDGE_BUDGET,
    OracleBudgetError,
    max_weight_forest,
    optimal_bipartite,
    optimal_hypergraph,
)

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SEED_ENV = "SECLAB_SEED"
GRID_KEYS = {"p": float, "d": int}


class UsageError(Exception):
    pass


def resolve_seed(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# generate


def build_instance(args: argparse.Namespace, seed: int):
    law = WeightLaw.parse(args.law)
    kind = args.kind
    if kind == "random-bipartite":
        return gen_random_bipartite(args.nl, args.nr, args.p, law, seed)
    if kind == "random-hvm":
        return gen_random_hvm(args.nl, args.nr, args.d, args.options, law, seed)
    if kind == "random-hem":
        return gen_random_hem(args.n, args.m, args.d, law, seed)
    if kind == "random-graph":
        return gen_random_graph(args.n, args.p, law, seed)
    if kind == "random-grouped":
        return gen_random_grouped(args.nl, args.nr, args.p, args.groups, law, seed)
    if kind == "star":
        return gen_star(args.n, law, seed)
    if kind == "counterexample":
        return gen_groups_counterexample(args.n, args.eps)
    if kind == "figure2":
        return gen_figure2()
    raise UsageError(f"unknown kind {kind!r}")


def summarize(inst) -> str:
    if isinstance(inst, GroupedInstance):
        base = summarize(inst.base)
        return f"{base} groups={len(inst.groups)} grouping={inst.grouping_mode}"
    if isinstance(inst, WeightedBipartiteGraph):
        opt = optimal_bipartite(inst).total_weight
        return f"kind=bipartite left={inst.left_count} right={inst.right_count} edges={len(inst.edges)} opt={opt!r}"
    if isinstance(inst, (HvmHypergraph, HemHypergraph)):
        h = reduce_hem_to_hvm(inst) if isinstance(inst, HemHypergraph) else inst
        opt = (
            repr(optimal_hypergraph(h).total_weight)
            if len(h.edges) <= HYPERGRAPH_EDGE_BUDGET
            else "over-budget"
        )
        return f"kind={inst.kind} d={inst.d} edges={len(inst.edges)} opt={opt}"
    if isinstance(inst, UndirectedGraph):
        opt = max_weight_forest(inst).total_weight
        return f"kind=graph vertices={inst.vertex_count} edges={len(inst.edges)} opt={opt!r}"
    return f"kind={inst.kind}"


def cmd_generate(args: argparse.Namespace) -> int:
    seed = resolve_seed(args.seed)
    _say(f"master_seed={seed}")
    try:
        inst = build_instance(args, seed)
    except (ValueError, InstanceError) as exc:
        raise UsageError(str(exc)) from None
    text = dumps_instance(inst)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    _say(summarize(inst))
    return EXIT_OK


# ---------------------------------------------------------------------------
# run / sweep


def _open_instance(path: str):
    try:
        return load_instance(path)
    except FileNotFoundError:
        raise UsageError(f"no such instance file: {path}") from None
    except InstanceFormatError as exc:
        raise UsageError(str(exc)) from None


def _checks(inst, suite: str, trials: int, seed: int, params: dict, workers: int, allow_fallback: bool, series=None):
    try:
        return harness.check_bounds(
            inst, suite, trials, seed,
            p=params.get("p", 0.5), d=params.get("d"),
            allow_fallback=allow_fallback, workers=workers, series=series,
        )
    except (harness.HarnessError, OracleBudgetError) as exc:
        raise UsageError(str(exc)) from None


def _exit_code(checks) -> int:
    judged = [c for c in checks if not c.flagged]
    return EXIT_FAIL if any(c.verdict == "fail" for c in judged) else EXIT_OK


def _write_csv(rows: list[dict], out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            harness.write_results(rows, fh)
    else:
        harness.write_results(rows, sys.stdout)


def _report(checks) -> None:
    for c in checks:
        tag = " (flagged)" if c.flagged and c.kind != "info" else ""
        _say(f"{c.verdict:4s} {c.bound_name}: mean={c.estimate.mean:.6g} bound={c.theoretical_lower:.6g} "
             f"se={c.estimate.std_error:.3g} trials={c.estimate.trials}{tag}")


def cmd_run(args: argparse.Namespace) -> int:
    seed = resolve_seed(args.seed)
    _say(f"master_seed={seed}")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if args.emit_trials and not args.out:
        raise UsageError("--emit-trials needs --out to place the sibling JSON file")
    inst = _open_instance(args.instance)
    params = {"p": args.p, "d": args.d}
    series: dict = {}
    checks = _checks(inst, args.suite, args.trials, seed, params, args.workers, args.allow_fallback, series)
    iid = args.instance_id or Path(args.instance).stem
    _write_csv(harness.result_rows(args.suite, iid, checks, seed), args.out)
    if args.emit_trials:
        sibling = Path(args.out).with_suffix(".trials.json")
        doc = {
            "suite": args.suite,
            "instance_id": iid,
            "master_seed": seed,
            "trials": args.trials,
            "metrics": {k: [float(x) for x in v] for k, v in series.items()},
        }
        sibling.write_text(json.dumps(doc))
    _report(checks)
    return _exit_code(checks)


def parse_grid(entries: list[str]) -> dict[str, list]:
    grid: dict[str, list] = {}
    for entry in entries:
        key, sep, values = entry.partition("=")
        key = key.strip()
        if not sep or key not in GRID_KEYS:
            raise UsageError(f"grid entries look like p=0.3,0.5 or d=1,2; got {entry!r}")
        try:
            grid[key] = [GRID_KEYS[key](v) for v in values.split(",") if v.strip()]
        except ValueError:
            raise UsageError(f"bad values in grid entry {entry!r}") from None
        if not grid[key]:
            raise UsageError(f"grid entry {entry!r} has no values")
    return grid


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise UsageError(f"no such config file: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"{path}: {exc}") from None


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    suite = args.suite or cfg.get("suite")
    if suite is None:
        raise UsageError("sweep needs --suite (or suite in the config)")
    trials = args.trials if args.trials is not None else int(cfg.get("trials", 10_000))
    seed = resolve_seed(args.seed if args.seed is not None else cfg.get("seed"))
    workers = args.workers if args.workers is not None else int(cfg.get("workers", 1))
    allow_fallback = args.allow_fallback or bool(cfg.get("allow_fallback", False))
    _say(f"master_seed={seed}")
    if args.grid:
        grid = parse_grid(args.grid)
    else:
        grid = parse_grid([f"{k}={','.join(str(v) for v in vals)}" for k, vals in cfg.get("grid", {}).items()])
    if not grid:
        raise UsageError("empty parameter grid")
    folder = Path(args.instance_dir)
    if not folder.is_dir():
        raise UsageError(f"not a directory: {folder}")
    files = sorted(folder.glob("*.json"))
    files = [f for f in files if not f.name.endswith(".trials.json")]
    if not files:
        raise UsageError(f"no instance files in {folder}")
    keys = sorted(grid)
    rows: list[dict] = []
    code = EXIT_OK
    for path in files:
        inst = _open_instance(str(path))
        for values in itertools.product(*(grid[k] for k in keys)):
            params = dict(zip(keys, values))
            checks = _checks(inst, suite, trials, seed, params, workers, allow_fallback)
            rows.extend(harness.result_rows(suite, path.stem, checks, seed))
            code = max(code, _exit_code(checks))
    _write_csv(rows, args.out)
    _say(f"{len(rows)} rows from {len(files)} instances")
    return code


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="seclab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", help="write a generated instance file")
    gen.add_argument("kind", choices=[
        "random-bipartite", "random-hvm", "random-hem", "random-graph",
        "random-grouped", "star", "counterexample", "figure2",
    ])
    gen.add_argument("out", nargs="?", help="output path (default: stdout)")
    gen.add_argument("--nl", type=int, default=20, help="left vertices")
    gen.add_argument("--nr", type=int, default=20, help="right vertices")
    gen.add_argument("--n", type=int, default=10, help="vertices, leaves, or counterexample size")
    gen.add_argument("--m", type=int, default=10, help="hyperedges (random-hem)")
    gen.add_argument("--p", type=float, default=0.5, help="edge probability")
    gen.add_argument("--d", type=int, default=2, help="largest bundle size")
    gen.add_argument("--options", type=int, default=3, help="bundles per left vertex (random-hvm)")
    gen.add_argument("--groups", type=int, default=4, help="group count (random-grouped)")
    gen.add_argument("--eps", type=float, default=1e-5, help="counterexample epsilon")
    gen.add_argument("--law", default="uniform:0:1", help="weight law, e.g. uniform:0:1, exponential:1, powerlaw:2")
    gen.add_argument("--seed", type=int, default=None)
    gen.set_defaults(func=cmd_generate)

    run = sub.add_parser("run", help="check the bounds of one suite on one instance")
    run.add_argument("instance")
    run.add_argument("--suite", required=True, choices=harness.SUITES)
    run.add_argument("--trials", type=int, default=10_000)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--p", type=float, default=0.5, help="sampling probability (bvm, conjecture, counterexample)")
    run.add_argument("--d", type=int, default=None, help="bundle size bound (hvm; default: the instance's d)")
    run.add_argument("--out", help="results CSV (default: stdout)")
    run.add_argument("--instance-id", help="instance_id column (default: file stem)")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--emit-trials", action="store_true", help="also write per-trial values next to --out")
    run.add_argument("--allow-fallback", action="store_true", help="use greedy-scaled OPT when the exact oracle is over budget")
    run.set_defaults(func=cmd_run)

    sw = sub.add_parser("sweep", help="run a suite over every instance in a directory and a parameter grid")
    sw.add_argument("instance_dir")
    sw.add_argument("--suite", choices=harness.SUITES)
    sw.add_argument("--grid", action="append", help="e.g. p=0.3,0.5,0.7 (repeatable)")
    sw.add_argument("--config", help="TOML file with suite, trials, seed, workers, allow_fallback, [grid]")
    sw.add_argument("--trials", type=int, default=None)
    sw.add_argument("--seed", type=int, default=None)
    sw.add_argument("--out", help="results CSV (default: stdout)")
    sw.add_argument("--workers", type=int, default=None)
    sw.add_argument("--allow-fallback", action="store_true")
    sw.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args, extra = parser.parse_known_args(argv)
    # argparse will not fill an optional positional that follows options
    if args.command == "generate" and args.out is None and len(extra) == 1 and not extra[0].startswith("-"):
        args.out, extra = extra[0], []
    if extra:
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    try:
        return args.func(args)
    except UsageError as exc:
        _say(f"seclab: error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
