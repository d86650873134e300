#!/usr/bin/env python3
"""
MCSP Command Line
=================
Solve, verify, generate, benchmark and render minimum common string
partition instances.

Usage:
    python mcsp.py solve --engine {fpt,oracle,greedy} --k K [--stats] [--branch-budget B] [--json] FILE
    python mcsp.py --debug solve --k K --dump-dir DIR FILE
    python mcsp.py verify --k K FILE CSP.json
    python mcsp.py gen --n N --k K --sigma S --seed SEED -o FILE
    python mcsp.py bench --dir DIR --k-max K [--engines fpt,oracle,greedy] [--jobs J] [--json]
    python mcsp.py render FILE CSP.json -o OUT.png

Examples:
    python mcsp.py gen --n 12 --k 3 --seed 7 -o corpus/seed7.txt
    python mcsp.py solve --engine oracle --k 3 corpus/seed7.txt
    MCSP_BRANCH_BUDGET=100000 python mcsp.py solve --k 3 --stats corpus/seed7.txt

Exit codes: 0 yes/valid, 1 no/invalid, 2 resource limit hit, 3 unreadable input.
"""

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Optional

import numpy as np

from csp_model import diagnose_csp
from errors import BranchBudgetExceeded, DomainError, InstanceFormatError, MCSPError, ResourceError
from fpt_solver import BranchStats, resolve_branch_budget
from fpt_solver import solve as fpt_solve
from instance_io import csp_to_json, format_instance, generate_instance, load_csp, load_instance
from oracle_solvers import brute_force_min_csp, greedy_csp
from render_csp import render_constraint, render_csp

# Import configuration
try:
    from config import DEAD_END_DUMP_LIMIT, DEFAULT_ENGINE, DEFAULT_SIGMA, LOG_FORMAT, RNG_NAME
except ImportError:
    DEAD_END_DUMP_LIMIT = 25
    DEFAULT_ENGINE = "fpt"
    DEFAULT_SIGMA = 3
    LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"
    RNG_NAME = "PCG64"

logger = logging.getLogger("mcsp")

EXIT_OK = 0
EXIT_NO = 1
EXIT_RESOURCE = 2
EXIT_PARSE = 3

ENGINES = ("fpt", "oracle", "greedy")


@dataclass
class RunConfig:
    """Parsed command line of one invocation"""
    command: str
    engine: str = DEFAULT_ENGINE
    k: int = 1
    seed: Optional[int] = None
    branch_budget: Optional[int] = None
    stats: bool = False
    json: bool = False
    tokens: bool = False
    input: Optional[Path] = None
    csp_path: Optional[Path] = None
    output: Optional[Path] = None
    n: int = 0
    sigma: int = DEFAULT_SIGMA
    corpus_dir: Optional[Path] = None
    engines: tuple = ENGINES
    jobs: int = 1
    debug: bool = False
    dump_dir: Optional[Path] = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        engines = ENGINES
        if getattr(args, "engines", None):
            engines = tuple(e.strip() for e in args.engines.split(",") if e.strip())
            unknown = [e for e in engines if e not in ENGINES]
            if unknown:
                raise DomainError(f"unknown engine(s): {', '.join(unknown)}")
        dump_dir = Path(args.dump_dir) if getattr(args, "dump_dir", None) else None
        if dump_dir is not None and not args.debug:
            raise DomainError("--dump-dir needs --debug")
        k = getattr(args, "k", None)
        if k is None:
            k = getattr(args, "k_max", 1)
        if k < 1:
            raise DomainError(f"k must be positive, got {k}")
        return cls(
            command=args.command,
            engine=getattr(args, "engine", DEFAULT_ENGINE),
            k=k,
            seed=getattr(args, "seed", None),
            branch_budget=getattr(args, "branch_budget", None),
            stats=getattr(args, "stats", False),
            json=getattr(args, "json", False),
            tokens=getattr(args, "tokens", False),
            input=Path(args.file) if getattr(args, "file", None) else None,
            csp_path=Path(args.csp) if getattr(args, "csp", None) else None,
            output=Path(args.output) if getattr(args, "output", None) else None,
            n=getattr(args, "n", 0),
            sigma=getattr(args, "sigma", DEFAULT_SIGMA),
            corpus_dir=Path(args.dir) if getattr(args, "dir", None) else None,
            engines=engines,
            jobs=getattr(args, "jobs", 1),
            debug=args.debug,
            dump_dir=dump_dir,
        )


def status(config: RunConfig, line: str) -> None:
    """Human status line; silent under --json"""
    if not config.json:
        print(line)


# ============== SOLVE ==============

class ConstraintDumper:
    """Renders the dead-end constraints of one fpt run as numbered PNGs"""

    def __init__(self, inst, directory: Path, limit: int = DEAD_END_DUMP_LIMIT):
        self.inst = inst
        self.directory = directory
        self.limit = limit
        self.written = []

    def __call__(self, cons, frames) -> None:
        if len(self.written) >= self.limit:
            return
        self.directory.mkdir(parents=True, exist_ok=True)
        number = len(self.written) + 1
        path = self.directory / f"dead_end_{number:03d}.png"
        render_constraint(self.inst, cons, frames, path, title=f"dead end {number}")
        self.written.append(path)


def run_engine(inst, engine: str, k: int, budget: Optional[int] = None, dead_end=None) -> tuple:
    """(partition or None, stats dict or None) for one engine at one k"""
    if engine == "fpt":
        stats = BranchStats()
        csp = fpt_solve(inst, k, budget, stats, dead_end=dead_end)
        return csp, stats.to_json()
    if engine == "oracle":
        result = brute_force_min_csp(inst, k_max=k)
        return result.witness, {"explored": result.explored, "min_size": result.min_size}
    if engine == "greedy":
        if not inst.is_anagram:
            return None, None
        csp = greedy_csp(inst)
        return (csp if csp.size <= k else None), {"size": csp.size}
    raise DomainError(f"unknown engine {engine!r}")


def cmd_solve(config: RunConfig) -> int:
    inst = load_instance(config.input, config.k, config.tokens)
    budget = resolve_branch_budget(config.branch_budget)
    status(config, f"▸ {config.engine} on {config.input} (n = {inst.n}, k = {config.k})")
    dumper = None
    if config.dump_dir is not None and config.engine == "fpt":
        dumper = ConstraintDumper(inst, config.dump_dir)
    started = time.perf_counter()
    try:
        csp, stats = run_engine(inst, config.engine, config.k, budget, dumper)
    except BranchBudgetExceeded as exc:
        report = {"result": "budget_exceeded", "budget": exc.budget}
        if config.stats and exc.stats is not None:
            report["stats"] = exc.stats.to_json()
        if config.json:
            print(json.dumps(report))
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    elapsed = time.perf_counter() - started
    if dumper is not None and dumper.written:
        status(config, f"• {len(dumper.written)} dead-end constraint(s) rendered to {config.dump_dir}")

    payload = csp_to_json(csp) if csp is not None else "none"
    if config.json:
        report = {"engine": config.engine, "k": config.k, "result": payload}
        if config.stats:
            report["stats"] = stats
        print(json.dumps(report))
    else:
        if csp is not None:
            status(config, f"✓ partition of size {csp.size} in {elapsed:.3f}s")
            print(json.dumps(payload))
        else:
            status(config, f"✗ no partition of size <= {config.k}")
            print("none")
        if config.stats and stats is not None:
            print(json.dumps(stats, indent=2))
    if csp is not None and config.output is not None:
        config.output.write_text(json.dumps(payload) + "\n", encoding="utf-8")
        status(config, f"✓ saved to {config.output}")
    return EXIT_OK if csp is not None else EXIT_NO


# ============== VERIFY ==============

def cmd_verify(config: RunConfig) -> int:
    inst = load_instance(config.input, config.k, config.tokens)
    csp = load_csp(config.csp_path)
    check = diagnose_csp(inst, csp, config.k)
    if config.json:
        print(json.dumps({"ok": check.ok, "reason": check.reason, "detail": check.detail, "size": csp.size}))
    elif check.ok:
        print(f"✓ valid partition of size {csp.size} (k = {config.k})")
    else:
        print(f"✗ {check.reason}: {check.detail}")
    return EXIT_OK if check.ok else EXIT_NO


# ============== GENERATE ==============

def cmd_gen(config: RunConfig) -> int:
    inst, planted = generate_instance(config.n, config.k, config.sigma, config.seed)
    text = format_instance(inst)
    if config.output is not None:
        config.output.parent.mkdir(parents=True, exist_ok=True)
        config.output.write_text(text, encoding="utf-8")
    if config.json:
        print(json.dumps({"n": inst.n, "planted_size": planted.size, "seed": config.seed,
                          "rng": RNG_NAME, "planted": csp_to_json(planted)}))
    else:
        if config.output is None:
            print(text, end="")
        status(config, f"✓ planted partition of size {planted.size} ({RNG_NAME}, seed {config.seed})")
    return EXIT_OK


# ============== BENCHMARK ==============

def bench_one(path: str, engine: str, k_max: int, budget: Optional[int], tokens: bool) -> dict:
    """One (instance, engine) record; runs in a worker process when --jobs > 1"""
    record = {"instance": Path(path).name, "engine": engine, "decisions": {}, "min_size": None,
              "states": 0, "wall_time_s": 0.0}
    started = time.perf_counter()
    try:
        inst = load_instance(path, k_max, tokens)
        if engine == "fpt":
            found = False
            for k in range(1, k_max + 1):
                if found:
                    record["decisions"][k] = True
                    continue
                stats = BranchStats()
                csp = fpt_solve(inst, k, budget, stats)
                record["states"] += stats.states
                record["decisions"][k] = csp is not None
                if csp is not None:
                    found = True
                    record["min_size"] = csp.size
        elif engine == "oracle":
            result = brute_force_min_csp(inst, k_max=k_max)
            record["min_size"] = result.min_size
            record["states"] = result.explored
            record["decisions"] = {k: result.min_size is not None and result.min_size <= k
                                   for k in range(1, k_max + 1)}
        else:
            size = greedy_csp(inst).size if inst.is_anagram else None
            record["min_size"] = size if size is not None and size <= k_max else None
            record["decisions"] = {k: size is not None and size <= k for k in range(1, k_max + 1)}
    except MCSPError as exc:
        record["error"] = f"{type(exc).__name__}: {exc}"
    except Exception as exc:
        logger.exception("%s crashed on %s", engine, path)
        record["error"] = f"{type(exc).__name__}: {exc}"
    record["wall_time_s"] = round(time.perf_counter() - started, 6)
    return record


def agreement_matrix(records: list, engines: tuple, k_max: int) -> dict:
    """
    Fraction of (instance, k) decisions on which two engines agree.
    A run that ended in an error disagrees with everything.
    """
    decisions = {}
    for rec in records:
        decisions[rec["engine"], rec["instance"]] = None if "error" in rec else rec["decisions"]
    matrix = {}
    for a, b in combinations(engines, 2):
        same = []
        for (engine, name), ours in decisions.items():
            if engine != a or (b, name) not in decisions:
                continue
            theirs = decisions[b, name]
            for k in range(1, k_max + 1):
                same.append(ours is not None and theirs is not None and ours.get(k) == theirs.get(k))
        matrix[f"{a}/{b}"] = float(np.mean(same)) if same else None
    return matrix


def cmd_bench(config: RunConfig) -> int:
    if config.corpus_dir is None or not config.corpus_dir.is_dir():
        raise InstanceFormatError(f"corpus directory {config.corpus_dir} does not exist")
    budget = resolve_branch_budget(config.branch_budget)
    files = sorted(str(p) for p in config.corpus_dir.glob("*.txt"))
    jobs = [(path, engine, config.k, budget, config.tokens) for path in files for engine in config.engines]
    status(config, f"▸ {len(files)} instances, engines {', '.join(config.engines)}, k <= {config.k}")

    if config.jobs > 1 and jobs:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            records = list(pool.map(bench_one, *zip(*jobs)))
    else:
        records = [bench_one(*job) for job in jobs]

    report = {"k_max": config.k, "engines": list(config.engines), "records": records,
              "agreement": agreement_matrix(records, config.engines, config.k)}
    if config.json:
        print(json.dumps(report))
        return EXIT_OK
    for rec in records:
        if "error" in rec:
            print(f"  ⚠ {rec['instance']} [{rec['engine']}]: {rec['error']}")
        else:
            size = rec["min_size"] if rec["min_size"] is not None else f"> {config.k}"
            print(f"  • {rec['instance']} [{rec['engine']}]: size {size}, "
                  f"{rec['states']} states, {rec['wall_time_s']:.3f}s")
    for pair, value in report["agreement"].items():
        shown = "n/a" if value is None else f"{value:.1%}"
        print(f"  • agreement {pair}: {shown}")
    return EXIT_OK


# ============== RENDER ==============

def cmd_render(config: RunConfig) -> int:
    inst = load_instance(config.input, 1, config.tokens)
    csp = load_csp(config.csp_path)
    check = diagnose_csp(inst, csp)
    if not check.ok:
        print(f"✗ {check.reason}: {check.detail}")
        return EXIT_NO
    output = config.output or config.csp_path.with_suffix(".png")
    render_csp(inst, csp, output, title=f"{config.input.name}: size {csp.size}")
    status(config, f"✓ rendered to {output}")
    return EXIT_OK


# ============== MAIN ==============

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcsp", description="Minimum common string partition toolkit")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    parser.add_argument("-e", "--debug", action="store_true", help="log every branch")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="decide whether a partition of size <= k exists")
    solve.add_argument("file", metavar="FILE", help="instance file")
    solve.add_argument("--engine", choices=ENGINES, default=DEFAULT_ENGINE)
    solve.add_argument("--k", type=int, required=True, help="largest partition size")
    solve.add_argument("--stats", action="store_true", help="print search statistics")
    solve.add_argument("--branch-budget", type=int, default=None, help="state limit of the fpt engine")
    solve.add_argument("--json", action="store_true", help="machine-readable output")
    solve.add_argument("--tokens", action="store_true", help="symbols are whitespace-separated words")
    solve.add_argument("-o", "--output", help="write the partition JSON here")
    solve.add_argument("--dump-dir", help="with --debug, render dead-end constraints of the fpt engine here")

    verify = sub.add_parser("verify", help="check a partition against an instance")
    verify.add_argument("file", metavar="FILE")
    verify.add_argument("csp", metavar="CSP.json")
    verify.add_argument("--k", type=int, required=True)
    verify.add_argument("--json", action="store_true")
    verify.add_argument("--tokens", action="store_true")

    gen = sub.add_parser("gen", help="generate an instance with a planted partition")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--k", type=int, required=True)
    gen.add_argument("--sigma", type=int, default=DEFAULT_SIGMA)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("-o", "--output")
    gen.add_argument("--json", action="store_true")

    bench = sub.add_parser("bench", help="run engines over a directory of instances")
    bench.add_argument("--dir", required=True)
    bench.add_argument("--k-max", type=int, required=True)
    bench.add_argument("--engines", default=",".join(ENGINES))
    bench.add_argument("--jobs", type=int, default=1)
    bench.add_argument("--branch-budget", type=int, default=None)
    bench.add_argument("--json", action="store_true")
    bench.add_argument("--tokens", action="store_true")

    render = sub.add_parser("render", help="draw a partition as a PNG")
    render.add_argument("file", metavar="FILE")
    render.add_argument("csp", metavar="CSP.json")
    render.add_argument("-o", "--output")
    render.add_argument("--tokens", action="store_true")
    return parser


COMMANDS = {
    "solve": cmd_solve,
    "verify": cmd_verify,
    "gen": cmd_gen,
    "bench": cmd_bench,
    "render": cmd_render,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.debug else logging.INFO if args.verbose else logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT)
    try:
        config = RunConfig.from_args(args)
        return COMMANDS[config.command](config)
    except InstanceFormatError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ResourceError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except DomainError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
