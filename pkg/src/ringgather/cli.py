"""Command-line driver: ``ring-gather {run,sweep,analyze,explore,verify}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Optional, Sequence

from . import algo_anon
from .instances import random_instance
from .ring_model import InstanceSpec, InvalidInstance, instance_from_gaps
from .scheduler import STRATEGIES, ExecutionTrace, RunResult, explore_bounded, replay, simulate
from .verifier import (
    GATHERED, TIMEOUT, UNSOLVABLE, VIOLATION, TraceError, account_moves, bound_failures,
    breakdown_from_config, check_partial_gathering, semi_circulations,
)

EXIT_OK, EXIT_USAGE, EXIT_UNSOLVABLE, EXIT_VIOLATION, EXIT_TIMEOUT, EXIT_CAP = 0, 1, 2, 3, 4, 5
VERDICT_EXIT = {GATHERED: EXIT_OK, UNSOLVABLE: EXIT_UNSOLVABLE, VIOLATION: EXIT_VIOLATION,
                TIMEOUT: EXIT_TIMEOUT}

CSV_VERSION = "# ring-gather-csv v1"
CSV_COLUMNS = ("model", "n", "k", "g", "seed", "scheduler", "outcome", "steps", "total_moves",
               "active_moves", "leader_moves", "moving_moves", "semi_moves", "anon_moves", "verdict")


class UsageError(Exception):
    pass


def _ints(text: Optional[str], what: str) -> Optional[list]:
    if text is None:
        return None
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise UsageError(f"{what} must be a comma-separated list of integers") from None


def _add_instance_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("instance", nargs="?", help="instance JSON file (inline flags override it)")
    p.add_argument("--model", choices=("distinct", "random", "anon"))
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--g", type=int)
    p.add_argument("--ids", help="comma-separated agent IDs (distinct model)")
    p.add_argument("--gaps", help="comma-separated forward gaps between consecutive agents")
    p.add_argument("--positions", help="comma-separated initial nodes")
    p.add_argument("--seed", type=int)
    p.add_argument("--scheduler", choices=STRATEGIES)
    p.add_argument("--step-limit", type=int)
    p.add_argument("--id-bits", type=int, help="random-model ID length override")
    p.add_argument("--paper-literal-marking", action="store_true",
                   help="mark with the test-then-increment rule (livelocks on some instances)")


def build_spec(args) -> InstanceSpec:
    """Instance from an optional JSON file plus inline overrides."""
    doc: dict = {}
    if args.instance:
        try:
            with open(args.instance, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read instance file: {exc}") from exc
        if not isinstance(doc, dict):
            raise UsageError("instance file must hold a JSON object")
    for key, attr in (("model", "model"), ("n", "n"), ("g", "g"), ("seed", "seed"),
                      ("scheduler", "scheduler"), ("step_limit", "step_limit"),
                      ("id_bits_override", "id_bits")):
        value = getattr(args, attr)
        if value is not None:
            doc[key] = value
    model = doc.get("model")
    if model is None or doc.get("g") is None:
        raise UsageError("an instance needs at least --model and --g")
    ids = _ints(args.ids, "--ids")
    gaps = _ints(args.gaps, "--gaps")
    positions = _ints(args.positions, "--positions")
    seed = int(doc.get("seed", 0))
    if gaps is not None:
        if doc.get("n") is not None and args.n is not None and sum(gaps) != args.n:
            raise UsageError(f"--gaps sum to {sum(gaps)}, not --n {args.n}")
        tmp = instance_from_gaps(gaps, 2, model=model)
        doc["n"] = tmp.n
        positions = tmp.positions
    if positions is not None:
        if ids is None:
            ids = [None] * len(positions)
        if len(ids) != len(positions):
            raise UsageError("--ids and the placement list differ in length")
        doc["agents"] = [{"position": p, "id": i} for p, i in zip(positions, ids)]
    elif ids is not None:
        if "agents" in doc:
            if len(ids) != len(doc["agents"]):
                raise UsageError("--ids length differs from the instance's agent count")
            doc["agents"] = [{"position": (a["position"] if isinstance(a, dict) else a[0]), "id": i}
                             for a, i in zip(doc["agents"], ids)]
        else:
            # one agent per node, in order, as in the worked examples
            doc.setdefault("n", len(ids))
            doc["agents"] = [{"position": p, "id": i} for p, i in enumerate(ids)]
    if "agents" not in doc:
        if doc.get("n") is None or args.k is None:
            raise UsageError("give an instance file, --positions, --gaps, --ids, or --n with --k")
        spec = random_instance(model, int(doc["n"]), args.k, int(doc["g"]), seed)
        doc["agents"] = spec.to_json()["agents"]
    try:
        spec = InstanceSpec.from_json(doc)
        spec.validate()
    except InvalidInstance as exc:
        raise UsageError(f"invalid instance: {exc}") from exc
    return spec


def summary_row(spec: InstanceSpec, result: RunResult, verdict: str) -> dict:
    b = breakdown_from_config(result.final)
    return {
        "model": spec.model, "n": spec.n, "k": spec.k, "g": spec.g, "seed": spec.seed,
        "scheduler": result.trace.scheduler, "outcome": result.outcome,
        "steps": result.final.step_count, "total_moves": b.total, "active_moves": b.active,
        "leader_moves": b.leader, "moving_moves": b.moving, "semi_moves": b.semi_leader,
        "anon_moves": b.anon, "verdict": verdict,
    }


def write_csv(fh, rows) -> None:
    fh.write(CSV_VERSION + "\n")
    w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(row)


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def cmd_run(args) -> int:
    spec = build_spec(args)
    result = simulate(spec, paper_literal_marking=args.paper_literal_marking,
                      record_trace=args.trace is not None)
    verdict = check_partial_gathering(result.final, spec.g, result.outcome)
    row = summary_row(spec, result, verdict.kind)
    if args.trace:
        _write_text(args.trace, result.trace.to_jsonl())
    if args.summary:
        buf = io.StringIO()
        write_csv(buf, [row])
        _write_text(args.summary, buf.getvalue())
    print(f"verdict: {verdict.kind}")
    print(f"details: {verdict.details}")
    print(f"groups: {','.join(map(str, verdict.group_sizes))}")
    print(f"steps: {row['steps']}  total_moves: {row['total_moves']}")
    return VERDICT_EXIT[verdict.kind]


def _g_values(tokens: list, k: int) -> list:
    out = []
    for t in tokens:
        if t == "k":
            v = k
        elif t == "half":
            v = k // 2
        else:
            try:
                v = int(t)
            except ValueError:
                raise UsageError(f"g value {t!r} is not an integer, 'half' or 'k'") from None
        if 2 <= v <= k and v not in out:
            out.append(v)
    return out


def sweep_grid(models, ns, ks, g_tokens, seeds, schedulers) -> list:
    """Grid cells in deterministic order: (model, n, k, g, scheduler, seed)."""
    cells = []
    for model in models:
        for n in ns:
            for k in ks:
                if not 1 <= k <= n:
                    continue
                for g in _g_values(g_tokens, k):
                    for sch in schedulers:
                        for seed in seeds:
                            cells.append((model, n, k, g, sch, seed))
    return cells


def run_cell(cell, paper_literal_marking=False, id_bits=None):
    """Simulate one sweep cell; returns (row, failure messages)."""
    model, n, k, g, sch, seed = cell
    spec = random_instance(model, n, k, g, seed, sch, id_bits_override=id_bits)
    result = simulate(spec, paper_literal_marking=paper_literal_marking, record_trace=False)
    verdict = check_partial_gathering(result.final, g, result.outcome)
    problems = []
    if verdict.kind == UNSOLVABLE:
        if algo_anon.is_solvable(algo_anon.gaps_from_positions(n, spec.positions), g).solvable:
            problems.append("reported unsolvable on a solvable placement")
    elif verdict.kind != GATHERED:
        problems.append(verdict.details)
    else:
        b = breakdown_from_config(result.final)
        problems += bound_failures(b, model, n, k, g, semi_circulations(result.final))
    return summary_row(spec, result, verdict.kind), problems


def cmd_sweep(args) -> int:
    models = args.models.split(",")
    for m in models:
        if m not in ("distinct", "random", "anon"):
            raise UsageError(f"unknown model {m!r}")
    schedulers = list(STRATEGIES) if args.schedulers == "all" else args.schedulers.split(",")
    for s in schedulers:
        if s not in STRATEGIES:
            raise UsageError(f"unknown scheduler {s!r}")
    if args.seed_list is not None:
        seeds = _ints(args.seed_list, "--seed-list")
    else:
        seeds = list(range(args.seed_start, args.seed_start + args.seeds))
    cells = sweep_grid(models, _ints(args.ns, "--ns"), _ints(args.ks, "--ks"),
                       args.gs.split(","), seeds, schedulers)
    if not cells:
        raise UsageError("the grid is empty")
    rows, failures = [], []
    for cell in cells:
        row, problems = run_cell(cell, args.paper_literal_marking, args.id_bits)
        rows.append(row)
        if problems:
            failures.append((row, problems))
    buf = io.StringIO()
    write_csv(buf, rows)
    if args.out:
        _write_text(args.out, buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    for row, problems in failures:
        print(f"FAIL {row['model']} n={row['n']} k={row['k']} g={row['g']} "
              f"{row['scheduler']} seed={row['seed']}: {row['verdict']}; {'; '.join(problems)}",
              file=sys.stderr)
    print(f"{len(rows)} runs, {len(failures)} failing", file=sys.stderr)
    if not failures:
        return EXIT_OK
    if any(row["verdict"] == TIMEOUT for row, _ in failures):
        return EXIT_TIMEOUT
    return EXIT_VIOLATION


def cmd_analyze(args) -> int:
    try:
        gaps = algo_anon.distance_sequence(_ints(args.gaps, "--gaps") or [], args.n)
    except algo_anon.InvalidArgument as exc:
        raise UsageError(str(exc)) from exc
    if args.g < 1:
        raise UsageError("--g must be positive")
    report = algo_anon.is_solvable(gaps, args.g)
    print(report.render())
    return EXIT_OK if report.solvable else EXIT_UNSOLVABLE


def cmd_explore(args) -> int:
    spec = build_spec(args)
    if spec.model == "random":
        raise UsageError("explore supports the distinct and anon models")
    report = explore_bounded(spec, args.branch_cap, args.state_cap, args.paper_literal_marking)
    counts: dict = {}
    for label, _ in report.outcomes:
        counts[label] = counts.get(label, 0) + 1
    print(f"states: {report.states}")
    for label in sorted(counts):
        print(f"outcome {label}: {counts[label]} state(s)")
    for label in sorted(report.counterexamples):
        sched = " ".join("+".join(map(str, c)) for c in report.counterexamples[label])
        print(f"witness {label}: {sched}")
    if report.cap_exceeded:
        print("cap exceeded: exploration incomplete")
    bad = report.violations
    if bad - {"NonTermination"}:
        return EXIT_VIOLATION
    if "NonTermination" in bad:
        return EXIT_TIMEOUT
    if report.cap_exceeded:
        return EXIT_CAP
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        with open(args.trace, encoding="utf-8") as fh:
            trace = ExecutionTrace.read_jsonl(fh)
    except OSError as exc:
        raise UsageError(f"cannot read trace: {exc}") from exc
    except (TraceError, InvalidInstance) as exc:
        raise UsageError(f"bad trace: {exc}") from exc
    try:
        b = account_moves(trace)
    except TraceError as exc:
        raise UsageError(f"bad trace: {exc}") from exc
    _, positions, roles = replay(trace)
    spec = trace.spec
    again = simulate(spec, trace.scheduler, trace.paper_literal_marking)
    consistent = (again.trace.events == trace.events
                  and positions == [a.position for a in again.final.agents]
                  and roles == [a.role for a in again.final.agents])
    verdict = check_partial_gathering(again.final, spec.g, again.outcome)
    print(f"verdict: {verdict.kind}")
    print(f"details: {verdict.details}")
    print(f"moves: total={b.total} active={b.active} leader={b.leader} moving={b.moving} "
          f"semi={b.semi_leader} anon={b.anon}")
    print(f"replay: {'consistent' if consistent else 'MISMATCH'}")
    if not consistent:
        return EXIT_VIOLATION
    if verdict.kind == GATHERED:
        problems = bound_failures(b, spec.model, spec.n, spec.k, spec.g,
                                  semi_circulations(again.final))
        for p in problems:
            print(f"bound: {p}")
        if problems:
            return EXIT_VIOLATION
    return VERDICT_EXIT[verdict.kind]


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ring-gather",
                                     description="g-partial gathering on asynchronous rings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one instance")
    _add_instance_flags(p)
    p.add_argument("--trace", help="write the JSON-lines trace here")
    p.add_argument("--summary", help="write a one-row CSV summary here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="simulate a parameter grid of random instances")
    p.add_argument("--models", default="distinct")
    p.add_argument("--ns", default="16,64")
    p.add_argument("--ks", default="4,8")
    p.add_argument("--gs", default="2,3", help="values of g; 'half' = k//2, 'k' = k")
    p.add_argument("--seeds", type=int, default=25, help="number of seeds per cell")
    p.add_argument("--seed-start", type=int, default=0)
    p.add_argument("--seed-list", help="explicit comma-separated seeds (overrides --seeds)")
    p.add_argument("--schedulers", default="all")
    p.add_argument("--id-bits", type=int)
    p.add_argument("--paper-literal-marking", action="store_true")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("analyze", help="solvability of an anonymous placement")
    p.add_argument("--gaps", required=True)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--n", type=int, help="ring size; checked against the gap sum")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("explore", help="enumerate every schedule of a tiny instance")
    _add_instance_flags(p)
    p.add_argument("--branch-cap", type=int, default=10_000)
    p.add_argument("--state-cap", type=int, default=200_000)
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("verify", help="re-check a recorded trace")
    p.add_argument("trace")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
