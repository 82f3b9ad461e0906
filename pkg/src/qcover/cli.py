"""
Command-line entry point.

    qcover cover       parse -> transpile -> instrument -> run -> report
    qcover mutate      mutation campaign per circuit, optional CSV export
    qcover instrument  dump the transpiled or instrumented form of a circuit

Global flags (also settable via QCOVER_* environment variables): --seed,
--epsilon, --qubit-limit, --jobs, --quiet, --time-limit.  Exit codes:
0 success, 1 any per-file failure or engine-error verdict, 2 usage error.
All randomness is seeded (default 0), so identical inputs and flags give
identical outputs; a circuit aborted by the time limit is skipped with a
warning and does not fail the batch.
"""
from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import coverage, mutation, qasm, simulator
from .instrument import instrument, render
from .ir import controlled_gate_inventory, validate
from .transpiler import provenance_report, transpile

_METRICS = ("condition", "decision", "path")
_FAMILIES = ("coverage", "jain", "probabilistic")


def _env_default(name: str, fallback, convert):
    raw = os.environ.get(f"QCOVER_{name}")
    if raw is None:
        return fallback
    try:
        return convert(raw)
    except ValueError:
        raise SystemExit(f"qcover: invalid QCOVER_{name}={raw!r}")


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int,
                        default=_env_default("SEED", 0, int),
                        help="seed for every random choice (default 0)")
    parser.add_argument("--epsilon", type=float,
                        default=_env_default("EPSILON", coverage.DEFAULT_EPSILON, float),
                        help="certainty threshold for classifying expectations as +/-1")
    parser.add_argument("--qubit-limit", type=int,
                        default=_env_default("QUBIT_LIMIT", simulator.DEFAULT_QUBIT_LIMIT, int),
                        help="refuse circuits beyond this many qubits")
    parser.add_argument("--jobs", type=int,
                        default=_env_default("JOBS", 1, int),
                        help="worker processes for batch runs")
    parser.add_argument("--quiet", action="store_true",
                        default=_env_default("QUIET", False, lambda s: s not in ("", "0")),
                        help="suppress per-circuit output")
    parser.add_argument("--time-limit", type=float, metavar="SECONDS",
                        default=_env_default("TIME_LIMIT", None, float),
                        help="abort a single circuit past this budget without "
                             "failing the batch (checked between stages)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcover",
        description="Controlled-gate coverage and mutation analysis for OpenQASM 2 circuits")
    _common_flags(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    cover = sub.add_parser("cover", help="compute coverage metrics")
    _common_flags(cover)
    cover.add_argument("paths", nargs="+", help=".qasm files or directories")
    cover.add_argument("--summary", action="store_true",
                       help="aggregate min/max/median/avg over all circuits")
    cover.add_argument("--json", metavar="DIR", help="write one JSON report per circuit")
    cover.add_argument("--shots", type=int, default=0,
                       help="also sample a measurement histogram with this many shots")

    mutate = sub.add_parser("mutate", help="run a mutation campaign")
    _common_flags(mutate)
    mutate.add_argument("paths", nargs="+", help=".qasm files or directories")
    mutate.add_argument("--operators", default="qgr,qgd,qgi",
                        help="comma-separated subset of qgr,qgd,qgi")
    mutate.add_argument("--budget", type=int, default=None,
                        help="cap mutants per circuit (seeded subsample)")
    mutate.add_argument("--timeout-factor", type=float,
                        default=mutation.DEFAULT_TIMEOUT_FACTOR,
                        help="runtime ratio beyond which a mutant times out")
    mutate.add_argument("--tolerance", type=float, default=mutation.DEFAULT_TOLERANCE,
                        help="statevector equivalence tolerance")
    mutate.add_argument("--timing", choices=("cost", "wall"), default="cost",
                        help="runtime proxy: deterministic cost units or wall clock")
    mutate.add_argument("--csv", metavar="PATH", help="write the campaign table")

    instr = sub.add_parser("instrument", help="dump transpiled/instrumented circuit")
    _common_flags(instr)
    instr.add_argument("path", help="one .qasm file")
    instr.add_argument("--stage", choices=("transpiled", "instrumented"),
                       default="instrumented")
    instr.add_argument("--provenance", action="store_true",
                       help="also print the cx provenance table")

    return parser


class _TimeLimit(Exception):
    pass


class _Deadline:
    """Cooperative per-circuit budget, checked between pipeline stages."""

    def __init__(self, seconds: float | None):
        self.seconds = seconds
        self.start = time.perf_counter()

    def check(self) -> None:
        if self.seconds is not None and time.perf_counter() - self.start > self.seconds:
            raise _TimeLimit(f"time limit of {self.seconds}s exceeded")


def _expand_paths(paths: list[str]) -> list[Path]:
    out: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            out.extend(sorted(p.glob("*.qasm")))
        else:
            out.append(p)
    return out


def _load(path: Path):
    circuit = qasm.parse_file(str(path))
    problems = validate(circuit)
    if problems:
        raise qasm.QasmError("; ".join(str(v) for v in problems))
    return circuit


def _analyze_circuit(circuit, name: str, seed: int, epsilon: float,
                     qubit_limit: int, deadline: _Deadline):
    deadline.check()
    transpiled = transpile(circuit)
    deadline.check()
    probed = instrument(transpiled)
    deadline.check()
    result = simulator.run(probed, seed=seed, qubit_limit=qubit_limit)
    deadline.check()
    return coverage.analyze(result.probes, transpiled, epsilon=epsilon,
                            circuit_name=name)


def _cover_one(path_str: str, seed: int, epsilon: float, qubit_limit: int,
               time_limit: float | None = None):
    """Worker for the cover pipeline; returns (name, report)."""
    deadline = _Deadline(time_limit)
    path = Path(path_str)
    circuit = _load(path)
    report = _analyze_circuit(circuit, path.name, seed, epsilon, qubit_limit,
                              deadline)
    return path.name, report


def _run_batch(paths: list[Path], jobs: int, worker, *args) -> list[tuple[Path, object, Exception | None]]:
    """Run worker over paths, preserving order; failures become exceptions."""
    outcomes: list[tuple[Path, object, Exception | None]] = []
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(worker, str(p), *args) for p in paths]
            for path, future in zip(paths, futures):
                try:
                    outcomes.append((path, future.result(), None))
                except Exception as exc:
                    outcomes.append((path, None, exc))
        return outcomes
    for path in paths:
        try:
            outcomes.append((path, worker(str(path), *args), None))
        except Exception as exc:
            outcomes.append((path, None, exc))
    return outcomes


def _print_report(report: coverage.CoverageReport) -> None:
    print(f"{report.circuit}: {report.num_qubits} qubit(s), "
          f"{report.controlled_gates} controlled gate(s), "
          f"{report.cx_conditions} cx condition(s)")
    if report.controlled_gates == 0:
        print("  fully sequential: no controlled gates, all metrics 100% by definition")
    print(f"  {'metric':<10} {'coverage':>9} {'jain':>9} {'probabilistic':>14}")
    for metric in _METRICS:
        row = [report.metric(fam, metric) for fam in _FAMILIES]
        print(f"  {metric:<10} {row[0]:>9.2f} {row[1]:>9.2f} {row[2]:>14.2f}")


def _print_summary(reports: list[coverage.CoverageReport]) -> None:
    print(f"summary over {len(reports)} circuit(s)")
    print(f"  {'metric':<26} {'min':>9} {'max':>9} {'median':>9} {'avg':>9}")
    for metric in _METRICS:
        for family in _FAMILIES:
            values = [r.metric(family, metric) for r in reports]
            print(f"  {metric + ' ' + family:<26} {min(values):>9.2f} "
                  f"{max(values):>9.2f} {statistics.median(values):>9.2f} "
                  f"{statistics.mean(values):>9.2f}")


def _write_json(directory: str, report: coverage.CoverageReport) -> None:
    out_dir = Path(directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = Path(report.circuit).stem + ".json"
    with open(out_dir / name, "w", encoding="utf-8") as fh:
        json.dump(report.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_cover(args) -> int:
    paths = _expand_paths(args.paths)
    if not paths:
        print("qcover: no input files", file=sys.stderr)
        return 1
    outcomes = _run_batch(paths, args.jobs, _cover_one,
                          args.seed, args.epsilon, args.qubit_limit,
                          args.time_limit)
    reports = []
    failed = False
    for path, result, error in outcomes:
        if isinstance(error, _TimeLimit):
            print(f"qcover: {path}: skipped ({error})", file=sys.stderr)
            continue
        if error is not None:
            failed = True
            print(f"qcover: {path}: {error}", file=sys.stderr)
            continue
        _, report = result
        reports.append(report)
        if not args.quiet:
            _print_report(report)
        if args.json:
            _write_json(args.json, report)
        if args.shots > 0 and not args.quiet:
            circuit = _load(path)
            counts = simulator.sample_counts(circuit, args.shots, seed=args.seed,
                                             qubit_limit=args.qubit_limit)
            if counts:
                print(f"  histogram ({args.shots} shots): " +
                      " ".join(f"{k}:{v}" for k, v in counts.items()))
    if reports and args.summary and not args.quiet:
        _print_summary(reports)
    return 1 if failed else 0


def _mutate_one(path_str: str, seed: int, epsilon: float, qubit_limit: int,
                operators: tuple[str, ...], budget: int | None,
                tolerance: float, timeout_factor: float, timing: str,
                time_limit: float | None = None):
    deadline = _Deadline(time_limit)
    path = Path(path_str)
    circuit = _load(path)
    report = _analyze_circuit(circuit, path.name, seed, epsilon, qubit_limit,
                              deadline)
    mutants = mutation.generate_mutants(circuit, operators, seed=seed, budget=budget)
    verdicts = []
    for mutant in mutants:
        deadline.check()
        verdicts.append(mutation.judge(circuit, mutant, tolerance, timeout_factor,
                                       timing=timing, qubit_limit=qubit_limit))
    result = mutation.campaign(circuit, report, operators,
                               circuit_name=path.name, seed=seed, budget=budget,
                               tolerance=tolerance, timeout_factor=timeout_factor,
                               timing=timing, qubit_limit=qubit_limit,
                               mutants=mutants, verdicts=verdicts)
    mutant_lines = tuple(
        f"[{m.mutant_id}] {m.operator} {m.detail} @ {m.site} -> {v.status}"
        + (f" (fidelity {v.fidelity:.6f})" if v.fidelity is not None else "")
        for m, v in zip(mutants, result.verdicts))
    return result, mutant_lines


def cmd_mutate(args) -> int:
    operators = tuple(op.strip() for op in args.operators.split(",") if op.strip())
    for op in operators:
        if op not in mutation.OPERATORS:
            print(f"qcover: unknown mutation operator {op!r}", file=sys.stderr)
            return 2
    if not operators:
        print("qcover: --operators needs at least one of qgr,qgd,qgi", file=sys.stderr)
        return 2
    paths = _expand_paths(args.paths)
    if not paths:
        print("qcover: no input files", file=sys.stderr)
        return 1

    outcomes = _run_batch(paths, args.jobs, _mutate_one,
                          args.seed, args.epsilon, args.qubit_limit, operators,
                          args.budget, args.tolerance, args.timeout_factor,
                          args.timing, args.time_limit)
    rows = []
    failed = False
    had_engine_errors = False
    for path, result, error in outcomes:
        if isinstance(error, _TimeLimit):
            print(f"qcover: {path}: skipped ({error})", file=sys.stderr)
            continue
        if error is not None:
            failed = True
            print(f"qcover: {path}: {error}", file=sys.stderr)
            continue
        campaign_result, mutant_lines = result
        rows.append(campaign_result)
        had_engine_errors |= campaign_result.errors > 0
        if not args.quiet:
            score = ("none" if campaign_result.score is None
                     else f"{campaign_result.score:.4f}")
            print(f"{campaign_result.circuit_name}: {campaign_result.mutants} mutant(s), "
                  f"killed {campaign_result.killed}, survived {campaign_result.survived}, "
                  f"timeout {campaign_result.timeout}, errors {campaign_result.errors}, "
                  f"score {score}")
            for op in campaign_result.operators:
                total, k, s, t = campaign_result.per_operator[op]
                print(f"  {op}: {total} mutant(s), {k} killed, {s} survived, {t} timeout")
            for line in mutant_lines:
                print(f"  {line}")

    if args.csv and rows:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(mutation.csv_header() + "\n")
            for row in rows:
                fh.write(row.csv_row() + "\n")
    if failed or had_engine_errors:
        return 1
    return 0


def cmd_instrument(args) -> int:
    path = Path(args.path)
    try:
        circuit = _load(path)
        transpiled = transpile(circuit)
    except Exception as exc:
        print(f"qcover: {path}: {exc}", file=sys.stderr)
        return 1
    if not controlled_gate_inventory(circuit):
        print("// fully sequential circuit: no controlled gates, "
              "coverage is 100% by definition")
    if args.stage == "transpiled":
        sys.stdout.write(qasm.serialize(transpiled.circuit))
        if args.provenance:
            sys.stdout.write("\n" + provenance_report(transpiled))
    else:
        sys.stdout.write(render(instrument(transpiled)))
        if args.provenance:
            sys.stdout.write("\n" + provenance_report(transpiled))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "cover":
        return cmd_cover(args)
    if args.command == "mutate":
        return cmd_mutate(args)
    return cmd_instrument(args)


if __name__ == "__main__":
    sys.exit(main())
