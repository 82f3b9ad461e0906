"""
First-order mutation of circuits and statevector-based kill classification.

Three operators act on probe-free circuits:
    qgr  replace a gate with another kind from its syntactic class
    qgd  delete a gate
    qgi  insert a gate from the site's syntactic class right after it

Syntactic classes keep the edit well-formed (same qubit and parameter
counts):
    A  parameterless single-qubit      h x y z s sdg t tdg sx id
    B  one-parameter single-qubit      rx ry rz p
    C  parameterless single-control    cx cy cz ch csx
    D  one-parameter single-control    crx cry crz cp cu1

A mutant is judged against the original by comparing pre-measurement
statevectors: |<orig|mut>| >= 1 - tolerance means the mutant survived
(states equal up to global phase), anything less means it was killed.  A
mutant whose run costs more than timeout_factor times the original's counts
as a timeout instead.  Runtime can be measured two ways: "cost" charges
gate-count * 2^n deterministic units (the default for campaigns, whose CSV
output must be byte-stable across runs), "wall" takes the median of three
wall-clock runs.

Measurements and barriers are never mutation sites: deleting a measurement
cannot change the pre-measurement state this comparison looks at.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .coverage import CoverageReport
from .ir import Circuit, GateInstruction, GateKind, renumber
from .simulator import DEFAULT_QUBIT_LIMIT, fidelity, statevector_of

OPERATORS = ("qgr", "qgd", "qgi")
DEFAULT_TOLERANCE = 1e-8
DEFAULT_TIMEOUT_FACTOR = 1.10

SYNTACTIC_CLASSES: tuple[tuple[GateKind, ...], ...] = (
    (GateKind.H, GateKind.X, GateKind.Y, GateKind.Z, GateKind.S, GateKind.SDG,
     GateKind.T, GateKind.TDG, GateKind.SX, GateKind.ID),
    (GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.P),
    (GateKind.CX, GateKind.CY, GateKind.CZ, GateKind.CH, GateKind.CSX),
    (GateKind.CRX, GateKind.CRY, GateKind.CRZ, GateKind.CP, GateKind.CU1),
)

_CLASS_OF: dict[GateKind, tuple[GateKind, ...]] = {
    kind: cls for cls in SYNTACTIC_CLASSES for kind in cls
}


class MutationError(Exception):
    pass


@dataclass(frozen=True)
class Mutant:
    mutant_id: int
    operator: str
    site: int        # instruction id in the original circuit
    detail: str
    circuit: Circuit


@dataclass(frozen=True)
class MutantVerdict:
    mutant_id: int
    status: str      # killed | survived | timeout | error
    fidelity: float | None
    original_runtime: float
    mutant_runtime: float


def _mutable_sites(circuit: Circuit) -> list[GateInstruction]:
    return [i for i in circuit.gates
            if i.kind not in (GateKind.MEASURE, GateKind.BARRIER)]


def _rebuild(circuit: Circuit, instructions: list) -> Circuit:
    return Circuit(circuit.num_qubits, circuit.num_clbits,
                   renumber(instructions))


def generate_mutants(circuit: Circuit, operators: tuple[str, ...] = OPERATORS,
                     seed: int = 0, budget: int | None = None) -> list[Mutant]:
    """Enumerate first-order mutants, optionally subsampled to a budget.

    Enumeration is deterministic: operators in canonical order, sites in
    program order, replacement kinds in class order.  The seed only matters
    when a budget forces subsampling.
    """
    if circuit.has_probes():
        raise MutationError("mutation expects a probe-free circuit")
    for op in operators:
        if op not in OPERATORS:
            raise MutationError(f"unknown mutation operator {op!r}")

    instructions = list(circuit.instructions)
    position_of = {instr.id: pos for pos, instr in enumerate(instructions)}
    sites = _mutable_sites(circuit)
    mutants: list[Mutant] = []

    def add(operator: str, site: int, detail: str, new_instructions: list) -> None:
        mutants.append(Mutant(len(mutants), operator, site, detail,
                              _rebuild(circuit, new_instructions)))

    for operator in OPERATORS:
        if operator not in operators:
            continue
        if operator == "qgr":
            for site in sites:
                cls = _CLASS_OF.get(site.kind)
                if cls is None:
                    continue
                pos = position_of[site.id]
                for kind in cls:
                    if kind is site.kind:
                        continue
                    replaced = GateInstruction(site.id, kind, site.qubits, site.params)
                    body = instructions[:pos] + [replaced] + instructions[pos + 1:]
                    add("qgr", site.id, f"{site.kind.value}->{kind.value}", body)
        elif operator == "qgd":
            for site in sites:
                pos = position_of[site.id]
                body = instructions[:pos] + instructions[pos + 1:]
                add("qgd", site.id, f"delete {site.kind.value}", body)
        else:  # qgi
            for site in sites:
                cls = _CLASS_OF.get(site.kind)
                if cls is None:
                    continue
                pos = position_of[site.id]
                for kind in cls:
                    inserted = GateInstruction(0, kind, site.qubits, site.params)
                    body = instructions[:pos + 1] + [inserted] + instructions[pos + 1:]
                    add("qgi", site.id, f"insert {kind.value} after {site.kind.value}", body)

    if budget is not None and budget < len(mutants):
        rng = np.random.default_rng(seed)
        keep = sorted(rng.choice(len(mutants), size=budget, replace=False))
        mutants = [Mutant(new_id, mutants[i].operator, mutants[i].site,
                          mutants[i].detail, mutants[i].circuit)
                   for new_id, i in enumerate(keep)]
    return mutants


# -- runtime measurement -----------------------------------------------------

def _strip_for_statevector(circuit: Circuit) -> Circuit:
    kept = tuple(i for i in circuit.instructions
                 if i.kind not in (GateKind.MEASURE, GateKind.BARRIER))
    return Circuit(circuit.num_qubits, circuit.num_clbits, kept)


def _cost_units(circuit: Circuit) -> float:
    """Deterministic runtime proxy: executed gates times state size."""
    gate_count = sum(1 for i in circuit.gates
                     if i.kind not in (GateKind.MEASURE, GateKind.BARRIER))
    return float(gate_count * (1 << circuit.num_qubits))


def _timed_statevector(circuit: Circuit, timing: str,
                       qubit_limit: int) -> tuple[np.ndarray, float]:
    stripped = _strip_for_statevector(circuit)
    if timing == "cost":
        return statevector_of(stripped, qubit_limit=qubit_limit), _cost_units(stripped)
    # median of 3 wall-clock runs damps scheduler noise
    samples = []
    state = None
    for _ in range(3):
        start = time.perf_counter()
        state = statevector_of(stripped, qubit_limit=qubit_limit)
        samples.append(time.perf_counter() - start)
    samples.sort()
    return state, samples[1]


def judge(original: Circuit, mutant: Mutant,
          tolerance: float = DEFAULT_TOLERANCE,
          timeout_factor: float = DEFAULT_TIMEOUT_FACTOR, *,
          timing: str = "wall",
          qubit_limit: int = DEFAULT_QUBIT_LIMIT) -> MutantVerdict:
    """Classify one mutant as killed, survived, or timeout.

    Simulation failures yield an 'error' verdict rather than raising, so a
    campaign can keep going.
    """
    if timing not in ("wall", "cost"):
        raise MutationError(f"unknown timing mode {timing!r}")
    try:
        ref_state, ref_time = _timed_statevector(original, timing, qubit_limit)
        mut_state, mut_time = _timed_statevector(mutant.circuit, timing, qubit_limit)
    except Exception:
        return MutantVerdict(mutant.mutant_id, "error", None, 0.0, 0.0)

    if mut_time > timeout_factor * ref_time:
        return MutantVerdict(mutant.mutant_id, "timeout", None, ref_time, mut_time)
    fid = fidelity(ref_state, mut_state)
    status = "survived" if fid >= 1.0 - tolerance else "killed"
    return MutantVerdict(mutant.mutant_id, status, fid, ref_time, mut_time)


def mutation_score(verdicts: list[MutantVerdict]) -> float:
    """Killed mutants over all generated mutants, timeouts included."""
    if not verdicts:
        raise MutationError("mutation_score needs at least one verdict")
    counted = [v for v in verdicts if v.status in ("killed", "survived", "timeout")]
    if not counted:
        raise MutationError("no judged mutants to score")
    killed = sum(1 for v in counted if v.status == "killed")
    return killed / len(counted)


# -- campaign ---------------------------------------------------------------

CSV_COLUMNS = ("circuit", "qubits", "operator", "mutants", "killed", "survived",
               "timeout", "score", "condition_cov", "decision_cov", "path_cov",
               "prob_condition", "prob_decision", "prob_path")


@dataclass(frozen=True)
class CampaignResult:
    circuit_name: str
    num_qubits: int
    operators: tuple[str, ...]
    mutants: int
    killed: int
    survived: int
    timeout: int
    errors: int
    score: float | None
    per_operator: dict[str, tuple[int, int, int, int]]  # op -> (total, k, s, t)
    verdicts: tuple[MutantVerdict, ...]
    report: CoverageReport

    def csv_row(self) -> str:
        score = "" if self.score is None else repr(self.score)
        cells = [self.circuit_name, str(self.num_qubits),
                 "+".join(self.operators), str(self.mutants), str(self.killed),
                 str(self.survived), str(self.timeout), score,
                 repr(self.report.condition), repr(self.report.decision),
                 repr(self.report.path), repr(self.report.prob_condition),
                 repr(self.report.prob_decision), repr(self.report.prob_path)]
        return ",".join(cells)


def csv_header() -> str:
    return ",".join(CSV_COLUMNS)


def campaign(circuit: Circuit, report: CoverageReport,
             operators: tuple[str, ...] = OPERATORS, *,
             circuit_name: str = "", seed: int = 0, budget: int | None = None,
             tolerance: float = DEFAULT_TOLERANCE,
             timeout_factor: float = DEFAULT_TIMEOUT_FACTOR,
             timing: str = "cost",
             qubit_limit: int = DEFAULT_QUBIT_LIMIT,
             mutants: list[Mutant] | None = None,
             verdicts: list[MutantVerdict] | None = None) -> CampaignResult:
    """Generate, judge, and tally every mutant of one circuit.

    Pre-generated mutants and verdicts may be supplied (the CLI judges them
    itself so it can enforce a time limit).  Engine errors on individual
    mutants are tallied without aborting; the caller decides how to surface
    them (the CLI exits nonzero).
    """
    operators = tuple(sorted(set(operators)))
    if mutants is None:
        mutants = generate_mutants(circuit, operators, seed=seed, budget=budget)
    if verdicts is None:
        verdicts = [judge(circuit, mutant, tolerance, timeout_factor,
                          timing=timing, qubit_limit=qubit_limit)
                    for mutant in mutants]
    if len(verdicts) != len(mutants):
        raise MutationError("verdict list does not match the mutant list")
    per_operator: dict[str, list[int]] = {op: [0, 0, 0, 0] for op in operators}
    for mutant, verdict in zip(mutants, verdicts):
        tally = per_operator[mutant.operator]
        tally[0] += 1
        if verdict.status == "killed":
            tally[1] += 1
        elif verdict.status == "survived":
            tally[2] += 1
        elif verdict.status == "timeout":
            tally[3] += 1

    killed = sum(1 for v in verdicts if v.status == "killed")
    survived = sum(1 for v in verdicts if v.status == "survived")
    timeouts = sum(1 for v in verdicts if v.status == "timeout")
    errors = sum(1 for v in verdicts if v.status == "error")
    judged = killed + survived + timeouts
    score = killed / judged if judged else None

    return CampaignResult(
        circuit_name=circuit_name,
        num_qubits=circuit.num_qubits,
        operators=operators,
        mutants=len(mutants),
        killed=killed,
        survived=survived,
        timeout=timeouts,
        errors=errors,
        score=score,
        per_operator={op: tuple(v) for op, v in per_operator.items()},
        verdicts=tuple(verdicts),
        report=report,
    )
