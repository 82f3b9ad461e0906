"""
Classifies probe values into exercised outcomes and computes the coverage
metrics: condition, decision, and path coverage, each with a fairness index
and a probabilistic variant.

A controlled gate behaves like a branch: its operation runs on the |1>
component of the controls and is skipped on the |0> component.  The control
qubit's Z expectation tells which outcomes a run exercised: -1 means only the
triggered branch, +1 only the skipped branch, anything in between both.

Structural metrics (percent):
    decision  = exercised outcomes over original controlled gates
    condition = exercised outcomes over the decomposed cx gates
    path      = exercised outcome combinations over all cx conditions

Each structural metric is paired with a balance index (Jain fairness of the
branch probabilities: (sum x)^2 / (n * sum x^2)) and a probabilistic variant,
the product of the metric with its index.  The index equals 1 exactly when
every branch pair is (0.5, 0.5) and drops toward 0 as exercise skews.

Path quantities are products over every condition, so they are accumulated in
log2 space; denominators like 2^(number of conditions) overflow any float
long before a circuit becomes unusual.  Underflow clamps to 0.

Fully sequential circuits (no controlled gates) report 100 on all nine
metrics: there is no branch left unexercised.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .instrument import probe_plan
from .simulator import ProbeLog
from .transpiler import TranspiledCircuit

DEFAULT_EPSILON = 1e-9


class AnalysisError(Exception):
    pass


@dataclass(frozen=True)
class ConditionOutcome:
    """Outcome record for one decomposed cx condition."""

    origin_gate_id: int
    cx_index: int
    true_hit: int
    false_hit: int
    ptrue: float
    pfalse: float


@dataclass(frozen=True)
class DecisionOutcome:
    """Outcome record for one original controlled gate."""

    origin_gate_id: int
    true_hit: int
    false_hit: int
    ptrue: float
    pfalse: float
    controls: tuple[float, ...]  # per-control expectation values


@dataclass(frozen=True)
class CoverageReport:
    circuit: str
    num_qubits: int
    controlled_gates: int    # M
    cx_conditions: int       # sum over gates of |C(g')|
    control_qubits: int      # sum over gates of |L(g)|
    condition: float
    decision: float
    path: float
    jain_condition: float
    jain_decision: float
    jain_path: float
    prob_condition: float
    prob_decision: float
    prob_path: float
    per_gate: tuple[DecisionOutcome, ...] = ()
    per_cx: tuple[ConditionOutcome, ...] = ()

    def metric(self, family: str, name: str) -> float:
        key = {"coverage": "", "jain": "jain_", "probabilistic": "prob_"}[family]
        return getattr(self, key + name)

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "circuit": self.circuit,
            "num_qubits": self.num_qubits,
            "controlled_gates": self.controlled_gates,
            "cx_conditions": self.cx_conditions,
            "control_qubits": self.control_qubits,
            "coverage": {"condition": self.condition, "decision": self.decision,
                         "path": self.path},
            "jain": {"condition": self.jain_condition, "decision": self.jain_decision,
                     "path": self.jain_path},
            "probabilistic": {"condition": self.prob_condition,
                              "decision": self.prob_decision,
                              "path": self.prob_path},
            "per_gate": [
                {"origin": g.origin_gate_id, "true": g.true_hit, "false": g.false_hit,
                 "ptrue": g.ptrue, "pfalse": g.pfalse,
                 "controls": list(g.controls)}
                for g in self.per_gate
            ],
            "per_cx": [
                {"origin": c.origin_gate_id, "cx_index": c.cx_index,
                 "true": c.true_hit, "false": c.false_hit,
                 "ptrue": c.ptrue, "pfalse": c.pfalse}
                for c in self.per_cx
            ],
        }


def jain_index(values: list[float]) -> float:
    """Fairness of an allocation: (sum x)^2 / (n * sum x^2), in [0, 1]."""
    if not values:
        raise ValueError("jain_index needs at least one value")
    if any(v < 0 for v in values):
        raise ValueError("jain_index values must be non-negative")
    square_sum = sum(v * v for v in values)
    if square_sum == 0.0:
        raise ValueError("jain_index values must not all be zero")
    total = sum(values)
    return (total * total) / (len(values) * square_sum)


def classify_condition(expectation: float, probs: tuple[float, float],
                       epsilon: float = DEFAULT_EPSILON) -> tuple[int, int, float, float]:
    """Hit pattern and branch probabilities for one cx condition.

    Returns (true_hit, false_hit, ptrue, pfalse).  ptrue is the probability
    of the control being |1> (the branch that triggers the gate).
    """
    if not -1.0 - epsilon <= expectation <= 1.0 + epsilon:
        raise AnalysisError(f"expectation {expectation} outside [-1, 1]")
    p0, p1 = probs
    if expectation <= -1.0 + epsilon:
        hits = (1, 0)
    elif expectation >= 1.0 - epsilon:
        hits = (0, 1)
    else:
        hits = (1, 1)
    return hits[0], hits[1], p1, p0


def classify_decision(expectations: list[float],
                      probs: list[tuple[float, float]],
                      epsilon: float = DEFAULT_EPSILON) -> tuple[int, int, float, float]:
    """Hit pattern and summed branch probabilities over all control qubits.

    The triggered branch needs every control certainly |1>; one control
    certainly |0> forces the skipped branch; anything else exercises both.
    """
    if not expectations:
        raise AnalysisError("decision classification needs at least one control")
    for e in expectations:
        if not -1.0 - epsilon <= e <= 1.0 + epsilon:
            raise AnalysisError(f"expectation {e} outside [-1, 1]")
    if all(e <= -1.0 + epsilon for e in expectations):
        hits = (1, 0)
    elif any(e >= 1.0 - epsilon for e in expectations):
        hits = (0, 1)
    else:
        hits = (1, 1)
    ptrue = sum(p1 for _, p1 in probs)
    pfalse = sum(p0 for p0, _ in probs)
    return hits[0], hits[1], ptrue, pfalse


def _lookup(log: ProbeLog, label: str):
    try:
        return log[label]
    except KeyError:
        raise AnalysisError(f"probe label {label!r} missing from log") from None


def analyze(log: ProbeLog, t: TranspiledCircuit, *,
            epsilon: float = DEFAULT_EPSILON, circuit_name: str = "") -> CoverageReport:
    """Compute the full report from a probe log and transpilation provenance."""
    if not 0.0 < epsilon < 0.5:
        raise AnalysisError("epsilon must lie in (0, 0.5)")
    plan = probe_plan(t)
    per_gate: list[DecisionOutcome] = []
    per_cx: list[ConditionOutcome] = []

    for origin_set in plan:
        for pt in origin_set.cx_points:
            expectation = _lookup(log, pt.value_label)
            probs = _lookup(log, pt.prob_label)
            th, fh, ptrue, pfalse = classify_condition(expectation, probs, epsilon)
            per_cx.append(ConditionOutcome(origin_set.origin, pt.cx_index,
                                           th, fh, ptrue, pfalse))
        expectations = [_lookup(log, dp.value_label) for dp in origin_set.decision_points]
        probs_list = [_lookup(log, dp.prob_label) for dp in origin_set.decision_points]
        th, fh, ptrue, pfalse = classify_decision(expectations, probs_list, epsilon)
        per_gate.append(DecisionOutcome(origin_set.origin, th, fh, ptrue, pfalse,
                                        tuple(expectations)))

    num_gates = len(per_gate)
    num_cx = len(per_cx)
    num_controls = sum(len(s.controls) for s in plan)

    if num_gates == 0:
        hundred = 100.0
        return CoverageReport(circuit_name, t.circuit.num_qubits, 0, 0, 0,
                              hundred, hundred, hundred, hundred, hundred,
                              hundred, hundred, hundred, hundred)

    decision_cov = 100.0 * sum(g.true_hit + g.false_hit for g in per_gate) / (2 * num_gates)
    condition_cov = 100.0 * sum(c.true_hit + c.false_hit for c in per_cx) / (2 * num_cx)
    # every factor is 1 or 2, so the product is 2^(number of both-hit cx)
    both = sum(1 for c in per_cx if c.true_hit and c.false_hit)
    path_cov = 100.0 * 2.0 ** (both - num_cx)

    decision_sq = sum(g.ptrue ** 2 + g.pfalse ** 2 for g in per_gate)
    jain_decision = 100.0 * num_controls ** 2 / (2 * num_gates * decision_sq)
    condition_sq = sum(c.ptrue ** 2 + c.pfalse ** 2 for c in per_cx)
    jain_condition = 100.0 * num_cx ** 2 / (2 * num_cx * condition_sq)
    # product of per-cx (ptrue^2 + pfalse^2) underflows for big circuits
    log2_product = sum(math.log2(c.ptrue ** 2 + c.pfalse ** 2) for c in per_cx)
    jain_path = 100.0 * 2.0 ** (-(num_cx + log2_product))
    # probe rounding can push an index a few ulp past 100; keep the contract
    jain_decision = min(jain_decision, 100.0)
    jain_condition = min(jain_condition, 100.0)
    jain_path = min(jain_path, 100.0)

    return CoverageReport(
        circuit=circuit_name,
        num_qubits=t.circuit.num_qubits,
        controlled_gates=num_gates,
        cx_conditions=num_cx,
        control_qubits=num_controls,
        condition=condition_cov,
        decision=decision_cov,
        path=path_cov,
        jain_condition=jain_condition,
        jain_decision=jain_decision,
        jain_path=jain_path,
        prob_condition=condition_cov * jain_condition / 100.0,
        prob_decision=decision_cov * jain_decision / 100.0,
        prob_path=path_cov * jain_path / 100.0,
        per_gate=tuple(per_gate),
        per_cx=tuple(per_cx),
    )
