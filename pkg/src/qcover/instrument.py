"""
Probe insertion for transpiled circuits.

Two probes (expectation value and Z-basis probability pair) go on the control
qubit of every tracked cx, immediately after it, and two more per control
qubit of every origin gate at the end of that gate's expansion block.  Labels
follow the scheme

    <kind>_<gi>_cx_<j>_value / _probability      condition level
    <kind>_<gi>_value_<k> / _probability_<k>     decision level

where gi is the 1-based ordinal of the origin among same-kind origins in
program order, j the cx ordinal within the origin's expansion, and k the
control-qubit ordinal.  A bare cx is probed at both levels: it is a one-cx
expansion of itself, so its condition and decision values coincide.
"""
from __future__ import annotations

from dataclasses import dataclass

from .ir import Circuit, GateInstruction, GateKind, Probe, ProbeProvenance
from .transpiler import TranspiledCircuit


@dataclass(frozen=True)
class CxProbePoint:
    """Planned condition-level probe pair for one decomposed cx."""

    cx_index: int
    position: int          # index of the cx in the transpiled instruction list
    control_qubit: int
    value_label: str
    prob_label: str


@dataclass(frozen=True)
class DecisionProbePoint:
    """Planned decision-level probe pair for one control qubit."""

    control_index: int
    qubit: int
    value_label: str
    prob_label: str


@dataclass(frozen=True)
class OriginProbeSet:
    """All probe points belonging to one origin controlled gate."""

    origin: int
    kind: GateKind
    ordinal: int           # gi, per-kind program-order ordinal
    controls: tuple[int, ...]
    block_end: int
    cx_points: tuple[CxProbePoint, ...]
    decision_points: tuple[DecisionProbePoint, ...]


def probe_plan(t: TranspiledCircuit) -> list[OriginProbeSet]:
    """Deterministic probe layout for a transpiled circuit.

    Shared by instrument() and the coverage analyzer so the label scheme has
    a single source of truth.
    """
    position_of = {instr.id: pos for pos, instr in enumerate(t.circuit.instructions)}
    per_origin_cx: dict[int, list[tuple[int, int]]] = {o: [] for o in t.origin_controls}
    for cx_id, (origin, j) in t.cx_provenance.items():
        if origin in per_origin_cx:
            per_origin_cx[origin].append((j, cx_id))

    plan: list[OriginProbeSet] = []
    kind_counts: dict[GateKind, int] = {}
    for origin, controls in t.origin_controls.items():
        kind = t.origin_kinds[origin]
        gi = kind_counts.get(kind, 0) + 1
        kind_counts[kind] = gi
        name = kind.value

        cx_points = []
        for j, cx_id in sorted(per_origin_cx[origin]):
            pos = position_of[cx_id]
            instr = t.circuit.instructions[pos]
            cx_points.append(CxProbePoint(
                cx_index=j,
                position=pos,
                control_qubit=instr.qubits[0],
                value_label=f"{name}_{gi}_cx_{j}_value",
                prob_label=f"{name}_{gi}_cx_{j}_probability",
            ))

        decision_points = tuple(
            DecisionProbePoint(
                control_index=k,
                qubit=q,
                value_label=f"{name}_{gi}_value_{k}",
                prob_label=f"{name}_{gi}_probability_{k}",
            )
            for k, q in enumerate(controls, start=1)
        )
        plan.append(OriginProbeSet(origin, kind, gi, controls,
                                   t.block_end[origin], tuple(cx_points),
                                   decision_points))
    return plan


def instrument(t: TranspiledCircuit) -> Circuit:
    """Insert probes into a transpiled circuit.

    Gate instructions keep their ids and order; probes get fresh ids.  The
    result satisfies: strip_probes(instrument(t)) == t.circuit.
    """
    plan = probe_plan(t)
    condition_at: dict[int, list[tuple[str, str, int]]] = {}
    decision_after: dict[int, list[DecisionProbePoint]] = {}
    for origin_set in plan:
        for pt in origin_set.cx_points:
            condition_at.setdefault(pt.position, []).append(
                (pt.value_label, pt.prob_label, pt.control_qubit))
        if origin_set.decision_points:
            decision_after.setdefault(origin_set.block_end - 1, []).extend(
                origin_set.decision_points)

    prov_by_label: dict[str, ProbeProvenance] = {}
    for origin_set in plan:
        for pt in origin_set.cx_points:
            prov = ProbeProvenance(origin_set.origin, "condition", cx_index=pt.cx_index)
            prov_by_label[pt.value_label] = prov
            prov_by_label[pt.prob_label] = prov
        for dp in origin_set.decision_points:
            prov = ProbeProvenance(origin_set.origin, "decision",
                                   control_index=dp.control_index)
            prov_by_label[dp.value_label] = prov
            prov_by_label[dp.prob_label] = prov

    out: list = []
    next_id = len(t.circuit.instructions)

    def emit_probe(mode: str, qubit: int, label: str) -> None:
        nonlocal next_id
        out.append(Probe(next_id, mode, qubit, label, prov_by_label[label]))
        next_id += 1

    for pos, instr in enumerate(t.circuit.instructions):
        out.append(instr)
        for value_label, prob_label, qubit in condition_at.get(pos, ()):
            emit_probe("expectation", qubit, value_label)
            emit_probe("probabilities", qubit, prob_label)
        for dp in decision_after.get(pos, ()):
            emit_probe("expectation", dp.qubit, dp.value_label)
            emit_probe("probabilities", dp.qubit, dp.prob_label)

    return Circuit(t.circuit.num_qubits, t.circuit.num_clbits, tuple(out))


def strip_probes(circuit: Circuit) -> Circuit:
    """Remove every probe, leaving gate instructions untouched."""
    kept = tuple(i for i in circuit.instructions if isinstance(i, GateInstruction))
    return Circuit(circuit.num_qubits, circuit.num_clbits, kept)


def render(circuit: Circuit) -> str:
    """Pretty-print an instrumented circuit, probes as comment lines."""
    lines = []
    for instr in circuit.instructions:
        if isinstance(instr, Probe):
            lines.append(f"// probe {instr.mode} q[{instr.qubit}] label={instr.label}")
            continue
        if instr.kind is GateKind.MEASURE:
            lines.append(f"measure q[{instr.qubits[0]}] -> c[{instr.clbits[0]}];")
            continue
        name = instr.kind.value
        if instr.params:
            name += "(" + ",".join(repr(v) for v in instr.params) + ")"
        lines.append(f"{name} " + ",".join(f"q[{q}]" for q in instr.qubits) + ";")
    return "\n".join(lines) + "\n"
