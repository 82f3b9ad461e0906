"""Independent naive simulator used as the test oracle.

Every gate becomes an explicit 2^n x 2^n matrix built from Kronecker products
and a basis permutation; states evolve by full matrix-vector products.  The
gate matrices are written out here from first principles and shared with
nothing in the package, so an agreement between this path and the package's
stride kernels checks both.
"""
from __future__ import annotations

import math

import numpy as np

from qcover.ir import Circuit, GateKind, Probe

_S2 = 1.0 / math.sqrt(2.0)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = _S2 * np.array([[1, 1], [1, -1]], dtype=complex)
S = np.array([[1, 0], [0, 1j]], dtype=complex)
SDG = np.array([[1, 0], [0, -1j]], dtype=complex)
T = np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex)
TDG = np.array([[1, 0], [0, np.exp(-1j * math.pi / 4)]], dtype=complex)
SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]],
                dtype=complex)
DCX = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0]],
               dtype=complex)
ECR = _S2 * np.array([[0, 1, 0, 1j], [1, 0, -1j, 0],
                      [0, 1j, 0, 1], [-1j, 0, 1, 0]], dtype=complex)
RCCX = np.eye(8, dtype=complex)
RCCX[3, 3] = RCCX[7, 7] = 0
RCCX[7, 3] = 1j
RCCX[3, 7] = -1j
RCCX[5, 5] = -1
RCCCX = np.eye(16, dtype=complex)
RCCCX[3, 3] = 1j
RCCCX[11, 11] = -1j
RCCCX[7, 7] = RCCCX[15, 15] = 0
RCCCX[15, 7] = -1
RCCCX[7, 15] = 1


def u3(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -np.exp(1j * lam) * s],
                     [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]],
                    dtype=complex)


def phase(lam: float) -> np.ndarray:
    return np.array([[1, 0], [0, np.exp(1j * lam)]], dtype=complex)


def rx(t: float) -> np.ndarray:
    return np.array([[math.cos(t / 2), -1j * math.sin(t / 2)],
                     [-1j * math.sin(t / 2), math.cos(t / 2)]], dtype=complex)


def ry(t: float) -> np.ndarray:
    return np.array([[math.cos(t / 2), -math.sin(t / 2)],
                     [math.sin(t / 2), math.cos(t / 2)]], dtype=complex)


def rz(t: float) -> np.ndarray:
    return np.array([[np.exp(-1j * t / 2), 0], [0, np.exp(1j * t / 2)]],
                    dtype=complex)


def add_control(base: np.ndarray) -> np.ndarray:
    """Controlled-U built from projector sums: |0><0| (x) I + |1><1| (x) U.

    The new control is operand 0, i.e. the LOW bit in little-endian operand
    indexing, hence the kron order with the projector on the right.
    """
    dim = base.shape[0]
    p0 = np.array([[1, 0], [0, 0]], dtype=complex)
    p1 = np.array([[0, 0], [0, 1]], dtype=complex)
    return np.kron(np.eye(dim, dtype=complex), p0) + np.kron(base, p1)


def gate_matrix(kind: GateKind, params: tuple[float, ...]) -> np.ndarray:
    fixed = {
        GateKind.ID: I2, GateKind.H: H, GateKind.X: X, GateKind.Y: Y,
        GateKind.Z: Z, GateKind.S: S, GateKind.SDG: SDG, GateKind.T: T,
        GateKind.TDG: TDG, GateKind.SX: SX, GateKind.SWAP: SWAP,
        GateKind.CX: add_control(X), GateKind.CY: add_control(Y),
        GateKind.CZ: add_control(Z), GateKind.CH: add_control(H),
        GateKind.CSX: add_control(SX), GateKind.CS: add_control(S),
        GateKind.CSDG: add_control(SDG),
        GateKind.CCX: add_control(add_control(X)),
        GateKind.CCZ: add_control(add_control(Z)),
        GateKind.C3SX: add_control(add_control(add_control(SX))),
        GateKind.CSWAP: add_control(SWAP),
        GateKind.RCCX: RCCX, GateKind.RCCCX: RCCCX,
        GateKind.DCX: DCX, GateKind.ECR: ECR,
    }
    if kind in fixed:
        return fixed[kind]
    if kind is GateKind.U:
        return u3(*params)
    if kind is GateKind.P:
        return phase(*params)
    if kind is GateKind.RX:
        return rx(*params)
    if kind is GateKind.RY:
        return ry(*params)
    if kind is GateKind.RZ:
        return rz(*params)
    if kind is GateKind.CRX:
        return add_control(rx(*params))
    if kind is GateKind.CRY:
        return add_control(ry(*params))
    if kind is GateKind.CRZ:
        return add_control(rz(*params))
    if kind in (GateKind.CP, GateKind.CU1):
        return add_control(phase(*params))
    if kind is GateKind.CU3:
        return add_control(u3(*params))
    if kind is GateKind.CU:
        return add_control(np.exp(1j * params[3]) * u3(*params[:3]))
    raise ValueError(f"oracle has no matrix for {kind}")


def permutation_to_low(qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Permutation matrix sending qubit qubits[i] to position i, rest above."""
    order = list(qubits) + [q for q in range(n) if q not in qubits]
    dim = 1 << n
    perm = np.zeros((dim, dim), dtype=complex)
    for src in range(dim):
        dst = 0
        for new_pos, old_pos in enumerate(order):
            dst |= ((src >> old_pos) & 1) << new_pos
        perm[dst, src] = 1.0
    return perm


def full_matrix(kind: GateKind, params: tuple[float, ...],
                qubits: tuple[int, ...], n: int) -> np.ndarray:
    base = gate_matrix(kind, params)
    k = len(qubits)
    wide = np.kron(np.eye(1 << (n - k), dtype=complex), base)
    perm = permutation_to_low(qubits, n)
    return perm.conj().T @ wide @ perm


def marginal(state: np.ndarray, qubit: int, n: int) -> tuple[float, float]:
    p1 = 0.0
    for idx, amp in enumerate(state):
        if (idx >> qubit) & 1:
            p1 += abs(amp) ** 2
    total = float(np.sum(np.abs(state) ** 2))
    return total - p1, p1


def simulate(circuit: Circuit) -> tuple[np.ndarray, dict[str, object]]:
    """Run a circuit by full matrix products.  Measurements are skipped
    (pre-measurement state), probes are evaluated from the state."""
    n = circuit.num_qubits
    state = np.zeros(1 << n, dtype=complex)
    state[0] = 1.0
    log: dict[str, object] = {}
    for instr in circuit.instructions:
        if isinstance(instr, Probe):
            p0, p1 = marginal(state, instr.qubit, n)
            log[instr.label] = (p0 - p1) if instr.mode == "expectation" else (p0, p1)
            continue
        if instr.kind in (GateKind.MEASURE, GateKind.BARRIER, GateKind.ID):
            continue
        state = full_matrix(instr.kind, instr.params, instr.qubits, n) @ state
    return state, log


def circuit_unitary(ops: list[tuple[GateKind, tuple[float, ...], tuple[int, ...]]],
                    n: int) -> np.ndarray:
    out = np.eye(1 << n, dtype=complex)
    for kind, params, qubits in ops:
        out = full_matrix(kind, params, qubits, n) @ out
    return out


def phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Max-norm distance after global phase alignment."""
    tr = np.trace(b.conj().T @ a)
    if abs(tr) < 1e-12:
        return float(np.max(np.abs(a - b)))
    return float(np.max(np.abs(a * (abs(tr) / tr) - b)))
