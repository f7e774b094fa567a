"""Independent dense-matrix and statevector oracles used by the tests."""

from __future__ import annotations

import math
from functools import reduce

import numpy as np

from gsedetect.circuits import Circuit

I2 = np.eye(2, dtype=complex)
MATS = {
    "I": I2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
HAD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def dense(label: str, sign: complex = 1) -> np.ndarray:
    """Kronecker product of the label letters, qubit 0 leftmost."""
    return sign * reduce(np.kron, [MATS[c] for c in label])


def dense_op(p) -> np.ndarray:
    return dense(p.label(), p.sign)


def _embed(n: int, ops: dict) -> np.ndarray:
    return reduce(np.kron, [ops.get(q, I2) for q in range(n)])


def gate_matrix(g, n: int, angles: dict) -> np.ndarray | None:
    """Unitary of one gate on ``n`` qubits; None for PREP and MZ."""
    if g.kind == "CP":
        (a, b), (p, r) = g.qubits, g.paulis
        pa = _embed(n, {a: MATS[p]})
        rb = _embed(n, {b: MATS[r]})
        one = np.eye(2 ** n)
        return (one + pa) / 2 + (one - pa) / 2 @ rb
    if g.kind == "H":
        return _embed(n, {g.qubits[0]: HAD})
    if g.kind == "SWAP":
        a, b = g.qubits
        return sum(_embed(n, {a: MATS[c], b: MATS[c]}) for c in "IXYZ") / 2
    if g.kind in ("EV1", "EV2"):
        t = eval(g.param, {"__builtins__": {}}, {"pi": math.pi, **angles})
        p = _embed(n, {q: MATS[c] for q, c in zip(g.qubits, g.paulis)})
        return math.cos(t) * np.eye(2 ** n) - 1j * math.sin(t) * p
    return None


def prob_one(state: np.ndarray, q: int, n: int) -> float:
    psi = state.reshape([2] * n)
    return float(np.sum(np.abs(np.take(psi, 1, axis=q)) ** 2))


def run_statevector(circuit: Circuit, state: np.ndarray, angles=None, qubits=None) -> np.ndarray:
    """Apply ``circuit`` restricted to ``qubits`` (relabelled 0..k-1) to ``state``.

    PREP and MZ must act deterministically on ``|0>``; otherwise an
    AssertionError is raised.
    """
    angles = angles or {}
    qubits = list(qubits) if qubits is not None else list(range(circuit.n_qubits))
    pos = {q: i for i, q in enumerate(qubits)}
    n = len(qubits)
    for g in circuit.gates:
        local = g.relabel(pos)
        u = gate_matrix(local, n, angles)
        if u is None:
            p1 = prob_one(state, local.qubits[0], n)
            assert p1 < 1e-9, f"{g.kind} on qubit {g.qubits[0]} is not deterministic ({p1})"
            continue
        state = u @ state
    return state


def used_qubits(circuit: Circuit) -> list[int]:
    return sorted({q for g in circuit.gates for q in g.qubits})


def random_state(n: int, rng) -> np.ndarray:
    v = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return v / np.linalg.norm(v)


def ancilla_zero_state(data_state: np.ndarray, n_data: int, n_anc: int) -> np.ndarray:
    zero = np.zeros(2 ** n_anc)
    zero[0] = 1
    return np.kron(data_state, zero)
