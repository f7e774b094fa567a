"""Gate-level circuit representation, text serialization and cost counting.

The gate vocabulary is deliberately small:

========  =====================================================
``PREP``  reset a qubit to ``|0>``
``CP``    Pauli-controlled Pauli: apply ``R`` on ``b`` when ``P`` on ``a`` is -1
``H``     Hadamard
``SWAP``  exchange two qubits
``EV1``   ``exp(-i P t)`` on one qubit
``EV2``   ``exp(-i P (x) P' t)`` on two qubits (hardware-native)
``MZ``    Z-basis measurement
========  =====================================================

Angles are kept symbolic (strings); nothing here evaluates them.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

KINDS = ("PREP", "CP", "H", "SWAP", "EV1", "EV2", "MZ")
TWO_QUBIT = frozenset({"CP", "SWAP", "EV2"})
_ARITY = {"PREP": 1, "CP": 2, "H": 1, "SWAP": 2, "EV1": 1, "EV2": 2, "MZ": 1}
_NPAULI = {"PREP": 0, "CP": 2, "H": 0, "SWAP": 0, "EV1": 1, "EV2": 2, "MZ": 0}


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    """One gate. ``paulis`` are single-letter Paulis aligned with ``qubits``."""

    kind: str
    qubits: tuple
    paulis: tuple = ()
    param: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != _ARITY[self.kind]:
            raise CircuitError(f"{self.kind} acts on {_ARITY[self.kind]} qubit(s)")
        if len(self.paulis) != _NPAULI[self.kind] or any(p not in "XYZ" for p in self.paulis):
            raise CircuitError(f"bad Pauli arguments {self.paulis} for {self.kind}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError("repeated qubit in gate")
        if self.kind in ("EV1", "EV2") and not self.param:
            raise CircuitError("evolution gates need an angle")

    @property
    def two_qubit(self) -> bool:
        return self.kind in TWO_QUBIT

    def relabel(self, mapping) -> Gate:
        return replace(self, qubits=tuple(mapping[q] for q in self.qubits))


# convenience constructors

def prep(q):
    return Gate("PREP", (q,))


def cp(p, a, r, b):
    """``p``-controlled ``r`` with control qubit ``a`` and target ``b``."""
    return Gate("CP", (a, b), (p, r))


def had(q):
    return Gate("H", (q,))


def swap(a, b):
    return Gate("SWAP", (a, b))


def ev1(p, q, t="t"):
    return Gate("EV1", (q,), (p,), t)


def ev2(p, a, r, b, t="t"):
    return Gate("EV2", (a, b), (p, r), t)


def mz(q):
    return Gate("MZ", (q,))


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over a register of ``n_qubits``.

    The first ``n_data`` qubits are data qubits; the rest are ancillas.

    Attributes:
        connectivity: ``"full"`` or ``"reduced"``.
        meta: free-form metadata (role, evolved operator, flag qubit, ...).
    """

    n_qubits: int
    n_data: int
    gates: tuple = ()
    connectivity: str = "full"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.n_qubits:
                    raise CircuitError(f"qubit {q} outside register of {self.n_qubits}")

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def with_gates(self, gates, **meta) -> Circuit:
        return Circuit(self.n_qubits, self.n_data, tuple(gates), self.connectivity,
                       {**self.meta, **meta})

    def measured_qubits(self) -> list[int]:
        return [g.qubits[0] for g in self.gates if g.kind == "MZ"]

    def qubit_name(self, q: int) -> str:
        return f"q{q}" if q < self.n_data else f"a{q - self.n_data}"

    def to_text(self) -> str:
        lines = [f"# qubits={self.n_qubits} data={self.n_data} connectivity={self.connectivity}"]
        for g in self.gates:
            names = [self.qubit_name(q) for q in g.qubits]
            if g.kind == "CP":
                lines.append(f"CP {g.paulis[0]} {names[0]} {g.paulis[1]} {names[1]}")
            elif g.kind == "EV1":
                lines.append(f"EV1 {g.paulis[0]} {names[0]} {g.param}")
            elif g.kind == "EV2":
                lines.append(f"EV2 {g.paulis[0]} {g.paulis[1]} {names[0]} {names[1]} {g.param}")
            else:
                lines.append(" ".join([g.kind, *names]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Circuit:
        header = None
        gates = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if header is None:
                    header = dict(tok.split("=", 1) for tok in line[1:].split() if "=" in tok)
                continue
            if header is None:
                raise CircuitError("missing header line")
            n_data = int(header["data"])
            tok = line.split()

            def q(name):
                idx = int(name[1:])
                return idx if name[0] == "q" else n_data + idx

            kind = tok[0]
            if kind == "CP":
                gates.append(cp(tok[1], q(tok[2]), tok[3], q(tok[4])))
            elif kind == "EV1":
                gates.append(ev1(tok[1], q(tok[2]), tok[3]))
            elif kind == "EV2":
                gates.append(ev2(tok[1], q(tok[3]), tok[2], q(tok[4]), tok[5]))
            elif kind in KINDS:
                gates.append(Gate(kind, tuple(q(t) for t in tok[1:])))
            else:
                raise CircuitError(f"cannot parse line {raw!r}")
        if header is None:
            raise CircuitError("empty circuit text")
        return cls(int(header["qubits"]), int(header["data"]), tuple(gates),
                   header.get("connectivity", "full"))


def concat(circuits: Sequence[Circuit], **meta) -> Circuit:
    first = circuits[0]
    gates = [g for c in circuits for g in c.gates]
    return Circuit(first.n_qubits, first.n_data, tuple(gates), first.connectivity, meta)


SWAP_STYLES = {"cnot": ("Z", "X"), "cyz": ("Y", "Z")}


def expand_swaps(circuit: Circuit, style: str = "cnot") -> Circuit:
    """Replace every SWAP by three alternating controlled-Pauli gates.

    Args:
        style: ``"cnot"`` uses ``CP(Z;X)`` (CNOTs); ``"cyz"`` uses ``CP(Y;Z)``.
            Both equal SWAP exactly.
    """
    if style not in SWAP_STYLES:
        raise CircuitError(f"unknown swap style {style!r}")
    p, r = SWAP_STYLES[style]
    gates = []
    for g in circuit.gates:
        if g.kind == "SWAP":
            a, b = g.qubits
            gates += [cp(p, a, r, b), cp(p, b, r, a), cp(p, a, r, b)]
        else:
            gates.append(g)
    return circuit.with_gates(gates)


def asap_layers(gates: Iterable[Gate], two_qubit_only: bool = True) -> list[int]:
    """Greedy as-soon-as-possible layer index (1-based) per gate.

    Gates sharing a qubit keep their list order. When ``two_qubit_only`` is
    set, single-qubit gates get layer 0 and do not advance any qubit.
    """
    ready: dict[int, int] = {}
    out = []
    for g in gates:
        if two_qubit_only and not g.two_qubit:
            out.append(0)
            continue
        layer = 1 + max((ready.get(q, 0) for q in g.qubits), default=0)
        for q in g.qubits:
            ready[q] = layer
        out.append(layer)
    return out


def depth(circuit: Circuit | Iterable[Gate], two_qubit_only: bool = True) -> int:
    gates = circuit.gates if isinstance(circuit, Circuit) else circuit
    return max(asap_layers(gates, two_qubit_only), default=0)


def count_resources(circuit: Circuit, swap_cost: str = "unit") -> dict:
    """Two-qubit gate count, two-qubit ASAP depth and measurement count.

    Args:
        swap_cost: ``"unit"`` counts a SWAP as one gate, ``"expanded"`` as
            three CNOTs (depth is then measured on the expanded circuit).
    """
    if swap_cost not in ("unit", "expanded"):
        raise CircuitError(f"swap_cost must be 'unit' or 'expanded', not {swap_cost!r}")
    if swap_cost == "expanded":
        circuit = expand_swaps(circuit)
    gates = circuit.gates
    return {
        "two_qubit_gates": sum(g.two_qubit for g in gates),
        "depth": depth(gates),
        "measurements": sum(g.kind == "MZ" for g in gates),
        "single_qubit_gates": sum(g.kind in ("H", "EV1") for g in gates),
        "swaps": sum(g.kind == "SWAP" for g in gates),
    }


def _letters(g: Gate) -> dict | None:
    """Per-qubit Pauli letters of a Pauli-built gate, None for opaque gates."""
    if g.kind in ("CP", "EV1", "EV2"):
        return dict(zip(g.qubits, g.paulis))
    return None


def gates_commute(g: Gate, h: Gate) -> bool:
    """Sufficient test: disjoint, or Pauli-built with commuting letters on every shared qubit."""
    shared = set(g.qubits) & set(h.qubits)
    if not shared:
        return True
    lg, lh = _letters(g), _letters(h)
    if lg is None or lh is None:
        return False
    return all(lg[q] == lh[q] for q in shared)


def compact(circuit: Circuit) -> Circuit:
    """Reorder gates into fewer two-qubit layers without changing the circuit.

    Only pairs passing :func:`gates_commute` are ever swapped, so the output
    is a linear extension of the non-commutation order of the input. Layers
    are filled greedily, longest remaining chain first; single-qubit gates
    are emitted as soon as their predecessors are.
    """
    gates = list(circuit.gates)
    n = len(gates)
    preds: list[set] = [set() for _ in range(n)]
    by_qubit: dict[int, list[int]] = {}
    for j, g in enumerate(gates):
        for q in g.qubits:
            for i in by_qubit.get(q, ()):
                if not gates_commute(gates[i], g):
                    preds[j].add(i)
            by_qubit.setdefault(q, []).append(j)
    succs: list[list[int]] = [[] for _ in range(n)]
    for j in range(n):
        for i in preds[j]:
            succs[i].append(j)
    chain = [0] * n
    for i in reversed(range(n)):
        chain[i] = int(gates[i].two_qubit) + max((chain[j] for j in succs[i]), default=0)
    waiting = [len(p) for p in preds]
    ready = {i for i in range(n) if not waiting[i]}
    order: list[int] = []

    def emit(i):
        order.append(i)
        ready.discard(i)
        for j in succs[i]:
            waiting[j] -= 1
            if not waiting[j]:
                ready.add(j)

    while ready:
        singles = sorted(i for i in ready if not gates[i].two_qubit)
        if singles:
            for i in singles:
                emit(i)
            continue
        busy: set = set()
        for i in sorted(ready, key=lambda i: (-chain[i], i)):
            if busy.isdisjoint(gates[i].qubits):
                busy.update(gates[i].qubits)
                emit(i)
    if len(order) != n:
        raise CircuitError("dependency cycle while scheduling")
    return circuit.with_gates([gates[i] for i in order])
