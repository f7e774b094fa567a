"""Circuit builders: syndrome and B_j measurement, protected evolutions, the
HVA ansatz schedule and the composed zero-state / error-detected circuits.

All builders return :class:`~gsedetect.circuits.Circuit` objects over the
encoding's register (data qubits first, then one ancilla per measured loop).
Under ``"reduced"`` connectivity every two-qubit gate respects
:func:`reduced_adjacency`.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import networkx as nx

from .circuits import (Circuit, CircuitError, compact, concat, count_resources, cp, depth, ev1,
                       ev2, had, mz, prep, swap)
from .encoding import Encoding, enumerate_two_vertex_logicals
from .faults import EXCEPTION, UNDETECTABLE, enumerate_single_faults
from .lattice import Loop
from .pauli import PauliOp

FULL = "full"
REDUCED = "reduced"
_ANTI = {"X": ("Z", "Y"), "Y": ("X", "Z"), "Z": ("X", "Y")}


def _check_connectivity(connectivity: str):
    if connectivity not in (FULL, REDUCED):
        raise CircuitError(f"connectivity must be 'full' or 'reduced', not {connectivity!r}")


# -- layout and adjacency -------------------------------------------------------

def loop_data_qubits(enc: Encoding, loop: Loop) -> list[int]:
    """Data qubits of a loop in measurement order (corner by corner)."""
    verts = loop.corners if loop.kind == "square" else sorted(loop.corners)
    return [q for v in verts for q in enc.vertex_qubits(v)]


def ancilla_neighbors(enc: Encoding, loop: Loop) -> list[int]:
    """Data qubits wired to a loop's ancilla under reduced connectivity.

    A vertex's first qubit reaches the ancillas west of it, its second qubit
    the ancillas east of it.
    """
    g = enc.graph
    if loop.kind == "square":
        nw, ne, sw, se = loop.corners
        return [2 * nw + 1, 2 * ne, 2 * sw + 1, 2 * se]
    a, b = sorted(loop.corners)
    kind = g.edges[loop.steps[1][0]].kind
    if kind in ("doubled_top", "doubled_bottom"):
        return [2 * a + 1, 2 * b]
    if kind == "doubled_left":
        return [2 * a, 2 * b]
    return [2 * a + 1, 2 * b + 1]


@lru_cache(maxsize=32)
def _adjacency_cached(enc: Encoding) -> frozenset:
    pairs = set()
    for v in range(enc.graph.n_vertices):
        pairs.add(frozenset(enc.vertex_qubits(v)))
    for lp in enc.graph.measured_loops:
        anc = enc.ancilla(lp)
        for q in ancilla_neighbors(enc, lp):
            pairs.add(frozenset((q, anc)))
    return frozenset(pairs)


def reduced_adjacency(enc: Encoding) -> frozenset:
    """Allowed two-qubit interactions: intra-vertex pairs and ancilla arms."""
    return _adjacency_cached(enc)


def connectivity_violations(circuit: Circuit, enc: Encoding) -> list[int]:
    """Indices of two-qubit gates acting on a pair outside the reduced adjacency."""
    adj = reduced_adjacency(enc)
    return [i for i, g in enumerate(circuit.gates)
            if g.two_qubit and frozenset(g.qubits) not in adj]


def _new(enc: Encoding, gates, connectivity, **meta) -> Circuit:
    return Circuit(enc.n_qubits, enc.n_data, tuple(gates), connectivity, meta)


# -- syndrome measurement ---------------------------------------------------------

def syndrome_measurement_circuit(enc: Encoding, loop: Loop | int,
                                 connectivity: str = FULL) -> Circuit:
    """Measure one loop operator into its ancilla.

    One ``P``-controlled ``X`` per non-identity factor, corner by corner. Under
    reduced connectivity a factor sitting on a vertex qubit that is not wired
    to the ancilla is swapped onto its partner qubit and back.
    """
    _check_connectivity(connectivity)
    lp = enc.graph.loops[loop] if isinstance(loop, int) else loop
    if not lp.measured:
        raise CircuitError(f"loop {lp.index} has no ancilla")
    stab = enc.stabilizers[lp.index]
    anc = enc.ancilla(lp)
    near = set(ancilla_neighbors(enc, lp))
    gates = [prep(anc)]
    for q in loop_data_qubits(enc, lp):
        p = stab.symbol(q)
        if p == "I":
            continue
        if connectivity == FULL or q in near:
            gates.append(cp(p, q, "X", anc))
        else:
            mate = q ^ 1
            gates += [swap(q, mate), cp(p, mate, "X", anc), swap(q, mate)]
    gates.append(mz(anc))
    return _new(enc, gates, connectivity, role="syndrome", loop=lp.index, measured=stab)


def _merge_parallel(enc: Encoding, circuits, connectivity, **meta) -> Circuit:
    """Run gadgets back to back, then let :func:`compact` overlap them."""
    gates = [g for c in circuits for g in c.gates]
    return compact(_new(enc, gates, connectivity, **meta))


def syndrome_round(enc: Encoding, connectivity: str = FULL) -> Circuit:
    """All measured loops, interleaved gate by gate."""
    circs = [syndrome_measurement_circuit(enc, lp, connectivity)
             for lp in enc.graph.measured_loops]
    return _merge_parallel(enc, circs, connectivity, role="syndrome_round")


# -- B_j measurement ----------------------------------------------------------------

def _vertex_ancillas(enc: Encoding, v: int) -> list[tuple[int, int]]:
    """``(ancilla, adjacent vertex qubit)`` pairs available to vertex ``v``."""
    out = []
    qs = set(enc.vertex_qubits(v))
    for lp in enc.graph.measured_loops:
        for q in ancilla_neighbors(enc, lp):
            if q in qs:
                out.append((enc.ancilla(lp), q))
    return out


@lru_cache(maxsize=32)
def bj_ancilla_assignment(enc: Encoding) -> dict:
    """Distinct ancilla per vertex (maximum bipartite matching)."""
    g = nx.Graph()
    verts = [("v", v) for v in range(enc.graph.n_vertices)]
    g.add_nodes_from(verts, bipartite=0)
    for v in range(enc.graph.n_vertices):
        for anc, _ in _vertex_ancillas(enc, v):
            g.add_edge(("v", v), ("a", anc))
    match = nx.bipartite.hopcroft_karp_matching(g, top_nodes=verts)
    out = {}
    for v in range(enc.graph.n_vertices):
        if ("v", v) in match:
            out[v] = match[("v", v)][1]
        else:
            out[v] = _vertex_ancillas(enc, v)[0][0]
    return out


def bj_measurement_circuit(enc: Encoding, vertex: int, connectivity: str = FULL,
                           ancilla: int | None = None) -> Circuit:
    """Measure ``B_j`` (``ZY`` on the vertex pair) into an ancilla.

    Full connectivity uses two controlled gates; reduced connectivity routes
    the far qubit through a swap and back (four two-qubit gates).
    """
    _check_connectivity(connectivity)
    q0, q1 = enc.vertex_qubits(vertex)
    if ancilla is None:
        ancilla = bj_ancilla_assignment(enc)[vertex]
    b = enc.vertex_ops[vertex]
    p0, p1 = b.symbol(q0), b.symbol(q1)
    gates = [prep(ancilla)]
    if connectivity == FULL:
        gates += [cp(p0, q0, "X", ancilla), cp(p1, q1, "X", ancilla)]
    else:
        wired = [q for a, q in _vertex_ancillas(enc, vertex) if a == ancilla]
        if not wired:
            raise CircuitError(f"ancilla {ancilla} is not wired to vertex {vertex}")
        if wired[0] == q1:
            gates += [swap(q1, q0), cp(p0, q1, "X", ancilla), swap(q1, q0),
                      cp(p1, q1, "X", ancilla)]
        else:
            gates += [cp(p0, q0, "X", ancilla), swap(q0, q1), cp(p1, q0, "X", ancilla),
                      swap(q0, q1)]
    gates.append(mz(ancilla))
    return _new(enc, gates, connectivity, role="bj", vertex=vertex, measured=b)


def bj_round(enc: Encoding, connectivity: str = FULL) -> Circuit:
    circs = [bj_measurement_circuit(enc, v, connectivity) for v in range(enc.graph.n_vertices)]
    return _merge_parallel(enc, circs, connectivity, role="bj_round")


# -- protected evolution ----------------------------------------------------------

@dataclass(frozen=True)
class EvolutionPlan:
    """How to evolve ``exp(-i P t)`` for a one- or two-vertex logical ``P``.

    Attributes:
        qubits: support in conventional order (left or top vertex first).
        paulis: letters of ``P`` on ``qubits``.
        q_pauli: Pauli targeted by every controlled gate, anticommuting with
            ``P`` on the target strand.
        reflected: strands are processed in reverse order.
        flag: conventional (1-based) strand index carrying a flag, or None.
        orientation: ``"horizontal"``, ``"vertical"`` or ``"vertex"``.
        edge: edge index for two-vertex operators.
        flag_qubit: ancilla used for the flag.
    """

    qubits: tuple
    paulis: str
    q_pauli: str
    reflected: bool = False
    flag: int | None = None
    native_two_qubit: bool = True
    orientation: str = "vertex"
    edge: int | None = None
    flag_qubit: int | None = None
    evolved: PauliOp | None = field(default=None, compare=False)

    @property
    def strands(self) -> list[int]:
        """Nontrivial qubits in processing order."""
        order = list(self.qubits[::-1] if self.reflected else self.qubits)
        return [q for q in order if self.paulis[self.qubits.index(q)] != "I"]

    def pauli_on(self, q: int) -> str:
        return self.paulis[self.qubits.index(q)]

    def describe(self) -> str:
        bits = [self.paulis, f"Q={self.q_pauli}"]
        if self.reflected:
            bits.append("reflected")
        if self.flag:
            bits.append(f"flag={self.flag}")
        return " ".join(bits)


def _support_context(enc: Encoding, op: PauliOp):
    verts = sorted({q // 2 for q in op.qubits()})
    if len(verts) == 1:
        return "vertex", None, list(enc.vertex_qubits(verts[0]))
    if len(verts) != 2:
        raise CircuitError(f"operator {op} is not supported on one or two vertices")
    a, b = verts
    straight = [e for e in enc.graph.edges if {e.j, e.k} == {a, b} and not e.doubled]
    if not straight:
        raise CircuitError(f"vertices {a} and {b} are not adjacent")
    e = straight[0]
    orientation = "horizontal" if e.kind == "horizontal" else "vertical"
    return orientation, e.index, [*enc.vertex_qubits(e.j), *enc.vertex_qubits(e.k)]


def _flag_ancilla(enc: Encoding, edge: int | None, qubits) -> int:
    if edge is not None:
        loops = [lp for lp in enc.graph.loops if lp.measured and edge in lp.edges]
        if loops:
            return enc.ancilla(loops[0])
    v = qubits[0] // 2
    return _vertex_ancillas(enc, v)[0][0]


def _hub(enc: Encoding, plan: EvolutionPlan):
    """Routing path ``[far_j, near_j, hub, near_k, far_k]`` for an edge operator."""
    g = enc.graph
    e = g.edges[plan.edge]
    jq, kq = list(plan.qubits[:2]), list(plan.qubits[2:])
    cands = []
    for lp in g.measured_loops:
        if plan.edge not in lp.edges:
            continue
        nb = set(ancilla_neighbors(enc, lp))
        if nb & set(jq) and nb & set(kq):
            rj, cj = g.coords(e.j)
            # prefer the ancilla left of a vertical edge / above a horizontal one
            key = lp.col if plan.orientation == "vertical" else lp.row
            ref = cj if plan.orientation == "vertical" else rj
            cands.append((0 if key < ref else 1, lp.index, lp, nb))
    if not cands:
        raise CircuitError(f"no routing ancilla for edge {plan.edge}")
    _, _, lp, nb = min(cands, key=lambda t: t[:2])
    near_j = next(q for q in jq if q in nb)
    near_k = next(q for q in kq if q in nb)
    far_j = next(q for q in jq if q != near_j)
    far_k = next(q for q in kq if q != near_k)
    return [far_j, near_j, enc.ancilla(lp), near_k, far_k]


def evolution_circuit(enc: Encoding, plan: EvolutionPlan, t: str = "t",
                      native_two_qubit: bool | None = None,
                      connectivity: str = FULL) -> Circuit:
    """Conjugated single-qubit (or native two-qubit) evolution of ``plan``.

    Controls ``CP(P_i; Q)`` from each earlier strand onto the target strand,
    the central evolution, then the mirror image. With a flag, the flag
    ancilla is prepared in ``|+>`` and couples to the flagged strand right
    before its first and right after its last gate.
    """
    _check_connectivity(connectivity)
    native = plan.native_two_qubit if native_two_qubit is None else native_two_qubit
    strands = plan.strands
    target = strands[-1]
    if native and len(strands) >= 2:
        partner = strands[-2]
        controls = strands[:-2]
    else:
        partner = None
        controls = strands[:-1]
    P = plan.pauli_on
    Q = plan.q_pauli
    if Q not in _ANTI[P(target)]:
        raise CircuitError(f"Q={Q} must anticommute with {P(target)} on the target strand")

    if connectivity == FULL or plan.orientation == "vertex":
        pre = [cp(P(c), c, Q, target) for c in controls]
        core = (ev2(P(partner), partner, P(target), target, t) if partner is not None
                else ev1(P(target), target, t))
        gates = pre + [core] + pre[::-1]
    else:
        if plan.flag is not None:
            raise CircuitError("flagged evolutions are not available under reduced connectivity")
        gates = _routed(enc, plan, target, partner, controls, t)

    meta = {"role": "evolution", "plan": plan, "evolved": plan.evolved, "native": native}
    if plan.flag is not None:
        if connectivity != FULL:
            raise CircuitError("flagged evolutions are not available under reduced connectivity")
        fq = plan.qubits[plan.flag - 1]
        if fq == target:
            raise CircuitError("cannot flag the target strand")
        fa = plan.flag_qubit
        touched = [i for i, g in enumerate(gates) if fq in g.qubits]
        first, last = touched[0], touched[-1]
        fl = cp("Z", fa, P(fq), fq)
        gates = ([prep(fa)] + gates[:first] + [had(fa), fl] + gates[first:last + 1]
                 + [fl, had(fa)] + gates[last + 1:] + [mz(fa)])
        meta["flag_qubit"] = fa
    return _new(enc, gates, connectivity, **meta)


def _routed(enc, plan, target, partner, controls, t):
    path = _hub(enc, plan)
    hub = 2
    where = {q: i for i, q in enumerate(path)}  # state -> path position
    at = dict(enumerate(path))  # position -> state
    pre = []

    def sw(i, j):
        pre.append(swap(path[i], path[j]))
        si, sj = at[i], at[j]
        at[i], at[j] = sj, si
        where[si], where[sj] = j, i

    def bring(state, dest):
        while where[state] != dest:
            i = where[state]
            sw(i, i + (1 if dest > i else -1))

    def near(state):
        return hub - 1 if where[state] < hub else hub + 1

    P = plan.pauli_on
    bring(target, hub)
    for c in controls:
        bring(c, near(c))
        pre.append(cp(P(c), path[where[c]], plan.q_pauli, path[hub]))
    if partner is not None:
        bring(partner, near(partner))
        core = ev2(P(partner), path[where[partner]], P(target), path[hub], t)
    else:
        core = ev1(P(target), path[hub], t)
    return pre + [core] + pre[::-1]


def _candidate_plans(enc: Encoding, op: PauliOp, native: bool, connectivity: str):
    orientation, edge, qubits = _support_context(enc, op)
    paulis = "".join(op.symbol(q) for q in qubits)
    base_flag = _flag_ancilla(enc, edge, qubits)
    for flag_first in (False, True):
        for reflected in (False, True):
            order = qubits[::-1] if reflected else qubits
            strands = [q for q in order if op.symbol(q) != "I"]
            tgt = strands[-1]
            # flag nearest the target first
            flags = [None] if not flag_first else [
                qubits.index(q) + 1 for q in reversed(strands[:-1])]
            if flag_first and connectivity == REDUCED:
                continue
            for flag in flags:
                for qp in _ANTI[op.symbol(tgt)]:
                    yield EvolutionPlan(
                        tuple(qubits), paulis, qp, reflected, flag, native, orientation,
                        edge, base_flag if flag else None, op)


def plan_is_valid(enc: Encoding, plan: EvolutionPlan, connectivity: str = FULL) -> bool:
    """Exhaustive single-fault check of a plan.

    Without the native gate only the evolved operator itself may escape
    detection; with it nothing may.
    """
    try:
        plain = evolution_circuit(enc, plan, native_two_qubit=False, connectivity=connectivity)
        fixed = evolution_circuit(enc, plan, native_two_qubit=True, connectivity=connectivity)
    except CircuitError:
        return False
    rep = enumerate_single_faults(plain, enc)
    if rep.summary[UNDETECTABLE]:
        return False
    rep = enumerate_single_faults(fixed, enc)
    return not (rep.summary[UNDETECTABLE] or rep.summary[EXCEPTION])


def _plan_key(enc: Encoding, op: PauliOp, connectivity: str, native: bool):
    orientation, edge, qubits = _support_context(enc, op)
    local = "".join(op.symbol(q) for q in qubits)
    if edge is not None:
        logicals = frozenset(
            p.restrict(qubits).label() for _, p in enumerate_two_vertex_logicals(enc, edge))
        stabs = frozenset(
            s.restrict(qubits).label() for s in enc.stabilizers
            if not (s.support & ~sum(1 << q for q in qubits)))
        if connectivity == REDUCED:
            # routing depends on which ancilla serves as hub
            probe = EvolutionPlan(tuple(qubits), local, "X", orientation=orientation, edge=edge)
            path = _hub(enc, probe)
            shape = tuple(qubits.index(q) if q in qubits else -1 for q in path)
        else:
            shape = ()
    else:
        logicals = stabs = frozenset()
        shape = ()
    return (enc.graph.topology, local, orientation, logicals, stabs, shape, connectivity, native)


_PLAN_CACHE: dict = {}


def plan_protected_evolution(enc: Encoding, logical_op: PauliOp, connectivity: str = FULL,
                             native_two_qubit: bool = True) -> EvolutionPlan:
    """Search Q choice, reflection and flag placement for a safe evolution.

    Candidates are tried simplest first: no flag before flagged, unreflected
    before reflected. Each is checked by exhaustive fault enumeration.

    Raises:
        CircuitError: when no candidate passes.
    """
    _check_connectivity(connectivity)
    key = _plan_key(enc, logical_op, connectivity, native_two_qubit)
    cached = _PLAN_CACHE.get(key)
    if cached is not None:
        template = cached
        orientation, edge, qubits = _support_context(enc, logical_op)
        return EvolutionPlan(
            tuple(qubits), template.paulis, template.q_pauli, template.reflected,
            template.flag, native_two_qubit, orientation, edge,
            _flag_ancilla(enc, edge, qubits) if template.flag else None, logical_op)
    for plan in _candidate_plans(enc, logical_op, native_two_qubit, connectivity):
        if plan_is_valid(enc, plan, connectivity):
            _PLAN_CACHE[key] = plan
            return plan
    raise CircuitError(f"no fault-safe evolution plan for {logical_op}")


# -- ansatz ---------------------------------------------------------------------

@dataclass(frozen=True)
class AnsatzTerm:
    name: str  # "BA", "AB", "BB" or "B"
    direction: str  # "h", "v" or "-"
    op: PauliOp
    edge: int | None
    vertex: int | None


def ansatz_terms(enc: Encoding) -> list[AnsatzTerm]:
    """Evolved HVA terms, in application order (layer by layer).

    Doubled edges carry zero weight and are skipped.
    """
    g = enc.graph
    straight = [e for e in g.edges if not e.doubled]
    A, B = enc.edge_ops, enc.vertex_ops

    def edge_terms(name, d):
        out = []
        for e in straight:
            if (e.kind == "horizontal") != (d == "h"):
                continue
            if name == "BA":
                op = (B[e.j] * A[e.index]).times_phase(1)
            elif name == "AB":
                op = (A[e.index] * B[e.k]).times_phase(1)
            else:
                op = B[e.j] * B[e.k]
            out.append(AnsatzTerm(name, d, op, e.index, None))
        return out

    terms = edge_terms("BB", "h") + edge_terms("BB", "v")
    terms += [AnsatzTerm("B", "-", B[v], None, v) for v in range(g.n_vertices)]
    for name in ("AB", "BA"):
        terms += edge_terms(name, "h") + edge_terms(name, "v")
    return terms


def _matching_class(enc: Encoding, term: AnsatzTerm) -> int:
    """0/1 parity splitting a layer's edges into two vertex-disjoint halves."""
    if term.edge is None:
        return 0
    e = enc.graph.edges[term.edge]
    r, c = enc.graph.coords(e.j)
    return (c if e.kind == "horizontal" else r) % 2


LAYER_ORDER = (("BB", "h"), ("BB", "v"), ("B", "-"), ("AB", "h"), ("AB", "v"),
               ("BA", "h"), ("BA", "v"))


def hva_schedule(enc: Encoding, params=None, connectivity: str = REDUCED,
                 native_two_qubit: bool = True) -> Circuit:
    """Seven evolution layers of protected gadgets, one symbolic angle per term.

    Each gadget evolves the unsigned Pauli of its term; the term's sign is
    absorbed into the free angle.

    Within a layer gadgets are interleaved gate by gate in lattice order.
    ``meta["layers"]`` records each layer's gadgets and the deepest gadget,
    and ``meta["layered_depth"]`` sums those per-layer maxima.

    Raises:
        CircuitError: if ``params`` does not hold exactly one angle per term.
    """
    _check_connectivity(connectivity)
    terms = ansatz_terms(enc)
    if params is None:
        params = [f"t{i}" for i in range(len(terms))]
    params = list(params)
    if len(params) != len(terms):
        raise CircuitError(f"expected {len(terms)} parameters, got {len(params)}")
    layers = []
    all_gates = []
    gadgets = []
    for name, d in LAYER_ORDER:
        members = [(i, t) for i, t in enumerate(terms) if t.name == name and t.direction == d]
        members.sort(key=lambda it: _matching_class(enc, it[1]))
        circs = []
        for i, term in members:
            plan = plan_protected_evolution(enc, term.op, connectivity, native_two_qubit)
            c = evolution_circuit(enc, plan, str(params[i]), native_two_qubit, connectivity)
            circs.append(c)
            gadgets.append((term, plan, c))
        merged = _merge_parallel(enc, circs, connectivity)
        layers.append({
            "layer": f"{name}_{d}" if d != "-" else name,
            "terms": len(members),
            "max_gadget_depth": max((depth(c) for c in circs), default=0),
            "max_gadget_gates": max((count_resources(c)["two_qubit_gates"] for c in circs),
                                    default=0),
            "depth": depth(merged),
        })
        all_gates.extend(merged.gates)
    return _new(enc, all_gates, connectivity, role="ansatz", layers=layers,
                gadgets=gadgets, layered_depth=sum(l["max_gadget_depth"] for l in layers))


def reverse_circuit(circuit: Circuit, negate: bool = True) -> Circuit:
    """Inverse of a unitary circuit: reversed order, evolution angles negated."""
    gates = []
    for g in reversed(circuit.gates):
        if g.kind in ("PREP", "MZ"):
            raise CircuitError("cannot invert a circuit containing PREP or MZ")
        if g.kind in ("EV1", "EV2") and negate:
            p = g.param[1:] if g.param.startswith("-") else "-" + g.param
            g = type(g)(g.kind, g.qubits, g.paulis, p)
        gates.append(g)
    return circuit.with_gates(gates, role="ansatz_inverse")


# -- state preparation and full pipeline ------------------------------------------

def state_prep_circuit(enc: Encoding, occupancies=None, connectivity: str = REDUCED) -> Circuit:
    """Depth-one product-state layer fixing every ``B_j``, then one syndrome round.

    Each vertex pair is reset; the second qubit is rotated to a Y eigenstate
    with a fixed ``exp(-i X pi/4)`` and an occupied vertex also gets
    ``exp(-i X pi/2)`` (an X flip up to phase) on its first qubit.
    """
    nv = enc.graph.n_vertices
    occ = [0] * nv if occupancies is None else list(occupancies)
    if len(occ) != nv:
        raise CircuitError("one occupancy bit per vertex required")
    gates = []
    for v in range(nv):
        q0, q1 = enc.vertex_qubits(v)
        gates += [prep(q0), prep(q1), ev1("X", q1, "pi/4")]
        if occ[v]:
            gates.append(ev1("X", q0, "pi/2"))
    rnd = syndrome_round(enc, connectivity)
    return _new(enc, gates + list(rnd.gates), connectivity, role="state_prep",
                occupancies=tuple(occ))


def error_detected_circuit(enc: Encoding, connectivity: str = REDUCED,
                           native_two_qubit: bool = True, params=None) -> Circuit:
    """Zero-state prep, ansatz, inverse ansatz, B_j measurement, detection round.

    ``meta["segments"]`` maps segment names to ``(start, stop)`` gate ranges;
    the ``computation`` segment covers everything before B_j measurement.
    """
    sp = state_prep_circuit(enc, None, connectivity)
    ans = hva_schedule(enc, params, connectivity, native_two_qubit)
    inv = reverse_circuit(ans)
    bj = bj_round(enc, connectivity)
    fin = syndrome_round(enc, connectivity)
    parts = [("state_prep", sp), ("ansatz", ans), ("ansatz_inverse", inv), ("bj", bj),
             ("detection", fin)]
    segments = {}
    pos = 0
    for name, c in parts:
        segments[name] = (pos, pos + len(c.gates))
        pos += len(c.gates)
    segments["computation"] = (0, segments["ansatz_inverse"][1])
    segments["error_detection"] = (segments["bj"][0], pos)
    full = concat([c for _, c in parts], role="error_detected", segments=segments,
                  ansatz_layers=ans.meta["layers"], layered_depth=ans.meta["layered_depth"])
    return Circuit(full.n_qubits, full.n_data, full.gates, connectivity, full.meta)


# -- exhaustive audit -----------------------------------------------------------

def gadget_instances(enc: Encoding, connectivity: str = FULL, native_two_qubit: bool = True):
    """Yield ``(name, circuit)`` for every syndrome, B_j and ansatz gadget."""
    for lp in enc.graph.measured_loops:
        yield f"syndrome[{lp.index}]", syndrome_measurement_circuit(enc, lp, connectivity)
    for v in range(enc.graph.n_vertices):
        yield f"bj[{v}]", bj_measurement_circuit(enc, v, connectivity)
    for i, term in enumerate(ansatz_terms(enc)):
        plan = plan_protected_evolution(enc, term.op, connectivity, native_two_qubit)
        where = f"e{term.edge}" if term.edge is not None else f"v{term.vertex}"
        c = evolution_circuit(enc, plan, f"t{i}", native_two_qubit, connectivity)
        yield f"{term.name}{term.direction}[{where}]", c


def audit_gadgets(enc: Encoding, connectivities=(FULL, REDUCED), native_two_qubit: bool = True,
                  expand: bool = False) -> dict:
    """Exhaustive single-fault enumeration over :func:`gadget_instances`.

    Returns a JSON-ready report: verdict totals, every undetectable outcome,
    and every exception with whether it sits at a central evolution.
    """
    from .faults import at_central_evolve

    totals = Counter()
    undetectable, exceptions, violations = [], [], []
    n = 0
    for conn in connectivities:
        for name, circ in gadget_instances(enc, conn, native_two_qubit):
            n += 1
            if conn == REDUCED:
                bad = connectivity_violations(circ, enc)
                if bad:
                    violations.append({"gadget": name, "gates": bad})
            rep = enumerate_single_faults(circ, enc, swap_faults=True, expand=expand)
            totals.update(rep.summary)
            for o in rep.undetectable:
                undetectable.append({"gadget": name, "connectivity": conn, **o.to_dict()})
            for o in rep.exceptions:
                exceptions.append({"gadget": name, "connectivity": conn,
                                   "central": at_central_evolve(circ, o.event), **o.to_dict()})
    return {
        "gadgets": n,
        "native_two_qubit": native_two_qubit,
        "totals": dict(sorted(totals.items())),
        "undetectable": undetectable,
        "exceptions": exceptions,
        "connectivity_violations": violations,
        "ok": not undetectable and not violations,
    }
