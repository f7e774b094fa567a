"""Generalized superfast encoding of the spinless Hubbard lattice.

Each vertex ``v`` owns the qubit pair ``(2v, 2v+1)``. The four generalized
Majoranas on a vertex are the mutually anticommuting two-qubit Paulis
``(XY, YY, IX, IZ)``, attached to the half-edges ``left, up, down, right``.
Edge operators are ``A_jk = eps_jk * gamma_{j,a} * gamma_{k,b}``, vertex
operators are ``B_j = -gamma_1 gamma_2 gamma_3 gamma_4`` and each loop in the
graph yields a stabilizer ``i**len * prod A``.

Operators on data qubits are :class:`~gsedetect.pauli.PauliOp` values over
``2 * rows * cols`` qubits. Measured loops get one ancilla each, numbered
after the data qubits.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from functools import cached_property

import networkx as nx

from .gf2 import XorBasis
from .lattice import HALF_EDGE_GAMMA, InteractionGraph, Loop
from .pauli import PauliOp, product

GAMMA_LABELS = {1: "XY", 2: "YY", 3: "IX", 4: "IZ"}

TRIVIAL = "trivial"
STABILIZER = "stabilizer"
DETECTABLE = "detectable"
LOGICAL = "logical"


class EncodingError(ValueError):
    pass


def _symplectic(p: PauliOp) -> int:
    return p.x | (p.z << p.n_qubits)


@dataclass(frozen=True)
class Encoding:
    """Stabilizer code built from an :class:`InteractionGraph`.

    Attributes:
        graph: the lattice.
        edge_signs: extra +-1 per edge, flipped by :func:`fix_signs`.
    """

    graph: InteractionGraph
    edge_signs: tuple = field(default=())

    def __post_init__(self):
        if not self.edge_signs:
            object.__setattr__(self, "edge_signs", (1,) * len(self.graph.edges))
        if len(self.edge_signs) != len(self.graph.edges):
            raise EncodingError("one edge sign per edge required")

    # -- layout ---------------------------------------------------------------

    @property
    def n_data(self) -> int:
        return 2 * self.graph.n_vertices

    @property
    def n_ancilla(self) -> int:
        return len(self.graph.measured_loops)

    @property
    def n_qubits(self) -> int:
        return self.n_data + self.n_ancilla

    def vertex_qubits(self, v: int) -> tuple[int, int]:
        return (2 * v, 2 * v + 1)

    @cached_property
    def _ancilla_of_loop(self) -> dict:
        return {lp.index: self.n_data + i for i, lp in enumerate(self.graph.measured_loops)}

    def ancilla(self, loop: Loop | int) -> int:
        idx = loop if isinstance(loop, int) else loop.index
        return self._ancilla_of_loop[idx]

    def loop_of_ancilla(self, q: int) -> Loop:
        return self.graph.measured_loops[q - self.n_data]

    # -- operators ------------------------------------------------------------

    def gamma(self, v: int, i: int) -> PauliOp:
        return PauliOp.parse(GAMMA_LABELS[i]).embed(self.n_data, self.vertex_qubits(v))

    def half_edge_gamma(self, v: int, direction: str) -> PauliOp:
        return self.gamma(v, HALF_EDGE_GAMMA[direction])

    def edge_op(self, e: int) -> PauliOp:
        """``A_jk`` for edge ``e`` in its stored orientation."""
        edge = self.graph.edges[e]
        op = self.half_edge_gamma(edge.j, edge.dir_j) * self.half_edge_gamma(edge.k, edge.dir_k)
        return op if self.edge_signs[e] == 1 else -op

    def A(self, e: int, a: int | None = None, b: int | None = None) -> PauliOp:
        """Edge operator of edge ``e`` oriented ``a -> b`` (stored direction if omitted)."""
        op = self.edge_op(e)
        if a is None:
            return op
        return op if self.graph.edges[e].eps(a, b) == 1 else -op

    @cached_property
    def edge_ops(self) -> tuple:
        return tuple(self.edge_op(e) for e in range(len(self.graph.edges)))

    def vertex_op(self, v: int) -> PauliOp:
        return -product(self.gamma(v, i) for i in (1, 2, 3, 4))

    @cached_property
    def vertex_ops(self) -> tuple:
        return tuple(self.vertex_op(v) for v in range(self.graph.n_vertices))

    def loop_op(self, loop: Loop) -> PauliOp:
        factors = [self.edge_ops[e] if fwd else -self.edge_ops[e] for e, fwd in loop.steps]
        return product(factors).times_phase(len(loop.steps))

    @cached_property
    def stabilizers(self) -> tuple:
        """Loop operators, one per loop of the graph (measured loops first)."""
        return tuple(self.loop_op(lp) for lp in self.graph.loops)

    def loop_sign(self, loop: Loop | int) -> int:
        idx = loop if isinstance(loop, int) else loop.index
        s = self.stabilizers[idx]
        if not s.is_hermitian:
            raise EncodingError("loop operator is not Hermitian")
        return 1 if s.phase == 0 else -1

    def loop_local_label(self, loop: Loop) -> PauliOp:
        """Loop operator restricted to its corner vertices, keeping the sign."""
        qubits = [q for v in sorted(loop.corners) for q in self.vertex_qubits(v)]
        op = self.stabilizers[loop.index]
        local = op.restrict(qubits)
        return local.times_phase(op.phase)

    # -- stabilizer group -----------------------------------------------------

    @cached_property
    def _stab_basis(self) -> XorBasis:
        basis = XorBasis()
        for s in self.stabilizers:
            basis.add(_symplectic(s))
        return basis

    @property
    def stabilizer_rank(self) -> int:
        return len(self._stab_basis)

    def _check_data(self, p: PauliOp):
        if p.n_qubits != self.n_data:
            raise EncodingError(
                f"operator acts on {p.n_qubits} qubits, code has {self.n_data} data qubits"
            )

    def syndrome(self, err: PauliOp, measured_only: bool = False) -> tuple:
        """Anticommutation bits of ``err`` against each loop operator."""
        self._check_data(err)
        stabs = self.stabilizers
        if measured_only:
            stabs = stabs[: self.n_ancilla]
        return tuple(0 if err.commutes(s) else 1 for s in stabs)

    def in_stabilizer_group(self, p: PauliOp) -> bool:
        """Membership up to phase."""
        self._check_data(p)
        return self._stab_basis.contains(_symplectic(p))

    def classify(self, p: PauliOp) -> str:
        self._check_data(p)
        if p.is_identity:
            return TRIVIAL
        if any(self.syndrome(p)):
            return DETECTABLE
        if self.in_stabilizer_group(p):
            return STABILIZER
        return LOGICAL

    # -- export ---------------------------------------------------------------

    def to_dict(self) -> dict:
        g = self.graph
        return {
            "rows": g.rows,
            "cols": g.cols,
            "topology": g.topology,
            "edge_ops": [
                {"edge": e.index, "j": e.j, "k": e.k, "kind": e.kind,
                 "op": self.edge_ops[e.index].format()}
                for e in g.edges
            ],
            "vertex_ops": [
                {"vertex": v, "op": self.vertex_ops[v].format()} for v in range(g.n_vertices)
            ],
            "loops": [
                {"loop": lp.index, "kind": lp.kind, "corners": list(lp.corners),
                 "measured": lp.measured, "op": self.stabilizers[lp.index].format(),
                 "local": self.loop_local_label(lp).format()}
                for lp in g.loops
            ],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def build_gse(graph: InteractionGraph) -> Encoding:
    enc = Encoding(graph)
    for s in enc.stabilizers:
        if not s.is_hermitian:
            raise EncodingError("non-Hermitian loop operator")
    return enc


def syndrome(enc: Encoding, err: PauliOp) -> tuple:
    return enc.syndrome(err)


def classify(enc: Encoding, p: PauliOp) -> str:
    return enc.classify(p)


def pair_qubits(enc: Encoding, a: int, b: int) -> list[int]:
    """The four data qubits of two vertices, lower vertex index first."""
    lo, hi = sorted((a, b))
    return [*enc.vertex_qubits(lo), *enc.vertex_qubits(hi)]


def enumerate_two_vertex_logicals(enc: Encoding, edge) -> list[tuple[str, PauliOp]]:
    """Nontrivial centralizer elements supported on the two ends of ``edge``.

    Each is returned with a name written as a product of the vertex and edge
    operators between the two vertices (``B_j``, ``B_k``, ``A``, ``A'``) and
    the full-register operator, sign included. Vertex ``j`` is the lower index.
    """
    e = enc.graph.edges[edge] if isinstance(edge, int) else edge
    j, k = sorted((e.j, e.k))
    qubits = pair_qubits(enc, j, k)

    gens = [("B_j", enc.vertex_ops[j]), ("B_k", enc.vertex_ops[k])]
    between = sorted(
        (x for x in enc.graph.edges if {x.j, x.k} == {j, k}), key=lambda x: x.doubled
    )
    for x in between:
        gens.append(("A'" if x.doubled else "A", enc.A(x.index, j, k)))

    basis = XorBasis()
    for _, g in gens:
        basis.add(_symplectic(g))

    mask = sum(1 << q for q in qubits)
    nearby = [s for s in enc.stabilizers if s.support & mask]
    out = []
    for symbols in itertools.product("IXYZ", repeat=4):
        if symbols == ("I",) * 4:
            continue
        p = PauliOp.from_sparse(enc.n_data, dict(zip(qubits, symbols)))
        if not all(p.commutes(s) for s in nearby):
            continue
        rest, tags = basis.reduce(_symplectic(p))
        if rest:
            raise EncodingError(f"unexpected centralizer element {p.restrict(qubits)}")
        used = [gens[i] for i in range(len(gens)) if (tags >> i) & 1]
        op = product(g for _, g in used)
        out.append(("".join(n for n, _ in used), op))
    return out


def fix_signs(enc: Encoding, defective) -> Encoding:
    """Flip edge signs so that exactly the loops in ``defective`` change sign.

    Defective loops are paired greedily by distance in the loop-adjacency
    graph (two loops are adjacent when they share an edge) and the edges
    crossed by each connecting path are flipped. On the torus the two
    winding loops are then fixed up by flipping a full band of edges.

    Raises:
        EncodingError: for an odd number of defective measured loops.
    """
    graph = enc.graph
    defective = set(defective)
    if not defective:
        return enc
    unknown = defective - {lp.index for lp in graph.loops}
    if unknown:
        raise EncodingError(f"unknown loops {sorted(unknown)}")
    measured = {lp.index for lp in graph.measured_loops}
    faces = sorted(defective & measured)
    if len(faces) % 2:
        raise EncodingError("the defective set must have even size")

    fg = _face_graph(graph)
    flips = [0] * len(graph.edges)
    remaining = list(faces)
    while remaining:
        best = None
        for a, b in itertools.combinations(remaining, 2):
            d = nx.shortest_path_length(fg, a, b)
            if best is None or d < best[0]:
                best = (d, a, b)
        _, a, b = best
        path = nx.shortest_path(fg, a, b)
        for u, w in zip(path, path[1:]):
            flips[fg.edges[u, w]["edge"]] ^= 1
        remaining.remove(a)
        remaining.remove(b)

    # unmeasured winding loops (torus only)
    for lp in graph.loops:
        if lp.measured:
            continue
        got = sum(flips[e] for e in lp.edges) % 2
        want = 1 if lp.index in defective else 0
        if got != want:
            for e in _band_for_winding(graph, lp):
                flips[e] ^= 1

    signs = tuple(s * (-1 if f else 1) for s, f in zip(enc.edge_signs, flips))
    return replace(enc, edge_signs=signs)


def _face_graph(graph: InteractionGraph) -> nx.Graph:
    fg = nx.Graph()
    measured = graph.measured_loops
    fg.add_nodes_from(lp.index for lp in measured)
    owner: dict[int, list[int]] = {}
    for lp in measured:
        for e in lp.edges:
            owner.setdefault(e, []).append(lp.index)
    for e, faces in sorted(owner.items()):
        if len(faces) == 2 and faces[0] != faces[1] and not fg.has_edge(*faces):
            fg.add_edge(faces[0], faces[1], edge=e)
    return fg


def _band_for_winding(graph: InteractionGraph, lp: Loop) -> list[int]:
    """Edges crossing a dual cycle that meets ``lp`` once and every square twice."""
    first = graph.edges[lp.steps[0][0]]
    if first.kind == "horizontal":
        # row winding loop: flip the horizontal edges of column 0
        return [e.index for e in graph.edges
                if e.kind == "horizontal" and graph.coords(e.j)[1] == 0]
    return [e.index for e in graph.edges
            if e.kind == "vertical" and graph.coords(e.j)[0] == 0]


def verify_detection_distance(enc: Encoding) -> dict:
    """Classify every weight-one data Pauli; report any that are not detectable."""
    violations = []
    checked = 0
    for q in range(enc.n_data):
        for s in "XYZ":
            p = PauliOp.single(enc.n_data, q, s)
            checked += 1
            verdict = enc.classify(p)
            if verdict != DETECTABLE:
                violations.append({"qubit": q, "pauli": s, "verdict": verdict})
    return {"checked": checked, "violations": violations, "ok": not violations}


def check_algebra(enc: Encoding) -> list[str]:
    """Check the edge/vertex operator relations exhaustively; return violations."""
    g = enc.graph
    bad = []
    A = enc.edge_ops
    B = enc.vertex_ops
    n = enc.n_data
    ident = PauliOp.identity(n)
    for e, a in enumerate(A):
        if not a.is_hermitian:
            bad.append(f"A[{e}] not Hermitian")
        if a * a != ident:
            bad.append(f"A[{e}]^2 != 1")
        edge = g.edges[e]
        if enc.A(e, edge.k, edge.j) != -a:
            bad.append(f"A[{e}] antisymmetry")
    for v, b in enumerate(B):
        if not b.is_hermitian:
            bad.append(f"B[{v}] not Hermitian")
        if b * b != ident:
            bad.append(f"B[{v}]^2 != 1")
    for v, w in itertools.combinations(range(g.n_vertices), 2):
        if not B[v].commutes(B[w]):
            bad.append(f"B[{v}] B[{w}] anticommute")
    for e1, e2 in itertools.combinations(range(len(A)), 2):
        shared = len({g.edges[e1].j, g.edges[e1].k} & {g.edges[e2].j, g.edges[e2].k})
        expect = shared != 1
        if A[e1].commutes(A[e2]) != expect:
            bad.append(f"A[{e1}] A[{e2}] commutation (shared vertices {shared})")
    for e, a in enumerate(A):
        ends = {g.edges[e].j, g.edges[e].k}
        for v in range(g.n_vertices):
            if a.commutes(B[v]) == (v in ends):
                bad.append(f"A[{e}] B[{v}] commutation")
    for lp in g.loops:
        s = enc.stabilizers[lp.index]
        if not s.is_hermitian:
            bad.append(f"loop {lp.index} not Hermitian")
        for op in itertools.chain(A, B):
            if not s.commutes(op):
                bad.append(f"loop {lp.index} does not commute with an edge/vertex operator")
                break
    return bad
