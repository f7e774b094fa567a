import itertools
import random

import numpy as np
import pytest

from gsedetect.encoding import (
    DETECTABLE,
    LOGICAL,
    STABILIZER,
    TRIVIAL,
    EncodingError,
    build_gse,
    check_algebra,
    classify,
    enumerate_two_vertex_logicals,
    fix_signs,
    pair_qubits,
    syndrome,
    verify_detection_distance,
)
from gsedetect.gadgets import syndrome_measurement_circuit
from gsedetect.lattice import build
from gsedetect.pauli import PauliOp, parse, product
from oracles import dense

SINGLE_EDGE = {
    "horizontal": {"IZXY", "IZYI", "ZXXY", "ZXYI", "ZYII", "IIZY", "ZYZY"},
    "vertical": {"IXYY", "IXXI", "ZZYY", "ZZXI", "ZYII", "IIZY", "ZYZY"},
}
DOUBLED_EXTRA = {
    "doubled_top": {"YYYY", "YYXI", "XIYY", "XIXI", "YXZI", "YXIY", "XZZI", "XZIY"},
    "doubled_bottom": {"IXIX", "IXZZ", "ZZIX", "ZZZZ", "IYXZ", "IYYX", "ZIXZ", "ZIYX"},
    "doubled_left": {"XYXY", "XYYI", "YIXY", "YIYI", "XZZI", "XZIY", "YXZI", "YXIY"},
    "doubled_right": {"IZIZ", "IZZX", "ZXIZ", "ZXZX", "IYYX", "IYXZ", "ZIYX", "ZIXZ"},
}
# squares (relative to the vertex) flagged by each single-qubit error
SINGLE_QUBIT_SYNDROMES = {
    "XI": {"NW", "NE"}, "YI": {"NW", "SW"}, "ZI": {"SW", "NE"},
    "IX": {"SW", "SE"}, "IY": {"NE", "SW"}, "IZ": {"SE", "NE"},
}


@pytest.fixture(scope="module")
def enc4():
    return build_gse(build(4, 4))


def _local_labels(enc, kind):
    return {enc.loop_local_label(lp).format() for lp in enc.graph.loops if lp.kind == kind}


def test_bigon_loop_operators(enc4):
    assert _local_labels(enc4, "bigon") == {"-YXZI", "-IYYX", "-IYXZ", "-XZZI"}
    for lp in enc4.graph.bigons:
        assert enc4.stabilizers[lp.index].weight == 3


def test_interior_loop_label_and_weight(enc4):
    labels = _local_labels(enc4, "square")
    assert {s.lstrip("-") for s in labels} == {"IYXZYXZI"}
    assert all(enc4.stabilizers[lp.index].weight == 6 for lp in enc4.graph.squares)


def test_interior_loop_sign_from_dense_matrices():
    # gammas attached to half-edges: left XY, up YY, down IX, right IZ
    g = {"left": "XY", "up": "YY", "down": "IX", "right": "IZ"}

    def gam(v, d):
        return dense("II" * v + g[d] + "II" * (3 - v))

    a01 = gam(0, "right") @ gam(1, "left")
    a13 = gam(1, "down") @ gam(3, "up")
    a23 = gam(2, "right") @ gam(3, "left")
    a02 = gam(0, "down") @ gam(2, "up")
    loop = (1j ** 4) * a01 @ a13 @ (-a23) @ (-a02)
    assert np.allclose(loop, dense("IYXZYXZI", -1))
    enc = build_gse(build(2, 2))
    sq = enc.graph.squares[0]
    assert enc.loop_local_label(sq).format() == "-IYXZYXZI"


def test_stabilizers_hermitian_and_commuting(enc4):
    for a, b in itertools.combinations(enc4.stabilizers, 2):
        assert a.commutes(b)
    assert all(s.is_hermitian for s in enc4.stabilizers)


@pytest.mark.parametrize("args,rank,n_loops", [
    ((4, 4), 17, 17), ((2, 2), 5, 5), ((2, 2, "torus"), 5, 6), ((4, 4, "torus"), 17, 18),
])
def test_stabilizer_rank(args, rank, n_loops):
    enc = build_gse(build(*args))
    assert len(enc.stabilizers) == n_loops
    assert enc.stabilizer_rank == rank


@pytest.mark.parametrize("args", [(4, 4), (2, 2), (2, 2, "torus"), (4, 4, "torus")])
def test_algebra_relations_hold(args):
    assert check_algebra(build_gse(build(*args))) == []


@pytest.mark.parametrize("args", [(4, 4), (2, 2), (4, 4, "torus"), (2, 2, "torus")])
def test_single_qubit_errors_detectable(args):
    enc = build_gse(build(*args))
    rep = verify_detection_distance(enc)
    assert rep["ok"] and rep["checked"] == 3 * enc.n_data


def test_classify_examples(enc4):
    n = enc4.n_data
    assert classify(enc4, PauliOp.identity(n)) == TRIVIAL
    assert classify(enc4, enc4.stabilizers[0]) == STABILIZER
    assert classify(enc4, enc4.vertex_ops[5]) == LOGICAL
    assert classify(enc4, enc4.edge_ops[3]) == LOGICAL
    assert classify(enc4, PauliOp.single(n, 7, "X")) == DETECTABLE
    with pytest.raises(EncodingError):
        syndrome(enc4, PauliOp.identity(3))


def test_single_qubit_syndrome_patterns(enc4):
    g = enc4.graph
    for r, c in [(1, 1), (1, 2), (2, 1), (2, 2)]:
        v = g.vertex(r, c)
        around = {}
        for lp in g.squares:
            if v in lp.corners:
                # v is the SE corner of the square lying NW of it, and so on
                around[lp.index] = ("SE", "SW", "NE", "NW")[lp.corners.index(v)]
        assert sorted(around.values()) == ["NE", "NW", "SE", "SW"]
        for label, want in SINGLE_QUBIT_SYNDROMES.items():
            err = parse(label).embed(enc4.n_data, enc4.vertex_qubits(v))
            hits = {i for i, b in enumerate(syndrome(enc4, err)) if b}
            assert hits <= set(around)
            assert {around[i] for i in hits} == want, (v, label)


def test_ancilla_z_residues_are_detectable(enc4):
    lp = enc4.graph.squares[4]
    circ = syndrome_measurement_circuit(enc4, lp)
    cps = [g for g in circ.gates if g.kind == "CP"]
    qubits = [q for v in sorted(lp.corners) for q in enc4.vertex_qubits(v)]
    residues = set()
    for k in range(1, len(cps)):
        r = product([PauliOp.single(enc4.n_data, g.qubits[0], g.paulis[0]) for g in cps[k:]])
        assert any(syndrome(enc4, r))
        residues.add(r.restrict(qubits).label())
    assert residues == {"IIIIIIZI", "IIIIIXZI", "IIIIYXZI", "IIIZYXZI", "IIXZYXZI"}


def test_two_vertex_logicals_single_and_doubled(enc4):
    g = enc4.graph
    for e in g.straight_edges:
        found = {p.restrict(pair_qubits(enc4, e.j, e.k)).label()
                 for _, p in enumerate_two_vertex_logicals(enc4, e)}
        doubled = [x for x in g.doubled_edges if {x.j, x.k} == {e.j, e.k}]
        want = set(SINGLE_EDGE[e.kind])
        if doubled:
            want |= DOUBLED_EXTRA[doubled[0].kind]
            assert len(found) == 15
        else:
            assert len(found) == 7
        assert found == want, e


def test_two_vertex_centralizer_elements(enc4):
    kinds = {}
    for name, p in enumerate_two_vertex_logicals(enc4, 0):
        kinds[name] = classify(enc4, p)
        sq = p * p
        assert sq.is_identity and sq.phase in (0, 2)
    # the doubled pair closes a bigon
    assert kinds.pop("AA'") == STABILIZER
    assert set(kinds.values()) == {LOGICAL}


def _random_even_subsets(pool, count, seed):
    rng = random.Random(seed)
    for _ in range(count):
        k = 2 * rng.randint(1, len(pool) // 2)
        yield set(rng.sample(pool, k))


@pytest.mark.parametrize("args", [(4, 4), (2, 4)])
def test_fix_signs_flips_exactly_the_defects(args):
    enc = build_gse(build(*args))
    loops = [lp.index for lp in enc.graph.loops]
    for defect in _random_even_subsets(loops, 30, seed=len(loops)):
        fixed = fix_signs(enc, defect)
        flipped = {i for i in loops if fixed.loop_sign(i) != enc.loop_sign(i)}
        assert flipped == defect
        assert check_algebra(fixed) == []


def test_fix_signs_torus_winding():
    enc = build_gse(build(4, 4, "torus"))
    measured = [lp.index for lp in enc.graph.measured_loops]
    winding = [lp.index for lp in enc.graph.loops if not lp.measured]
    defect = {measured[0], measured[5], winding[0]}
    fixed = fix_signs(enc, defect)
    flipped = {lp.index for lp in enc.graph.loops
               if fixed.loop_sign(lp) != enc.loop_sign(lp)}
    assert flipped == defect


def test_fix_signs_rejects_odd_and_unknown(enc4):
    with pytest.raises(EncodingError):
        fix_signs(enc4, {0, 1, 2})
    with pytest.raises(EncodingError):
        fix_signs(enc4, {0, 999})
    assert fix_signs(enc4, set()) is enc4


def test_to_json_lists_everything(enc4):
    d = enc4.to_dict()
    assert len(d["edge_ops"]) == 32 and len(d["vertex_ops"]) == 16 and len(d["loops"]) == 17
    assert d["vertex_ops"][0]["op"].endswith("ZY" + "I" * 30)
