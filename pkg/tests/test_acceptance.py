"""Acceptance criteria, one test each, each printing a ``criterion N: PASS|FAIL`` line.

Run ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""

import math
import random
import sys
import time

import pytest

from gsedetect import analysis as an
from gsedetect.encoding import (
    build_gse,
    check_algebra,
    enumerate_two_vertex_logicals,
    fix_signs,
    pair_qubits,
    syndrome,
    verify_detection_distance,
)
from gsedetect.faults import monte_carlo
from gsedetect.gadgets import (
    REDUCED,
    audit_gadgets,
    error_detected_circuit,
    gadget_instances,
    syndrome_measurement_circuit,
)
from gsedetect.lattice import build
from gsedetect.pauli import PauliOp, parse, product
from test_encoding import DOUBLED_EXTRA, SINGLE_EDGE, SINGLE_QUBIT_SYNDROMES

_ECHO = None


@pytest.fixture(autouse=True)
def _echo(capsys):
    global _ECHO
    _ECHO = capsys
    yield
    _ECHO = None


def report(n, ok, detail, started, budget):
    elapsed = time.perf_counter() - started
    ok = ok and elapsed < budget
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s) {detail}"
    if _ECHO is not None:
        with _ECHO.disabled():
            print("\n" + line)
    else:
        print(line)
    assert ok, line


@pytest.fixture(scope="module")
def enc4():
    return build_gse(build(4, 4))


def test_criterion_1_operator_construction():
    t0 = time.perf_counter()
    enc = build_gse(build(4, 4))
    squares = {enc.loop_local_label(lp).format() for lp in enc.graph.squares}
    bigons = {enc.loop_local_label(lp).format() for lp in enc.graph.bigons}
    ok = squares == {"IYXZYXZI"} and bigons == {"-YXZI", "-IYYX", "-IYXZ", "-XZZI"}
    report(1, ok, f"interior {sorted(squares)}, bigons {sorted(bigons)}", t0, 1.0)


def test_criterion_2_algebra(enc4):
    t0 = time.perf_counter()
    bad = check_algebra(enc4)
    report(2, not bad, f"{len(bad)} violations", t0, 5.0)


def test_criterion_3_detection_distance():
    t0 = time.perf_counter()
    parts = []
    ok = True
    for args in ((4, 4), (2, 2), (4, 4, "torus")):
        rep = verify_detection_distance(build_gse(build(*args)))
        ok &= rep["ok"]
        parts.append(f"{args}: {rep['checked']} checked")
    ok &= parts[0].endswith(" 96 checked")
    report(3, ok, "; ".join(parts), t0, 5.0)


def test_criterion_4_syndrome_tables(enc4):
    t0 = time.perf_counter()
    g = enc4.graph
    mismatches = 0
    interior = [v for v in range(g.n_vertices)
                if sum(v in lp.corners for lp in g.squares) == 4]
    for v in interior:
        around = {lp.index: ("SE", "SW", "NE", "NW")[lp.corners.index(v)]
                  for lp in g.squares if v in lp.corners}
        for label, want in SINGLE_QUBIT_SYNDROMES.items():
            err = parse(label).embed(enc4.n_data, enc4.vertex_qubits(v))
            hits = {i for i, b in enumerate(syndrome(enc4, err)) if b}
            if not hits <= set(around) or {around[i] for i in hits} != want:
                mismatches += 1
    lp = g.squares[4]
    cps = [x for x in syndrome_measurement_circuit(enc4, lp).gates if x.kind == "CP"]
    residues = [product([PauliOp.single(enc4.n_data, x.qubits[0], x.paulis[0]) for x in cps[k:]])
                for k in range(1, len(cps))]
    silent = sum(not any(syndrome(enc4, r)) for r in residues)
    ok = interior and not mismatches and len(residues) == 5 and not silent
    report(4, ok, f"{len(interior)} interior vertices, {mismatches} mismatches, "
                  f"{len(residues)} residues, {silent} silent", t0, 1.0)


def test_criterion_5_logical_tables(enc4):
    t0 = time.perf_counter()
    g = enc4.graph
    wrong = []
    for e in g.straight_edges:
        found = {p.restrict(pair_qubits(enc4, e.j, e.k)).label()
                 for _, p in enumerate_two_vertex_logicals(enc4, e)}
        doubled = [x for x in g.doubled_edges if {x.j, x.k} == {e.j, e.k}]
        want = set(SINGLE_EDGE[e.kind])
        if doubled:
            want |= DOUBLED_EXTRA[doubled[0].kind]
        if found != want or len(found) != (15 if doubled else 7):
            wrong.append(e.index)
    report(5, not wrong, f"{len(g.straight_edges)} edges, wrong: {wrong}", t0, 1.0)


def test_criterion_6_gadget_faults(enc4):
    t0 = time.perf_counter()
    rep = audit_gadgets(enc4, native_two_qubit=True)
    ok = rep["ok"] and not rep["undetectable"] and not rep["exceptions"]
    report(6, ok, f"{rep['gadgets']} gadgets, totals {rep['totals']}", t0, 60.0)


def test_criterion_7_negative_control(enc4):
    t0 = time.perf_counter()
    rep = audit_gadgets(enc4, native_two_qubit=False)
    stray = [e for e in rep["exceptions"] if not e["central"]]
    hit = {(e["connectivity"], e["gadget"]) for e in rep["exceptions"]}
    evolutions = {(conn, name) for conn in ("full", "reduced")
                  for name, _ in gadget_instances(enc4, conn, False)
                  if not name.startswith(("syndrome", "bj"))}
    ok = rep["exceptions"] and not stray and hit == evolutions and not rep["undetectable"]
    report(7, ok, f"{len(rep['exceptions'])} exceptions, {len(stray)} off-centre, "
                  f"{len(hit)}/{len(evolutions)} evolutions affected", t0, 60.0)


def test_criterion_8_cost_table():
    t0 = time.perf_counter()
    zero = {(4, 4): 170, (8, 8): 650, (16, 16): 2570}
    ok = True
    notes = []
    for (m, n), want in zero.items():
        row = an.cost_table(m, n, construct=(m == 4))
        ok &= row["zero_state_gates"] == want and row["zero_state_depth"] == 10
        ok &= row["error_detected_gates"] - row["vqe_gates"] == want + 4 * m * n
        ok &= row["vqe_gates"] == want + 2 * row["ansatz_gates"]
        if m == 4:
            ok &= row["zero_state_gates_built"] <= want
            notes.append(f"depth built {row['zero_state_depth_built']} vs claim "
                         f"{row['zero_state_depth_claim']}")
            notes.append(f"ansatz built {row['ansatz_gates_built']}, reference "
                         f"{row['ansatz_gates_reference']}, forms "
                         f"{row['ansatz_gates_sum_form']}/{row['ansatz_gates_polynomial_form']}")
    report(8, ok, "; ".join(notes), t0, 5.0)


def _close(got, want):
    # one unit in the last printed digit
    digits = len(f"{want}".split(".")[1]) if isinstance(want, float) else 0
    return abs(got - want) <= 10 ** -digits + 1e-12


def test_criterion_9_threshold_tables():
    t0 = time.perf_counter()
    success = {4: (0.999544, 0.106224, 0.952029, 0.046584, 0.993882),
               8: (0.999891, 0.089902, 0.801716, 0.173999, 0.953170),
               16: (0.999974, 0.088331, 0.393244, 0.341570, 0.555822)}
    optimistic = {4: ("47/48", 0.991762, 0.999760), 8: ("191/192", 0.997103, 0.999899),
                  16: ("767/768", 0.999076, 0.999963)}
    budget = [192, 1934, 19355, 193559, 261, 2627, 26286, 262873,
              330, 3320, 33217, 332187]
    bad = []
    for row in an.threshold_table():
        got = (row["threshold_s"], row["threshold_p_g"], row["p_g"], row["p_d"], row["p_g_ed"])
        bad += [(row["m"], g, w) for g, w in zip(got, success[row["m"]]) if not _close(g, w)]
    for row in an.optimistic_table():
        frac, s_arb, s_req = optimistic[row["m"]]
        bad += [(row["m"], row["p_a"])] if row["p_a"] != frac else []
        bad += [(row["m"], g, w) for g, w in ((row["threshold_s"], s_arb),
                                             (row["target_s"], s_req)) if not _close(g, w)]
    got_budget = [r["d_b"] for r in an.budget_table()]
    if got_budget != budget:
        bad.append(("budget", got_budget))
    report(9, not bad, f"{len(bad)} mismatches {bad[:3]}", t0, 1.0)


def test_criterion_10_monte_carlo(enc4):
    t0 = time.perf_counter()
    s, trials = 0.99999, 200_000
    circ = error_detected_circuit(enc4, REDUCED)
    st = monte_carlo(circ, enc4, s, trials, seed=1)
    exact = st.p_computation_clean_exact
    sigma = math.sqrt(exact * (1 - exact) / trials)
    z = (st.p_computation_clean - exact) / sigma
    dgf = st.detected_given_faulty
    ok = abs(z) <= 3 and dgf >= 0.9
    report(10, ok, f"no-fault {st.p_computation_clean:.6f} vs s^{st.computation_locations} "
                   f"= {exact:.6f} ({z:+.2f} sigma); detected|faulty {dgf:.4f}; "
                   f"p_a {st.p_a:.4f} vs 47/48 = {47 / 48:.4f}", t0, 300.0)


def test_criterion_11_sign_fixing(enc4):
    t0 = time.perf_counter()
    rng = random.Random(2024)
    loops = [lp.index for lp in enc4.graph.loops]
    failures = 0
    for _ in range(100):
        defect = set(rng.sample(loops, 2 * rng.randint(1, len(loops) // 2)))
        fixed = fix_signs(enc4, defect)
        flipped = {i for i in loops if fixed.loop_sign(i) != enc4.loop_sign(i)}
        failures += flipped != defect
    report(11, not failures, f"{failures}/100 sets wrong", t0, 5.0)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
