"""Pauli-frame fault propagation, exhaustive single-fault enumeration and
Monte Carlo fault injection.

Frames are tracked as a pair of integer bit masks ``(x, z)`` over the whole
register; global phases are irrelevant for detection and are dropped. The
exact, phase-carrying rule for a single gate is :func:`conjugate_through`.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .circuits import Circuit, Gate, expand_swaps
from .encoding import DETECTABLE, LOGICAL, STABILIZER, TRIVIAL, Encoding
from .pauli import PauliOp

BENIGN = "benign"
DETECTED = "detected_by_measurement"
DETECTABLE_LATER = "detectable_later"
UNDETECTABLE = "undetectable_logical"
EXCEPTION = "evolved_operator_exception"
VERDICTS = (BENIGN, DETECTED, DETECTABLE_LATER, UNDETECTABLE, EXCEPTION)

_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def _anti(x: int, z: int, q: int, p: str) -> int:
    """1 if the frame component on qubit ``q`` anticommutes with Pauli ``p``."""
    px, pz = _BITS[p]
    return (((x >> q) & 1) & pz) ^ (((z >> q) & 1) & px)


def _put(x: int, z: int, q: int, p: str) -> tuple[int, int]:
    px, pz = _BITS[p]
    return x ^ (px << q), z ^ (pz << q)


# -- exact single-gate rule ---------------------------------------------------

def conjugate_through(gate: Gate, p: PauliOp) -> tuple[PauliOp, bool]:
    """Image ``G p G^dagger`` of a Pauli error pushed through one gate.

    Evolutions leave the error unchanged; an error anticommuting with the
    evolved Pauli reverses the sign of the angle, reported as
    ``time_reversal``. PREP and MZ are not unitary and are rejected here.
    """
    n = p.n_qubits
    if gate.kind == "CP":
        (a, b), (pc, rt) = gate.qubits, gate.paulis
        ea = PauliOp.single(n, a, p.symbol(a))
        eb = PauliOp.single(n, b, p.symbol(b))
        rest = PauliOp(n, p.x & ~((1 << a) | (1 << b)), p.z & ~((1 << a) | (1 << b)), p.phase)
        img_a = ea * PauliOp.single(n, b, rt) if not ea.commutes(PauliOp.single(n, a, pc)) else ea
        img_b = PauliOp.single(n, a, pc) * eb if not eb.commutes(PauliOp.single(n, b, rt)) else eb
        return rest * img_a * img_b, False
    if gate.kind == "H":
        (q,) = gate.qubits
        s = p.symbol(q)
        mapped = {"I": "I", "X": "Z", "Z": "X", "Y": "Y"}[s]
        rest = PauliOp(n, p.x & ~(1 << q), p.z & ~(1 << q), p.phase + (2 if s == "Y" else 0))
        return rest * PauliOp.single(n, q, mapped), False
    if gate.kind == "SWAP":
        a, b = gate.qubits
        sa, sb = p.symbol(a), p.symbol(b)
        mask = ~((1 << a) | (1 << b))
        rest = PauliOp(n, p.x & mask, p.z & mask, p.phase)
        return rest * PauliOp.from_sparse(n, {a: sb, b: sa}), False
    if gate.kind in ("EV1", "EV2"):
        ev = PauliOp.from_sparse(n, dict(zip(gate.qubits, gate.paulis)))
        return p, not p.commutes(ev)
    raise ValueError(f"{gate.kind} is not a unitary gate")


# -- frame stepping -----------------------------------------------------------

def _step(g: Gate, x: int, z: int):
    """Advance the frame through ``g``: returns ``(x, z, flipped, reversed)``."""
    k = g.kind
    if k == "CP":
        (a, b), (pc, rt) = g.qubits, g.paulis
        fa = _anti(x, z, a, pc)
        fb = _anti(x, z, b, rt)
        if fa:
            x, z = _put(x, z, b, rt)
        if fb:
            x, z = _put(x, z, a, pc)
        return x, z, False, False
    if k == "SWAP":
        a, b = g.qubits
        xa, xb = (x >> a) & 1, (x >> b) & 1
        za, zb = (z >> a) & 1, (z >> b) & 1
        if xa != xb:
            x ^= (1 << a) | (1 << b)
        if za != zb:
            z ^= (1 << a) | (1 << b)
        return x, z, False, False
    if k == "H":
        (q,) = g.qubits
        xq, zq = (x >> q) & 1, (z >> q) & 1
        if xq != zq:
            x ^= 1 << q
            z ^= 1 << q
        return x, z, False, False
    if k in ("EV1", "EV2"):
        anti = 0
        for q, p in zip(g.qubits, g.paulis):
            anti ^= _anti(x, z, q, p)
        return x, z, False, bool(anti)
    if k == "PREP":
        (q,) = g.qubits
        return x & ~(1 << q), z & ~(1 << q), False, False
    if k == "MZ":
        (q,) = g.qubits
        flipped = bool((x >> q) & 1)
        return x & ~(1 << q), z & ~(1 << q), flipped, False
    raise ValueError(k)


def _fresh_state(circuit: Circuit, upto: int) -> dict[int, str]:
    """Qubits known to sit in ``|0>`` ("Z") or ``|+>`` ("X") before gate ``upto``."""
    state: dict[int, str] = {}
    for g in circuit.gates[:upto]:
        if g.kind == "PREP":
            state[g.qubits[0]] = "Z"
        elif g.kind == "H" and g.qubits[0] in state:
            state[g.qubits[0]] = "X" if state[g.qubits[0]] == "Z" else "Z"
        else:
            for q in g.qubits:
                state.pop(q, None)
    return state


@dataclass(frozen=True)
class FaultEvent:
    """A Pauli fault at ``position`` ("before"/"after") gate ``gate``.

    ``partner`` names a second qubit receiving the same Pauli, used for the
    correlated two-qubit faults a SWAP spreads a single error into.
    """

    gate: int
    position: str
    qubit: int
    pauli: str
    partner: int | None = None

    def __post_init__(self):
        if self.position not in ("before", "after"):
            raise ValueError("position must be 'before' or 'after'")
        if self.pauli not in ("X", "Y", "Z"):
            raise ValueError("pauli must be X, Y or Z")

    @property
    def slot(self) -> int:
        """Index of the first gate that acts after the fault."""
        return self.gate if self.position == "before" else self.gate + 1

    def to_dict(self) -> dict:
        d = {"gate": self.gate, "position": self.position, "qubit": self.qubit,
             "pauli": self.pauli}
        if self.partner is not None:
            d["partner"] = self.partner
        return d


@dataclass(frozen=True)
class FaultOutcome:
    event: FaultEvent
    residual_data: PauliOp
    ancilla_flips: frozenset
    time_reversal: bool
    verdict: str

    def to_dict(self) -> dict:
        return {
            "event": self.event.to_dict(),
            "residual": self.residual_data.label(),
            "flips": sorted(self.ancilla_flips),
            "time_reversal": self.time_reversal,
            "verdict": self.verdict,
        }


def _classify_residual(enc: Encoding, residual: PauliOp, evolved: PauliOp | None) -> str:
    cls = enc.classify(residual)
    if cls in (TRIVIAL, STABILIZER):
        return BENIGN
    if cls == DETECTABLE:
        return DETECTABLE_LATER
    assert cls == LOGICAL
    if evolved is not None and residual.same_up_to_phase(evolved):
        return EXCEPTION
    return UNDETECTABLE


def run_frame(circuit: Circuit, x: int, z: int, start: int = 0):
    """Push a frame from gate ``start`` to the end; return ``(x, z, flips, reversed)``."""
    flips = []
    reversed_at = []
    for i in range(start, len(circuit.gates)):
        x, z, f, tr = _step(circuit.gates[i], x, z)
        if f:
            flips.append(i)
        if tr:
            reversed_at.append(i)
    return x, z, flips, reversed_at


def propagate(circuit: Circuit, event: FaultEvent, enc: Encoding) -> FaultOutcome:
    """Inject ``event`` and push it through the rest of ``circuit``.

    A component that acts trivially on a freshly prepared qubit (Z on
    ``|0>``, X on ``|+>``) is dropped at injection time.
    """
    fresh = _fresh_state(circuit, event.slot)
    x = z = 0
    for q in (event.qubit,) if event.partner is None else (event.qubit, event.partner):
        p = event.pauli
        if fresh.get(q) == "Z":
            p = {"X": "X", "Y": "X", "Z": "I"}[p]
        elif fresh.get(q) == "X":
            p = {"X": "I", "Y": "Z", "Z": "Z"}[p]
        x, z = _put(x, z, q, p)
    x, z, flips, rev = run_frame(circuit, x, z, event.slot)
    mask = (1 << circuit.n_data) - 1
    residual = PauliOp(circuit.n_data, x & mask, z & mask)
    if flips:
        verdict = DETECTED
    else:
        verdict = _classify_residual(enc, residual, circuit.meta.get("evolved"))
    return FaultOutcome(event, residual, frozenset(flips), bool(rev), verdict)


def fault_events(circuit: Circuit, swap_faults: bool = True):
    """All single-qubit X/Y/Z faults before and after each gate on its qubits,
    plus same-Pauli pairs on both SWAP qubits when ``swap_faults`` is set."""
    for i, g in enumerate(circuit.gates):
        for pos in ("before", "after"):
            if pos == "after" and g.kind == "MZ":
                continue
            for q in g.qubits:
                for p in "XYZ":
                    yield FaultEvent(i, pos, q, p)
        if swap_faults and g.kind == "SWAP":
            a, b = g.qubits
            for p in "XYZ":
                yield FaultEvent(i, "after", a, p, partner=b)


@dataclass
class FaultReport:
    outcomes: list
    summary: Counter = field(default_factory=Counter)

    @property
    def undetectable(self) -> list:
        return [o for o in self.outcomes if o.verdict == UNDETECTABLE]

    @property
    def exceptions(self) -> list:
        return [o for o in self.outcomes if o.verdict == EXCEPTION]

    def to_jsonl(self) -> str:
        return "\n".join(json.dumps(o.to_dict()) for o in self.outcomes) + "\n"


def enumerate_single_faults(circuit: Circuit, enc: Encoding, swap_faults: bool = True,
                            expand: bool | str = False) -> FaultReport:
    """Propagate every single fault of :func:`fault_events` and tally verdicts.

    Args:
        swap_faults: also inject the correlated ``QQ`` faults of each SWAP.
        expand: rewrite SWAPs as three controlled-Pauli gates first, so faults
            between them are enumerated directly. ``True`` means CNOTs; a
            string picks a style of :func:`~gsedetect.circuits.expand_swaps`.
    """
    if expand:
        circuit = expand_swaps(circuit, "cnot" if expand is True else expand)
    outcomes = [propagate(circuit, ev, enc) for ev in fault_events(circuit, swap_faults)]
    return FaultReport(outcomes, Counter(o.verdict for o in outcomes))


def at_central_evolve(circuit: Circuit, event: FaultEvent) -> bool:
    """True if the fault sits on an evolution gate's qubit with no two-qubit
    gate on that qubit between the fault and the evolution."""
    gates = circuit.gates
    evs = [i for i, g in enumerate(gates) if g.kind in ("EV1", "EV2")]
    for e in evs:
        if event.qubit not in gates[e].qubits:
            continue
        lo, hi = sorted((event.slot, e))
        if event.slot > e:
            lo, hi = e + 1, event.slot
        between = gates[lo:hi]
        if not any(g.two_qubit and event.qubit in g.qubits for g in between):
            return True
    return False


# -- Heisenberg check of measurement circuits ---------------------------------

def measured_observable(circuit: Circuit, index: int) -> PauliOp | None:
    """Operator on the initial state that the MZ at ``index`` reveals, up to sign.

    The measured Z is pulled back gate by gate (every unitary in the gate set
    is self-inverse at the frame level). At a qubit's PREP a Z factor is
    dropped since it reads +1 on ``|0>``; an X or Y factor there makes the
    outcome random and None is returned. Evolution gates are not allowed.
    """
    g = circuit.gates[index]
    if g.kind != "MZ":
        raise ValueError(f"gate {index} is not a measurement")
    q0 = g.qubits[0]
    x, z = 0, 1 << q0
    for gate in reversed(circuit.gates[:index]):
        k = gate.kind
        if k in ("EV1", "EV2"):
            raise ValueError("cannot pull a measurement back through an evolution")
        if k in ("PREP", "MZ"):
            (q,) = gate.qubits
            if (x >> q) & 1:
                return None
            if k == "PREP":
                z &= ~(1 << q)
            continue
        x, z, _, _ = _step(gate, x, z)
    return PauliOp(circuit.n_qubits, x, z)


# -- Monte Carlo fault injection ----------------------------------------------

_XZ = ((1, 0), (0, 1))


@dataclass(frozen=True)
class EffectTable:
    """Linear effect of a Pauli fault after each two-qubit gate.

    Each effect is a Python int holding three bit fields: one bit per MZ
    (outcome flip), one per evolution gate (angle sign flip) and one per
    generator of the stabilizer group's centralizer (the residual leaves the
    stabilizer group iff any of these is set).

    Attributes:
        locations: ``(gate index, qubit)`` per fault location.
        rows: ``(effect of X, effect of Z)`` per location.
    """

    locations: tuple
    rows: tuple
    n_meas: int
    n_ev: int
    n_sig: int
    meas_gates: tuple

    @property
    def meas_mask(self) -> int:
        return (1 << self.n_meas) - 1

    @property
    def ev_mask(self) -> int:
        return ((1 << self.n_ev) - 1) << self.n_meas

    @property
    def sig_mask(self) -> int:
        return ((1 << self.n_sig) - 1) << (self.n_meas + self.n_ev)


def _centralizer_basis(enc: Encoding) -> list[int]:
    from .gf2 import nullspace

    n = enc.n_data
    # v commutes with s iff popcount(v & swap_xz(s)) is even
    rows = [s.z | (s.x << n) for s in enc.stabilizers]
    return nullspace(rows, 2 * n)


def effect_table(circuit: Circuit, enc: Encoding) -> EffectTable:
    """Sweep the circuit backwards once, tabulating every fault location."""
    gates = circuit.gates
    meas = [i for i, g in enumerate(gates) if g.kind == "MZ"]
    evs = [i for i, g in enumerate(gates) if g.kind in ("EV1", "EV2")]
    mbit = {i: 1 << k for k, i in enumerate(meas)}
    ebit = {i: 1 << (len(meas) + k) for k, i in enumerate(evs)}
    cent = _centralizer_basis(enc)
    off = len(meas) + len(evs)
    n, nd = circuit.n_qubits, enc.n_data

    table = [[0, 0] for _ in range(n)]
    for q in range(nd):
        for p, (px, pz) in enumerate(_XZ):
            v = (px << q) | (pz << (q + nd))
            sig = 0
            for k, c in enumerate(cent):
                sig |= (bin(v & c).count("1") & 1) << k
            table[q][p] = sig << off

    def effect(x, z):
        out = 0
        while x:
            low = x & -x
            out ^= table[low.bit_length() - 1][0]
            x ^= low
        while z:
            low = z & -z
            out ^= table[low.bit_length() - 1][1]
            z ^= low
        return out

    locations, rows = [], []
    for i in range(len(gates) - 1, -1, -1):
        g = gates[i]
        if g.two_qubit:
            for q in g.qubits:
                locations.append((i, q))
                rows.append((table[q][0], table[q][1]))
        k = g.kind
        if k == "MZ":
            (q,) = g.qubits
            table[q] = [mbit[i], 0]
        elif k == "PREP":
            table[g.qubits[0]] = [0, 0]
        elif k in ("EV1", "EV2"):
            for q, p in zip(g.qubits, g.paulis):
                px, pz = _BITS[p]
                # X anticommutes with p iff p has a Z part, and vice versa
                if pz:
                    table[q][0] ^= ebit[i]
                if px:
                    table[q][1] ^= ebit[i]
        else:
            new = {}
            for q in g.qubits:
                for p, (px, pz) in enumerate(_XZ):
                    x, z, _, _ = _step(g, px << q, pz << q)
                    new[q, p] = effect(x, z)
            for (q, p), v in new.items():
                table[q][p] = v
    locations.reverse()
    rows.reverse()
    return EffectTable(tuple(locations), tuple(rows), len(meas), len(evs), len(cent),
                       tuple(meas))


def binomial_half_width(rate: float, n: int, z: float = 1.96) -> float:
    """Normal-approximation confidence half-width of a binomial rate."""
    if not n or math.isnan(rate):
        return math.nan
    return z * math.sqrt(rate * (1.0 - rate) / n)


@dataclass
class DetectionStats:
    """Monte Carlo tallies for one success rate ``s``.

    ``accepted`` trials raised no detection; ``accepted_faulty`` were also
    wrong. ``p_a`` is the detection rate among trials with at least one
    fault in the computation and none in the error-detection segment;
    ``p_a_harmful`` restricts those trials to ones whose faults would leave a
    wrong result.
    """

    s: float
    trials: int
    seed: int
    locations: int
    computation_locations: int
    clean: int = 0
    clean_computation: int = 0
    detected: int = 0
    accepted_faulty: int = 0
    p_a_trials: int = 0
    p_a_detected: int = 0
    p_a_harmful_trials: int = 0
    p_a_harmful_detected: int = 0
    faulty: int = 0
    faulty_detected: int = 0

    @property
    def accepted(self) -> int:
        return self.trials - self.detected

    @property
    def undetected_faulty(self) -> int:
        return self.accepted_faulty

    @property
    def undetected_correct(self) -> int:
        return self.accepted - self.accepted_faulty

    @property
    def p_a(self) -> float:
        return self.p_a_detected / self.p_a_trials if self.p_a_trials else math.nan

    @property
    def p_a_harmful(self) -> float:
        """Like :attr:`p_a` but only over faults that would corrupt an accepted result."""
        if not self.p_a_harmful_trials:
            return math.nan
        return self.p_a_harmful_detected / self.p_a_harmful_trials

    @property
    def detected_given_faulty(self) -> float:
        """Detection rate over every trial whose faults would leave a wrong result."""
        return self.faulty_detected / self.faulty if self.faulty else math.nan

    @property
    def p_g_empirical(self) -> float:
        return self.clean / self.trials

    @property
    def p_computation_clean(self) -> float:
        return self.clean_computation / self.trials

    @property
    def p_computation_clean_exact(self) -> float:
        return self.s ** self.computation_locations

    @property
    def accepted_error_rate(self) -> float:
        return self.accepted_faulty / self.accepted if self.accepted else math.nan

    def to_dict(self) -> dict:
        return {
            "s": self.s, "trials": self.trials, "seed": self.seed,
            "locations": self.locations, "computation_locations": self.computation_locations,
            "clean": self.clean, "detected": self.detected,
            "undetected_correct": self.undetected_correct,
            "undetected_faulty": self.undetected_faulty,
            "p_g_empirical": self.p_g_empirical,
            "p_g_empirical_hw": binomial_half_width(self.p_g_empirical, self.trials),
            "p_a": self.p_a, "p_a_trials": self.p_a_trials, "p_a_harmful": self.p_a_harmful,
            "faulty": self.faulty, "detected_given_faulty": self.detected_given_faulty,
            "detected_given_faulty_hw": binomial_half_width(self.detected_given_faulty,
                                                            self.faulty),
            "p_computation_clean": self.p_computation_clean,
            "p_computation_clean_exact": self.p_computation_clean_exact,
            "accepted_error_rate": self.accepted_error_rate,
        }


def _detection_masks(circuit: Circuit, table: EffectTable):
    """Bit masks: loop-round pairs (parity checked), B_j outcomes, stand-alone flags."""
    segs = circuit.meta.get("segments", {})
    pos = {g: k for k, g in enumerate(table.meas_gates)}

    def in_seg(i, name):
        lo, hi = segs.get(name, (0, 0))
        return lo <= i < hi

    rounds: dict[int, int] = {}
    bj = flags = 0
    for i in table.meas_gates:
        q = circuit.gates[i].qubits[0]
        bit = 1 << pos[i]
        if in_seg(i, "state_prep") or in_seg(i, "detection"):
            rounds[q] = rounds.get(q, 0) | bit
        elif in_seg(i, "bj"):
            bj |= bit
        else:
            flags |= bit
    return list(rounds.values()), bj, flags


def monte_carlo(circuit: Circuit, enc: Encoding, s: float, trials: int, seed: int = 0,
                count_bj: bool = False, block_size: int = 10000,
                table: EffectTable | None = None) -> DetectionStats:
    """Inject independent faults after two-qubit gates and tally detection.

    Each qubit of each two-qubit gate fails with probability ``1 - s``,
    followed by a uniform X, Y or Z. Trials are generated in blocks keyed by
    ``(seed, block)`` so results do not depend on how a run is split.

    Args:
        circuit: an :func:`~gsedetect.gadgets.error_detected_circuit`.
        count_bj: treat a flipped B_j outcome as a detection instead of as a
            wrong result.
    """
    if not 0.0 < s <= 1.0:
        raise ValueError("s must lie in (0, 1]")
    if table is None:
        table = effect_table(circuit, enc)
    segs = circuit.meta.get("segments", {})
    comp_end = segs.get("computation", (0, len(circuit.gates)))[1]
    round_masks, bj_mask, flag_mask = _detection_masks(circuit, table)
    n_loc = len(table.locations)
    in_comp = np.array([g < comp_end for g, _ in table.locations])
    n_comp = int(in_comp.sum())
    wrong_mask = table.sig_mask | table.ev_mask | (0 if count_bj else bj_mask)
    detect_extra = flag_mask | (bj_mask if count_bj else 0)
    rows = table.rows

    stats = DetectionStats(s, trials, seed, n_loc, n_comp)
    done = 0
    block = 0
    while done < trials:
        size = min(block_size, trials - done)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))
        counts = rng.binomial(n_loc, 1.0 - s, size=size)
        stats.clean += int((counts == 0).sum())
        for t in np.nonzero(counts)[0]:
            k = int(counts[t])
            where = rng.choice(n_loc, size=k, replace=False)
            kinds = rng.integers(0, 3, size=k)  # X, Z, Y
            v = 0
            for loc, kind in zip(where.tolist(), kinds.tolist()):
                rx, rz = rows[loc]
                v ^= rx if kind == 0 else rz if kind == 1 else rx ^ rz
            comp = int(in_comp[where].sum())
            detected = bool(v & detect_extra) or any(
                bin(v & m).count("1") & 1 for m in round_masks)
            if comp == 0:
                stats.clean_computation += 1
            elif comp == k:
                stats.p_a_trials += 1
                stats.p_a_detected += detected
                if v & wrong_mask:
                    stats.p_a_harmful_trials += 1
                    stats.p_a_harmful_detected += detected
            if v & wrong_mask:
                stats.faulty += 1
                stats.faulty_detected += detected
            if detected:
                stats.detected += 1
            elif v & wrong_mask:
                stats.accepted_faulty += 1
        stats.clean_computation += int((counts == 0).sum())
        done += size
        block += 1
    return stats
