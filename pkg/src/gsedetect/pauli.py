"""Exact n-qubit Pauli arithmetic in symplectic form.

A :class:`PauliOp` stores an X bit mask, a Z bit mask and a global phase
``i**phase``. Bit ``q`` of each mask refers to qubit ``q``; in text labels qubit
0 is the leftmost character, so ``PauliOp.parse("XZ")`` has X on qubit 0.

The public ``phase`` is relative to the Hermitian single-qubit basis
``{I, X, Y, Z}``: ``-YXZI`` has phase 2 and ``X * Z == -iY`` has phase 3.
Internally products are computed in the ``X^x Z^z`` basis, where ``Y = i X Z``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

_LABEL_RE = re.compile(r"^\s*([+-]?)(i?)([IXYZ_]*)\s*$")
_SYMBOLS = "IXZY"  # index = x | (z << 1)


class PauliParseError(ValueError):
    """Raised for malformed Pauli labels."""


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliOp:
    """Immutable ``n_qubits`` Pauli operator ``i**phase * P_0 (x) P_1 (x) ...``."""

    n_qubits: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        limit = 1 << self.n_qubits
        if self.n_qubits < 0 or not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError("Pauli masks do not fit in n_qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    # -- construction -------------------------------------------------------

    @classmethod
    def identity(cls, n_qubits: int) -> PauliOp:
        return cls(n_qubits)

    @classmethod
    def parse(cls, label: str, sign: int | complex | None = None) -> PauliOp:
        """Parse labels such as ``"IYXZYXZI"``, ``"-YXZI"`` or ``"iZI"``.

        Args:
            label: optional ``+``/``-`` and ``i`` prefix followed by I, X, Y, Z.
            sign: optional extra scalar in {1, -1, 1j, -1j} multiplied in.
        """
        m = _LABEL_RE.match(label)
        if m is None:
            raise PauliParseError(f"invalid Pauli label {label!r}")
        minus, imag, body = m.groups()
        phase = (2 if minus == "-" else 0) + (1 if imag else 0)
        if sign is not None:
            phase += _scalar_to_phase(sign)
        x = z = 0
        for q, ch in enumerate(body):
            if ch in "XY":
                x |= 1 << q
            if ch in "ZY":
                z |= 1 << q
        return cls(len(body), x, z, phase)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, symbol: str) -> PauliOp:
        """Weight-one operator ``symbol`` on ``qubit``."""
        return cls.from_sparse(n_qubits, {qubit: symbol})

    @classmethod
    def from_sparse(cls, n_qubits: int, terms: dict[int, str], phase: int = 0) -> PauliOp:
        x = z = 0
        for q, ch in terms.items():
            if ch not in "IXYZ":
                raise PauliParseError(f"invalid Pauli symbol {ch!r}")
            if ch in "XY":
                x |= 1 << q
            if ch in "ZY":
                z |= 1 << q
        return cls(n_qubits, x, z, phase)

    # -- algebra ------------------------------------------------------------

    def _check(self, other: PauliOp):
        if self.n_qubits != other.n_qubits:
            raise ValueError(
                f"size mismatch: {self.n_qubits} vs {other.n_qubits} qubits"
            )

    def __mul__(self, other: PauliOp) -> PauliOp:
        if not isinstance(other, PauliOp):
            return NotImplemented
        self._check(other)
        # phases in the X^x Z^z basis, then Z.X reordering signs
        ph = (
            self.phase + _popcount(self.x & self.z)
            + other.phase + _popcount(other.x & other.z)
            + 2 * _popcount(self.z & other.x)
        )
        x = self.x ^ other.x
        z = self.z ^ other.z
        return PauliOp(self.n_qubits, x, z, ph - _popcount(x & z))

    def commutes(self, other: PauliOp) -> bool:
        self._check(other)
        return _popcount((self.x & other.z) ^ (self.z & other.x)) % 2 == 0

    def __neg__(self) -> PauliOp:
        return PauliOp(self.n_qubits, self.x, self.z, self.phase + 2)

    def times_phase(self, k: int) -> PauliOp:
        """Multiply by ``i**k``."""
        return PauliOp(self.n_qubits, self.x, self.z, self.phase + k)

    def unsigned(self) -> PauliOp:
        return PauliOp(self.n_qubits, self.x, self.z, 0)

    def same_up_to_phase(self, other: PauliOp) -> bool:
        return self.n_qubits == other.n_qubits and self.x == other.x and self.z == other.z

    @property
    def support(self) -> int:
        return self.x | self.z

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def is_identity(self) -> bool:
        """True when the operator is a scalar multiple of the identity."""
        return (self.x | self.z) == 0

    @property
    def is_hermitian(self) -> bool:
        return self.phase in (0, 2)

    @property
    def sign(self) -> complex:
        return (1, 1j, -1, -1j)[self.phase]

    def symbol(self, qubit: int) -> str:
        return _SYMBOLS[((self.x >> qubit) & 1) | (((self.z >> qubit) & 1) << 1)]

    def qubits(self) -> list[int]:
        s = self.support
        return [q for q in range(self.n_qubits) if (s >> q) & 1]

    def restrict(self, qubits: Iterable[int]) -> PauliOp:
        """The tensor factors on ``qubits`` (in the given order), phase dropped."""
        qubits = list(qubits)
        return PauliOp.from_sparse(
            len(qubits), {i: self.symbol(q) for i, q in enumerate(qubits)}
        )

    def embed(self, n_qubits: int, qubits: Iterable[int]) -> PauliOp:
        """Place this operator's factors on ``qubits`` of a larger register."""
        qubits = list(qubits)
        if len(qubits) != self.n_qubits:
            raise ValueError("need one target qubit per factor")
        terms = {qubits[i]: self.symbol(i) for i in range(self.n_qubits)}
        return PauliOp.from_sparse(n_qubits, terms, self.phase)

    # -- text ---------------------------------------------------------------

    def label(self) -> str:
        return "".join(self.symbol(q) for q in range(self.n_qubits))

    def format(self) -> str:
        """Label with sign prefix, the inverse of :meth:`parse`."""
        return ("", "i", "-", "-i")[self.phase] + self.label()

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"PauliOp({self.format()!r})"


def parse(label: str, sign: int | complex | None = None) -> PauliOp:
    return PauliOp.parse(label, sign)


def multiply(a: PauliOp, b: PauliOp) -> PauliOp:
    return a * b


def commutes(a: PauliOp, b: PauliOp) -> bool:
    return a.commutes(b)


def weight(a: PauliOp) -> int:
    return a.weight


def product(ops: Iterable[PauliOp], n_qubits: int | None = None) -> PauliOp:
    """Ordered product ``ops[0] * ops[1] * ...``."""
    result = None
    for op in ops:
        result = op if result is None else result * op
    if result is None:
        if n_qubits is None:
            raise ValueError("empty product needs n_qubits")
        return PauliOp.identity(n_qubits)
    return result


def _scalar_to_phase(sign) -> int:
    table = {1: 0, 1j: 1, -1: 2, -1j: 3}
    try:
        return table[complex(sign)]
    except KeyError:
        raise PauliParseError(f"sign must be one of 1, -1, 1j, -1j, got {sign!r}") from None
