"""Incremental GF(2) row reduction on Python-int bit vectors."""

from __future__ import annotations

import bisect


class XorBasis:
    """Linear span over GF(2), tracking which inserted vectors build each row.

    Each inserted vector gets a tag bit; :meth:`reduce` returns the remainder
    together with the tag mask of the inserted vectors whose sum was removed.
    """

    def __init__(self):
        self._rows: dict[int, tuple[int, int]] = {}  # top bit -> (vector, tags)
        self._pivots: list[int] = []  # ascending
        self._count = 0

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def inserted(self) -> int:
        return self._count

    def reduce(self, vec: int) -> tuple[int, int]:
        tags = 0
        for pivot in reversed(self._pivots):
            if (vec >> pivot) & 1:
                v, t = self._rows[pivot]
                vec ^= v
                tags ^= t
        return vec, tags

    def add(self, vec: int) -> bool:
        """Insert ``vec``; return False if it was already in the span."""
        tag = 1 << self._count
        self._count += 1
        rest, tags = self.reduce(vec)
        if rest == 0:
            return False
        top = rest.bit_length() - 1
        self._rows[top] = (rest, tags ^ tag)
        bisect.insort(self._pivots, top)
        return True

    def contains(self, vec: int) -> bool:
        return self.reduce(vec)[0] == 0


def rank(vectors) -> int:
    basis = XorBasis()
    for v in vectors:
        basis.add(v)
    return len(basis)


def nullspace(rows, n_bits: int) -> list[int]:
    """Basis of ``{v : popcount(v & r) even for every r in rows}`` over ``n_bits`` bits."""
    pivots: dict[int, int] = {}  # pivot column -> fully reduced row
    for r in rows:
        for col, pr in pivots.items():
            if (r >> col) & 1:
                r ^= pr
        if not r:
            continue
        col = r.bit_length() - 1
        for c2 in list(pivots):
            if (pivots[c2] >> col) & 1:
                pivots[c2] ^= r
        pivots[col] = r
    basis = []
    for free in range(n_bits):
        if free in pivots:
            continue
        v = 1 << free
        for col, pr in pivots.items():
            if (pr >> free) & 1:
                v |= 1 << col
        basis.append(v)
    return basis
