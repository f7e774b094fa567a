"""Hubbard interaction graphs with oriented edges, plaquettes and bigons.

Two topologies are supported:

* ``planar_doubled``: an ``m x n`` grid whose boundary vertices are paired by
  extra zero-weight "doubled" edges so that every vertex has degree four.
* ``torus``: an ``m x n`` grid with periodic boundaries.

Vertices are numbered row-major from the top-left corner. Every edge is
stored once, oriented from ``j`` to ``k`` (so ``eps(j, k) = +1``). Straight
edges point left to right and top to bottom; doubled edges point against the
straight edge they run alongside.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

DIRECTIONS = ("left", "up", "right", "down")
# half-edge direction -> generalized Majorana index
HALF_EDGE_GAMMA = {"left": 1, "up": 2, "down": 3, "right": 4}

STRAIGHT_KINDS = ("horizontal", "vertical")
DOUBLED_KINDS = ("doubled_top", "doubled_bottom", "doubled_left", "doubled_right")


class LatticeError(ValueError):
    """Invalid lattice dimensions or queries."""


@dataclass(frozen=True)
class Edge:
    """Oriented edge ``j -> k``.

    Attributes:
        j, k: endpoint vertex indices, oriented ``j -> k``.
        kind: one of ``STRAIGHT_KINDS + DOUBLED_KINDS``.
        dir_j, dir_k: half-edge direction used at each endpoint.
        interacting: False for the zero-weight doubled edges.
    """

    index: int
    j: int
    k: int
    kind: str
    dir_j: str
    dir_k: str
    interacting: bool = True

    @property
    def doubled(self) -> bool:
        return self.kind in DOUBLED_KINDS

    def eps(self, a: int, b: int) -> int:
        """Orientation sign of the ordered pair ``(a, b)``."""
        if (a, b) == (self.j, self.k):
            return 1
        if (a, b) == (self.k, self.j):
            return -1
        raise LatticeError(f"({a}, {b}) is not edge {self.index}")

    def direction_at(self, v: int) -> str:
        if v == self.j:
            return self.dir_j
        if v == self.k:
            return self.dir_k
        raise LatticeError(f"vertex {v} not on edge {self.index}")


@dataclass(frozen=True)
class Loop:
    """A face of the graph: square plaquette, bigon, or torus winding cycle.

    ``steps`` lists ``(edge_index, forward)`` in traversal order. For squares
    the traversal is NW -> NE -> SE -> SW and ``corners`` is (NW, NE, SW, SE).
    """

    index: int
    kind: str  # "square", "bigon" or "winding"
    steps: tuple
    corners: tuple
    row: float = 0.0
    col: float = 0.0
    measured: bool = True

    @property
    def edges(self) -> tuple:
        return tuple(e for e, _ in self.steps)


@dataclass(frozen=True)
class InteractionGraph:
    rows: int
    cols: int
    topology: str
    edges: tuple
    loops: tuple
    incidence: dict = field(repr=False, compare=False, default_factory=dict)

    @property
    def n_vertices(self) -> int:
        return self.rows * self.cols

    def vertex(self, r: int, c: int) -> int:
        return r * self.cols + c

    def coords(self, v: int) -> tuple[int, int]:
        return divmod(v, self.cols)

    @property
    def straight_edges(self) -> list[Edge]:
        return [e for e in self.edges if not e.doubled]

    @property
    def doubled_edges(self) -> list[Edge]:
        return [e for e in self.edges if e.doubled]

    @property
    def squares(self) -> list[Loop]:
        return [lp for lp in self.loops if lp.kind == "square"]

    @property
    def bigons(self) -> list[Loop]:
        return [lp for lp in self.loops if lp.kind == "bigon"]

    @property
    def measured_loops(self) -> list[Loop]:
        return [lp for lp in self.loops if lp.measured]

    def degree(self, v: int) -> int:
        return len(self.incidence[v])

    def half_edge(self, v: int, direction: str) -> Edge:
        return self.incidence[v][direction]

    def edge_between(self, a: int, b: int, doubled: bool = False) -> Edge:
        for e in self.edges:
            if {e.j, e.k} == {a, b} and e.doubled == doubled:
                return e
        raise LatticeError(f"no {'doubled ' if doubled else ''}edge between {a} and {b}")

    def loops_of_edge(self, edge_index: int) -> list[int]:
        return [lp.index for lp in self.loops if edge_index in lp.edges]

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "topology": self.topology,
            "vertices": [list(self.coords(v)) for v in range(self.n_vertices)],
            "edges": [
                {
                    "index": e.index, "j": e.j, "k": e.k, "kind": e.kind,
                    "dir_j": e.dir_j, "dir_k": e.dir_k,
                    "weight": "interacting" if e.interacting else "zero_weight",
                }
                for e in self.edges
            ],
            "loops": [
                {
                    "index": lp.index, "kind": lp.kind, "corners": list(lp.corners),
                    "steps": [[e, bool(f)] for e, f in lp.steps],
                    "measured": lp.measured,
                }
                for lp in self.loops
            ],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


class _Builder:
    def __init__(self, m, n):
        self.m, self.n = m, n
        self.edges: list[Edge] = []
        self.loops: list[Loop] = []

    def v(self, r, c):
        return r * self.n + c

    def edge(self, j, k, kind, dj, dk, interacting=True) -> int:
        e = Edge(len(self.edges), j, k, kind, dj, dk, interacting)
        self.edges.append(e)
        return e.index

    def loop(self, kind, steps, corners, row, col, measured=True):
        self.loops.append(
            Loop(len(self.loops), kind, tuple(steps), tuple(corners), row, col, measured)
        )

    def finish(self, topology) -> InteractionGraph:
        incidence = {v: {} for v in range(self.m * self.n)}
        for e in self.edges:
            for v, d in ((e.j, e.dir_j), (e.k, e.dir_k)):
                if d in incidence[v]:
                    raise AssertionError(f"half-edge {d} at vertex {v} used twice")
                incidence[v][d] = e
        return InteractionGraph(
            self.m, self.n, topology, tuple(self.edges), tuple(self.loops), incidence
        )


def build_planar(m: int, n: int) -> InteractionGraph:
    """Planar ``m x n`` lattice with doubled boundary edges.

    Consecutive boundary vertices ``(0,1), (2,3), ...`` along each side are
    joined by a doubled edge, giving ``m + n`` bigons.

    Raises:
        LatticeError: if ``m`` or ``n`` is odd or smaller than 2.
    """
    if m < 2 or n < 2 or m % 2 or n % 2:
        raise LatticeError(f"planar lattice needs even dimensions >= 2, got {m}x{n}")
    b = _Builder(m, n)
    h = {}
    vt = {}
    for r in range(m):
        for c in range(n - 1):
            h[r, c] = b.edge(b.v(r, c), b.v(r, c + 1), "horizontal", "right", "left")
    for r in range(m - 1):
        for c in range(n):
            vt[r, c] = b.edge(b.v(r, c), b.v(r + 1, c), "vertical", "down", "up")

    for r in range(m - 1):
        for c in range(n - 1):
            steps = [(h[r, c], True), (vt[r, c + 1], True), (h[r + 1, c], False), (vt[r, c], False)]
            corners = (b.v(r, c), b.v(r, c + 1), b.v(r + 1, c), b.v(r + 1, c + 1))
            b.loop("square", steps, corners, r + 0.5, c + 0.5)

    # bigons: straight edge forward, then the doubled edge back
    for c in range(0, n, 2):
        d = b.edge(b.v(0, c + 1), b.v(0, c), "doubled_top", "up", "up", False)
        b.loop("bigon", [(h[0, c], True), (d, True)], (b.v(0, c), b.v(0, c + 1)), -0.5, c + 0.5)
    for r in range(0, m, 2):
        d = b.edge(b.v(r + 1, n - 1), b.v(r, n - 1), "doubled_right", "right", "right", False)
        b.loop("bigon", [(vt[r, n - 1], True), (d, True)], (b.v(r, n - 1), b.v(r + 1, n - 1)),
               r + 0.5, n - 0.5)
    for c in range(0, n, 2):
        d = b.edge(b.v(m - 1, c + 1), b.v(m - 1, c), "doubled_bottom", "down", "down", False)
        b.loop("bigon", [(h[m - 1, c], True), (d, True)], (b.v(m - 1, c), b.v(m - 1, c + 1)),
               m - 0.5, c + 0.5)
    for r in range(0, m, 2):
        d = b.edge(b.v(r + 1, 0), b.v(r, 0), "doubled_left", "left", "left", False)
        b.loop("bigon", [(vt[r, 0], True), (d, True)], (b.v(r, 0), b.v(r + 1, 0)), r + 0.5, -0.5)
    return b.finish("planar_doubled")


def build_torus(m: int, n: int) -> InteractionGraph:
    """Periodic ``m x n`` lattice: ``2mn`` edges and ``mn`` plaquettes.

    Two unmeasured winding loops (one row, one column) are appended after
    the plaquettes; they complete the stabilizer group on the torus.
    """
    if m < 2 or n < 2:
        raise LatticeError(f"torus needs dimensions >= 2, got {m}x{n}")
    b = _Builder(m, n)
    h = {}
    vt = {}
    for r in range(m):
        for c in range(n):
            h[r, c] = b.edge(b.v(r, c), b.v(r, (c + 1) % n), "horizontal", "right", "left")
    for r in range(m):
        for c in range(n):
            vt[r, c] = b.edge(b.v(r, c), b.v((r + 1) % m, c), "vertical", "down", "up")
    for r in range(m):
        for c in range(n):
            c1, r1 = (c + 1) % n, (r + 1) % m
            steps = [(h[r, c], True), (vt[r, c1], True), (h[r1, c], False), (vt[r, c], False)]
            corners = (b.v(r, c), b.v(r, c1), b.v(r1, c), b.v(r1, c1))
            b.loop("square", steps, corners, r + 0.5, c + 0.5)
    b.loop("winding", [(h[0, c], True) for c in range(n)], tuple(b.v(0, c) for c in range(n)),
           0, -1, measured=False)
    b.loop("winding", [(vt[r, 0], True) for r in range(m)], tuple(b.v(r, 0) for r in range(m)),
           -1, 0, measured=False)
    return b.finish("torus")


def build(m: int, n: int, topology: str = "planar") -> InteractionGraph:
    if topology in ("planar", "planar_doubled"):
        return build_planar(m, n)
    if topology == "torus":
        return build_torus(m, n)
    raise LatticeError(f"unknown topology {topology!r}")
