"""Subset and face combinatorics of cobordism cubes.

A CollaredCube is purely combinatorial: labels per nonempty subset of
[N], widths per axis, a depth/width pair and a non-characteristic flag.
Collar widths are recorded as a single boolean (they play no quantitative
role in any verified identity).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .gradedmod import StructureError


def closure_bar(members, n=None) -> tuple:
    """Interval hull {min(K) <= j <= max(K)}."""
    members = tuple(sorted(members))
    if not members:
        raise StructureError("closure of the empty subset")
    return tuple(range(members[0], members[-1] + 1))


def is_consecutive(members) -> bool:
    members = tuple(sorted(members))
    return closure_bar(members) == members


def k_prime(members, n: int) -> tuple:
    """Terminal interval {j in [n] : j >= max(K)}."""
    members = tuple(sorted(members))
    if not members:
        raise StructureError("K' of the empty subset")
    return tuple(range(members[-1], n + 1))


def nonempty_subsets(n: int, min_size: int = 1):
    for r in range(min_size, n + 2):
        yield from itertools.combinations(range(n + 1), r)


def p0_subsets(n: int):
    """Subsets of [n] containing 0."""
    for rest in itertools.chain.from_iterable(
        itertools.combinations(range(1, n + 1), r) for r in range(n + 1)
    ):
        yield (0,) + rest


AVOIDS_ALL = ("avoids_all",)


def skeleton_nc(e) -> tuple:
    e = Fraction(e)
    if e <= 0:
        raise StructureError("non-characteristic margin must be positive")
    return ("skeleton_nc", e)


@dataclass(frozen=True)
class CollaredCube:
    """Cobordism N-simplex over a prism, stored as labels per face subset."""

    n: int
    face_data: dict
    widths: tuple = ()
    depth: Fraction = Fraction(2)
    width: Fraction = Fraction(1)
    nc_flag: tuple = AVOIDS_ALL
    collared: bool = True

    def __post_init__(self):
        if self.n < 0:
            raise StructureError("negative dimension")
        if not self.widths:
            object.__setattr__(self, "widths", (Fraction(1),) * max(self.n, 1))
        for j in nonempty_subsets(self.n):
            if j not in self.face_data:
                raise StructureError(f"missing face label for {j}")
        if any(w <= 0 for w in self.widths):
            raise StructureError("axis widths must be positive")
        if self.depth <= 0 or self.width < 0:
            raise StructureError("depth must be positive")

    def label(self, j) -> object:
        j = tuple(sorted(j))
        try:
            return self.face_data[j]
        except KeyError:
            raise StructureError(f"no face data for {j}") from None

    def vertex_label(self, i: int):
        return self.label((i,))


def simplex_cube(n: int, tag="Y", **kw) -> CollaredCube:
    """Fresh cube whose face labels are the canonical (tag, J) tokens."""
    data = {j: (tag, j) for j in nonempty_subsets(n)}
    return CollaredCube(n, data, **kw)


def identity_cube(label, n: int = 1, **kw) -> CollaredCube:
    """Degenerate cube: every face carries the same object label."""
    data = {j: label for j in nonempty_subsets(n)}
    return CollaredCube(n, data, **kw)


def face_subcube(y: CollaredCube, j) -> CollaredCube:
    """The (#J-1)-cube spanned by J, reindexed along the order iso."""
    j = tuple(sorted(j))
    if not j:
        raise StructureError("face_subcube of the empty set")
    m = len(j) - 1
    data = {}
    for s in nonempty_subsets(m):
        data[s] = y.label(tuple(j[i] for i in s))
    widths = tuple(y.widths[: max(m, 1)])
    return CollaredCube(
        m, data, widths, y.depth, y.width, y.nc_flag, y.collared
    )


def front_face(y: CollaredCube, i: int) -> CollaredCube:
    """d_i of the cube, 0 < i < N: drop vertex i, send q_i to q_N."""
    if not 0 < i < y.n:
        raise StructureError("front face index out of range")
    return face_subcube(y, tuple(k for k in range(y.n + 1) if k != i))


@dataclass(frozen=True)
class BackFace:
    """Back face at axis i: lower/upper sub-cubes glued along Y_i."""

    lower: CollaredCube
    upper: CollaredCube
    glue: object
    i: int

    def restrict_le(self) -> CollaredCube:
        return self.lower

    def restrict_ge(self) -> CollaredCube:
        return self.upper


def back_face(y: CollaredCube, i: int) -> BackFace:
    if not 0 < i < y.n:
        raise StructureError("back face index out of range")
    lower = face_subcube(y, tuple(range(0, i + 1)))
    upper = face_subcube(y, tuple(range(i, y.n + 1)))
    glue = y.vertex_label(i)
    if lower.vertex_label(lower.n) != glue or upper.vertex_label(0) != glue:
        raise StructureError("back-collaring inconsistency at the glue vertex")
    return BackFace(lower, upper, glue, i)


def max_labeled_cube(n: int) -> dict:
    """Vertex labels of the bent cube: P in P0(n) mapped to max(P)."""
    return {p: max(p) for p in p0_subsets(n)}


@dataclass(frozen=True)
class MarkedPrism:
    """C(n) = I^{n-1} x [0,n]; each vertex P of I^{n-1} carries marked
    heights at the elements of P."""

    n: int
    vertices: tuple
    marks: dict

    def height(self) -> int:
        return self.n


def marked_prism(n: int) -> MarkedPrism:
    if n < 1:
        raise StructureError("prism needs n >= 1")
    vertices = tuple(
        (0,) + rest + (n,)
        for r in range(n)
        for rest in itertools.combinations(range(1, n), r)
    )
    marks = {v: tuple(sorted(v)) for v in vertices}
    return MarkedPrism(n, vertices, marks)


@dataclass(frozen=True)
class PosetNerve:
    """Nerve of a finite poset: nondegenerate simplices are strict chains."""

    elements: tuple
    simplices: dict

    def dimension(self) -> int:
        return max(self.simplices) if self.simplices else -1


def hom_poset_nerve(i: int, j: int, n: int) -> PosetNerve:
    """Nerve of the inclusion poset of subsets of [n] with min i, max j."""
    if i > j:
        raise StructureError("hom poset needs i <= j")
    middles = list(range(i + 1, j))
    elements = []
    for r in range(len(middles) + 1):
        for mid in itertools.combinations(middles, r):
            elements.append(tuple(sorted((i,) + mid + ((j,) if j != i else ()))))
    elements = tuple(sorted(set(elements)))
    simplices = {0: [(e,) for e in elements]}
    dim = 0
    frontier = simplices[0]
    while True:
        nxt = []
        for chain in frontier:
            top = chain[-1]
            for e in elements:
                if set(top) < set(e):
                    nxt.append(chain + (e,))
        if not nxt:
            break
        dim += 1
        simplices[dim] = nxt
        frontier = nxt
    return PosetNerve(elements, simplices)
