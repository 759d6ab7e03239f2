"""Finitely based Z-graded modules over Z or Z/2, with Koszul sign discipline.

Maps are stored as sparse integer matrices indexed by (target id, source id).
Everything is immutable after construction and safe to share.

Shift convention: ``shift(m, k)`` adds ``k`` to every basis degree.  The
cohomological bracket ``M[s]`` (with ``M[s]^n = M^{n+s}``) is realised as
``shift(M, -s)``; in particular ``M[-1]`` raises degrees by one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping


class Mode(Enum):
    """Coefficient ring: integers, or integers mod 2 (sign-free debugging)."""

    Z = "z"
    Z2 = "z2"


class StructureError(Exception):
    """Raised on basis or degree mismatches; always a construction bug."""


def _norm(coef: int, mode: Mode) -> int:
    return coef % 2 if mode is Mode.Z2 else coef


class FreeGradedModule:
    """An ordered, finite basis of (opaque id, integer degree) pairs."""

    __slots__ = ("mode", "basis", "degree_of", "_index")

    def __init__(self, mode: Mode, basis: Iterable[tuple[object, int]]):
        self.mode = mode
        self.basis = tuple((bid, int(d)) for bid, d in basis)
        ids = [bid for bid, _ in self.basis]
        if len(set(ids)) != len(ids):
            raise StructureError("basis ids must be distinct")
        self.degree_of = {bid: d for bid, d in self.basis}
        self._index = {bid: i for i, (bid, _) in enumerate(self.basis)}

    @property
    def rank(self) -> int:
        return len(self.basis)

    def ids(self) -> tuple:
        return tuple(bid for bid, _ in self.basis)

    def __contains__(self, bid) -> bool:
        return bid in self.degree_of

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FreeGradedModule)
            and self.mode is other.mode
            and self.basis == other.basis
        )

    def __hash__(self) -> int:
        return hash((self.mode, self.basis))

    def __repr__(self) -> str:
        return f"FreeGradedModule({self.mode.value}, rank={self.rank})"

    def basis_vector(self, bid, coef: int = 1) -> "Vector":
        return Vector(self, {bid: coef})

    def zero_vector(self) -> "Vector":
        return Vector(self, {})


class Vector:
    """Finite integer combination of basis elements of one module."""

    __slots__ = ("module", "coeffs")

    def __init__(self, module: FreeGradedModule, coeffs: Mapping[object, int]):
        self.module = module
        clean = {}
        for bid, c in coeffs.items():
            if bid not in module.degree_of:
                raise StructureError(f"unknown basis id {bid!r}")
            c = _norm(int(c), module.mode)
            if c:
                clean[bid] = c
        self.coeffs = clean

    def is_zero(self) -> bool:
        return not self.coeffs

    def scaled(self, k: int) -> "Vector":
        return Vector(self.module, {b: c * k for b, c in self.coeffs.items()})

    def __add__(self, other: "Vector") -> "Vector":
        if other.module != self.module:
            raise StructureError("vector addition across different modules")
        out = dict(self.coeffs)
        for b, c in other.coeffs.items():
            out[b] = out.get(b, 0) + c
        return Vector(self.module, out)

    def __sub__(self, other: "Vector") -> "Vector":
        return self + other.scaled(-1)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Vector)
            and self.module == other.module
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.module, tuple(sorted(self.coeffs.items(), key=repr))))

    def degree(self) -> int | None:
        """Common degree of the support, or None for 0 / inhomogeneous."""
        degs = {self.module.degree_of[b] for b in self.coeffs}
        return degs.pop() if len(degs) == 1 else None

    def __repr__(self) -> str:
        return f"Vector({self.coeffs!r})"


class GradedMap:
    """Degree-homogeneous map given by an integer matrix on basis elements."""

    __slots__ = ("source", "target", "degree", "entries")

    def __init__(
        self,
        source: FreeGradedModule,
        target: FreeGradedModule,
        degree: int,
        entries: Mapping[tuple[object, object], int],
    ):
        if source.mode is not target.mode:
            raise StructureError("source/target coefficient modes differ")
        self.source = source
        self.target = target
        self.degree = int(degree)
        clean = {}
        for (tid, sid), c in entries.items():
            if sid not in source.degree_of or tid not in target.degree_of:
                raise StructureError(f"entry ({tid!r},{sid!r}) off basis")
            if target.degree_of[tid] != source.degree_of[sid] + self.degree:
                raise StructureError(
                    f"entry ({tid!r},{sid!r}) violates degree {self.degree}"
                )
            c = _norm(int(c), source.mode)
            if c:
                clean[(tid, sid)] = c
        self.entries = clean

    @classmethod
    def zero(cls, source, target, degree) -> "GradedMap":
        return cls(source, target, degree, {})

    @classmethod
    def identity(cls, module: FreeGradedModule) -> "GradedMap":
        return cls(module, module, 0, {(b, b): 1 for b, _ in module.basis})

    def is_zero(self) -> bool:
        return not self.entries

    def __call__(self, v: Vector) -> Vector:
        if v.module != self.source:
            raise StructureError("map applied to vector of wrong module")
        out: dict = {}
        for (tid, sid), c in self.entries.items():
            a = v.coeffs.get(sid)
            if a:
                out[tid] = out.get(tid, 0) + c * a
        return Vector(self.target, out)

    def column(self, sid) -> Vector:
        return self(self.source.basis_vector(sid))

    def __add__(self, other: "GradedMap") -> "GradedMap":
        if (self.source, self.target, self.degree) != (
            other.source,
            other.target,
            other.degree,
        ):
            raise StructureError("map addition shape mismatch")
        out = dict(self.entries)
        for k, c in other.entries.items():
            out[k] = out.get(k, 0) + c
        return GradedMap(self.source, self.target, self.degree, out)

    def __sub__(self, other: "GradedMap") -> "GradedMap":
        return self + other.scaled(-1)

    def scaled(self, k: int) -> "GradedMap":
        return GradedMap(
            self.source,
            self.target,
            self.degree,
            {key: c * k for key, c in self.entries.items()},
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GradedMap)
            and self.source == other.source
            and self.target == other.target
            and self.degree == other.degree
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash(
            (self.source, self.target, self.degree, frozenset(self.entries.items()))
        )

    def __repr__(self) -> str:
        return f"GradedMap(deg={self.degree}, nnz={len(self.entries)})"


def compose(g: GradedMap, f: GradedMap) -> GradedMap:
    """Matrix product g∘f; degrees add."""
    if f.target != g.source:
        raise StructureError("compose: target(f) != source(g)")
    out: dict = {}
    by_src: dict = {}
    for (mid, sid), c in f.entries.items():
        by_src.setdefault(mid, []).append((sid, c))
    for (tid, mid), c in g.entries.items():
        for sid, a in by_src.get(mid, ()):
            key = (tid, sid)
            out[key] = out.get(key, 0) + c * a
    return GradedMap(f.source, g.target, f.degree + g.degree, out)


def tensor_module(a: FreeGradedModule, b: FreeGradedModule) -> FreeGradedModule:
    if a.mode is not b.mode:
        raise StructureError("tensor: coefficient modes differ")
    basis = [
        ((x, y), dx + dy)
        for (x, dx), (y, dy) in itertools.product(a.basis, b.basis)
    ]
    return FreeGradedModule(a.mode, basis)


def tensor(f: GradedMap, g: GradedMap) -> GradedMap:
    """Koszul tensor product: (f⊗g)(x⊗y) = (-1)^{deg g · deg x} f(x)⊗g(y)."""
    src = tensor_module(f.source, g.source)
    tgt = tensor_module(f.target, g.target)
    entries: dict = {}
    for (ft, fs), fc in f.entries.items():
        for (gt, gs), gc in g.entries.items():
            sign = -1 if (g.degree * f.source.degree_of[fs]) % 2 else 1
            entries[((ft, gt), (fs, gs))] = sign * fc * gc
    return GradedMap(src, tgt, f.degree + g.degree, entries)


def shift(m: FreeGradedModule, k: int) -> FreeGradedModule:
    """Add k to every basis degree (bracket [s] is shift by -s)."""
    return FreeGradedModule(m.mode, ((bid, d + k) for bid, d in m.basis))


@dataclass(frozen=True)
class Summand:
    """One piece of a direct sum, with its canonical injection/projection."""

    tag: object
    module: FreeGradedModule
    inject: GradedMap
    project: GradedMap


def direct_sum(parts: Iterable[tuple[object, FreeGradedModule]]):
    """Disjoint-union basis; returns (total, [Summand...]).

    Basis ids of the total are (tag, original id); injections and
    projections are degree 0 and satisfy sum(inject∘project) = id.
    """
    parts = list(parts)
    if not parts:
        raise StructureError("empty direct sum")
    mode = parts[0][1].mode
    basis = []
    for tag, m in parts:
        if m.mode is not mode:
            raise StructureError("direct sum: coefficient modes differ")
        basis.extend(((tag, bid), d) for bid, d in m.basis)
    total = FreeGradedModule(mode, basis)
    summands = []
    for tag, m in parts:
        inj = GradedMap(m, total, 0, {((tag, b), b): 1 for b, _ in m.basis})
        prj = GradedMap(total, m, 0, {(b, (tag, b)): 1 for b, _ in m.basis})
        summands.append(Summand(tag, m, inj, prj))
    return total, summands


@dataclass(frozen=True)
class ChainComplex:
    """Module plus a degree +1 differential squaring to zero."""

    module: FreeGradedModule
    differential: GradedMap

    def __post_init__(self):
        d = self.differential
        if d.source != self.module or d.target != self.module:
            raise StructureError("differential endpoints must equal the module")
        if d.degree != 1:
            raise StructureError("differential must have degree +1")

    def is_valid(self) -> bool:
        return check_differential(self)


def check_differential(c: ChainComplex) -> bool:
    return compose(c.differential, c.differential).is_zero()
