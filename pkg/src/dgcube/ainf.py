"""A-infinity categories, modules, pre-module maps, and the nerve-simplex
equation for module-valued simplices.

Conventions (fixed once, validated by the test suite):

* ``mu[d]`` acts in display order ``mu^d(a_d, ..., a_1)`` on
  ``hom(X_{d-1},X_d) (x) ... (x) hom(X_0,X_1)`` and has degree ``2-d``.
* The insertion sign for the A-infinity relations is derived by the Koszul
  rule from the element-level module signs: inserting an operation with c
  inputs to its right contributes ``spade(c) = |a_1|+...+|a_c| + c``.
* Pre-module maps use ``heart = |a_{c+1}|+...+|a_{d-1}| + |x| - d + c + 1``.
* A classical dg category (d, o) enters through the dictionary
  ``mu1(a) = (-1)^{|a|} d a`` and ``mu2(a2,a1) = (-1)^{|a1|} a2 o a1``.
* The closed identity pre-module map is the signed one,
  ``t^1(x) = (-1)^{|x|} x``; the unsigned identity is closed only mod 2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .gradedmod import (
    FreeGradedModule,
    GradedMap,
    Mode,
    StructureError,
    Vector,
    _norm,
)


def spade(degrees_right: Sequence[int]) -> int:
    """Koszul insertion sign exponent: sum of (|a|+1) over inputs to the right."""
    return sum(d + 1 for d in degrees_right)


class MultilinearOp:
    """Multilinear map on basis tuples, inputs in display order."""

    __slots__ = ("sources", "target", "degree", "table")

    def __init__(
        self,
        sources: Sequence[FreeGradedModule],
        target: FreeGradedModule,
        degree: int,
        table: dict | None = None,
    ):
        self.sources = tuple(sources)
        self.target = target
        self.degree = int(degree)
        self.table: dict = {}
        if table:
            for ids, out in table.items():
                self._set(ids, out)

    def _set(self, ids: tuple, out) -> None:
        if len(ids) != len(self.sources):
            raise StructureError("arity mismatch in operation table")
        in_deg = 0
        for bid, src in zip(ids, self.sources):
            if bid not in src.degree_of:
                raise StructureError(f"basis id {bid!r} off source basis")
            in_deg += src.degree_of[bid]
        coeffs = out.coeffs if isinstance(out, Vector) else dict(out)
        clean = {}
        for tid, c in coeffs.items():
            if self.target.degree_of[tid] != in_deg + self.degree:
                raise StructureError(
                    f"operation entry {ids!r}->{tid!r} violates degree"
                )
            c = _norm(int(c), self.target.mode)
            if c:
                clean[tid] = c
        if clean:
            self.table[ids] = clean

    def apply_basis(self, ids: tuple) -> Vector:
        return Vector(self.target, self.table.get(tuple(ids), {}))

    def apply(self, vectors: Sequence[Vector]) -> Vector:
        """Full multilinear evaluation."""
        if len(vectors) != len(self.sources):
            raise StructureError("arity mismatch in application")
        for v, src in zip(vectors, self.sources):
            if v.module != src:
                raise StructureError("operation applied to wrong module")
        acc: dict = {}
        supports = [list(v.coeffs.items()) for v in vectors]
        if any(not s for s in supports):
            return self.target.zero_vector()
        for combo in itertools.product(*supports):
            ids = tuple(bid for bid, _ in combo)
            out = self.table.get(ids)
            if out:
                coef = 1
                for _, c in combo:
                    coef *= c
                for t, c in out.items():
                    acc[t] = acc.get(t, 0) + c * coef
        return Vector(self.target, acc)

    def insert_apply(self, left: tuple, inner: Vector, right: tuple) -> Vector:
        """Evaluate on basis ids with one Vector slot in the middle."""
        acc: dict = {}
        for mid, c in inner.coeffs.items():
            out = self.table.get(left + (mid,) + right)
            if out:
                for t, co in out.items():
                    acc[t] = acc.get(t, 0) + co * c
        return Vector(self.target, acc)

    def is_zero(self) -> bool:
        return not self.table


@dataclass
class AInfCategory:
    """Finite A-infinity category presented by structure constants.

    ``hom[(X, Y)]`` is a FreeGradedModule; ``mu[d][(X_0,...,X_d)]`` is a
    MultilinearOp of degree 2-d.  Missing entries are zero.  ``identities``
    optionally stores strict identity morphisms (needed for nerve pullbacks).
    """

    mode: Mode
    objects: tuple
    hom: dict
    mu: dict
    max_arity: int
    identities: dict | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def hom_module(self, x, y) -> FreeGradedModule:
        try:
            return self.hom[(x, y)]
        except KeyError:
            raise StructureError(f"no hom module for ({x!r},{y!r})") from None

    def op(self, chain: tuple) -> MultilinearOp:
        """mu^d for the object chain (X_0,...,X_d); zero if unset."""
        d = len(chain) - 1
        table = self.mu.get(d, {})
        if chain in table:
            return table[chain]
        if chain in self._cache:
            return self._cache[chain]
        sources = tuple(
            self.hom_module(chain[i - 1], chain[i]) for i in range(d, 0, -1)
        )
        op = MultilinearOp(sources, self.hom_module(chain[0], chain[d]), 2 - d)
        self._cache[chain] = op
        return op

    def identity(self, x) -> Vector:
        if not self.identities or x not in self.identities:
            raise StructureError(f"no identity morphism stored for {x!r}")
        return self.identities[x]


@dataclass
class AInfModule:
    """Contravariant A-infinity module over a base category."""

    base: AInfCategory
    values: dict
    mu_mod: dict
    name: object = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def value(self, x) -> FreeGradedModule:
        try:
            return self.values[x]
        except KeyError:
            raise StructureError(f"module has no value at {x!r}") from None

    def op(self, chain: tuple) -> MultilinearOp:
        """mu_mod^d for (X_0,...,X_{d-1}): inputs (x, a_{d-1},...,a_1)."""
        d = len(chain)
        table = self.mu_mod.get(d, {})
        if chain in table:
            return table[chain]
        if chain in self._cache:
            return self._cache[chain]
        sources = [self.value(chain[-1])]
        sources += [
            self.base.hom_module(chain[i - 1], chain[i]) for i in range(d - 1, 0, -1)
        ]
        op = MultilinearOp(sources, self.value(chain[0]), 2 - d)
        self._cache[chain] = op
        return op


@dataclass
class PreModuleMap:
    """Collection t = (t^d), t^d of degree |t|-d+1, between two modules."""

    source: AInfModule
    target: AInfModule
    degree: int
    components: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def component(self, chain: tuple) -> MultilinearOp:
        d = len(chain)
        table = self.components.get(d, {})
        if chain in table:
            return table[chain]
        if chain in self._cache:
            return self._cache[chain]
        sources = [self.source.value(chain[-1])]
        sources += [
            self.source.base.hom_module(chain[i - 1], chain[i])
            for i in range(d - 1, 0, -1)
        ]
        op = MultilinearOp(
            sources, self.target.value(chain[0]), self.degree - d + 1
        )
        self._cache[chain] = op
        return op

    def set_component(self, chain: tuple, op: MultilinearOp) -> None:
        if op.degree != self.degree - len(chain) + 1:
            raise StructureError("component degree violates |t|-d+1")
        self.components.setdefault(len(chain), {})[chain] = op

    def scaled(self, k: int) -> "PreModuleMap":
        out = PreModuleMap(self.source, self.target, self.degree)
        for d, table in self.components.items():
            for chain, op in table.items():
                out.set_component(
                    chain,
                    MultilinearOp(
                        op.sources,
                        op.target,
                        op.degree,
                        {
                            ids: {t: k * c for t, c in v.items()}
                            for ids, v in op.table.items()
                        },
                    ),
                )
        return out


def object_chains(objects: Iterable, d: int) -> Iterable[tuple]:
    """All length-(d+1) chains; finite categories here have all pairs."""
    return itertools.product(objects, repeat=d + 1)


def _accumulate(acc: dict, chain: tuple, ids: tuple, vec: Vector, sign: int) -> None:
    if vec.is_zero():
        return
    slot = acc.setdefault(chain, {}).setdefault(ids, {})
    for tid, c in vec.coeffs.items():
        slot[tid] = slot.get(tid, 0) + sign * c


def check_ainf_relations(cat: AInfCategory, d_max: int):
    """Verify sum over a+b+c=d of (-1)^spade mu(id^a (x) mu^b (x) id^c) = 0.

    Returns a list of failures; empty means the relations hold up to d_max.
    """
    if d_max > cat.max_arity:
        raise StructureError("d_max exceeds category max_arity")
    failures = []
    for d in range(1, d_max + 1):
        for chain in object_chains(cat.objects, d):
            sources = [
                cat.hom_module(chain[i - 1], chain[i]) for i in range(d, 0, -1)
            ]
            target = cat.hom_module(chain[0], chain[d])
            for ids in itertools.product(*(m.ids() for m in sources)):
                degs = [m.degree_of[b] for m, b in zip(sources, ids)]
                total = Vector(target, {})
                for b in range(1, d + 1):
                    for c in range(0, d - b + 1):
                        # display positions: inner block eats a_{c+1..b+c}
                        lo, hi = d - (b + c), d - c
                        inner = cat.op(chain[c : b + c + 1]).apply_basis(ids[lo:hi])
                        if inner.is_zero():
                            continue
                        outer = cat.op(chain[: c + 1] + chain[b + c :])
                        sgn = -1 if spade(degs[hi:]) % 2 else 1
                        val = outer.insert_apply(ids[:lo], inner, ids[hi:])
                        total = total + val.scaled(sgn)
                if not total.is_zero():
                    failures.append((chain, d, ids, total))
    return failures


def check_module_relations(mod: AInfModule, d_max: int):
    """Verify the two spade-signed sums of the module equation vanish."""
    cat = mod.base
    failures = []
    for d in range(1, d_max + 1):
        for chain in object_chains(cat.objects, d - 1):
            sources = [mod.value(chain[-1])] + [
                cat.hom_module(chain[i - 1], chain[i]) for i in range(d - 1, 0, -1)
            ]
            target = mod.value(chain[0])
            for ids in itertools.product(*(m.ids() for m in sources)):
                degs = [m.degree_of[b] for m, b in zip(sources, ids)]
                total = Vector(target, {})
                # first sum: outer mu_M^{1+c}(mu_M^b(x,...), a_c..a_1)
                for c in range(0, d):
                    inner = mod.op(chain[c:]).apply_basis(ids[: d - c])
                    if inner.is_zero():
                        continue
                    op = mod.op(chain[: c + 1])
                    sgn = -1 if spade(degs[d - c :]) % 2 else 1
                    val = op.insert_apply((), inner, ids[d - c :])
                    total = total + val.scaled(sgn)
                # second sum: mu_M^{a+1+c}(x, ..., mu_A^b(...), a_c..a_1), a>0
                for b in range(1, d):
                    for c in range(0, d - b):
                        lo, hi = d - (b + c), d - c
                        inner = cat.op(chain[c : b + c + 1]).apply_basis(ids[lo:hi])
                        if inner.is_zero():
                            continue
                        op = mod.op(chain[: c + 1] + chain[b + c :])
                        sgn = -1 if spade(degs[hi:]) % 2 else 1
                        val = op.insert_apply(ids[:lo], inner, ids[hi:])
                        total = total + val.scaled(sgn)
                if not total.is_zero():
                    failures.append((chain, d, ids, total))
    return failures


def _heart(x_deg: int, a_degs_left: Sequence[int], d: int, c: int) -> int:
    """heart = |a_{c+1}|+...+|a_{d-1}| + |x| - d + c + 1."""
    return sum(a_degs_left) + x_deg - d + c + 1


def mu1(t: PreModuleMap, d_max: int) -> PreModuleMap:
    """Differential of a pre-module map; degree |t|+1."""
    m0, m1, cat = t.source, t.target, t.source.base
    out = PreModuleMap(m0, m1, t.degree + 1)
    for d in range(1, d_max + 1):
        for chain in object_chains(cat.objects, d - 1):
            sources = [m0.value(chain[-1])] + [
                cat.hom_module(chain[i - 1], chain[i]) for i in range(d - 1, 0, -1)
            ]
            target = m1.value(chain[0])
            op_out = MultilinearOp(sources, target, out.degree - d + 1)
            for ids in itertools.product(*(m.ids() for m in sources)):
                degs = [m.degree_of[b] for m, b in zip(sources, ids)]
                x_deg = degs[0]
                a_degs = degs[1:]  # display order a_{d-1},...,a_1
                total = Vector(target, {})
                # sum 1: mu_{M1}^{1+c}(t^b(x, a_{d-1..c+1}), a_c..a_1)
                # sum 2: t^{1+c}(mu_{M0}^b(x, a_{d-1..c+1}), a_c..a_1)
                for c in range(0, d):
                    hearts = _heart(x_deg, a_degs[: d - 1 - c], d, c)
                    sgn = -1 if hearts % 2 else 1
                    tail = ids[d - c :]
                    inner_t = t.component(chain[c:]).apply_basis(ids[: d - c])
                    if not inner_t.is_zero():
                        val = m1.op(chain[: c + 1]).insert_apply((), inner_t, tail)
                        total = total + val.scaled(sgn)
                    inner_m = m0.op(chain[c:]).apply_basis(ids[: d - c])
                    if not inner_m.is_zero():
                        val = t.component(chain[: c + 1]).insert_apply(
                            (), inner_m, tail
                        )
                        total = total + val.scaled(sgn)
                # sum 3: t^{a+1+c}(x, ..., mu_A^b(a_{b+c..c+1}), a_c..a_1), a>0
                for b in range(1, d):
                    for c in range(0, d - b):
                        hearts = _heart(x_deg, a_degs[: d - 1 - c], d, c)
                        sgn = -1 if hearts % 2 else 1
                        lo, hi = d - (b + c), d - c
                        inner = cat.op(chain[c : b + c + 1]).apply_basis(ids[lo:hi])
                        if inner.is_zero():
                            continue
                        op3 = t.component(chain[: c + 1] + chain[b + c :])
                        val = op3.insert_apply(ids[:lo], inner, ids[hi:])
                        total = total + val.scaled(sgn)
                if not total.is_zero():
                    op_out._set(ids, total)
            if op_out.table:
                out.set_component(chain, op_out)
    return out


def mu2(t2: PreModuleMap, t1: PreModuleMap, d_max: int) -> PreModuleMap:
    """Composition: (mu2(t2,t1))^d = sum (-1)^heart t2^{1+c}(t1^b (x) id^c)."""
    if t1.target is not t2.source and t1.target != t2.source:
        raise StructureError("mu2: target(t1) != source(t2)")
    cat = t1.source.base
    out = PreModuleMap(t1.source, t2.target, t1.degree + t2.degree)
    for d in range(1, d_max + 1):
        for chain in object_chains(cat.objects, d - 1):
            sources = [t1.source.value(chain[-1])] + [
                cat.hom_module(chain[i - 1], chain[i]) for i in range(d - 1, 0, -1)
            ]
            target = t2.target.value(chain[0])
            op_out = MultilinearOp(sources, target, out.degree - d + 1)
            for ids in itertools.product(*(m.ids() for m in sources)):
                degs = [m.degree_of[b] for m, b in zip(sources, ids)]
                total = Vector(target, {})
                for c in range(0, d):
                    hearts = _heart(degs[0], degs[1 : d - c], d, c)
                    sgn = -1 if hearts % 2 else 1
                    inner = t1.component(chain[c:]).apply_basis(ids[: d - c])
                    if inner.is_zero():
                        continue
                    val = t2.component(chain[: c + 1]).insert_apply(
                        (), inner, ids[d - c :]
                    )
                    total = total + val.scaled(sgn)
                if not total.is_zero():
                    op_out._set(ids, total)
            if op_out.table:
                out.set_component(chain, op_out)
    return out


def identity_premodule(mod: AInfModule) -> PreModuleMap:
    """The closed identity: t^1(x) = (-1)^{|x|} x, higher components zero."""
    t = PreModuleMap(mod, mod, 0)
    for x in mod.base.objects:
        m = mod.value(x)
        op = MultilinearOp([m], m, 0)
        for bid, deg in m.basis:
            op._set((bid,), {bid: -1 if deg % 2 else 1})
        t.set_component((x,), op)
    return t


def premodule_equal(
    s: PreModuleMap, t: PreModuleMap, d_max: int
) -> bool:
    return premodule_residual(s, t, d_max) == []


def premodule_residual(s: PreModuleMap, t: PreModuleMap, d_max: int):
    """Componentwise differences on basis tuples up to arity d_max."""
    cat = s.source.base
    bad = []
    for d in range(1, d_max + 1):
        for chain in object_chains(cat.objects, d - 1):
            op_s, op_t = s.component(chain), t.component(chain)
            keys = set(op_s.table) | set(op_t.table)
            for ids in keys:
                vs = op_s.apply_basis(ids)
                vt = op_t.apply_basis(ids)
                if vs != vt:
                    bad.append((chain, ids, vs - vt))
    return bad


def premodule_sum(terms, source, target, degree, d_max: int) -> PreModuleMap:
    """Sum of (sign, PreModuleMap) pairs with common shape."""
    cat = source.base
    out = PreModuleMap(source, target, degree)
    for d in range(1, d_max + 1):
        for chain in object_chains(cat.objects, d - 1):
            acc: dict = {}
            shape = None
            for sign, t in terms:
                op = t.component(chain)
                shape = shape or op
                for ids, vec in op.table.items():
                    slot = acc.setdefault(ids, {})
                    for tid, c in vec.items():
                        slot[tid] = slot.get(tid, 0) + sign * c
            if shape is None:
                continue
            op_out = MultilinearOp(shape.sources, shape.target, degree - d + 1)
            for ids, coeffs in acc.items():
                op_out._set(ids, coeffs)
            if op_out.table:
                out.set_component(chain, op_out)
    return out


@dataclass
class NerveSimplexCandidate:
    """Modules at the vertices of [N] plus a pre-module map for each K.

    ``maps[K]`` (K a sorted tuple, len >= 2) has degree 2 - #K, running from
    the module at min(K) to the module at max(K).  (The nerve equation forces
    2 - #K; see the decisions ledger for the degree-convention note.)
    """

    n: int
    modules: dict
    maps: dict

    def map_for(self, k: tuple) -> PreModuleMap:
        try:
            return self.maps[tuple(k)]
        except KeyError:
            raise StructureError(f"missing face map for K={k!r}") from None


def wedge_splits(k: tuple):
    """Decompositions K = K' ^ K'' overlapping in one interior element."""
    k = tuple(k)
    for j in range(1, len(k) - 1):
        yield k[: j + 1], k[j:]


def check_goal_equation(
    cand: NerveSimplexCandidate, d_max: int
):
    """Nerve-simplex equation for every K, in mu-conventions:

        mu1(t_K) = (-1)^{#K} [ sum_j (-1)^j t_{K minus i_j}
                               + sum_{K=K'^K''} mu2(t_{K''}, t_{K'}) ].

    The overall (-1)^{#K} is the dictionary factor between the classical
    hom differential/composition and (mu1, mu2); it is what the element
    form of the simplex equation displays as an overall (-1)^{N+1}.
    Evaluating both sides expands all five sums of the equation (the
    three mu1 sums, the face sum, and the wedge sum) on every basis
    tuple.  Returns [(K, residual list)] failures."""
    failures = []
    subsets = [
        k
        for r in range(2, cand.n + 2)
        for k in itertools.combinations(range(cand.n + 1), r)
    ]
    for k in subsets:
        t_k = cand.map_for(k)
        outer = -1 if len(k) % 2 else 1
        lhs = mu1(t_k, d_max)
        terms = []
        for j in range(1, len(k) - 1):
            face = cand.map_for(k[:j] + k[j + 1 :])
            terms.append((outer * (-1 if j % 2 else 1), face))
        for lower, upper in wedge_splits(k):
            comp = mu2(cand.map_for(upper), cand.map_for(lower), d_max)
            terms.append((outer, comp))
        rhs = premodule_sum(
            terms, t_k.source, t_k.target, t_k.degree + 1, d_max
        )
        residual = premodule_residual(lhs, rhs, d_max)
        if residual:
            failures.append((k, residual))
    return failures


def yoneda_module(cat: AInfCategory, x_hat) -> AInfModule:
    """hom(-, x_hat) with module operations equal to the category's mu."""
    values = {x: cat.hom_module(x, x_hat) for x in cat.objects}
    mod = AInfModule(cat, values, {}, name=("yoneda", x_hat))
    for d, table in cat.mu.items():
        for chain, op in table.items():
            if chain[-1] != x_hat:
                continue
            mod.mu_mod.setdefault(d, {})[chain[:-1]] = op
    return mod


def yoneda_premodule(
    cat: AInfCategory,
    f: Vector,
    src_obj,
    tgt_obj,
    d_max: int,
) -> PreModuleMap:
    """t_f^d(x, a's) := mu^{d+1}(f, x, a_{d-1}, ..., a_1)."""
    deg = f.degree()
    if deg is None:
        deg = 0
    t = PreModuleMap(yoneda_module(cat, src_obj), yoneda_module(cat, tgt_obj), deg)
    for d in range(1, d_max + 1):
        for chain in object_chains(cat.objects, d - 1):
            full_chain = chain + (src_obj, tgt_obj)
            op_mu = cat.op(full_chain)
            sources = op_mu.sources[1:]
            target = op_mu.target
            op = MultilinearOp(sources, target, deg - d + 1)
            for ids in itertools.product(*(m.ids() for m in sources)):
                vecs = [f] + [m.basis_vector(b) for m, b in zip(sources, ids)]
                val = op_mu.apply(vecs)
                if not val.is_zero():
                    op._set(ids, val)
            if op.table:
                t.set_component(chain, op)
    return t
