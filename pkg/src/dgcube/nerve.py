"""The dg nerve of a cohomologically graded dg category.

A simplex stores, for every K of size >= 2, an element f_K of
hom(X_{min K}, X_{max K}) of degree 2 - #K.  The defining equation, in
classical terms, is

    d f_K = sum_{0<j<#K-1} (-1)^j f_{K minus i_j}
          + sum_{K = K' ^ K''} (-1)^{#K'} f_{K''} o f_{K'}

where the wedge runs over splittings overlapping in exactly one interior
element and singleton pieces are excluded.  Through the dictionary
d(a) = (-1)^{|a|} mu1(a), a2 o a1 = (-1)^{|a1|} mu2(a2, a1) the wedge
signs cancel against the composition twist and the equation becomes

    mu1(f_K) = (-1)^{#K} [ sum_j (-1)^j f_{K minus i_j}
                           + sum_wedges mu2(f_{K''}, f_{K'}) ].

Missing f_K entries are an error, not an implicit zero; this catches
construction bugs early.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .ainf import AInfCategory
from .gradedmod import StructureError, Vector


def is_dg(cat: AInfCategory) -> bool:
    return all(d <= 2 for d in cat.mu if cat.mu[d])


def subsets_of(n: int, min_size: int = 2):
    for r in range(min_size, n + 2):
        yield from itertools.combinations(range(n + 1), r)


@dataclass
class NerveSimplex:
    category: AInfCategory
    objects: tuple
    f: dict

    def __post_init__(self):
        if not is_dg(self.category):
            raise StructureError("dg nerve requires mu[d]=0 for d >= 3")
        self.n = len(self.objects) - 1
        for k in subsets_of(self.n):
            if tuple(k) not in self.f:
                raise StructureError(f"missing simplex datum f_{k}")
            v = self.f[tuple(k)]
            expected = self.category.hom_module(
                self.objects[k[0]], self.objects[k[-1]]
            )
            if v.module != expected:
                raise StructureError(f"f_{k} lives in the wrong hom module")
            deg = v.degree()
            if deg is not None and deg != 2 - len(k):
                raise StructureError(f"f_{k} must have degree {2 - len(k)}")

    def face_value(self, k: tuple) -> Vector:
        return self.f[tuple(k)]


def equation_sides(s: NerveSimplex, k: tuple):
    """(lhs, rhs) of the simplex equation at K."""
    cat, objs = s.category, s.objects
    k = tuple(k)
    fk = s.face_value(k)
    lhs = cat.op((objs[k[0]], objs[k[-1]])).apply([fk])
    target = cat.hom_module(objs[k[0]], objs[k[-1]])
    # residual target sits one degree up; rebuild in the hom module
    rhs = Vector(target, {})
    for j in range(1, len(k) - 1):
        rhs = rhs + s.face_value(k[:j] + k[j + 1 :]).scaled(-1 if j % 2 else 1)
    for j in range(1, len(k) - 1):
        lower, upper = k[: j + 1], k[j:]
        comp = cat.op((objs[k[0]], objs[k[j]], objs[k[-1]])).apply(
            [s.face_value(upper), s.face_value(lower)]
        )
        rhs = rhs + comp
    return lhs, rhs.scaled(-1 if len(k) % 2 else 1)


def validate(s: NerveSimplex):
    """List of (K, residual) pairs; empty iff the simplex is valid."""
    bad = []
    for k in subsets_of(s.n):
        lhs, rhs = equation_sides(s, k)
        if lhs != rhs:
            bad.append((k, lhs - rhs))
    return bad


def pullback(alpha, s: NerveSimplex) -> NerveSimplex:
    """Restriction along a poset map alpha: [n] -> [n'], given as a list
    of images.  g_J = f_{alpha(J)} if alpha is injective on J, the strict
    identity if J is a doubled pair, and zero otherwise."""
    n = len(alpha) - 1
    if any(alpha[i] > alpha[i + 1] for i in range(n)):
        raise StructureError("pullback along a non-monotone map")
    if any(a < 0 or a > s.n for a in alpha):
        raise StructureError("pullback map out of range")
    cat = s.category
    objects = tuple(s.objects[alpha[i]] for i in range(n + 1))
    g = {}
    for k in subsets_of(n):
        image = tuple(sorted({alpha[i] for i in k}))
        hom = cat.hom_module(objects[k[0]], objects[k[-1]])
        if len(image) == len(k):
            g[k] = s.face_value(image)
        elif len(k) == 2:
            g[k] = cat.identity(objects[k[0]])
        else:
            g[k] = Vector(hom, {})
    return NerveSimplex(cat, objects, g)


def coface(i: int, n: int) -> list:
    """delta_i: [n-1] -> [n], skipping i."""
    if not 0 <= i <= n:
        raise StructureError("coface index out of range")
    return [j if j < i else j + 1 for j in range(n)]


def codegeneracy(i: int, n: int) -> list:
    """sigma_i: [n+1] -> [n], hitting i twice."""
    if not 0 <= i <= n:
        raise StructureError("codegeneracy index out of range")
    return [j if j <= i else j - 1 for j in range(n + 2)]


def face(i: int, s: NerveSimplex) -> NerveSimplex:
    return pullback(coface(i, s.n), s)


def degeneracy(i: int, s: NerveSimplex) -> NerveSimplex:
    return pullback(codegeneracy(i, s.n), s)


def degenerate_edge(cat: AInfCategory, x) -> NerveSimplex:
    """s_0 of the vertex x: the identity edge."""
    return NerveSimplex(cat, (x, x), {(0, 1): cat.identity(x)})
