"""Seed-deterministic generators for categories, simplices and parameters.

Random dg categories are built as Hom-complex categories: each object X
carries a finite chain complex C_X and hom(X,Y) := Hom(C_X, C_Y) with the
classical differential and composition, converted to mu-conventions by
mu1(a) = (-1)^{|a|} D(a), mu2(a2,a1) = (-1)^{|a1|} a2 o a1.  Making every
C_X contractible yields hom-level contracting homotopies, which is what
lets us solve the nerve equation exactly (over Z) for random simplices.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .ainf import AInfCategory, MultilinearOp, PreModuleMap, AInfModule
from .gradedmod import FreeGradedModule, GradedMap, Mode, Vector, compose


def make_rng(seed: int) -> random.Random:
    return random.Random(seed)


def _complex_basis(rng, tag, n_pairs, n_free, deg_lo=-1, deg_hi=1):
    """Basis + differential pairing: d(e_k) = f_k, free generators closed."""
    basis = []
    pairs = []
    for k in range(n_pairs):
        d = rng.randint(deg_lo, deg_hi)
        e = (tag, "e", k)
        f = (tag, "f", k)
        basis.append((e, d))
        basis.append((f, d + 1))
        pairs.append((e, f))
    for k in range(n_free):
        basis.append(((tag, "c", k), rng.randint(deg_lo, deg_hi)))
    return basis, pairs


def classical_complex(rng, mode: Mode, tag, n_pairs=1, n_free=0, contractible=False):
    """Returns (module, d, s).  s is a contraction when contractible."""
    if contractible:
        n_free = 0
        n_pairs = max(1, n_pairs)
    basis, pairs = _complex_basis(rng, tag, n_pairs, n_free)
    m = FreeGradedModule(mode, basis)
    d = GradedMap(m, m, 1, {(f, e): 1 for e, f in pairs})
    s = GradedMap(m, m, -1, {(e, f): 1 for e, f in pairs})
    return m, d, s


def hom_dg_category(rng, mode: Mode, n_objects=2, contractible=True, max_arity=6):
    """Hom-complex dg category; returns (cat, contractions) where
    contractions[(X,Y)] is a hom-level homotopy H with mu1-exactness."""
    objects = tuple(f"X{i}" for i in range(n_objects))
    data = {
        x: classical_complex(rng, mode, x, n_pairs=1, contractible=contractible)
        for x in objects
    }
    hom = {}
    hom_diff = {}
    contractions = {}
    for x, y in itertools.product(objects, repeat=2):
        cx, dx, _ = data[x]
        cy, dy, sy = data[y]
        basis = [
            ((bx, by), dgy - dgx)
            for bx, dgx in cx.basis
            for by, dgy in cy.basis
        ]
        h = FreeGradedModule(mode, basis)
        hom[(x, y)] = h
        # classical D(e_{x->y}) = d_y o e - (-1)^{|e|} e o d_x
        entries = {}
        for (bx, by), dg in h.basis:
            for (tz, sz), c in dy.entries.items():
                if sz == by:
                    entries[((bx, tz), (bx, by))] = (
                        entries.get(((bx, tz), (bx, by)), 0) + c
                    )
            sgn = -1 if dg % 2 else 1
            for (tz, sz), c in dx.entries.items():
                if tz == bx:
                    key = ((sz, by), (bx, by))
                    entries[key] = entries.get(key, 0) - sgn * c
        hom_diff[(x, y)] = GradedMap(h, h, 1, entries)
        if contractible:
            entries_h = {}
            for (bx, by), dg in h.basis:
                for (tz, sz), c in sy.entries.items():
                    if sz == by:
                        key = ((bx, tz), (bx, by))
                        entries_h[key] = entries_h.get(key, 0) + c
            contractions[(x, y)] = GradedMap(h, h, -1, entries_h)
    mu = {1: {}, 2: {}}
    for x, y in itertools.product(objects, repeat=2):
        h = hom[(x, y)]
        op = MultilinearOp([h], h, 1)
        dmap = hom_diff[(x, y)]
        for bid, dg in h.basis:
            v = dmap.column(bid)
            if not v.is_zero():
                op._set((bid,), v.scaled(-1 if dg % 2 else 1))
        if op.table:
            mu[1][(x, y)] = op
    for x, y, z in itertools.product(objects, repeat=3):
        hxy, hyz, hxz = hom[(x, y)], hom[(y, z)], hom[(x, z)]
        op = MultilinearOp([hyz, hxy], hxz, 0)
        for (b1x, b1y), dg1 in hxy.basis:
            for (b2y, b2z), dg2 in hyz.basis:
                if b1y == b2y:
                    sgn = -1 if dg1 % 2 else 1
                    op._set(((b2y, b2z), (b1x, b1y)), {(b1x, b2z): sgn})
        if op.table:
            mu[2][(x, y, z)] = op
    identities = {}
    for x in objects:
        cx = data[x][0]
        identities[x] = Vector(hom[(x, x)], {(b, b): 1 for b, _ in cx.basis})
    cat = AInfCategory(mode, objects, hom, mu, max_arity, identities=identities)
    return cat, contractions


def random_vector(rng, module: FreeGradedModule, degree: int, density=0.7) -> Vector:
    coeffs = {}
    for bid, d in module.basis:
        if d == degree and rng.random() < density:
            c = rng.choice([-2, -1, 1, 2])
            coeffs[bid] = c
    return Vector(module, coeffs)


def random_closed_morphism(rng, cat, contractions, x, y, degree=0) -> Vector:
    """mu1-exact (hence closed) element of the given degree."""
    h = cat.hom_module(x, y)
    raw = random_vector(rng, h, degree - 1)
    op = cat.op((x, y))
    return op.apply([raw]) if not raw.is_zero() else Vector(h, {})


def solve_primitive(cat, contractions, x, y, rhs: Vector, degree: int) -> Vector:
    """f with mu1(f) = rhs, using the hom contraction (rhs must be closed)."""
    if rhs.is_zero():
        return Vector(cat.hom_module(x, y), {})
    hmap = contractions[(x, y)]
    prim = hmap(rhs)
    sgn = -1 if degree % 2 else 1
    return prim.scaled(sgn)


def random_valid_simplex(rng, cat, contractions, n: int):
    """Valid nerve simplex over a contractible hom-complex category."""
    from .nerve import NerveSimplex  # local import to avoid a cycle

    objects = tuple(rng.choice(cat.objects) for _ in range(n + 1))
    f = {}
    for i, j in itertools.combinations(range(n + 1), 2):
        if j == i + 1 or rng.random() < 0.8:
            f[(i, j)] = random_closed_morphism(
                rng, cat, contractions, objects[i], objects[j]
            )
        else:
            f[(i, j)] = Vector(cat.hom_module(objects[i], objects[j]), {})
    for size in range(3, n + 2):
        for k in itertools.combinations(range(n + 1), size):
            rhs = _nerve_rhs(cat, objects, f, k)
            f[k] = solve_primitive(
                cat, contractions, objects[k[0]], objects[k[-1]], rhs, 2 - size
            )
    return NerveSimplex(cat, objects, f)


def _nerve_rhs(cat, objects, f, k: tuple) -> Vector:
    """(-1)^{#K} (face sum + wedge sum): RHS of the mu-form nerve equation."""
    target = cat.hom_module(objects[k[0]], objects[k[-1]])
    rhs = Vector(target, {})
    for j in range(1, len(k) - 1):
        face = f[k[:j] + k[j + 1 :]]
        rhs = rhs + face.scaled(-1 if j % 2 else 1)
    for j in range(1, len(k) - 1):
        lower, upper = k[: j + 1], k[j:]
        op = cat.op((objects[k[0]], objects[k[j]], objects[k[-1]]))
        rhs = rhs + op.apply([f[upper], f[lower]])
    return rhs.scaled(-1 if len(k) % 2 else 1)


def random_premodule_map(rng, m0: AInfModule, m1: AInfModule, degree: int,
                         d_max: int, density=0.4) -> PreModuleMap:
    """Random components of the right degrees (no closedness intended)."""
    cat = m0.base
    t = PreModuleMap(m0, m1, degree)
    for d in range(1, d_max + 1):
        for chain in itertools.product(cat.objects, repeat=d):
            sources = [m0.value(chain[-1])] + [
                cat.hom_module(chain[i - 1], chain[i]) for i in range(d - 1, 0, -1)
            ]
            target = m1.value(chain[0])
            op = MultilinearOp(sources, target, degree - d + 1)
            for ids in itertools.product(*(m.ids() for m in sources)):
                if rng.random() > density:
                    continue
                want = sum(m.degree_of[b] for m, b in zip(sources, ids)) + op.degree
                opts = [b for b, dg in target.basis if dg == want]
                if opts:
                    op._set((*ids,), {rng.choice(opts): rng.choice([-1, 1, 2])})
            if op.table:
                t.set_component(chain, op)
    return t


def staircase_grid(seed: int, d: int, count: int, width=Fraction(1),
                   depth=Fraction(2)):
    """Seeded staircase parameter draws dominating the given cobordism
    width/depth; yields StaircaseParams-compatible dicts."""
    rng = make_rng(seed)
    for _ in range(count):
        jitter = lambda: Fraction(rng.randint(0, 8), 16)
        ws, eps, depths, heights = [], [], [], []
        w_cur = width + Fraction(3, 2) * d + 1 + jitter()
        for i in range(d):
            step = 1 + jitter()
            w_next = w_cur - step
            ws.append(w_cur)
            eps.append(step / 2)
            w_cur = w_next
        base_d = depth + 1 + jitter()
        base_h = Fraction(1) + jitter()
        for i in range(d):
            depths.append(base_d + i + jitter())
            heights.append(base_h + i + jitter())
        yield {
            "d": d,
            "w": width,
            "widths": ws,
            "epsilons": eps,
            "depths": depths,
            "heights": heights,
        }
