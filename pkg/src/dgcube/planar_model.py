"""Bridge from planar configurations to the algebraic layer: the test
category of a staircase family, module data of a bent edge brane, and
the stabilization comparison.

Geometric counts are taken mod 2 (orientation data is out of scope);
degrees come from the exact grading lifts, and a corner tuple only
contributes when the output degree equals the input degrees plus 2 - d.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .ainf import (
    AInfCategory,
    AInfModule,
    MultilinearOp,
    PreModuleMap,
    yoneda_module,
)
from .cubes import CollaredCube, identity_cube
from .gradedmod import FreeGradedModule, Mode, StructureError, Vector
from .planar import (
    Configuration,
    PLCurve,
    assemble_polygon,
    build_conetail,
    build_staircase,
    build_vertical_line,
    StaircaseParams,
)

Frac = Fraction


def _single_crossing(config, a, b):
    xs = config.intersections(a, b)
    if len(xs) != 1:
        raise StructureError(
            f"expected one crossing of {a.label()} and {b.label()}"
        )
    return xs[0]


def planar_base_category(config: Configuration, stairs, max_arity=4
                         ) -> AInfCategory:
    """Directed category on the test curves: one degree-0 generator per
    ordered crossing, strict formal identities, composition by triangle
    counts.  Coefficients are mod 2."""
    mode = Mode.Z2
    objects = tuple(c.label() for c in stairs)
    by_name = {c.label(): c for c in stairs}
    hom = {}
    for i, a in enumerate(objects):
        for j, b in enumerate(objects):
            if i == j:
                hom[(a, b)] = FreeGradedModule(mode, ((("id", a), 0),))
            elif i < j:
                x = _single_crossing(config, by_name[a], by_name[b])
                if x.degree != 0:
                    raise StructureError("staircase crossing off degree 0")
                hom[(a, b)] = FreeGradedModule(
                    mode, ((("x", a, b), 0),)
                )
            else:
                hom[(a, b)] = FreeGradedModule(mode, ())
    mu = {1: {}, 2: {}}
    identities = {
        a: Vector(hom[(a, a)], {("id", a): 1}) for a in objects
    }
    # strict unit rules plus the triangle count
    for i, a in enumerate(objects):
        for j, b in enumerate(objects):
            for k, c in enumerate(objects):
                src2, src1 = hom[(b, c)], hom[(a, b)]
                tgt = hom[(a, c)]
                if not src1.rank or not src2.rank or not tgt.rank:
                    continue
                op = MultilinearOp([src2, src1], tgt, 0)
                for (bid2, d2) in src2.basis:
                    for (bid1, d1) in src1.basis:
                        out = _compose_generators(
                            config, by_name, a, b, c, bid1, bid2, tgt
                        )
                        if out:
                            op._set((bid2, bid1), out)
                if op.table:
                    mu[2][(a, b, c)] = op
    return AInfCategory(mode, objects, hom, mu, max_arity,
                        identities=identities)


def _compose_generators(config, by_name, a, b, c, bid1, bid2, tgt):
    if bid1[0] == "id":
        return {bid2: 1} if bid2 in tgt.degree_of else None
    if bid2[0] == "id":
        return {bid1: 1} if bid1 in tgt.degree_of else None
    if a == b or b == c or a == c:
        return None
    ca, cb, cc = by_name[a], by_name[b], by_name[c]
    y0 = _single_crossing(config, ca, cc)
    y1 = _single_crossing(config, ca, cb)
    y2 = _single_crossing(config, cb, cc)
    poly = assemble_polygon(config, (ca, cb, cc),
                            (y0.point, y1.point, y2.point))
    if poly is None:
        return None
    return {("x", a, c): 1}


@dataclass
class PlanarEdgeModel:
    """A bent edge brane against a staircase of test curves.

    The brane's two tail crossings with each test curve generate the two
    summands of the product complex; the vertex-0 crossings realise the
    source module, the vertex-01 crossings the target module."""

    config: Configuration
    stairs: tuple
    brane: PLCurve
    base: AInfCategory
    source_label: object = "edge-source"
    target_label: object = "edge-target"

    def __post_init__(self):
        self.left = {}
        self.right = {}
        for s in self.stairs:
            xs = sorted(
                self.config.intersections(s, self.brane), key=lambda x: x.q()
            )
            if len(xs) != 2:
                raise StructureError(
                    "edge brane must cross each test curve exactly twice"
                )
            lo, hi = xs
            if lo.degree != 0 or hi.degree != 1:
                raise StructureError("tail crossing degrees must be 0 and 1")
            self.left[s.label()] = lo
            self.right[s.label()] = hi

    def module(self, which: str) -> AInfModule:
        """Module of the given end of the edge: values are rank one per
        test curve, operations are polygon counts with the matching tail
        corners (plus strict unit actions)."""
        mode = self.base.mode
        values = {}
        for s in self.stairs:
            values[s.label()] = FreeGradedModule(
                mode, (((which, s.label()), 0),)
            )
        mod = AInfModule(self.base, values, {}, name=("edge", which))
        by_name = {c.label(): c for c in self.stairs}
        table = self.left if which == "source" else self.right
        names = [c.label() for c in self.stairs]
        for a in names:
            for b in names:
                src_a = self.base.hom_module(a, b)
                if src_a.rank == 0:
                    continue
                op = MultilinearOp([values[b], src_a], values[a], 0)
                for (gen, _deg) in src_a.basis:
                    if gen[0] == "id":
                        op._set(((which, b), gen), {(which, a): 1})
                        continue
                    y0 = table[a]
                    y1 = self.base_crossing(a, b)
                    y2 = table[b]
                    poly = assemble_polygon(
                        self.config,
                        (by_name[a], by_name[b], self.brane),
                        (y0.point, y1.point, y2.point),
                    )
                    if poly is not None:
                        op._set(((which, b), gen), {(which, a): 1})
                if op.table:
                    mod.mu_mod.setdefault(2, {})[(a, b)] = op
        return mod

    def base_crossing(self, a, b):
        by_name = {c.label(): c for c in self.stairs}
        return _single_crossing(self.config, by_name[a], by_name[b])

    def edge_map(self, d_max=3) -> PreModuleMap:
        """Counts with input on a vertex-0 crossing and output on a
        vertex-01 crossing: the degree filter admits only the strips."""
        src = self.module("source")
        tgt = self.module("target")
        t = PreModuleMap(src, tgt, 0)
        by_name = {c.label(): c for c in self.stairs}
        # arity one: strips between the two tail crossings
        for s in self.stairs:
            a = s.label()
            op = MultilinearOp([src.value(a)], tgt.value(a), 0)
            y_in = self.left[a]
            y_out = self.right[a]
            poly = assemble_polygon(
                self.config, (s, self.brane), (y_out.point, y_in.point)
            )
            if poly is not None:
                op._set((("source", a),), {("target", a): 1})
            if op.table:
                t.set_component((a,), op)
        # higher arities: mixed-tail polygons are excluded by the degree
        # filter (the output degree would have to exceed the input sum),
        # and geometrically the candidate loops self-touch
        return t


def edge_candidate(model: PlanarEdgeModel, d_max=3):
    from .ainf import NerveSimplexCandidate

    src = model.module("source")
    tgt = model.module("target")
    t = model.edge_map(d_max)
    t.source, t.target = src, tgt
    return NerveSimplexCandidate(1, {0: src, 1: tgt}, {(0, 1): t})


# --- stabilization -----------------------------------------------------------


@dataclass
class StabilizationReport:
    rank_preserving: bool
    degree_preserving: bool
    transport_rigid: bool
    pair_iso_degree_zero: bool
    repeat_consistent: bool

    def ok(self) -> bool:
        return all(
            (self.rank_preserving, self.degree_preserving,
             self.transport_rigid, self.pair_iso_degree_zero,
             self.repeat_consistent)
        )


def beta_params(count: int, scale=Frac(1, 16)) -> StaircaseParams:
    """Staircase parameters hugging the zero section."""
    widths = tuple(scale * (3 * count - 3 * i + 4) for i in range(count))
    eps = tuple(scale for _ in range(count))
    depths = tuple(scale * (2 + i) for i in range(count))
    heights = tuple(scale * (1 + i) / 2 for i in range(count))
    return StaircaseParams(
        d=count, w=scale, widths=widths, epsilons=eps,
        depths=depths, heights=heights, depth_bound=scale / 2,
    )


def verify_stabilization(count: int = 3) -> StabilizationReport:
    """The commuting-square content in the extra factor: pairing against
    curves hugging the zero section and the vertical fiber reproduces
    the unstabilized data."""
    params = beta_params(count)
    params.validate()
    betas = build_staircase(params)
    for b in betas:
        object.__setattr__(b, "name", b.label().replace("gamma", "beta"))
    fiber = build_vertical_line(0, name="fiber")
    config = Configuration(list(betas) + [fiber])
    rank_ok = True
    degree_ok = True
    for b in betas:
        xs = config.intersections(b, fiber)
        rank_ok &= len(xs) == 1
        degree_ok &= all(x.degree == 0 for x in xs)
    pair_ok = True
    for i, j in itertools.combinations(range(count), 2):
        xs = config.intersections(betas[i], betas[j])
        pair_ok &= len(xs) == 1 and xs[0].degree == 0
    # transport: the extra-factor triangle for each composable pair is
    # unique, so stabilized counts equal unstabilized counts
    transport = True
    for i, j in itertools.combinations(range(count), 2):
        y1 = config.intersections(betas[i], betas[j])[0]
        y0 = config.intersections(betas[i], fiber)[0]
        y2 = config.intersections(betas[j], fiber)[0]
        poly = assemble_polygon(
            config, (betas[i], betas[j], fiber),
            (y0.point, y1.point, y2.point),
        )
        transport &= poly is not None
    # repeating the stabilization gives the same counts again
    repeat = True
    params2 = beta_params(count, scale=Frac(1, 64))
    betas2 = build_staircase(params2)
    for b in betas2:
        object.__setattr__(b, "name", b.label().replace("gamma", "beta2-"))
    fiber2 = build_vertical_line(0, name="fiber2")
    config2 = Configuration(list(betas2) + [fiber2])
    for i, j in itertools.combinations(range(count), 2):
        y1 = config2.intersections(betas2[i], betas2[j])[0]
        y0 = config2.intersections(betas2[i], fiber2)[0]
        y2 = config2.intersections(betas2[j], fiber2)[0]
        poly = assemble_polygon(
            config2, (betas2[i], betas2[j], fiber2),
            (y0.point, y1.point, y2.point),
        )
        repeat &= poly is not None
    return StabilizationReport(rank_ok, degree_ok, transport, pair_ok, repeat)


def standard_edge_setup(d=3, bumps=(), seed_params=None):
    """Configuration with d test staircases and a bent edge brane."""
    if seed_params is None:
        widths = tuple(Frac(3) + Frac(3 * (d - i), 2) for i in range(d))
        eps = tuple(Frac(1, 2) for _ in range(d))
        depths = tuple(Frac(3) + i for i in range(d))
        heights = tuple(Frac(1) + i for i in range(d))
        seed_params = StaircaseParams(
            d=d, w=Frac(1), widths=widths, epsilons=eps,
            depths=depths, heights=heights, depth_bound=Frac(2),
        )
    seed_params.validate()
    stairs = build_staircase(seed_params)
    brane = (
        build_conetail(seed_params.w, Frac(1, 4), name="edge")
        if not bumps
        else None
    )
    if brane is None:
        from .planar import build_bent_edge

        brane = build_bent_edge(seed_params.w, Frac(1, 8), bumps, name="edge")
    config = Configuration(list(stairs) + [brane])
    return config, stairs, brane
