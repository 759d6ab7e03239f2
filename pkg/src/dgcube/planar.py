"""Exact-rational planar configurations: staircases, cone tails, vertical
test lines, intersection points with integer gradings, regions, boundary
stripping, and embedded-polygon enumeration.

All coordinates are Fractions.  Curves are embedded PL arcs with two
infinite ray ends; rays are clipped to a configuration-wide bounding box
large enough that no finite feature or crossing is lost.

Grading lifts: each segment carries a phase ``(n, dirkey)`` where dirkey
orders tangent directions mod pi and n is an integer half-turn counter
propagated through bends.  The degree of a transverse crossing x of A
and B, as a generator of CF(A, B), is ceil(alpha_A(x) - alpha_B(x)); with
the staircase/cone-tail base lifts below this makes staircase-staircase
crossings degree 0 and the two cone-tail crossings degrees 0 (left ray)
and 1 (right ray), which is the shift in the product decomposition.

Polygon convention: a candidate disk for corner cycle (y_0, ..., y_d) on
branes (L_0, ..., L_d) is the closed loop of arcs arc_i on L_i from y_i
to y_{i+1}; it counts iff the loop is simple, clockwise, and makes a
right turn at every corner (convex corners).  The orientation convention
is pinned by the staircase mu^2 triangle and the identity-strip count.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key

from .gradedmod import StructureError

Frac = Fraction
Point = tuple  # (q, p) pair of Fractions


class PlanarError(StructureError):
    pass


class TangencyError(PlanarError):
    pass


# --- exact primitives ----------------------------------------------------


def cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def vcross(u, v) -> Fraction:
    return u[0] * v[1] - u[1] * v[0]


def vdot(u, v) -> Fraction:
    return u[0] * v[0] + u[1] * v[1]


def seg_intersection(a, b, c, d):
    """Proper or touching intersection point of segments [a,b], [c,d].

    Returns (point, t, u) with t,u in [0,1], or None.  Collinear overlap
    raises TangencyError."""
    r = (b[0] - a[0], b[1] - a[1])
    s = (d[0] - c[0], d[1] - c[1])
    denom = vcross(r, s)
    qp = (c[0] - a[0], c[1] - a[1])
    if denom == 0:
        if vcross(qp, r) == 0:
            # collinear: overlap iff projections intersect in more than a point
            t0 = vdot(qp, r)
            t1 = t0 + vdot(s, r)
            lo, hi = min(t0, t1), max(t0, t1)
            rr = vdot(r, r)
            if hi < 0 or lo > rr:
                return None
            if hi == 0 or lo == rr:
                return None  # touch at one endpoint only; treat as no crossing
            raise TangencyError("collinear overlapping segments")
        return None
    t = vcross(qp, s) / denom
    u = vcross(qp, r) / denom
    if 0 <= t <= 1 and 0 <= u <= 1:
        pt = (a[0] + t * r[0], a[1] + t * r[1])
        return pt, t, u
    return None


def dir_key(d) -> tuple:
    """Total order on tangent directions mod pi: horizontal, then positive
    slopes increasing, then vertical, then negative slopes increasing."""
    dx, dy = d
    if dy == 0:
        return (0, Frac(0))
    if dx == 0:
        return (2, Frac(0))
    slope = Frac(dy, dx)
    return (1, slope) if slope > 0 else (3, slope)


# --- curves ---------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point
    lift: int
    index: int

    def direction(self):
        return (self.b[0] - self.a[0], self.b[1] - self.a[1])

    def phase(self):
        return (self.lift, dir_key(self.direction()))


@dataclass(frozen=True)
class PLCurve:
    """Embedded PL arc with ray ends.

    ``points`` is the finite vertex chain in walking order; ``tail_dir``
    and ``head_dir`` point outward along the two infinite ends.  ``lift0``
    is the half-turn counter on the first (tail) segment.
    """

    kind: tuple
    points: tuple
    tail_dir: tuple
    head_dir: tuple
    lift0: int = 0
    name: str = ""

    def label(self) -> str:
        return self.name or str(self.kind)

    def clipped_chain(self, reach: Fraction) -> tuple:
        first, last = self.points[0], self.points[-1]
        start = (first[0] + reach * self.tail_dir[0],
                 first[1] + reach * self.tail_dir[1])
        end = (last[0] + reach * self.head_dir[0],
               last[1] + reach * self.head_dir[1])
        return (start,) + tuple(self.points) + (end,)

    def segments(self, reach: Fraction) -> tuple:
        """Segments with lifts, propagated by the turning rule."""
        chain = self.clipped_chain(reach)
        segs = []
        lift = self.lift0
        prev_dir = None
        for i in range(len(chain) - 1):
            a, b = chain[i], chain[i + 1]
            d = (b[0] - a[0], b[1] - a[1])
            if d == (0, 0):
                raise PlanarError("degenerate zero-length segment")
            if prev_dir is not None:
                c = vcross(prev_dir, d)
                if c == 0 and vdot(prev_dir, d) < 0:
                    raise PlanarError("curve doubles back on itself")
                if c != 0:
                    delta = (
                        1
                        if dir_key(d) > dir_key(prev_dir)
                        else -1
                        if dir_key(d) < dir_key(prev_dir)
                        else 0
                    )
                    # continuity of the phase lift across the bend
                    if c > 0 and delta < 0:
                        lift += 1
                    elif c < 0 and delta > 0:
                        lift -= 1
            segs.append(Segment(a, b, lift, i))
            prev_dir = d
        return tuple(segs)

    def finite_extent(self) -> Fraction:
        vals = [abs(c) for p in self.points for c in p]
        return max(vals) if vals else Frac(0)


def _check_embedded(curve: PLCurve, reach: Fraction) -> None:
    segs = curve.segments(reach)
    for i, j in itertools.combinations(range(len(segs)), 2):
        if j == i + 1:
            continue
        got = None
        try:
            got = seg_intersection(segs[i].a, segs[i].b, segs[j].a, segs[j].b)
        except TangencyError:
            raise PlanarError(f"curve {curve.label()} overlaps itself")
        if got is not None:
            raise PlanarError(f"curve {curve.label()} is not embedded")


# --- standard curve constructors -----------------------------------------


@dataclass(frozen=True)
class StaircaseParams:
    """Parameters for d tunnel curves dominating a cobordism of the given
    width and depth: widths strictly decreasing and > w, depths strictly
    increasing and > depth_bound, heights increasing, box margins in
    (0, w_i - w_{i+1})."""

    d: int
    w: Fraction
    widths: tuple
    epsilons: tuple
    depths: tuple
    heights: tuple
    depth_bound: Fraction = Frac(0)

    def validate(self) -> None:
        p = self
        if p.d < 1:
            raise PlanarError("parameter d: need at least one curve")
        for name, seq in (("widths", p.widths), ("epsilons", p.epsilons),
                          ("depths", p.depths), ("heights", p.heights)):
            if len(seq) != p.d:
                raise PlanarError(f"parameter {name}: expected {p.d} entries")
        for i in range(p.d):
            if not p.widths[i] > p.w:
                raise PlanarError(f"parameter widths[{i}]: must exceed w")
            if i + 1 < p.d and not p.widths[i] > p.widths[i + 1]:
                raise PlanarError(f"parameter widths[{i}]: must be decreasing")
            hi = p.widths[i] - p.widths[i + 1] if i + 1 < p.d else p.epsilons[i] + 1
            if not (0 < p.epsilons[i] < hi):
                raise PlanarError(
                    f"parameter epsilons[{i}]: must lie in (0, w_i - w_i+1)"
                )
            if not p.depths[i] > p.depth_bound:
                raise PlanarError(f"parameter depths[{i}]: must exceed the bound")
            if i + 1 < p.d and not p.depths[i] < p.depths[i + 1]:
                raise PlanarError(f"parameter depths[{i}]: must be increasing")
            if i + 1 < p.d and not p.heights[i] < p.heights[i + 1]:
                raise PlanarError(f"parameter heights[{i}]: must be increasing")
            if not p.heights[i] > -p.depths[i]:
                raise PlanarError(f"parameter heights[{i}]: must exceed -depth")


def build_staircase(params: StaircaseParams) -> list:
    """The d tunnel curves, deepest last; lift 0 on the left flat."""
    params.validate()
    curves = []
    for i in range(params.d):
        wi, ei = params.widths[i], params.epsilons[i]
        di, hi = params.depths[i], params.heights[i]
        pts = ((wi - ei, -di), (wi, hi))
        curves.append(
            PLCurve(
                kind=("staircase", i),
                points=pts,
                tail_dir=(Frac(-1), Frac(0)),
                head_dir=(Frac(1), Frac(0)),
                lift0=0,
                name=f"gamma{i}",
            )
        )
    return curves


def build_conetail(w, eps, name="c", depth=None) -> PLCurve:
    """Cone tail: two downward rays at q = +-w, flat middle at p = 0.

    Walked from the bottom of the left ray; lift 0 there makes the left
    crossing with a staircase sit in degree 0 and the right one in 1.
    """
    w, eps = Frac(w), Frac(eps)
    if not 0 < eps < w:
        raise PlanarError("cone tail needs 0 < eps < w")
    pts = ((-w, -eps), (-w + eps, Frac(0)), (w - eps, Frac(0)), (w, -eps))
    return PLCurve(
        kind=("cone_tail", w),
        points=pts,
        tail_dir=(Frac(0), Frac(-1)),
        head_dir=(Frac(0), Frac(-1)),
        lift0=0,
        name=name,
    )


def build_vertical_line(a, name=None) -> PLCurve:
    """Test line {q = a}, walked upward, lift 0."""
    a = Frac(a)
    pts = ((a, Frac(0)),)
    return PLCurve(
        kind=("vline", a),
        points=pts,
        tail_dir=(Frac(0), Frac(-1)),
        head_dir=(Frac(0), Frac(1)),
        lift0=0,
        name=name or f"l({a})",
    )


def build_bent_edge(w, eps, bumps=(), name="BY") -> PLCurve:
    """Edge-cobordism brane: cone-tail shape with optional middle bumps.

    ``bumps`` is a tuple of (q, p) apexes strictly inside the flat middle
    with |p| small; the curve stays above the staircase depths.
    """
    w, eps = Frac(w), Frac(eps)
    mids = []
    for (q, p) in bumps:
        q, p = Frac(q), Frac(p)
        if not (-w + 2 * eps < q < w - 2 * eps):
            raise PlanarError("bump outside the flat middle")
        mids.extend([(q - eps / 2, Frac(0)), (q, p), (q + eps / 2, Frac(0))])
    pts = ((-w, -eps), (-w + eps, Frac(0)), *mids, (w - eps, Frac(0)), (w, -eps))
    return PLCurve(
        kind=("bent_edge", w),
        points=tuple(pts),
        tail_dir=(Frac(0), Frac(-1)),
        head_dir=(Frac(0), Frac(-1)),
        lift0=0,
        name=name,
    )


# --- configurations and intersections -------------------------------------


@dataclass(frozen=True)
class IntersectionPoint:
    point: Point
    curves: tuple       # (curve_a, curve_b) in configuration order
    seg_indices: tuple  # matching segment indices
    degree: int         # as a generator of CF(curve_a, curve_b)

    def q(self) -> Fraction:
        return self.point[0]


def crossing_degree(seg_a: Segment, seg_b: Segment) -> int:
    """ceil(alpha_A - alpha_B) for transverse segments."""
    na, ka = seg_a.phase()
    nb, kb = seg_b.phase()
    if ka == kb:
        raise TangencyError("parallel tangents at a crossing")
    return (na - nb) + (1 if ka > kb else 0)


class Configuration:
    """A finite list of named curves with exact pairwise intersections."""

    def __init__(self, curves):
        self.curves = tuple(curves)
        names = [c.label() for c in self.curves]
        if len(set(names)) != len(names):
            raise PlanarError("curve names must be distinct")
        extent = max(
            [c.finite_extent() for c in self.curves] or [Frac(1)]
        )
        self.reach = 2 * extent + 8
        self._segs = {c.label(): c.segments(self.reach) for c in self.curves}
        for c in self.curves:
            _check_embedded(c, self.reach)
        self._crossings = self._compute_crossings()

    def curve(self, name: str) -> PLCurve:
        for c in self.curves:
            if c.label() == name:
                return c
        raise PlanarError(f"no curve named {name!r}")

    def segments_of(self, curve: PLCurve) -> tuple:
        return self._segs[curve.label()]

    def _compute_crossings(self):
        out = []
        for ca, cb in itertools.combinations(self.curves, 2):
            for sa in self._segs[ca.label()]:
                for sb in self._segs[cb.label()]:
                    got = seg_intersection(sa.a, sa.b, sb.a, sb.b)
                    if got is None:
                        continue
                    pt, t, u = got
                    if t in (0, 1) or u in (0, 1):
                        raise TangencyError(
                            f"{ca.label()} meets {cb.label()} at a vertex"
                        )
                    deg = crossing_degree(sa, sb)
                    out.append(
                        IntersectionPoint(pt, (ca, cb), (sa.index, sb.index), deg)
                    )
        return tuple(out)

    def intersections(self, a=None, b=None):
        """All crossings, or those of the (ordered) pair (a, b)."""
        if a is None:
            return list(self._crossings)
        res = []
        for x in self._crossings:
            if x.curves == (a, b):
                res.append(x)
            elif x.curves == (b, a):
                res.append(
                    IntersectionPoint(
                        x.point,
                        (a, b),
                        (x.seg_indices[1], x.seg_indices[0]),
                        1 - x.degree,
                    )
                )
        return res

    # --- paths along a curve ---------------------------------------------

    def locate(self, curve: PLCurve, pt: Point) -> tuple:
        segs = self._segs[curve.label()]
        for s in segs:
            d = s.direction()
            v = (pt[0] - s.a[0], pt[1] - s.a[1])
            if vcross(d, v) == 0:
                t = (
                    v[0] / d[0] if d[0] != 0 else v[1] / d[1]
                )
                if 0 <= t <= 1:
                    return (s.index, t)
        raise PlanarError(f"point {pt} not on curve {curve.label()}")

    def path_between(self, curve: PLCurve, pa: Point, pb: Point) -> tuple:
        """Vertex chain along the curve from pa to pb (inclusive)."""
        ia, ta = self.locate(curve, pa)
        ib, tb = self.locate(curve, pb)
        segs = self._segs[curve.label()]
        if (ia, ta) == (ib, tb):
            raise PlanarError("degenerate arc along a curve")
        pts = [pa]
        if (ia, ta) < (ib, tb):
            for k in range(ia, ib):
                pts.append(segs[k].b)
        else:
            for k in range(ia, ib, -1):
                pts.append(segs[k].a)
        pts.append(pb)
        clean = [pts[0]]
        for p in pts[1:]:
            if p != clean[-1]:
                clean.append(p)
        return tuple(clean)


# --- polygons --------------------------------------------------------------


@dataclass(frozen=True)
class Polygon:
    corners: tuple        # (y_0, ..., y_d) points
    branes: tuple         # curve labels (L_0, ..., L_d)
    loop: tuple           # closed PL vertex chain, last == first


def _loop_segments(loop):
    return [(loop[i], loop[i + 1]) for i in range(len(loop) - 1)]


def _signed_area2(loop) -> Fraction:
    acc = Frac(0)
    for (a, b) in _loop_segments(loop):
        acc += a[0] * b[1] - b[0] * a[1]
    return acc


def _is_simple(loop) -> bool:
    segs = _loop_segments(loop)
    n = len(segs)
    for i in range(n):
        for j in range(i + 1, n):
            adjacent = (j == i + 1) or (i == 0 and j == n - 1)
            a, b = segs[i]
            c, d = segs[j]
            try:
                got = seg_intersection(a, b, c, d)
            except TangencyError:
                return False
            if got is None:
                continue
            pt, t, u = got
            if adjacent:
                shared = segs[i][1] if j == i + 1 else segs[i][0]
                if pt != shared:
                    return False
            else:
                return False
    return True


def assemble_polygon(config: Configuration, branes, corners):
    """The candidate disk for the corner cycle, or None.

    branes: curves (L_0, ..., L_d); corners: points (y_0, ..., y_d) with
    y_i on L_{i-1} and L_i (indices mod d+1).  Valid iff the loop of arcs
    is simple, clockwise, and right-turning at every corner.
    """
    d1 = len(branes)
    if len(corners) != d1 or d1 < 2:
        raise PlanarError("corner cycle and brane cycle must match, length >= 2")
    arcs = []
    for i in range(d1):
        arcs.append(
            config.path_between(branes[i], corners[i], corners[(i + 1) % d1])
        )
    loop = [corners[0]]
    for arc in arcs:
        loop.extend(arc[1:])
    if loop[0] != loop[-1]:
        raise PlanarError("polygon loop failed to close")
    if len(loop) < 4:
        return None
    if not _is_simple(tuple(loop)):
        return None
    if _signed_area2(tuple(loop)) >= 0:
        return None  # counts are clockwise in this convention
    # convex (right) turns exactly at the designated corners
    for i in range(d1):
        pt = corners[i]
        arc_in = arcs[(i - 1) % d1]
        arc_out = arcs[i]
        vin = (pt[0] - arc_in[-2][0], pt[1] - arc_in[-2][1])
        vout = (arc_out[1][0] - pt[0], arc_out[1][1] - pt[1])
        if vcross(vin, vout) >= 0:
            return None
    return Polygon(tuple(corners), tuple(b.label() for b in branes), tuple(loop))


def enumerate_polygons(config: Configuration, branes, corner_choices=None):
    """All embedded convex-corner polygons on the brane cycle.

    corner_choices optionally fixes the corner points; otherwise every
    combination of crossings y_i in L_{i-1} cap L_i is tried.
    """
    d1 = len(branes)
    if corner_choices is not None:
        poly = assemble_polygon(config, branes, corner_choices)
        return [poly] if poly else []
    slots = []
    for i in range(d1):
        xs = config.intersections(branes[(i - 1) % d1], branes[i])
        slots.append([x.point for x in xs])
    found = []
    for combo in itertools.product(*slots):
        if len(set(combo)) != d1:
            continue
        poly = assemble_polygon(config, branes, combo)
        if poly:
            found.append(poly)
    return found


CORNER_TYPE_1 = "type1"
CORNER_TYPE_2 = "type2"
CORNER_TYPE_3 = "type3"
CORNER_OTHER = "other"


def classify_corner_data(corners, companion_flags, w) -> str:
    """Classify by how many companion-curve corners sit left of q = w.

    corners: cyclically ordered corner points; companion_flags marks the
    corners lying on the companion curve (cone tail or test line).  The
    admissible configurations put every staircase-staircase corner right
    of w; anything else is 'other'.
    """
    w = Frac(w)
    left = [i for i, p in enumerate(corners) if p[0] < w]
    comp = {i for i, f in enumerate(companion_flags) if f}
    if any(i not in comp for i in left):
        return CORNER_OTHER
    left_comp = set(left)
    if not left_comp:
        return CORNER_TYPE_1
    if left_comp == comp and len(comp) == 2:
        return CORNER_TYPE_2
    if len(left_comp) == 1:
        return CORNER_TYPE_3
    return CORNER_OTHER


# --- arrangement, regions, boundary stripping -----------------------------


def _angle_cmp(u, v) -> int:
    def half(d):
        return 0 if (d[1] > 0 or (d[1] == 0 and d[0] > 0)) else 1

    hu, hv = half(u), half(v)
    if hu != hv:
        return -1 if hu < hv else 1
    c = vcross(u, v)
    if c == 0:
        return 0
    return -1 if c > 0 else 1


class Arrangement:
    """Planar subdivision of a configuration inside a clip box.

    Nodes are curve vertices, crossings and box corners; edges are the
    sub-segments between them; faces come from leftward traversal of
    directed edges.  Faces meeting the box are unbounded territory.
    """

    def __init__(self, config: Configuration, extra_curves=()):
        self.config = config
        curves = list(config.curves) + list(extra_curves)
        reach = config.reach
        lo = -reach - 1
        hi = reach + 1
        box = [
            ((lo, lo), (hi, lo)),
            ((hi, lo), (hi, hi)),
            ((hi, hi), (lo, hi)),
            ((lo, hi), (lo, lo)),
        ]
        raw = []
        for c in curves:
            for s in config.segments_of(c):
                raw.append((s.a, s.b, c.label()))
        for (a, b) in box:
            raw.append(
                ((Frac(a[0]), Frac(a[1])), (Frac(b[0]), Frac(b[1])), "#box")
            )
        self.edges, self.edge_owner = self._split_all(raw)
        self._build_faces()

    def _split_all(self, raw):
        cuts = {i: {Frac(0), Frac(1)} for i in range(len(raw))}
        for i, j in itertools.combinations(range(len(raw)), 2):
            a, b, _ = raw[i]
            c, d, _ = raw[j]
            try:
                got = seg_intersection(a, b, c, d)
            except TangencyError:
                if raw[i][2] == "#box" or raw[j][2] == "#box":
                    continue
                raise
            if got:
                _, t, u = got
                cuts[i].add(t)
                cuts[j].add(u)
        edges = []
        owner = []
        for i, (a, b, name) in enumerate(raw):
            ts = sorted(cuts[i])
            for t0, t1 in zip(ts, ts[1:]):
                p = (a[0] + t0 * (b[0] - a[0]), a[1] + t0 * (b[1] - a[1]))
                q = (a[0] + t1 * (b[0] - a[0]), a[1] + t1 * (b[1] - a[1]))
                if p != q:
                    edges.append((p, q))
                    owner.append(name)
        return edges, owner

    def _build_faces(self):
        out = {}
        for idx, (p, q) in enumerate(self.edges):
            out.setdefault(p, []).append((q, idx, +1))
            out.setdefault(q, []).append((p, idx, -1))
        for node, lst in out.items():
            lst.sort(
                key=cmp_to_key(
                    lambda e1, e2: _angle_cmp(
                        (e1[0][0] - node[0], e1[0][1] - node[1]),
                        (e2[0][0] - node[0], e2[0][1] - node[1]),
                    )
                )
            )
        self._out = out
        visited = set()
        faces = []
        half_face = {}
        for idx in range(len(self.edges)):
            for sgn in (+1, -1):
                if (idx, sgn) in visited:
                    continue
                cycle = []
                cur = (idx, sgn)
                while cur not in visited:
                    visited.add(cur)
                    cycle.append(cur)
                    i, s = cur
                    p, q = self.edges[i]
                    head = q if s > 0 else p
                    tail = p if s > 0 else q
                    back = (tail[0] - head[0], tail[1] - head[1])
                    lst = self._out[head]
                    pos = None
                    for k, (other, j, t) in enumerate(lst):
                        if j == i and (
                            (t > 0 and head == self.edges[j][0])
                            or (t < 0 and head == self.edges[j][1])
                        ) and other == tail:
                            pos = k
                            break
                    nxt = lst[(pos - 1) % len(lst)]
                    cur = (nxt[1], nxt[2])
                face_id = len(faces)
                faces.append(tuple(cycle))
                for he in cycle:
                    half_face[he] = face_id
        self.faces = faces
        self.half_face = half_face
        self.face_left = half_face  # face on the left of each directed edge
        box_faces = set()
        for idx, name in enumerate(self.edge_owner):
            if name == "#box":
                box_faces.add(half_face[(idx, +1)])
                box_faces.add(half_face[(idx, -1)])
        self.unbounded = box_faces

    def face_of(self, half) -> int:
        return self.half_face[half]

    def faces_of_edge(self, idx) -> tuple:
        return (self.half_face[(idx, +1)], self.half_face[(idx, -1)])

    def bounded_faces(self) -> set:
        return set(range(len(self.faces))) - self.unbounded

    def face_boundary_points(self, fid) -> set:
        pts = set()
        for (idx, sgn) in self.faces[fid]:
            p, q = self.edges[idx]
            pts.add(p)
            pts.add(q)
        return pts


@dataclass
class Region:
    """Closure of a union of bounded arrangement faces."""

    arrangement: Arrangement
    faces: frozenset
    variant: str = ""

    def boundary_points(self) -> set:
        pts = set()
        for f in self.faces:
            pts |= self.arrangement.face_boundary_points(f)
        return pts

    def closure_points(self) -> set:
        return self.boundary_points()

    def contains_point(self, pt) -> bool:
        """Point in the closed region (boundary included)."""
        arr = self.arrangement
        for f in self.faces:
            if _point_in_face(arr, f, pt):
                return True
        return False

    def contains_loop(self, loop) -> bool:
        for p in loop:
            if not self.contains_point(p):
                return False
        for (a, b) in _loop_segments(loop):
            mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
            if not self.contains_point(mid):
                return False
        return True

    def face_count(self) -> int:
        return len(self.faces)


def _point_in_face(arr: Arrangement, fid: int, pt) -> bool:
    """Point in the closed face (boundary counts as inside)."""
    boundary = []
    for (idx, sgn) in arr.faces[fid]:
        p, q = arr.edges[idx]
        boundary.append((p, q) if sgn > 0 else (q, p))
    for (a, b) in boundary:
        if _on_segment(a, b, pt):
            return True
    # ray cast to the right, exact: count proper crossings
    crossings = 0
    for (a, b) in boundary:
        (x1, y1), (x2, y2) = a, b
        if y1 == y2:
            continue
        if (y1 > pt[1]) == (y2 > pt[1]):
            continue
        t = (pt[1] - y1) / (y2 - y1)
        xh = x1 + t * (x2 - x1)
        if xh > pt[0]:
            # half-open rule at vertices: count only the lower endpoint
            crossings += 1
    return crossings % 2 == 1


def _on_segment(a, b, pt) -> bool:
    if cross(a, b, pt) != 0:
        return False
    return (
        min(a[0], b[0]) <= pt[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= pt[1] <= max(a[1], b[1])
    )


VARIANT_R = "R"
VARIANT_R_PRIME = "R'"
VARIANT_R_DOUBLE = "R''"


def region_config(staircase, w, variant) -> Configuration:
    if variant == VARIANT_R:
        extra = build_vertical_line(w, name="l_w")
    elif variant == VARIANT_R_PRIME:
        extra = build_vertical_line(-Frac(w), name="l_-w")
    elif variant == VARIANT_R_DOUBLE:
        eps = min(x.points[0][1] * -1 for x in staircase) / 2
        extra = build_conetail(w, min(Frac(w) / 2, eps), name="c")
    else:
        raise PlanarError(f"unknown region variant {variant!r}")
    return Configuration(list(staircase) + [extra])


def regions(config: Configuration, variant="") -> Region:
    """Closure of the bounded complement components of the configuration."""
    arr = Arrangement(config)
    return Region(arr, frozenset(arr.bounded_faces()), variant)


def confinement(config: Configuration, strippable=None) -> Region:
    """Boundary stripping: iteratively remove curve edges bounding
    unbounded territory on both sides, merging faces, until stable; the
    confinement region is the union of the remaining bounded regions."""
    arr = Arrangement(config)
    parent = list(range(len(arr.faces)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    unbounded_roots = set(arr.unbounded)
    alive = {
        idx
        for idx in range(len(arr.edges))
        if arr.edge_owner[idx] != "#box"
        and (strippable is None or arr.edge_owner[idx] in strippable)
    }
    stripped = []

    def is_unbounded(face) -> bool:
        return any(find(face) == find(u) for u in unbounded_roots)

    changed = True
    while changed:
        changed = False
        for idx in sorted(alive):
            f1, f2 = arr.faces_of_edge(idx)
            if find(f1) == find(f2):
                continue
            if is_unbounded(f1) and is_unbounded(f2):
                union(f1, f2)
                alive.discard(idx)
                stripped.append(idx)
                changed = True
    bounded = {
        f for f in range(len(arr.faces)) if not is_unbounded(f)
    }
    region = Region(arr, frozenset(bounded), "confinement")
    region.stripped_edges = stripped
    return region


# --- mu^d counts from polygons --------------------------------------------


def rigid_mu_counts(config: Configuration, objects, companion, d_max=4):
    """Structure constants on the test curves and the companion brane.

    objects: ordered test curves.  For every arity d <= d_max and every
    admissible corner datum the embedded polygon count (0 or 1) enters
    mu^d iff the corner degrees satisfy out = sum(in) + 2 - d.  Returns
    dict with keys ("hom", a, b), ("mu", d, chain) over curve labels.
    """
    counts = {"hom": {}, "mu": {}}
    curves = list(objects) + ([companion] if companion else [])
    for a, b in itertools.combinations(range(len(curves)), 2):
        xs = config.intersections(curves[a], curves[b])
        counts["hom"][(curves[a].label(), curves[b].label())] = xs
    index = {c.label(): i for i, c in enumerate(curves)}

    def chain_candidates(d):
        for chain in itertools.combinations(range(len(curves)), d + 1):
            yield tuple(curves[i] for i in chain)

    for d in range(1, d_max + 1):
        for chain in chain_candidates(d):
            slots = []
            ok = True
            for i in range(d + 1):
                prev_c = chain[(i - 1) % (d + 1)]
                cur_c = chain[i]
                xs = config.intersections(prev_c, cur_c)
                if not xs:
                    ok = False
                    break
                slots.append(xs)
            if not ok:
                continue
            for combo in itertools.product(*slots):
                pts = [x.point for x in combo]
                if len(set(pts)) != d + 1:
                    continue
                poly = assemble_polygon(config, chain, pts)
                if poly is None:
                    continue
                in_degs = [combo[i].degree for i in range(1, d + 1)]
                # output degree read in (L_0, L_d) order
                y0 = config.intersections(chain[0], chain[d])
                deg0 = None
                for x in y0:
                    if x.point == pts[0]:
                        deg0 = x.degree
                if deg0 is None:
                    continue
                if deg0 != sum(in_degs) + 2 - d:
                    continue
                key = tuple(c.label() for c in chain)
                counts["mu"].setdefault((d, key), []).append((poly, pts, deg0))
    return counts


# --- broken-disk posets ----------------------------------------------------


def _trees(num_leaves: int, max_vertices: int):
    """Planar rooted trees, all vertex arities >= 1, counted by vertices."""
    if max_vertices <= 0:
        return
    if num_leaves == 0:
        return
    seen = set()

    kid_cache = {}

    def kid_options(leaves, used):
        # subtree with exactly `used` vertices (0 => bare leaf, leaves==1)
        key = (leaves, used)
        if key in kid_cache:
            return kid_cache[key]
        res = []
        if used == 0:
            if leaves == 1:
                res = [None]
        else:
            for m in range(1, leaves + 1):
                for comp in _compositions(leaves, m):
                    for kids in _kid_budget(comp, used - 1):
                        res.append(tuple(kids))
        kid_cache[key] = res
        return res

    def _kid_budget(comp, budget):
        if not comp:
            if budget == 0:
                yield []
            return
        first, rest = comp[0], comp[1:]
        for used in range(0, budget + 1):
            for kid in kid_options(first, used):
                for tail in _kid_budget(rest, budget - used):
                    yield [kid] + tail

    for total in range(1, max_vertices + 1):
        for m in range(1, num_leaves + 1):
            for comp in _compositions(num_leaves, m):
                for kids in _kid_budget(comp, total - 1):
                    t = tuple(kids)
                    if t not in seen:
                        seen.add(t)
                        yield t


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def tree_vertices(t) -> int:
    if t is None:
        return 0
    return 1 + sum(tree_vertices(k) for k in t)


def tree_contractions(t):
    """Trees obtained by contracting one internal edge (one fewer vertex)."""
    out = set()
    if t is None:
        return out

    def walk(node, path):
        for i, kid in enumerate(node):
            if kid is not None:
                out.add(_contract(t, path + (i,)))
                walk(kid, path + (i,))

    walk(t, ())
    return out


def _contract(t, path):
    if not path:
        raise PlanarError("cannot contract at the root")

    def rebuild(node, path):
        i = path[0]
        kids = list(node)
        if len(path) == 1:
            child = kids[i]
            kids[i : i + 1] = list(child)
        else:
            kids[i] = rebuild(kids[i], path[1:])
        return tuple(kids)

    return rebuild(t, path)


@dataclass(frozen=True)
class StratifiedPoset:
    """Finite space of broken-disk types: elements, specialization order
    (more broken <= less broken), open sets = up-sets."""

    elements: tuple
    leq: frozenset  # pairs (a, b) with a <= b

    def is_leq(self, a, b) -> bool:
        return (a, b) in self.leq

    def open_sets(self):
        elems = list(self.elements)
        opens = []
        for bits in itertools.product((0, 1), repeat=len(elems)):
            s = frozenset(e for e, b in zip(elems, bits) if b)
            if all(
                (b in s) for a in s for b in elems if self.is_leq(a, b)
            ):
                opens.append(s)
        return opens

    def closed_sets(self):
        universe = frozenset(self.elements)
        return [universe - o for o in self.open_sets()]

    def closure(self, a) -> frozenset:
        return frozenset(b for b in self.elements if self.is_leq(b, a))


def broken_disk_poset(d: int, k: int) -> StratifiedPoset:
    """Degenerations of a disk with d+1 boundary marked points into at
    most k components (each component keeps at least two special points).

    Elements are planar trees with d leaves and at most k vertices; the
    specialization order puts a degeneration below everything it
    contracts to, so open sets are closed under un-breaking.
    """
    if d < 1 or k < 1:
        raise PlanarError("broken_disk_poset needs d, k >= 1")
    elements = tuple(sorted(set(_trees(d, k)), key=repr))
    leq = set((t, t) for t in elements)
    # covers: t <= each contraction of t; take transitive closure
    edges = set()
    for t in elements:
        for up in tree_contractions(t):
            if up in set(elements):
                edges.add((t, up))
    changed = True
    rel = set(leq) | edges
    while changed:
        changed = False
        for (a, b) in list(rel):
            for (c, dd) in list(rel):
                if b == c and (a, dd) not in rel:
                    rel.add((a, dd))
                    changed = True
    return StratifiedPoset(elements, frozenset(rel))
