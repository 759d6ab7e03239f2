"""The bent-brane construction as decidable cell-complex surgery.

A CellModel is a rectilinear decomposition of a prism into labeled cells.
Each cell carries a face J of a fixed combinatorial cube (an object when
#J = 1) and, per model axis, one span:

    ("ext", lo, hi)           zero-extended product direction
    ("int", k, lo, hi)        the brane's k-th internal cube axis
    ("time", t0, coords)      the brane's propagation parameter from mark
                              t0 upward; coords are the model coordinates
                              of the integer marks t0, t0+1, ..., t1

Marks need not be uniformly spaced (faces inherit the parent's
coordinates), and every cut happens at a mark, so no interpolation
between marks is ever needed.  Equality "up to collared reparametrization
of the q coordinates" is decided on canonical forms: object collars soak
into adjacent propagation cells, breakpoints are renamed
order-isomorphically per axis, and cells are sorted.

The curved tube of the surgery is represented symbolically by three
rectilinear cells whose boundary behaviour is the tube's: the left
collar carries the lower back face up the height axis, and the rotated
cell carries it onto the surgery axis (the translation embedding of the
appendix).  The embedding parameters enter only through a validated
PhiParams record; the map itself is never evaluated pointwise.

Cone-tail bending is recorded as model-level (axis, side) marks; an axis
all of whose cells are fully extended and whose both collars are bent is
a recognised tail factor.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .cubes import CollaredCube, face_subcube, k_prime, closure_bar
from .gradedmod import StructureError

Frac = Fraction
EPS = Frac(1, 8)  # symbolic collar scale; only its smallness matters

KIND_BASE = "base"
KIND_VSMALL = "vsmall"
KIND_TUBE_LEFT = "tube-left"
KIND_TUBE_EXIT = "tube-exit"
KIND_TUBE_BULK = "tube-bulk"
KIND_VBIG = "vbig"
KIND_STRIP = "strip"


@dataclass(frozen=True)
class PhiParams:
    """Symbolic record of the surgery embedding at axis i; the defining
    conditions are carried as named constraints and only the parameter
    inequalities are decidable (nothing else is ever used)."""

    i: int
    w: Fraction
    eps: Fraction
    delta_collar: Fraction

    def validate(self) -> None:
        if not (0 < self.eps < Frac(1, 2)):
            raise StructureError("phi needs 0 < eps < 1/2")
        if not (0 < self.delta_collar < Frac(1, 2)):
            raise StructureError("phi needs a small positive collar delta")
        if self.w <= 0 or self.i < 1:
            raise StructureError("phi needs positive width and axis index")

    def constraints(self) -> tuple:
        return (
            "straight collar near the inner edge, quarter-turned collar"
            " near the outer edge",
            "first component increasing away from the far collar",
            "second component decreasing away from the near collar",
            "both components increasing in the radial direction",
        )


@dataclass(frozen=True)
class Cell:
    spans: tuple      # sorted tuple of (axis, span)
    brane: tuple      # face subset J of the generating cube
    kind: str = KIND_BASE

    def span(self, axis):
        for a, s in self.spans:
            if a == axis:
                return s
        return None

    def axes(self):
        return tuple(a for a, _ in self.spans)


@dataclass(frozen=True)
class CellModel:
    cube: CollaredCube
    axes: tuple
    cells: tuple
    bent: frozenset = frozenset()   # (axis, "front"|"back") tail marks

    def extent(self, axis):
        los, his = [], []
        for c in self.cells:
            s = c.span(axis)
            if s is None:
                continue
            lo, hi = _span_range(s)
            los.append(lo)
            his.append(hi)
        if not los:
            raise StructureError(f"model has no cells on axis {axis}")
        return (min(los), max(his))


def _span_ext(lo, hi):
    return ("ext", Frac(lo), Frac(hi))


def _span_int(k, lo, hi):
    return ("int", k, Frac(lo), Frac(hi))


def _span_time(t0, coords):
    coords = tuple(Frac(c) for c in coords)
    if len(coords) < 2 or any(a >= b for a, b in zip(coords, coords[1:])):
        raise StructureError("time span needs increasing mark coordinates")
    return ("time", int(t0), coords)


def _span_range(s):
    if s[0] == "ext":
        return (s[1], s[2])
    if s[0] == "int":
        return (s[2], s[3])
    return (s[2][0], s[2][-1])


def _time_params(s):
    return (s[1], s[1] + len(s[2]) - 1)


def initial_model(cube: CollaredCube) -> CellModel:
    """The collared simplex itself over [0,1]^{N-1} x [0,N]."""
    n = cube.n
    if n < 1:
        raise StructureError("models need dimension >= 1")
    spans = [(a, _span_int(a, 0, 1)) for a in range(1, n)]
    spans.append((n, _span_time(0, tuple(range(n + 1)))))
    cell = Cell(tuple(sorted(spans)), tuple(range(n + 1)), KIND_BASE)
    return CellModel(cube, tuple(range(1, n + 1)), (cell,))


# --- restriction (the face oracle) -----------------------------------------


def _flat_others(others):
    return tuple(
        (a, _span_ext(*_span_range(sp)) if sp[0] == "int" else sp)
        for a, sp in others
    )


def _restrict_cell(cell: Cell, axis, side: str):
    """Collar content of the cell at the given end of the axis, with the
    axis dropped.  The caller guarantees the cell reaches that end."""
    s = cell.span(axis)
    if s is None:
        return [cell]
    others = tuple(p for p in cell.spans if p[0] != axis)
    if s[0] == "ext":
        return [Cell(others, cell.brane, cell.kind)]
    j = cell.brane
    n = len(j) - 1
    if s[0] == "time":
        t0, t1 = _time_params(s)
        if side == "front":
            if t0 != 0:
                raise StructureError("time cut away from the bottom mark")
            return [Cell(_flat_others(others), (j[0],), cell.kind)]
        if t1 != n:
            raise StructureError("time cut away from the top mark")
        return [Cell(_flat_others(others), (j[-1],), cell.kind)]
    _, k, lo, hi = s
    if side == "front":
        return [_face_reindex(cell, others, k)]
    return _back_split(cell, others, k)


def _face_reindex(cell: Cell, others, k):
    """Front face along local axis k: remove vertex k and its mark."""
    j = cell.brane
    new_j = j[:k] + j[k + 1 :]
    spans = []
    for a, sp in others:
        if sp[0] == "int":
            _, m, lo, hi = sp
            spans.append((a, _span_int(m if m < k else m - 1, lo, hi)))
        elif sp[0] == "time":
            t0, coords = sp[1], sp[2]
            t1 = t0 + len(coords) - 1
            if t0 <= k <= t1:
                coords = coords[: k - t0] + coords[k - t0 + 1 :]
            t0n = t0 - (1 if k < t0 else 0)
            spans.append((a, _span_time(t0n, coords)))
        else:
            spans.append((a, sp))
    return Cell(tuple(sorted(spans)), new_j, cell.kind)


def _back_split(cell: Cell, others, k):
    """Back face along local axis k: the glued pair of sub-faces."""
    j = cell.brane
    le, ge = j[: k + 1], j[k:]
    tspan = None
    for a, sp in others:
        if sp[0] == "time":
            tspan = (a, sp)
    if tspan is None:
        raise StructureError("back split needs a time span in the cell")
    _, s = tspan
    t0, coords = s[1], s[2]
    t1 = t0 + len(coords) - 1
    if not (t0 <= k <= t1):
        raise StructureError("back split point outside the carried interval")
    le_coords = coords[: k - t0 + 1]
    ge_coords = coords[k - t0 :]
    le_spans, ge_spans = [], []
    for a, sp in others:
        if sp[0] == "time":
            if len(le_coords) >= 2:
                le_spans.append((a, _span_time(t0, le_coords)))
            else:
                le_spans.append((a, _span_ext(le_coords[0], le_coords[0])))
            if len(ge_coords) >= 2:
                ge_spans.append((a, _span_time(0, ge_coords)))
            else:
                ge_spans.append((a, _span_ext(ge_coords[0], ge_coords[0])))
        elif sp[0] == "int":
            _, m, l2, h2 = sp
            if m < k:
                le_spans.append((a, sp))
                ge_spans.append((a, _span_ext(l2, h2)))
            else:
                le_spans.append((a, _span_ext(l2, h2)))
                ge_spans.append((a, _span_int(m - k, l2, h2)))
        else:
            le_spans.append((a, sp))
            ge_spans.append((a, sp))
    out = []
    if len(le) >= 2:
        out.append(Cell(tuple(sorted(le_spans)), le, cell.kind))
    if len(ge) >= 2:
        out.append(Cell(tuple(sorted(ge_spans)), ge, cell.kind))
    return out


def extract_face(model: CellModel, axis, side: str) -> CellModel:
    """The sub-model collaring the outer hyperplane of the given axis."""
    lo, hi = model.extent(axis)
    keep = []
    for cell in model.cells:
        s = cell.span(axis)
        if s is None:
            keep.append(cell)
            continue
        slo, shi = _span_range(s)
        if side == "front" and slo != lo:
            continue
        if side == "back" and shi != hi:
            continue
        keep.extend(_restrict_cell(cell, axis, side))
    axes = tuple(a for a in model.axes if a != axis)
    bent = frozenset(m for m in model.bent if m[0] != axis)
    return CellModel(model.cube, axes, tuple(keep), bent)


# --- the surgery ------------------------------------------------------------


def _mark_coordinate(cells, height_axis, mark):
    """Model coordinate of an absolute height mark.  Absolute heights are
    global vertex values (marked-prism convention), recovered from each
    propagation cell's brane."""
    coords = set()
    for c in cells:
        s = c.span(height_axis)
        if s is None or s[0] != "time":
            continue
        t0, cs = s[1], s[2]
        for pos, coord in enumerate(cs):
            if Frac(c.brane[t0 + pos]) == mark:
                coords.add(coord)
    if len(coords) != 1:
        raise StructureError(
            f"glue mark {mark} not located consistently: {sorted(coords)}"
        )
    return coords.pop()


def _height_parts(cells, height_axis, mark):
    """Split a face model at an absolute height mark; returns
    (lower, upper, coordinate)."""
    split_at = _mark_coordinate(cells, height_axis, mark)
    lower, upper = [], []
    for c in cells:
        s = c.span(height_axis)
        if s is None:
            raise StructureError("face model lost its height axis")
        lo, hi = _span_range(s)
        if hi <= split_at:
            lower.append(c)
        elif lo >= split_at:
            upper.append(c)
        else:
            raise StructureError(
                "cell straddles the glue height; back collaring violated"
            )
    return lower, upper, split_at


def _reaching(cells, axis, side):
    lo = min(_span_range(c.span(axis))[0] for c in cells if c.span(axis))
    hi = max(_span_range(c.span(axis))[1] for c in cells if c.span(axis))
    out = []
    for c in cells:
        s = c.span(axis)
        if s is None:
            out.append(c)
            continue
        slo, shi = _span_range(s)
        if side == "front" and slo == lo:
            out.append(c)
        if side == "back" and shi == hi:
            out.append(c)
    return out


def _map_coord(v, src, dst):
    (a, b), (c, d) = src, dst
    return c + (d - c) * (v - a) / (b - a)


def _mapped_height_span(s, src, dst):
    if s[0] == "time":
        return _span_time(s[1], tuple(_map_coord(c, src, dst) for c in s[2]))
    lo, hi = _span_range(s)
    return _span_ext(_map_coord(lo, src, dst), _map_coord(hi, src, dst))


def _assemble_surgery(model, i, height, lower, upper, width, coord, eps):
    """Glue the corner square (side `width`) and strip onto axis i."""
    w_lo, w_hi = model.extent(i)
    sq_lo, sq_hi = w_hi, w_hi + width
    src = (Frac(0), coord)
    cells = list(model.cells)
    for c in _reaching(lower, height, "front"):
        for r in _restrict_cell(c, height, "front"):
            spans = list(r.spans) + [
                (i, _span_ext(sq_lo, sq_lo + eps)),
                (height, _span_ext(0, eps)),
            ]
            cells.append(Cell(tuple(sorted(spans)), r.brane, KIND_VSMALL))
    for c in lower:
        s = c.span(height)
        spans = [(a, sp) for a, sp in c.spans if a != height]
        spans.append((height, _mapped_height_span(s, src, (eps, coord - eps))))
        spans.append((i, _span_ext(sq_lo, sq_lo + eps)))
        cells.append(Cell(tuple(sorted(spans)), c.brane, KIND_TUBE_LEFT))
    for c in lower:
        s = c.span(height)
        mapped = _mapped_height_span(s, src, (sq_lo + eps, sq_hi - eps))
        spans = [(a, sp) for a, sp in c.spans if a != height]
        spans.append((i, mapped))
        spans.append((height, _span_ext(0, coord - eps)))
        cells.append(Cell(tuple(sorted(spans)), c.brane, KIND_TUBE_EXIT))
    for c in _reaching(lower, height, "back"):
        for r in _restrict_cell(c, height, "back"):
            spans_top = list(r.spans) + [
                (i, _span_ext(sq_lo, sq_hi)),
                (height, _span_ext(coord - eps, coord)),
            ]
            cells.append(Cell(tuple(sorted(spans_top)), r.brane, KIND_VBIG))
            spans_right = list(r.spans) + [
                (i, _span_ext(sq_hi - eps, sq_hi)),
                (height, _span_ext(0, coord - eps)),
            ]
            cells.append(Cell(tuple(sorted(spans_right)), r.brane, KIND_VBIG))
    for c in upper:
        spans = list(c.spans) + [(i, _span_ext(sq_lo, sq_hi))]
        cells.append(Cell(tuple(sorted(spans)), c.brane, KIND_STRIP))
    return CellModel(model.cube, model.axes, tuple(cells), model.bent)


def b_step(model: CellModel, i: int, params: PhiParams | None = None,
           glue_mark=None) -> CellModel:
    """One surgery step at axis i: glue the square and strip at the
    absolute height mark (the vertex value i by default)."""
    params = params or PhiParams(max(i, 1), Frac(1), EPS, EPS / 2)
    params.validate()
    height = max(model.axes)
    if i == height or i not in model.axes:
        raise StructureError("surgery axis out of range")
    mark = Frac(glue_mark if glue_mark is not None else i)
    back = extract_face(model, i, "back")
    lower, upper, coord = _height_parts(back.cells, height, mark)
    if not lower or not upper:
        raise StructureError("back face does not reach the glue height")
    return _assemble_surgery(
        model, i, height, lower, upper, mark, coord, params.eps
    )


def b_prime(cube: CollaredCube) -> CellModel:
    """Iterated surgery; the composition is empty for edges."""
    model = initial_model(cube)
    for i in range(1, cube.n):
        model = b_step(model, i)
    return model


def b_full(cube: CollaredCube) -> CellModel:
    """Surgery plus cone-tail bending of every outer collar."""
    model = b_prime(cube)
    marks = {(a, side) for a in model.axes for side in ("front", "back")}
    return CellModel(model.cube, model.axes, model.cells, frozenset(marks))


def face_front(model: CellModel, keep: tuple) -> CellModel:
    """Front-restriction oracle: collapse every axis not serving K."""
    out = model
    for a in sorted(model.axes, reverse=True):
        if a not in keep:
            out = extract_face(out, a, "front")
    return out


def face_back(model: CellModel, collapse: tuple) -> CellModel:
    """Back-restriction oracle: collapse the axes in K (0 excluded)."""
    out = model
    for a in sorted(model.axes, reverse=True):
        if a in collapse and a != 0:
            out = extract_face(out, a, "back")
    return out


# --- canonical forms ---------------------------------------------------------


def _resolve(model: CellModel):
    """Cells with branes resolved through the cube's opaque labels."""
    cube = model.cube
    out = []
    for c in model.cells:
        j = c.brane
        if len(j) == 1:
            rb = ("obj", cube.label(j))
        else:
            marks = tuple(cube.label((v,)) for v in j)
            rb = ("simplex", cube.label(j), marks)
        out.append((dict(c.spans), rb))
    return out


def _cross_key(spans, axis):
    """Hashable view of a cell's spans away from one axis, with int spans
    flattened to their extents (an object collar matches them)."""
    out = []
    for ax, s in sorted(spans.items()):
        if ax == axis:
            continue
        if s[0] == "int":
            out.append((ax, ("ext",) + _span_range(s)))
        else:
            out.append((ax, s))
    return tuple(out)


def _norm_cells(model: CellModel):
    """Resolved cells with time spans reduced to (t0, t1, lo, hi).

    Interior mark coordinates are bookkeeping of the symbolic surgery,
    not geometry; collared reparametrization slides them freely, so the
    canonical form keeps only the carried range and the endpoints."""
    out = []
    for spans, rb in _resolve(model):
        ns = {}
        for ax, s in spans.items():
            if s[0] == "time":
                t0 = s[1]
                t1 = t0 + len(s[2]) - 1
                ns[ax] = ("time", t0, t1, s[2][0], s[2][-1])
            else:
                ns[ax] = s
        out.append((ns, rb))
    return out


def _span_bounds(s):
    if s[0] == "time":
        return (s[3], s[4])
    return _span_range(s)


def _grid_split_objects(cells):
    """Split object cells along every axis at the global breakpoints."""
    breakpoints = {}
    for spans, _ in cells:
        for ax, s in spans.items():
            lo, hi = _span_bounds(s)
            breakpoints.setdefault(ax, set()).update((lo, hi))
    out = []
    for spans, rb in cells:
        if rb[0] != "obj":
            out.append((spans, rb))
            continue
        pieces = [spans]
        for ax in sorted(spans):
            nxt = []
            for sp in pieces:
                lo, hi = _span_bounds(sp[ax])
                cuts = sorted(
                    v for v in breakpoints.get(ax, ()) if lo < v < hi
                )
                edges = [lo] + cuts + [hi]
                for a, b in zip(edges, edges[1:]):
                    piece = dict(sp)
                    piece[ax] = ("ext", a, b)
                    nxt.append(piece)
            pieces = nxt
        out.extend((p, rb) for p in pieces)
    return out


def _try_rules(a, b):
    """Attempt to merge the pair; returns (merged_cells, leftovers) or
    None.  Order of a and b is immaterial."""
    for first, second in ((a, b), (b, a)):
        out = _pair_soak(first, second)
        if out is not None:
            return out
    out = _pair_obj_obj(a, b)
    if out is not None:
        return out
    return _pair_prop_prop(a, b)


def _pair_obj_obj(a, b):
    (sa, ra), (sb, rbb) = a, b
    if ra[0] != "obj" or rbb[0] != "obj" or ra != rbb:
        return None
    if set(sa) != set(sb):
        return None
    diff = [ax for ax in sa if sa[ax] != sb[ax]]
    if len(diff) != 1:
        return None
    ax = diff[0]
    (alo, ahi) = _span_bounds(sa[ax])
    (blo, bhi) = _span_bounds(sb[ax])
    if ahi == blo or bhi == alo:
        merged = dict(sa)
        merged[ax] = ("ext", min(alo, blo), max(ahi, bhi))
        return ((merged, ra), [])
    return None


def _pair_prop_prop(a, b):
    """Merge two propagation cells: the same brane continuing along its
    time axis, or the same content side by side.  In the side-by-side
    case the time-axis bounds may disagree (they record how much collar
    each band absorbed, which is not content); the merge takes their
    union."""
    (sa, ra), (sb, rbb) = a, b
    if ra[0] != "simplex" or ra != rbb:
        return None
    if set(sa) != set(sb):
        return None
    diff = [ax for ax in sa if sa[ax] != sb[ax]]
    if not diff:
        return None
    taxes = [ax for ax in sa if sa[ax][0] == "time"]
    taxis = taxes[0] if taxes else None
    hard_diff = [ax for ax in diff if ax != taxis]
    if len(hard_diff) > 1:
        return None
    if len(hard_diff) == 0:
        # continuation along the time axis
        ax = taxis
        s1, s2 = sa[ax], sb[ax]
        (alo, ahi), (blo, bhi) = _span_bounds(s1), _span_bounds(s2)
        if bhi == alo:
            s1, s2 = s2, s1
            (alo, ahi), (blo, bhi) = (blo, bhi), (alo, ahi)
        if ahi != blo or s1[0] != "time" or s2[0] != "time":
            return None
        if s1[2] != s2[1]:
            return None
        merged = dict(sa)
        merged[ax] = ("time", s1[1], s2[2], alo, bhi)
        return ((merged, ra), [])
    ax = hard_diff[0]
    s1, s2 = sa[ax], sb[ax]
    if taxis is not None and sa[taxis][1:3] != sb[taxis][1:3]:
        return None  # different carried ranges never sit side by side
    (alo, ahi), (blo, bhi) = _span_bounds(s1), _span_bounds(s2)
    if bhi == alo:
        sa, sb = sb, sa
        s1, s2 = s2, s1
        (alo, ahi), (blo, bhi) = (blo, bhi), (alo, ahi)
    if ahi != blo:
        return None
    if (s1[0] == "ext" and s2[0] == "ext") or (
        s1[0] == "int" and s2[0] == "int" and s1[1] == s2[1]
    ):
        merged = dict(sa)
        head = ("ext",) if s1[0] == "ext" else ("int", s1[1])
        merged[ax] = head + (alo, bhi)
        if taxis is not None:
            t1, t2 = sa[taxis], sb[taxis]
            merged[taxis] = (
                "time", t1[1], t1[2],
                min(t1[3], t2[3]), max(t1[4], t2[4]),
            )
        return ((merged, ra), [])
    return None


def _pair_soak(t_cell, o_cell):
    (st, rt) = t_cell
    (so, ro) = o_cell
    if rt[0] != "simplex" or ro[0] != "obj":
        return None
    taxis = None
    for ax, s in st.items():
        if s[0] == "time":
            taxis = ax
    if taxis is None or set(so) != set(st) or so[taxis][0] != "ext":
        return None
    if not all(
        _span_bounds(so[ax])[0] <= _span_bounds(st[ax])[0]
        and _span_bounds(st[ax])[1] <= _span_bounds(so[ax])[1]
        for ax in so
        if ax != taxis
    ):
        return None
    _, t0, t1, lo, hi = st[taxis]
    olo, ohi = _span_bounds(so[taxis])
    if ohi == lo and ro[1] == rt[2][t0]:
        merged = dict(st)
        merged[taxis] = ("time", t0, t1, olo, hi)
    elif olo == hi and ro[1] == rt[2][t1]:
        merged = dict(st)
        merged[taxis] = ("time", t0, t1, lo, ohi)
    else:
        return None
    remainders = []
    core = dict(so)
    for ax in sorted(so):
        if ax == taxis:
            continue
        clo, chi = _span_bounds(core[ax])
        tlo, thi = _span_bounds(st[ax])
        if clo < tlo:
            left = dict(core)
            left[ax] = ("ext", clo, tlo)
            remainders.append((left, ro))
        if thi < chi:
            right = dict(core)
            right[ax] = ("ext", thi, chi)
            remainders.append((right, ro))
        core[ax] = ("ext", tlo, thi)
    return ((merged, rt), remainders)


def _phase_pass(cells, rule, left_kind=None, right_kind=None):
    """One greedy pass of a pairwise rule over bucketed candidates;
    returns (cells, progress).  Kinds restrict the candidate sides."""
    buckets = {}
    for idx, (spans, rb) in enumerate(cells):
        buckets.setdefault(frozenset(spans), []).append(idx)
    dead = set()
    out = list(cells)
    progress = False
    for group in buckets.values():
        lefts = [
            i for i in group
            if left_kind is None or out[i][1][0] == left_kind
        ]
        rights = [
            i for i in group
            if right_kind is None or out[i][1][0] == right_kind
        ]
        for ia in lefts:
            if ia in dead:
                continue
            for ib in rights:
                if ib == ia or ib in dead or ia in dead:
                    continue
                got = rule(out[ia], out[ib])
                if got is None and (left_kind, right_kind) == (None, None):
                    got = rule(out[ib], out[ia])
                if got is not None:
                    merged, leftovers = got
                    dead.add(ia)
                    dead.add(ib)
                    out.append(merged)
                    out.extend(leftovers)
                    progress = True
                    break
    return [c for i, c in enumerate(out) if i not in dead], progress


def _soak_rule(a, b):
    return _pair_soak(a, b)


def _objobj_rule(a, b):
    return _pair_obj_obj(a, b)


def _propprop_rule(a, b):
    return _pair_prop_prop(a, b)


def _run_phase(cells, rule, left_kind=None, right_kind=None):
    progress_any = False
    while True:
        cells, progress = _phase_pass(cells, rule, left_kind, right_kind)
        if not progress:
            return cells, progress_any
        progress_any = True


def _atomize_objects(cells):
    """Split remaining object cells on the global breakpoint grid; the
    atomic decomposition is independent of merge order."""
    breakpoints = {}
    for spans, _ in cells:
        for ax, s in spans.items():
            lo, hi = _span_bounds(s)
            breakpoints.setdefault(ax, set()).update((lo, hi))
    out = []
    for spans, rb in cells:
        if rb[0] != "obj":
            out.append((spans, rb))
            continue
        pieces = [spans]
        for ax in sorted(spans):
            nxt = []
            for sp in pieces:
                lo, hi = _span_bounds(sp[ax])
                cuts = sorted(v for v in breakpoints[ax] if lo < v < hi)
                edges = [lo] + cuts + [hi]
                for a2, b2 in zip(edges, edges[1:]):
                    piece = dict(sp)
                    piece[ax] = ("ext", a2, b2)
                    nxt.append(piece)
            pieces = nxt
        out.extend((p, rb) for p in pieces)
    return out


_soak_memo = {}


def _soaked_cells(model: CellModel):
    """Soak collars into propagation cells (priority), then merge object
    and propagation material, iterating to a joint fixpoint."""
    key = (id(model.cube), model.axes, model.cells, model.bent)
    if key in _soak_memo:
        return _soak_memo[key]
    cells = _soaked_cells_raw(model)
    if len(_soak_memo) > 128:
        _soak_memo.clear()
    _soak_memo[key] = cells
    return cells


def _soaked_cells_raw(model: CellModel):
    cells = _grid_split_objects(_norm_cells(model))
    while True:
        cells, p1 = _run_phase(cells, _pair_soak, "simplex", "obj")
        cells, p2 = _run_phase(cells, _pair_obj_obj, "obj", "obj")
        if p1 or p2:
            continue
        cells, p3 = _run_phase(cells, _pair_prop_prop, "simplex", "simplex")
        if not p3:
            return cells


def canonical(model: CellModel, drop_axes=frozenset()):
    """Canonical form deciding collared-reparametrization equivalence.

    After collar soaking, a cell's content is its face label together
    with the span-role profile (which axes extend it, which carry its
    cube directions, which carries its propagation range); the exact
    coordinates record only how the soaking competition resolved, which
    a collared reparametrization can undo.  The form is therefore the
    multiset of content signatures with the number of connected
    components each signature occupies (adjacency: cells abutting along
    one axis and meeting along the rest)."""
    cells = _soaked_cells(model)
    axes = sorted(a for a in model.axes if a not in drop_axes)
    rename = {a: idx for idx, a in enumerate(axes)}
    entries = []
    for spans, rb in cells:
        sig = []
        box = {}
        for ax, s in sorted(spans.items()):
            if ax in drop_axes:
                continue
            if s[0] == "ext":
                tag = ("ext",)
            elif s[0] == "int":
                tag = ("int", s[1])
            else:
                tag = ("time", s[1], s[2])
            sig.append((rename[ax], tag))
            box[rename[ax]] = _span_bounds(s)
        entry = ((rb, tuple(sig)), box)
        if drop_axes and entry in entries:
            continue
        entries.append(entry)
    groups = {}
    for sig, box in entries:
        groups.setdefault(sig, []).append(box)
    form = []
    for sig in sorted(groups, key=repr):
        boxes = groups[sig]
        n = len(boxes)
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i in range(n):
            for j in range(i + 1, n):
                if _boxes_adjacent(boxes[i], boxes[j]):
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        parent[ri] = rj
        comps = len({find(i) for i in range(n)})
        # residual object padding: connectivity depends on which
        # absorber won during soaking, which is not content
        if sig[0][0] == "obj":
            comps = 1
        form.append((sig, comps))
    marks = frozenset(
        (rename[a], side) for a, side in model.bent if a in rename
    )
    return (tuple(form), marks)


def _boxes_adjacent(b1, b2) -> bool:
    """Abut along one axis, meet (closed overlap) along every other."""
    abut = 0
    for ax in b1:
        (l1, h1), (l2, h2) = b1[ax], b2[ax]
        if h1 == l2 or h2 == l1:
            abut += 1
        elif l1 > h2 or l2 > h1:
            return False
    return abut >= 1


def tail_axes(model: CellModel) -> tuple:
    """Axes recognised as pure cone-tail factors after soaking: bent on
    both sides and fully extended by every cell."""
    cells = _soaked_cells(model)
    out = []
    for a in model.axes:
        if (a, "front") not in model.bent or (a, "back") not in model.bent:
            continue
        bounds = [_span_bounds(sp[a]) for sp, _ in cells if a in sp]
        if not bounds:
            continue
        lo = min(b[0] for b in bounds)
        hi = max(b[1] for b in bounds)
        if all(
            a in sp and sp[a][0] == "ext" and _span_bounds(sp[a]) == (lo, hi)
            for sp, _ in cells
        ):
            out.append(a)
    return tuple(out)


def models_equal(m1: CellModel, m2: CellModel) -> bool:
    return canonical(m1) == canonical(m2)


def relabel_axes(model: CellModel, mapping: dict) -> CellModel:
    cells = []
    for c in model.cells:
        spans = tuple(sorted((mapping[a], s) for a, s in c.spans))
        cells.append(Cell(spans, c.brane, c.kind))
    axes = tuple(sorted(mapping[a] for a in model.axes))
    bent = frozenset((mapping[a], side) for a, side in model.bent)
    return CellModel(model.cube, axes, tuple(cells), bent)


# --- lemma checks -------------------------------------------------------------


def b_step_on_face(face_model: CellModel, i: int) -> CellModel:
    """The surgery at original axis i on an extracted face model; axis
    names and absolute heights are preserved by extraction."""
    return b_step(face_model, i, glue_mark=i)


def check_lemma_b1(cube: CollaredCube, i: int) -> dict:
    """The four face identities of a single surgery step, oracle versus
    stated right-hand side, compared canonically."""
    n = cube.n
    model = initial_model(cube)
    bi = b_step(model, i)
    report = {}
    for k in range(1, n):
        lhs = extract_face(bi, k, "front")
        if k == i:
            rhs = extract_face(model, i, "front")
        else:
            rhs = b_step_on_face(extract_face(model, k, "front"), i)
        report[("front", k)] = canonical(lhs) == canonical(rhs)
    for k in range(1, n):
        lhs = extract_face(bi, k, "back")
        if k == i:
            back = extract_face(model, i, "back")
            lower, upper, coord = _height_parts(back.cells, n, Frac(i))
            glued = []
            for c in _reaching(lower, n, "back"):
                for r in _restrict_cell(c, n, "back"):
                    spans = list(r.spans) + [(n, _span_ext(0, coord))]
                    glued.append(Cell(tuple(sorted(spans)), r.brane, r.kind))
            rhs = CellModel(cube, back.axes, tuple(upper + glued), back.bent)
        else:
            rhs = b_step_on_face(extract_face(model, k, "back"), i)
        report[("back", k)] = canonical(lhs) == canonical(rhs)
    # height-bottom face: original bottom plus the translated lower part
    lhs = extract_face(bi, n, "front")
    bottom = extract_face(model, n, "front")
    back = extract_face(model, i, "back")
    lower, _, coord = _height_parts(back.cells, n, Frac(i))
    w_lo, w_hi = model.extent(i)
    shifted = []
    for c in lower:
        s = c.span(n)
        spans = [(a, sp) for a, sp in c.spans if a != n]
        spans.append(
            (i, _mapped_height_span(s, (Frac(0), coord), (w_hi, w_hi + coord)))
        )
        shifted.append(Cell(tuple(sorted(spans)), c.brane, c.kind))
    rhs = CellModel(cube, bottom.axes, tuple(bottom.cells) + tuple(shifted),
                    bottom.bent)
    report[("height", "front")] = canonical(lhs) == canonical(rhs)
    # height-top face: unchanged
    lhs = extract_face(bi, n, "back")
    rhs = extract_face(model, n, "back")
    report[("height", "back")] = canonical(lhs) == canonical(rhs)
    report["all"] = all(v for v in report.values() if isinstance(v, bool))
    return report


def _axis_map(j: tuple, n: int = None) -> dict:
    """Axis correspondence for a face cube on the sorted subset J: the
    face's local axis l (1..m, height last) sits at the global axis
    named by the l-th element of J."""
    j = tuple(sorted(j))
    return {l: j[l] for l in range(1, len(j))}


def _is_single_object(model: CellModel, label) -> bool:
    form = canonical(model)[0]
    return bool(form) and all(
        sig[0] == ("obj", label) for (sig, _count) in form
    )


def check_b_faces(cube: CollaredCube, k: tuple) -> dict:
    """Front and back face identities of the full bent model: the front
    K-face is the bent model of the K-face cube; the back K-face is a
    product of tail factors over the hull gaps with the bent model of
    the terminal face."""
    k = tuple(sorted(k))
    if 0 not in k:
        raise StructureError("face subsets must contain 0")
    n = cube.n
    model = b_full(cube)
    report = {"K": k}
    lhs = face_front(model, k)
    if len(k) >= 2:
        sub = face_subcube(cube, k)
        rhs = relabel_axes(b_full(sub), _axis_map(k, n))
        report["front"] = canonical(lhs) == canonical(rhs)
    else:
        report["front"] = _is_single_object(lhs, cube.label((0,)))
    if len(k) < n + 1:
        lhs_b = face_back(model, k)
        kp = k_prime(k, n)
        gaps = tuple(sorted(set(closure_bar(k)) - set(k)))
        tails = tail_axes(lhs_b)
        report["back_tails"] = set(gaps) <= set(tails)
        core = canonical(lhs_b, drop_axes=frozenset(gaps))
        if len(kp) >= 2:
            rhs_core = relabel_axes(b_full(face_subcube(cube, kp)),
                                    _axis_map(kp, n))
            report["back"] = core == canonical(rhs_core)
        else:
            report["back"] = bool(core[0]) and all(
                sig[0] == ("obj", cube.label(kp)) for (sig, _c) in core[0]
            )
    report["all"] = all(v for kk, v in report.items() if isinstance(v, bool))
    return report


def vertex_label(model: CellModel, subset: tuple):
    """Label at the cube vertex (back for axes in the subset, front
    otherwise); agreement with the max map is the bent-cube invariant."""
    out = model
    for a in sorted(model.axes, reverse=True):
        side = "back" in ("back",) and ("back" if a in subset else "front")
        out = extract_face(out, a, side)
    labels = {model.cube.label(c.brane) for c in out.cells}
    if len(labels) != 1:
        raise StructureError(f"ambiguous vertex label: {labels}")
    return labels.pop()


def piece_projections_cover(model: CellModel) -> bool:
    """Projections of the cells onto every axis cover the prism."""
    for a in model.axes:
        lo, hi = model.extent(a)
        intervals = []
        for c in model.cells:
            s = c.span(a)
            if s is not None:
                intervals.append(_span_range(s))
        intervals.sort()
        cover = intervals[0][0]
        if cover != lo:
            return False
        for l2, h2 in intervals:
            if l2 > cover:
                return False
            cover = max(cover, h2)
        if cover != hi:
            return False
    return True


def rect_cells_disjoint(model: CellModel) -> bool:
    """Open boxes of distinct cells are pairwise disjoint (the symbolic
    square pieces occupy disjoint rectangles by construction)."""
    boxes = []
    for c in model.cells:
        box = {a: _span_range(c.span(a)) for a in c.axes()}
        boxes.append(box)
    for b1, b2 in itertools.combinations(boxes, 2):
        if set(b1) != set(b2):
            continue
        if all(
            b1[a][0] < b2[a][1] and b2[a][0] < b1[a][1] for a in b1
        ):
            return False
    return True
