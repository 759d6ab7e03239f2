"""JSON schemas (schema: 1) for cubes, base categories, planar
configurations and reports.  Rationals travel as "p/q" strings so
nothing is ever rounded."""

from __future__ import annotations

import json
from fractions import Fraction

from .ainf import AInfCategory, MultilinearOp
from .cubes import CollaredCube, nonempty_subsets, skeleton_nc, AVOIDS_ALL
from .gradedmod import FreeGradedModule, Mode, StructureError, Vector
from .planar import (
    Configuration,
    PLCurve,
    StaircaseParams,
    build_conetail,
    build_staircase,
    build_vertical_line,
    build_bent_edge,
)

SCHEMA = 1


class FormatError(StructureError):
    pass


def frac_out(x) -> str:
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def frac_in(s) -> Fraction:
    try:
        if isinstance(s, str):
            num, _, den = s.partition("/")
            return Fraction(int(num), int(den or 1))
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad rational {s!r}") from exc


def _label_out(label):
    if isinstance(label, tuple):
        return {"tuple": [_label_out(x) for x in label]}
    return label


def _label_in(obj):
    if isinstance(obj, dict) and "tuple" in obj:
        return tuple(_label_in(x) for x in obj["tuple"])
    return obj


def cube_to_dict(cube: CollaredCube) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "collared-cube",
        "n": cube.n,
        "faces": [
            {"subset": list(j), "label": _label_out(cube.label(j))}
            for j in nonempty_subsets(cube.n)
        ],
        "widths": [frac_out(w) for w in cube.widths],
        "depth": frac_out(cube.depth),
        "width": frac_out(cube.width),
        "non_characteristic": (
            {"mode": "avoids-all"}
            if cube.nc_flag == AVOIDS_ALL
            else {"mode": "skeleton", "margin": frac_out(cube.nc_flag[1])}
        ),
    }


def cube_from_dict(data: dict) -> CollaredCube:
    if data.get("kind") != "collared-cube":
        raise FormatError("not a collared-cube document")
    face_data = {}
    for item in data["faces"]:
        face_data[tuple(item["subset"])] = _label_in(item["label"])
    nc = data.get("non_characteristic", {"mode": "avoids-all"})
    flag = (
        AVOIDS_ALL
        if nc.get("mode") == "avoids-all"
        else skeleton_nc(frac_in(nc["margin"]))
    )
    return CollaredCube(
        n=data["n"],
        face_data=face_data,
        widths=tuple(frac_in(w) for w in data.get("widths", [])) or (),
        depth=frac_in(data.get("depth", "2/1")),
        width=frac_in(data.get("width", "1/1")),
        nc_flag=flag,
    )


def category_to_dict(cat: AInfCategory) -> dict:
    homs = []
    for (a, b), mod in cat.hom.items():
        homs.append(
            {
                "source": _label_out(a),
                "target": _label_out(b),
                "basis": [
                    {"id": _label_out(bid), "degree": d}
                    for bid, d in mod.basis
                ],
            }
        )
    ops = []
    for d, table in cat.mu.items():
        for chain, op in table.items():
            entries = []
            for ids, out in op.table.items():
                entries.append(
                    {
                        "inputs": [_label_out(i) for i in ids],
                        "output": {
                            json.dumps(_label_out(t)): c
                            for t, c in out.items()
                        },
                    }
                )
            ops.append(
                {
                    "arity": d,
                    "chain": [_label_out(x) for x in chain],
                    "entries": entries,
                }
            )
    return {
        "schema": SCHEMA,
        "kind": "base-category",
        "mode": cat.mode.value,
        "objects": [_label_out(x) for x in cat.objects],
        "hom": homs,
        "mu": ops,
        "max_arity": cat.max_arity,
    }


def category_from_dict(data: dict) -> AInfCategory:
    if data.get("kind") != "base-category":
        raise FormatError("not a base-category document")
    mode = Mode(data["mode"])
    objects = tuple(_label_in(x) for x in data["objects"])
    hom = {}
    for item in data["hom"]:
        mod = FreeGradedModule(
            mode,
            tuple(
                (_label_in(b["id"]), b["degree"]) for b in item["basis"]
            ),
        )
        hom[(_label_in(item["source"]), _label_in(item["target"]))] = mod
    mu = {}
    for item in data.get("mu", []):
        d = item["arity"]
        chain = tuple(_label_in(x) for x in item["chain"])
        sources = [
            hom[(chain[i - 1], chain[i])] for i in range(d, 0, -1)
        ]
        target = hom[(chain[0], chain[d])]
        op = MultilinearOp(sources, target, 2 - d)
        for e in item["entries"]:
            out = {
                _label_in(json.loads(t)): c
                for t, c in e["output"].items()
            }
            op._set(tuple(_label_in(i) for i in e["inputs"]), out)
        mu.setdefault(d, {})[chain] = op
    return AInfCategory(mode, objects, hom, mu, data.get("max_arity", 4))


def curve_to_dict(c: PLCurve) -> dict:
    return {
        "kind": list(c.kind) if isinstance(c.kind, tuple) else c.kind,
        "name": c.label(),
        "points": [[frac_out(q), frac_out(p)] for q, p in c.points],
        "tail_dir": [frac_out(x) for x in c.tail_dir],
        "head_dir": [frac_out(x) for x in c.head_dir],
        "lift0": c.lift0,
    }


def curve_from_dict(data: dict) -> PLCurve:
    return PLCurve(
        kind=tuple(
            frac_in(x) if isinstance(x, str) and "/" in x else x
            for x in data["kind"]
        ),
        points=tuple(
            (frac_in(q), frac_in(p)) for q, p in data["points"]
        ),
        tail_dir=tuple(frac_in(x) for x in data["tail_dir"]),
        head_dir=tuple(frac_in(x) for x in data["head_dir"]),
        lift0=data.get("lift0", 0),
        name=data.get("name", ""),
    )


def config_to_dict(config: Configuration) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "planar-configuration",
        "curves": [curve_to_dict(c) for c in config.curves],
    }


def config_from_dict(data: dict) -> Configuration:
    if data.get("kind") != "planar-configuration":
        raise FormatError("not a planar-configuration document")
    return Configuration([curve_from_dict(c) for c in data["curves"]])


def staircase_config_dict(params: StaircaseParams, companion="conetail",
                          bumps=()) -> dict:
    """Convenience builder for bundled fixtures."""
    stairs = build_staircase(params)
    if companion == "conetail":
        extra = [build_conetail(params.w, min(params.w / 2, Fraction(1, 4)))]
    elif companion == "edge":
        extra = [build_bent_edge(params.w, Fraction(1, 8), bumps,
                                 name="edge")]
    elif companion == "vline":
        extra = [build_vertical_line(params.w, name="l_w")]
    else:
        extra = []
    return config_to_dict(Configuration(stairs + extra))


def load(path) -> dict:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    if data.get("schema") != SCHEMA:
        raise FormatError(f"{path}: unsupported schema {data.get('schema')}")
    return data


def dump(data: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
