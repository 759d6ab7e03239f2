"""Command-line verification driver.

Subcommands:
    verify   {nerve,ainf,b-faces,goal,planar,stabilize,all}
    count    polygon tables (and optional SVG) for a configuration file
    build-xi assemble and validate module-valued simplex data

Flags mirror DGCUBE_* environment variables; exit codes: 0 all checks
passed, 1 checks failed, 2 malformed input.  Reports are JSON with a
stable fingerprint (wall times stripped) so identical (config, seed)
runs are reproducible byte for byte.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__
from .ainf import (
    check_ainf_relations,
    check_goal_equation,
    check_module_relations,
    identity_premodule,
    mu1,
    premodule_residual,
    premodule_sum,
    mu2,
    yoneda_module,
    yoneda_premodule,
    NerveSimplexCandidate,
)
from .bconstruction import b_prime, canonical, check_b_faces, check_lemma_b1, \
    extract_face, relabel_axes, _axis_map
from .cubes import CollaredCube, identity_cube, p0_subsets, simplex_cube, \
    front_face, nonempty_subsets
from .gradedmod import Mode, StructureError
from .nerve import validate, face, degeneracy, equation_sides
from .planar import (
    CORNER_TYPE_1,
    CORNER_TYPE_2,
    CORNER_TYPE_3,
    Configuration,
    VARIANT_R,
    VARIANT_R_DOUBLE,
    VARIANT_R_PRIME,
    assemble_polygon,
    broken_disk_poset,
    build_conetail,
    build_staircase,
    classify_corner_data,
    confinement,
    region_config,
    regions,
    StaircaseParams,
)
from .planar_model import (
    PlanarEdgeModel,
    edge_candidate,
    planar_base_category,
    standard_edge_setup,
    verify_stabilization,
)
from .randgen import (
    hom_dg_category,
    make_rng,
    random_valid_simplex,
    staircase_grid,
)
from .serialize import (
    FormatError,
    category_from_dict,
    config_from_dict,
    cube_from_dict,
    dump,
    frac_in,
    load,
)
from . import xi as xi_mod
from .svg import render_configuration


class Runner:
    def __init__(self, config):
        self.config = config
        self.records = []

    def check(self, check_id, anchor, fn):
        t0 = time.perf_counter()
        try:
            residual = fn()
            status = "pass" if not residual else "fail"
        except StructureError as exc:
            residual = f"structural error: {exc}"
            status = "fail"
        self.records.append(
            {
                "id": check_id,
                "anchor": anchor,
                "status": status,
                "residual": residual if residual else None,
                "wall_time_ms": round(
                    (time.perf_counter() - t0) * 1000, 3
                ),
            }
        )

    def report(self) -> dict:
        records = sorted(self.records, key=lambda r: r["id"])
        return {
            "schema": 1,
            "kind": "verification-report",
            "tool_version": __version__,
            "config": self.config,
            "records": records,
            "summary": {
                "total": len(records),
                "passed": sum(r["status"] == "pass" for r in records),
                "failed": sum(r["status"] == "fail" for r in records),
            },
        }


def report_fingerprint(report: dict) -> str:
    clean = json.loads(json.dumps(report))
    for r in clean["records"]:
        r.pop("wall_time_ms", None)
    return json.dumps(clean, sort_keys=True)


def _mode(args) -> Mode:
    return Mode.Z if args.mode == "z" else Mode.Z2


# --- suites -------------------------------------------------------------------


def suite_nerve(runner, args):
    rng = make_rng(args.seed)
    for mode in (Mode.Z, Mode.Z2):
        cat, contractions = hom_dg_category(rng, mode, n_objects=2)
        for n in range(1, min(args.n_max, 4) + 1):
            s = random_valid_simplex(rng, cat, contractions, n)
            runner.check(
                f"nerve.validate.{mode.value}.N{n}",
                "nerve.simplex-equation",
                lambda s=s: validate(s),
            )
            if n >= 2:
                def faces_commute(s=s, n=n):
                    bad = []
                    for i, j in itertools.combinations(range(n + 1), 2):
                        a = face(i, face(j, s))
                        b = face(j - 1, face(i, s))
                        if a.f != b.f or a.objects != b.objects:
                            bad.append((i, j))
                    return bad
                runner.check(
                    f"nerve.simplicial-identities.{mode.value}.N{n}",
                    "nerve.face-relations",
                    faces_commute,
                )
            def degeneracies_valid(s=s, n=n):
                bad = []
                for i in range(n + 1):
                    t = degeneracy(i, s)
                    if validate(t):
                        bad.append(("s", i))
                    if face(i, t).f != s.f or face(i + 1, t).f != s.f:
                        bad.append(("ds", i))
                return bad
            runner.check(
                f"nerve.degeneracies.{mode.value}.N{n}",
                "nerve.degeneracy-relations",
                degeneracies_valid,
            )
        # N=2 expansion shape
        s2 = random_valid_simplex(rng, cat, contractions, 2)
        def expansion(s2=s2, cat=cat):
            lhs, rhs = equation_sides(s2, (0, 1, 2))
            f02 = s2.f[(0, 2)]
            comp = cat.op(
                (s2.objects[0], s2.objects[1], s2.objects[2])
            ).apply([s2.f[(1, 2)], s2.f[(0, 1)]])
            want = (f02 - comp).scaled(-1)
            return [] if (lhs == rhs and rhs == want) else ["mismatch"]
        runner.check(
            f"nerve.two-simplex-expansion.{mode.value}",
            "nerve.homotopy-expansion",
            expansion,
        )


def suite_ainf(runner, args):
    rng = make_rng(args.seed)
    from .randgen import random_premodule_map

    for mode in (Mode.Z, Mode.Z2):
        cat, _ = hom_dg_category(rng, mode, n_objects=2)
        runner.check(
            f"ainf.relations.{mode.value}",
            "ainf.structure-relations",
            lambda cat=cat: check_ainf_relations(cat, min(args.d_max, 4)),
        )
        m0 = yoneda_module(cat, cat.objects[0])
        m1 = yoneda_module(cat, cat.objects[1])
        runner.check(
            f"ainf.module-relations.{mode.value}",
            "ainf.module-equation",
            lambda m0=m0: check_module_relations(m0, min(args.d_max, 4)),
        )
        for deg in (0, 1):
            t = random_premodule_map(rng, m0, m1, deg, 3)
            runner.check(
                f"ainf.mu1-squared.{mode.value}.deg{deg}",
                "ainf.differential-squares-to-zero",
                lambda t=t: [
                    op
                    for tab in mu1(mu1(t, 4), 3).components.values()
                    for op in tab.values()
                    if not op.is_zero()
                ],
            )
        t1 = random_premodule_map(rng, m0, m1, 1, 3)
        t2 = random_premodule_map(rng, m1, m0, 0, 3)
        def leibniz(t1=t1, t2=t2):
            lhs = mu1(mu2(t2, t1, 4), 3)
            ra = mu2(mu1(t2, 4), t1, 3)
            rb = mu2(t2, mu1(t1, 4), 3)
            sa = -1 if t1.degree % 2 else 1
            rhs = premodule_sum(
                [(sa, ra), (-1, rb)], t1.source, t2.target, lhs.degree, 3
            )
            return premodule_residual(lhs, rhs, 3)
        runner.check(
            f"ainf.leibniz.{mode.value}",
            "ainf.differential-is-a-derivation",
            leibniz,
        )
        runner.check(
            f"ainf.identity-closed.{mode.value}",
            "ainf.signed-identity",
            lambda m0=m0: [
                op
                for tab in mu1(identity_premodule(m0), 3).components.values()
                for op in tab.values()
                if not op.is_zero()
            ],
        )


def suite_b_faces(runner, args):
    n_max = min(args.n_max, 4)
    for n in range(2, n_max + 1):
        y = simplex_cube(n)
        for i in range(1, n):
            runner.check(
                f"bfaces.single-step.N{n}.i{i}",
                "bconstruction.step-faces",
                lambda y=y, i=i: [
                    k for k, v in check_lemma_b1(y, i).items() if v is False
                ],
            )
    for n in range(1, n_max + 1):
        y = simplex_cube(n)
        for k in p0_subsets(n):
            runner.check(
                f"bfaces.bent-faces.N{n}.K{''.join(map(str, k))}",
                "bconstruction.face-identities",
                lambda y=y, k=k: [
                    kk for kk, v in check_b_faces(y, k).items() if v is False
                ],
            )
    for n in range(2, n_max + 1):
        y = simplex_cube(n)
        bp = b_prime(y)
        for k in range(1, n):
            def commutes(y=y, bp=bp, k=k, n=n):
                lhs = extract_face(bp, k, "front")
                sub = front_face(y, k)
                rhs = relabel_axes(
                    b_prime(sub),
                    _axis_map(
                        tuple(j for j in range(n + 1) if j != k), n
                    ),
                )
                return [] if canonical(lhs) == canonical(rhs) else ["differ"]
            runner.check(
                f"bfaces.commutation.N{n}.k{k}",
                "bconstruction.surgery-commutes-with-faces",
                commutes,
            )


def _yoneda_cube_candidate(rng, mode, n):
    cat, contractions = hom_dg_category(rng, mode, n_objects=2)
    s = random_valid_simplex(rng, cat, contractions, n)
    data = {}
    for j in nonempty_subsets(n):
        data[j] = s.objects[j[0]] if len(j) == 1 else ("edge", j)
    cube = CollaredCube(n, data)
    provider = xi_mod.YonedaXiData(cat, s)
    return cat, cube, provider


def suite_goal(runner, args):
    rng = make_rng(args.seed)
    n_top = 3 if args.extended else 2
    for mode in (Mode.Z, Mode.Z2):
        for n in range(1, n_top + 1):
            cat, cube, provider = _yoneda_cube_candidate(rng, mode, n)
            cand = xi_mod.build_xi_simplex(cube, cat, provider)
            d_max = 2 if n >= 3 else min(args.d_max, 3)
            runner.check(
                f"goal.random-base.{mode.value}.N{n}",
                "xi.simplex-equation",
                lambda cand=cand, d_max=d_max: check_goal_equation(
                    cand, d_max
                ),
            )
        cat, _ = hom_dg_category(rng, mode, n_objects=2)
        for n in (1, 2):
            cube = identity_cube(cat.objects[0], n)
            provider = xi_mod.IdentityXiData(cat, cat.objects[0])
            cand = xi_mod.build_xi_simplex(cube, cat, provider)
            runner.check(
                f"goal.identity-cube.{mode.value}.N{n}",
                "xi.degenerate-simplices",
                lambda cand=cand: check_goal_equation(cand, 3),
            )
        cat2, cube2, provider2 = _yoneda_cube_candidate(rng, mode, 2)
        for chain in itertools.product(cat2.objects, repeat=2):
            runner.check(
                f"goal.replay.{mode.value}.{'-'.join(chain)}",
                "xi.grouped-expansion",
                lambda c=chain: []
                if xi_mod.replay_corollaries(cube2, cat2, provider2, c)[
                    "match"
                ]
                else ["group mismatch"],
            )
    config, stairs, brane = standard_edge_setup(d=3)
    base = planar_base_category(config, stairs)
    model = PlanarEdgeModel(config, stairs, brane, base)
    cand = edge_candidate(model)
    runner.check(
        "goal.planar-edge",
        "xi.planar-pipeline",
        lambda: check_goal_equation(cand, 3),
    )


def suite_planar(runner, args):
    for params_dict in staircase_grid(args.seed, 2, 2):
        params = StaircaseParams(
            d=params_dict["d"],
            w=params_dict["w"],
            widths=tuple(params_dict["widths"]),
            epsilons=tuple(params_dict["epsilons"]),
            depths=tuple(params_dict["depths"]),
            heights=tuple(params_dict["heights"]),
            depth_bound=Fraction(2),
        )
        stairs = build_staircase(params)
        tail = build_conetail(params.w, Fraction(1, 4))
        config = Configuration(stairs + [tail])
        def counts(config=config, stairs=stairs, tail=tail, params=params):
            bad = []
            for i in range(len(stairs)):
                xs = config.intersections(stairs[i], tail)
                if sorted(x.degree for x in xs) != [0, 1]:
                    bad.append(("tail-degrees", i))
                lo = min(xs, key=lambda x: x.q())
                hi = max(xs, key=lambda x: x.q())
                strip = assemble_polygon(
                    config, (stairs[i], tail), (hi.point, lo.point)
                )
                if strip is None:
                    bad.append(("missing-strip", i))
            return bad
        runner.check(
            "planar.tail-strips",
            "planar.identity-strips",
            counts,
        )
    runner.check(
        "planar.poset-2-2",
        "planar.broken-disk-space",
        lambda: []
        if len(broken_disk_poset(2, 2).elements) == 4
        else ["wrong size"],
    )


def suite_stabilize(runner, args):
    runner.check(
        "stabilize.square",
        "xi.stabilization-square",
        lambda: []
        if verify_stabilization(3).ok()
        else ["square does not commute"],
    )


SUITES = {
    "nerve": suite_nerve,
    "ainf": suite_ainf,
    "b-faces": suite_b_faces,
    "goal": suite_goal,
    "planar": suite_planar,
    "stabilize": suite_stabilize,
}


def cmd_verify(args) -> int:
    config_echo = {
        "suite": args.suite,
        "mode": args.mode,
        "n_max": args.n_max,
        "d_max": args.d_max,
        "seed": args.seed,
        "extended": args.extended,
    }
    runner = Runner(config_echo)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    if args.goal_fixture:
        try:
            data = load(args.goal_fixture)
            cand, cat = _candidate_from_file(data)
        except (FormatError, KeyError, OSError) as exc:
            print(f"input error: {exc}", file=sys.stderr)
            return 2
        runner.check(
            "goal.fixture",
            "xi.simplex-equation",
            lambda: [
                (k, len(res)) for k, res in check_goal_equation(cand, 3)
            ],
        )
        names = []
    for name in names:
        SUITES[name](runner, args)
    report = runner.report()
    if args.out:
        dump(report, args.out)
    print(report_fingerprint(report) if args.fingerprint else json.dumps(
        report["summary"]))
    for r in report["records"]:
        if r["status"] == "fail":
            print(f"FAIL {r['id']}: {r['residual']}", file=sys.stderr)
    return 0 if report["summary"]["failed"] == 0 else 1


def cmd_count(args) -> int:
    try:
        data = load(args.config)
        config = config_from_dict(data)
    except (FormatError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    rows = []
    curves = config.curves
    for d in (1, 2):
        for chain in itertools.permutations(curves, d + 1):
            slots = []
            ok = True
            for i in range(d + 1):
                xs = config.intersections(chain[i - 1], chain[i])
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
                out_deg = None
                for x in config.intersections(chain[0], chain[d]):
                    if x.point == pts[0]:
                        out_deg = x.degree
                in_degs = [c.degree for c in combo[1:]]
                rigid = out_deg == sum(in_degs) + 2 - d
                rows.append(
                    {
                        "arity": d,
                        "branes": [c.label() for c in chain],
                        "corners": [
                            [str(p[0]), str(p[1])] for p in pts
                        ],
                        "rigid": rigid,
                    }
                )
    table = {"schema": 1, "kind": "polygon-table", "polygons": rows}
    if args.out:
        dump(table, args.out)
    print(json.dumps({"polygons": len(rows),
                      "rigid": sum(r["rigid"] for r in rows)}))
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(render_configuration(config))
    return 0


def _candidate_from_file(data):
    base = category_from_dict(data["base"])
    cube = cube_from_dict(data["cube"])
    for i in range(cube.n + 1):
        if cube.vertex_label(i) not in base.objects:
            raise FormatError(
                f"cube vertex {i} labels {cube.vertex_label(i)!r},"
                " which is not a base object"
            )
    face_maps = {}
    from .gradedmod import Vector

    for item in data["face_maps"]:
        k = tuple(item["subset"])
        src = cube.vertex_label(k[0])
        tgt = cube.vertex_label(k[-1])
        hom = base.hom_module(src, tgt)
        coeffs = {}
        for gen, c in item["element"].items():
            bid = tuple(json.loads(gen)) if gen.startswith("[") else gen
            if bid not in hom.degree_of:
                raise FormatError(f"unknown morphism id {gen!r}")
            coeffs[bid] = c
        vec = Vector(hom, coeffs)
        t = yoneda_premodule(base, vec, src, tgt, 4)
        t.degree = 2 - len(k)
        face_maps[k] = t
    provider = xi_mod.MapXiData(face_maps)
    cand = xi_mod.build_xi_simplex(cube, base, provider)
    return cand, base


def cmd_build_xi(args) -> int:
    try:
        data = load(args.input)
        cand, base = _candidate_from_file(data)
    except (FormatError, KeyError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    failures = check_goal_equation(cand, args.d_max)
    result = {
        "schema": 1,
        "kind": "xi-simplex",
        "n": cand.n,
        "valid": not failures,
        "failures": [
            {"subset": list(k), "residual_count": len(res)}
            for k, res in failures
        ],
        "components": _candidate_summary(cand),
    }
    if args.out:
        dump(result, args.out)
    print(json.dumps({"valid": result["valid"]}))
    return 0 if result["valid"] else 1


def _candidate_summary(cand) -> list:
    out = []
    for k in sorted(cand.maps):
        t = cand.maps[k]
        comps = {
            str(d): sum(len(op.table) for op in tab.values())
            for d, tab in t.components.items()
        }
        out.append({"subset": list(k), "degree": t.degree,
                    "entries": comps})
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dgcube",
        description="exact verification of nerve, cube and disk combinatorics",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    env = os.environ
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--mode", choices=["z", "z2"],
        default=env.get("DGCUBE_MODE", "z"),
    )
    common.add_argument(
        "--n-max", type=int, default=int(env.get("DGCUBE_N_MAX", "4"))
    )
    common.add_argument(
        "--d-max", type=int, default=int(env.get("DGCUBE_D_MAX", "4"))
    )
    common.add_argument(
        "--seed", type=int, default=int(env.get("DGCUBE_SEED", "2024"))
    )
    common.add_argument("--out", default=env.get("DGCUBE_OUT"))
    common.add_argument("--svg", default=env.get("DGCUBE_SVG"))

    p_verify = sub.add_parser("verify", parents=[common])
    p_verify.add_argument(
        "suite",
        choices=["nerve", "ainf", "b-faces", "goal", "planar",
                 "stabilize", "all"],
    )
    p_verify.add_argument("--extended", action="store_true")
    p_verify.add_argument("--fingerprint", action="store_true")
    p_verify.add_argument("--goal-fixture")
    p_verify.set_defaults(fn=cmd_verify)

    p_count = sub.add_parser("count", parents=[common])
    p_count.add_argument("config")
    p_count.set_defaults(fn=cmd_count)

    p_build = sub.add_parser("build-xi", parents=[common])
    p_build.add_argument("input")
    p_build.set_defaults(fn=cmd_build_xi)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.n_max <= 0 or args.d_max <= 0:
        print("bounds must be positive", file=sys.stderr)
        return 2
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
