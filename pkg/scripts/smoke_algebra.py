"""Development smoke test for the sign conventions; not part of the suite."""
import sys

sys.path.insert(0, "src")

from dgcube.ainf import (
    check_ainf_relations,
    check_module_relations,
    check_goal_equation,
    identity_premodule,
    mu1,
    mu2,
    premodule_residual,
    premodule_sum,
    yoneda_module,
    yoneda_premodule,
    NerveSimplexCandidate,
)
from dgcube.gradedmod import Mode
from dgcube.randgen import (
    hom_dg_category,
    make_rng,
    random_closed_morphism,
    random_premodule_map,
    random_valid_simplex,
)
from dgcube.nerve import validate, face, degeneracy, pullback

rng = make_rng(11)
for mode in (Mode.Z, Mode.Z2):
    cat, H = hom_dg_category(rng, mode, n_objects=2, contractible=True)
    fails = check_ainf_relations(cat, 4)
    print(mode, "ainf relations failures:", len(fails))
    ymod = yoneda_module(cat, cat.objects[0])
    print(mode, "yoneda module relations failures:",
          len(check_module_relations(ymod, 4)))
    t_id = identity_premodule(ymod)
    dt = mu1(t_id, 3)
    print(mode, "mu1(identity) zero:",
          all(not tab for tab in dt.components.values()) or not dt.components)
    # mu1 squared on random premodule maps
    m1 = yoneda_module(cat, cat.objects[1])
    t = random_premodule_map(rng, ymod, m1, 1, 3)
    ddt = mu1(mu1(t, 4), 3)
    flat = [op for tab in ddt.components.values() for op in tab.values()]
    print(mode, "mu1 squared zero:", all(op.is_zero() for op in flat))
    # valid nerve simplices
    for n in range(1, 4):
        s = random_valid_simplex(rng, cat, H, n)
        print(mode, f"valid {n}-simplex:", not validate(s))
