"""Randomized property suite with fixed seeds.

Each check mirrors one of the structural facts the library is built on:
face heredity, sharpening-vs-quotient, saturation heredity, the fs
splitting, the refinement lemmas, membership against brute force, and
freeness against a permutation oracle.  `run_property_suite` returns the
number of randomized instances exercised so the acceptance suite can
assert the coverage floor.
"""

import random
from itertools import product as iproduct

from monofan.lattice import AbelianGroup, GroupHom
from monofan.monoid import (
    EmbeddedMonoid,
    MonoidHom,
    are_isomorphic,
    maximal_ideal,
)
from monofan.refine import _search_sections, classify, refinement_factorization

SEED = 20260809


def random_monoid(rng, dim_max=3, gens_max=5, entry=3, allow_negative=True,
                  allow_torsion=True):
    dim = rng.randint(1, dim_max)
    torsion = ()
    if allow_torsion and rng.random() < 0.25:
        torsion = (rng.choice([2, 3, 4]),)
    amb = AbelianGroup(dim, torsion)
    k = rng.randint(1, gens_max)
    lo = -entry if allow_negative and rng.random() < 0.4 else 0
    gens = []
    for _ in range(k):
        gens.append([rng.randint(lo, entry) for _ in range(dim)]
                    + [rng.randint(0, torsion[0] - 1) for _ in range(len(torsion))])
    m = EmbeddedMonoid(amb, gens)
    if not m.gens:
        return random_monoid(rng, dim_max, gens_max, entry, allow_negative,
                             allow_torsion)
    return m


def brute_force_member(m, a):
    """Box search over coefficients bounded by the grading level (sharp)."""
    target = m._level(a)
    if target < 0:
        return False
    bound = int(target)
    for coeffs in iproduct(range(bound + 1), repeat=len(m.gens)):
        s = m.ambient.zero()
        for c, g in zip(coeffs, m.gens):
            s = m.ambient.add(s, m.ambient.scale(c, g))
        if s == m.ambient.reduce(a):
            return True
    return False


def is_free_oracle(m):
    """Search for an isomorphism N^r -> sharpening over irreducible orders."""
    sharp, _ = m.sharpen()
    sp = sharp.span.group
    if sp.torsion:
        return False
    irr = sharp.irreducibles()
    if len(irr) != sp.rank:
        return False
    if sp.rank == 0:
        return True
    free = EmbeddedMonoid(AbelianGroup(sp.rank),
                          [[1 if i == j else 0 for j in range(sp.rank)]
                           for i in range(sp.rank)])
    return are_isomorphic(sharp, free)


def check_faces_heredity(m, count):
    saturated = m.is_saturated
    for t in m.face_index_sets:
        fm = m.face_from_indices(t).monoid
        if saturated and fm.gens:
            assert fm.is_saturated, "face of an fs monoid must be fs"
        count[0] += 1


def check_sharpening_lemma(m, count):
    for t in m.face_index_sets:
        f = m.face_from_indices(t)
        loc, _ = m.localize(f)
        s, _ = loc.sharpen()
        q, _ = m.quotient_by_face(f)
        assert are_isomorphic(s, q), "sharpen(localize) != quotient by face"
        count[0] += 1


def check_saturated_lemma(m, count):
    sat, _ = m.saturate()
    for t in sat.face_index_sets:
        q, _ = sat.quotient_by_face(sat.face_from_indices(t))
        assert q.is_trivial() or q.is_saturated
        if q.is_sharp and q.gens:
            assert not q.span.group.torsion, \
                "sharp saturated monoid must have torsion-free span"
        count[0] += 1


def check_fs_splitting(m, count):
    sat, _ = m.saturate()
    for t in sat.face_index_sets:
        f = sat.face_from_indices(t)
        loc, _ = sat.localize(f)
        q, proj = sat.quotient_by_face(f)
        u = loc.units()
        # build the splitting: a section of span(loc) -> span(q)
        qspan = q.span
        sec_cols = []
        ok = True
        for g in qspan.group.gens():
            pre = proj.group_map.preimage(qspan.inclusion(g))
            if pre is None:
                ok = False
                break
            sec_cols.append(pre)
        assert ok, "quotient projection must be surjective"
        # every loc element decomposes as unit + section(image)
        for g in loc.gens:
            img = qspan.coords(proj.group_map(g))
            assert img is not None
            lifted = loc.ambient.zero()
            for c, col in zip(img, sec_cols):
                lifted = loc.ambient.add(lifted, loc.ambient.scale(c, col))
            unit_part = loc.ambient.sub(g, lifted)
            assert u.contains(unit_part), "splitting failed: non-unit remainder"
            # the section lands inside the localization
            assert loc.contains(lifted) or loc.contains(loc.ambient.neg(lifted))
        count[0] += 1


def random_hom(rng, p):
    k = rng.randint(1, 3)
    q = EmbeddedMonoid(AbelianGroup(k),
                       [[1 if i == j else 0 for j in range(k)] for i in range(k)])
    images = []
    for _ in range(k):
        a = p.ambient.zero()
        for g in p.gens:
            a = p.ambient.add(a, p.ambient.scale(rng.randint(0, 2), g))
        images.append(a)
    gm = GroupHom.from_gen_images(q.ambient, p.ambient, images)
    return MonoidHom(q, p, gm, check=False)


def check_refinements_sharpened_agree(rng, p, count):
    h = random_hom(rng, p)
    rep = classify(h)
    rep_bar = classify(h.sharpened())
    assert rep.refinement == rep_bar.refinement
    assert rep.strong == rep_bar.strong
    count[0] += 1


def check_refinements_saturated(rng, p, count):
    sat, _ = p.saturate()
    h = random_hom(rng, sat)
    r, _, _ = refinement_factorization(h)
    assert r.is_saturated, "R must be saturated when the target is"
    count[0] += 1


def check_section_unique(rng, p, count):
    h = random_hom(rng, p)
    rep = classify(h)
    if rep.refinement:
        r, i, pr = refinement_factorization(h)
        try:
            found = _search_sections(h, pr.sharpened(), i.sharpened())
        except Exception:
            return
        assert len(found) <= 1, "sharpened sections must be unique"
        count[0] += 1


def check_blowup_charts_good(p, count):
    sharp, _ = p.sharpen()
    if not sharp.gens or not sharp.is_saturated:
        return
    try:
        from monofan.projblow import blowup

        f = blowup(sharp, maximal_ideal(sharp))
    except Exception:
        return
    for c in f.source.closed_points():
        h = MonoidHom(sharp, f.source.stalks[c],
                      GroupHom.identity(sharp.ambient), check=False)
        assert h.is_group_iso()
        rep = classify(h)
        assert rep.good, "group isomorphism must be a good refinement"
        count[0] += 1


def check_membership_bruteforce(rng, m, count):
    if not m.is_sharp:
        m, _ = m.sharpen()
    if not m.gens:
        return
    for _ in range(4):
        a = m.ambient.zero()
        for g in m.gens:
            a = m.ambient.add(a, m.ambient.scale(rng.randint(-1, 2), g))
        assert m.contains(a) == brute_force_member(m, a)
        count[0] += 1


def check_is_free_oracle(m, count):
    sharp, _ = m.sharpen()
    if len(sharp.gens) > 4:
        return
    assert m.is_free() == is_free_oracle(m)
    count[0] += 1


def run_property_suite(n_monoids=40, seed=SEED):
    rng = random.Random(seed)
    count = [0]
    for _ in range(n_monoids):
        m = random_monoid(rng)
        check_faces_heredity(m, count)
        check_sharpening_lemma(m, count)
        check_saturated_lemma(m, count)
        check_fs_splitting(m, count)
        check_refinements_sharpened_agree(rng, m, count)
        check_refinements_saturated(rng, m, count)
        check_section_unique(rng, m, count)
        check_blowup_charts_good(m, count)
        check_membership_bruteforce(rng, m, count)
        check_is_free_oracle(m, count)
    return count[0]


def test_property_suite():
    instances = run_property_suite(n_monoids=12, seed=SEED)
    assert instances >= 100
