import pytest

from monofan.lattice import AbelianGroup
from monofan.monoid import (
    EmbeddedMonoid,
    MonoidError,
    MonoidIdeal,
    are_isomorphic,
    maximal_ideal,
)
from monofan.fanspace import fan_isomorphic, proj_space, spec
from monofan.projblow import (
    GradedMonoid,
    IdealSequence,
    IdealSheaf,
    blowup,
    blowup_fan,
    blowup_sequence,
    maximal_ideal_sheaf,
    proj,
    rees,
    unit_ideal_sheaf,
)

Z1 = AbelianGroup(1)
Z2 = AbelianGroup(2)


def N(k=1):
    return EmbeddedMonoid(AbelianGroup(k),
                          [[1 if i == j else 0 for j in range(k)] for i in range(k)])


def A1():
    return EmbeddedMonoid(Z2, [[2, 0], [1, 1], [0, 2]])


def test_rees_n2_maximal():
    m = N(2)
    r = rees(m, maximal_ideal(m))
    assert set(r.underlying.gens) == {(1, 0, 0), (0, 1, 0), (1, 0, 1), (0, 1, 1)}
    assert r.degrees == (0, 0, 1, 1)


def test_rees_unit_ideal_is_p_plus_n():
    m = N(2)
    unit = MonoidIdeal(m, [m.ambient.zero()])
    r = rees(m, unit)
    assert set(r.underlying.gens) == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}
    assert are_isomorphic(r.underlying, N(3))


def test_rees_n_principal():
    m = N()
    r = rees(m, MonoidIdeal(m, [[1]]))
    assert set(r.underlying.gens) == {(1, 0), (1, 1)}


def test_graded_rejects_high_degree():
    m = N()
    with pytest.raises(MonoidError):
        GradedMonoid(m, [2])


def test_proj_of_p_plus_n_is_spec_p():
    m = N(2)
    unit = MonoidIdeal(m, [m.ambient.zero()])
    r = rees(m, unit)
    x = proj(r)
    assert fan_isomorphic(x, spec(m))


def test_proj_pn():
    amb = AbelianGroup(3)
    m = EmbeddedMonoid(amb, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    x = proj(GradedMonoid(m, [1, 1, 1]))
    assert x.npoints == 7
    assert fan_isomorphic(x, proj_space(2))


def test_proj_rees_n2_charts():
    m = N(2)
    x = proj(rees(m, maximal_ideal(m)))
    closed = x.closed_points()
    assert len(closed) == 2
    chart_gens = {x.stalks[c].gens for c in closed}
    # charts <e1, e2-e1> and <e2, e1-e2> (with the degree-tracking coordinate)
    flat = {tuple(sorted(g[:2] for g in gens)) for gens in chart_gens}
    assert flat == {tuple(sorted([(1, 0), (-1, 1)])), tuple(sorted([(0, 1), (1, -1)]))}


def test_blowup_n2_charts():
    m = N(2)
    f = blowup(m, maximal_ideal(m))
    bl = f.source
    closed = bl.closed_points()
    assert len(closed) == 2
    gens = sorted(tuple(sorted(bl.stalks[c].gens)) for c in closed)
    expected = sorted([tuple(sorted([(0, 1), (1, -1)])), tuple(sorted([(1, 0), (-1, 1)]))])
    assert gens == expected
    for c in closed:
        assert bl.stalks[c].is_free()
    assert f.is_group_iso_of_fans()
    for h in f.stalk_maps:
        assert h.span_map.is_injective()


def test_blowup_unit_ideal_iso():
    m = N(2)
    unit = MonoidIdeal(m, [m.ambient.zero()])
    f = blowup(m, unit)
    assert fan_isomorphic(f.source, spec(m))
    from monofan.fanspace import is_strict

    assert is_strict(f)


def test_blowup_a1():
    m = A1()
    f = blowup(m, maximal_ideal(m))
    bl = f.source
    closed = bl.closed_points()
    assert len(closed) == 2
    for c in closed:
        assert bl.stalks[c].is_free()
        assert bl.stalks[c].span.group.rank == 2
    # the middle exceptional ray has sharpening N
    rays = [i for i in range(bl.npoints)
            if i not in closed and len(bl.down_set(i)) > 1 and len(bl.up_set(i)) > 1]
    mids = [i for i in rays if len(bl.down_set(i)) == 3]
    assert len(mids) == 1
    sharp = bl.sharpened_stalk(mids[0])
    assert are_isomorphic(sharp, N())


def test_blowup_principal_ideal_iso():
    m = N(2)
    i = MonoidIdeal(m, [[1, 1]])
    f = blowup(m, i)
    assert fan_isomorphic(f.source, spec(m))


def test_blowup_fan_affine_matches_blowup():
    m = N(2)
    x = spec(m)
    sheaf = maximal_ideal_sheaf(x)
    f = blowup_fan(sheaf)
    g = blowup(m, maximal_ideal(m))
    assert fan_isomorphic(f.source, g.source)


def test_blowup_fan_unit_everywhere_is_iso():
    from monofan.fanspace import Gluing, glue
    from monofan.lattice import GroupHom

    n = N()
    p1 = glue([n, n], [Gluing(0, 1, (0,), (0,),
                              GroupHom.from_gen_images(Z1, Z1, [(-1,)]))]).space
    f = blowup_fan(maximal_ideal_sheaf(p1))
    # m_N = <1> is principal, so the blowup is an isomorphism
    assert f.source.npoints == p1.npoints
    assert fan_isomorphic(f.source, p1)


def test_blowup_fan_two_charts():
    # P^1 x A^1-like fan: two copies of Spec N^2 glued along a ray-localization
    from monofan.fanspace import Gluing, glue
    from monofan.lattice import GroupHom, IntMatrix

    m = N(2)
    inv = GroupHom(Z2, Z2, IntMatrix.from_rows([[-1, 0], [0, 1]]))
    res = glue([m, m], [Gluing(0, 1, (0,), (0,), inv)]).space
    assert res.npoints == 6
    f = blowup_fan(maximal_ideal_sheaf(res))
    # each chart blows up to two charts; 10 points total
    assert len(f.source.closed_points()) == 4
    assert f.is_group_iso_of_fans()


def test_blowup_sequence_empty_and_unit():
    m = N(2)
    x = spec(m)
    f = blowup_sequence(x, IdealSequence(()))
    assert f.source is x
    zero = m.ambient.zero()
    seq = IdealSequence.from_gens([
        [(x.closed_points()[0], [[1, 0], [0, 1]])],
    ])
    f1 = blowup_sequence(x, seq)
    g = blowup(m, maximal_ideal(m))
    assert fan_isomorphic(f1.source, g.source)
    # inserting the unit ideal changes nothing (up to isomorphism)
    stage1 = f1.source
    unit_step = [(c, [stage1.stalks[c].ambient.zero()]) for c in stage1.closed_points()]
    seq2 = IdealSequence.from_gens([
        [(x.closed_points()[0], [[1, 0], [0, 1]])],
        unit_step,
    ])
    f2 = blowup_sequence(x, seq2)
    assert fan_isomorphic(f2.source, f1.source)


def test_blowup_sequence_two_maximal():
    m = N(2)
    x = spec(m)
    seq1 = IdealSequence.from_gens([[(x.closed_points()[0], [[1, 0], [0, 1]])]])
    f1 = blowup_sequence(x, seq1)
    stage1 = f1.source
    step2 = [(c, [g for g in stage1.stalks[c].minimized_gens().gens])
             for c in stage1.closed_points()]
    f2 = blowup_sequence(x, IdealSequence.from_gens([
        [(x.closed_points()[0], [[1, 0], [0, 1]])],
        step2,
    ]))
    # star subdivision at (1,1), then at (2,1) and (1,2): four maximal cones
    assert len(f2.source.closed_points()) == 4
    for c in f2.source.closed_points():
        assert f2.source.stalks[c].span.group.rank == 2
        assert f2.source.stalks[c].is_free()


def test_rees_ideal_power_consistency():
    # Z[I^n] = Z[I]^n at the level of ideals: power vs n-fold sums
    m = A1()
    i = maximal_ideal(m)
    for n in (1, 2, 3):
        pw = i.power(n)
        # oracle: ideal generated by all n-fold sums without pruning
        raw = []
        from itertools import combinations_with_replacement

        for combo in combinations_with_replacement(i.gens, n):
            s = m.ambient.zero()
            for c in combo:
                s = m.ambient.add(s, c)
            raw.append(s)
        raw_ideal = MonoidIdeal(m, raw, minimize=False)
        assert pw.same_ideal(raw_ideal)
