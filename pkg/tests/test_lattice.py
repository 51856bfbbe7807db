import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monofan.lattice import (
    AbelianGroup,
    GroupHom,
    IntMatrix,
    Subgroup,
    cokernel,
    diagonal,
    direct_sum,
    hom_profile,
    kernel,
    primitive,
    quotient_with_projection,
    rank,
    smith_normal_form,
    solve,
)


def snf_checks(m):
    u, s, v = smith_normal_form(m)
    assert u * m * v == s
    dia = diagonal(s)
    for i in range(s.rows):
        for j in range(s.cols):
            if i != j:
                assert s[i, j] == 0
    nonzero = [d for d in dia if d != 0]
    assert all(d > 0 for d in nonzero)
    for a, b in zip(nonzero, nonzero[1:]):
        assert b % a == 0
    # zeros come last
    seen_zero = False
    for d in dia:
        if d == 0:
            seen_zero = True
        else:
            assert not seen_zero
    # u, v unimodular
    for w in (u, v):
        _, sw, _ = smith_normal_form(w)
        assert all(d == 1 for d in diagonal(sw))
    return s


def test_snf_diag_2_3():
    s = snf_checks(IntMatrix.from_rows([[2, 0], [0, 3]]))
    assert diagonal(s) == [1, 6]


def test_snf_identity():
    s = snf_checks(IntMatrix.identity(2))
    assert diagonal(s) == [1, 1]


def test_snf_rank_one():
    s = snf_checks(IntMatrix.from_rows([[2, 4], [4, 8]]))
    assert diagonal(s) == [2, 0]


@settings(max_examples=120, deadline=None)
@given(st.lists(st.lists(st.integers(-5, 5), min_size=1, max_size=4), min_size=1, max_size=4)
       .filter(lambda rows: len({len(r) for r in rows}) == 1))
def test_snf_random(rows):
    snf_checks(IntMatrix.from_rows(rows))


def test_solve_examples():
    assert solve(IntMatrix.from_rows([[2]]), [4]) == (2,)
    assert solve(IntMatrix.from_rows([[2]]), [3]) is None
    m = IntMatrix.from_rows([[1, 1], [0, 2]])
    assert m.apply(solve(m, [3, 2])) == (3, 2)
    assert solve(m, [3, 2]) == (2, 1)


def test_solve_vs_bruteforce():
    rng = random.Random(7)
    for _ in range(120):
        r = rng.randint(1, 3)
        c = rng.randint(1, 3)
        m = IntMatrix.from_rows([[rng.randint(-3, 3) for _ in range(c)] for _ in range(r)])
        b = tuple(rng.randint(-4, 4) for _ in range(r))
        x = solve(m, b)
        if x is not None:
            assert m.apply(x) == b
        else:
            box = range(-8, 9)
            found = False
            if c == 1:
                cands = [(i,) for i in box]
            elif c == 2:
                cands = [(i, j) for i in box for j in box]
            else:
                cands = [(i, j, k) for i in box for j in box for k in box]
            for cand in cands:
                if m.apply(cand) == b:
                    found = True
                    break
            assert not found


def test_kernel():
    m = IntMatrix.from_rows([[2, 4], [4, 8]])
    for k in kernel(m):
        assert m.apply(k) == (0, 0)
    assert len(kernel(m)) == 1
    assert kernel(IntMatrix.identity(3)) == []


def test_group_reduce_and_ops():
    g = AbelianGroup(1, (4,))
    assert g.reduce((2, 7)) == (2, 3)
    assert g.add((1, 3), (0, 2)) == (1, 1)
    assert g.neg((0, 1)) == (0, 3)
    assert g.describe() == "Z^1+Z/4"
    with pytest.raises(ValueError):
        AbelianGroup(0, (4, 2))


def test_cokernel_times_two():
    z = AbelianGroup(1)
    f = GroupHom.from_gen_images(z, z, [(2,)])
    grp, proj = cokernel(f)
    assert grp == AbelianGroup(0, (2,))
    assert proj((1,)) != proj((2,))
    assert proj((2,)) == grp.zero()


def test_cokernel_zero_map_and_surjection():
    z2 = AbelianGroup(2)
    zero = AbelianGroup(0)
    f = GroupHom(zero, z2, IntMatrix(2, 0, []))
    grp, _ = cokernel(f)
    assert grp == AbelianGroup(2)
    g = GroupHom.from_gen_images(z2, AbelianGroup(1), [(1,), (1,)])
    grp2, _ = cokernel(g)
    assert grp2.is_trivial()


def test_hom_profile_examples():
    z = AbelianGroup(1)
    times2 = GroupHom.from_gen_images(z, z, [(2,)])
    p = hom_profile(times2)
    assert (p.injective, p.surjective, p.ker_torsion, p.coker_torsion) == (True, False, True, True)

    diag = GroupHom.from_gen_images(z, AbelianGroup(2), [(1, 1)])
    p = hom_profile(diag)
    assert (p.injective, p.surjective, p.ker_torsion, p.coker_torsion) == (True, False, True, False)

    z4 = AbelianGroup(0, (4,))
    z2 = AbelianGroup(0, (2,))
    red = GroupHom.from_gen_images(z4, z2, [(1,)])
    p = hom_profile(red)
    assert (p.injective, p.surjective, p.ker_torsion, p.coker_torsion) == (False, True, True, True)


def test_hom_not_well_defined():
    z4 = AbelianGroup(0, (4,))
    z = AbelianGroup(1)
    with pytest.raises(ValueError):
        GroupHom.from_gen_images(z4, z, [(1,)])


def test_quotient_canonical_coordinates():
    # Z^2 / <(2,-2)> = Z + Z/2 with x -> (1,1), y -> (1,0)
    q, proj = quotient_with_projection(AbelianGroup(2), [(2, -2)])
    assert q == AbelianGroup(1, (2,))
    imgs = {proj((1, 0)), proj((0, 1))}
    assert imgs == {(1, 1), (1, 0)}
    assert proj((2, -2)) == q.zero()
    # Z + Z/4 modulo (0,2) = Z + Z/2
    g = AbelianGroup(1, (4,))
    q2, proj2 = quotient_with_projection(g, [(0, 2)])
    assert q2 == AbelianGroup(1, (2,))
    assert proj2((1, 1)) == (1, 1)
    assert proj2((1, 0)) == (1, 0)


def test_subgroup_line():
    amb = AbelianGroup(2)
    sub = Subgroup(amb, [(1, -1)])
    assert sub.group == AbelianGroup(1)
    assert sub.contains((2, -2))
    assert not sub.contains((1, 0))
    assert sub.coords((3, -3)) in {(3,), (-3,)}
    incl = sub.inclusion
    assert incl(sub.coords((1, -1))) == (1, -1)


def test_subgroup_with_torsion():
    amb = AbelianGroup(1, (4,))
    sub = Subgroup(amb, [(0, 2)])
    assert sub.group == AbelianGroup(0, (2,))
    assert sub.contains((0, 2))
    assert not sub.contains((0, 1))
    assert sub.inclusion((1,)) == (0, 2)


def test_subgroup_full_and_trivial():
    amb = AbelianGroup(2)
    assert Subgroup(amb, [(1, 0), (1, 2)]).is_full() is False
    assert Subgroup(amb, [(1, 0), (0, 1)]).is_full()
    assert Subgroup(amb, []).is_trivial()


def test_direct_sum_plain():
    a, b = AbelianGroup(1), AbelianGroup(2)
    w, ia, ib, pa, pb = direct_sum(a, b)
    assert w == AbelianGroup(3)
    assert ia((5,)) == (5, 0, 0)
    assert ib((1, 2)) == (0, 1, 2)
    assert pa(ia((5,))) == (5,)
    assert pb(ib((1, 2))) == (1, 2)


def test_direct_sum_mixed_torsion():
    a = AbelianGroup(0, (4,))
    b = AbelianGroup(0, (2,))
    w, ia, ib, pa, pb = direct_sum(a, b)
    assert w == AbelianGroup(0, (2, 4))
    assert pa(ia((1,))) == (1,)
    assert pb(ib((1,))) == (1,)
    assert w.is_zero(w.add(ia((2,)), ia((2,))))


def test_primitive():
    assert primitive((2, 4, -6)) == (1, 2, -3)
    assert primitive((0, 0)) == (0, 0)
