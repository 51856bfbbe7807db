import pytest

from monofan.lattice import AbelianGroup, GroupHom
from monofan.monoid import EmbeddedMonoid, MonoidHom, are_isomorphic
from monofan.fanspace import FanSpace, Gluing, fan_isomorphic, glue, spec
from monofan.boundary import (
    BoundaryData,
    boundary_components,
    boundary_depth,
    boundary_fan,
    boundary_monoid,
    is_tame,
    is_tame_data,
)


def N(k=1):
    return EmbeddedMonoid(AbelianGroup(k),
                          [[1 if i == j else 0 for j in range(k)] for i in range(k)])


def A1():
    return EmbeddedMonoid(AbelianGroup(2), [[2, 0], [1, 1], [0, 2]])


def test_boundary_monoid_nn():
    for n in (1, 2, 3):
        faces = boundary_monoid(N(n))
        assert len(faces) == n
        for f in faces:
            assert len(f.indices) == n - 1


def test_boundary_monoid_group_empty():
    z = EmbeddedMonoid(AbelianGroup(1), [[1], [-1]])
    assert boundary_monoid(z) == []


def test_boundary_monoid_a1():
    faces = boundary_monoid(A1())
    assert sorted(f.indices for f in faces) == [(0,), (2,)]


def test_boundary_fan_n2():
    b = boundary_fan(spec(N(2)))
    comps = boundary_components(b)
    assert len(comps) == 2
    for comp in comps:
        sub_pts = comp
        assert len(sub_pts) == 2  # each component is a copy of Spec N
    assert is_tame_data(b)


def test_boundary_fan_nn_copies():
    for n in (1, 2, 3, 4):
        b = boundary_fan(spec(N(n)))
        comps = boundary_components(b)
        assert len(comps) == n
        target = spec(N(n - 1)) if n > 1 else spec(EmbeddedMonoid(AbelianGroup(0), []))
        for comp in comps:
            keep = sorted(comp)
            sub = FanSpace(
                [b.boundary.stalks[i] for i in keep],
                {(keep.index(i), keep.index(j)) for i in keep for j in keep
                 if b.boundary.le(i, j)},
                {(keep.index(i), keep.index(j)): b.boundary.gen_maps[(i, j)]
                 for i in keep for j in keep if b.boundary.le(i, j) and i != j},
                check=False)
            assert sub.npoints == target.npoints
            closed = sub.closed_points()
            assert len(closed) == 1
            assert are_isomorphic(sub.stalks[closed[0]].sharpen()[0],
                                  target.stalks[target.closed_points()[0]].sharpen()[0])


def test_boundary_fan_of_group_empty():
    z = EmbeddedMonoid(AbelianGroup(1), [[1], [-1]])
    b = boundary_fan(spec(z))
    assert b.boundary.npoints == 0


def test_boundary_fan_p1():
    n = N()
    p1 = glue([n, n], [Gluing(0, 1, (0,), (0,),
                              GroupHom.from_gen_images(AbelianGroup(1), AbelianGroup(1),
                                                       [(-1,)]))]).space
    b = boundary_fan(p1)
    assert b.boundary.npoints == 2
    for i in range(2):
        assert b.boundary.sharpened_stalk(i).is_trivial()
    assert is_tame_data(b)


def test_boundary_depth():
    assert boundary_depth(spec(N())) == 2
    z = EmbeddedMonoid(AbelianGroup(1), [[1], [-1]])
    assert boundary_depth(spec(z)) == 1
    assert boundary_depth(spec(N(3))) == 4


def test_boundary_depth_bound():
    for m in (N(1), N(2), N(3), A1()):
        x = spec(m)
        bound = 1 + max(len(x.sharpened_stalk(i).irreducibles())
                        for i in range(x.npoints))
        assert boundary_depth(x) <= bound


def test_b4_boundary_stalk_is_proper_face():
    x = spec(A1())
    b = boundary_fan(x)
    for k in range(b.boundary.npoints):
        i = b.point_map[k]
        f = b.face_labels[k]
        assert f in set(x.stalks[i].face_index_sets)
        assert len(f) < len(x.stalks[i].gens)


def test_b6_boundary_commutes_with_chart_restriction():
    x = spec(A1())
    b = boundary_fan(x)
    # restricting the boundary over an open up-set equals the boundary of
    # the restriction (checked on point counts and labels per open)
    for c in range(x.npoints):
        up = set(x.up_set(c))
        over = [k for k in range(b.boundary.npoints) if b.point_map[k] in up]
        keep = sorted(up)
        sub = FanSpace([x.stalks[i] for i in keep],
                       {(keep.index(i), keep.index(j)) for i in keep for j in keep
                        if x.le(i, j)},
                       {(keep.index(i), keep.index(j)): x.gen_maps[(i, j)]
                        for i in keep for j in keep if x.le(i, j) and i != j},
                       [x.labels[i] for i in keep], check=False)
        bsub = boundary_fan(sub)
        assert bsub.boundary.npoints == len(over)


def test_tame_affine_and_disjoint():
    assert is_tame(spec(N(2)))
    from monofan.fanspace import disjoint_union

    assert is_tame(disjoint_union([spec(N(2)), spec(N(2))]))


def test_teardrop_analog_not_tame():
    """The fan-level shadow of the teardrop mapping-torus boundary: one
    boundary component whose map is 2-to-1 over the cone point.  The paper's
    teardrop is not a fan, so the data is built directly."""
    source = spec(N(2))
    closed = source.closed_points()[0]
    ray = [i for i in source.up_set(closed)
           if len(source.pullback_face(closed, i).indices) == 1][0]
    n = N()
    interval = glue([n, n], [Gluing(0, 1, (0,), (0,), None)]).space  # doubled line
    closed_pts = interval.closed_points()
    generic = interval.generic_points()[0]
    pm = [0] * interval.npoints
    for k in closed_pts:
        pm[k] = closed  # both endpoints of the interval hit the cone point
    pm[generic] = ray
    labels = (source.stalks[closed].face_index_sets[1],
              source.stalks[closed].face_index_sets[2],
              source.stalks[ray].face_index_sets[0])
    data = BoundaryData(source=source, boundary=interval,
                        point_map=tuple(pm), face_labels=labels)
    assert not is_tame_data(data)


def test_boundary_fine_and_fs():
    # B3: boundary of an fs fan is fs
    x = spec(A1())
    b = boundary_fan(x)
    assert b.boundary.is_fs()
