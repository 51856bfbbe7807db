import pytest

from monofan.lattice import AbelianGroup
from monofan.monoid import EmbeddedMonoid, are_isomorphic, maximal_ideal
from monofan.fanspace import FanSpace, fan_isomorphic_over, from_classical, spec
from monofan.projblow import blowup
from monofan.resolve import (
    ResolveError,
    free_locus,
    resolve_fan,
    verify_certificate,
)

Z2 = AbelianGroup(2)


def N(k=1):
    return EmbeddedMonoid(AbelianGroup(k),
                          [[1 if i == j else 0 for j in range(k)] for i in range(k)])


def A1():
    return EmbeddedMonoid(Z2, [[2, 0], [1, 1], [0, 2]])


def test_free_locus_n2():
    s = spec(N(2))
    assert free_locus(s) == list(range(4))


def test_free_locus_a1():
    s = spec(A1())
    fl = free_locus(s)
    assert len(fl) == 3
    closed = s.closed_points()[0]
    assert closed not in fl


def test_free_locus_group():
    z = EmbeddedMonoid(AbelianGroup(1), [[1], [-1]])
    assert free_locus(spec(z)) == [0]


def test_resolve_free_fan_is_identity():
    s = spec(N(3))
    cert = resolve_fan(s)
    assert cert.output is s
    assert cert.steps == ()
    assert verify_certificate(cert)


def test_resolve_a1():
    s = spec(A1())
    cert = resolve_fan(s)
    assert verify_certificate(cert)
    out = cert.output
    closed = out.closed_points()
    assert len(closed) == 2
    for c in closed:
        assert out.stalks[c].span.group.rank == 2
        assert out.stalks[c].is_free()
    # agreement with the blowup of the maximal ideal, over the base
    bl = blowup(A1(), maximal_ideal(A1()))
    assert fan_isomorphic_over(bl, cert.map)
    # single subdivision step at the middle ray, with the blowup ideal found
    assert len(cert.steps) == 1
    assert cert.steps[0].kind == "subdivide"
    assert cert.steps[0].blowup_ideal is not None


def test_resolve_cone12():
    x = from_classical([[(1, 0), (1, 2)]], 2)
    cert = resolve_fan(x)
    assert verify_certificate(cert)
    closed = cert.output.closed_points()
    assert len(closed) == 2
    for c in closed:
        assert cert.output.stalks[c].is_free()


def test_resolve_idempotent_on_output():
    cert = resolve_fan(spec(A1()))
    cert2 = resolve_fan(cert.output)
    assert cert2.steps == ()
    assert cert2.output is cert.output


def test_verify_rejects_tampering():
    cert = resolve_fan(spec(A1()))
    bad_stalks = list(cert.output.stalks)
    closed = cert.output.closed_points()[0]
    bad_stalks[closed] = A1()
    hacked = FanSpace(bad_stalks, cert.output.leq, cert.output.gen_maps,
                      cert.output.labels, check=False)
    from monofan.resolve import ResolutionCertificate
    from monofan.fanspace import FanMap

    bad_map = FanMap(hacked, cert.input, cert.map.point_map,
                     [cert.map.stalk_maps[i] if i != closed else
                      cert.map.stalk_maps[i]
                      for i in range(hacked.npoints)], check=False)
    bad = ResolutionCertificate(cert.input, hacked, bad_map, cert.steps,
                                cert.free_locus_pairs)
    assert not verify_certificate(bad)


def all_pointed_2d_cones(max_entry):
    """All pointed 2-dim cones with primitive ray entries in [0, max_entry]."""
    from math import gcd

    rays = []
    for a in range(0, max_entry + 1):
        for b in range(0, max_entry + 1):
            if (a, b) != (0, 0) and gcd(a, b) == 1:
                rays.append((a, b))
    out = []
    for i in range(len(rays)):
        for j in range(i + 1, len(rays)):
            r1, r2 = rays[i], rays[j]
            det = r1[0] * r2[1] - r1[1] * r2[0]
            if det != 0:
                out.append([r1, r2])
    return out


def test_resolve_all_2d_cones_small():
    # a smaller sweep here; the full entry<=5 sweep runs in the acceptance suite
    count = 0
    for rays in all_pointed_2d_cones(3):
        x = from_classical([rays], 2)
        cert = resolve_fan(x)
        assert verify_certificate(cert)
        count += 1
    assert count > 10


def test_resolve_rejects_non_fs():
    m23 = EmbeddedMonoid(AbelianGroup(1), [[2], [3]])
    with pytest.raises(ResolveError):
        resolve_fan(spec(m23))
