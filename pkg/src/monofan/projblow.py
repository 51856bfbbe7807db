"""N-graded monoids, Proj, the Rees monoid, and blowups of monoids and fans."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .lattice import AbelianGroup, GroupHom, direct_sum
from .monoid import (
    EmbeddedMonoid,
    MonoidError,
    MonoidHom,
    MonoidIdeal,
    maximal_ideal,
)
from . import fanspace
from .fanspace import FanError, FanMap, FanSpace, Gluing, glue, spec


class GradedMonoid:
    """An embedded monoid with an N-grading, generated in degree <= 1.

    The grading is a monoid hom to N recorded by generator degrees; it must
    be additive on the span (checked) and every degree is 0 or 1.
    """

    def __init__(self, underlying: EmbeddedMonoid, degrees: Sequence[int]):
        degrees = tuple(int(d) for d in degrees)
        if len(degrees) != len(underlying.gens):
            raise MonoidError("need one degree per generator")
        if any(d not in (0, 1) for d in degrees):
            raise MonoidError("graded monoids must be generated in degree <= 1")
        # the degree function must factor through the span: a hom to N kills
        # torsion, so solve <y, free part of coords_i> = degrees_i over Z
        sub = underlying.span
        coords = [sub.coords(g) for g in underlying.gens]
        from .lattice import IntMatrix, solve

        if coords:
            r = sub.group.rank
            mat = IntMatrix.from_rows([list(c[:r]) for c in coords])
            if solve(mat, list(degrees)) is None:
                raise MonoidError("degree map is not additive on the monoid")
        self.underlying = underlying
        self.degrees = degrees

    def degree_one_indices(self) -> list[int]:
        return [i for i, d in enumerate(self.degrees) if d == 1]

    def __repr__(self):
        return "GradedMonoid(%r, %r)" % (self.underlying, list(self.degrees))


def rees(p: EmbeddedMonoid, ideal: MonoidIdeal) -> GradedMonoid:
    """The Rees monoid P ⊔ I ⊔ I² ⊔ ⋯ , embedded in ambient(P) ⊕ Z with the
    second factor tracking the degree."""
    if ideal.parent != p:
        raise MonoidError("ideal of a different monoid")
    w, ia, ib, _, _ = direct_sum(p.ambient, AbelianGroup(1))
    gens = [ia(g) for g in p.gens]
    degs = [0] * len(p.gens)
    one = ib((1,))
    for g in ideal.gens:
        gens.append(w.add(ia(g), one))
        degs.append(1)
    emb = EmbeddedMonoid(w, gens)
    if len(emb.gens) != len(gens):
        # duplicates cannot occur: degree separates the two batches
        raise MonoidError("unexpected collision building the Rees monoid")
    return GradedMonoid(emb, degs)


def proj(r: GradedMonoid) -> FanSpace:
    """Proj of a graded monoid: one chart Spec R_(i) per degree-1 generator,
    glued along common localizations."""
    m = r.underlying
    amb = m.ambient
    deg1 = r.degree_one_indices()
    if not deg1:
        return spec(m)
    charts = []
    for i in deg1:
        gi = m.gens[i]
        gens = []
        for j, g in enumerate(m.gens):
            if r.degrees[j] == 0:
                gens.append(g)
            else:
                gens.append(amb.sub(g, gi))
        charts.append(EmbeddedMonoid(amb, gens).minimized_gens())
    gluings = []
    for a in range(len(deg1)):
        for b in range(a + 1, len(deg1)):
            ga = m.gens[deg1[a]]
            gb = m.gens[deg1[b]]
            elem_ab = amb.sub(gb, ga)  # in chart a
            elem_ba = amb.sub(ga, gb)
            fa = charts[a].smallest_face_containing(elem_ab)
            fb = charts[b].smallest_face_containing(elem_ba)
            gluings.append(Gluing(a, b, fa.indices, fb.indices, None))
    return glue(charts, gluings).space


def blowup(p: EmbeddedMonoid, ideal: MonoidIdeal) -> FanMap:
    """Bl_I P -> Spec P via Proj of the Rees monoid.

    Every chart inclusion P -> R_(i) is injective with an isomorphism on
    spans, so the result is a group isomorphism of fine fans (checked)."""
    if ideal.parent != p:
        raise MonoidError("ideal of a different monoid")
    amb = p.ambient
    charts = []
    for g in ideal.gens:
        gens = list(p.gens) + [amb.sub(h, g) for h in ideal.gens]
        charts.append(EmbeddedMonoid(amb, gens).minimized_gens())
    gluings = []
    for a in range(len(charts)):
        for b in range(a + 1, len(charts)):
            elem_ab = amb.sub(ideal.gens[b], ideal.gens[a])
            elem_ba = amb.sub(ideal.gens[a], ideal.gens[b])
            fa = charts[a].smallest_face_containing(elem_ab)
            fb = charts[b].smallest_face_containing(elem_ba)
            gluings.append(Gluing(a, b, fa.indices, fb.indices, None))
    result = glue(charts, gluings)
    bl = result.space
    base = spec(p)
    base_sets = p.face_index_sets
    pm = []
    sm = []
    for z in range(bl.npoints):
        stalk = bl.stalks[z]
        t = tuple(k for k, gen in enumerate(p.gens)
                  if stalk.contains(gen) and stalk.contains(amb.neg(gen)))
        if t not in set(base_sets):
            raise FanError("blowup point does not sit over a face of the base")
        j = base_sets.index(t)
        pm.append(j)
        h = MonoidHom(base.stalks[j], stalk, GroupHom.identity(amb))
        if not h.is_group_iso():
            raise FanError("blowup chart map is not a group isomorphism")
        sm.append(h)
    return FanMap(bl, base, pm, sm)


@dataclass
class IdealSheaf:
    """A coherent ideal on a fan, one ideal per closed point (chart)."""

    fan: FanSpace
    ideals: dict  # closed point index -> MonoidIdeal on that stalk

    def __post_init__(self):
        closed = self.fan.closed_points()
        if set(self.ideals) != set(closed):
            raise FanError("need exactly one ideal per closed point")
        for c in closed:
            if self.ideals[c].parent != self.fan.stalks[c]:
                raise FanError("ideal parent is not the chart stalk")
        # compatibility after localization on all overlaps
        for a in closed:
            for b in closed:
                if b <= a:
                    continue
                commons = [y for y in self.fan.up_set(a) if self.fan.le(b, y)]
                for y in commons:
                    ia = self._localized(a, y)
                    ib = self._localized(b, y)
                    if not ia.same_ideal(ib):
                        raise FanError("chart ideals disagree over point %d" % y)

    def _localized(self, c, y) -> MonoidIdeal:
        h = self.fan.gen_map(c, y)
        return MonoidIdeal(self.fan.stalks[y], [h(g) for g in self.ideals[c].gens])


def unit_ideal_sheaf(fan: FanSpace) -> IdealSheaf:
    return IdealSheaf(fan, {c: MonoidIdeal(fan.stalks[c], [fan.stalks[c].ambient.zero()])
                            for c in fan.closed_points()})


def maximal_ideal_sheaf(fan: FanSpace) -> IdealSheaf:
    return IdealSheaf(fan, {c: maximal_ideal(fan.stalks[c])
                            for c in fan.closed_points()})


def blowup_fan(sheaf: IdealSheaf) -> FanMap:
    """Chart-wise blowup of a fan along a coherent ideal, glued over the fan."""
    x = sheaf.fan
    closed = x.closed_points()
    if len(closed) == 1:
        c = closed[0]
        inner = blowup(x.stalks[c], sheaf.ideals[c])
        # identify spec(stalk_c) with x itself
        base = inner.target
        iso_pm = []
        for i in range(base.npoints):
            t = base.stalks[i]
            match = [j for j in x.up_set(c)
                     if x.pullback_face(c, j).indices ==
                     tuple(k for k, gen in enumerate(x.stalks[c].gens)
                           if _unit_in(t, gen))]
            iso_pm.append(match[0])
        sm = [MonoidHom(x.stalks[iso_pm[i]], base.stalks[i],
                        _span_identity(x.stalks[iso_pm[i]], base.stalks[i]), check=False)
              for i in range(base.npoints)]
        ident = FanMap(base, x, iso_pm, sm, check=False)
        return ident.compose(inner)
    # general case: blow up each chart, then identify over the overlaps
    blows = [blowup(x.stalks[c], sheaf.ideals[c]) for c in closed]
    return _glue_blowups(x, closed, blows)


def _unit_in(m: EmbeddedMonoid, a) -> bool:
    return m.contains(a) and m.contains(m.ambient.neg(a))


def _span_identity(a: EmbeddedMonoid, b: EmbeddedMonoid) -> GroupHom:
    if a.ambient != b.ambient:
        raise FanError("expected a common ambient")
    return GroupHom.identity(a.ambient)


def _glue_blowups(x: FanSpace, closed, blows) -> FanMap:
    """Glue the per-chart blowups over a multi-chart fan."""
    members = []
    for bi, bl in enumerate(blows):
        for z in range(bl.source.npoints):
            members.append((bi, z))
    midx = {m: k for k, m in enumerate(members)}
    parent = list(range(len(members)))
    transport = {}
    for k, (bi, z) in enumerate(members):
        transport[k] = GroupHom.identity(x.stalks[closed[bi]].ambient)

    def find(k):
        path = []
        while parent[k] != k:
            path.append(k)
            k = parent[k]
        for p in reversed(path):
            if parent[p] != k:
                transport[p] = transport[parent[p]].compose(transport[p])
                parent[p] = k
        return k

    # identify pieces over common generizations of pairs of closed points
    for ai in range(len(closed)):
        for bi in range(ai + 1, len(closed)):
            a, b = closed[ai], closed[bi]
            commons = [y for y in x.up_set(a) if x.le(b, y)]
            for y in commons:
                ta = x.gen_map(a, y).group_map
                tb = x.gen_map(b, y).group_map
                try:
                    tb_inv = tb.inverse()
                except ValueError as e:
                    raise FanError("chart transports are not invertible; "
                                   "cannot glue blowups") from e
                t_ab = tb_inv.compose(ta)
                for za in range(blows[ai].source.npoints):
                    sa = blows[ai].source.stalks[za]
                    if not _unit_covers(sa, x.stalks[a], x.pullback_face(a, y)):
                        continue
                    img = EmbeddedMonoid(x.stalks[b].ambient, [t_ab(g) for g in sa.gens])
                    match = None
                    for zb in range(blows[bi].source.npoints):
                        sb = blows[bi].source.stalks[zb]
                        if img.same_submonoid(sb):
                            match = zb
                            break
                    if match is None:
                        raise FanError("blowup pieces do not match over the overlap")
                    ka, kb = midx[(ai, za)], midx[(bi, match)]
                    ra, rb = find(ka), find(kb)
                    if ra == rb:
                        continue
                    if members[ra] <= members[rb]:
                        parent[rb] = ra
                        transport[rb] = transport[ka].compose(
                            t_ab.inverse()).compose(transport[kb].inverse())
                    else:
                        parent[ra] = rb
                        transport[ra] = transport[kb].compose(t_ab).compose(
                            transport[ka].inverse())

    roots = sorted({find(k) for k in range(len(members))}, key=lambda r: members[r])
    idx = {r: i for i, r in enumerate(roots)}
    rootof = {k: find(k) for k in range(len(members))}
    stalks = [blows[members[r][0]].source.stalks[members[r][1]] for r in roots]
    leq = set()
    for bi, bl in enumerate(blows):
        for i, j in bl.source.leq:
            leq.add((idx[rootof[midx[(bi, i)]]], idx[rootof[midx[(bi, j)]]]))
    tmp = FanSpace(stalks, leq, {}, check=False)
    gen_maps = {}
    for i, j in tmp.leq:
        if i == j:
            continue
        ri = roots[i]
        bi, zi = members[ri]
        copy_j = None
        for z2 in range(blows[bi].source.npoints):
            if idx[rootof[midx[(bi, z2)]]] == j:
                copy_j = z2
                break
        if copy_j is None:
            raise FanError("generization escaped its blowup chart")
        t = transport[midx[(bi, copy_j)]]
        gen_maps[(i, j)] = MonoidHom(stalks[i], stalks[j], t)
    labels = ["b%d.%s" % (members[r][0], blows[members[r][0]].source.labels[members[r][1]])
              for r in roots]
    space = FanSpace(stalks, leq, gen_maps, labels)
    pm = []
    sm = []
    for i, r in enumerate(roots):
        bi, zi = members[r]
        base_pt_in_chart = blows[bi].point_map[zi]
        # the chart's base Spec(stalk_c) open embeds in x
        c = closed[bi]
        face = tuple(k for k, gen in enumerate(x.stalks[c].gens)
                     if _unit_in(blows[bi].target.stalks[base_pt_in_chart], gen))
        target_pt = None
        for j in x.up_set(c):
            if x.pullback_face(c, j).indices == face:
                target_pt = j
                break
        pm.append(target_pt)
        tr = GroupHom.identity(x.stalks[c].ambient)
        sm.append(MonoidHom(x.stalks[target_pt], stalks[i],
                            _compose_transport(x, c, target_pt, tr), check=True))
    return FanMap(space, x, pm, sm)


def _unit_covers(stalk: EmbeddedMonoid, chart: EmbeddedMonoid, face) -> bool:
    """Does the blowup piece lie over the open defined by `face` of the chart?"""
    return all(_unit_in(stalk, chart.gens[i]) for i in face.indices)


def _compose_transport(x: FanSpace, c, j, tr: GroupHom) -> GroupHom:
    """Group map from stalk_j's ambient back into chart c coordinates."""
    if c == j:
        return tr
    g = x.gen_map(c, j).group_map
    return tr.compose(g.inverse())


@dataclass
class IdealSequence:
    """Ideal gens per closed point for each successive blowup stage."""

    steps: tuple

    @classmethod
    def from_gens(cls, steps):
        return cls(tuple(tuple((c, tuple(tuple(g) for g in gens)) for c, gens in step)
                         for step in steps))


def blowup_sequence(fan: FanSpace, seq: IdealSequence) -> FanMap:
    """Composite of successive blowups; an empty sequence is the identity."""
    current = fan
    total = FanMap.identity(fan)
    for step in seq.steps:
        ideal_map = {}
        wanted = dict(step)
        for c in current.closed_points():
            if c not in wanted:
                raise FanError("step does not cover closed point %d" % c)
            ideal_map[c] = MonoidIdeal(current.stalks[c], list(wanted[c]))
        sheaf = IdealSheaf(current, ideal_map)
        f = blowup_fan(sheaf)
        total = total.compose(f)
        current = f.source
    return total
