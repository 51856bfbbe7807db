"""Finite monoidal spaces: Spec of a monoid, fans glued from affine charts,
morphisms, products and fibered products.

A FanSpace is a finite poset of points (x <= y meaning y is a generization
of x), one stalk monoid per point, and a localization hom per comparable
pair.  Charts are not stored: the smallest neighborhood of any point is
Spec of its stalk, so the up-sets of the closed points are an affine cover.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Optional, Sequence

from . import cones
from .lattice import AbelianGroup, GroupHom, Subgroup, direct_sum, induced_hom
from .monoid import (
    EmbeddedMonoid,
    Face,
    MonoidError,
    MonoidHom,
    PresentedMonoid,
    are_isomorphic,
    pushout_integral,
    pushout_presentation,
)


class FanError(Exception):
    pass


def _is_unit_of(m: EmbeddedMonoid, a) -> bool:
    return m.contains(a) and m.contains(m.ambient.neg(a))


class FanSpace:
    """Finite T0 space with stalk monoids and generization (localization) maps."""

    def __init__(self, stalks, leq, gen_maps, labels=None, check: bool = True):
        self.stalks = tuple(stalks)
        n = len(self.stalks)
        rel = set()
        for i, j in leq:
            rel.add((i, j))
        for i in range(n):
            rel.add((i, i))
        # transitive closure
        changed = True
        while changed:
            changed = False
            for i, j in list(rel):
                for k in range(n):
                    if (j, k) in rel and (i, k) not in rel:
                        rel.add((i, k))
                        changed = True
        self.leq = frozenset(rel)
        self.gen_maps = dict(gen_maps)
        self.labels = tuple(labels) if labels else tuple("p%d" % i for i in range(n))
        if check:
            self._validate()

    def __eq__(self, other):
        return (isinstance(other, FanSpace) and self.stalks == other.stalks
                and self.leq == other.leq
                and all(self.gen_maps[k] == other.gen_maps.get(k) for k in self.gen_maps)
                and set(self.gen_maps) == set(other.gen_maps))

    def __hash__(self):
        return hash((self.stalks, self.leq))

    # -- poset helpers -------------------------------------------------------

    @property
    def npoints(self) -> int:
        return len(self.stalks)

    def le(self, i, j) -> bool:
        return (i, j) in self.leq

    def up_set(self, i) -> list[int]:
        return [j for j in range(self.npoints) if self.le(i, j)]

    def down_set(self, i) -> list[int]:
        return [j for j in range(self.npoints) if self.le(j, i)]

    def closed_points(self) -> list[int]:
        return [i for i in range(self.npoints)
                if all(not self.le(j, i) or j == i for j in range(self.npoints))]

    def generic_points(self) -> list[int]:
        return [i for i in range(self.npoints)
                if all(not self.le(i, j) or j == i for j in range(self.npoints))]

    def covers(self) -> list[tuple[int, int]]:
        out = []
        for i, j in sorted(self.leq):
            if i == j:
                continue
            if any(k != i and k != j and self.le(i, k) and self.le(k, j)
                   for k in range(self.npoints)):
                continue
            out.append((i, j))
        return out

    def gen_map(self, i, j) -> MonoidHom:
        if i == j:
            return MonoidHom.identity(self.stalks[i])
        return self.gen_maps[(i, j)]

    # -- structure -----------------------------------------------------------

    def pullback_face(self, i, j) -> Face:
        """The face of stalk_i of generators becoming units at j (i <= j)."""
        g = self.gen_map(i, j)
        idx = tuple(k for k, gen in enumerate(self.stalks[i].gens)
                    if _is_unit_of(self.stalks[j], g(gen)))
        return self.stalks[i].face_from_indices(idx)

    def _validate(self):
        n = self.npoints
        for i, j in self.leq:
            if i != j and (j, i) in self.leq:
                raise FanError("order is not antisymmetric")
        for (i, j), h in self.gen_maps.items():
            if not self.le(i, j) or i == j:
                raise FanError("gen map for a non-comparable pair")
            if h.domain != self.stalks[i] or h.codomain != self.stalks[j]:
                raise FanError("gen map endpoints do not match stalks")
        for i, j in self.leq:
            if i != j and (i, j) not in self.gen_maps:
                raise FanError("missing gen map for %d <= %d" % (i, j))
        for i in range(n):
            for j in self.up_set(i):
                for k in self.up_set(j):
                    a = self.gen_map(j, k).compose(self.gen_map(i, j))
                    if a != self.gen_map(i, k):
                        raise FanError("gen maps do not compose")
        # localization property and the chart property
        for i in range(n):
            faces = set(self.stalks[i].face_index_sets)
            seen = {}
            for j in self.up_set(i):
                f = self.pullback_face(i, j)
                if f.indices not in faces:
                    raise FanError("pullback of units is not a face")
                loc, _ = self.stalks[i].localize(f)
                h = self.gen_map(i, j)
                img = EmbeddedMonoid(self.stalks[j].ambient, [h(g) for g in loc.gens])
                if not img.same_submonoid(self.stalks[j]):
                    raise FanError("stalk at a generization is not the localization")
                seen[j] = f.indices
            if len(set(seen.values())) != len(seen) or len(seen) != len(faces):
                raise FanError("smallest neighborhood of point %d is not affine" % i)
            for j in self.up_set(i):
                for k in self.up_set(i):
                    if (set(seen[j]) <= set(seen[k])) != self.le(j, k):
                        raise FanError("face order does not match the topology")

    # -- derived data ----------------------------------------------------------

    @property
    def chart_cover(self):
        """Affine cover by the up-sets of the closed points."""
        return [(tuple(self.up_set(c)), self.stalks[c]) for c in self.closed_points()]

    def sharpened_stalk(self, i) -> EmbeddedMonoid:
        return self.stalks[i].sharpen()[0]

    def is_fine(self) -> bool:
        return True  # all stalks are finitely generated and integral by type

    def is_fs(self) -> bool:
        return all(self.stalks[c].is_saturated for c in self.closed_points())

    def free_points(self) -> list[int]:
        return [i for i in range(self.npoints) if self.stalks[i].is_free()]

    def to_dot(self) -> str:
        """Specialization poset in DOT format; nodes carry the irreducible
        count of the sharpened stalk."""
        lines = ["digraph fan {"]
        for i in range(self.npoints):
            sharp = self.sharpened_stalk(i)
            irr = len(sharp.irreducibles()) if sharp.gens else 0
            lines.append('  %s [label="%s irr=%d"];' % (self.labels[i], self.labels[i], irr))
        for i, j in self.covers():
            lines.append("  %s -> %s;" % (self.labels[i], self.labels[j]))
        lines.append("}")
        return "\n".join(lines) + "\n"

    def global_sections(self) -> EmbeddedMonoid:
        """Gamma(X, M_X) for an fs fan, as the equalizer of the restrictions."""
        if not self.is_fs():
            raise FanError("global sections are implemented for fs fans")
        closed = self.closed_points()
        spans = [self.stalks[c].span for c in closed]
        grps = [s.group for s in spans]
        total = AbelianGroup(0)
        incls: list[GroupHom] = []
        for g in grps:
            total2, i_old, i_new, _, _ = direct_sum(total, g)
            incls = [i_old.compose(h) for h in incls]
            incls.append(i_new)
            total = total2
        rows_targets = []
        for a, b in combinations(range(len(closed)), 2):
            commons = [y for y in self.up_set(closed[a]) if self.le(closed[b], y)]
            for y in commons:
                rows_targets.append((a, b, y))
        if rows_targets:
            tgt = AbelianGroup(0)
            tgt_incls = []
            for a, b, y in rows_targets:
                gy = self.stalks[y].span.group
                tgt2, i_old, i_new, _, _ = direct_sum(tgt, gy)
                tgt_incls = [i_old.compose(h) for h in tgt_incls]
                tgt_incls.append(i_new)
                tgt = tgt2
            cols = []
            for w in total.gens():
                img = tgt.zero()
                for r, (a, b, y) in enumerate(rows_targets):
                    ya_span = self.stalks[y].span

                    def into_y(cidx, wvec):
                        c = closed[cidx]
                        part = spans[cidx].inclusion(_project(incls, cidx, total, grps, wvec))
                        return ya_span.coords(self.gen_map(c, y)(part))

                    va = into_y(a, w)
                    vb = into_y(b, w)
                    diff = ya_span.group.sub(va, vb)
                    img = tgt.add(img, tgt_incls[r](diff))
                cols.append(img)
            big = GroupHom.from_gen_images(total, tgt, cols)
            ker_gens = big.kernel_elements()
        else:
            ker_gens = total.gens()
        lsub = Subgroup(total, ker_gens)
        # a family is a section iff each closed-point component is in the stalk
        ineq_rows = []
        dim = lsub.group.rank
        for w_idx in range(dim):
            pass
        # build inequalities on the free part of L from each stalk's cone
        rows = []
        for cidx, c in enumerate(closed):
            st = self.stalks[c]
            for row in st.cone_ineqs:
                # the row acts on the free part of span(st); pull back through
                # L -> total -> component -> span free part
                coeffs = []
                for k in range(dim):
                    basis = [0] * lsub.group.ngens
                    basis[k] = 1
                    tot = lsub.inclusion(basis)
                    comp = _project(incls, cidx, total, grps, tot)
                    amb_el = spans[cidx].inclusion(comp)
                    free = st.ambient.free_part(amb_el)
                    coeffs.append(sum(r * x for r, x in zip(row, free)))
                rows.append(tuple(coeffs))
        rows = sorted(set(r for r in rows if any(r)))
        gens_free = cones.lattice_monoid_generators(rows, dim) if dim else []
        gens = [tuple(v) + (0,) * len(lsub.group.torsion) for v in gens_free]
        for i in range(len(lsub.group.torsion)):
            t = [0] * lsub.group.ngens
            t[dim + i] = 1
            gens.append(tuple(t))
        return EmbeddedMonoid(lsub.group, gens)


def _project(incls, idx, total, grps, vec):
    """Inverse of the iterated direct-sum inclusion: component idx of vec."""
    g = grps[idx]
    sol = incls[idx].preimage(_component_fix(incls, idx, total, grps, vec))
    if sol is not None:
        return sol
    raise FanError("direct sum projection failed")


def _component_fix(incls, idx, total, grps, vec):
    out = total.reduce(vec)
    for j, inc in enumerate(incls):
        if j == idx:
            continue
        # subtract the other components
        pass
    # Simpler: solve by subtracting all other inclusions via coordinates.
    # direct_sum guarantees vec = sum_j incl_j(comp_j); recover comp_idx by
    # solving the stacked system.
    from .lattice import IntMatrix, solve

    cols = []
    widths = []
    for j, g in enumerate(grps):
        for w in g.gens():
            cols.append(incls[j](w))
        widths.append(g.ngens)
    rel = total.relation_matrix()
    aug = IntMatrix.from_cols(cols + [rel.col(j) for j in range(rel.cols)],
                              nrows=total.ngens)
    sol = solve(aug, out)
    if sol is None:
        raise FanError("direct sum decomposition failed")
    off = sum(widths[:idx])
    comp = sol[off : off + widths[idx]]
    return incls[idx](grps[idx].reduce(comp))


class FanMap:
    """Morphism of fan spaces: order-preserving point map with local stalk
    maps from the target stalk at the image to the source stalk."""

    def __init__(self, source: FanSpace, target: FanSpace, point_map, stalk_maps,
                 check: bool = True):
        self.source = source
        self.target = target
        self.point_map = tuple(point_map)
        self.stalk_maps = tuple(stalk_maps)
        if check:
            self._validate()

    def _validate(self):
        if len(self.point_map) != self.source.npoints:
            raise FanError("point map arity mismatch")
        if len(self.stalk_maps) != self.source.npoints:
            raise FanError("stalk map arity mismatch")
        for i, j in self.source.leq:
            if not self.target.le(self.point_map[i], self.point_map[j]):
                raise FanError("point map is not continuous")
        for x in range(self.source.npoints):
            h = self.stalk_maps[x]
            if h.domain != self.target.stalks[self.point_map[x]] \
                    or h.codomain != self.source.stalks[x]:
                raise FanError("stalk map endpoints are wrong at point %d" % x)
            if not h.is_local():
                raise FanError("stalk map at point %d is not local" % x)
        for i, j in self.source.leq:
            if i == j:
                continue
            fi, fj = self.point_map[i], self.point_map[j]
            left = self.source.gen_map(i, j).compose(self.stalk_maps[i])
            right = self.stalk_maps[j].compose(self.target.gen_map(fi, fj))
            if left != right:
                raise FanError("stalk maps do not commute with generization")

    @classmethod
    def identity(cls, x: FanSpace) -> "FanMap":
        return cls(x, x, range(x.npoints),
                   [MonoidHom.identity(s) for s in x.stalks], check=False)

    def compose(self, other: "FanMap") -> "FanMap":
        """self o other (other first)."""
        if other.target is not self.source and other.target != self.source:
            raise FanError("fan maps do not compose")
        pm = [self.point_map[p] for p in other.point_map]
        sm = [other.stalk_maps[x].compose(self.stalk_maps[other.point_map[x]])
              for x in range(other.source.npoints)]
        return FanMap(other.source, self.target, pm, sm, check=False)

    def is_group_iso_of_fans(self) -> bool:
        return all(h.is_group_iso() for h in self.stalk_maps)


# -- affine fans ------------------------------------------------------------------


def spec(p: EmbeddedMonoid) -> FanSpace:
    """Spec P: points are the faces of P, stalks the localizations."""
    sets = p.face_index_sets
    stalks = []
    for t in sets:
        loc, _ = p.localize(p.face_from_indices(t))
        stalks.append(loc)
    leq = set()
    gen_maps = {}
    for i, ti in enumerate(sets):
        for j, tj in enumerate(sets):
            if set(ti) <= set(tj):
                leq.add((i, j))
                if i != j:
                    gen_maps[(i, j)] = MonoidHom(
                        stalks[i], stalks[j], GroupHom.identity(p.ambient), check=False)
    labels = ["f" + ".".join(str(x) for x in t) for t in sets]
    # make labels unique in pathological cases
    if len(set(labels)) != len(labels):
        labels = ["p%d" % i for i in range(len(sets))]
    return FanSpace(stalks, leq, gen_maps, labels)


def spec_map(h: MonoidHom) -> FanMap:
    """Spec h: Spec(codomain) -> Spec(domain), face G -> h^-1(G)."""
    src = spec(h.codomain)
    tgt = spec(h.domain)
    csets = h.codomain.face_index_sets
    dsets = tgt_sets = h.domain.face_index_sets
    pm = []
    sm = []
    for i, t in enumerate(csets):
        fmon = h.codomain.face_from_indices(t).monoid
        pre = tuple(j for j, q in enumerate(h.domain.gens) if fmon.contains(h(q)))
        if pre not in set(dsets):
            raise FanError("preimage of a face is not a face")
        j = dsets.index(pre)
        pm.append(j)
        sm.append(MonoidHom(tgt.stalks[j], src.stalks[i], h.group_map, check=False))
    return FanMap(src, tgt, pm, sm)


# -- gluing -------------------------------------------------------------------------


@dataclass
class Gluing:
    """Identify the open Spec(F_i^-1 P_i) of chart i with Spec(F_j^-1 P_j) of
    chart j along an isomorphism of the localized monoids."""

    chart_i: int
    chart_j: int
    face_i: Sequence[int]
    face_j: Sequence[int]
    group_map: Optional[GroupHom] = None  # ambient_i -> ambient_j; None = identity


@dataclass
class GlueResult:
    space: FanSpace
    point_index: list[dict[int, int]]  # per chart: spec-point -> glued index


def _homs_agree_on(span: Subgroup, g1: GroupHom, g2: GroupHom) -> bool:
    return all(g1(span.inclusion(w)) == g2(span.inclusion(w))
               for w in span.group.gens())


def glue(charts: Sequence[EmbeddedMonoid], gluings: Sequence[Gluing]) -> GlueResult:
    """Glue affine fans along open subfans; checks cocycle compatibility."""
    specs = [spec(c) for c in charts]
    # member universe
    members = [(c, p) for c in range(len(charts)) for p in range(specs[c].npoints)]
    midx = {m: k for k, m in enumerate(members)}
    parent = list(range(len(members)))
    transport = [GroupHom.identity(charts[c].ambient) for (c, p) in members]

    def find(k):
        # path with transport composition
        path = []
        while parent[k] != k:
            path.append(k)
            k = parent[k]
        for p in reversed(path):
            if parent[p] != k:
                transport[p] = transport[parent[p]].compose(transport[p])
                parent[p] = k
        return k

    def union(ka, kb, t_ab):
        """Identify member ka with member kb, t_ab : amb(chart ka) -> amb(chart kb)."""
        ra, rb = find(ka), find(kb)
        t_a = transport[ka]  # ka -> ra
        t_b = transport[kb]
        if ra == rb:
            c, p = members[ka]
            sp = specs[c].stalks[p].span
            if not _homs_agree_on(sp, t_a, t_b.compose(t_ab)):
                raise FanError("cocycle condition violated")
            return
        # direct the merge toward the smaller canonical member
        if members[ra] <= members[rb]:
            # rb's tree now points to ra: need amb(chart rb) -> amb(chart ra)
            tnew = invert_on(t_b.compose(t_ab), specs[members[ka][0]],
                             members[ka][1], t_a)
            parent[rb] = ra
            transport[rb] = tnew
        else:
            parent[ra] = rb
            transport[ra] = t_b.compose(t_ab).compose(invert_full(t_a))
        # refresh lazily via find()

    def invert_full(t: GroupHom) -> GroupHom:
        if t.domain == t.codomain and t == GroupHom.identity(t.domain):
            return t
        return t.inverse()

    def invert_on(fwd: GroupHom, specc, pointp, t_a: GroupHom) -> GroupHom:
        # want: amb(rb chart) -> amb(ra chart) with tnew o fwd == t_a on stalk span
        try:
            return t_a.compose(invert_full(fwd))
        except ValueError as e:
            raise FanError("gluing transport is not invertible on the ambient; "
                           "glue normalized charts instead") from e

    for g in gluings:
        ci, cj = g.chart_i, g.chart_j
        fi = charts[ci].face_from_indices(g.face_i)
        fj = charts[cj].face_from_indices(g.face_j)
        loc_i, _ = charts[ci].localize(fi)
        loc_j, _ = charts[cj].localize(fj)
        gm = g.group_map
        if gm is None:
            if charts[ci].ambient != charts[cj].ambient:
                raise FanError("identity gluing needs equal ambients")
            gm = GroupHom.identity(charts[ci].ambient)
        iso = MonoidHom(loc_i, loc_j, gm)
        if not iso.is_monoid_iso():
            raise FanError("gluing map is not an isomorphism of localizations")
        seti = set(charts[ci].face_index_sets)
        for p, tp in enumerate(charts[ci].face_index_sets):
            if not set(g.face_i) <= set(tp):
                continue
            # image face of chart j
            locface = EmbeddedMonoid(
                charts[cj].ambient,
                [gm(charts[ci].gens[i]) for i in tp]
                + [gm(charts[ci].ambient.neg(charts[ci].gens[i])) for i in g.face_i])
            tq = tuple(k for k, gen in enumerate(charts[cj].gens)
                       if locface.contains(gen))
            if tq not in set(charts[cj].face_index_sets) or not set(g.face_j) <= set(tq):
                raise FanError("gluing does not carry faces to faces")
            q = charts[cj].face_index_sets.index(tq)
            union(midx[(ci, p)], midx[(cj, q)], gm)

    roots = sorted({find(k) for k in range(len(members))},
                   key=lambda r: members[r])
    root_of = {k: find(k) for k in range(len(members))}
    index_of_root = {r: i for i, r in enumerate(roots)}
    npts = len(roots)
    stalks = [specs[members[r][0]].stalks[members[r][1]] for r in roots]
    leq = set()
    for c in range(len(charts)):
        for i, j in specs[c].leq:
            a = index_of_root[root_of[midx[(c, i)]]]
            b = index_of_root[root_of[midx[(c, j)]]]
            leq.add((a, b))
    # close and build gen maps through canonical representatives
    gen_maps = {}
    space_tmp = FanSpace(stalks, leq, {}, check=False)
    for a, b in space_tmp.leq:
        if a == b or (a, b) in gen_maps:
            continue
        ra, rb = roots[a], roots[b]
        ca, pa = members[ra]
        # find b's copy inside chart ca
        copyb = None
        for p2 in range(specs[ca].npoints):
            if index_of_root[root_of[midx[(ca, p2)]]] == b:
                copyb = p2
                break
        if copyb is None:
            raise FanError("generization escapes the representative chart")
        t = transport[midx[(ca, copyb)]]  # amb(ca) -> amb(chart of root b)
        gen_maps[(a, b)] = MonoidHom(stalks[a], stalks[b], t, check=True)
    labels = ["c%d.%s" % (members[r][0], specs[members[r][0]].labels[members[r][1]])
              for r in roots]
    space = FanSpace(stalks, leq, gen_maps, labels)
    point_index = [
        {p: index_of_root[root_of[midx[(c, p)]]] for p in range(specs[c].npoints)}
        for c in range(len(charts))]
    return GlueResult(space, point_index)


# -- products and fibered products -----------------------------------------------


def product(x: FanSpace, y: FanSpace) -> FanSpace:
    """X x Y, chart-wise Spec(P + Q): points are pairs, stalks direct sums."""
    pairs = [(i, j) for i in range(x.npoints) for j in range(y.npoints)]
    stalks = []
    sums = {}
    for i, j in pairs:
        a, b = x.stalks[i], y.stalks[j]
        w, ia, ib, pa, pb = direct_sum(a.ambient, b.ambient)
        gens = [ia(g) for g in a.gens] + [ib(g) for g in b.gens]
        st = EmbeddedMonoid(w, gens)
        st._saturated_hint = a._known_saturated() and b._known_saturated()
        stalks.append(st)
        sums[(i, j)] = (w, ia, ib, pa, pb)
    leq = set()
    gen_maps = {}
    for a_idx, (i, j) in enumerate(pairs):
        for b_idx, (k, l) in enumerate(pairs):
            if x.le(i, k) and y.le(j, l):
                leq.add((a_idx, b_idx))
                if a_idx != b_idx:
                    w1, ia1, ib1, pa1, pb1 = sums[(i, j)]
                    w2, ia2, ib2, _, _ = sums[(k, l)]
                    gx = x.gen_map(i, k).group_map
                    gy = y.gen_map(j, l).group_map
                    cols = [w2.add(ia2(gx(pa1(g))), ib2(gy(pb1(g)))) for g in w1.gens()]
                    gm = GroupHom.from_gen_images(w1, w2, cols)
                    gen_maps[(a_idx, b_idx)] = MonoidHom(
                        stalks[a_idx], stalks[b_idx], gm, check=False)
    labels = ["%s*%s" % (x.labels[i], y.labels[j]) for i, j in pairs]
    return FanSpace(stalks, leq, gen_maps, labels)


def disjoint_union(spaces: Sequence[FanSpace]) -> FanSpace:
    stalks = []
    leq = set()
    gen_maps = {}
    labels = []
    off = 0
    for s_idx, s in enumerate(spaces):
        for i, j in s.leq:
            leq.add((off + i, off + j))
        for (i, j), h in s.gen_maps.items():
            gen_maps[(off + i, off + j)] = h
        stalks.extend(s.stalks)
        labels.extend("u%d.%s" % (s_idx, l) for l in s.labels)
        off += s.npoints
    return FanSpace(stalks, leq, gen_maps, labels)


@dataclass
class FiberedProduct:
    space: FanSpace
    proj1: FanMap
    proj2: FanMap
    presentations: Optional[dict] = None


def fibered_product(f: FanMap, g: FanMap, integralize: bool = False) -> FiberedProduct:
    """X x_Z Y.  Stalks are integral pushouts (the fine fibered product);
    with integralize=False the per-point pushout presentations relative to
    the chart presentations are attached as well."""
    if f.target is not g.target and f.target != g.target:
        raise FanError("fibered product needs a common target")
    x, y = f.source, g.source
    pts = [(i, j) for i in range(x.npoints) for j in range(y.npoints)
           if f.point_map[i] == g.point_map[j]]
    stalks = []
    coprs = []
    for i, j in pts:
        out, h1, h2 = pushout_integral(f.stalk_maps[i], g.stalk_maps[j])
        stalks.append(out)
        coprs.append((h1, h2))
    leq = set()
    gen_maps = {}
    for a_idx, (i, j) in enumerate(pts):
        for b_idx, (k, l) in enumerate(pts):
            if x.le(i, k) and y.le(j, l):
                leq.add((a_idx, b_idx))
                if a_idx != b_idx:
                    h1a, h2a = coprs[a_idx]
                    h1b, h2b = coprs[b_idx]
                    gx = x.gen_map(i, k)
                    gy = y.gen_map(j, l)
                    # universal map on generators of the pushout
                    cols = []
                    src = stalks[a_idx].ambient
                    dst = stalks[b_idx].ambient
                    ngx = [h1b(gx(p)) for p in x.stalks[i].gens]
                    ngy = [h2b(gy(p)) for p in y.stalks[j].gens]
                    gen_images = ngx + ngy
                    srcgens = [h1a(p) for p in x.stalks[i].gens] + \
                              [h2a(p) for p in y.stalks[j].gens]
                    gm = _hom_from_monoid_gen_images(src, dst, srcgens, gen_images)
                    gen_maps[(a_idx, b_idx)] = MonoidHom(
                        stalks[a_idx], stalks[b_idx], gm, check=False)
    labels = ["%s&%s" % (x.labels[i], y.labels[j]) for i, j in pts]
    space = FanSpace(stalks, leq, gen_maps, labels)
    pm1 = [i for i, j in pts]
    pm2 = [j for i, j in pts]
    sm1 = [coprs[k][0] for k in range(len(pts))]
    sm2 = [coprs[k][1] for k in range(len(pts))]
    proj1 = FanMap(space, x, pm1, sm1)
    proj2 = FanMap(space, y, pm2, sm2)
    pres = None
    if not integralize:
        pres = {}
        for k, (i, j) in enumerate(pts):
            pres[(i, j)] = pushout_presentation(f.stalk_maps[i], g.stalk_maps[j])
    return FiberedProduct(space, proj1, proj2, pres)


def _hom_from_monoid_gen_images(src: AbelianGroup, dst: AbelianGroup,
                                src_elems, dst_elems) -> GroupHom:
    """The group hom src -> dst sending src_elems to dst_elems (must exist
    and be determined on the subgroup generated; extended canonically)."""
    from .lattice import IntMatrix, solve

    cols = []
    smat = IntMatrix.from_cols(src_elems, nrows=src.ngens) if src_elems \
        else IntMatrix(src.ngens, 0, [])
    rel = src.relation_matrix()
    aug = IntMatrix.from_cols(
        [smat.col(j) for j in range(smat.cols)] + [rel.col(j) for j in range(rel.cols)],
        nrows=src.ngens)
    for gvec in src.gens():
        sol = solve(aug, gvec)
        if sol is None:
            raise FanError("generators do not span the source group")
        img = dst.zero()
        for c, e in zip(sol[: len(src_elems)], dst_elems):
            img = dst.add(img, dst.scale(c, e))
        cols.append(img)
    out = GroupHom.from_gen_images(src, dst, cols)
    for e, target in zip(src_elems, dst_elems):
        if out(e) != dst.reduce(target):
            raise FanError("prescribed images are inconsistent")
    return out


# -- classical fans ------------------------------------------------------------------


def _is_face_of_cone(face_rays, cone_rays, dim) -> bool:
    if not cone_rays:
        return not face_rays
    system = []
    for r in face_rays:
        system.append((list(r), 0))
        system.append(([-x for x in r], 0))
    fr_set = {tuple(r) for r in face_rays}
    strict = [r for r in cone_rays if tuple(r) not in fr_set]
    ineqs = cones.cone_inequalities(face_rays, dim) if face_rays else None
    for r in strict:
        if face_rays and cones.cone_contains(ineqs, r) and \
                cones.cone_contains(ineqs, tuple(-x for x in r)):
            continue
        system.append((list(r), 1))
    return cones.fm_solve(system, dim) is not None


def from_classical(cone_list, dim) -> FanSpace:
    """Fan from a classical fan given by the ray lists of its maximal cones.

    Each cone contributes the chart Spec of the dual monoid; charts glue
    along the localizations matching the shared faces.
    """
    cone_list = [[tuple(int(x) for x in r) for r in rays] for rays in cone_list]
    charts = []
    for rays in cone_list:
        ineq_rows = sorted({tuple(r) for r in rays})
        gens = cones.lattice_monoid_generators(list(ineq_rows), dim)
        chart = EmbeddedMonoid(AbelianGroup(dim), gens)
        chart._saturated_hint = True
        charts.append(chart)
    gluings = []
    for i, j in combinations(range(len(cone_list)), 2):
        ineqs_i = cones.cone_inequalities(cone_list[i], dim) if cone_list[i] else []
        ineqs_j = cones.cone_inequalities(cone_list[j], dim) if cone_list[j] else []
        inter = cones.cone_generators(list(ineqs_i) + list(ineqs_j), dim)
        if not _is_face_of_cone(inter, cone_list[i], dim) or \
                not _is_face_of_cone(inter, cone_list[j], dim):
            raise FanError("cones %d and %d do not meet in a common face" % (i, j))

        def face_indices(chart, rays_of_face):
            return tuple(k for k, gen in enumerate(chart.gens)
                         if all(sum(a * b for a, b in
                                    zip(chart.ambient.free_part(gen), r)) == 0
                                for r in rays_of_face))

        fi = face_indices(charts[i], cone_list[i])
        fi_inter = tuple(k for k, gen in enumerate(charts[i].gens)
                         if all(sum(a * b for a, b in
                                    zip(charts[i].ambient.free_part(gen), r)) == 0
                                for r in inter))
        fj_inter = tuple(k for k, gen in enumerate(charts[j].gens)
                         if all(sum(a * b for a, b in
                                    zip(charts[j].ambient.free_part(gen), r)) == 0
                                for r in inter))
        gluings.append(Gluing(i, j, fi_inter, fj_inter, None))
    return glue(charts, gluings).space


def proj_space(n: int) -> FanSpace:
    """The fan P^n = Proj(N^{n+1}) with the coordinate-sum grading."""
    from .projblow import GradedMonoid, proj

    if n < 0:
        raise FanError("projective space needs n >= 0")
    amb = AbelianGroup(n + 1)
    gens = [[1 if i == j else 0 for j in range(n + 1)] for i in range(n + 1)]
    m = EmbeddedMonoid(amb, gens)
    return proj(GradedMonoid(m, [1] * (n + 1)))


def sharpen_fan(x: FanSpace) -> FanSpace:
    """Same points, stalks replaced by their sharpenings."""
    stalks = []
    projs = []
    for s in x.stalks:
        sh, pr = s.sharpen()
        stalks.append(sh)
        projs.append(pr)
    gen_maps = {}
    for (i, j), h in x.gen_maps.items():
        gm = induced_hom(h.group_map, projs[i].group_map, projs[j].group_map)
        gen_maps[(i, j)] = MonoidHom(stalks[i], stalks[j], gm, check=False)
    return FanSpace(stalks, x.leq, gen_maps, x.labels, check=False)


# -- strictness -----------------------------------------------------------------------


def is_strict(m: FanMap) -> bool:
    """Strict iff every sharpened stalk map is an isomorphism; cross-checked
    against the locally-an-isomorphism characterization."""
    strict = all(h.is_strict() for h in m.stalk_maps)
    local_iso = is_local_iso(m)
    if strict != local_iso:
        raise FanError("strictness characterizations disagree")
    return strict


def is_local_iso(m: FanMap) -> bool:
    for x in range(m.source.npoints):
        up_x = m.source.up_set(x)
        fx = m.point_map[x]
        up_fx = m.target.up_set(fx)
        img = [m.point_map[z] for z in up_x]
        if sorted(img) != sorted(up_fx) or len(set(img)) != len(img):
            return False
        for z in up_x:
            if not m.stalk_maps[z].is_monoid_iso():
                return False
        for a in up_x:
            for b in up_x:
                if m.source.le(a, b) != m.target.le(m.point_map[a], m.point_map[b]):
                    return False
    return True


# -- isomorphism of fans ----------------------------------------------------------------


def _stalks_equivalent(a: EmbeddedMonoid, b: EmbeddedMonoid) -> bool:
    if a.ambient == b.ambient and a.same_submonoid(b):
        return True
    try:
        return are_isomorphic(a, b)
    except MonoidError:
        return False


def fan_isomorphic(x: FanSpace, y: FanSpace) -> bool:
    """Isomorphism of fan spaces (poset isomorphism with isomorphic stalks)."""
    if x.npoints != y.npoints:
        return False

    def profile(s: FanSpace, i):
        return (len(s.up_set(i)), len(s.down_set(i)),
                s.stalks[i].span.group, len(s.stalks[i].face_index_sets))

    xs = list(range(x.npoints))

    def backtrack(k, assignment, used):
        if k == len(xs):
            return True
        i = xs[k]
        for j in range(y.npoints):
            if j in used or profile(x, i) != profile(y, j):
                continue
            ok = True
            for i2, j2 in assignment.items():
                if x.le(i, i2) != y.le(j, j2) or x.le(i2, i) != y.le(j2, j):
                    ok = False
                    break
            if not ok:
                continue
            if not _stalks_equivalent(x.stalks[i], y.stalks[j]):
                continue
            assignment[i] = j
            used.add(j)
            if backtrack(k + 1, assignment, used):
                return True
            del assignment[i]
            used.discard(j)
        return False

    return backtrack(0, {}, set())


def fan_isomorphic_over(f1: FanMap, f2: FanMap) -> bool:
    """Isomorphism of f1.source with f2.source over their common target.

    Requires both maps to be group isomorphisms of fans; the stalk
    comparison at matched points is then forced by the structure maps.
    """
    if f1.target is not f2.target and f1.target != f2.target:
        return False
    x, y = f1.source, f2.source
    if x.npoints != y.npoints:
        return False
    if not (f1.is_group_iso_of_fans() and f2.is_group_iso_of_fans()):
        raise FanError("base comparison needs group isomorphisms of fans")

    def stalk_match(i, j):
        if f1.point_map[i] != f2.point_map[j]:
            return False
        s1 = f1.stalk_maps[i].span_map
        s2 = f2.stalk_maps[j].span_map
        phi = s1.compose(s2.inverse())  # span(stalk_y j) -> span(stalk_x i)
        sx = x.stalks[i]
        sy = y.stalks[j]
        for g in sy.gens:
            w = sy.span.coords(g)
            img = sx.span.inclusion(phi(w))
            if not sx.contains(img):
                return False
        for g in sx.gens:
            w = phi.preimage(sx.span.coords(g))
            if w is None or not sy.contains(sy.span.inclusion(w)):
                return False
        return True

    def backtrack(k, assignment, used):
        if k == x.npoints:
            return True
        i = k
        for j in range(y.npoints):
            if j in used:
                continue
            ok = all(x.le(i, i2) == y.le(j, j2) and x.le(i2, i) == y.le(j2, j)
                     for i2, j2 in assignment.items())
            if not ok or not stalk_match(i, j):
                continue
            assignment[i] = j
            used.add(j)
            if backtrack(k + 1, assignment, used):
                return True
            del assignment[i]
            used.discard(j)
        return False

    return backtrack(0, {}, set())
