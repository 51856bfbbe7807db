"""Desingularization of fs fans by explicit star subdivision.

The output contract: a free fs fan, a map to the input that is a group
isomorphism of fans (hence a refinement), and an isomorphism over the free
locus.  The algorithm is the classical toric one: per singular chart,
dualize the sharpened stalk to a pointed cone, simplicialize by stars at
the existing rays, then star-subdivide at fundamental-parallelepiped points
until every cone is unimodular.  No functoriality is claimed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional

from . import cones
from .lattice import GroupHom, IntMatrix, diagonal, smith_normal_form
from .monoid import EmbeddedMonoid, MonoidError, MonoidHom, MonoidIdeal
from .fanspace import FanError, FanMap, FanSpace, fan_isomorphic_over

STEP_CAP = 20000


class ResolveError(FanError):
    pass


def free_locus(x: FanSpace) -> list[int]:
    """Points whose sharpened stalk is free; always open (up-closed)."""
    out = [i for i in range(x.npoints) if x.stalks[i].is_free()]
    for i in out:
        for j in x.up_set(i):
            if j not in out:
                raise ResolveError("free locus is not open")
    return out


@dataclass(frozen=True)
class ResolutionStep:
    chart_label: str
    kind: str  # "simplicialize" | "subdivide"
    ray: tuple
    blowup_ideal: Optional[tuple] = None


@dataclass
class ResolutionCertificate:
    input: FanSpace
    output: FanSpace
    map: FanMap
    steps: tuple
    free_locus_pairs: tuple  # (input point, output point) over the free locus


# -- exact cone helpers (all in Z^dim) ------------------------------------------


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


from functools import lru_cache


@lru_cache(maxsize=None)
def _canonical_cached(rays, dim):
    ineqs = cones.cone_inequalities(list(rays), dim)
    ext = cones.cone_generators(ineqs, dim)
    return tuple(sorted(ext))


def _canonical_cone(rays, dim):
    """Canonical key: sorted primitive extreme rays of cone(rays)."""
    rays = tuple(sorted({tuple(r) for r in rays if any(r)}))
    if not rays:
        return ()
    return _canonical_cached(rays, dim)


@lru_cache(maxsize=None)
def _cone_ineqs(key, dim):
    if not key:
        rows = []
        for i in range(dim):
            e = [0] * dim
            e[i] = 1
            rows.append(tuple(e))
            rows.append(tuple(-x for x in e))
        return tuple(rows)
    return tuple(cones.cone_inequalities(list(key), dim))


def _contains(key, dim, v) -> bool:
    return cones.cone_contains(_cone_ineqs(key, dim), v)


def _star(maxcones, v, dim):
    """Star subdivision of the fan of maximal cones at the ray through v."""
    new = set()
    for key in maxcones:
        ineqs = _cone_ineqs(key, dim)
        if not cones.cone_contains(ineqs, v):
            new.add(key)
            continue
        for d in ineqs:
            if _dot(d, v) == 0:
                continue
            facet = [r for r in key if _dot(d, r) == 0]
            new.add(_canonical_cone(list(facet) + [tuple(v)], dim))
    return new


@lru_cache(maxsize=None)
def _multiplicity(key, dim) -> int:
    if not key:
        return 1
    m = IntMatrix.from_cols(list(key), nrows=dim)
    dia = [d for d in diagonal(smith_normal_form(m)[1]) if d != 0]
    out = 1
    for d in dia:
        out *= d
    return out


def _rational_solve(cols, target):
    """Solve sum l_i cols_i = target over Q; None if inconsistent."""
    k = len(cols)
    n = len(target)
    a = [[Fraction(cols[j][i]) for j in range(k)] + [Fraction(target[i])]
         for i in range(n)]
    piv_rows = []
    row = 0
    for col in range(k):
        piv = next((r for r in range(row, n) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        for r in range(n):
            if r != row and a[r][col] != 0:
                f = a[r][col] / a[row][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        piv_rows.append((row, col))
        row += 1
    sol = [Fraction(0)] * k
    for r, c in piv_rows:
        sol[c] = a[r][k] / a[r][c]
    for r in range(n):
        if all(a[r][j] == 0 for j in range(k)) and a[r][k] != 0:
            return None
    for i in range(n):
        if sum(Fraction(cols[j][i]) * sol[j] for j in range(k)) != target[i]:
            return None
    return sol


def _parallelepiped_points(key, dim):
    """Nonzero lattice points of {sum l_i r_i : 0 <= l_i < 1}."""
    rays = list(key)
    lo = [sum(min(0, r[c]) for r in rays) for c in range(dim)]
    hi = [sum(max(0, r[c]) for r in rays) for c in range(dim)]
    from itertools import product

    out = []
    for cand in product(*[range(lo[c], hi[c] + 1) for c in range(dim)]):
        if not any(cand):
            continue
        lam = _rational_solve(rays, cand)
        if lam is None:
            continue
        if all(0 <= l < 1 for l in lam):
            out.append(tuple(cand))
    return out


def _classical_resolve(rays0, dim):
    """Smooth subdivision of cone(rays0): returns (maximal cones, steps)."""
    start = _canonical_cone(rays0, dim)
    maxcones = {start}
    steps = []
    budget = 0
    for v in sorted(start):
        before = set(maxcones)
        maxcones = _star(maxcones, v, dim)
        if maxcones != before:
            steps.append(("simplicialize", v))
    for key in maxcones:
        if len(key) != dim:
            raise ResolveError("simplicialization pass failed")
    while True:
        bad = sorted(k for k in maxcones if _multiplicity(k, dim) > 1)
        if not bad:
            break
        key = bad[0]
        pts = _parallelepiped_points(key, dim)
        if not pts:
            raise ResolveError("multiple cone without parallelepiped points")
        v = min(pts, key=lambda p: (sum(p), p))
        maxcones = _star(maxcones, v, dim)
        steps.append(("subdivide", v))
        budget += 1
        if budget > STEP_CAP:
            raise ResolveError("subdivision step cap exceeded")
    return maxcones, steps


def _all_faces(maxcones, dim):
    faces = set()
    for key in maxcones:
        ineqs = _cone_ineqs(key, dim)
        for size in range(len(ineqs) + 1):
            for subset in combinations(ineqs, size):
                rays = [r for r in key if all(_dot(d, r) == 0 for d in subset)]
                faces.add(_canonical_cone(rays, dim))
    faces.add(())
    return faces


def _cone_subset(a, b, dim) -> bool:
    """cone(a) ⊆ cone(b) for canonical keys."""
    ineqs = _cone_ineqs(b, dim)
    return all(cones.cone_contains(ineqs, r) for r in a) if a else True


# -- the fan-level algorithm -------------------------------------------------------


class _ChartData:
    """Dual-cone bookkeeping for one closed point of the input fan."""

    def __init__(self, x: FanSpace, c: int):
        self.c = c
        self.stalk = x.stalks[c]
        self.sharp, self.proj = self.stalk.sharpen()
        sp = self.sharp.span
        if sp.group.torsion:
            raise ResolveError("fs stalk has torsion in its sharpened span")
        self.dim = sp.group.rank
        self.span = sp
        rows = sorted({tuple(sp.coords(g)) for g in self.sharp.gens})
        self.sigma_ineqs = [r for r in rows if any(r)]
        self.sigma = _canonical_cone(
            cones.cone_generators(self.sigma_ineqs, self.dim), self.dim) \
            if self.dim else ()
        # faces of sigma matched to the generizations of c
        self.psi = {}
        for w in x.up_set(c):
            f = x.pullback_face(c, w)
            extra = []
            for idx in f.indices:
                img = self.proj.group_map(self.stalk.gens[idx])
                if self.sharp.ambient.is_zero(img):
                    continue
                coords = sp.coords(img)
                extra.append(tuple(coords))
                extra.append(tuple(-v for v in coords))
            rays = cones.cone_generators(self.sigma_ineqs + extra, self.dim) \
                if self.dim else []
            self.psi[w] = _canonical_cone(rays, self.dim)

    def dual_stalk(self, key) -> EmbeddedMonoid:
        """Pull the dual monoid of a cone back to the unsharpened chart."""
        rows = [tuple(r) for r in key]
        mgens = cones.lattice_monoid_generators(rows, self.dim) if self.dim else []
        amb = self.stalk.ambient
        lifts = []
        for v in mgens:
            el = self.span.inclusion(tuple(v) + (0,) * len(self.span.group.torsion))
            lift = self.proj.group_map.preimage(el)
            if lift is None:
                raise ResolveError("cannot lift a dual generator")
            lifts.append(lift)
        units = self.stalk.units()
        for g in units.group.gens():
            lifts.append(units.inclusion(g))
            lifts.append(amb.neg(units.inclusion(g)))
        out = EmbeddedMonoid(amb, lifts)
        out._saturated_hint = True
        return out

    def carrier(self, key, x: FanSpace):
        """The input point whose sigma-face is smallest containing cone(key)."""
        cands = [w for w, psi in self.psi.items()
                 if _cone_subset(key, psi, self.dim)]
        best = None
        for w in cands:
            if best is None or _cone_subset(self.psi[w], self.psi[best], self.dim):
                best = w
        if best is None:
            raise ResolveError("no carrier face found")
        return best


def resolve_fan(x: FanSpace) -> ResolutionCertificate:
    """Resolve an fs fan to a free fs fan by star subdivisions."""
    for c in x.closed_points():
        if not x.stalks[c].is_saturated:
            raise ResolveError("input fan is not fs")
    singular = [i for i in range(x.npoints) if not x.stalks[i].is_free()]
    if not singular:
        return ResolutionCertificate(
            input=x, output=x, map=FanMap.identity(x), steps=(),
            free_locus_pairs=tuple((i, i) for i in range(x.npoints)))
    closed = x.closed_points()
    for y in singular:
        owners = [c for c in closed if x.le(c, y)]
        if len(owners) != 1:
            raise ResolveError(
                "singular point %d lies in several charts; this resolver only "
                "handles singular loci with a unique closed specialization" % y)
    charts = {c: _ChartData(x, c) for c in closed}
    subdivided = {}
    steps = []
    for c in closed:
        cd = charts[c]
        needs = any(not x.stalks[w].is_free() for w in x.up_set(c))
        if not needs:
            subdivided[c] = ({cd.sigma}, [])
            continue
        maxcones, chart_steps = _classical_resolve(list(cd.sigma), cd.dim)
        subdivided[c] = (maxcones, chart_steps)
        for kind, v in chart_steps:
            steps.append(ResolutionStep(x.labels[c], kind, tuple(v)))
    # which original points survive
    faces_of = {c: _all_faces(subdivided[c][0], charts[c].dim) for c in closed}
    survives = []
    for w in range(x.npoints):
        ok = True
        for c in closed:
            if x.le(c, w) and charts[c].psi[w] not in faces_of[c]:
                ok = False
                break
        survives.append(ok)
    old_points = [w for w in range(x.npoints) if survives[w]]
    old_index = {w: k for k, w in enumerate(old_points)}
    new_points = []  # (c, key)
    for c in closed:
        cd = charts[c]
        originals = {cd.psi[w] for w in x.up_set(c) if survives[w]}
        for key in sorted(faces_of[c]):
            if key not in originals:
                new_points.append((c, key))
    npts = len(old_points) + len(new_points)
    stalks = [x.stalks[w] for w in old_points]
    labels = [x.labels[w] for w in old_points]
    for c, key in new_points:
        stalks.append(charts[c].dual_stalk(key))
        labels.append("%s/r%d" % (x.labels[c], len(labels)))
    leq = set()
    gen_maps = {}
    for w in old_points:
        for w2 in old_points:
            if x.le(w, w2):
                leq.add((old_index[w], old_index[w2]))
                if w != w2:
                    gen_maps[(old_index[w], old_index[w2])] = x.gen_map(w, w2)
    for a_idx, (c, key) in enumerate(new_points):
        ia = len(old_points) + a_idx
        cd = charts[c]
        # new <= new within the chart
        for b_idx, (c2, key2) in enumerate(new_points):
            if c2 != c:
                continue
            ib = len(old_points) + b_idx
            if _cone_subset(key2, key, cd.dim):
                leq.add((ia, ib))
                if ia != ib:
                    gen_maps[(ia, ib)] = MonoidHom(
                        stalks[ia], stalks[ib],
                        GroupHom.identity(stalks[ia].ambient), check=False)
        # new <= old
        for w in x.up_set(c):
            if not survives[w]:
                continue
            if _cone_subset(cd.psi[w], key, cd.dim):
                ib = old_index[w]
                leq.add((ia, ib))
                gm = x.gen_map(c, w).group_map if w != c else \
                    GroupHom.identity(x.stalks[c].ambient)
                gen_maps[(ia, ib)] = MonoidHom(stalks[ia], stalks[ib], gm, check=False)
    y = FanSpace(stalks, leq, gen_maps, labels)
    # the structure map down to x
    pm = []
    sm = []
    for k in range(npts):
        if k < len(old_points):
            w = old_points[k]
            pm.append(w)
            sm.append(MonoidHom(x.stalks[w], y.stalks[k],
                                GroupHom.identity(x.stalks[w].ambient), check=False))
        else:
            c, key = new_points[k - len(old_points)]
            cd = charts[c]
            w = cd.carrier(key, x)
            pm.append(w)
            if w == c:
                gm = GroupHom.identity(x.stalks[c].ambient)
            else:
                gm = x.gen_map(c, w).group_map.inverse()
            sm.append(MonoidHom(x.stalks[w], y.stalks[k], gm, check=True))
    fmap = FanMap(y, x, pm, sm)
    pairs = tuple((w, old_index[w]) for w in free_locus(x))
    steps = tuple(_attach_blowup_ideals(x, steps, fmap))
    return ResolutionCertificate(input=x, output=y, map=fmap, steps=steps,
                                 free_locus_pairs=pairs)


def _attach_blowup_ideals(x: FanSpace, steps, fmap) -> list:
    """For a single interior star subdivision, search for a monomial ideal
    whose blowup matches; record it when found, omit otherwise."""
    if len(steps) != 1 or steps[0].kind != "subdivide":
        return list(steps)
    step = steps[0]
    c = x.labels.index(step.chart_label)
    stalk = x.stalks[c]
    if len(x.closed_points()) != 1:
        return list(steps)
    from .projblow import blowup

    sharp, proj = stalk.sharpen()
    sp = sharp.span
    v = step.ray
    # bounded search only: skip wide charts where enumeration gets large
    if len(sharp.gens) > 3 or sp.group.rank > 2:
        return list(steps)
    try:
        pool = sharp.elements_up_to_level(3 * max(
            sharp._level(g) for g in sharp.gens))
        if len(pool) > 80:
            return list(steps)
    except MonoidError:
        return list(steps)
    for m in (1, 2, 3):
        cand_sharp = [e for e in pool if _dot(sp.coords(e), v) >= m and any(e)]
        if not cand_sharp:
            continue
        lifts = []
        for e in cand_sharp:
            lift = proj.group_map.preimage(e)
            if lift is not None:
                lifts.append(lift)
        ideal = MonoidIdeal(stalk, lifts)
        try:
            bl = blowup(stalk, ideal)
        except (MonoidError, FanError):
            continue
        base = bl.target
        # rebase fmap onto spec(stalk) for comparison
        try:
            rebased = _rebase_to_spec(fmap, c)
        except FanError:
            return list(steps)
        if rebased is not None and fan_isomorphic_over(bl, rebased):
            return [ResolutionStep(step.chart_label, step.kind, step.ray,
                                   tuple(ideal.gens))]
    return list(steps)


def _rebase_to_spec(fmap: FanMap, c: int):
    """Express a map to an affine fan as a map to spec(stalk_c)."""
    from .fanspace import spec

    x = fmap.target
    base = spec(x.stalks[c])
    sets = x.stalks[c].face_index_sets
    trans = {}
    for j in x.up_set(c):
        t = x.pullback_face(c, j).indices
        trans[j] = sets.index(t)
    if len(trans) != x.npoints:
        return None
    pm = [trans[fmap.point_map[i]] for i in range(fmap.source.npoints)]
    sm = []
    for i in range(fmap.source.npoints):
        j = fmap.point_map[i]
        gm = fmap.stalk_maps[i].group_map
        if j != c:
            gm = gm.compose(x.gen_map(c, j).group_map.inverse())
        sm.append(MonoidHom(base.stalks[trans[j]], fmap.source.stalks[i],
                            gm, check=True))
    return FanMap(fmap.source, base, pm, sm)


def verify_certificate(cert: ResolutionCertificate) -> bool:
    """Re-check freeness, the free-locus isomorphism, and the group-iso
    property of every stalk map, from scratch."""
    try:
        y, x, f = cert.output, cert.input, cert.map
        for st in y.stalks:
            if not st.is_free():
                return False
        for h in f.stalk_maps:
            if not h.is_group_iso():
                return False
        free = set(free_locus(x))
        over = [i for i in range(y.npoints) if f.point_map[i] in free]
        image = [f.point_map[i] for i in over]
        if sorted(image) != sorted(free) or len(set(image)) != len(image):
            return False
        for i in over:
            for j in over:
                if y.le(i, j) != x.le(f.point_map[i], f.point_map[j]):
                    return False
            if not f.stalk_maps[i].is_monoid_iso():
                return False
        return True
    except (MonoidError, FanError):
        return False
