"""Fine monoids embedded in finitely generated abelian groups.

An EmbeddedMonoid is the submonoid of an ambient group generated by a
finite list of elements; it is integral by construction.  All the first
chapter constructions live here: units, sharpening, faces, localization,
quotients, saturation, irreducibles, freeness, morphism predicates,
pushouts and monoid ideals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations_with_replacement
from math import ceil
from typing import Optional, Sequence

from . import cones
from .lattice import (
    AbelianGroup,
    GroupHom,
    IntMatrix,
    Subgroup,
    Vec,
    hom_profile,
    induced_hom,
    quotient_with_projection,
)


class MonoidError(Exception):
    pass


# Derived data shared between equal monoid values (same ambient and
# generator tuple): spans, cone inequalities, face lattices, sharpenings.
_DERIVED_CACHE: dict = {}


def _derived_slot(m: "EmbeddedMonoid") -> dict:
    key = (m.ambient, m.gens)
    slot = _DERIVED_CACHE.get(key)
    if slot is None:
        slot = _DERIVED_CACHE[key] = {}
    return slot


class InconclusiveError(MonoidError):
    """A bounded search ran out of budget without a definite answer."""


class EmbeddedMonoid:
    """Submonoid of `ambient` generated by `gens` (integral by construction).

    Generators are kept in the declared ambient coordinates; duplicates and
    zero generators are dropped, torsion coordinates are reduced.  The
    groupification P^gp is the subgroup spanned by the generators and is
    available as `.span`.
    """

    def __init__(self, ambient: AbelianGroup, gens: Sequence[Sequence[int]]):
        self.ambient = ambient
        seen = set()
        out = []
        for g in gens:
            g = ambient.reduce(g)
            if ambient.is_zero(g) or g in seen:
                continue
            seen.add(g)
            out.append(g)
        self.gens = tuple(out)
        self._saturated_hint = False  # set by constructions that guarantee it

    def _known_saturated(self) -> bool:
        return self._saturated_hint or self.__dict__.get("is_saturated", False)

    # -- basic structure ---------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, EmbeddedMonoid) and self.ambient == other.ambient
                and self.gens == other.gens)

    def __hash__(self):
        return hash((self.ambient, self.gens))

    def __repr__(self):
        return "EmbeddedMonoid(%s, %r)" % (self.ambient.describe(), [list(g) for g in self.gens])

    @cached_property
    def span(self) -> Subgroup:
        """The groupification P^gp as a subgroup of the ambient group."""
        slot = _derived_slot(self)
        if "span" not in slot:
            slot["span"] = Subgroup(self.ambient, list(self.gens))
        return slot["span"]

    def free_parts(self) -> list[Vec]:
        return [self.ambient.free_part(g) for g in self.gens]

    @cached_property
    def cone_ineqs(self):
        slot = _derived_slot(self)
        if "cone_ineqs" not in slot:
            slot["cone_ineqs"] = cones.cone_inequalities(
                self.free_parts(), self.ambient.rank)
        return slot["cone_ineqs"]

    @cached_property
    def unit_gen_indices(self) -> tuple[int, ...]:
        """Indices of generators that are units of the monoid.

        A generator is a unit iff its free part lies in the lineality space
        of the cone of the free parts (pure torsion generators always are).
        """
        k = len(self.gens)
        if k == 0:
            return ()
        vs = self.free_parts()
        ineqs = self.cone_ineqs
        out = []
        for j in range(k):
            if not any(vs[j]):
                out.append(j)
            elif all(dot(row, vs[j]) == 0 for row in ineqs):
                out.append(j)
        return tuple(out)

    def units(self) -> Subgroup:
        """P* = P ∩ (-P), as a subgroup of the ambient with inclusion."""
        return Subgroup(self.ambient, [self.gens[j] for j in self.unit_gen_indices])

    @cached_property
    def is_sharp(self) -> bool:
        return not self.unit_gen_indices

    def is_group(self) -> bool:
        return len(self.unit_gen_indices) == len(self.gens)

    def is_trivial(self) -> bool:
        return not self.gens

    # -- membership ---------------------------------------------------------

    @cached_property
    def _grading(self):
        """Integer grading with value >= 1 on all generators.

        Only exists for sharp monoids (pointed cone); scaled from a rational
        Fourier-Motzkin solution so that level arithmetic stays on ints."""
        slot = _derived_slot(self)
        if "grading" not in slot:
            lam = cones.positive_grading(self.free_parts(), self.ambient.rank)
            if lam is None:
                slot["grading"] = None
            else:
                from math import lcm

                denom = 1
                for l in lam:
                    denom = lcm(denom, Fraction(l).denominator)
                slot["grading"] = tuple(int(l * denom) for l in lam)
        if slot["grading"] is None:
            raise MonoidError("no positive grading: monoid is not sharp")
        return slot["grading"]

    def _level(self, a) -> int:
        lam = self._grading
        return sum(l * x for l, x in zip(lam, self.ambient.free_part(a)))

    def contains(self, a) -> bool:
        # saturated monoids admit a direct test: inside the span with the
        # free part in the cone (no search needed)
        if self._known_saturated():
            a = self.ambient.reduce(a)
            if self.ambient.is_zero(a):
                return True
            if not cones.cone_contains(self.cone_ineqs, self.ambient.free_part(a)):
                return False
            return self.span.coords(a) is not None
        return self.membership_witness(a) is not None

    def membership_witness(self, a, node_cap=200000) -> Optional[tuple[int, ...]]:
        """Coefficients n with sum n_i gens_i = a, or None if a is not in P."""
        a = self.ambient.reduce(a)
        k = len(self.gens)
        zero_w = (0,) * k
        if self.ambient.is_zero(a):
            return zero_w
        if k == 0:
            return None
        if self.is_sharp:
            target = self._level(a)
            if target < 0:
                return None
            amb = self.ambient
            frontier = {amb.zero(): zero_w}
            visited = dict(frontier)
            while frontier:
                new = {}
                for x, w in frontier.items():
                    lx = self._level(x)
                    for i, g in enumerate(self.gens):
                        if lx + self._level(g) > target:
                            continue
                        y = amb.add(x, g)
                        if y in visited or y in new:
                            continue
                        wy = tuple(c + (1 if j == i else 0) for j, c in enumerate(w))
                        if y == a:
                            return wy
                        new[y] = wy
                visited.update(new)
                frontier = new
            return None
        # split off the units: a in P iff its class lies in the sharpening
        sharp, proj = self.sharpen()
        abar = proj.group_map(a)
        wbar = sharp.membership_witness(abar)
        if wbar is None:
            return None
        # lift: a = sum of chosen non-unit generators + a unit
        lift = self.ambient.zero()
        w = [0] * k
        for idx, c in zip(self._sharp_gen_origin, wbar):
            w[idx] += c
            lift = self.ambient.add(lift, self.ambient.scale(c, self.gens[idx]))
        rem = self.ambient.sub(a, lift)
        wu = self._unit_witness(rem, node_cap=node_cap)
        if wu is None:
            return None
        for idx, c in zip(self.unit_gen_indices, wu):
            w[idx] += c
        return tuple(w)

    def _unit_witness(self, u, node_cap=200000):
        """N-combination of the unit generators equal to u (u must be a unit).

        Solves over Z first, then clears negative coefficients through
        paired inverse generators or cached inverse witnesses."""
        ugens = [self.gens[j] for j in self.unit_gen_indices]
        amb = self.ambient
        u = amb.reduce(u)
        k = len(ugens)
        start = (0,) * k
        if amb.is_zero(u):
            return start
        if k == 0:
            return None
        # integer combination in terms of the ugens list
        from .lattice import IntMatrix, LinearSystem

        slot = _derived_slot(self)
        if "unit_solver" not in slot:
            mat = IntMatrix.from_cols(ugens, nrows=amb.ngens)
            rel = amb.relation_matrix()
            aug = IntMatrix.from_cols(
                [mat.col(j) for j in range(k)] + [rel.col(j) for j in range(rel.cols)],
                nrows=amb.ngens)
            slot["unit_solver"] = LinearSystem(aug)
        sol = slot["unit_solver"].solve(u)
        if sol is None:
            return None
        a = list(sol[:k])
        index_of = {g: i for i, g in enumerate(ugens)}
        neg_witness = slot.setdefault("neg_unit_witness", {})
        w = [0] * k
        for j, c in enumerate(a):
            if c >= 0:
                w[j] += c
                continue
            inv = index_of.get(amb.neg(ugens[j]))
            if inv is not None:
                w[inv] += -c
                continue
            if j not in neg_witness:
                neg_witness[j] = self._unit_bfs(amb.neg(ugens[j]), ugens, node_cap)
                if neg_witness[j] is None:
                    raise InconclusiveError("could not invert a unit generator")
            for i, m in enumerate(neg_witness[j]):
                w[i] += -c * m
        return tuple(w)

    def _unit_bfs(self, u, ugens, node_cap):
        amb = self.ambient
        start = (0,) * len(ugens)
        frontier = {amb.zero(): start}
        visited = set(frontier)
        count = 0
        while frontier:
            new = {}
            for x, w in frontier.items():
                for i, g in enumerate(ugens):
                    y = amb.add(x, g)
                    if y in visited:
                        continue
                    wy = tuple(c + (1 if j == i else 0) for j, c in enumerate(w))
                    if y == u:
                        return wy
                    visited.add(y)
                    new[y] = wy
                    count += 1
                    if count > node_cap:
                        raise InconclusiveError("unit witness search exceeded node cap")
            frontier = new
        return None

    def elements_up_to_level(self, level) -> dict:
        """All elements with grading value <= level (sharp monoids only)."""
        if not self.is_sharp:
            raise MonoidError("level enumeration needs a sharp monoid")
        amb = self.ambient
        out = {amb.zero(): (0,) * len(self.gens)}
        frontier = dict(out)
        while frontier:
            new = {}
            for x, w in frontier.items():
                for i, g in enumerate(self.gens):
                    y = amb.add(x, g)
                    if y in out or y in new:
                        continue
                    if self._level(y) > level:
                        continue
                    new[y] = tuple(c + (1 if j == i else 0) for j, c in enumerate(w))
            out.update(new)
            frontier = new
        return out

    # -- sharpening ----------------------------------------------------------

    @cached_property
    def _sharpening(self):
        slot = _derived_slot(self)
        if "sharpening" in slot:
            return slot["sharpening"]
        ugens = [self.gens[j] for j in self.unit_gen_indices]
        q, proj = quotient_with_projection(self.ambient, ugens)
        images = [proj(g) for g in self.gens]
        sharp = EmbeddedMonoid(q, images)
        sharp._saturated_hint = self._known_saturated()
        origin = []  # for each generator of the sharpening, an original index
        for h in sharp.gens:
            for idx, img in enumerate(images):
                if img == h:
                    origin.append(idx)
                    break
        slot["sharpening"] = (sharp, proj, tuple(origin))
        return slot["sharpening"]

    @property
    def _sharp_gen_origin(self):
        return self._sharpening[2]

    def sharpen(self):
        """(P/P*, projection hom).  The result has trivial units."""
        sharp, proj, _ = self._sharpening
        return sharp, MonoidHom(self, sharp, proj, check=False)

    # -- faces ----------------------------------------------------------------

    @cached_property
    def face_index_sets(self) -> tuple[tuple[int, ...], ...]:
        """All faces, each as the sorted tuple of generator indices it contains."""
        slot = _derived_slot(self)
        if "faces" in slot:
            return slot["faces"]
        vs = self.free_parts()
        k = len(self.gens)
        normals = self.cone_ineqs
        found = set()
        nn = len(normals)
        for size in range(nn + 1):
            for subset in combinations_from(normals, size):
                t = tuple(i for i in range(k)
                          if all(dot(row, vs[i]) == 0 for row in subset))
                found.add(t)
        slot["faces"] = tuple(sorted(found, key=lambda t: (len(t), t)))
        return slot["faces"]

    def faces(self) -> list["Face"]:
        return [Face(self, t) for t in self.face_index_sets]

    def face_from_indices(self, indices) -> "Face":
        t = tuple(sorted(set(indices)))
        if t not in set(self.face_index_sets):
            raise MonoidError("index set %r is not a face" % (list(indices),))
        return Face(self, t)

    def smallest_face_containing(self, a) -> "Face":
        """The smallest face whose monoid contains the element a of P."""
        best = None
        for f in self.faces():
            if f.monoid.contains(a) or (not f.indices and self.ambient.is_zero(a)):
                if best is None or len(f.indices) < len(best.indices):
                    best = f
        if best is None:
            raise MonoidError("element not in the monoid")
        return best

    def localize(self, face: "Face"):
        """(F^-1 P in the same ambient, localization hom)."""
        if face.parent is not self and face.parent != self:
            raise MonoidError("face of a different monoid")
        gens = list(self.gens) + [self.ambient.neg(self.gens[i]) for i in face.indices]
        loc = EmbeddedMonoid(self.ambient, gens)
        loc._saturated_hint = self._known_saturated()
        return loc, MonoidHom(self, loc, GroupHom.identity(self.ambient), check=False)

    def quotient_by_face(self, face: "Face"):
        """(P/F, sharp, embedded in ambient/<F>^gp; projection hom)."""
        if face.parent is not self and face.parent != self:
            raise MonoidError("face of a different monoid")
        fgens = [self.gens[i] for i in face.indices]
        fgens += [self.gens[j] for j in self.unit_gen_indices]
        q, proj = quotient_with_projection(self.ambient, fgens)
        out = EmbeddedMonoid(q, [proj(g) for g in self.gens])
        out._saturated_hint = self._known_saturated()
        return out, MonoidHom(self, out, proj, check=False)

    # -- saturation -----------------------------------------------------------

    def saturate(self):
        """Saturation in the declared ambient group, with inclusion hom.

        Computed as (cone of the free parts ∩ lattice) ⊕ ambient torsion; the
        pointed part is a Hilbert basis obtained by zonotope enumeration.
        """
        dim = self.ambient.rank
        ntors = len(self.ambient.torsion)
        free_gens = cones.lattice_monoid_generators(self.cone_ineqs, dim) if dim else []
        gens = [tuple(v) + (0,) * ntors for v in free_gens]
        for i in range(ntors):
            t = [0] * (dim + ntors)
            t[dim + i] = 1
            gens.append(tuple(t))
        sat = EmbeddedMonoid(self.ambient, gens)
        sat._saturated_hint = True
        return sat, MonoidHom(self, sat, GroupHom.identity(self.ambient), check=False)

    @cached_property
    def is_saturated(self) -> bool:
        """Intrinsic saturation test: P = {q in P^gp : nq in P for some n>0}."""
        slot = _derived_slot(self)
        if "is_saturated" in slot:
            return slot["is_saturated"]
        sub = self.span
        inner_gens = [sub.coords(g) for g in self.gens]
        inner = EmbeddedMonoid(sub.group, inner_gens)
        sat, _ = inner.saturate()
        slot["is_saturated"] = all(self.contains(sub.inclusion(g)) for g in sat.gens)
        return slot["is_saturated"]

    def is_fs(self) -> bool:
        return self.is_saturated

    # -- irreducibles and freeness ---------------------------------------------

    def irreducibles(self) -> list[Vec]:
        """The unique minimal generating set of a sharp monoid."""
        if not self.is_sharp:
            raise MonoidError("irreducibles are defined for sharp monoids")
        out = []
        for j, g in enumerate(self.gens):
            red = False
            for i, h in enumerate(self.gens):
                if i != j and self.contains(self.ambient.sub(g, h)):
                    red = True
                    break
            if not red:
                out.append(g)
        return out

    def is_free(self) -> bool:
        """True iff the sharpening is isomorphic to N^r."""
        sharp, _ = self.sharpen()
        sp = sharp.span
        if sp.group.torsion:
            return False
        return len(sharp.irreducibles()) == sp.group.rank

    def same_submonoid(self, other: "EmbeddedMonoid") -> bool:
        """Equality as submonoids of the same ambient group."""
        if self.ambient != other.ambient:
            return False
        return (all(other.contains(g) for g in self.gens)
                and all(self.contains(g) for g in other.gens))

    def minimized_gens(self) -> "EmbeddedMonoid":
        """Same monoid with redundant generators dropped (earlier kept first)."""
        alive = list(self.gens)
        changed = True
        while changed:
            changed = False
            for i, g in enumerate(alive):
                rest = EmbeddedMonoid(self.ambient, alive[:i] + alive[i + 1 :])
                if rest.contains(g):
                    alive.pop(i)
                    changed = True
                    break
        out = EmbeddedMonoid(self.ambient, alive)
        out._saturated_hint = self._known_saturated()
        return out

    def describe(self) -> str:
        gens = " ".join("[%s]" % ",".join(str(x) for x in g) for g in self.gens)
        return "ambient %s, gens %s" % (self.ambient.describe(), gens if gens else "(none)")


def dot(row, v):
    return sum(r * x for r, x in zip(row, v))


def combinations_from(seq, size):
    from itertools import combinations

    return combinations(seq, size)


@dataclass(frozen=True)
class Face:
    """A face of an EmbeddedMonoid, stored by the generator indices in it."""

    parent: EmbeddedMonoid
    indices: tuple[int, ...]

    @property
    def monoid(self) -> EmbeddedMonoid:
        return EmbeddedMonoid(self.parent.ambient,
                              [self.parent.gens[i] for i in self.indices])

    def is_proper(self) -> bool:
        return len(self.indices) < len(self.parent.gens)

    def contains_face(self, other: "Face") -> bool:
        return set(other.indices) <= set(self.indices)


class MonoidHom:
    """Map of embedded monoids, carried by a group hom between the ambients."""

    def __init__(self, domain: EmbeddedMonoid, codomain: EmbeddedMonoid,
                 group_map: GroupHom, check: bool = True):
        if group_map.domain != domain.ambient or group_map.codomain != codomain.ambient:
            raise MonoidError("group map does not match the ambients")
        self.domain = domain
        self.codomain = codomain
        self.group_map = group_map
        if check:
            for g in domain.gens:
                if not codomain.contains(group_map(g)):
                    raise MonoidError("generator image %r is not in the codomain" % (list(g),))

    @classmethod
    def identity(cls, m: EmbeddedMonoid) -> "MonoidHom":
        return cls(m, m, GroupHom.identity(m.ambient), check=False)

    def __call__(self, a) -> Vec:
        return self.group_map(a)

    def compose(self, other: "MonoidHom") -> "MonoidHom":
        """self o other."""
        if other.codomain != self.domain:
            raise MonoidError("homs do not compose")
        return MonoidHom(other.domain, self.codomain,
                         self.group_map.compose(other.group_map), check=False)

    def __eq__(self, other):
        return (isinstance(other, MonoidHom) and self.domain == other.domain
                and self.codomain == other.codomain
                and all(self(g) == other(g) for g in self.domain.gens))

    def __repr__(self):
        return "MonoidHom(%s -> %s)" % (self.domain.describe(), self.codomain.describe())

    @cached_property
    def span_map(self) -> GroupHom:
        """The induced map on groupifications (spans)."""
        dsub, csub = self.domain.span, self.codomain.span
        cols = []
        for w in dsub.group.gens():
            img = csub.coords(self.group_map(dsub.inclusion(w)))
            if img is None:
                raise MonoidError("image does not lie in the codomain span")
            cols.append(img)
        return GroupHom.from_gen_images(dsub.group, csub.group, cols)

    def image_monoid(self) -> EmbeddedMonoid:
        return EmbeddedMonoid(self.codomain.ambient,
                              [self(g) for g in self.domain.gens])

    def is_group_iso(self) -> bool:
        """Does the map induce an isomorphism P^gp -> Q^gp of spans?"""
        return self.span_map.is_isomorphism()

    def is_injective(self) -> bool:
        return self.span_map.is_injective()

    def is_surjective(self) -> bool:
        im = self.image_monoid()
        return all(im.contains(g) for g in self.codomain.gens)

    def is_monoid_iso(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def is_local(self) -> bool:
        """h(m_Q) ⊆ m_P: no non-unit generator maps to a unit."""
        units = set(self.domain.unit_gen_indices)
        for j, g in enumerate(self.domain.gens):
            if j in units:
                continue
            img = self(g)
            if self.codomain.contains(img) and self.codomain.contains(self.codomain.ambient.neg(img)):
                return False
        return True

    def sharpened(self) -> "MonoidHom":
        """The induced map of sharpenings."""
        dsharp, dproj = self.domain.sharpen()
        csharp, cproj = self.codomain.sharpen()
        gm = induced_hom(self.group_map, dproj.group_map, cproj.group_map)
        return MonoidHom(dsharp, csharp, gm, check=False)

    def is_strict(self) -> bool:
        return self.sharpened().is_monoid_iso()


@dataclass(frozen=True)
class HomPredicates:
    local: bool
    strict: bool
    dense: bool
    finite: bool
    saturated_hom: bool
    injective: bool
    surjective: bool
    module_generators: tuple[Vec, ...] = ()


def _density_certificate(h: MonoidHom, p, im: EmbeddedMonoid) -> Optional[int]:
    """Least n >= 1 with n*p in the image monoid; None if provably none.

    Existence is decided by the cone criterion; the certificate search is
    bounded and raises InconclusiveError if it runs out before finding n.
    """
    amb = h.codomain.ambient
    free = amb.free_part(p)
    if not cones.cone_contains(im.cone_ineqs, free):
        return None
    sharp, proj = h.codomain.sharpen()
    try:
        level = sharp._level(proj.group_map(p)) if sharp.gens else Fraction(0)
    except MonoidError:
        level = Fraction(1)
    bound = max(1, ceil(level)) * (2 ** len(h.codomain.gens))
    for n in range(1, bound + 1):
        if im.contains(amb.scale(n, p)):
            return n
    raise InconclusiveError("density bound %d exhausted for %r" % (bound, list(p)))


def hom_predicates(h: MonoidHom) -> HomPredicates:
    """The morphism predicate bundle: local/strict/dense/finite/saturated/...

    dense and finite follow Gordan's lemma: for finitely generated targets
    dense implies finite, with module generators read off the density
    certificates.  saturated_hom is decided exactly when possible and raises
    InconclusiveError otherwise.
    """
    im = h.image_monoid()
    codom = h.codomain
    amb = codom.ambient
    certs = []
    dense = True
    for p in codom.gens:
        n = _density_certificate(h, p, im)
        if n is None:
            dense = False
            break
        certs.append(n)
    finite = dense  # codomain is finitely generated and integral (Gordan)
    module_gens: tuple = ()
    if finite:
        pts = {amb.zero()}
        for p, n in zip(codom.gens, certs):
            pts = {amb.add(x, amb.scale(a, p)) for x in pts for a in range(n)}
        module_gens = tuple(sorted(pts))
    # saturated: {p in P : np in im} ⊆ im
    sat_im, _ = im.saturate()
    saturated: Optional[bool] = True
    for g in sat_im.gens:
        if im.contains(g):
            continue
        if codom.contains(g):
            saturated = False
            break
        saturated = None  # saturation escapes P; no cheap certificate
    if saturated is None:
        for a, b in combinations_with_replacement(sat_im.gens, 2):
            s = amb.add(a, b)
            if codom.contains(s) and not im.contains(s):
                saturated = False
                break
        if saturated is None:
            raise InconclusiveError("saturated-hom test is inconclusive")
    return HomPredicates(
        local=h.is_local(),
        strict=h.is_strict(),
        dense=dense,
        finite=finite,
        saturated_hom=saturated,
        injective=h.is_injective(),
        surjective=h.is_surjective(),
        module_generators=module_gens,
    )


class PresentedMonoid:
    """Finitely presented (possibly non-integral) monoid N^m ⇉ N^n → P."""

    def __init__(self, ngens: int, relations):
        self.ngens = ngens
        rels = []
        for a, b in relations:
            a = tuple(int(x) for x in a)
            b = tuple(int(x) for x in b)
            if len(a) != ngens or len(b) != ngens:
                raise MonoidError("relation arity does not match generator count")
            if any(x < 0 for x in a + b):
                raise MonoidError("relations must have nonnegative coordinates")
            if a != b:
                rels.append((a, b))
        self.relations = tuple(rels)

    def __eq__(self, other):
        return (isinstance(other, PresentedMonoid) and self.ngens == other.ngens
                and self.relations == other.relations)

    def __repr__(self):
        return "PresentedMonoid(%d, %r)" % (self.ngens, list(self.relations))

    def integralize(self):
        """(The image of P in P^gp as an EmbeddedMonoid, generator images)."""
        free = AbelianGroup(self.ngens)
        diffs = [tuple(x - y for x, y in zip(a, b)) for a, b in self.relations]
        grp, proj = quotient_with_projection(free, diffs)
        images = [proj(tuple(1 if j == i else 0 for j in range(self.ngens)))
                  for i in range(self.ngens)]
        return EmbeddedMonoid(grp, images), images

    def elements_equal(self, u, v, budget: int = 2000) -> Optional[bool]:
        """Word problem by breadth-first rewriting; None when inconclusive."""
        u = tuple(int(x) for x in u)
        v = tuple(int(x) for x in v)
        if u == v:
            return True
        seen = {u}
        frontier = [u]
        steps = 0
        while frontier:
            new = []
            for w in frontier:
                for a, b in self.relations:
                    for src, dst in ((a, b), (b, a)):
                        if all(x >= y for x, y in zip(w, src)):
                            nxt = tuple(x - y + z for x, y, z in zip(w, src, dst))
                            if nxt == v:
                                return True
                            if nxt not in seen:
                                seen.add(nxt)
                                new.append(nxt)
                                steps += 1
                                if steps > budget:
                                    return None
            frontier = new
        return False


def pushout_presentation(f: MonoidHom, g: MonoidHom, rel1=(), rel2=()) -> PresentedMonoid:
    """Presentation of the pushout P1 ⊕_Q P2 of f: Q->P1, g: Q->P2.

    rel1/rel2 are known presentations of P1/P2 on their generator lists
    (default: none, appropriate for free generators); the identification
    relations f(q) = g(q) are found by membership witnesses.
    """
    if f.domain != g.domain:
        raise MonoidError("pushout needs a common domain")
    n1, n2 = len(f.codomain.gens), len(g.codomain.gens)
    rels = []
    for a, b in rel1:
        rels.append((tuple(a) + (0,) * n2, tuple(b) + (0,) * n2))
    for a, b in rel2:
        rels.append(((0,) * n1 + tuple(a), (0,) * n1 + tuple(b)))
    for q in f.domain.gens:
        w1 = f.codomain.membership_witness(f(q))
        w2 = g.codomain.membership_witness(g(q))
        if w1 is None or w2 is None:
            raise MonoidError("hom image escaped its codomain")
        rels.append((tuple(w1) + (0,) * n2, (0,) * n1 + tuple(w2)))
    return PresentedMonoid(n1 + n2, rels)


def pushout_integral(f: MonoidHom, g: MonoidHom):
    """Integralized pushout (P1 ⊕_Q P2)^int with the two coprojections."""
    if f.domain != g.domain:
        raise MonoidError("pushout needs a common domain")
    from .lattice import direct_sum

    w, i1, i2, _, _ = direct_sum(f.codomain.ambient, g.codomain.ambient)
    idents = [w.sub(i1(f(q)), i2(g(q))) for q in f.domain.gens]
    grp, proj = quotient_with_projection(w, idents)
    gens = [proj(i1(p)) for p in f.codomain.gens] + [proj(i2(p)) for p in g.codomain.gens]
    out = EmbeddedMonoid(grp, gens)
    h1 = MonoidHom(f.codomain, out, proj.compose(i1), check=False)
    h2 = MonoidHom(g.codomain, out, proj.compose(i2), check=False)
    return out, h1, h2


class MonoidIdeal:
    """Ideal of an EmbeddedMonoid given by generators (minimized on build).

    A generator g is dropped iff g = g' + p for another kept generator g'
    and p in the monoid; mutual divisibility keeps the earlier-listed one.
    """

    def __init__(self, parent: EmbeddedMonoid, gens, minimize: bool = True):
        self.parent = parent
        reduced = []
        seen = set()
        for gvec in gens:
            gvec = parent.ambient.reduce(gvec)
            if gvec not in seen:
                seen.add(gvec)
                reduced.append(gvec)
        if minimize:
            alive = [True] * len(reduced)
            for i, gi in enumerate(reduced):
                if not alive[i]:
                    continue
                for j, gj in enumerate(reduced):
                    if i == j or not alive[j]:
                        continue
                    if parent.contains(parent.ambient.sub(gi, gj)):
                        mutual = parent.contains(parent.ambient.sub(gj, gi))
                        if not mutual or j < i:
                            alive[i] = False
                            break
            reduced = [gEntry for gEntry, ok in zip(reduced, alive) if ok]
        self.gens = tuple(reduced)

    def __eq__(self, other):
        return (isinstance(other, MonoidIdeal) and self.parent == other.parent
                and self.gens == other.gens)

    def __repr__(self):
        return "MonoidIdeal(%r)" % [list(g) for g in self.gens]

    def contains(self, a) -> bool:
        amb = self.parent.ambient
        a = amb.reduce(a)
        return any(self.parent.contains(amb.sub(a, g)) for g in self.gens)

    def same_ideal(self, other: "MonoidIdeal") -> bool:
        return (all(other.contains(g) for g in self.gens)
                and all(self.contains(g) for g in other.gens))

    def power(self, n: int) -> "MonoidIdeal":
        """I^n, generated by all n-fold sums of generators of I."""
        if n < 1:
            raise MonoidError("ideal powers need n >= 1")
        amb = self.parent.ambient
        sums = set()
        for combo in combinations_with_replacement(self.gens, n):
            s = amb.zero()
            for c in combo:
                s = amb.add(s, c)
            sums.add(s)
        return MonoidIdeal(self.parent, sorted(sums))

    def is_unit_ideal(self) -> bool:
        return self.contains(self.parent.ambient.zero())


def maximal_ideal(p: EmbeddedMonoid) -> MonoidIdeal:
    """m_P = P \\ P*, generated by the non-unit generators."""
    units = set(p.unit_gen_indices)
    return MonoidIdeal(p, [g for i, g in enumerate(p.gens) if i not in units])


def _sharp_isomorphic(a: EmbeddedMonoid, b: EmbeddedMonoid) -> bool:
    from itertools import permutations

    irr_a, irr_b = a.irreducibles(), b.irreducibles()
    if len(irr_a) != len(irr_b) or a.span.group != b.span.group:
        return False
    if not irr_a:
        return True
    ca = [a.span.coords(x) for x in irr_a]
    for perm in permutations(range(len(irr_b))):
        cb = [b.span.coords(irr_b[i]) for i in perm]
        # solve for a group hom span_a -> span_b sending ca[i] to cb[i]
        ga = a.span.group
        cols_needed = []
        mat = IntMatrix.from_cols(ca, nrows=ga.ngens) if ca else IntMatrix(ga.ngens, 0, [])
        rel = ga.relation_matrix()
        aug_cols = [mat.col(j) for j in range(mat.cols)] + \
                   [rel.col(j) for j in range(rel.cols)]
        aug = IntMatrix.from_cols(aug_cols, nrows=ga.ngens)
        ok = True
        for gidx, gvec in enumerate(ga.gens()):
            from .lattice import solve as int_solve

            sol = int_solve(aug, gvec)
            if sol is None:
                ok = False
                break
            coeffs = sol[: len(ca)]
            img = b.span.group.zero()
            for cf, target in zip(coeffs, cb):
                img = b.span.group.add(img, b.span.group.scale(cf, target))
            cols_needed.append(img)
        if not ok:
            continue
        try:
            phi = GroupHom.from_gen_images(ga, b.span.group, cols_needed)
        except ValueError:
            continue
        if not phi.is_isomorphism():
            continue
        if all(phi(x) == y for x, y in zip(ca, cb)):
            return True
    return False


def are_isomorphic(a: EmbeddedMonoid, b: EmbeddedMonoid) -> bool:
    """Abstract monoid isomorphism, exact for sharp monoids and fs monoids.

    For fs monoids the splitting P = P* ⊕ P̄ reduces the test to the unit
    groups and the sharpenings; other cases with units raise MonoidError.
    """
    if a.span.group != b.span.group:
        return False
    ua, ub = a.units(), b.units()
    if ua.group != ub.group:
        return False
    sa, _ = a.sharpen()
    sb, _ = b.sharpen()
    if not _sharp_isomorphic(sa, sb):
        return False
    if a.is_sharp and b.is_sharp:
        return True
    if a.is_saturated and b.is_saturated:
        return True
    raise MonoidError("isomorphism test for non-fs monoids with units is unsupported")
