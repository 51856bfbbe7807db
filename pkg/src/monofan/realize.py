"""Presentation-level realizations: binomial ring presentations, the
smooth/etale criteria, and real/circle realization bookkeeping.

No coefficient arithmetic happens here; ring presentations are symbolic
interchange data and the smoothness tests are purely combinatorial.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import hom_profile
from .monoid import EmbeddedMonoid, MonoidError, MonoidHom, PresentedMonoid

BASE_TAGS = {"integers": "Z", "rationals": "Q", "complexes": "C"}


@dataclass(frozen=True)
class RingPresentation:
    variable_count: int
    binomial_relations: tuple  # pairs of exponent vectors
    base_ring_tag: str

    def lines(self) -> list[str]:
        """One relation per line: x^(a) = x^(b)."""
        out = []
        for a, b in self.binomial_relations:
            out.append("x^(%s) = x^(%s)" % (",".join(str(v) for v in a),
                                            ",".join(str(v) for v in b)))
        return out

    def pretty(self) -> str:
        base = BASE_TAGS[self.base_ring_tag]
        vars_ = ",".join("x%d" % (i + 1) for i in range(self.variable_count))
        if not self.binomial_relations:
            return "%s[%s]" % (base, vars_)

        def mono(exp):
            parts = []
            for i, e in enumerate(exp):
                if e == 1:
                    parts.append("x%d" % (i + 1))
                elif e > 1:
                    parts.append("x%d^%d" % (i + 1, e))
            return "*".join(parts) if parts else "1"

        rels = ", ".join("%s - %s" % (mono(a), mono(b))
                         for a, b in self.binomial_relations)
        return "%s[%s]/(%s)" % (base, vars_, rels)


def ring_presentation(p: PresentedMonoid, base_tag: str = "integers") -> RingPresentation:
    """The monoid algebra of a presented monoid as a binomial presentation."""
    if base_tag not in BASE_TAGS:
        raise MonoidError("unknown base ring tag %r" % base_tag)
    return RingPresentation(p.ngens, tuple(p.relations), base_tag)


def smoothness_class(h: MonoidHom) -> str:
    """'etale' / 'smooth' / 'unclassified' by the kernel/cokernel criterion.

    The criterion is sufficient, not necessary: etale needs the sharpening
    an isomorphism with torsion kernel and cokernel of the span map, smooth
    drops the cokernel condition."""
    if not h.is_strict():
        return "unclassified"
    prof = hom_profile(h.span_map)
    if prof.ker_torsion and prof.coker_torsion:
        return "etale"
    if prof.ker_torsion:
        return "smooth"
    return "unclassified"


@dataclass(frozen=True)
class RealizationProfile:
    """Dimensions and component counts of the real/circle realizations.

    C(P)^KN decomposes as R_+(P) x S^1(P): the positive part has dimension
    rank(P^gp) and so does the compact torus; components of the full real
    points count the torsion, and homs to {+-1} count sign components.
    The torus factor follows the rank (the '(R^*)^k' exponent in the
    literature appears inconsistent with the rank-based positive part; the
    rank is used here).
    """

    positive_dim: int
    circle_dim: int
    component_count: int
    sign_components: int

    def __post_init__(self):
        if self.component_count < 1:
            raise MonoidError("component count must be positive")
        s = self.sign_components
        while s % 2 == 0:
            s //= 2
        if s != 1:
            raise MonoidError("sign components must be a power of two")


def realization_profile(p: EmbeddedMonoid) -> RealizationProfile:
    g = p.span.group
    comp = g.torsion_order()
    sign = 2 ** g.rank
    for d in g.torsion:
        if d % 2 == 0:
            sign *= 2
    return RealizationProfile(positive_dim=g.rank, circle_dim=g.rank,
                              component_count=comp, sign_components=sign)


def sign_components_bruteforce(g) -> int:
    """|Hom(G, Z/2)| by enumeration over generator images (small groups)."""
    from itertools import product

    count = 0
    for images in product((0, 1), repeat=g.ngens):
        ok = True
        for i, d in enumerate(g.torsion):
            if d * images[g.rank + i] % 2 != 0:
                ok = False
                break
        if ok:
            count += 1
    return count


@dataclass(frozen=True)
class SurjectivityTransfer:
    """Which clauses of the complex-to-real surjectivity transfer apply."""

    complex_clause_applicable: bool  # the R_{>=0} clause has no hypotheses
    fs_clause_applicable: bool       # needs Q fs and the span map an iso
    domain_fs: bool
    group_map_iso: bool


def surjectivity_transfer(h: MonoidHom) -> SurjectivityTransfer:
    domain_fs = h.domain.is_saturated
    iso = h.is_group_iso()
    return SurjectivityTransfer(
        complex_clause_applicable=True,
        fs_clause_applicable=domain_fs and iso,
        domain_fs=domain_fs,
        group_map_iso=iso,
    )
