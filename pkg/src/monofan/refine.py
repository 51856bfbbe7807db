"""Refinement factorization and classification of maps of fine monoids.

For h: Q -> P the monoid R is the preimage of P under h^gp inside Q^gp; the
factorization h = p o i through R controls exactness and the refinement
properties, and the sharpened section s̄ (when it exists) is the witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil
from typing import Optional

from . import cones
from .lattice import AbelianGroup, GroupHom, IntMatrix, direct_sum, solve
from .monoid import (
    EmbeddedMonoid,
    InconclusiveError,
    MonoidError,
    MonoidHom,
    pushout_integral,
)


def refinement_factorization(h: MonoidHom):
    """(R, i, p) with R = (h^gp)^{-1}(P) ∩ Q^gp, i: Q -> R, p: R -> P.

    Generators of R come from the monoid of solutions (q, n) of
    h(q) = sum n_j p_j with n >= 0, projected to q."""
    q, p = h.domain, h.codomain
    qspan = q.span
    m = len(p.gens)
    big, inc_w, inc_n, proj_w, proj_n = direct_sum(qspan.group, AbelianGroup(m))

    def eval_hom(x):
        w = proj_w(x)
        n = proj_n(x)
        val = h.group_map(qspan.inclusion(w))
        out = p.ambient.reduce(val)
        for c, gen in zip(n, p.gens):
            out = p.ambient.sub(out, p.ambient.scale(c, gen))
        return out

    e = GroupHom.from_gen_images(big, p.ambient, [eval_hom(g) for g in big.gens()])
    ker_gens = e.kernel_elements()
    from .lattice import Subgroup

    lsub = Subgroup(big, ker_gens)
    lg = lsub.group
    rows = []
    for j in range(m):
        row = []
        for k in range(lg.rank):
            basis = [0] * lg.ngens
            basis[k] = 1
            row.append(proj_n(lsub.inclusion(basis))[j])
        rows.append(tuple(row))
    rows = sorted(set(r for r in rows if any(r)))
    free_gens = cones.lattice_monoid_generators(rows, lg.rank) if lg.rank else []
    sol_gens = [tuple(v) + (0,) * len(lg.torsion) for v in free_gens]
    for i in range(len(lg.torsion)):
        t = [0] * lg.ngens
        t[lg.rank + i] = 1
        sol_gens.append(tuple(t))
    r_gens = []
    for s in sol_gens:
        w = proj_w(lsub.inclusion(s))
        r_gens.append(qspan.inclusion(w))
    r_monoid = EmbeddedMonoid(q.ambient, r_gens).minimized_gens()
    i_hom = MonoidHom(q, r_monoid, GroupHom.identity(q.ambient))
    p_hom = MonoidHom(r_monoid, p, h.group_map)
    return r_monoid, i_hom, p_hom


@dataclass
class RefinementReport:
    input: MonoidHom
    r_monoid: EmbeddedMonoid
    i: MonoidHom
    p: MonoidHom
    exact: bool
    refinement: bool
    good: bool
    strong: bool
    section_images: Optional[tuple] = None  # per irreducible of P̄, element of R̄
    inconclusive: bool = False

    def __post_init__(self):
        if self.good and not self.strong:
            raise MonoidError("good refinement must be strong")
        if self.strong and not self.refinement:
            raise MonoidError("strong refinement must be a refinement")


def _section_target_data(h: MonoidHom):
    """(R̄, p̄, ī, sharpened Q and P) for the section search."""
    r_monoid, i_hom, p_hom = refinement_factorization(h)
    rbar, rproj = r_monoid.sharpen()
    pbar_hom = p_hom.sharpened()
    ibar_hom = i_hom.sharpened()
    return r_monoid, i_hom, p_hom, rbar, pbar_hom, ibar_hom


def _constructive_section(h, r_monoid, pbar_hom, ibar_hom):
    """Section of p̄ when P̄^gp is free: lift a group section of h̄^gp."""
    hbar = h.sharpened()
    smap = hbar.span_map
    if not smap.is_surjective():
        return None
    pbar = hbar.codomain
    if pbar.span.group.torsion:
        return None
    rbar = pbar_hom.domain
    images = []
    for x in pbar.irreducibles():
        w = pbar.span.coords(x)
        pre = smap.preimage(w)  # in span(Q̄)
        qbar_el = hbar.domain.span.inclusion(pre)
        # carry into R̄ through ī's ambient map
        r_el = ibar_hom.group_map(qbar_el)
        images.append(rbar.ambient.reduce(r_el))
    # sanity: p̄ of each image is the corresponding irreducible
    for x, r_el in zip(pbar.irreducibles(), images):
        if pbar_hom.group_map(r_el) != pbar.ambient.reduce(x):
            raise MonoidError("constructed section does not split p̄")
        if not rbar.contains(r_el):
            raise MonoidError("constructed section leaves R̄")
    return tuple(images)


def _search_sections(h, pbar_hom, ibar_hom, slack: int = 6):
    """All sharpened sections s̄ with s̄ h̄ = ī, by bounded enumeration."""
    hbar = h.sharpened()
    pbar = hbar.codomain
    rbar = pbar_hom.domain
    irr = pbar.irreducibles()
    if not irr:
        return [()]
    smap = hbar.span_map
    if not smap.is_surjective():
        return []
    if not rbar.gens:
        return []
    fibers = []
    for x in irr:
        w = pbar.span.coords(x)
        pre = smap.preimage(w)
        base = rbar.ambient.reduce(ibar_hom.group_map(hbar.domain.span.inclusion(pre)))
        level = rbar._level(base) if rbar.gens else 0
        bound = max(1, ceil(level)) + slack
        pool = rbar.elements_up_to_level(bound)
        fib = [r for r in pool if pbar_hom.group_map(r) == pbar.ambient.reduce(x)]
        if not fib:
            raise InconclusiveError("empty bounded fiber in section search")
        fibers.append(sorted(fib))
    # relations among the irreducibles inside span(P̄)
    coords = [pbar.span.coords(x) for x in irr]
    mat = IntMatrix.from_cols(coords, nrows=pbar.span.group.ngens)
    rel = pbar.span.group.relation_matrix()
    aug = IntMatrix.from_cols(
        [mat.col(j) for j in range(mat.cols)] + [rel.col(j) for j in range(rel.cols)],
        nrows=pbar.span.group.ngens)
    from .lattice import kernel

    rel_lattice = [k[: len(irr)] for k in kernel(aug)]
    out = []

    def respects_relations(choice):
        for relvec in rel_lattice:
            acc = rbar.span.group.zero()
            for c, r_el in zip(relvec, choice):
                w = rbar.span.coords(r_el)
                acc = rbar.span.group.add(acc, rbar.span.group.scale(c, w))
            if not rbar.span.group.is_zero(acc):
                return False
        return True

    def sigma_of(choice, el):
        """Apply the candidate section (linear on span) to el in P̄."""
        w = pbar.span.coords(el)
        sol = solve(aug, w)
        if sol is None:
            return None
        acc = rbar.span.group.zero()
        for c, r_el in zip(sol[: len(irr)], choice):
            acc = rbar.span.group.add(acc, rbar.span.group.scale(c, rbar.span.coords(r_el)))
        return rbar.span.inclusion(acc)

    import itertools

    for choice in itertools.product(*fibers):
        if not respects_relations(choice):
            continue
        ok = True
        for qg in hbar.domain.gens:
            target = ibar_hom.group_map(qg)
            got = sigma_of(choice, hbar.group_map(qg))
            if got is None or rbar.ambient.reduce(got) != rbar.ambient.reduce(target):
                ok = False
                break
        if ok:
            out.append(tuple(choice))
    return out


def classify(h: MonoidHom) -> RefinementReport:
    """Full refinement classification of a map of fine monoids."""
    r_monoid, i_hom, p_hom, rbar, pbar_hom, ibar_hom = _section_target_data(h)
    exact = i_hom.is_monoid_iso()
    good = p_hom.is_monoid_iso()
    strong = pbar_hom.is_monoid_iso()
    hbar = h.sharpened()
    section = None
    inconclusive = False
    if not hbar.span_map.is_surjective():
        refinement = False
    else:
        section = _constructive_section(h, r_monoid, pbar_hom, ibar_hom)
        if section is not None:
            refinement = True
        else:
            try:
                found = _search_sections(h, pbar_hom, ibar_hom)
                refinement = bool(found)
                section = found[0] if found else None
            except InconclusiveError:
                raise
    return RefinementReport(h, r_monoid, i_hom, p_hom, exact, refinement,
                            good, strong, section, inconclusive)


def realize_refinement_chart(a: MonoidHom, h: MonoidHom) -> EmbeddedMonoid:
    """The chart monoid (C ⊕_Q R)^int of the realized space for a chart
    a: Q -> C and a refinement h: Q -> P."""
    if a.domain != h.domain:
        raise MonoidError("chart and refinement need a common domain")
    report = classify(h)
    if not report.refinement:
        raise MonoidError("h is not a refinement")
    out, _, _ = pushout_integral(report.i, a)
    return out
