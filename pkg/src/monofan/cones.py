"""Rational polyhedral cone computations, exact over Fraction/int.

Cones live in Q^dim.  Two descriptions are used throughout:
  * generators: a list of integer vectors (rays, not necessarily extreme);
  * inequalities: a list of integer row vectors d with cone = {x : d.x >= 0}.
Conversion both ways is by Fourier-Motzkin elimination and kernel
enumeration; everything is exact.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from math import gcd

from .lattice import IntMatrix, Vec, kernel, primitive, rank


def _norm_ineq(row):
    g = 0
    for x in row:
        g = gcd(g, abs(x))
    if g > 1:
        row = tuple(x // g for x in row)
    return tuple(row)


def fm_solve(ineqs, nvars):
    """A rational solution of {c . y >= r for (c, r) in ineqs}, or None.

    Each inequality is (coeffs, rhs) with integer or Fraction entries.
    """
    system = [([Fraction(c) for c in cs], Fraction(r)) for cs, r in ineqs]
    stages = []
    for var in range(nvars - 1, -1, -1):
        lower, upper, rest = [], [], []
        for cs, r in system:
            c = cs[var]
            if c > 0:
                lower.append((cs, r))
            elif c < 0:
                upper.append((cs, r))
            else:
                rest.append((cs, r))
        stages.append((var, lower, upper))
        new = list(rest)
        for cl, rl in lower:
            for cu, ru in upper:
                a, b = cl[var], -cu[var]
                cs = [b * x + a * y for x, y in zip(cl, cu)]
                cs[var] = Fraction(0)
                new.append((cs, b * rl + a * ru))
        seen = set()
        system = []
        for cs, r in new:
            key = (tuple(cs), r)
            if key not in seen:
                seen.add(key)
                system.append((cs, r))
    for cs, r in system:
        if r > 0:
            return None
    sol = [Fraction(0)] * nvars
    for var, lower, upper in reversed(stages):
        lo, hi = None, None
        for cs, r in lower:
            bound = (r - sum(c * s for c, s in zip(cs, sol)) + cs[var] * sol[var]) / cs[var]
            lo = bound if lo is None or bound > lo else lo
        for cs, r in upper:
            bound = (r - sum(c * s for c, s in zip(cs, sol)) + cs[var] * sol[var]) / cs[var]
            hi = bound if hi is None or bound < hi else hi
        if lo is None and hi is None:
            sol[var] = Fraction(0)
        elif lo is None:
            sol[var] = min(Fraction(0), hi)
        elif hi is None:
            sol[var] = max(Fraction(0), lo)
        else:
            if lo > hi:
                return None
            sol[var] = lo if lo == hi else (lo + hi) / 2
    return tuple(sol)


def fm_project_homogeneous(rows, keep):
    """Project {x : row . x >= 0} onto the first `keep` coordinates.

    Rows are integer vectors over all variables; eliminates the trailing
    variables one at a time.  Returns normalized, deduplicated rows of
    length `keep` describing the image cone.
    """
    n = len(rows[0]) if rows else keep
    system = [tuple(r) for r in rows]
    for var in range(n - 1, keep - 1, -1):
        lower, upper, rest = [], [], []
        for row in system:
            c = row[var]
            if c > 0:
                lower.append(row)
            elif c < 0:
                upper.append(row)
            else:
                rest.append(row)
        new = set(rest)
        for rl in lower:
            for ru in upper:
                a, b = rl[var], -ru[var]
                combo = tuple(b * x + a * y for x, y in zip(rl, ru))
                if any(combo[:var]) or any(combo[var + 1 :]):
                    new.add(_norm_ineq(combo))
        system = sorted(new)
    out = set()
    for row in system:
        row = row[:keep]
        if any(row):
            out.add(_norm_ineq(row))
    return sorted(out)


def drop_redundant(ineqs, dim):
    """Remove inequalities implied by the others (exact, via FM feasibility)."""
    rows = sorted(set(_norm_ineq(r) for r in ineqs if any(r)))
    kept = list(rows)
    for row in rows:
        others = [r for r in kept if r != row]
        # redundant iff {others >= 0, row <= -1} infeasible
        system = [(list(r), 0) for r in others] + [([-c for c in row], 1)]
        if fm_solve(system, dim) is None:
            kept = others
    return kept


def cone_inequalities(gens, dim):
    """Facet-style inequality description of cone(gens) in Q^dim."""
    gens = [tuple(g) for g in gens]
    k = len(gens)
    if k == 0:
        rows = []
        for i in range(dim):
            e = [0] * dim
            e[i] = 1
            rows.append(tuple(e))
            rows.append(tuple(-x for x in e))
        return rows
    # Variables: (x_1..x_dim, l_1..l_k); x = sum l_i g_i, l >= 0.
    rows = []
    for c in range(dim):
        row = [0] * (dim + k)
        row[c] = 1
        for i, g in enumerate(gens):
            row[dim + i] = -g[c]
        rows.append(tuple(row))
        rows.append(tuple(-x for x in row))
    for i in range(k):
        row = [0] * (dim + k)
        row[dim + i] = 1
        rows.append(tuple(row))
    projected = fm_project_homogeneous(rows, dim)
    return drop_redundant(projected, dim)


def cone_contains(ineqs, x) -> bool:
    return all(sum(c * v for c, v in zip(row, x)) >= 0 for row in ineqs)


def cone_generators(ineqs, dim):
    """Integer ray generators of {x : ineqs . x >= 0}.

    Handles lineality: the result contains a +/- lattice basis of the
    lineality space plus one primitive ray per minimal nontrivial face.
    """
    rows = [tuple(r) for r in ineqs]
    if not rows:
        gens = []
        for i in range(dim):
            e = [0] * dim
            e[i] = 1
            gens.append(tuple(e))
            gens.append(tuple(-x for x in e))
        return gens
    rows = sorted({_norm_ineq(r) for r in rows if any(r)})
    if not rows:
        gens = []
        for i in range(dim):
            e = [0] * dim
            e[i] = 1
            gens.append(tuple(e))
            gens.append(tuple(-x for x in e))
        return gens
    mat = IntMatrix.from_rows(rows)
    lin_basis = kernel(mat)
    lin_dim = len(lin_basis)
    gens = []
    for b in lin_basis:
        gens.append(primitive(b))
        gens.append(primitive(tuple(-x for x in b)))
    seen = set(gens)
    nrows = len(rows)
    # Every minimal nontrivial face has an active set whose span is cut out
    # by exactly dim - lin_dim - 1 independent rows, so that subset size is
    # enough to see all extreme directions.
    size = dim - lin_dim - 1
    if size < 0:
        return sorted(set(gens), key=lambda v: (sum(abs(x) for x in v), v))
    for subset in combinations(range(nrows), size):
        sub = IntMatrix.from_rows([rows[i] for i in subset]) if subset \
            else IntMatrix(0, dim, [])
        kb = kernel(sub) if subset else [tuple(1 if i == j else 0 for j in range(dim))
                                         for i in range(dim)]
        if len(kb) != lin_dim + 1:
            continue
        cand = None
        for b in kb:
            vals = [sum(c * v for c, v in zip(row, b)) for row in rows]
            if any(vals):
                cand = (b, vals)
                break
        if cand is None:
            continue
        b, vals = cand
        if all(v >= 0 for v in vals):
            w = primitive(b)
        elif all(v <= 0 for v in vals):
            w = primitive(tuple(-x for x in b))
        else:
            continue
        if w not in seen:
            seen.add(w)
            gens.append(w)
    return sorted(set(gens), key=lambda v: (sum(abs(x) for x in v), v))


def lineality_basis(ineqs, dim):
    rows = [tuple(r) for r in ineqs]
    if not rows:
        return [tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim)]
    return kernel(IntMatrix.from_rows(rows))


def positive_grading(vectors, dim):
    """Rational y with y . v >= 1 for every v in vectors, or None."""
    system = [(list(v), 1) for v in vectors]
    return fm_solve(system, dim)


def box_lattice_points(gens, dim, ineqs=None):
    """Lattice points of the zonotope {sum l_i g_i : l in [0,1]^k}.

    If `ineqs` (for cone(gens)) is given, candidates outside the cone are
    skipped cheaply before the exact membership solve.
    """
    gens = [tuple(g) for g in gens]
    k = len(gens)
    if k == 0:
        return [tuple([0] * dim)]
    lo = [sum(min(0, g[c]) for g in gens) for c in range(dim)]
    hi = [sum(max(0, g[c]) for g in gens) for c in range(dim)]
    pts = []
    for cand in product(*[range(lo[c], hi[c] + 1) for c in range(dim)]):
        if ineqs is not None and not cone_contains(ineqs, cand):
            continue
        system = []
        for c in range(dim):
            row = [g[c] for g in gens]
            system.append((row, cand[c]))
            system.append(([-x for x in row], -cand[c]))
        for i in range(k):
            row = [0] * k
            row[i] = 1
            system.append((row, 0))
            row2 = [0] * k
            row2[i] = -1
            system.append((row2, -1))
        if fm_solve(system, k) is not None:
            pts.append(tuple(cand))
    return pts


def grid_cone_points(gens, dim, ineqs):
    """Lattice points of (bounding box of the generator zonotope) ∩ cone.

    A cheap superset of the zonotope lattice points: still generates the
    cone monoid (Gordan), so it is a valid Hilbert candidate pool."""
    gens = [tuple(g) for g in gens]
    if not gens:
        return [tuple([0] * dim)]
    lo = [sum(min(0, g[c]) for g in gens) for c in range(dim)]
    hi = [sum(max(0, g[c]) for g in gens) for c in range(dim)]
    return [tuple(cand)
            for cand in product(*[range(lo[c], hi[c] + 1) for c in range(dim)])
            if cone_contains(ineqs, cand)]


def hilbert_basis_pointed(gens, dim):
    """The Hilbert basis of cone(gens) ∩ Z^dim for a pointed cone.

    Candidates come from the box around the generator zonotope (the
    classical Gordan argument); minimality is by pairwise subtraction
    inside the saturated monoid, which only needs the inequalities.
    """
    gens = [tuple(g) for g in gens if any(g)]
    if not gens:
        return []
    ineqs = cone_inequalities(gens, dim)
    if lineality_basis(ineqs, dim):
        raise ValueError("cone is not pointed")
    lam = positive_grading(gens, dim)
    if lam is None:
        raise ValueError("cone is not pointed")
    cands = [p for p in grid_cone_points(gens, dim, ineqs) if any(p)]
    cands.sort(key=lambda p: (sum(l * x for l, x in zip(lam, p)), p))
    kept = []
    for p in cands:
        reducible = False
        for q in kept:
            diff = tuple(a - b for a, b in zip(p, q))
            if any(diff) and cone_contains(ineqs, diff):
                reducible = True
                break
            if not any(diff):
                reducible = True
                break
        if not reducible:
            kept.append(p)
    return sorted(kept, key=lambda v: (sum(abs(x) for x in v), v))


def lattice_monoid_generators(ineqs, dim):
    """Canonical generators of {x in Z^dim : ineqs . x >= 0} as a monoid.

    Splits off the lineality lattice (contributing +/- basis vectors) and
    lifts the Hilbert basis of the pointed image cone through an SNF
    section; every lift automatically lies in the cone.
    """
    from .lattice import _snf_full  # local import to keep module surfaces tidy

    ineqs = [tuple(r) for r in ineqs]
    lin = lineality_basis(ineqs, dim)
    unit_gens = []
    for b in lin:
        unit_gens.append(primitive(b))
    unit_gens = sorted(set(unit_gens), key=lambda v: (sum(abs(x) for x in v), v))
    unit_gens = [g for g in unit_gens] + [tuple(-x for x in g) for g in unit_gens]
    if not lin:
        rays = cone_generators(ineqs, dim)
        hb = hilbert_basis_pointed(rays, dim) if rays else []
        return hb
    if len(lin) == dim:
        return unit_gens
    lmat = IntMatrix.from_cols(lin, nrows=dim)
    u, s, _, ui, _ = _snf_full(lmat)
    from .lattice import diagonal as _diag

    dia = _diag(s)
    free_idx = [i for i in range(dim) if i >= len(dia) or dia[i] == 0]
    proj_rows = [u.row(i) for i in free_idx]
    qdim = len(free_idx)

    def proj(x):
        return tuple(sum(r[j] * x[j] for j in range(dim)) for r in proj_rows)

    sect_cols = [ui.col(i) for i in free_idx]

    def sect(y):
        return tuple(sum(sect_cols[j][c] * y[j] for j in range(qdim)) for c in range(dim))

    rays = cone_generators(ineqs, dim)
    img_rays = [proj(r) for r in rays]
    img_rays = [r for r in img_rays if any(r)]
    hb = hilbert_basis_pointed(img_rays, qdim) if img_rays else []
    lifts = [sect(h) for h in hb]
    for l in lifts:
        assert cone_contains(ineqs, l)
    return unit_gens + lifts
