"""Exact integer linear algebra for finitely generated abelian groups.

Everything here runs on plain Python integers, so there is no overflow and
no floating point anywhere.  Groups are kept in invariant-factor form
Z^rank + Z/d1 + ... + Z/dk with d1 | d2 | ... | dk, and elements are
coordinate tuples with the free coordinates first and each torsion
coordinate reduced into [0, di).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Optional, Sequence

Vec = tuple[int, ...]


def _as_vec(v) -> Vec:
    return tuple(int(x) for x in v)


class IntMatrix:
    """Immutable integer matrix, row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows, cols, entries):
        self.rows = rows
        self.cols = cols
        ent = tuple(int(x) for x in entries)
        if len(ent) != rows * cols:
            raise ValueError("entry count does not match shape")
        self.entries = ent

    @classmethod
    def from_rows(cls, rows_list) -> "IntMatrix":
        rows_list = [list(r) for r in rows_list]
        r = len(rows_list)
        c = len(rows_list[0]) if rows_list else 0
        if any(len(row) != c for row in rows_list):
            raise ValueError("ragged rows")
        return cls(r, c, [x for row in rows_list for x in row])

    @classmethod
    def from_cols(cls, cols_list, nrows=None) -> "IntMatrix":
        cols_list = [list(c) for c in cols_list]
        if cols_list:
            nrows = len(cols_list[0])
        elif nrows is None:
            raise ValueError("need nrows for empty column list")
        if any(len(c) != nrows for c in cols_list):
            raise ValueError("ragged columns")
        return cls(nrows, len(cols_list),
                   [col[i] for i in range(nrows) for col in cols_list])

    @classmethod
    def identity(cls, n) -> "IntMatrix":
        return cls(n, n, [1 if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def zero(cls, r, c) -> "IntMatrix":
        return cls(r, c, [0] * (r * c))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i) -> Vec:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def col(self, j) -> Vec:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows([self.col(j) for j in range(self.cols)])

    def apply(self, v: Sequence[int]) -> Vec:
        if len(v) != self.cols:
            raise ValueError("dimension mismatch")
        return tuple(sum(self.entries[i * self.cols + j] * v[j] for j in range(self.cols))
                     for i in range(self.rows))

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        return IntMatrix.from_rows(
            [[sum(self[i, k] * other[k, j] for k in range(self.cols))
              for j in range(other.cols)] for i in range(self.rows)])

    def __eq__(self, other):
        return (isinstance(other, IntMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return "IntMatrix(%r)" % [list(self.row(i)) for i in range(self.rows)]


def _snf_inplace(a, n, m):
    """Reduce a (list of lists) to Smith form; return (u, ui, v, vi) as lists.

    Maintains s = u @ a0 @ v with u @ ui = I and vi @ v = I.  Pivoting is on
    the minimal-absolute-value nonzero entry.
    """
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    ui = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    v = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    vi = [[1 if i == j else 0 for j in range(m)] for i in range(m)]

    def swap_rows(i, j):
        if i == j:
            return
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]
        for r in ui:
            r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        if i == j:
            return
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]
        vi[i], vi[j] = vi[j], vi[i]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]
        for r in ui:
            r[i] = -r[i]

    def row_op(i, j, q):
        # r_i += q * r_j ; inverse: column j of ui -= q * column i
        a[i] = [x + q * y for x, y in zip(a[i], a[j])]
        u[i] = [x + q * y for x, y in zip(u[i], u[j])]
        for r in ui:
            r[j] -= q * r[i]

    def col_op(j, i, q):
        # c_j += q * c_i ; inverse: row j of vi -= q * row i
        for r in a:
            r[j] += q * r[i]
        for r in v:
            r[j] += q * r[i]
        vi[j] = [x - q * y for x, y in zip(vi[j], vi[i])]

    t = 0
    while t < min(n, m):
        best = None
        for i in range(t, n):
            for j in range(t, m):
                x = a[i][j]
                if x != 0 and (best is None or abs(x) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        if a[t][t] < 0:
            negate_row(t)
        while True:
            dirty = False
            for i in range(t + 1, n):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    row_op(i, t, -q)
                    if a[i][t] != 0:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, m):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    col_op(j, t, -q)
                    if a[t][j] != 0:
                        swap_cols(t, j)
                        dirty = True
            if not dirty and all(a[i][t] == 0 for i in range(t + 1, n)) \
                    and all(a[t][j] == 0 for j in range(t + 1, m)):
                break
        d = a[t][t]
        bad = None
        for i in range(t + 1, n):
            if any(a[i][j] % d != 0 for j in range(t + 1, m)):
                bad = i
                break
        if bad is not None:
            row_op(t, bad, 1)
            continue
        t += 1
    return u, ui, v, vi


def smith_normal_form(m: IntMatrix):
    """Return (u, s, v) with u*m*v = s in Smith normal form.

    u and v are unimodular; s is diagonal with nonnegative entries d1 | d2 | ...
    """
    a = [list(m.row(i)) for i in range(m.rows)]
    u, ui, v, vi = _snf_inplace(a, m.rows, m.cols)
    return IntMatrix.from_rows(u) if m.rows else IntMatrix(0, 0, []), \
        IntMatrix.from_rows(a) if m.rows else IntMatrix(0, m.cols, []), \
        IntMatrix.from_rows(v) if m.cols else IntMatrix(0, 0, [])


def _snf_full(m: IntMatrix):
    a = [list(m.row(i)) for i in range(m.rows)]
    u, ui, v, vi = _snf_inplace(a, m.rows, m.cols)

    def mk(rows, r, c):
        return IntMatrix.from_rows(rows) if r else IntMatrix(0, c, [])

    return (mk(u, m.rows, m.rows), mk(a, m.rows, m.cols), mk(v, m.cols, m.cols),
            mk(ui, m.rows, m.rows), mk(vi, m.cols, m.cols))


def diagonal(s: IntMatrix) -> list[int]:
    return [s[i, i] for i in range(min(s.rows, s.cols))]


def rank(m: IntMatrix) -> int:
    _, s, _ = smith_normal_form(m)
    return sum(1 for d in diagonal(s) if d != 0)


def solve(m: IntMatrix, b: Sequence[int]) -> Optional[Vec]:
    """One integer solution x of m*x = b, or None."""
    if len(b) != m.rows:
        raise ValueError("dimension mismatch")
    u, s, v, _, _ = _snf_full(m)
    y = u.apply(b) if m.rows else ()
    x = [0] * m.cols
    for i in range(m.rows):
        d = s[i, i] if i < min(s.rows, s.cols) else 0
        if d == 0:
            if y[i] != 0:
                return None
        else:
            if y[i] % d != 0:
                return None
            x[i] = y[i] // d
    return v.apply(x) if m.cols else ()


def kernel(m: IntMatrix) -> list[Vec]:
    """Basis of the integer kernel of m, as a list of vectors."""
    _, s, v = smith_normal_form(m)
    basis = []
    dia = diagonal(s)
    for j in range(m.cols):
        if j >= len(dia) or dia[j] == 0:
            basis.append(v.col(j))
    return basis


class LinearSystem:
    """m*x = b solver with the Smith form computed once."""

    __slots__ = ("m", "_u", "_s", "_v", "_dia")

    def __init__(self, m: IntMatrix):
        self.m = m
        u, s, v, _, _ = _snf_full(m)
        self._u, self._s, self._v = u, s, v
        self._dia = diagonal(s)

    def solve(self, b) -> Optional[Vec]:
        m = self.m
        if len(b) != m.rows:
            raise ValueError("dimension mismatch")
        y = self._u.apply(b) if m.rows else ()
        x = [0] * m.cols
        for i in range(m.rows):
            d = self._dia[i] if i < len(self._dia) else 0
            if d == 0:
                if y[i] != 0:
                    return None
            else:
                if y[i] % d != 0:
                    return None
                x[i] = y[i] // d
        return self._v.apply(x) if m.cols else ()


class AbelianGroup:
    """Z^rank + Z/d1 + ... + Z/dk with d1 | d2 | ... | dk, all di >= 2."""

    __slots__ = ("rank", "torsion")

    def __init__(self, rank: int, torsion: Sequence[int] = ()):
        torsion = tuple(int(d) for d in torsion)
        if rank < 0 or any(d < 2 for d in torsion):
            raise ValueError("bad group data")
        for i in range(len(torsion) - 1):
            if torsion[i + 1] % torsion[i] != 0:
                raise ValueError("invariant factors must form a divisibility chain")
        self.rank = rank
        self.torsion = torsion

    @property
    def ngens(self) -> int:
        return self.rank + len(self.torsion)

    def reduce(self, v: Sequence[int]) -> Vec:
        if len(v) != self.ngens:
            raise ValueError("dimension mismatch")
        out = list(v[: self.rank])
        for i, d in enumerate(self.torsion):
            out.append(v[self.rank + i] % d)
        return tuple(out)

    def zero(self) -> Vec:
        return (0,) * self.ngens

    def add(self, a, b) -> Vec:
        return self.reduce([x + y for x, y in zip(a, b)])

    def neg(self, a) -> Vec:
        return self.reduce([-x for x in a])

    def sub(self, a, b) -> Vec:
        return self.reduce([x - y for x, y in zip(a, b)])

    def scale(self, n: int, a) -> Vec:
        return self.reduce([n * x for x in a])

    def is_zero(self, a) -> bool:
        return self.reduce(a) == self.zero()

    def free_part(self, a) -> Vec:
        return tuple(a[: self.rank])

    def torsion_order(self) -> int:
        n = 1
        for d in self.torsion:
            n *= d
        return n

    def is_trivial(self) -> bool:
        return self.ngens == 0

    def gens(self) -> list[Vec]:
        return [self.reduce([1 if i == j else 0 for j in range(self.ngens)])
                for i in range(self.ngens)]

    def relation_matrix(self) -> IntMatrix:
        """Columns generate the lattice L with this group = Z^ngens / L."""
        cols = []
        for i, d in enumerate(self.torsion):
            col = [0] * self.ngens
            col[self.rank + i] = d
            cols.append(col)
        return IntMatrix.from_cols(cols, nrows=self.ngens)

    def torsion_elements(self) -> list[Vec]:
        """All elements when the group is finite (rank 0 of the torsion part)."""
        out = [()]
        for d in self.torsion:
            out = [t + (x,) for t in out for x in range(d)]
        return [(0,) * self.rank + t for t in out]

    def __eq__(self, other):
        return (isinstance(other, AbelianGroup) and self.rank == other.rank
                and self.torsion == other.torsion)

    def __hash__(self):
        return hash((self.rank, self.torsion))

    def __repr__(self):
        return "AbelianGroup(%d, %r)" % (self.rank, list(self.torsion))

    def describe(self) -> str:
        parts = []
        if self.rank or not self.torsion:
            parts.append("Z^%d" % self.rank)
        parts.extend("Z/%d" % d for d in self.torsion)
        return "+".join(parts)


class GroupHom:
    """Homomorphism of AbelianGroups given by its matrix on canonical gens."""

    __slots__ = ("domain", "codomain", "matrix", "_presys")

    def __init__(self, domain: AbelianGroup, codomain: AbelianGroup, matrix: IntMatrix):
        if matrix.rows != codomain.ngens or matrix.cols != domain.ngens:
            raise ValueError("matrix shape does not match groups")
        self.domain = domain
        self.codomain = codomain
        self.matrix = matrix
        self._presys = None
        for i, d in enumerate(domain.torsion):
            img = codomain.scale(d, matrix.col(domain.rank + i))
            if not codomain.is_zero(img):
                raise ValueError("map not well defined on torsion generator %d" % i)

    @classmethod
    def from_gen_images(cls, domain, codomain, images) -> "GroupHom":
        images = [codomain.reduce(v) for v in images]
        if len(images) != domain.ngens:
            raise ValueError("need one image per generator")
        return cls(domain, codomain, IntMatrix.from_cols(images, nrows=codomain.ngens))

    @classmethod
    def identity(cls, group) -> "GroupHom":
        return cls(group, group, IntMatrix.identity(group.ngens))

    def __call__(self, v) -> Vec:
        return self.codomain.reduce(self.matrix.apply(self.domain.reduce(v)))

    def compose(self, other: "GroupHom") -> "GroupHom":
        """self o other."""
        if other.codomain != self.domain:
            raise ValueError("domains do not line up")
        return GroupHom.from_gen_images(
            other.domain, self.codomain,
            [self(other(g)) for g in other.domain.gens()])

    def __eq__(self, other):
        return (isinstance(other, GroupHom) and self.domain == other.domain
                and self.codomain == other.codomain
                and all(self(g) == other(g) for g in self.domain.gens()))

    def __hash__(self):
        return hash((self.domain, self.codomain,
                     tuple(self(g) for g in self.domain.gens())))

    def _augmented(self) -> IntMatrix:
        """[matrix | codomain relations] as one matrix."""
        rel = self.codomain.relation_matrix()
        cols = [self.matrix.col(j) for j in range(self.matrix.cols)]
        cols += [rel.col(j) for j in range(rel.cols)]
        return IntMatrix.from_cols(cols, nrows=self.codomain.ngens)

    def preimage(self, b) -> Optional[Vec]:
        """Some x with self(x) = b, or None."""
        b = self.codomain.reduce(b)
        if self._presys is None:
            self._presys = LinearSystem(self._augmented())
        sol = self._presys.solve(b)
        if sol is None:
            return None
        return self.domain.reduce(sol[: self.domain.ngens])

    def kernel_elements(self) -> list[Vec]:
        """Elements generating the kernel subgroup of the domain."""
        aug = self._augmented()
        out = []
        for k in kernel(aug):
            x = self.domain.reduce(k[: self.domain.ngens])
            if not self.domain.is_zero(x):
                out.append(x)
        return out

    def image_rank(self) -> int:
        rel = self.codomain.relation_matrix()
        aug = self._augmented()
        return rank(aug) - rank(rel)

    def is_injective(self) -> bool:
        return not self.kernel_elements()

    def is_surjective(self) -> bool:
        grp, _ = cokernel(self)
        return grp.is_trivial()

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def inverse(self) -> "GroupHom":
        if not self.is_isomorphism():
            raise ValueError("not an isomorphism")
        return GroupHom.from_gen_images(
            self.codomain, self.domain,
            [self.preimage(g) for g in self.codomain.gens()])

    def __repr__(self):
        return "GroupHom(%s -> %s)" % (self.domain.describe(), self.codomain.describe())


@dataclass(frozen=True)
class HomProfile:
    injective: bool
    surjective: bool
    ker_torsion: bool
    coker_torsion: bool


def hom_profile(f: GroupHom) -> HomProfile:
    """Exact kernel/cokernel flags; *_torsion means the group has rank 0."""
    coker, _ = cokernel(f)
    return HomProfile(
        injective=f.is_injective(),
        surjective=coker.is_trivial(),
        ker_torsion=(f.image_rank() == f.domain.rank),
        coker_torsion=(coker.rank == 0),
    )


def _sign_normalize(u_rows, ui, keep_free):
    """Flip signs of free rows of u (and matching ui columns) so the first
    nonzero entry of each kept free row is positive."""
    for i in keep_free:
        row = u_rows[i]
        lead = next((x for x in row if x != 0), 0)
        if lead < 0:
            u_rows[i] = [-x for x in row]
            for r in ui:
                r[i] = -r[i]


def quotient_with_projection(group: AbelianGroup, elements) -> tuple[AbelianGroup, GroupHom]:
    """Quotient of `group` by the subgroup generated by `elements`.

    Returns the quotient in invariant-factor form and the projection hom.
    """
    n = group.ngens
    rel = group.relation_matrix()
    cols = [rel.col(j) for j in range(rel.cols)]
    cols += [group.reduce(e) for e in elements]
    mat = IntMatrix.from_cols(cols, nrows=n)
    u, s, _, ui, _ = _snf_full(mat)
    dia = diagonal(s)
    dvals = [dia[i] if i < len(dia) else 0 for i in range(n)]
    free = [i for i in range(n) if dvals[i] == 0]
    tors = [i for i in range(n) if dvals[i] >= 2]
    u_rows = [list(u.row(i)) for i in range(n)]
    ui_rows = [list(ui.row(i)) for i in range(n)]
    _sign_normalize(u_rows, ui_rows, free)
    q = AbelianGroup(len(free), tuple(dvals[i] for i in tors))
    proj_rows = [u_rows[i] for i in free] + [u_rows[i] for i in tors]
    proj = GroupHom(group, q,
                    IntMatrix.from_rows(proj_rows) if proj_rows else IntMatrix(0, n, []))
    return q, proj


def cokernel(f: GroupHom) -> tuple[AbelianGroup, GroupHom]:
    """coker(f) in invariant-factor form, with the quotient map."""
    images = [f.matrix.col(j) for j in range(f.matrix.cols)]
    return quotient_with_projection(f.codomain, images)


class Subgroup:
    """Subgroup of an ambient AbelianGroup, with inclusion and coordinates."""

    __slots__ = ("ambient", "group", "inclusion", "_coord_aug", "_u_rows", "_keep",
                 "_k", "_system")

    def __init__(self, ambient: AbelianGroup, elements):
        elements = [ambient.reduce(e) for e in elements]
        k = len(elements)
        n = ambient.ngens
        smat = IntMatrix.from_cols(elements, nrows=n) if k else IntMatrix(n, 0, [])
        rel = ambient.relation_matrix()
        aug_cols = [smat.col(j) for j in range(k)] + [rel.col(j) for j in range(rel.cols)]
        aug = IntMatrix.from_cols(aug_cols, nrows=n) if aug_cols else IntMatrix(n, 0, [])
        kerbasis = [kv[:k] for kv in kernel(aug)] if aug.cols else []
        kmat = IntMatrix.from_cols(kerbasis, nrows=k) if kerbasis else IntMatrix(k, 0, [])
        u, s, _, ui, _ = _snf_full(kmat)
        dia = diagonal(s)
        dvals = [dia[i] if i < len(dia) else 0 for i in range(k)]
        free = [i for i in range(k) if dvals[i] == 0]
        tors = [i for i in range(k) if dvals[i] >= 2]
        u_rows = [list(u.row(i)) for i in range(k)]
        ui_rows = [list(ui.row(i)) for i in range(k)]
        _sign_normalize(u_rows, ui_rows, free)
        self.ambient = ambient
        self.group = AbelianGroup(len(free), tuple(dvals[i] for i in tors))
        keep = free + tors
        incl_cols = []
        for i in keep:
            col = [ui_rows[r][i] for r in range(k)]
            img = ambient.zero()
            for c, e in zip(col, elements):
                img = ambient.add(img, ambient.scale(c, e))
            incl_cols.append(img)
        self.inclusion = GroupHom.from_gen_images(self.group, ambient, incl_cols)
        self._coord_aug = aug
        self._u_rows = u_rows
        self._keep = keep
        self._k = k
        self._system = None

    def coords(self, a) -> Optional[Vec]:
        """Coordinates of ambient element a in the subgroup, or None."""
        a = self.ambient.reduce(a)
        if self._k == 0:
            return self.group.zero() if self.ambient.is_zero(a) else None
        if self._system is None:
            self._system = LinearSystem(self._coord_aug)
        sol = self._system.solve(a)
        if sol is None:
            return None
        x = sol[: self._k]
        w = [sum(self._u_rows[i][j] * x[j] for j in range(self._k)) for i in self._keep]
        return self.group.reduce(w)

    def contains(self, a) -> bool:
        return self.coords(a) is not None

    def is_full(self) -> bool:
        return all(self.contains(g) for g in self.ambient.gens())

    def is_trivial(self) -> bool:
        return self.group.is_trivial()


def induced_hom(f: GroupHom, proj_dom: GroupHom, proj_cod: GroupHom) -> GroupHom:
    """The hom A' -> B' induced by f: A -> B on quotients A -> A', B -> B'.

    Caller must ensure f maps ker(proj_dom) into ker(proj_cod); the result is
    checked to commute on generators.
    """
    cols = []
    for g in proj_dom.codomain.gens():
        a = proj_dom.preimage(g)
        if a is None:
            raise ValueError("projection is not surjective")
        cols.append(proj_cod(f(a)))
    out = GroupHom.from_gen_images(proj_dom.codomain, proj_cod.codomain, cols)
    for g in f.domain.gens():
        if out(proj_dom(g)) != proj_cod(f(g)):
            raise ValueError("induced map does not commute")
    return out


def direct_sum(a: AbelianGroup, b: AbelianGroup):
    """(W, incl_a, incl_b, proj_a, proj_b) with W = a + b in canonical form."""
    chain = a.torsion + b.torsion
    chained = all(chain[i + 1] % chain[i] == 0 for i in range(len(chain) - 1))
    if chained:
        w = AbelianGroup(a.rank + b.rank, chain)

        def embed(group, free_off, tors_off):
            cols = []
            for i in range(group.ngens):
                col = [0] * w.ngens
                if i < group.rank:
                    col[free_off + i] = 1
                else:
                    col[w.rank + tors_off + (i - group.rank)] = 1
                cols.append(col)
            return GroupHom.from_gen_images(group, w, cols)

        incl_a = embed(a, 0, 0)
        incl_b = embed(b, a.rank, len(a.torsion))

        def project(group, free_off, tors_off):
            rows = []
            for i in range(group.ngens):
                row = [0] * w.ngens
                if i < group.rank:
                    row[free_off + i] = 1
                else:
                    row[w.rank + tors_off + (i - group.rank)] = 1
                rows.append(row)
            return GroupHom(w, group,
                            IntMatrix.from_rows(rows) if rows else IntMatrix(0, w.ngens, []))

        return w, incl_a, incl_b, project(a, 0, 0), project(b, a.rank, len(a.torsion))

    # General case: canonicalize Z^(na+nb) modulo both torsion lattices.
    n = a.ngens + b.ngens
    big = AbelianGroup(n)
    rels = []
    for i, d in enumerate(a.torsion):
        col = [0] * n
        col[a.rank + i] = d
        rels.append(col)
    for i, d in enumerate(b.torsion):
        col = [0] * n
        col[a.ngens + b.rank + i] = d
        rels.append(col)
    w, proj = quotient_with_projection(big, rels)

    def incl(group, offset):
        cols = []
        for i in range(group.ngens):
            col = [0] * n
            col[offset + i] = 1
            cols.append(proj(col))
        return GroupHom.from_gen_images(group, w, cols)

    incl_a = incl(a, 0)
    incl_b = incl(b, a.ngens)

    def project(group, offset):
        cols = []
        for g in w.gens():
            lift = proj.preimage(g)
            cols.append(group.reduce(lift[offset : offset + group.ngens]))
        return GroupHom.from_gen_images(w, group, cols)

    return w, incl_a, incl_b, project(a, 0), project(b, a.ngens)


def primitive(v: Sequence[int]) -> Vec:
    """v divided by the gcd of its entries (0 stays 0)."""
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    if g <= 1:
        return _as_vec(v)
    return tuple(x // g for x in v)
