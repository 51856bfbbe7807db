"""Command-line front end: parse monoid/fan documents, run operations,
emit deterministic structured-text reports (optionally JSON or DOT).

The input language is line oriented so that worked examples transcribe
one statement per line:

    monoid P embedded ambient Z^2 gens [1,0] [1,2]
    monoid Q presented gens 2 rel (2,0)=(0,2)
    ideal I of P gens [1,0] [1,2]
    hom h from P to N images [2] [3]
    fan F spec P
    fan G charts P Q glue (0,1) faces {0} {1} map [1,0] [0,-1]
    fan H product F F
    fan E projspace 2
    run saturate P

Exit codes: 0 success, 1 domain error, 2 parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from .lattice import AbelianGroup, GroupHom
from .monoid import (
    EmbeddedMonoid,
    InconclusiveError,
    MonoidError,
    MonoidHom,
    MonoidIdeal,
    PresentedMonoid,
    hom_predicates,
)
from . import boundary as boundary_mod
from . import fanspace
from . import projblow
from . import realize as realize_mod
from . import resolve as resolve_mod
from .fanspace import FanError, FanMap, FanSpace, Gluing


class ParseFailure(Exception):
    def __init__(self, diagnostics):
        self.diagnostics = diagnostics
        super().__init__("; ".join(d.render() for d in diagnostics))


@dataclass
class Diagnostic:
    line: int
    col: int
    message: str

    def render(self) -> str:
        return "line %d, col %d: %s" % (self.line, self.col, self.message)


class DomainFailure(Exception):
    def __init__(self, code, message):
        self.code = code
        self.message = message
        super().__init__(message)

    def render(self) -> str:
        return "error[%s]: %s" % (self.code, self.message)


@dataclass
class Document:
    monoids: dict = field(default_factory=dict)      # name -> EmbeddedMonoid
    presented: dict = field(default_factory=dict)    # name -> PresentedMonoid
    ideals: dict = field(default_factory=dict)       # name -> MonoidIdeal
    homs: dict = field(default_factory=dict)         # name -> MonoidHom
    fans: dict = field(default_factory=dict)         # name -> FanSpace
    runs: list = field(default_factory=list)         # (command, args)


def _tokens(line):
    """Tokens with 1-based column positions."""
    out = []
    i = 0
    while i < len(line):
        if line[i].isspace():
            i += 1
            continue
        j = i
        while j < len(line) and not line[j].isspace():
            j += 1
        out.append((line[i:j], i + 1))
        i = j
    return out


def _parse_vec(tok, lineno, col):
    if not (tok.startswith("[") and tok.endswith("]")):
        raise ParseFailure([Diagnostic(lineno, col, "malformed vector %r" % tok)])
    body = tok[1:-1]
    if body == "":
        return ()
    try:
        return tuple(int(x) for x in body.split(","))
    except ValueError:
        raise ParseFailure([Diagnostic(lineno, col, "malformed vector %r" % tok)])


def _parse_set(tok, lineno, col):
    if not (tok.startswith("{") and tok.endswith("}")):
        raise ParseFailure([Diagnostic(lineno, col, "malformed index set %r" % tok)])
    body = tok[1:-1]
    if body == "":
        return ()
    try:
        return tuple(int(x) for x in body.split(","))
    except ValueError:
        raise ParseFailure([Diagnostic(lineno, col, "malformed index set %r" % tok)])


def _parse_relation(tok, lineno, col):
    if "=" not in tok:
        raise ParseFailure([Diagnostic(lineno, col, "malformed relation %r" % tok)])
    left, right = tok.split("=", 1)

    def side(s):
        if not (s.startswith("(") and s.endswith(")")):
            raise ParseFailure([Diagnostic(lineno, col, "malformed relation %r" % tok)])
        return tuple(int(x) for x in s[1:-1].split(","))

    try:
        return side(left), side(right)
    except ValueError:
        raise ParseFailure([Diagnostic(lineno, col, "malformed relation %r" % tok)])


def _parse_ambient(tok, lineno, col):
    rank = None
    torsion = []
    for part in tok.split("+"):
        if part.startswith("Z^"):
            if rank is not None:
                raise ParseFailure([Diagnostic(lineno, col, "two free parts in %r" % tok)])
            rank = int(part[2:])
        elif part == "Z":
            if rank is not None:
                raise ParseFailure([Diagnostic(lineno, col, "two free parts in %r" % tok)])
            rank = 1
        elif part.startswith("Z/"):
            torsion.append(int(part[2:]))
        else:
            raise ParseFailure([Diagnostic(lineno, col, "bad ambient %r" % tok)])
    try:
        return AbelianGroup(rank or 0, torsion)
    except ValueError as e:
        raise ParseFailure([Diagnostic(lineno, col, str(e))])


def _embedded_of(doc: Document, name: str, lineno=0, col=0):
    if name in doc.monoids:
        return doc.monoids[name]
    if name in doc.presented:
        emb, _ = doc.presented[name].integralize()
        return emb
    raise ParseFailure([Diagnostic(lineno, col, "unresolved monoid %r" % name)])


def parse(text: str) -> Document:
    doc = Document()
    diagnostics = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = _tokens(line)
        if not toks:
            continue
        try:
            _parse_statement(doc, toks, lineno)
        except ParseFailure as e:
            diagnostics.extend(e.diagnostics)
    if diagnostics:
        raise ParseFailure(diagnostics)
    return doc


def _expect(toks, i, lineno, what=None):
    if i >= len(toks):
        last_col = toks[-1][1] + len(toks[-1][0]) if toks else 1
        raise ParseFailure([Diagnostic(lineno, last_col,
                                       "unexpected end of statement"
                                       + (" (expected %s)" % what if what else ""))])
    return toks[i]


def _parse_statement(doc: Document, toks, lineno):
    head, col0 = toks[0]
    if head == "monoid":
        name = _expect(toks, 1, lineno, "name")[0]
        kind, kcol = _expect(toks, 2, lineno, "embedded|presented")
        if kind == "embedded":
            kw, kwcol = _expect(toks, 3, lineno, "ambient")
            if kw != "ambient":
                raise ParseFailure([Diagnostic(lineno, kwcol, "expected 'ambient'")])
            atok, acol = _expect(toks, 4, lineno, "ambient spec")
            amb = _parse_ambient(atok, lineno, acol)
            kw, kwcol = _expect(toks, 5, lineno, "gens")
            if kw != "gens":
                raise ParseFailure([Diagnostic(lineno, kwcol, "expected 'gens'")])
            gens = []
            for tok, col in toks[6:]:
                v = _parse_vec(tok, lineno, col)
                if len(v) != amb.ngens:
                    raise ParseFailure([Diagnostic(
                        lineno, col, "vector %r has %d coordinates, ambient needs %d"
                        % (tok, len(v), amb.ngens))])
                gens.append(v)
            doc.monoids[name] = EmbeddedMonoid(amb, gens)
        elif kind == "presented":
            kw, kwcol = _expect(toks, 3, lineno, "gens")
            if kw != "gens":
                raise ParseFailure([Diagnostic(lineno, kwcol, "expected 'gens'")])
            ntok, ncol = _expect(toks, 4, lineno, "generator count")
            try:
                n = int(ntok)
            except ValueError:
                raise ParseFailure([Diagnostic(lineno, ncol, "bad generator count")])
            rels = []
            i = 5
            while i < len(toks):
                kw, kwcol = toks[i]
                if kw != "rel":
                    raise ParseFailure([Diagnostic(lineno, kwcol, "expected 'rel'")])
                rtok, rcol = _expect(toks, i + 1, lineno, "relation")
                a, b = _parse_relation(rtok, lineno, rcol)
                if len(a) != n or len(b) != n:
                    raise ParseFailure([Diagnostic(lineno, rcol,
                                                   "relation arity mismatch")])
                rels.append((a, b))
                i += 2
            try:
                doc.presented[name] = PresentedMonoid(n, rels)
            except MonoidError as e:
                raise ParseFailure([Diagnostic(lineno, col0, str(e))])
        else:
            raise ParseFailure([Diagnostic(lineno, kcol,
                                           "expected 'embedded' or 'presented'")])
    elif head == "ideal":
        name = _expect(toks, 1, lineno, "name")[0]
        kw, kwcol = _expect(toks, 2, lineno, "of")
        if kw != "of":
            raise ParseFailure([Diagnostic(lineno, kwcol, "expected 'of'")])
        mname, mcol = _expect(toks, 3, lineno, "monoid name")
        parent = _embedded_of(doc, mname, lineno, mcol)
        kw, kwcol = _expect(toks, 4, lineno, "gens")
        if kw != "gens":
            raise ParseFailure([Diagnostic(lineno, kwcol, "expected 'gens'")])
        gens = []
        for tok, col in toks[5:]:
            v = _parse_vec(tok, lineno, col)
            if len(v) != parent.ambient.ngens:
                raise ParseFailure([Diagnostic(lineno, col, "dimension mismatch")])
            if not parent.contains(v):
                raise ParseFailure([Diagnostic(
                    lineno, col, "ideal generator %r is not in the monoid" % tok)])
            gens.append(v)
        doc.ideals[name] = MonoidIdeal(parent, gens)
    elif head == "hom":
        name = _expect(toks, 1, lineno, "name")[0]
        kw, kwcol = _expect(toks, 2, lineno, "from")
        if kw != "from":
            raise ParseFailure([Diagnostic(lineno, kwcol, "expected 'from'")])
        aname, acol = _expect(toks, 3, lineno, "monoid name")
        kw, kwcol = _expect(toks, 4, lineno, "to")
        if kw != "to":
            raise ParseFailure([Diagnostic(lineno, kwcol, "expected 'to'")])
        bname, bcol = _expect(toks, 5, lineno, "monoid name")
        dom = _embedded_of(doc, aname, lineno, acol)
        cod = _embedded_of(doc, bname, lineno, bcol)
        kw, kwcol = _expect(toks, 6, lineno, "images")
        if kw != "images":
            raise ParseFailure([Diagnostic(lineno, kwcol, "expected 'images'")])
        images = []
        for tok, col in toks[7:]:
            v = _parse_vec(tok, lineno, col)
            if len(v) != cod.ambient.ngens:
                raise ParseFailure([Diagnostic(lineno, col, "dimension mismatch")])
            if not cod.contains(v):
                raise ParseFailure([Diagnostic(
                    lineno, col, "generator image %r is not in the codomain" % tok)])
            images.append(v)
        if len(images) != len(dom.gens):
            raise ParseFailure([Diagnostic(
                lineno, col0, "need %d images, got %d" % (len(dom.gens), len(images)))])
        gm = _hom_from_images(dom, cod, images, lineno, col0)
        doc.homs[name] = MonoidHom(dom, cod, gm, check=False)
    elif head == "fan":
        name = _expect(toks, 1, lineno, "name")[0]
        kind, kcol = _expect(toks, 2, lineno, "spec|charts|product|projspace")
        if kind == "spec":
            mname, mcol = _expect(toks, 3, lineno, "monoid name")
            doc.fans[name] = fanspace.spec(_embedded_of(doc, mname, lineno, mcol))
        elif kind == "product":
            a, acol = _expect(toks, 3, lineno, "fan name")
            b, bcol = _expect(toks, 4, lineno, "fan name")
            for nm, cc in ((a, acol), (b, bcol)):
                if nm not in doc.fans:
                    raise ParseFailure([Diagnostic(lineno, cc, "unresolved fan %r" % nm)])
            doc.fans[name] = fanspace.product(doc.fans[a], doc.fans[b])
        elif kind == "projspace":
            ntok, ncol = _expect(toks, 3, lineno, "dimension")
            try:
                n = int(ntok)
            except ValueError:
                raise ParseFailure([Diagnostic(lineno, ncol, "bad dimension")])
            doc.fans[name] = fanspace.proj_space(n)
        elif kind == "charts":
            i = 3
            charts = []
            while i < len(toks) and toks[i][0] != "glue":
                mname, mcol = toks[i]
                charts.append(_embedded_of(doc, mname, lineno, mcol))
                i += 1
            gluings = []
            while i < len(toks):
                kw, kwcol = toks[i]
                if kw != "glue":
                    raise ParseFailure([Diagnostic(lineno, kwcol, "expected 'glue'")])
                pair_tok, pcol = _expect(toks, i + 1, lineno, "(i,j)")
                try:
                    pair = tuple(int(x) for x in pair_tok.strip("()").split(","))
                    ci, cj = pair
                except Exception:
                    raise ParseFailure([Diagnostic(lineno, pcol, "bad chart pair")])
                kw2, k2col = _expect(toks, i + 2, lineno, "faces")
                if kw2 != "faces":
                    raise ParseFailure([Diagnostic(lineno, k2col, "expected 'faces'")])
                fa_tok, fa_col = _expect(toks, i + 3, lineno, "face set")
                fa = _parse_set(fa_tok, lineno, fa_col)
                fb_tok, fb_col = _expect(toks, i + 4, lineno, "face set")
                fb = _parse_set(fb_tok, lineno, fb_col)
                i += 5
                gmap = None
                if i < len(toks) and toks[i][0] == "map":
                    i += 1
                    cols = []
                    while i < len(toks) and toks[i][0].startswith("["):
                        vtok, vcol = toks[i]
                        cols.append(_parse_vec(vtok, lineno, vcol))
                        i += 1
                    try:
                        gmap = GroupHom.from_gen_images(
                            charts[ci].ambient, charts[cj].ambient, cols)
                    except (ValueError, IndexError) as e:
                        raise ParseFailure([Diagnostic(lineno, kwcol, str(e))])
                gluings.append(Gluing(ci, cj, fa, fb, gmap))
            try:
                doc.fans[name] = fanspace.glue(charts, gluings).space
            except (FanError, MonoidError) as e:
                raise ParseFailure([Diagnostic(lineno, col0, str(e))])
        else:
            raise ParseFailure([Diagnostic(lineno, kcol, "unknown fan form %r" % kind)])
    elif head == "run":
        cmd = _expect(toks, 1, lineno, "command")[0]
        doc.runs.append((cmd, [t for t, _ in toks[2:]]))
    else:
        raise ParseFailure([Diagnostic(lineno, col0, "unknown statement %r" % head)])


def _hom_from_images(dom, cod, images, lineno, col):
    """Group map on the ambients agreeing with the generator images."""
    from .lattice import IntMatrix, solve

    n = dom.ambient.ngens
    if not dom.gens:
        return GroupHom(dom.ambient, cod.ambient, IntMatrix(cod.ambient.ngens, 0, []))
    cols_mat = IntMatrix.from_cols(list(dom.gens), nrows=n)
    rel = dom.ambient.relation_matrix()
    aug = IntMatrix.from_cols(
        [cols_mat.col(j) for j in range(cols_mat.cols)]
        + [rel.col(j) for j in range(rel.cols)], nrows=n)
    out_cols = []
    for gvec in dom.ambient.gens():
        sol = solve(aug, gvec)
        if sol is None:
            raise ParseFailure([Diagnostic(
                lineno, col, "generators do not span the ambient; cannot "
                "extend the hom (declare the monoid on its span)")])
        img = cod.ambient.zero()
        for c, target in zip(sol[: len(images)], images):
            img = cod.ambient.add(img, cod.ambient.scale(c, target))
        out_cols.append(img)
    try:
        gh = GroupHom.from_gen_images(dom.ambient, cod.ambient, out_cols)
    except ValueError as e:
        raise ParseFailure([Diagnostic(lineno, col, str(e))])
    for g, img in zip(dom.gens, images):
        if gh(g) != cod.ambient.reduce(img):
            raise ParseFailure([Diagnostic(lineno, col,
                                           "hom images are inconsistent")])
    return gh


# -- report helpers ------------------------------------------------------------


def _count(n, noun) -> str:
    return "%d %s%s" % (n, noun, "" if n == 1 else "s")


def _fmt_vec(v) -> str:
    return "[%s]" % ",".join(str(x) for x in v)


def _fmt_set(t) -> str:
    return "{%s}" % ",".join(str(x) for x in t)


def _pretty(m: EmbeddedMonoid) -> str:
    if m.is_trivial():
        return "0"
    if m.is_group():
        return m.span.group.describe()
    if m.is_sharp and m.is_free():
        r = m.span.group.rank
        return "N" if r == 1 else "N^%d" % r
    return "monoid(%s)" % m.describe()


def _monoid_json(m: EmbeddedMonoid):
    return {"ambient": m.ambient.describe(), "gens": [list(g) for g in m.gens]}


def _resolve_operand(doc, name, lineno=0):
    for table, kind in ((doc.fans, "fan"), (doc.homs, "hom"),
                        (doc.monoids, "monoid"), (doc.presented, "presented"),
                        (doc.ideals, "ideal")):
        if name in table:
            return kind, table[name]
    raise DomainFailure("E_UNRESOLVED", "no definition named %r" % name)


def _as_fan(doc, name):
    kind, obj = _resolve_operand(doc, name)
    if kind == "fan":
        return obj
    if kind in ("monoid", "presented"):
        return fanspace.spec(_embedded_of(doc, name))
    raise DomainFailure("E_OPERAND", "%r is not a fan or monoid" % name)


def _as_monoid(doc, name):
    kind, obj = _resolve_operand(doc, name)
    if kind == "monoid":
        return obj, None
    if kind == "presented":
        emb, images = obj.integralize()
        return emb, (obj, images)
    raise DomainFailure("E_OPERAND", "%r is not a monoid" % name)


def _integralization_lines(name, info):
    if info is None:
        return []
    _, images = info
    emb_desc = "monoid(%s)" % info[0].integralize()[0].describe()
    return ["%s^int = %s" % (name, emb_desc),
            "generator images: %s" % " ".join(_fmt_vec(v) for v in images)]


# -- command implementations ------------------------------------------------------


def cmd_faces(doc, args, flags):
    name = args[0]
    m, info = _as_monoid(doc, name)
    lines = _integralization_lines(name, info)
    sets = m.face_index_sets
    lines.append("faces of %s: %s" % (name, _count(len(sets), "face")))
    for t in sets:
        lines.append(_fmt_set(t))
    tree = {"command": "faces", "monoid": name, "faces": [list(t) for t in sets]}
    return lines, tree


def cmd_units(doc, args, flags):
    name = args[0]
    m, info = _as_monoid(doc, name)
    lines = _integralization_lines(name, info)
    u = m.units()
    gens = [u.inclusion(g) for g in u.group.gens()]
    gen_str = " ".join(_fmt_vec(g) for g in gens) if gens else "(none)"
    lines.append("%s* = %s, generators %s" % (name, u.group.describe(), gen_str))
    tree = {"command": "units", "monoid": name, "units": u.group.describe(),
            "generators": [list(g) for g in gens]}
    return lines, tree


def cmd_sharpen(doc, args, flags):
    name = args[0]
    m, info = _as_monoid(doc, name)
    lines = _integralization_lines(name, info)
    u = m.units()
    gens = [u.inclusion(g) for g in u.group.gens()]
    gen_str = " ".join(_fmt_vec(g) for g in gens) if gens else "(none)"
    lines.append("%s* = %s, generators %s" % (name, u.group.describe(), gen_str))
    sharp, proj = m.sharpen()
    lines.append("sharpening: %s" % _pretty(sharp))
    f = fanspace.spec_map(proj)
    homeo = (sorted(f.point_map) == list(range(f.target.npoints))
             and len(set(f.point_map)) == f.source.npoints)
    lines.append("Spec homeomorphism: %s" % str(homeo).lower())
    tree = {"command": "sharpen", "monoid": name,
            "units": u.group.describe(), "sharpening": _monoid_json(sharp),
            "spec_homeomorphism": homeo}
    return lines, tree


def cmd_saturate(doc, args, flags):
    name = args[0]
    m, info = _as_monoid(doc, name)
    lines = _integralization_lines(name, info)
    sat, _ = m.saturate()
    new = [g for g in sat.gens if not m.contains(g)]
    new_str = " ".join(_fmt_vec(g) for g in new) if new else "(none)"
    lines.append("%s^sat = %s, new generators: %s" % (name, _pretty(sat), new_str))
    tree = {"command": "saturate", "monoid": name, "saturation": _monoid_json(sat),
            "new_generators": [list(g) for g in new]}
    return lines, tree


def _fan_report(name, x: FanSpace, affine_faces=None):
    lines = ["%s: %s" % (name, _count(x.npoints, "point"))]
    for i in range(x.npoints):
        extra = ""
        if affine_faces is not None:
            extra = "face %s, " % _fmt_set(affine_faces[i])
        lines.append("%s: %sstalk %s, sharpened %s"
                     % (x.labels[i], extra, _pretty(x.stalks[i]),
                        _pretty(x.sharpened_stalk(i))))
    cov = x.covers()
    if cov:
        lines.append("order: " + ", ".join(
            "%s < %s" % (x.labels[i], x.labels[j]) for i, j in cov))
    if x.is_fs():
        lines.append("global sections: %s" % _pretty(x.global_sections()))
    tree = {"points": [
        {"label": x.labels[i], "stalk": _monoid_json(x.stalks[i]),
         "sharpened": _monoid_json(x.sharpened_stalk(i))}
        for i in range(x.npoints)],
        "order": [[x.labels[i], x.labels[j]] for i, j in cov]}
    return lines, tree


def cmd_spec(doc, args, flags):
    name = args[0]
    kind, obj = _resolve_operand(doc, name)
    if kind == "hom":
        f = fanspace.spec_map(obj)
        lines = ["Spec %s: %d points -> %d points"
                 % (name, f.source.npoints, f.target.npoints)]
        pm = ", ".join("%s->%s" % (f.source.labels[i], f.target.labels[f.point_map[i]])
                       for i in range(f.source.npoints))
        lines.append("point map: %s" % pm)
        image = sorted(set(f.point_map))
        lines.append("image: %s (%d of %d points)"
                     % (_fmt_set(tuple(image)), len(image), f.target.npoints))
        tree = {"command": "spec", "hom": name,
                "point_map": list(f.point_map), "image": image}
        return lines, tree
    if kind == "fan":
        lines, sub = _fan_report("fan %s" % name, obj)
        tree = {"command": "spec", "fan": name}
        tree.update(sub)
        if flags.get("dot"):
            return obj.to_dot().rstrip("\n").split("\n"), tree
        return lines, tree
    m, info = _as_monoid(doc, name)
    x = fanspace.spec(m)
    faces = m.face_index_sets
    pre = _integralization_lines(name, info)
    lines, sub = _fan_report("Spec %s" % name, x, affine_faces=faces)
    tree = {"command": "spec", "monoid": name}
    tree.update(sub)
    if flags.get("dot"):
        return x.to_dot().rstrip("\n").split("\n"), tree
    return pre + lines, tree


def _ideal_of(doc, name):
    kind, obj = _resolve_operand(doc, name)
    if kind != "ideal":
        raise DomainFailure("E_OPERAND", "%r is not an ideal" % name)
    return obj


def cmd_blowup(doc, args, flags):
    mname, iname = args[0], args[1]
    m, _ = _as_monoid(doc, mname)
    ideal = _ideal_of(doc, iname)
    if ideal.parent != m:
        raise DomainFailure("E_OPERAND", "ideal %r does not live on %r" % (iname, mname))
    f = projblow.blowup(m, ideal)
    bl = f.source
    lines = ["Bl_%s(%s) -> Spec %s: %d charts, %d points"
             % (iname, mname, mname, len(bl.closed_points()), bl.npoints)]
    for c, g in zip(bl.closed_points(), ideal.gens):
        st = bl.stalks[c]
        lines.append("chart at %s: gens %s, free: %s"
                     % (_fmt_vec(g), " ".join(_fmt_vec(v) for v in st.gens),
                        str(st.is_free()).lower()))
    lines.append("group isomorphism of fans: %s"
                 % str(f.is_group_iso_of_fans()).lower())
    tree = {"command": "blowup", "monoid": mname, "ideal": iname,
            "charts": [_monoid_json(bl.stalks[c]) for c in bl.closed_points()],
            "points": bl.npoints,
            "group_iso": f.is_group_iso_of_fans()}
    return lines, tree


def cmd_proj(doc, args, flags):
    mname, iname = args[0], args[1]
    m, _ = _as_monoid(doc, mname)
    ideal = _ideal_of(doc, iname)
    if ideal.parent != m:
        raise DomainFailure("E_OPERAND", "ideal %r does not live on %r" % (iname, mname))
    r = projblow.rees(m, ideal)
    x = projblow.proj(r)
    lines = ["Proj of the Rees monoid of (%s, %s): %d points" % (mname, iname, x.npoints)]
    for c in x.closed_points():
        lines.append("chart %s: gens %s"
                     % (x.labels[c], " ".join(_fmt_vec(v) for v in x.stalks[c].gens)))
    tree = {"command": "proj", "monoid": mname, "ideal": iname,
            "points": x.npoints,
            "charts": [_monoid_json(x.stalks[c]) for c in x.closed_points()]}
    return lines, tree


def cmd_classify(doc, args, flags):
    name = args[0]
    kind, h = _resolve_operand(doc, name)
    if kind != "hom":
        raise DomainFailure("E_OPERAND", "%r is not a hom" % name)
    from .refine import classify

    rep = classify(h)
    lines = ["R = monoid(%s)" % rep.r_monoid.describe()]
    for flag in ("exact", "refinement", "strong", "good"):
        lines.append("%s: %s" % (flag, str(getattr(rep, flag)).lower()))
    tree = {"command": "classify-refinement", "hom": name,
            "R": _monoid_json(rep.r_monoid),
            "exact": rep.exact, "refinement": rep.refinement,
            "strong": rep.strong, "good": rep.good}
    return lines, tree


def cmd_resolve(doc, args, flags):
    name = args[0]
    x = _as_fan(doc, name)
    cert = resolve_mod.resolve_fan(x)
    ok = resolve_mod.verify_certificate(cert)
    out = cert.output
    lines = ["resolution of %s: %d points -> %d points"
             % (name, x.npoints, out.npoints)]
    lines.append("maximal charts: %d, all free: %s"
                 % (len(out.closed_points()),
                    str(all(out.stalks[c].is_free() for c in out.closed_points())).lower()))
    lines.append("steps: %d" % len(cert.steps))
    for s in cert.steps:
        extra = ""
        if s.blowup_ideal is not None:
            extra = ", blowup ideal gens %s" % " ".join(_fmt_vec(v) for v in s.blowup_ideal)
        lines.append("  %s at (%s) in chart %s%s"
                     % (s.kind, ",".join(str(v) for v in s.ray), s.chart_label, extra))
    lines.append("verified: %s" % str(ok).lower())
    tree = {"command": "resolve", "fan": name, "points": out.npoints,
            "steps": [{"kind": s.kind, "ray": list(s.ray), "chart": s.chart_label}
                      for s in cert.steps],
            "verified": ok}
    if flags.get("dot"):
        return out.to_dot().rstrip("\n").split("\n"), tree
    return lines, tree


def cmd_boundary(doc, args, flags):
    name = args[0]
    x = _as_fan(doc, name)
    b = boundary_mod.boundary_fan(x)
    comps = boundary_mod.boundary_components(b)
    lines = ["boundary of %s: %d points in %d components"
             % (name, b.boundary.npoints, len(comps))]
    for k, comp in enumerate(comps):
        items = " ".join("(%s,%s)" % (x.labels[b.point_map[v]],
                                      _fmt_set(b.face_labels[v])) for v in comp)
        lines.append("component %d: %s" % (k, items))
    tree = {"command": "boundary", "fan": name,
            "points": b.boundary.npoints,
            "components": [[[x.labels[b.point_map[v]], list(b.face_labels[v])]
                            for v in comp] for comp in comps]}
    return lines, tree


def cmd_boundary_depth(doc, args, flags):
    name = args[0]
    x = _as_fan(doc, name)
    d = boundary_mod.boundary_depth(x)
    return ["boundary depth: %d" % d], {"command": "boundary-depth",
                                        "fan": name, "depth": d}


def cmd_tame(doc, args, flags):
    name = args[0]
    x = _as_fan(doc, name)
    t = boundary_mod.is_tame(x)
    return ["tame: %s" % str(t).lower()], {"command": "tame", "fan": name, "tame": t}


def cmd_ring_presentation(doc, args, flags):
    name = args[0]
    base = args[1] if len(args) > 1 else "integers"
    kind, obj = _resolve_operand(doc, name)
    if kind != "presented":
        raise DomainFailure("E_OPERAND",
                            "%r is not a presented monoid" % name)
    rp = realize_mod.ring_presentation(obj, base)
    lines = [rp.pretty()]
    lines.extend(rp.lines())
    tree = {"command": "ring-presentation", "monoid": name, "base": base,
            "pretty": rp.pretty(), "relations": rp.lines()}
    return lines, tree


def cmd_profile(doc, args, flags):
    name = args[0]
    m, info = _as_monoid(doc, name)
    prof = realize_mod.realization_profile(m)
    lines = _integralization_lines(name, info)
    lines.append("positive dim %d, circle dim %d, components %d, sign components %d"
                 % (prof.positive_dim, prof.circle_dim, prof.component_count,
                    prof.sign_components))
    tree = {"command": "profile", "monoid": name,
            "positive_dim": prof.positive_dim, "circle_dim": prof.circle_dim,
            "component_count": prof.component_count,
            "sign_components": prof.sign_components}
    return lines, tree


def cmd_predicates(doc, args, flags):
    name = args[0]
    kind, h = _resolve_operand(doc, name)
    if kind != "hom":
        raise DomainFailure("E_OPERAND", "%r is not a hom" % name)
    p = hom_predicates(h)
    t = realize_mod.surjectivity_transfer(h)
    lines = []
    for flag in ("local", "strict", "dense"):
        lines.append("%s: %s" % (flag, str(getattr(p, flag)).lower()))
    mg = " ".join(_fmt_vec(v) for v in p.module_generators) if p.module_generators \
        else "(none)"
    lines.append("finite: %s, module generators: %s" % (str(p.finite).lower(), mg))
    lines.append("saturated: %s" % str(p.saturated_hom).lower())
    lines.append("injective: %s" % str(p.injective).lower())
    lines.append("surjective: %s" % str(p.surjective).lower())
    lines.append("transfer: complex clause applicable: %s, fs clause applicable: %s"
                 % (str(t.complex_clause_applicable).lower(),
                    str(t.fs_clause_applicable).lower()))
    tree = {"command": "predicates", "hom": name,
            "local": p.local, "strict": p.strict, "dense": p.dense,
            "finite": p.finite,
            "module_generators": [list(v) for v in p.module_generators],
            "saturated": p.saturated_hom, "injective": p.injective,
            "surjective": p.surjective,
            "fs_clause_applicable": t.fs_clause_applicable}
    return lines, tree


COMMANDS = {
    "faces": (cmd_faces, 1),
    "units": (cmd_units, 1),
    "sharpen": (cmd_sharpen, 1),
    "saturate": (cmd_saturate, 1),
    "spec": (cmd_spec, 1),
    "blowup": (cmd_blowup, 2),
    "proj": (cmd_proj, 2),
    "classify-refinement": (cmd_classify, 1),
    "resolve": (cmd_resolve, 1),
    "boundary": (cmd_boundary, 1),
    "boundary-depth": (cmd_boundary_depth, 1),
    "tame": (cmd_tame, 1),
    "ring-presentation": (cmd_ring_presentation, 1),
    "profile": (cmd_profile, 1),
    "predicates": (cmd_predicates, 1),
}


def run_command(doc: Document, command: str, args, flags) -> tuple[list, dict]:
    if command not in COMMANDS:
        raise DomainFailure("E_COMMAND", "unknown command %r" % command)
    fn, min_args = COMMANDS[command]
    if len(args) < min_args:
        raise DomainFailure("E_OPERAND",
                            "command %r needs %d operand(s)" % (command, min_args))
    try:
        return fn(doc, args, flags)
    except InconclusiveError as e:
        raise DomainFailure("E_INCONCLUSIVE", str(e))
    except resolve_mod.ResolveError as e:
        raise DomainFailure("E_RESOLVE", str(e))
    except (MonoidError, FanError) as e:
        raise DomainFailure("E_DOMAIN", str(e))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="monofan",
        description="exact computations with fine monoids and fans")
    parser.add_argument("command", help="one of: %s, run" % ", ".join(sorted(COMMANDS)))
    parser.add_argument("operands", nargs="*",
                        help="operand names; the last may be an input file")
    parser.add_argument("--dot", action="store_true",
                        help="emit the specialization poset as DOT (spec/resolve)")
    parser.add_argument("--json", action="store_true", help="emit JSON")
    parser.add_argument("--integralize", action="store_true",
                        help="echo integralizations of presented operands")
    ns = parser.parse_args(argv)
    operands = list(ns.operands)
    text = None
    if operands and os.path.exists(operands[-1]):
        with open(operands[-1], "r") as fh:
            text = fh.read()
        operands = operands[:-1]
    else:
        text = sys.stdin.read()
    flags = {"dot": ns.dot, "json": ns.json, "integralize": ns.integralize}
    try:
        doc = parse(text)
    except ParseFailure as e:
        for d in e.diagnostics:
            print(d.render(), file=sys.stderr)
        return 2
    jobs = []
    if ns.command == "run":
        jobs.extend(doc.runs)
    else:
        jobs.append((ns.command, operands))
    trees = []
    try:
        for cmd, args in jobs:
            lines, tree = run_command(doc, cmd, args, flags)
            trees.append(tree)
            if not ns.json:
                for line in lines:
                    print(line)
    except DomainFailure as e:
        print(e.render(), file=sys.stderr)
        return 1
    if ns.json:
        payload = trees[0] if len(trees) == 1 else trees
        print(json.dumps(payload, sort_keys=True, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
