"""Boundary of monoids and fans: maximal proper faces, the boundary fan,
iterated boundaries and tameness.

The boundary map is a point-level map with face labels, deliberately NOT a
FanMap: the structure maps point the wrong way on monoids and the
construction is not functorial.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fanspace import FanError, FanSpace
from .monoid import EmbeddedMonoid, Face, MonoidHom


def boundary_monoid(p: EmbeddedMonoid) -> list[Face]:
    """Maximal proper faces of p (empty for a group)."""
    sets = p.face_index_sets
    proper = [t for t in sets if len(t) < len(p.gens)]
    out = []
    for t in proper:
        if not any(set(t) < set(u) for u in proper):
            out.append(p.face_from_indices(t))
    return out


@dataclass
class BoundaryData:
    source: FanSpace
    boundary: FanSpace
    point_map: tuple  # boundary point index -> source point index
    face_labels: tuple  # per boundary point, the face (generator indices in the stalk)


def _pullback_face_indices(x: FanSpace, i: int, j: int, face_idx) -> tuple:
    """Indices of stalk_i generators landing in the face of stalk_j."""
    g = x.gen_map(i, j)
    fmon = x.stalks[j].face_from_indices(face_idx).monoid
    return tuple(k for k, gen in enumerate(x.stalks[i].gens) if fmon.contains(g(gen)))


def boundary_fan(x: FanSpace) -> BoundaryData:
    """Delta X: points are pairs (x, maximal proper face of the stalk)."""
    pts = []
    for i in range(x.npoints):
        for f in boundary_monoid(x.stalks[i]):
            pts.append((i, f.indices))
    idx = {p: k for k, p in enumerate(pts)}
    leq = set()
    gen_maps = {}
    for a, (i, fi) in enumerate(pts):
        for b, (j, fj) in enumerate(pts):
            if a == b or not x.le(i, j):
                continue
            if _pullback_face_indices(x, i, j, fj) == fi:
                leq.add((a, b))
                gm = x.gen_map(i, j).group_map
                gen_maps[(a, b)] = MonoidHom(
                    x.stalks[i].face_from_indices(fi).monoid,
                    x.stalks[j].face_from_indices(fj).monoid, gm, check=True)
    stalks = [x.stalks[i].face_from_indices(f).monoid for i, f in pts]
    labels = ["d%d.%s" % (k, x.labels[i]) for k, (i, f) in enumerate(pts)]
    b = FanSpace(stalks, leq, gen_maps, labels)
    return BoundaryData(source=x, boundary=b,
                        point_map=tuple(i for i, _ in pts),
                        face_labels=tuple(f for _, f in pts))


def boundary_depth(x: FanSpace) -> int:
    """Least n with the n-th iterated boundary empty."""
    bound = 1 + max((len(x.sharpened_stalk(i).irreducibles())
                     for i in range(x.npoints)), default=0)
    current = x
    n = 0
    while current.npoints:
        current = boundary_fan(current).boundary
        n += 1
        if n > bound:
            raise FanError("boundary depth exceeded the generator bound")
    return n


def boundary_components(b: BoundaryData) -> list[list[int]]:
    """Connected components of the boundary (comparability graph)."""
    n = b.boundary.npoints
    seen = [False] * n
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        comp = []
        stack = [start]
        seen[start] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in range(n):
                if not seen[w] and (b.boundary.le(v, w) or b.boundary.le(w, v)):
                    seen[w] = True
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def is_tame_data(b: BoundaryData) -> bool:
    """Tame iff each boundary component closed-embeds into the source:
    injective, with a specialization-closed image, matching the order."""
    for comp in boundary_components(b):
        image = [b.point_map[v] for v in comp]
        if len(set(image)) != len(image):
            return False
        img_set = set(image)
        for p in img_set:
            for q in range(b.source.npoints):
                if b.source.le(q, p) and q not in img_set:
                    return False  # image is not closed under specialization
        for v in comp:
            for w in comp:
                if b.boundary.le(v, w) != b.source.le(b.point_map[v], b.point_map[w]):
                    return False
    return True


def is_tame(x: FanSpace) -> bool:
    return is_tame_data(boundary_fan(x))
