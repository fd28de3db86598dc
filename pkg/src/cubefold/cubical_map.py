"""Cubical maps and the local tests: immersion, local isometry, covering."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .cube_complex import (
    Cube,
    CubeComplex,
    DirectedEdge,
    Symmetry,
    Violation,
    canonical_key,
    link,
    orient,
    symmetries,
)


class InvalidMapError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(map(str, self.violations)))


@dataclass(frozen=True, eq=False)
class CubicalMap:
    """Dimension-preserving map.  ``edge_map[e]`` is the image of e's forward
    direction; ``cube_map[c] = (image cube, symmetry)`` sends model corner b of
    c to model corner ``symmetry.corner(b)`` of the image."""
    domain: CubeComplex
    codomain: CubeComplex
    vertex_map: dict
    edge_map: dict
    cube_map: dict = field(default_factory=dict)

    @property
    def basepoint_respecting(self) -> bool:
        return (self.domain.basepoint is not None
                and self.vertex_map.get(self.domain.basepoint) == self.codomain.basepoint)

    def germ_image(self, d: DirectedEdge) -> DirectedEdge:
        return orient(self.edge_map[d.edge], d.forward)

    def cube_image(self, c: int) -> Cube:
        """Image data of domain cube ``c`` expressed in its own coordinates."""
        cube = self.domain.cubes[c]
        return Cube(cube.dim, tuple(self.vertex_map[v] for v in cube.corners),
                    tuple(self.germ_image(d) for d in cube.edges))

    def witness_image(self, witness) -> tuple:
        c, b = witness
        target, sym = self.cube_map[c]
        return target, sym.corner(b)

    @cached_property
    def lift_table(self) -> dict:
        """(domain vertex, codomain germ) -> domain germ."""
        table = {}
        for v in self.domain.vertices:
            for g in self.domain.germs(v):
                table.setdefault((v, self.germ_image(g)), g)
        return table

    def lift(self, letters, start=None):
        """Lift a codomain edge path from ``start``; the list of domain germs, or None."""
        v = self.domain.basepoint if start is None else start
        out = []
        for d in letters:
            g = self.lift_table.get((v, d))
            if g is None:
                return None
            out.append(g)
            v = self.domain.head(g)
        return out


def matching_symmetries(image: Cube, target: Cube):
    """Symmetries (lexicographic order) carrying ``image`` data onto ``target``."""
    if image.dim != target.dim:
        return
    for s in symmetries(image.dim):
        if image.transform(s) == target:
            yield s


def least_symmetry(image: Cube, target: Cube) -> Symmetry | None:
    return next(matching_symmetries(image, target), None)


@dataclass
class CubeIndex:
    """Lookup of a codomain's cubes by characteristic data up to symmetry."""
    complex: CubeComplex

    @cached_property
    def by_key(self) -> dict:
        out = {}
        for c, cube in sorted(self.complex.cubes.items()):
            out.setdefault(canonical_key(cube), []).append(c)
        return out

    def find(self, image: Cube):
        """Least (cube id, least symmetry) matching ``image``, or None."""
        for c in self.by_key.get(canonical_key(image), ()):
            s = least_symmetry(image, self.complex.cubes[c])
            if s is not None:
                return c, s
        return None


def _as_directed(x):
    if x is None:
        return None
    if isinstance(x, DirectedEdge):
        return x
    e, fw = x
    return DirectedEdge(e, bool(fw))


def validate_map(domain: CubeComplex, codomain: CubeComplex, vertex_map, edge_map,
                 cube_map=None) -> CubicalMap:
    """Check a raw map and infer cube symmetries (and missing cube images)."""
    out = []
    vmap = dict(vertex_map)
    for v in domain.vertices:
        if v not in vmap:
            out.append(Violation(f"vertex {v}", "missing image cell"))
        elif not codomain.has_vertex(vmap[v]):
            out.append(Violation(f"vertex {v}", "image is not a vertex", str(vmap[v])))
    emap = {}
    for e, (s, t) in sorted(domain.edges.items()):
        d = _as_directed(edge_map.get(e))
        if d is None:
            out.append(Violation(f"edge {e}", "not cubical: edge collapsed or unmapped"))
            continue
        if d.edge not in codomain.edges:
            out.append(Violation(f"edge {e}", "missing image cell", str(d.edge)))
            continue
        emap[e] = d
        if vmap.get(s) != codomain.tail(d) or vmap.get(t) != codomain.head(d):
            out.append(Violation(f"edge {e}", "endpoints do not commute with the map"))
    if out:
        raise InvalidMapError(out)
    index = CubeIndex(codomain)
    cmap = {}
    partial = CubicalMap(domain, codomain, vmap, emap, {})
    raw = dict(cube_map or {})
    for c in sorted(domain.cubes):
        image = partial.cube_image(c)
        if c in raw:
            target = raw[c][0] if isinstance(raw[c], tuple) else raw[c]
            if target not in codomain.cubes:
                out.append(Violation(f"cube {c}", "missing image cell", str(target)))
                continue
            s = least_symmetry(image, codomain.cubes[target])
            if s is None:
                out.append(Violation(f"cube {c}", "no cube symmetry reconciles assignments",
                                     f"image cube {target}"))
                continue
            cmap[c] = (target, s)
        else:
            found = index.find(image)
            if found is None:
                out.append(Violation(f"cube {c}", "missing image cell", "no codomain cube has this boundary"))
                continue
            cmap[c] = found
    if out:
        raise InvalidMapError(out)
    return CubicalMap(domain, codomain, vmap, emap, cmap)


@dataclass(frozen=True)
class LinkMap:
    vertex: int
    germs: dict
    simplices: dict


def induced_link_map(f: CubicalMap, v: int) -> LinkMap:
    L = link(f.domain, v)
    germs = {g: f.germ_image(g) for g in L.germs}
    simplices = {w: f.witness_image(w) for _, w in L.simplices}
    return LinkMap(v, germs, simplices)


@dataclass(frozen=True)
class LocalFailure:
    """Why a map is not locally injective/full at a vertex.

    kind is "germ collision", "duplicate simplex" or "missing simplex"; for the
    last, ``target`` is the codomain witness (cube, corner) of the simplex.
    """
    kind: str
    vertex: int
    germs: tuple
    target: tuple | None = None


def codomain_witnesses(Y: CubeComplex, y: int) -> list:
    """(germ set, (cube, corner), germs by axis) for every cube corner at y."""
    return [(frozenset(Y.cubes[c].germs(b)), (c, b), Y.cubes[c].germs(b)) for c, b in Y.corners_at(y)]


def _germ_collision(f: CubicalMap, v: int):
    seen = {}
    for g in f.domain.germs(v):
        img = f.germ_image(g)
        if img in seen:
            return LocalFailure("germ collision", v, (seen[img], g))
        seen[img] = g
    return None


def is_immersion(f: CubicalMap) -> tuple:
    for v in f.domain.vertices:
        bad = _germ_collision(f, v)
        if bad:
            return False, bad
    return True, None


def local_failures(f: CubicalMap, v: int, first_only=False) -> list:
    out = []
    bad = _germ_collision(f, v)
    if bad:
        return [bad]
    X = f.domain
    pre = {f.germ_image(g): g for g in X.germs(v)}
    hit = {}
    for c, b in X.corners_at(v):
        key = frozenset(f.germ_image(g) for g in X.cubes[c].germs(b))
        if key in hit:
            out.append(LocalFailure("duplicate simplex", v, tuple(sorted(pre[d] for d in key))))
            if first_only:
                return out
        hit[key] = (c, b)
    for key, witness, germs in codomain_witnesses(f.codomain, f.vertex_map[v]):
        if key in hit or not key <= pre.keys():
            continue
        out.append(LocalFailure("missing simplex", v, tuple(pre[d] for d in germs), witness))
        if first_only:
            return out
    return out


def is_local_isometry(f: CubicalMap) -> tuple:
    """Immersion whose link images are full; the witness of a missing simplex
    is a cube attachment site."""
    for v in f.domain.vertices:
        bad = local_failures(f, v, first_only=True)
        if bad:
            return False, bad[0]
    return True, None


def is_covering(f: CubicalMap) -> tuple:
    """(covering?, number of preimages of the codomain basepoint)."""
    X, Y = f.domain, f.codomain
    fiber = sum(1 for v in X.vertices if f.vertex_map[v] == Y.basepoint)
    if set(f.vertex_map[v] for v in X.vertices) != set(Y.vertices):
        return False, fiber
    if set(d.edge for d in f.edge_map.values()) != set(Y.edges):
        return False, fiber
    if set(t for t, _ in f.cube_map.values()) != set(Y.cubes):
        return False, fiber
    ok, _ = is_local_isometry(f)
    if not ok:
        return False, fiber
    for v in X.vertices:
        y = f.vertex_map[v]
        if len(X.germs(v)) != len(Y.germs(y)) or len(X.corners_at(v)) != len(Y.corners_at(y)):
            return False, fiber
    return True, fiber
