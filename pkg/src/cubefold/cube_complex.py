"""
Cube complexes stored by characteristic maps.

An n-cube (n >= 2) is a pair of tuples: ``corners[b]`` is the vertex at the
model corner with bits ``b`` (bit i is coordinate i), and ``edges[k]`` is the
directed edge assigned to the k-th model edge, oriented in the model
direction (starred coordinate 0 -> 1).  Cubes with repeated corners or edges
are allowed; folding produces them all the time.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, NamedTuple

import networkx as nx
from networkx.utils import UnionFind


class DirectedEdge(NamedTuple):
    edge: int
    forward: bool = True

    def reversed(self) -> "DirectedEdge":
        return DirectedEdge(self.edge, not self.forward)


def orient(d: DirectedEdge, forward: bool) -> DirectedEdge:
    """Return ``d`` if ``forward`` else its reverse."""
    return d if forward else d.reversed()


class Symmetry(NamedTuple):
    """Element of the hyperoctahedral group acting on model cubes.

    Coordinate i is sent to coordinate ``perm[i]`` and reflected when bit i
    of ``flip`` is set.
    """
    perm: tuple
    flip: int

    def corner(self, b: int) -> int:
        out = 0
        for i, j in enumerate(self.perm):
            out |= (((b >> i) ^ (self.flip >> i)) & 1) << j
        return out

    def inverse(self) -> "Symmetry":
        n = len(self.perm)
        perm = [0] * n
        flip = 0
        for i, j in enumerate(self.perm):
            perm[j] = i
            if self.flip >> i & 1:
                flip |= 1 << j
        return Symmetry(tuple(perm), flip)


def identity_symmetry(n: int) -> Symmetry:
    return Symmetry(tuple(range(n)), 0)


@lru_cache(maxsize=None)
def symmetries(n: int) -> tuple:
    """All 2^n n! symmetries, in lexicographic order."""
    return tuple(Symmetry(p, f) for p in itertools.permutations(range(n))
                 for f in range(1 << n))


@lru_cache(maxsize=None)
def model_edges(n: int) -> tuple:
    """Model edges of the n-cube as (axis, base corner with that axis bit 0)."""
    return tuple((i, b) for i in range(n) for b in range(1 << n) if not b >> i & 1)


@lru_cache(maxsize=None)
def model_edge_index(n: int) -> dict:
    return {m: k for k, m in enumerate(model_edges(n))}


def model_edge_label(n: int, m: tuple) -> str:
    i, b = m
    return "".join("*" if j == i else str(b >> j & 1) for j in range(n))


def parse_model_edge(label: str) -> tuple:
    if label.count("*") != 1 or set(label) - set("01*"):
        raise ValueError(f"bad model edge {label!r}")
    i = label.index("*")
    b = sum(1 << j for j, ch in enumerate(label) if ch == "1")
    return i, b


def corner_label(n: int, b: int) -> str:
    return "".join(str(b >> j & 1) for j in range(n))


def parse_corner(label: str) -> int:
    if not label or set(label) - set("01"):
        raise ValueError(f"bad corner {label!r}")
    return sum(1 << j for j, ch in enumerate(label) if ch == "1")


@dataclass(frozen=True)
class Cube:
    dim: int
    corners: tuple
    edges: tuple

    def edge_at(self, axis: int, base: int) -> DirectedEdge:
        """Directed edge of the model edge along ``axis`` through corner ``base``."""
        return self.edges[model_edge_index(self.dim)[(axis, base & ~(1 << axis))]]

    def germ(self, b: int, axis: int) -> DirectedEdge:
        """The edge leaving corner ``b`` along ``axis``, oriented away from it."""
        return orient(self.edge_at(axis, b), not b >> axis & 1)

    def germs(self, b: int) -> tuple:
        return tuple(self.germ(b, i) for i in range(self.dim))

    def transform(self, sym: Symmetry) -> "Cube":
        """Re-express this cube in the coordinates obtained by applying ``sym``."""
        n = self.dim
        corners = [None] * (1 << n)
        for b, v in enumerate(self.corners):
            corners[sym.corner(b)] = v
        idx = model_edge_index(n)
        edges = [None] * len(self.edges)
        for k, (i, b) in enumerate(model_edges(n)):
            j = sym.perm[i]
            edges[idx[(j, sym.corner(b) & ~(1 << j))]] = orient(self.edges[k], not sym.flip >> i & 1)
        return Cube(n, tuple(corners), tuple(edges))

    def face(self, axes: tuple, anchor: int = 0) -> "Cube":
        """Sub-cube spanned by ``axes`` through corner ``anchor``."""
        k = len(axes)
        mask = sum(1 << a for a in axes)
        anchor &= ~mask

        def lift(c):
            return anchor | sum(1 << a for j, a in enumerate(axes) if c >> j & 1)

        corners = tuple(self.corners[lift(c)] for c in range(1 << k))
        edges = tuple(self.edge_at(axes[j], lift(c)) for j, c in model_edges(k))
        return Cube(k, corners, edges)

    def faces(self, k: int) -> Iterable[tuple]:
        """Yield ``(axes, anchor, face)`` for every k-dimensional face."""
        for axes in itertools.combinations(range(self.dim), k):
            mask = sum(1 << a for a in axes)
            for anchor in range(1 << self.dim):
                if anchor & mask == 0:
                    yield axes, anchor, self.face(axes, anchor)


@lru_cache(maxsize=1 << 16)
def canonical_key(cube: Cube) -> tuple:
    """Invariant of a cube's characteristic data up to model symmetry."""
    return min((c.corners, c.edges) for c in (cube.transform(s) for s in symmetries(cube.dim)))


@dataclass(frozen=True)
class Violation:
    cell: str
    invariant: str
    detail: str = ""

    def __str__(self):
        return f"{self.cell}: {self.invariant}" + (f" ({self.detail})" if self.detail else "")


class InvalidComplexError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(map(str, self.violations)))


class NonSimplicialLinkError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CubeComplex:
    """A finite cube complex.  Treat as immutable."""
    vertices: tuple
    edges: dict
    cubes: dict = field(default_factory=dict)
    basepoint: int | None = None
    vertex_names: dict = field(default_factory=dict)
    edge_names: dict = field(default_factory=dict)
    cube_names: dict = field(default_factory=dict)

    def tail(self, d: DirectedEdge) -> int:
        s, t = self.edges[d.edge]
        return s if d.forward else t

    def head(self, d: DirectedEdge) -> int:
        s, t = self.edges[d.edge]
        return t if d.forward else s

    @cached_property
    def _germs(self) -> dict:
        out = {v: [] for v in self.vertices}
        for e, (s, t) in sorted(self.edges.items()):
            out[s].append(DirectedEdge(e, True))
            out[t].append(DirectedEdge(e, False))
        return {v: tuple(sorted(g)) for v, g in out.items()}

    def germs(self, v: int) -> tuple:
        """Directed edges leaving ``v``; a loop contributes both orientations."""
        return self._germs[v]

    @cached_property
    def _corners(self) -> dict:
        out = {v: [] for v in self.vertices}
        for c, cube in sorted(self.cubes.items()):
            for b, v in enumerate(cube.corners):
                out[v].append((c, b))
        return out

    def corners_at(self, v: int) -> list:
        """Cube corners ``(cube id, corner bits)`` sitting at ``v``."""
        return self._corners[v]

    @cached_property
    def _vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    def has_vertex(self, v) -> bool:
        return v in self._vertex_set

    @property
    def dimension(self) -> int:
        if self.cubes:
            return max(c.dim for c in self.cubes.values())
        return 1 if self.edges else 0

    def cell_count(self) -> int:
        return len(self.vertices) + len(self.edges) + len(self.cubes)

    def cubes_of_dim(self, n: int) -> dict:
        return {c: q for c, q in self.cubes.items() if q.dim == n}

    def vertex_name(self, v: int) -> str:
        return self.vertex_names.get(v, f"v{v}")

    def edge_name(self, e: int) -> str:
        return self.edge_names.get(e, f"e{e}")

    def cube_name(self, c: int) -> str:
        return self.cube_names.get(c, f"c{c}")

    def edge_by_name(self, name: str) -> int:
        table = self._edge_lookup
        if name not in table:
            raise KeyError(f"unknown edge {name!r}")
        return table[name]

    @cached_property
    def _edge_lookup(self) -> dict:
        return {self.edge_name(e): e for e in self.edges}

    def format_germ(self, d: DirectedEdge) -> str:
        return self.edge_name(d.edge) + ("" if d.forward else "^-1")

    def with_basepoint(self, v: int) -> "CubeComplex":
        return CubeComplex(self.vertices, self.edges, self.cubes, v,
                           self.vertex_names, self.edge_names, self.cube_names)

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges.values())
        return nx.is_connected(g)


def complex_violations(vertices, edges, cubes, basepoint=None) -> list:
    """Every cell-level invariant violated by the given cell lists."""
    out = []
    vset = set(vertices)
    if len(vset) != len(list(vertices)):
        out.append(Violation("vertices", "duplicate vertex id"))
    for e, (s, t) in sorted(edges.items()):
        for end, v in (("source", s), ("target", t)):
            if v not in vset:
                out.append(Violation(f"edge {e}", "dangling endpoint", f"{end} {v} is not a vertex"))
    if basepoint is not None and basepoint not in vset:
        out.append(Violation("basepoint", "undeclared vertex", str(basepoint)))
    keys = {}
    for cube in cubes.values():
        if _well_formed(cube, vset, edges):
            keys.setdefault(cube.dim, set()).add(canonical_key(cube))
    for c, cube in sorted(cubes.items()):
        name = f"cube {c}"
        n = cube.dim
        if n < 2:
            out.append(Violation(name, "dimension below 2", str(n)))
            continue
        if len(cube.corners) != 1 << n or len(cube.edges) != len(model_edges(n)):
            out.append(Violation(name, "incomplete assignment", f"{len(cube.corners)} corners, {len(cube.edges)} edges"))
            continue
        bad = False
        for b, v in enumerate(cube.corners):
            if v not in vset:
                out.append(Violation(name, "undeclared corner vertex", f"corner {corner_label(n, b)} -> {v}"))
                bad = True
        for k, (i, b) in enumerate(model_edges(n)):
            d = cube.edges[k]
            label = model_edge_label(n, (i, b))
            if d.edge not in edges:
                out.append(Violation(name, "undeclared edge", f"model edge {label} -> {d.edge}"))
                bad = True
                continue
            s, t = edges[d.edge]
            if not d.forward:
                s, t = t, s
            if s != cube.corners[b] or t != cube.corners[b | 1 << i]:
                out.append(Violation(name, "edge endpoints disagree with corners",
                                     f"model edge {label}: edge runs {s}->{t}, corners are "
                                     f"{cube.corners[b]}->{cube.corners[b | 1 << i]}"))
                bad = True
        if bad or n < 3:
            continue
        present = keys.get(n - 1, set())
        for i in range(n):
            axes = tuple(a for a in range(n) if a != i)
            for side in (0, 1):
                f = cube.face(axes, side << i)
                if canonical_key(f) not in present:
                    out.append(Violation(name, "missing face", f"coordinate {i} = {side}"))
    return out


def _well_formed(cube: Cube, vset, edges) -> bool:
    return (cube.dim >= 2 and len(cube.corners) == 1 << cube.dim
            and len(cube.edges) == len(model_edges(cube.dim))
            and all(v in vset for v in cube.corners)
            and all(d.edge in edges for d in cube.edges))


def validate_complex(vertices, edges, cubes=None, basepoint=None, *, vertex_names=None,
                     edge_names=None, cube_names=None) -> CubeComplex:
    """Build a complex from raw cell lists, raising InvalidComplexError on any violation."""
    edges = {e: tuple(st) for e, st in edges.items()}
    cubes = dict(cubes or {})
    violations = complex_violations(vertices, edges, cubes, basepoint)
    if violations:
        raise InvalidComplexError(violations)
    return CubeComplex(tuple(sorted(vertices)), edges, cubes, basepoint,
                       dict(vertex_names or {}), dict(edge_names or {}), dict(cube_names or {}))


def make_cube(corners, edges) -> Cube:
    """Cube from corner list and (edge id, forward) pairs in model edge order."""
    corners = tuple(corners)
    n = len(corners).bit_length() - 1
    return Cube(n, corners, tuple(DirectedEdge(e, bool(f)) for e, f in edges))


@dataclass(frozen=True)
class LinkComplex:
    """Link of a vertex: germs plus one simplex per cube corner at the vertex.

    ``simplices`` holds ``(germ tuple ordered by cube axis, (cube id, corner))``.
    """
    center: int
    germs: tuple
    simplices: tuple

    @cached_property
    def simplex_sets(self) -> frozenset:
        return frozenset(frozenset(g) for g, _ in self.simplices)

    def simplices_of_dim(self, k: int) -> list:
        return [s for s in self.simplices if len(s[0]) == k + 1]

    def simplicial_defects(self) -> list:
        """Simplices with repeated germs, and germ sets with several witnesses."""
        out = []
        seen = {}
        for g, w in self.simplices:
            if len(set(g)) != len(g):
                out.append(("repeated germ", g, w))
                continue
            key = frozenset(g)
            if key in seen:
                out.append(("duplicate simplex", g, (seen[key], w)))
            else:
                seen[key] = w
        return out

    @property
    def is_simplicial(self) -> bool:
        return not self.simplicial_defects()

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.germs)
        g.add_edges_from(tuple(s) for s, _ in self.simplices if len(s) == 2)
        return g


def link(X: CubeComplex, v: int) -> LinkComplex:
    if not X.has_vertex(v):
        raise KeyError(f"unknown vertex {v}")
    simplices = tuple((X.cubes[c].germs(b), (c, b)) for c, b in X.corners_at(v))
    return LinkComplex(v, X.germs(v), simplices)


def is_flag(L: LinkComplex) -> tuple:
    """(True, None) when every clique of the link's 1-skeleton spans a simplex,
    else (False, a minimal clique that does not)."""
    if not L.is_simplicial:
        raise NonSimplicialLinkError(f"link at {L.center} is not simplicial")
    spanned = L.simplex_sets
    for clique in nx.enumerate_all_cliques(L.graph()):
        if len(clique) >= 3 and frozenset(clique) not in spanned:
            return False, tuple(sorted(clique))
    return True, None


@dataclass(frozen=True)
class VertexReport:
    vertex: int
    simplicial: bool
    flag: bool | None
    witness: object = None


@dataclass(frozen=True)
class NPCReport:
    vertices: tuple

    @property
    def npc(self) -> bool:
        return all(r.simplicial and r.flag for r in self.vertices)

    @property
    def failures(self) -> list:
        return [r for r in self.vertices if not (r.simplicial and r.flag)]

    def __bool__(self):
        return self.npc


def check_npc(X: CubeComplex) -> NPCReport:
    reports = []
    for v in X.vertices:
        L = link(X, v)
        defects = L.simplicial_defects()
        if defects:
            reports.append(VertexReport(v, False, None, defects[0]))
            continue
        ok, witness = is_flag(L)
        reports.append(VertexReport(v, True, ok, witness))
    return NPCReport(tuple(reports))


@dataclass(frozen=True)
class Hyperplane:
    id: int
    dual_edges: frozenset


def hyperplanes(X: CubeComplex) -> list:
    """Classes of edges under "parallel in a common cube", ordered by least edge."""
    uf = UnionFind(X.edges)
    for cube in X.cubes.values():
        n = cube.dim
        for i in range(n):
            base = [cube.edge_at(i, b).edge for b in range(1 << n) if not b >> i & 1]
            uf.union(*base)
    classes = sorted((sorted(s) for s in uf.to_sets()), key=lambda s: s[0])
    return [Hyperplane(k, frozenset(s)) for k, s in enumerate(classes)]
