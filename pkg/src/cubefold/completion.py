"""Folding, cube identification, cube attachment, and the completion loop."""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

from .cube_complex import (
    Cube,
    CubeComplex,
    DirectedEdge,
    canonical_key,
    identity_symmetry,
    model_edges,
    orient,
)
from .cubical_map import (
    CubeIndex,
    CubicalMap,
    codomain_witnesses,
    is_local_isometry,
)
from .words import CubicalWord, WordError

log = logging.getLogger(__name__)

FINISHED = "Finished"
BUDGET_EXCEEDED = "BudgetExceeded"

FOLD = "Fold"
IDENTIFY = "CubeIdentification"
ATTACH = "CubeAttachment"


class MoveError(ValueError):
    pass


class AttachmentSite(NamedTuple):
    vertex: int
    germs: tuple      # domain germs at vertex, ordered by the target cube's axes
    target: tuple     # (codomain cube, corner) witnessing the spanned simplex


@dataclass(frozen=True)
class Move:
    kind: str
    site: tuple

    def log_line(self) -> str:
        return " ".join([self.kind] + [_fmt(x) for x in self.site])


def _fmt(x) -> str:
    if isinstance(x, DirectedEdge):
        return f"{x.edge}{'+' if x.forward else '-'}"
    if isinstance(x, tuple):
        return ",".join(_fmt(y) for y in x)
    return str(x)


class _Work:
    """Mutable working copy of a cubical map with incidence indices."""

    def __init__(self, f: CubicalMap):
        X = f.domain
        self.Y = f.codomain
        self.yindex = CubeIndex(self.Y)
        self._ywit = {}
        self.verts = set(X.vertices)
        self.edges = {e: list(st) for e, st in X.edges.items()}
        self.cubes = {}
        self.vmap = dict(f.vertex_map)
        self.emap = dict(f.edge_map)
        self.cmap = {}
        self.base = X.basepoint
        self.next_v = max(self.verts, default=-1) + 1
        self.next_e = max(self.edges, default=-1) + 1
        self.next_c = max(X.cubes, default=-1) + 1
        self.v_edges = {v: set() for v in self.verts}
        self.v_cubes = {v: set() for v in self.verts}
        self.e_cubes = {e: set() for e in self.edges}
        self.key = {}
        self.by_key = {}
        self.merged_v = {}
        self.merged_e = {}
        for e, (s, t) in self.edges.items():
            self.v_edges[s].add(e)
            self.v_edges[t].add(e)
        for c, cube in X.cubes.items():
            self.cmap[c] = f.cube_map[c]
            self._set_cube(c, cube)

    # -- queries -----------------------------------------------------------

    def cell_count(self) -> int:
        return len(self.verts) + len(self.edges) + len(self.cubes)

    def germs(self, v) -> list:
        out = []
        for e in self.v_edges[v]:
            s, t = self.edges[e]
            if s == v:
                out.append(DirectedEdge(e, True))
            if t == v:
                out.append(DirectedEdge(e, False))
        out.sort()
        return out

    def head(self, d: DirectedEdge) -> int:
        s, t = self.edges[d.edge]
        return t if d.forward else s

    def tail(self, d: DirectedEdge) -> int:
        s, t = self.edges[d.edge]
        return s if d.forward else t

    def image(self, d: DirectedEdge) -> DirectedEdge:
        return orient(self.emap[d.edge], d.forward)

    def find_germ(self, v, target: DirectedEdge):
        for g in self.germs(v):
            if self.image(g) == target:
                return g
        return None

    def witnesses_at(self, v) -> list:
        return sorted((c, b) for c in self.v_cubes[v] for b, x in enumerate(self.cubes[c].corners) if x == v)

    def ywitnesses(self, y) -> list:
        if y not in self._ywit:
            self._ywit[y] = codomain_witnesses(self.Y, y)
        return self._ywit[y]

    def fold_pairs_at(self, v) -> list:
        by_image = {}
        for g in self.germs(v):
            by_image.setdefault(self.image(g), []).append(g)
        return sorted((gs[0], gs[1]) for gs in by_image.values() if len(gs) > 1)

    def identification_groups(self) -> list:
        return sorted(sorted(cs) for cs in self.by_key.values() if len(cs) > 1)

    def attachment_sites(self) -> list:
        """Minimal missing simplices: every proper face already present."""
        sites = []
        for v in sorted(self.verts):
            pre = {}
            for g in self.germs(v):
                pre.setdefault(self.image(g), g)
            present = {frozenset(self.image(g) for g in self.cubes[c].germs(b)) for c, b in self.witnesses_at(v)}
            for key, witness, ygerms in self.ywitnesses(self.vmap[v]):
                if key in present or not key <= pre.keys():
                    continue
                if len(key) > 2 and any(key - {d} not in present for d in key):
                    continue
                sites.append(AttachmentSite(v, tuple(pre[d] for d in ygerms), witness))
        sites.sort(key=lambda s: (len(s.germs), s.vertex, s.target))
        return sites

    def site_missing(self, site: AttachmentSite) -> bool:
        v = site.vertex
        if v not in self.verts or any(g.edge not in self.edges or self.tail(g) != v for g in site.germs):
            return False
        key = frozenset(self.image(g) for g in site.germs)
        return all(frozenset(self.image(g) for g in self.cubes[c].germs(b)) != key
                   for c, b in self.witnesses_at(v))

    # -- mutation ----------------------------------------------------------

    def _set_cube(self, c, cube: Cube):
        old = self.cubes.get(c)
        if old is not None:
            self._unindex_cube(c, old)
        self.cubes[c] = cube
        for v in cube.corners:
            self.v_cubes[v].add(c)
        for d in cube.edges:
            self.e_cubes[d.edge].add(c)
        k = canonical_key(cube)
        self.key[c] = k
        self.by_key.setdefault(k, set()).add(c)

    def _unindex_cube(self, c, cube: Cube):
        for v in cube.corners:
            self.v_cubes[v].discard(c)
        for d in cube.edges:
            self.e_cubes[d.edge].discard(c)
        k = self.key.pop(c)
        self.by_key[k].discard(c)
        if not self.by_key[k]:
            del self.by_key[k]

    def add_vertex(self, y) -> int:
        v = self.next_v
        self.next_v += 1
        self.verts.add(v)
        self.vmap[v] = y
        self.v_edges[v] = set()
        self.v_cubes[v] = set()
        return v

    def add_edge(self, s, t, image: DirectedEdge) -> int:
        e = self.next_e
        self.next_e += 1
        self.edges[e] = [s, t]
        self.emap[e] = image
        self.e_cubes[e] = set()
        self.v_edges[s].add(e)
        self.v_edges[t].add(e)
        return e

    def add_cube(self, cube: Cube, image) -> int:
        c = self.next_c
        self.next_c += 1
        self.cmap[c] = image
        self._set_cube(c, cube)
        return c

    def merge_vertices(self, a, b) -> int:
        keep, gone = min(a, b), max(a, b)
        if self.vmap[keep] != self.vmap[gone]:
            raise MoveError(f"vertices {keep} and {gone} have different images")
        for e in self.v_edges.pop(gone):
            self.edges[e] = [keep if x == gone else x for x in self.edges[e]]
            self.v_edges[keep].add(e)
        for c in list(self.v_cubes[gone]):
            cube = self.cubes[c]
            self._set_cube(c, Cube(cube.dim, tuple(keep if x == gone else x for x in cube.corners), cube.edges))
        del self.v_cubes[gone]
        self.verts.discard(gone)
        del self.vmap[gone]
        self.merged_v[gone] = keep
        if self.base == gone:
            self.base = keep
        return keep

    def fold(self, d1: DirectedEdge, d2: DirectedEdge):
        if d1.edge == d2.edge or d1.edge not in self.edges or d2.edge not in self.edges:
            raise MoveError("fold needs two distinct existing edges")
        if self.tail(d1) != self.tail(d2) or self.image(d1) != self.image(d2):
            raise MoveError("fold site: edges must share a source and an image")
        t1, t2 = self.head(d1), self.head(d2)
        if t1 != t2:
            self.merge_vertices(t1, t2)
        if d2.edge < d1.edge:
            d1, d2 = d2, d1
        e1, e2 = d1.edge, d2.edge
        same = d1.forward == d2.forward
        for c in list(self.e_cubes[e2]):
            cube = self.cubes[c]
            edges = tuple(DirectedEdge(e1, d.forward == same) if d.edge == e2 else d for d in cube.edges)
            self._set_cube(c, Cube(cube.dim, cube.corners, edges))
        for x in set(self.edges[e2]):
            self.v_edges[x].discard(e2)
        del self.edges[e2]
        del self.emap[e2]
        del self.e_cubes[e2]
        self.merged_e[e2] = DirectedEdge(e1, same)

    def identify(self, c1, c2):
        if c1 == c2 or c1 not in self.cubes or c2 not in self.cubes or self.key[c1] != self.key[c2]:
            raise MoveError(f"cubes {c1} and {c2} do not share a 1-skeleton")
        if self.cmap[c1][0] != self.cmap[c2][0]:
            raise MoveError(f"cubes {c1} and {c2} have different images")
        self._unindex_cube(c2, self.cubes.pop(c2))
        del self.cmap[c2]

    def attach(self, site: AttachmentSite, reuse: bool) -> int:
        """Glue a cube mapping onto ``site.target`` along the site's germs.

        With ``reuse`` the rest of the boundary is read off existing edges where
        possible (equivalent to attaching fresh and folding); otherwise every
        cell away from the given germs is new."""
        if not self.site_missing(site):
            raise MoveError(f"no missing simplex at {site}")
        v, germs, (yc, yb) = site
        ycube = self.Y.cubes[yc]
        n = ycube.dim
        corners = [None] * (1 << n)
        corners[yb] = v
        for b in sorted(range(1 << n), key=lambda b: (bin(b ^ yb).count("1"), b))[1:]:
            diff = b ^ yb
            i = (diff & -diff).bit_length() - 1
            u = b ^ (1 << i)
            if u == yb:
                corners[b] = self.head(germs[i])
                continue
            g = self.find_germ(corners[u], ycube.germ(u, i)) if reuse else None
            corners[b] = self.head(g) if g is not None else self.add_vertex(ycube.corners[b])
        edges = []
        for k, (i, lo) in enumerate(model_edges(n)):
            hi = lo | 1 << i
            if lo == yb:
                edges.append(germs[i])
            elif hi == yb:
                edges.append(germs[i].reversed())
            else:
                g = self.find_germ(corners[lo], ycube.edges[k]) if reuse else None
                if g is None or self.head(g) != corners[hi]:
                    g = DirectedEdge(self.add_edge(corners[lo], corners[hi], ycube.edges[k]), True)
                edges.append(g)
        cube = Cube(n, tuple(corners), tuple(edges))
        c = self.add_cube(cube, (yc, identity_symmetry(n)))
        for k in range(2, n):
            for _, _, face in cube.faces(k):
                if canonical_key(face) in self.by_key:
                    continue
                image = Cube(k, tuple(self.vmap[x] for x in face.corners), tuple(self.image(d) for d in face.edges))
                found = self.yindex.find(image)
                if found is None:
                    raise MoveError(f"codomain has no face matching {image}")
                self.add_cube(face, found)
        return c

    # -- phases ------------------------------------------------------------

    def fold_all(self, history, rng=None):
        if rng is not None:
            while True:
                pairs = [p for v in sorted(self.verts) for p in self.fold_pairs_at(v)]
                if not pairs:
                    return
                d1, d2 = rng.choice(pairs)
                history.append(Move(FOLD, (self.tail(d1), d1, d2)))
                self.fold(d1, d2)
        heap = sorted(self.verts)
        queued = set(heap)
        while heap:
            v = heapq.heappop(heap)
            queued.discard(v)
            if v not in self.verts:
                continue
            pairs = self.fold_pairs_at(v)
            if not pairs:
                continue
            d1, d2 = pairs[0]
            history.append(Move(FOLD, (v, d1, d2)))
            self.fold(d1, d2)
            for x in (v, self.head(d1) if d1.edge in self.edges else self.head(d2)):
                if x in self.verts and x not in queued:
                    heapq.heappush(heap, x)
                    queued.add(x)

    def identify_all(self, history, rng=None):
        groups = self.identification_groups()
        if rng is not None:
            rng.shuffle(groups)
        for cs in groups:
            if rng is not None:
                rng.shuffle(cs)
            keep = cs[0]
            for c in cs[1:]:
                if self.cmap[c][0] != self.cmap[keep][0]:
                    log.warning("cubes %s, %s share a boundary but not an image", keep, c)
                    continue
                history.append(Move(IDENTIFY, (keep, c)))
                self.identify(keep, c)

    # -- export ------------------------------------------------------------

    def resolve_vertex(self, v):
        while v in self.merged_v:
            v = self.merged_v[v]
        return v

    def resolve_edge(self, e) -> DirectedEdge:
        d = DirectedEdge(e, True)
        while d.edge in self.merged_e:
            d = orient(self.merged_e[d.edge], d.forward)
        return d

    def export(self, renumber=False):
        """(CubicalMap, vertex relabeling, edge relabeling)."""
        verts = sorted(self.verts)
        if renumber:
            vnew = {v: k for k, v in enumerate(verts)}
            enew = {e: k for k, e in enumerate(sorted(self.edges))}
            cnew = {c: k for k, c in enumerate(sorted(self.cubes))}
        else:
            vnew = {v: v for v in verts}
            enew = {e: e for e in self.edges}
            cnew = {c: c for c in self.cubes}
        edges = {enew[e]: (vnew[s], vnew[t]) for e, (s, t) in self.edges.items()}
        cubes = {cnew[c]: Cube(q.dim, tuple(vnew[x] for x in q.corners),
                               tuple(DirectedEdge(enew[d.edge], d.forward) for d in q.edges))
                 for c, q in self.cubes.items()}
        X = CubeComplex(tuple(vnew[v] for v in verts), edges, cubes,
                        None if self.base is None else vnew[self.base])
        f = CubicalMap(X, self.Y, {vnew[v]: y for v, y in self.vmap.items()},
                       {enew[e]: y for e, y in self.emap.items()},
                       {cnew[c]: y for c, y in self.cmap.items()})
        return f, vnew, enew


@dataclass(eq=False)
class CompletionResult:
    complex: CubeComplex
    map: CubicalMap
    history: list
    status: str
    budget_used: int
    source: CubicalMap
    vertex_origin: dict = field(default_factory=dict)
    edge_origin: dict = field(default_factory=dict)
    generators: tuple | None = None

    @property
    def finished(self) -> bool:
        return self.status == FINISHED

    @property
    def certificate(self) -> str:
        return "convex cocompact certified" if self.finished else "unknown"

    @property
    def target(self) -> CubeComplex:
        return self.map.codomain

    def move_log(self) -> str:
        return "".join(m.log_line() + "\n" for m in self.history)

    @cached_property
    def canonical(self):
        return canonicalize(self)


def bouquet_from_words(Y: CubeComplex, words) -> tuple:
    """Wedge of subdivided circles, one per nonempty word, one edge per letter."""
    q = Y.basepoint
    verts, edges, vmap, emap = [0], {}, {0: q}, {}
    for j, w in enumerate(words):
        letters = w.letters if isinstance(w, CubicalWord) else tuple(w)
        if isinstance(w, CubicalWord) and not (w.start == q and w.end == q):
            raise WordError(f"word {j} is not a closed path at the basepoint")
        v = 0
        for k, d in enumerate(letters):
            if Y.tail(d) != vmap[v]:
                raise WordError(f"word {j} is not a path at letter {k}")
            if k == len(letters) - 1:
                if Y.head(d) != q:
                    raise WordError(f"word {j} is not a closed path at the basepoint")
                t = 0
            else:
                t = len(verts)
                verts.append(t)
                vmap[t] = Y.head(d)
            e = len(edges)
            edges[e] = (v, t)
            emap[e] = d
            v = t
    X = CubeComplex(tuple(verts), edges, {}, 0)
    return X, CubicalMap(X, Y, vmap, emap, {})


def interval_from_word(Y: CubeComplex, word: CubicalWord) -> tuple:
    """A subdivided interval mapping onto the path ``word``; returns (X, f, far endpoint)."""
    n = len(word.letters)
    X = CubeComplex(tuple(range(n + 1)), {k: (k, k + 1) for k in range(n)}, {}, 0)
    vmap = {0: word.start}
    for k, d in enumerate(word.letters):
        vmap[k + 1] = Y.head(d)
    return X, CubicalMap(X, Y, vmap, dict(enumerate(word.letters)), {}), n


# -- single moves on immutable maps -----------------------------------------

def find_fold(f: CubicalMap):
    """Least pair of germs at a common vertex with equal images, or None."""
    w = _Work(f)
    for v in sorted(w.verts):
        pairs = w.fold_pairs_at(v)
        if pairs:
            return pairs[0]
    return None


def fold(f: CubicalMap, d1: DirectedEdge, d2: DirectedEdge) -> CubicalMap:
    w = _Work(f)
    w.fold(DirectedEdge(*d1), DirectedEdge(*d2))
    return w.export()[0]


def find_cube_identification(f: CubicalMap):
    for cs in _Work(f).identification_groups():
        return cs[0], cs[1]
    return None


def identify_cubes(f: CubicalMap, c1: int, c2: int) -> CubicalMap:
    w = _Work(f)
    w.identify(min(c1, c2), max(c1, c2))
    return w.export()[0]


def find_cube_attachment(f: CubicalMap):
    sites = _Work(f).attachment_sites()
    return sites[0] if sites else None


def attach_cube(f: CubicalMap, site: AttachmentSite, reuse_boundary=False) -> CubicalMap:
    w = _Work(f)
    w.attach(AttachmentSite(*site), reuse_boundary)
    return w.export()[0]


def complete(f: CubicalMap, budget: int = 20000, rng=None, reuse_boundary: bool = True,
             generators=None) -> CompletionResult:
    """Run folds, then identifications, then attachments, until the map is a
    local isometry or the domain exceeds ``budget`` cells.

    ``rng`` (a random.Random) replaces the canonical least-site order by random
    choices within each phase."""
    w = _Work(f)
    history = []
    status = FINISHED
    while status == FINISHED:
        w.fold_all(history, rng)
        w.identify_all(history, rng)
        sites = w.attachment_sites()
        if not sites:
            break
        if rng is not None:
            rng.shuffle(sites)
        for site in sites:
            if not w.site_missing(site):
                continue
            c = w.attach(site, reuse_boundary if rng is None else rng.random() < 0.5)
            history.append(Move(ATTACH, (site.vertex, site.germs, site.target, c)))
            if w.cell_count() > budget:
                status = BUDGET_EXCEEDED
                break
    g, vnew, enew = w.export(renumber=True)
    vorigin = {v: vnew[w.resolve_vertex(v)] for v in f.domain.vertices}
    eorigin = {}
    for e in f.domain.edges:
        d = w.resolve_edge(e)
        eorigin[e] = DirectedEdge(enew[d.edge], d.forward)
    result = CompletionResult(g.domain, g, history, status, w.cell_count(), f, vorigin, eorigin,
                              tuple(generators) if generators is not None else None)
    if result.finished:
        ok, why = is_local_isometry(g)
        assert ok, f"finished completion is not a local isometry: {why}"
    log.debug("completion %s after %d moves, %d cells", status, len(history), result.budget_used)
    return result


def complete_words(Y: CubeComplex, words, budget: int = 20000, **kw) -> CompletionResult:
    """Completion of the bouquet of the given closed words."""
    _, f = bouquet_from_words(Y, words)
    return complete(f, budget, generators=words, **kw)


# -- canonical form ----------------------------------------------------------

@dataclass(frozen=True)
class CanonicalForm:
    """Relabeling of a finished completion determined by the map alone.

    Vertices are numbered in breadth-first order from the basepoint, taking
    germs in order of their images; edges are oriented along their images."""
    vertex_images: tuple
    edges: tuple      # (source, target, image edge)
    cubes: tuple      # (dim, image cube, corners, edges) in image coordinates

    @property
    def vertex_count(self) -> int:
        return len(self.vertex_images)


def canonicalize(r) -> CanonicalForm:
    f = r.map if isinstance(r, CompletionResult) else r
    if isinstance(r, CompletionResult) and not r.finished:
        raise ValueError("canonical form is defined only for finished completions")
    X = f.domain
    vnew = {X.basepoint: 0}
    enew = {}
    edges = []
    queue = [X.basepoint]
    for v in queue:
        for g in sorted(X.germs(v), key=f.germ_image):
            if g.edge in enew:
                continue
            enew[g.edge] = len(edges)
            h = X.head(g)
            if h not in vnew:
                vnew[h] = len(vnew)
                queue.append(h)
            s, t = X.edges[g.edge]
            img = f.edge_map[g.edge]
            if not img.forward:
                s, t = t, s
            edges.append((s, t, img.edge))
    if len(vnew) != len(X.vertices):
        raise ValueError("domain is not connected")
    edges = tuple((vnew[s], vnew[t], y) for s, t, y in edges)
    cubes = []
    for c, cube in X.cubes.items():
        yc, sym = f.cube_map[c]
        moved = cube.transform(sym)
        cubes.append((cube.dim, yc, tuple(vnew[x] for x in moved.corners),
                      tuple(enew[d.edge] for d in moved.edges)))
    images = [None] * len(vnew)
    for v, k in vnew.items():
        images[k] = f.vertex_map[v]
    return CanonicalForm(tuple(images), edges, tuple(sorted(cubes)))
