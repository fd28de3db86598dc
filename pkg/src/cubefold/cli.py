"""Command-line access: complex files in, answers or complex files out.

Exit codes: 0 yes/success, 1 no/failed check, 2 bad input, 3 budget exhausted,
4 oracle disagreement (hidden ``--oracle`` flag).
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import completion, geometry, group_algorithms as ga, oracles
from .cube_complex import (
    Cube,
    CubeComplex,
    DirectedEdge,
    InvalidComplexError,
    check_npc,
    corner_label,
    model_edge_label,
    model_edges,
    parse_corner,
    parse_model_edge,
    validate_complex,
)
from .words import WordError, format_word, parse_letters, path

log = logging.getLogger(__name__)

EXIT_YES, EXIT_NO, EXIT_INPUT, EXIT_BUDGET, EXIT_ORACLE = 0, 1, 2, 3, 4


class ParseError(ValueError):
    pass


# -- complex files --------------------------------------------------------------

def parse_complex(text: str) -> CubeComplex:
    """Read a complex file; names become ids in order of first declaration.
    Map records (vmap/emap/cmap) are annotations and are skipped."""
    vid, eid, cid = {}, {}, {}
    edges, raw_cubes = {}, {}
    base = None
    current = None

    def fail(n, msg):
        raise ParseError(f"line {n}: {msg}")

    for n, line in enumerate(text.splitlines(), 1):
        tok = line.split("#", 1)[0].split()
        if not tok:
            continue
        kind, args = tok[0], tok[1:]
        if kind == "vertex" and len(args) == 1:
            if args[0] in vid:
                fail(n, f"duplicate vertex {args[0]}")
            vid[args[0]] = len(vid)
        elif kind == "edge" and len(args) == 3:
            if args[0] in eid:
                fail(n, f"duplicate edge {args[0]}")
            for v in args[1:]:
                if v not in vid:
                    fail(n, f"unknown vertex {v}")
            eid[args[0]] = len(eid)
            edges[eid[args[0]]] = (vid[args[1]], vid[args[2]])
        elif kind == "cube" and len(args) == 2:
            if args[0] in cid or not args[1].isdigit() or int(args[1]) < 2:
                fail(n, f"bad cube record {line.strip()!r}")
            cid[args[0]] = len(cid)
            current = (cid[args[0]], int(args[1]))
            raw_cubes[current[0]] = (current[1], {}, {})
        elif kind == "corner" and len(args) == 2:
            if current is None:
                fail(n, "corner outside a cube")
            dim, corners, _ = raw_cubes[current[0]]
            try:
                b = parse_corner(args[0])
            except ValueError as exc:
                fail(n, str(exc))
            if len(args[0]) != dim or args[1] not in vid:
                fail(n, f"bad corner record {line.strip()!r}")
            corners[b] = vid[args[1]]
        elif kind == "cubeedge" and len(args) == 3:
            if current is None:
                fail(n, "cubeedge outside a cube")
            dim, _, cedges = raw_cubes[current[0]]
            try:
                m = parse_model_edge(args[0])
            except ValueError as exc:
                fail(n, str(exc))
            if len(args[0]) != dim or args[1] not in eid or args[2] not in "+-":
                fail(n, f"bad cubeedge record {line.strip()!r}")
            cedges[m] = DirectedEdge(eid[args[1]], args[2] == "+")
        elif kind == "base" and len(args) == 1:
            if args[0] not in vid:
                fail(n, f"unknown vertex {args[0]}")
            base = vid[args[0]]
        elif kind in ("vmap", "emap", "cmap"):
            continue
        else:
            fail(n, f"unrecognised record {line.strip()!r}")
    cubes = {}
    for c, (dim, corners, cedges) in raw_cubes.items():
        if len(corners) != 1 << dim or len(cedges) != len(model_edges(dim)):
            raise ParseError(f"cube {c} is missing corner or edge records")
        cubes[c] = Cube(dim, tuple(corners[b] for b in range(1 << dim)),
                        tuple(cedges[m] for m in model_edges(dim)))
    if not vid:
        raise ParseError("no vertices declared")
    if base is None:
        base = 0
    return validate_complex(range(len(vid)), edges, cubes, base,
                            vertex_names={v: k for k, v in vid.items()},
                            edge_names={e: k for k, e in eid.items()},
                            cube_names={c: k for k, c in cid.items()})


def emit_complex(X: CubeComplex) -> str:
    lines = [f"vertex {X.vertex_name(v)}" for v in X.vertices]
    for e, (s, t) in sorted(X.edges.items()):
        lines.append(f"edge {X.edge_name(e)} {X.vertex_name(s)} {X.vertex_name(t)}")
    for c, cube in sorted(X.cubes.items()):
        lines.append(f"cube {X.cube_name(c)} {cube.dim}")
        for b in range(1 << cube.dim):
            lines.append(f"corner {corner_label(cube.dim, b)} {X.vertex_name(cube.corners[b])}")
        for m, d in zip(model_edges(cube.dim), cube.edges):
            lines.append(f"cubeedge {model_edge_label(cube.dim, m)} {X.edge_name(d.edge)} {'+' if d.forward else '-'}")
    if X.basepoint is not None:
        lines.append(f"base {X.vertex_name(X.basepoint)}")
    return "\n".join(lines) + "\n"


def emit_map(f) -> str:
    X, Y = f.domain, f.codomain
    lines = [f"vmap {X.vertex_name(v)} {Y.vertex_name(f.vertex_map[v])}" for v in X.vertices]
    for e in sorted(X.edges):
        d = f.edge_map[e]
        lines.append(f"emap {X.edge_name(e)} {Y.edge_name(d.edge)} {'+' if d.forward else '-'}")
    for c in sorted(X.cubes):
        t, s = f.cube_map[c]
        lines.append(f"cmap {X.cube_name(c)} {Y.cube_name(t)} {''.join(map(str, s.perm))} {corner_label(len(s.perm), s.flip)}")
    return "\n".join(lines) + ("\n" if lines else "")


# -- words -----------------------------------------------------------------------

def read_word(Y: CubeComplex, text: str):
    """A path as written (from the basepoint when empty)."""
    return path(Y, parse_letters(Y, text), Y.basepoint if not text.split() else None)


def read_closed(Y: CubeComplex, text: str):
    """A closed word at the basepoint; discontinuous or open letter sequences
    are closed up through spanning-tree paths."""
    letters = parse_letters(Y, text)
    try:
        w = path(Y, letters, Y.basepoint)
        if w.closed:
            return w
    except WordError:
        pass
    return ga.word_to_cubical(Y, ga.spanning_tree(Y), letters)


def read_words(Y, text: str) -> list:
    return [read_closed(Y, part) for part in text.split(",")]


# -- commands ----------------------------------------------------------------------

def _subgroup(Y, args):
    words = read_words(Y, args.sub)
    return words, completion.complete_words(Y, words, args.budget)


def _oracle_kind(Y):
    if any(s != 0 or t != 0 for s, t in Y.edges.values()) or len(Y.vertices) != 1:
        return None
    n = len(Y.edges)
    if not Y.cubes:
        return "rose"
    if len(Y.cubes) == 2 ** n - n - 1 and check_npc(Y):
        return "torus"
    return None


def _oracle_words(Y, words):
    return [[(Y.edge_name(d.edge), 1 if d.forward else -1) for d in w.letters] for w in words]


def _mismatch(ours, theirs):
    if ours != theirs:
        print(f"oracle mismatch: {ours!r} vs {theirs!r}", file=sys.stderr)
        return True
    return False


def cmd_check(Y, args, out):
    report = check_npc(Y)
    out.write(f"vertices {len(Y.vertices)} edges {len(Y.edges)} cubes {len(Y.cubes)} dimension {Y.dimension}\n")
    for r in report.failures:
        if r.simplicial:
            clique = " ".join(Y.format_germ(g) for g in r.witness)
            out.write(f"not-flag at {Y.vertex_name(r.vertex)}: clique {clique} spans no cube\n")
        else:
            out.write(f"not-simplicial at {Y.vertex_name(r.vertex)}: {r.witness}\n")
    out.write("npc\n" if report.npc else "not-npc\n")
    return EXIT_YES if report.npc else EXIT_NO


def cmd_complete(Y, args, out):
    words = [read_closed(Y, w) for w in args.words]
    Z = completion.complete_words(Y, words, args.budget)
    if args.log:
        with open(args.log, "w") as fh:
            fh.write(Z.move_log())
    out.write(f"# status {Z.status}\n# cells {Z.budget_used}\n")
    out.write(emit_complex(Z.complex))
    out.write(emit_map(Z.map))
    if args.oracle and _oracle_kind(Y) == "rose" and Z.finished:
        G = oracles.classic_fold(_oracle_words(Y, words))
        ours = oracles.canonical_labeled_graph(
            Z.complex.basepoint,
            [(s, Y.edge_name(Z.map.edge_map[e].edge), t) if Z.map.edge_map[e].forward
             else (t, Y.edge_name(Z.map.edge_map[e].edge), s) for e, (s, t) in Z.complex.edges.items()])
        if _mismatch(ours, oracles.canonical_labeled_graph(G.base, G.edges)):
            return EXIT_ORACLE
    return EXIT_YES if Z.finished else EXIT_BUDGET


def cmd_member(Y, args, out):
    words, Z = _subgroup(Y, args)
    if not Z.finished:
        out.write("undecided\n")
        return EXIT_BUDGET
    g = read_closed(Y, args.g)
    ans = ga.membership(Z, g)
    out.write("yes\n" if ans else "no\n")
    kind = _oracle_kind(Y) if args.oracle else None
    if kind:
        hw, gw = _oracle_words(Y, words), _oracle_words(Y, [g])[0]
        ref = (oracles.classic_fold(hw).accepts(gw) if kind == "rose"
               else oracles.lattice_oracle([Y.edge_name(e) for e in sorted(Y.edges)], hw).member(gw))
        if _mismatch(ans, ref):
            return EXIT_ORACLE
    return EXIT_YES if ans else EXIT_NO


def cmd_power_member(Y, args, out):
    words, Z = _subgroup(Y, args)
    if not Z.finished:
        out.write("undecided\n")
        return EXIT_BUDGET
    g = read_closed(Y, args.g)
    k = ga.power_membership(Z, g, args.bound)
    out.write(f"{k}\n" if k else "none\n")
    kind = _oracle_kind(Y) if args.oracle else None
    if kind:
        hw, gw = _oracle_words(Y, words), _oracle_words(Y, [g])[0]
        ref = (oracles.free_least_power(hw, gw) if kind == "rose"
               else oracles.lattice_oracle([Y.edge_name(e) for e in sorted(Y.edges)], hw).least_power(gw))
        if _mismatch(k, ref if ref is None or ref <= (args.bound or len(Z.complex.vertices)) else None):
            return EXIT_ORACLE
    return EXIT_YES if k else EXIT_NO


def cmd_normal(Y, args, out):
    words, Z = _subgroup(Y, args)
    ans = ga.is_normal(Z, args.budget) if Z.finished else None
    out.write({True: "normal\n", False: "not-normal\n", None: "undecided\n"}[ans])
    kind = _oracle_kind(Y) if args.oracle and ans is not None else None
    if kind and _mismatch(ans, True if kind == "torus" else oracles.free_is_normal(
            _oracle_words(Y, words), [Y.edge_name(e) for e in sorted(Y.edges)])):
        return EXIT_ORACLE
    return {True: EXIT_YES, False: EXIT_NO, None: EXIT_BUDGET}[ans]


def cmd_index(Y, args, out):
    words, Z = _subgroup(Y, args)
    if not Z.finished:
        out.write("undecided\n")
        return EXIT_BUDGET
    n = ga.finite_index(Z, args.coset_budget)
    out.write(f"{n}\n" if n else "infinite-or->budget\n")
    kind = _oracle_kind(Y) if args.oracle else None
    if kind:
        hw, alphabet = _oracle_words(Y, words), [Y.edge_name(e) for e in sorted(Y.edges)]
        ref = oracles.free_index(hw, alphabet) if kind == "rose" else oracles.lattice_oracle(alphabet, hw).index()
        if ref is not None and ref > args.coset_budget:
            ref = None
        if _mismatch(n, ref):
            return EXIT_ORACLE
    return EXIT_YES if n else EXIT_NO


def _points(Y, args):
    """Vertices named on the command line, in the file's complex or (with
    --ball R) as words lifted into a universal-cover ball."""
    if args.ball is None:
        try:
            names = {Y.vertex_name(v): v for v in Y.vertices}
            return Y, [names[p] for p in args.points]
        except KeyError as exc:
            raise ParseError(f"unknown vertex {exc.args[0]}") from None
    B = geometry.universal_cover_ball(Y, r=args.ball)
    pts = []
    for p in args.points:
        lifted = B.lift(parse_letters(Y, p))
        if lifted is None:
            raise ParseError(f"word {p!r} leaves the radius-{args.ball} ball")
        pts.append(lifted[-1])
    return B, pts


def cmd_hull(Y, args, out):
    X, pts = _points(Y, args)
    H = geometry.convex_hull(X, pts)
    if not H.complete:
        out.write("# incomplete: hull reaches the ball boundary\n")
    out.write(emit_complex(H.to_complex()))
    if args.oracle and args.ball is None:
        if _mismatch((H.vertices, H.edges, H.cubes), oracles.brute_hull(Y, pts)):
            return EXIT_ORACLE
    return EXIT_YES if H.complete else EXIT_BUDGET


def cmd_ball(Y, args, out):
    B = geometry.universal_cover_ball(Y, r=args.radius)
    out.write(emit_complex(B.complex))
    out.write(emit_map(B.projection))
    return EXIT_YES


def cmd_geodesics(Y, args, out):
    X, (u, v) = _points(Y, args)
    try:
        paths = geometry.combinatorial_geodesics(X, u, v, args.limit)
    except geometry.IncompleteError as exc:
        out.write(f"incomplete: {exc}\n")
        return EXIT_BUDGET
    for p in paths:
        out.write((format_word(Y, X.project(p)) if args.ball is not None
                   else format_word(Y, p)) + "\n")
    return EXIT_YES


def cmd_dual(Y, args, out):
    X, pts = _points(Y, args)
    P = geometry.halfspaces_meeting(X, pts)
    D, orientation = geometry.sageev_dual(P)
    out.write(emit_complex(D))
    return EXIT_YES


def cmd_reduce(Y, args, out):
    w = read_word(Y, args.word)
    for r in ga.reduced_forms(Y, w, args.limit):
        out.write(format_word(Y, r) + "\n")
    return EXIT_YES


def cmd_present(Y, args, out):
    P = ga.cubical_presentation(Y)
    out.write("generators " + " ".join(Y.edge_name(e) for e in P.generators) + "\n")
    for r in P.relators:
        out.write("relator " + format_word(Y, r) + "\n")
    return EXIT_YES


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cubefold", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def command(name, fn, help):
        c = sub.add_parser(name, help=help)
        c.add_argument("complex", help="complex file ('-' for stdin)")
        c.add_argument("--oracle", action="store_true", help=argparse.SUPPRESS)
        c.set_defaults(fn=fn)
        return c

    def subgroup(c):
        c.add_argument("--sub", required=True, help="comma-separated generator words; open words are closed through a spanning tree")
        c.add_argument("--budget", type=int, default=20000, help="completion cell budget")

    def points(c, nargs):
        c.add_argument("points", nargs=nargs, help="vertex names, or words with --ball")
        c.add_argument("--ball", type=int, help="work in a universal-cover ball of this radius")

    command("check", cmd_check, "validate and test non-positive curvature")
    c = command("complete", cmd_complete, "complete the bouquet of the given words")
    c.add_argument("words", nargs="+", help="generator words; open words are closed through a spanning tree")
    c.add_argument("--budget", type=int, default=20000)
    c.add_argument("--log", help="write the move history to this file")
    c = command("member", cmd_member, "is g in H?")
    subgroup(c)
    c.add_argument("--g", required=True)
    c = command("power-member", cmd_power_member, "least power of g in H")
    subgroup(c)
    c.add_argument("--g", required=True)
    c.add_argument("--bound", type=int, help="largest power tried (default: completion size)")
    c = command("normal", cmd_normal, "is H normal?")
    subgroup(c)
    c = command("index", cmd_index, "index of H when finite")
    subgroup(c)
    c.add_argument("--coset-budget", type=int, default=64)
    points(command("hull", cmd_hull, "cubical convex hull"), "+")
    c = command("ball", cmd_ball, "ball in the universal cover")
    c.add_argument("--radius", type=int, default=2)
    c = command("geodesics", cmd_geodesics, "all combinatorial geodesics between two points")
    points(c, 2)
    c.add_argument("--limit", type=int)
    points(command("dual", cmd_dual, "dual cube complex of the halfspaces meeting the points"), "+")
    c = command("reduce", cmd_reduce, "all reduced forms of a word")
    c.add_argument("word")
    c.add_argument("--limit", type=int)
    command("present", cmd_present, "cubical presentation")
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        text = sys.stdin.read() if args.complex == "-" else open(args.complex).read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        Y = parse_complex(text)
    except InvalidComplexError as exc:
        if args.command == "check":
            for v in exc.violations:
                out.write(f"invalid: {v}\n")
            return EXIT_NO
        print(f"error: invalid complex: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.fn(Y, args, out)
    except (ParseError, WordError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except geometry.NotNPCError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
