from __future__ import annotations

import networkx as nx
import numpy as np
import pytest

from constraints import Alignment, Constraint, FrameSet, Piece, PieceKind, alignment_holds, validate_constraint
from errors import InvariantViolation
from piece_graph import (
    FRAGILE,
    LEFT,
    REP,
    RIGHT,
    RepRepPath,
    all_extensions,
    build_piece_graph,
    check_degree_bounds,
    compute_strip,
    frameless_fragile,
    max_extension,
    rep_rep_paths,
)
from strings_core import Instance, Interval, StringId

X, Y = StringId.X, StringId.Y
SOLID, FRAGILE_KIND = PieceKind.SOLID, PieceKind.FRAGILE


def middle_block_constraint() -> Constraint:
    s, t = Interval.span(X, 7, 15), Interval.span(Y, 11, 19)
    return Constraint(
        x_pieces=(Piece(0, Interval.span(X, 1, 7), FRAGILE_KIND), Piece(1, s, SOLID),
                  Piece(2, Interval.span(X, 15, 25), FRAGILE_KIND)),
        y_pieces=(Piece(3, Interval.span(Y, 1, 11), FRAGILE_KIND), Piece(4, t, SOLID),
                  Piece(5, Interval.span(Y, 19, 25), FRAGILE_KIND)),
        matching=((1, 4),),
        alignments=((1, Alignment(s, t, 0)),),
    )


def two_runs_instance() -> tuple:
    """x = aaaaaaab, y = baaaaaaa with two repetitive a-runs per string"""
    inst = Instance.from_symbols("aaaaaaab", "baaaaaaa", k=4)
    cons = Constraint(
        x_pieces=(Piece(0, Interval.span(X, 1, 3), SOLID), Piece(1, Interval.span(X, 3, 5), FRAGILE_KIND),
                  Piece(2, Interval.span(X, 5, 7), SOLID), Piece(3, Interval.span(X, 7, 8), FRAGILE_KIND)),
        y_pieces=(Piece(4, Interval.span(Y, 1, 2), FRAGILE_KIND), Piece(5, Interval.span(Y, 2, 4), SOLID),
                  Piece(6, Interval.span(Y, 4, 6), FRAGILE_KIND), Piece(7, Interval.span(Y, 6, 8), SOLID)),
        matching=((0, 5), (2, 7)),
    )
    return inst, cons


def test_fixed_extension_stops_where_the_strings_disagree(worked_instance) -> None:
    cons = middle_block_constraint()
    ext = max_extension(worked_instance, cons, cons.piece(1))
    assert ext.interval == Interval.span(X, 7, 15)
    assert max_extension(worked_instance, cons, cons.piece(4)).interval == Interval.span(Y, 11, 19)


def test_periodic_extension_respects_other_solid_pieces() -> None:
    inst, cons = two_runs_instance()
    extensions = all_extensions(inst, cons)
    assert extensions[0].interval == Interval.span(X, 1, 4)
    assert extensions[2].interval == Interval.span(X, 4, 7)
    assert extensions[5].interval == Interval.span(Y, 2, 5)
    assert extensions[7].interval == Interval.span(Y, 5, 8)


def test_extensions_reject_a_period_mismatch() -> None:
    inst = Instance.from_symbols("aaabab", "ababaa", k=3)
    cons = Constraint(
        x_pieces=(Piece(0, Interval.span(X, 1, 3), SOLID), Piece(1, Interval.span(X, 3, 6), FRAGILE_KIND)),
        y_pieces=(Piece(2, Interval.span(Y, 1, 3), SOLID), Piece(3, Interval.span(Y, 3, 6), FRAGILE_KIND)),
        matching=((0, 2),),
    )
    assert all_extensions(inst, cons) is None


def test_piece_graph_of_a_fixed_pair() -> None:
    cons = middle_block_constraint()
    graph = build_piece_graph(cons, FrameSet())
    assert set(graph.nodes) == {(FRAGILE, 0), (FRAGILE, 2), (FRAGILE, 3), (FRAGILE, 5), (LEFT, 1), (RIGHT, 1)}
    assert set(graph.neighbors((LEFT, 1))) == {(FRAGILE, 0), (FRAGILE, 3)}
    assert graph.edges[(FRAGILE, 0), (LEFT, 1)]["side"] == "left"
    assert graph.edges[(FRAGILE, 2), (RIGHT, 1)]["side"] == "right"
    check_degree_bounds(graph)
    assert not nx.cycle_basis(graph)
    assert sorted(frameless_fragile(graph)) == [0, 2, 3, 5]


def test_framed_pieces_leave_the_graph() -> None:
    cons = middle_block_constraint()
    graph = build_piece_graph(cons, FrameSet({3: Interval.span(Y, 4, 7)}))
    assert (FRAGILE, 3) not in graph
    assert graph.degree((LEFT, 1)) == 1


def test_repetitive_pair_is_one_vertex() -> None:
    cons = middle_block_constraint().with_alignment(1, None)
    graph = build_piece_graph(cons, FrameSet())
    assert graph.degree((REP, 1)) == 4
    check_degree_bounds(graph)


def test_degree_bound_violation_is_an_invariant_error() -> None:
    graph = nx.Graph()
    for i in range(3):
        graph.add_edge((LEFT, 0), (FRAGILE, i))
    with pytest.raises(InvariantViolation):
        check_degree_bounds(graph)


def test_rep_rep_paths_through_a_fixed_pair() -> None:
    graph = nx.Graph()
    graph.add_node((REP, 1))
    graph.add_edges_from([((REP, 1), (FRAGILE, 10)), ((FRAGILE, 10), (LEFT, 2)),
                          ((LEFT, 2), (FRAGILE, 11)), ((FRAGILE, 11), (REP, 3))])
    assert rep_rep_paths(graph) == [RepRepPath(1, 3, (10, 11), (2,))]


def test_rep_rep_paths_of_two_runs() -> None:
    inst, cons = two_runs_instance()
    paths = rep_rep_paths(build_piece_graph(cons, FrameSet()))
    assert [p.fragile for p in paths] == [(1,), (6,)]
    assert all((p.start, p.end) == (0, 2) for p in paths)


def test_strip_of_a_single_fragile_piece() -> None:
    inst, cons = two_runs_instance()
    extensions = all_extensions(inst, cons)
    strip = compute_strip(inst, cons, extensions, RepRepPath(0, 2, (1,), ()))
    assert strip.intervals == (Interval.span(X, 4, 4),)
    assert strip.length == 1


def test_empty_strip() -> None:
    inst = Instance.from_symbols("aaaabcccc", "bccccaaaa", k=3)
    cons = Constraint(
        x_pieces=(Piece(0, Interval.span(X, 1, 4), SOLID), Piece(1, Interval.span(X, 4, 6), FRAGILE_KIND),
                  Piece(2, Interval.span(X, 6, 9), SOLID)),
        y_pieces=(Piece(3, Interval.span(Y, 1, 2), FRAGILE_KIND), Piece(4, Interval.span(Y, 2, 5), SOLID),
                  Piece(5, Interval.span(Y, 5, 6), FRAGILE_KIND), Piece(6, Interval.span(Y, 6, 9), SOLID)),
        matching=((0, 6), (2, 4)),
    )
    extensions = all_extensions(inst, cons)
    strip = compute_strip(inst, cons, extensions, RepRepPath(0, 2, (1,), ()))
    assert strip.length == 0
    assert strip.intervals == (None,)


def scan_strip(cons: Constraint, extensions: dict, path: RepRepPath):
    """Longest [lo, hi] whose every position and its images stay inside all allowed ranges"""
    pieces = [cons.piece(pid) for pid in path.fragile]
    n = max(p.interval.end for p in cons.x_pieces)

    def images(pos):
        out = [pos]
        for previous, link in zip(pieces, path.links):
            out.append(cons.alignment_for(link).map_position(out[-1], previous.string_id))
        return out

    def allowed(piece, pos):
        ranges = [piece.interval] + [extensions[nb.id].interval for nb in cons.neighbors(piece)]
        return all(r.start <= pos <= r.end for r in ranges)

    best = None
    for lo in range(1, n + 1):
        for hi in range(lo, n + 1):
            if all(allowed(f, q) for pos in range(lo, hi + 1) for f, q in zip(pieces, images(pos))):
                if best is None or hi - lo > best[1] - best[0]:
                    best = (lo, hi)
    if best is None:
        return None
    return tuple(Interval.span(f.string_id, a, b)
                 for f, a, b in zip(pieces, images(best[0]), images(best[1])))


def periodic_cuts(rng, n: int, period: int) -> list:
    """Four increasing positions leaving repetitive pieces of at least two periods at both ends"""
    return sorted(int(c) for c in rng.choice(np.arange(2 * period, n - 2 * period + 2), size=4, replace=False))


def test_strip_matches_a_quadratic_search() -> None:
    rng = np.random.Generator(np.random.PCG64(17))
    checked = nonempty = 0
    for _ in range(60):
        root = ("a", "ab", "aab", "abc")[int(rng.integers(0, 4))]
        text = root * (18 // len(root) + int(rng.integers(0, 3)))
        inst, n = Instance.from_symbols(text, text), len(text)
        u, c1, c2, v = periodic_cuts(rng, n, len(root))
        u2, d1, d2, v2 = periodic_cuts(rng, n, len(root))
        s, t = Interval.span(X, c1, c2), Interval.span(Y, d1, d2)
        shifts = [d for d in range(-(s.length - 1), t.length) if alignment_holds(inst, s, t, d)]
        if not shifts:
            continue
        cons = Constraint(
            x_pieces=(Piece(0, Interval.span(X, 1, u), SOLID), Piece(1, Interval.span(X, u, c1), FRAGILE_KIND),
                      Piece(2, s, SOLID), Piece(3, Interval.span(X, c2, v), FRAGILE_KIND),
                      Piece(4, Interval.span(X, v, n), SOLID)),
            y_pieces=(Piece(5, Interval.span(Y, 1, u2), SOLID), Piece(6, Interval.span(Y, u2, d1), FRAGILE_KIND),
                      Piece(7, t, SOLID), Piece(8, Interval.span(Y, d2, v2), FRAGILE_KIND),
                      Piece(9, Interval.span(Y, v2, n), SOLID)),
            matching=((0, 5), (2, 7), (4, 9)),
            alignments=((2, Alignment(s, t, shifts[int(rng.integers(0, len(shifts)))])),),
        )
        assert validate_constraint(inst, cons)
        extensions = all_extensions(inst, cons)
        if extensions is None:
            continue
        for path in rep_rep_paths(build_piece_graph(cons, FrameSet())):
            assert path.links == (2,)
            strip = compute_strip(inst, cons, extensions, path)
            expected = scan_strip(cons, extensions, path)
            if expected is None:
                assert strip.length == 0 and strip.intervals == (None, None)
            else:
                assert strip.intervals == expected, (text, cons, path)
                assert strip.length == expected[0].length
                nonempty += 1
            checked += 1
    assert checked > 0 and nonempty > 0
