from __future__ import annotations

import numpy as np
import pytest

from constraints import Alignment, Constraint, FrameSet, Piece, PieceKind, initial_constraint
from errors import ConstraintError, DomainError
from frame_rules import (
    FrameContext,
    Placement,
    feasible_alignment_bound,
    feasible_alignments,
    fitting_rule,
    fixable,
    frame_rule_fixed_cycle,
    frame_rule_fragile_end,
    frame_rule_propagation,
    frame_rule_repetitive_cycle,
    frame_rule_repetitive_degree_one,
    frame_rule_small_strip,
    long_period_limit,
    next_rule,
)
from piece_graph import all_extensions, build_piece_graph
from strings_core import Instance, Interval, StringId

X, Y = StringId.X, StringId.Y
SOLID, FRAGILE = PieceKind.SOLID, PieceKind.FRAGILE


def context(inst, cons, frames=None, w=1) -> FrameContext:
    frames = frames or FrameSet()
    return FrameContext(inst, cons, frames, all_extensions(inst, cons), build_piece_graph(cons, frames), w)


def middle_block_constraint() -> Constraint:
    s, t = Interval.span(X, 7, 15), Interval.span(Y, 11, 19)
    return Constraint(
        x_pieces=(Piece(0, Interval.span(X, 1, 7), FRAGILE), Piece(1, s, SOLID),
                  Piece(2, Interval.span(X, 15, 25), FRAGILE)),
        y_pieces=(Piece(3, Interval.span(Y, 1, 11), FRAGILE), Piece(4, t, SOLID),
                  Piece(5, Interval.span(Y, 19, 25), FRAGILE)),
        matching=((1, 4),),
        alignments=((1, Alignment(s, t, 0)),),
    )


def crossed_pairs() -> tuple:
    """Two fixed pairs whose fragile pieces form a cycle in the piece graph"""
    inst = Instance.from_symbols("abzwcd", "abwzcd", k=3)
    a, a2 = Interval.span(X, 1, 2), Interval.span(Y, 1, 2)
    b, b2 = Interval.span(X, 5, 6), Interval.span(Y, 5, 6)
    cons = Constraint(
        x_pieces=(Piece(0, a, SOLID), Piece(1, Interval.span(X, 2, 5), FRAGILE), Piece(2, b, SOLID)),
        y_pieces=(Piece(3, a2, SOLID), Piece(4, Interval.span(Y, 2, 5), FRAGILE), Piece(5, b2, SOLID)),
        matching=((0, 3), (2, 5)),
        alignments=((0, Alignment(a, a2, 0)), (2, Alignment(b, b2, 0))),
    )
    return inst, cons


def two_runs() -> tuple:
    inst = Instance.from_symbols("aaaaaaab", "baaaaaaa", k=4)
    cons = Constraint(
        x_pieces=(Piece(0, Interval.span(X, 1, 3), SOLID), Piece(1, Interval.span(X, 3, 5), FRAGILE),
                  Piece(2, Interval.span(X, 5, 7), SOLID), Piece(3, Interval.span(X, 7, 8), FRAGILE)),
        y_pieces=(Piece(4, Interval.span(Y, 1, 2), FRAGILE), Piece(5, Interval.span(Y, 2, 4), SOLID),
                  Piece(6, Interval.span(Y, 4, 6), FRAGILE), Piece(7, Interval.span(Y, 6, 8), SOLID)),
        matching=((0, 5), (2, 7)),
    )
    return inst, cons


def test_fragile_end_rule_frames_the_string_start() -> None:
    inst = Instance.from_symbols("abcdefghij", "jihgfedcba", k=2)
    ctx = context(inst, initial_constraint(inst), w=2)
    assert frame_rule_fragile_end(ctx) == (Placement(0, Interval.span(X, 1, 3)),)
    assert next_rule(ctx) == ("1", [(Placement(0, Interval.span(X, 1, 3)),)])


def test_fragile_end_rule_uses_the_last_marker_otherwise(worked_instance) -> None:
    cons = middle_block_constraint()
    frames = FrameSet({0: Interval.span(X, 5, 7), 3: Interval.span(Y, 9, 11)})
    ctx = context(worked_instance, cons, frames, w=3)
    assert frame_rule_fragile_end(ctx) == (Placement(2, Interval.span(X, 22, 25)),)


def test_propagation_maps_the_partner_frame_through_the_alignment(worked_instance) -> None:
    cons = middle_block_constraint()
    ctx = context(worked_instance, cons, FrameSet({3: Interval.span(Y, 4, 7)}), w=5)
    assert frame_rule_propagation(ctx) == (Placement(0, Interval.span(X, 1, 3)),)


def test_propagation_on_the_right_side(worked_instance) -> None:
    cons = middle_block_constraint()
    frames = FrameSet({0: Interval.span(X, 5, 7), 3: Interval.span(Y, 9, 11), 2: Interval.span(X, 15, 17)})
    ctx = context(worked_instance, cons, frames, w=2)
    # x[15,17] seen from y is [19,21]; the right side widens by w - 1
    assert frame_rule_propagation(ctx) == (Placement(5, Interval.span(Y, 19, 22)),)


def test_fixed_cycle_branches_once_per_edge() -> None:
    inst, cons = crossed_pairs()
    ctx = context(inst, cons, w=1)
    assert frame_rule_fragile_end(ctx) is None
    assert frame_rule_propagation(ctx) is None
    branches = frame_rule_fixed_cycle(ctx)
    assert len(branches) == 4
    frames = {(p.piece_id, p.frame) for (p,) in branches}
    assert frames == {
        (1, Interval.span(X, 2, 3)), (1, Interval.span(X, 4, 5)),
        (4, Interval.span(Y, 2, 3)), (4, Interval.span(Y, 4, 5)),
    }
    name, alternatives = next_rule(ctx)
    assert name == "3" and len(alternatives) == 4


def test_small_strip_frames_the_whole_path() -> None:
    inst, cons = two_runs()
    ctx = context(inst, cons, w=1)
    # strip x[4,4] is shorter than the two periods together
    assert frame_rule_small_strip(ctx) == (Placement(1, Interval.span(X, 3, 5)),)


def test_repetitive_degree_one_rule() -> None:
    inst, cons = two_runs()
    frames = FrameSet({1: Interval.span(X, 3, 5), 3: Interval.span(X, 7, 8), 6: Interval.span(Y, 4, 6)})
    ctx = context(inst, cons, frames, w=1)
    placement = frame_rule_repetitive_degree_one(ctx)
    assert placement is not None
    (only,) = placement
    assert only.piece_id == 4
    assert only.frame == Interval.span(Y, 1, 2)


def test_fitting_with_frames_equal_to_pieces_changes_nothing(worked_instance) -> None:
    cons = middle_block_constraint()
    frames = FrameSet({p.id: p.interval for p in cons.all_fragile()})
    assert fitting_rule(worked_instance, cons, frames) == cons


def test_fitting_shrinks_fragile_pieces_and_grows_solid_ones() -> None:
    inst = Instance.from_symbols("abcdefgh", "efghabcd", k=2)
    s, t = Interval.span(X, 1, 2), Interval.span(Y, 5, 6)
    cons = Constraint(
        x_pieces=(Piece(0, s, SOLID), Piece(1, Interval.span(X, 2, 8), FRAGILE)),
        y_pieces=(Piece(2, Interval.span(Y, 1, 5), FRAGILE), Piece(3, t, SOLID),
                  Piece(4, Interval.span(Y, 6, 8), FRAGILE)),
        matching=((0, 3),),
        alignments=((0, Alignment(s, t, 0)),),
    )
    frames = FrameSet({1: Interval.span(X, 3, 4), 2: Interval.span(Y, 4, 5), 4: Interval.span(Y, 7, 8)})
    fitted = fitting_rule(inst, cons, frames)
    assert fitted.piece(0).interval == Interval.span(X, 1, 3)
    assert fitted.piece(1).interval == Interval.span(X, 3, 8)
    assert fitted.piece(2).interval == Interval.span(Y, 1, 5)
    assert fitted.piece(3).interval == Interval.span(Y, 5, 7)
    assert fitted.piece(4).interval == Interval.span(Y, 7, 8)
    (key, alignment), = fitted.alignments
    assert key == 0
    assert alignment.diagonal == 4 and alignment.shift == 0
    assert alignment.s == Interval.span(X, 1, 3)


def test_fitting_drops_a_broken_alignment(worked_instance) -> None:
    cons = middle_block_constraint()
    frames = FrameSet({0: Interval.span(X, 4, 6), 2: Interval.span(X, 15, 25),
                       3: Interval.span(Y, 9, 10), 5: Interval.span(Y, 19, 25)})
    assert fitting_rule(worked_instance, cons, frames) is None


def test_fitting_needs_every_frame(worked_instance) -> None:
    with pytest.raises(ConstraintError):
        fitting_rule(worked_instance, middle_block_constraint(), FrameSet())


def test_feasible_alignments_of_a_repetitive_pair() -> None:
    inst = Instance.from_symbols("aaaab", "baaaa", k=2)
    cons = Constraint(
        x_pieces=(Piece(0, Interval.span(X, 1, 3), SOLID), Piece(1, Interval.span(X, 3, 5), FRAGILE)),
        y_pieces=(Piece(2, Interval.span(Y, 1, 3), FRAGILE), Piece(3, Interval.span(Y, 3, 5), SOLID)),
        matching=((0, 3),),
    )
    assert long_period_limit(2, 1) == 66
    assert feasible_alignment_bound(2) == 132
    assert fixable(inst, cons, cons.piece(0), 2)
    assert [a.shift for a in feasible_alignments(inst, cons, cons.piece(3), 2)] == [-1, 0]
    fixed = cons.with_alignment(0, feasible_alignments(inst, cons, cons.piece(0), 2)[0])
    with pytest.raises(DomainError):
        feasible_alignments(inst, fixed, fixed.piece(0), 2)


def test_feasible_alignments_avoid_other_solid_pieces() -> None:
    inst, cons = two_runs()
    found = feasible_alignments(inst, cons, cons.piece(0), 4)
    for alignment in found:
        y_lo = alignment.t.start + alignment.shift
        assert not Interval.span(Y, 6, 8).overlaps(y_lo, y_lo + 2)
        x_lo = alignment.s.start - alignment.shift
        assert not Interval.span(X, 5, 7).overlaps(x_lo, x_lo + 2)
    assert [a.shift for a in found] == [0]


def test_repetitive_cycle_branches_once_per_edge() -> None:
    inst, cons = two_runs()
    ctx = context(inst, cons, w=1)
    assert frame_rule_fixed_cycle(ctx) is None
    branches = frame_rule_repetitive_cycle(ctx)
    assert len(branches) == 4
    assert {p for (p,) in branches} == {
        Placement(1, Interval.span(X, 3, 5)), Placement(6, Interval.span(Y, 4, 6)),
    }


def scan_feasible_shifts(inst, cons, s, t) -> list:
    """Every shift, checked symbol by symbol, whose images land on no other solid piece"""
    taken_x = {q for p in cons.solid(X) if p.id != s.id for q in range(p.interval.start, p.interval.end + 1)}
    taken_y = {q for p in cons.solid(Y) if p.id != t.id for q in range(p.interval.start, p.interval.end + 1)}
    shifts = []
    for shift in range(-(s.interval.length - 1), t.interval.length):
        y_image = [t.interval.start + shift + i for i in range(s.interval.length)]
        x_image = [s.interval.start - shift + i for i in range(t.interval.length)]
        if min(y_image + x_image) < 1 or max(y_image + x_image) > inst.n:
            continue
        if any(inst.y[q - 1] != inst.x[s.interval.start + i - 1] for i, q in enumerate(y_image)):
            continue
        if any(inst.x[q - 1] != inst.y[t.interval.start + i - 1] for i, q in enumerate(x_image)):
            continue
        if taken_y.intersection(y_image) or taken_x.intersection(x_image):
            continue
        shifts.append(shift)
    return shifts


def repetitive_cuts(rng, n: int, period: int) -> list:
    """Cuts leaving every solid piece at least two periods long"""
    while True:
        cuts = sorted(int(c) for c in rng.choice(np.arange(2 * period, n - 2 * period + 2), size=4, replace=False))
        if cuts[2] - cuts[1] + 1 >= 2 * period:
            return cuts


def test_feasible_alignments_match_a_naive_scan() -> None:
    rng = np.random.Generator(np.random.PCG64(23))
    total = 0
    for _ in range(80):
        root = ("a", "ab", "aab", "abc")[int(rng.integers(0, 4))]
        text = root * (18 // len(root) + int(rng.integers(0, 3)))
        inst, n = Instance.from_symbols(text, text, k=1), len(text)
        u, c1, c2, v = repetitive_cuts(rng, n, len(root))
        u2, d1, d2, v2 = repetitive_cuts(rng, n, len(root))
        cons = Constraint(
            x_pieces=(Piece(0, Interval.span(X, 1, u), SOLID), Piece(1, Interval.span(X, u, c1), FRAGILE),
                      Piece(2, Interval.span(X, c1, c2), SOLID), Piece(3, Interval.span(X, c2, v), FRAGILE),
                      Piece(4, Interval.span(X, v, n), SOLID)),
            y_pieces=(Piece(5, Interval.span(Y, 1, u2), SOLID), Piece(6, Interval.span(Y, u2, d1), FRAGILE),
                      Piece(7, Interval.span(Y, d1, d2), SOLID), Piece(8, Interval.span(Y, d2, v2), FRAGILE),
                      Piece(9, Interval.span(Y, v2, n), SOLID)),
            matching=((0, 5), (2, 7), (4, 9)),
        )
        for x_id, y_id in cons.matching:
            s, t = cons.piece(x_id), cons.piece(y_id)
            shifts = [a.shift for a in feasible_alignments(inst, cons, s, 1)]
            assert shifts == scan_feasible_shifts(inst, cons, s, t), (text, cons, x_id)
            assert [a.shift for a in feasible_alignments(inst, cons, t, 1)] == shifts
            assert len(shifts) <= feasible_alignment_bound(1)
            total += len(shifts)
    assert total > 0
