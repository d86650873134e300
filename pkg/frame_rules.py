"""
Frame Rules
===========
Rules that confine the breakpoints of each fragile piece to a frame,
the Fitting Rule that shrinks fragile pieces to their frames, and the
feasible alignments used to fix repetitive pairs.

Every rule returns None when it does not apply. Deterministic rules
return one placement, branching rules a list of alternative placements.
A placement is a tuple of Placement(piece_id, frame); frame is None when
the rule's interval misses the piece entirely.
"""

import dataclasses
import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional

import networkx as nx

from constraints import Constraint, FrameSet, Piece, alignment_holds, enumerate_alignments, phantom_frame
from errors import ConstraintError, DomainError, InvariantViolation
from piece_graph import FRAGILE, LEFT, REP, RIGHT, compute_strip, rep_rep_paths
from strings_core import Instance, Interval, shortest_period_of

logger = logging.getLogger(__name__)


class Placement(NamedTuple):
    piece_id: int
    frame: Optional[Interval]


@dataclass(frozen=True)
class FrameContext:
    """Everything a rule looks at during one pass of the frames loop"""
    inst: Instance
    cons: Constraint
    frames: FrameSet
    extensions: dict
    graph: nx.Graph
    w: int


def _clip(piece: Piece, lo: int, hi: int) -> Placement:
    return Placement(piece.id, piece.interval.intersect(lo, hi))


def side_frame(ctx: FrameContext, piece: Piece, left: bool) -> Optional[Interval]:
    """Frame of the fragile neighbour on one side, phantom at a string end"""
    neighbour = ctx.cons.neighbors(piece)[0 if left else 1]
    if neighbour is None:
        return phantom_frame(piece.string_id, ctx.inst.n, left)
    return ctx.frames.get(neighbour.id)


def _period(ctx: FrameContext, key: int) -> int:
    return shortest_period_of(ctx.inst.content(ctx.cons.piece(key).interval))


def _edge(ctx: FrameContext, u, v) -> tuple:
    """(fragile piece, touched solid piece, side) for a graph edge"""
    fragile_node = u if u[0] == FRAGILE else v
    solid_node = v if fragile_node is u else u
    data = ctx.graph.edges[fragile_node, solid_node]
    return ctx.cons.piece(fragile_node[1]), ctx.cons.piece(data["piece"]), data["side"], solid_node


# ============== FRAME RULES ==============

def frame_rule_fragile_end(ctx: FrameContext) -> Optional[tuple]:
    """Rule 1: a fragile vertex of degree at most one at a string end"""
    n, w = ctx.inst.n, ctx.w
    for node in ctx.graph.nodes:
        if node[0] != FRAGILE or ctx.graph.degree(node) > 1:
            continue
        f = ctx.cons.piece(node[1])
        if f.interval.start == 1:
            return (_clip(f, 1, 1 + w),)
        if f.interval.end == n:
            return (_clip(f, n - w, n),)
    return None


def frame_rule_propagation(ctx: FrameContext) -> Optional[tuple]:
    """Rule 2: copy the frame beside the partner of a degree-one fixed vertex"""
    for node in ctx.graph.nodes:
        if node[0] not in (LEFT, RIGHT) or ctx.graph.degree(node) != 1:
            continue
        (neighbour,) = ctx.graph.neighbors(node)
        f, q, side, _ = _edge(ctx, neighbour, node)
        partner = ctx.cons.partner(q)
        other = side_frame(ctx, partner, left=(side == "left"))
        if other is None:
            continue
        alignment = ctx.cons.alignment_for(node[1])
        lo = alignment.map_position(other.start, partner.string_id)
        hi = alignment.map_position(other.end, partner.string_id)
        if side == "left":
            return (_clip(f, lo - (ctx.w - 1), hi),)
        return (_clip(f, lo, hi + ctx.w - 1),)
    return None


def frame_rule_fixed_cycle(ctx: FrameContext) -> Optional[list]:
    """Rule 3: a cycle without repetitive vertices, one branch per edge"""
    fixed_only = ctx.graph.subgraph(v for v in ctx.graph.nodes if v[0] != REP)
    try:
        cycle = nx.find_cycle(fixed_only)
    except nx.NetworkXNoCycle:
        return None
    w = ctx.w
    branches = []
    for u, v in cycle:
        f, q, _, solid_node = _edge(ctx, u, v)
        ext = ctx.extensions[q.id]
        if solid_node[0] == LEFT:
            branches.append((_clip(f, ext.lext.pos - w, ext.lext.pos + 2 * w),))
        else:
            branches.append((_clip(f, ext.rext.pos - 2 * w, ext.rext.pos + w),))
    return branches


def frame_rule_small_strip(ctx: FrameContext) -> Optional[tuple]:
    """Rule 4: frame the fragile pieces of a rep-rep path with a short strip"""
    w = ctx.w
    for path in rep_rep_paths(ctx.graph):
        strip = compute_strip(ctx.inst, ctx.cons, ctx.extensions, path)
        if strip.length >= _period(ctx, path.start) + _period(ctx, path.end):
            continue
        placements = []
        for piece_id, interval in zip(path.fragile, strip.intervals):
            f = ctx.cons.piece(piece_id)
            if interval is None:
                # no strip: the window still lies between the two extensions
                left, right = ctx.cons.neighbors(f)
                lo = ctx.extensions[right.id].lext.pos - w
                hi = ctx.extensions[left.id].rext.pos + w
            else:
                lo, hi = interval.start - w, interval.end + w
            placements.append(_clip(f, lo, hi))
        return tuple(placements)
    return None


def frame_rule_repetitive_cycle(ctx: FrameContext) -> Optional[list]:
    """Rule 5: a cycle through repetitive vertices, one branch per edge"""
    try:
        cycle = nx.find_cycle(ctx.graph)
    except nx.NetworkXNoCycle:
        return None
    repetitive = {node[1] for edge in cycle for node in edge if node[0] == REP}
    if not repetitive:
        return None
    period = min(_period(ctx, key) for key in repetitive)
    w = ctx.w
    branches = []
    for u, v in cycle:
        f, q, side, _ = _edge(ctx, u, v)
        ext = ctx.extensions[q.id]
        if side == "right":
            branches.append((_clip(f, ext.rext.pos - (period + w), ext.rext.pos + w),))
        else:
            branches.append((_clip(f, ext.lext.pos - w, ext.lext.pos + period + w),))
    return branches


def frame_rule_repetitive_degree_one(ctx: FrameContext) -> Optional[tuple]:
    """Rule 6: a repetitive vertex of degree one"""
    w = ctx.w
    for node in ctx.graph.nodes:
        if node[0] != REP or ctx.graph.degree(node) != 1:
            continue
        (neighbour,) = ctx.graph.neighbors(node)
        f, q, side, _ = _edge(ctx, neighbour, node)
        partner = ctx.cons.partner(q)
        a = side_frame(ctx, partner, left=True)
        b = side_frame(ctx, partner, left=False)
        c = side_frame(ctx, q, left=(side == "right"))
        if a is None or b is None or c is None:
            continue
        inner, outer = b.start - a.end, b.end - a.start
        if side == "right":
            return (_clip(f, c.start + inner + 1, c.end + outer + w - 2),)
        return (_clip(f, c.start - (outer + w - 2), c.end - (inner + 1)),)
    return None


# Priority order; rules restart from the top after every placement
RULES = [
    ("1", frame_rule_fragile_end, False),
    ("2", frame_rule_propagation, False),
    ("3", frame_rule_fixed_cycle, True),
    ("4", frame_rule_small_strip, False),
    ("5", frame_rule_repetitive_cycle, True),
    ("6", frame_rule_repetitive_degree_one, False),
]


def next_rule(ctx: FrameContext) -> Optional[tuple]:
    """(rule name, list of alternative placements) of the first applicable rule"""
    for name, rule, branching in RULES:
        result = rule(ctx)
        if result is not None:
            return name, (result if branching else [result])
    return None


# ============== FITTING RULE ==============

def fitting_rule(inst: Instance, cons: Constraint, frames: FrameSet) -> Optional[Constraint]:
    """
    Shrink every fragile piece to its frame and hand the trimmed ends to the
    neighbouring solid pieces. Alignments keep their reference markers.
    None when a grown fixed pair no longer satisfies its alignment.
    """
    starts, ends = {}, {}
    fitted = {}
    for f in cons.all_fragile():
        frame = frames.get(f.id)
        if frame is None:
            raise ConstraintError(f"fragile piece {f} has no frame")
        left, right = cons.neighbors(f)
        c = frame.start if left is not None else f.interval.start
        d = frame.end if right is not None else f.interval.end
        if left is not None:
            ends[left.id] = c
        if right is not None:
            starts[right.id] = d
        fitted[f.id] = Interval.span(f.string_id, c, d)

    def rebuild(pieces):
        out = []
        for p in pieces:
            if p.id in fitted:
                out.append(dataclasses.replace(p, interval=fitted[p.id]))
            else:
                iv = p.interval
                grown = Interval.span(iv.string_id, starts.get(p.id, iv.start), ends.get(p.id, iv.end))
                out.append(dataclasses.replace(p, interval=grown))
        return tuple(out)

    result = dataclasses.replace(cons, x_pieces=rebuild(cons.x_pieces), y_pieces=rebuild(cons.y_pieces))
    alignments = []
    for key, alignment in cons.alignments:
        s = result.piece(key).interval
        t = result.partner(result.piece(key)).interval
        moved = alignment.regrown(s, t)
        if not alignment_holds(inst, s, t, moved.shift):
            logger.debug("fitting broke the alignment of pair %d", key)
            return None
        alignments.append((key, moved))
    return dataclasses.replace(result, alignments=tuple(alignments))


# ============== FEASIBLE ALIGNMENTS ==============

def long_period_limit(k: int, period: int) -> int:
    return (12 * k * k + 9 * k) * period


def feasible_alignment_bound(k: int) -> int:
    return 24 * k * k + 18 * k


def fixable(inst: Instance, cons: Constraint, piece: Piece, k: int) -> bool:
    """All fragile pieces beside a repetitive pair are short relative to its period"""
    partner = cons.partner(piece)
    limit = long_period_limit(k, shortest_period_of(inst.content(piece.interval)))
    return all(nb is None or nb.interval.length <= limit
               for p in (piece, partner) for nb in cons.neighbors(p))


def feasible_alignments(inst: Instance, cons: Constraint, piece: Piece, k: int) -> list:
    """Alignments of a repetitive pair whose images avoid every other solid piece"""
    if cons.is_fixed(piece):
        raise DomainError(f"{piece} already has an alignment")
    if not fixable(inst, cons, piece, k):
        raise DomainError(f"fragile pieces beside {piece} are too long to fix it")
    s = cons.piece(cons.pair_key(piece))
    t = cons.partner(s)
    others_x = [p.interval for p in cons.solid(s.string_id) if p.id != s.id]
    others_y = [p.interval for p in cons.solid(t.string_id) if p.id != t.id]
    feasible = []
    for alignment in enumerate_alignments(inst, s.interval, t.interval):
        y_lo = t.interval.start + alignment.shift
        x_lo = s.interval.start - alignment.shift
        y_hi, x_hi = y_lo + s.interval.length - 1, x_lo + t.interval.length - 1
        if any(o.overlaps(y_lo, y_hi) for o in others_y) or any(o.overlaps(x_lo, x_hi) for o in others_x):
            continue
        feasible.append(alignment)
    if len(feasible) > feasible_alignment_bound(k):
        raise InvariantViolation(f"{len(feasible)} feasible alignments for {s}, bound {feasible_alignment_bound(k)}")
    return feasible
