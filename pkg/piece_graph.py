"""
Piece Graph
===========
Maximum extensions of solid pieces, the bipartite piece graph over
frameless fragile pieces, rep-rep paths and their strips.

Graph vertices are tuples:
    ("f", id)     frameless fragile piece
    ("l", key)    left side of a fixed pair (key = id of its x piece)
    ("r", key)    right side of a fixed pair
    ("v", key)    repetitive pair
Every edge records the solid piece the fragile piece touches ("piece")
and on which side of it the fragile piece lies ("side").
"""

import logging
from dataclasses import dataclass
from typing import Optional

import networkx as nx

from constraints import Constraint, FrameSet, Piece
from errors import InvariantViolation
from strings_core import Instance, Interval, Marker, StringId, shortest_period_of

logger = logging.getLogger(__name__)

FRAGILE, LEFT, RIGHT, REP = "f", "l", "r", "v"

# Degree limits per vertex kind
MAX_DEGREE = {FRAGILE: 2, LEFT: 2, RIGHT: 2, REP: 4}


@dataclass(frozen=True)
class MaxExtension:
    piece_id: int
    lext: Marker
    rext: Marker

    @property
    def interval(self) -> Interval:
        return Interval(self.lext, self.rext)


@dataclass(frozen=True)
class RepRepPath:
    """v_s, f_1, u_1, ..., f_l, v_t; links[i] is the fixed pair between f_i and f_i+1"""
    start: int
    end: int
    fragile: tuple
    links: tuple


@dataclass(frozen=True)
class Strip:
    path: RepRepPath
    intervals: tuple        # one per fragile piece, None when the strip is empty
    length: int


# ============== MAXIMUM EXTENSIONS ==============

def _free_range(cons: Constraint, piece: Piece, n: int) -> tuple:
    """Positions an extension of piece may use without entering another solid piece"""
    left, right = cons.neighbors(piece)
    lo, hi = 1, n
    if left is not None:
        before = cons.neighbors(left)[0]
        if before is not None:
            lo = before.interval.end + 1
    if right is not None:
        after = cons.neighbors(right)[1]
        if after is not None:
            hi = after.interval.start - 1
    return lo, hi


def _fixed_extensions(inst, cons, s, t, alignment):
    s_lo, s_hi = _free_range(cons, s, inst.n)
    t_lo, t_hi = _free_range(cons, t, inst.n)
    a, b = alignment.s_ref.pos, alignment.t_ref.pos

    def reach(step):
        i = 0
        while True:
            p, q = a + i * step, b + i * step
            if not (s_lo <= p <= s_hi and t_lo <= q <= t_hi) or inst.x[p - 1] != inst.y[q - 1]:
                return i - 1
            i += 1

    right, left = reach(1), reach(-1)
    if right < 0 or left < 0:
        return None
    return (MaxExtension(s.id, Marker(StringId.X, a - left), Marker(StringId.X, a + right)),
            MaxExtension(t.id, Marker(StringId.Y, b - left), Marker(StringId.Y, b + right)))


def _periodic_extension(inst, cons, piece):
    text = inst.text(piece.string_id)
    iv = piece.interval
    p = shortest_period_of(inst.content(iv))
    lo, hi = _free_range(cons, piece, inst.n)
    right = iv.end
    while right + 1 <= hi and text[right] == text[right - p]:
        right += 1
    left = iv.start
    while left - 1 >= lo and text[left - 2] == text[left - 2 + p]:
        left -= 1
    return MaxExtension(piece.id, Marker(piece.string_id, left), Marker(piece.string_id, right))


def max_extension(inst: Instance, cons: Constraint, piece: Piece) -> Optional[MaxExtension]:
    """
    Maximum extension of a solid piece.

    Fixed pairs extend symmetrically around their reference markers while
    the two strings agree; repetitive pieces extend while their shortest
    period continues. Neither enters another solid piece. None when the
    result does not cover the piece, which no satisfying partition allows.
    """
    partner = cons.partner(piece)
    key = cons.pair_key(piece)
    alignment = cons.alignment_for(key)
    if alignment is None:
        ext = _periodic_extension(inst, cons, piece)
    else:
        s, t = (piece, partner) if piece.string_id is StringId.X else (partner, piece)
        both = _fixed_extensions(inst, cons, s, t, alignment)
        if both is None:
            return None
        ext = both[0] if piece.string_id is StringId.X else both[1]
    if not ext.interval.contains_interval(piece.interval):
        return None
    return ext


def all_extensions(inst: Instance, cons: Constraint) -> Optional[dict]:
    """Extensions of every solid piece keyed by piece id; None if any is infeasible"""
    extensions = {}
    for s, t in cons.matched_pieces():
        if cons.alignment_for(s.id) is None:
            if shortest_period_of(inst.content(s.interval)) != shortest_period_of(inst.content(t.interval)):
                logger.debug("repetitive pair %s/%s lost its common period", s, t)
                return None
        for piece in (s, t):
            ext = max_extension(inst, cons, piece)
            if ext is None:
                logger.debug("extension of %s does not cover it", piece)
                return None
            extensions[piece.id] = ext
    return extensions


# ============== GRAPH ==============

def _solid_vertex(cons: Constraint, piece: Piece, side: str) -> tuple:
    key = cons.pair_key(piece)
    if not cons.is_fixed(piece):
        return (REP, key)
    # a fragile piece left of s touches l_s, one right of s touches r_s
    return (LEFT, key) if side == "left" else (RIGHT, key)


def build_piece_graph(cons: Constraint, frames: FrameSet) -> nx.Graph:
    graph = nx.Graph()
    for s, _ in cons.matched_pieces():
        if cons.is_fixed(s):
            graph.add_node((LEFT, s.id), kind=LEFT)
            graph.add_node((RIGHT, s.id), kind=RIGHT)
        else:
            graph.add_node((REP, s.id), kind=REP)
    for f in cons.all_fragile():
        if f.id in frames:
            continue
        node = (FRAGILE, f.id)
        graph.add_node(node, kind=FRAGILE)
        left, right = cons.neighbors(f)
        if left is not None:
            graph.add_edge(node, _solid_vertex(cons, left, "right"), piece=left.id, side="right")
        if right is not None:
            graph.add_edge(node, _solid_vertex(cons, right, "left"), piece=right.id, side="left")
    return graph


def check_degree_bounds(graph: nx.Graph) -> None:
    for node, degree in graph.degree():
        if degree > MAX_DEGREE[node[0]]:
            raise InvariantViolation(f"piece graph vertex {node} has degree {degree}")


def frameless_fragile(graph: nx.Graph) -> list:
    return [node[1] for node in graph.nodes if node[0] == FRAGILE]


# ============== REP-REP PATHS AND STRIPS ==============

def rep_rep_paths(graph: nx.Graph) -> list:
    """Paths between repetitive vertices through fixed and fragile vertices only"""
    paths, seen = [], set()
    for start in [v for v in graph.nodes if v[0] == REP]:
        for first in graph.neighbors(start):
            fragile, links = [first[1]], []
            previous, current = start, first
            while True:
                onward = [v for v in graph.neighbors(current) if v != previous]
                if not onward:
                    break
                hop = onward[0]
                if hop[0] == REP:
                    canonical = min(tuple(fragile), tuple(reversed(fragile)))
                    if canonical not in seen:
                        seen.add(canonical)
                        paths.append(RepRepPath(start[1], hop[1], tuple(fragile), tuple(links)))
                    break
                beyond = [v for v in graph.neighbors(hop) if v != current]
                if not beyond or beyond[0][1] in fragile:
                    break
                links.append(hop[1])
                fragile.append(beyond[0][1])
                previous, current = hop, beyond[0]
    return paths


def compute_strip(inst: Instance, cons: Constraint, extensions: dict, path: RepRepPath) -> Strip:
    """
    The maximal strip of a rep-rep path.

    Consecutive strip intervals are translates of each other through the
    fixed pair between them, so every interval is the first one shifted by
    a fixed amount. The first interval is the intersection of all allowed
    ranges moved back into the first fragile piece.
    """
    lo, hi = None, None
    shifts = []
    shift = 0
    pieces = [cons.piece(pid) for pid in path.fragile]
    for i, f in enumerate(pieces):
        if i > 0:
            alignment = cons.alignment_for(path.links[i - 1])
            previous = pieces[i - 1].string_id
            shift += alignment.map_position(0, previous)
        shifts.append(shift)
        left, right = cons.neighbors(f)
        a, b = f.interval.start, f.interval.end
        for neighbour in (left, right):
            ext = extensions[neighbour.id]
            a, b = max(a, ext.lext.pos), min(b, ext.rext.pos)
        lo = a - shift if lo is None else max(lo, a - shift)
        hi = b - shift if hi is None else min(hi, b - shift)
    if lo > hi:
        return Strip(path, tuple(None for _ in pieces), 0)
    intervals = tuple(Interval.span(f.string_id, lo + d, hi + d) for f, d in zip(pieces, shifts))
    return Strip(path, intervals, hi - lo + 1)
