"""
Constraints
===========
Pieces, splittings, alignments, the constraint tuple (S, F, M, R_S)
and frame sets, with their structural validators.

A constraint is a snapshot value. Branching builds new constraints with
dataclasses.replace() and never mutates one that another branch can see.
"""

import dataclasses
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Optional

from errors import ConstraintError, DomainError
from strings_core import Instance, Interval, Marker, StringId, shortest_period_of

logger = logging.getLogger(__name__)


class PieceKind(Enum):
    SOLID = "solid"
    FRAGILE = "fragile"


@dataclass(frozen=True)
class Piece:
    id: int
    interval: Interval
    kind: PieceKind

    @property
    def is_solid(self) -> bool:
        return self.kind is PieceKind.SOLID

    @property
    def string_id(self) -> StringId:
        return self.interval.string_id

    def __str__(self) -> str:
        return f"{self.kind.value}#{self.id}{self.interval}"


@dataclass(frozen=True)
class Splitting:
    """Pieces of length >= 2 over one interval, consecutive pieces sharing one marker"""
    pieces: tuple

    def covers(self, f: Interval) -> bool:
        if not self.pieces or self.pieces[0].first != f.first or self.pieces[-1].last != f.last:
            return False
        pairs = zip(self.pieces, self.pieces[1:])
        return all(p.length >= 2 for p in self.pieces) and all(a.last == b.first for a, b in pairs)


# ============== ALIGNMENTS ==============

@dataclass(frozen=True)
class Alignment:
    """
    Shift δ of a matched pair (s in x, t in y).

    The reference markers are s.first and t.first ⊞ δ. Matched markers of
    the pair then satisfy y-position = x-position + diagonal.
    """
    s: Interval
    t: Interval
    shift: int

    @property
    def s_ref(self) -> Marker:
        return self.s.first

    @property
    def t_ref(self) -> Marker:
        return Marker(StringId.Y, self.t.start + self.shift)

    @property
    def diagonal(self) -> int:
        return self.t.start + self.shift - self.s.start

    def map_position(self, pos: int, source: StringId) -> int:
        """Position equidistant to pos in the other string"""
        return pos + self.diagonal if source is StringId.X else pos - self.diagonal

    def regrown(self, s: Interval, t: Interval) -> "Alignment":
        """Same reference markers after the pieces changed boundaries"""
        return Alignment(s, t, self.diagonal + s.start - t.start)


def alignment_holds(inst: Instance, s: Interval, t: Interval, shift: int) -> bool:
    """Shift range plus both content conditions of an alignment"""
    if not -(s.length - 1) <= shift <= t.length - 1:
        return False
    y_start = t.start + shift
    if y_start < 1 or y_start + s.length - 1 > inst.n:
        return False
    x_start = s.start - shift
    if x_start < 1 or x_start + t.length - 1 > inst.n:
        return False
    return (inst.y[y_start - 1:y_start - 1 + s.length] == inst.content(s)
            and inst.x[x_start - 1:x_start - 1 + t.length] == inst.content(t))


def enumerate_alignments(inst: Instance, s: Interval, t: Interval,
                         max_abs_shift: Optional[int] = None) -> list:
    """All alignments of s and t, ascending by shift, optionally with |δ| bounded"""
    lo, hi = -(s.length - 1), t.length - 1
    if max_abs_shift is not None:
        lo, hi = max(lo, -max_abs_shift), min(hi, max_abs_shift)
    return [Alignment(s, t, d) for d in range(lo, hi + 1) if alignment_holds(inst, s, t, d)]


def equidistant(alignment: Optional[Alignment], a: Marker, b: Marker) -> bool:
    if alignment is None:
        raise DomainError("equidistance needs a fixed pair")
    if a.string_id is not StringId.X or b.string_id is not StringId.Y:
        raise DomainError(f"expected a marker of x and one of y, got {a}, {b}")
    return a.pos - alignment.s_ref.pos == b.pos - alignment.t_ref.pos


# ============== CONSTRAINT ==============

@dataclass(frozen=True)
class Constraint:
    """
    Solid and fragile pieces of both strings, the matching M of solid pieces
    and the alignments R_S. matching holds (x id, y id) pairs, alignments
    (x id, Alignment) pairs. Fixed/repetitive is a property of the pair.
    """
    x_pieces: tuple
    y_pieces: tuple
    matching: tuple = ()
    alignments: tuple = ()

    def pieces(self, string_id: StringId) -> tuple:
        return self.x_pieces if string_id is StringId.X else self.y_pieces

    def solid(self, string_id: StringId) -> list:
        return [p for p in self.pieces(string_id) if p.is_solid]

    def fragile(self, string_id: StringId) -> list:
        return [p for p in self.pieces(string_id) if not p.is_solid]

    def all_fragile(self) -> list:
        return self.fragile(StringId.X) + self.fragile(StringId.Y)

    @cached_property
    def _by_id(self) -> dict:
        return {p.id: p for p in self.x_pieces + self.y_pieces}

    @cached_property
    def _partner(self) -> dict:
        partner = {}
        for a, b in self.matching:
            partner[a] = b
            partner[b] = a
        return partner

    @cached_property
    def _alignment_map(self) -> dict:
        return dict(self.alignments)

    @cached_property
    def _index(self) -> dict:
        return {p.id: i for pieces in (self.x_pieces, self.y_pieces) for i, p in enumerate(pieces)}

    def piece(self, piece_id: int) -> Piece:
        return self._by_id[piece_id]

    def partner(self, piece: Piece) -> Optional[Piece]:
        other = self._partner.get(piece.id)
        return None if other is None else self._by_id[other]

    def pair_key(self, piece: Piece) -> int:
        """Id of the x-side piece of the pair holding piece"""
        return piece.id if piece.string_id is StringId.X else self._partner[piece.id]

    def matched_pieces(self) -> list:
        """(x piece, y piece) pairs in x order"""
        return [(p, self.partner(p)) for p in self.x_pieces if p.id in self._partner]

    def alignment_for(self, x_id: int) -> Optional[Alignment]:
        return self._alignment_map.get(x_id)

    def is_fixed(self, piece: Piece) -> bool:
        return self.pair_key(piece) in self._alignment_map

    def neighbors(self, piece: Piece) -> tuple:
        """(left, right) neighbouring pieces in the same string, None at the ends"""
        pieces = self.pieces(piece.string_id)
        i = self._index[piece.id]
        return (pieces[i - 1] if i > 0 else None,
                pieces[i + 1] if i + 1 < len(pieces) else None)

    @property
    def next_id(self) -> int:
        return max(self._by_id, default=-1) + 1

    def with_alignment(self, x_id: int, alignment: Optional[Alignment]) -> "Constraint":
        kept = tuple((k, a) for k, a in self.alignments if k != x_id)
        if alignment is not None:
            kept += ((x_id, alignment),)
        return dataclasses.replace(self, alignments=kept)


@dataclass(frozen=True)
class FrameSet:
    """At most one frame per fragile piece, keyed by piece id"""
    frames: dict = field(default_factory=dict)

    def get(self, piece_id: int) -> Optional[Interval]:
        return self.frames.get(piece_id)

    def __contains__(self, piece_id) -> bool:
        return piece_id in self.frames

    def __len__(self) -> int:
        return len(self.frames)

    def with_frame(self, piece_id: int, frame: Interval) -> "FrameSet":
        if piece_id in self.frames:
            raise ConstraintError(f"piece {piece_id} already has a frame")
        return FrameSet({**self.frames, piece_id: frame})


def phantom_frame(string_id: StringId, n: int, left: bool) -> Interval:
    """[z0, z1] before the first marker or [zn, zn+1] after the last"""
    return Interval.span(string_id, 0, 1) if left else Interval.span(string_id, n, n + 1)


# ============== CONSTRUCTION ==============

def initial_constraint(inst: Instance) -> Constraint:
    if inst.identical:
        raise DomainError("identical strings have a single-block partition")
    return Constraint(
        x_pieces=(Piece(0, Interval.span(StringId.X, 1, inst.n), PieceKind.FRAGILE),),
        y_pieces=(Piece(1, Interval.span(StringId.Y, 1, inst.n), PieceKind.FRAGILE),),
    )


def make_splitting(f: Interval, piece_len: int) -> Splitting:
    if f.length < 2:
        raise DomainError(f"cannot split {f}: no adjacency")
    if piece_len < 2:
        raise DomainError(f"piece length must be at least 2, got {piece_len}")
    pieces = []
    start = f.start
    while start < f.end:
        end = min(start + piece_len - 1, f.end)
        pieces.append(Interval.span(f.string_id, start, end))
        start = end
    return Splitting(tuple(pieces))


def merge_consecutive(cons: Constraint, kind: Optional[PieceKind] = None) -> Constraint:
    """Merge neighbouring pieces of the same kind (only kind, when given)"""
    matched = {a for pair in cons.matching for a in pair}
    rebuilt = []
    for pieces in (cons.x_pieces, cons.y_pieces):
        out = []
        for piece in pieces:
            last = out[-1] if out else None
            if last and last.kind is piece.kind and kind in (None, piece.kind):
                if piece.is_solid and (last.id in matched or piece.id in matched):
                    raise ConstraintError(f"cannot merge matched solid pieces {last} and {piece}")
                out[-1] = Piece(last.id, Interval(last.interval.first, piece.interval.last), last.kind)
            else:
                out.append(piece)
        rebuilt.append(tuple(out))
    return dataclasses.replace(cons, x_pieces=rebuilt[0], y_pieces=rebuilt[1])


# ============== VALIDATION ==============

def constraint_problems(inst: Instance, cons: Constraint) -> list:
    """Every violated structural invariant, as text"""
    problems = []
    ids = [p.id for p in cons.x_pieces + cons.y_pieces]
    if len(ids) != len(set(ids)):
        problems.append("duplicate piece ids")
    for string_id in StringId:
        pieces = cons.pieces(string_id)
        if not pieces:
            problems.append(f"{string_id.label}: no pieces")
            continue
        if any(p.string_id is not string_id for p in pieces):
            problems.append(f"{string_id.label}: piece in the wrong string")
        if pieces[0].interval.start != 1 or pieces[-1].interval.end != inst.n:
            problems.append(f"{string_id.label}: pieces do not cover the string")
        for a, b in zip(pieces, pieces[1:]):
            if a.interval.last != b.interval.first:
                problems.append(f"{string_id.label}: {a} and {b} do not share a marker")
            if a.kind is b.kind:
                problems.append(f"{string_id.label}: {a} and {b} do not alternate")
        if inst.n >= 2 and any(p.interval.length < 2 for p in pieces):
            problems.append(f"{string_id.label}: piece shorter than 2")

    by_id = {p.id: p for p in cons.x_pieces + cons.y_pieces}
    xs = [a for a, _ in cons.matching]
    ys = [b for _, b in cons.matching]
    solid_x = {p.id for p in cons.solid(StringId.X)}
    solid_y = {p.id for p in cons.solid(StringId.Y)}
    if sorted(xs) != sorted(solid_x) or sorted(ys) != sorted(solid_y) or len(set(xs)) != len(xs):
        problems.append("matching is not a bijection between solid pieces")
    pairs = dict(cons.matching)
    for x_id, alignment in cons.alignments:
        if x_id not in pairs:
            problems.append(f"alignment on unmatched piece {x_id}")
            continue
        s, t = by_id[x_id].interval, by_id[pairs[x_id]].interval
        if alignment.s != s or alignment.t != t:
            problems.append(f"alignment of pair {x_id} refers to stale intervals")
        elif not alignment_holds(inst, s, t, alignment.shift):
            problems.append(f"alignment of pair {x_id} fails its content conditions")
    return problems


def validate_constraint(inst: Instance, cons: Constraint) -> bool:
    problems = constraint_problems(inst, cons)
    for problem in problems:
        logger.debug("invalid constraint: %s", problem)
    return not problems


def frames_valid(cons: Constraint, frames: FrameSet) -> bool:
    """Every frame lies inside its own fragile piece"""
    for piece_id, frame in frames.frames.items():
        piece = cons.piece(piece_id)
        if piece.is_solid or not piece.interval.contains_interval(frame):
            return False
    return True


# ============== DEBUG DUMP ==============

def describe_constraint(inst: Instance, cons: Constraint, frames: Optional[FrameSet] = None) -> str:
    """One line per piece: `X [a,b] solid|fragile [fixed δ=…|rep π=…|frame [c,d]]`"""
    lines = []
    for string_id in StringId:
        for piece in cons.pieces(string_id):
            iv = piece.interval
            line = f"{string_id.name} [{iv.start},{iv.end}] {piece.kind.value}"
            if piece.is_solid and cons.partner(piece) is not None:
                alignment = cons.alignment_for(cons.pair_key(piece))
                if alignment is not None:
                    line += f" fixed δ={alignment.shift}"
                else:
                    line += f" rep π={shortest_period_of(inst.content(iv))}"
            elif not piece.is_solid and frames is not None and piece.id in frames:
                frame = frames.get(piece.id)
                line += f" frame [{frame.start},{frame.end}]"
            lines.append(line)
    return "\n".join(lines)
