"""
Common String Partitions
========================
Partitions of x and y into matched blocks, their verification,
breakpoints, windows and the constraint-satisfaction predicate.
"""

import bisect
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from errors import DomainError
from strings_core import Instance, Interval, Marker, StringId, shortest_period_of

# A block is just an interval of its string
Block = Interval


class Breakpoint(NamedTuple):
    left: Marker
    right: Marker


class CspCheck(NamedTuple):
    ok: bool
    reason: str
    detail: str = ""


# Reason codes reported by diagnose_csp
OK = "OK"
EMPTY = "EMPTY"
SHAPE = "SHAPE"
X_COVERAGE = "X_COVERAGE"
Y_COVERAGE = "Y_COVERAGE"
BAD_MATCHING = "BAD_MATCHING"
CONTENT_MISMATCH = "CONTENT_MISMATCH"
TOO_LARGE = "TOO_LARGE"


@dataclass(frozen=True)
class CommonStringPartition:
    """
    Blocks of x and y plus the bijection between them.

    matching[i] is the 0-based index of the y-block matched to x-block i;
    the JSON form in instance_io shifts it to 1-based.
    """
    x_blocks: tuple
    y_blocks: tuple
    matching: tuple

    @property
    def size(self) -> int:
        return len(self.x_blocks)

    @classmethod
    def from_cuts(cls, n: int, x_cuts: Sequence[int], y_cuts: Sequence[int],
                  matching: Sequence[int]) -> "CommonStringPartition":
        """Build from breakpoint left positions (adjacency (p, p+1) for each p)"""
        return cls(_blocks_from_cuts(StringId.X, n, x_cuts),
                   _blocks_from_cuts(StringId.Y, n, y_cuts),
                   tuple(matching))

    @classmethod
    def single_block(cls, n: int) -> "CommonStringPartition":
        return cls.from_cuts(n, (), (), (0,))

    def blocks(self, string_id: StringId) -> tuple:
        return self.x_blocks if string_id is StringId.X else self.y_blocks

    @property
    def inverse_matching(self) -> tuple:
        inverse = [0] * self.size
        for i, j in enumerate(self.matching):
            inverse[j] = i
        return tuple(inverse)

    def block_index(self, marker: Marker) -> int:
        blocks = self.blocks(marker.string_id)
        starts = [b.start for b in blocks]
        idx = bisect.bisect_right(starts, marker.pos) - 1
        if idx < 0 or not blocks[idx].contains(marker):
            raise DomainError(f"{marker} is in no block")
        return idx

    def cut_positions(self, string_id: StringId) -> tuple:
        return tuple(b.end for b in self.blocks(string_id)[:-1])


def _blocks_from_cuts(string_id, n, cuts):
    bounds = [0] + sorted(cuts) + [n]
    return tuple(Interval.span(string_id, lo + 1, hi) for lo, hi in zip(bounds, bounds[1:]))


# ============== VERIFICATION ==============

def _check_coverage(blocks, string_id, n):
    expected = 1
    for block in blocks:
        if block.string_id != string_id:
            return f"block {block} is in the wrong string"
        if block.start != expected:
            return f"block {block} should start at {expected}"
        expected = block.end + 1
    if expected != n + 1:
        return f"blocks end at {expected - 1}, string has length {n}"
    return None


def diagnose_csp(inst: Instance, csp: CommonStringPartition, k: Optional[int] = None) -> CspCheck:
    """Report the first violated partition invariant as a reason code"""
    m = csp.size
    if m == 0 or not csp.y_blocks:
        return CspCheck(False, EMPTY, "partition has no blocks")
    if len(csp.y_blocks) != m or len(csp.matching) != m:
        return CspCheck(False, SHAPE,
                        f"{m} x-blocks, {len(csp.y_blocks)} y-blocks, {len(csp.matching)} matches")
    problem = _check_coverage(csp.x_blocks, StringId.X, inst.n)
    if problem:
        return CspCheck(False, X_COVERAGE, problem)
    problem = _check_coverage(csp.y_blocks, StringId.Y, inst.n)
    if problem:
        return CspCheck(False, Y_COVERAGE, problem)
    if sorted(csp.matching) != list(range(m)):
        return CspCheck(False, BAD_MATCHING, f"matching {list(csp.matching)} is not a permutation")
    for i, j in enumerate(csp.matching):
        if inst.content(csp.x_blocks[i]) != inst.content(csp.y_blocks[j]):
            return CspCheck(False, CONTENT_MISMATCH,
                            f"{csp.x_blocks[i]} and {csp.y_blocks[j]} differ")
    if k is not None and m > k:
        return CspCheck(False, TOO_LARGE, f"size {m} exceeds k = {k}")
    return CspCheck(True, OK)


def verify_csp(inst: Instance, csp: CommonStringPartition, k: Optional[int] = None) -> bool:
    return diagnose_csp(inst, csp, k).ok


# ============== BREAKPOINTS AND MATCHED MARKERS ==============

def breakpoints(csp: CommonStringPartition) -> frozenset:
    result = set()
    for string_id in StringId:
        for p in csp.cut_positions(string_id):
            result.add(Breakpoint(Marker(string_id, p), Marker(string_id, p + 1)))
    return frozenset(result)


def matched_marker(csp: CommonStringPartition, a: Marker) -> Marker:
    idx = csp.block_index(a)
    if a.string_id is StringId.X:
        source, target = csp.x_blocks[idx], csp.y_blocks[csp.matching[idx]]
    else:
        source, target = csp.y_blocks[idx], csp.x_blocks[csp.inverse_matching[idx]]
    return Marker(target.string_id, target.start + a.pos - source.start)


def window(csp: CommonStringPartition, fragile: Interval) -> Interval:
    """Shortest interval holding every breakpoint of csp inside fragile"""
    cuts = [p for p in csp.cut_positions(fragile.string_id) if p in fragile.adjacencies]
    if not cuts:
        raise DomainError(f"no breakpoint inside {fragile}")
    return Interval.span(fragile.string_id, min(cuts), max(cuts) + 1)


# ============== CONSTRAINT SATISFACTION ==============

def satisfies_constraint(inst: Instance, csp: CommonStringPartition, cons) -> bool:
    """The five conditions under which csp satisfies the constraint"""
    for string_id in StringId:
        fragile = cons.fragile(string_id)
        cuts = csp.cut_positions(string_id)
        # 1: breakpoints only in fragile pieces
        if any(not any(p in f.interval.adjacencies for f in fragile) for p in cuts):
            return False
        # 2: every fragile piece holds a breakpoint
        if any(not any(p in f.interval.adjacencies for p in cuts) for f in fragile):
            return False

    for x_piece, y_piece in cons.matched_pieces():
        s, t = x_piece.interval, y_piece.interval
        i, j = csp.block_index(s.first), csp.block_index(t.first)
        # 3: matched solid pieces lie in matched blocks
        if csp.block_index(s.last) != i or csp.block_index(t.last) != j or csp.matching[i] != j:
            return False
        alignment = cons.alignment_for(x_piece.id)
        if alignment is not None:
            # 4: reference markers are matched
            if matched_marker(csp, alignment.s_ref) != alignment.t_ref:
                return False
        else:
            # 5: one shortest period for both pieces and both blocks
            periods = {shortest_period_of(inst.content(iv))
                       for iv in (s, t, csp.x_blocks[i], csp.y_blocks[j])}
            if len(periods) != 1:
                return False
    return True


def discovered_blocks(csp: CommonStringPartition, cons) -> frozenset:
    """Blocks (of either string) that contain a solid piece"""
    found = set()
    for string_id in StringId:
        for piece in cons.solid(string_id):
            found.add(csp.blocks(string_id)[csp.block_index(piece.interval.first)])
    return frozenset(found)


def beta_critical_blocks(csp: CommonStringPartition, cons, beta: int) -> list:
    """Undiscovered blocks with beta <= length < 2*beta, x-blocks first"""
    discovered = discovered_blocks(csp, cons)
    return [b for string_id in StringId for b in csp.blocks(string_id)
            if b not in discovered and beta <= b.length < 2 * beta]
