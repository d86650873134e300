"""
FPT Solver
==========
Branching search for a common string partition of size at most k.

The search guesses the lengths of the longest undiscovered blocks as a
descending list of powers of two, then alternates two procedures:

    split   - cut every fragile piece into short pieces and guess which of
              them lie inside the blocks being discovered
    frames  - confine the breakpoints of each fragile piece to a frame and
              shrink the piece to it

When the guessed block length drops below 4, the remaining breakpoints are
placed by brute force. Every branch is an immutable SolverState explored
depth first; a dead branch is simply not yielded.

Usage:
    from fpt_solver import solve
    csp = solve(instance, k=4)
"""

import dataclasses
import itertools
import logging
import math
import os
import time
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple, Optional

from constraints import (
    Alignment,
    Constraint,
    FrameSet,
    Piece,
    PieceKind,
    alignment_holds,
    describe_constraint,
    enumerate_alignments,
    initial_constraint,
    make_splitting,
    merge_consecutive,
)
from csp_model import CommonStringPartition, verify_csp
from errors import BranchBudgetExceeded, DomainError, InvariantViolation
from frame_rules import FrameContext, feasible_alignments, fitting_rule, fixable, next_rule
from piece_graph import all_extensions, build_piece_graph, check_degree_bounds, frameless_fragile
from strings_core import Instance, Interval, StringId, left_break, right_break, shortest_period_of

# Import configuration
try:
    from config import BRANCH_BUDGET_ENV, DEFAULT_BRANCH_BUDGET, MAX_SMALL_SHIFT_ALIGNMENTS
except ImportError:
    DEFAULT_BRANCH_BUDGET = 10_000_000
    BRANCH_BUDGET_ENV = "MCSP_BRANCH_BUDGET"
    MAX_SMALL_SHIFT_ALIGNMENTS = 6

logger = logging.getLogger(__name__)


# ============== STATE AND STATS ==============

@dataclass
class BranchStats:
    """Counters of one solver run; shared by all of its branches"""
    states: int = 0
    pi_subsets_tried: int = 0
    split_branches: int = 0
    frames_branches: int = 0
    three_way_branches: int = 0
    alignment_fixes: Counter = field(default_factory=Counter)
    rule_applications: Counter = field(default_factory=Counter)
    aborts: Counter = field(default_factory=Counter)
    max_fragile_len: dict = field(default_factory=dict)
    wall_time_s: float = 0.0

    def abort(self, reason: str) -> None:
        self.aborts[reason] += 1

    def to_json(self) -> dict:
        return {
            "states": self.states,
            "pi_subsets_tried": self.pi_subsets_tried,
            "split_branches": self.split_branches,
            "frames_branches": self.frames_branches,
            "three_way_branches": self.three_way_branches,
            "alignment_fixes": dict(self.alignment_fixes),
            "rule_applications": dict(sorted(self.rule_applications.items())),
            "aborts": dict(sorted(self.aborts.items())),
            "max_fragile_len_at_frames_exit": {str(b): v for b, v in sorted(self.max_fragile_len.items())},
            "wall_time_s": round(self.wall_time_s, 6),
        }


@dataclass(frozen=True)
class SolverState:
    cons: Constraint
    frames: FrameSet
    beta: int
    pi_remaining: tuple
    k: int

    @property
    def w(self) -> int:
        return 2 * self.beta * self.k + 1

    def next_beta(self) -> "SolverState":
        return dataclasses.replace(self, beta=self.pi_remaining[0],
                                   pi_remaining=self.pi_remaining[1:], frames=FrameSet())


class PiSchedule(NamedTuple):
    """Largest guessed block length and the rest, ending in 0"""
    beta: int
    remaining: tuple


def frame_size_bound(k: int, beta: int) -> int:
    return 12 * (k * k + k) * k * beta


def resolve_branch_budget(value=None) -> int:
    """Budget from the argument, else the environment, else the default"""
    if value is None:
        value = os.environ.get(BRANCH_BUDGET_ENV, DEFAULT_BRANCH_BUDGET)
    try:
        budget = int(value)
    except (TypeError, ValueError):
        raise DomainError(f"branch budget must be an integer, got {value!r}") from None
    if budget < 1:
        raise DomainError(f"branch budget must be positive, got {budget}")
    return budget


# ============== SCHEDULES ==============

def enumerate_pi_subsets(n: int, k: int) -> Iterator[PiSchedule]:
    """
    Every set of at most k powers of two below n whose maximum is at least
    ceil(n / 2k), largest maximum first, then lexicographic.
    """
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    powers = [1 << i for i in range(n.bit_length()) if (1 << i) < n]
    threshold = math.ceil(n / (2 * k))
    for top in reversed(powers):
        if top < threshold:
            break
        lower = [p for p in powers if p < top]
        rests = sorted(tuple(sorted(c, reverse=True))
                       for r in range(k) for c in itertools.combinations(lower, r))
        for rest in rests:
            yield PiSchedule(top, rest + (0,))


def count_small_shift_alignments(inst: Instance, s: Interval, t: Interval, beta: int) -> int:
    return len(enumerate_alignments(inst, s, t, math.ceil(beta / 3)))


# ============== SPLIT HELPERS ==============

class _Run(NamedTuple):
    """Consecutive new pieces first..last of one old fragile piece, made solid"""
    segment: int
    first: int
    last: int
    interval: Interval


def _segments(inst: Instance, cons: Constraint, string_id: StringId, piece_len: int) -> list:
    """(old fragile piece, its new pieces, allowed solid runs) per fragile piece"""
    segments = []
    for idx, f in enumerate(cons.fragile(string_id)):
        parts = make_splitting(f.interval, piece_len).pieces
        # a new piece sharing a marker with an old solid piece is never solid
        lo = 0 if f.interval.start == 1 else 1
        hi = len(parts) - 1 if f.interval.end == inst.n else len(parts) - 2
        runs = [_Run(idx, i, j, Interval(parts[i].first, parts[j].last))
                for i in range(lo, hi + 1) for j in range(i, hi + 1)]
        segments.append((f, parts, runs))
    return segments


def _gaps(runs, m: int, trailing: bool = True) -> int:
    """Fragile pieces left in a segment of m new pieces around the chosen runs"""
    gaps, cursor = 0, 0
    for run in runs:
        if run.first > cursor:
            gaps += 1
        cursor = run.last + 1
    if trailing and cursor <= m - 1:
        gaps += 1
    return gaps


def _fragile_count(chosen: list, segments: list) -> int:
    return sum(_gaps([r for r in chosen if r.segment == idx], len(parts))
               for idx, (_, parts, _) in enumerate(segments))


def _run_sets(segments: list, allowed: set, max_fragile: int) -> Iterator[list]:
    """All choices of non-adjacent solid runs leaving at most max_fragile fragile pieces"""
    def in_segment(idx, chosen, budget):
        _, parts, runs = segments[idx]
        m = len(parts)
        yield chosen
        start = chosen[-1].last + 2 if chosen else 0
        for run in runs:
            if run.first < start or run not in allowed:
                continue
            extended = chosen + [run]
            if _gaps(extended, m, trailing=False) <= budget:
                yield from in_segment(idx, extended, budget)

    def across(idx, chosen, budget):
        if idx == len(segments):
            yield chosen
            return
        m = len(segments[idx][1])
        for local in in_segment(idx, [], budget):
            used = _gaps(local, m)
            if used <= budget:
                yield from across(idx + 1, chosen + local, budget - used)

    yield from across(0, [], max_fragile)


def _rebuild_string(cons: Constraint, string_id: StringId, segments: list, chosen: list,
                    next_id: int) -> tuple:
    """New piece tuple for one string, one piece per new part, and the next free id"""
    by_segment = defaultdict(set)
    for run in chosen:
        by_segment[run.segment].update(range(run.first, run.last + 1))
    pieces = []
    fragile_index = 0
    for piece in cons.pieces(string_id):
        if piece.is_solid:
            pieces.append(piece)
            continue
        _, parts, _ = segments[fragile_index]
        solid_parts = by_segment[fragile_index]
        for i, part in enumerate(parts):
            kind = PieceKind.SOLID if i in solid_parts else PieceKind.FRAGILE
            pieces.append(Piece(next_id, part, kind))
            next_id += 1
        fragile_index += 1
    return tuple(pieces), next_id


# ============== SOLVER ==============

class FptSolver:
    """One run of the branching search on a fixed instance and k"""

    def __init__(self, inst: Instance, k: Optional[int] = None, branch_budget=None,
                 stats: Optional[BranchStats] = None, dead_end: Optional[Callable] = None):
        self.inst = inst
        self.dead_end = dead_end
        self.k = inst.k if k is None else k
        if self.k < 1:
            raise DomainError(f"k must be positive, got {self.k}")
        self.budget = resolve_branch_budget(branch_budget)
        self.stats = stats if stats is not None else BranchStats()

    def _spend(self) -> None:
        self.stats.states += 1
        if self.stats.states > self.budget:
            raise BranchBudgetExceeded(self.budget, self.stats)

    # ---------- main loop ----------

    def solve(self) -> Optional[CommonStringPartition]:
        started = time.perf_counter()
        try:
            found = self._search()
        finally:
            self.stats.wall_time_s = time.perf_counter() - started
        if found is not None and not verify_csp(self.inst, found, self.k):
            raise InvariantViolation("solver produced an invalid partition")
        return found

    def _search(self) -> Optional[CommonStringPartition]:
        inst = self.inst
        if inst.identical:
            return CommonStringPartition.single_block(inst.n)
        if not inst.is_anagram or inst.n < 2:
            return None
        for schedule in enumerate_pi_subsets(inst.n, self.k):
            self.stats.pi_subsets_tried += 1
            logger.info("trying block lengths %s", (schedule.beta,) + schedule.remaining)
            state = SolverState(initial_constraint(inst), FrameSet(), schedule.beta,
                                schedule.remaining, self.k)
            found = self._descend(state)
            if found is not None:
                logger.info("found a partition of size %d", found.size)
                return found
        return None

    def _descend(self, state: SolverState) -> Optional[CommonStringPartition]:
        if state.beta < 4:
            return self.final_bruteforce(state)
        for child in self.split(state):
            child = child.next_beta()
            successors = self.frames(child) if child.beta > 0 else iter([child])
            for successor in successors:
                found = self._descend(successor)
                if found is not None:
                    return found
        return None

    # ---------- split ----------

    def split(self, state: SolverState) -> Iterator[SolverState]:
        """Discover the blocks of the current guessed length; one state per branch"""
        inst, cons, k = self.inst, state.cons, self.k
        piece_len = math.ceil(state.beta / 3)
        x_segments = _segments(inst, cons, StringId.X, piece_len)
        y_segments = _segments(inst, cons, StringId.Y, piece_len)
        y_runs = [run for _, _, runs in y_segments for run in runs]

        small = {}
        compatible = {}
        for x_run in (run for _, _, runs in x_segments for run in runs):
            partners = []
            for y_run in y_runs:
                aligned = enumerate_alignments(inst, x_run.interval, y_run.interval, piece_len)
                if aligned:
                    small[x_run, y_run] = aligned
                    partners.append(y_run)
            if partners:
                compatible[x_run] = partners

        for x_chosen in _run_sets(x_segments, set(compatible), k - 1):
            for y_chosen in self._assign_partners(x_chosen, compatible):
                if _fragile_count(y_chosen, y_segments) > k - 1:
                    self.stats.abort("fragile_count")
                    continue
                yield from self._split_states(state, x_segments, y_segments,
                                              x_chosen, y_chosen, small, piece_len)

    def _assign_partners(self, x_chosen: list, compatible: dict) -> Iterator[list]:
        """Distinct, non-adjacent y runs matched in order to the chosen x runs"""
        def clashes(run, taken):
            return any(run.segment == o.segment and run.first <= o.last + 1 and o.first <= run.last + 1
                       for o in taken)

        def assign(i, taken):
            if i == len(x_chosen):
                yield list(taken)
                return
            for y_run in compatible[x_chosen[i]]:
                if not clashes(y_run, taken):
                    taken.append(y_run)
                    yield from assign(i + 1, taken)
                    taken.pop()

        yield from assign(0, [])

    def _split_states(self, state, x_segments, y_segments, x_chosen, y_chosen, small, piece_len):
        cons = state.cons
        x_pieces, next_id = _rebuild_string(cons, StringId.X, x_segments, x_chosen, cons.next_id)
        y_pieces, _ = _rebuild_string(cons, StringId.Y, y_segments, y_chosen, next_id)
        # chosen runs are never adjacent, so each merged solid piece is exactly one run
        merged = merge_consecutive(dataclasses.replace(cons, x_pieces=x_pieces, y_pieces=y_pieces))
        solid_at = {p.interval: p for p in merged.x_pieces + merged.y_pieces if p.is_solid}
        x_new = [solid_at[run.interval] for run in x_chosen]
        y_new = [solid_at[run.interval] for run in y_chosen]
        base = dataclasses.replace(
            merged, matching=cons.matching + tuple((s.id, t.id) for s, t in zip(x_new, y_new)))

        choices = []
        for x_run, y_run, s, t in zip(x_chosen, y_chosen, x_new, y_new):
            options = self._alignment_choices(s.interval, t.interval, small[x_run, y_run], piece_len)
            if not options:
                return
            choices.append(options)

        for combo in itertools.product(*choices):
            new = base
            for s, alignment in zip(x_new, combo):
                if alignment is not None:
                    new = new.with_alignment(s.id, alignment)
                    self.stats.alignment_fixes["split"] += 1
            for string_id in StringId:
                if len(new.fragile(string_id)) > max(2 * self.k - 2, 0):
                    raise InvariantViolation(f"{len(new.fragile(string_id))} fragile pieces after split")
            self._spend()
            self.stats.split_branches += 1
            yield dataclasses.replace(state, cons=new)

    def _alignment_choices(self, s: Interval, t: Interval, small: list, piece_len: int) -> list:
        if len(small) <= MAX_SMALL_SHIFT_ALIGNMENTS:
            return small
        period = shortest_period_of(self.inst.content(s))
        if period != shortest_period_of(self.inst.content(t)) or 2 * period > piece_len:
            raise InvariantViolation(f"{len(small)} small-shift alignments without a common short period")
        self.stats.three_way_branches += 1
        choices, shifts = [], set()
        for breaker in (left_break, right_break):
            a, b = breaker(self.inst, s), breaker(self.inst, t)
            if a is None or b is None:
                continue
            shift = (b.pos - a.pos) - t.start + s.start
            if shift not in shifts and alignment_holds(self.inst, s, t, shift):
                shifts.add(shift)
                choices.append(Alignment(s, t, shift))
        choices.append(None)
        return choices

    # ---------- frames ----------

    def frames(self, state: SolverState) -> Iterator[SolverState]:
        """Frame and fit every fragile piece for the current guessed length"""
        bound = frame_size_bound(self.k, state.beta)
        for cons in self._frames_rounds(state.cons, state.w):
            longest = max((f.interval.length for f in cons.all_fragile()), default=0)
            self.stats.max_fragile_len[state.beta] = max(self.stats.max_fragile_len.get(state.beta, 0), longest)
            if longest > bound:
                raise InvariantViolation(f"fragile piece of length {longest} exceeds {bound} at frames exit")
            self._spend()
            self.stats.frames_branches += 1
            frames = FrameSet({f.id: f.interval for f in cons.all_fragile()})
            yield dataclasses.replace(state, cons=cons, frames=frames)

    def _frames_rounds(self, cons: Constraint, w: int) -> Iterator[Constraint]:
        extensions = all_extensions(self.inst, cons)
        if extensions is None:
            self.stats.abort("extension")
            return
        for frames in self._place_frames(cons, FrameSet(), extensions, w):
            fitted = fitting_rule(self.inst, cons, frames)
            if fitted is None:
                self.stats.abort("alignment_lost")
                continue
            self.stats.rule_applications["fitting"] += 1
            if not self._periods_agree(fitted):
                self.stats.abort("period_mismatch")
                continue
            for fixed, new_alignment in self._fix_repetitive(fitted):
                if new_alignment:
                    yield from self._frames_rounds(fixed, w)
                else:
                    yield fixed

    def _place_frames(self, cons, frames, extensions, w) -> Iterator[FrameSet]:
        graph = build_piece_graph(cons, frames)
        check_degree_bounds(graph)
        if not frameless_fragile(graph):
            yield frames
            return
        ctx = FrameContext(self.inst, cons, frames, extensions, graph, w)
        found = next_rule(ctx)
        if found is None:
            logger.debug("no frame rule applies to\n%s", describe_constraint(self.inst, cons, frames))
            raise InvariantViolation("frameless fragile piece with no applicable frame rule")
        name, alternatives = found
        self.stats.rule_applications[name] += 1
        for placement in alternatives:
            placed = frames
            for piece_id, frame in placement:
                if frame is None or frame.length < 2:
                    placed = None
                    break
                placed = placed.with_frame(piece_id, frame)
            if placed is None:
                self.stats.abort("empty_frame")
                continue
            if len(alternatives) > 1:
                self._spend()
            yield from self._place_frames(cons, placed, extensions, w)

    def _periods_agree(self, cons: Constraint) -> bool:
        content = self.inst.content
        return all(shortest_period_of(content(s.interval)) == shortest_period_of(content(t.interval))
                   for s, t in cons.matched_pieces() if cons.alignment_for(s.id) is None)

    def _fix_repetitive(self, cons: Constraint) -> Iterator[tuple]:
        """Fix every repetitive pair whose neighbouring fragile pieces are short"""
        pending = [s for s, _ in cons.matched_pieces()
                   if cons.alignment_for(s.id) is None and fixable(self.inst, cons, s, self.k)]
        if not pending:
            yield cons, False
            return
        options = [feasible_alignments(self.inst, cons, s, self.k) for s in pending]
        if not all(options):
            self.stats.abort("no_feasible_alignment")
            return
        for combo in itertools.product(*options):
            fixed = cons
            for s, alignment in zip(pending, combo):
                fixed = fixed.with_alignment(s.id, alignment)
            self.stats.alignment_fixes["frames"] += len(pending)
            self._spend()
            yield fixed, True

    # ---------- final placement ----------

    def final_bruteforce(self, state: SolverState) -> Optional[CommonStringPartition]:
        """Try every breakpoint placement inside the fragile pieces"""
        cons, k = state.cons, self.k
        if state.beta >= 1:
            bound = frame_size_bound(k, state.beta)
            if any(f.interval.length > bound for f in cons.all_fragile()):
                raise InvariantViolation("fragile piece too long for the final placement")
        y_by_blocks = defaultdict(list)
        for cuts in self._cut_sets(cons, StringId.Y):
            y_by_blocks[self._block_key(StringId.Y, cuts)].append(cuts)
        for x_cuts in self._cut_sets(cons, StringId.X):
            for y_cuts in y_by_blocks.get(self._block_key(StringId.X, x_cuts), ()):
                csp = self._match_blocks(cons, x_cuts, y_cuts)
                if csp is not None and verify_csp(self.inst, csp, k):
                    return csp
        self.stats.abort("final")
        self._report_dead_end(state)
        return None

    def _report_dead_end(self, state: SolverState) -> None:
        """Log the constraint of a dead leaf and hand it to the dead_end hook"""
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug("dead end at beta %d\n%s", state.beta,
                         describe_constraint(self.inst, state.cons, state.frames))
        if self.dead_end is not None:
            self.dead_end(state.cons, state.frames)

    def _cut_sets(self, cons: Constraint, string_id: StringId) -> Iterator[tuple]:
        """At least one cut per fragile piece, at most k-1 cuts in total"""
        fragile = cons.fragile(string_id)

        def place(idx, cuts):
            if idx == len(fragile):
                yield tuple(cuts)
                return
            room = self.k - 1 - len(cuts) - (len(fragile) - idx - 1)
            adjacencies = list(fragile[idx].interval.adjacencies)
            for size in range(1, min(room, len(adjacencies)) + 1):
                for chosen in itertools.combinations(adjacencies, size):
                    yield from place(idx + 1, cuts + list(chosen))

        yield from place(0, [])

    def _block_key(self, string_id: StringId, cuts: tuple) -> tuple:
        text = self.inst.text(string_id)
        bounds = [0] + list(cuts) + [self.inst.n]
        return tuple(sorted(text[lo:hi] for lo, hi in zip(bounds, bounds[1:])))

    def _match_blocks(self, cons, x_cuts, y_cuts) -> Optional[CommonStringPartition]:
        """Pair blocks so that matched solid pieces stay in matched blocks"""
        draft = CommonStringPartition.from_cuts(self.inst.n, x_cuts, y_cuts, ())
        content = self.inst.content
        matching = [None] * draft.size
        used_y = set()
        for s, t in cons.matched_pieces():
            i, j = draft.block_index(s.interval.first), draft.block_index(t.interval.first)
            if content(draft.x_blocks[i]) != content(draft.y_blocks[j]) or j in used_y:
                return None
            matching[i] = j
            used_y.add(j)
        free_y = defaultdict(list)
        for j, block in enumerate(draft.y_blocks):
            if j not in used_y:
                free_y[content(block)].append(j)
        for i, block in enumerate(draft.x_blocks):
            if matching[i] is None:
                candidates = free_y.get(content(block))
                if not candidates:
                    return None
                matching[i] = candidates.pop(0)
        return dataclasses.replace(draft, matching=tuple(matching))


def solve(inst: Instance, k: Optional[int] = None, branch_budget=None,
          stats: Optional[BranchStats] = None,
          dead_end: Optional[Callable] = None) -> Optional[CommonStringPartition]:
    """
    A partition of size at most k, or None when there is none. dead_end, when
    given, is called with (constraint, frames) of every leaf that fails.
    """
    return FptSolver(inst, k, branch_budget, stats, dead_end).solve()
