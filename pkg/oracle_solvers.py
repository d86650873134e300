"""
Oracle Solvers
==============
Reference engines for the branching solver:

    brute_force_min_csp  - exact minimum by exhaustive search (small n only)
    greedy_csp           - repeatedly match the longest common substring

Usage:
    from oracle_solvers import brute_force_min_csp, greedy_csp
    result = brute_force_min_csp(instance, k_max=4)
"""

import itertools
import logging
import math
from collections import Counter
from typing import NamedTuple, Optional

import numpy as np

from csp_model import CommonStringPartition, verify_csp
from errors import DomainError, InvariantViolation, OracleLimitError
from strings_core import Instance, Interval, StringId

# Import configuration
try:
    from config import ORACLE_MAX_N
except ImportError:
    ORACLE_MAX_N = 16

logger = logging.getLogger(__name__)


class OracleResult(NamedTuple):
    min_size: Optional[int]
    witness: Optional[CommonStringPartition]
    explored: int


# ============== EXACT ORACLE ==============

def search_space(n: int, k_max: Optional[int]) -> int:
    """Number of x-partitions the oracle may visit"""
    if k_max is None or k_max >= n:
        return 2 ** (n - 1)
    return sum(math.comb(n - 1, m - 1) for m in range(1, k_max + 1))


def _tile_y(inst: Instance, x_contents: list) -> Optional[list]:
    """
    Cover y left to right with the x-blocks, each used once.

    Returns y_order, where y_order[j] is the x-block placed as the j-th
    block of y, or None when no tiling exists.
    """
    y = inst.y
    n = inst.n
    remaining = Counter(x_contents)
    by_content = {}
    for i, content in enumerate(x_contents):
        by_content.setdefault(content, []).append(i)
    lengths = sorted({len(c) for c in x_contents})
    order = []

    def place(pos):
        if pos == n:
            return True
        for length in lengths:
            piece = y[pos:pos + length]
            if len(piece) < length or remaining[piece] == 0:
                continue
            remaining[piece] -= 1
            order.append(piece)
            if place(pos + length):
                return True
            order.pop()
            remaining[piece] += 1
        return False

    if not place(0):
        return None
    # equal contents are interchangeable; hand them out in x order
    handed = {content: iter(ids) for content, ids in by_content.items()}
    return [next(handed[content]) for content in order]


def brute_force_min_csp(inst: Instance, k_max: Optional[int] = None,
                        n_limit: int = ORACLE_MAX_N) -> OracleResult:
    """
    Smallest common string partition with at most k_max blocks.

    Partitions of x are tried by increasing size; each one is matched into
    y by backtracking over the still unused blocks.

    Args:
        inst: the instance (its k is ignored)
        k_max: largest size of interest, None for no bound
        n_limit: size limit of the search, see config.ORACLE_MAX_N

    Returns:
        OracleResult; min_size and witness are None when nothing fits
    """
    n = inst.n
    if search_space(n, k_max) > 2 ** (n_limit - 1):
        raise OracleLimitError(n, n_limit)
    if not inst.is_anagram:
        return OracleResult(None, None, 0)

    explored = 0
    top = n if k_max is None else min(k_max, n)
    for size in range(1, top + 1):
        logger.info("oracle: trying size %d", size)
        for cuts in itertools.combinations(range(1, n), size - 1):
            explored += 1
            bounds = (0,) + cuts + (n,)
            x_contents = [inst.x[lo:hi] for lo, hi in zip(bounds, bounds[1:])]
            y_order = _tile_y(inst, x_contents)
            if y_order is None:
                continue
            y_cuts, pos = [], 0
            for i in y_order[:-1]:
                pos += len(x_contents[i])
                y_cuts.append(pos)
            matching = [0] * size
            for j, i in enumerate(y_order):
                matching[i] = j
            witness = CommonStringPartition.from_cuts(n, cuts, y_cuts, matching)
            if not verify_csp(inst, witness, size):
                raise InvariantViolation("oracle built an invalid partition")
            return OracleResult(size, witness, explored)
    return OracleResult(None, None, explored)


# ============== GREEDY ==============

def _longest_common_substring(x: np.ndarray, y: np.ndarray, x_free: np.ndarray,
                              y_free: np.ndarray) -> tuple:
    """(length, x start, y start) of the leftmost longest common free substring"""
    n = len(x)
    best = (0, 0, 0)
    previous = np.zeros(n + 1, dtype=np.int64)
    for i in range(n):
        equal = (y == x[i]) & y_free & x_free[i]
        current = np.zeros(n + 1, dtype=np.int64)
        current[1:] = np.where(equal, previous[:-1] + 1, 0)
        j = int(np.argmax(current))
        if current[j] > best[0]:
            length = int(current[j])
            best = (length, i - length + 1, j - length)
        previous = current
    return best


def greedy_csp(inst: Instance) -> CommonStringPartition:
    """
    Greedy partition: take the longest common substring of the unmatched
    parts of x and y as a block pair until everything is matched. Ties go
    to the leftmost occurrence in x, then in y.
    """
    if not inst.is_anagram:
        raise DomainError("x and y are not anagrams; no partition exists")
    n = inst.n
    x, y = np.asarray(inst.x), np.asarray(inst.y)
    x_free = np.ones(n, dtype=bool)
    y_free = np.ones(n, dtype=bool)
    pairs = []
    while x_free.any():
        length, xs, ys = _longest_common_substring(x, y, x_free, y_free)
        if length == 0:
            raise InvariantViolation("anagram strings left without a common symbol")
        x_free[xs:xs + length] = False
        y_free[ys:ys + length] = False
        pairs.append((Interval.span(StringId.X, xs + 1, xs + length),
                      Interval.span(StringId.Y, ys + 1, ys + length)))
    x_blocks = sorted(pairs, key=lambda p: p[0].start)
    y_order = sorted(range(len(pairs)), key=lambda i: x_blocks[i][1].start)
    y_index = {i: j for j, i in enumerate(y_order)}
    csp = CommonStringPartition(
        tuple(p[0] for p in x_blocks),
        tuple(x_blocks[i][1] for i in y_order),
        tuple(y_index[i] for i in range(len(pairs))),
    )
    logger.info("greedy: partition of size %d", csp.size)
    return csp
