"""
Instance I/O
============
Reading and writing instance files and partition JSON, plus the seeded
planted-instance generator.

Instance file: two lines, x then y. Every non-whitespace character is a
symbol, or with tokens=True every whitespace-separated word is.

Partition JSON:
    {"size": m, "x_blocks": [[s, e], ...], "y_blocks": [[s, e], ...],
     "matching": [j1, ..., jm]}
matching[i] is the 1-based index of the y-block matched to x-block i.
"""

import json
import logging
from pathlib import Path
from typing import Optional

import numpy as np

from csp_model import CommonStringPartition
from errors import DomainError, InstanceFormatError
from strings_core import Instance, Interval, StringId

# Import configuration
try:
    from config import GENERATOR_SYMBOLS
except ImportError:
    GENERATOR_SYMBOLS = "abcdefghijklmnopqrstuvwxyz"

logger = logging.getLogger(__name__)


# ============== INSTANCES ==============

def _symbols(line: str, tokens: bool) -> list:
    return line.split() if tokens else [c for c in line if not c.isspace()]


def parse_instance(text: str, k: int = 1, tokens: bool = False) -> Instance:
    lines = [line for line in text.splitlines() if line.strip()]
    if len(lines) != 2:
        raise InstanceFormatError(f"expected 2 non-empty lines (x and y), got {len(lines)}")
    x, y = (_symbols(line, tokens) for line in lines)
    if len(x) != len(y):
        raise InstanceFormatError(f"x has {len(x)} symbols, y has {len(y)}")
    try:
        return Instance.from_symbols(x, y, k)
    except DomainError as exc:
        raise InstanceFormatError(str(exc)) from exc


def load_instance(path, k: int = 1, tokens: bool = False) -> Instance:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceFormatError(f"cannot read {path}: {exc}") from exc
    return parse_instance(text, k, tokens)


def format_instance(inst: Instance, tokens: bool = False) -> str:
    sep = " " if tokens else ""
    return f"{inst.render(StringId.X, sep)}\n{inst.render(StringId.Y, sep)}\n"


# ============== PARTITION JSON ==============

def csp_to_json(csp: CommonStringPartition) -> dict:
    return {
        "size": csp.size,
        "x_blocks": [[b.start, b.end] for b in csp.x_blocks],
        "y_blocks": [[b.start, b.end] for b in csp.y_blocks],
        "matching": [j + 1 for j in csp.matching],
    }


def _blocks(data: dict, key: str, string_id: StringId) -> tuple:
    raw = data.get(key)
    if not isinstance(raw, list):
        raise InstanceFormatError(f"'{key}' must be a list of [start, end] pairs")
    blocks = []
    for item in raw:
        if (not isinstance(item, list) or len(item) != 2
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in item)):
            raise InstanceFormatError(f"bad block {item!r} in '{key}'")
        try:
            blocks.append(Interval.span(string_id, item[0], item[1]))
        except DomainError as exc:
            raise InstanceFormatError(f"bad block {item!r} in '{key}': {exc}") from exc
    return tuple(blocks)


def csp_from_json(data) -> CommonStringPartition:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(f"malformed partition JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InstanceFormatError("partition JSON must be an object")
    x_blocks = _blocks(data, "x_blocks", StringId.X)
    y_blocks = _blocks(data, "y_blocks", StringId.Y)
    matching = data.get("matching")
    if not isinstance(matching, list) or not all(isinstance(j, int) for j in matching):
        raise InstanceFormatError("'matching' must be a list of integers")
    if "size" in data and data["size"] != len(x_blocks):
        raise InstanceFormatError(f"size {data['size']} disagrees with {len(x_blocks)} x-blocks")
    return CommonStringPartition(x_blocks, y_blocks, tuple(j - 1 for j in matching))


def load_csp(path) -> CommonStringPartition:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceFormatError(f"cannot read {path}: {exc}") from exc
    return csp_from_json(text)


# ============== GENERATOR ==============

def make_rng(seed: int) -> np.random.Generator:
    """numpy PCG64 seeded with the 64-bit seed; same seed, same stream"""
    return np.random.Generator(np.random.PCG64(seed))


def generate_instance(n: int, k: int, sigma: int = 3,
                      seed: Optional[int] = None) -> tuple:
    """
    Random instance with a planted partition of size k.

    x is uniform over sigma symbols, cut at k-1 distinct uniform
    adjacencies; a uniform permutation of the blocks gives y.

    Returns:
        (Instance with the given k, planted CommonStringPartition)
    """
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    if not 1 <= k <= n:
        raise DomainError(f"k must lie in [1, n], got k={k}, n={n}")
    if not 1 <= sigma <= len(GENERATOR_SYMBOLS):
        raise DomainError(f"sigma must lie in [1, {len(GENERATOR_SYMBOLS)}], got {sigma}")
    rng = make_rng(seed)
    codes = rng.integers(0, sigma, size=n)
    x = [GENERATOR_SYMBOLS[c] for c in codes]
    cuts = sorted(int(c) for c in rng.choice(np.arange(1, n), size=k - 1, replace=False)) if k > 1 else []
    bounds = [0] + cuts + [n]
    blocks = [x[lo:hi] for lo, hi in zip(bounds, bounds[1:])]
    order = [int(i) for i in rng.permutation(k)]
    y = [symbol for i in order for symbol in blocks[i]]

    y_cuts, pos = [], 0
    for i in order[:-1]:
        pos += len(blocks[i])
        y_cuts.append(pos)
    matching = [0] * k
    for j, i in enumerate(order):
        matching[i] = j
    planted = CommonStringPartition.from_cuts(n, cuts, y_cuts, matching)
    logger.debug("generated n=%d k=%d sigma=%d seed=%s", n, k, sigma, seed)
    return Instance.from_symbols(x, y, k), planted
