"""
Partition Renderer
==================
Draw a common string partition (or a solver constraint) as a PNG.

x is drawn on the top row and y on the bottom row, one cell per symbol.
Matched blocks share a fill colour and are joined by a connector.

Usage:
    from render_csp import render_csp
    render_csp(instance, csp, "partition.png")
"""

import logging
from pathlib import Path
from typing import Optional

from PIL import Image, ImageDraw, ImageFont

from constraints import Constraint, FrameSet
from csp_model import CommonStringPartition, diagnose_csp
from errors import DomainError
from strings_core import Instance, StringId

# Import configuration
try:
    from config import (
        RENDER_BACKGROUND,
        RENDER_CELL,
        RENDER_FRAGILE,
        RENDER_FRAME,
        RENDER_GAP,
        RENDER_INK,
        RENDER_MARGIN,
        RENDER_PALETTE,
        RENDER_ROW_HEIGHT,
        RENDER_SOLID,
    )
except ImportError:
    RENDER_CELL = 22
    RENDER_ROW_HEIGHT = 28
    RENDER_GAP = 70
    RENDER_MARGIN = 16
    RENDER_BACKGROUND = (255, 255, 255)
    RENDER_INK = (20, 20, 20)
    RENDER_PALETTE = [(255, 179, 186), (186, 225, 255), (186, 255, 201), (255, 255, 186)]
    RENDER_SOLID = (120, 170, 220)
    RENDER_FRAGILE = (245, 245, 245)
    RENDER_FRAME = (220, 60, 60)

logger = logging.getLogger(__name__)

TITLE_HEIGHT = 18


def canvas_size(n: int, title: Optional[str] = None) -> tuple:
    width = 2 * RENDER_MARGIN + n * RENDER_CELL
    height = 2 * RENDER_MARGIN + 2 * RENDER_ROW_HEIGHT + RENDER_GAP
    if title:
        height += TITLE_HEIGHT
    return width, height


def _row_top(string_id: StringId, title: Optional[str]) -> int:
    top = RENDER_MARGIN + (TITLE_HEIGHT if title else 0)
    return top if string_id is StringId.X else top + RENDER_ROW_HEIGHT + RENDER_GAP


def _cell_left(pos: int) -> int:
    return RENDER_MARGIN + (pos - 1) * RENDER_CELL


def _new_canvas(inst: Instance, title: Optional[str]):
    image = Image.new("RGB", canvas_size(inst.n, title), RENDER_BACKGROUND)
    draw = ImageDraw.Draw(image)
    font = ImageFont.load_default()
    if title:
        draw.text((RENDER_MARGIN, RENDER_MARGIN // 2), title, fill=RENDER_INK, font=font)
    return image, draw, font


def _draw_symbols(draw, inst: Instance, string_id: StringId, title, font) -> None:
    top = _row_top(string_id, title)
    for pos, code in enumerate(inst.text(string_id), start=1):
        left = _cell_left(pos)
        symbol = inst.alphabet[code] if inst.alphabet else str(code)
        draw.rectangle([left, top, left + RENDER_CELL, top + RENDER_ROW_HEIGHT], outline=RENDER_INK)
        draw.text((left + RENDER_CELL // 3, top + RENDER_ROW_HEIGHT // 4), symbol[:2], fill=RENDER_INK, font=font)


def _fill(draw, interval, title, colour) -> None:
    top = _row_top(interval.string_id, title)
    draw.rectangle([_cell_left(interval.start), top, _cell_left(interval.end) + RENDER_CELL,
                    top + RENDER_ROW_HEIGHT], fill=colour)


def _midpoint(interval) -> float:
    return (_cell_left(interval.start) + _cell_left(interval.end) + RENDER_CELL) / 2


def render_csp(inst: Instance, csp: CommonStringPartition, path, title: Optional[str] = None) -> Path:
    """
    Draw csp and save it as a PNG.

    Args:
        inst: the instance the partition belongs to
        csp: a valid common string partition
        path: output file
        title: optional caption above the rows

    Returns:
        Path of the written image
    """
    check = diagnose_csp(inst, csp)
    if not check.ok:
        raise DomainError(f"cannot render an invalid partition: {check.reason} {check.detail}")
    image, draw, font = _new_canvas(inst, title)
    x_bottom = _row_top(StringId.X, title) + RENDER_ROW_HEIGHT
    y_top = _row_top(StringId.Y, title)

    for i, j in enumerate(csp.matching):
        colour = RENDER_PALETTE[i % len(RENDER_PALETTE)]
        x_block, y_block = csp.x_blocks[i], csp.y_blocks[j]
        _fill(draw, x_block, title, colour)
        _fill(draw, y_block, title, colour)
        draw.line([(_midpoint(x_block), x_bottom), (_midpoint(y_block), y_top)], fill=RENDER_INK, width=2)

    for string_id in StringId:
        _draw_symbols(draw, inst, string_id, title, font)
        top = _row_top(string_id, title)
        # thick separators at block boundaries
        for cut in csp.cut_positions(string_id):
            edge = _cell_left(cut + 1)
            draw.line([(edge, top - 3), (edge, top + RENDER_ROW_HEIGHT + 3)], fill=RENDER_INK, width=4)

    path = Path(path)
    image.save(path)
    logger.info("rendered partition of size %d to %s", csp.size, path)
    return path


def render_constraint(inst: Instance, cons: Constraint, frames: Optional[FrameSet], path,
                      title: Optional[str] = None) -> Path:
    """Draw solid pieces filled, fragile pieces hatched and frames outlined"""
    image, draw, font = _new_canvas(inst, title)
    for string_id in StringId:
        top = _row_top(string_id, title)
        for piece in cons.pieces(string_id):
            iv = piece.interval
            if piece.is_solid:
                _fill(draw, iv, title, RENDER_SOLID)
                continue
            _fill(draw, iv, title, RENDER_FRAGILE)
            left, right = _cell_left(iv.start), _cell_left(iv.end) + RENDER_CELL
            for x in range(left, right, 6):
                draw.line([(x, top + RENDER_ROW_HEIGHT), (min(x + 6, right), top)], fill=RENDER_INK)
        _draw_symbols(draw, inst, string_id, title, font)
        if frames is None:
            continue
        for piece in cons.fragile(string_id):
            frame = frames.get(piece.id)
            if frame is not None:
                draw.rectangle([_cell_left(frame.start) - 1, top - 2, _cell_left(frame.end) + RENDER_CELL + 1,
                                top + RENDER_ROW_HEIGHT + 2], outline=RENDER_FRAME, width=3)
    path = Path(path)
    image.save(path)
    logger.debug("rendered constraint to %s", path)
    return path
