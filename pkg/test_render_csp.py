from __future__ import annotations

import pytest
from PIL import Image

from config import RENDER_BACKGROUND, RENDER_FRAME
from constraints import FrameSet, initial_constraint
from csp_model import CommonStringPartition
from errors import DomainError
from render_csp import canvas_size, render_constraint, render_csp
from strings_core import Interval, StringId


def test_canvas_size() -> None:
    assert canvas_size(25) == (582, 158)
    assert canvas_size(25, "title")[1] > canvas_size(25)[1]


def test_render_partition(worked_instance, worked_partition, tmp_path) -> None:
    path = render_csp(worked_instance, worked_partition, tmp_path / "p.png", title="worked")
    with Image.open(path) as image:
        assert image.size == canvas_size(25, "worked")
        assert image.getpixel((1, 1))[:3] == RENDER_BACKGROUND


def test_render_refuses_an_invalid_partition(worked_instance, worked_partition, tmp_path) -> None:
    broken = CommonStringPartition(worked_partition.x_blocks, worked_partition.y_blocks, (0, 1, 2, 3))
    with pytest.raises(DomainError):
        render_csp(worked_instance, broken, tmp_path / "p.png")
    assert not (tmp_path / "p.png").exists()


def test_render_constraint_with_frames(worked_instance, tmp_path) -> None:
    cons = initial_constraint(worked_instance)
    frames = FrameSet({0: Interval.span(StringId.X, 1, 4)})
    path = render_constraint(worked_instance, cons, frames, tmp_path / "c.png")
    with Image.open(path) as image:
        colours = {colour for _, colour in image.getcolors(maxcolors=1 << 16)}
    assert RENDER_FRAME in colours
