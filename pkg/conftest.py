from __future__ import annotations

import json

import pytest

from csp_model import CommonStringPartition
from instance_io import csp_to_json
from strings_core import Instance

# Example strings with a known partition of size four
WORKED_X = "ababcdabadcbbaabababababa"
WORKED_Y = "ababababababadcbbaaababcd"
WORKED_X_CUTS = (6, 15, 20)
WORKED_Y_CUTS = (5, 10, 19)
WORKED_MATCHING = (3, 2, 1, 0)


@pytest.fixture
def worked_instance() -> Instance:
    return Instance.from_symbols(WORKED_X, WORKED_Y, k=4)


@pytest.fixture
def worked_partition() -> CommonStringPartition:
    return CommonStringPartition.from_cuts(len(WORKED_X), WORKED_X_CUTS, WORKED_Y_CUTS, WORKED_MATCHING)


@pytest.fixture
def worked_files(tmp_path, worked_partition):
    """(instance path, partition JSON path) of the worked example"""
    instance_path = tmp_path / "worked.txt"
    instance_path.write_text(f"{WORKED_X}\n{WORKED_Y}\n", encoding="utf-8")
    csp_path = tmp_path / "worked.json"
    csp_path.write_text(json.dumps(csp_to_json(worked_partition)), encoding="utf-8")
    return instance_path, csp_path
