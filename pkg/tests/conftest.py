import json
from pathlib import Path

import pytest

from scsynth import NumberSequence, parse_spec

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"

# Published N=16 reference sequences (multiplier synthesized/baseline pairs
# and the squarer pair) used by the regression and calibration tests.
SYNTH16 = NumberSequence((6, 13, 1, 10, 8, 3, 15, 4, 11, 0, 12, 7, 5, 14, 2, 9))
BASE16_UNI = NumberSequence((8, 4, 12, 2, 10, 6, 14, 1, 9, 5, 13, 3, 11, 7, 15, 0))
BASE16_BIP = NumberSequence((0, 1, 3, 7, 15, 14, 13, 10, 5, 11, 6, 12, 9, 2, 4, 8))
SQUARER16_SYNTH = NumberSequence((2, 0, 8, 12, 11, 7, 6, 1, 4, 13, 14, 5, 9, 10, 3, 15))


def load_problem(name: str, n: int | None = None):
    doc = json.loads((PROBLEMS / f"{name}.json").read_text())
    if n is not None:
        doc["n"] = n
    return parse_spec(doc)


@pytest.fixture
def multiplier4():
    return load_problem("multiplier", 4)


@pytest.fixture
def multiplier16():
    return load_problem("multiplier", 16)


@pytest.fixture
def multiplier_bipolar16():
    return load_problem("multiplier_bipolar", 16)


@pytest.fixture
def adder16():
    return load_problem("adder", 16)


@pytest.fixture
def satadd16():
    return load_problem("saturating_adder", 16)


@pytest.fixture
def squarer16():
    return load_problem("squarer", 16)


@pytest.fixture
def fma_staged_doc():
    return json.loads((PROBLEMS / "fma_staged.json").read_text())
