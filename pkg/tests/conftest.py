import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from leibniz.op_algebra import PairPoly  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]
SAMPLES = ROOT / "samples"
GOLDEN = Path(__file__).parent / "golden"

ALPHABET = ["p", "q", "r", "s"]

words = st.lists(st.sampled_from(ALPHABET), max_size=4).map(tuple)
pair_polys = st.lists(
    st.tuples(st.integers(-3, 3).filter(bool), words, words), max_size=6
).map(PairPoly.from_terms)


@pytest.fixture
def samples():
    return SAMPLES


@pytest.fixture
def golden():
    return GOLDEN
