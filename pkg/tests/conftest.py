import numpy as np
import pytest

from projspan import SamplingPattern, Subspace


@pytest.fixture
def line_subspace() -> Subspace:
    """The rank-1 running example: the line through (1, 2, 3, 4, 4)."""
    return Subspace.from_spanning(np.array([1.0, 2.0, 3.0, 4.0, 4.0]).reshape(-1, 1))


@pytest.fixture
def ambiguous_pattern() -> SamplingPattern:
    """5x4 pattern whose first three columns only touch rows 0..2.

    Any line through (x, y, z, a, a) with matching first coordinates produces
    identical observations, so the pattern cannot identify a subspace.
    """
    return SamplingPattern(d=5, r=1, columns=(0b00011, 0b00110, 0b00101, 0b11000))


@pytest.fixture
def repaired_pattern() -> SamplingPattern:
    """The ambiguous pattern with one column moved to rows {2, 3}: a chain
    covering all five rows, which satisfies the expansion condition."""
    return SamplingPattern(d=5, r=1, columns=(0b00011, 0b00110, 0b01100, 0b11000))
