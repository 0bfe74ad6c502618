import numpy as np
import pytest

from lexhier.embedding import EmbeddingMatrix


@pytest.fixture
def line_embedding():
    """1-D points {0, 1, 10} as vectors a, b, c."""
    return EmbeddingMatrix(["a", "b", "c"], np.array([[0.0], [1.0], [10.0]]))


@pytest.fixture
def two_pairs_embedding():
    """1-D points {0, 1, 10, 11}: two tight pairs far apart."""
    return EmbeddingMatrix(
        ["a", "b", "c", "d"], np.array([[0.0], [1.0], [10.0], [11.0]])
    )
