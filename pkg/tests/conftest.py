import numpy as np
import pytest

# Reference matrices, typed in by hand rather than generated.
I4 = np.eye(4)
H4 = np.array(
    [
        [1, 1, 1, 1],
        [1, 1, 0, 0],
        [0, 0, 1, 1],
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [0, 0, 0, 1],
    ],
    dtype=float,
)
Y4 = np.array(
    [
        [1, 1, 1, 1],
        [1, 1, -1, -1],
        [1, -1, 0, 0],
        [0, 0, 1, -1],
    ],
    dtype=float,
)
H4_PINV_X21 = np.array(
    [
        [3, 5, -2, 13, -8, -1, -1],
        [3, 5, -2, -8, 13, -1, -1],
        [3, -2, 5, -1, -1, 13, -8],
        [3, -2, 5, -1, -1, -8, 13],
    ],
    dtype=float,
)
Y4_INV = np.array(
    [
        [0.25, 0.25, 0.5, 0.0],
        [0.25, 0.25, -0.5, 0.0],
        [0.25, -0.25, 0.0, 0.5],
        [0.25, -0.25, 0.0, -0.5],
    ]
)
H4_PROFILE_X21 = np.array(
    [[13, -8, -1, -1], [-8, 13, -1, -1], [-1, -1, 13, -8], [-1, -1, -8, 13]], dtype=float
)
Y4_PROFILE_X8 = np.array([[3, -1, 0, 0], [-1, 3, 0, 0], [0, 0, 3, -1], [0, 0, -1, 3]], dtype=float)
# Printed to two decimals.
H_PRIME = np.array(
    [
        [-1.32, -1.32, -1.32, -1.32],
        [0.87, 0.87, -0.87, -0.87],
        [-0.71, 0.71, 0.00, 0.00],
        [0.00, 0.00, -0.71, 0.71],
    ]
)
Y_PRIME = np.array(
    [
        [1.73, 0.58, 0.00, 0.00],
        [0.00, 1.63, 0.00, 0.00],
        [0.00, 0.00, 1.73, 0.58],
        [0.00, 0.00, 0.00, 1.63],
    ]
)


def random_full_rank(rng, m, n):
    while True:
        A = rng.standard_normal((m, n))
        if np.linalg.cond(A) < 1e4:
            return A


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
