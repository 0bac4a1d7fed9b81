"""Weight initialisation"""

import math

import numpy as np


def orthogonal_(
    shape: tuple[int, ...], gain: float, rng: np.random.Generator
) -> np.ndarray:
    """Orthogonal matrix of the given shape, scaled by `gain`.

    Trailing dimensions are flattened, so conv kernels (out, in, k, k) are
    orthogonal as (out, in * k * k) matrices. Rows are orthonormal when
    out <= in, columns otherwise.
    """

    rows = shape[0]
    cols = math.prod(shape[1:])
    flat = rng.standard_normal((rows, cols))
    if rows < cols:
        flat = flat.T
    q, r = np.linalg.qr(flat)
    # sign fix makes the distribution uniform over orthogonal matrices
    q *= np.sign(np.diag(r))
    if rows < cols:
        q = q.T
    return gain * q.reshape(shape)
