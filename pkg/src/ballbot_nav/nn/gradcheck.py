"""Finite-difference gradient checks for layers and networks.

Run these in 64-bit: build the store with `dtype=np.float64` (or call
`store.astype(np.float64)`) and pass 64-bit inputs.
"""

from typing import Callable

import numpy as np

from ballbot_nav.nn.layers import Layer


def numerical_gradient(
    fn: Callable[[], float],
    array: np.ndarray,
    eps: float = 1e-4,
    indices: np.ndarray | None = None,
) -> np.ndarray:
    """Central-difference gradient of a scalar function of `array`.

    `array` is perturbed in place and restored after every entry. With
    `indices` only those flat entries are perturbed and a 1-D array of their
    derivatives is returned.
    """

    flat = array.reshape(-1)
    entries = np.arange(flat.size) if indices is None else np.asarray(indices)
    grad = np.zeros(entries.size)
    for k, i in enumerate(entries):
        orig = flat[i]
        flat[i] = orig + eps
        plus = fn()
        flat[i] = orig - eps
        minus = fn()
        flat[i] = orig
        grad[k] = (plus - minus) / (2 * eps)
    return grad.reshape(array.shape) if indices is None else grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """||a - n|| / max(||a||, ||n||), 0 when both vanish"""

    scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric))
    if scale == 0:
        return 0.0
    return float(np.linalg.norm(analytic - numeric) / scale)


def check_gradients(
    loss: Callable[[], float],
    backward: Callable[[], np.ndarray | None],
    arrays: dict[str, tuple[np.ndarray, np.ndarray]],
    rng: np.random.Generator,
    eps: float = 1e-4,
    max_entries: int | None = None,
) -> dict[str, float]:
    """Relative error between analytic and numerical gradients.

    Args:
        loss: evaluates the scalar loss without recording anything
        backward: runs forward and backward once, filling the analytic
            gradients referenced in `arrays`
        arrays: name to (value array, analytic gradient array)
        rng: picks the checked entries when `max_entries` is set
        eps: finite-difference step
        max_entries: check at most this many entries per array

    Returns:
        Relative error per name.
    """

    backward()
    errors = {}
    for name, (value, grad) in arrays.items():
        indices = None
        if max_entries is not None and value.size > max_entries:
            indices = rng.choice(value.size, size=max_entries, replace=False)
        numeric = numerical_gradient(loss, value, eps, indices)
        analytic = grad.reshape(-1)[indices] if indices is not None else grad
        errors[name] = relative_error(analytic, numeric)
    return errors


def check_layer_gradients(
    layer: Layer,
    x: np.ndarray,
    rng: np.random.Generator,
    eps: float = 1e-4,
    max_entries: int | None = None,
) -> dict[str, float]:
    """Gradient check of a layer under a random projection loss.

    The loss is sum(forward(x) * w) for a fixed random w, so every output
    element contributes.

    Returns:
        Relative error per parameter name plus "input" for d loss / d x.
    """

    weights = rng.standard_normal(layer.forward(x).shape)
    layer._cache = None
    dx = np.zeros_like(x)

    def loss() -> float:
        value = float(np.sum(layer.forward(x) * weights))
        layer._cache = None
        return value

    def backward():
        for p in layer.parameters():
            p.grad[...] = 0
        layer.forward(x)
        dx[...] = layer.backward(weights)

    arrays = {"input": (x, dx)}
    arrays.update({p.name: (p.value, p.grad) for p in layer.parameters()})
    return check_gradients(loss, backward, arrays, rng, eps, max_entries)
