"""Adam with L2 weight decay and global gradient-norm clipping"""

import numpy as np

from ballbot_nav.config import ShapeError
from ballbot_nav.nn.store import Parameter


def clip_grad_norm(params: list[Parameter], max_norm: float) -> float:
    """Scale gradients in place so their joint L2 norm is at most `max_norm`.

    Returns:
        The norm before clipping.
    """

    squares = [np.sum(np.square(p.grad, dtype=np.float64)) for p in params]
    total = float(np.sqrt(sum(squares)))
    if total > max_norm > 0:
        scale = max_norm / (total + 1e-6)
        for p in params:
            p.grad *= scale
    return total


class Adam:
    """Adam optimiser over the trainable parameters of a store.

    Weight decay is added to the gradient (L2), not decoupled.

    Usage:

    ```python
    opt = Adam(store.trainable(), lr=1e-4, weight_decay=0.01)
    store.zero_grad()
    ...  # backward passes
    grad_norm = opt.step()
    ```
    """

    def __init__(
        self,
        params: list[Parameter],
        lr: float = 1e-4,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-5,
        weight_decay: float = 0.0,
        max_grad_norm: float | None = 0.5,
    ):
        self.params = list(params)
        self.lr = lr
        self.betas = betas
        self.eps = eps
        self.weight_decay = weight_decay
        self.max_grad_norm = max_grad_norm
        self.t = 0
        self.m = {p.name: np.zeros_like(p.value) for p in self.params}
        self.v = {p.name: np.zeros_like(p.value) for p in self.params}

    def step(self) -> float:
        """Apply one update from the accumulated gradients.

        Returns:
            The gradient norm before clipping.
        """

        norm = clip_grad_norm(self.params, self.max_grad_norm or 0.0)
        self.t += 1
        b1, b2 = self.betas
        c1 = 1 - b1**self.t
        c2 = 1 - b2**self.t
        for p in self.params:
            g = p.grad + self.weight_decay * p.value if self.weight_decay else p.grad
            m, v = self.m[p.name], self.v[p.name]
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            p.value -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)
        return norm

    def state_dict(self) -> dict[str, np.ndarray]:
        """Moments as named tensors plus the step count, for checkpoints"""

        state = {"adam.t": np.array(self.t, dtype=np.int64)}
        for name in self.m:
            state[f"adam.m.{name}"] = self.m[name].copy()
            state[f"adam.v.{name}"] = self.v[name].copy()
        return state

    def load_state_dict(self, state: dict[str, np.ndarray]) -> None:
        for name in self.m:
            for key, buf in ((f"adam.m.{name}", self.m), (f"adam.v.{name}", self.v)):
                if key not in state:
                    raise ShapeError(f"Tensor {key} is missing from the checkpoint")
                if state[key].shape != buf[name].shape:
                    raise ShapeError(
                        f"Tensor {key} has shape {state[key].shape}, "
                        f"expected {buf[name].shape}"
                    )
                buf[name][...] = state[key]
        self.t = int(state["adam.t"])
