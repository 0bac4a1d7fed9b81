"""Layers with explicit forward and backward passes.

Every layer records what its backward pass needs during `forward` and
consumes that record in `backward`. Calling `backward` without a recorded
forward raises `UsageError`. Gradients are accumulated into the
`Parameter.grad` buffers of trainable parameters.
"""

import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ballbot_nav.config import ShapeError, UsageError
from ballbot_nav.nn.init import orthogonal_
from ballbot_nav.nn.store import Parameter, ParameterStore


class Layer:
    """Base class. Subclasses implement `_forward` and `_backward`."""

    def __init__(self, name: str = ""):
        self.name = name or type(self).__name__
        self.training = True
        self._cache = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        out, self._cache = self._forward(x)
        return out

    __call__ = forward

    def backward(self, grad: np.ndarray) -> np.ndarray:
        if self._cache is None:
            raise UsageError(f"{self.name}: backward called without a recorded forward")
        cache, self._cache = self._cache, None
        return self._backward(grad, cache)

    def train(self, mode: bool = True) -> "Layer":
        self.training = mode
        return self

    def eval(self) -> "Layer":
        return self.train(False)

    def parameters(self) -> list[Parameter]:
        return []

    def _forward(self, x):
        raise NotImplementedError

    def _backward(self, grad, cache):
        raise NotImplementedError


class Linear(Layer):
    """y = x W^T + b with W of shape (out_features, in_features)"""

    def __init__(
        self,
        store: ParameterStore,
        name: str,
        in_features: int,
        out_features: int,
        rng: np.random.Generator,
        gain: float = math.sqrt(2),
    ):
        super().__init__(name)
        self.in_features = in_features
        self.out_features = out_features
        self.weight = store.add(
            f"{name}.weight", orthogonal_((out_features, in_features), gain, rng)
        )
        self.bias = store.add(f"{name}.bias", np.zeros(out_features))

    def parameters(self) -> list[Parameter]:
        return [self.weight, self.bias]

    def _forward(self, x):
        if x.ndim != 2 or x.shape[1] != self.in_features:
            raise ShapeError(
                f"{self.name}: expected input (batch, {self.in_features}), "
                f"got {x.shape}"
            )
        return x @ self.weight.value.T + self.bias.value, x

    def _backward(self, grad, x):
        self.weight.accumulate(grad.T @ x)
        self.bias.accumulate(grad.sum(axis=0))
        return grad @ self.weight.value


def conv_output_size(size: int, kernel: int, stride: int, padding: int) -> int:
    return (size + 2 * padding - kernel) // stride + 1


class Conv2d(Layer):
    """2-D cross-correlation over (batch, channels, height, width) inputs"""

    def __init__(
        self,
        store: ParameterStore,
        name: str,
        in_channels: int,
        out_channels: int,
        kernel_size: int,
        rng: np.random.Generator,
        stride: int = 1,
        padding: int = 0,
        gain: float = math.sqrt(2),
    ):
        super().__init__(name)
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel_size = kernel_size
        self.stride = stride
        self.padding = padding
        shape = (out_channels, in_channels, kernel_size, kernel_size)
        self.weight = store.add(f"{name}.weight", orthogonal_(shape, gain, rng))
        self.bias = store.add(f"{name}.bias", np.zeros(out_channels))

    def parameters(self) -> list[Parameter]:
        return [self.weight, self.bias]

    def _forward(self, x):
        if x.ndim != 4 or x.shape[1] != self.in_channels:
            raise ShapeError(
                f"{self.name}: expected input (batch, {self.in_channels}, H, W), "
                f"got {x.shape}"
            )
        k, s, p = self.kernel_size, self.stride, self.padding
        padded = np.pad(x, ((0, 0), (0, 0), (p, p), (p, p)))
        # (batch, channels, out_h, out_w, k, k)
        windows = sliding_window_view(padded, (k, k), axis=(2, 3))[:, :, ::s, ::s]
        out = np.einsum("nchwij,ocij->nohw", windows, self.weight.value, optimize=True)
        out += self.bias.value[None, :, None, None]
        return out, (x.shape, padded.shape, windows)

    def _backward(self, grad, cache):
        x_shape, padded_shape, windows = cache
        k, s, p = self.kernel_size, self.stride, self.padding
        out_h, out_w = grad.shape[2:]

        self.weight.accumulate(
            np.einsum("nohw,nchwij->ocij", grad, windows, optimize=True)
        )
        self.bias.accumulate(grad.sum(axis=(0, 2, 3)))

        w = self.weight.value
        d_windows = np.einsum("nohw,ocij->nchwij", grad, w, optimize=True)
        d_padded = np.zeros(padded_shape, dtype=grad.dtype)
        for i in range(k):
            for j in range(k):
                rows = slice(i, i + s * out_h, s)
                cols = slice(j, j + s * out_w, s)
                d_padded[:, :, rows, cols] += d_windows[..., i, j]
        height, width = x_shape[2:]
        return d_padded[:, :, p : p + height, p : p + width]


class BatchNorm(Layer):
    """Batch normalisation over features (2-D input) or channels (4-D input).

    Training mode normalises with the batch statistics and updates the running
    estimates; eval mode uses only the running estimates.
    """

    def __init__(
        self,
        store: ParameterStore,
        name: str,
        num_features: int,
        momentum: float = 0.1,
        eps: float = 1e-5,
    ):
        super().__init__(name)
        self.num_features = num_features
        self.momentum = momentum
        self.eps = eps
        self.weight = store.add(f"{name}.weight", np.ones(num_features))
        self.bias = store.add(f"{name}.bias", np.zeros(num_features))
        self.running_mean = store.add(
            f"{name}.running_mean", np.zeros(num_features), trainable=False
        )
        self.running_var = store.add(
            f"{name}.running_var", np.ones(num_features), trainable=False
        )

    def parameters(self) -> list[Parameter]:
        return [self.weight, self.bias]

    def _axes(self, x) -> tuple[tuple[int, ...], tuple[int, ...]]:
        if x.ndim == 2 and x.shape[1] == self.num_features:
            return (0,), (1, -1)
        if x.ndim == 4 and x.shape[1] == self.num_features:
            return (0, 2, 3), (1, -1, 1, 1)
        raise ShapeError(
            f"{self.name}: expected {self.num_features} features or channels, "
            f"got input {x.shape}"
        )

    def _forward(self, x):
        axes, shape = self._axes(x)
        if self.training:
            mean = x.mean(axis=axes)
            var = x.var(axis=axes)
            n = x.size // self.num_features
            unbiased = var * n / (n - 1) if n > 1 else var
            m = self.momentum
            self.running_mean.value[...] *= 1 - m
            self.running_mean.value[...] += m * mean
            self.running_var.value[...] *= 1 - m
            self.running_var.value[...] += m * unbiased
        else:
            mean = self.running_mean.value
            var = self.running_var.value

        inv_std = 1.0 / np.sqrt(var + self.eps)
        x_hat = (x - mean.reshape(shape)) * inv_std.reshape(shape)
        out = x_hat * self.weight.value.reshape(shape) + self.bias.value.reshape(shape)
        return out, (x_hat, inv_std, axes, shape, self.training)

    def _backward(self, grad, cache):
        x_hat, inv_std, axes, shape, training = cache
        self.weight.accumulate((grad * x_hat).sum(axis=axes))
        self.bias.accumulate(grad.sum(axis=axes))

        d_hat = grad * self.weight.value.reshape(shape)
        if not training:
            return d_hat * inv_std.reshape(shape)

        n = grad.size // self.num_features
        sum_d = d_hat.sum(axis=axes).reshape(shape)
        sum_dx = (d_hat * x_hat).sum(axis=axes).reshape(shape)
        return inv_std.reshape(shape) / n * (n * d_hat - sum_d - x_hat * sum_dx)


class LeakyReLU(Layer):
    def __init__(self, negative_slope: float = 0.01, name: str = ""):
        super().__init__(name)
        self.negative_slope = negative_slope

    def _forward(self, x):
        positive = x > 0
        return np.where(positive, x, self.negative_slope * x), positive

    def _backward(self, grad, positive):
        return np.where(positive, grad, self.negative_slope * grad)


class Tanh(Layer):
    def _forward(self, x):
        out = np.tanh(x)
        return out, out

    def _backward(self, grad, out):
        return grad * (1 - out**2)


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Logistic function, stable for large |x|"""

    e = np.exp(-np.abs(x))
    return np.where(x >= 0, 1 / (1 + e), e / (1 + e))


class Sigmoid(Layer):
    def _forward(self, x):
        out = sigmoid(x)
        return out, out

    def _backward(self, grad, out):
        return grad * out * (1 - out)


class Flatten(Layer):
    def _forward(self, x):
        return x.reshape(x.shape[0], -1), x.shape

    def _backward(self, grad, shape):
        return grad.reshape(shape)


class Unflatten(Layer):
    def __init__(self, shape: tuple[int, ...], name: str = ""):
        super().__init__(name)
        self.shape = tuple(shape)

    def _forward(self, x):
        if x.ndim != 2 or x.shape[1] != math.prod(self.shape):
            raise ShapeError(f"{self.name}: cannot unflatten {x.shape} to {self.shape}")
        return x.reshape(x.shape[0], *self.shape), x.shape

    def _backward(self, grad, shape):
        return grad.reshape(shape)


class Upsample2x(Layer):
    """Nearest-neighbour upsampling by 2 in height and width"""

    def _forward(self, x):
        return x.repeat(2, axis=2).repeat(2, axis=3), x.shape

    def _backward(self, grad, shape):
        n, c, h, w = shape
        return grad.reshape(n, c, h, 2, w, 2).sum(axis=(3, 5))


class Sequential(Layer):
    """Chains layers; backward runs them in reverse"""

    def __init__(self, *layers: Layer, name: str = ""):
        super().__init__(name)
        self.layers = list(layers)

    def forward(self, x: np.ndarray) -> np.ndarray:
        for layer in self.layers:
            x = layer.forward(x)
        self._cache = True
        return x

    __call__ = forward

    def backward(self, grad: np.ndarray) -> np.ndarray:
        if self._cache is None:
            raise UsageError(f"{self.name}: backward called without a recorded forward")
        self._cache = None
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad

    def train(self, mode: bool = True) -> "Sequential":
        self.training = mode
        for layer in self.layers:
            layer.train(mode)
        return self

    def parameters(self) -> list[Parameter]:
        return [p for layer in self.layers for p in layer.parameters()]

    def __len__(self) -> int:
        return len(self.layers)

    def __getitem__(self, index: int) -> Layer:
        return self.layers[index]
