"""Dense networks with a fixed-topology backward pass and Adam.

Every tensor is a 2-D float64 ``numpy.ndarray`` (rows x cols). Networks are
plain parameter collections in a ``ParamStore``; ``mlp_forward`` caches the
activations that ``mlp_backward`` needs, keyed by the layer-name prefix so
that several networks can share one store.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Literal, Tuple

import numpy as np

from ..exceptions import ContractViolationError, NumericalError
from .rng import Rng

HiddenActivation = Literal["relu", "tanh"]
OutputActivation = Literal["identity", "tanh", "sigmoid"]

# sigmoid outputs see logits clamped to +-LOGIT_CLAMP so D stays in (0, 1)
LOGIT_CLAMP = 10.0

Tensor2 = np.ndarray


def tensor2(rows: int, cols: int, data) -> Tensor2:
    """Build a rows x cols tensor from row-major ``data``."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.size != rows * cols:
        raise ContractViolationError(
            f"data length {arr.size} != rows*cols {rows * cols}",
            {"rows": rows, "cols": cols},
        )
    return arr.reshape(rows, cols).copy()


@dataclass(frozen=True)
class MlpSpec:
    input_dim: int
    hidden_dims: Tuple[int, ...]
    output_dim: int
    hidden_activation: HiddenActivation = "relu"
    output_activation: OutputActivation = "identity"

    def __post_init__(self):
        object.__setattr__(self, "hidden_dims", tuple(int(h) for h in self.hidden_dims))
        dims = (self.input_dim, *self.hidden_dims, self.output_dim)
        if any(d < 1 for d in dims):
            raise ContractViolationError(f"all MLP dims must be >= 1, got {dims}")
        if self.hidden_activation not in ("relu", "tanh"):
            raise ContractViolationError(f"unknown hidden activation {self.hidden_activation!r}")
        if self.output_activation not in ("identity", "tanh", "sigmoid"):
            raise ContractViolationError(f"unknown output activation {self.output_activation!r}")

    @property
    def layer_dims(self) -> List[Tuple[int, int]]:
        dims = (self.input_dim, *self.hidden_dims, self.output_dim)
        return list(zip(dims[:-1], dims[1:]))


@dataclass
class ParamEntry:
    value: Tensor2
    grad: Tensor2
    adam_m: Tensor2
    adam_v: Tensor2

    @classmethod
    def of(cls, value: Tensor2) -> "ParamEntry":
        value = np.array(value, dtype=np.float64, ndmin=2)
        return cls(value, np.zeros_like(value), np.zeros_like(value), np.zeros_like(value))


@dataclass
class _ForwardCache:
    inputs: List[Tensor2]  # input to each layer
    pre: List[Tensor2]  # pre-activation of each layer
    output: Tensor2


class ParamStore:
    """Named parameters with gradient and Adam moment storage."""

    def __init__(self):
        self.entries: Dict[str, ParamEntry] = {}
        self.step_count = 0
        self._cache: Dict[str, _ForwardCache] = {}

    def add(self, name: str, value: Tensor2) -> None:
        self.entries[name] = ParamEntry.of(value)

    def __getitem__(self, name: str) -> Tensor2:
        return self.entries[name].value

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def __iter__(self) -> Iterator[str]:
        return iter(self.entries)

    def grad(self, name: str) -> Tensor2:
        return self.entries[name].grad

    def zero_grad(self) -> None:
        for entry in self.entries.values():
            entry.grad[...] = 0.0

    def copy(self) -> "ParamStore":
        """Deep copy of values and optimizer state, without forward caches."""
        clone = ParamStore()
        for name, entry in self.entries.items():
            clone.entries[name] = ParamEntry(
                entry.value.copy(), entry.grad.copy(), entry.adam_m.copy(), entry.adam_v.copy()
            )
        clone.step_count = self.step_count
        return clone

    def polyak_from(self, source: "ParamStore", tau: float) -> None:
        """In place: value <- (1 - tau) * value + tau * source.value."""
        for name, entry in self.entries.items():
            entry.value *= 1.0 - tau
            entry.value += tau * source.entries[name].value

    def num_params(self) -> int:
        return sum(e.value.size for e in self.entries.values())

    def values_equal(self, other: "ParamStore") -> bool:
        return self.entries.keys() == other.entries.keys() and all(
            np.array_equal(e.value, other.entries[n].value) for n, e in self.entries.items()
        )


def _layer_names(prefix: str, i: int) -> Tuple[str, str]:
    return f"{prefix}l{i}/w", f"{prefix}l{i}/b"


def init_mlp(params: ParamStore, spec: MlpSpec, rng: Rng, prefix: str = "") -> ParamStore:
    """Fan-in uniform weights (bound 1/sqrt(fan_in)) and zero biases."""
    for i, (fan_in, fan_out) in enumerate(spec.layer_dims):
        w_name, b_name = _layer_names(prefix, i)
        bound = 1.0 / np.sqrt(fan_in)
        params.add(w_name, rng.uniform(-bound, bound, size=fan_in * fan_out).reshape(fan_in, fan_out))
        params.add(b_name, np.zeros((1, fan_out)))
    return params


def build_mlp(spec: MlpSpec, rng: Rng) -> ParamStore:
    return init_mlp(ParamStore(), spec, rng)


def _check_finite(arr: Tensor2, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise NumericalError(f"non-finite values in {what}")


def _hidden(kind: str, z: Tensor2) -> Tensor2:
    return np.maximum(z, 0.0) if kind == "relu" else np.tanh(z)


def _hidden_grad(kind: str, z: Tensor2, h: Tensor2) -> Tensor2:
    return (z > 0.0).astype(np.float64) if kind == "relu" else 1.0 - h * h


def _output(kind: str, z: Tensor2) -> Tensor2:
    if kind == "identity":
        return z
    if kind == "tanh":
        return np.tanh(z)
    return 1.0 / (1.0 + np.exp(-np.clip(z, -LOGIT_CLAMP, LOGIT_CLAMP)))


def _output_grad(kind: str, z: Tensor2, y: Tensor2) -> Tensor2:
    if kind == "identity":
        return np.ones_like(z)
    if kind == "tanh":
        return 1.0 - y * y
    inside = (z > -LOGIT_CLAMP) & (z < LOGIT_CLAMP)
    return y * (1.0 - y) * inside


def mlp_forward(params: ParamStore, spec: MlpSpec, batch: Tensor2, prefix: str = "") -> Tensor2:
    """Run ``batch`` through the network and cache activations for backward."""
    x = np.asarray(batch, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != spec.input_dim:
        raise ContractViolationError(
            f"batch shape {x.shape} does not match input_dim {spec.input_dim}",
            {"prefix": prefix},
        )

    n_layers = len(spec.layer_dims)
    inputs, pre = [], []
    h = x
    for i in range(n_layers):
        w_name, b_name = _layer_names(prefix, i)
        inputs.append(h)
        z = h @ params[w_name] + params[b_name]
        pre.append(z)
        h = _hidden(spec.hidden_activation, z) if i < n_layers - 1 else _output(spec.output_activation, z)

    _check_finite(h, f"forward output of {prefix or 'network'}")
    params._cache[prefix] = _ForwardCache(inputs, pre, h)
    return h


def mlp_backward(
    params: ParamStore,
    spec: MlpSpec,
    upstream_grad: Tensor2,
    prefix: str = "",
    accumulate: bool = True,
) -> Tensor2:
    """Backpropagate ``upstream_grad`` through the cached forward pass.

    Parameter gradients are added into the store unless ``accumulate`` is
    False. Returns the gradient with respect to the network input.
    """
    cache = params._cache.get(prefix)
    if cache is None:
        raise ContractViolationError(f"backward called before forward for {prefix or 'network'}")
    g = np.asarray(upstream_grad, dtype=np.float64)
    if g.shape != cache.output.shape:
        raise ContractViolationError(
            f"upstream gradient shape {g.shape} != output shape {cache.output.shape}"
        )

    n_layers = len(spec.layer_dims)
    g = g * _output_grad(spec.output_activation, cache.pre[-1], cache.output)
    for i in reversed(range(n_layers)):
        w_name, b_name = _layer_names(prefix, i)
        if accumulate:
            params.grad(w_name)[...] += cache.inputs[i].T @ g
            params.grad(b_name)[...] += g.sum(axis=0, keepdims=True)
        g = g @ params[w_name].T
        if i > 0:
            g = g * _hidden_grad(spec.hidden_activation, cache.pre[i - 1], cache.inputs[i])

    _check_finite(g, f"input gradient of {prefix or 'network'}")
    return g


def adam_step(
    params: ParamStore,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> None:
    """Bias-corrected Adam update of every entry; zeroes gradients afterwards."""
    params.step_count += 1
    t = params.step_count
    c1 = 1.0 - beta1**t
    c2 = 1.0 - beta2**t
    for name, entry in params.entries.items():
        g = entry.grad
        entry.adam_m[...] = beta1 * entry.adam_m + (1.0 - beta1) * g
        entry.adam_v[...] = beta2 * entry.adam_v + (1.0 - beta2) * g * g
        entry.value -= lr * (entry.adam_m / c1) / (np.sqrt(entry.adam_v / c2) + eps)
        _check_finite(entry.value, f"parameter {name} after Adam step")
        g[...] = 0.0


@dataclass
class Mlp:
    """A network bound to its own store: the usual way modules hold one."""

    spec: MlpSpec
    params: ParamStore = field(default_factory=ParamStore)

    @classmethod
    def create(cls, spec: MlpSpec, rng: Rng) -> "Mlp":
        return cls(spec, build_mlp(spec, rng))

    def forward(self, batch: Tensor2) -> Tensor2:
        return mlp_forward(self.params, self.spec, batch)

    def backward(self, upstream_grad: Tensor2, accumulate: bool = True) -> Tensor2:
        return mlp_backward(self.params, self.spec, upstream_grad, accumulate=accumulate)

    def step(self, lr: float) -> None:
        adam_step(self.params, lr)

    def copy(self) -> "Mlp":
        return Mlp(self.spec, self.params.copy())


def flat_view(params: ParamStore) -> List[Tuple[str, Tuple[int, int]]]:
    """(name, index) for every scalar parameter, in store order."""
    out = []
    for name, entry in params.entries.items():
        for idx in np.ndindex(entry.value.shape):
            out.append((name, idx))
    return out

