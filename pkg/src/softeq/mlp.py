"""Fully connected network with explicit forward, backward, and Adam update.

No autodiff framework: gradients are computed by hand-rolled backprop, which
keeps the arithmetic 64-bit and auditable against finite differences. Hidden
layers are rectifiers; the output layer is linear (equalizer head) or
elementwise sigmoid (per-bit-probability head).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

_MAGIC = b"SOFTEQNET1\n"

HIDDEN_ACTIVATION = "relu"
OUTPUT_ACTIVATIONS = ("linear", "sigmoid")


@dataclass
class Mlp:
    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]   # weights[l] has shape (sizes[l+1], sizes[l])
    biases: list[np.ndarray]    # biases[l] has shape (sizes[l+1],)
    output_activation: str
    hidden_activation: str = HIDDEN_ACTIVATION

    def parameter_count(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)

    def copy(self) -> "Mlp":
        return Mlp(
            layer_sizes=self.layer_sizes,
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            output_activation=self.output_activation,
            hidden_activation=self.hidden_activation,
        )


@dataclass
class Gradients:
    weights: list[np.ndarray]
    biases: list[np.ndarray]


@dataclass
class OptimizerState:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step_count: int = 0
    m_weights: list[np.ndarray] = field(default_factory=list)
    v_weights: list[np.ndarray] = field(default_factory=list)
    m_biases: list[np.ndarray] = field(default_factory=list)
    v_biases: list[np.ndarray] = field(default_factory=list)


@dataclass
class ForwardCache:
    """Activations captured by forward; consumed by backward."""

    layer_sizes: tuple[int, ...]
    inputs: np.ndarray              # (n, sizes[0])
    pre_activations: list[np.ndarray]
    activations: list[np.ndarray]   # post-nonlinearity, excluding the input
    squeeze: bool                   # True when forward received a single vector


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def init(layer_sizes, output_activation: str, seed: int) -> Mlp:
    """Glorot-uniform weights (range ±sqrt(6/(fan_in+fan_out))), zero biases."""
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) < 2:
        raise ValueError(f"need at least 2 layer sizes, got {list(layer_sizes)!r}")
    if any(s < 1 for s in sizes):
        raise ValueError(f"layer sizes must be >= 1, got {list(layer_sizes)!r}")
    if output_activation not in OUTPUT_ACTIVATIONS:
        raise ValueError(
            f"output_activation must be one of {OUTPUT_ACTIVATIONS}, got {output_activation!r}"
        )
    rng = np.random.default_rng(seed)
    weights = []
    biases = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Mlp(layer_sizes=sizes, weights=weights, biases=biases,
               output_activation=output_activation)


def forward(net: Mlp, x) -> tuple[np.ndarray, ForwardCache]:
    """Run the network on one feature vector or a (batch, features) array.

    Returns (outputs, cache); outputs keep the batch dimension iff the input
    had one. Pure: never mutates the network.
    """
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 1
    batch = x[None, :] if squeeze else x
    if batch.ndim != 2 or batch.shape[1] != net.layer_sizes[0]:
        raise ValueError(
            f"input shape {x.shape} incompatible with input size {net.layer_sizes[0]}"
        )
    pre_acts: list[np.ndarray] = []
    acts: list[np.ndarray] = []
    a = batch
    last = len(net.weights) - 1
    for l, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ w.T + b
        pre_acts.append(z)
        if l < last:
            a = np.maximum(z, 0.0)
        elif net.output_activation == "linear":
            a = z
        else:
            a = _sigmoid(z)
        acts.append(a)
    cache = ForwardCache(layer_sizes=net.layer_sizes, inputs=batch,
                         pre_activations=pre_acts, activations=acts, squeeze=squeeze)
    out = acts[-1][0] if squeeze else acts[-1]
    return out, cache


def backward(net: Mlp, cache: ForwardCache, output_gradient,
             grad_wrt_preactivation: bool = False) -> Gradients:
    """Backpropagate a loss gradient to all parameters.

    output_gradient holds dLoss/d(output) per example; already summed over the
    batch by the caller's 1/N convention, so parameter gradients come out as
    plain sums here. With grad_wrt_preactivation=True the gradient is taken as
    dLoss/d(pre-activation) of the output layer, skipping the output
    nonlinearity (the natural pairing for sigmoid outputs under BCE).
    Rectifier subgradient at exactly 0 is 0.
    """
    if cache.layer_sizes != net.layer_sizes:
        raise RuntimeError(
            f"cache built for layer sizes {cache.layer_sizes}, network has {net.layer_sizes}"
        )
    g = np.asarray(output_gradient, dtype=np.float64)
    if cache.squeeze and g.ndim == 1:
        g = g[None, :]
    if g.shape != cache.activations[-1].shape:
        raise RuntimeError(
            f"output gradient shape {g.shape} does not match outputs "
            f"{cache.activations[-1].shape}"
        )
    delta = g
    if not grad_wrt_preactivation:
        if net.output_activation == "sigmoid":
            s = cache.activations[-1]
            delta = g * s * (1.0 - s)
        # linear output: delta == g already
    grad_w = [np.empty(0)] * len(net.weights)
    grad_b = [np.empty(0)] * len(net.biases)
    for l in range(len(net.weights) - 1, -1, -1):
        below = cache.inputs if l == 0 else cache.activations[l - 1]
        grad_w[l] = delta.T @ below
        grad_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ net.weights[l]) * (cache.pre_activations[l - 1] > 0.0)
    return Gradients(weights=grad_w, biases=grad_b)


def init_optimizer(net: Mlp, learning_rate: float = 1e-3, beta1: float = 0.9,
                   beta2: float = 0.999, epsilon: float = 1e-8) -> OptimizerState:
    return OptimizerState(
        learning_rate=float(learning_rate), beta1=float(beta1), beta2=float(beta2),
        epsilon=float(epsilon), step_count=0,
        m_weights=[np.zeros_like(w) for w in net.weights],
        v_weights=[np.zeros_like(w) for w in net.weights],
        m_biases=[np.zeros_like(b) for b in net.biases],
        v_biases=[np.zeros_like(b) for b in net.biases],
    )


def step(net: Mlp, grads: Gradients, opt: OptimizerState) -> tuple[Mlp, OptimizerState]:
    """One adaptive-moment update with bias correction, in place.

    Raises FloatingPointError naming the offending layer if any gradient entry
    is non-finite.
    """
    for l, (gw, gb) in enumerate(zip(grads.weights, grads.biases)):
        if not (np.all(np.isfinite(gw)) and np.all(np.isfinite(gb))):
            raise FloatingPointError(f"non-finite gradient in layer {l}")
    opt.step_count += 1
    t = opt.step_count
    bc1 = 1.0 - opt.beta1 ** t
    bc2 = 1.0 - opt.beta2 ** t
    for params, grad_list, m_list, v_list in (
        (net.weights, grads.weights, opt.m_weights, opt.v_weights),
        (net.biases, grads.biases, opt.m_biases, opt.v_biases),
    ):
        for p, g, m, v in zip(params, grad_list, m_list, v_list):
            m *= opt.beta1
            m += (1.0 - opt.beta1) * g
            v *= opt.beta2
            v += (1.0 - opt.beta2) * g * g
            p -= opt.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + opt.epsilon)
    return net, opt


def save(net: Mlp, path, extra: dict | None = None) -> None:
    """Write a checkpoint: magic, JSON header, then raw float64 little-endian.

    The format is deliberately free of timestamps so identical networks always
    produce identical files.
    """
    header = {
        "layer_sizes": list(net.layer_sizes),
        "output_activation": net.output_activation,
        "hidden_activation": net.hidden_activation,
        "extra": extra if extra is not None else {},
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(blob)
        fh.write(b"\n")
        for w, b in zip(net.weights, net.biases):
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load(path) -> tuple[Mlp, dict]:
    """Read a checkpoint written by save; bit-identical round trip."""
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise ValueError(f"{path}: not a checkpoint file (bad magic {magic!r})")
        header = json.loads(fh.readline().decode())
        sizes = tuple(int(s) for s in header["layer_sizes"])
        weights = []
        biases = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            wb = fh.read(8 * fan_out * fan_in)
            bb = fh.read(8 * fan_out)
            if len(wb) != 8 * fan_out * fan_in or len(bb) != 8 * fan_out:
                raise ValueError(f"{path}: truncated checkpoint")
            weights.append(np.frombuffer(wb, dtype="<f8").reshape(fan_out, fan_in).copy())
            biases.append(np.frombuffer(bb, dtype="<f8").copy())
        if fh.read(1):
            raise ValueError(f"{path}: trailing bytes after parameters")
    net = Mlp(layer_sizes=sizes, weights=weights, biases=biases,
              output_activation=header["output_activation"],
              hidden_activation=header.get("hidden_activation", HIDDEN_ACTIVATION))
    return net, header.get("extra", {})
