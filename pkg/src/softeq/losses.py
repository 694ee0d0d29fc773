"""Training criteria: squared error, entropy-regularized squared error, BCE.

Every loss returns the batch-mean value together with exact per-example
gradients, so the network backward pass never needs autodiff. Gradients are
w.r.t. the network outputs, except bce_loss which differentiates through the
output sigmoid and reports gradients w.r.t. the pre-sigmoid activations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constellation import point_indices
from .demapper import DemapperParams, log_marginal, log_symbol_posterior

BCE_PROB_CLAMP = 1e-12


@dataclass(frozen=True)
class LossReport:
    value: float
    output_gradients: np.ndarray  # same shape as the outputs fed in
    components: dict = field(default_factory=dict)


def _as_batch(outputs, targets) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(outputs, dtype=np.float64)
    x = np.asarray(targets, dtype=np.float64)
    if y.shape != x.shape:
        raise ValueError(f"outputs shape {y.shape} != targets shape {x.shape}")
    if y.size == 0:
        raise ValueError("empty batch")
    return y, x


def mse_loss(outputs, targets) -> LossReport:
    """Mean squared error; gradient 2(y - x)/N per example."""
    y, x = _as_batch(outputs, targets)
    n = y.shape[0]
    diff = y - x
    value = float(np.mean(diff ** 2))
    return LossReport(value=value, output_gradients=2.0 * diff / n)


def msex_loss(outputs, targets, params: DemapperParams) -> LossReport:
    """Squared error minus the entropy regularizer 2 sigma^2 E[-log Q_Y(y)].

    With sigma2 == 0 the regularizer is defined as identically zero and the
    result coincides with mse_loss bit for bit. The gradient uses the closed
    form d/dy log Q_Y(y) = (E[x|y] - y)/sigma2, which collapses the per-example
    gradient to 2 (E[x|y] - x)/N.
    """
    y, x = _as_batch(outputs, targets)
    n = y.shape[0]
    diff = y - x
    mse_term = float(np.mean(diff ** 2))
    if params.sigma2 == 0.0:
        base = mse_loss(outputs, targets)
        return LossReport(
            value=base.value,
            output_gradients=base.output_gradients,
            components={"mse_term": base.value, "entropy_term": 0.0},
        )
    s2 = params.sigma2
    logq = log_marginal(params, y)
    entropy_term = 2.0 * s2 * float(np.mean(-logq))
    post = np.exp(log_symbol_posterior(params, y))
    post_mean = post @ params.constellation.points
    grad = 2.0 * (post_mean - x) / n
    return LossReport(
        value=mse_term - entropy_term,
        output_gradients=grad,
        components={"mse_term": mse_term, "entropy_term": entropy_term},
    )


def proxy_ce_loss(outputs, targets, params: DemapperParams) -> LossReport:
    """Cross-entropy of the symbol posterior at the transmitted point.

    value = mean -log Q(x_target | y) in nats; gradient per example is
    (E[x|y] - x_target) / (sigma2 N), exact through the Bayes posterior.
    """
    y, x = _as_batch(outputs, targets)
    if params.sigma2 <= 0:
        raise ValueError("proxy_ce_loss requires sigma2 > 0")
    n = y.shape[0]
    c = params.constellation
    idx = point_indices(c, x)
    logpost = log_symbol_posterior(params, y)
    value = float(np.mean(-logpost[np.arange(n), idx]))
    post_mean = np.exp(logpost) @ c.points
    grad = (post_mean - c.points[idx]) / (params.sigma2 * n)
    return LossReport(value=value, output_gradients=grad)


def bce_loss(bit_probabilities, target_bits) -> LossReport:
    """Binary cross-entropy over per-example bit-probability vectors.

    Probabilities are clamped to [1e-12, 1 - 1e-12] before the log. The
    gradient is w.r.t. the pre-sigmoid activations, (p - b)/(N m), which is
    what a network with sigmoid output units feeds its backward pass.
    """
    p = np.asarray(bit_probabilities, dtype=np.float64)
    b = np.asarray(target_bits, dtype=np.float64)
    if p.shape != b.shape:
        raise ValueError(f"probabilities shape {p.shape} != bits shape {b.shape}")
    if p.ndim != 2 or p.size == 0:
        raise ValueError(f"expected non-empty (batch, m) arrays, got shape {p.shape}")
    pc = np.clip(p, BCE_PROB_CLAMP, 1.0 - BCE_PROB_CLAMP)
    value = float(np.mean(-(b * np.log(pc) + (1.0 - b) * np.log1p(-pc))))
    grad = (p - b) / p.size
    return LossReport(value=value, output_gradients=grad)
