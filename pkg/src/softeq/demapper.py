"""Gaussian soft demapper: symbol posteriors, bit posteriors, LLRs, noise estimate.

All probability arithmetic runs in the log domain with log-sum-exp
stabilization; densities use the real-Gaussian normalization 1/sqrt(2*pi*s2).
LLRs are natural-log ratios log(P(bit=0|y) / P(bit=1|y)).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .constellation import Constellation, bit_subset

SIGMA2_FLOOR = 1e-12  # variance floor for degenerate (error-free) fits


@dataclass(frozen=True)
class DemapperParams:
    """Alphabet reference plus the noise variance of the assumed Gaussian channel.

    sigma2 == 0 is admitted only as the degenerate "regularization off" weight
    used by the entropy-regularized cost; every probability computation here
    requires sigma2 > 0.
    """

    constellation: Constellation
    sigma2: float

    def __post_init__(self):
        s2 = float(self.sigma2)
        object.__setattr__(self, "sigma2", s2)
        if not np.isfinite(s2) or s2 < 0:
            raise ValueError(f"sigma2 must be finite and >= 0, got {self.sigma2!r}")


@dataclass(frozen=True)
class SoftOutput:
    """Per-sample symbol posterior (over points) and per-bit-level LLRs."""

    symbol_posterior: np.ndarray  # (..., M), rows sum to 1
    bit_llrs: np.ndarray          # (..., m), natural log

    def bit1_posteriors(self) -> np.ndarray:
        """P(bit=1 | y) per level, consistent with the LLRs: sigmoid(-LLR)."""
        llr = self.bit_llrs
        # Branch on sign so exp() only ever sees non-positive arguments.
        out = np.empty_like(llr)
        pos = llr >= 0
        e = np.exp(-np.abs(llr))
        out[pos] = e[pos] / (1.0 + e[pos])
        out[~pos] = 1.0 / (1.0 + e[~pos])
        return out


def _require_positive_sigma2(params: DemapperParams) -> float:
    if params.sigma2 <= 0:
        raise ValueError("demapper probabilities require sigma2 > 0")
    return params.sigma2


def _logsumexp(a: np.ndarray, axis: int) -> np.ndarray:
    m = np.max(a, axis=axis, keepdims=True)
    out = m.squeeze(axis) + np.log(np.sum(np.exp(a - m), axis=axis))
    return out


def log_likelihood(params: DemapperParams, y, x) -> np.ndarray | float:
    """log of the Gaussian density of y given point x (broadcasting)."""
    s2 = _require_positive_sigma2(params)
    y = np.asarray(y, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    out = -0.5 * np.log(2.0 * np.pi * s2) - (y - x) ** 2 / (2.0 * s2)
    return out if out.ndim else float(out)


def likelihood(params: DemapperParams, y, x) -> np.ndarray | float:
    """Gaussian channel density Q(y|x) = exp(-(y-x)^2 / 2 s2) / sqrt(2 pi s2)."""
    return np.exp(log_likelihood(params, y, x))


def _log_joint(params: DemapperParams, y: np.ndarray) -> np.ndarray:
    # log [P(x) * Q(y|x)] for every point, shape (n, M)
    s2 = _require_positive_sigma2(params)
    c = params.constellation
    d = y[:, None] - c.points[None, :]
    return np.log(c.prior)[None, :] - 0.5 * np.log(2.0 * np.pi * s2) - d ** 2 / (2.0 * s2)


def log_marginal(params: DemapperParams, y) -> np.ndarray | float:
    """log of the mixture density Q_Y(y) = sum_x P(x) Q(y|x)."""
    y_arr = np.atleast_1d(np.asarray(y, dtype=np.float64))
    out = _logsumexp(_log_joint(params, y_arr), axis=1)
    return out if np.ndim(y) else float(out[0])


def marginal(params: DemapperParams, y) -> np.ndarray | float:
    """Mixture density of the received value under the Gaussian model."""
    return np.exp(log_marginal(params, y))


def log_symbol_posterior(params: DemapperParams, y) -> np.ndarray:
    """log P(x|y) over all points; shape (..., M)."""
    y_arr = np.atleast_1d(np.asarray(y, dtype=np.float64))
    lj = _log_joint(params, y_arr)
    out = lj - _logsumexp(lj, axis=1)[:, None]
    return out if np.ndim(y) else out[0]


def symbol_posterior(params: DemapperParams, y) -> np.ndarray:
    """Bayes posterior over constellation points; rows sum to 1."""
    return np.exp(log_symbol_posterior(params, y))


def bit_posteriors_and_llrs(params: DemapperParams, y) -> SoftOutput:
    """Symbol posterior and per-bit LLRs for one sample or an array of samples.

    Bit posteriors are subset sums of the symbol posterior; the LLR for level i
    is log P(bit_i = 0 | y) - log P(bit_i = 1 | y), computed fully in the log
    domain so it stays finite for any finite y.
    """
    c = params.constellation
    y_arr = np.atleast_1d(np.asarray(y, dtype=np.float64))
    logpost = log_symbol_posterior(params, y_arr)
    llrs = np.empty((y_arr.shape[0], c.m))
    for i in range(c.m):
        sub0 = bit_subset(c, i, 0)
        sub1 = bit_subset(c, i, 1)
        llrs[:, i] = _logsumexp(logpost[:, sub0], axis=1) - _logsumexp(logpost[:, sub1], axis=1)
    post = np.exp(logpost)
    if np.ndim(y):
        return SoftOutput(symbol_posterior=post, bit_llrs=llrs)
    return SoftOutput(symbol_posterior=post[0], bit_llrs=llrs[0])


def estimate_sigma2(equalized: np.ndarray, reference: np.ndarray) -> float:
    """Data-aided noise variance estimate: mean squared deviation, floored.

    Returns SIGMA2_FLOOR when the deviation is identically zero.
    """
    y = np.asarray(equalized, dtype=np.float64)
    x = np.asarray(reference, dtype=np.float64)
    if y.shape != x.shape:
        raise ValueError(f"shape mismatch: {y.shape} vs {x.shape}")
    if y.size < 2:
        raise ValueError(f"need at least 2 samples, got {y.size}")
    return max(float(np.mean((y - x) ** 2)), SIGMA2_FLOOR)


def write_llr_csv(path, llrs: np.ndarray, version: str, seed: int) -> None:
    """Dump per-sample, per-bit LLRs as CSV rows (sample_index, bit_index, llr)."""
    llrs = np.asarray(llrs, dtype=np.float64)
    with open(path, "w", newline="") as fh:
        fh.write(f"# softeq {version} seed={seed}\n")
        writer = csv.writer(fh)
        writer.writerow(["sample_index", "bit_index", "llr"])
        for k in range(llrs.shape[0]):
            for i in range(llrs.shape[1]):
                writer.writerow([k, i, repr(float(llrs[k, i]))])
