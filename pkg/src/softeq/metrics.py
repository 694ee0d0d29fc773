"""Evaluation quantities: BER, symbol-wise rate, bitwise rate, scatter stats.

Cross-entropies accumulate in nats; division by ln 2 happens here and only
here. Rates are clipped at zero, matching their role as achievable-rate lower
bounds rather than signed divergences.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .constellation import Constellation, point_indices

LN2 = float(np.log(2.0))
POSTERIOR_CLAMP = 1e-12


@dataclass(frozen=True)
class ScatterStats:
    """Conditional statistics of equalized outputs, grouped by sent point."""

    point: np.ndarray  # (M,) constellation amplitudes
    mean: np.ndarray   # (M,) conditional means; nan where count == 0
    var: np.ndarray    # (M,) conditional variances (population); nan where empty
    count: np.ndarray  # (M,) group sizes


@dataclass(frozen=True)
class EvalReport:
    """One evaluation frame's scores.

    Joint per-bit networks expose no equalized amplitude, so for them the
    fields tied to an equalized signal (air_symbolwise, ce_nats, sigma2_used,
    scatter) hold None and only ber/gmi_bitwise are populated.
    """

    ber: float
    gmi_bitwise: float
    n_symbols: int
    n_bits: int
    air_symbolwise: float | None = None
    ce_nats: float | None = None
    sigma2_used: float | None = None
    scatter: ScatterStats | None = None
    frame_id: int | None = None

    def __post_init__(self):
        if not (0.0 <= self.ber <= 1.0):
            raise ValueError(f"ber out of range: {self.ber}")
        if self.gmi_bitwise < 0 or (self.air_symbolwise is not None and self.air_symbolwise < 0):
            raise ValueError("rates must be non-negative")
        if self.n_symbols < 1 or self.n_bits < 1:
            raise ValueError("counts must be >= 1")


def ber(llrs, target_bits) -> float:
    """Hard-decision bit error rate from LLRs.

    Decision is bit 0 iff LLR > 0. Exact zeros are broken by alternation in
    row-major order (first tie counts as an error, second as correct, ...),
    which realizes the half-error convention without randomness.
    """
    llr = np.asarray(llrs, dtype=np.float64)
    bits = np.asarray(target_bits)
    if llr.shape != bits.shape:
        raise ValueError(f"llrs shape {llr.shape} != bits shape {bits.shape}")
    if llr.size == 0:
        raise ValueError("empty input")
    decided = np.where(llr.ravel() > 0, 0, 1)
    truth = bits.ravel()
    errors = decided != truth
    ties = np.flatnonzero(llr.ravel() == 0.0)
    if ties.size:
        errors[ties] = (np.arange(ties.size) % 2) == 0
    return float(np.mean(errors))


def air_symbolwise(ce_nats: float, hx_bits: float) -> float:
    """Achievable rate [H(X) - CE]^+ in bits/symbol; CE supplied in nats."""
    if ce_nats < 0:
        raise ValueError(f"cross-entropy must be >= 0, got {ce_nats}")
    return max(0.0, hx_bits - ce_nats / LN2)


def gmi_bitwise(bit1_posteriors, target_bits, bit1_priors) -> float:
    """Bit-metric rate: [sum over levels of (H(B_i) - bitwise CE)]^+ in bits.

    bit1_posteriors[k, i] is the demapper's probability that bit i of symbol k
    equals 1; posteriors of the transmitted bits are clamped at 1e-12 before
    the log. bit1_priors gives P(B_i = 1) per level for the H(B_i) term.
    """
    p1 = np.asarray(bit1_posteriors, dtype=np.float64)
    bits = np.asarray(target_bits)
    if p1.shape != bits.shape or p1.ndim != 2:
        raise ValueError(f"posteriors shape {p1.shape} incompatible with bits {bits.shape}")
    prior1 = np.asarray(bit1_priors, dtype=np.float64)
    if prior1.shape != (p1.shape[1],):
        raise ValueError(f"need one prior per bit level, got shape {prior1.shape}")
    q_true = np.where(bits == 1, p1, 1.0 - p1)
    q_true = np.clip(q_true, POSTERIOR_CLAMP, 1.0)
    ce_bits = np.mean(-np.log2(q_true), axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(prior1 * np.log2(prior1) + (1.0 - prior1) * np.log2(1.0 - prior1))
    h = np.where((prior1 == 0.0) | (prior1 == 1.0), 0.0, h)
    return max(0.0, float(np.sum(h - ce_bits)))


def scatter_stats(equalized, reference, c: Constellation) -> ScatterStats:
    """Group equalized outputs by transmitted point; mean/var/count per point."""
    y = np.asarray(equalized, dtype=np.float64)
    x = np.asarray(reference, dtype=np.float64)
    if y.shape != x.shape or y.ndim != 1:
        raise ValueError(f"need matching 1-D arrays, got {y.shape} and {x.shape}")
    idx = point_indices(c, x)
    mean = np.full(c.size, np.nan)
    var = np.full(c.size, np.nan)
    count = np.zeros(c.size, dtype=np.int64)
    for j in range(c.size):
        group = y[idx == j]
        count[j] = group.size
        if group.size:
            mean[j] = float(np.mean(group))
            var[j] = float(np.var(group))
    return ScatterStats(point=c.points.copy(), mean=mean, var=var, count=count)


# Serialization -------------------------------------------------------------

EVAL_CSV_FIELDS = ("frame_id", "n_symbols", "n_bits", "ber", "air_symbolwise",
                   "gmi_bitwise", "ce_nats", "sigma2_used")


def _fmt(v) -> str:
    if v is None:
        return "na"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def eval_report_kv_text(report: EvalReport) -> str:
    """Flat key=value lines, one metric per line, stable ordering."""
    lines = [f"{k}={_fmt(getattr(report, k))}" for k in EVAL_CSV_FIELDS]
    return "\n".join(lines) + "\n"


def eval_report_csv_row(report: EvalReport) -> list[str]:
    return [_fmt(getattr(report, k)) for k in EVAL_CSV_FIELDS]


def write_scatter_csv(path, reference, equalized, version: str, seed: int) -> None:
    """Dump (tx_point, y) pairs for outside plotting tools."""
    x = np.asarray(reference, dtype=np.float64)
    y = np.asarray(equalized, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    with open(path, "w", newline="") as fh:
        fh.write(f"# softeq {version} seed={seed}\n")
        writer = csv.writer(fh)
        writer.writerow(["tx_point", "y"])
        for xv, yv in zip(x, y):
            writer.writerow([repr(float(xv)), repr(float(yv))])
