"""Real-valued ASK constellations with Gray bit labels and symbol priors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Constellation:
    """An amplitude alphabet with per-point bit labels and prior probabilities.

    points : (M,) float64, strictly increasing, unit average power under `prior`
    labels : (M, m) uint8, one bit row per point, bit 0 is the leftmost (MSB)
    prior  : (M,) float64, strictly positive, sums to one
    m      : bits per symbol, M = 2**m
    """

    points: np.ndarray
    labels: np.ndarray
    prior: np.ndarray
    m: int

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.uint8)
        prior = np.asarray(self.prior, dtype=np.float64)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "prior", prior)

        if self.m < 1:
            raise ValueError(f"bits per symbol must be >= 1, got {self.m}")
        size = 2 ** self.m
        if points.shape != (size,):
            raise ValueError(f"expected {size} points, got shape {points.shape}")
        if labels.shape != (size, self.m):
            raise ValueError(f"labels must have shape ({size}, {self.m}), got {labels.shape}")
        if prior.shape != (size,):
            raise ValueError(f"prior must have shape ({size},), got {prior.shape}")
        if not np.all(np.diff(points) > 0):
            raise ValueError("points must be strictly increasing")
        if np.any((labels != 0) & (labels != 1)):
            raise ValueError("labels must contain only bits 0 and 1")
        if len({tuple(row) for row in labels}) != size:
            raise ValueError("labels must be distinct")
        if np.any(prior <= 0):
            raise ValueError("prior entries must be positive")
        if abs(prior.sum() - 1.0) > 1e-12:
            raise ValueError(f"prior must sum to 1, got {prior.sum()!r}")
        power = float(np.dot(prior, points ** 2))
        if abs(power - 1.0) > 1e-9:
            raise ValueError(f"average power must be 1 after normalization, got {power!r}")

        for arr in (points, labels, prior):
            arr.flags.writeable = False

    @property
    def size(self) -> int:
        return 2 ** self.m

    def label_ints(self) -> np.ndarray:
        """Labels packed MSB-first into integers, shape (M,)."""
        weights = 1 << np.arange(self.m - 1, -1, -1)
        return (self.labels.astype(np.int64) * weights).sum(axis=1)


def _gray_labels(m: int) -> np.ndarray:
    # Binary-reflected Gray code assigned in descending index order, so the
    # largest amplitude carries the all-zero label and BPSK maps +1 -> bit 0.
    size = 2 ** m
    codes = np.arange(size - 1, -1, -1)
    gray = codes ^ (codes >> 1)
    bits = (gray[:, None] >> np.arange(m - 1, -1, -1)) & 1
    return bits.astype(np.uint8)


def make_ask(m: int) -> Constellation:
    """Equally spaced 2**m-point ASK alphabet, unit power, Gray labels, uniform prior.

    Levels before normalization are the odd integers -(2**m - 1) ... (2**m - 1).
    """
    if not isinstance(m, (int, np.integer)) or isinstance(m, bool):
        raise ValueError(f"bits per symbol must be an integer, got {m!r}")
    if not 1 <= m <= 6:
        raise ValueError(f"bits per symbol must be in [1, 6], got {m}")
    size = 2 ** m
    levels = np.arange(-(size - 1), size, 2, dtype=np.float64)
    points = levels / np.sqrt(np.mean(levels ** 2))
    prior = np.full(size, 1.0 / size)
    return Constellation(points=points, labels=_gray_labels(m), prior=prior, m=m)


def bit_subset(c: Constellation, i: int, b: int) -> np.ndarray:
    """Indices of the points whose label bit `i` equals `b`."""
    if not 0 <= i < c.m:
        raise ValueError(f"bit index must be in [0, {c.m}), got {i}")
    if b not in (0, 1):
        raise ValueError(f"bit value must be 0 or 1, got {b}")
    return np.flatnonzero(c.labels[:, i] == b)


def entropy(c: Constellation) -> float:
    """Source entropy H(X) in bits."""
    return float(-np.dot(c.prior, np.log2(c.prior)))


def bit_prior(c: Constellation, i: int) -> float:
    """Marginal probability that label bit `i` equals 1."""
    return float(c.prior[bit_subset(c, i, 1)].sum())


def point_indices(c: Constellation, symbols: np.ndarray) -> np.ndarray:
    """Map amplitudes to the index of the nearest constellation point."""
    symbols = np.atleast_1d(np.asarray(symbols, dtype=np.float64))
    return np.abs(symbols[:, None] - c.points[None, :]).argmin(axis=1)
