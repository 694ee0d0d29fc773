"""Tapped-delay-line windowing and the train-first / evaluate-rest split."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import SymbolFrame


@dataclass(frozen=True)
class TapLineDataset:
    """Supervised examples: length-T windows of rx against the center symbol."""

    inputs: np.ndarray          # (n, T)
    target_symbols: np.ndarray  # (n,)
    target_bits: np.ndarray     # (n, m)
    T: int
    center: int
    frame_id: int
    example_indices: np.ndarray  # source-frame position of each window center

    def __post_init__(self):
        n = self.inputs.shape[0]
        if self.inputs.ndim != 2 or self.inputs.shape[1] != self.T:
            raise ValueError(f"inputs must be (n, {self.T}), got {self.inputs.shape}")
        if self.target_symbols.shape[0] != n or self.target_bits.shape[0] != n \
                or self.example_indices.shape[0] != n:
            raise ValueError("dataset arrays must share a common length")
        if self.T % 2 == 0 or self.center != (self.T - 1) // 2:
            raise ValueError("T must be odd with center = (T-1)/2")

    def __len__(self) -> int:
        return self.inputs.shape[0]


def windowize(frame: SymbolFrame, T: int) -> TapLineDataset:
    """Slide a centered odd-length window over rx_samples.

    Example k (0-based in the output) covers rx[k .. k+T-1] and is labeled by
    the symbol at the window center, k + (T-1)/2 in frame coordinates. Edge
    symbols lacking a full window are dropped, so len = N - T + 1.
    """
    T = int(T)
    if T < 1 or T % 2 == 0:
        raise ValueError(f"T must be odd and >= 1, got {T}")
    n = frame.rx_samples.shape[0]
    if n < T:
        raise ValueError(f"frame length {n} shorter than window {T}")
    center = (T - 1) // 2
    windows = np.lib.stride_tricks.sliding_window_view(frame.rx_samples, T).copy()
    centers = np.arange(center, n - center)
    return TapLineDataset(
        inputs=windows,
        target_symbols=frame.tx_symbols[centers].copy(),
        target_bits=frame.tx_bits[centers].copy(),
        T=T,
        center=center,
        frame_id=frame.frame_id,
        example_indices=centers,
    )


def split_protocol(frames: list[SymbolFrame]) -> tuple[SymbolFrame, list[SymbolFrame]]:
    """First frame trains, every later frame evaluates. Requires >= 2 frames."""
    if len(frames) < 2:
        raise ValueError(f"need at least 2 frames to split, got {len(frames)}")
    return frames[0], list(frames[1:])
