"""Framing geometry, Hamming window, SNR and word-accuracy arithmetic."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class FramingError(ValueError):
    pass


class UndefinedSNRError(FramingError):
    pass


@dataclass(frozen=True)
class SignalSpec:
    sampling_rate: int
    length: int

    def __post_init__(self):
        if self.sampling_rate <= 0:
            raise FramingError("sampling_rate must be positive")
        if self.length < 0:
            raise FramingError("length must be non-negative")

    @classmethod
    def from_duration(cls, seconds: float, sampling_rate: int) -> "SignalSpec":
        return cls(sampling_rate, int(round(seconds * sampling_rate)))


@dataclass(frozen=True)
class FramePlan:
    length: int
    window: int
    overlap_pct: float
    hop: int
    frame_count: int

    def starts(self) -> np.ndarray:
        return np.arange(self.frame_count) * self.hop


def window_size_samples(window_len_ms: float, fs: float) -> int:
    """Window length in samples for a duration in milliseconds."""
    if not window_len_ms > 0 or not fs > 0:
        raise FramingError(f"window length and sampling rate must be positive, got {window_len_ms} ms, {fs} Hz")
    return int(math.floor(window_len_ms / 1000.0 * fs + 0.5))


def hamming(n: int) -> np.ndarray:
    """Symmetric Hamming window ``0.54 - 0.46 cos(2 pi k / (n - 1))``."""
    if n < 1:
        raise FramingError(f"window length must be at least 1, got {n}")
    if n == 1:
        return np.ones(1)
    k = np.arange(n)
    # 0.54 - 0.46 cos(.) rearranged so the endpoints come out exactly 0.08
    w = 0.08 + 0.46 * (1.0 - np.cos(2.0 * np.pi * k / (n - 1)))
    # exact mirror symmetry despite cosine rounding
    return (w + w[::-1]) / 2.0


def hop_size(window: int, overlap_pct: float) -> int:
    if window < 1:
        raise FramingError(f"window must be at least 1 sample, got {window}")
    if not 0 <= overlap_pct < 100:
        raise FramingError(f"overlap must be in [0, 100), got {overlap_pct}")
    return max(1, int(math.floor(window * (1.0 - overlap_pct / 100.0) + 0.5)))


def frame_plan(length: int, window: int, overlap_pct: float) -> FramePlan:
    """Frame layout for a signal; a trailing partial frame is dropped."""
    if length < 0:
        raise FramingError(f"length must be non-negative, got {length}")
    hop = hop_size(window, overlap_pct)
    count = (length - window) // hop + 1 if length >= window else 0
    return FramePlan(length, window, float(overlap_pct), hop, count)


def frame_size_paper(sample_length: float, window: float, overlap_pct: float) -> float:
    """Frame size as the published formula defines it.

    ``sample_length / window * overlap_pct / 100``. This does not reproduce the
    tabulated FrSz columns, which are kept as published data.
    """
    if window <= 0:
        raise FramingError(f"window must be positive, got {window}")
    return (sample_length / window) * (overlap_pct / 100.0)


def segment(signal, plan: FramePlan, window_fn) -> np.ndarray:
    """Windowed frames, shape ``(plan.frame_count, plan.window)``."""
    signal = np.asarray(signal, dtype=float)
    window_fn = np.asarray(window_fn, dtype=float)
    if window_fn.shape != (plan.window,):
        raise FramingError(f"window function has length {window_fn.size}, plan expects {plan.window}")
    if plan.frame_count == 0:
        return np.empty((0, plan.window))
    needed = (plan.frame_count - 1) * plan.hop + plan.window
    if signal.size < needed:
        raise FramingError(f"signal has {signal.size} samples, plan needs {needed}")
    idx = plan.starts()[:, None] + np.arange(plan.window)[None, :]
    return signal[idx] * window_fn


def snr_db(signal, noise, zero_signal: str = "inf") -> float:
    """``10 log10`` of the signal-to-noise power ratio.

    A silent signal gives ``-inf``, or raises when ``zero_signal="raise"``.
    """
    signal = np.asarray(signal, dtype=float)
    noise = np.asarray(noise, dtype=float)
    if signal.shape != noise.shape:
        raise FramingError(f"signal and noise lengths differ: {signal.shape} vs {noise.shape}")
    p_noise = float(np.sum(noise * noise))
    if p_noise == 0:
        raise UndefinedSNRError("noise power is zero")
    p_signal = float(np.sum(signal * signal))
    if p_signal == 0:
        if zero_signal == "raise":
            raise UndefinedSNRError("signal power is zero")
        return -math.inf
    return 10.0 * math.log10(p_signal / p_noise)


def word_accuracy(recognized: int, tested: int) -> float:
    if tested < 1:
        raise FramingError(f"number of words tested must be at least 1, got {tested}")
    if not 0 <= recognized <= tested:
        raise FramingError(f"recognized words must lie in [0, {tested}], got {recognized}")
    return 100.0 * recognized / tested
