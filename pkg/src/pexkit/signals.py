"""Signal carriers and the shift / derivative stacking operators.

Three carriers cover the needs of excitation analysis:

- :class:`DiscreteSignal` -- a finite multichannel sample sequence
  (column ``t`` holds the vector sample ``w_t``),
- :class:`AnalyticSignal` -- a continuous-time signal written as a finite
  sum of ``offset + amplitude*sin(frequency*t + phase)`` terms per channel,
  closed under differentiation,
- :class:`SampledSignal` -- a multichannel sequence on a uniform time grid,
  used for simulated continuous-time trajectories.

The stacking operators :func:`multi_shift` (delayed copies, discrete time)
and :func:`multi_derivative` (derivative orders, continuous time) produce the
block signals whose windowed Gram matrices drive every excitation check in
this package.  Blocks are ordered highest shift / highest derivative first,
so the last ``dim`` rows of a stack always reproduce the original signal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "SineTerm",
    "DiscreteSignal",
    "AnalyticSignal",
    "SampledSignal",
    "shift",
    "multi_shift",
    "multi_derivative",
    "sample",
    "stack",
]


def _as_matrix(data) -> np.ndarray:
    arr = np.atleast_2d(np.asarray(data, dtype=float))
    if arr.ndim != 2:
        raise ValueError(f"signal data must be a 2-D (dim x length) array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("signal data contains non-finite entries")
    return arr


@dataclass(frozen=True)
class DiscreteSignal:
    """Finite discrete-time signal; ``data[:, t]`` is the sample at index ``t0 + t``.

    Parameters
    ----------
    data : array_like, shape (dim, length)
        Channel-by-sample matrix.  A 1-D array is promoted to a single channel.
    t0 : int
        Index of the first column (purely informational; operators act on
        column positions).
    """

    data: np.ndarray
    t0: int = 0

    def __post_init__(self):
        arr = _as_matrix(self.data)
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def length(self) -> int:
        return self.data.shape[1]

    def sup_norm(self) -> float:
        """Largest Euclidean norm over the sample columns."""
        if self.length == 0:
            return 0.0
        return float(np.linalg.norm(self.data, axis=0).max())

    def transform(self, P) -> "DiscreteSignal":
        """Apply a constant linear map to every sample."""
        P = np.atleast_2d(np.asarray(P, dtype=float))
        if P.shape[1] != self.dim:
            raise ValueError(f"map has {P.shape[1]} columns, signal has dimension {self.dim}")
        return DiscreteSignal(P @ self.data, self.t0)

    def scaled(self, factor: float) -> "DiscreteSignal":
        return DiscreteSignal(factor * self.data, self.t0)


class SineTerm(NamedTuple):
    """One closed-form term ``offset + amplitude * sin(frequency*t + phase)``."""

    amplitude: float
    frequency: float
    phase: float = 0.0
    offset: float = 0.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.offset + self.amplitude * np.sin(self.frequency * t + self.phase)

    def derivative(self) -> "SineTerm":
        # d/dt [c + a sin(w t + p)] = a w sin(w t + p + pi/2)
        return SineTerm(self.amplitude * self.frequency, self.frequency, self.phase + 0.5 * np.pi, 0.0)


@dataclass(frozen=True)
class AnalyticSignal:
    """Smooth signal given per channel as a finite sum of :class:`SineTerm`.

    The representation is closed under differentiation and all derivatives are
    bounded, so any derivative stack of an ``AnalyticSignal`` is again an
    ``AnalyticSignal`` and can be evaluated exactly on any grid.
    """

    terms: tuple

    def __post_init__(self):
        channels = []
        for channel in self.terms:
            channels.append(tuple(SineTerm(*term) for term in channel))
        if not channels:
            raise ValueError("analytic signal needs at least one channel")
        object.__setattr__(self, "terms", tuple(channels))

    @property
    def dim(self) -> int:
        return len(self.terms)

    def __call__(self, t) -> np.ndarray:
        """Evaluate at scalar or array times; returns shape (dim,) or (dim, len(t))."""
        t = np.asarray(t, dtype=float)
        out = np.zeros((self.dim,) + t.shape)
        for i, channel in enumerate(self.terms):
            for term in channel:
                out[i] += term(t)
        return out

    def derivative(self, order: int = 1) -> "AnalyticSignal":
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        channels = self.terms
        for _ in range(order):
            channels = tuple(tuple(term.derivative() for term in ch) for ch in channels)
        return AnalyticSignal(channels)

    def amplitude_bound(self, order: int = 0) -> float:
        """Per-channel bound ``sum |a| w^order (+ |offset| when order = 0)``, maximised over channels.

        Bounds ``max_t |d^order w_i(t)|`` for every channel, certifying that
        all derivatives stay bounded.
        """
        bounds = []
        for channel in self.terms:
            b = 0.0
            for term in channel:
                b += abs(term.amplitude) * abs(term.frequency) ** order
                if order == 0:
                    b += abs(term.offset)
            bounds.append(b)
        return max(bounds)

    @staticmethod
    def multisine(freqs_by_channel: Sequence[Iterable[float]], amplitude: float = 1.0,
                  phase: float = 0.0) -> "AnalyticSignal":
        """Build a plain multisine: each channel is a sum of unit-offset-free tones."""
        return AnalyticSignal(tuple(
            tuple(SineTerm(amplitude, float(w), phase) for w in freqs)
            for freqs in freqs_by_channel
        ))


@dataclass(frozen=True)
class SampledSignal:
    """Multichannel signal on the uniform grid ``t0 + k*step``, k = 0..length-1."""

    data: np.ndarray
    step: float
    t0: float = 0.0

    def __post_init__(self):
        arr = _as_matrix(self.data)
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)
        if not (self.step > 0):
            raise ValueError("grid step must be positive")

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def length(self) -> int:
        return self.data.shape[1]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.step * np.arange(self.length)

    def sup_norm(self) -> float:
        if self.length == 0:
            return 0.0
        return float(np.linalg.norm(self.data, axis=0).max())

    def transform(self, P) -> "SampledSignal":
        P = np.atleast_2d(np.asarray(P, dtype=float))
        if P.shape[1] != self.dim:
            raise ValueError(f"map has {P.shape[1]} columns, signal has dimension {self.dim}")
        return SampledSignal(P @ self.data, self.step, self.t0)

    def scaled(self, factor: float) -> "SampledSignal":
        return SampledSignal(factor * self.data, self.step, self.t0)


def shift(w: DiscreteSignal, k: int) -> DiscreteSignal:
    """Delay by ``k`` samples with zero fill: output column t is ``w_{t-k}`` (zero for t < k)."""
    if k < 0:
        raise ValueError("shift amount must be nonnegative")
    out = np.zeros_like(w.data)
    if k < w.length:
        out[:, k:] = w.data[:, : w.length - k]
    return DiscreteSignal(out, w.t0)


def multi_shift(w: DiscreteSignal, k: int) -> DiscreteSignal:
    """Stack the delayed copies ``(shift by k-1, ..., shift by 0)``, highest delay first.

    The result has dimension ``dim * k``; its last ``dim`` rows equal ``w``.
    Columns with position < k-1 contain zero fill from the delays.
    """
    if k < 1:
        raise ValueError("stack depth must be at least 1")
    blocks = [shift(w, k - 1 - j).data for j in range(k)]
    return DiscreteSignal(np.vstack(blocks), w.t0)


def multi_derivative(w: AnalyticSignal, k: int) -> AnalyticSignal:
    """Stack the derivatives ``(order k-1, ..., order 0)``, highest order first."""
    if k < 1:
        raise ValueError("stack depth must be at least 1")
    channels = []
    for order in range(k - 1, -1, -1):
        channels.extend(w.derivative(order).terms)
    return AnalyticSignal(tuple(channels))


def sample(w: AnalyticSignal, h: float, length: int, t0: float = 0.0) -> SampledSignal:
    """Evaluate ``w`` in closed form on the grid ``t0 + k*h``, k = 0..length-1."""
    if not (h > 0):
        raise ValueError("grid step must be positive")
    if length < 1:
        raise ValueError("need at least one sample")
    t = t0 + h * np.arange(length)
    return SampledSignal(w(t), h, t0)


def stack(top, bottom):
    """Row-stack two signals sharing the same time axis (e.g. state over input)."""
    if isinstance(top, DiscreteSignal) and isinstance(bottom, DiscreteSignal):
        if top.length != bottom.length:
            raise ValueError("cannot stack discrete signals of different lengths")
        return DiscreteSignal(np.vstack([top.data, bottom.data]), top.t0)
    if isinstance(top, SampledSignal) and isinstance(bottom, SampledSignal):
        if top.length != bottom.length or top.step != bottom.step:
            raise ValueError("cannot stack sampled signals on different grids")
        return SampledSignal(np.vstack([top.data, bottom.data]), top.step, top.t0)
    raise TypeError("stack expects two DiscreteSignal or two SampledSignal operands")
