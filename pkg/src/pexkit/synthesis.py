"""Generate-and-verify construction of certified sufficiently rich inputs.

The target is the inner (sufficient) richness set: a multisine whose required
stack -- depth ``n`` shifts for state excitation, ``n + 1`` for state-and-input,
derivative stacks in continuous time -- verifies as persistently exciting.
Tones come from a seeded low-discrepancy (golden-ratio) schedule, assigned
round-robin across input channels with unit amplitudes and zero phases; the
tone count grows from ``ceil(stack_dim / 2) + 1`` until the verification
passes or the tone budget runs out.  Every returned signal therefore carries a
certificate that re-verifies deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .excitation import ExcitationReport, default_tolerance, pe_check
from .signals import (AnalyticSignal, DiscreteSignal, multi_derivative,
                      multi_shift, sample)

__all__ = ["SynthesisRequest", "SynthesisResult", "SynthesisError",
           "synthesize_sr_input", "multisine_discrete"]

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0

#: Verification uses a gentler relative tolerance than the analysis default:
#: high-order derivative stacks are genuinely PE but with wide dynamic range,
#: so their margins sit low relative to ``T * sup_norm^2`` while remaining far
#: above round-off.
VERIFY_TOL_SCALE = 1e-9


@dataclass(frozen=True)
class SynthesisRequest:
    """What to synthesize: system dimensions, time domain, output class, budget.

    ``horizon`` is in samples (discrete) or seconds (continuous).  ``window``
    is the PE window for the certificate; ``None`` picks half the horizon.
    """

    n: int
    m: int
    domain: str = "dt"
    output_class: str = "x"
    horizon: float = 1000
    window: Optional[float] = None
    seed: int = 0
    max_tones: int = 64
    step: float = 1e-2
    freq_range: tuple = ()

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("state and input dimensions must be at least 1")
        if self.domain not in ("dt", "ct"):
            raise ValueError("domain must be 'dt' or 'ct'")
        if self.output_class not in ("x", "xu"):
            raise ValueError("output_class must be 'x' or 'xu'")
        if not self.freq_range:
            rng = (0.05, np.pi - 0.05) if self.domain == "dt" else (0.8, 2.4)
            object.__setattr__(self, "freq_range", rng)

    @property
    def stack_depth(self) -> int:
        return self.n if self.output_class == "x" else self.n + 1

    @property
    def stack_dim(self) -> int:
        return self.stack_depth * self.m


@dataclass(frozen=True)
class SynthesisResult:
    """Certified input: the signal, its tone table, and the PE certificate."""

    request: SynthesisRequest
    signal: object
    tones: tuple
    certificate: ExcitationReport
    window: float


class SynthesisError(RuntimeError):
    """Verification never succeeded within the tone budget; carries the best attempt."""

    def __init__(self, message, best: Optional[SynthesisResult] = None):
        super().__init__(message)
        self.best = best


def _tone_schedule(count: int, seed: int, lo: float, hi: float) -> np.ndarray:
    """Seeded golden-ratio sequence: deterministic, well spread, no repeats."""
    offset = (seed * GOLDEN) % 1.0
    fracs = (offset + GOLDEN * np.arange(1, count + 1)) % 1.0
    return lo + (hi - lo) * fracs


def _tones_by_channel(freqs: np.ndarray, m: int) -> tuple:
    channels: list[list[float]] = [[] for _ in range(m)]
    for j, w in enumerate(freqs):
        channels[j % m].append(float(w))
    return tuple(tuple(ch) for ch in channels)


def multisine_discrete(tones_by_channel, length: int, t0: int = 0) -> DiscreteSignal:
    """Unit-amplitude zero-phase multisine sampled at integer indices."""
    t = t0 + np.arange(length)
    data = np.zeros((len(tones_by_channel), length))
    for i, tones in enumerate(tones_by_channel):
        for w in tones:
            data[i] += np.sin(w * t)
    return DiscreteSignal(data, t0)


def _build_and_verify(req: SynthesisRequest, tones: tuple, window: float):
    depth = req.stack_depth
    if req.domain == "dt":
        length = int(req.horizon)
        u = multisine_discrete(tones, length)
        stacked = multi_shift(u, depth)
        T = int(window)
    else:
        length = int(round(req.horizon / req.step)) + 1
        u = AnalyticSignal.multisine(tones)
        stacked = sample(multi_derivative(u, depth), req.step, length)
        T = float(window)
    tol = default_tolerance(T, stacked.sup_norm(), VERIFY_TOL_SCALE)
    report = pe_check(stacked, T, tol)
    return u, report


def synthesize_sr_input(req: SynthesisRequest) -> SynthesisResult:
    """Search tone counts upward until the required stack verifies as PE.

    Returns the first certified input.  Raises :class:`SynthesisError` with
    the best (largest-margin) attempt attached if the budget is exhausted.
    The construction is a pure function of the request, so equal requests give
    byte-identical signals and certificates.
    """
    window = req.window
    if window is None:
        window = req.horizon // 2 if req.domain == "dt" else req.horizon / 2.0
    lo, hi = req.freq_range
    start = min(req.stack_dim // 2 + 1, req.max_tones)
    best: Optional[SynthesisResult] = None
    for count in range(start, req.max_tones + 1):
        freqs = _tone_schedule(count, req.seed, lo, hi)
        tones = _tones_by_channel(freqs, req.m)
        u, report = _build_and_verify(req, tones, window)
        result = SynthesisResult(request=req, signal=u, tones=tones,
                                 certificate=report, window=float(window))
        if report.is_pe:
            return result
        if best is None or report.margin > best.certificate.margin:
            best = result
    raise SynthesisError(
        f"no certified input within {req.max_tones} tones "
        f"(best margin {best.certificate.margin:.3e} vs tol {best.certificate.tol:.3e})",
        best=best,
    )
