"""Shared randomized-trial builders for the condition checkers.

Trial construction follows fixed conventions so failures replay from a seed:
systems come from ``random_stable_reachable`` (real eigenvalues in a
well-conditioned band, unit-normal B), inputs are unit-amplitude multisines
with distinct tones assigned round-robin across channels.  A "rich" arm draws
at least ``n*m`` tones (enough, generically, to excite the deepest stack in
play); a "lean" arm draws too few tones for the stack dimension, so premise
and conclusion verdicts of both implications get exercised in all four
combinations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pexkit.conditions import (check_necessary_ct, check_necessary_dt,
                               check_sufficient_ct, check_sufficient_dt)
from pexkit.lti import random_stable_reachable, steady_state_init
from pexkit.signals import AnalyticSignal, DiscreteSignal

DT_HORIZON = 400
DT_WINDOW = 80
CT_HORIZON = 30.0
CT_STEP = 1e-2
CT_WINDOW = 6.0

#: Fuzz verdicts use a gentler scale than the analysis default so that
#: genuinely excited trajectories with wide dynamic range still verify; the
#: hysteresis band around the tolerance absorbs what is left.
FUZZ_TOL_SCALE = 1e-9


def distinct_tones(rng: np.random.Generator, count: int, lo: float, hi: float) -> np.ndarray:
    tones = lo + (hi - lo) * rng.random(count)
    while len(np.unique(np.round(tones, 9))) < count:
        tones = lo + (hi - lo) * rng.random(count)
    return np.sort(tones)


def tones_by_channel(tones, m: int) -> tuple:
    channels = [[] for _ in range(m)]
    for j, w in enumerate(tones):
        channels[j % m].append(float(w))
    return tuple(tuple(ch) for ch in channels)


def dt_multisine(tones_per_channel, length: int) -> DiscreteSignal:
    t = np.arange(length, dtype=float)
    data = np.zeros((len(tones_per_channel), length))
    for i, tones in enumerate(tones_per_channel):
        for w in tones:
            data[i] += np.sin(w * t)
    return DiscreteSignal(data)


@dataclass
class TrialOutcome:
    n: int
    m: int
    output_class: str
    rich: bool
    sufficient: object
    necessary: object


def run_dt_trial(seed: int) -> TrialOutcome:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    m = int(rng.integers(1, 3))
    sys = random_stable_reachable(n, m, "dt", rng)
    output_class = str(rng.choice(["x", "xu"]))
    stack_dim = (n if output_class == "x" else n + 1) * m
    rich = bool(rng.random() < 0.6)
    count = max(n * m, stack_dim // 2 + 1) if rich else int(rng.integers(1, max(2, stack_dim // 2)))
    tones = distinct_tones(rng, count, 0.1, np.pi - 0.1)
    u = dt_multisine(tones_by_channel(tones, m), DT_HORIZON)
    x0 = rng.standard_normal(n)
    suf = check_sufficient_dt(sys, u, x0, DT_WINDOW, output_class=output_class,
                              tol_scale=FUZZ_TOL_SCALE)
    nec = check_necessary_dt(sys, u, x0, DT_WINDOW, output_class=output_class,
                             tol_scale=FUZZ_TOL_SCALE)
    return TrialOutcome(n, m, output_class, rich, suf, nec)


def run_ct_trial(seed: int) -> TrialOutcome:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    m = int(rng.integers(1, 3))
    sys = random_stable_reachable(n, m, "ct", rng)
    output_class = str(rng.choice(["x", "xu"]))
    stack_dim = (n if output_class == "x" else n + 1) * m
    rich = bool(rng.random() < 0.6)
    count = max(stack_dim // 2 + 1, n * m // 2 + 1) if rich \
        else int(rng.integers(1, max(2, stack_dim // 2)))
    tones = distinct_tones(rng, count, 0.5, 2.0)
    u = AnalyticSignal.multisine(tones_by_channel(tones, m))
    # start on the periodic steady state: every signal in the check is then
    # stationary and finite-horizon verdicts match the infinite-horizon ones
    x0 = steady_state_init(sys, u)
    suf = check_sufficient_ct(sys, u, x0, CT_WINDOW, output_class=output_class,
                              horizon=CT_HORIZON, h=CT_STEP, tol_scale=FUZZ_TOL_SCALE)
    nec = check_necessary_ct(sys, u, x0, CT_WINDOW, output_class=output_class,
                             horizon=CT_HORIZON, h=CT_STEP, tol_scale=FUZZ_TOL_SCALE)
    return TrialOutcome(n, m, output_class, rich, suf, nec)
