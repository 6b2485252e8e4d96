"""Two embedded experiments showing the richness conditions are tight.

Both instances share one 7-state, 3-input discrete-time plant family
(n = 7, m = 3, horizon 1000) and track how many directions their signals span
over time via cumulative-Gram rank traces.

``sufficiency``
    The input obeys a feedback recursion ``u+ = K_x x + K_u u + v`` built so
    that one fixed linear combination of state and input is identically zero:
    ``K_x``/``K_u`` are rank one with left factor spanning the annihilated
    direction, and the dither ``v`` is confined to the two directions the left
    factor kills.  The depth-7 shift stack of ``u`` still spans all 21
    directions, yet the state-input pair spans at most 9 of its 10 -- so full
    excitation of the depth-``n`` stack does not force excitation of the
    pair; only the depth-``n+1`` stack does.  Since the controllability index
    is 3, the same run refutes the stronger conjecture that excitation of the
    depth-``(index+1)`` stack would suffice.

``necessity``
    A plain 5-tone multisine fully excites the state-input pair (rank 10),
    yet its depth-8 stack spans exactly 10 of 24 directions -- the smallest
    count the necessary condition permits, showing the partial-excitation
    degree ``n + m`` cannot be raised.  The depth-4 stack (controllability
    index 3 again) spans at most those same 10 < 12 directions, hence is not
    PE, refuting the corresponding conjectured necessary condition.

Rank traces exclude a stack's zero-filled prefix columns and count singular
values of the sample block above 1e-12 of the largest: the genuine transient
directions of the sufficiency run sit around 1e-10 relative while the
noise floor stays below 1e-15, so the count is insensitive to the exact
threshold over several decades.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .conditions import check_sufficient_dt
from .excitation import (ExcitationReport, RankTrace, default_tolerance,
                         pe_check, ppe_degree, rank_trace)
from .fileio import write_json, write_rank_trace_csv
from .lti import Certificates, certify, closed_loop_input_dt, simulate_dt, state_output_system
from .signals import DiscreteSignal, multi_shift, stack

__all__ = [
    "CounterexampleSpec",
    "CounterexampleReport",
    "SUFFICIENCY",
    "NECESSITY",
    "get_spec",
    "run_counterexample",
    "emit_figures",
    "constants_digest",
]

N_STATES = 7
N_INPUTS = 3
HORIZON = 1000

#: Plant of the sufficiency instance: two companion blocks (eigenvalues
#: 0.2..0.4 and 0.5..0.7) plus a scalar mode at 0.8.
SUFFICIENCY_A = np.array([
    [0.0,   1.0,   0.0,  0.0,   0.0,   0.0,  0.0],
    [0.0,   0.0,   1.0,  0.0,   0.0,   0.0,  0.0],
    [0.024, -0.26, 0.9,  0.0,   0.0,   0.0,  0.0],
    [0.0,   0.0,   0.0,  0.0,   1.0,   0.0,  0.0],
    [0.0,   0.0,   0.0,  0.0,   0.0,   1.0,  0.0],
    [0.0,   0.0,   0.0,  0.21,  -1.07, 1.8,  0.0],
    [0.0,   0.0,   0.0,  0.0,   0.0,   0.0,  0.8],
])

#: Plant of the necessity instance: same block structure, different poles.
NECESSITY_A = np.array([
    [0.0,  1.0,  0.0, 0.0,  0.0, 0.0, 0.0],
    [0.0,  0.0,  1.0, 0.0,  0.0, 0.0, 0.0],
    [-0.3, 0.2,  0.1, 0.0,  0.0, 0.0, 0.0],
    [0.0,  0.0,  0.0, 0.0,  1.0, 0.0, 0.0],
    [0.0,  0.0,  0.0, 0.0,  0.0, 1.0, 0.0],
    [0.0,  0.0,  0.0, -0.3, 0.2, 0.1, 0.0],
    [0.0,  0.0,  0.0, 0.0,  0.0, 0.0, -0.7324],
])

#: Shared input matrix (both instances); controllability index 3.
INPUT_B = np.array([
    [0.0, 2.0, 5.0],
    [2.0, 1.0, 2.0],
    [1.0, 0.4, 0.9],
    [0.0, 7.0, 4.0],
    [0.0, 4.0, 6.0],
    [0.0, 0.0, 2.0],
    [1.0, 0.0, 1.0],
])

#: Direction annihilated by the feedback design: rows 3, 6, 7 of the state
#: (paired with input weights 2, 1, -1).  The gains below are rank one with
#: these as factors, which pins u to a fixed linear function of the state and
#: makes one direction of (x, u) identically unexcited.
ANNIHILATED_STATE_ROW = np.array([0.024, -0.26, 0.9, 0.21, -1.07, 1.8, 0.8])
ANNIHILATED_INPUT_ROW = np.array([2.0, 0.4, 3.9])
FEEDBACK_LEFT_FACTOR = np.array([-2.0, -1.0, 1.0]) / 6.0

FEEDBACK_K_X = np.outer(FEEDBACK_LEFT_FACTOR, ANNIHILATED_STATE_ROW)
FEEDBACK_K_U = np.outer(FEEDBACK_LEFT_FACTOR, ANNIHILATED_INPUT_ROW)

#: Dither directions (both orthogonal to the input weights (2, 1, -1)) and
#: the integer tone sets they carry, in radians per sample.
DITHER_DIRECTION_1 = np.array([-0.4082, 0.9082, 0.0918])
DITHER_DIRECTION_2 = np.array([0.4082, 0.0918, 0.9082])
DITHER_TONES_1 = (1, 2, 3, 4)
DITHER_TONES_2 = (5, 6, 7, 8)

#: Multisine tones per channel for the necessity instance.
NECESSITY_TONES = ((1, 2), (3, 4), (5,))

#: Time index of the first simulated sample (sin evaluated at integer t).
TIME_ORIGIN = 1


def constants_digest() -> str:
    """SHA-256 over the embedded constants; pins them against silent edits."""
    parts = [SUFFICIENCY_A, NECESSITY_A, INPUT_B, FEEDBACK_K_X, FEEDBACK_K_U,
             DITHER_DIRECTION_1, DITHER_DIRECTION_2,
             np.array(DITHER_TONES_1, float), np.array(DITHER_TONES_2, float),
             np.array([w for ch in NECESSITY_TONES for w in ch], float)]
    digest = hashlib.sha256()
    for part in parts:
        digest.update(np.ascontiguousarray(part, dtype=float).tobytes())
    return digest.hexdigest()


@dataclass(frozen=True)
class CounterexampleSpec:
    """One embedded experiment: plant, input recipe, horizon, and the fixed
    numerical conventions (rank tolerance, PE window, PE tolerance scale)."""

    name: str
    A: np.ndarray
    B: np.ndarray
    n: int
    m: int
    horizon: int
    window: int = 200
    rank_tol: float = 1e-12
    pe_tol_scale: float = 1e-12

    def pe_tol(self, signal) -> float:
        return default_tolerance(self.window, signal.sup_norm(), self.pe_tol_scale)


SUFFICIENCY = CounterexampleSpec("sufficiency", SUFFICIENCY_A, INPUT_B,
                                 N_STATES, N_INPUTS, HORIZON)
NECESSITY = CounterexampleSpec("necessity", NECESSITY_A, INPUT_B,
                               N_STATES, N_INPUTS, HORIZON)

_SPECS = {spec.name: spec for spec in (SUFFICIENCY, NECESSITY)}


def get_spec(name: str) -> CounterexampleSpec:
    try:
        return _SPECS[name]
    except KeyError:
        raise ValueError(f"unknown counterexample '{name}' "
                         f"(expected one of {sorted(_SPECS)})") from None


@dataclass(frozen=True)
class CounterexampleReport:
    """Everything one run produces: trajectories, traces, verdicts, certificates."""

    spec: CounterexampleSpec
    certificates: Certificates
    input_signal: DiscreteSignal
    state_signal: DiscreteSignal
    traces: dict
    pe_reports: dict
    ppe_report: Optional[ExcitationReport]
    runtime_seconds: float

    @property
    def terminal_ranks(self) -> dict:
        return {label: trace.terminal for label, trace in self.traces.items()}

    def summary(self) -> dict:
        """JSON-ready summary: terminal ranks, verdicts, certificates.

        Deterministic for a given spec (wall-clock time stays off the record).
        """
        payload = {
            "id": self.spec.name,
            "n": self.spec.n,
            "m": self.spec.m,
            "horizon": self.spec.horizon,
            "window": self.spec.window,
            "rank_tol": self.spec.rank_tol,
            "pe_tol_scale": self.spec.pe_tol_scale,
            "certificates": {
                "is_stable": self.certificates.is_stable,
                "is_reachable": self.certificates.is_reachable,
                "controllability_index": self.certificates.controllability_index,
            },
            "terminal_ranks": {k: int(v) for k, v in self.terminal_ranks.items()},
            "pe_verdicts": {k: bool(r.is_pe) for k, r in self.pe_reports.items()},
            "pe_margins": {k: float(r.margin) for k, r in self.pe_reports.items()},
            "runtime_seconds": round(self.runtime_seconds, 3),
        }
        if self.ppe_report is not None:
            payload["input_stack_ppe_degree"] = int(self.ppe_report.ppe_degree)
        return payload


def _sufficiency_drive(horizon: int) -> DiscreteSignal:
    t = TIME_ORIGIN + np.arange(horizon, dtype=float)
    tone_sum_1 = sum(np.sin(k * t) for k in DITHER_TONES_1)
    tone_sum_2 = sum(np.sin(k * t) for k in DITHER_TONES_2)
    data = np.outer(DITHER_DIRECTION_1, tone_sum_1) + np.outer(DITHER_DIRECTION_2, tone_sum_2)
    return DiscreteSignal(data, t0=TIME_ORIGIN)


def _necessity_input(horizon: int) -> DiscreteSignal:
    t = TIME_ORIGIN + np.arange(horizon, dtype=float)
    data = np.vstack([sum(np.sin(w * t) for w in tones) for tones in NECESSITY_TONES])
    return DiscreteSignal(data, t0=TIME_ORIGIN)


def run_counterexample(spec) -> CounterexampleReport:
    """Run one embedded experiment and collect rank traces plus PE verdicts.

    Accepts a :class:`CounterexampleSpec` or its name.  Deterministic: equal
    specs produce identical reports.
    """
    if isinstance(spec, str):
        spec = get_spec(spec)
    started = time.perf_counter()
    sys = state_output_system(spec.A, spec.B, "dt")
    cert = certify(sys)
    nu = cert.controllability_index
    x0 = np.zeros(spec.n)

    if spec.name == "sufficiency":
        v = _sufficiency_drive(spec.horizon)
        u, x = closed_loop_input_dt(sys, FEEDBACK_K_X, FEEDBACK_K_U, v,
                                    u0=np.zeros(spec.m), x0=x0)
    else:
        u = _necessity_input(spec.horizon)
        x, _ = simulate_dt(sys, u, x0)

    xu = stack(x, u)
    stack_n = multi_shift(u, spec.n)
    stack_n1 = multi_shift(u, spec.n + 1)
    stack_nu1 = multi_shift(u, nu + 1)

    traces = {"r1_xu": rank_trace(xu, spec.rank_tol)}
    pe_reports = {
        "xu": pe_check(xu, spec.window, spec.pe_tol(xu)),
        "stack_nu_plus_1": pe_check(stack_nu1, spec.window, spec.pe_tol(stack_nu1)),
    }
    ppe_report = None
    if spec.name == "sufficiency":
        traces["rn_u"] = rank_trace(stack_n, spec.rank_tol, start=spec.n - 1)
        traces["rank_nu_plus_1"] = rank_trace(stack_nu1, spec.rank_tol, start=nu)
        pe_reports["stack_n"] = pe_check(stack_n, spec.window, spec.pe_tol(stack_n))
        pe_reports["stack_n_plus_1"] = pe_check(stack_n1, spec.window, spec.pe_tol(stack_n1))
    else:
        traces["rnp1_u"] = rank_trace(stack_n1, spec.rank_tol, start=spec.n)
        traces["rank_nu_plus_1"] = rank_trace(stack_nu1, spec.rank_tol, start=nu)
        ppe_report = ppe_degree(stack_n1, spec.window, spec.pe_tol(stack_n1))

    return CounterexampleReport(
        spec=spec,
        certificates=cert,
        input_signal=u,
        state_signal=x,
        traces=traces,
        pe_reports=pe_reports,
        ppe_report=ppe_report,
        runtime_seconds=time.perf_counter() - started,
    )


#: Trace labels that become figure CSV files, per experiment.
_FIGURE_TRACES = {
    "sufficiency": ("r1_xu", "rn_u"),
    "necessity": ("r1_xu", "rnp1_u"),
}


def emit_figures(report: CounterexampleReport, out_dir) -> list:
    """Write one ``(T, rank)`` CSV per headline trace plus ``summary.json``.

    Returns the written paths.  Output bytes are a pure function of the spec,
    so repeated runs produce identical files.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for label in _FIGURE_TRACES[report.spec.name]:
        path = os.path.join(out_dir, f"{label}.csv")
        write_rank_trace_csv(path, report.traces[label])
        written.append(path)
    summary_path = os.path.join(out_dir, "summary.json")
    write_json(summary_path, report.summary())
    written.append(summary_path)
    return written
