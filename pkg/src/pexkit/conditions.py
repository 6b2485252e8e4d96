"""Executable richness conditions for stable, reachable LTI systems.

For a discrete-time system with state dimension ``n`` and input dimension
``m``, persistent excitation of the state is implied by PE of the depth-``n``
shift stack of the input, and it forces that stack to be partially
persistently exciting of degree ``n``; the state-and-input output works the
same with depth ``n + 1`` and degree ``n + m``.  Continuous time mirrors this
with derivative stacks in place of shift stacks.  The checkers here evaluate
both sides of each implication on a finite horizon and flag a
``theorem_violation`` when the premise verifies but the conclusion fails --
which, the implications being proved facts, indicates a numerical artifact or
an implementation bug, never new mathematics.  Verdicts whose margins sit
within a factor 10 of the tolerance are additionally flagged ``marginal``:
persistent excitation is an open-cone property, so near-threshold verdicts
carry no certificate either way.

Single-input systems admit a complete input characterization (the stack must
itself be PE), exposed by :func:`sr_membership_si`; multi-input systems only
admit inner/outer bounds, exposed by :func:`sr_bounds_mi`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .excitation import (DEFAULT_TOL_SCALE, ExcitationReport, default_tolerance,
                         pe_check, ppe_degree)
from .lti import Certificates, LtiSystem, certify, simulate_ct, simulate_dt
from .signals import (AnalyticSignal, DiscreteSignal, SampledSignal,
                      multi_derivative, multi_shift, sample, stack)

__all__ = [
    "TheoremCheck",
    "SrVerdict",
    "UncertifiedSystemError",
    "check_sufficient_dt",
    "check_necessary_dt",
    "check_sufficient_ct",
    "check_necessary_ct",
    "sr_membership_si",
    "sr_bounds_mi",
]

#: Width of the hysteresis band around the tolerance: margins within a factor
#: of 10 of ``tol`` are treated as numerically marginal, not as evidence.
HYSTERESIS = 10.0


class UncertifiedSystemError(ValueError):
    """Raised when a richness check is asked about a system that fails its
    stability or reachability certificate."""


@dataclass(frozen=True)
class TheoremCheck:
    """Premise/conclusion evaluation of one richness implication.

    ``violation`` is ``premise_holds and not conclusion_holds``.  ``marginal``
    reports whether either side's margin falls inside the hysteresis band
    ``(tol/10, 10*tol)``; violations inside the band are numerically
    uncertified and should not be treated as failures.
    """

    condition: str
    output_class: str
    domain: str
    premise_holds: bool
    conclusion_holds: bool
    violation: bool
    marginal: bool
    premise: ExcitationReport
    conclusion: ExcitationReport
    required_degree: Optional[int] = None

    @property
    def certified_violation(self) -> bool:
        return self.violation and not self.marginal


@dataclass(frozen=True)
class SrVerdict:
    """Membership verdict for the set of sufficiently rich inputs.

    ``certified_sr`` means the sufficient condition verified; under
    ``certified_not_sr`` the necessary condition is falsified; multi-input
    classes may also return ``undetermined`` (the two bounds do not meet).
    """

    classification: str
    domain: str
    output_class: str
    single_input: bool
    stack_report: ExcitationReport

    CERTIFIED_SR = "certified_SR"
    CERTIFIED_NOT_SR = "certified_not_SR"
    UNDETERMINED = "undetermined"


def _require_certified(sys: LtiSystem) -> Certificates:
    cert = certify(sys)
    if not cert.is_stable:
        raise UncertifiedSystemError("certificate failed: stability")
    if not cert.is_reachable:
        raise UncertifiedSystemError("certificate failed: reachability")
    return cert


def _marginal(report: ExcitationReport) -> bool:
    return report.tol / HYSTERESIS < report.margin < report.tol * HYSTERESIS


def _tol(signal, T, tol, tol_scale) -> float:
    if tol is not None:
        return tol
    return default_tolerance(float(T), signal.sup_norm(),
                             DEFAULT_TOL_SCALE if tol_scale is None else tol_scale)


def _check(condition, output_class, domain, premise, conclusion, conclusion_holds,
           required_degree=None) -> TheoremCheck:
    premise_holds = premise.is_pe
    return TheoremCheck(
        condition=condition,
        output_class=output_class,
        domain=domain,
        premise_holds=premise_holds,
        conclusion_holds=conclusion_holds,
        violation=bool(premise_holds and not conclusion_holds),
        marginal=_marginal(premise) or _marginal(conclusion),
        premise=premise,
        conclusion=conclusion,
        required_degree=required_degree,
    )


def _dt_signals(sys, u, x0, output_class):
    if output_class not in ("x", "xu"):
        raise ValueError("output_class must be 'x' (state) or 'xu' (state and input)")
    x, _ = simulate_dt(sys, u, x0)
    if output_class == "x":
        return multi_shift(u, sys.n), x
    return multi_shift(u, sys.n + 1), stack(x, u)


def check_sufficient_dt(sys: LtiSystem, u: DiscreteSignal, x0, T: int,
                        tol: Optional[float] = None, output_class: str = "x",
                        tol_scale: Optional[float] = None) -> TheoremCheck:
    """Sufficiency: PE of the input shift stack forces PE of the regressor.

    Premise: depth-``n`` stack of ``u`` is PE (depth ``n + 1`` for the
    state-and-input class).  Conclusion: the simulated state (or state-input
    pair) is PE.  The system must certify stable and reachable.

    ``tol`` fixes one absolute threshold for both sides; otherwise each side
    gets its own scale-aware tolerance ``tol_scale * T * sup_norm**2`` (the
    package default scale when ``tol_scale`` is ``None``).
    """
    _require_certified(sys)
    stacked, out = _dt_signals(sys, u, x0, output_class)
    premise = pe_check(stacked, T, _tol(stacked, T, tol, tol_scale))
    conclusion = pe_check(out, T, _tol(out, T, tol, tol_scale))
    return _check("sufficient", output_class, "dt", premise, conclusion, conclusion.is_pe)


def check_necessary_dt(sys: LtiSystem, u: DiscreteSignal, x0, T: int,
                       tol: Optional[float] = None, output_class: str = "x",
                       tol_scale: Optional[float] = None) -> TheoremCheck:
    """Necessity: PE of the regressor forces partial PE of the input stack.

    Premise: the simulated state (or state-input pair) is PE.  Conclusion: the
    depth-``n`` stack of ``u`` has partial-PE degree at least ``n`` (depth
    ``n + 1`` and degree ``n + m`` for the state-and-input class).
    """
    _require_certified(sys)
    stacked, out = _dt_signals(sys, u, x0, output_class)
    required = sys.n if output_class == "x" else sys.n + sys.m
    premise = pe_check(out, T, _tol(out, T, tol, tol_scale))
    conclusion = ppe_degree(stacked, T, _tol(stacked, T, tol, tol_scale))
    holds = conclusion.ppe_degree is not None and conclusion.ppe_degree >= required
    return _check("necessary", output_class, "dt", premise, conclusion, holds,
                  required_degree=required)


def _ct_signals(sys, u, x0, horizon, h, output_class):
    if output_class not in ("x", "xu"):
        raise ValueError("output_class must be 'x' (state) or 'xu' (state and input)")
    x, _ = simulate_ct(sys, u, x0, horizon, h)
    depth = sys.n if output_class == "x" else sys.n + 1
    stacked = sample(multi_derivative(u, depth), h, x.length, x.t0)
    if output_class == "x":
        return stacked, x
    return stacked, stack(x, sample(u, h, x.length, x.t0))


def check_sufficient_ct(sys: LtiSystem, u: AnalyticSignal, x0, T: float,
                        tol: Optional[float] = None, output_class: str = "x",
                        horizon: float = 30.0, h: float = 1e-2,
                        tol_scale: Optional[float] = None) -> TheoremCheck:
    """Continuous-time sufficiency; derivative stacks replace shift stacks.

    The premise stack uses exact closed-form derivatives of ``u`` evaluated on
    the simulation grid; Gram matrices are trapezoid-rule integrals.
    """
    _require_certified(sys)
    stacked, out = _ct_signals(sys, u, x0, horizon, h, output_class)
    premise = pe_check(stacked, T, _tol(stacked, T, tol, tol_scale))
    conclusion = pe_check(out, T, _tol(out, T, tol, tol_scale))
    return _check("sufficient", output_class, "ct", premise, conclusion, conclusion.is_pe)


def check_necessary_ct(sys: LtiSystem, u: AnalyticSignal, x0, T: float,
                       tol: Optional[float] = None, output_class: str = "x",
                       horizon: float = 30.0, h: float = 1e-2,
                       tol_scale: Optional[float] = None) -> TheoremCheck:
    """Continuous-time necessity; see :func:`check_necessary_dt`."""
    _require_certified(sys)
    stacked, out = _ct_signals(sys, u, x0, horizon, h, output_class)
    required = sys.n if output_class == "x" else sys.n + sys.m
    premise = pe_check(out, T, _tol(out, T, tol, tol_scale))
    conclusion = ppe_degree(stacked, T, _tol(stacked, T, tol, tol_scale))
    holds = conclusion.ppe_degree is not None and conclusion.ppe_degree >= required
    return _check("necessary", output_class, "ct", premise, conclusion, holds,
                  required_degree=required)


def sr_membership_si(u, n: int, T, tol: Optional[float] = None,
                     horizon: float = 30.0, h: float = 1e-2) -> SrVerdict:
    """Complete richness test for single-input systems of state dimension ``n``.

    A scalar input excites the state of *every* stable reachable single-input
    system of dimension ``n`` exactly when its depth-``n`` stack (shifts in
    discrete time, derivatives in continuous time) is PE, so the verdict is
    never ``undetermined``.  Pass a :class:`DiscreteSignal` for discrete time
    or an :class:`AnalyticSignal` (with grid parameters) for continuous time.
    """
    if isinstance(u, DiscreteSignal):
        if u.dim != 1:
            raise ValueError("single-input membership needs a scalar signal")
        report = pe_check(multi_shift(u, n), T, tol)
        domain = "dt"
    elif isinstance(u, AnalyticSignal):
        if u.dim != 1:
            raise ValueError("single-input membership needs a scalar signal")
        length = int(round(horizon / h)) + 1
        report = pe_check(sample(multi_derivative(u, n), h, length), T, tol)
        domain = "ct"
    else:
        raise TypeError("expected a DiscreteSignal or AnalyticSignal input")
    verdict = SrVerdict.CERTIFIED_SR if report.is_pe else SrVerdict.CERTIFIED_NOT_SR
    return SrVerdict(classification=verdict, domain=domain, output_class="x",
                     single_input=True, stack_report=report)


def sr_bounds_mi(u, n: int, T, tol: Optional[float] = None,
                 horizon: float = 30.0, h: float = 1e-2) -> SrVerdict:
    """Inner/outer richness bounds for multi-input systems of state dimension ``n``.

    Inner (sufficient) set: the depth-``n`` stack of ``u`` is PE in all
    ``n*m`` directions -- certifies richness for every stable reachable system
    of matching dimensions.  Outer (necessary) set: that stack is partially PE
    of degree at least ``n`` -- failing it certifies non-richness.  Between
    the two bounds the verdict is ``undetermined``; no complete multi-input
    characterization is available.
    """
    if isinstance(u, DiscreteSignal):
        if u.dim < 2:
            raise ValueError("multi-input bounds need an input with at least 2 channels")
        report = ppe_degree(multi_shift(u, n), T, tol)
        domain = "dt"
    elif isinstance(u, AnalyticSignal):
        if u.dim < 2:
            raise ValueError("multi-input bounds need an input with at least 2 channels")
        length = int(round(horizon / h)) + 1
        report = ppe_degree(sample(multi_derivative(u, n), h, length), T, tol)
        domain = "ct"
    else:
        raise TypeError("expected a DiscreteSignal or AnalyticSignal input")
    if report.is_pe:
        verdict = SrVerdict.CERTIFIED_SR
    elif report.ppe_degree is not None and report.ppe_degree < n:
        verdict = SrVerdict.CERTIFIED_NOT_SR
    else:
        verdict = SrVerdict.UNDETERMINED
    return SrVerdict(classification=verdict, domain=domain, output_class="x",
                     single_input=False, stack_report=report)
