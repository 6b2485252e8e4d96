"""pexkit: persistency-of-excitation analysis and input design for LTI systems.

The package decides persistent excitation (PE) of discrete- and
continuous-time signals from sliding-window Gram matrices, estimates
partial-PE degrees, verifies the necessary/sufficient richness conditions
linking input stacks to excited system trajectories, synthesizes certified
rich multisine inputs, and reproduces two embedded tightness experiments as
rank-trace runs.
"""

from .signals import (AnalyticSignal, DiscreteSignal, SampledSignal, SineTerm,
                      multi_derivative, multi_shift, sample, shift, stack)
from .excitation import (DeficiencyWitness, ExcitationReport, GramWindow, RankTrace,
                         default_tolerance, derivative_deficiency, pe_check,
                         perturbation_margin, ppe_degree, rank_trace,
                         window_gram_ct, window_gram_dt)
from .lti import (Certificates, LtiSystem, certify, closed_loop_input_dt,
                  random_stable_reachable, simulate_ct, simulate_dt,
                  state_input_output_system, state_output_system)
from .conditions import (SrVerdict, TheoremCheck, UncertifiedSystemError,
                         check_necessary_ct, check_necessary_dt,
                         check_sufficient_ct, check_sufficient_dt,
                         sr_bounds_mi, sr_membership_si)
from .synthesis import (SynthesisError, SynthesisRequest, SynthesisResult,
                        multisine_discrete, synthesize_sr_input)
from .counterexamples import (NECESSITY, SUFFICIENCY, CounterexampleReport,
                              CounterexampleSpec, emit_figures, get_spec,
                              run_counterexample)

__version__ = "0.1.0"

__all__ = [
    "AnalyticSignal", "DiscreteSignal", "SampledSignal", "SineTerm",
    "shift", "multi_shift", "multi_derivative", "sample", "stack",
    "GramWindow", "ExcitationReport", "RankTrace", "DeficiencyWitness",
    "window_gram_dt", "window_gram_ct", "pe_check", "ppe_degree", "rank_trace",
    "perturbation_margin", "derivative_deficiency", "default_tolerance",
    "LtiSystem", "Certificates", "certify", "simulate_dt", "simulate_ct",
    "closed_loop_input_dt", "state_output_system", "state_input_output_system",
    "random_stable_reachable",
    "TheoremCheck", "SrVerdict", "UncertifiedSystemError",
    "check_sufficient_dt", "check_necessary_dt",
    "check_sufficient_ct", "check_necessary_ct",
    "sr_membership_si", "sr_bounds_mi",
    "SynthesisRequest", "SynthesisResult", "SynthesisError",
    "synthesize_sr_input", "multisine_discrete",
    "CounterexampleSpec", "CounterexampleReport", "SUFFICIENCY", "NECESSITY",
    "get_spec", "run_counterexample", "emit_figures",
]
