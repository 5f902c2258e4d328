"""Determinant dimension-witness test for qubit devices.

Build the 5x5 outcome-probability matrix F of the two-setting phase-gate
circuit; its determinant is identically zero for any true two-level system,
robustly to parameter-independent noise, and becomes resolvably nonzero
when the device leaks in a settings-dependent way.  The package simulates
the full shot-level protocol, analyzes recorded counts with two independent
error schemes, and searches angle settings for statistical sensitivity.
"""

__version__ = "0.1.0"

from . import kernels
from .core import (BlochVector, DensityState, MeasEffect, UnitaryGate,
                   bloch_vector, born_probability, make_s, make_s_theta,
                   make_z, measurement_effect, prepare, viviani_point)
from .io import (CountsDocument, DocumentError, ReportDocument, build_report,
                 load_counts, load_counts_table, load_plan, load_report,
                 render_report, save_counts, save_plan, save_report,
                 verdict_for)
from .montecarlo import (DriftSpec, ExperimentPlan, JobCounts, NoiseSpec,
                         apply_drift, binomial_sample, cell_probabilities,
                         empirical_F, simulate_counts)
from .noise import (KrausChannel, LeakageModel, ReadoutConfusion,
                    amplitude_damping, apply_channel, apply_readout,
                    constant_leakage, depolarizing, leaky_gate,
                    leaky_prob_matrix, phase_damping)
from .optimizer import SensitivityReport, optimize_angles, sensitivity
from .witness import (AngleConfig, ProbMatrix, WitnessResult, adjugate,
                      analyze_per_job, analyze_pooled, default_angles,
                      determinant, ideal_prob_matrix, witness_sigma)

__all__ = [
    "__version__",
    "kernels",
    "AngleConfig", "BlochVector", "CountsDocument", "DensityState",
    "DocumentError", "DriftSpec", "ExperimentPlan", "JobCounts",
    "KrausChannel", "LeakageModel", "MeasEffect", "NoiseSpec", "ProbMatrix",
    "ReadoutConfusion", "ReportDocument", "SensitivityReport", "UnitaryGate",
    "WitnessResult",
    "adjugate", "amplitude_damping", "analyze_per_job", "analyze_pooled",
    "apply_channel", "apply_drift", "apply_readout", "binomial_sample",
    "bloch_vector", "born_probability", "build_report", "cell_probabilities",
    "constant_leakage", "default_angles", "depolarizing", "determinant",
    "empirical_F", "ideal_prob_matrix", "leaky_gate", "leaky_prob_matrix",
    "load_counts", "load_counts_table", "load_plan", "load_report",
    "make_s", "make_s_theta", "make_z", "measurement_effect",
    "optimize_angles", "phase_damping", "prepare", "render_report",
    "save_counts", "save_plan", "save_report", "sensitivity",
    "simulate_counts", "verdict_for", "viviani_point", "witness_sigma",
]
