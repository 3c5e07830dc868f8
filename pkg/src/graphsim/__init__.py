"""Continuous-variable squeezing graph states in a multimode OPO.

Graph builders and spectra, Gaussian covariance evolution, GHZ witnesses,
pump-comb graphs and quantum heterodyne multiplexing.
"""

from .comb import ModeGrid, PhaseMatchWindow, coverage_report, pump_comb_graph
from .dynamics import (
    EvolutionSpec,
    GaussianState,
    QuadratureForm,
    evolve,
    evolve_vacuum,
    limit_variance,
    squeezing_db,
    symplectic_map,
    variance,
)
from .errors import ComputationError, ConfigError, GraphsimError, InvalidArgument, InvalidPlan
from .graphs import InteractionGraph, Spectrum, allones_graph, ghz_graph, spectrum, vlb_graph
from .heterodyne import (
    DetectionPlan,
    bandwidth_gap_analysis,
    channel_frequency,
    measured_observable,
    measured_variance,
)
from .witnesses import WitnessReport, amplitude_diff_form, ghz_witness, phase_sum_form

__version__ = "0.1.0"
