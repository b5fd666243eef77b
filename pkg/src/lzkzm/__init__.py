"""Landau-Zener sweeps of a driven qubit and their Kibble-Zurek mapping."""

__version__ = "0.1.0"

from .state import BlochVector, DensityMatrix2, InvalidStateError, PureState2, bloch_from_density, density_from_bloch, purity
from .lz import ChirpProtocol, LZParams, Prep, ProtocolError, Scheme, eigen_frame, lz_probability, mhz_to_rad_ns, p_plus
from .lindblad import NO_DECOHERENCE, Q1, Q2, DecoherenceParams, IntegrationError, Trajectory, final_p_plus, final_states, integrate
from .aia import AIAConfig, Region, classify, fit_alpha, freeze_out_time
from .ising import IsingQuenchSpec, RangePolicy, ScalingPoint, defect_density, scaling_scan
from .ed import SpinChainSpec, kink_density, mode_sum_prediction, quench_evolve
from .fit import ScalingFit, linear_fit, theory_slope

__all__ = [
    "BlochVector", "DensityMatrix2", "InvalidStateError", "PureState2",
    "bloch_from_density", "density_from_bloch", "purity",
    "ChirpProtocol", "LZParams", "Prep", "ProtocolError", "Scheme",
    "eigen_frame", "lz_probability", "mhz_to_rad_ns", "p_plus",
    "NO_DECOHERENCE", "Q1", "Q2", "DecoherenceParams", "IntegrationError", "Trajectory",
    "final_p_plus", "final_states", "integrate",
    "AIAConfig", "Region", "classify", "fit_alpha", "freeze_out_time",
    "IsingQuenchSpec", "RangePolicy", "ScalingPoint", "defect_density", "scaling_scan",
    "SpinChainSpec", "kink_density", "mode_sum_prediction", "quench_evolve",
    "ScalingFit", "linear_fit", "theory_slope",
]
