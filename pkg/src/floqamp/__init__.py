"""Floquet-Sambe simulation of a modulated driven-dissipative bosonic mode.

A single mode with periodically modulated frequency and decay, a static loss
port and an incoherent pump is mapped onto a non-Hermitian lattice in
harmonic (Sambe) space. The package computes its Floquet-Green's function,
singular-value zero channel, local winding number, continuum soliton
predictions, scattering response, signal-to-noise ratio and mean-field
time-domain dynamics.
"""
from ._accel import get_backend, set_backend
from .dynamics import (
    MicroParams,
    Trajectory,
    integrate_one_mode,
    integrate_three_mode,
    photon_number_ode,
    reconstruct_steady_state,
    transient_time,
)
from .errors import (
    DivergenceError,
    FloqampError,
    GapClosingError,
    NoTopologyError,
    ParameterError,
    QuadratureError,
    SingularSystemError,
    UnsupportedPhaseError,
)
from .green import GreenFunction, SingularTriple, doubled_matrix, green_function, singular_triples
from .jackiw import SolitonPrediction, dirac_points, fidelity, soliton_prediction, soliton_profile
from .model import DriveSpec, ModelParams, beta, validate
from .response import SnrResult, noise_out, signal_out, snr_point, snr_sweep, sweep_point
from .sambe import SambeMatrix, bloch_symbol, build_sambe, default_truncation, time_signals
from .scattering import ScatteringMatrices, mean_output, scattering_matrices
from .topology import WindingMap, topo_window, winding_analytic, winding_map, winding_numeric

__version__ = "0.1.0"
