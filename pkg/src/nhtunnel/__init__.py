"""Scattering, phase times and the Hartman effect for non-Hermitian lattice barriers."""
from .analysis import asymptotic_factor, hartman_profile, phase_time, spectral_scan
from .errors import InputError, NumericalError
from .model import (
    BarrierModel,
    HoppingEntry,
    LeadSpec,
    ScatteringProblem,
    bloch_hamiltonian,
    determinant_poly,
    load_config,
    parse_model,
    rice_mele,
    serialize_model,
    single_band,
)
from .scatter import solve, solve_ansatz, solve_direct, transmission_scan
from .spectra import barrier_roots, beta_s_phase_derivative, obc_spectrum, opacity_check, pbc_spectrum
from .timedomain import WavepacketConfig, advancement_rate, auto_config, build_full_lattice, propagate, simulate

__version__ = "0.1.0"
