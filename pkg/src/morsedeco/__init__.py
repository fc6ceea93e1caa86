"""Morse-oscillator wave packets under a super-Ohmic bosonic environment.

Builds the bound Morse basis, prepares SU(1,1) coherent-state wave packets,
integrates the modified-jump-operator master equation for the density matrix,
computes Wigner phase-space distributions at fractional revival times, and
fits the decay of sub-Planck interference structures versus coupling strength
and temperature. Atomic units throughout (hbar = kB = 1).
"""

from .basis import (
    HI_PRESET,
    BoundBasis,
    MorseParams,
    bound_state_count,
    build_basis,
    derive_lambda,
    eigenfunction_eval,
    energy,
    morse_potential,
    position_matrix,
)
from .coherent import CoherentSpec, coherent_coefficients, eta_for_mean_level, mean_level
from .opensystem import (
    BathSpec,
    JumpOperators,
    build_lowering_operator,
    build_modified_operators,
    evolve,
    master_rhs,
    unitary_evolve,
)
from .analysis import (
    DecayFit,
    default_probes,
    fit_bose,
    fit_exponential,
    revival_time,
    sweep_delta,
    sweep_temperature,
)
from .coherent import StateVector
from .wigner import (
    GridSpec,
    PeakProbe,
    WignerGrid,
    count_lobes,
    locate_clone_lobes,
    density_position,
    find_peak,
    peak_metrics,
    wigner_transform,
)

__all__ = [name for name in dir() if not name.startswith("_")]
