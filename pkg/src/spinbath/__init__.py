"""Spin-boson dynamics of a single laser-addressed ion in a 1D Coulomb
chain: exact axial modes, Ohmic/sub-Ohmic spectral densities, and the
noninteracting-blip evolution of the spin polarization."""

from .chain import (ChainSpec, ConvergenceError, EquilibriumPositions,
                    ModeSpectrum, RevivalTimes, axial_hessian, chain_modes,
                    chain_spacing, dispersion_estimate, normal_modes,
                    revival_time, solve_equilibrium, sound_parameter,
                    stiffness_beta)
from .coupling import (AlphaFit, CouplingSet, LaserConfig, SpectralDensity,
                       analytic_spectral_density, calibrate_eta, couplings,
                       fit_alpha, reference_alpha, smoothed_spectral_density)
from .niba import (BathState, KernelTable, PolarizationTrace,
                   SolverBlowupError, bath_exponents, evolve, kernel,
                   solve_volterra)
from .analysis import (DecayFit, RegimeReport, RevivalReport, SweepRow,
                       classify_regime, detect_revival, extract_decay_rate,
                       omega_z_in_khz, required_trap_frequency,
                       sweep_rate_vs_alpha)

__version__ = "0.1.0"
