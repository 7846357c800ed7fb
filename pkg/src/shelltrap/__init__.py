"""Bi-chromatic RF-dressed shell traps for 87Rb.

Dressed potentials, trap matching between the |1,-1> and |2,+1>
manifolds, microwave spectra of the dressed clock transition,
susceptibilities to field fluctuations, and spectroscopy fits.
"""

from .constants import CONSTANTS_VERSION
from .core import (RB87, AtomSpecies, Manifold, RFTone, TrapConfig, clock_manifolds,
                   compute_gF, gamma)
from .errors import (CharacterizationError, ConfigError, DifferentiationError, DomainError,
                     NoTrapError, NotTrappableError, RadiallyUntrappedError, ShellTrapError,
                     SingularityError)
from .fitting import (DataSeries, FitResult, fit_damped_rabi, fit_lorentzian,
                      fit_multiphoton)
from .matching import (MatchResult, MismatchMetrics, match_tones, matched_tone2,
                       radial_mismatch, scan_radial_mismatch)
from .potential import (TrapCharacterization, characterize, dressed_potential,
                        find_minimum_numeric, trap_characterize_numeric,
                        trap_frequencies_analytic, trap_position)
from .sensitivity import (SensitivityReport, bias_field_scan, sensitivity_alpha,
                          sensitivity_bias, sensitivity_delta_rabi, sensitivity_report,
                          transition_energy, transition_shift)
from .spectroscopy import (PolarizationImbalance, SpectrumModel, bessel_weight_sum,
                           modulated_coupling, multiphoton_spectrum, resonance_ladder,
                           synth_lorentzian, synth_rabi_trace)

__version__ = "0.1.0"
