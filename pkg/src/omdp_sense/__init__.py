"""Frequency-domain noise and sensitivity toolkit for a two-probe
optomechanical detector read out in a single cavity mode.

The model layer carries parameters and linear-response building blocks,
coefficients maps cavity input and thermal forces onto the measured
quadrature, spectra assembles additional-noise spectra, sql compares them
against the standard quantum limit, and sensing converts the result into
magnetometer figures of merit.
"""

__version__ = "0.1.0"

from .errors import (ConvergenceError, OmdpError, ParameterError,
                     SingularSystemError, StructureViolationError,
                     TransductionAbsentError, UsageError)
from .model import (DetectorParams, DriveConfig, SteadyState,
                    SusceptibilitySet, ThermalBath, chi_cavity,
                    chi_cavity_conj, chi_mech, frequency_grid,
                    occupation_temperature, omega_eff, single_photon_coupling,
                    steady_state, susceptibilities, thermal_occupation)
from .coefficients import (OutputCoefficients, amplification,
                           closed_form_coefficients, solve_coefficients)
from .spectra import (AddNoise, SpectrumPoint, SpectrumResult, s_add,
                      s_add_resonant, s_add_som, spectrum_sweep)
from .sql import (GMinAnalytic, GMinNumeric, RMap, SqlResult, SweepResult,
                  default_g_range, fit_shot_backaction,
                  minimize_over_g_analytic, minimize_over_g_numeric, r_factors,
                  r_map, s_min_sweep, som_sql, sql_result)
from .sensing import (MagnetometerConfig, SensingReport, calibrate_conversion,
                      detection_accuracy, make_report, response_coefficient,
                      s_r, snr, snr_linearity)

__all__ = [
    "__version__",
    "OmdpError", "ParameterError", "ConvergenceError", "SingularSystemError",
    "TransductionAbsentError", "StructureViolationError", "UsageError",
    "DetectorParams", "DriveConfig", "SteadyState", "SusceptibilitySet",
    "ThermalBath", "chi_cavity", "chi_cavity_conj", "chi_mech",
    "frequency_grid", "occupation_temperature", "omega_eff",
    "single_photon_coupling", "steady_state", "susceptibilities",
    "thermal_occupation",
    "OutputCoefficients", "amplification", "closed_form_coefficients",
    "solve_coefficients",
    "AddNoise", "SpectrumPoint", "SpectrumResult", "s_add", "s_add_resonant",
    "s_add_som", "spectrum_sweep",
    "GMinAnalytic", "GMinNumeric", "RMap", "SqlResult", "SweepResult",
    "default_g_range", "fit_shot_backaction", "minimize_over_g_analytic",
    "minimize_over_g_numeric", "r_factors", "r_map", "s_min_sweep", "som_sql",
    "sql_result",
    "MagnetometerConfig", "SensingReport", "calibrate_conversion",
    "detection_accuracy", "make_report", "response_coefficient", "s_r", "snr",
    "snr_linearity",
]
