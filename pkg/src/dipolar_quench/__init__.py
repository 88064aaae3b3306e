"""Quasiparticle pair creation in a quenched quasi-2D dipolar condensate.

Bogoliubov spectra with roton minima, mode mixing under a tanh quench of
the sound speed, and density-density correlation tests for nonseparable
and steerable quasiparticle pairs.
"""

__version__ = "0.1.0"

from .errors import DomainError, InstabilityError, ToleranceError
from .dispersion import (R_MAX, Frame, ModeFrequency, PhysicsParams, critical_A,
                         exceptional_A, exceptional_momentum, final_frame_A, find_roton,
                         interaction_kernel, spectrum, vacuum_correlation, wfun)
from .quench import (ModeState, QuenchProtocol, c2_of_tau, final_occupation,
                     integrate_mode, integrate_modes, lab_time, scale_factor,
                     sudden_beta2, tanh_model_beta2)
from .correlations import (CorrelationSeries, EntanglementReport, Verdict, classify,
                           envelopes, g2_low_T_expansion, g2_post_quench,
                           g2_stationary_thermal, momentum_scan, thermal_occupation,
                           time_series)
