"""modbath: suppression of decay, relaxation and heating of open quantum
systems by fast frequency modulation of the system-bath coupling."""

from .specfun import (ModulationParams, bessel_j, j0_zero, jacobi_anger_order,
                      phase)
from .numerics import (ComplexTrajectory, FitError, NumericError,
                       ResolutionError, TimeGrid, fit_decay_rate,
                       integrate_linear, period_average)
from .two_level import (TwoLevelParams, effective_rate_sum, evolve,
                        fitted_decay_rate, golden_rule_rate,
                        predicted_population_rate, suppression_ratio)
from .spin_bath import (BathParams, DensityMatrix2, SpinParams,
                        coherence_lifetime, evolve_rho,
                        relaxation_coefficient, spectral_factor,
                        steady_state_excited)
from .ion_heating import (HeatingMoments, HeatingMomentsSeries, HeatingParams,
                          fidelity, fidelity_curve, heating_moments_analytic,
                          heating_moments_analytic_series, heating_moments_mc,
                          integral_I)

__version__ = "0.1.0"
