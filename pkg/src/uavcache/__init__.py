"""Energy-efficient cooperative caching in UAV networks.

Analytical rate/EE evaluation, a Monte Carlo oracle, content-placement
strategies, a joint placement/altitude optimizer, and an experiment CLI.
"""

__version__ = "0.1.0"

from .analysis import (NetworkConfig, QuadratureSpec, gamma_approx,
                       gamma_exact, gamma_exact_detailed,
                       interference_laplace, psi)
from .channel import (EnvironmentParams, Link, LinkState, laplace_single_link,
                      los_probability, mean_received_power, path_loss,
                      shadow_std_db)
from .energy import (DisplacementPlan, EnergyBreakdown, UavPlatform,
                     air_density, displacement_power, energy_efficiency,
                     hover_power, total_energy)
from .errors import (ConfigurationError, ConstraintViolationError,
                     QuadratureError, UavCacheError)
from .optimizer import (AltitudeGrid, JointResult, Solution, network_ee,
                        solve_p, solve_p_cache)
from .placement import (Catalog, PlacementVector, hitrate_solver,
                        lru_reference, mpcp, mprc_optimize, mprc_probs, rshr,
                        virtual_capacity, zipf_popularity)
from .simulator import (GammaEstimate, Realization, SimSpec, simulate_gamma,
                        simulate_network_gamma, simulate_sinr_ccdf)
