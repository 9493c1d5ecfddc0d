"""gpden: 1D Schrodinger / cubic-Schrodinger dynamics, two-time density
matrices, and residual verification of their evolution equations."""

__version__ = "0.1.0"

from .grids import (SpatialGrid, TimeGrid, Trajectory, WaveField,
                    inner_product, make_spatial_grid, make_time_grid,
                    spectral_second_derivative)
from .states import (PotentialSpec, StationaryState, bright_soliton,
                     evaluate_potential, free_gaussian_at, gaussian_packet,
                     hermite_eigenstate, resolution_report, soliton_at)
from .propagate import (BlowupError, ConvergenceError, EvolveParams,
                        GroundStateParams, chemical_potential, energy, evolve,
                        imaginary_time_ground_state, norm, norm_squared,
                        stationary_residual, strang_step)
from .density import (DensityMatrix, GeneralizedDensityMatrix, MixtureSpec,
                      generalized_density, mixture_density,
                      mixture_generalized_density, pure_density, purity,
                      stationary_generalized_density)
from .residuals import (EQUATION_IDS, ConvergenceReport, ResidualReport,
                        StencilSpec, convergence_order, convergence_study,
                        mixture_cubic_defect, two_time_cubic_residual,
                        two_time_linear_residual, von_neumann_residual)
from .scenarios import (SCENARIOS, ScenarioData, ScenarioInfo, build_scenario,
                        default_config, scenario_ids)
