"""ferrosim: phase-field simulation of ferroelectric device stacks.

Couples gradient-flow polarization dynamics, a variable-coefficient Poisson
solve (geometric multigrid), and Fermi-Dirac semiconductor charge on a 3D
structured grid.
"""

from .constants import BOLTZMANN, ELECTRON_MASS, ELEMENTARY_CHARGE, EPS0, HBAR
from .coupling import (FixedPointReport, SimState, SolverDiverged, advance,
                       initialize, self_consistent_phi)
from .driver import (average_fe_voltage, depolarization_field,
                     domain_wall_energy, interface_charge, interface_voltage,
                     run)
from .grid import (Grid, ScalarField, Tile, ZRule, create_grid,
                   exchange_ghosts, plane_average, volume_integral)
from .io import CSV_COLUMNS, SweepRecord, write_csv, write_vtk
from .materials import (ConfigError, DeviceStack, FerroelectricParams, Layer,
                        SemiconductorParams, SimConfig, build_stack,
                        parse_config, serialize_config)
from .poisson import (MultigridConfig, MultigridSolver,
                      PoissonConvergenceError, PoissonProblem, assemble_rhs,
                      electric_field)
from .schedule import SteadyStateRule, SweepSchedule
from .semiconductor import (ChargeModel, charge_density, electron_density,
                            fermi_half, hole_density)
from .tdgl import (EnergyBreakdown, PolarizationBC, energy_breakdown,
                   free_energy_frozen_potential, landau_density, tdgl_rhs)
from .verification import (BumpConfig, ConvergenceResult, coarsen,
                           gaussian_bump, l2_error, run_suite)

__version__ = "0.1.0"
