from nlskp.common.config import (GridConfig, InitialDataConfig, ModelConfig,
                                 RunConfig, SweepConfig)
from nlskp.common.outputs import BranchReport, ConvergenceReport
from nlskp.engine.args_tools import SimulationArgs
from nlskp.engine.initial_data import build_initial_data
from nlskp.engine.ray_tools import initialize_cluster
from nlskp.engine.sweep import SweepEngine, run_convergence_sweep
from nlskp.modeling.grid import PeriodicGrid
from nlskp.modeling.nonlinearity import NonlinearityModel
from nlskp.solvers.limit import simulate_limit
from nlskp.solvers.nls import simulate_nls

__version__ = "0.1.0"

__all__ = [
    "PeriodicGrid",
    "NonlinearityModel",
    "ModelConfig",
    "GridConfig",
    "RunConfig",
    "InitialDataConfig",
    "SweepConfig",
    "SimulationArgs",
    "SweepEngine",
    "BranchReport",
    "ConvergenceReport",
    "build_initial_data",
    "run_convergence_sweep",
    "simulate_nls",
    "simulate_limit",
    "initialize_cluster",
]
