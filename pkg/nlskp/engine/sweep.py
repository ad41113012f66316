"""Convergence sweeps pairing the scaled NLS flow with its KdV / KP-I limit
across decreasing eps."""
import functools
import math
from typing import Dict, List, Optional

import torch
from tqdm import tqdm

from nlskp.common.config import (GridConfig, InitialDataConfig, ModelConfig,
                                 ProfileKind, RunConfig, SweepConfig)
from nlskp.common.errors import ConfigError, SimulationError
from nlskp.common.logger import init_logger
from nlskp.common.outputs import BranchReport, ConvergenceReport, OrderEstimate
from nlskp.diagnostics.invariants import (m_bound, modulus_excursion,
                                          nu_functional)
from nlskp.engine.initial_data import build_initial_data
from nlskp.engine.ray_tools import RayBranchWorker, initialize_cluster, ray
from nlskp.modeling.madelung import (PolarState, constraint_deficit,
                                     constraint_mean_mismatch,
                                     polar_decompose)
from nlskp.modeling.spectral import NormKind, get_spectral_ops
from nlskp.solvers.limit import simulate_limit
from nlskp.solvers.nls import simulate_nls

logger = init_logger(__name__)

# Metrics whose empirical orders in eps are reported.
ORDER_METRICS = ["sup_A_err_L2", "sup_half_sum_err", "nu"]


class BranchRunner:
    """Runs and diagnoses one eps-branch. Holds only immutable configs, so
    branches can run in any order or process.

    Args:
        model_config: Nonlinearity.
        grid_config: Periodic box.
        run_config: Horizon, step and guards; eps is set per branch.
        init_config: Initial datum family.
        sobolev_index: s of the H^s error series.
    """

    def __init__(
        self,
        model_config: ModelConfig,
        grid_config: GridConfig,
        run_config: RunConfig,
        init_config: InitialDataConfig,
        sobolev_index: float = 1.0,
    ) -> None:
        self.model_config = model_config
        self.grid_config = grid_config
        self.run_config = run_config
        self.init_config = init_config
        self.sobolev_index = sobolev_index

    def run_branch(self, eps: float) -> BranchReport:
        try:
            report = self._run_branch(eps)
        except SimulationError as e:
            logger.warning(f"Branch eps={eps:g} aborted: {e}")
            return BranchReport.aborted(eps, f"{type(e).__name__}: {e}")
        logger.info(f"Branch eps={eps:g} finished: "
                    f"sup ||A - v|| = {report.scalars['sup_A_err_L2']:.4e}, "
                    f"nu = {report.scalars['nu']:.4e}")
        return report

    def _run_branch(self, eps: float) -> BranchReport:
        model = self.model_config.model
        c, k = model.c, model.k
        grid = self.grid_config.make_grid(eps)
        run = self.run_config.with_eps(eps)
        data = build_initial_data(self.init_config, grid, eps, model)
        time_grid = run.resolve_time_grid(grid, c)
        logger.info(f"Branch eps={eps:g}: grid={grid.points}, "
                    f"dt={time_grid.dt:.4g}, steps={time_grid.num_steps}")

        nls = simulate_nls(run, data.psi0, grid, model,
                           desc=f"NLS eps={eps:g}")
        drift = data.drift if run.use_drift else 0.0
        limit = simulate_limit(run, data.limit_v0, grid, c, k, drift,
                               time_grid=time_grid,
                               desc=f"Limit eps={eps:g}")
        polars = [
            polar_decompose(psi, eps, grid, run.vortex_floor, t)
            for t, psi in zip(nls.times, nls.snapshots)
        ]

        series = self._series(polars, limit.snapshots, nls.snapshots, c)
        for record in nls.records:
            for name in ("E_eps", "P_eps", "mass"):
                series.setdefault(name, []).append(getattr(record, name))
        for record in limit.records:
            for name in ("I0", "I1"):
                series.setdefault(name, []).append(getattr(record, name))

        deficit0 = constraint_deficit(data.polar0, c)
        scalars: Dict[str, float] = {
            "M": m_bound(data.polar0, c),
            "delta": deficit0.raw,
            "nu": nu_functional(polars, limit.snapshots, c),
            "mean_mismatch": constraint_mean_mismatch(data.polar0, c),
            "drift": drift,
            "Nx": float(grid.points[0]),
            "dt": time_grid.dt,
            "drift_E": nls.relative_drift("E_eps"),
            "drift_P": nls.relative_drift("P_eps"),
            "drift_mass": nls.relative_drift("mass"),
            "drift_I0": limit.relative_drift("I0"),
            "drift_I1": limit.relative_drift("I1"),
        }
        for name in ("A_err_L2", "A_err_Hs", "deficit", "deficit_scaled",
                     "half_sum_err", "grad_perp_phi", "modulus_excursion"):
            if name in series:
                scalars[f"sup_{name}"] = max(series[name])
        return BranchReport(eps, list(nls.times), series, scalars)

    def _series(self, polars: List[PolarState], limit_fields: List[torch.Tensor],
                snapshots: List[torch.Tensor],
                c: float) -> Dict[str, List[float]]:
        grid = polars[0].grid
        ops = get_spectral_ops(grid)
        series: Dict[str, List[float]] = {
            "A_err_L2": [],
            "A_err_Hs": [],
            "deficit": [],
            "deficit_scaled": [],
            "half_sum_err": [],
            "modulus_excursion": [],
        }
        if grid.dim > 1:
            series["grad_perp_phi"] = []
        for polar, v, psi in zip(polars, limit_fields, snapshots):
            A_centered, _ = ops.remove_x_mean(polar.A)
            error = A_centered - v
            series["A_err_L2"].append(ops.norm(error, NormKind.L2))
            series["A_err_Hs"].append(
                ops.norm(error, NormKind.HS, s=self.sobolev_index))
            deficit = constraint_deficit(polar, c)
            series["deficit"].append(deficit.raw)
            series["deficit_scaled"].append(deficit.scaled)
            half_sum, _ = ops.remove_x_mean(
                0.5 * (polar.A + ops.dx(polar.phi) / (2.0 * c)))
            series["half_sum_err"].append(ops.norm(half_sum - v, NormKind.L2))
            series["modulus_excursion"].append(
                modulus_excursion(psi, polar.eps))
            if grid.dim > 1:
                series["grad_perp_phi"].append(
                    ops.norm(ops.grad_perp(polar.phi), NormKind.L2))
        return series


def estimate_orders(branches: List[BranchReport],
                    metrics: Optional[List[str]] = None) -> List[OrderEstimate]:
    """log(m_coarse/m_fine)/log(eps_coarse/eps_fine) between consecutive
    successful branches; pairs with a non-positive metric are skipped."""
    metrics = metrics or ORDER_METRICS
    ok = [b for b in branches if b.ok]
    orders: List[OrderEstimate] = []
    for coarse, fine in zip(ok, ok[1:]):
        for metric in metrics:
            m_coarse = coarse.scalars.get(metric, math.nan)
            m_fine = fine.scalars.get(metric, math.nan)
            if not (m_coarse > 0 and m_fine > 0):
                continue
            order = (math.log(m_coarse / m_fine) /
                     math.log(coarse.eps / fine.eps))
            orders.append(OrderEstimate(metric, coarse.eps, fine.eps, order))
    return orders


class SweepEngine:
    """An engine that runs every eps-branch of a sweep and reduces the
    branch reports into a ConvergenceReport.

    Branches run one after another, or as Ray actors when
    `sweep_config.worker_use_ray` is set.

    Args:
        model_config: Nonlinearity.
        grid_config: Periodic box.
        run_config: Horizon, step and guards.
        init_config: Initial datum family.
        sweep_config: eps values and sweep options.
    """

    def __init__(
        self,
        model_config: ModelConfig,
        grid_config: GridConfig,
        run_config: RunConfig,
        init_config: InitialDataConfig,
        sweep_config: SweepConfig,
    ) -> None:
        logger.info(
            "Initializing a convergence sweep with config: "
            f"nonlinearity={model_config.nonlinearity!r}, "
            f"lengths={grid_config.lengths}, points={grid_config.points}, "
            f"T={run_config.T}, dt={run_config.dt}, "
            f"splitting={run_config.splitting.name.lower()}, "
            f"profile={init_config.profile.name.lower()}, "
            f"preparedness={init_config.preparedness.name.lower()}, "
            f"eps_list={list(sweep_config.eps_list)}, "
            f"worker_use_ray={sweep_config.worker_use_ray})")
        self.model_config = model_config
        self.grid_config = grid_config
        self.run_config = run_config
        self.init_config = init_config
        self.sweep_config = sweep_config
        self._verify_args()

        self.runner = BranchRunner(model_config, grid_config, run_config,
                                   init_config, sweep_config.sobolev_index)

    def _verify_args(self) -> None:
        if self.sweep_config.worker_use_ray and ray is None:
            raise ConfigError(
                "worker_use_ray needs Ray; install it with "
                "`pip install nlskp[ray]`.")
        if self.init_config.profile == ProfileKind.SOLITON:
            return
        # Every eps of the sweep must admit the datum.
        amplitude = abs(self.init_config.amplitude)
        for eps in self.sweep_config.eps_list:
            if eps * eps * amplitude >= 0.5:
                raise ConfigError(
                    f"eps^2 |amplitude| = {eps * eps * amplitude:.4f} >= 1/2 "
                    f"for eps={eps:g}.")

    @classmethod
    def from_configs(cls, model_config: ModelConfig, grid_config: GridConfig,
                     run_config: RunConfig, init_config: InitialDataConfig,
                     sweep_config: SweepConfig) -> "SweepEngine":
        initialize_cluster(sweep_config.worker_use_ray,
                           sweep_config.ray_address)
        return cls(model_config, grid_config, run_config, init_config,
                   sweep_config)

    def run(self) -> ConvergenceReport:
        if self.sweep_config.worker_use_ray:
            branches = self._run_branches_ray()
        else:
            branches = []
            pbar = tqdm(self.sweep_config.eps_list,
                        desc="Sweep",
                        disable=self.run_config.disable_tqdm)
            for eps in pbar:
                branches.append(self.runner.run_branch(eps))
        orders = estimate_orders(branches)
        aborted = [b.eps for b in branches if not b.ok]
        if aborted:
            logger.warning(f"Aborted branches: {aborted}")
        return ConvergenceReport(branches, orders)

    def _run_branches_ray(self) -> List[BranchReport]:
        runner_init_fn = functools.partial(BranchRunner, self.model_config,
                                           self.grid_config, self.run_config,
                                           self.init_config,
                                           self.sweep_config.sobolev_index)
        workers = []
        for _ in self.sweep_config.eps_list:
            worker = ray.remote(num_cpus=1)(RayBranchWorker).remote()
            worker.init_runner.remote(runner_init_fn)
            workers.append(worker)
        futures = [
            worker.execute_method.remote("run_branch", eps)
            for worker, eps in zip(workers, self.sweep_config.eps_list)
        ]
        return ray.get(futures)


def run_convergence_sweep(
    sweep_config: SweepConfig,
    model_config: Optional[ModelConfig] = None,
    grid_config: Optional[GridConfig] = None,
    run_config: Optional[RunConfig] = None,
    init_config: Optional[InitialDataConfig] = None,
) -> ConvergenceReport:
    engine = SweepEngine.from_configs(model_config or ModelConfig(),
                                      grid_config or GridConfig(),
                                      run_config or RunConfig(),
                                      init_config or InitialDataConfig(),
                                      sweep_config)
    return engine.run()
