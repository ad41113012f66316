"""The nlskp command line.

Exit status: 0 on success, 2 on configuration errors, 3 when a simulation
breaks down (vortex, amplitude bound, non-finite state).
"""
import argparse
import glob
import os
import sys
from typing import Any, Callable, Dict, List, Optional

import pandas as pd
import torch

from nlskp.common.errors import ConfigError, SimulationError
from nlskp.common.logger import init_logger
from nlskp.common.config_file import load_config_file
from nlskp.common.outputs import InvariantRecord, LimitInvariantRecord
from nlskp.common.utils import set_num_threads, set_random_seed
from nlskp.diagnostics.hydro import (residual_euler, residual_phamd,
                                     uniform_prefix)
from nlskp.diagnostics.invariants import invariant_report
from nlskp.engine.args_tools import SimulationArgs
from nlskp.engine.initial_data import build_initial_data, build_limit_datum
from nlskp.engine.sweep import SweepEngine
from nlskp.endpoints.export import (FLOAT_FORMAT, ExportFormat, export_report,
                                    read_field, read_plotdata, write_field,
                                    write_table)
from nlskp.modeling.grid import Field, PeriodicGrid
from nlskp.modeling.madelung import polar_decompose, velocity
from nlskp.modeling.nonlinearity import NonlinearityKind
from nlskp.modeling.solitons import (kdv_residual_oracle, kdv_soliton,
                                     kdv_soliton_constants,
                                     scaled_dark_soliton)
from nlskp.modeling.spectral import NormKind, get_spectral_ops
from nlskp.solvers.limit import simulate_limit
from nlskp.solvers.nls import simulate_nls
from nlskp.solvers.transport import window_norm_scaling

logger = init_logger(__name__)

EXIT_CONFIG_ERROR = 2
EXIT_SIMULATION_ERROR = 3
SOLITON_CHECK_EPS = 0.1


def _write_tables(frame: pd.DataFrame, out_dir: str, name: str,
                  formats) -> None:
    for fmt in (ExportFormat.parse(f) for f in formats):
        path = os.path.join(out_dir, name + fmt.suffix)
        write_table(frame, path, fmt)
        logger.info(f"Wrote {path}")


def _write_snapshots(fields: List[torch.Tensor], grid: PeriodicGrid,
                     out_dir: str, prefix: str) -> None:
    directory = os.path.join(out_dir, "snapshots")
    for i, samples in enumerate(fields):
        write_field(Field(grid, samples),
                    os.path.join(directory, f"{prefix}_{i:05d}.nlskp"))
    logger.info(f"Wrote {len(fields)} snapshots to {directory}")


def simulate_nls_command(args: argparse.Namespace,
                         sim_args: SimulationArgs) -> int:
    model_config, grid_config, run_config, init_config, _ = (
        sim_args.create_simulation_configs())
    eps = run_config.require_eps()
    model = model_config.model
    grid = grid_config.make_grid(eps)
    data = build_initial_data(init_config, grid, eps, model)
    trajectory = simulate_nls(run_config, data.psi0, grid, model)
    frame = pd.DataFrame(trajectory.records,
                         columns=list(InvariantRecord._fields))
    _write_tables(frame, sim_args.out, "invariants", sim_args.formats)
    if sim_args.snapshots:
        _write_snapshots(trajectory.snapshots, grid, sim_args.out, "psi")
    logger.info(f"Relative drifts: E={trajectory.relative_drift('E_eps'):.3e}"
                f", P={trajectory.relative_drift('P_eps'):.3e}, "
                f"mass={trajectory.relative_drift('mass'):.3e}")
    return 0


def _simulate_limit_command(sim_args: SimulationArgs, dim: int) -> int:
    model_config, grid_config, run_config, init_config, _ = (
        sim_args.create_simulation_configs())
    grid = grid_config.make_grid()
    if grid.dim != dim:
        equation = "KdV" if dim == 1 else "KP-I"
        raise ConfigError(
            f"{equation} runs on {dim}D grids, got a {grid.dim}D grid.")
    model = model_config.model
    v0 = build_limit_datum(init_config, grid, model)
    trajectory = simulate_limit(run_config, v0, grid, model.c, model.k)
    frame = pd.DataFrame(trajectory.records,
                         columns=list(LimitInvariantRecord._fields))
    _write_tables(frame, sim_args.out, "invariants", sim_args.formats)
    if sim_args.snapshots:
        _write_snapshots(trajectory.snapshots, grid, sim_args.out, "v")
    logger.info(f"Relative drifts: I0={trajectory.relative_drift('I0'):.3e}"
                f", I1={trajectory.relative_drift('I1'):.3e}")
    return 0


def simulate_kdv_command(args: argparse.Namespace,
                         sim_args: SimulationArgs) -> int:
    return _simulate_limit_command(sim_args, dim=1)


def simulate_kpi_command(args: argparse.Namespace,
                         sim_args: SimulationArgs) -> int:
    return _simulate_limit_command(sim_args, dim=2)


def sweep_command(args: argparse.Namespace, sim_args: SimulationArgs) -> int:
    engine = SweepEngine.from_configs(*sim_args.create_simulation_configs())
    report = engine.run()
    for path in export_report(report, sim_args.out, sim_args.formats):
        logger.info(f"Wrote {path}")
    for order in report.orders:
        logger.info(f"order({order.metric}, {order.eps_coarse:g} -> "
                    f"{order.eps_fine:g}) = {order.order:.3f}")
    return 0


def invariants_command(args: argparse.Namespace,
                       sim_args: SimulationArgs) -> int:
    model_config, _, run_config, _, _ = sim_args.create_simulation_configs()
    eps = run_config.require_eps()
    field = read_field(args.input_path)
    if not field.is_complex:
        raise ConfigError(f"{args.input_path} does not hold a wavefunction.")
    report = invariant_report(field.samples, eps, model_config.model,
                              field.grid)
    frame = pd.DataFrame([report.as_dict()])
    _write_tables(frame, sim_args.out, "invariants_report", sim_args.formats)
    frame.to_csv(sys.stdout, index=False, float_format=FLOAT_FORMAT)
    return 0


def _parse_eps_values(text: str) -> List[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise ConfigError(f"Cannot parse eps values {text!r}.") from e
    for eps in values:
        if not 0.0 < eps < 1.0:
            raise ConfigError(f"eps values must be in (0, 1), got {eps}.")
    return values


def transport_probe_command(args: argparse.Namespace,
                            sim_args: SimulationArgs) -> int:
    model_config, grid_config, _, init_config, _ = (
        sim_args.create_simulation_configs())
    eps_values = _parse_eps_values(args.eps_values)
    if not eps_values:
        raise ConfigError("transport-probe needs at least one eps.")
    grid = grid_config.make_grid()
    if grid.dim != 1:
        raise ConfigError("transport-probe runs on 1D grids only.")
    model = model_config.model
    data = build_initial_data(init_config, grid, max(eps_values), model)
    A0 = data.polar0.A
    u0, _ = velocity(data.polar0.phi, data.polar0.eps, model.c, grid)
    try:
        frame = window_norm_scaling(A0, u0, eps_values, args.horizon, args.R,
                                    grid, allow_wrap=args.allow_wrap)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    _write_tables(frame, sim_args.out, "transport", sim_args.formats)
    if not bool(frame["holds"].all()):
        logger.warning("The windowed norm exceeds its bound for some eps.")
    return 0


def _read_times(traj_dir: str) -> List[float]:
    csv_path = os.path.join(traj_dir, "invariants.csv")
    dat_path = os.path.join(traj_dir, "invariants.dat")
    try:
        if os.path.exists(csv_path):
            frame = pd.read_csv(csv_path)
        else:
            frame = read_plotdata(dat_path)
    except OSError as e:
        raise OSError(f"Cannot read snapshot times in {traj_dir}: {e}") from e
    return [float(t) for t in frame["t"]]


def hydro_check_command(args: argparse.Namespace,
                        sim_args: SimulationArgs) -> int:
    model_config, _, run_config, _, _ = sim_args.create_simulation_configs()
    eps = run_config.require_eps()
    model = model_config.model
    paths = sorted(
        glob.glob(os.path.join(args.traj, "snapshots", "psi_*.nlskp")))
    if not paths:
        raise ConfigError(f"No psi snapshots found under {args.traj}.")
    times = _read_times(args.traj)
    if len(times) != len(paths):
        raise ConfigError(
            f"{len(paths)} snapshots but {len(times)} snapshot times in "
            f"{args.traj}.")
    # A horizon that is not a multiple of the output interval leaves a
    # shorter last interval.
    keep = uniform_prefix(times)
    if keep < len(times):
        logger.warning(f"Dropping {len(times) - keep} snapshot(s) after "
                       f"t={times[keep - 1]:g} that break the uniform "
                       "spacing.")
        times, paths = times[:keep], paths[:keep]
    polars = []
    for t, path in zip(times, paths):
        field = read_field(path)
        polars.append(
            polar_decompose(field.samples, eps, field.grid,
                            run_config.vortex_floor, t))
    try:
        phamd = residual_phamd(polars, times, model)
        euler = residual_euler(polars, times, model)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    frame = pd.DataFrame({
        "t": phamd.times,
        "amplitude_residual": phamd.amplitude,
        "phase_residual": phamd.phase,
        "euler_amplitude_residual": euler.amplitude,
        "euler_velocity_residual": euler.phase,
    })
    _write_tables(frame, sim_args.out, "hydro_residuals", sim_args.formats)
    logger.info(f"sup residual: amplitude/phase {phamd.sup():.3e}, "
                f"euler {euler.sup():.3e}")
    return 0


def soliton_check_command(args: argparse.Namespace,
                          sim_args: SimulationArgs) -> int:
    model_config, grid_config, run_config, _, _ = (
        sim_args.create_simulation_configs())
    model = model_config.model
    if model.kind != NonlinearityKind.GROSS_PITAEVSKII:
        raise ConfigError("soliton-check compares with the Gross-Pitaevskii "
                          f"dark soliton; got {model.name}.")
    eps = run_config.eps if run_config.eps is not None else SOLITON_CHECK_EPS
    run = run_config.with_eps(eps)
    grid = grid_config.make_grid(eps)
    line = PeriodicGrid(grid.lengths[:1], grid.points[:1])
    ops = get_spectral_ops(line)
    c, k = model.c, model.k
    T = run.T

    psi0 = scaled_dark_soliton(line, eps, c=c)
    trajectory = simulate_nls(run, psi0, line, model, record_invariants=False)
    nls_error = trajectory.snapshots[-1] - scaled_dark_soliton(
        line, eps, t=trajectory.times[-1], c=c)

    v0 = kdv_soliton(line, c, k)
    limit = simulate_limit(run, v0, line, c, k)
    kdv_error = limit.snapshots[-1] - kdv_soliton(line, c, k,
                                                  t=limit.times[-1])
    fit = kdv_residual_oracle(line, c, k)
    constants = kdv_soliton_constants(c, k, 1.0)

    frame = pd.DataFrame([
        {
            "check": "nls_dark_soliton",
            "eps": eps,
            "T": T,
            "err_L2": ops.norm(nls_error, NormKind.L2),
            "err_Linf": ops.norm(nls_error, NormKind.LINF),
        },
        {
            "check": "kdv_soliton",
            "eps": eps,
            "T": T,
            "err_L2": ops.norm(kdv_error, NormKind.L2),
            "err_Linf": ops.norm(kdv_error, NormKind.LINF),
        },
        {
            "check": "kdv_constants_fit",
            "eps": eps,
            "T": T,
            "err_L2": fit.residual,
            "err_Linf": max(abs(fit.amplitude - constants.amplitude),
                            abs(fit.speed - constants.speed)),
        },
    ])
    _write_tables(frame, sim_args.out, "soliton_check", sim_args.formats)
    frame.to_csv(sys.stdout, index=False, float_format=FLOAT_FORMAT)
    return 0


COMMANDS: Dict[str, Callable[[argparse.Namespace, SimulationArgs], int]] = {
    "simulate-nls": simulate_nls_command,
    "simulate-kdv": simulate_kdv_command,
    "simulate-kpi": simulate_kpi_command,
    "sweep": sweep_command,
    "invariants": invariants_command,
    "transport-probe": transport_probe_command,
    "hydro-check": hydro_check_command,
    "soliton-check": soliton_check_command,
}

# Defaults that differ from SimulationArgs for one command. Well-prepared
# data make A0 - u0 constant, so transport-probe starts from ill-prepared data.
COMMAND_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "transport-probe": {
        "preparedness": "ill_prepared"
    },
}


def _global_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config",
                        type=str,
                        default=None,
                        help="TOML config file; flags override its values")
    parser.add_argument("--log-level",
                        type=str,
                        default=None,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="level of the stdout log handler")
    return parser


def _output_parser() -> argparse.ArgumentParser:
    """--out, --threads and --seed for commands without simulation args."""
    suppress = argparse.SUPPRESS
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--out", type=str, default=suppress,
                        help="output directory (default: out)")
    parser.add_argument("--threads", type=int, default=suppress,
                        help="number of torch intra-op threads")
    parser.add_argument("--seed", type=int, default=suppress,
                        help="random seed (default: 0)")
    return parser


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlskp",
        description="Scaled NLS simulations and their KdV / KP-I limits.")
    subparsers = parser.add_subparsers(dest="command", required=True)
    global_parser = _global_parser()
    simulation_parser = SimulationArgs.add_cli_args(
        argparse.ArgumentParser(add_help=False))

    for name, help_text in [
        ("simulate-nls", "integrate the scaled NLS equation"),
        ("simulate-kdv", "integrate the KdV equation (1D)"),
        ("simulate-kpi", "integrate the KP-I equation (2D)"),
        ("sweep", "eps-convergence sweep against the limit equation"),
        ("soliton-check", "compare solvers with exact solitons"),
    ]:
        subparsers.add_parser(name,
                              help=help_text,
                              parents=[global_parser, simulation_parser])

    invariants = subparsers.add_parser(
        "invariants",
        help="conserved functionals of a field dump",
        parents=[global_parser, simulation_parser])
    invariants.add_argument("--in",
                            dest="input_path",
                            type=str,
                            required=True,
                            help="NLSKP1 dump of psi")

    hydro = subparsers.add_parser(
        "hydro-check",
        help="hydrodynamic residuals of a stored NLS trajectory",
        parents=[global_parser, simulation_parser])
    hydro.add_argument("--traj",
                       type=str,
                       required=True,
                       help="output directory of a simulate-nls run")

    transport = subparsers.add_parser(
        "transport-probe",
        help="windowed norm of the fast-transport system",
        parents=[global_parser, _output_parser()])
    transport.add_argument("--eps",
                           dest="eps_values",
                           type=str,
                           required=True,
                           help="comma-separated eps values, e.g. 0.2,0.1")
    transport.add_argument("--R",
                           type=float,
                           required=True,
                           help="half-width of the window")
    transport.add_argument("--T",
                           dest="horizon",
                           type=float,
                           required=True,
                           help="time horizon")
    transport.add_argument("--allow-wrap",
                           action="store_true",
                           help="do not cap T at one box traversal")
    transport.add_argument("--profile",
                           type=str,
                           choices=["sech2", "gaussian", "random_band_limited"],
                           default=argparse.SUPPRESS,
                           help="profile of A0 (default: sech2)")
    transport.add_argument("--preparedness",
                           type=str,
                           choices=[
                               "well_prepared", "slightly_prepared",
                               "ill_prepared"
                           ],
                           default=argparse.SUPPRESS,
                           help="how u0 relates to A0 (default: ill_prepared)")
    transport.add_argument("--phase-amplitude",
                           type=float,
                           default=argparse.SUPPRESS,
                           help="amplitude of the ill-prepared velocity "
                           "profile (default: 0)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.log_level is not None:
        init_logger(__name__, args.log_level)
    try:
        config_file = (load_config_file(args.config)
                       if args.config is not None else None)
        sim_args = SimulationArgs.from_cli_args(
            args, config_file, COMMAND_DEFAULTS.get(args.command))
        set_num_threads(sim_args.threads)
        set_random_seed(sim_args.seed)
        return COMMANDS[args.command](args, sim_args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG_ERROR
    except SimulationError as e:
        logger.error(f"Simulation stopped: {type(e).__name__}: {e}")
        return EXIT_SIMULATION_ERROR


if __name__ == "__main__":
    sys.exit(main())
