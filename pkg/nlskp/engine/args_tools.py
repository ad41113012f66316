import argparse
import dataclasses
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

from nlskp.common.config import (DEFAULT_LENGTH, DEFAULT_POINTS, GridConfig,
                                 InitialDataConfig, ModelConfig, RunConfig,
                                 SweepConfig)
from nlskp.common.config_file import ConfigFile


@dataclass
class SimulationArgs:
    """Arguments for nlskp simulations and sweeps."""
    nonlinearity: str = "gp"
    lengths: Tuple[float, ...] = (DEFAULT_LENGTH,)
    points: Tuple[int, ...] = (DEFAULT_POINTS,)
    resolution_coupling: Optional[float] = None
    eps: Optional[float] = None
    T: float = 1.0
    dt: Optional[float] = None
    output_interval: Optional[float] = None
    splitting: str = "strang"
    vortex_floor: float = 0.25
    use_drift: bool = True
    threads: Optional[int] = None
    profile: str = "sech2"
    preparedness: str = "well_prepared"
    amplitude: float = -0.5
    width: float = 1.0
    transverse_width: float = 4.0
    num_modes: int = 8
    seed: int = 0
    theta: float = 1.0
    phase_profile: str = "gaussian"
    phase_amplitude: float = 0.0
    eps_list: Tuple[float, ...] = (0.2, 0.1, 0.05)
    sobolev_index: float = 1.0
    worker_use_ray: bool = False
    ray_address: Optional[str] = None
    out: str = "out"
    formats: Tuple[str, ...] = ("csv", "plotdata")
    snapshots: bool = True
    disable_tqdm: bool = False

    def __post_init__(self):
        self.lengths = tuple(self.lengths)
        self.points = tuple(self.points)
        self.eps_list = tuple(self.eps_list)
        self.formats = tuple(self.formats)

    @staticmethod
    def add_cli_args(
            parser: argparse.ArgumentParser) -> argparse.ArgumentParser:
        """Shared CLI arguments for nlskp commands.

        Only flags given on the command line reach the namespace, so that
        they override config-file values and leave the rest alone.
        """
        suppress = argparse.SUPPRESS
        # Model arguments
        parser.add_argument('--nonlinearity',
                            type=str,
                            default=suppress,
                            help='nonlinearity: "gp", "cubic_quintic", '
                            '"cubic_quintic:<alpha>,<beta>" or '
                            '"poly:<c0,c1,...>" (default: gp)')
        # Grid arguments
        parser.add_argument('--lengths',
                            type=float,
                            nargs='+',
                            default=suppress,
                            help='box length per axis, x first '
                            '(default: 32 pi)')
        parser.add_argument('--points',
                            type=int,
                            nargs='+',
                            default=suppress,
                            help='samples per axis, x first; powers of two '
                            f'(default: {DEFAULT_POINTS})')
        parser.add_argument('--resolution-coupling',
                            type=float,
                            default=suppress,
                            help='raise Nx to the next power of two of '
                            'C/eps for every eps')
        # Run arguments
        parser.add_argument('--eps',
                            type=float,
                            default=suppress,
                            help='scaling parameter in (0, 1)')
        parser.add_argument('--T',
                            type=float,
                            default=suppress,
                            help='scaled time horizon (default: 1.0)')
        parser.add_argument('--dt',
                            type=float,
                            default=suppress,
                            help='time step (default: min(1e-3, dt_max))')
        parser.add_argument('--output-interval',
                            type=float,
                            default=suppress,
                            help='scaled time between stored snapshots '
                            '(default: every step)')
        parser.add_argument('--splitting',
                            type=str,
                            choices=['strang', 'yoshida4'],
                            default=suppress,
                            help='NLS splitting scheme (default: strang)')
        parser.add_argument('--vortex-floor',
                            type=float,
                            default=suppress,
                            help='stop when min |psi| reaches this value '
                            '(default: 0.25)')
        parser.add_argument('--no-drift',
                            dest='use_drift',
                            action='store_false',
                            default=suppress,
                            help='integrate the limit equation without the '
                            'mean-flow drift of the initial datum')
        parser.add_argument('--threads',
                            type=int,
                            default=suppress,
                            help='number of torch intra-op threads')
        # Initial data arguments
        parser.add_argument('--profile',
                            type=str,
                            choices=[
                                'sech2', 'gaussian', 'random_band_limited',
                                'soliton'
                            ],
                            default=suppress,
                            help='initial amplitude profile (default: sech2)')
        parser.add_argument('--preparedness',
                            type=str,
                            choices=[
                                'well_prepared', 'slightly_prepared',
                                'ill_prepared'
                            ],
                            default=suppress,
                            help='how the initial phase relates to the '
                            'amplitude (default: well_prepared)')
        parser.add_argument('--amplitude',
                            type=float,
                            default=suppress,
                            help='peak value of A0 (default: -0.5)')
        parser.add_argument('--width',
                            type=float,
                            default=suppress,
                            help='x-width of the profile (default: 1.0)')
        parser.add_argument('--transverse-width',
                            type=float,
                            default=suppress,
                            help='transverse gaussian width in 2D '
                            '(default: 4.0)')
        parser.add_argument('--num-modes',
                            type=int,
                            default=suppress,
                            help='Fourier modes of random_band_limited '
                            '(default: 8)')
        parser.add_argument('--seed',
                            type=int,
                            default=suppress,
                            help='random seed (default: 0)')
        parser.add_argument('--theta',
                            type=float,
                            default=suppress,
                            help='constraint deficit of slightly_prepared '
                            'data in units of eps (default: 1.0)')
        parser.add_argument('--phase-profile',
                            type=str,
                            choices=['sech2', 'gaussian'],
                            default=suppress,
                            help='profile of the initial velocity for '
                            'ill_prepared data (default: gaussian)')
        parser.add_argument('--phase-amplitude',
                            type=float,
                            default=suppress,
                            help='amplitude of that profile (default: 0)')
        # Sweep arguments
        parser.add_argument('--eps-list',
                            type=float,
                            nargs='+',
                            default=suppress,
                            help='strictly decreasing eps values '
                            '(default: 0.2 0.1 0.05)')
        parser.add_argument('--sobolev-index',
                            type=float,
                            default=suppress,
                            help='s of the H^s error series (default: 1.0)')
        parser.add_argument('--worker-use-ray',
                            action='store_true',
                            default=suppress,
                            help='run sweep branches as Ray actors')
        parser.add_argument('--ray-address',
                            type=str,
                            default=suppress,
                            help='address of an existing Ray cluster')
        # Output arguments
        parser.add_argument('--out',
                            type=str,
                            default=suppress,
                            help='output directory (default: out)')
        parser.add_argument('--formats',
                            type=str,
                            nargs='+',
                            choices=['csv', 'plotdata'],
                            default=suppress,
                            help='table formats to write '
                            '(default: csv plotdata)')
        parser.add_argument('--no-snapshots',
                            dest='snapshots',
                            action='store_false',
                            default=suppress,
                            help='do not write NLSKP1 snapshot files')
        parser.add_argument('--disable-tqdm',
                            action='store_true',
                            default=suppress,
                            help='disable progress bars')
        return parser

    @classmethod
    def from_cli_args(
            cls,
            args: argparse.Namespace,
            config_file: Optional[ConfigFile] = None,
            defaults: Optional[Dict[str, Any]] = None) -> 'SimulationArgs':
        """`defaults` replaces dataclass defaults for one command; the config
        file and then the command line take precedence over it."""
        # Get the list of attributes of this dataclass.
        attrs = [attr.name for attr in dataclasses.fields(cls)]
        values = dict(defaults or {})
        if config_file is not None:
            values.update(config_file.flatten())
        # Command-line values win over the config file.
        values.update(
            {attr: getattr(args, attr)
             for attr in attrs if hasattr(args, attr)})
        return cls(**values)

    def create_simulation_configs(
        self,
    ) -> Tuple[ModelConfig, GridConfig, RunConfig, InitialDataConfig,
               SweepConfig]:
        model_config = ModelConfig(self.nonlinearity)
        grid_config = GridConfig(self.lengths, self.points,
                                 self.resolution_coupling)
        run_config = RunConfig(self.eps, self.T, self.dt, self.output_interval,
                               self.splitting, self.vortex_floor,
                               self.use_drift, self.disable_tqdm)
        init_config = InitialDataConfig(self.profile, self.preparedness,
                                        self.amplitude, self.width,
                                        self.transverse_width, self.num_modes,
                                        self.seed, self.theta,
                                        self.phase_profile,
                                        self.phase_amplitude)
        sweep_config = SweepConfig(self.eps_list, self.sobolev_index,
                                   self.worker_use_ray, self.ray_address)
        return model_config, grid_config, run_config, init_config, sweep_config
