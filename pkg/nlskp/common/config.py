import copy
import enum
import math
from typing import List, NamedTuple, Optional, Sequence, Tuple

from nlskp.common.errors import ConfigError
from nlskp.common.logger import init_logger
from nlskp.modeling.grid import PeriodicGrid
from nlskp.modeling.nonlinearity import NonlinearityModel

logger = init_logger(__name__)

DEFAULT_LENGTH = 32.0 * math.pi
DEFAULT_POINTS = 1024
# Default and largest step of the scaled-time integrators.
DEFAULT_DT = 1e-3
# dt_max = DT_MAX_FACTOR * c * eps * dx^2.
DT_MAX_FACTOR = 0.5


class SplittingMethod(enum.Enum):
    STRANG = enum.auto()
    YOSHIDA4 = enum.auto()


class ProfileKind(enum.Enum):
    SECH2 = enum.auto()
    GAUSSIAN = enum.auto()
    RANDOM_BAND_LIMITED = enum.auto()
    SOLITON = enum.auto()


class Preparedness(enum.Enum):
    WELL_PREPARED = enum.auto()
    SLIGHTLY_PREPARED = enum.auto()
    ILL_PREPARED = enum.auto()


def _parse_enum(enum_cls, value, what: str):
    if isinstance(value, enum_cls):
        return value
    try:
        return enum_cls[str(value).strip().upper()]
    except KeyError as e:
        choices = [m.name.lower() for m in enum_cls]
        raise ConfigError(
            f"Unknown {what} {value!r}. Supported: {choices}.") from e


class ModelConfig:
    """Configuration for the nonlinearity.

    Args:
        nonlinearity: "gp", "cubic_quintic", "cubic_quintic:<alpha>,<beta>"
            or "poly:<c0,c1,...>" for f(R) = sum_j c_j R^j.
    """

    def __init__(self, nonlinearity: str = "gp") -> None:
        self.nonlinearity = nonlinearity
        self.model = NonlinearityModel.from_string(nonlinearity)

    def __repr__(self) -> str:
        return f"ModelConfig(nonlinearity={self.nonlinearity!r})"


class GridConfig:
    """Configuration for the periodic box.

    Args:
        lengths: Box length per axis, x first. Defaults to 32 pi in x.
        points: Samples per axis, x first; powers of two, at least 8.
        resolution_coupling: If set, Nx is raised to the next power of two
            of ceil(resolution_coupling / eps) for every eps.
    """

    def __init__(
        self,
        lengths: Sequence[float] = (DEFAULT_LENGTH,),
        points: Sequence[int] = (DEFAULT_POINTS,),
        resolution_coupling: Optional[float] = None,
    ) -> None:
        self.lengths = tuple(float(l) for l in lengths)
        self.points = tuple(int(n) for n in points)
        self.resolution_coupling = resolution_coupling
        self._verify_args()

    def _verify_args(self) -> None:
        # PeriodicGrid validates sizes and lengths.
        PeriodicGrid(self.lengths, self.points)
        if (self.resolution_coupling is not None
                and not self.resolution_coupling > 0):
            raise ConfigError(
                "resolution_coupling must be positive, got "
                f"{self.resolution_coupling}.")

    @property
    def dim(self) -> int:
        return len(self.points)

    def make_grid(self, eps: Optional[float] = None) -> PeriodicGrid:
        points = list(self.points)
        if self.resolution_coupling is not None and eps is not None:
            needed = math.ceil(self.resolution_coupling / eps)
            points[0] = max(points[0], 1 << max(3, (needed - 1).bit_length()))
        return PeriodicGrid(self.lengths, points)

    def __repr__(self) -> str:
        return (f"GridConfig(lengths={self.lengths}, points={self.points}, "
                f"resolution_coupling={self.resolution_coupling})")


class TimeGrid(NamedTuple):
    dt: float
    num_steps: int
    stride: int
    dt_max: float

    def output_steps(self) -> List[int]:
        """Step indices at which snapshots are stored; always includes the
        first and the last step."""
        steps = list(range(0, self.num_steps + 1, self.stride))
        if steps[-1] != self.num_steps:
            steps.append(self.num_steps)
        return steps


class RunConfig:
    """Configuration for one time integration.

    Args:
        eps: Scaling parameter in (0, 1). Sweeps set it per branch.
        T: Scaled time horizon.
        dt: Time step. Defaults to min(1e-3, dt_max).
        output_interval: Scaled time between stored snapshots. Defaults to
            every step.
        splitting: "strang" or "yoshida4".
        vortex_floor: The run stops when min |psi| reaches this value.
        use_drift: Give the limit equations the mean-flow drift of the
            initial datum.
        disable_tqdm: Disable progress bars.
    """

    def __init__(
        self,
        eps: Optional[float] = None,
        T: float = 1.0,
        dt: Optional[float] = None,
        output_interval: Optional[float] = None,
        splitting: str = "strang",
        vortex_floor: float = 0.25,
        use_drift: bool = True,
        disable_tqdm: bool = False,
    ) -> None:
        self.eps = eps
        self.T = T
        self.dt = dt
        self.output_interval = output_interval
        self.splitting = _parse_enum(SplittingMethod, splitting, "splitting")
        self.vortex_floor = vortex_floor
        self.use_drift = use_drift
        self.disable_tqdm = disable_tqdm
        self._verify_args()

    def _verify_args(self) -> None:
        if self.eps is not None and not 0.0 < self.eps < 1.0:
            raise ConfigError(f"eps must be in (0, 1), got {self.eps}.")
        if not (math.isfinite(self.T) and self.T >= 0.0):
            raise ConfigError(f"T must be a finite value >= 0, got {self.T}.")
        if self.dt is not None and not self.dt > 0.0:
            raise ConfigError(f"dt must be positive, got {self.dt}.")
        if self.output_interval is not None and not self.output_interval > 0:
            raise ConfigError(
                f"output_interval must be positive, got {self.output_interval}.")
        if not 0.0 < self.vortex_floor < 1.0:
            raise ConfigError(
                f"vortex_floor must be in (0, 1), got {self.vortex_floor}.")

    def with_eps(self, eps: float) -> "RunConfig":
        config = copy.copy(self)
        config.eps = eps
        config._verify_args()
        return config

    def require_eps(self) -> float:
        if self.eps is None:
            raise ConfigError("This run needs eps to be set.")
        return self.eps

    def dt_max(self, grid: PeriodicGrid, c: float) -> float:
        return DT_MAX_FACTOR * c * self.require_eps() * grid.spacings[0]**2

    def resolve_time_grid(self, grid: PeriodicGrid, c: float) -> TimeGrid:
        dt_max = self.dt_max(grid, c)
        dt = self.dt if self.dt is not None else min(DEFAULT_DT, dt_max)
        if self.dt is not None and self.dt > dt_max:
            logger.warning(f"dt={self.dt:g} exceeds dt_max={dt_max:g} for "
                           f"eps={self.eps:g}; splitting accuracy may suffer.")
        if self.T == 0.0:
            return TimeGrid(dt=dt, num_steps=0, stride=1, dt_max=dt_max)
        num_steps = max(1, round(self.T / dt))
        dt = self.T / num_steps
        stride = 1
        if self.output_interval is not None:
            stride = max(1, round(self.output_interval / dt))
        return TimeGrid(dt=dt, num_steps=num_steps, stride=stride,
                        dt_max=dt_max)

    def __repr__(self) -> str:
        return (f"RunConfig(eps={self.eps}, T={self.T}, dt={self.dt}, "
                f"output_interval={self.output_interval}, "
                f"splitting={self.splitting.name.lower()}, "
                f"vortex_floor={self.vortex_floor}, "
                f"use_drift={self.use_drift})")


class InitialDataConfig:
    """Configuration for the initial datum family.

    Args:
        profile: "sech2", "gaussian", "random_band_limited" or "soliton".
        preparedness: "well_prepared", "slightly_prepared" or
            "ill_prepared".
        amplitude: Peak value of A0 for sech2 and gaussian profiles, and
            the L-infinity size of random_band_limited.
        width: x-width of the profile.
        transverse_width: Gaussian width in the transverse variable (2D).
        num_modes: Number of Fourier modes of random_band_limited.
        seed: Seed of random_band_limited.
        theta: Constraint deficit of slightly_prepared data in units of eps.
        phase_profile: Profile of d_x phi0/(2c) for ill_prepared data.
        phase_amplitude: Amplitude of that profile; 0 gives phi0 = 0.
    """

    def __init__(
        self,
        profile: str = "sech2",
        preparedness: str = "well_prepared",
        amplitude: float = -0.5,
        width: float = 1.0,
        transverse_width: float = 4.0,
        num_modes: int = 8,
        seed: int = 0,
        theta: float = 1.0,
        phase_profile: str = "gaussian",
        phase_amplitude: float = 0.0,
    ) -> None:
        self.profile = _parse_enum(ProfileKind, profile, "profile")
        self.preparedness = _parse_enum(Preparedness, preparedness,
                                        "preparedness")
        self.amplitude = amplitude
        self.width = width
        self.transverse_width = transverse_width
        self.num_modes = num_modes
        self.seed = seed
        self.theta = theta
        self.phase_profile = _parse_enum(ProfileKind, phase_profile,
                                         "phase profile")
        self.phase_amplitude = phase_amplitude
        self._verify_args()

    def _verify_args(self) -> None:
        if not self.width > 0 or not self.transverse_width > 0:
            raise ConfigError("Profile widths must be positive.")
        if self.num_modes < 1:
            raise ConfigError(
                f"num_modes must be at least 1, got {self.num_modes}.")
        if self.phase_profile in (ProfileKind.SOLITON,
                                  ProfileKind.RANDOM_BAND_LIMITED):
            raise ConfigError(
                "phase_profile must be sech2 or gaussian, got "
                f"{self.phase_profile.name.lower()}.")

    def __repr__(self) -> str:
        return (f"InitialDataConfig(profile={self.profile.name.lower()}, "
                f"preparedness={self.preparedness.name.lower()}, "
                f"amplitude={self.amplitude}, width={self.width}, "
                f"transverse_width={self.transverse_width}, "
                f"num_modes={self.num_modes}, seed={self.seed}, "
                f"theta={self.theta}, "
                f"phase_profile={self.phase_profile.name.lower()}, "
                f"phase_amplitude={self.phase_amplitude})")


class SweepConfig:
    """Configuration for an eps-sweep.

    Args:
        eps_list: Strictly decreasing values in (0, 1).
        sobolev_index: s of the H^s error series.
        worker_use_ray: Run branches as Ray tasks.
        ray_address: Address of an existing Ray cluster.
    """

    def __init__(
        self,
        eps_list: Sequence[float] = (0.2, 0.1, 0.05),
        sobolev_index: float = 1.0,
        worker_use_ray: bool = False,
        ray_address: Optional[str] = None,
    ) -> None:
        self.eps_list: Tuple[float, ...] = tuple(float(e) for e in eps_list)
        self.sobolev_index = sobolev_index
        self.worker_use_ray = worker_use_ray
        self.ray_address = ray_address
        self._verify_args()

    def _verify_args(self) -> None:
        if not self.eps_list:
            raise ConfigError("eps_list must not be empty.")
        for eps in self.eps_list:
            if not 0.0 < eps < 1.0:
                raise ConfigError(f"eps values must be in (0, 1), got {eps}.")
        for coarse, fine in zip(self.eps_list, self.eps_list[1:]):
            if not fine < coarse:
                raise ConfigError(
                    f"eps_list must be strictly decreasing, got "
                    f"{list(self.eps_list)}.")
        if self.sobolev_index < 0:
            raise ConfigError(
                f"sobolev_index must be >= 0, got {self.sobolev_index}.")

    def __repr__(self) -> str:
        return (f"SweepConfig(eps_list={list(self.eps_list)}, "
                f"sobolev_index={self.sobolev_index}, "
                f"worker_use_ray={self.worker_use_ray})")
