"""Initial data families psi0 = (1 + eps^2 A0) exp(i eps phi0) and the
matching limit datum."""
from typing import NamedTuple

import torch

from nlskp.common.config import InitialDataConfig, Preparedness, ProfileKind
from nlskp.common.errors import AmplitudeBound, ConfigError
from nlskp.common.logger import init_logger
from nlskp.modeling.grid import DTYPE, PeriodicGrid
from nlskp.modeling.madelung import PolarState, polar_decompose, reconstruct
from nlskp.modeling.nonlinearity import NonlinearityKind, NonlinearityModel
from nlskp.modeling.solitons import kdv_soliton, scaled_dark_soliton
from nlskp.modeling.spectral import NormKind, get_spectral_ops

logger = init_logger(__name__)


class InitialData(NamedTuple):
    """psi0 with its polar form, the zero x-mean limit datum and the drift
    speed of the limit frame."""
    psi0: torch.Tensor
    polar0: PolarState
    limit_v0: torch.Tensor
    mean_amplitude: float
    drift: float


def _transverse(grid: PeriodicGrid, width: float) -> torch.Tensor:
    if grid.dim == 1:
        return torch.ones((), dtype=DTYPE)
    y = grid.coordinates(1)
    return torch.exp(-(y / width).square())


def profile_samples(kind: ProfileKind, grid: PeriodicGrid, amplitude: float,
                    width: float, transverse_width: float) -> torch.Tensor:
    """sech2 or gaussian bump of the given peak value."""
    x = grid.coordinates(0) / width
    if kind == ProfileKind.SECH2:
        shape = torch.cosh(x).square().reciprocal()
    elif kind == ProfileKind.GAUSSIAN:
        shape = torch.exp(-x.square())
    else:
        raise ConfigError(f"{kind.name.lower()} is not a bump profile.")
    out = amplitude * shape * _transverse(grid, transverse_width)
    return out.expand(grid.shape).clone()


def random_band_limited(grid: PeriodicGrid, amplitude: float, num_modes: int,
                        seed: int) -> torch.Tensor:
    """Real field built from Fourier modes with 1 <= |index_x| <= num_modes
    (and |index_y| <= num_modes in 2D), scaled to sup norm |amplitude|."""
    generator = torch.Generator().manual_seed(seed)
    ops = get_spectral_ops(grid)
    index_x = grid.frequency_index(0).abs()
    keep = (index_x >= 1) & (index_x <= num_modes)
    if grid.dim > 1:
        keep = keep & (grid.frequency_index(1).abs() <= num_modes)
    keep = keep.expand(grid.shape)
    coefficients = torch.complex(
        torch.randn(grid.shape, generator=generator, dtype=DTYPE),
        torch.randn(grid.shape, generator=generator, dtype=DTYPE))
    field = ops.ifft(coefficients * keep, real=True)
    return abs(amplitude) * field / field.abs().max()


def limit_drift(mean_amplitude: float, mean_velocity: float,
                model: NonlinearityModel) -> float:
    """Speed d of the limit frame produced by constant parts of A0 and of
    the velocity d_x phi0/(2c)."""
    return 2.0 * mean_velocity + mean_amplitude * (1.0 + model.f2 /
                                                   model.f1)


def _amplitude(config: InitialDataConfig, grid: PeriodicGrid) -> torch.Tensor:
    if config.profile == ProfileKind.RANDOM_BAND_LIMITED:
        return random_band_limited(grid, config.amplitude, config.num_modes,
                                   config.seed)
    return profile_samples(config.profile, grid, config.amplitude,
                           config.width, config.transverse_width)


def _soliton_data(grid: PeriodicGrid, eps: float,
                  model: NonlinearityModel) -> InitialData:
    if model.kind != NonlinearityKind.GROSS_PITAEVSKII:
        raise ConfigError(
            "The soliton profile is the Gross-Pitaevskii dark soliton; "
            f"got nonlinearity {model.name}.")
    psi0 = scaled_dark_soliton(grid, eps, c=model.c)
    polar0 = polar_decompose(psi0, eps, grid)
    ops = get_spectral_ops(grid)
    limit_v0, mean = ops.remove_x_mean(polar0.A)
    mean_amplitude = float(mean.mean())
    return InitialData(psi0, polar0, limit_v0, mean_amplitude,
                       limit_drift(mean_amplitude, 0.0, model))


def build_initial_data(config: InitialDataConfig, grid: PeriodicGrid,
                       eps: float, model: NonlinearityModel) -> InitialData:
    """Builds psi0 for one eps.

    well_prepared:     d_x phi0 = 2c (A0 - mean A0)
    slightly_prepared: d_x phi0 = 2c (A0 - mean A0) + theta eps g,
                       g = d_x A0/||d_x A0||, so the deficit is theta eps
    ill_prepared:      d_x phi0 = 2c phase_amplitude (P - mean P) for the
                       configured phase profile P; the limit datum is the
                       half-sum (A0 + d_x phi0/(2c))/2

    On 2D grids A0 is made zero x-mean on every line.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must be in (0, 1), got {eps}.")
    if config.profile == ProfileKind.SOLITON:
        return _soliton_data(grid, eps, model)

    ops = get_spectral_ops(grid)
    c = model.c
    A0 = _amplitude(config, grid)
    centered, mean = ops.remove_x_mean(A0)
    if grid.dim > 1:
        A0 = centered
        mean = torch.zeros_like(mean)
    peak = eps * eps * float(A0.abs().max())
    if peak >= 0.5:
        raise AmplitudeBound(
            f"eps^2 ||A0||_inf = {peak:.4f} >= 1/2 for eps={eps:g}.")

    if config.preparedness == Preparedness.WELL_PREPARED:
        phase_x = 2.0 * c * centered
        limit_v0 = centered
    elif config.preparedness == Preparedness.SLIGHTLY_PREPARED:
        slope = ops.dx(A0)
        norm = ops.norm(slope, NormKind.L2)
        if norm == 0.0:
            raise ConfigError("slightly_prepared data need a non-constant A0.")
        phase_x = 2.0 * c * centered + config.theta * eps * slope / norm
        limit_v0 = centered
    else:
        shape = profile_samples(config.phase_profile, grid,
                                config.phase_amplitude, config.width,
                                config.transverse_width)
        phase_x, _ = ops.remove_x_mean(2.0 * c * shape)
        limit_v0, _ = ops.remove_x_mean(0.5 * (A0 + phase_x / (2.0 * c)))

    phi0 = ops.x_antiderivative(phase_x)
    polar0 = PolarState(grid, A0, phi0, eps)
    psi0 = reconstruct(polar0)
    mean_amplitude = float(mean.mean())
    drift = limit_drift(mean_amplitude, 0.0, model)
    logger.debug(f"Initial data eps={eps:g}: max|A0|="
                 f"{float(A0.abs().max()):.4g}, mean A0={mean_amplitude:.4g}, "
                 f"drift={drift:.4g}")
    return InitialData(psi0, polar0, limit_v0, mean_amplitude, drift)


def build_limit_datum(config: InitialDataConfig, grid: PeriodicGrid,
                      model: NonlinearityModel) -> torch.Tensor:
    """Initial field of a stand-alone KdV / KP-I run.

    The soliton profile is the KdV soliton with beta = 1/width (1D only);
    the other profiles are taken with their x-mean removed.
    """
    if config.profile == ProfileKind.SOLITON:
        if grid.dim != 1:
            raise ConfigError("The KdV soliton profile needs a 1D grid.")
        return kdv_soliton(grid, model.c, model.k, beta=1.0 / config.width)
    v0, _ = get_spectral_ops(grid).remove_x_mean(_amplitude(config, grid))
    return v0
