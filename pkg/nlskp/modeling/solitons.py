"""Exact soliton profiles used as oracles and as initial data."""
import math
from typing import NamedTuple, Union

import torch

from nlskp.common.errors import ConfigError
from nlskp.modeling.grid import COMPLEX_DTYPE, DTYPE, PeriodicGrid
from nlskp.modeling.spectral import SpectralOps

Number = Union[float, torch.Tensor]


def dark_soliton_gp(sigma: float, z: Number) -> Union[complex, torch.Tensor]:
    """U(z) = sigma - i sqrt(1 - sigma^2) tanh(z sqrt(1 - sigma^2)).

    Travels at speed sigma for the Gross-Pitaevskii nonlinearity.
    """
    if not 0.0 < sigma < 1.0:
        raise ValueError(f"Soliton speed must be in (0, 1), got {sigma}.")
    width = math.sqrt(1.0 - sigma * sigma)
    if isinstance(z, torch.Tensor):
        return torch.complex(
            torch.full_like(z, sigma, dtype=DTYPE),
            -width * torch.tanh(width * z.to(DTYPE)))
    return complex(sigma, -width * math.tanh(width * z))


def soliton_eps(sigma: float) -> float:
    return math.sqrt(1.0 - sigma * sigma)


def soliton_sigma(eps: float) -> float:
    return math.sqrt(1.0 - eps * eps)


def periodic_boost(eps: float, length_x: float) -> float:
    """Wavenumber q of the Galilean boost that makes the soliton's phase
    jump periodic on a box of scaled length `length_x`."""
    return 2.0 * math.asin(eps) * eps / length_x


def scaled_dark_soliton(grid: PeriodicGrid,
                        eps: float,
                        t: float = 0.0,
                        c: float = 1.0) -> torch.Tensor:
    """The GP dark soliton with sigma = sqrt(1 - eps^2) in scaled variables.

    Exact periodic NLS solution on `grid` up to the exponentially small
    mismatch of tanh at the box edge.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must be in (0, 1), got {eps}.")
    sigma = soliton_sigma(eps)
    q = periodic_boost(eps, grid.lengths[0])
    tau = t / (c * eps**3)
    z = grid.coordinates(0) / eps + c * tau
    profile = dark_soliton_gp(sigma, z - (sigma + q) * tau)
    phase = torch.exp(1j * (q * z - 0.5 * q * q * tau))
    psi = (profile * phase).to(COMPLEX_DTYPE)
    return psi.expand(grid.shape).clone()


def scaled_soliton_speed(eps: float, length_x: float, c: float = 1.0) -> float:
    """Velocity of the dark soliton center in the scaled frame."""
    sigma = soliton_sigma(eps)
    q = periodic_boost(eps, length_x)
    return (sigma + q - c) / eps**2


class KdvSolitonConstants(NamedTuple):
    amplitude: float
    speed: float


def kdv_soliton_constants(c: float, k: float, beta: float) -> KdvSolitonConstants:
    """Amplitude and speed of v = a sech^2(beta (x - s t)) solving
    2 v_t + k v v_x - v_xxx/(4 c^2) = 0."""
    if k == 0.0:
        raise ConfigError("The KdV soliton needs a nonzero k.")
    return KdvSolitonConstants(amplitude=-3.0 * beta * beta / (k * c * c),
                               speed=-beta * beta / (2.0 * c * c))


def kdv_soliton(grid: PeriodicGrid,
                c: float,
                k: float,
                beta: float = 1.0,
                t: float = 0.0,
                center: float = 0.0,
                drift: float = 0.0) -> torch.Tensor:
    """Samples the KdV soliton at time t, wrapped periodically in x."""
    amplitude, speed = kdv_soliton_constants(c, k, beta)
    length = grid.lengths[0]
    shift = center + (speed + drift) * t
    x = grid.coordinates(0) - shift
    # Nearest periodic image.
    x = x - length * torch.round(x / length)
    v = amplitude / torch.cosh(beta * x).square()
    return v.expand(grid.shape).clone()


class KdvResidualFit(NamedTuple):
    amplitude: float
    speed: float
    residual: float


def kdv_residual_oracle(grid: PeriodicGrid, c: float, k: float,
                        beta: float = 1.0) -> KdvResidualFit:
    """Fits (s, a) in s (-2 S') + a (k S S') = S'''/(4 c^2) with
    S = sech^2(beta x) by least squares.

    Gives the soliton constants from the equation alone, without relying on
    a closed form.
    """
    x = grid.coordinates(0).reshape(-1)
    shape = torch.cosh(beta * x).square().reciprocal()
    one_d = PeriodicGrid(grid.lengths[:1], grid.points[:1])
    ops = SpectralOps(one_d)
    s1 = ops.dx(shape, 1)
    s3 = ops.dx(shape, 3)
    design = torch.stack([-2.0 * s1, k * shape * s1], dim=1)
    rhs = (s3 / (4.0 * c * c)).unsqueeze(1)
    solution = torch.linalg.lstsq(design, rhs, driver="gelsd").solution
    speed, amplitude = (float(v) for v in solution.reshape(-1))
    residual = float((design @ solution - rhs).norm() / rhs.norm())
    return KdvResidualFit(amplitude=amplitude, speed=speed, residual=residual)

