"""Fourier differentiation, dealiasing and norms on a PeriodicGrid."""
import enum
import functools
import math
from typing import Optional, Tuple, Union

import torch

from nlskp.common.errors import ZeroMeanViolation
from nlskp.modeling.grid import PeriodicGrid

# Relative tolerance of the zero x-mean precondition.
ZERO_MEAN_RTOL = 1e-10


class NormKind(enum.Enum):
    L2 = enum.auto()
    LINF = enum.auto()
    HS = enum.auto()


class SpectralOps:
    """Spectral calculus bound to one grid.

    Wavenumbers and masks are computed once; every method is a pure
    function of its tensor arguments.
    """

    def __init__(self, grid: PeriodicGrid) -> None:
        self.grid = grid
        self.dims = tuple(range(-grid.dim, 0))
        self.kx = grid.wavenumbers(0)
        self.kperp: Optional[torch.Tensor] = (grid.wavenumbers(1)
                                              if grid.dim > 1 else None)
        self.k_perp_sq = (self.kperp.square() if self.kperp is not None else
                          torch.zeros_like(self.kx))
        self.k_sq = self.kx.square() + self.k_perp_sq
        self.dealias_mask = grid.dealias_mask()
        self.kx_zero = grid.frequency_index(0) == 0
        self.kx_nyquist = grid.nyquist_mask(0)

    def fft(self, u: torch.Tensor) -> torch.Tensor:
        return torch.fft.fftn(u, dim=self.dims)

    def ifft(self, u_hat: torch.Tensor, real: bool = False) -> torch.Tensor:
        u = torch.fft.ifftn(u_hat, dim=self.dims)
        return u.real if real else u

    def _apply(self, u: torch.Tensor, multiplier: torch.Tensor) -> torch.Tensor:
        return self.ifft(multiplier * self.fft(u), real=not u.is_complex())

    def _wavenumber(self, axis) -> Tuple[torch.Tensor, torch.Tensor]:
        index = self.grid.axis_index(axis)
        return self.grid.wavenumbers(index), self.grid.nyquist_mask(index)

    def derivative(self, u: torch.Tensor, axis="x", order: int = 1) -> torch.Tensor:
        if not 1 <= order <= 4:
            raise ValueError(f"Derivative order must be in 1..4, got {order}.")
        k, nyquist = self._wavenumber(axis)
        multiplier = (1j * k)**order
        if order % 2 == 1:
            multiplier = torch.where(nyquist, torch.zeros_like(multiplier),
                                     multiplier)
        return self._apply(u, multiplier)

    def dx(self, u: torch.Tensor, order: int = 1) -> torch.Tensor:
        return self.derivative(u, "x", order)

    def grad_perp(self, u: torch.Tensor) -> Optional[torch.Tensor]:
        """Transverse derivative, or None on a 1D grid."""
        if self.grid.dim == 1:
            return None
        return self.derivative(u, "perp", 1)

    def laplacian_perp(self, u: torch.Tensor) -> torch.Tensor:
        if self.grid.dim == 1:
            return torch.zeros_like(u)
        return self._apply(u, -self.k_perp_sq)

    def laplacian_eps(self, u: torch.Tensor, eps: float) -> torch.Tensor:
        """d_x^2 u + eps^2 Lap_perp u."""
        return self._apply(u, -(self.kx.square() + eps * eps * self.k_perp_sq))

    def x_mean(self, u: torch.Tensor) -> torch.Tensor:
        """Mean along x on every transverse line."""
        return u.mean(dim=-1, keepdim=True)

    def remove_x_mean(self,
                      u: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
        mean = self.x_mean(u)
        return u - mean, mean

    def check_zero_x_mean(self, u: torch.Tensor) -> None:
        tol = ZERO_MEAN_RTOL * self.norm(u, NormKind.L2)
        worst = float(self.x_mean(u).abs().max())
        if worst > tol:
            raise ZeroMeanViolation(
                f"x-mean {worst:.3e} exceeds tolerance {tol:.3e}.")

    def inverse_dx_multiplier(self) -> torch.Tensor:
        """1/(i kx) on kx != 0 modes, zero on kx = 0 and Nyquist."""
        safe_kx = torch.where(self.kx_zero, torch.ones_like(self.kx), self.kx)
        inv = 1.0 / (1j * safe_kx)
        return torch.where(self.kx_zero | self.kx_nyquist,
                           torch.zeros_like(inv), inv)

    def x_antiderivative(self, u: torch.Tensor) -> torch.Tensor:
        self.check_zero_x_mean(u)
        return self._apply(u, self.inverse_dx_multiplier())

    def dealias(self, u: torch.Tensor) -> torch.Tensor:
        return self.ifft(self.dealias_mask * self.fft(u),
                         real=not u.is_complex())

    def integrate(self, u: torch.Tensor) -> torch.Tensor:
        return u.sum(dim=self.dims) * self.grid.cell_volume

    def inner(self, u: torch.Tensor, v: torch.Tensor) -> float:
        """Real L2 pairing sum Re(u conj(v)) dV."""
        return float((u * v.conj()).real.sum() * self.grid.cell_volume)

    def norm(self,
             u: torch.Tensor,
             kind: Union[NormKind, str] = NormKind.L2,
             s: float = 0.0) -> float:
        if isinstance(kind, str):
            kind = NormKind[kind.upper()]
        if kind == NormKind.LINF:
            return float(u.abs().max())
        if kind == NormKind.L2:
            return math.sqrt(
                float(u.abs().square().sum()) * self.grid.cell_volume)
        if s < 0:
            raise ValueError(f"Sobolev index must be >= 0, got {s}.")
        weight = (1.0 + self.k_sq)**s
        n = self.grid.num_points
        total = float((weight * self.fft(u).abs().square()).sum())
        return math.sqrt(total * self.grid.volume / (n * n))

    def shift_x(self, u: torch.Tensor, distance: float) -> torch.Tensor:
        """Returns the periodic translate x -> u(x + distance).

        Whole cells are moved with a roll and the sub-cell remainder with a
        Fourier phase factor.
        """
        length = self.grid.lengths[0]
        dx = self.grid.spacings[0]
        distance = math.fmod(distance, length)
        cells = math.floor(distance / dx)
        remainder = distance - cells * dx
        out = torch.roll(u, shifts=-cells, dims=-1)
        if remainder != 0.0:
            phase = torch.exp(1j * self.kx * remainder)
            out = self._apply(out, phase)
        return out


@functools.lru_cache(maxsize=32)
def get_spectral_ops(grid: PeriodicGrid) -> SpectralOps:
    return SpectralOps(grid)
