"""Uniform periodic grids in one and two dimensions.

Samples are stored as torch tensors of shape (Nx,) or (Ny, Nx): x is always
the last dimension and the transverse variable the one before it.
"""
import math
from typing import Sequence, Tuple

import torch

from nlskp.common.errors import ConfigError

DTYPE = torch.float64
COMPLEX_DTYPE = torch.complex128

_AXIS_NAMES = {"x": 0, "y": 1, "perp": 1}


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


class PeriodicGrid:
    """A periodic box [-L_i/2, L_i/2) sampled at N_i points per axis.

    Args:
        lengths: Box length per axis, x first.
        points: Number of samples per axis, x first. Each must be a power
            of two and at least 8.
    """

    def __init__(self, lengths: Sequence[float], points: Sequence[int]) -> None:
        self.lengths: Tuple[float, ...] = tuple(float(l) for l in lengths)
        self.points: Tuple[int, ...] = tuple(int(n) for n in points)
        self._verify_args()

        self.dim = len(self.points)
        self.spacings = tuple(l / n for l, n in zip(self.lengths, self.points))
        self.cell_volume = math.prod(self.spacings)
        self.volume = math.prod(self.lengths)
        self.num_points = math.prod(self.points)
        # Tensor shape is the axis order reversed: x varies fastest.
        self.shape = tuple(reversed(self.points))

    def _verify_args(self) -> None:
        if len(self.lengths) != len(self.points):
            raise ConfigError(
                f"Got {len(self.lengths)} lengths for {len(self.points)} "
                "axes.")
        if len(self.points) not in (1, 2):
            raise ConfigError(
                f"Only 1D and 2D grids are supported, got {len(self.points)} "
                "axes.")
        for n in self.points:
            if n < 8 or not _is_power_of_two(n):
                raise ConfigError(
                    f"Grid sizes must be powers of two >= 8, got {n}.")
        for l in self.lengths:
            if not (math.isfinite(l) and l > 0):
                raise ConfigError(f"Box lengths must be positive, got {l}.")

    def axis_index(self, axis) -> int:
        """Maps "x" / "y" / "perp" / 0 / 1 to an axis index."""
        index = _AXIS_NAMES.get(axis, axis) if isinstance(axis, str) else axis
        if not isinstance(index, int) or not 0 <= index < self.dim:
            raise ValueError(
                f"Axis {axis!r} is out of range for a {self.dim}D grid.")
        return index

    def tensor_dim(self, axis) -> int:
        return -1 - self.axis_index(axis)

    def _broadcast(self, values: torch.Tensor, index: int) -> torch.Tensor:
        shape = [1] * self.dim
        shape[self.dim - 1 - index] = values.numel()
        return values.reshape(shape)

    def coordinates(self, axis=0) -> torch.Tensor:
        """Sample positions along one axis, broadcastable to `shape`."""
        index = self.axis_index(axis)
        n, l = self.points[index], self.lengths[index]
        x = -0.5 * l + torch.arange(n, dtype=DTYPE) * (l / n)
        return self._broadcast(x, index)

    def mesh(self) -> Tuple[torch.Tensor, ...]:
        """Full-shape coordinate arrays, x first."""
        return tuple(
            self.coordinates(i).expand(self.shape) for i in range(self.dim))

    def frequency_index(self, axis=0) -> torch.Tensor:
        """Integer FFT frequency indices; the Nyquist index is -N/2."""
        index = self.axis_index(axis)
        n = self.points[index]
        freq = torch.fft.fftfreq(n, d=1.0 / n, dtype=DTYPE).round()
        return self._broadcast(freq, index)

    def wavenumbers(self, axis=0) -> torch.Tensor:
        index = self.axis_index(axis)
        n, l = self.points[index], self.lengths[index]
        k = 2.0 * math.pi * torch.fft.fftfreq(n, d=l / n, dtype=DTYPE)
        return self._broadcast(k, index)

    def nyquist_mask(self, axis=0) -> torch.Tensor:
        index = self.axis_index(axis)
        return self.frequency_index(index) == -(self.points[index] // 2)

    def dealias_mask(self) -> torch.Tensor:
        """True on modes kept by the 2/3 rule on every axis."""
        mask = torch.ones(self.shape, dtype=torch.bool)
        for i in range(self.dim):
            mask = mask & (self.frequency_index(i).abs() <= self.points[i] / 3)
        return mask

    def zeros(self, complex: bool = False) -> torch.Tensor:
        return torch.zeros(self.shape,
                           dtype=COMPLEX_DTYPE if complex else DTYPE)

    def is_compatible(self, samples: torch.Tensor) -> bool:
        return tuple(samples.shape) == self.shape

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PeriodicGrid):
            return NotImplemented
        return (self.lengths == other.lengths
                and self.points == other.points)

    def __hash__(self) -> int:
        return hash((self.lengths, self.points))

    def __repr__(self) -> str:
        return (f"PeriodicGrid(lengths={self.lengths}, "
                f"points={self.points})")


class Field:
    """Real or complex samples tied to a grid.

    Real fields play the role of ScalarField and complex ones of
    ComplexField; the dtype tells them apart.
    """

    def __init__(self, grid: PeriodicGrid, samples: torch.Tensor) -> None:
        self.grid = grid
        self.samples = samples
        self._verify_args()

    def _verify_args(self) -> None:
        if not self.grid.is_compatible(self.samples):
            raise ValueError(
                f"Samples of shape {tuple(self.samples.shape)} do not match "
                f"{self.grid} (expected {self.grid.shape}).")
        if self.samples.dtype not in (DTYPE, COMPLEX_DTYPE):
            raise ValueError(
                f"Fields are double precision, got {self.samples.dtype}.")
        if not bool(torch.isfinite(self.samples).all()):
            raise ValueError("Field samples must be finite.")

    @property
    def is_complex(self) -> bool:
        return self.samples.is_complex()

    def __repr__(self) -> str:
        kind = "complex" if self.is_complex else "real"
        return f"Field({kind}, grid={self.grid})"
