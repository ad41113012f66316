import math
from typing import Sequence

import pytest
import torch

from nlskp.modeling.grid import DTYPE, PeriodicGrid
from nlskp.modeling.nonlinearity import NonlinearityModel


def create_grid(
        lengths: Sequence[float] = (2.0 * math.pi,),
        points: Sequence[int] = (64,),
) -> PeriodicGrid:
    return PeriodicGrid(lengths, points)


def create_smooth_field(
        grid: PeriodicGrid,
        num_modes: int,
        seed: int,
        scale: float = 1.0,
) -> torch.Tensor:
    """Real trigonometric polynomial with random coefficients on the lowest
    modes of every axis."""
    generator = torch.Generator().manual_seed(seed)
    out = grid.zeros()
    for mode in range(1, num_modes + 1):
        amplitude, offset = torch.rand(2, generator=generator,
                                       dtype=DTYPE).tolist()
        term = torch.ones(grid.shape, dtype=DTYPE)
        for axis in range(grid.dim):
            k = 2.0 * math.pi * mode / grid.lengths[axis]
            term = term * torch.cos(k * grid.coordinates(axis) +
                                    2.0 * math.pi * offset)
        out = out + amplitude * term / mode
    return scale * out


@pytest.fixture()
def grid_factory():
    return create_grid


@pytest.fixture()
def field_factory():
    return create_smooth_field


@pytest.fixture()
def gp_model() -> NonlinearityModel:
    return NonlinearityModel.gross_pitaevskii()
