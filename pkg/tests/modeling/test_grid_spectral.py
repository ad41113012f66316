"""Tests for periodic grids and spectral calculus."""
import math

import pytest
import torch

from nlskp.common.errors import ConfigError, ZeroMeanViolation
from nlskp.modeling.grid import COMPLEX_DTYPE, Field, PeriodicGrid
from nlskp.modeling.spectral import NormKind, get_spectral_ops

POINTS = [32, 64, 128]
ORDERS = [1, 2, 3, 4]
MODES = [1, 3, 5]
SHIFTS = [0.3, -1.7, 10.0]
BAD_GRIDS = [
    ((2.0 * math.pi,), (12,)),
    ((2.0 * math.pi,), (4,)),
    ((1.0, 1.0, 1.0), (8, 8, 8)),
    ((1.0,), (8, 8)),
    ((-1.0,), (8,)),
]


def test_grid_layout(grid_factory) -> None:
    grid = grid_factory((4.0, 2.0), (16, 8))
    assert grid.dim == 2
    assert grid.shape == (8, 16)
    assert grid.spacings == (0.25, 0.25)
    x = grid.coordinates(0).reshape(-1)
    assert float(x[0]) == -2.0
    assert float(x[-1]) == pytest.approx(2.0 - 0.25)
    assert int(grid.nyquist_mask(0).sum()) == 1
    assert grid == PeriodicGrid((4.0, 2.0), (16, 8))


@pytest.mark.parametrize("lengths, points", BAD_GRIDS)
def test_invalid_grids(lengths, points) -> None:
    with pytest.raises(ConfigError):
        PeriodicGrid(lengths, points)


def test_field_validation(grid_factory) -> None:
    grid = grid_factory()
    Field(grid, grid.zeros(complex=True))
    with pytest.raises(ValueError):
        Field(grid, torch.zeros(32, dtype=torch.float64))
    with pytest.raises(ValueError):
        Field(grid, torch.zeros(64, dtype=torch.float32))
    with pytest.raises(ValueError):
        Field(grid, torch.full((64,), float("nan"), dtype=torch.float64))


@pytest.mark.parametrize("points", POINTS)
def test_derivative_of_sine(grid_factory, points: int) -> None:
    grid = grid_factory((2.0 * math.pi,), (points,))
    ops = get_spectral_ops(grid)
    x = grid.coordinates(0)
    assert torch.allclose(ops.dx(torch.sin(x)), torch.cos(x), atol=1e-12)


@pytest.mark.parametrize("order", ORDERS)
def test_derivative_of_constant(grid_factory, order: int) -> None:
    grid = grid_factory()
    ops = get_spectral_ops(grid)
    u = torch.full(grid.shape, 3.0, dtype=torch.float64)
    assert torch.allclose(ops.dx(u, order), torch.zeros_like(u), atol=1e-12)


@pytest.mark.parametrize("mode", MODES)
def test_second_derivative_of_plane_wave(grid_factory, mode: int) -> None:
    grid = grid_factory()
    ops = get_spectral_ops(grid)
    wave = torch.exp(1j * mode * grid.coordinates(0))
    assert torch.allclose(ops.dx(wave, 2), -mode**2 * wave, atol=1e-10)


def test_derivative_zeroes_odd_nyquist(grid_factory) -> None:
    grid = grid_factory((2.0 * math.pi,), (16,))
    ops = get_spectral_ops(grid)
    nyquist = torch.cos(8.0 * grid.coordinates(0))
    assert torch.allclose(ops.derivative(nyquist, "x", 1),
                          torch.zeros_like(nyquist),
                          atol=1e-12)
    assert torch.allclose(ops.derivative(nyquist, "x", 2), -64.0 * nyquist,
                          atol=1e-9)


def test_derivative_rejects_bad_arguments(grid_factory) -> None:
    ops = get_spectral_ops(grid_factory())
    u = grid_factory().zeros()
    with pytest.raises(ValueError):
        ops.derivative(u, "x", 5)
    with pytest.raises(ValueError):
        ops.derivative(u, "y", 1)


def test_antiderivative(grid_factory, field_factory) -> None:
    grid = grid_factory((8.0,), (64,))
    ops = get_spectral_ops(grid)
    u = field_factory(grid, num_modes=5, seed=0)
    assert torch.allclose(ops.dx(ops.x_antiderivative(u)), u, atol=1e-12)
    with pytest.raises(ZeroMeanViolation):
        ops.x_antiderivative(torch.ones(grid.shape, dtype=torch.float64))


def test_norms(grid_factory) -> None:
    grid = grid_factory()
    ops = get_spectral_ops(grid)
    x = grid.coordinates(0)
    u = torch.sin(x)
    assert ops.norm(u, NormKind.L2) == pytest.approx(math.sqrt(math.pi))
    assert ops.norm(u, NormKind.HS, s=0.0) == pytest.approx(
        math.sqrt(math.pi))
    assert ops.norm(u, NormKind.LINF) == pytest.approx(1.0, abs=1e-2)
    wave = torch.exp(3j * x)
    assert ops.norm(wave, "hs", s=1.0) == pytest.approx(
        math.sqrt(2.0 * math.pi * 10.0))
    with pytest.raises(ValueError):
        ops.norm(u, NormKind.HS, s=-1.0)


def test_dealias(grid_factory) -> None:
    grid = grid_factory()
    ops = get_spectral_ops(grid)
    x = grid.coordinates(0)
    low = torch.cos(3.0 * x)
    assert torch.allclose(ops.dealias(low), low, atol=1e-13)
    nyquist = torch.cos(32.0 * x)
    assert torch.allclose(ops.dealias(nyquist), torch.zeros_like(nyquist),
                          atol=1e-13)


@pytest.mark.parametrize("distance", SHIFTS)
def test_shift_x(grid_factory, distance: float) -> None:
    grid = grid_factory()
    ops = get_spectral_ops(grid)
    x = grid.coordinates(0)
    u = torch.sin(x) + 0.5 * torch.cos(2.0 * x)
    expected = torch.sin(x + distance) + 0.5 * torch.cos(2.0 * (x + distance))
    assert torch.allclose(ops.shift_x(u, distance), expected, atol=1e-12)


def test_transverse_operators(grid_factory) -> None:
    grid = grid_factory((2.0 * math.pi, 2.0 * math.pi), (32, 16))
    ops = get_spectral_ops(grid)
    x, y = grid.mesh()
    u = torch.cos(y) * torch.sin(x)
    eps = 0.3
    assert torch.allclose(ops.grad_perp(u), -torch.sin(y) * torch.sin(x),
                          atol=1e-12)
    assert torch.allclose(ops.laplacian_eps(u, eps),
                          -(1.0 + eps * eps) * u,
                          atol=1e-12)
    line_grid = PeriodicGrid((2.0 * math.pi,), (16,))
    assert get_spectral_ops(line_grid).grad_perp(line_grid.zeros()) is None


def test_complex_fields_keep_dtype(grid_factory) -> None:
    grid = grid_factory()
    ops = get_spectral_ops(grid)
    psi = torch.exp(1j * grid.coordinates(0)).to(COMPLEX_DTYPE)
    assert ops.dx(psi).dtype == COMPLEX_DTYPE
    assert ops.dx(psi.real).dtype == torch.float64
