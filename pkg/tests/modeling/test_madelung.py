"""Tests for the polar and complex-amplitude variables."""
import math

import pytest
import torch

from nlskp.common.errors import AmplitudeBound, UnwrapAmbiguity, VortexDetected
from nlskp.modeling.madelung import (GrenierState, PolarState,
                                     ScalingDirection, constraint_deficit,
                                     grenier_decompose, grenier_reconstruct,
                                     polar_decompose, reconstruct,
                                     relation_residual, scaling_map)
from nlskp.modeling.spectral import get_spectral_ops

EPS = [0.3, 0.1, 0.05]
SEEDS = [0, 1]


@pytest.mark.parametrize("eps", EPS)
def test_constant_state(grid_factory, eps: float) -> None:
    grid = grid_factory()
    psi = torch.full(grid.shape, (1.0 + eps * eps * 0.3) *
                     complex(math.cos(eps * 0.7), math.sin(eps * 0.7)),
                     dtype=torch.complex128)
    polar = polar_decompose(psi, eps, grid)
    assert torch.allclose(polar.A, torch.full_like(polar.A, 0.3), atol=1e-10)
    assert torch.allclose(polar.phi, torch.full_like(polar.phi, 0.7),
                          atol=1e-10)


def test_background(grid_factory) -> None:
    grid = grid_factory()
    polar = polar_decompose(torch.ones(grid.shape, dtype=torch.complex128),
                            0.1, grid)
    assert torch.equal(polar.A, torch.zeros_like(polar.A))
    assert torch.equal(polar.phi, torch.zeros_like(polar.phi))


@pytest.mark.parametrize("eps", EPS)
@pytest.mark.parametrize("seed", SEEDS)
def test_round_trip(grid_factory, field_factory, eps: float,
                    seed: int) -> None:
    grid = grid_factory((8.0,), (64,))
    A = field_factory(grid, num_modes=4, seed=seed)
    phi = field_factory(grid, num_modes=4, seed=seed + 100)
    psi = reconstruct(PolarState(grid, A, phi, eps))
    polar = polar_decompose(psi, eps, grid)
    assert torch.allclose(polar.A, A, atol=1e-9)
    assert torch.allclose(polar.phi, phi, atol=1e-9)
    assert torch.allclose(reconstruct(polar), psi, atol=1e-12, rtol=0.0)


def test_reconstruct_rejects_large_amplitude(grid_factory) -> None:
    grid = grid_factory()
    eps = 0.2
    A = torch.full(grid.shape, -0.6 / (eps * eps), dtype=torch.float64)
    with pytest.raises(AmplitudeBound):
        reconstruct(PolarState(grid, A, grid.zeros(), eps))


def test_vortex_is_detected(grid_factory) -> None:
    grid = grid_factory()
    psi = torch.tanh(grid.coordinates(0)).to(torch.complex128)
    with pytest.raises(VortexDetected):
        polar_decompose(psi, 0.1, grid, t=0.5)


def test_winding_phase_is_rejected(grid_factory) -> None:
    grid = grid_factory()
    psi = torch.exp(1j * grid.coordinates(0))
    with pytest.raises(UnwrapAmbiguity):
        polar_decompose(psi, 0.1, grid)


def test_constraint_deficit(grid_factory, field_factory) -> None:
    grid = grid_factory()
    ops = get_spectral_ops(grid)
    c = 1.0
    A = field_factory(grid, num_modes=3, seed=0)
    phi = ops.x_antiderivative(2.0 * c * A)
    deficit = constraint_deficit(PolarState(grid, A, phi, 0.1), c)
    assert deficit.raw < 1e-12

    x = grid.coordinates(0)
    deficit = constraint_deficit(
        PolarState(grid, grid.zeros(), -torch.cos(x), 0.1), c)
    assert deficit.raw == pytest.approx(math.sqrt(math.pi))
    assert deficit.scaled == pytest.approx(10.0 * math.sqrt(math.pi))


def test_grenier_with_real_amplitude(grid_factory, field_factory) -> None:
    grid = grid_factory()
    eps = 0.2
    A = field_factory(grid, num_modes=3, seed=0)
    phi = field_factory(grid, num_modes=3, seed=1)
    polar = PolarState(grid, A, phi, eps)
    psi = reconstruct(polar)
    state = grenier_decompose(psi, polar)
    assert torch.allclose(grenier_reconstruct(state), psi, atol=1e-14)
    residual = relation_residual(state, polar)
    assert residual.amplitude < 1e-10
    assert residual.gradient < 1e-10


def test_grenier_zero_amplitude(grid_factory, field_factory) -> None:
    grid = grid_factory()
    eps = 0.2
    theta = field_factory(grid, num_modes=3, seed=0)
    state = GrenierState(grid, grid.zeros(complex=True), theta, eps)
    assert torch.allclose(grenier_reconstruct(state),
                          torch.exp(1j * eps * theta),
                          atol=1e-15)


def test_grenier_bound(grid_factory) -> None:
    grid = grid_factory()
    eps = 0.2
    a = torch.full(grid.shape, 0.6 / (eps * eps), dtype=torch.complex128)
    with pytest.raises(AmplitudeBound):
        grenier_reconstruct(GrenierState(grid, a, grid.zeros(), eps))


def test_scaling_map() -> None:
    scaled = scaling_map(0.5, ScalingDirection.TO_SCALED, (2.0, 3.0))
    assert scaled.time == pytest.approx(0.25)
    assert scaled.longitudinal == pytest.approx(0.5)
    back = scaling_map(0.5, "to_physical", (scaled.time, scaled.longitudinal))
    assert back.time == pytest.approx(2.0)
    assert back.longitudinal == pytest.approx(3.0)
    transverse = scaling_map(0.5, "to_scaled", (0.0, 0.0, 4.0)).transverse
    assert transverse == pytest.approx((1.0,))
    with pytest.raises(ValueError):
        scaling_map(1.5, "to_scaled", (0.0, 0.0))


def test_velocity_2d(grid_factory, field_factory) -> None:
    grid = grid_factory((2.0 * math.pi, 2.0 * math.pi), (16, 16))
    ops = get_spectral_ops(grid)
    eps, c = 0.3, 1.5
    phi = field_factory(grid, num_modes=3, seed=0)
    polar = PolarState(grid, grid.zeros(), phi, eps)
    u1, u_perp = polar.velocity(c)
    assert torch.allclose(u1, ops.dx(phi) / (2.0 * c))
    assert torch.allclose(u_perp, eps * ops.grad_perp(phi) / (2.0 * c))
