"""Polar (A, phi) and Grenier (a, theta) variables of a scaled wavefunction.

    psi = (1 + eps^2 A) exp(i eps phi) = (1 + eps^2 a) exp(i eps theta)

with A, phi real and a complex.
"""
import enum
import math
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import torch

from nlskp.common.errors import AmplitudeBound, UnwrapAmbiguity, VortexDetected
from nlskp.common.logger import init_logger
from nlskp.modeling.grid import PeriodicGrid
from nlskp.modeling.spectral import NormKind, get_spectral_ops

logger = init_logger(__name__)

VORTEX_FLOOR = 0.25
# Largest phase increment per cell accepted by the unwrap.
UNWRAP_MAX_STEP = 0.5 * math.pi
# Polar variables require 1 + eps^2 A >= AMPLITUDE_FLOOR.
AMPLITUDE_FLOOR = 0.5


class PolarState:
    """Amplitude A and unwrapped phase phi at fixed eps.

    Args:
        grid: Grid of the samples.
        A: Amplitude perturbation, real.
        phi: Phase divided by eps, real.
        eps: Scaling parameter.
        transverse_jumps: Number of 2 pi jumps between neighbouring x-lines
            found by the unwrap (2D only).
    """

    def __init__(self,
                 grid: PeriodicGrid,
                 A: torch.Tensor,
                 phi: torch.Tensor,
                 eps: float,
                 transverse_jumps: int = 0) -> None:
        self.grid = grid
        self.A = A
        self.phi = phi
        self.eps = eps
        self.transverse_jumps = transverse_jumps

    @property
    def rho(self) -> torch.Tensor:
        return 1.0 + self.eps * self.eps * self.A

    def velocity(self, c: float) -> Tuple[torch.Tensor, Optional[torch.Tensor]]:
        return velocity(self.phi, self.eps, c, self.grid)

    def __repr__(self) -> str:
        return (f"PolarState(grid={self.grid}, eps={self.eps}, "
                f"max|A|={float(self.A.abs().max()):.3e}, "
                f"transverse_jumps={self.transverse_jumps})")


class GrenierState:
    """Complex amplitude a and real phase theta at fixed eps."""

    def __init__(self, grid: PeriodicGrid, a: torch.Tensor,
                 theta: torch.Tensor, eps: float) -> None:
        self.grid = grid
        self.a = a
        self.theta = theta
        self.eps = eps

    def velocity(self, c: float) -> Tuple[torch.Tensor, Optional[torch.Tensor]]:
        return velocity(self.theta, self.eps, c, self.grid)

    def __repr__(self) -> str:
        return (f"GrenierState(grid={self.grid}, eps={self.eps}, "
                f"max|a|={float(self.a.abs().max()):.3e})")


def velocity(phase: torch.Tensor, eps: float, c: float,
             grid: PeriodicGrid) -> Tuple[torch.Tensor, Optional[torch.Tensor]]:
    """(d_x phase, eps grad_perp phase)/(2c); the transverse part is None
    in 1D."""
    ops = get_spectral_ops(grid)
    u1 = ops.dx(phase) / (2.0 * c)
    grad = ops.grad_perp(phase)
    u_perp = None if grad is None else eps * grad / (2.0 * c)
    return u1, u_perp


def _wrap(angle: torch.Tensor) -> torch.Tensor:
    """Maps angles to [-pi, pi)."""
    return torch.remainder(angle + math.pi, 2.0 * math.pi) - math.pi


def unwrap_x(theta: torch.Tensor) -> torch.Tensor:
    """Unwraps principal phases along x, keeping the first sample of every
    line at its principal value."""
    steps = _wrap(torch.diff(theta, dim=-1))
    closing = _wrap(theta[..., :1] - theta[..., -1:])
    all_steps = torch.cat([steps, closing], dim=-1)
    worst = float(all_steps.abs().max())
    if worst > UNWRAP_MAX_STEP:
        raise UnwrapAmbiguity(
            f"Phase increment {worst:.3f} per cell exceeds pi/2; the grid "
            "does not resolve the phase.")
    winding = float(all_steps.sum(dim=-1).abs().max())
    if winding > math.pi:
        raise UnwrapAmbiguity(
            f"Phase winds by {winding / (2 * math.pi):.2f} turns along x; "
            "a periodic phase does not exist.")
    unwrapped = torch.cat(
        [theta[..., :1], theta[..., :1] + torch.cumsum(steps, dim=-1)], dim=-1)
    return unwrapped


def _count_transverse_jumps(phase: torch.Tensor) -> int:
    if phase.dim() < 2:
        return 0
    jumps = torch.diff(phase, dim=-2).abs() > math.pi
    return int(jumps.sum())


def polar_decompose(psi: torch.Tensor,
                    eps: float,
                    grid: PeriodicGrid,
                    vortex_floor: float = VORTEX_FLOOR,
                    t: Optional[float] = None) -> PolarState:
    rho = psi.abs()
    rho_min = float(rho.min())
    if rho_min <= vortex_floor:
        raise VortexDetected(
            f"min |psi| = {rho_min:.4f} is at or below the vortex floor "
            f"{vortex_floor}.", t)
    A = (rho - 1.0) / (eps * eps)
    phase = unwrap_x(torch.angle(psi))
    jumps = _count_transverse_jumps(phase)
    if jumps:
        logger.warning(
            f"Unwrapped phase has {jumps} 2pi jumps between neighbouring "
            "x-lines; transverse derivatives of phi are unreliable.")
    return PolarState(grid, A, phase / eps, eps, transverse_jumps=jumps)


def reconstruct(polar: PolarState) -> torch.Tensor:
    rho = polar.rho
    rho_min = float(rho.min())
    if rho_min < AMPLITUDE_FLOOR:
        raise AmplitudeBound(
            f"1 + eps^2 A reaches {rho_min:.4f} < {AMPLITUDE_FLOOR}.")
    return torch.polar(rho, polar.eps * polar.phi)


class ConstraintDeficit(NamedTuple):
    raw: float
    scaled: float


def constraint_deficit(polar: PolarState, c: float) -> ConstraintDeficit:
    """||d_x phi - 2c A|| without the x-mean of every line.

    A periodic phase has a zero-mean x-derivative, so the x-mean of A is
    reported separately by `constraint_mean_mismatch`.
    """
    ops = get_spectral_ops(polar.grid)
    mismatch, _ = ops.remove_x_mean(ops.dx(polar.phi) - 2.0 * c * polar.A)
    raw = ops.norm(mismatch, NormKind.L2)
    return ConstraintDeficit(raw=raw, scaled=raw / polar.eps)


def constraint_mean_mismatch(polar: PolarState, c: float) -> float:
    """L2 norm of 2c times the per-line x-mean of A."""
    ops = get_spectral_ops(polar.grid)
    mean = ops.x_mean(polar.A).expand(polar.grid.shape)
    return ops.norm(2.0 * c * mean, NormKind.L2)


def check_grenier_bound(a: torch.Tensor,
                        eps: float,
                        t: Optional[float] = None) -> None:
    worst = eps * eps * float(a.abs().max())
    if worst > 0.5:
        raise AmplitudeBound(f"eps^2 |a| reaches {worst:.4f} > 1/2.", t)


def grenier_decompose(psi: torch.Tensor, polar: PolarState) -> GrenierState:
    """Initial Grenier variables: a = A (real), theta = phi."""
    a = polar.A.to(torch.complex128)
    check_grenier_bound(a, polar.eps)
    return GrenierState(polar.grid, a, polar.phi.clone(), polar.eps)


def grenier_reconstruct(state: GrenierState) -> torch.Tensor:
    check_grenier_bound(state.a, state.eps)
    eps = state.eps
    return (1.0 + eps * eps * state.a) * torch.exp(1j * eps * state.theta)


class RelationResidual(NamedTuple):
    amplitude: float
    gradient: float


def relation_residual(gstate: GrenierState,
                      polar: PolarState) -> RelationResidual:
    """Checks A = (|1 + eps^2 a| - 1)/eps^2 and, on every axis,
    d phi = d theta + (eps/i)(d a/(1 + eps^2 a) - d A/(1 + eps^2 A))."""
    eps = polar.eps
    ops = get_spectral_ops(polar.grid)
    rho_a = 1.0 + eps * eps * gstate.a
    amplitude = float(
        (polar.A - (rho_a.abs() - 1.0) / (eps * eps)).abs().max())
    gradient = 0.0
    for axis in range(polar.grid.dim):
        d_phi = ops.derivative(polar.phi, axis)
        d_theta = ops.derivative(gstate.theta, axis)
        d_a = ops.derivative(gstate.a, axis)
        d_A = ops.derivative(polar.A, axis)
        rhs = d_theta - 1j * eps * (d_a / rho_a - d_A / polar.rho)
        gradient = max(gradient, float((d_phi - rhs).abs().max()))
    return RelationResidual(amplitude=amplitude, gradient=gradient)


class ScalingDirection(enum.Enum):
    TO_SCALED = enum.auto()
    TO_PHYSICAL = enum.auto()


class Coordinates(NamedTuple):
    time: float
    longitudinal: float
    transverse: Tuple[float, ...] = ()


Number = Union[float, torch.Tensor]


def scaling_map(eps: float,
                direction: Union[ScalingDirection, str],
                coordinates: Sequence[Number],
                c: float = 1.0) -> Coordinates:
    """Maps (tau, z_1, z_perp) to (t, x, X) with t = c eps^3 tau,
    x = eps (z_1 - c tau), X = eps^2 z_perp, or back."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must be in (0, 1), got {eps}.")
    if isinstance(direction, str):
        direction = ScalingDirection[direction.upper()]
    time, longitudinal, *transverse = coordinates
    if direction == ScalingDirection.TO_SCALED:
        return Coordinates(c * eps**3 * time, eps * (longitudinal - c * time),
                           tuple(eps * eps * z for z in transverse))
    tau = time / (c * eps**3)
    return Coordinates(tau, longitudinal / eps + c * tau,
                       tuple(x / (eps * eps) for x in transverse))
