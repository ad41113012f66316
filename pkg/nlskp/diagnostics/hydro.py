"""Residual certificates: evaluates the hydrodynamic systems satisfied by
the polar variables on stored NLS snapshots.

Space derivatives are spectral; time derivatives use the fourth-order
central stencil on equally spaced snapshots, so only interior snapshots
(two away from either end) are checked.
"""
import math
from typing import List, NamedTuple, Optional, Sequence

import torch

from nlskp.common.logger import init_logger
from nlskp.modeling.grid import PeriodicGrid
from nlskp.modeling.madelung import PolarState, velocity
from nlskp.modeling.nonlinearity import NonlinearityModel, RemainderKind
from nlskp.modeling.spectral import NormKind, get_spectral_ops

logger = init_logger(__name__)

STENCIL_WIDTH = 2
# Snapshot spacings may differ by this relative amount.
UNIFORM_RTOL = 1e-9


class ResidualSeries(NamedTuple):
    """L2 norms of the two residual equations at the interior times."""
    times: List[float]
    amplitude: List[float]
    phase: List[float]

    def sup(self) -> float:
        return max(self.amplitude + self.phase, default=0.0)


def uniform_prefix(times: Sequence[float]) -> int:
    """Length of the longest leading run of equally spaced times."""
    if len(times) < 2:
        return len(times)
    h = times[1] - times[0]
    count = 2
    for a, b in zip(times[1:], times[2:]):
        if abs((b - a) - h) > UNIFORM_RTOL * h:
            break
        count += 1
    return count


def _check_times(times: Sequence[float]) -> float:
    if len(times) < 2 * STENCIL_WIDTH + 1:
        raise ValueError(
            f"The time stencil needs at least {2 * STENCIL_WIDTH + 1} "
            f"snapshots, got {len(times)}.")
    steps = [b - a for a, b in zip(times, times[1:])]
    h = steps[0]
    if h <= 0 or any(abs(s - h) > UNIFORM_RTOL * h for s in steps):
        raise ValueError("Snapshots must be equally spaced in time.")
    return h


def _central_difference(values: Sequence[torch.Tensor], index: int,
                        h: float) -> torch.Tensor:
    return (-values[index + 2] + 8.0 * values[index + 1] -
            8.0 * values[index - 1] + values[index - 2]) / (12.0 * h)


def align_phases(phases: Sequence[torch.Tensor],
                 eps: float) -> List[torch.Tensor]:
    """Removes the 2 pi/eps jumps that independent unwraps of consecutive
    snapshots introduce, line by line."""
    period = 2.0 * math.pi / eps
    aligned = [phases[0]]
    for phase in phases[1:]:
        offset = phase[..., :1] - aligned[-1][..., :1]
        aligned.append(phase - period * torch.round(offset / period))
    return aligned


def residual_phamd(polar_trajectory: Sequence[PolarState],
                   times: Sequence[float],
                   model: NonlinearityModel) -> ResidualSeries:
    """L2 norms of both equations of the amplitude/phase system

        eps^2 c A_t - c A_x + eps^2 A_x phi_x + (1/2)(1 + eps^2 A) phi_xx
          + eps^4 grad_perp A . grad_perp phi
          + (eps^2/2)(1 + eps^2 A) Lap_perp phi = 0,
        eps^2 c phi_t - c phi_x - eps^2 A_xx/(2(1 + eps^2 A))
          - eps^4 Lap_perp A/(2(1 + eps^2 A)) + (eps^2/2) phi_x^2
          + (eps^4/2) |grad_perp phi|^2 + f((1 + eps^2 A)^2)/eps^2 = 0.
    """
    h = _check_times(times)
    grid = polar_trajectory[0].grid
    eps = polar_trajectory[0].eps
    ops = get_spectral_ops(grid)
    c = model.c
    eps2 = eps * eps
    amplitudes = [p.A for p in polar_trajectory]
    phases = align_phases([p.phi for p in polar_trajectory], eps)

    out = ResidualSeries([], [], [])
    for i in range(STENCIL_WIDTH, len(times) - STENCIL_WIDTH):
        A, phi = amplitudes[i], phases[i]
        rho = 1.0 + eps2 * A
        A_x, phi_x = ops.dx(A), ops.dx(phi)
        r1 = (eps2 * c * _central_difference(amplitudes, i, h) - c * A_x +
              eps2 * A_x * phi_x + 0.5 * rho * ops.dx(phi, 2))
        r2 = (eps2 * c * _central_difference(phases, i, h) - c * phi_x -
              eps2 * ops.dx(A, 2) / (2.0 * rho) + 0.5 * eps2 * phi_x.square() +
              model.eval_f(rho.square()) / eps2)
        if grid.dim > 1:
            A_y, phi_y = ops.grad_perp(A), ops.grad_perp(phi)
            r1 = (r1 + eps2 * eps2 * A_y * phi_y +
                  0.5 * eps2 * rho * ops.laplacian_perp(phi))
            r2 = (r2 - eps2 * eps2 * ops.laplacian_perp(A) / (2.0 * rho) +
                  0.5 * eps2 * eps2 * phi_y.square())
        out.times.append(times[i])
        out.amplitude.append(ops.norm(r1, NormKind.L2))
        out.phase.append(ops.norm(r2, NormKind.L2))
    return out


def residual_euler(polar_trajectory: Sequence[PolarState],
                   times: Sequence[float],
                   model: NonlinearityModel) -> ResidualSeries:
    """L2 norms of the real (A, u) system with u = grad^eps phi/(2c):

        A_t - A_x/eps^2 + div u/eps^2 + 2 u . grad A + A div u = 0,
        u_t - u_x/eps^2 + (1 + g(eps^2 A))(1 + eps^2 A) grad A/eps^2
          + 2 (u . grad) u = grad(Lap A/(1 + eps^2 A))/(4c^2),

    all operators taken with grad = (d_x, eps grad_perp). The phase entry
    of the result holds the velocity residual summed over components.
    """
    h = _check_times(times)
    grid = polar_trajectory[0].grid
    eps = polar_trajectory[0].eps
    ops = get_spectral_ops(grid)
    c = model.c
    eps2 = eps * eps
    amplitudes = [p.A for p in polar_trajectory]
    phases = align_phases([p.phi for p in polar_trajectory], eps)
    velocities = [_components(phi, eps, c, grid) for phi in phases]

    out = ResidualSeries([], [], [])
    for i in range(STENCIL_WIDTH, len(times) - STENCIL_WIDTH):
        A = amplitudes[i]
        u = velocities[i]
        rho = 1.0 + eps2 * A
        grad_A = _grad_eps(A, eps, grid)
        div_u = sum(_grad_eps(u[j], eps, grid)[j] for j in range(len(u)))
        A_t = _central_difference(amplitudes, i, h)
        r1 = (A_t - ops.dx(A) / eps2 + div_u / eps2 +
              2.0 * sum(uj * gj for uj, gj in zip(u, grad_A)) + A * div_u)

        pressure = (1.0 + model.remainder(RemainderKind.G, eps2 * A)) * rho
        capillary = _grad_eps(ops.laplacian_eps(A, eps) / rho, eps, grid)
        velocity_sq = 0.0
        for j in range(len(u)):
            u_j_series = [v[j] for v in velocities]
            u_t = _central_difference(u_j_series, i, h)
            grad_u = _grad_eps(u[j], eps, grid)
            advection = sum(uk * gk for uk, gk in zip(u, grad_u))
            r2 = (u_t - ops.dx(u[j]) / eps2 + pressure * grad_A[j] / eps2 +
                  2.0 * advection - capillary[j] / (4.0 * c * c))
            velocity_sq += ops.norm(r2, NormKind.L2)**2
        out.times.append(times[i])
        out.amplitude.append(ops.norm(r1, NormKind.L2))
        out.phase.append(math.sqrt(velocity_sq))
    return out


def _grad_eps(u: torch.Tensor, eps: float,
              grid: PeriodicGrid) -> List[torch.Tensor]:
    ops = get_spectral_ops(grid)
    grad = [ops.dx(u)]
    if grid.dim > 1:
        grad.append(eps * ops.grad_perp(u))
    return grad


def _components(phi: torch.Tensor, eps: float, c: float,
                grid: PeriodicGrid) -> List[torch.Tensor]:
    u1, u_perp = velocity(phi, eps, c, grid)
    return [u1] if u_perp is None else [u1, u_perp]


def curl_constraint_deficit(u1: torch.Tensor,
                            u_perp: Optional[torch.Tensor],
                            eps: float,
                            grid: PeriodicGrid) -> float:
    """||d_x u_perp - eps grad_perp u_1||; zero for velocities of a phase."""
    if grid.dim != 2 or u_perp is None:
        raise ValueError("The curl constraint needs a 2D velocity field.")
    ops = get_spectral_ops(grid)
    return ops.norm(ops.dx(u_perp) - eps * ops.grad_perp(u1), NormKind.L2)
