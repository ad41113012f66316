"""Integrator for the complex-amplitude hydrodynamic form of the scaled NLS
equation, psi = (1 + eps^2 a) exp(i eps theta):

    a_t     = a_x/eps^2 + (i/(2 eps c)) Lap a - Lap theta/(2c eps^2)
              - (1/c) grad theta . grad a - (1/(2c)) a Lap theta
    theta_t = theta_x/eps^2 - (2c/eps^2) Re a
              - |grad theta|^2/(2c) - c |a|^2 - tail(s)/c

with grad = (d_x, eps grad_perp), Lap = grad . grad and
s = 2 Re a + eps^2 |a|^2. The first line of each equation is linear and
is integrated exactly mode by mode on (Re a, Im a, theta); the rest is
advanced by Lawson RK4.
"""
import math
from typing import Dict, List, Optional

import torch
from tqdm import tqdm

from nlskp.common.config import RunConfig
from nlskp.common.errors import NonFinite
from nlskp.common.logger import init_logger
from nlskp.modeling.grid import PeriodicGrid
from nlskp.modeling.madelung import (GrenierState, check_grenier_bound,
                                     grenier_reconstruct)
from nlskp.modeling.nonlinearity import NonlinearityModel
from nlskp.modeling.spectral import get_spectral_ops

logger = init_logger(__name__)


class GrenierSolver:
    """Args:
        grid: Periodic grid.
        model: Nonlinearity.
        eps: Scaling parameter.
    """

    def __init__(self, grid: PeriodicGrid, model: NonlinearityModel,
                 eps: float) -> None:
        if not 0.0 < eps < 1.0:
            raise ValueError(f"eps must be in (0, 1), got {eps}.")
        self.grid = grid
        self.model = model
        self.eps = eps
        self.ops = get_spectral_ops(grid)
        c = model.c
        kappa = self.ops.kx.square() + eps * eps * self.ops.k_perp_sq
        self._alpha = kappa / (2.0 * eps * c)
        self._beta = kappa / (2.0 * c * eps * eps)
        self._gamma = torch.full_like(kappa, 2.0 * c / (eps * eps))
        self._omega = torch.sqrt(self._alpha.square() +
                                 self._beta * self._gamma)
        self._propagators: Dict[float, torch.Tensor] = {}

    def propagator(self, dt: float) -> torch.Tensor:
        """exp(dt L) per mode as a (3, 3, *grid.shape) tensor acting on the
        Fourier coefficients of (Re a, Im a, theta)."""
        cached = self._propagators.get(dt)
        if cached is not None:
            return cached
        alpha, beta, gamma = self._alpha, self._beta, self._gamma
        phase = self._omega * dt
        # sin(w dt)/w and (1 - cos(w dt))/w^2, finite at w = 0.
        s1 = dt * torch.sinc(phase / math.pi)
        s2 = 0.5 * dt * dt * torch.sinc(phase / (2.0 * math.pi)).square()
        rows = [
            [torch.cos(phase), s1 * alpha, s1 * beta],
            [-s1 * alpha, 1.0 - s2 * alpha.square(), -s2 * alpha * beta],
            [-s1 * gamma, -s2 * alpha * gamma, 1.0 - s2 * beta * gamma],
        ]
        matrix = torch.stack([torch.stack(row) for row in rows])
        transport = torch.exp(1j * self.ops.kx * dt / self.eps**2)
        out = matrix * transport
        self._propagators[dt] = out
        return out

    def _linear(self, u_hat: torch.Tensor, dt: float) -> torch.Tensor:
        return torch.einsum("ij...,j...->i...", self.propagator(dt), u_hat)

    def to_hat(self, state: GrenierState) -> torch.Tensor:
        fields = torch.stack([state.a.real, state.a.imag, state.theta])
        return self.ops.fft(fields.to(torch.float64))

    def from_hat(self, u_hat: torch.Tensor) -> GrenierState:
        fields = self.ops.ifft(u_hat, real=True)
        a = torch.complex(fields[0], fields[1])
        return GrenierState(self.grid, a, fields[2], self.eps)

    def _nonlinear(self, u_hat: torch.Tensor) -> torch.Tensor:
        ops = self.ops
        eps = self.eps
        c = self.model.c
        fields = ops.ifft(u_hat, real=True)
        a = torch.complex(fields[0], fields[1])
        theta = fields[2]
        theta_x = ops.dx(theta)
        transport = theta_x * ops.dx(a)
        speed_sq = theta_x.square()
        if self.grid.dim > 1:
            theta_y = ops.grad_perp(theta)
            transport = transport + eps * eps * theta_y * ops.grad_perp(a)
            speed_sq = speed_sq + eps * eps * theta_y.square()
        lap_theta = ops.laplacian_eps(theta, eps)
        n_a = -transport / c - a * lap_theta / (2.0 * c)
        density = a.abs().square()
        s = 2.0 * a.real + eps * eps * density
        n_theta = (-speed_sq / (2.0 * c) - c * density -
                   self.model.grenier_tail(s, eps) / c)
        out = torch.stack([n_a.real, n_a.imag, n_theta])
        return ops.fft(out) * ops.dealias_mask

    def step_hat(self, u_hat: torch.Tensor, dt: float) -> torch.Tensor:
        half = 0.5 * dt
        k1 = self._nonlinear(u_hat)
        k2 = self._nonlinear(self._linear(u_hat + half * k1, half))
        k3 = self._nonlinear(self._linear(u_hat, half) + half * k2)
        k4 = self._nonlinear(
            self._linear(u_hat, dt) + dt * self._linear(k3, half))
        return (self._linear(u_hat, dt) + (dt / 6.0) *
                (self._linear(k1, dt) + 2.0 * self._linear(k2 + k3, half) +
                 k4))

    def check_state(self, state: GrenierState, t: float) -> None:
        if not (bool(torch.isfinite(state.a).all())
                and bool(torch.isfinite(state.theta).all())):
            raise NonFinite("Grenier state is not finite; reduce dt.", t)
        check_grenier_bound(state.a, self.eps, t)

    def step(self, state: GrenierState, dt: float,
             t: float = 0.0) -> GrenierState:
        """One step from time t; the guards are checked at t + dt."""
        out = self.from_hat(self.step_hat(self.to_hat(state), dt))
        self.check_state(out, t + dt)
        return out


def grenier_step(state: GrenierState, dt: float,
                 model: NonlinearityModel) -> GrenierState:
    check_grenier_bound(state.a, state.eps)
    return GrenierSolver(state.grid, model, state.eps).step(state, dt)


class GrenierTrajectory:

    def __init__(self, grid: PeriodicGrid, eps: float) -> None:
        self.grid = grid
        self.eps = eps
        self.times: List[float] = []
        self.states: List[GrenierState] = []

    def append(self, t: float, state: GrenierState) -> None:
        self.times.append(t)
        self.states.append(state)

    def wavefunctions(self) -> List[torch.Tensor]:
        return [grenier_reconstruct(state) for state in self.states]

    def __len__(self) -> int:
        return len(self.times)

    def __repr__(self) -> str:
        return (f"GrenierTrajectory(eps={self.eps}, "
                f"num_snapshots={len(self)})")


def simulate_grenier(config: RunConfig,
                     state0: GrenierState,
                     model: NonlinearityModel,
                     desc: Optional[str] = None) -> GrenierTrajectory:
    """Integrates the (a, theta) system on the time grid an NLS run with
    the same config would use, so snapshots pair one to one."""
    eps = config.require_eps()
    grid = state0.grid
    solver = GrenierSolver(grid, model, eps)
    time_grid = config.resolve_time_grid(grid, model.c)
    output_steps = time_grid.output_steps()

    trajectory = GrenierTrajectory(grid, eps)
    solver.check_state(state0, 0.0)
    trajectory.append(0.0, state0)
    u_hat = solver.to_hat(state0)

    pbar = tqdm(total=time_grid.num_steps,
                desc=desc or f"Grenier eps={eps:g}",
                disable=config.disable_tqdm)
    next_output = 1
    for step in range(1, time_grid.num_steps + 1):
        u_hat = solver.step_hat(u_hat, time_grid.dt)
        if step == output_steps[next_output]:
            t = step * time_grid.dt
            state = solver.from_hat(u_hat)
            solver.check_state(state, t)
            trajectory.append(t, state)
            next_output += 1
        pbar.update(1)
    pbar.close()
    return trajectory
