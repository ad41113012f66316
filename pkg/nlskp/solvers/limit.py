"""Pseudospectral integrators for the limit equations

    KdV:   2 v_t + k v v_x - v_xxx/(4c^2) = 0                    (1D)
    KP-I:  d_x(2 v_t + k v v_x - v_xxx/(4c^2)) + Lap_perp v = 0  (2D)

optionally with a drift at speed d (extra term -d v_x in v_t).
Time stepping is integrating-factor RK4 in the Lawson form: the linear
symbol is integrated exactly and RK4 acts on the dealiased nonlinearity.
"""
import enum
from typing import List, Optional

import torch
from tqdm import tqdm

from nlskp.common.config import DEFAULT_DT, RunConfig, TimeGrid
from nlskp.common.errors import NonFinite
from nlskp.common.logger import init_logger
from nlskp.common.outputs import LimitInvariantRecord
from nlskp.diagnostics.invariants import kdv_invariants
from nlskp.modeling.grid import PeriodicGrid
from nlskp.modeling.spectral import get_spectral_ops

logger = init_logger(__name__)


class LimitEquation(enum.Enum):
    KDV = enum.auto()
    KPI = enum.auto()


class LimitState:
    """A limit field v at time t with the coefficients of its equation."""

    def __init__(self, grid: PeriodicGrid, v: torch.Tensor, t: float,
                 c: float, k: float) -> None:
        self.grid = grid
        self.v = v
        self.t = t
        self.c = c
        self.k = k

    def __repr__(self) -> str:
        return (f"LimitState(t={self.t:.6g}, c={self.c}, k={self.k}, "
                f"max|v|={float(self.v.abs().max()):.4e})")


class LimitSolver:
    """KdV on 1D grids and KP-I on 2D grids.

    Args:
        grid: Periodic grid.
        c: Sound speed.
        k: Nonlinearity coefficient.
        drift: Speed of the frame drift d.
    """

    def __init__(self,
                 grid: PeriodicGrid,
                 c: float,
                 k: float,
                 drift: float = 0.0) -> None:
        self.grid = grid
        self.c = c
        self.k = k
        self.drift = drift
        self.equation = (LimitEquation.KDV
                         if grid.dim == 1 else LimitEquation.KPI)
        self.ops = get_spectral_ops(grid)
        kx = self.ops.kx
        rate = drift * kx + kx**3 / (8.0 * c * c)
        if self.equation == LimitEquation.KPI:
            safe_kx = torch.where(self.ops.kx_zero, torch.ones_like(kx), kx)
            transverse = self.ops.k_perp_sq / (2.0 * safe_kx)
            rate = rate + torch.where(self.ops.kx_zero,
                                      torch.zeros_like(transverse), transverse)
        self.symbol = -1j * rate
        # KP-I holds every kx = 0 mode at zero.
        self.keep = (~self.ops.kx_zero if self.equation == LimitEquation.KPI
                     else torch.ones_like(self.ops.kx_zero))
        self._nonlinear_factor = (-0.25 * k * 1j * kx *
                                  self.ops.dealias_mask)

    def _nonlinear(self, v_hat: torch.Tensor) -> torch.Tensor:
        v = self.ops.ifft(self.ops.dealias_mask * v_hat, real=True)
        return self._nonlinear_factor * self.ops.fft(v.square())

    def step_hat(self, v_hat: torch.Tensor, dt: float) -> torch.Tensor:
        """One Lawson RK4 step on Fourier coefficients."""
        full = torch.exp(self.symbol * dt)
        half = torch.exp(self.symbol * (0.5 * dt))
        k1 = self._nonlinear(v_hat)
        k2 = self._nonlinear(half * (v_hat + 0.5 * dt * k1))
        k3 = self._nonlinear(half * v_hat + 0.5 * dt * k2)
        k4 = self._nonlinear(full * v_hat + dt * half * k3)
        out = full * v_hat + (dt / 6.0) * (full * k1 + 2.0 * half *
                                           (k2 + k3) + k4)
        return out * self.keep

    def prepare(self, v0: torch.Tensor) -> torch.Tensor:
        """Checks the KP-I zero-mean precondition and returns the Fourier
        coefficients of v0."""
        if self.equation == LimitEquation.KPI:
            self.ops.check_zero_x_mean(v0)
        return self.ops.fft(v0.to(torch.float64)) * self.keep

    def step(self, state: LimitState, dt: float) -> LimitState:
        v_hat = self.step_hat(self.prepare(state.v), dt)
        v = self.ops.ifft(v_hat, real=True)
        t = state.t + dt
        self.check_finite(v, t)
        return LimitState(state.grid, v, t, state.c, state.k)

    def check_finite(self, v: torch.Tensor, t: float) -> None:
        if not bool(torch.isfinite(v).all()):
            raise NonFinite(
                f"{self.equation.name} state is not finite; reduce dt.", t)


def kdv_step(state: LimitState, dt: float, drift: float = 0.0) -> LimitState:
    if state.grid.dim != 1:
        raise ValueError("kdv_step needs a 1D grid.")
    return LimitSolver(state.grid, state.c, state.k, drift).step(state, dt)


def kpi_step(state: LimitState, dt: float, drift: float = 0.0) -> LimitState:
    if state.grid.dim != 2:
        raise ValueError("kpi_step needs a 2D grid.")
    return LimitSolver(state.grid, state.c, state.k, drift).step(state, dt)


def airy_exact(v0: torch.Tensor, t: float, c: float,
               grid: PeriodicGrid) -> torch.Tensor:
    """Exact solution of 2 v_t - v_xxx/(4c^2) = 0."""
    ops = get_spectral_ops(grid)
    phase = torch.exp(-1j * ops.kx**3 * t / (8.0 * c * c))
    return ops.ifft(phase * ops.fft(v0), real=True)


class LimitTrajectory:
    """Snapshots of a limit run with its I0/I1 time series."""

    def __init__(self, grid: PeriodicGrid, c: float, k: float) -> None:
        self.grid = grid
        self.c = c
        self.k = k
        self.times: List[float] = []
        self.snapshots: List[torch.Tensor] = []
        self.records: List[LimitInvariantRecord] = []

    def append(self, t: float, v: torch.Tensor,
               record_invariants: bool = True) -> None:
        self.times.append(t)
        self.snapshots.append(v)
        if record_invariants:
            i0, i1 = kdv_invariants(v, self.c, self.k, self.grid)
            self.records.append(LimitInvariantRecord(t=t, I0=i0, I1=i1))

    def relative_drift(self, name: str) -> float:
        values = [getattr(r, name) for r in self.records]
        ref = values[0]
        scale = max(abs(ref), 1e-300)
        return max(abs(v - ref) for v in values) / scale

    def __len__(self) -> int:
        return len(self.times)

    def __repr__(self) -> str:
        return (f"LimitTrajectory(c={self.c}, k={self.k}, "
                f"num_snapshots={len(self)})")


def limit_time_grid(config: RunConfig) -> TimeGrid:
    """Time grid of a stand-alone limit run (no NLS stability cap)."""
    dt = config.dt if config.dt is not None else DEFAULT_DT
    if config.T == 0.0:
        return TimeGrid(dt=dt, num_steps=0, stride=1, dt_max=dt)
    num_steps = max(1, round(config.T / dt))
    dt = config.T / num_steps
    stride = 1
    if config.output_interval is not None:
        stride = max(1, round(config.output_interval / dt))
    return TimeGrid(dt=dt, num_steps=num_steps, stride=stride, dt_max=dt)


def simulate_limit(config: RunConfig,
                   v0: torch.Tensor,
                   grid: PeriodicGrid,
                   c: float,
                   k: float,
                   drift: float = 0.0,
                   time_grid: Optional[TimeGrid] = None,
                   record_invariants: bool = True,
                   desc: Optional[str] = None) -> LimitTrajectory:
    """Integrates KdV (1D) or KP-I (2D) from v0.

    `time_grid` lets a caller reuse the step and output times of a paired
    NLS run.
    """
    solver = LimitSolver(grid, c, k, drift)
    if time_grid is None:
        time_grid = limit_time_grid(config)
    output_steps = time_grid.output_steps()

    trajectory = LimitTrajectory(grid, c, k)
    v_hat = solver.prepare(v0)
    trajectory.append(0.0, solver.ops.ifft(v_hat, real=True),
                      record_invariants)

    pbar = tqdm(total=time_grid.num_steps,
                desc=desc or f"{solver.equation.name}",
                disable=config.disable_tqdm)
    next_output = 1
    for step in range(1, time_grid.num_steps + 1):
        v_hat = solver.step_hat(v_hat, time_grid.dt)
        if step == output_steps[next_output]:
            t = step * time_grid.dt
            v = solver.ops.ifft(v_hat, real=True)
            solver.check_finite(v, t)
            trajectory.append(t, v, record_invariants)
            next_output += 1
        pbar.update(1)
    pbar.close()
    return trajectory
