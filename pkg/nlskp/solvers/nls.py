"""Split-step Fourier integrator for the scaled NLS equation

    psi_t = psi_x/eps^2 + (i/(2c eps)) psi_xx + (i eps/(2c)) Lap_perp psi
            - (i/(c eps^3)) f(|psi|^2) psi.

The linear flow is exact in Fourier space and the nonlinear flow is an
exact pointwise phase rotation, so all error is splitting error.
"""
from typing import List, Optional

import torch
from tqdm import tqdm

from nlskp.common.config import RunConfig, SplittingMethod
from nlskp.common.errors import NonFinite, VortexDetected
from nlskp.common.logger import init_logger
from nlskp.common.outputs import InvariantRecord
from nlskp.common.utils import check_memory
from nlskp.diagnostics.invariants import energy_scaled, mass, momentum_scaled
from nlskp.modeling.grid import PeriodicGrid
from nlskp.modeling.madelung import VORTEX_FLOOR
from nlskp.modeling.nonlinearity import NonlinearityModel
from nlskp.modeling.spectral import get_spectral_ops

logger = init_logger(__name__)

# Fourth-order triple-jump weights.
_CBRT2 = 2.0**(1.0 / 3.0)
YOSHIDA_OUTER = 1.0 / (2.0 - _CBRT2)
YOSHIDA_INNER = -_CBRT2 / (2.0 - _CBRT2)


class NlsState:
    """A scaled wavefunction at time t."""

    def __init__(self, grid: PeriodicGrid, psi: torch.Tensor, t: float,
                 eps: float, model: NonlinearityModel) -> None:
        self.grid = grid
        self.psi = psi
        self.t = t
        self.eps = eps
        self.model = model

    def __repr__(self) -> str:
        return (f"NlsState(t={self.t:.6g}, eps={self.eps}, "
                f"min|psi|={float(self.psi.abs().min()):.4f})")


class NlsSolver:

    def __init__(
        self,
        grid: PeriodicGrid,
        model: NonlinearityModel,
        eps: float,
        splitting: SplittingMethod = SplittingMethod.STRANG,
        vortex_floor: float = VORTEX_FLOOR,
    ) -> None:
        if not 0.0 < eps < 1.0:
            raise ValueError(f"eps must be in (0, 1), got {eps}.")
        self.grid = grid
        self.model = model
        self.eps = eps
        self.splitting = splitting
        self.vortex_floor = vortex_floor
        self.ops = get_spectral_ops(grid)
        c = model.c
        # i * omega(k) is the Fourier symbol of the linear part.
        self.omega = (self.ops.kx / eps**2 - self.ops.kx.square() /
                      (2.0 * c * eps) - eps * self.ops.k_perp_sq / (2.0 * c))
        self._nonlinear_rate = 1.0 / (c * eps**3)

    def linear_flow(self, psi: torch.Tensor, dt: float) -> torch.Tensor:
        """Exact flow of the linear part over dt (any sign)."""
        return self.ops.ifft(
            torch.exp(1j * dt * self.omega) * self.ops.fft(psi))

    def nonlinear_flow(self, psi: torch.Tensor, dt: float) -> torch.Tensor:
        """psi exp(-i dt f(|psi|^2)/(c eps^3)); |psi| is unchanged."""
        angle = dt * self._nonlinear_rate * self.model.eval_f(
            psi.abs().square())
        return psi * torch.polar(torch.ones_like(angle), -angle)

    def _strang(self, psi: torch.Tensor, dt: float) -> torch.Tensor:
        psi = self.nonlinear_flow(psi, 0.5 * dt)
        psi = self.linear_flow(psi, dt)
        return self.nonlinear_flow(psi, 0.5 * dt)

    def advance(self, psi: torch.Tensor, dt: float) -> torch.Tensor:
        if self.splitting == SplittingMethod.YOSHIDA4:
            psi = self._strang(psi, YOSHIDA_OUTER * dt)
            psi = self._strang(psi, YOSHIDA_INNER * dt)
            return self._strang(psi, YOSHIDA_OUTER * dt)
        return self._strang(psi, dt)

    def check_state(self, psi: torch.Tensor, t: float) -> None:
        if not bool(torch.isfinite(psi).all()):
            raise NonFinite("NLS state is not finite; reduce dt.", t)
        rho_min = float(psi.abs().min())
        if rho_min <= self.vortex_floor:
            raise VortexDetected(
                f"min |psi| = {rho_min:.4f} reached the vortex floor "
                f"{self.vortex_floor}.", t)

    def strang_step(self, state: NlsState, dt: float) -> NlsState:
        """One step of the configured splitting; the vortex guard is checked
        on the result."""
        psi = self.advance(state.psi, dt)
        t = state.t + dt
        self.check_state(psi, t)
        return NlsState(state.grid, psi, t, state.eps, state.model)


def strang_step(state: NlsState, dt: float) -> NlsState:
    solver = NlsSolver(state.grid, state.model, state.eps)
    return solver.strang_step(state, dt)


class NlsTrajectory:
    """Snapshots of an NLS run with its invariant time series."""

    def __init__(self, grid: PeriodicGrid, eps: float,
                 model: NonlinearityModel) -> None:
        self.grid = grid
        self.eps = eps
        self.model = model
        self.times: List[float] = []
        self.snapshots: List[torch.Tensor] = []
        self.records: List[InvariantRecord] = []

    def append(self, t: float, psi: torch.Tensor,
               record_invariants: bool = True) -> None:
        self.times.append(t)
        self.snapshots.append(psi)
        if record_invariants:
            record = InvariantRecord(
                t=t,
                E_eps=energy_scaled(psi, self.eps, self.model, self.grid),
                P_eps=momentum_scaled(psi, self.eps, self.grid),
                mass=mass(psi, self.grid),
            )
            logger.debug(f"{record}")
            self.records.append(record)

    @property
    def states(self) -> List[NlsState]:
        return [
            NlsState(self.grid, psi, t, self.eps, self.model)
            for t, psi in zip(self.times, self.snapshots)
        ]

    @property
    def final(self) -> NlsState:
        return NlsState(self.grid, self.snapshots[-1], self.times[-1],
                        self.eps, self.model)

    def relative_drift(self, name: str) -> float:
        """max_t |X(t) - X(0)| / max(|X(0)|, tiny) for an invariant X."""
        values = [getattr(r, name) for r in self.records]
        ref = values[0]
        scale = max(abs(ref), 1e-300)
        return max(abs(v - ref) for v in values) / scale

    def __len__(self) -> int:
        return len(self.times)

    def __repr__(self) -> str:
        return (f"NlsTrajectory(eps={self.eps}, num_snapshots={len(self)}, "
                f"t_end={self.times[-1] if self.times else None})")


def simulate_nls(config: RunConfig,
                 psi0: torch.Tensor,
                 grid: PeriodicGrid,
                 model: NonlinearityModel,
                 record_invariants: bool = True,
                 desc: Optional[str] = None) -> NlsTrajectory:
    """Fixed-step integration from psi0 over [0, config.T].

    Raises VortexDetected (carrying the failure time) when the guard trips.
    """
    eps = config.require_eps()
    solver = NlsSolver(grid, model, eps, config.splitting, config.vortex_floor)
    time_grid = config.resolve_time_grid(grid, model.c)
    output_steps = time_grid.output_steps()
    check_memory(len(output_steps) * grid.num_points * 16, "NLS trajectory")

    trajectory = NlsTrajectory(grid, eps, model)
    psi = psi0.to(torch.complex128)
    solver.check_state(psi, 0.0)
    trajectory.append(0.0, psi, record_invariants)

    pbar = tqdm(total=time_grid.num_steps,
                desc=desc or f"NLS eps={eps:g}",
                disable=config.disable_tqdm)
    next_output = 1
    for step in range(1, time_grid.num_steps + 1):
        psi = solver.advance(psi, time_grid.dt)
        t = step * time_grid.dt
        solver.check_state(psi, t)
        if step == output_steps[next_output]:
            trajectory.append(t, psi, record_invariants)
            next_output += 1
        pbar.update(1)
    pbar.close()
    return trajectory
