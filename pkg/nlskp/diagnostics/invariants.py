"""Conserved functionals of the scaled NLS and limit equations, and the
residuals of their small-eps expansions."""
import enum
from typing import Dict, NamedTuple, Optional, Sequence, Tuple, Union

import torch

from nlskp.common.errors import VortexDetected
from nlskp.common.outputs import InvariantReport
from nlskp.modeling.grid import PeriodicGrid
from nlskp.modeling.madelung import (VORTEX_FLOOR, PolarState,
                                     constraint_deficit, polar_decompose,
                                     reconstruct)
from nlskp.modeling.nonlinearity import NonlinearityModel, RemainderKind
from nlskp.modeling.spectral import NormKind, get_spectral_ops


class CombinationSign(enum.Enum):
    MINUS = enum.auto()
    PLUS = enum.auto()


class ExpansionIdentity(enum.Enum):
    ENERGY = enum.auto()
    MOMENTUM = enum.auto()
    ENERGY_MINUS = enum.auto()
    ENERGY_MINUS_LEADING = enum.auto()
    NU = enum.auto()


class CombinedValue(NamedTuple):
    value: float
    pieces: Dict[str, float]


def _density_and_phase_gradient(
        psi: torch.Tensor,
        grid: PeriodicGrid,
        axis,
        vortex_floor: float = VORTEX_FLOOR
) -> Tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """rho, d rho and the gradient of the full phase along `axis`, from
    psi conj(d psi) so that |d psi|^2 = (d rho)^2 + rho^2 (d phase)^2
    holds sample-wise."""
    ops = get_spectral_ops(grid)
    rho = psi.abs()
    rho_min = float(rho.min())
    if rho_min <= vortex_floor:
        raise VortexDetected(
            f"min |psi| = {rho_min:.4f} is at or below the vortex floor "
            f"{vortex_floor}.")
    flux = psi.conj() * ops.derivative(psi, axis)
    return rho, flux.real / rho, flux.imag / rho.square()


def energy_scaled(psi: torch.Tensor, eps: float, model: NonlinearityModel,
                  grid: PeriodicGrid) -> float:
    """E = (1/2) int |d_x psi|^2 + eps^2 |grad_perp psi|^2
    + F(|psi|^2)/eps^2."""
    ops = get_spectral_ops(grid)
    density = ops.dx(psi).abs().square()
    if grid.dim > 1:
        density = density + eps * eps * ops.grad_perp(psi).abs().square()
    density = density + model.eval_potential_F(psi.abs().square()) / (eps *
                                                                      eps)
    return 0.5 * float(ops.integrate(density))


def momentum_scaled(psi: torch.Tensor,
                    eps: float,
                    grid: PeriodicGrid,
                    vortex_floor: float = VORTEX_FLOOR) -> float:
    """P = (1/(2 eps)) int (rho^2 - 1) d_x(eps phi)."""
    ops = get_spectral_ops(grid)
    rho, _, phase_x = _density_and_phase_gradient(psi, grid, 0, vortex_floor)
    return float(ops.integrate((rho.square() - 1.0) * phase_x)) / (2.0 * eps)


def mass(psi: torch.Tensor, grid: PeriodicGrid) -> float:
    return float(get_spectral_ops(grid).integrate(psi.abs().square()))


def combined(psi: torch.Tensor,
             eps: float,
             model: NonlinearityModel,
             grid: PeriodicGrid,
             sign: Union[CombinationSign, str] = CombinationSign.MINUS,
             vortex_floor: float = VORTEX_FLOOR) -> CombinedValue:
    """E -/+ 2cP as a sum of completed squares and remainders."""
    if isinstance(sign, str):
        sign = CombinationSign[sign.upper()]
    ops = get_spectral_ops(grid)
    c = model.c
    rho, rho_x, phase_x = _density_and_phase_gradient(psi, grid, 0,
                                                      vortex_floor)
    excess = rho.square() - 1.0
    orientation = -1.0 if sign == CombinationSign.MINUS else 1.0
    pieces = {
        "grad_rho":
            0.5 * float(ops.integrate(rho_x.square())),
        "excess_phase":
            0.5 * float(ops.integrate(excess * phase_x.square())),
        "completed_square":
            0.5 * float(
                ops.integrate(
                    (phase_x + orientation * (c / eps) * excess).square())),
        "potential_remainder":
            0.5 * float(
                ops.integrate(model.remainder(RemainderKind.F3, excess))) /
            (eps * eps),
        "transverse":
            0.0,
    }
    if grid.dim > 1:
        _, rho_y, phase_y = _density_and_phase_gradient(
            psi, grid, 1, vortex_floor)
        pieces["transverse"] = 0.5 * eps * eps * float(
            ops.integrate(rho_y.square() + rho.square() * phase_y.square()))
    return CombinedValue(value=sum(pieces.values()), pieces=pieces)


def kdv_invariants(v: torch.Tensor, c: float, k: float,
                   grid: PeriodicGrid) -> Tuple[float, float]:
    """I0 = int v^2 and I1 = int (d_x v)^2/(4c^2) + (k/3) v^3.

    On a 2D grid I1 also carries int |d_x^{-1} grad_perp v|^2, which makes
    it the conserved KP-I Hamiltonian; v must then have zero x-mean.
    """
    ops = get_spectral_ops(grid)
    i0 = float(ops.integrate(v.square()))
    density = ops.dx(v).square() / (4.0 * c * c) + (k / 3.0) * v**3
    if grid.dim > 1:
        density = density + ops.x_antiderivative(ops.grad_perp(v)).square()
    return i0, float(ops.integrate(density))


def invariant_report(psi: torch.Tensor,
                     eps: float,
                     model: NonlinearityModel,
                     grid: PeriodicGrid,
                     limit_v: Optional[torch.Tensor] = None) -> InvariantReport:
    """All functionals of one state. I0 and I1 are evaluated on the paired
    limit field when one is given and are NaN otherwise."""
    i0 = i1 = float("nan")
    if limit_v is not None:
        i0, i1 = kdv_invariants(limit_v, model.c, model.k, grid)
    polar = polar_decompose(psi, eps, grid)
    residuals = {
        identity.name.lower(): expansion_residual(polar, identity, model)
        for identity in (ExpansionIdentity.ENERGY, ExpansionIdentity.MOMENTUM,
                         ExpansionIdentity.ENERGY_MINUS,
                         ExpansionIdentity.ENERGY_MINUS_LEADING)
    }
    return InvariantReport(
        E_eps=energy_scaled(psi, eps, model, grid),
        P_eps=momentum_scaled(psi, eps, grid),
        E_minus_2cP=combined(psi, eps, model, grid,
                             CombinationSign.MINUS).value,
        E_plus_2cP=combined(psi, eps, model, grid, CombinationSign.PLUS).value,
        I0=i0,
        I1=i1,
        mass=mass(psi, grid),
        expansion_residuals=residuals,
    )


def _leading_energy(polar: PolarState, c: float) -> float:
    ops = get_spectral_ops(polar.grid)
    eps = polar.eps
    density = ops.dx(polar.phi).square() + 4.0 * c * c * polar.A.square()
    if polar.grid.dim > 1:
        density = density + eps * eps * ops.grad_perp(polar.phi).square()
    return 0.5 * eps * eps * float(ops.integrate(density))


def expansion_residual(polar: Union[PolarState, Sequence[PolarState]],
                       identity: Union[ExpansionIdentity, str],
                       model: NonlinearityModel,
                       limit: Optional[Sequence[torch.Tensor]] = None) -> float:
    """|exact functional - its expansion| / eps^4.

    For `nu`, `polar` is a trajectory and `limit` the paired limit fields
    at the same times; returns
    sup_t ||d_x A^eps - d_x A||^2 + eps^-2 ||d_x phi^eps - 2c A^eps||^2.
    """
    if isinstance(identity, str):
        identity = ExpansionIdentity[identity.upper()]
    c = model.c
    if identity == ExpansionIdentity.NU:
        if limit is None or isinstance(polar, PolarState):
            raise ValueError("nu needs a polar trajectory and limit fields.")
        return nu_functional(polar, limit, c)
    if not isinstance(polar, PolarState):
        raise ValueError(f"{identity.name} takes a single PolarState.")

    grid = polar.grid
    ops = get_spectral_ops(grid)
    eps = polar.eps
    eps4 = eps**4
    A, phi = polar.A, polar.phi
    phi_x = ops.dx(phi)
    psi = reconstruct(polar)

    if identity == ExpansionIdentity.ENERGY:
        exact = energy_scaled(psi, eps, model, grid)
        return abs(exact - _leading_energy(polar, c)) / eps4
    if identity == ExpansionIdentity.MOMENTUM:
        exact = momentum_scaled(psi, eps, grid)
        return abs(exact - eps * eps * float(ops.integrate(A * phi_x))) / eps4

    exact = combined(psi, eps, model, grid, CombinationSign.MINUS).value
    transverse = 0.0
    if grid.dim > 1:
        transverse = 0.5 * eps4 * float(
            ops.integrate(ops.grad_perp(phi).square()))
    if identity == ExpansionIdentity.ENERGY_MINUS:
        quartic = 0.5 * eps4 * float(
            ops.integrate(2.0 * A * phi_x.square() + ops.dx(A).square() +
                          (8.0 * model.f2 / 3.0) * A**3))
        square = 0.5 * eps * eps * float(
            ops.integrate((phi_x - 2.0 * c * A - c * eps * eps *
                           A.square()).square()))
        return abs(exact - quartic - square - transverse) / eps4
    # Leading order: 2 c^2 eps^4 I1(A) + (eps^2/2) ||d_x phi - 2cA||^2.
    density = ops.dx(A).square() / (4.0 * c * c) + (model.k / 3.0) * A**3
    i1 = float(ops.integrate(density))
    deficit = float(ops.integrate((phi_x - 2.0 * c * A).square()))
    leading = 2.0 * c * c * eps4 * i1 + 0.5 * eps * eps * deficit + transverse
    return abs(exact - leading) / eps4


def nu_functional(polar_trajectory: Sequence[PolarState],
                  limit_trajectory: Sequence[torch.Tensor], c: float) -> float:
    if len(polar_trajectory) != len(limit_trajectory):
        raise ValueError(
            f"Trajectories differ in length: {len(polar_trajectory)} vs "
            f"{len(limit_trajectory)}.")
    worst = 0.0
    for polar, v in zip(polar_trajectory, limit_trajectory):
        ops = get_spectral_ops(polar.grid)
        gap = ops.norm(ops.dx(polar.A) - ops.dx(v), NormKind.L2)**2
        deficit = constraint_deficit(polar, c)
        worst = max(worst, gap + deficit.scaled**2)
    return worst


def m_bound(polar: PolarState, c: float) -> float:
    """M = ||A0||_{H^1} + ||d_x phi0 - 2c A0||/eps."""
    ops = get_spectral_ops(polar.grid)
    return (ops.norm(polar.A, NormKind.HS, s=1.0) +
            constraint_deficit(polar, c).scaled)


def modulus_excursion(psi: torch.Tensor, eps: float) -> float:
    """||(|psi|^2 - 1)||_inf / eps^2."""
    return float((psi.abs().square() - 1.0).abs().max()) / (eps * eps)


def potential_bounds_hold(psi: torch.Tensor, model: NonlinearityModel,
                          upper_factor: float = 1.5) -> Optional[bool]:
    """Checks (c^2/2)(R-1)^2 <= F(R) <= upper_factor c^2 (R-1)^2 sample-wise
    with R = |psi|^2. Returns None when max |R - 1| exceeds the model's
    delta radius."""
    density = psi.abs().square()
    excess = density - 1.0
    if float(excess.abs().max()) > model.delta_radius(upper_factor):
        return None
    value = model.eval_potential_F(density)
    quad = model.f1 * excess.square()
    slack = 1e-14 * (1.0 + quad)
    return bool(((value >= 0.5 * quad - slack) &
                 (value <= upper_factor * quad + slack)).all())
