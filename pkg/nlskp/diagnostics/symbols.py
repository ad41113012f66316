"""Symbol algebra of the velocity form of the complex-amplitude system

    U_t + H(eps^2 U, d^eps) U/eps^2 = L(d^eps) U/eps,
    U = (Re a, Im a, v),  v = grad^eps theta/(2c),

as executable checks: S H must be symmetric, S L skew, and S bounded
below uniformly on eps^2 |a| <= 1/2.
"""
import math
from typing import NamedTuple, Optional

import numpy as np
import torch

from nlskp.common.errors import AmplitudeBound, DomainError
from nlskp.modeling.grid import DTYPE, PeriodicGrid
from nlskp.modeling.madelung import GrenierState
from nlskp.modeling.nonlinearity import NonlinearityModel, RemainderKind
from nlskp.modeling.spectral import get_spectral_ops

# Samples per direction of the disk eps^2 |a| <= 1/2 when measuring c0.
_FLOOR_SAMPLES = 200

J = torch.tensor([[0.0, -1.0], [1.0, 0.0]], dtype=DTYPE)


class HydroVector:
    """The (2 + n)-component field U = (Re a, Im a, v_1, v_perp).

    Args:
        fields: Tensor of shape (2 + n, *grid.shape).
        eps: Scaling parameter.
    """

    def __init__(self, fields: torch.Tensor, eps: float) -> None:
        self.fields = fields
        self.eps = eps

    @classmethod
    def from_grenier(cls, state: GrenierState, c: float) -> "HydroVector":
        v = state.velocity(c)
        components = [state.a.real, state.a.imag, v[0]]
        if v[1] is not None:
            components.append(v[1])
        return cls(torch.stack(components), state.eps)

    @property
    def a(self) -> torch.Tensor:
        return torch.complex(self.fields[0], self.fields[1])

    @property
    def v(self) -> torch.Tensor:
        return self.fields[2:]

    def samples(self) -> torch.Tensor:
        """Point values as (num_points, 2 + n)."""
        return self.fields.reshape(self.fields.shape[0], -1).T

    def __repr__(self) -> str:
        return (f"HydroVector(components={self.fields.shape[0]}, "
                f"eps={self.eps})")


class SymbolMatrices(NamedTuple):
    H: torch.Tensor
    S: torch.Tensor
    L_symbol: torch.Tensor


def _one_plus_g(u_sample: torch.Tensor, eps: float,
                model: NonlinearityModel) -> torch.Tensor:
    scaled = eps * eps * torch.complex(u_sample[..., 0], u_sample[..., 1])
    worst = float(scaled.abs().max())
    if worst > 0.5:
        raise AmplitudeBound(f"eps^2 |a| reaches {worst:.4f} > 1/2.")
    return 1.0 + model.remainder(RemainderKind.G, scaled)


def symbol_H(u_sample: torch.Tensor, eps: float, xi: torch.Tensor,
             model: NonlinearityModel) -> torch.Tensor:
    """H(eps^2 U, xi) for samples U of shape (..., 2 + n) and xi of shape
    (..., n); returns (..., 2 + n, 2 + n)."""
    u_sample = u_sample.to(DTYPE)
    xi = xi.to(DTYPE)
    n = xi.shape[-1]
    if u_sample.shape[-1] != 2 + n:
        raise ValueError(
            f"U has {u_sample.shape[-1]} components, expected {2 + n}.")
    one_plus_g = _one_plus_g(u_sample, eps, model)
    e_plus_a = eps * eps * u_sample[..., :2]
    e_plus_a = e_plus_a + torch.tensor([1.0, 0.0], dtype=DTYPE)
    v = u_sample[..., 2:]
    diagonal = (-xi[..., 0] + 2.0 * eps * eps * (v * xi).sum(-1))[..., None,
                                                                    None]
    top = torch.cat([
        diagonal * torch.eye(2, dtype=DTYPE),
        torch.einsum("...i,...j->...ij", e_plus_a, xi),
    ], dim=-1)
    bottom = torch.cat([
        one_plus_g[..., None, None] *
        torch.einsum("...i,...j->...ij", xi, e_plus_a),
        diagonal * torch.eye(n, dtype=DTYPE),
    ], dim=-1)
    return torch.cat([top, bottom], dim=-2)


def symmetrizer_S(u_sample: torch.Tensor, eps: float,
                  model: NonlinearityModel) -> torch.Tensor:
    """diag(I_2, I_n/(1 + g(eps^2 a)))."""
    u_sample = u_sample.to(DTYPE)
    n = u_sample.shape[-1] - 2
    one_plus_g = _one_plus_g(u_sample, eps, model)
    if bool((one_plus_g <= 0).any()):
        raise DomainError("1 + g(eps^2 a) <= 0; the symmetrizer is undefined.")
    weights = torch.cat([
        torch.ones(u_sample.shape[:-1] + (2,), dtype=DTYPE),
        (1.0 / one_plus_g)[..., None].expand(u_sample.shape[:-1] + (n,)),
    ], dim=-1)
    return torch.diag_embed(weights)


def symbol_L(xi: torch.Tensor, c: float) -> torch.Tensor:
    """Fourier symbol (1/(2c)) diag(-|xi|^2 J, 0_n) of L(d^eps); xi is the
    symbol of d^eps = (d_x, eps grad_perp)."""
    xi = xi.to(DTYPE)
    n = xi.shape[-1]
    out = torch.zeros(xi.shape[:-1] + (2 + n, 2 + n), dtype=DTYPE)
    out[..., :2, :2] = (-xi.square().sum(-1))[..., None, None] * J / (2.0 * c)
    return out


def symbol_matrices(u_sample: torch.Tensor, eps: float, xi: torch.Tensor,
                    model: NonlinearityModel) -> SymbolMatrices:
    return SymbolMatrices(H=symbol_H(u_sample, eps, xi, model),
                          S=symmetrizer_S(u_sample, eps, model),
                          L_symbol=symbol_L(xi, model.c))


def symmetry_defect(S: torch.Tensor, H: torch.Tensor) -> float:
    """max |S H - (S H)^T| over all entries and samples."""
    product = S @ H
    return float((product - product.transpose(-1, -2)).abs().max())


def apply_L(V: torch.Tensor, eps: float, c: float,
            grid: PeriodicGrid) -> torch.Tensor:
    """L(d^eps) V = (1/(2c)) (J Lap^eps (V_0, V_1), 0, ..., 0)."""
    ops = get_spectral_ops(grid)
    out = torch.zeros_like(V)
    out[0] = -ops.laplacian_eps(V[1], eps) / (2.0 * c)
    out[1] = ops.laplacian_eps(V[0], eps) / (2.0 * c)
    return out


def skew_quadratic_check(V: torch.Tensor,
                         eps: float,
                         grid: PeriodicGrid,
                         model: NonlinearityModel,
                         state: Optional[HydroVector] = None) -> float:
    """|(S L(d^eps) V, V)| in L2, with S frozen at `state` (U = 0 when
    omitted). V has shape (2 + n, *grid.shape)."""
    ops = get_spectral_ops(grid)
    LV = apply_L(V.to(DTYPE), eps, model.c, grid)
    if state is not None:
        S = symmetrizer_S(state.samples(), eps, model)
        flat = LV.reshape(LV.shape[0], -1).T
        LV = torch.einsum("pij,pj->pi", S, flat).T.reshape(LV.shape)
    pairing = sum(ops.inner(LV[i], V[i]) for i in range(V.shape[0]))
    return abs(pairing)


def symmetrizer_floor(model: NonlinearityModel) -> float:
    """c0 = min over eps^2 |a| <= 1/2 of the smallest eigenvalue of S,
    i.e. min(1, 1/max(1 + g))."""
    radius = np.linspace(0.0, 0.5, _FLOOR_SAMPLES)
    angle = np.linspace(0.0, 2.0 * math.pi, _FLOOR_SAMPLES, endpoint=False)
    b = radius[:, None] * np.exp(1j * angle[None, :])
    one_plus_g = 1.0 + model.remainder(RemainderKind.G, b)
    if np.any(one_plus_g <= 0):
        raise DomainError(
            f"1 + g vanishes on |eps^2 a| <= 1/2 for {model.name}; the "
            "symmetrizer is undefined.")
    return float(min(1.0, 1.0 / np.max(one_plus_g)))
