"""Exact solution of the homogeneous fast-transport system

    d_t A = d_x (A - u)/eps^2,   d_t u = -d_x (A - u)/eps^2,

whose solution keeps A + u fixed and translates
(A - u)(t, x) = (A0 - u0)(x + 2 t/eps^2),

and the windowed space-time norm that measures how fast the
counter-propagating part leaves a fixed window.
"""
import math
from typing import List, NamedTuple, Sequence

import pandas as pd
import torch

from nlskp.common.logger import init_logger
from nlskp.modeling.grid import PeriodicGrid
from nlskp.modeling.spectral import NormKind, get_spectral_ops

logger = init_logger(__name__)

# On the periodic box a full traversal attains the bound with equality.
BOUND_RTOL = 1e-10
MIN_TIME_SAMPLES = 64

WINDOW_COLUMNS = ["eps", "T_used", "norm_sq", "bound", "ratio", "holds"]


class TransportPair(NamedTuple):
    A: torch.Tensor
    u: torch.Tensor
    eps: float
    t: float


def _check_one_dimensional(grid: PeriodicGrid) -> None:
    if grid.dim != 1:
        raise ValueError("The transport probe runs on 1D grids only.")


def free_transport(A0: torch.Tensor, u0: torch.Tensor, eps: float, t: float,
                   grid: PeriodicGrid) -> TransportPair:
    _check_one_dimensional(grid)
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}.")
    ops = get_spectral_ops(grid)
    total = A0 + u0
    difference = ops.shift_x(A0 - u0, 2.0 * t / (eps * eps))
    return TransportPair(A=0.5 * (total + difference),
                         u=0.5 * (total - difference),
                         eps=eps,
                         t=t)


def traversal_time(eps: float, grid: PeriodicGrid) -> float:
    """Time the difference A - u needs to cross the box once."""
    return 0.5 * eps * eps * grid.lengths[0]


def windowed_norm_sq(difference0: torch.Tensor, eps: float, T: float,
                     R: float, grid: PeriodicGrid) -> float:
    """int_0^T int_{-R}^{R} |(A - u)(t, x)|^2 dx dt for the exact solution,
    composite trapezoid in t."""
    ops = get_spectral_ops(grid)
    length = grid.lengths[0]
    traversals = max(1, math.ceil(2.0 * T / (eps * eps * length)))
    num_times = 2 * max(MIN_TIME_SAMPLES, grid.points[0]) * traversals + 1
    times = torch.linspace(0.0, T, num_times, dtype=torch.float64)
    shifts = 2.0 * times / (eps * eps)
    phases = torch.exp(1j * shifts[:, None] * ops.kx[None, :])
    fields = torch.fft.ifft(phases * ops.fft(difference0)[None, :], dim=-1)
    dx = grid.spacings[0]
    # Samples x_j in [-R, R).
    start = round((0.5 * length - R) / dx)
    stop = start + round(2.0 * R / dx)
    per_time = fields[:, start:stop].abs().square().sum(dim=-1) * dx
    return float(torch.trapezoid(per_time, times))


def window_norm_scaling(A0: torch.Tensor,
                        u0: torch.Tensor,
                        eps_list: Sequence[float],
                        T: float,
                        R: float,
                        grid: PeriodicGrid,
                        allow_wrap: bool = False) -> pd.DataFrame:
    """One row per eps: the windowed norm, its explicit bound
    (eps^2/2) 2R ||A0 - u0||^2 and the ratio sqrt(norm)/eps.

    T is capped at one traversal unless `allow_wrap` is set, since on the
    periodic box the transported part re-enters the window.
    """
    _check_one_dimensional(grid)
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}.")
    half_length = 0.5 * grid.lengths[0]
    if not 0 < R <= half_length:
        raise ValueError(
            f"R must be in (0, {half_length:g}], got {R}.")
    cells = 2.0 * R / grid.spacings[0]
    if abs(cells - round(cells)) > 1e-9:
        logger.warning(
            f"2R = {2 * R:g} is not a whole number of cells; the window "
            "is rounded to the grid and the bound may be off by one cell.")
    ops = get_spectral_ops(grid)
    difference0 = A0 - u0
    initial_sq = ops.norm(difference0, NormKind.L2)**2

    rows: List[dict] = []
    for eps in eps_list:
        T_used = T
        if not allow_wrap:
            T_used = min(T, traversal_time(eps, grid))
            if T_used < T:
                logger.info(f"eps={eps:g}: T capped at one traversal "
                            f"{T_used:.6g}.")
        norm_sq = windowed_norm_sq(difference0, eps, T_used, R, grid)
        bound = 0.5 * eps * eps * 2.0 * R * initial_sq
        rows.append({
            "eps": eps,
            "T_used": T_used,
            "norm_sq": norm_sq,
            "bound": bound,
            "ratio": math.sqrt(norm_sq) / eps,
            "holds": bool(norm_sq <= bound * (1.0 + BOUND_RTOL)),
        })
    return pd.DataFrame(rows, columns=WINDOW_COLUMNS)


def sum_conservation_error(A0: torch.Tensor, u0: torch.Tensor, eps: float,
                           times: Sequence[float], grid: PeriodicGrid) -> float:
    """max_t ||(A + u)(t) - (A0 + u0)||_inf over the probed times."""
    worst = 0.0
    for t in times:
        pair = free_transport(A0, u0, eps, t, grid)
        worst = max(worst, float((pair.A + pair.u - A0 - u0).abs().max()))
    return worst
