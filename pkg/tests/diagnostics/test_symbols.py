import math

import pytest
import torch

from nlskp.common.errors import AmplitudeBound
from nlskp.diagnostics.symbols import (HydroVector, apply_L,
                                       skew_quadratic_check, symbol_H,
                                       symbol_L, symbol_matrices,
                                       symmetrizer_floor, symmetrizer_S,
                                       symmetry_defect)
from nlskp.modeling.grid import DTYPE
from nlskp.modeling.nonlinearity import NonlinearityModel

DIMS = [1, 2]
MODELS = ["gp", "cubic_quintic"]
EPS = [0.3, 0.05]
NUM_SAMPLES = 128
SEEDS = [0, 1]


def _random_samples(dim: int, seed: int):
    generator = torch.Generator().manual_seed(seed)
    u = 2.0 * torch.rand(NUM_SAMPLES, 2 + dim, generator=generator,
                         dtype=DTYPE) - 1.0
    # |U| <= 1 keeps eps^2 |a| well inside the admissible disk.
    u = u / math.sqrt(2 + dim)
    xi = 2.0 * torch.rand(NUM_SAMPLES, dim, generator=generator,
                          dtype=DTYPE) - 1.0
    return u, 4.0 * xi


def test_background_symbols() -> None:
    model = NonlinearityModel.gross_pitaevskii()
    u = torch.zeros(3, dtype=DTYPE)
    xi = torch.tensor([1.0], dtype=DTYPE)
    assert torch.equal(symmetrizer_S(u, 0.3, model),
                       torch.eye(3, dtype=DTYPE))
    expected = torch.tensor(
        [[-1.0, 0.0, 1.0], [0.0, -1.0, 0.0], [1.0, 0.0, -1.0]], dtype=DTYPE)
    assert torch.allclose(symbol_H(u, 0.3, xi, model), expected, atol=1e-15)


@pytest.mark.parametrize("model_name", MODELS)
@pytest.mark.parametrize("dim", DIMS)
@pytest.mark.parametrize("eps", EPS)
@pytest.mark.parametrize("seed", SEEDS)
def test_symmetrized_symbol(model_name: str, dim: int, eps: float,
                            seed: int) -> None:
    model = NonlinearityModel.from_string(model_name)
    u, xi = _random_samples(dim, seed)
    matrices = symbol_matrices(u, eps, xi, model)
    assert matrices.H.shape == (NUM_SAMPLES, 2 + dim, 2 + dim)
    assert symmetry_defect(matrices.S, matrices.H) < 1e-12
    # S leaves the L block untouched, so S L stays skew.
    SL = matrices.S @ matrices.L_symbol
    assert torch.allclose(SL, -SL.transpose(-1, -2), atol=1e-14)


def test_unsymmetrized_symbol_is_not_symmetric() -> None:
    model = NonlinearityModel.cubic_quintic()
    u, xi = _random_samples(1, seed=0)
    H = symbol_H(u, 0.3, xi, model)
    assert float((H - H.transpose(-1, -2)).abs().max()) > 1e-3


def test_symbol_L() -> None:
    xi = torch.tensor([[1.0, 2.0]], dtype=DTYPE)
    L = symbol_L(xi, 0.5)
    # -(|xi|^2/(2c)) J with |xi|^2 = 5.
    assert L[0, 0, 1] == pytest.approx(5.0)
    assert L[0, 1, 0] == pytest.approx(-5.0)
    assert float(L[0, 2:].abs().max()) == 0.0


def test_component_count() -> None:
    model = NonlinearityModel.gross_pitaevskii()
    with pytest.raises(ValueError):
        symbol_H(torch.zeros(4, dtype=DTYPE), 0.3,
                 torch.ones(1, dtype=DTYPE), model)


def test_amplitude_bound() -> None:
    model = NonlinearityModel.gross_pitaevskii()
    eps = 0.2
    u = torch.tensor([0.6 / (eps * eps), 0.0, 0.0], dtype=DTYPE)
    with pytest.raises(AmplitudeBound):
        symmetrizer_S(u, eps, model)
    with pytest.raises(AmplitudeBound):
        symbol_H(u, eps, torch.ones(1, dtype=DTYPE), model)


def test_symmetrizer_floor() -> None:
    assert symmetrizer_floor(
        NonlinearityModel.gross_pitaevskii()) == pytest.approx(1.0)
    # f' = 1 + 2R peaks at R = (3/2)^2, so c0 = 3/5.5.
    assert symmetrizer_floor(
        NonlinearityModel.cubic_quintic()) == pytest.approx(6.0 / 11.0)


def test_apply_L(grid_factory) -> None:
    grid = grid_factory()
    x = grid.coordinates(0)
    V = torch.stack([torch.cos(x), grid.zeros(), torch.sin(x)])
    out = apply_L(V, 0.3, 0.5, grid)
    assert torch.allclose(out[0], grid.zeros(), atol=1e-13)
    assert torch.allclose(out[1], -torch.cos(x), atol=1e-13)
    assert float(out[2].abs().max()) == 0.0


@pytest.mark.parametrize("model_name", MODELS)
@pytest.mark.parametrize("dim", DIMS)
def test_skew_quadratic_form(grid_factory, field_factory, model_name: str,
                             dim: int) -> None:
    model = NonlinearityModel.from_string(model_name)
    grid = grid_factory((2.0 * math.pi,) * dim, (32,) * dim)
    eps = 0.3
    V = torch.stack([
        field_factory(grid, num_modes=4, seed=seed) for seed in range(2 + dim)
    ])
    assert skew_quadratic_check(V, eps, grid, model) < 1e-10
    state = HydroVector(0.5 * torch.stack([
        field_factory(grid, num_modes=3, seed=10 + seed)
        for seed in range(2 + dim)
    ]), eps)
    assert skew_quadratic_check(V, eps, grid, model, state) < 1e-10
