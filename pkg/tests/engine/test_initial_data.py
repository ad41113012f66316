"""Tests for the initial data families."""
import math

import pytest
import torch

from nlskp.common.config import InitialDataConfig, ProfileKind
from nlskp.common.errors import AmplitudeBound, ConfigError
from nlskp.engine.initial_data import (build_initial_data, build_limit_datum,
                                       limit_drift, profile_samples,
                                       random_band_limited)
from nlskp.modeling.grid import PeriodicGrid
from nlskp.modeling.madelung import constraint_deficit
from nlskp.modeling.nonlinearity import NonlinearityModel
from nlskp.modeling.solitons import kdv_soliton, scaled_dark_soliton
from nlskp.modeling.spectral import get_spectral_ops

EPS = [0.2, 0.05]
MODELS = ["gp", "cubic_quintic"]
PROFILES = ["sech2", "gaussian", "random_band_limited"]
LINE = PeriodicGrid((16.0 * math.pi,), (512,))
PLANE = PeriodicGrid((8.0 * math.pi, 8.0 * math.pi), (256, 32))


@pytest.mark.parametrize("profile", PROFILES)
@pytest.mark.parametrize("model_name", MODELS)
@pytest.mark.parametrize("eps", EPS)
def test_well_prepared(profile: str, model_name: str, eps: float) -> None:
    model = NonlinearityModel.from_string(model_name)
    config = InitialDataConfig(profile=profile, amplitude=-0.5)
    data = build_initial_data(config, LINE, eps, model)
    assert constraint_deficit(data.polar0, model.c).raw < 1e-12
    ops = get_spectral_ops(LINE)
    centered, _ = ops.remove_x_mean(data.polar0.A)
    assert torch.allclose(data.limit_v0, centered, atol=1e-15)
    expected = (1.0 + eps * eps * data.polar0.A) * torch.exp(
        1j * eps * data.polar0.phi)
    assert torch.allclose(data.psi0, expected, atol=1e-14)


def test_sech2_mean_and_drift() -> None:
    config = InitialDataConfig(profile="sech2", amplitude=-0.5)
    gp = build_initial_data(config, LINE, 0.1,
                            NonlinearityModel.gross_pitaevskii())
    # int sech^2 = 2 on a box this wide.
    mean = -1.0 / LINE.lengths[0]
    assert gp.mean_amplitude == pytest.approx(mean, rel=1e-9)
    assert gp.drift == pytest.approx(mean, rel=1e-9)
    cubic_quintic = build_initial_data(config, LINE, 0.1,
                                       NonlinearityModel.cubic_quintic())
    assert cubic_quintic.drift == pytest.approx(mean * (1.0 + 2.0 / 3.0),
                                                rel=1e-9)


def test_limit_drift(gp_model) -> None:
    assert limit_drift(0.1, 0.05, gp_model) == pytest.approx(0.2)
    assert limit_drift(0.0, 0.0, gp_model) == 0.0


@pytest.mark.parametrize("theta", [0.7, 2.0])
@pytest.mark.parametrize("eps", EPS)
def test_slightly_prepared(gp_model, theta: float, eps: float) -> None:
    config = InitialDataConfig(preparedness="slightly_prepared", theta=theta)
    data = build_initial_data(config, LINE, eps, gp_model)
    deficit = constraint_deficit(data.polar0, gp_model.c)
    assert deficit.raw == pytest.approx(theta * eps, rel=1e-9)
    assert deficit.scaled == pytest.approx(theta, rel=1e-9)


def test_slightly_prepared_needs_a_profile(grid_factory, gp_model) -> None:
    config = InitialDataConfig(preparedness="slightly_prepared",
                               amplitude=0.0)
    with pytest.raises(ConfigError):
        build_initial_data(config, grid_factory(), 0.1, gp_model)


def test_ill_prepared_without_phase(gp_model) -> None:
    config = InitialDataConfig(preparedness="ill_prepared")
    data = build_initial_data(config, LINE, 0.1, gp_model)
    assert float(data.polar0.phi.abs().max()) == 0.0
    ops = get_spectral_ops(LINE)
    centered, _ = ops.remove_x_mean(data.polar0.A)
    assert torch.allclose(data.limit_v0, 0.5 * centered, atol=1e-15)


def test_ill_prepared_with_phase(gp_model) -> None:
    config = InitialDataConfig(preparedness="ill_prepared",
                               phase_profile="sech2",
                               phase_amplitude=-0.5)
    data = build_initial_data(config, LINE, 0.1, gp_model)
    # Equal amplitude and velocity profiles are in fact well prepared.
    assert constraint_deficit(data.polar0, gp_model.c).raw < 1e-12
    ops = get_spectral_ops(LINE)
    centered, _ = ops.remove_x_mean(data.polar0.A)
    assert torch.allclose(data.limit_v0, centered, atol=1e-14)


def test_soliton(gp_model) -> None:
    eps = 0.2
    config = InitialDataConfig(profile="soliton")
    data = build_initial_data(config, LINE, eps, gp_model)
    assert torch.equal(data.psi0, scaled_dark_soliton(LINE, eps))
    assert float(data.limit_v0.mean().abs()) < 1e-14
    with pytest.raises(ConfigError):
        build_initial_data(config, LINE, eps,
                           NonlinearityModel.cubic_quintic())


def test_amplitude_bound(gp_model) -> None:
    config = InitialDataConfig(amplitude=-20.0)
    with pytest.raises(AmplitudeBound):
        build_initial_data(config, LINE, 0.2, gp_model)
    # The same datum is admissible once eps^2 |A0| < 1/2.
    build_initial_data(config, LINE, 0.1, gp_model)


@pytest.mark.parametrize("eps", [0.0, 1.0, -0.1])
def test_eps_range(gp_model, eps: float) -> None:
    with pytest.raises(ValueError):
        build_initial_data(InitialDataConfig(), LINE, eps, gp_model)


def test_plane_data_have_zero_line_means(gp_model) -> None:
    data = build_initial_data(InitialDataConfig(), PLANE, 0.1, gp_model)
    ops = get_spectral_ops(PLANE)
    assert float(ops.x_mean(data.polar0.A).abs().max()) < 1e-14
    assert data.mean_amplitude == 0.0
    assert data.drift == 0.0
    assert constraint_deficit(data.polar0, gp_model.c).raw < 1e-12


def test_profile_samples(grid_factory) -> None:
    grid = grid_factory((16.0,), (64,))
    x = grid.coordinates(0)
    sech2 = profile_samples(ProfileKind.SECH2, grid, -0.5, 2.0, 4.0)
    assert torch.allclose(sech2, -0.5 / torch.cosh(x / 2.0).square())
    gaussian = profile_samples(ProfileKind.GAUSSIAN, grid, 0.3, 1.0, 4.0)
    assert float(gaussian.max()) == pytest.approx(0.3)
    with pytest.raises(ConfigError):
        profile_samples(ProfileKind.SOLITON, grid, 0.3, 1.0, 4.0)


@pytest.mark.parametrize("grid", [LINE, PLANE])
def test_random_band_limited(grid: PeriodicGrid) -> None:
    num_modes = 5
    field = random_band_limited(grid, -0.4, num_modes, seed=3)
    assert torch.equal(field, random_band_limited(grid, -0.4, num_modes, 3))
    assert not torch.equal(field, random_band_limited(grid, -0.4, num_modes,
                                                      4))
    assert float(field.abs().max()) == pytest.approx(0.4)
    ops = get_spectral_ops(grid)
    assert float(ops.x_mean(field).abs().max()) < 1e-14
    spectrum = ops.fft(field).abs()
    beyond = grid.frequency_index(0).abs().expand(grid.shape) > num_modes
    assert float(spectrum[beyond].max()) < 1e-12


def test_limit_datum(gp_model) -> None:
    config = InitialDataConfig(profile="soliton", width=2.0)
    v0 = build_limit_datum(config, LINE, gp_model)
    assert torch.equal(
        v0, kdv_soliton(LINE, gp_model.c, gp_model.k, beta=0.5))
    with pytest.raises(ConfigError):
        build_limit_datum(config, PLANE, gp_model)

    bump = build_limit_datum(InitialDataConfig(), PLANE, gp_model)
    ops = get_spectral_ops(PLANE)
    assert float(ops.x_mean(bump).abs().max()) < 1e-14
