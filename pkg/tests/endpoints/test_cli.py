"""End-to-end tests of the nlskp command line.

Run `pytest tests/endpoints/test_cli.py`.
"""
import math
import os

import pandas as pd
import pytest

from nlskp.endpoints.cli import (EXIT_CONFIG_ERROR, EXIT_SIMULATION_ERROR,
                                 main)
from nlskp.endpoints.export import read_field, read_plotdata

# 16 pi on 256 points keeps dt = 1e-3 below dt_max for eps = 0.2.
BOX = ["--lengths", repr(16.0 * math.pi), "--points", "256"]
QUIET = ["--log-level", "WARNING"]
NO_BARS = ["--disable-tqdm", *QUIET]


def _simulate_nls(out_dir, *extra) -> int:
    return main([
        "simulate-nls", "--eps", "0.2", "--T", "0.005", *BOX, "--out",
        str(out_dir), *NO_BARS, *extra
    ])


def test_simulate_nls(tmp_path) -> None:
    assert _simulate_nls(tmp_path) == 0
    frame = pd.read_csv(tmp_path / "invariants.csv")
    assert list(frame.columns) == ["t", "E_eps", "P_eps", "mass"]
    assert frame["t"].tolist() == pytest.approx(
        [0.0, 0.001, 0.002, 0.003, 0.004, 0.005])
    plotdata = read_plotdata(str(tmp_path / "invariants.dat"))
    assert plotdata["mass"].tolist() == frame["mass"].tolist()
    snapshots = sorted(os.listdir(tmp_path / "snapshots"))
    assert snapshots == [f"psi_{i:05d}.nlskp" for i in range(6)]
    field = read_field(str(tmp_path / "snapshots" / snapshots[0]))
    assert field.is_complex
    assert field.grid.points == (256,)


def test_no_snapshots(tmp_path) -> None:
    assert _simulate_nls(tmp_path, "--no-snapshots", "--formats",
                         "csv") == 0
    assert sorted(os.listdir(tmp_path)) == ["invariants.csv"]


def test_invariants_and_hydro_check(tmp_path, capsys) -> None:
    run_dir = tmp_path / "run"
    assert _simulate_nls(run_dir) == 0
    capsys.readouterr()

    report_dir = tmp_path / "report"
    assert main([
        "invariants", "--in",
        str(run_dir / "snapshots" / "psi_00000.nlskp"), "--eps", "0.2",
        "--out",
        str(report_dir), *NO_BARS
    ]) == 0
    printed = capsys.readouterr().out
    assert "E_eps" in printed
    report = pd.read_csv(report_dir / "invariants_report.csv")
    trajectory = pd.read_csv(run_dir / "invariants.csv")
    assert report["E_eps"][0] == pytest.approx(trajectory["E_eps"][0],
                                               rel=1e-12)
    assert report["mass"][0] == pytest.approx(trajectory["mass"][0],
                                              rel=1e-12)

    hydro_dir = tmp_path / "hydro"
    assert main([
        "hydro-check", "--traj",
        str(run_dir), "--eps", "0.2", "--out",
        str(hydro_dir), *NO_BARS
    ]) == 0
    residuals = pd.read_csv(hydro_dir / "hydro_residuals.csv")
    # Two snapshots at either end feed the time stencil only.
    assert residuals["t"].tolist() == pytest.approx([0.002, 0.003])
    assert residuals.notna().all().all()


def test_hydro_check_drops_short_last_interval(tmp_path) -> None:
    run_dir = tmp_path / "run"
    assert main([
        "simulate-nls", "--eps", "0.2", "--T", "0.02", "--output-interval",
        "0.003", *BOX, "--out",
        str(run_dir), *NO_BARS
    ]) == 0
    times = pd.read_csv(run_dir / "invariants.csv")["t"].tolist()
    assert times[-2:] == pytest.approx([0.018, 0.02])

    hydro_dir = tmp_path / "hydro"
    assert main([
        "hydro-check", "--traj",
        str(run_dir), "--eps", "0.2", "--out",
        str(hydro_dir), *NO_BARS
    ]) == 0
    residuals = pd.read_csv(hydro_dir / "hydro_residuals.csv")
    assert residuals["t"].tolist() == pytest.approx([0.006, 0.009, 0.012])


def test_hydro_check_needs_snapshots(tmp_path) -> None:
    assert main([
        "hydro-check", "--traj",
        str(tmp_path), "--eps", "0.2", "--out",
        str(tmp_path), *NO_BARS
    ]) == EXIT_CONFIG_ERROR


def test_simulate_kdv(tmp_path) -> None:
    assert main([
        "simulate-kdv", "--profile", "soliton", "--T", "0.01",
        "--output-interval", "0.005", *BOX, "--out",
        str(tmp_path), *NO_BARS
    ]) == 0
    frame = pd.read_csv(tmp_path / "invariants.csv")
    assert list(frame.columns) == ["t", "I0", "I1"]
    assert len(frame) == 3
    assert frame["I0"].iloc[-1] == pytest.approx(frame["I0"].iloc[0],
                                                 rel=1e-8)


def test_simulate_kpi(tmp_path) -> None:
    assert main([
        "simulate-kpi", "--lengths",
        repr(8.0 * math.pi), repr(8.0 * math.pi), "--points", "64", "32",
        "--T", "0.002", "--no-snapshots", "--out",
        str(tmp_path), *NO_BARS
    ]) == 0
    assert len(pd.read_csv(tmp_path / "invariants.csv")) == 3


@pytest.mark.parametrize("argv", [
    ["simulate-kdv", "--lengths", "8.0", "8.0", "--points", "16", "16"],
    ["simulate-kpi", "--lengths", "8.0", "--points", "16"],
    ["simulate-nls", "--T", "0.01"],
    ["simulate-nls", "--eps", "0.2", "--points", "100"],
    ["sweep", "--eps-list", "0.1", "0.2"],
    ["soliton-check", "--nonlinearity", "cubic_quintic"],
])
def test_config_errors(tmp_path, argv) -> None:
    assert main(argv + ["--out", str(tmp_path), *NO_BARS]) == EXIT_CONFIG_ERROR


def test_transport_bad_eps(tmp_path) -> None:
    assert main([
        "transport-probe", "--eps", "0.2,x", "--R", "1.0", "--T", "1.0",
        "--out",
        str(tmp_path), *QUIET
    ]) == EXIT_CONFIG_ERROR


def test_missing_config_file(tmp_path) -> None:
    assert main([
        "simulate-nls", "--config",
        str(tmp_path / "missing.toml"), "--out",
        str(tmp_path), *NO_BARS
    ]) == EXIT_CONFIG_ERROR


def test_vortex_floor_stops_the_run(tmp_path) -> None:
    # min |psi0| = 1 - 0.5 eps^2 = 0.98.
    assert _simulate_nls(tmp_path, "--vortex-floor",
                         "0.99") == EXIT_SIMULATION_ERROR


def test_transport_from_config_file(tmp_path) -> None:
    config = tmp_path / "transport.toml"
    config.write_text(f"""
[grid]
lengths = [{8.0 * math.pi!r}]
points = [256]

[initial_data]
preparedness = "ill_prepared"
""")
    out_dir = tmp_path / "transport"
    assert main([
        "transport-probe", "--config",
        str(config), "--eps", "0.2,0.1", "--R",
        repr(math.pi), "--T", "10", "--out",
        str(out_dir), *QUIET
    ]) == 0
    frame = pd.read_csv(out_dir / "transport.csv")
    assert frame["eps"].tolist() == [0.2, 0.1]
    assert frame["holds"].all()
    assert frame["ratio"][1] == pytest.approx(frame["ratio"][0], rel=1e-6)


def _run_transport(out_dir, *extra) -> pd.DataFrame:
    assert main([
        "transport-probe", "--eps", "0.2,0.1", "--R",
        repr(math.pi), "--T", "10", "--out",
        str(out_dir), *QUIET, *extra
    ]) == 0
    return pd.read_csv(out_dir / "transport.csv")


def test_transport_defaults_to_ill_prepared_data(tmp_path) -> None:
    default = _run_transport(tmp_path / "default")
    assert default["holds"].all()
    assert (default["norm_sq"] > 0).all()
    assert default["ratio"][1] == pytest.approx(default["ratio"][0],
                                                rel=1e-6)

    ill = _run_transport(tmp_path / "ill", "--preparedness", "ill_prepared")
    assert ill["norm_sq"].tolist() == pytest.approx(
        default["norm_sq"].tolist(), rel=1e-12)
    well = _run_transport(tmp_path / "well", "--preparedness",
                          "well_prepared")
    assert well["norm_sq"][0] != pytest.approx(default["norm_sq"][0],
                                               rel=1e-3)


def test_soliton_check(tmp_path, capsys) -> None:
    assert main([
        "soliton-check", "--eps", "0.2", "--T", "0.05", *BOX, "--out",
        str(tmp_path), *NO_BARS
    ]) == 0
    assert "nls_dark_soliton" in capsys.readouterr().out
    frame = pd.read_csv(tmp_path / "soliton_check.csv").set_index("check")
    assert frame.loc["nls_dark_soliton", "err_L2"] < 1e-3
    assert frame.loc["kdv_soliton", "err_L2"] < 1e-5
    assert frame.loc["kdv_constants_fit", "err_Linf"] < 1e-4


def test_sweep(tmp_path) -> None:
    assert main([
        "sweep", "--eps-list", "0.2", "0.1", "--T", "0.01",
        "--output-interval", "0.005", *BOX, "--out",
        str(tmp_path), *NO_BARS
    ]) == 0
    summary = pd.read_csv(tmp_path / "summary.csv")
    assert summary["eps"].tolist() == [0.2, 0.1]
    assert summary["status"].tolist() == ["ok", "ok"]
    for name in ("orders.csv", "branch_eps=0.2.csv", "branch_eps=0.1.dat"):
        assert os.path.exists(tmp_path / name)


def test_requires_a_command() -> None:
    with pytest.raises(SystemExit):
        main([])
