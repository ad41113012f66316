"""Tests for eps-sweeps.

Run `pytest tests/engine/test_sweep.py`.
"""
import math

import pytest

from nlskp.common.config import (GridConfig, InitialDataConfig, ModelConfig,
                                 RunConfig, SweepConfig)
from nlskp.common.errors import ConfigError
from nlskp.common.outputs import BranchReport
from nlskp.engine import sweep
from nlskp.engine.sweep import (ORDER_METRICS, BranchRunner, SweepEngine,
                                estimate_orders, run_convergence_sweep)

GRID = GridConfig((16.0 * math.pi,), (256,))
RUN = RunConfig(T=0.05, output_interval=0.01, disable_tqdm=True)


def _sweep(eps_list, run_config: RunConfig = RUN, **init_kwargs):
    return run_convergence_sweep(SweepConfig(eps_list),
                                 ModelConfig("gp"),
                                 GRID,
                                 run_config,
                                 InitialDataConfig(**init_kwargs))


def test_single_branch() -> None:
    report = _sweep([0.2])
    assert report.orders == []
    branch = report.branch(0.2)
    assert branch.ok
    assert branch.times == pytest.approx([0.0, 0.01, 0.02, 0.03, 0.04, 0.05])
    for name in ("A_err_L2", "deficit", "half_sum_err", "E_eps", "I0"):
        assert len(branch.series[name]) == len(branch.times)
    # The limit datum is the centered initial amplitude.
    assert branch.series["A_err_L2"][0] < 1e-10
    assert branch.scalars["delta"] < 1e-6
    assert branch.scalars["M"] > 0.0
    assert branch.scalars["Nx"] == 256.0
    assert branch.scalars["drift_mass"] < 1e-10
    assert all(math.isfinite(v) for v in branch.scalars.values())


def test_vortex_aborts_only_its_branch() -> None:
    # min |psi0| = 1 - eps^2/2 sits below the floor for eps = 0.2 only.
    run = RunConfig(T=0.05, output_interval=0.01, vortex_floor=0.99,
                    disable_tqdm=True)
    report = _sweep([0.2, 0.1], run)
    coarse, fine = report.branches
    assert not coarse.ok
    assert "VortexDetected" in coarse.reason
    assert fine.ok
    assert report.orders == []
    summary = report.to_summary_frame()
    assert list(summary["status"]) == ["aborted", "ok"]


def test_branches_are_independent() -> None:
    both = _sweep([0.2, 0.1]).branch(0.1)
    alone = _sweep([0.1]).branch(0.1)
    assert both.scalars == pytest.approx(alone.scalars, rel=1e-12)


def test_orders_between_branches() -> None:
    report = _sweep([0.2, 0.1])
    assert {o.metric for o in report.orders} <= set(ORDER_METRICS)
    for order in report.orders:
        assert (order.eps_coarse, order.eps_fine) == (0.2, 0.1)
        assert math.isfinite(order.order)
    frame = report.to_orders_frame()
    assert list(frame.columns) == [
        "metric", "eps_coarse", "eps_fine", "order"
    ]


def test_estimate_orders() -> None:
    branches = [
        BranchReport(0.2, scalars={"nu": 4.0, "sup_A_err_L2": 0.0}),
        BranchReport.aborted(0.1, "VortexDetected: test"),
        BranchReport(0.05, scalars={"nu": 0.25, "sup_A_err_L2": 1.0}),
    ]
    orders = estimate_orders(branches)
    # sup_A_err_L2 vanishes on the coarse branch, so only nu is reported.
    assert len(orders) == 1
    assert orders[0].metric == "nu"
    assert (orders[0].eps_coarse, orders[0].eps_fine) == (0.2, 0.05)
    assert orders[0].order == pytest.approx(2.0)


def test_branch_runner_without_drift() -> None:
    run = RunConfig(T=0.01, output_interval=0.01, use_drift=False,
                    disable_tqdm=True)
    runner = BranchRunner(ModelConfig("gp"), GRID, run, InitialDataConfig())
    report = runner.run_branch(0.2)
    assert report.ok
    assert report.scalars["drift"] == 0.0


def test_amplitude_checked_up_front() -> None:
    with pytest.raises(ConfigError):
        SweepEngine(ModelConfig("gp"), GRID, RUN,
                    InitialDataConfig(amplitude=-20.0),
                    SweepConfig([0.2, 0.1]))


def test_ray_required(monkeypatch) -> None:
    monkeypatch.setattr(sweep, "ray", None)
    with pytest.raises(ConfigError):
        SweepEngine(ModelConfig("gp"), GRID, RUN, InitialDataConfig(),
                    SweepConfig([0.2], worker_use_ray=True))


def test_eps_list_must_decrease() -> None:
    with pytest.raises(ConfigError):
        SweepConfig([0.1, 0.2])
    with pytest.raises(ConfigError):
        SweepConfig([0.1, 0.1])
