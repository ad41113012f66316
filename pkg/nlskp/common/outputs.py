import math
from typing import Dict, List, NamedTuple, Optional

import pandas as pd


class InvariantRecord(NamedTuple):
    t: float
    E_eps: float
    P_eps: float
    mass: float


class LimitInvariantRecord(NamedTuple):
    t: float
    I0: float
    I1: float


class InvariantReport:
    """The conserved functionals of one state.

    Args:
        E_eps: Rescaled energy.
        P_eps: Rescaled momentum.
        E_minus_2cP: E - 2cP from its completed-square form.
        E_plus_2cP: E + 2cP from its completed-square form.
        I0: Limit invariant int v^2 of the paired limit field.
        I1: Limit Hamiltonian of the paired limit field.
        mass: ||psi||^2.
        expansion_residuals: Normalized residual per expansion identity.
    """

    def __init__(
        self,
        E_eps: float,
        P_eps: float,
        E_minus_2cP: float,
        E_plus_2cP: float,
        I0: float,
        I1: float,
        mass: float,
        expansion_residuals: Dict[str, float],
    ) -> None:
        self.E_eps = E_eps
        self.P_eps = P_eps
        self.E_minus_2cP = E_minus_2cP
        self.E_plus_2cP = E_plus_2cP
        self.I0 = I0
        self.I1 = I1
        self.mass = mass
        self.expansion_residuals = expansion_residuals

    def as_dict(self) -> Dict[str, float]:
        row = {
            "E_eps": self.E_eps,
            "P_eps": self.P_eps,
            "E_minus_2cP": self.E_minus_2cP,
            "E_plus_2cP": self.E_plus_2cP,
            "I0": self.I0,
            "I1": self.I1,
            "mass": self.mass,
        }
        for name, value in self.expansion_residuals.items():
            row[f"residual_{name}"] = value
        return row

    def is_finite(self) -> bool:
        return all(
            math.isfinite(v) for k, v in self.as_dict().items()
            if k not in ("I0", "I1"))

    def __repr__(self) -> str:
        return (f"InvariantReport(E_eps={self.E_eps!r}, P_eps={self.P_eps!r}, "
                f"E_minus_2cP={self.E_minus_2cP!r}, "
                f"E_plus_2cP={self.E_plus_2cP!r}, I0={self.I0!r}, "
                f"I1={self.I1!r}, mass={self.mass!r}, "
                f"expansion_residuals={self.expansion_residuals})")


class BranchReport:
    """Diagnostics of one eps-branch of a convergence sweep.

    Args:
        eps: Scaling parameter of the branch.
        times: Scaled comparison times.
        series: Time series by diagnostic name, aligned with `times`.
        scalars: Per-branch scalar diagnostics (M, delta, nu, drifts, ...).
        status: "ok" or "aborted".
        reason: Why the branch was aborted, if it was.
    """

    def __init__(
        self,
        eps: float,
        times: Optional[List[float]] = None,
        series: Optional[Dict[str, List[float]]] = None,
        scalars: Optional[Dict[str, float]] = None,
        status: str = "ok",
        reason: Optional[str] = None,
    ) -> None:
        self.eps = eps
        self.times = times if times is not None else []
        self.series = series if series is not None else {}
        self.scalars = scalars if scalars is not None else {}
        self.status = status
        self.reason = reason

    @classmethod
    def aborted(cls, eps: float, reason: str) -> "BranchReport":
        return cls(eps, status="aborted", reason=reason)

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def sup(self, name: str) -> float:
        return max(self.series[name])

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({"t": self.times})
        for name, values in self.series.items():
            frame[name] = values
        return frame

    def __repr__(self) -> str:
        return (f"BranchReport(eps={self.eps}, status={self.status!r}, "
                f"reason={self.reason!r}, num_times={len(self.times)}, "
                f"scalars={self.scalars})")


class OrderEstimate(NamedTuple):
    metric: str
    eps_coarse: float
    eps_fine: float
    order: float


class ConvergenceReport:
    """All branches of a sweep and the empirical orders between
    consecutive successful branches."""

    def __init__(self, branches: List[BranchReport],
                 orders: List[OrderEstimate]) -> None:
        self.branches = branches
        self.orders = orders

    def branch(self, eps: float) -> BranchReport:
        for branch in self.branches:
            if branch.eps == eps:
                return branch
        raise KeyError(f"No branch with eps={eps}.")

    def to_summary_frame(self) -> pd.DataFrame:
        rows = []
        for branch in self.branches:
            row: Dict[str, object] = {
                "eps": branch.eps,
                "status": branch.status,
                "reason": branch.reason or "",
            }
            row.update(branch.scalars)
            rows.append(row)
        return pd.DataFrame(rows)

    def to_orders_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.orders, columns=list(OrderEstimate._fields))

    def __repr__(self) -> str:
        return (f"ConvergenceReport(branches={self.branches}, "
                f"orders={self.orders})")
