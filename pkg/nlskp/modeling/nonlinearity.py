"""Defocusing nonlinearities f(R) with f(1) = 0 and f'(1) > 0.

Every model is a polynomial in the density R, so the potential
F(R) = 2 * int_1^R f and all Taylor remainders around the background R = 1
are exact polynomials as well.
"""
import enum
import math
from typing import Callable, Dict, List, Sequence, Tuple, Union

import numpy as np
import torch
from numpy.polynomial import Polynomial

from nlskp.common.errors import ConfigError, DomainError
from nlskp.common.logger import init_logger

logger = init_logger(__name__)

ArrayLike = Union[float, np.ndarray, torch.Tensor]

# Relative tolerance on |f(1)| when validating user polynomials.
_F1_RTOL = 1e-12
# Number of samples used when measuring the delta radius and g constant.
_NUM_MEASURE_SAMPLES = 10_000


class NonlinearityKind(enum.Enum):
    GROSS_PITAEVSKII = enum.auto()
    CUBIC_QUINTIC = enum.auto()
    USER_POLYNOMIAL = enum.auto()


class RemainderKind(enum.Enum):
    F3 = enum.auto()
    F4 = enum.auto()
    TILDE_F = enum.auto()
    Q = enum.auto()
    G = enum.auto()


def _horner(coefficients: Sequence[float], x: ArrayLike) -> ArrayLike:
    result: ArrayLike = 0.0
    for coef in reversed(coefficients):
        result = result * x + float(coef)
    if isinstance(x, torch.Tensor) and not isinstance(result, torch.Tensor):
        result = torch.full_like(x, result)
    return result


def _compose(p: Polynomial, q: Polynomial) -> Polynomial:
    """Returns p(q(r)) as a polynomial in r."""
    out = Polynomial([0.0])
    power = Polynomial([1.0])
    for coef in p.coef:
        out = out + coef * power
        power = power * q
    return out


def _truncate_below(p: Polynomial, degree: int) -> np.ndarray:
    """Coefficients of p with every power below `degree` dropped."""
    coef = np.array(p.coef, dtype=np.float64)
    if coef.size < degree + 1:
        coef = np.concatenate([coef, np.zeros(degree + 1 - coef.size)])
    coef[:degree] = 0.0
    return coef


def _min_value(x: ArrayLike) -> float:
    if isinstance(x, torch.Tensor):
        return float(x.min())
    return float(np.min(x))


def _max_abs(x: ArrayLike) -> float:
    if isinstance(x, torch.Tensor):
        return float(x.abs().max())
    return float(np.max(np.abs(x)))


class NonlinearityModel:
    """A polynomial defocusing nonlinearity and everything derived from it.

    Args:
        coefficients: Power-basis coefficients c0, c1, ... of f(R).
        kind: Built-in tag of the model.
        name: Config string the model was built from.
    """

    def __init__(
        self,
        coefficients: Sequence[float],
        kind: NonlinearityKind = NonlinearityKind.USER_POLYNOMIAL,
        name: str = "poly",
    ) -> None:
        self.coefficients: Tuple[float, ...] = tuple(
            float(c) for c in coefficients)
        self.kind = kind
        self.name = name
        self._verify_args()

        self.f = Polynomial(self.coefficients)
        self.df = self.f.deriv(1)
        self.d2f = self.f.deriv(2)
        self.potential = 2.0 * self.f.integ(lbnd=1)

        # Derivatives at the background, from the coefficients.
        self.f1 = float(self.df(1.0))
        self.f2 = float(self.d2f(1.0))
        if not self.f1 > 0.0:
            raise ConfigError(
                f"Nonlinearity {self.name} is not defocusing: f'(1) = "
                f"{self.f1} must be positive.")
        self.c = math.sqrt(self.f1)
        self.k = 6.0 + 2.0 * self.f2 / self.f1

        shift = Polynomial([1.0, 1.0])
        square_shift = Polynomial([1.0, 2.0, 1.0])
        self._shifted_f = _compose(self.f, shift)
        shifted_potential = _compose(self.potential, shift)
        f_of_square = _compose(self.f, square_shift)
        self._remainders: Dict[RemainderKind, np.ndarray] = {
            RemainderKind.F3: _truncate_below(shifted_potential, 3),
            RemainderKind.F4: _truncate_below(shifted_potential, 4),
            RemainderKind.TILDE_F: _truncate_below(f_of_square, 2) / self.f1,
            RemainderKind.Q: _truncate_below(f_of_square, 3) / self.f1,
        }
        self._f_coef = tuple(self.f.coef)
        self._df_coef = tuple(self.df.coef)
        self._potential_coef = tuple(self.potential.coef)

    def _verify_args(self) -> None:
        if len(self.coefficients) < 2:
            raise ConfigError(
                "A nonlinearity needs at least two coefficients, got "
                f"{list(self.coefficients)}.")
        if not all(math.isfinite(c) for c in self.coefficients):
            raise ConfigError(
                f"Nonlinearity coefficients must be finite, got "
                f"{list(self.coefficients)}.")
        scale = max(abs(c) for c in self.coefficients)
        f_at_one = sum(self.coefficients)
        if abs(f_at_one) > _F1_RTOL * scale:
            raise ConfigError(
                f"Nonlinearity {self.name} must vanish on the background: "
                f"f(1) = {f_at_one}.")

    @classmethod
    def gross_pitaevskii(cls) -> "NonlinearityModel":
        return cls([-1.0, 1.0], NonlinearityKind.GROSS_PITAEVSKII, "gp")

    @classmethod
    def cubic_quintic(cls,
                      alpha: float = 1.0,
                      beta: float = 1.0) -> "NonlinearityModel":
        """f(R) = alpha (R - 1) + beta (R^2 - 1)."""
        return cls([-alpha - beta, alpha, beta],
                   NonlinearityKind.CUBIC_QUINTIC,
                   f"cubic_quintic:{alpha!r},{beta!r}")

    @classmethod
    def from_string(cls, text: str) -> "NonlinearityModel":
        """Parses "gp", "cubic_quintic[:alpha,beta]" or "poly:c0,c1,..."."""
        name, _, params = text.strip().partition(":")
        name = name.strip().lower()
        if name not in _BUILTIN_MODELS:
            raise ConfigError(
                f"Unknown nonlinearity {text!r}. Supported: "
                f"{sorted(_BUILTIN_MODELS)}.")
        try:
            values = [float(v) for v in params.split(",") if v.strip()]
        except ValueError as e:
            raise ConfigError(
                f"Cannot parse nonlinearity parameters in {text!r}.") from e
        return _BUILTIN_MODELS[name](values)

    # Evaluation. All of these accept floats, numpy arrays or torch tensors.

    def eval_f(self, density: ArrayLike) -> ArrayLike:
        return _horner(self._f_coef, density)

    def eval_df(self, density: ArrayLike) -> ArrayLike:
        return _horner(self._df_coef, density)

    def eval_potential_F(self, density: ArrayLike) -> ArrayLike:
        return _horner(self._potential_coef, density)

    def derived_coefficients(self) -> Tuple[float, float]:
        return self.c, self.k

    @property
    def shifted_coefficients(self) -> List[float]:
        """Coefficients b_j of f(1 + r) = sum_j b_j r^j."""
        return [float(b) for b in self._shifted_f.coef]

    def remainder(self, kind: Union[RemainderKind, str],
                  r: ArrayLike) -> ArrayLike:
        if isinstance(kind, str):
            try:
                kind = RemainderKind[kind.upper().replace("TILDEF",
                                                          "TILDE_F")]
            except KeyError as e:
                raise ValueError(f"Unknown remainder {kind!r}.") from e
        if kind == RemainderKind.G:
            return self._remainder_g(r)
        if _min_value(r) < -1.0:
            raise DomainError(
                f"Remainder {kind.name} needs 1 + r >= 0, got min r = "
                f"{_min_value(r)}.")
        return _horner(self._remainders[kind], r)

    def _remainder_g(self, a: ArrayLike) -> ArrayLike:
        """g(a) = f'(|1 + a|^2)/c^2 - 1 for real or complex |a| <= 1."""
        if _max_abs(a) > 1.0:
            raise DomainError(
                f"g is defined on |a| <= 1, got max |a| = {_max_abs(a)}.")
        if isinstance(a, torch.Tensor):
            density = (1.0 + a).abs().square()
        else:
            density = np.abs(1.0 + np.asarray(a))**2
        return self.eval_df(density) / self.f1 - 1.0

    def grenier_tail(self, s: torch.Tensor, eps: float) -> torch.Tensor:
        """sum_{j>=2} b_j eps^(2j-4) s^j, the part of
        f(1 + eps^2 s)/eps^4 beyond its linear term."""
        b = self.shifted_coefficients
        if len(b) <= 2:
            return torch.zeros_like(s)
        inner = _horner(b[2:], eps * eps * s)
        return s * s * inner

    # Measured constants.

    def delta_radius(self, upper_factor: float = 1.5) -> float:
        """Largest delta <= 1/2 such that
        (c^2/2)(R-1)^2 <= F(R) <= upper_factor c^2 (R-1)^2 on |R-1| <= delta.
        """

        def holds(delta: float) -> bool:
            r = np.linspace(-delta, delta, _NUM_MEASURE_SAMPLES)
            value = self.potential(1.0 + r)
            quad = self.f1 * r * r
            slack = 1e-14 * np.maximum(quad, 1e-300)
            return bool(
                np.all(value >= 0.5 * quad - slack)
                and np.all(value <= upper_factor * quad + slack))

        if holds(0.5):
            return 0.5
        lo, hi = 0.0, 0.5
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if holds(mid):
                lo = mid
            else:
                hi = mid
        return lo

    def measured_g_constant(self) -> float:
        """max |g(a)|/|a| over complex 0 < |a| <= 1."""
        radius = np.linspace(1e-3, 1.0, 100)
        angle = np.linspace(0.0, 2.0 * np.pi, 100, endpoint=False)
        a = radius[:, None] * np.exp(1j * angle[None, :])
        return float(np.max(np.abs(self._remainder_g(a)) / np.abs(a)))

    def __repr__(self) -> str:
        return (f"NonlinearityModel(name={self.name!r}, "
                f"coefficients={list(self.coefficients)}, c={self.c:.17g}, "
                f"k={self.k:.17g})")


def _gp_factory(values: List[float]) -> NonlinearityModel:
    if values:
        raise ConfigError("The gp nonlinearity takes no parameters.")
    return NonlinearityModel.gross_pitaevskii()


def _cubic_quintic_factory(values: List[float]) -> NonlinearityModel:
    if values and len(values) != 2:
        raise ConfigError(
            f"cubic_quintic takes two parameters alpha,beta, got {values}.")
    return NonlinearityModel.cubic_quintic(*values)


def _poly_factory(values: List[float]) -> NonlinearityModel:
    return NonlinearityModel(values, NonlinearityKind.USER_POLYNOMIAL,
                             "poly:" + ",".join(repr(v) for v in values))


_BUILTIN_MODELS: Dict[str, Callable[[List[float]], NonlinearityModel]] = {
    "gp": _gp_factory,
    "gross_pitaevskii": _gp_factory,
    "cubic_quintic": _cubic_quintic_factory,
    "poly": _poly_factory,
}
