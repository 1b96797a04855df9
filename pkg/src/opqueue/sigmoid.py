"""Sigmoidal accuracy models and their calculus primitives.

Two families of accuracy-versus-time curves for binary decision making:

* :class:`PewModel` -- logistic curve ``p0 / (1 + exp(-(a*t - b)))`` with
  probability ceiling ``p0``, steepness ``a`` (1/s) and offset ``b``.
* :class:`DriftDiffusionModel` -- probability that Gaussian evidence with
  drift ``beta`` and diffusion ``sigma`` lies above threshold ``eta`` at
  time ``t``, which equals ``Phi((beta*t - eta) / (sigma*sqrt(t)))`` for
  the standard normal CDF ``Phi``.

Both curves are smooth, nondecreasing maps from time into [0, 1], convex
below their inflection point and concave above it, with first and second
derivatives that vanish in the tail.  The solvers consume the primitives
exposed here: the first two derivatives, the inverse of the first
derivative on each monotone branch, and the times at which the second
derivative crosses a positive level.

All functions are pure and all model types immutable, so everything in
this module is safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Union

from ._search import bisect_root, expand_until, golden_section_max
from .errors import DomainError, NoSolutionError

__all__ = [
    "PewModel",
    "DriftDiffusionModel",
    "SigmoidModel",
    "DerivativeProfile",
    "value",
    "derivative",
    "second_derivative",
    "inflection_point",
    "derivative_profile",
    "derivative_inverse",
    "curvature_crossings",
]

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
# Logistic argument at which s*(1-s) peaks in s'' space: 0.5 - 1/(2*sqrt(3)).
_S_CURVATURE_PEAK = 0.5 - 0.5 / math.sqrt(3.0)
_BISECT_TOL = 1e-9


@dataclass(frozen=True)
class PewModel:
    """Logistic accuracy curve ``p0 / (1 + exp(-(steepness*t - offset)))``."""

    p0: float
    steepness: float
    offset: float

    def __post_init__(self) -> None:
        if not 0.0 < self.p0 <= 1.0:
            raise DomainError(f"p0 must lie in (0, 1], got {self.p0}")
        if self.steepness <= 0.0:
            raise DomainError(f"steepness must be positive, got {self.steepness}")
        if not math.isfinite(self.offset):
            raise DomainError(f"offset must be finite, got {self.offset}")


@dataclass(frozen=True)
class DriftDiffusionModel:
    """Accuracy of thresholding drifting Gaussian evidence at time ``t``."""

    drift: float
    diffusion: float
    threshold: float

    def __post_init__(self) -> None:
        if self.drift <= 0.0:
            raise DomainError(f"drift must be positive, got {self.drift}")
        if self.diffusion <= 0.0:
            raise DomainError(f"diffusion must be positive, got {self.diffusion}")
        if self.threshold <= 0.0:
            raise DomainError(f"threshold must be positive, got {self.threshold}")


SigmoidModel = Union[PewModel, DriftDiffusionModel]


@dataclass(frozen=True)
class DerivativeProfile:
    """Landmark values of a model's derivative structure.

    ``derivative_max`` is attained at ``inflection``; ``second_derivative_max``
    is the positive peak of the second derivative (reached below the
    inflection point); ``derivative_at_zero`` is the slope at t = 0 (a limit,
    equal to 0, for the drift-diffusion family).
    """

    inflection: float
    derivative_max: float
    second_derivative_max: float
    derivative_at_zero: float


def _logistic(x: float) -> float:
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _logistic_s1ms(x: float) -> float:
    """s(x) * (1 - s(x)), computed without cancellation in either tail."""
    e = math.exp(-abs(x))
    q = 1.0 + e
    return e / (q * q)


def _norm_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / _SQRT2)


def _ddm_z(model: DriftDiffusionModel, t: float) -> float:
    return (model.drift * t - model.threshold) / (model.diffusion * math.sqrt(t))


def value(model: SigmoidModel, t: float) -> float:
    """Probability of a correct decision after ``t`` seconds of attention.

    ``t`` must be nonnegative.  The drift-diffusion value at t = 0 is the
    limit 0.
    """
    if t < 0.0:
        raise DomainError(f"time must be nonnegative, got {t}")
    if isinstance(model, PewModel):
        return model.p0 * _logistic(model.steepness * t - model.offset)
    if t == 0.0:
        return 0.0
    return _norm_cdf(_ddm_z(model, t))


def derivative(model: SigmoidModel, t: float) -> float:
    """First derivative of :func:`value` (1/seconds).

    Defined for t >= 0 on the logistic family and t > 0 on the
    drift-diffusion family.
    """
    if isinstance(model, PewModel):
        if t < 0.0:
            raise DomainError(f"time must be nonnegative, got {t}")
        x = model.steepness * t - model.offset
        return model.p0 * model.steepness * _logistic_s1ms(x)
    if t <= 0.0:
        raise DomainError(f"drift-diffusion derivative needs t > 0, got {t}")
    z = _ddm_z(model, t)
    z_rate = (model.drift * t + model.threshold) / (2.0 * model.diffusion * t**1.5)
    return _INV_SQRT_2PI * math.exp(-0.5 * z * z) * z_rate


def _derivative_or_limit(model: SigmoidModel, t: float) -> float:
    """Like :func:`derivative` but returns the t -> 0+ limit at t = 0."""
    if t == 0.0 and isinstance(model, DriftDiffusionModel):
        return 0.0
    return derivative(model, t)


def second_derivative(model: SigmoidModel, t: float) -> float:
    """Second derivative of :func:`value` (1/seconds^2).

    Analytic for the logistic family.  For the drift-diffusion family it is
    a central finite difference of the analytic first derivative with step
    ``max(1e-6, 1e-6 * t)`` (clamped to keep the stencil inside t > 0); the
    third-order closed form buys nothing at the tolerances used here.
    """
    if isinstance(model, PewModel):
        if t < 0.0:
            raise DomainError(f"time must be nonnegative, got {t}")
        a = model.steepness
        x = a * t - model.offset
        e = math.exp(-abs(x))
        q = 1.0 + e
        # 1 - 2s without cancellation: s = 1/(1+e) for x >= 0, e/(1+e) for x < 0.
        one_minus_2s = (e - 1.0) / q if x >= 0.0 else (1.0 - e) / q
        return model.p0 * a * a * (e / (q * q)) * one_minus_2s
    if t <= 0.0:
        raise DomainError(f"drift-diffusion curvature needs t > 0, got {t}")
    h = max(1e-6, 1e-6 * t)
    h = min(h, 0.5 * t)
    return (derivative(model, t + h) - derivative(model, t - h)) / (2.0 * h)


def _second_derivative_or_limit(model: SigmoidModel, t: float) -> float:
    if t == 0.0 and isinstance(model, DriftDiffusionModel):
        return 0.0
    return second_derivative(model, t)


def inflection_point(model: SigmoidModel) -> float:
    """Time at which the derivative peaks (convexity switches to concavity).

    Exact ``offset/steepness`` for the logistic family; located by
    golden-section search on the derivative for the drift-diffusion family
    (absolute tolerance 1e-9 s).
    """
    if isinstance(model, PewModel):
        return model.offset / model.steepness
    guess = model.threshold / model.drift
    fp = lambda t: derivative(model, t)
    hi = expand_until(
        lambda x: fp(x) < fp(x / 2.0),
        0.0,
        guess,
        what="inflection bracket",
    )
    t_star, _ = golden_section_max(fp, 1e-12, hi, tol=_BISECT_TOL)
    return t_star


def _curvature_peak(model: SigmoidModel, t_inf: float) -> tuple[float, float]:
    """Location and height of the positive peak of the second derivative."""
    if isinstance(model, PewModel):
        x_peak = math.log(_S_CURVATURE_PEAK / (1.0 - _S_CURVATURE_PEAK))
        t_peak = (model.offset + x_peak) / model.steepness
        t_peak = max(t_peak, 0.0)
        return t_peak, second_derivative(model, t_peak)
    lo = 1e-9 * t_inf
    t_peak, f2_peak = golden_section_max(
        lambda t: second_derivative(model, t), lo, t_inf, tol=_BISECT_TOL
    )
    return t_peak, f2_peak


def derivative_profile(model: SigmoidModel) -> DerivativeProfile:
    """Compute the landmark derivative values for ``model``."""
    t_inf = inflection_point(model)
    _, f2_max = _curvature_peak(model, t_inf)
    return DerivativeProfile(
        inflection=t_inf,
        derivative_max=derivative(model, t_inf),
        second_derivative_max=f2_max,
        derivative_at_zero=_derivative_or_limit(model, 0.0),
    )


def derivative_inverse(
    model: SigmoidModel, y: float, branch: Literal["lower", "upper"]
) -> float:
    """Time at which the derivative equals ``y`` on the requested branch.

    The derivative rises to its maximum at the inflection point and decays
    afterwards, so every level in range is hit once on each side:
    ``branch="upper"`` returns the unique t at or above the inflection
    point, ``branch="lower"`` the unique t in [0, inflection].  The lower
    branch additionally requires ``y >= derivative(0)`` (no pre-inflection
    crossing exists below the starting slope).

    Raises :class:`NoSolutionError` when ``y`` exceeds the derivative
    maximum or undercuts the lower branch, :class:`DomainError` for
    ``y <= 0`` (the upper branch diverges as y -> 0+).
    """
    if branch not in ("lower", "upper"):
        raise DomainError(f"branch must be 'lower' or 'upper', got {branch!r}")
    if y <= 0.0:
        raise DomainError(f"derivative level must be positive, got {y}")
    t_inf = inflection_point(model)
    if isinstance(model, PewModel):
        scale = model.p0 * model.steepness
        q = y / scale
        if q > 0.25:
            raise NoSolutionError(
                f"level {y} exceeds the derivative maximum {0.25 * scale}"
            )
        d = math.sqrt(max(0.0, 1.0 - 4.0 * q))
        # Smaller logistic coordinate of the pair s*(1-s) = q, cancellation-free.
        s_small = 2.0 * q / (1.0 + d)
        gap = math.log((1.0 - s_small) / s_small)
        if branch == "upper":
            return (model.offset + gap) / model.steepness
        if y < derivative(model, 0.0):
            raise NoSolutionError(
                f"level {y} is below the starting slope; no pre-inflection crossing"
            )
        return max((model.offset - gap) / model.steepness, 0.0)

    fp_max = derivative(model, t_inf)
    if y > fp_max:
        raise NoSolutionError(f"level {y} exceeds the derivative maximum {fp_max}")
    if y == fp_max:
        return t_inf
    if branch == "upper":
        hi = expand_until(
            lambda t: derivative(model, t) < y,
            t_inf,
            max(t_inf, 1.0),
            what="upper-branch inverse bracket",
        )
        return bisect_root(lambda t: derivative(model, t) - y, t_inf, hi, tol=_BISECT_TOL)
    lo = t_inf
    for _ in range(64):
        lo *= 0.5
        if derivative(model, lo) < y:
            break
    else:
        raise NoSolutionError(
            f"level {y} is below the starting slope; no pre-inflection crossing"
        )
    return bisect_root(lambda t: derivative(model, t) - y, lo, t_inf, tol=_BISECT_TOL)


def curvature_crossings(model: SigmoidModel, level: float) -> tuple[float, float]:
    """Times where the second derivative crosses a positive ``level``.

    Returns ``(first, last)``: the smallest root of ``f''(t) = level`` when
    ``level`` lies between ``f''(0)`` and the curvature peak (else 0.0), and
    the largest root when ``level`` does not exceed the peak (else 0.0).
    At exact tangency both values equal the peak location.
    """
    if level <= 0.0:
        raise DomainError(f"curvature level must be positive, got {level}")
    t_inf = inflection_point(model)
    t_peak, f2_peak = _curvature_peak(model, t_inf)
    if level > f2_peak:
        return 0.0, 0.0
    if level == f2_peak:
        return t_peak, t_peak
    f2_zero = _second_derivative_or_limit(model, 0.0)

    first = 0.0
    if f2_zero <= level and t_peak > 0.0:
        lo = 0.0 if isinstance(model, PewModel) else 1e-9 * t_inf
        first = bisect_root(
            lambda t: second_derivative(model, t) - level, lo, t_peak, tol=_BISECT_TOL
        )

    # Right of the peak the second derivative falls through zero at the
    # inflection point, so [t_peak, t_inf] brackets the last crossing.
    hi = t_inf
    span = max(t_inf - t_peak, 1e-6)
    for _ in range(64):
        if second_derivative(model, hi) < level:
            break
        hi += span
    last = bisect_root(
        lambda t: second_derivative(model, t) - level, t_peak, hi, tol=_BISECT_TOL
    )
    return first, last
