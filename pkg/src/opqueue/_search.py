"""Scalar search primitives: bracketed bisection and golden-section.

Bisection is used everywhere a root is needed: sigmoid tails are flat, so
Newton-type iterations stall, while a sign bracket guarantees convergence.
The helpers work purely on signs, so objective values of ``-inf`` (used as
an infeasibility sentinel by callers) are acceptable.
"""

from __future__ import annotations

import math
from typing import Callable

from .errors import NumericError

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def bisect_root(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    tol: float = 1e-9,
    max_iter: int = 200,
) -> float:
    """Root of ``fn`` on ``[lo, hi]`` to within ``tol`` in the argument.

    ``fn(lo)`` and ``fn(hi)`` must have opposite signs (a zero endpoint is
    returned directly).
    """
    f_lo = fn(lo)
    if f_lo == 0.0:
        return lo
    f_hi = fn(hi)
    if f_hi == 0.0:
        return hi
    lo_pos = f_lo > 0.0
    if lo_pos == (f_hi > 0.0):
        raise NumericError(
            f"bisection bracket [{lo!r}, {hi!r}] does not change sign"
        )
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # interval at float resolution
            break
        f_mid = fn(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0.0) == lo_pos:
            lo = mid
        else:
            hi = mid
    else:
        raise NumericError("bisection failed to converge within iteration cap")
    return 0.5 * (lo + hi)


def golden_section_max(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    tol: float = 1e-9,
    max_iter: int = 400,
) -> tuple[float, float]:
    """Maximizer of a unimodal ``fn`` on ``[lo, hi]``.

    Returns ``(x, fn(x))`` with ``x`` located to within ``tol``.
    """
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fn(d)
    else:
        raise NumericError("golden-section search failed to converge")
    x = 0.5 * (a + b)
    return x, fn(x)


def expand_until(
    predicate: Callable[[float], bool],
    start: float,
    step: float,
    *,
    cap: int = 64,
    what: str = "bracket",
) -> float:
    """Smallest ``start + step * 2**k`` (k >= 0) where ``predicate`` holds.

    Geometric expansion with a hard cap: exceeding ``cap`` doublings raises
    rather than silently clamping.
    """
    width = step
    for _ in range(cap):
        x = start + width
        if predicate(x):
            return x
        width *= 2.0
    raise NumericError(f"{what} expansion exceeded {cap} doublings")
