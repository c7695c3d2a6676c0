"""Scalar numeric kernels: bracketed root finding, adaptive quadrature, ODE stepping.

Deliberately dependency-free and deterministic. Tolerances are explicit
contract parameters, two orders tighter by default than anything the
downstream protocol math asserts.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Callable

import numpy as np

_EPS = sys.float_info.epsilon


class BracketError(ValueError):
    """The supplied interval does not bracket a sign change."""


class ConvergenceError(RuntimeError):
    """An iterative routine exhausted its budget before reaching tolerance."""


class StiffnessError(RuntimeError):
    """Adaptive step size collapsed; the problem is too stiff for this stepper."""


class DomainClampError(ValueError):
    """Initial state violates the requested clamp interval."""


@dataclass(frozen=True)
class RootConfig:
    rel_tol: float = 1e-10
    max_iter: int = 200
    expand_factor: float = 2.0

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not self.expand_factor > 1:
            raise ValueError("expand_factor must exceed 1")


@dataclass(frozen=True)
class QuadConfig:
    rel_tol: float = 1e-10
    max_depth: int = 40

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")


def find_root(f: Callable[[float], float], lo: float, hi: float,
              cfg: RootConfig = RootConfig()) -> float:
    """Root of f on [lo, hi] by bracket-safeguarded interpolation.

    Secant / inverse-quadratic steps are accepted only while they stay
    inside the shrinking bracket; otherwise the step falls back to
    bisection, so the result always lies inside the initial interval.
    f(lo) and f(hi) must not share a sign (either may be zero).
    """
    a, b = float(lo), float(hi)
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        raise BracketError(f"no sign change on [{lo}, {hi}]")
    xtol = cfg.rel_tol * max(abs(a), abs(b))
    c, fc = a, fa
    d = e = b - a
    for _ in range(cfg.max_iter):
        if (fb > 0.0) == (fc > 0.0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol = 2.0 * _EPS * abs(b) + 0.5 * xtol
        m = 0.5 * (c - b)
        if abs(m) <= tol or fb == 0.0:
            return b
        if abs(e) < tol or abs(fa) <= abs(fb):
            d = e = m
        else:
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            else:
                p = -p
            s, e = e, d
            if 2.0 * p < 3.0 * m * q - abs(tol * q) and p < abs(0.5 * s * q):
                d = p / q
            else:
                d = e = m
        a, fa = b, fb
        if abs(d) > tol:
            b += d
        else:
            b += tol if m > 0.0 else -tol
        fb = f(b)
    raise ConvergenceError(f"root refinement did not converge in {cfg.max_iter} iterations")


def grow_bracket(f: Callable[[float], float], lo: float, hi: float,
                 cfg: RootConfig = RootConfig(), max_grow: int = 200) -> tuple[float, float]:
    """Expand hi geometrically away from lo until [lo, hi] brackets a sign change."""
    flo = f(lo)
    if flo == 0.0:
        return lo, lo
    for _ in range(max_grow):
        fhi = f(hi)
        if fhi == 0.0 or (flo > 0.0) != (fhi > 0.0):
            return lo, hi
        hi = lo + (hi - lo) * cfg.expand_factor
    raise BracketError("no sign change found while expanding the bracket")


def integrate_1d(f: Callable[[float], float], a: float, b: float,
                 cfg: QuadConfig = QuadConfig()) -> float:
    """Adaptive Simpson quadrature of f over [a, b].

    Convergence is judged against rel_tol scaled by the running estimate
    of the whole integral. a > b is allowed and negates the result.
    """
    a, b = float(a), float(b)
    if a == b:
        return 0.0
    sign = 1.0
    if a > b:
        a, b = b, a
        sign = -1.0
    m = 0.5 * (a + b)
    fa, fm, fb = f(a), f(m), f(b)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    scale = max(abs(whole), (b - a) * max(abs(fa), abs(fm), abs(fb)), 1e-300)
    tol = cfg.rel_tol * scale

    def recurse(x0: float, x2: float, f0: float, f1: float, f2: float,
                estimate: float, tol: float, depth: int) -> float:
        x1 = 0.5 * (x0 + x2)
        xl = 0.5 * (x0 + x1)
        xr = 0.5 * (x1 + x2)
        fl, fr = f(xl), f(xr)
        left = (x1 - x0) * (f0 + 4.0 * fl + f1) / 6.0
        right = (x2 - x1) * (f1 + 4.0 * fr + f2) / 6.0
        delta = left + right - estimate
        if abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        if depth >= cfg.max_depth:
            raise ConvergenceError("quadrature did not converge within the depth budget")
        half = 0.5 * tol
        return (recurse(x0, x1, f0, fl, f1, left, half, depth + 1)
                + recurse(x1, x2, f1, fr, f2, right, half, depth + 1))

    return sign * recurse(a, b, fa, fm, fb, whole, tol, 0)


def _rk4_step(f: Callable[[float, float], float], t: float, x: float, h: float) -> float:
    k1 = f(t, x)
    k2 = f(t + 0.5 * h, x + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, x + 0.5 * h * k2)
    k4 = f(t + h, x + h * k3)
    return x + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


# Fehlberg 4(5) embedded pair coefficients.
_FB = (
    (0.25, (0.25,)),
    (0.375, (3.0 / 32.0, 9.0 / 32.0)),
    (12.0 / 13.0, (1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0)),
    (1.0, (439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0)),
    (0.5, (-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0)),
)
_FB_HIGH = (16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0)
_FB_ERR = (1.0 / 360.0, 0.0, -128.0 / 4275.0, -2197.0 / 75240.0, 1.0 / 50.0, 2.0 / 55.0)


def _rkf45_step(f, t, x, h):
    k = [f(t, x)]
    for c, row in _FB:
        xs = x + h * sum(a * ki for a, ki in zip(row, k))
        k.append(f(t + c * h, xs))
    x_high = x + h * sum(w * ki for w, ki in zip(_FB_HIGH, k))
    err = abs(h * sum(w * ki for w, ki in zip(_FB_ERR, k)))
    return x_high, err


def integrate_ode(rate: Callable[[float, float], float], x0: float,
                  t0: float, t1: float, *,
                  dt: float | None = None,
                  tol: float | None = None,
                  clamp: tuple[float, float] | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Integrate dx/dt = rate(t, x) from t0 to t1.

    Exactly one of dt (classical fixed-step 4th-order) or tol (embedded
    adaptive 4(5) pair) selects the stepper. clamp = (lo, hi) pins the
    state into a closed interval after every accepted step; windowed
    models keep their bounds invariant analytically but discrete steps
    can overshoot. Returns (t, x) sample arrays including both endpoints.
    """
    if (dt is None) == (tol is None):
        raise ValueError("specify exactly one of dt or tol")
    if t1 < t0:
        raise ValueError("t1 must not precede t0")
    if clamp is not None:
        lo, hi = clamp
        if not lo <= x0 <= hi:
            raise DomainClampError(f"x0 = {x0} outside clamp [{lo}, {hi}]")

    def pin(x: float) -> float:
        if clamp is None:
            return x
        return min(max(x, clamp[0]), clamp[1])

    if t1 == t0:
        return np.array([t0]), np.array([float(x0)])

    ts = [t0]
    xs = [float(x0)]
    if dt is not None:
        if dt <= 0:
            raise ValueError("dt must be positive")
        n = max(1, math.ceil((t1 - t0) / dt - 1e-12))
        h = (t1 - t0) / n
        t, x = t0, float(x0)
        for i in range(n):
            x = pin(_rk4_step(rate, t, x, h))
            t = t0 + (i + 1) * h
            ts.append(t)
            xs.append(x)
    else:
        span = t1 - t0
        t, x = t0, float(x0)
        h = span / 16.0
        while t < t1:
            h = min(h, t1 - t)
            if h < 1e-15 * span:
                raise StiffnessError("adaptive step size underflow")
            x_new, err = _rkf45_step(rate, t, x, h)
            scale = tol * (abs(x) + abs(h * rate(t, x)) + 1e-300)
            if err <= scale:
                t += h
                x = pin(x_new)
                ts.append(t)
                xs.append(x)
                if err > 0:
                    h *= min(5.0, 0.9 * (scale / err) ** 0.2)
                else:
                    h *= 5.0
            else:
                h *= max(0.1, 0.9 * (scale / err) ** 0.25)
    return np.asarray(ts), np.asarray(xs)
