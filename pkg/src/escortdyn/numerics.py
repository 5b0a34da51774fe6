"""Scalar numerics: adaptive Simpson quadrature and monotone inversion."""

import math

from .errors import ConvergenceError, QuadratureError, RangeError


def adaptive_simpson(f, a, b, tol=1e-10, max_depth=50):
    """Integrate ``f`` over ``[a, b]`` with adaptive Simpson bisection.

    Parameters
    ----------
    f : callable
        Scalar integrand. Must return finite values on [a, b].
    a, b : float
        Integration limits; ``a > b`` flips the sign of the result.
    tol : float
        Absolute tolerance on the final value.
    max_depth : int
        Maximum bisection depth before giving up.

    Raises
    ------
    QuadratureError
        If the tolerance is not met within ``max_depth`` levels, or the
        integrand returns a non-finite value.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if a > b:
        a, b = b, a
        sign = -1.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    if not (math.isfinite(fa) and math.isfinite(fm) and math.isfinite(fb)):
        raise QuadratureError(f"non-finite integrand on [{a}, {b}]")
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return sign * _simpson(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _simpson(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    if not (math.isfinite(flm) and math.isfinite(frm)):
        raise QuadratureError(f"non-finite integrand on [{a}, {b}]")
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    # Richardson: Simpson error of the halved interval is ~delta/15.
    if abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    if depth <= 0:
        raise QuadratureError(
            f"tolerance {tol:g} not met on [{a}, {b}] at maximum depth"
        )
    half = 0.5 * tol
    return _simpson(f, a, m, fa, flm, fm, left, half, depth - 1) + _simpson(
        f, m, b, fm, frm, fb, right, half, depth - 1
    )


def invert_increasing(g, gprime, target, x0=1.0, tol=1e-10, max_iter=100):
    """Solve ``g(x) = target`` for strictly increasing ``g`` on x > 0.

    Brackets the root by doubling (or halving) from ``x0`` in the monotone
    direction, then runs Newton steps safeguarded by bisection. ``gprime``
    must return the (positive) derivative of ``g``.

    Raises RangeError when no bracket exists within floating-point range,
    ConvergenceError when the iteration stalls.
    """
    def g_bracket(x):
        # Overflow while probing means the target is unattainable in range.
        try:
            return g(x)
        except OverflowError:
            raise RangeError(f"target {target!r} unattainable (overflow at x={x!r})") from None

    lo = hi = x0
    glo = ghi = g_bracket(x0)
    if glo < target:
        for _ in range(2200):
            lo, glo = hi, ghi
            hi *= 2.0
            if hi > 1e300:
                raise RangeError(f"target {target!r} not attained below x=1e300")
            ghi = g_bracket(hi)
            if ghi >= target:
                break
        else:
            raise RangeError(f"failed to bracket target {target!r} from above")
    elif glo > target:
        for _ in range(2200):
            hi, ghi = lo, glo
            lo *= 0.5
            if lo < 1e-300:
                raise RangeError(f"target {target!r} not attained above x=1e-300")
            glo = g_bracket(lo)
            if glo <= target:
                break
        else:
            raise RangeError(f"failed to bracket target {target!r} from below")
    else:
        return x0

    x, gx = (lo, glo) if target - glo <= ghi - target else (hi, ghi)
    for _ in range(max_iter):
        err = gx - target
        if abs(err) <= tol:
            return x
        d = gprime(x)
        step_ok = d > 0.0 and math.isfinite(d)
        x_new = x - err / d if step_ok else 0.5 * (lo + hi)
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        g_new = g(x_new)
        if g_new < target:
            lo, glo = x_new, g_new
        else:
            hi, ghi = x_new, g_new
        x, gx = x_new, g_new
        if hi - lo <= 1e-16 * max(1.0, abs(x)):
            if abs(gx - target) <= 1e3 * tol:
                return x
            break
    raise ConvergenceError(f"inversion stalled at x={x!r} (|g(x)-target|={abs(gx - target):g})")
