"""Escort metric, escort divergence, and simplex-to-sphere coordinates."""

import math

import numpy as np

from .errors import DimensionError, DivergenceInfinite, DomainError
from .escorts import Escort
from .numerics import adaptive_simpson
from .simplex import SimplexPoint, as_simplex

DIVERGENCE_QUAD_TOL = 1e-9  # outer Simpson tolerance, per coordinate


class DiagonalMetric:
    """A diagonal Riemannian metric; entries must be strictly positive."""

    __slots__ = ("diag",)

    def __init__(self, diag):
        arr = np.array(diag, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise DimensionError("metric diagonal must be a 1-d vector")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
            raise DomainError("metric diagonal must be finite and strictly positive")
        arr.flags.writeable = False
        self.diag = arr

    @property
    def n(self):
        return self.diag.size

    def inner(self, a, b) -> float:
        return metric_inner_product(self, a, b)

    def __repr__(self):
        return f"DiagonalMetric({self.diag.tolist()!r})"


def escort_metric(phi: Escort, x) -> DiagonalMetric:
    """The metric with diagonal 1/phi(x_i) (or 1/psi_i(x) for vector escorts)."""
    xs = as_simplex(x)
    if not xs.interior:
        raise DomainError("escort metric needs an interior point")
    w = phi.weights(xs.coords)
    if np.any(w <= 0.0):
        i = int(np.argmin(w))
        raise DomainError(f"escort vanishes at coordinate {i}", index=i)
    return DiagonalMetric(1.0 / w)


def metric_inner_product(metric: DiagonalMetric, a, b) -> float:
    """<a, b> under a diagonal metric: sum_i m_i a_i b_i."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != (metric.n,) or b.shape != (metric.n,):
        raise DimensionError(
            f"expected vectors of shape ({metric.n},), got {a.shape} and {b.shape}"
        )
    return float(np.sum(metric.diag * a * b))


# ---------------------------------------------------------------------------
# Escort divergence
# ---------------------------------------------------------------------------
#
# D_phi(x || y) = sum_i B(x_i, y_i) with the coordinatewise Bregman gap
#
#     B(a, b) = L(a) - L(b) - (a - b) * log_phi(b),
#
# where L is an antiderivative of log_phi. This is the form whose gradient
# in the second slot is -(x - y)/phi(y), making D_phi(x* || x) the Lyapunov
# function of the escort flow; for the identity escort it reduces on the
# simplex to the Kullback-Leibler divergence sum x_i log(x_i/y_i), and for
# a constant escort to ||x - y||^2 / (2c). The sum constraint is not needed
# for the definition, so inputs may be arbitrary nonnegative vectors (the
# Hessian of y -> D_phi(x || y) at y = x is then the escort metric,
# coordinate by coordinate).


def _coerce_nonneg(v, name):
    if isinstance(v, SimplexPoint):
        return v.coords
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise DomainError(f"{name} must be a 1-d vector of length >= 2")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    if np.any(arr < 0.0):
        i = int(np.argmin(arr))
        raise DomainError(f"{name} has negative coordinate {i}", index=i)
    return arr


def _closed_terms(phi: Escort, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Coordinatewise Bregman gaps via the family's closed forms."""
    terms = np.empty(np.broadcast(a, b).shape)
    a, b = np.broadcast_arrays(a, b)

    interior = (a > 0.0) & (b > 0.0)
    if np.any(interior):
        ai, bi = a[interior], b[interior]
        terms[interior] = (
            phi.log_antiderivative(ai)
            - phi.log_antiderivative(bi)
            - (ai - bi) * phi.log_array(bi)
        )

    a_zero = (a == 0.0) & (b > 0.0)
    if np.any(a_zero):
        l0 = phi.antiderivative_zero_limit()
        if math.isinf(l0):
            terms[a_zero] = math.inf
        else:
            bz = b[a_zero]
            terms[a_zero] = l0 - phi.log_antiderivative(bz) + bz * phi.log_array(bz)

    b_zero = (b == 0.0) & (a > 0.0)
    if np.any(b_zero):
        lb0 = phi.log_zero_limit()
        l0 = phi.antiderivative_zero_limit()
        if math.isnan(lb0):
            raise DomainError("divergence undefined at a zero coordinate for this escort")
        if math.isinf(lb0) or math.isinf(l0):
            terms[b_zero] = math.inf
        else:
            az = a[b_zero]
            terms[b_zero] = phi.log_antiderivative(az) - l0 - az * lb0

    terms[(a == 0.0) & (b == 0.0)] = 0.0
    if np.any(np.isnan(terms)):
        raise DomainError("escort divergence undefined for the given points")
    return terms


def _quadrature_term(phi: Escort, a: float, b: float) -> float:
    """One Bregman gap by outer adaptive Simpson over log_phi."""
    if a == b:
        return 0.0
    if a <= 0.0 or b <= 0.0:
        raise DomainError("quadrature divergence needs strictly positive coordinates")
    lb = phi.log(b)
    return adaptive_simpson(
        lambda u: phi.log(u) - lb, b, a, tol=DIVERGENCE_QUAD_TOL, max_depth=50
    )


def divergence_profile(phi: Escort, x_star, states: np.ndarray, allow_infinite=False) -> np.ndarray:
    """D_phi(x_star || row) for every row of a (m, n) state matrix."""
    a = _coerce_nonneg(x_star, "x_star")
    states = np.asarray(states, dtype=float)
    if states.ndim != 2 or states.shape[1] != a.size:
        raise DimensionError(f"states must have shape (m, {a.size})")
    if phi.has_closed_log:
        totals = _closed_terms(phi, a[None, :], states).sum(axis=1)
    else:
        totals = np.array(
            [
                sum(_quadrature_term(phi, ai, bi) for ai, bi in zip(a, row))
                for row in states
            ]
        )
    if not allow_infinite and np.any(np.isinf(totals)):
        raise DivergenceInfinite("escort divergence is infinite along the profile")
    return totals


def escort_divergence(phi: Escort, x, y, method: str = "auto") -> float:
    """The escort divergence D_phi(x || y); zero iff x = y, never negative.

    ``method="quadrature"`` forces the nested-quadrature path (outer
    adaptive Simpson over u calling the escort logarithm); the default
    uses the family closed form when one exists.
    """
    if phi.is_vector:
        raise DomainError("escort divergences are not defined for vector-valued escorts")
    a = _coerce_nonneg(x, "x")
    b = _coerce_nonneg(y, "y")
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    if method == "auto":
        method = "closed" if phi.has_closed_log else "quadrature"
    if method == "closed":
        total = float(_closed_terms(phi, a, b).sum())
    elif method == "quadrature":
        total = float(sum(_quadrature_term(phi, ai, bi) for ai, bi in zip(a, b)))
    else:
        raise ValueError(f"unknown method {method!r}")
    if math.isinf(total):
        raise DivergenceInfinite("D_phi(x || y) is infinite for these points")
    return total


# ---------------------------------------------------------------------------
# Sphere coordinates
# ---------------------------------------------------------------------------


def sphere_coordinate(phi: Escort, x) -> np.ndarray:
    """Componentwise antiderivative of 1/sqrt(phi) evaluated at x.

    Anchored at 0 when the integral converges there (identity escort gives
    2*sqrt(x), the radius-2 sphere chart), otherwise at 1.
    """
    if phi.is_vector:
        raise DomainError("sphere coordinates are not defined for vector-valued escorts")
    xs = as_simplex(x)
    if not xs.interior:
        raise DomainError("sphere coordinates need an interior point")
    return np.array([phi.sphere_map(float(v)) for v in xs.coords])


def geodesic_distance_identity(p, q) -> float:
    """Great-circle distance 2*arccos(sum_i sqrt(p_i q_i)) for the identity escort."""
    ps = as_simplex(p)
    qs = as_simplex(q)
    if ps.n != qs.n:
        raise DimensionError(f"dimension mismatch: {ps.n} vs {qs.n}")
    s = float(np.sum(np.sqrt(ps.coords * qs.coords)))
    s = min(1.0, max(-1.0, s))  # absorbs ~1e-16 rounding above 1
    return 2.0 * math.acos(s)
