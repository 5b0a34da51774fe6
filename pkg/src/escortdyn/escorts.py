"""Escort functions and the statistical objects they induce.

An escort is a function phi that is strictly positive on (0, 1). Applied
coordinatewise and renormalized it deforms a population state into its
escort distribution, and its reciprocal integrates to a deformed logarithm

    log_phi(u) = integral_1^u dv / phi(v)

whose inverse exp_phi generalizes the exponential. Closed forms are
dispatched per family; the Custom family falls back to adaptive
quadrature and safeguarded Newton inversion.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, RangeError
from .numerics import adaptive_simpson, invert_increasing
from .simplex import SimplexPoint, as_simplex

# |q - 1| below this uses the identity-escort closed forms; avoids the
# catastrophic cancellation of (u^(1-q) - 1)/(1-q). Same guard at q = 2
# for the log antiderivative.
Q_DEGENERATE = 1e-9

LOG_QUAD_TOL = 1e-10
LOG_QUAD_DEPTH = 50
EXP_TOL = 1e-10

_POSITIVITY_GRID = np.arange(1, 1001) / 1001.0


class Escort:
    """Base class for scalar escort functions."""

    is_vector = False
    requires_positive = False  # True when phi is undefined at u = 0
    has_closed_log = True

    def __call__(self, u):
        """phi evaluated at a scalar or coordinatewise at an array."""
        raise NotImplementedError

    def weights(self, x: np.ndarray) -> np.ndarray:
        """phi applied to a state vector, with domain checks."""
        raise NotImplementedError

    # -- deformed logarithm and exponential --------------------------------

    def log(self, u: float, method: str = "auto") -> float:
        """log_phi(u) for u > 0; ``method="quadrature"`` forces the integral."""
        u = _check_log_arg(self, u)
        if method == "auto":
            method = "closed" if self.has_closed_log else "quadrature"
        if method == "closed":
            return self._log_closed(u)
        if method == "quadrature":
            return self._log_quadrature(u)
        raise ValueError(f"unknown method {method!r}")

    def exp(self, w: float) -> float:
        """Inverse of log_phi; raises RangeError outside the attainable range."""
        _check_range(self, w)
        return self._exp_impl(w)

    def log_array(self, u: np.ndarray) -> np.ndarray:
        """Vectorized log_phi over positive entries (no domain checks)."""
        return np.array([self.log(float(v)) for v in u])

    def _log_closed(self, u):
        raise NotImplementedError

    def _log_quadrature(self, u):
        phi = self

        def integrand(v):
            p = phi(v)
            if not (p > 0.0 and math.isfinite(p)):
                raise DomainError(f"escort not positive at u={v!r}")
            return 1.0 / p

        return adaptive_simpson(integrand, 1.0, u, tol=LOG_QUAD_TOL, max_depth=LOG_QUAD_DEPTH)

    def _exp_impl(self, w):
        return invert_increasing(
            lambda u: self.log(u),
            lambda u: 1.0 / self(u),
            w,
            tol=EXP_TOL,
        )

    def log_range(self):
        """Open interval of values attained by log_phi on u > 0."""
        return (-math.inf, math.inf)

    def log_zero_limit(self) -> float:
        """lim_{u -> 0+} log_phi(u); -inf when the integral diverges."""
        return -math.inf

    # -- antiderivative of log_phi, used by the escort divergence ----------

    def log_antiderivative(self, u):
        """An antiderivative of log_phi (scalar or array); None if unknown."""
        return None

    def antiderivative_zero_limit(self) -> float:
        """Limit of the antiderivative at 0+; +inf when it diverges."""
        raise NotImplementedError

    # -- simplex-to-sphere coordinate change --------------------------------

    def sphere_map(self, u: float) -> float:
        """Antiderivative of 1/sqrt(phi), anchored at 0 when integrable there."""
        phi = self

        def integrand(v):
            p = phi(v)
            if not (p > 0.0 and math.isfinite(p)):
                raise DomainError(f"escort not positive at u={v!r}")
            return 1.0 / math.sqrt(p)

        # Custom escorts anchor at 1: integrability at 0 is not decidable here.
        return adaptive_simpson(integrand, 1.0, u, tol=LOG_QUAD_TOL, max_depth=LOG_QUAD_DEPTH)


def _check_log_arg(phi, u):
    u = float(u)
    if not math.isfinite(u) or u <= 0.0:
        raise DomainError(f"log_phi needs u > 0, got {u!r}")
    return u


def _check_range(phi, w):
    w = float(w)
    if not math.isfinite(w):
        raise RangeError(f"exp_phi argument must be finite, got {w!r}")
    lo, hi = phi.log_range()
    if not (lo < w < hi):
        raise RangeError(f"w={w!r} outside attainable log range ({lo!r}, {hi!r})")
    return w


def _require_nonnegative(x, name="state"):
    if np.any(x < 0.0):
        i = int(np.argmin(x))
        raise DomainError(f"{name} has negative coordinate {i} ({x[i]!r})", index=i)


@dataclass(frozen=True)
class Identity(Escort):
    """phi(u) = u: ordinary logarithm, Shahshahani weights, replicator flow."""

    def __call__(self, u):
        return np.asarray(u, dtype=float) if np.ndim(u) else float(u)

    def weights(self, x):
        _require_nonnegative(x)
        return np.asarray(x, dtype=float)

    def _log_closed(self, u):
        return math.log(u)

    def _exp_impl(self, w):
        return math.exp(w)

    def log_array(self, u):
        return np.log(u)

    def log_antiderivative(self, u):
        return u * np.log(u) - u

    def antiderivative_zero_limit(self):
        return 0.0

    def sphere_map(self, u):
        return 2.0 * math.sqrt(u)


@dataclass(frozen=True)
class Scaled(Escort):
    """phi(u) = beta * u with beta > 0: replicator flow at selection intensity beta."""

    beta: float

    def __post_init__(self):
        if not (self.beta > 0.0 and math.isfinite(self.beta)):
            raise DomainError(f"Scaled escort needs beta > 0, got {self.beta!r}")

    def __call__(self, u):
        return self.beta * (np.asarray(u, dtype=float) if np.ndim(u) else float(u))

    def weights(self, x):
        _require_nonnegative(x)
        return self.beta * np.asarray(x, dtype=float)

    def _log_closed(self, u):
        return math.log(u) / self.beta

    def _exp_impl(self, w):
        return math.exp(self.beta * w)

    def log_array(self, u):
        return np.log(u) / self.beta

    def log_antiderivative(self, u):
        return (u * np.log(u) - u) / self.beta

    def antiderivative_zero_limit(self):
        return 0.0

    def sphere_map(self, u):
        return 2.0 * math.sqrt(u / self.beta)


@dataclass(frozen=True)
class Power(Escort):
    """phi(u) = u**q: Tsallis-type deformation; q = 2 is the Poincare escort."""

    q: float

    def __post_init__(self):
        if not math.isfinite(self.q):
            raise DomainError(f"Power escort needs finite q, got {self.q!r}")

    @property
    def requires_positive(self):
        return self.q <= 0.0

    @property
    def _near_one(self):
        return abs(self.q - 1.0) < Q_DEGENERATE

    def __call__(self, u):
        if np.ndim(u):
            return np.asarray(u, dtype=float) ** self.q
        u = float(u)
        if u < 0.0 or (u == 0.0 and self.q <= 0.0):
            raise DomainError(f"u**q undefined at u={u!r} for q={self.q!r}")
        return u**self.q

    def weights(self, x):
        x = np.asarray(x, dtype=float)
        _require_nonnegative(x)
        if self.q <= 0.0 and np.any(x == 0.0):
            i = int(np.argmin(x))
            raise DomainError(f"u**q undefined at coordinate {i} = 0 for q={self.q!r}", index=i)
        return x**self.q

    def _log_closed(self, u):
        if self._near_one:
            return math.log(u)
        e = 1.0 - self.q
        return (u**e - 1.0) / e

    def _exp_impl(self, w):
        if self._near_one:
            return math.exp(w)
        e = 1.0 - self.q
        return (1.0 + e * w) ** (1.0 / e)

    def log_array(self, u):
        if self._near_one:
            return np.log(u)
        e = 1.0 - self.q
        return (np.asarray(u, dtype=float) ** e - 1.0) / e

    def log_range(self):
        if self._near_one:
            return (-math.inf, math.inf)
        e = 1.0 - self.q
        if e > 0.0:  # q < 1
            return (-1.0 / e, math.inf)
        return (-math.inf, -1.0 / e)  # q > 1

    def log_zero_limit(self):
        if self.q < 1.0 and not self._near_one:
            return -1.0 / (1.0 - self.q)
        return -math.inf

    def log_antiderivative(self, u):
        u = np.asarray(u, dtype=float) if np.ndim(u) else u
        if self._near_one:
            return u * np.log(u) - u
        if abs(self.q - 2.0) < Q_DEGENERATE:
            return u - np.log(u)
        e = 1.0 - self.q
        return (u ** (2.0 - self.q) / (2.0 - self.q) - u) / e

    def antiderivative_zero_limit(self):
        if self.q < 2.0 or self._near_one:
            return 0.0
        return math.inf

    def sphere_map(self, u):
        e = 1.0 - 0.5 * self.q
        if abs(e) < Q_DEGENERATE:  # q = 2: anchored at 1
            return math.log(u)
        if e > 0.0:  # q < 2: integrable at 0
            return u**e / e
        return (u**e - 1.0) / e  # q > 2: anchored at 1


@dataclass(frozen=True)
class Constant(Escort):
    """phi(u) = c: every state maps to the barycenter; Euclidean geometry."""

    c: float = 1.0

    def __post_init__(self):
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise DomainError(f"Constant escort needs c > 0, got {self.c!r}")

    def __call__(self, u):
        if np.ndim(u):
            return np.full(np.shape(u), self.c)
        return self.c

    def weights(self, x):
        return np.full(len(x), self.c)

    def _log_closed(self, u):
        return (u - 1.0) / self.c

    def _exp_impl(self, w):
        return 1.0 + self.c * w

    def log_array(self, u):
        return (np.asarray(u, dtype=float) - 1.0) / self.c

    def log_range(self):
        return (-1.0 / self.c, math.inf)

    def log_zero_limit(self):
        return -1.0 / self.c

    def log_antiderivative(self, u):
        u = np.asarray(u, dtype=float) if np.ndim(u) else u
        return (0.5 * u * u - u) / self.c

    def antiderivative_zero_limit(self):
        return 0.0

    def sphere_map(self, u):
        return u / math.sqrt(self.c)


@dataclass(frozen=True)
class Exponential(Escort):
    """phi(u) = e**u: positive on the boundary, so the flow can leave the simplex."""

    def __call__(self, u):
        return np.exp(u) if np.ndim(u) else math.exp(u)

    def weights(self, x):
        return np.exp(x)

    def _log_closed(self, u):
        return math.exp(-1.0) - math.exp(-u)

    def _exp_impl(self, w):
        return -math.log(math.exp(-1.0) - w)

    def log_array(self, u):
        return math.exp(-1.0) - np.exp(-np.asarray(u, dtype=float))

    def log_range(self):
        # log_phi on u > 0 covers (1/e - 1, 1/e).
        return (math.exp(-1.0) - 1.0, math.exp(-1.0))

    def log_zero_limit(self):
        return math.exp(-1.0) - 1.0

    def log_antiderivative(self, u):
        u = np.asarray(u, dtype=float) if np.ndim(u) else u
        return math.exp(-1.0) * u + np.exp(-u)

    def antiderivative_zero_limit(self):
        return 1.0

    def sphere_map(self, u):
        return 2.0 * (1.0 - math.exp(-0.5 * u))


@dataclass(frozen=True, eq=False)
class Custom(Escort):
    """A user-supplied scalar escort; log/exp go through quadrature.

    Construction samples 1000 points of (0, 1) and rejects functions that
    are not strictly positive and finite there.
    """

    fn: Callable[[float], float]
    name: str = "custom"

    has_closed_log = False
    requires_positive = True

    def __post_init__(self):
        for v in _POSITIVITY_GRID:
            p = self.fn(float(v))
            if not (p > 0.0 and math.isfinite(p)):
                raise DomainError(f"custom escort not strictly positive at u={v!r} ({p!r})")

    def __call__(self, u):
        if np.ndim(u):
            return np.array([self._eval(float(v)) for v in u])
        return self._eval(float(u))

    def _eval(self, u):
        p = self.fn(u)
        p = float(p)
        if not math.isfinite(p):
            raise DomainError(f"custom escort non-finite at u={u!r}")
        return p

    def weights(self, x):
        x = np.asarray(x, dtype=float)
        _require_nonnegative(x)
        w = self(x)
        if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
            i = int(np.argmin(w))
            raise DomainError(f"custom escort not positive at coordinate {i}", index=i)
        return w

    def log_zero_limit(self):
        return math.nan

    def antiderivative_zero_limit(self):
        raise DomainError("custom escorts need interior points for divergences")


@dataclass(frozen=True, eq=False)
class VectorValued(Escort):
    """An escort psi mapping the whole state to one weight per coordinate.

    Only componentwise evaluation is supported: the induced logarithms
    differ per coordinate, so log/exp and divergences are rejected.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    name: str = "vector"

    is_vector = True
    has_closed_log = False

    def __call__(self, u):
        raise DomainError("vector-valued escorts evaluate on full states; use weights()")

    def weights(self, x):
        x = np.asarray(x, dtype=float)
        w = np.asarray(self.fn(x), dtype=float)
        if w.shape != x.shape:
            raise DomainError(
                f"vector escort returned shape {w.shape}, expected {x.shape}"
            )
        if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
            i = int(np.argmin(w))
            raise DomainError(f"vector escort not strictly positive at coordinate {i}", index=i)
        return w

    def log(self, u, method="auto"):
        raise DomainError("vector-valued escorts do not induce a scalar logarithm")

    def exp(self, w):
        raise DomainError("vector-valued escorts do not induce a scalar exponential")

    def sphere_map(self, u):
        raise DomainError("vector-valued escorts do not induce a sphere transformation")


# ---------------------------------------------------------------------------
# Escort statistics
# ---------------------------------------------------------------------------


def partition_function(phi: Escort, x) -> float:
    """Z_phi(x) = sum_i phi(x_i); strictly positive."""
    xs = as_simplex(x)
    return float(phi.weights(xs.coords).sum())


def escort_distribution(phi: Escort, x) -> SimplexPoint:
    """The state phi(x) / Z_phi(x)."""
    xs = as_simplex(x)
    w = phi.weights(xs.coords)
    return SimplexPoint(w / w.sum())


def escort_expectation(phi: Escort, x, f) -> float:
    """Expectation of the vector f under the escort distribution of x."""
    xs = as_simplex(x)
    f = np.asarray(f, dtype=float)
    if f.shape != xs.coords.shape:
        raise DomainError(f"f has shape {f.shape}, expected {xs.coords.shape}")
    if not np.all(np.isfinite(f)):
        raise DomainError("f must be finite")
    w = phi.weights(xs.coords)
    return float(w @ f / w.sum())


def escort_variance(phi: Escort, x, f) -> float:
    """Escort variance of f: the escort expectation of (f - mean)^2."""
    xs = as_simplex(x)
    f = np.asarray(f, dtype=float)
    if f.shape != xs.coords.shape:
        raise DomainError(f"f has shape {f.shape}, expected {xs.coords.shape}")
    if not np.all(np.isfinite(f)):
        raise DomainError("f must be finite")
    w = phi.weights(xs.coords)
    z = w.sum()
    m = w @ f / z
    d = f - m
    return float(w @ (d * d) / z)


def escort_log(phi: Escort, u: float, method: str = "auto") -> float:
    """The deformed logarithm log_phi(u) = integral_1^u dv/phi(v)."""
    return phi.log(u, method=method)


def escort_exp(phi: Escort, w: float) -> float:
    """The inverse of log_phi, exact to 1e-10 in log_phi(exp_phi(w)) = w."""
    return phi.exp(w)
