"""Verification utilities: rest points, ESS sampling, Lyapunov and rate checks."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, DomainError
from .escorts import Escort, escort_variance, partition_function
from .geometry import divergence_profile
from .landscapes import FitnessLandscape
from .simplex import SimplexPoint, as_simplex, random_interior
from .dynamics import Trajectory, vector_field

PASSED_SAMPLED = "passed_sampled"
FAILED_AT = "failed_at"


@dataclass(frozen=True)
class ESSReport:
    """Outcome of sampled evolutionary-stability checking.

    ``min_margin`` is the smallest (x* - x) . f(x) over the sampled states;
    the verdict is ``failed_at`` exactly when that minimum is <= 0, with
    ``failure_point`` the offending sample.
    """

    candidate: SimplexPoint
    samples_tested: int
    min_margin: float
    verdict: str
    failure_point: Optional[np.ndarray] = None

    @property
    def passed(self) -> bool:
        return self.verdict == PASSED_SAMPLED


def is_rest_point(phi: Escort, f: FitnessLandscape, x, tol: float) -> bool:
    """True when the sup norm of the vector field at x is within tol."""
    if not (tol > 0.0):
        raise ConfigError(f"tolerance must be positive, got {tol!r}")
    v = vector_field(phi, f, x)
    return bool(np.max(np.abs(v)) <= tol)


def ess_check_sampled(
    f: FitnessLandscape,
    x_star,
    num_samples: int,
    radius: Optional[float] = None,
    seed: Optional[int] = None,
) -> ESSReport:
    """Sample the stability margin (x* - x) . f(x) over the simplex.

    States are drawn Dirichlet(1, ..., 1), optionally rejected to the ball
    ||x - x*|| <= radius. This is sampled evidence, not a certificate.
    """
    xs = as_simplex(x_star)
    if not xs.interior:
        raise DomainError("ESS candidate must be interior")
    if num_samples < 1:
        raise ConfigError("num_samples must be >= 1")
    rng = np.random.default_rng(seed)
    n = xs.n
    margins = np.empty(num_samples)
    points = []
    attempts = 0
    limit = 10_000 * num_samples
    i = 0
    while i < num_samples:
        attempts += 1
        if attempts > limit:
            raise ConfigError(f"could not draw {num_samples} samples within radius {radius!r}")
        x = rng.dirichlet(np.ones(n))
        if radius is not None and float(np.linalg.norm(x - xs.coords)) > radius:
            continue
        margins[i] = float((xs.coords - x) @ f(x))
        points.append(x)
        i += 1

    worst = int(np.argmin(margins))
    min_margin = float(margins[worst])
    if min_margin <= 0.0:
        return ESSReport(xs, num_samples, min_margin, FAILED_AT, points[worst])
    return ESSReport(xs, num_samples, min_margin, PASSED_SAMPLED)


def lyapunov_series(phi: Escort, traj: Trajectory, x_star) -> np.ndarray:
    """D_phi(x* || x(t)) at every recorded sample of a trajectory."""
    xs = as_simplex(x_star)
    return divergence_profile(phi, xs.coords, traj.states)


def fisher_rate(phi: Escort, f: FitnessLandscape, x) -> float:
    """Z_phi(x) * Var_phi[f(x)]: the growth rate of the declared potential.

    Along the escort flow this equals dV/dt when f is the Euclidean
    gradient of V; it is never negative.
    """
    if f.potential is None:
        raise ConfigError("fisher_rate needs a landscape with a declared potential")
    xs = as_simplex(x)
    if not xs.interior:
        raise DomainError("fisher_rate needs an interior point")
    fx = f(xs.coords)
    return partition_function(phi, xs) * escort_variance(phi, xs, fx)


def integral_of_motion(phi: Escort, x_star, x) -> float:
    """sum_i x*_i log_phi(x_i), conserved for zero-escort-mean cyclic games."""
    ref = as_simplex(x_star)
    xs = as_simplex(x)
    if ref.n != xs.n:
        raise DomainError(f"dimension mismatch: {ref.n} vs {xs.n}")
    return float(sum(r * phi.log(float(v)) for r, v in zip(ref.coords, xs.coords)))


def monotone_nonincreasing(values, per_step_tol: float = 1e-10) -> bool:
    """True when a sequence never rises by more than per_step_tol per step."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return True
    return bool(np.all(np.diff(v) <= per_step_tol))


def simplex_samples(n: int, count: int, seed: int = 0) -> list[SimplexPoint]:
    """Seeded interior samples, shared by tests and the verification suite."""
    rng = np.random.default_rng(seed)
    return [random_interior(n, rng) for _ in range(count)]
