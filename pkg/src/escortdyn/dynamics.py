"""The escort replicator flow, its discrete map, and the formal solution.

The continuous dynamic is

    dx_i/dt = phi(x_i) * (f_i(x) - <f(x)>_phi)

with <.>_phi the escort expectation; a vector-valued escort psi replaces
phi(x_i) by psi_i(x). The flow is tangent to the simplex but not always
forward-invariant (that holds iff phi(0) = 0), so the integrator reports
boundary exits instead of clamping.
"""

import math
import operator
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, DomainError, PositivityError
from .escorts import Escort
from .geometry import divergence_profile
from .landscapes import FitnessLandscape
from .simplex import SimplexPoint, as_simplex

DEFAULT_STEP = 1e-3
DRIFT_TOL = 1e-13  # renormalize when |sum x - 1| exceeds this


@dataclass(frozen=True)
class Termination:
    """How an integration ended."""

    kind: str  # "completed" | "boundary_exit" | "step_failure"
    time: Optional[float] = None
    index: Optional[int] = None

    @classmethod
    def completed(cls):
        return cls("completed")

    @classmethod
    def boundary_exit(cls, t, index):
        return cls("boundary_exit", time=t, index=index)

    @classmethod
    def step_failure(cls, t):
        return cls("step_failure", time=t)

    @property
    def ok(self):
        return self.kind == "completed"


@dataclass(frozen=True)
class DiagnosticsRow:
    """Per-sample diagnostics; lyapunov/integral only when a reference is set."""

    escort_mean_fitness: float
    lyapunov: Optional[float] = None
    integral_of_motion: Optional[float] = None


class Trajectory:
    """Time-ordered samples of an integration, with diagnostics.

    ``states`` is an (m, n) row-stochastic array. ``lyapunov`` and
    ``integral_of_motion`` are None unless a reference point was given;
    entries may be +-inf where the quantity diverges at the boundary.
    """

    __slots__ = ("times", "states", "mean_fitness", "lyapunov", "integral_of_motion", "termination")

    def __init__(self, times, states, mean_fitness, lyapunov, integral_of_motion, termination):
        self.times = np.asarray(times, dtype=float)
        self.states = np.asarray(states, dtype=float)
        self.mean_fitness = np.asarray(mean_fitness, dtype=float)
        self.lyapunov = None if lyapunov is None else np.asarray(lyapunov, dtype=float)
        self.integral_of_motion = (
            None if integral_of_motion is None else np.asarray(integral_of_motion, dtype=float)
        )
        self.termination = termination
        if np.any(np.diff(self.times) <= 0.0):
            raise ConfigError("trajectory times must be strictly increasing")

    def __len__(self):
        return self.times.size

    @property
    def n(self):
        return self.states.shape[1]

    def point(self, i: int) -> SimplexPoint:
        return SimplexPoint(self.states[i])

    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def diagnostics(self, i: int) -> DiagnosticsRow:
        return DiagnosticsRow(
            escort_mean_fitness=float(self.mean_fitness[i]),
            lyapunov=None if self.lyapunov is None else float(self.lyapunov[i]),
            integral_of_motion=(
                None if self.integral_of_motion is None else float(self.integral_of_motion[i])
            ),
        )


# ---------------------------------------------------------------------------
# Vector field
# ---------------------------------------------------------------------------


def _make_field(phi: Escort, f: FitnessLandscape):
    """Build the raw RHS closure; reuses escort weights when f = A phi(x)."""
    if f.kind == "matrix_escort" and f.escort == phi:
        A = f.matrix

        def field(x):
            w = phi.weights(x)
            fx = A @ w
            m = (w @ fx) / w.sum()
            return w * (fx - m)

        return field

    def field(x):
        w = phi.weights(x)
        fx = f(x)
        m = (w @ fx) / w.sum()
        return w * (fx - m)

    return field


def vector_field(phi: Escort, f: FitnessLandscape, x) -> np.ndarray:
    """Right-hand side of the escort replicator equation at a state.

    The components sum to zero (the field is tangent to the simplex).
    """
    xs = as_simplex(x)
    return _make_field(phi, f)(xs.coords)


def escort_mean_fitness(phi: Escort, f: FitnessLandscape, x) -> float:
    """<f(x)>_phi at a state."""
    xs = as_simplex(x)
    w = phi.weights(xs.coords)
    return float(w @ f(xs.coords) / w.sum())


# ---------------------------------------------------------------------------
# Integration
# ---------------------------------------------------------------------------


def _check_controls(t_end, step, observe_every):
    try:
        observe_every = int(operator.index(observe_every))
    except TypeError:
        raise ConfigError(f"observe_every must be an integer, got {observe_every!r}") from None
    if observe_every < 1:
        raise ConfigError(f"observe_every must be >= 1, got {observe_every!r}")
    if not (step > 0.0 and math.isfinite(step)):
        raise ConfigError(f"step must be positive, got {step!r}")
    if not (t_end > 0.0 and math.isfinite(t_end)) or t_end < step:
        raise ConfigError(f"horizon must satisfy t_end >= step > 0, got t_end={t_end!r}")
    n_steps = int(round(t_end / step))
    return max(n_steps, 1)


class _Recorder:
    def __init__(self, phi, f, ref):
        self.phi = phi
        self.f = f
        self.ref = None if ref is None else as_simplex(ref).coords
        self.times = []
        self.states = []
        self.means = []

    def record(self, t, x):
        w = self.phi.weights(x)
        self.times.append(t)
        self.states.append(x.copy())
        self.means.append(float(w @ self.f(x) / w.sum()))

    def build(self, termination):
        states = np.array(self.states)
        lyap = integral = None
        # vector escorts induce no scalar logarithm, hence no reference diagnostics
        if self.ref is not None and not self.phi.is_vector:
            lyap = _safe_divergence(self.phi, self.ref, states)
            integral = _safe_integral(self.phi, self.ref, states)
        return Trajectory(self.times, states, self.means, lyap, integral, termination)


def _safe_divergence(phi, ref, states):
    """Divergence profile with +inf markers where the boundary makes it blow up."""
    return divergence_profile(phi, ref, states, allow_infinite=True)


def _safe_integral(phi, ref, states):
    """sum_i ref_i log_phi(x_i) per sample, with -inf markers at the boundary."""
    out = np.empty(states.shape[0])
    zero_limit = phi.log_zero_limit() if not phi.is_vector else math.nan
    for i, row in enumerate(states):
        total = 0.0
        for r, v in zip(ref, row):
            if r == 0.0:
                continue
            total += r * (phi.log(float(v)) if v > 0.0 else zero_limit)
        out[i] = total
    return out


def integrate(
    phi: Escort,
    f: FitnessLandscape,
    x0,
    t_end: float,
    step: float = DEFAULT_STEP,
    observe_every: int = 1,
    ref=None,
) -> Trajectory:
    """Integrate the escort flow with fixed-step classical Runge-Kutta 4.

    Samples are recorded at t = 0 and every ``observe_every``-th step (the
    final state is always included). After each step the state is divided
    by its sum whenever the drift |sum x - 1| exceeds 1e-13; the field is
    analytically tangent, so this corrects rounding only. When a step
    leaves the escort's domain or produces a negative coordinate the
    trajectory ends with a ``boundary_exit`` termination; non-finite
    states end it with ``step_failure``.
    """
    n_steps = _check_controls(t_end, step, observe_every)
    x = as_simplex(x0).coords.copy()
    field = _make_field(phi, f)
    strict = phi.requires_positive
    rec = _Recorder(phi, f, ref)
    rec.record(0.0, x)

    termination = None
    h = float(step)
    t_x = 0.0  # time of the current valid state
    t_recorded = 0.0
    for k in range(n_steps):
        try:
            k1 = field(x)
            k2 = field(x + 0.5 * h * k1)
            k3 = field(x + 0.5 * h * k2)
            k4 = field(x + h * k3)
        except DomainError as err:
            termination = Termination.boundary_exit(t_x, err.index)
            break
        x_new = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t_new = (k + 1) * h
        if not np.all(np.isfinite(x_new)):
            termination = Termination.step_failure(t_new)
            break
        bad = (x_new <= 0.0) if strict else (x_new < 0.0)
        if np.any(bad):
            termination = Termination.boundary_exit(t_new, int(np.argmax(bad)))
            break
        total = x_new.sum()
        if abs(total - 1.0) > DRIFT_TOL:
            x_new /= total
        x = x_new
        t_x = t_new
        if (k + 1) % observe_every == 0:
            rec.record(t_x, x)
            t_recorded = t_x
    if termination is None:
        termination = Termination.completed()
    if t_x > t_recorded:
        rec.record(t_x, x)

    return rec.build(termination)


# ---------------------------------------------------------------------------
# Discrete escort replicator map
# ---------------------------------------------------------------------------


def discrete_step(phi: Escort, f: FitnessLandscape, x) -> SimplexPoint:
    """One step of the discrete escort replicator map.

    x'_i = phi(x_i) f_i(x) / sum_j phi(x_j) f_j(x); the normalization makes
    x' a simplex point. Fitness must be strictly positive.
    """
    xs = as_simplex(x)
    fx = f(xs.coords)
    if np.any(fx <= 0.0):
        i = int(np.argmin(fx))
        raise PositivityError(f"discrete map needs positive fitness; f_{i} = {fx[i]!r}")
    w = phi.weights(xs.coords) * fx
    return SimplexPoint(w / w.sum())


# ---------------------------------------------------------------------------
# Formal solution through the escort exponential
# ---------------------------------------------------------------------------


def integrate_formal_solution(
    phi: Escort,
    f: FitnessLandscape,
    x0,
    t_end: float,
    step: float = DEFAULT_STEP,
    observe_every: int = 1,
) -> Trajectory:
    """Integrate the augmented system dv_i/dt = f_i(x), dG/dt = <f(x)>_phi.

    The state is reconstructed as x_i = exp_phi(v_i - G) with
    v_i(0) = log_phi(x0_i) and G(0) = 0. Raises RangeError when v_i - G
    leaves the attainable range of exp_phi.
    """
    if phi.is_vector:
        raise DomainError("the formal solution needs a scalar escort with invertible log")
    n_steps = _check_controls(t_end, step, observe_every)
    xs = as_simplex(x0)
    if not xs.interior:
        raise DomainError("the formal solution needs an interior initial state")
    n = xs.n

    def reconstruct(z):
        g = z[n]
        return np.array([phi.exp(float(z[i] - g)) for i in range(n)])

    def rhs(z):
        x = reconstruct(z)
        w = phi.weights(x)
        fx = f(x)
        m = w @ fx / w.sum()
        out = np.empty(n + 1)
        out[:n] = fx
        out[n] = m
        return out

    z = np.empty(n + 1)
    z[:n] = [phi.log(float(v)) for v in xs.coords]
    z[n] = 0.0

    rec = _Recorder(phi, f, None)
    rec.record(0.0, xs.coords.copy())
    h = float(step)
    recorded_last = True
    for k in range(n_steps):
        k1 = rhs(z)
        k2 = rhs(z + 0.5 * h * k1)
        k3 = rhs(z + 0.5 * h * k2)
        k4 = rhs(z + h * k3)
        z = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        recorded_last = (k + 1) % observe_every == 0
        if recorded_last:
            rec.record((k + 1) * h, reconstruct(z))
    if not recorded_last:
        rec.record(n_steps * h, reconstruct(z))
    return rec.build(Termination.completed())
