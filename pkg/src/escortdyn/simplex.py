"""Points of the probability simplex and validation helpers."""

import numpy as np

from .errors import DomainError

SUM_TOL = 1e-9


class SimplexPoint:
    """A population state: nonnegative coordinates summing to one.

    Construction validates the invariants (|sum - 1| <= 1e-9, all
    coordinates >= 0, length >= 2) and records whether the point is
    interior (all coordinates strictly positive). The coordinate array
    is frozen.
    """

    __slots__ = ("coords", "interior")

    def __init__(self, coords):
        arr = np.array(coords, dtype=float)
        if arr.ndim != 1 or arr.size < 2:
            raise DomainError("simplex point needs a 1-d vector of length >= 2")
        if not np.all(np.isfinite(arr)):
            raise DomainError("simplex coordinates must be finite")
        if np.any(arr < 0.0):
            i = int(np.argmin(arr))
            raise DomainError(f"coordinate {i} is negative ({arr[i]!r})", index=i)
        total = float(arr.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise DomainError(f"coordinates sum to {total!r}, not 1")
        arr.flags.writeable = False
        self.coords = arr
        self.interior = bool(np.all(arr > 0.0))

    @property
    def n(self):
        return self.coords.size

    def __len__(self):
        return self.coords.size

    def __iter__(self):
        return iter(self.coords)

    def __eq__(self, other):
        if not isinstance(other, SimplexPoint):
            return NotImplemented
        return np.array_equal(self.coords, other.coords)

    def __repr__(self):
        inside = ", ".join(repr(c) for c in self.coords)
        return f"SimplexPoint([{inside}])"


def as_simplex(x) -> SimplexPoint:
    """Coerce an array-like to a validated SimplexPoint (pass-through if one)."""
    if isinstance(x, SimplexPoint):
        return x
    return SimplexPoint(x)


def barycenter(n: int) -> SimplexPoint:
    """The uniform state (1/n, ..., 1/n)."""
    return SimplexPoint(np.full(n, 1.0 / n))


def random_interior(n: int, rng: np.random.Generator) -> SimplexPoint:
    """Draw a uniform (Dirichlet(1, ..., 1)) point of the open simplex."""
    while True:
        x = rng.dirichlet(np.ones(n))
        if np.all(x > 0.0):
            return SimplexPoint(x)
