"""Numerical estimates with standard errors.

Every integral in this package returns an :class:`Estimate`: a value
together with a standard error, a sample count and a method tag.
Arithmetic between estimates propagates errors to first order (delta
method) assuming independence, which is how all downstream acceptance
gates (3-sigma bands) are computed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

MONTE_CARLO = "monte-carlo"
QUADRATURE = "quadrature"
CLOSED_FORM = "closed-form"


def _combine_method(a: str, b: str) -> str:
    if MONTE_CARLO in (a, b):
        return MONTE_CARLO
    if QUADRATURE in (a, b):
        return QUADRATURE
    return CLOSED_FORM


@dataclass(frozen=True)
class Estimate:
    """A numerical value with uncertainty.

    Parameters
    ----------
    value : float
        Point estimate.
    stderr : float
        Standard error; zero for closed-form and quadrature results.
    samples : int
        Number of Monte-Carlo samples that produced the value (0 for
        deterministic methods).
    method : str
        One of ``"monte-carlo"``, ``"quadrature"``, ``"closed-form"``.
    """

    value: float
    stderr: float = 0.0
    samples: int = 0
    method: str = CLOSED_FORM

    def __post_init__(self):
        if self.stderr < 0:
            raise ValueError("stderr must be nonnegative")
        if self.method == MONTE_CARLO and self.samples <= 0:
            raise ValueError("monte-carlo estimates need samples > 0")
        if self.method != MONTE_CARLO and self.stderr != 0.0:
            raise ValueError("deterministic estimates must have stderr 0")

    # -- delta-method arithmetic (operands assumed independent) --

    def _coerce(self, other) -> "Estimate":
        if isinstance(other, Estimate):
            return other
        return Estimate(float(other))

    def __add__(self, other) -> "Estimate":
        o = self._coerce(other)
        return Estimate(
            self.value + o.value,
            math.hypot(self.stderr, o.stderr),
            self.samples + o.samples,
            _combine_method(self.method, o.method),
        )

    __radd__ = __add__

    def __sub__(self, other) -> "Estimate":
        o = self._coerce(other)
        return Estimate(
            self.value - o.value,
            math.hypot(self.stderr, o.stderr),
            self.samples + o.samples,
            _combine_method(self.method, o.method),
        )

    def __mul__(self, other) -> "Estimate":
        o = self._coerce(other)
        err = math.hypot(o.value * self.stderr, self.value * o.stderr)
        return Estimate(
            self.value * o.value,
            err,
            self.samples + o.samples,
            _combine_method(self.method, o.method),
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Estimate":
        o = self._coerce(other)
        v = self.value / o.value
        err = abs(v) * math.hypot(
            self.stderr / self.value if self.value != 0 else 0.0,
            o.stderr / o.value,
        )
        if self.value == 0:
            err = self.stderr / abs(o.value)
        return Estimate(
            v, err, self.samples + o.samples, _combine_method(self.method, o.method)
        )

    def __rtruediv__(self, other) -> "Estimate":
        return self._coerce(other) / self

    def __pow__(self, k: float) -> "Estimate":
        v = self.value**k
        err = abs(k * self.value ** (k - 1)) * self.stderr if self.value != 0 else 0.0
        return Estimate(v, err, self.samples, self.method)

    def __neg__(self) -> "Estimate":
        return Estimate(-self.value, self.stderr, self.samples, self.method)

    def within(self, target: float, nsigma: float = 3.0, atol: float = 0.0) -> bool:
        """True if ``target`` lies inside the ``nsigma`` band around the value."""
        return abs(self.value - target) <= nsigma * self.stderr + atol

    def __repr__(self):  # compact, for reports
        if self.method == MONTE_CARLO:
            return f"{self.value:.6g} ± {self.stderr:.2g} ({self.method}, N={self.samples})"
        return f"{self.value:.6g} ({self.method})"


def closed(value: float) -> Estimate:
    return Estimate(float(value))


def quad_estimate(value: float) -> Estimate:
    return Estimate(float(value), 0.0, 0, QUADRATURE)


def from_samples(values, scale: float = 1.0) -> Estimate:
    """Monte-Carlo estimate of ``scale * mean(values)``."""
    import numpy as np

    values = np.asarray(values, dtype=float)
    n = values.size
    mean = float(values.mean())
    sem = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return Estimate(scale * mean, abs(scale) * sem, n, MONTE_CARLO)
