"""Exception types and small input-checking helpers shared by all modules."""

import math

import numpy as np


class InvalidInputError(ValueError):
    """Raised when an argument violates a documented precondition."""


class CylinderTooLargeError(InvalidInputError):
    """A probe line in the local-graph cylinder crossed the boundary zero or several times."""


class CertificateInfeasibleError(InvalidInputError):
    """A requested supporting-ball radius is violated by some boundary sample."""

    def __init__(self, message, sample_index=None, sample=None):
        super().__init__(message)
        self.sample_index = sample_index
        self.sample = sample


class SamplingError(RuntimeError):
    """Boundary sampling failed on too many probes."""


def as_point(v, name="point"):
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidInputError(f"{name} must be a non-empty 1-d coordinate vector")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite coordinates")
    return arr


def as_points(X, name="points", min_rows=1):
    arr = np.asarray(X, dtype=float)
    if arr.ndim != 2 or arr.shape[1] == 0:
        raise InvalidInputError(f"{name} must be a 2-d array of shape (n, dim)")
    if arr.shape[0] < min_rows:
        raise InvalidInputError(f"{name} needs at least {min_rows} rows, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return arr


def check_positive(value, name):
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise InvalidInputError(f"{name} must be a positive finite number, got {value!r}")
    return value


def check_exponent(p, lo_open=1.0, hi=math.inf, hi_closed=False, name="p"):
    p = float(p)
    ok = math.isfinite(p) and p > lo_open and (p <= hi if hi_closed else p < hi)
    if not ok:
        bracket = "]" if hi_closed else ")"
        raise InvalidInputError(f"{name} must lie in ({lo_open:g}, {hi:g}{bracket}, got {p!r}")
    return p


def check_count(n, name, minimum=1):
    if isinstance(n, bool) or int(n) != n or int(n) < minimum:
        raise InvalidInputError(f"{name} must be an integer >= {minimum}, got {n!r}")
    return int(n)
