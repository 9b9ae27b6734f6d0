"""Coordinate vectors, Euclidean and l^p norms, rigid frames and open balls.

Points are plain 1-d numpy arrays; batches are arrays whose last axis holds
the coordinates.  All functions here are pure.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from ._validation import InvalidInputError, as_point, check_exponent, check_positive

GEOMETRIC_TOL = 1e-9
ALGEBRAIC_TOL = 1e-12


@dataclass(frozen=True)
class NormContext:
    """Which norm to measure with: ``euclidean`` or ``lp`` with exponent ``p``."""

    kind: str = "euclidean"
    p: float = 2.0

    def __post_init__(self):
        if self.kind not in ("euclidean", "lp"):
            raise InvalidInputError(f"unknown norm kind {self.kind!r}")
        if self.kind == "euclidean":
            object.__setattr__(self, "p", 2.0)
        else:
            object.__setattr__(self, "p", check_exponent(self.p))

    @property
    def conjugate(self):
        return self.p / (self.p - 1.0)

    def to_dict(self):
        if self.kind == "euclidean":
            return {"kind": "euclidean"}
        return {"kind": "lp", "p": self.p}


EUCLIDEAN = NormContext()


def lp(p):
    return NormContext("lp", p)


def norm(v, ctx=EUCLIDEAN, axis=-1):
    """Norm of ``v`` along ``axis``; accepts a single point or a batch.

    The l^p branch rescales by the largest component so large exponents do
    not overflow.
    """
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("norm of a non-finite vector")
    if ctx.kind == "euclidean" or ctx.p == 2.0:
        return np.linalg.norm(v, axis=axis)
    a = np.abs(v)
    scale = np.max(a, axis=axis, keepdims=True)
    safe = np.where(scale > 0, scale, 1.0)
    s = np.sum((a / safe) ** ctx.p, axis=axis) ** (1.0 / ctx.p)
    return s * np.squeeze(safe, axis=axis)


@dataclass(frozen=True)
class Ball:
    """Open ball ``{y : |y - center| < radius}`` in the given norm."""

    center: np.ndarray
    radius: float
    norm: NormContext = EUCLIDEAN

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center, "center"))
        object.__setattr__(self, "radius", check_positive(self.radius, "radius"))

    def contains(self, x):
        return norm(np.asarray(x, dtype=float) - self.center, self.norm) < self.radius


def balls_disjoint(b1, b2):
    # Open balls: tangency (distance == r1 + r2) counts as disjoint.
    if b1.norm != b2.norm:
        raise InvalidInputError("balls live in different norm contexts")
    if b1.center.shape != b2.center.shape:
        raise InvalidInputError("balls have different dimensions")
    return bool(norm(b1.center - b2.center, b1.norm) >= b1.radius + b2.radius)


@dataclass(frozen=True)
class RigidFrame:
    """Rigid map ``y = R (x - translation)`` with ``R`` in SO(N).

    ``translation`` is the world point sent to the origin.
    """

    rotation: np.ndarray
    translation: np.ndarray = field(default=None)

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=float)
        if R.ndim != 2 or R.shape[0] != R.shape[1]:
            raise InvalidInputError("rotation must be a square matrix")
        n = R.shape[0]
        if not np.allclose(R @ R.T, np.eye(n), atol=1e-12, rtol=0):
            raise InvalidInputError("rotation is not orthogonal")
        if np.linalg.det(R) < 0:
            raise InvalidInputError("rotation has determinant -1")
        t = np.zeros(n) if self.translation is None else as_point(self.translation, "translation")
        if t.shape != (n,):
            raise InvalidInputError("translation dimension does not match rotation")
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)

    @property
    def dim(self):
        return self.rotation.shape[0]

    def apply(self, x):
        return (np.asarray(x, dtype=float) - self.translation) @ self.rotation.T

    def inverse(self, y):
        return np.asarray(y, dtype=float) @ self.rotation + self.translation

    def apply_vector(self, v):
        return np.asarray(v, dtype=float) @ self.rotation.T

    def inverse_vector(self, w):
        return np.asarray(w, dtype=float) @ self.rotation

    def to_dict(self):
        return {"rotation": self.rotation.tolist(), "translation": self.translation.tolist()}

    @classmethod
    def from_dict(cls, data):
        return cls(np.asarray(data["rotation"], dtype=float), np.asarray(data["translation"], dtype=float))


def _plane_rotation(n):
    # Rotation in span{n, e_N} taking n to e_N; stable when n . e_N >= 0.
    N = n.size
    e = np.zeros(N)
    e[-1] = 1.0
    c = n[-1]
    K = np.outer(e, n) - np.outer(n, e)
    return np.eye(N) + K + (K @ K) / (1.0 + c)


def frame_to_north(n, origin=None, tol=GEOMETRIC_TOL):
    """Rigid frame whose rotation sends the unit vector ``n`` to ``e_N``.

    Normals in the lower half-space (``n_N < 0``) are first turned by a half
    turn in the (e_1, e_N) plane, so the construction never divides by
    ``1 + n_N`` close to zero.  ``origin`` becomes the frame's translation.
    """
    n = as_point(n, "normal")
    if n.size < 2:
        raise InvalidInputError("frame_to_north needs dimension >= 2")
    length = float(np.linalg.norm(n))
    if abs(length - 1.0) > tol:
        raise InvalidInputError(f"normal must be a unit vector, |n| = {length!r}")
    n = n / length
    N = n.size
    if n[-1] >= 0:
        R = _plane_rotation(n)
    else:
        flip = np.eye(N)
        flip[0, 0] = -1.0
        flip[-1, -1] = -1.0
        R = _plane_rotation(flip @ n) @ flip
    # One Newton step towards orthogonality removes accumulated rounding.
    R = 1.5 * R - 0.5 * R @ R.T @ R
    origin = np.zeros(N) if origin is None else as_point(origin, "origin")
    return RigidFrame(R, origin)


def parallelogram_defect(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    lhs = norm(u + v) ** 2 + norm(u - v) ** 2
    rhs = 2 * norm(u) ** 2 + 2 * norm(v) ** 2
    return lhs - rhs


def unit_sphere_sample(rng, count, dim, ctx=EUCLIDEAN):
    """Points on the unit sphere of ``ctx``.

    Euclidean samples are uniform.  For l^p the components are i.i.d.
    generalized-Gaussian (density proportional to exp(-|t|^p)) and then
    normalised; this covers the whole sphere, which is all a universally
    quantified check needs.
    """
    if ctx.kind == "euclidean" or ctx.p == 2.0:
        g = rng.standard_normal((count, dim))
    else:
        g = rng.gamma(1.0 / ctx.p, 1.0, size=(count, dim)) ** (1.0 / ctx.p)
        g *= rng.choice((-1.0, 1.0), size=(count, dim))
    nrm = norm(g, ctx)
    nrm = np.where(nrm > 0, nrm, 1.0)
    return g / nrm[:, None]


def ball_sample(rng, count, dim, radius, ctx=EUCLIDEAN):
    """Points in the closed ``ctx``-ball of the given radius (radial law r^dim)."""
    directions = unit_sphere_sample(rng, count, dim, ctx)
    radii = radius * rng.random(count) ** (1.0 / dim)
    return directions * radii[:, None]


def is_unit(v, tol=GEOMETRIC_TOL):
    return math.isclose(float(np.linalg.norm(v)), 1.0, abs_tol=tol)
