"""Bounded domains ``{F < 0}`` and the built-in test shapes.

Built-in formulas (``t = x1``, ``s = x2^2 + ... + xN^2``):

ball        ``F = |x - center|^2 - R^2``
ellipsoid   ``F = sum (x_i / a_i)^2 - 1``
dumbbell    ``F = s - g(t)``, a solid of revolution about the x1 axis with
            ``g(t) = smax(lobe(t), delta^2, k)`` for ``|t| < c`` and
            ``g(t) = lobe(t)`` otherwise, where
            ``lobe(t) = R^2 - (|t| - c)^2``.  The lobes are discs of radius
            ``R`` centred at ``(+-c, 0)``, the neck is a straight tube of
            half-width ``delta`` and ``k`` is the blend width of the cubic
            smooth maximum (exact once the arguments differ by ``k``).  The
            admissible ``k`` keeps the blend away from ``t = 0`` and
            ``|t| = c`` so ``g`` is C^2.  Default ``k`` is 80% of that limit,
            which gives fillets with curvature radius above ``delta`` for the
            default shape.
tail        ``F = s - g(t)`` with ``g = smax(R^2 - t^2, spindle(t), k)`` and
            ``spindle(t) = 2 tip (L - t) t / L``: a disc of radius ``R`` with
            a tapering tail reaching ``t = L`` whose rounded end has
            curvature radius ``tip``.  Supporting radii shrink along the tail
            toward the tip.  This is one analytic stand-in for a ball with a
            tail; other shapes would serve equally.
"""

import math

import numpy as np

from .._validation import InvalidInputError, as_point, check_count, check_positive
from .expr import CompiledExpression, smooth_max, smooth_max_grad

BOUNDARY_TOL = 1e-9


class DomainModel:
    """Base class: an open bounded set with a boundary sampler hook.

    Subclasses provide ``value_and_grad(X)`` (implicit kinds) or override
    the sampling hooks (parametric kind).
    """

    kind = "implicit"

    def __init__(self, dim, bbox, descriptor=None):
        self.dim = check_count(dim, "dim", 2)
        lo, hi = (np.asarray(b, dtype=float) for b in bbox)
        if lo.shape != (self.dim,) or hi.shape != (self.dim,) or np.any(hi <= lo):
            raise InvalidInputError("bbox must be [[lo...], [hi...]] with lo < hi in every axis")
        self.bbox = (lo, hi)
        self.descriptor = descriptor or {}

    def value_and_grad(self, X):
        raise NotImplementedError

    def F(self, X):
        return self.value_and_grad(X)[0]

    def grad(self, X):
        return self.value_and_grad(X)[1]

    def normal(self, X):
        g = self.grad(X)
        return g / np.linalg.norm(g, axis=-1, keepdims=True)

    @property
    def diameter(self):
        lo, hi = self.bbox
        return float(np.linalg.norm(hi - lo))

    def to_dict(self):
        out = {"kind": self.kind, **self.descriptor, "dim": self.dim}
        out["bbox"] = [self.bbox[0].tolist(), self.bbox[1].tolist()]
        return out

    def __repr__(self):
        return f"{type(self).__name__}({self.descriptor!r}, dim={self.dim})"


class ImplicitDomain(DomainModel):
    """Domain given by a vectorised ``value_and_grad`` callable."""

    def __init__(self, value_and_grad, dim, bbox, descriptor=None):
        super().__init__(dim, bbox, descriptor)
        self._vg = value_and_grad

    def value_and_grad(self, X):
        X = np.asarray(X, dtype=float)
        return self._vg(X)


class ExpressionDomain(ImplicitDomain):
    def __init__(self, expr, dim, bbox):
        compiled = CompiledExpression(expr, dim)
        super().__init__(compiled.value_and_grad, dim, bbox, {"expr": expr})


class BuiltinDomain(ImplicitDomain):
    kind = "builtin"


def _ball(R=1.0, dim=2, center=None):
    R = check_positive(R, "R")
    dim = check_count(dim, "dim", 2)
    c = np.zeros(dim) if center is None else as_point(center, "center")
    if c.shape != (dim,):
        raise InvalidInputError("center dimension does not match dim")

    def vg(X):
        d = X - c
        return np.sum(d * d, axis=-1) - R * R, 2 * d

    params = {"R": R}
    if center is not None:
        params["center"] = c.tolist()
    return BuiltinDomain(vg, dim, (c - R, c + R), {"name": "ball", "params": params})


def _ellipsoid(a=2.0, b=1.0, axes=None, dim=None):
    if axes is None:
        axes = [a, b] + ([] if dim is None else [b] * (int(dim) - 2))
    axes = np.array([check_positive(v, "semi-axis") for v in axes])
    if axes.size < 2:
        raise InvalidInputError("ellipsoid needs at least two semi-axes")
    inv2 = 1.0 / axes ** 2

    def vg(X):
        return np.sum(X * X * inv2, axis=-1) - 1.0, 2 * X * inv2

    return BuiltinDomain(vg, axes.size, (-axes, axes),
                         {"name": "ellipsoid", "params": {"axes": axes.tolist()}})


def _profile_domain(g_and_dg, dim, t_range, width, descriptor):
    def vg(X):
        t = X[..., 0]
        rest = X[..., 1:]
        g, dg = g_and_dg(t)
        val = np.sum(rest * rest, axis=-1) - g
        grad = np.concatenate([-dg[..., None], 2 * rest], axis=-1)
        return val, grad

    lo = np.array([t_range[0]] + [-width] * (dim - 1))
    hi = np.array([t_range[1]] + [width] * (dim - 1))
    return BuiltinDomain(vg, dim, (lo, hi), descriptor)


def dumbbell_blend_limit(R, c, delta):
    return min(R * R - delta * delta, delta * delta - (R * R - c * c))


def _dumbbell(R=1.0, c=2.0, delta=0.1, k=None, dim=2):
    R = check_positive(R, "R")
    c = check_positive(c, "c")
    delta = check_positive(delta, "delta")
    dim = check_count(dim, "dim", 2)
    if not delta < R:
        raise InvalidInputError("neck half-width delta must be smaller than the lobe radius R")
    if not c > R:
        raise InvalidInputError("lobe centres must satisfy c > R")
    limit = dumbbell_blend_limit(R, c, delta)
    k = 0.8 * limit if k is None else check_positive(k, "k")
    if k > limit:
        raise InvalidInputError(f"blend width k must not exceed {limit:g} for these lobes")

    def g_and_dg(t):
        at = np.abs(t)
        sg = np.sign(t)
        lobe = R * R - (at - c) ** 2
        dlobe = -2 * (at - c) * sg
        neck = np.full_like(t, delta * delta)
        blended = smooth_max(lobe, neck, k)
        da, _ = smooth_max_grad(lobe, neck, k)
        inside = at < c
        return np.where(inside, blended, lobe), np.where(inside, da * dlobe, dlobe)

    params = {"R": R, "c": c, "delta": delta, "k": k}
    return _profile_domain(g_and_dg, dim, (-(c + R), c + R), R,
                           {"name": "dumbbell", "params": params})


def _tail(R=1.0, L=3.0, tip=0.05, k=0.1, dim=2):
    R = check_positive(R, "R")
    L = check_positive(L, "L")
    tip = check_positive(tip, "tip")
    k = check_positive(k, "k")
    dim = check_count(dim, "dim", 2)
    if not L > R:
        raise InvalidInputError("tail end L must lie outside the disc (L > R)")
    # Exactness at t = -R keeps the left end of the disc round.
    if k > 2 * tip * R * (L + R) / L:
        raise InvalidInputError("blend width k too large for this tail")

    def g_and_dg(t):
        disc = R * R - t * t
        ddisc = -2 * t
        spindle = 2 * tip * (L - t) * t / L
        dspindle = 2 * tip * (L - 2 * t) / L
        da, db = smooth_max_grad(disc, spindle, k)
        return smooth_max(disc, spindle, k), da * ddisc + db * dspindle

    width = max(R, math.sqrt(tip * L / 2)) * 1.05
    params = {"R": R, "L": L, "tip": tip, "k": k}
    return _profile_domain(g_and_dg, dim, (-R * 1.05, L * 1.001), width,
                           {"name": "tail", "params": params})


_BUILTINS = {"ball": _ball, "ellipsoid": _ellipsoid, "dumbbell": _dumbbell, "tail": _tail}


def builtin(name, **params):
    """Construct a built-in domain: ``ball``, ``ellipsoid``, ``dumbbell`` or ``tail``."""
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise InvalidInputError(f"unknown builtin domain {name!r}; choose from {sorted(_BUILTINS)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise InvalidInputError(f"bad parameters for {name}: {exc}") from None


def inside(d, x, tol=BOUNDARY_TOL):
    """Classify ``x`` as ``"inside"``, ``"boundary"`` or ``"outside"``.

    The boundary band is ``|F| <= tol * |grad F|``, a first-order distance.
    """
    x = as_point(x, "x")
    if hasattr(d, "classify"):
        return d.classify(x, tol)
    val, g = d.value_and_grad(x)
    if abs(val) <= tol * max(float(np.linalg.norm(g)), 1e-300):
        return "boundary"
    return "inside" if val < 0 else "outside"


def domain_from_dict(data):
    """Build a domain from its JSON description."""
    if not isinstance(data, dict):
        raise InvalidInputError("domain description must be a JSON object")
    kind = data.get("kind")
    if kind == "builtin":
        name = data.get("name")
        if not isinstance(name, str):
            raise InvalidInputError("field 'name' is required for builtin domains")
        params = dict(data.get("params") or {})
        if "dim" in data and name != "ellipsoid":
            params.setdefault("dim", data["dim"])
        d = builtin(name, **params)
        if "bbox" in data:
            d.bbox = _read_bbox(data["bbox"], d.dim)
        return d
    if kind == "implicit":
        expr = data.get("expr", (data.get("params") or {}).get("expr"))
        if not isinstance(expr, str):
            raise InvalidInputError("field 'expr' is required for implicit domains")
        if "dim" not in data:
            raise InvalidInputError("field 'dim' is required for implicit domains")
        if "bbox" not in data:
            raise InvalidInputError("field 'bbox' is required for implicit domains")
        dim = check_count(data["dim"], "dim", 2)
        return ExpressionDomain(expr, dim, _read_bbox(data["bbox"], dim))
    raise InvalidInputError(f"field 'kind' must be 'builtin' or 'implicit', got {kind!r}")


def _read_bbox(raw, dim):
    try:
        lo, hi = (np.asarray(b, dtype=float) for b in raw)
    except (TypeError, ValueError):
        raise InvalidInputError("field 'bbox' must be [[lo...], [hi...]]") from None
    if lo.shape != (dim,) or hi.shape != (dim,) or np.any(hi <= lo):
        raise InvalidInputError("field 'bbox' must be [[lo...], [hi...]] with lo < hi")
    return lo, hi


class ParametricDomain(DomainModel):
    """Planar domain bounded by a closed counter-clockwise curve ``gamma(t)``.

    ``gamma`` and ``dgamma`` map an array of parameters in ``[t0, t1)`` to
    ``(n, 2)`` arrays.  Samples are produced directly from the curve, and
    inside tests use the winding number of a dense polygon.
    """

    kind = "parametric"

    def __init__(self, gamma, dgamma, t_range=(0.0, 2 * math.pi), polygon_size=4096, name="curve"):
        self.gamma = gamma
        self.dgamma = dgamma
        self.t_range = tuple(float(t) for t in t_range)
        ts = np.linspace(*self.t_range, polygon_size, endpoint=False)
        self._poly_t = ts
        self._poly = np.asarray(gamma(ts), dtype=float)
        pad = 1e-9 * (1 + np.abs(self._poly).max())
        super().__init__(2, (self._poly.min(axis=0) - pad, self._poly.max(axis=0) + pad),
                         {"name": name})
        area = 0.5 * np.sum(self._poly[:, 0] * np.roll(self._poly[:, 1], -1)
                            - np.roll(self._poly[:, 0], -1) * self._poly[:, 1])
        if area <= 0:
            raise InvalidInputError("parametric curve must be counter-clockwise")

    def curve_normals(self, ts):
        d = np.asarray(self.dgamma(ts), dtype=float)
        n = np.stack([d[:, 1], -d[:, 0]], axis=1)
        return n / np.linalg.norm(n, axis=1, keepdims=True)

    def nearest_parameter(self, x):
        i = int(np.argmin(np.linalg.norm(self._poly - x, axis=1)))
        return self._poly_t[i]

    def classify(self, x, tol):
        d = np.linalg.norm(self._poly - x, axis=1)
        j = int(np.argmin(d))
        if d[j] <= tol:
            return "boundary"
        rel = self._poly - x
        ang = np.arctan2(rel[:, 1], rel[:, 0])
        dang = np.diff(np.concatenate([ang, ang[:1]]))
        dang = (dang + np.pi) % (2 * np.pi) - np.pi
        winding = round(dang.sum() / (2 * np.pi))
        return "inside" if winding != 0 else "outside"

    def project(self, X):
        """Curve parameters of the points nearest to ``X`` (dense lookup plus Newton steps)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        idx = np.argmin(np.linalg.norm(self._poly[None, :, :] - X[:, None, :], axis=2), axis=1)
        t = self._poly_t[idx].copy()
        h = 1e-6 * (self.t_range[1] - self.t_range[0])
        for _ in range(5):
            g = np.asarray(self.gamma(t)) - X
            d1 = np.asarray(self.dgamma(t))
            d2 = (np.asarray(self.dgamma(t + h)) - np.asarray(self.dgamma(t - h))) / (2 * h)
            num = np.sum(g * d1, axis=1)
            den = np.sum(d1 * d1, axis=1) + np.sum(g * d2, axis=1)
            t = t - num / np.where(np.abs(den) > 1e-300, den, 1.0)
        return t

    def normal(self, X):
        single = np.ndim(X) == 1
        n = self.curve_normals(self.project(X))
        return n[0] if single else n
