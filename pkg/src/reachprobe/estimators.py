"""Both sides of the supporting-sphere / Lipschitz-normal equivalence.

Supporting radius
    A boundary point ``y`` stays outside the open ball of radius ``r``
    centred at ``a = x0 - r n(x0)`` iff ``|y - a| >= r``, which expands to
    ``r <= |y - x0|^2 / (2 <x0 - y, n(x0)>)`` whenever the inner product is
    positive.  The largest inner radius allowed by the sample is the minimum
    of these chord ratios; the outer side swaps the sign of the inner
    product.  Fewer samples mean fewer constraints, so the sampled radius
    over-estimates the true one and can only drop as samples are added.

Normal Lipschitz constant
    The largest ``|n(xi) - n(xj)| / |xi - xj|`` over sampled pairs is a lower
    bound of the true constant; the best pair is then refined by resampling
    the boundary in shrinking neighbourhoods of both endpoints.

Outer balls are checked against boundary samples plus the side of their
centre: an open ball that misses the boundary and whose centre lies
outside the closure is, being connected, contained in the exterior.
"""

from dataclasses import asdict, dataclass, field
import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import _parallel
from ._validation import CertificateInfeasibleError, InvalidInputError, check_count, check_positive
from .domains.models import inside
from .domains.sampling import BoundarySample, realized_spacing, sample_boundary, sample_near

DUPLICATE_TOL = 1e-12
CERTIFICATE_TOL = 1e-9
DEFAULT_REFINE_ITERS = 6
SHRINK = 0.5
REFINE_COUNT = 32
_ROW_BLOCK = 256


def _chord_ratio_min(X, normals, rows, side, r_max):
    # Minimum chord ratio of each query row against all sample points.
    diff = X[None, :, :] - X[rows][:, None, :]          # y - x0
    dist2 = np.einsum("ijk,ijk->ij", diff, diff)
    dot = np.einsum("ijk,ik->ij", diff, normals[rows])  # <y - x0, n>
    denom = -2 * dot if side == "inner" else 2 * dot
    valid = (denom > 0) & (dist2 > DUPLICATE_TOL ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(valid, dist2 / np.where(valid, denom, 1.0), np.inf)
    return np.minimum(ratio.min(axis=1), r_max)


def _default_r_max(s):
    if s.domain is not None:
        return s.domain.diameter
    return float(np.linalg.norm(s.points.max(axis=0) - s.points.min(axis=0)))


def supporting_radius_at(s, i, side, r_max=None):
    """Largest one-sided tangent-ball radius at sample ``i`` not violated by the sample."""
    if side not in ("inner", "outer"):
        raise InvalidInputError(f"side must be 'inner' or 'outer', got {side!r}")
    if len(s) < 2:
        raise InvalidInputError("need at least two boundary samples")
    r_max = _default_r_max(s) if r_max is None else check_positive(r_max, "r_max")
    return float(_chord_ratio_min(s.points, s.normals, np.array([int(i)]), side, r_max)[0])


def supporting_radii(s, side, r_max=None, threads=None):
    """Vector of :func:`supporting_radius_at` over every sample point."""
    if side not in ("inner", "outer"):
        raise InvalidInputError(f"side must be 'inner' or 'outer', got {side!r}")
    r_max = _default_r_max(s) if r_max is None else check_positive(r_max, "r_max")
    X, normals = s.points, s.normals
    parts = _parallel.run_blocks(
        lambda _, a, b: _chord_ratio_min(X, normals, np.arange(a, b), side, r_max),
        len(X), _ROW_BLOCK, threads)
    return np.concatenate(parts)


def global_support_radius(s, r_max=None, threads=None):
    """Sampled uniform two-sided radius: min over points of both one-sided radii."""
    if len(s) < 2:
        raise InvalidInputError("need at least two boundary samples")
    inner = supporting_radii(s, "inner", r_max, threads)
    outer = supporting_radii(s, "outer", r_max, threads)
    return float(min(inner.min(), outer.min()))


def _pair_ratios_max(X, normals, rows):
    dx = np.linalg.norm(X[rows][:, None, :] - X[None, :, :], axis=2)
    dn = np.linalg.norm(normals[rows][:, None, :] - normals[None, :, :], axis=2)
    valid = dx >= DUPLICATE_TOL
    ratio = np.where(valid, dn / np.where(valid, dx, 1.0), -np.inf)
    j = np.argmax(ratio, axis=1)
    best = ratio[np.arange(len(rows)), j]
    k = int(np.argmax(best))
    return float(best[k]), int(rows[k]), int(j[k])


def max_pair_ratio(points, normals, threads=None):
    """Largest ``|dn| / |dx|`` over all pairs and the pair attaining it."""
    X = np.asarray(points, dtype=float)
    Nrm = np.asarray(normals, dtype=float)
    parts = _parallel.run_blocks(lambda _, a, b: _pair_ratios_max(X, Nrm, np.arange(a, b)),
                                 len(X), _ROW_BLOCK, threads)
    # Ties resolve to the earliest block, independent of scheduling.
    best = max(parts, key=lambda p: p[0])
    return best


def lipschitz_estimate(s, refine_iters=DEFAULT_REFINE_ITERS, threads=None, return_pair=False):
    """Lower bound of the Lipschitz constant of the outward normal.

    Needs ``s.domain`` for refinement; without it (or with
    ``refine_iters=0``) the raw pairwise maximum is returned.
    """
    if len(s) < 2:
        raise InvalidInputError("need at least two boundary samples")
    refine_iters = check_count(refine_iters, "refine_iters", 0)
    value, i, j = max_pair_ratio(s.points, s.normals, threads)
    xi, xj = s.points[i], s.points[j]
    if s.domain is not None and refine_iters > 0 and math.isfinite(value):
        rng = np.random.default_rng(0)
        eps = min(max(s.spacing, 1e-12), 0.5 * float(np.linalg.norm(xi - xj)) + s.spacing)
        for _ in range(refine_iters):
            pi, ni = sample_near(s.domain, xi, eps, REFINE_COUNT, rng)
            pj, nj = sample_near(s.domain, xj, eps, REFINE_COUNT, rng)
            P = np.vstack([xi[None], xj[None], pi, pj])
            Nn = np.vstack([s.domain.normal(np.vstack([xi, xj])), ni, nj])
            cand, a, b = max_pair_ratio(P, Nn, threads=1)
            if cand > value:
                value, xi, xj = cand, P[a], P[b]
            eps *= SHRINK
    if return_pair:
        return value, (xi, xj)
    return value


@dataclass
class RegularityReport:
    """Sampled estimates of both regularity quantities.

    ``r_support`` over-estimates the true uniform radius (it only sees
    sampled constraints); ``lip_normal`` under-estimates the true Lipschitz
    constant (it is a maximum over actual pairs).  For C^{1,1} domains their
    product tends to 1 as sampling refines.
    """

    r_support: float
    lip_normal: float
    product: float
    sample_count: int
    refinement_iters: int
    spacing: float
    r_max: float
    seed: int
    domain: dict
    tolerances: dict = field(default_factory=dict)
    directions: dict = field(default_factory=lambda: {
        "r_support": "upper estimate of the true uniform radius",
        "lip_normal": "lower bound of the true Lipschitz constant",
    })

    def to_dict(self):
        return asdict(self)


def equivalence_report(d, samples=2000, seed=0, r_max=None, refine_iters=DEFAULT_REFINE_ITERS, threads=None):
    samples = check_count(samples, "samples", 100)
    s = sample_boundary(d, samples, seed)
    r_max = d.diameter if r_max is None else check_positive(r_max, "r_max")
    r = global_support_radius(s, r_max, threads)
    lip = lipschitz_estimate(s, refine_iters, threads)
    return RegularityReport(
        r_support=r,
        lip_normal=lip,
        product=r * lip,
        sample_count=len(s),
        refinement_iters=refine_iters,
        spacing=s.spacing,
        r_max=r_max,
        seed=int(seed),
        domain=d.to_dict(),
        tolerances={"duplicate": DUPLICATE_TOL, "boundary_residual": 1e-10,
                    "refine_shrink": SHRINK},
    )


@dataclass(frozen=True)
class SupportCertificate:
    x0: np.ndarray
    inner_center: np.ndarray
    outer_center: np.ndarray
    r: float
    p_vec: np.ndarray

    def to_dict(self):
        return {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in asdict(self).items()}


def build_certificate(s, i, r, domain=None, tol=CERTIFICATE_TOL):
    """Supporting balls of radius ``r`` at sample ``i``, verified against every sample.

    Raises :class:`CertificateInfeasibleError` naming the first violating
    sample (or centre) when ``r`` is too large.
    """
    r = check_positive(r, "r")
    i = int(i)
    domain = s.domain if domain is None else domain
    x0 = s.points[i]
    n = s.normals[i]
    a = x0 - r * n
    b = x0 + r * n
    # Distances to the centres are well conditioned even for very short
    # chords, unlike the chord ratio itself.
    for side, center in (("inner", a), ("outer", b)):
        dist = np.linalg.norm(s.points - center, axis=1)
        j = int(np.argmin(dist))
        if dist[j] < r - tol * max(1.0, r):
            limit = supporting_radius_at(s, i, side, r_max=2 * r)
            raise CertificateInfeasibleError(
                f"r = {r!r} exceeds the {side} supporting radius at sample {i} (about {limit:.6g}); "
                f"sample {j} at {s.points[j].tolist()} lies inside the {side} ball", j, s.points[j])
    if domain is not None:
        if inside(domain, a) != "inside":
            raise CertificateInfeasibleError("inner ball centre is not inside the domain", i, x0)
        if inside(domain, b) != "outside":
            raise CertificateInfeasibleError("outer ball centre is not outside the domain", i, x0)
    p_vec = (b - a) / np.linalg.norm(b - a)
    return SupportCertificate(x0.copy(), a, b, r, p_vec)


def pair_lipschitz_margin(c1, c2):
    """``|x0 - y0| / r - |p(x0) - p(y0)|``, non-negative for verified certificates."""
    if not math.isclose(c1.r, c2.r, rel_tol=1e-12):
        raise InvalidInputError("certificates must share one radius")
    return float(np.linalg.norm(c1.x0 - c2.x0) / c1.r - np.linalg.norm(c1.p_vec - c2.p_vec))


# scikit-learn style wrappers ------------------------------------------------

def check_boundary_array(X, dim=None, min_samples=2):
    """Validate rows ``[point, outward unit normal]`` and split them.

    Returns ``(points, normals)``; normals must be unit length within 1e-9.
    """
    X = check_array(X, dtype=np.float64, ensure_min_samples=min_samples)
    if X.shape[1] % 2 or X.shape[1] < 4:
        raise InvalidInputError("rows must hold a point followed by its normal (2 * dim columns, dim >= 2)")
    k = X.shape[1] // 2
    if dim is not None and k != dim:
        raise InvalidInputError(f"expected dimension {dim}, got {k}")
    points, normals = X[:, :k], X[:, k:]
    if np.any(np.abs(np.linalg.norm(normals, axis=1) - 1) > CERTIFICATE_TOL):
        raise InvalidInputError("normals must be unit vectors")
    return points, normals


def boundary_array(s):
    """Pack a :class:`BoundarySample` into the ``[point, normal]`` row layout."""
    return np.hstack([s.points, s.normals])


class SupportRadiusEstimator(TransformerMixin, BaseEstimator):
    """Chord-ratio supporting radii of a boundary point cloud.

    ``fit`` stores the cloud and the per-point inner/outer radii;
    ``transform`` returns ``[inner, outer]`` radii of query rows measured
    against the fitted cloud.
    """

    def __init__(self, r_max=None):
        self.r_max = r_max

    def fit(self, X, y=None):
        points, normals = check_boundary_array(X)
        s = BoundarySample(points, normals, math.nan)
        self.r_max_ = _default_r_max(s) if self.r_max is None else check_positive(self.r_max, "r_max")
        self.points_, self.normals_ = points, normals
        self.inner_radii_ = supporting_radii(s, "inner", self.r_max_)
        self.outer_radii_ = supporting_radii(s, "outer", self.r_max_)
        both = np.minimum(self.inner_radii_, self.outer_radii_)
        self.argmin_ = int(np.argmin(both))
        self.r_support_ = float(both[self.argmin_])
        self.n_features_in_ = points.shape[1] * 2
        return self

    def transform(self, X):
        check_is_fitted(self, "r_support_")
        points, normals = check_boundary_array(X, dim=self.points_.shape[1], min_samples=1)
        cloud = np.vstack([self.points_, points])
        nrm = np.vstack([self.normals_, normals])
        rows = np.arange(len(self.points_), len(cloud))
        inner = _chord_ratio_min(cloud, nrm, rows, "inner", self.r_max_)
        outer = _chord_ratio_min(cloud, nrm, rows, "outer", self.r_max_)
        return np.column_stack([inner, outer])


class NormalLipschitzEstimator(BaseEstimator):
    """Lower bound of the normal's Lipschitz constant from a boundary cloud.

    Pass ``domain`` to enable pair refinement by local resampling.
    """

    def __init__(self, refine_iters=DEFAULT_REFINE_ITERS, domain=None):
        self.refine_iters = refine_iters
        self.domain = domain

    def fit(self, X, y=None):
        points, normals = check_boundary_array(X)
        s = BoundarySample(points, normals, realized_spacing(points), domain=self.domain)
        self.lip_normal_, self.best_pair_ = lipschitz_estimate(
            s, self.refine_iters if self.domain is not None else 0, return_pair=True)
        self.n_features_in_ = points.shape[1] * 2
        return self


class RegularityAnalyzer(BaseEstimator):
    """Sample a domain and estimate both regularity quantities.

    ``fit(domain)`` stores ``report_`` plus ``r_support_``, ``lip_normal_``
    and ``product_``; ``score`` returns the product, which tends to 1 for
    C^{1,1} domains.
    """

    def __init__(self, samples=2000, seed=0, r_max=None, refine_iters=DEFAULT_REFINE_ITERS):
        self.samples = samples
        self.seed = seed
        self.r_max = r_max
        self.refine_iters = refine_iters

    def fit(self, X, y=None):
        self.report_ = equivalence_report(X, self.samples, self.seed, self.r_max, self.refine_iters)
        self.r_support_ = self.report_.r_support
        self.lip_normal_ = self.report_.lip_normal
        self.product_ = self.report_.product
        return self

    def score(self, X=None, y=None):
        check_is_fitted(self, "report_")
        return self.product_
