"""Boundary discretisation by probe lines and bisection.

Probe lines run parallel to each coordinate axis through a stratified,
jittered grid of offsets covering the bounding box.  Every sign change of
``F`` along a line is bracketed on a fine scan and refined by bisection
until ``|F| <= 1e-10 * max(1, |grad F|)``.  Axis-parallel families in all
``N`` directions keep the spacing along the boundary comparable to the line
spacing wherever the boundary points, and a thin neck is crossed by every
line perpendicular to it (angular probing from a single centre misses it).
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.spatial import cKDTree

from .._validation import SamplingError, check_count
from .models import DomainModel, ParametricDomain

RESIDUAL_TOL = 1e-10
SCAN_STEPS = 1024
BISECT_ITERS = 80
_MAX_ROUNDS = 8
MERGE_FRACTION = 0.01


@dataclass
class BoundarySample:
    points: np.ndarray
    normals: np.ndarray
    spacing: float
    probes: int = 0
    failed_probes: int = 0
    domain: object = field(default=None, repr=False, compare=False)

    def __len__(self):
        return len(self.points)

    @property
    def dim(self):
        return self.points.shape[1]

    def subset(self, index):
        index = np.asarray(index)
        pts = self.points[index]
        return BoundarySample(pts, self.normals[index], realized_spacing(pts), domain=self.domain)

    def augmented(self, points):
        """Copy with extra boundary points (normals taken from the domain)."""
        if self.domain is None:
            raise ValueError("augmenting a sample needs its domain")
        extra = np.atleast_2d(np.asarray(points, dtype=float))
        pts = np.vstack([self.points, extra])
        normals = np.vstack([self.normals, self.domain.normal(extra)])
        return BoundarySample(pts, normals, realized_spacing(pts), self.probes, self.failed_probes, self.domain)


def realized_spacing(points):
    """Largest nearest-neighbour distance in the sample."""
    if len(points) < 2:
        return math.inf
    dist, _ = cKDTree(points).query(points, k=2)
    return float(dist[:, 1].max())


def bisect_segments(d, a, b, iters=BISECT_ITERS):
    """Root of ``F`` on segments ``[a, b]`` with ``F(a) <= 0 < F(b)`` or the reverse.

    Returns the refined points and a mask of those meeting the residual
    tolerance.
    """
    fa = d.F(a)
    neg_at_a = fa <= 0
    lo = np.where(neg_at_a[:, None], a, b)
    hi = np.where(neg_at_a[:, None], b, a)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = d.F(mid)
        neg = fm <= 0
        lo = np.where(neg[:, None], mid, lo)
        hi = np.where(neg[:, None], hi, mid)
        if np.all(np.max(np.abs(hi - lo), axis=1) <= 4 * np.finfo(float).eps * (1 + np.abs(lo).max(axis=1))):
            break
    f_lo, g_lo = d.value_and_grad(lo)
    f_hi, g_hi = d.value_and_grad(hi)
    take_hi = np.abs(f_hi) < np.abs(f_lo)
    pts = np.where(take_hi[:, None], hi, lo)
    res = np.where(take_hi, f_hi, f_lo)
    gn = np.linalg.norm(np.where(take_hi[:, None], g_hi, g_lo), axis=1)
    ok = np.abs(res) <= RESIDUAL_TOL * np.maximum(1.0, gn)
    return pts, ok


def _line_offsets(rng, m, lo, hi):
    # One jittered offset per cell of an m^(N-1) stratification, kept to the
    # middle half of each cell.
    k = lo.size
    grids = np.meshgrid(*[np.arange(m)] * k, indexing="ij")
    cells = np.stack([g.ravel() for g in grids], axis=1).astype(float)
    jitter = 0.25 + 0.5 * rng.random(cells.shape)
    return lo + (cells + jitter) / m * (hi - lo)


def scan_lines(d, starts, direction, length, steps=SCAN_STEPS):
    """Bracket every sign change of ``F`` along ``start + s * direction``, ``s`` in [0, length]."""
    s = np.linspace(0.0, length, steps + 1)
    pts = starts[:, None, :] + s[None, :, None] * direction
    vals = d.F(pts)
    pos = vals > 0
    change = pos[:, 1:] != pos[:, :-1]
    li, si = np.nonzero(change)
    return pts[li, si], pts[li, si + 1], li


def _probe_axis(d, axis, m, rng, steps):
    lo, hi = d.bbox
    pad = 1e-3 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    others = [j for j in range(d.dim) if j != axis]
    offsets = _line_offsets(rng, m, lo[others], hi[others])
    starts = np.empty((len(offsets), d.dim))
    starts[:, others] = offsets
    starts[:, axis] = lo[axis]
    direction = np.zeros(d.dim)
    direction[axis] = 1.0
    a, b, _ = scan_lines(d, starts, direction, hi[axis] - lo[axis], steps)
    if len(a) == 0:
        return np.empty((0, d.dim)), 0, 0
    pts, ok = bisect_segments(d, a, b)
    return pts[ok], len(a), int(np.count_nonzero(~ok))


def _probe_all(d, m, seed, steps):
    pts, probes, failed = [], 0, 0
    for axis in range(d.dim):
        rng = np.random.default_rng([int(seed), int(m), axis])
        p, n, f = _probe_axis(d, axis, m, rng, steps)
        pts.append(p)
        probes += n
        failed += f
    return np.concatenate(pts), probes, failed


def sample_boundary(d, target_count, seed=0, steps=SCAN_STEPS):
    """At least ``target_count`` boundary points with outward unit normals.

    The line density is grown until the target is met.  Probes whose
    bisection misses the residual tolerance are skipped and counted; if more
    than half of them fail a :class:`SamplingError` is raised.
    """
    target_count = check_count(target_count, "target_count", 4)
    if isinstance(d, ParametricDomain):
        return _sample_parametric(d, target_count, seed)
    N = d.dim
    m = max(1, math.ceil((target_count / (2 * N)) ** (1.0 / (N - 1))))
    lo, hi = d.bbox
    for _ in range(_MAX_ROUNDS):
        pts, probes, failed = _probe_all(d, m, seed, steps)
        if probes and failed > probes / 2:
            raise SamplingError(f"{failed} of {probes} boundary probes failed to converge")
        pts = _dedupe(pts, MERGE_FRACTION * float(np.min(hi - lo)) / m)
        if len(pts) >= target_count:
            break
        if len(pts) == 0:
            m *= 2
        else:
            grow = (target_count / len(pts)) ** (1.0 / (N - 1))
            m = max(m + 1, math.ceil(m * grow * 1.02))
    else:
        raise SamplingError(f"could not reach {target_count} boundary points (got {len(pts)})")
    return BoundarySample(pts, d.normal(pts), realized_spacing(pts), probes, failed, d)


def _dedupe(pts, tol):
    # Probes from different axis families can hit the boundary almost at the
    # same spot; such near-twins add no information and make chord ratios
    # ill-conditioned, so keep the first copy.
    if len(pts) < 2:
        return pts
    tree = cKDTree(pts)
    pairs = tree.query_pairs(tol, output_type="ndarray")
    if len(pairs) == 0:
        return pts
    drop = np.zeros(len(pts), bool)
    drop[pairs.max(axis=1)] = True
    return pts[~drop]


def _sample_parametric(d, count, seed):
    rng = np.random.default_rng([int(seed), 0])
    t0, t1 = d.t_range
    ts = t0 + (np.arange(count) + 0.25 + 0.5 * rng.random(count)) / count * (t1 - t0)
    pts = np.asarray(d.gamma(ts), dtype=float)
    return BoundarySample(pts, d.curve_normals(ts), realized_spacing(pts), count, 0, d)


def _tangent_basis(n):
    # Orthonormal basis of the hyperplane normal to n.
    q, _ = np.linalg.qr(np.column_stack([n, np.eye(n.size)]))
    return q[:, 1:n.size]


def sample_near(d, x, radius, count=32, rng=None, steps=32):
    """Boundary points within roughly ``radius`` of the boundary point ``x``.

    Tangent offsets around ``x`` are pushed back onto the boundary along the
    normal at ``x`` (the crossing nearest to the tangent plane is kept).
    """
    rng = np.random.default_rng(0) if rng is None else rng
    x = np.asarray(x, dtype=float)
    if isinstance(d, ParametricDomain):
        t = d.nearest_parameter(x)
        speed = float(np.linalg.norm(d.dgamma(np.array([t]))[0]))
        dt = radius / max(speed, 1e-300)
        ts = t + np.linspace(-dt, dt, count)
        return np.asarray(d.gamma(ts), dtype=float), d.curve_normals(ts)
    n = d.normal(x)
    basis = _tangent_basis(n)
    k = basis.shape[1]
    if k == 1:
        coeff = np.linspace(-radius, radius, count)[:, None]
    else:
        dirs = rng.standard_normal((count, k))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        coeff = dirs * (radius * np.sqrt((np.arange(count) + 0.5) / count))[:, None]
    base = x + coeff @ basis.T
    starts = base - radius * n
    a, b, line = scan_lines(d, starts, n, 2 * radius, steps)
    if len(a) == 0:
        return np.empty((0, d.dim)), np.empty((0, d.dim))
    pts, ok = bisect_segments(d, a, b)
    pts, line = pts[ok], line[ok]
    # Nearest crossing to the tangent plane on each line.
    height = np.abs((pts - x) @ n)
    order = np.lexsort((height, line))
    _, first = np.unique(line[order], return_index=True)
    pts = pts[order[first]]
    return pts, d.normal(pts)
