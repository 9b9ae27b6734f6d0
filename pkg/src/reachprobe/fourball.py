"""The four-ball estimate and its l^p counterpart as decision procedures.

Given ``x, u, v`` with ``|u| = |v| = r``, the hypotheses ask that the open
balls ``B_r(x+u)``, ``B_r(-x-v)`` are disjoint and so are ``B_r(x-u)``,
``B_r(-x+v)``.  For open balls of equal radius that is exactly

    |2x + u + v| >= 2r   and   |2x - u - v| >= 2r,

so no set intersection is ever searched.  Under the hypotheses the
Euclidean conclusion is ``|u - v| <= 2|x|``; in l^p it is

    |u - v|^p <= 2^(p-1) p (p-1) r^(p-2) |x|^2        for p >= 2,
    |u - v|^2 <= 8 / (p (p-1)) r^(2-p) |x|^p          for 1 < p <= 2.
"""

from dataclasses import asdict, dataclass

import numpy as np

from . import _parallel
from ._validation import InvalidInputError, as_point, check_count, check_positive
from .geometry import EUCLIDEAN, NormContext, ball_sample, norm, unit_sphere_sample

SATISFIED_TOL = 1e-9
RADIUS_TOL = 1e-9


@dataclass(frozen=True)
class FourBallConfig:
    x: np.ndarray
    u: np.ndarray
    v: np.ndarray
    r: float
    norm: NormContext = EUCLIDEAN

    def __post_init__(self):
        x = as_point(self.x, "x")
        u = as_point(self.u, "u")
        v = as_point(self.v, "v")
        if not (x.shape == u.shape == v.shape):
            raise InvalidInputError("x, u, v must share one dimension")
        r = check_positive(self.r, "r")
        tol = RADIUS_TOL * max(1.0, r)
        for name, vec in (("u", u), ("v", v)):
            if abs(norm(vec, self.norm) - r) > tol:
                raise InvalidInputError(f"|{name}| must equal r = {r!r}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "r", r)


@dataclass(frozen=True)
class FourBallVerdict:
    hypotheses_hold: bool
    bound_value: float
    actual_value: float
    satisfied: bool

    @property
    def slack(self):
        return self.bound_value - self.actual_value


def _hypotheses(x, u, v, r, ctx):
    s = u + v
    return (norm(2 * x + s, ctx) >= 2 * r) & (norm(2 * x - s, ctx) >= 2 * r)


def check_hypotheses(c):
    return bool(_hypotheses(c.x, c.u, c.v, c.r, c.norm))


def _verdict(hyp, bound, actual, tol=SATISFIED_TOL):
    hyp = bool(hyp)
    return FourBallVerdict(hyp, float(bound), float(actual), (not hyp) or actual <= bound + tol)


def check_euclidean(c):
    if c.norm.kind != "euclidean":
        raise InvalidInputError("check_euclidean needs a euclidean config")
    bound = 2.0 * norm(c.x)
    actual = norm(c.u - c.v)
    return _verdict(check_hypotheses(c), bound, actual)


def lp_bound(x_norm, r, p, branch=None):
    """Right-hand side of the l^p estimate and the power of |u-v| it controls.

    ``branch`` forces ``"high"`` (p >= 2 formula) or ``"low"`` (p <= 2);
    by default the high branch is used from p = 2 upward.
    """
    if branch is None:
        branch = "high" if p >= 2 else "low"
    if branch == "high":
        if p < 2:
            raise InvalidInputError("high branch needs p >= 2")
        return 2.0 ** (p - 1) * p * (p - 1) * r ** (p - 2) * x_norm ** 2, p
    if branch == "low":
        if not 1 < p <= 2:
            raise InvalidInputError("low branch needs 1 < p <= 2")
        return 8.0 / (p * (p - 1)) * r ** (2 - p) * x_norm ** p, 2.0
    raise InvalidInputError(f"unknown branch {branch!r}")


def check_lp(c, branch=None):
    if c.norm.kind != "lp":
        raise InvalidInputError("check_lp needs an lp norm context")
    p = c.norm.p
    bound, power = lp_bound(norm(c.x, c.norm), c.r, p, branch)
    actual = norm(c.u - c.v, c.norm) ** power
    return _verdict(check_hypotheses(c), bound, actual)


@dataclass
class TrialReport:
    norm: dict
    dim: int
    r: float
    seed: int
    total: int
    applicable: int
    violations: int
    worst_slack: float

    def to_dict(self):
        return asdict(self)


def _batch_verdicts(x, u, v, r, ctx):
    """Vectorised hypotheses, bound and actual for a batch of configs."""
    hyp = _hypotheses(x, u, v, r, ctx)
    if ctx.kind == "euclidean":
        bound = 2.0 * norm(x)
        actual = norm(u - v)
    else:
        bound, power = lp_bound(norm(x, ctx), r, ctx.p)
        actual = norm(u - v, ctx) ** power
    return hyp, bound, actual


def sample_configs(rng, count, dim, r, ctx):
    x = ball_sample(rng, count, dim, 2.0 * r, ctx)
    u = r * unit_sphere_sample(rng, count, dim, ctx)
    v = r * unit_sphere_sample(rng, count, dim, ctx)
    return x, u, v


def run_trials(norm_ctx, dim, r, trials, seed, threads=None):
    """Random campaign: x in the 2r-ball, u and v on the r-sphere.

    Counts configurations meeting the hypotheses and those among them that
    break the conclusion; ``worst_slack`` is the smallest ``bound - actual``
    seen on an applicable configuration (``inf`` if none applied).
    """
    dim = check_count(dim, "dim", 2)
    trials = check_count(trials, "trials", 1)
    r = check_positive(r, "r")

    def block(index, start, stop):
        rng = _parallel.block_rng(seed, index)
        x, u, v = sample_configs(rng, stop - start, dim, r, norm_ctx)
        hyp, bound, actual = _batch_verdicts(x, u, v, r, norm_ctx)
        slack = (bound - actual)[hyp]
        bad = int(np.count_nonzero(slack < -SATISFIED_TOL))
        worst = float(slack.min()) if slack.size else float("inf")
        return int(hyp.sum()), bad, worst

    parts = _parallel.run_blocks(block, trials, threads=threads)
    return TrialReport(
        norm=norm_ctx.to_dict(),
        dim=dim,
        r=r,
        seed=int(seed),
        total=trials,
        applicable=sum(p[0] for p in parts),
        violations=sum(p[1] for p in parts),
        worst_slack=min(p[2] for p in parts),
    )
