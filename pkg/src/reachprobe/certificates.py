"""Supporting-ball certificates from a local boundary graph.

With ``phi(0) = 0`` and ``grad phi(0) = 0``, the envelope condition

    |phi(x')| <= (M(|x'|) + 1) / (2 r) * |x'|^2,
    M(t) = max over |y'| <= t of |grad phi(y')|^2,

traps the graph between two parabolas, and then the balls of radius

    delta0 = min{ r / (max |grad phi|^2 + 1), rho, h / 2 }

centred at ``(0, +-delta0)`` touch the graph only at the origin.  Both
facts are checked on the grid independently, so a grid that passes the
envelope but fails the balls would expose an error.

The grid is a finite check of a continuum statement.  Each certificate
records ``continuum_gap = sqrt(N-1)/2 * spacing * sqrt(1 + grad_max^2)``,
the most any node-to-centre distance can change between a node and the
points of its grid cell.
"""

from dataclasses import dataclass
import math

import numpy as np

from ._validation import CertificateInfeasibleError, InvalidInputError, check_positive
from .domains.models import inside
from .domains.sampling import sample_boundary

MARGIN_TOL = 1e-9


def _radius_restricted_gradmax(radii, gsq):
    # Running max of |grad|^2 over nodes sorted by radius; equal radii share
    # the group maximum so each node sees the whole closed disc.
    order = np.argsort(radii, kind="stable")
    running = np.maximum.accumulate(gsq[order])
    sorted_r = radii[order]
    last = np.searchsorted(sorted_r, sorted_r, side="right") - 1
    out = np.empty_like(gsq)
    out[order] = running[last]
    return out


def envelope_margins(g, r):
    xp, phi, grad = g.nodes()
    if len(phi) == 0:
        raise InvalidInputError("graph has no grid nodes")
    radii = np.linalg.norm(xp, axis=1)
    m = _radius_restricted_gradmax(radii, np.sum(grad * grad, axis=1))
    return (m + 1.0) / (2.0 * r) * radii ** 2 - np.abs(phi)


def envelope_check(g, r):
    """Return ``(ok, worst_margin)`` of the parabola envelope over every grid node."""
    r = check_positive(r, "r")
    margins = envelope_margins(g, r)
    worst = float(margins.min())
    return worst >= -MARGIN_TOL, worst


def ball_margins(g, delta):
    """``min over signs of |(x', phi) - (0, +-delta)| - delta`` at every grid node."""
    pts = g.local_points()
    out = np.inf
    for sign in (1.0, -1.0):
        c = np.zeros(g.dim)
        c[-1] = sign * delta
        out = np.minimum(out, np.linalg.norm(pts - c, axis=1) - delta)
    return out


@dataclass
class GraphCertificate:
    graph: object
    r: float
    grad_max: float
    delta0: float
    envelope_ok: bool
    balls_ok: bool
    envelope_margin: float
    ball_margin: float
    continuum_gap: float

    @property
    def ok(self):
        return self.envelope_ok and self.balls_ok

    def centers(self, delta=None):
        """World coordinates of the inner and outer ball centres."""
        delta = self.delta0 if delta is None else delta
        up = np.zeros(self.graph.dim)
        up[-1] = delta
        return self.graph.frame.inverse(-up), self.graph.frame.inverse(up)

    def to_dict(self):
        inner, outer = self.centers()
        g = self.graph
        return {
            "ok": self.ok,
            "r": self.r,
            "grad_max": self.grad_max,
            "delta0": self.delta0,
            "envelope_ok": self.envelope_ok,
            "balls_ok": self.balls_ok,
            "envelope_margin": self.envelope_margin,
            "ball_margin": self.ball_margin,
            "continuum_gap": self.continuum_gap,
            "inner_center": inner.tolist(),
            "outer_center": outer.tolist(),
            "graph": {"base_point": g.base_point.tolist(), "rho": g.rho, "h": g.h,
                      "spacing": g.spacing, "grid_n": int(g.axis.size)},
        }


def delta0_value(grad_max, r, rho, h):
    return min(r / (grad_max ** 2 + 1.0), rho, h / 2.0)


def delta0_certificate(g, r):
    """Certificate with the explicit radius ``delta0``; refuses graphs failing the envelope."""
    r = check_positive(r, "r")
    margins = envelope_margins(g, r)
    worst = int(np.argmin(margins))
    if margins[worst] < -MARGIN_TOL:
        node = g.local_points()[worst]
        raise CertificateInfeasibleError(
            f"envelope fails at grid node {node.tolist()} (margin {float(margins[worst]):.3e})",
            worst, node)
    _, _, grad = g.nodes()
    grad_max = float(np.sqrt(np.max(np.sum(grad * grad, axis=1))))
    delta0 = delta0_value(grad_max, r, g.rho, g.h)
    balls = ball_margins(g, delta0)
    gap = math.sqrt(g.dim - 1) / 2 * g.spacing * math.sqrt(1 + grad_max ** 2)
    return GraphCertificate(
        graph=g,
        r=r,
        grad_max=grad_max,
        delta0=delta0,
        envelope_ok=True,
        balls_ok=bool(balls.min() >= -MARGIN_TOL),
        envelope_margin=float(margins.min()),
        ball_margin=float(balls.min()),
        continuum_gap=gap,
    )


def cross_check_with_estimator(g, d, cert, radius=None, samples=4000, seed=0, tol=MARGIN_TOL):
    """Confirm on dense boundary samples of ``d`` that both balls support at the base point.

    ``radius`` overrides ``cert.delta0`` (to probe deliberately inflated
    balls).  Returns False if any sample falls strictly inside either ball
    or a centre sits on the wrong side of the boundary.
    """
    delta = cert.delta0 if radius is None else check_positive(radius, "radius")
    if radius is None and not cert.balls_ok:
        raise InvalidInputError("certificate did not pass its own ball check")
    s = sample_boundary(d, samples, seed)
    inner_c, outer_c = cert.centers(delta)
    scale = tol * max(1.0, delta)
    for c in (inner_c, outer_c):
        if np.min(np.linalg.norm(s.points - c, axis=1)) < delta - scale:
            return False
    return inside(d, inner_c) == "inside" and inside(d, outer_c) == "outside"
