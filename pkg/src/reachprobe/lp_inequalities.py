"""Signed margins for the norm inequalities behind the l^p four-ball estimate.

Every checker returns ``larger side - smaller side`` so campaigns can track
the worst slack, not just a pass flag.  With ``relative=True`` the margin is
divided by the larger side (floored at the smallest normal float), which is
the scale used for the ``-1e-10`` acceptance threshold.

All checkers broadcast over leading axes: pass ``(n, dim)`` arrays to get
``n`` margins back.

Hoelder constant
----------------
Plugging ``u = r p(x0)``, ``v = r p(y0)`` and ``|x| = |x0 - y0| / 2`` into
the four-ball estimate gives

    |p(x0) - p(y0)| <= C_p (|x0 - y0| / r)^e

with ``e = 2/p`` and ``C_p = (2^(p-3) p (p-1))^(1/p)`` for ``p >= 2``, and
``e = p/2`` with ``C_p = (2^(3-p) / (p (p-1)))^(1/2)`` for ``p <= 2``.  Both
give ``C_2 = 1, e = 1``, i.e. the Euclidean ``|dp| <= |x0 - y0| / r``.  The
constant is valid, not claimed optimal.
"""

from dataclasses import dataclass
import math

import numpy as np

from ._validation import InvalidInputError, check_exponent
from .geometry import lp as lp_ctx, norm

RELATIVE_TOL = 1e-10
_TINY = np.finfo(float).tiny


def _finish(big, small, relative):
    margin = big - small
    if relative:
        margin = margin / np.maximum(np.maximum(np.abs(big), np.abs(small)), _TINY)
    return margin if np.ndim(margin) else float(margin)


def _n(v, p):
    return norm(np.asarray(v, dtype=float), lp_ctx(p))


def clarkson_first(u, v, p, relative=False):
    """``1/2|u|^p + 1/2|v|^p - |(u+v)/2|^p - |(u-v)/2|^p`` for ``p >= 2``."""
    p = float(p)
    if not (math.isfinite(p) and p >= 2):
        raise InvalidInputError(f"first Clarkson inequality needs p >= 2, got {p!r}")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    big = 0.5 * _n(u, p) ** p + 0.5 * _n(v, p) ** p
    small = _n((u + v) / 2, p) ** p + _n((u - v) / 2, p) ** p
    return _finish(big, small, relative)


def clarkson_second(a, w, p, relative=False):
    """``2(|a|^p + |w|^p)^(q/p) - |a+w|^q - |a-w|^q`` for ``1 < p <= 2``, ``q = p/(p-1)``."""
    p = check_exponent(p, hi=2.0, hi_closed=True)
    q = p / (p - 1)
    a = np.asarray(a, dtype=float)
    w = np.asarray(w, dtype=float)
    big = 2.0 * (_n(a, p) ** p + _n(w, p) ** p) ** (q / p)
    small = _n(a + w, p) ** q + _n(a - w, p) ** q
    return _finish(big, small, relative)


def uniform_smoothness(a, w, p, relative=False):
    """2-uniform smoothness margin.

    p >= 2:  ``2|a|^2 + 2(p-1)|w|^2 - |a+w|^2 - |a-w|^2``
    p <= 2:  ``1/2|a|^2 + 1/2|w|^2 - (p-1)|(a-w)/2|^2 - |(a+w)/2|^2``
    """
    p = check_exponent(p)
    a = np.asarray(a, dtype=float)
    w = np.asarray(w, dtype=float)
    if p >= 2:
        big = 2 * _n(a, p) ** 2 + 2 * (p - 1) * _n(w, p) ** 2
        small = _n(a + w, p) ** 2 + _n(a - w, p) ** 2
    else:
        big = 0.5 * _n(a, p) ** 2 + 0.5 * _n(w, p) ** 2
        small = (p - 1) * _n((a - w) / 2, p) ** 2 + _n((a + w) / 2, p) ** 2
    return _finish(big, small, relative)


def concavity_bound(a, b, s, relative=False):
    """Tangent-line bound for ``t -> t^s``: ``a^s - s a^(s-1) b - (a-b)^s``.

    Requires ``a >= b >= 0`` and ``0 < s <= 1``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s = float(s)
    if not 0 < s <= 1:
        raise InvalidInputError(f"exponent s must lie in (0, 1], got {s!r}")
    if np.any(b < 0) or np.any(b > a) or not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)):
        raise InvalidInputError("concavity bound needs a >= b >= 0")
    # b == 0 is an identity; also avoids 0 * inf at a == 0.
    safe_a = np.where(a > 0, a, 1.0)
    tangent = np.where(b > 0, s * safe_a ** (s - 1) * b, 0.0)
    big = a ** s
    small = tangent + (a - b) ** s
    return _finish(big, small, relative)


@dataclass(frozen=True)
class HolderBound:
    p: float
    exponent: float
    constant: float

    def rhs(self, distance, r):
        """Right-hand side ``C_p (distance / r)^exponent``."""
        return self.constant * (np.asarray(distance, dtype=float) / r) ** self.exponent

    def to_dict(self):
        return {"p": self.p, "exponent": self.exponent, "constant": self.constant}


def holder_bound(p):
    p = check_exponent(p)
    if p >= 2:
        return HolderBound(p, 2.0 / p, (2.0 ** (p - 3) * p * (p - 1)) ** (1.0 / p))
    return HolderBound(p, p / 2.0, math.sqrt(2.0 ** (3 - p) / (p * (p - 1))))


def chain_margins(x, u, v, r, p):
    """Step margins of the l^p four-ball argument for one or many configs.

    Returns a dict of arrays, one entry per inequality in the chain, each
    expected non-negative whenever the four-ball hypotheses hold.  The
    Clarkson step bounds ``|(u+v)/2|^p`` by ``r^p - |(u-v)/2|^p``.
    """
    p = check_exponent(p)
    x, u, v = (np.asarray(t, dtype=float) for t in (x, u, v))
    m = (u + v) / 2
    d = (u - v) / 2
    nx, nm, nd = _n(x, p), _n(m, p), _n(d, p)
    if p >= 2:
        s_plus, s_minus = _n(x + m, p), _n(x - m, p)
        lhs0 = 2 * r ** 2
        lhs1 = s_plus ** 2 + s_minus ** 2
        rhs1 = 2 * (p - 1) * nx ** 2 + 2 * nm ** 2
        inner = np.maximum(r ** p - nd ** p, 0.0)
        rhs2 = 2 * (p - 1) * nx ** 2 + 2 * inner ** (2 / p)
        rhs3 = 2 * (p - 1) * nx ** 2 + 2 * (r ** 2 - (2 / p) * r ** (2 - p) * nd ** p)
        return {
            "hypotheses": lhs1 - lhs0,
            "uniform_smoothness": rhs1 - lhs1,
            "clarkson_first": rhs2 - rhs1,
            "concavity": rhs3 - rhs2,
        }
    q = p / (p - 1)
    s_plus, s_minus = _n(x + m, p), _n(x - m, p)
    lhs0 = 2 * r ** q
    lhs1 = s_plus ** q + s_minus ** q
    rhs1 = 2 * (nx ** p + nm ** p) ** (q / p)
    inner = np.maximum(r ** 2 - (p - 1) * nd ** 2, 0.0)
    rhs2 = 2 * (nx ** p + inner ** (p / 2)) ** (q / p)
    rhs3 = 2 * np.maximum(nx ** p + r ** p - (p - 1) * p / 2 * r ** (p - 2) * nd ** 2, 0.0) ** (q / p)
    return {
        "hypotheses": lhs1 - lhs0,
        "clarkson_second": rhs1 - lhs1,
        "uniform_smoothness": rhs2 - rhs1,
        "concavity": rhs3 - rhs2,
    }
