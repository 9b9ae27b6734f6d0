"""Independent reference computations used by the tests.

Plain Python loops and closed forms only; nothing here imports the package,
so a shared bug cannot hide behind a matching answer.
"""

import math


def lp_norm(v, p):
    m = max(abs(t) for t in v)
    if m == 0:
        return 0.0
    return m * math.fsum((abs(t) / m) ** p for t in v) ** (1.0 / p)


def euclid(v):
    return math.sqrt(math.fsum(t * t for t in v))


def sub(a, b):
    return [s - t for s, t in zip(a, b)]


def add(a, b):
    return [s + t for s, t in zip(a, b)]


def scale(c, a):
    return [c * t for t in a]


def fourball(x, u, v, r, p=None):
    """(hypotheses, bound, actual) for a four-ball configuration."""
    n = euclid if p is None else (lambda w: lp_norm(w, p))
    two_x = scale(2.0, x)
    hyp = n(add(two_x, add(u, v))) >= 2 * r and n(sub(two_x, add(u, v))) >= 2 * r
    if p is None:
        return hyp, 2 * n(x), n(sub(u, v))
    if p >= 2:
        return hyp, 2 ** (p - 1) * p * (p - 1) * r ** (p - 2) * n(x) ** 2, n(sub(u, v)) ** p
    return hyp, 8 / (p * (p - 1)) * r ** (2 - p) * n(x) ** p, n(sub(u, v)) ** 2


def holder(p):
    """(exponent, constant) obtained by solving the four-ball bound for |u - v| / r."""
    # |x| = d/2 and u - v = r * dp; divide out r and take the root.
    if p >= 2:
        return 2 / p, (2 ** (p - 1) * p * (p - 1) / 4) ** (1 / p)
    return p / 2, math.sqrt(8 / (p * (p - 1)) / 2 ** p)


def chord_radius(points, normals, i, side):
    """Min over j of |y - x|^2 / (2 <x - y, +-n>), infinity when no chord constrains."""
    x, n = points[i], normals[i]
    sign = 1.0 if side == "inner" else -1.0
    best = math.inf
    for j, y in enumerate(points):
        if j == i:
            continue
        d = sub(x, y)
        den = 2 * sign * math.fsum(a * b for a, b in zip(d, n))
        if den > 0:
            best = min(best, math.fsum(t * t for t in d) / den)
    return best


def pair_lipschitz(points, normals):
    best = 0.0
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            dx = euclid(sub(points[i], points[j]))
            if dx > 0:
                best = max(best, euclid(sub(normals[i], normals[j])) / dx)
    return best


def ellipse_curvature_radius(a, b, t):
    return (a * a * math.sin(t) ** 2 + b * b * math.cos(t) ** 2) ** 1.5 / (a * b)


def envelope_margin(nodes, r):
    """Brute-force worst envelope margin over (x', phi, grad) node triples."""
    worst = math.inf
    for xp, phi, _ in nodes:
        t = euclid(xp)
        m = max(math.fsum(g * g for g in gr) for yp, _, gr in nodes if euclid(yp) <= t)
        worst = min(worst, (m + 1) / (2 * r) * t * t - abs(phi))
    return worst


def delta0(grad_max, r, rho, h):
    return min(r / (grad_max ** 2 + 1), rho, h / 2)
