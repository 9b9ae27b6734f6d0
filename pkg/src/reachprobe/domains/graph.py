"""Local graph representation of the boundary around a point.

In the frame that sends ``x0`` to the origin and the outward normal to
``e_N``, the boundary inside the cylinder ``B_rho(0) x (-h, h)`` is the
graph ``x_N = phi(x')`` and the domain lies below it.
"""

from dataclasses import dataclass
import json

import numpy as np

from .._validation import CylinderTooLargeError, InvalidInputError, as_point, check_count, check_positive
from ..geometry import RigidFrame, frame_to_north
from .sampling import bisect_segments

ON_BOUNDARY_TOL = 1e-9
GRAPH_SCAN_STEPS = 256


@dataclass
class LocalGraph:
    """Sampled graph on the regular grid ``axis x ... x axis`` (N-1 factors).

    ``values`` has one entry per grid node (NaN outside the closed disc of
    radius ``rho``); ``grad`` adds a trailing axis of length N-1.
    """

    base_point: np.ndarray
    frame: RigidFrame
    rho: float
    h: float
    axis: np.ndarray
    values: np.ndarray
    grad: np.ndarray

    @property
    def dim(self):
        return self.values.ndim + 1

    @property
    def spacing(self):
        return float(self.axis[1] - self.axis[0]) if self.axis.size > 1 else 0.0

    def nodes(self):
        """Flattened ``(x', phi(x'), grad phi(x'))`` over nodes inside the disc."""
        mesh = np.meshgrid(*[self.axis] * (self.dim - 1), indexing="ij")
        xp = np.stack([m.ravel() for m in mesh], axis=1)
        phi = self.values.ravel()
        grad = self.grad.reshape(-1, self.dim - 1)
        keep = np.isfinite(phi)
        return xp[keep], phi[keep], grad[keep]

    def local_points(self):
        xp, phi, _ = self.nodes()
        return np.column_stack([xp, phi])

    def world_points(self):
        return self.frame.inverse(self.local_points())

    def graph_normals(self):
        """Outward normals ``(-grad phi, 1) / sqrt(|grad phi|^2 + 1)`` in world coordinates."""
        _, _, grad = self.nodes()
        n = np.column_stack([-grad, np.ones(len(grad))])
        n /= np.linalg.norm(n, axis=1, keepdims=True)
        return self.frame.inverse_vector(n)

    def center_index(self):
        c = (self.axis.size - 1) // 2
        return (c,) * (self.dim - 1)

    def to_dict(self):
        return {
            "rho": self.rho,
            "h": self.h,
            "spacing": self.spacing,
            "grid_n": int(self.axis.size),
            "base_point": self.base_point.tolist(),
            "frame": self.frame.to_dict(),
            "values": [None if not np.isfinite(v) else float(v) for v in self.values.ravel()],
            "grad_values": [None if not np.all(np.isfinite(g)) else g.tolist()
                            for g in self.grad.reshape(-1, self.dim - 1)],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            rho = check_positive(data["rho"], "rho")
            h = check_positive(data["h"], "h")
            base = as_point(data["base_point"], "base_point")
            frame = RigidFrame.from_dict(data["frame"])
            raw = data["values"]
        except KeyError as exc:
            raise InvalidInputError(f"graph file is missing field {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(f"graph file has a malformed field: {exc}") from None
        dim = base.size
        values = np.array([np.nan if v is None else float(v) for v in raw])
        grid_n = data.get("grid_n") or round(values.size ** (1.0 / (dim - 1)))
        if grid_n ** (dim - 1) != values.size:
            raise InvalidInputError("field 'values' is not a square row-major grid")
        spacing = data.get("spacing")
        axis = np.linspace(-rho, rho, grid_n)
        if spacing is not None and grid_n > 1 and abs(float(spacing) - (axis[1] - axis[0])) > 1e-9 * rho:
            raise InvalidInputError("field 'spacing' does not match rho and the grid size")
        shape = (grid_n,) * (dim - 1)
        values = values.reshape(shape)
        if data.get("grad_values") is not None:
            grad = np.array([[np.nan] * (dim - 1) if g is None else g for g in data["grad_values"]], dtype=float)
            grad = grad.reshape(shape + (dim - 1,))
        else:
            grad = _finite_difference_grad(values, axis)
        return cls(base, frame, rho, h, axis, values, grad)

    def dump(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    @classmethod
    def from_function(cls, phi, grad_phi, rho, h, grid_n, dim=2):
        """Graph of a given function in the identity frame (base point at the origin)."""
        axis = _grid_axis(rho, grid_n)
        mesh = np.meshgrid(*[axis] * (dim - 1), indexing="ij")
        xp = np.stack(mesh, axis=-1)
        inside = np.linalg.norm(xp, axis=-1) <= rho * (1 + 1e-12)
        values = np.where(inside, phi(xp), np.nan)
        grad = np.where(inside[..., None], grad_phi(xp), np.nan)
        if np.nanmax(np.abs(values)) >= h:
            raise InvalidInputError("graph leaves the cylinder: |phi| >= h")
        return cls(np.zeros(dim), RigidFrame(np.eye(dim)), float(rho), float(h), axis, values, grad)


def _grid_axis(rho, grid_n):
    rho = check_positive(rho, "rho")
    grid_n = check_count(grid_n, "grid_n", 3)
    if grid_n % 2 == 0:
        raise InvalidInputError("grid_n must be odd so the base point is a grid node")
    axis = np.linspace(-rho, rho, grid_n)
    axis[(grid_n - 1) // 2] = 0.0
    return axis


def _finite_difference_grad(values, axis):
    # Central differences; grid gradients feed only the envelope maxima.
    parts = np.gradient(values, *[axis] * values.ndim, axis=tuple(range(values.ndim)))
    if values.ndim == 1:
        parts = [parts]
    return np.stack(parts, axis=-1)


def extract_local_graph(d, x0, rho, h, grid_n=41, steps=GRAPH_SCAN_STEPS):
    """Sample ``phi`` and ``grad phi`` on a grid over ``B_rho(0)`` around ``x0``.

    Each vertical line of the cylinder must cross the boundary exactly once,
    going from inside (below) to outside (above); otherwise
    :class:`CylinderTooLargeError` asks the caller to shrink ``rho`` or ``h``.
    """
    x0 = as_point(x0, "x0")
    h = check_positive(h, "h")
    axis = _grid_axis(rho, grid_n)
    N = d.dim
    if x0.size != N:
        raise InvalidInputError("x0 dimension does not match the domain")
    f0, g0 = d.value_and_grad(x0)
    if abs(f0) > ON_BOUNDARY_TOL * max(1.0, float(np.linalg.norm(g0))):
        raise InvalidInputError(f"x0 is not on the boundary (F = {float(f0):.3e})")
    frame = frame_to_north(g0 / np.linalg.norm(g0), origin=x0)

    mesh = np.meshgrid(*[axis] * (N - 1), indexing="ij")
    xp_grid = np.stack(mesh, axis=-1)
    inside = np.linalg.norm(xp_grid, axis=-1) <= rho * (1 + 1e-12)
    xp = xp_grid[inside]

    s = np.linspace(-h, h, steps + 1)
    local = np.concatenate([np.repeat(xp[:, None, :], s.size, axis=1),
                            np.broadcast_to(s[None, :, None], (len(xp), s.size, 1))], axis=2)
    vals = d.F(frame.inverse(local))
    pos = vals > 0
    crossings = np.count_nonzero(pos[:, 1:] != pos[:, :-1], axis=1)
    bad = (crossings != 1) | pos[:, 0] | ~pos[:, -1]
    if np.any(bad):
        j = int(np.argmax(bad))
        raise CylinderTooLargeError(
            f"vertical line at x' = {xp[j].tolist()} crosses the boundary {int(crossings[j])} time(s) "
            f"inside the cylinder; shrink rho or h")
    idx = np.argmax(pos[:, 1:] != pos[:, :-1], axis=1)
    rows = np.arange(len(xp))
    a = frame.inverse(local[rows, idx])
    b = frame.inverse(local[rows, idx + 1])
    pts, ok = bisect_segments(d, a, b)
    if not np.all(ok):
        raise CylinderTooLargeError("root refinement failed on a vertical line; shrink rho or h")
    loc = frame.apply(pts)
    phi = loc[:, -1]
    g_local = frame.apply_vector(d.grad(pts))
    grad = -g_local[:, :-1] / g_local[:, -1:]

    values = np.full(inside.shape, np.nan)
    values[inside] = phi
    grad_full = np.full(inside.shape + (N - 1,), np.nan)
    grad_full[inside] = grad
    return LocalGraph(x0, frame, float(rho), h, axis, values, grad_full)
