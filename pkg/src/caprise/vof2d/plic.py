"""Piecewise-linear interface reconstruction on a single rectangular cell.

The liquid region inside a cell is the half-plane {n1*x + n2*y <= d} in
cell-local coordinates, x in [0, dx], y in [0, dy].  The normal (n1, n2)
is unit length and points out of the liquid.  Everything here is closed
form: the wetted area of a half-plane clipped to a rectangle is piecewise
quadratic in d, so both the forward map and its inverse have explicit
branches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_EPS_NORMAL = 1e-14


def youngs_normal(alpha3x3, dx: float, dy: float) -> tuple[float, float]:
    """Unit interface normal from a 3x3 fraction stencil (1-2-1 weights).

    ``alpha3x3[i][j]`` is the fraction of the cell at x-offset i-1 and
    y-offset j-1 from the centre.  Returns the outward (gas-pointing)
    normal, i.e. minus the fraction gradient, normalised.
    """
    a = alpha3x3
    gx = (a[2][0] + 2.0 * a[2][1] + a[2][2]
          - a[0][0] - 2.0 * a[0][1] - a[0][2]) / (8.0 * dx)
    gy = (a[0][2] + 2.0 * a[1][2] + a[2][2]
          - a[0][0] - 2.0 * a[1][0] - a[2][0]) / (8.0 * dy)
    norm = math.hypot(gx, gy)
    if norm < _EPS_NORMAL:
        # degenerate stencil (uniform fractions): fall back to liquid-below
        return (0.0, 1.0)
    return (-gx / norm, -gy / norm)


def _area_pos(n1: float, n2: float, d: float, dx: float, dy: float) -> float:
    # both normal components >= 0 here
    if n1 <= _EPS_NORMAL and n2 <= _EPS_NORMAL:
        return dx * dy if d >= 0.0 else 0.0
    if n1 <= _EPS_NORMAL:
        h = min(max(d / n2, 0.0), dy)
        return dx * h
    if n2 <= _EPS_NORMAL:
        w = min(max(d / n1, 0.0), dx)
        return w * dy
    dmax = n1 * dx + n2 * dy
    dc = min(max(d, 0.0), dmax)
    t1 = max(dc - n1 * dx, 0.0)
    t2 = max(dc - n2 * dy, 0.0)
    return (dc * dc - t1 * t1 - t2 * t2) / (2.0 * n1 * n2)


def liquid_area(normal, d: float, dx: float, dy: float) -> float:
    """Area of {n . x <= d} inside the [0,dx]x[0,dy] cell."""
    n1, n2 = normal
    # reflect to the positive-normal octant; d shifts by the flipped span
    if n1 < 0.0:
        d = d - n1 * dx
        n1 = -n1
    if n2 < 0.0:
        d = d - n2 * dy
        n2 = -n2
    return _area_pos(n1, n2, d, dx, dy)


def _offset_pos(n1: float, n2: float, area: float,
                dx: float, dy: float) -> float:
    if n1 <= _EPS_NORMAL:
        return n2 * (area / dx)
    if n2 <= _EPS_NORMAL:
        return n1 * (area / dy)
    cell = dx * dy
    d_lo = min(n1 * dx, n2 * dy)
    a_corner = d_lo * d_lo / (2.0 * n1 * n2)
    if area <= a_corner:
        return math.sqrt(2.0 * n1 * n2 * area)
    if area >= cell - a_corner:
        return n1 * dx + n2 * dy - math.sqrt(2.0 * n1 * n2 * (cell - area))
    # mid branch: the cut is a trapezoid, area linear in d
    if n1 * dx <= n2 * dy:
        return 0.5 * (2.0 * n2 * area / dx + n1 * dx)
    return 0.5 * (2.0 * n1 * area / dy + n2 * dy)


def offset_for_area(normal, area: float, dx: float, dy: float) -> float:
    """Inverse of :func:`liquid_area` in d for a fixed normal."""
    cell = dx * dy
    if not 0.0 <= area <= cell * (1.0 + 1e-12):
        raise ValueError(f"target area {area} outside cell [0, {cell}]")
    area = min(area, cell)
    n1, n2 = normal
    d = _offset_pos(abs(n1), abs(n2), area, dx, dy)
    # undo the reflections applied by liquid_area
    if n1 < 0.0:
        d = d + n1 * dx
    if n2 < 0.0:
        d = d + n2 * dy
    return d


@dataclass(frozen=True)
class PlicPlane:
    """Reconstructed interface in one cell: liquid is {n . x <= d}."""

    normal: tuple[float, float]
    offset: float
    dx: float
    dy: float

    def area(self) -> float:
        return liquid_area(self.normal, self.offset, self.dx, self.dy)

    def slab_area(self, x0: float, x1: float, y0: float, y1: float) -> float:
        """Liquid area inside the sub-rectangle [x0,x1]x[y0,y1]."""
        if x1 <= x0 or y1 <= y0:
            return 0.0
        n1, n2 = self.normal
        d = self.offset - n1 * x0 - n2 * y0
        return liquid_area(self.normal, d, x1 - x0, y1 - y0)


def plic_reconstruct(alpha3x3, dx: float, dy: float) -> PlicPlane:
    """Plane matching the centre fraction with a Youngs stencil normal."""
    ac = alpha3x3[1][1]
    if not 0.0 < ac < 1.0:
        raise ValueError(f"centre fraction {ac} is not a mixed cell")
    n = youngs_normal(alpha3x3, dx, dy)
    d = offset_for_area(n, ac * dx * dy, dx, dy)
    return PlicPlane(n, d, dx, dy)
