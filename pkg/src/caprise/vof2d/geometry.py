"""Grid layout, simulation state, and exact interface initialisation.

Half-gap configuration: x in [0, R] with the symmetry plane at x = 0 and
the wall at x = R, y in [0, h_domain].  Square cells.  A full-gap debug
configuration doubles the width and replaces the symmetry plane with a
second wall.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import Geometry
from ..errors import ArcExceedsDomain, MultiValuedColumn

# fractions closer than this to 0 or 1 count as pure cells
_ALPHA_EPS = 1e-9

# below this cos(theta) the meniscus arc is treated as flat
_FLAT_COS = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform staggered MAC grid with square cells."""

    nx: int
    ny: int
    dx: float
    dy: float

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("grid needs at least one cell per direction")
        if self.dx <= 0.0 or self.dy <= 0.0:
            raise ValueError("cell sizes must be positive")
        if not math.isclose(self.dx, self.dy, rel_tol=1e-12):
            raise ValueError("cells must be square")

    @classmethod
    def half_gap(cls, nx: int, R: float) -> "Grid":
        """nx cells across the half gap [0, R], domain height 8 R."""
        if nx < 4:
            raise ValueError("need at least 4 cells across the half gap")
        dx = R / nx
        return cls(nx=nx, ny=8 * nx, dx=dx, dy=dx)

    @classmethod
    def full_gap(cls, nx_half: int, R: float) -> "Grid":
        """Debug variant spanning [0, 2R] at the same cell size."""
        if nx_half < 4:
            raise ValueError("need at least 4 cells across each half gap")
        dx = R / nx_half
        return cls(nx=2 * nx_half, ny=8 * nx_half, dx=dx, dy=dx)

    @property
    def x_max(self) -> float:
        return self.nx * self.dx

    @property
    def y_max(self) -> float:
        return self.ny * self.dy


@dataclass
class SimState:
    """Mutable fields on the staggered grid.

    alpha and p live at cell centres (nx, ny); u at vertical faces
    (nx+1, ny); v at horizontal faces (nx, ny+1).
    """

    grid: Grid
    alpha: np.ndarray
    u: np.ndarray
    v: np.ndarray
    p: np.ndarray
    t: float = 0.0
    step_count: int = 0

    @classmethod
    def quiescent(cls, grid: Grid, alpha: np.ndarray) -> "SimState":
        if alpha.shape != (grid.nx, grid.ny):
            raise ValueError("alpha shape does not match grid")
        return cls(
            grid=grid,
            alpha=np.array(alpha, dtype=float),
            u=np.zeros((grid.nx + 1, grid.ny)),
            v=np.zeros((grid.nx, grid.ny + 1)),
            p=np.zeros((grid.nx, grid.ny)),
        )

    def liquid_area(self) -> float:
        return float(self.alpha.sum()) * self.grid.dx * self.grid.dy


def _arc_antiderivative(x: float, r: float, yc: float) -> float:
    # integral of yc - sqrt(r^2 - x^2)
    x = min(max(x, -r), r)
    return yc * x - 0.5 * (x * math.sqrt(max(r * r - x * x, 0.0))
                           + r * r * math.asin(x / r))


def arc_column_fractions(geom: Geometry, grid_half: Grid) -> np.ndarray:
    """Exact cell fractions for the initial circular-arc interface.

    The interface is a circular arc of radius R/cos(theta) meeting the
    symmetry plane at height h0 (apex) and the wall at the equilibrium
    contact angle.  Liquid fills everything below it.  Fractions are
    exact integrals of the arc over each cell, computed per half-gap
    column (column 0 at the symmetry plane).
    """
    nx, ny = grid_half.nx, grid_half.ny
    dx, dy = grid_half.dx, grid_half.dy
    R, theta, h0 = geom.R, geom.theta_e, geom.h0
    alpha = np.zeros((nx, ny))

    cos_t = math.cos(theta)
    if cos_t < _FLAT_COS:
        # 90 degree contact angle: flat interface at y = h0
        for j in range(ny):
            alpha[:, j] = min(max((h0 - j * dy) / dy, 0.0), 1.0)
        return alpha

    r = R / cos_t
    yc = h0 + r
    contact_h = h0 + R * (1.0 - math.sin(theta)) / cos_t
    if contact_h >= geom.h_domain:
        raise ArcExceedsDomain(
            f"contact line at {contact_h} exceeds domain height "
            f"{geom.h_domain}")

    def y_if(x: float) -> float:
        return yc - math.sqrt(max(r * r - x * x, 0.0))

    def x_at(y: float) -> float:
        # inverse of y_if on the rising branch
        dyc = yc - y
        return math.sqrt(max(r * r - dyc * dyc, 0.0))

    cell = dx * dy
    for i in range(nx):
        xa, xb = i * dx, (i + 1) * dx
        ya, yb = y_if(xa), y_if(xb)
        for j in range(ny):
            y_lo, y_hi = j * dy, (j + 1) * dy
            if yb <= y_lo:
                alpha[i, j] = 0.0
                continue
            if ya >= y_hi:
                alpha[i, j] = 1.0
                continue
            # partial cell: integrate clamp(y_if - y_lo, 0, dy) over x
            x_lo = x_at(y_lo) if ya < y_lo else xa
            x_hi = x_at(y_hi) if yb > y_hi else xb
            x_lo = min(max(x_lo, xa), xb)
            x_hi = min(max(x_hi, xa), xb)
            area = (_arc_antiderivative(x_hi, r, yc)
                    - _arc_antiderivative(x_lo, r, yc)
                    - y_lo * (x_hi - x_lo))
            area += (xb - x_hi) * dy
            alpha[i, j] = min(max(area / cell, 0.0), 1.0)
    return alpha


def arc_total_area(geom: Geometry) -> float:
    """Analytic liquid area below the initial arc over the half gap."""
    cos_t = math.cos(geom.theta_e)
    if cos_t < _FLAT_COS:
        return geom.R * geom.h0
    r = geom.R / cos_t
    yc = geom.h0 + r
    return _arc_antiderivative(geom.R, r, yc) - _arc_antiderivative(0.0, r, yc)


def init_case(geom: Geometry, nx: int, *, full_gap: bool = False) -> SimState:
    """Quiescent state with the exact arc fractions on a fresh grid."""
    if full_gap:
        grid = Grid.full_gap(nx, geom.R)
        half = Grid.half_gap(nx, geom.R)
        a_half = arc_column_fractions(geom, half)
        alpha = np.concatenate([a_half[::-1, :], a_half], axis=0)
    else:
        grid = Grid.half_gap(nx, geom.R)
        alpha = arc_column_fractions(geom, grid)
    return SimState.quiescent(grid, alpha)


def apex_height(state: SimState, *, full_gap: bool = False) -> float:
    """Integrated liquid height of the apex column(s).

    Sums alpha * dy down the symmetry-plane column (or the mean of the
    two centre columns in the full-gap layout).  The column must be
    single valued: full cells below a contiguous band of partial cells
    below empty cells.
    """
    grid = state.grid
    if full_gap:
        mid = grid.nx // 2
        cols = [state.alpha[mid - 1, :], state.alpha[mid, :]]
    else:
        cols = [state.alpha[0, :]]
    heights = []
    for col in cols:
        _check_single_valued(col)
        heights.append(float(col.sum()) * grid.dy)
    return sum(heights) / len(heights)


def _check_single_valued(col: np.ndarray) -> None:
    partial = np.where((col > _ALPHA_EPS) & (col < 1.0 - _ALPHA_EPS))[0]
    if partial.size:
        lo, hi = partial[0], partial[-1]
        if hi - lo + 1 != partial.size:
            raise MultiValuedColumn("partial cells are not contiguous")
        if np.any(col[:lo] < 1.0 - _ALPHA_EPS):
            raise MultiValuedColumn("gas below the interface band")
        if np.any(col[hi + 1:] > _ALPHA_EPS):
            raise MultiValuedColumn("liquid above the interface band")
        return
    # pure column: must be full up to some row then empty
    full = col > 0.5
    if full.any() and not full.all():
        top = int(np.max(np.where(full)[0]))
        if not full[:top + 1].all():
            raise MultiValuedColumn("detached liquid in column")
