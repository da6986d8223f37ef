"""Nondimensionalization of the rise models.

Three scalings (I viscous, II inertial, III gravitational) turn the
dimensional trajectory into t* = t_rate*t, h* = h_rate*h.  The coefficients
a, b, c condense the material parameters; their combination

    omega = sqrt(b^2 / (a c^2))

is the single group separating oscillatory from monotone rise.  The scaled
extended model is integrated with the same RK5(4) machinery as the
dimensional one so the two routes can be cross-checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import FluidPair, Geometry
from .errors import NonWettingAngle, SingularHeight
from .odemodels import RiseState, Trajectory, solve_rk45, DEFAULT_RTOL, DEFAULT_ATOL

SCALING_KINDS = ("I", "II", "III")


@dataclass(frozen=True)
class ScaleSet:
    """Scaling coefficients of a case; omega is redundant and checked."""

    a: float      # rho R / (sigma cos) [s^2/m^3-compatible]
    b: float      # viscous coefficient [s/m^2-compatible]
    c: float      # rho g R / (sigma cos) = 1/h_Jurin [1/m]
    dim: str      # "2d" | "3d"
    omega: float  # dimensionless group [-]

    def __post_init__(self) -> None:
        if not (self.a > 0.0 and self.b > 0.0 and self.c > 0.0):
            raise ValueError("a, b, c must be positive")
        if self.dim not in ("2d", "3d"):
            raise ValueError("dim must be '2d' or '3d'")
        om = math.sqrt(self.b**2 / (self.a * self.c**2))
        if abs(self.omega - om) > 1e-12 * om:
            raise ValueError("omega inconsistent with sqrt(b^2/(a c^2))")


@dataclass(frozen=True)
class ScaleUnits:
    t_rate: float  # [1/s]
    h_rate: float  # [1/m]

    @property
    def v_rate(self) -> float:
        """Velocity factor by the chain rule, v* = (h_rate/t_rate) v."""
        return self.h_rate / self.t_rate


@dataclass(frozen=True)
class SlipGroups:
    """Dimensionless slip-length groups of the extended model."""

    s: float  # L/R [-]
    k: float  # 1/(1+3S) [-]
    q: float  # convective profile factor [-]

    def __post_init__(self) -> None:
        if self.s < 0.0:
            raise ValueError("s must be >= 0")


def coefficients(fluid: FluidPair, geom: Geometry, dim: str = "2d") -> ScaleSet:
    """Scaling coefficients a, b, c for the planar (2d) or tube (3d) case.

    2d: a = rho R/(sigma cos), b = 3 mu/(R sigma cos), c = rho g R/(sigma cos);
    3d puts the factor 2 of the circular cross-section into a and c and uses
    the Hagen-Poiseuille friction 4 mu.
    """
    ct = math.cos(geom.theta_e)
    if ct <= 1e-14:  # see core.dimensionless_numbers
        raise NonWettingAngle("scaling coefficients need cos(theta_e) > 0")
    rho, mu, sig, g, R = fluid.rho_l, fluid.mu_l, fluid.sigma, fluid.g, geom.R
    sc = sig * ct
    if dim == "2d":
        a = rho * R / sc
        b = 3.0 * mu / (R * sc)
        c = rho * g * R / sc
    elif dim == "3d":
        a = rho * R / (2.0 * sc)
        b = 4.0 * mu / (R * sc)
        c = rho * g * R / (2.0 * sc)
    else:
        raise ValueError("dim must be '2d' or '3d'")
    omega = math.sqrt(b**2 / (a * c**2))
    return ScaleSet(a=a, b=b, c=c, dim=dim, omega=omega)


def units(kind: str, s: ScaleSet) -> ScaleUnits:
    """Time and height rates of scaling I, II or III."""
    if kind == "I":
        return ScaleUnits(t_rate=s.c**2 / s.b, h_rate=s.c)
    if kind == "II":
        return ScaleUnits(t_rate=math.sqrt(s.c**2 / s.a), h_rate=s.c)
    if kind == "III":
        return ScaleUnits(t_rate=s.b / s.a, h_rate=s.b / math.sqrt(2.0 * s.a))
    raise ValueError(f"unknown scaling kind {kind!r}")


def slip_groups(L: float, R: float) -> SlipGroups:
    """Dimensionless groups S = L/R, K = 1/(1+3S) and the convective Q."""
    if L < 0.0 or R <= 0.0:
        raise ValueError("need L >= 0 and R > 0")
    s = L / R
    k = 1.0 / (1.0 + 3.0 * s)
    q = 3.0 * (15.0 * s * s + 10.0 * s + 2.0) / (5.0 * (1.0 + 3.0 * s) ** 2)
    return SlipGroups(s=s, k=k, q=q)


def nondimensionalize(traj: Trajectory, kind: str, s: ScaleSet) -> Trajectory:
    """Rescale a dimensional trajectory into scaling ``kind``."""
    u = units(kind, s)
    meta = dict(traj.metadata)
    meta.update(scaling=kind, t_rate=u.t_rate, h_rate=u.h_rate)
    if "h_inf" in meta:
        meta["h_inf"] = meta["h_inf"] * u.h_rate
    return Trajectory(t=traj.t * u.t_rate, h=traj.h * u.h_rate,
                      v=traj.v * u.v_rate, metadata=meta)


def redimensionalize(traj: Trajectory, kind: str, s: ScaleSet) -> Trajectory:
    """Inverse of :func:`nondimensionalize`."""
    u = units(kind, s)
    meta = dict(traj.metadata)
    meta.pop("scaling", None)
    meta.pop("t_rate", None)
    meta.pop("h_rate", None)
    if "h_inf" in meta:
        meta["h_inf"] = meta["h_inf"] / u.h_rate
    return Trajectory(t=traj.t / u.t_rate, h=traj.h / u.h_rate,
                      v=traj.v / u.v_rate, metadata=meta)


def _rhs_scaled_terms(kind: str, omega: float, groups: SlipGroups, h_hat_star: float):
    k, q = groups.k, groups.q
    eps = 1e-14  # scaled heights are O(1)

    if kind == "I":
        om2 = omega * omega

        def f(h: float, v: float) -> tuple[float, float]:
            H = h + h_hat_star
            if H <= eps:
                raise SingularHeight(f"scaled column length {H!r} <= {eps!r}")
            return v, (om2 * (1.0 - H - k * v * H) + (q - 1.0) * v * v) / H

        return f
    if kind == "II":

        def f(h: float, v: float) -> tuple[float, float]:
            H = h + h_hat_star
            if H <= eps:
                raise SingularHeight(f"scaled column length {H!r} <= {eps!r}")
            return v, (1.0 - H - k * omega * v * H + (q - 1.0) * v * v) / H

        return f
    if kind == "III":
        rt2_over_om = math.sqrt(2.0) / omega

        def f(h: float, v: float) -> tuple[float, float]:
            H = h + h_hat_star
            if H <= eps:
                raise SingularHeight(f"scaled column length {H!r} <= {eps!r}")
            return v, (0.5 * (1.0 - rt2_over_om * H) - k * v * H
                       + (q - 1.0) * v * v) / H

        return f
    raise ValueError(f"unknown scaling kind {kind!r}")


def rhs_scaled(kind: str, omega: float, groups: SlipGroups, h_hat_star: float,
               state: RiseState) -> tuple[float, float]:
    """Scaled extended-model derivatives (dh*/dt*, dv*/dt*).

    Each scaling's momentum balance, written for the product h'(h+h_hat), is
    expanded and solved for dv*/dt*.  Equilibria: h*+h_hat* = 1 for I and II,
    omega/sqrt(2) for III.
    """
    return _rhs_scaled_terms(kind, omega, groups, h_hat_star)(state.h, state.v)


def integrate_scaled(kind: str, omega: float, groups: SlipGroups, h_hat_star: float,
                     init: RiseState, t_end: float, *, rtol: float = DEFAULT_RTOL,
                     atol: float = DEFAULT_ATOL, dt_out: float | None = None,
                     label: str = "") -> Trajectory:
    """Integrate the scaled extended model directly in scaled variables."""
    if not t_end > 0.0:
        raise ValueError("t_end must be positive")
    if not omega > 0.0:
        raise ValueError("omega must be positive")
    if dt_out is None:
        dt_out = t_end / 2000.0
    f = _rhs_scaled_terms(kind, omega, groups, h_hat_star)
    meta = {"label": label, "model": f"scaled-{kind}", "rtol": rtol, "atol": atol,
            "dt_out": dt_out, "scaling": kind, "omega": omega}
    return solve_rk45(f, init.h, init.v, t_end, rtol, atol, dt_out, meta)


def auto_t_end(fluid: FluidPair, geom: Geometry, *, factor: float = 10.0) -> float:
    """Default integration horizon: ``factor`` times the longest time unit.

    Every scaled representation of the run then reaches scaled time
    >= ``factor``, so end-of-scaling markers fall inside the data.
    """
    s = coefficients(fluid, geom, "2d")
    slowest = min(units(kind, s).t_rate for kind in SCALING_KINDS)
    return factor / slowest
