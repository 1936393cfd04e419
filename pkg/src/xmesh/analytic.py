"""Closed-form two-phase solutions used as oracles.

Both the planar (semi-infinite, fixed wall temperature) and the
axisymmetric (line sink) Neumann solutions put the front at
``2 * phi * sqrt(alpha_s * t)``.  The front coefficient solves a
transcendental equation which is written here multiplied through by the
latent heat, so ``l = 0`` is an ordinary case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .physics import MaterialProperties


class BracketError(ValueError):
    """No sign change of the root function on the search bracket."""


def erf(x):
    out = special.erf(x)
    return float(out) if np.ndim(out) == 0 else out


def expint_Ei(x):
    """Exponential integral Ei(x); logarithmic singularity at 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x == 0):
        raise ValueError("Ei(0) is undefined (logarithmic singularity)")
    out = special.expi(x)
    return float(out) if out.ndim == 0 else out


def planar_phi_function(phi, props, T_s, T_l):
    """Front equation of the planar problem, multiplied by ``l``."""
    a = props.alpha_s / props.alpha_l
    sa = math.sqrt(a)
    return (props.c_s * (props.T0 - T_s) * math.exp(-phi * phi) / math.erf(phi)
            - props.c_l * (T_l - props.T0) / sa * math.exp(-a * phi * phi) / math.erfc(phi * sa)
            - props.l * phi * math.sqrt(math.pi))


def axisym_phi_function(phi, props, Q, T_l):
    """Front equation of the line-sink problem, multiplied by ``l``."""
    a = props.alpha_s / props.alpha_l
    return (Q / (4.0 * math.pi * props.rho * props.alpha_s) * math.exp(-phi * phi)
            + props.c_l * (T_l - props.T0) / a * math.exp(-a * phi * phi) / special.expi(-a * phi * phi)
            - props.l * phi * phi)


def _find_root(f, lo=1e-8, hi=5.0, steps=200):
    flo, fhi = f(lo), f(hi)
    if not (np.isfinite(flo) and np.isfinite(fhi)) or flo * fhi > 0:
        raise BracketError(f"no sign change on ({lo}, {hi}]")
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return float(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= 4e-16 * hi:
            break
    x = 0.5 * (lo + hi)
    # Newton polish with a central-difference slope
    for _ in range(3):
        h = 1e-7 * x
        slope = (f(x + h) - f(x - h)) / (2 * h)
        if slope == 0 or not np.isfinite(slope):
            break
        step = f(x) / slope
        if abs(step) > (hi - lo) + 1e-12 * x:
            break
        x -= step
    return float(x)


def solve_phi_planar(props, T_s, T_l):
    if not T_s < props.T0 < T_l:
        raise ValueError("need T_s < T0 < T_l")
    return _find_root(lambda p: planar_phi_function(p, props, T_s, T_l))


def solve_phi_axisym(props, Q, T_l):
    if not Q > 0:
        raise ValueError("sink intensity Q must be positive")
    if not T_l > props.T0:
        raise ValueError("need T_l > T0")
    return _find_root(lambda p: axisym_phi_function(p, props, Q, T_l))


def relative_phi_residual(kind, phi, props, *args):
    """Root-function value scaled by its largest term, for residual checks."""
    if kind == "planar":
        T_s, T_l = args
        scale = props.c_s * (props.T0 - T_s) * math.exp(-phi * phi) / math.erf(phi)
        return abs(planar_phi_function(phi, props, T_s, T_l)) / scale
    Q, T_l = args
    scale = Q / (4.0 * math.pi * props.rho * props.alpha_s) * math.exp(-phi * phi)
    return abs(axisym_phi_function(phi, props, Q, T_l)) / scale


@dataclass(frozen=True)
class PlanarSolution:
    """Planar solidification from a wall held at ``T_s`` into liquid at ``T_l``."""

    props: MaterialProperties
    T_s: float
    T_l: float
    phi: float = None

    def __post_init__(self):
        if self.phi is None:
            object.__setattr__(self, "phi", solve_phi_planar(self.props, self.T_s, self.T_l))

    def front(self, t):
        return 2.0 * self.phi * np.sqrt(self.props.alpha_s * np.asarray(t, dtype=float))

    def temperature(self, x, t):
        return exact_planar(x, t, self)


@dataclass(frozen=True)
class AxisymSolution:
    """Liquid at ``T_l`` frozen by a line sink of intensity ``Q`` at r = 0."""

    props: MaterialProperties
    Q: float
    T_l: float
    phi: float = None

    def __post_init__(self):
        if self.phi is None:
            object.__setattr__(self, "phi", solve_phi_axisym(self.props, self.Q, self.T_l))

    def front(self, t):
        return 2.0 * self.phi * np.sqrt(self.props.alpha_s * np.asarray(t, dtype=float))

    def temperature(self, r, t):
        return exact_axisym(r, t, self)


def exact_planar(x, t, sol):
    if not np.all(np.asarray(t) > 0):
        raise ValueError("exact_planar needs t > 0")
    p = sol.props
    x = np.asarray(x, dtype=float)
    a = p.alpha_s / p.alpha_l
    solid = sol.T_s + (p.T0 - sol.T_s) / math.erf(sol.phi) * special.erf(x / (2.0 * np.sqrt(p.alpha_s * t)))
    liquid = sol.T_l - (sol.T_l - p.T0) / math.erfc(sol.phi * math.sqrt(a)) * special.erfc(
        x / (2.0 * np.sqrt(p.alpha_l * t)))
    out = np.where(x <= sol.front(t), solid, liquid)
    return float(out) if out.ndim == 0 else out


def exact_axisym(r, t, sol):
    if not np.all(np.asarray(t) > 0):
        raise ValueError("exact_axisym needs t > 0")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("exact_axisym is singular at r = 0")
    p = sol.props
    a = p.alpha_s / p.alpha_l
    solid = p.T0 + sol.Q / (4.0 * math.pi * p.k_s) * (
        special.expi(-r * r / (4.0 * p.alpha_s * t)) - special.expi(-sol.phi ** 2))
    liquid = sol.T_l - (sol.T_l - p.T0) / special.expi(-a * sol.phi ** 2) * special.expi(
        -r * r / (4.0 * p.alpha_l * t))
    out = np.where(r <= sol.front(t), solid, liquid)
    return float(out) if out.ndim == 0 else out


def front_error(times, measured, exact):
    """Pointwise relative front error xi(t) and its time-integrated ratio.

    ``exact`` is a callable of time or an array matching ``times``.  The
    integrals use the trapezoid rule on the sample times.
    """
    times = np.asarray(times, dtype=float)
    measured = np.asarray(measured, dtype=float)
    ref = np.asarray(exact(times) if callable(exact) else exact, dtype=float)
    if times.size == 0:
        raise ValueError("empty series")
    if np.any(ref <= 0):
        raise ValueError("exact front position must be positive at every sample")
    gap = np.abs(measured - ref)
    xi = gap / ref
    if times.size == 1:
        return xi, float(xi[0])
    return xi, float(integrate.trapezoid(gap, times) / integrate.trapezoid(ref, times))


def numerical_front_position(front, coords, radial=False):
    """Mean x (or mean radius) of the front nodes; None when there is no front."""
    nodes = front.as_array() if hasattr(front, "as_array") else np.asarray(sorted(front), dtype=np.int64)
    if len(nodes) == 0:
        return None
    pts = np.asarray(coords)[nodes]
    if radial:
        return float(np.mean(np.hypot(pts[:, 0], pts[:, 1])))
    return float(np.mean(pts[:, 0]))
