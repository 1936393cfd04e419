"""Material laws of the two-phase Stefan model.

Temperatures at or below the transition temperature ``T0`` are solid.  The
sharp laws are used in residuals; the ramp-regularized ones only feed the
quasi-Newton tangent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class MaterialProperties:
    rho: float = 1000.0
    c_s: float = 2090.0
    c_l: float = 4185.0
    k_s: float = 2.1
    k_l: float = 0.6
    l: float = 3.3e5
    T0: float = 273.15
    l_bar: float = field(init=False)

    def __post_init__(self):
        for name in ("rho", "c_s", "c_l", "k_s", "k_l"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.l < 0:
            raise ValueError("latent heat must be non-negative")
        object.__setattr__(self, "l_bar", self.l - (self.c_l - self.c_s) * self.T0)

    @property
    def alpha_s(self):
        return self.k_s / (self.rho * self.c_s)

    @property
    def alpha_l(self):
        return self.k_l / (self.rho * self.c_l)

    def with_latent_heat(self, l):
        return MaterialProperties(self.rho, self.c_s, self.c_l, self.k_s, self.k_l, l, self.T0)


ICE_WATER = MaterialProperties()


@dataclass(frozen=True)
class RegularizationParams:
    delta: float = 8.0

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")


@dataclass(frozen=True)
class DimensionlessGroups:
    kappa: float
    alpha: float
    gamma: float
    t_r: float
    alpha_s: float
    alpha_l: float


def heaviside(T, T0):
    return np.where(np.asarray(T) > T0, 1.0, 0.0)


def internal_energy(T, props):
    """Specific internal energy, discontinuous by ``l`` at T0."""
    T = np.asarray(T, dtype=float)
    out = np.where(T <= props.T0, props.c_s * T, props.c_l * T + props.l_bar)
    return out if out.ndim else float(out)


def conductivity(T, props):
    T = np.asarray(T, dtype=float)
    out = np.where(T <= props.T0, props.k_s, props.k_l)
    return out if out.ndim else float(out)


def step_regularized(T, T0, delta):
    """Linear ramp from 0 at ``T0 - delta/2`` to 1 at ``T0 + delta/2``."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    T = np.asarray(T, dtype=float)
    out = np.clip((T - (T0 - 0.5 * delta)) / delta, 0.0, 1.0)
    return out if out.ndim else float(out)


def regularized_laws(T, props, reg):
    """Return ``(e_reg, k_reg, de_reg/dT, dk_reg/dT)``.

    At the ramp ends the derivative is the one-sided value from inside the
    ramp, so the slope ``1/delta`` applies on the closed band.
    """
    T = np.asarray(T, dtype=float)
    delta = reg.delta
    H = step_regularized(T, props.T0, delta)
    in_band = np.abs(T - props.T0) <= 0.5 * delta
    dH = np.where(in_band, 1.0 / delta, 0.0)
    c = (1.0 - H) * props.c_s + H * props.c_l
    e = c * T + H * props.l_bar
    k = (1.0 - H) * props.k_s + H * props.k_l
    de = c + dH * ((props.c_l - props.c_s) * T + props.l_bar)
    dk = dH * (props.k_l - props.k_s)
    return e, k, de, dk


def dimensionless_groups(props, T_l, L_r=1.0):
    """Conductivity and diffusivity ratios, Stefan number and reference time."""
    if T_l == props.T0 and props.l > 0:
        raise ValueError("Stefan number undefined for T_l == T0 with l > 0")
    gamma = 0.0 if props.l == 0 else props.l / (props.c_l * (T_l - props.T0))
    return DimensionlessGroups(
        kappa=props.k_s / props.k_l,
        alpha=props.alpha_s / props.alpha_l,
        gamma=gamma,
        t_r=L_r * L_r / props.alpha_l,
        alpha_s=props.alpha_s,
        alpha_l=props.alpha_l,
    )

