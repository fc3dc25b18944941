"""Steady-state Gaussian wake physics and the turbine power model.

All quantities are evaluated pointwise in the wake frame of the shedding
turbine: ``x`` is the downwind distance from the rotor plane, crosswind
offsets are positive toward the left of the flow direction, and vertical
coordinates are absolute heights.  Every function broadcasts over numpy
arrays and is pure, so repeated evaluation is bit-identical.

Angle convention (project-wide): yaw misalignment ``gamma`` is the wrapped
difference between the local flow heading and the rotor orientation, in
degrees.  Positive misalignment deflects the wake centerline toward the
positive crosswind side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SQRT2 = np.sqrt(2.0)
_DEG = np.pi / 180.0


class InvalidThrustError(ValueError):
    """Effective thrust coefficient C_T cos(yaw) exceeds 1."""


@dataclass(frozen=True)
class WakeParams:
    """Coefficients of the Gaussian wake deficit / expansion model.

    ``alpha`` and ``beta`` set the near-wake length, ``k_a``/``k_b`` the
    linear growth of the wake widths with local turbulence intensity,
    ``k_fa``..``k_fd`` the added-turbulence law and ``k_ti`` the lateral
    extent (in wake widths) over which added turbulence applies.
    """

    alpha: float = 2.32
    beta: float = 0.154
    k_a: float = 0.38371
    k_b: float = 0.003678
    k_fa: float = 0.73
    k_fb: float = 0.8325
    k_fc: float = 0.0325
    k_fd: float = -0.32
    k_ti: float = 3.0

    def __post_init__(self) -> None:
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("near-wake coefficients alpha, beta must be > 0")
        if self.k_a < 0 or self.k_b < 0:
            raise ValueError("expansion coefficients k_a, k_b must be >= 0")
        if self.k_ti < 1:
            raise ValueError("added-turbulence spread k_ti must be >= 1")


@dataclass(frozen=True)
class TurbineModel:
    """Actuator-disc turbine: geometry, efficiency and operating point."""

    diameter: float = 178.4
    hub_height: float = 119.0
    eta: float = 1.0
    p_p: float = 2.2
    rho: float = 1.225
    induction: float = 1.0 / 3.0

    def __post_init__(self) -> None:
        if self.diameter <= 0:
            raise ValueError("diameter must be > 0")
        if not 0.0 <= self.induction < 0.5:
            raise ValueError("axial induction must lie in [0, 0.5)")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError("efficiency must lie in (0, 1]")
        if self.p_p <= 0:
            raise ValueError("yaw power exponent p_p must be > 0")

    @property
    def radius(self) -> float:
        return 0.5 * self.diameter

    @property
    def area(self) -> float:
        return np.pi * self.radius**2

    @property
    def thrust_coefficient(self) -> float:
        return thrust_coefficient(self.induction)

    @property
    def power_coefficient(self) -> float:
        a = self.induction
        return 4.0 * a * (1.0 - a) ** 2


@dataclass(frozen=True)
class ShearProfile:
    """Power-law vertical wind shear anchored at a reference height."""

    alpha_s: float = 0.071
    z_ref: float = 119.0
    u_ref: float = 8.0

    def __post_init__(self) -> None:
        if self.alpha_s < 0:
            raise ValueError("shear exponent must be >= 0")
        if self.z_ref <= 0:
            raise ValueError("reference height must be > 0")

    def speed(self, z):
        """Wind speed at height ``z`` (m); ``speed(z_ref) == u_ref`` exactly."""
        z = np.asarray(z, dtype=float)
        if np.any(z <= 0):
            raise ValueError("height must be > 0")
        return self.u_ref * (z / self.z_ref) ** self.alpha_s

    def factor(self, z):
        """Dimensionless shear factor relative to the reference height."""
        return (np.asarray(z, dtype=float) / self.z_ref) ** self.alpha_s


@dataclass(frozen=True)
class YawLimitConfig:
    """Soft misalignment limits of the smooth power-weighting function."""

    gamma_max: float = 33.0
    gamma_min: float = -33.0
    steepness: float = 50.0

    def __post_init__(self) -> None:
        if self.gamma_min >= self.gamma_max:
            raise ValueError("gamma_min must be < gamma_max")
        if self.steepness <= 0:
            raise ValueError("steepness must be > 0")


def thrust_coefficient(a):
    """Actuator-disc thrust coefficient C_T = 4a(1-a)."""
    a = np.asarray(a, dtype=float)
    return 4.0 * a * (1.0 - a)


def _check_thrust(ct_eff) -> None:
    if np.any(np.asarray(ct_eff) > 1.0 + 1e-12):
        raise InvalidThrustError("effective thrust C_T cos(yaw) exceeds 1")


def near_wake_length(params: WakeParams, turbine: TurbineModel, yaw_deg,
                     ambient_ti, induction=None):
    """Length of the near-wake core (m), shrinking with TI and yaw."""
    a = turbine.induction if induction is None else induction
    ct = thrust_coefficient(a)
    yaw = np.asarray(yaw_deg, dtype=float) * _DEG
    ti = np.asarray(ambient_ti, dtype=float)
    if np.any(ti <= 0):
        raise ValueError("ambient turbulence intensity must be > 0")
    _check_thrust(ct * np.cos(yaw))
    root = np.sqrt(np.maximum(1.0 - ct, 0.0))
    denom = _SQRT2 * (params.alpha * ti + params.beta * (1.0 - root))
    return turbine.diameter * np.cos(yaw) * (1.0 + root) / denom


def _wake_widths(params: WakeParams, D: float, yaw, ct, ti, x, x0):
    """Gaussian wake widths (sigma_y, sigma_z) at downwind distance x."""
    root = np.sqrt(np.maximum(1.0 - ct, 0.0))
    ct_eff = ct * np.cos(yaw)
    # initial widths at the near-wake end
    denom = np.maximum(2.0 * (1.0 - np.sqrt(np.maximum(1.0 - ct_eff, 0.0))), 1e-300)
    ur = np.where(ct > 0.0, ct_eff / denom, 1.0)
    sigma_z0 = 0.5 * D * np.sqrt(ur / (1.0 + root))
    sigma_y0 = sigma_z0 * np.cos(yaw)
    kstar = params.k_a * ti + params.k_b
    far_y = kstar * (x - x0) + sigma_y0
    far_z = kstar * (x - x0) + sigma_z0
    # linear blend from the rotor plane to the near-wake end
    sigma_nw = 0.501 * D * np.sqrt(np.maximum(ct, 0.0) / 2.0)
    frac = np.clip(np.where(x0 > 0.0, x / np.where(x0 > 0.0, x0, 1.0), 1.0), 0.0, 1.0)
    near_y = (1.0 - frac) * sigma_nw + frac * sigma_y0
    near_z = (1.0 - frac) * sigma_nw + frac * sigma_z0
    sy = np.where(x >= x0, far_y, near_y)
    sz = np.where(x >= x0, far_z, near_z)
    return sy, sz, sigma_y0, sigma_z0, kstar


def deficit_profile(params: WakeParams, turbine: TurbineModel, yaw_deg,
                    ambient_ti, x, r_y, r_z, induction=None):
    """Velocity-deficit fraction at offsets (r_y, r_z) from the centerline.

    ``x`` is the downwind distance from the rotor, ``r_y`` the crosswind
    offset measured from the (already deflected) wake centerline and
    ``r_z`` the vertical offset from hub height.  Non-positive ``x``
    contributes no deficit.
    """
    a = turbine.induction if induction is None else np.asarray(induction, dtype=float)
    ct = thrust_coefficient(a)
    yaw = np.asarray(yaw_deg, dtype=float) * _DEG
    ti = np.asarray(ambient_ti, dtype=float)
    x = np.asarray(x, dtype=float)
    ct_eff = ct * np.cos(yaw)
    _check_thrust(ct_eff)
    x0 = near_wake_length(params, turbine, yaw_deg, ambient_ti, induction=a)
    sy, sz, _, _, _ = _wake_widths(params, turbine.diameter, yaw, ct, ti, x, x0)
    with np.errstate(invalid="ignore"):
        radical = np.clip(1.0 - ct_eff * turbine.diameter**2 / (8.0 * sy * sz), 0.0, 1.0)
    amp = 1.0 - np.sqrt(radical)
    gauss = np.exp(-np.asarray(r_y, dtype=float) ** 2 / (2.0 * sy**2)
                   - np.asarray(r_z, dtype=float) ** 2 / (2.0 * sz**2))
    frac = amp * gauss
    frac = np.where((x > 0.0) & (ct > 0.0), frac, 0.0)
    return np.minimum(frac, 1.0 - 1e-12)


def deflection_at(params: WakeParams, turbine: TurbineModel, yaw_deg,
                  ambient_ti, x, induction=None):
    """Lateral centerline offset (m) at downwind distance ``x``.

    Antisymmetric in yaw, zero at the rotor plane and monotone
    nondecreasing in ``x`` for positive yaw.
    """
    a = turbine.induction if induction is None else np.asarray(induction, dtype=float)
    ct = thrust_coefficient(a)
    yaw = np.asarray(yaw_deg, dtype=float) * _DEG
    ti = np.asarray(ambient_ti, dtype=float)
    x = np.asarray(x, dtype=float)
    ct_eff = ct * np.cos(yaw)
    _check_thrust(ct_eff)
    x0 = near_wake_length(params, turbine, yaw_deg, ambient_ti, induction=a)
    sy, sz, sy0, sz0, kstar = _wake_widths(params, turbine.diameter, yaw, ct, ti, x, x0)

    theta = 0.3 * yaw / np.cos(yaw) * (1.0 - np.sqrt(np.maximum(1.0 - ct_eff, 0.0)))
    delta0 = np.tan(theta) * x0
    root = np.sqrt(np.maximum(1.0 - ct, 0.0))
    c0 = 1.0 - root
    m0 = c0 * (2.0 - c0)
    e0 = c0**2 - 3.0 * np.exp(1.0 / 12.0) * c0 + 3.0 * np.exp(1.0 / 3.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        sqrt_m0 = np.sqrt(np.maximum(m0, 1e-300))
        ratio = np.sqrt(np.maximum(sy * sz, 1e-300) / np.maximum(sy0 * sz0, 1e-300))
        num = (1.6 + sqrt_m0) * (1.6 * ratio - sqrt_m0)
        den = (1.6 - sqrt_m0) * (1.6 * ratio + sqrt_m0)
        log_term = np.log(np.maximum(num, 1e-300) / np.maximum(den, 1e-300))
        far = delta0 + theta * e0 / 5.2 * np.sqrt(
            np.maximum(sy0 * sz0, 0.0) / np.maximum(kstar**2 * m0, 1e-300)) * log_term
        near = np.where(x0 > 0.0, x / np.where(x0 > 0.0, x0, 1.0), 0.0) * delta0
    delta = np.where(x >= x0, far, near)
    return np.where((x > 0.0) & (ct > 0.0), delta, 0.0)


def lateral_width(params: WakeParams, turbine: TurbineModel, yaw_deg,
                  ambient_ti, x, induction=None):
    """Lateral Gaussian wake width sigma_y (m) at downwind distance x."""
    a = turbine.induction if induction is None else np.asarray(induction, dtype=float)
    ct = thrust_coefficient(a)
    yaw = np.asarray(yaw_deg, dtype=float) * _DEG
    ti = np.asarray(ambient_ti, dtype=float)
    x0 = near_wake_length(params, turbine, yaw_deg, ambient_ti, induction=a)
    sy, _, _, _, _ = _wake_widths(params, turbine.diameter, yaw, ct, ti,
                                  np.asarray(x, dtype=float), x0)
    return sy


def deficit_at(params: WakeParams, turbine: TurbineModel, yaw_deg, ambient_ti,
               x, y, z, induction=None):
    """Velocity-deficit fraction at wake-frame point (x, y, z).

    ``y`` is measured from the rotor axis; the Gaussian is centred on the
    deflected centerline.  ``z`` is absolute height.
    """
    delta = deflection_at(params, turbine, yaw_deg, ambient_ti, x, induction=induction)
    r_y = np.asarray(y, dtype=float) - delta
    r_z = np.asarray(z, dtype=float) - turbine.hub_height
    return deficit_profile(params, turbine, yaw_deg, ambient_ti, x, r_y, r_z,
                           induction=induction)


def added_turbulence(params: WakeParams, induction, ambient_ti, x, diameter):
    """Wake-added turbulence-intensity increment at downwind distance x."""
    a = np.asarray(induction, dtype=float)
    ti = np.asarray(ambient_ti, dtype=float)
    x = np.asarray(x, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        inc = (params.k_fa * np.maximum(a, 0.0) ** params.k_fb
               * ti ** params.k_fc
               * np.maximum(x / diameter, 1e-12) ** params.k_fd)
    return np.where((x > 0.0) & (a > 0.0), inc, 0.0)


def power(turbine: TurbineModel, u_eff, yaw_deg):
    """Generator power (W) from rotor-effective wind speed and misalignment."""
    u = np.asarray(u_eff, dtype=float)
    if np.any(u < 0):
        raise ValueError("effective wind speed must be >= 0")
    cosy = np.maximum(np.cos(np.asarray(yaw_deg, dtype=float) * _DEG), 0.0)
    return (turbine.eta * 0.5 * turbine.rho * turbine.area
            * turbine.power_coefficient * u**3 * cosy**turbine.p_p)


def yaw_weight(cfg: YawLimitConfig, gamma_deg):
    """Smooth power weight in (0, 1]; 0.5 exactly at the misalignment limits."""
    g = np.asarray(gamma_deg, dtype=float)
    hi = 0.5 * np.tanh(cfg.steepness * (cfg.gamma_max - g)) + 0.5
    lo = -0.5 * np.tanh(cfg.steepness * (cfg.gamma_min - g)) + 0.5
    return hi * lo


def rotor_points(turbine: TurbineModel, n_ring: int = 8):
    """Quadrature points on the rotor disc as (crosswind, vertical) offsets.

    Center point plus ``n_ring`` points on the median-area circle; a plain
    average over the points approximates the disc mean.
    """
    r = turbine.radius * np.sqrt(0.5)
    ang = 2.0 * np.pi * np.arange(n_ring) / n_ring
    cw = np.concatenate(([0.0], r * np.cos(ang)))
    dz = np.concatenate(([0.0], r * np.sin(ang)))
    return np.stack([cw, dz], axis=-1)


def wrap_angle(deg):
    """Wrap an angle to [0, 360)."""
    return np.mod(np.asarray(deg, dtype=float), 360.0)


def wrap_diff(deg):
    """Wrap an angle difference to (-180, 180]."""
    d = np.mod(np.asarray(deg, dtype=float), 360.0)
    return np.where(d > 180.0, d - 360.0, d)


def steady_farm_power(params: WakeParams, turbine: TurbineModel,
                      shear: ShearProfile, layout_xy, phi_deg, u_hub,
                      ambient_ti, misalign_deg, induction=None):
    """Steady-state per-turbine power for a uniform inflow.

    ``layout_xy`` is (n_T, 2) world coordinates, ``phi_deg`` the uniform
    flow heading, ``u_hub`` the hub-height free wind speed and
    ``misalign_deg`` the per-turbine misalignment, optionally batched with
    a leading axis.  Wakes are superposed root-sum-square; each wake
    expands with the local TI of its source; returns (..., n_T) power in W.
    """
    layout = np.asarray(layout_xy, dtype=float)
    n_t = layout.shape[0]
    gamma = np.atleast_2d(np.asarray(misalign_deg, dtype=float))
    batch = gamma.shape[0]
    a = np.full(n_t, turbine.induction if induction is None else induction)

    phi = float(phi_deg) * _DEG
    e_dw = np.array([np.cos(phi), np.sin(phi)])
    e_cw = np.array([-np.sin(phi), np.cos(phi)])
    dw = layout @ e_dw
    cw = layout @ e_cw
    order = np.argsort(dw, kind="stable")

    pts = rotor_points(turbine)
    n_pts = pts.shape[0]
    z_pts = turbine.hub_height + pts[:, 1]
    shear_fac = shear.factor(z_pts) / shear.factor(turbine.hub_height)

    ti_loc = np.full((batch, n_t), float(ambient_ti))
    u_eff = np.zeros((batch, n_t))
    for i in order:
        r2 = np.zeros((batch, n_pts))
        i_add2 = np.zeros((batch, n_pts))
        pt_cw = cw[i] + pts[:, 0]
        for j in range(n_t):
            x = dw[i] - dw[j]
            if j == i or x <= 0.0:
                continue
            delta = deflection_at(params, turbine, gamma[:, j], ti_loc[:, j], x,
                                  induction=a[j])
            r_y = (pt_cw - cw[j])[None, :] - delta[:, None]
            frac = deficit_profile(params, turbine, gamma[:, j, None],
                                   ti_loc[:, j, None], x, r_y, pts[:, 1][None, :],
                                   induction=a[j])
            r2 += frac**2
            x0 = near_wake_length(params, turbine, gamma[:, j], ti_loc[:, j],
                                  induction=a[j])
            sy, _, _, _, _ = _wake_widths(params, turbine.diameter,
                                          gamma[:, j] * _DEG, thrust_coefficient(a[j]),
                                          ti_loc[:, j], x, x0)
            inc = added_turbulence(params, a[j], float(ambient_ti), x, turbine.diameter)
            in_band = np.abs(r_y) <= params.k_ti * sy[:, None]
            i_add2 += np.where(in_band, inc**2, 0.0)
        u_pts = u_hub * shear_fac[None, :] * (1.0 - np.sqrt(r2))
        u_eff[:, i] = u_pts.mean(axis=1)
        ti_loc[:, i] = np.sqrt(float(ambient_ti) ** 2 + i_add2.mean(axis=1))
    p = power(turbine, u_eff, gamma)
    if np.ndim(misalign_deg) == 1:
        return p[0]
    return p
