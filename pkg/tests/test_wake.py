"""Wake model tests against an independent scalar oracle.

The oracle below re-implements the deficit / deflection / expansion chain
with plain ``math`` scalars, separate from the package's vectorized code.
Frozen literals were produced by this oracle.
"""

import math

import numpy as np
import pytest

from windsteer import wake
from windsteer.wake import (
    ShearProfile,
    TurbineModel,
    WakeParams,
    YawLimitConfig,
    added_turbulence,
    deficit_at,
    deflection_at,
    near_wake_length,
    power,
    yaw_weight,
)

PARAMS = WakeParams()
TURBINE = TurbineModel()
D = TURBINE.diameter
TI0 = 0.054


# ---------------------------------------------------------------- oracle

def oracle_near_wake(a, yaw_deg, ti):
    ct = 4 * a * (1 - a)
    yaw = math.radians(yaw_deg)
    root = math.sqrt(1 - ct)
    return (D * math.cos(yaw) * (1 + root)
            / (math.sqrt(2) * (PARAMS.alpha * ti + PARAMS.beta * (1 - root))))


def oracle_widths(a, yaw_deg, ti, x):
    ct = 4 * a * (1 - a)
    yaw = math.radians(yaw_deg)
    x0 = oracle_near_wake(a, yaw_deg, ti)
    cte = ct * math.cos(yaw)
    ur = cte / (2 * (1 - math.sqrt(1 - cte)))
    sz0 = 0.5 * D * math.sqrt(ur / (1 + math.sqrt(1 - ct)))
    sy0 = sz0 * math.cos(yaw)
    ks = PARAMS.k_a * ti + PARAMS.k_b
    if x >= x0:
        sy = ks * (x - x0) + sy0
        sz = ks * (x - x0) + sz0
    else:
        snw = 0.501 * D * math.sqrt(ct / 2)
        f = x / x0
        sy = (1 - f) * snw + f * sy0
        sz = (1 - f) * snw + f * sz0
    return sy, sz, sy0, sz0, ks, x0


def oracle_deficit(a, yaw_deg, ti, x, ry, rz):
    ct = 4 * a * (1 - a)
    cte = ct * math.cos(math.radians(yaw_deg))
    sy, sz, *_ = oracle_widths(a, yaw_deg, ti, x)
    rad = max(0.0, min(1.0, 1 - cte * D * D / (8 * sy * sz)))
    amp = 1 - math.sqrt(rad)
    return amp * math.exp(-ry * ry / (2 * sy * sy) - rz * rz / (2 * sz * sz))


def oracle_deflection(a, yaw_deg, ti, x):
    ct = 4 * a * (1 - a)
    yaw = math.radians(yaw_deg)
    cte = ct * math.cos(yaw)
    sy, sz, sy0, sz0, ks, x0 = oracle_widths(a, yaw_deg, ti, x)
    theta = 0.3 * yaw / math.cos(yaw) * (1 - math.sqrt(1 - cte))
    d0 = math.tan(theta) * x0
    if x < x0:
        return x / x0 * d0
    c0 = 1 - math.sqrt(1 - ct)
    m0 = c0 * (2 - c0)
    e0 = c0 * c0 - 3 * math.exp(1 / 12.) * c0 + 3 * math.exp(1 / 3.)
    ratio = math.sqrt(sy * sz / (sy0 * sz0))
    num = (1.6 + math.sqrt(m0)) * (1.6 * ratio - math.sqrt(m0))
    den = (1.6 - math.sqrt(m0)) * (1.6 * ratio + math.sqrt(m0))
    return d0 + theta * e0 / 5.2 * math.sqrt(sy0 * sz0 / (ks * ks * m0)) * math.log(num / den)


# ---------------------------------------------------------------- deficit

def test_zero_thrust_sheds_no_wake():
    t = TurbineModel(induction=0.0)
    assert deficit_at(PARAMS, t, 0.0, TI0, 5 * D, 0.0, t.hub_height) == 0.0
    assert deficit_at(PARAMS, t, 10.0, TI0, 2 * D, 30.0, 90.0) == 0.0


def test_gaussian_tail_vanishes():
    r = deficit_at(PARAMS, TURBINE, 0.0, TI0, 5 * D, 10 * D, TURBINE.hub_height)
    assert r < 1e-6


def test_deficit_matches_scalar_oracle():
    frozen = 0.3321950114458043  # oracle_deficit(1/3, 0, 0.054, 8D, 0, 0)
    assert oracle_deficit(1 / 3, 0.0, TI0, 8 * D, 0.0, 0.0) == pytest.approx(frozen, abs=1e-14)
    got = deficit_at(PARAMS, TURBINE, 0.0, TI0, 8 * D, 0.0, TURBINE.hub_height)
    assert got == pytest.approx(frozen, abs=1e-12)


def test_deficit_bounded_and_off_center_agrees_with_oracle():
    for x_d, y_d, yaw in [(3, 0.2, 0.0), (5, 0.5, 10.0), (7, -1.0, -15.0), (12, 0.0, 25.0)]:
        got = deficit_at(PARAMS, TURBINE, yaw, TI0, x_d * D, y_d * D, TURBINE.hub_height)
        want = oracle_deficit(1 / 3, yaw, TI0, x_d * D,
                              y_d * D - oracle_deflection(1 / 3, yaw, TI0, x_d * D), 0.0)
        assert got == pytest.approx(want, abs=1e-12)
        assert 0.0 <= got < 1.0


def test_no_deficit_upstream():
    assert deficit_at(PARAMS, TURBINE, 0.0, TI0, -2 * D, 0.0, TURBINE.hub_height) == 0.0


def test_invalid_thrust_raises():
    # C_T = 4a(1-a) <= 1 for physical a, so the guard is defensive; check it directly
    with pytest.raises(wake.InvalidThrustError):
        wake._check_thrust(1.0 + 1e-6)
    wake._check_thrust(1.0)  # boundary accepted


# ------------------------------------------------------------- deflection

def test_no_yaw_no_deflection():
    for x in [0.5 * D, 3 * D, 9 * D]:
        assert deflection_at(PARAMS, TURBINE, 0.0, TI0, x) == 0.0


def test_deflection_antisymmetric():
    plus = deflection_at(PARAMS, TURBINE, 20.0, TI0, 5 * D)
    minus = deflection_at(PARAMS, TURBINE, -20.0, TI0, 5 * D)
    assert plus == pytest.approx(-minus, abs=1e-12)
    assert plus > 0.0


def test_deflection_matches_scalar_oracle():
    frozen = 56.63800448652562  # oracle_deflection(1/3, 20, 0.054, 5D)
    assert oracle_deflection(1 / 3, 20.0, TI0, 5 * D) == pytest.approx(frozen, abs=1e-12)
    got = deflection_at(PARAMS, TURBINE, 20.0, TI0, 5 * D)
    assert got == pytest.approx(frozen, abs=1e-9)


def test_deflection_zero_at_rotor_and_monotone():
    assert deflection_at(PARAMS, TURBINE, 20.0, TI0, 0.0) == 0.0
    x = np.linspace(0.0, 15 * D, 400)
    d = deflection_at(PARAMS, TURBINE, 20.0, TI0, x)
    assert np.all(np.diff(d) >= -1e-12)


# ------------------------------------------------------- added turbulence

def test_added_turbulence_zero_without_induction():
    assert added_turbulence(PARAMS, 0.0, TI0, 5 * D, D) == 0.0


def test_added_turbulence_matches_calculator():
    # k_fa * a^k_fb * I0^k_fc * (x/D)^k_fd at a=1/3, I0=0.054, x=5D
    frozen = 0.1589468082265466
    by_hand = 0.73 * (1 / 3) ** 0.8325 * 0.054 ** 0.0325 * 5.0 ** -0.32
    assert by_hand == pytest.approx(frozen, abs=1e-14)
    assert added_turbulence(PARAMS, 1 / 3, TI0, 5 * D, D) == pytest.approx(frozen, abs=1e-12)


def test_added_turbulence_decays_downstream():
    near = added_turbulence(PARAMS, 1 / 3, TI0, 5 * D, D)
    far = added_turbulence(PARAMS, 1 / 3, TI0, 10 * D, D)
    assert 0.0 < far < near


# ------------------------------------------------------- near-wake length

def test_near_wake_matches_oracle_and_shrinks_with_ti():
    frozen = 737.879327115583
    assert oracle_near_wake(1 / 3, 0.0, TI0) == pytest.approx(frozen, abs=1e-10)
    assert near_wake_length(PARAMS, TURBINE, 0.0, TI0) == pytest.approx(frozen, abs=1e-9)
    assert near_wake_length(PARAMS, TURBINE, 0.0, 2 * TI0) < frozen


def test_near_wake_shrinks_with_yaw():
    frozen_yawed = 639.0222422094627
    assert oracle_near_wake(1 / 3, 30.0, TI0) == pytest.approx(frozen_yawed, abs=1e-10)
    got = near_wake_length(PARAMS, TURBINE, 30.0, TI0)
    assert got == pytest.approx(frozen_yawed, abs=1e-9)
    assert got <= near_wake_length(PARAMS, TURBINE, 0.0, TI0)


# ------------------------------------------------------------------ power

def test_power_zero_wind():
    assert power(TURBINE, 0.0, 0.0) == 0.0


def test_power_arithmetic_oracle():
    # 0.5 * 1.225 * pi * 89.2^2 * (16/27) * 8^3
    frozen = 4645279.542202504
    assert 0.5 * 1.225 * math.pi * 89.2**2 * (16 / 27) * 8**3 == pytest.approx(frozen, abs=1e-6)
    assert power(TURBINE, 8.0, 0.0) == pytest.approx(frozen, rel=1e-12)


def test_power_yaw_cosine_law():
    ratio = power(TURBINE, 8.0, 20.0) / power(TURBINE, 8.0, 0.0)
    assert ratio == pytest.approx(math.cos(math.radians(20.0)) ** 2.2, rel=1e-12)


def test_power_even_in_yaw():
    g = np.linspace(-40, 40, 17)
    assert np.allclose(power(TURBINE, 8.0, g), power(TURBINE, 8.0, -g), rtol=0, atol=1e-9)


# ------------------------------------------------------------- yaw weight

def test_yaw_weight_center_and_limits():
    cfg = YawLimitConfig()
    assert yaw_weight(cfg, 0.0) == pytest.approx(1.0, abs=1e-10)
    assert yaw_weight(cfg, 33.0) == pytest.approx(0.5, abs=1e-10)
    assert yaw_weight(cfg, -33.0) == pytest.approx(0.5, abs=1e-10)


def test_yaw_weight_outside_limits_small():
    assert yaw_weight(YawLimitConfig(), 40.0) < 0.01


def test_yaw_weight_even():
    cfg = YawLimitConfig()
    g = np.arange(-45.0, 45.0 + 1e-9, 0.1)
    assert np.allclose(yaw_weight(cfg, g), yaw_weight(cfg, -g), rtol=0, atol=1e-12)
    # mathematically strictly inside (0, 1); float64 tanh saturates far outside
    # the limits, so the numerical assertion is on the closed interval
    w = yaw_weight(cfg, g)
    assert np.all((w >= 0.0) & (w <= 1.0))
    inner = yaw_weight(cfg, np.arange(-33.0, 33.0 + 1e-9, 0.1))
    assert np.all((inner > 0.0) & (inner <= 1.0))


# ------------------------------------------------------------------ shear

def test_shear_reference_and_flat_profile():
    p = ShearProfile()
    assert p.speed(p.z_ref) == pytest.approx(p.u_ref, rel=0, abs=0)
    flat = ShearProfile(alpha_s=0.0)
    assert flat.speed(37.0) == flat.u_ref
    assert flat.speed(500.0) == flat.u_ref


def test_shear_calculator_value():
    frozen = 8.324119077556025  # 8 * ((119 + 89.2)/119)^0.071
    assert 8.0 * ((119.0 + 89.2) / 119.0) ** 0.071 == pytest.approx(frozen, abs=1e-13)
    assert ShearProfile().speed(119.0 + 89.2) == pytest.approx(frozen, abs=1e-12)


# ------------------------------------------------------------- invariants

def test_pure_functions_bit_identical():
    args = (PARAMS, TURBINE, 17.0, TI0, 6.5 * D, 0.3 * D, TURBINE.hub_height + 10.0)
    assert float(deficit_at(*args)) == float(deficit_at(*args))
    assert float(deflection_at(PARAMS, TURBINE, 17.0, TI0, 6.5 * D)) == \
        float(deflection_at(PARAMS, TURBINE, 17.0, TI0, 6.5 * D))


def test_config_invariants_enforced():
    with pytest.raises(ValueError):
        WakeParams(alpha=-1.0)
    with pytest.raises(ValueError):
        WakeParams(k_ti=0.5)
    with pytest.raises(ValueError):
        TurbineModel(induction=0.6)
    with pytest.raises(ValueError):
        TurbineModel(eta=0.0)
    with pytest.raises(ValueError):
        YawLimitConfig(gamma_max=-33.0, gamma_min=33.0)
    with pytest.raises(ValueError):
        ShearProfile(alpha_s=-0.1)


# ---------------------------------------------------- steady farm solver

def test_steady_single_turbine_is_freestream():
    layout = np.array([[0.0, 0.0]])
    p = wake.steady_farm_power(PARAMS, TURBINE, ShearProfile(), layout, 0.0,
                               8.0, TI0, np.array([0.0]))
    # rotor-averaged shear over the 9-point stencil, no wake losses
    pts = wake.rotor_points(TURBINE)
    fac = ((TURBINE.hub_height + pts[:, 1]) / TURBINE.hub_height) ** 0.071
    u_eff = 8.0 * fac.mean()
    assert p[0] == pytest.approx(power(TURBINE, u_eff, 0.0), rel=1e-12)


def test_steady_waked_pair_loses_power():
    layout = np.array([[0.0, 0.0], [5 * D, 0.0]])
    p = wake.steady_farm_power(PARAMS, TURBINE, ShearProfile(), layout, 0.0,
                               8.0, TI0, np.array([0.0, 0.0]))
    assert p[1] < 0.7 * p[0]


def test_steady_steering_helps_downstream():
    layout = np.array([[0.0, 0.0], [5 * D, -0.5 * D]])
    greedy = wake.steady_farm_power(PARAMS, TURBINE, ShearProfile(), layout, 0.0,
                                    8.0, TI0, np.array([0.0, 0.0]))
    steered = wake.steady_farm_power(PARAMS, TURBINE, ShearProfile(), layout, 0.0,
                                     8.0, TI0, np.array([16.0, 0.0]))
    assert steered[1] > greedy[1]
    assert steered[0] < greedy[0]


def test_steady_batched_matches_single():
    layout = np.array([[0.0, 0.0], [5 * D, -0.5 * D]])
    gam = np.array([[0.0, 0.0], [12.0, 0.0], [-12.0, 0.0]])
    batch = wake.steady_farm_power(PARAMS, TURBINE, ShearProfile(), layout, 0.0,
                                   8.0, TI0, gam)
    for k in range(3):
        single = wake.steady_farm_power(PARAMS, TURBINE, ShearProfile(), layout, 0.0,
                                        8.0, TI0, gam[k])
        assert np.allclose(batch[k], single, rtol=0, atol=1e-9)
