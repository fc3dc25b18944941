"""Dynamic wake simulator built on chains of Lagrangian observation points.

Each turbine sheds one observation point (OP) per time step.  An OP freezes
the turbine state (misalignment, induction) and local flow state (speed,
heading, turbulence intensity) at shed time and is advected downstream with
the spatiotemporally weighted wind field sampled from all neighboring OPs.
Turbine inflow combines the weighted background flow with root-sum-square
superposed Gaussian wake deficits interpolated along the upstream chains.

States are batched: every per-turbine array carries a leading axis for
independent instances (ensemble members, swarm particles).  Batch members
never exchange information; ``member``/``replicate``/``subset`` provide the
single-instance views the rest of the framework works with.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import wake
from .wake import ShearProfile, TurbineModel, WakeParams

_DEG = np.pi / 180.0


@dataclass(frozen=True)
class WeightingConfig:
    """Spatiotemporal Gaussian weighting of OP states.

    Spatial scales are in rotor diameters (converted internally), temporal
    scales in seconds; separate kernels for the heading and speed channels.
    ``advection`` scales the transport speed of the OPs.
    """

    sigma_dw_phi: float = 2.87
    sigma_cw_phi: float = 2.87
    sigma_t_phi: float = 50.0
    sigma_dw_u: float = 0.6966
    sigma_cw_u: float = 0.3570
    sigma_t_u: float = 206.2331
    advection: float = 0.7396

    def __post_init__(self) -> None:
        for name in ("sigma_dw_phi", "sigma_cw_phi", "sigma_t_phi",
                     "sigma_dw_u", "sigma_cw_u", "sigma_t_u"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if not 0.0 < self.advection <= 1.0:
            raise ValueError("advection factor must lie in (0, 1]")


@dataclass(frozen=True)
class SimConfig:
    """Time step, chain length and ambient defaults of the simulator."""

    dt: float = 5.0
    n_op: int = 80
    ambient_u: float = 8.0
    ambient_phi: float = 0.0
    ambient_ti: float = 0.054

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.n_op < 3:
            raise ValueError("n_op must be >= 3")
        if self.ambient_u < 0 or self.ambient_ti <= 0:
            raise ValueError("ambient speed must be >= 0 and TI > 0")


class FarmModel:
    """Parameter bundle consumed by the simulator: wake physics, turbine,
    shear, OP weighting and time stepping."""

    def __init__(self, wake_params: WakeParams | None = None,
                 turbine: TurbineModel | None = None,
                 shear: ShearProfile | None = None,
                 weighting: WeightingConfig | None = None,
                 sim: SimConfig | None = None) -> None:
        self.wake = wake_params if wake_params is not None else WakeParams()
        self.turbine = turbine if turbine is not None else TurbineModel()
        self.shear = shear if shear is not None else ShearProfile()
        self.weighting = weighting if weighting is not None else WeightingConfig()
        self.sim = sim if sim is not None else SimConfig()
        d = self.turbine.diameter
        w = self.weighting
        # kernel constants: 1/(2 sigma^2) with spatial sigmas in meters
        self._inv2 = (
            0.5 / (w.sigma_dw_u * d) ** 2, 0.5 / (w.sigma_cw_u * d) ** 2,
            0.5 / w.sigma_t_u**2,
            0.5 / (w.sigma_dw_phi * d) ** 2, 0.5 / (w.sigma_cw_phi * d) ** 2,
            0.5 / w.sigma_t_phi**2,
        )
        pts = wake.rotor_points(self.turbine)
        self.rotor_cw = pts[:, 0]
        self.rotor_dz = pts[:, 1]
        z = self.turbine.hub_height + self.rotor_dz
        self.rotor_shear = self.shear.factor(z) / self.shear.factor(self.turbine.hub_height)

    def replace(self, **kwargs) -> "FarmModel":
        base = dict(wake_params=self.wake, turbine=self.turbine, shear=self.shear,
                    weighting=self.weighting, sim=self.sim)
        base.update(kwargs)
        return FarmModel(**base)


def chain_length(layout_xy, model: FarmModel, u_min: float = 6.0,
                 span_factor: float = 1.5, floor: int = 25) -> int:
    """OP chain length covering ``span_factor`` x the farm diagonal at u_min."""
    layout = np.atleast_2d(np.asarray(layout_xy, dtype=float))
    if layout.shape[0] > 1:
        diag = 0.0
        for i in range(layout.shape[0]):
            d = np.hypot(*(layout - layout[i]).T).max()
            diag = max(diag, float(d))
    else:
        diag = 0.0
    step = model.weighting.advection * u_min * model.sim.dt
    return max(floor, int(np.ceil(span_factor * diag / step)) + 2)


class StateCorruptionError(RuntimeError):
    """An OP chain emptied or lost its ordering."""


class FarmState:
    """Batched farm state: layout, turbine states and per-turbine OP chains.

    Array fields have shape (B, n_T) or (B, n_T, n_op).  ``clock`` counts
    completed steps of ``dt``; OP index 0 is the most recently shed point
    and index c was shed c steps ago.
    """

    _OP_FIELDS = ("op_x", "op_y", "op_u", "op_phi", "op_ti", "op_gamma",
                  "op_a", "op_dw", "op_delta")
    _TURBINE_FIELDS = ("orientation", "induction", "phi_local", "u_eff",
                       "ti_local", "power", "deficit_center", "deficit_grad")

    def __init__(self, layout_xy, ids, n_op: int, batch: int = 1) -> None:
        self.layout = np.atleast_2d(np.asarray(layout_xy, dtype=float)).copy()
        self.ids = tuple(ids)
        if self.layout.shape[0] != len(self.ids):
            raise ValueError("layout and ids length mismatch")
        n_t = self.layout.shape[0]
        self.clock = 0
        for f in self._TURBINE_FIELDS:
            setattr(self, f, np.zeros((batch, n_t)))
        for f in self._OP_FIELDS:
            setattr(self, f, np.zeros((batch, n_t, n_op)))

    # ------------------------------------------------------------ shape

    @property
    def batch(self) -> int:
        return self.orientation.shape[0]

    @property
    def n_turbines(self) -> int:
        return self.layout.shape[0]

    @property
    def n_op(self) -> int:
        return self.op_x.shape[2]

    def copy(self) -> "FarmState":
        out = FarmState.__new__(FarmState)
        out.layout = self.layout.copy()
        out.ids = self.ids
        out.clock = self.clock
        for f in self._TURBINE_FIELDS + self._OP_FIELDS:
            setattr(out, f, getattr(self, f).copy())
        return out

    def member(self, i: int) -> "FarmState":
        """Single-instance copy of batch member ``i``."""
        out = FarmState.__new__(FarmState)
        out.layout = self.layout.copy()
        out.ids = self.ids
        out.clock = self.clock
        for f in self._TURBINE_FIELDS + self._OP_FIELDS:
            setattr(out, f, getattr(self, f)[i:i + 1].copy())
        return out

    def replicate(self, batch: int) -> "FarmState":
        """Broadcast a single-instance state into ``batch`` identical members."""
        out = FarmState.__new__(FarmState)
        out.layout = self.layout.copy()
        out.ids = self.ids
        out.clock = self.clock
        for f in self._TURBINE_FIELDS + self._OP_FIELDS:
            arr = getattr(self, f)
            setattr(out, f, np.repeat(arr[:1], batch, axis=0).copy())
        return out

    def subset(self, turbine_idx, n_op: int | None = None) -> "FarmState":
        """Sub-farm with the selected turbines and optionally shorter chains."""
        idx = np.asarray(turbine_idx, dtype=int)
        keep = self.n_op if n_op is None else min(self.n_op, int(n_op))
        out = FarmState.__new__(FarmState)
        out.layout = self.layout[idx].copy()
        out.ids = tuple(self.ids[i] for i in idx)
        out.clock = self.clock
        for f in self._TURBINE_FIELDS:
            setattr(out, f, getattr(self, f)[:, idx].copy())
        for f in self._OP_FIELDS:
            setattr(out, f, getattr(self, f)[:, idx, :keep].copy())
        return out


def initialize_farm(model: FarmModel, layout_xy, ids=None, batch: int = 1,
                    u=None, phi=None, ti=None, n_op: int | None = None) -> FarmState:
    """Warm-started farm state with straight chains along the ambient flow."""
    layout = np.atleast_2d(np.asarray(layout_xy, dtype=float))
    n_t = layout.shape[0]
    if ids is None:
        ids = tuple(f"T{i}" for i in range(n_t))
    u0 = model.sim.ambient_u if u is None else float(u)
    phi0 = model.sim.ambient_phi if phi is None else float(phi)
    ti0 = model.sim.ambient_ti if ti is None else float(ti)
    n = chain_length(layout, model) if n_op is None else int(n_op)

    st = FarmState(layout, ids, n, batch)
    st.orientation[:] = phi0
    st.induction[:] = model.turbine.induction
    st.phi_local[:] = phi0
    st.u_eff[:] = u0
    st.ti_local[:] = ti0
    st.power[:] = wake.power(model.turbine, u0, 0.0)

    ages = np.arange(n)
    step_dist = model.weighting.advection * u0 * model.sim.dt
    e = np.array([np.cos(phi0 * _DEG), np.sin(phi0 * _DEG)])
    st.op_dw[:] = ages * step_dist
    st.op_x[:] = layout[:, 0][None, :, None] + st.op_dw * e[0]
    st.op_y[:] = layout[:, 1][None, :, None] + st.op_dw * e[1]
    st.op_u[:] = u0
    st.op_phi[:] = phi0
    st.op_ti[:] = ti0
    st.op_gamma[:] = 0.0
    st.op_a[:] = model.turbine.induction
    st.op_delta[:] = 0.0
    return st


# ---------------------------------------------------------------- kernel

_CUTOFF = 30.0  # exp(-30) ~ 9e-14: dropped tails are below float64 test noise


@njit(cache=True)
def _weighted_kernel(qx, qy, qth, qt, ox, oy, ot, o_u, o_ti, o_sin, o_cos,
                     i2dw_u, i2cw_u, i2t_u, i2dw_p, i2cw_p, i2t_p):
    """Spatiotemporal Gaussian weighted averages of OP states.

    Queries (B, nq) against OPs (B, no) with shared (nq,)/(no,) times.
    Returns u, ti (speed kernel) and sin/cos sums (heading kernel) per
    query; falls back to the nearest OP when all weights vanish.
    """
    B, nq = qx.shape
    no = ox.shape[1]
    out_u = np.empty((B, nq))
    out_ti = np.empty((B, nq))
    out_s = np.empty((B, nq))
    out_c = np.empty((B, nq))
    min_s_u = min(i2dw_u, i2cw_u)
    min_s_p = min(i2dw_p, i2cw_p)
    for b in range(B):
        for q in range(nq):
            cth = np.cos(qth[b, q])
            sth = np.sin(qth[b, q])
            swu = 0.0
            su = 0.0
            sti = 0.0
            swp = 0.0
            ss = 0.0
            sc = 0.0
            best = 1e300
            ib = 0
            for o in range(no):
                dx = ox[b, o] - qx[b, q]
                dy = oy[b, o] - qy[b, q]
                d2 = dx * dx + dy * dy
                if d2 < best:
                    best = d2
                    ib = o
                td = ot[o] - qt[q]
                td2 = td * td
                at_u = td2 * i2t_u
                at_p = td2 * i2t_p
                live_u = at_u + d2 * min_s_u < _CUTOFF
                live_p = at_p + d2 * min_s_p < _CUTOFF
                if not (live_u or live_p):
                    continue
                dw = dx * cth + dy * sth
                cw = dy * cth - dx * sth
                dw2 = dw * dw
                cw2 = cw * cw
                if live_u:
                    a = at_u + dw2 * i2dw_u + cw2 * i2cw_u
                    if a < _CUTOFF:
                        w = np.exp(-a)
                        swu += w
                        su += w * o_u[b, o]
                        sti += w * o_ti[b, o]
                if live_p:
                    a = at_p + dw2 * i2dw_p + cw2 * i2cw_p
                    if a < _CUTOFF:
                        w = np.exp(-a)
                        swp += w
                        ss += w * o_sin[b, o]
                        sc += w * o_cos[b, o]
            if swu > 1e-30:
                out_u[b, q] = su / swu
                out_ti[b, q] = sti / swu
            else:
                out_u[b, q] = o_u[b, ib]
                out_ti[b, q] = o_ti[b, ib]
            if swp > 1e-30:
                out_s[b, q] = ss / swp
                out_c[b, q] = sc / swp
            else:
                out_s[b, q] = o_sin[b, ib]
                out_c[b, q] = o_cos[b, ib]
    return out_u, out_ti, out_s, out_c


def _flat_ops(state: FarmState, dt: float):
    """Flatten OP chains to (B, n_T*n_op) plus shared shed ages (s)."""
    B = state.batch
    shape = (B, state.n_turbines * state.n_op)
    ox = state.op_x.reshape(shape)
    oy = state.op_y.reshape(shape)
    ou = state.op_u.reshape(shape)
    oti = state.op_ti.reshape(shape)
    phi = state.op_phi.reshape(shape) * _DEG
    ot = -dt * np.tile(np.arange(state.n_op, dtype=float), state.n_turbines)
    return ox, oy, ou, oti, np.sin(phi), np.cos(phi), ot


def _query(state: FarmState, model: FarmModel, qx, qy, frame_deg, q_age):
    """Run the weighted kernel; query ages in seconds relative to now."""
    ox, oy, ou, oti, osin, ocos, ot = _flat_ops(state, model.sim.dt)
    qth = np.ascontiguousarray(frame_deg * _DEG)
    qt = np.asarray(q_age, dtype=float)
    u, ti, s, c = _weighted_kernel(
        np.ascontiguousarray(qx), np.ascontiguousarray(qy), qth, qt,
        np.ascontiguousarray(ox), np.ascontiguousarray(oy), ot,
        np.ascontiguousarray(ou), np.ascontiguousarray(oti),
        np.ascontiguousarray(osin), np.ascontiguousarray(ocos), *model._inv2)
    phi = wake.wrap_angle(np.arctan2(s, c) / _DEG)
    return u, phi, ti


def weighted_flow_at(state: FarmState, model: FarmModel, xy, frame_deg=0.0,
                     age: float = 0.0):
    """Weighted flow (u, phi, ti) at query points for every batch member.

    ``xy`` is (nq, 2); ``frame_deg`` orients the anisotropic kernel
    (scalar or (nq,)); ``age`` is the query time offset in seconds
    relative to the state clock (0 = now).
    """
    xy = np.atleast_2d(np.asarray(xy, dtype=float))
    nq = xy.shape[0]
    B = state.batch
    qx = np.repeat(xy[None, :, 0], B, axis=0)
    qy = np.repeat(xy[None, :, 1], B, axis=0)
    frame = np.broadcast_to(np.asarray(frame_deg, dtype=float), (nq,))
    frame = np.repeat(frame[None, :], B, axis=0)
    q_age = np.full(nq, -float(age))
    return _query(state, model, qx, qy, frame, q_age)


# ----------------------------------------------------------- wake pass

def _rotor_wake_pass(state: FarmState, model: FarmModel, u_bg, phi_loc, ti_bg):
    """Deficits and added TI from all upstream chains at each rotor.

    Returns (u_eff, ti_local, deficit_center, deficit_grad); the chain of
    each source turbine is treated as a sampled wake centerline and its
    state is linearly interpolated at the bracketing segment.
    """
    B = state.batch
    n_t = state.n_turbines
    pts_cw = model.rotor_cw
    pts_dz = model.rotor_dz
    n_pts = pts_cw.shape[0]
    params, turbine = model.wake, model.turbine
    d_rot = turbine.diameter

    u_eff = np.empty((B, n_t))
    ti_loc = np.empty((B, n_t))
    defc = np.zeros((B, n_t))
    defg = np.zeros((B, n_t))

    span = state.op_dw[:, :, -1].max(axis=0)  # per-source reach bound
    for i in range(n_t):
        phi_i = phi_loc[:, i] * _DEG
        e_perp = np.stack([-np.sin(phi_i), np.cos(phi_i)], axis=-1)  # (B, 2)
        px = state.layout[i, 0] + pts_cw[None, :] * e_perp[:, 0:1]
        py = state.layout[i, 1] + pts_cw[None, :] * e_perp[:, 1:2]
        r2 = np.zeros((B, n_pts))
        iadd2 = np.zeros((B, n_pts))
        for j in range(n_t):
            if j == i:
                continue
            dist = np.hypot(*(state.layout[i] - state.layout[j]))
            if dist > span[j] + 3.0 * d_rot:
                continue
            cx = state.op_x[:, j]
            cy = state.op_y[:, j]
            segx = cx[:, 1:] - cx[:, :-1]
            segy = cy[:, 1:] - cy[:, :-1]
            l2 = np.maximum(segx**2 + segy**2, 1e-12)
            relx = px[:, :, None] - cx[:, None, :-1]
            rely = py[:, :, None] - cy[:, None, :-1]
            tpar = (relx * segx[:, None, :] + rely * segy[:, None, :]) / l2[:, None, :]
            perp = (segx[:, None, :] * rely - segy[:, None, :] * relx) / np.sqrt(l2)[:, None, :]
            ok = (tpar >= 0.0) & (tpar <= 1.0)
            score = np.where(ok, np.abs(perp), np.inf)
            c_star = np.argmin(score, axis=2)
            none = ~np.take_along_axis(ok, c_star[:, :, None], axis=2)[:, :, 0]
            t_star = np.take_along_axis(tpar, c_star[:, :, None], axis=2)[:, :, 0]
            perp_s = np.take_along_axis(perp, c_star[:, :, None], axis=2)[:, :, 0]

            def lerp(arr):
                lo = np.take_along_axis(arr[:, j], c_star, axis=1)
                hi = np.take_along_axis(arr[:, j], c_star + 1, axis=1)
                return lo + (hi - lo) * t_star

            x_s = lerp(state.op_dw)
            g_s = lerp(state.op_gamma)
            a_s = lerp(state.op_a)
            ti_s = np.maximum(lerp(state.op_ti), 1e-4)
            frac = wake.deficit_profile(params, turbine, g_s, ti_s, x_s,
                                        perp_s, pts_dz[None, :], induction=a_s)
            frac = np.where(none, 0.0, frac)
            r2 += frac**2
            sy = wake.lateral_width(params, turbine, g_s, ti_s, x_s, induction=a_s)
            inc = wake.added_turbulence(params, a_s, ti_s, x_s, d_rot)
            band = (np.abs(perp_s) <= params.k_ti * sy) & ~none
            iadd2 += np.where(band, inc**2, 0.0)
        r_tot = np.sqrt(r2)
        u_pts = u_bg[:, i:i + 1] * model.rotor_shear[None, :] * (1.0 - r_tot)
        u_eff[:, i] = u_pts.mean(axis=1)
        ti_loc[:, i] = np.sqrt(ti_bg[:, i] ** 2 + iadd2.mean(axis=1))
        defc[:, i] = r_tot[:, 0]
        # lateral gradient across the rotor from the +cw / -cw ring points
        r_ring = pts_cw.max()
        defg[:, i] = (r_tot[:, 1] - r_tot[:, 5]) / (2.0 * r_ring)
    return u_eff, ti_loc, defc, defg


# ----------------------------------------------------------------- step

def step(state: FarmState, model: FarmModel, commands=None) -> FarmState:
    """Advance the farm by one time step of ``dt`` in place.

    ``commands`` are per-turbine orientation set points (deg), already
    rate-feasible (caller-enforced); ``None`` holds the previous
    orientation.  Every OP advects with its locally weighted flow, each
    rotor sheds one OP, and the oldest OP of each chain retires.
    """
    if state.n_op < 1:
        raise StateCorruptionError("OP chain is empty")
    B = state.batch
    n_t = state.n_turbines
    dt = model.sim.dt
    adv = model.weighting.advection

    if commands is not None:
        cmd = np.asarray(commands, dtype=float)
        state.orientation[:] = cmd if cmd.ndim == 2 else cmd[None, :]

    # advect every OP with its weighted local flow
    shape = (B, n_t * state.n_op)
    qx = state.op_x.reshape(shape)
    qy = state.op_y.reshape(shape)
    frame = state.op_phi.reshape(shape) * _DEG
    q_age = np.zeros(shape[1])
    u_w, phi_w, _ = _query(state, model, qx, qy, frame, q_age)
    step_dist = (adv * dt) * u_w.reshape(B, n_t, state.n_op)
    phi_w = phi_w.reshape(B, n_t, state.n_op) * _DEG

    dw_new = state.op_dw + step_dist
    delta_new = wake.deflection_at(model.wake, model.turbine, state.op_gamma,
                                   np.maximum(state.op_ti, 1e-4), dw_new,
                                   induction=state.op_a)
    d_delta = delta_new - state.op_delta
    cosp = np.cos(phi_w)
    sinp = np.sin(phi_w)
    state.op_x += step_dist * cosp - d_delta * sinp
    state.op_y += step_dist * sinp + d_delta * cosp
    state.op_dw = dw_new
    state.op_delta = delta_new

    # background flow at the rotors (post-advection, pre-shed)
    rx = np.repeat(state.layout[None, :, 0], B, axis=0)
    ry = np.repeat(state.layout[None, :, 1], B, axis=0)
    u_bg, phi_loc, ti_bg = _query(state, model, rx, ry,
                                  state.phi_local * _DEG, np.full(n_t, -dt))
    state.phi_local = phi_loc

    # turbine inflow, power
    u_eff, ti_loc, defc, defg = _rotor_wake_pass(state, model, u_bg, phi_loc, ti_bg)
    gamma = wake.wrap_diff(phi_loc - state.orientation)
    state.u_eff = u_eff
    state.ti_local = ti_loc
    state.deficit_center = defc
    state.deficit_grad = defg
    state.power = wake.power(model.turbine, u_eff, gamma)

    # shed at index 0, retire the oldest
    for f in FarmState._OP_FIELDS:
        arr = getattr(state, f)
        arr[:, :, 1:] = arr[:, :, :-1]
    state.op_x[:, :, 0] = state.layout[None, :, 0]
    state.op_y[:, :, 0] = state.layout[None, :, 1]
    state.op_u[:, :, 0] = u_bg
    state.op_phi[:, :, 0] = phi_loc
    state.op_ti[:, :, 0] = ti_loc
    state.op_gamma[:, :, 0] = gamma
    state.op_a[:, :, 0] = state.induction
    state.op_dw[:, :, 0] = 0.0
    state.op_delta[:, :, 0] = 0.0

    state.clock += 1
    return state


def turbine_inflow(state: FarmState, model: FarmModel, turbine_id):
    """Current inflow of one turbine: (u_eff, phi_local, ti_local)."""
    i = state.ids.index(turbine_id) if isinstance(turbine_id, str) else int(turbine_id)
    return state.u_eff[:, i], state.phi_local[:, i], state.ti_local[:, i]


def predict(state: FarmState, model: FarmModel, horizon: int, plan=None):
    """Roll a copy forward ``horizon`` steps; returns powers (B, n_T, horizon).

    ``plan`` holds per-step orientation commands with shape (n_T, horizon)
    or (B, n_T, horizon); ``None`` keeps the current orientations.  No
    exogenous information enters: free-stream turbines simply re-shed
    their locally weighted state.
    """
    B = state.batch
    n_t = state.n_turbines
    out = np.empty((B, n_t, horizon))
    if horizon == 0:
        return out
    work = state.copy()
    for k in range(horizon):
        cmd = None
        if plan is not None:
            cmd = plan[..., k]
        step(work, model, cmd)
        out[:, :, k] = work.power
    return out


# -------------------------------------------------------------- snapshot

_SNAP_COLUMNS = "id,shed_time,x,y,z,u,phi,ti,gamma,a,dw,delta"


def save_snapshot(state: FarmState, model: FarmModel, path, member: int = 0) -> None:
    """Write one batch member's OP cloud as structured text.

    Format: comment header with farm-level state, then one CSV record per
    OP with columns ``id, shed_time, x, y, z, u, phi, ti, gamma, a`` plus
    the bookkeeping columns ``dw, delta`` used to rebuild chains exactly.
    """
    b = member
    buf = io.StringIO()
    buf.write("# windsteer-snapshot v1\n")
    buf.write(f"# clock={state.clock} dt={model.sim.dt!r} n_op={state.n_op}\n")
    for name, arr in (("orientation", state.orientation), ("phi_local", state.phi_local),
                      ("induction", state.induction), ("u_eff", state.u_eff),
                      ("ti_local", state.ti_local)):
        vals = " ".join(repr(float(v)) for v in arr[b])
        buf.write(f"# {name}={vals}\n")
    ids = " ".join(state.ids)
    xs = " ".join(repr(float(v)) for v in state.layout[:, 0])
    ys = " ".join(repr(float(v)) for v in state.layout[:, 1])
    buf.write(f"# ids={ids}\n# layout_x={xs}\n# layout_y={ys}\n")
    buf.write(_SNAP_COLUMNS + "\n")
    t_now = state.clock * model.sim.dt
    zh = model.turbine.hub_height
    for t in range(state.n_turbines):
        for c in range(state.n_op):
            shed = t_now - c * model.sim.dt
            row = (state.ids[t], repr(shed), repr(float(state.op_x[b, t, c])),
                   repr(float(state.op_y[b, t, c])), repr(zh),
                   repr(float(state.op_u[b, t, c])), repr(float(state.op_phi[b, t, c])),
                   repr(float(state.op_ti[b, t, c])), repr(float(state.op_gamma[b, t, c])),
                   repr(float(state.op_a[b, t, c])), repr(float(state.op_dw[b, t, c])),
                   repr(float(state.op_delta[b, t, c])))
            buf.write(",".join(row) + "\n")
    with open(path, "w") as fh:
        fh.write(buf.getvalue())


def load_snapshot(path, model: FarmModel) -> FarmState:
    """Rebuild a single-member state from :func:`save_snapshot` output."""
    header: dict[str, str] = {}
    rows: list[list[str]] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, val = body.split("=", 1)
                    header[key.strip()] = val.strip()
                continue
            if line == _SNAP_COLUMNS:
                continue
            rows.append(line.split(","))
    ids = tuple(header["ids"].split())
    layout = np.stack([np.array([float(v) for v in header["layout_x"].split()]),
                       np.array([float(v) for v in header["layout_y"].split()])], axis=1)
    # the first header line reads "clock=<k> dt=<dt> n_op=<n>"
    meta = dict(p.split("=") for p in ("clock=" + header["clock"]).split())
    clock = int(meta["clock"])
    n_op = int(meta["n_op"])
    st = FarmState(layout, ids, n_op, batch=1)
    st.clock = clock
    for name in ("orientation", "phi_local", "induction", "u_eff", "ti_local"):
        st.__dict__[name][0] = [float(v) for v in header[name].split()]
    id_index = {tid: k for k, tid in enumerate(ids)}
    counters = {tid: 0 for tid in ids}
    for row in rows:
        t = id_index[row[0]]
        c = counters[row[0]]
        counters[row[0]] += 1
        st.op_x[0, t, c] = float(row[2])
        st.op_y[0, t, c] = float(row[3])
        st.op_u[0, t, c] = float(row[5])
        st.op_phi[0, t, c] = float(row[6])
        st.op_ti[0, t, c] = float(row[7])
        st.op_gamma[0, t, c] = float(row[8])
        st.op_a[0, t, c] = float(row[9])
        st.op_dw[0, t, c] = float(row[10])
        st.op_delta[0, t, c] = float(row[11])
    if any(c == 0 for c in counters.values()):
        raise StateCorruptionError("snapshot contains an empty OP chain")
    return st
