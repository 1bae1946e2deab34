"""Maps between velocity and magnetization descriptions, and dual-run checks.

A magnetization state w determines a velocity u = P w (Leray projection);
conversely a velocity trajectory lifts to a magnetization trajectory
w = u + grad q where the scalar potential q solves the driven transport
equation

    dq/dt + (u . grad) q - nu Lap q = p - |u|^2 / 2,   mean(q) = 0,

with p the pressure of u.  Different q(0) choices give gauge-equivalent
magnetizations: they differ by a gradient for all time and project to the
same velocity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dynamics, spectral
from .dynamics import check_tag
from .spectral import FourierField
from .stepping import IFRK4Stepper, heat_factors


def velocity_from_magnetization(w: FourierField) -> FourierField:
    """The velocity carried by a magnetization state: its Leray projection."""
    return spectral.leray_project(w)


def gauge_shift(w: FourierField, q: FourierField) -> FourierField:
    """Shift the gauge of a magnetization state by the gradient of q."""
    if q.ncomp != 1:
        raise ValueError("gauge potential must be a scalar field")
    return w + spectral.gradient(q)


def projection_residual(
    w: FourierField, u: FourierField, ref: float | None = None
) -> tuple[float, float]:
    """|| P w - P u ||_{H^{1/2}}, absolute and relative to `ref`."""
    diff = spectral.leray_project(w) - spectral.leray_project(u)
    resid = spectral.hs_norm(diff, 0.5)
    if ref is None:
        ref = spectral.hs_norm(spectral.leray_project(u), 0.5)
    rel = resid / ref if ref > 0.0 else np.inf
    return resid, rel


def half_speed_squared(u: FourierField) -> FourierField:
    """The scalar |u|^2 / 2 as a truncated field (alias-free on this grid)."""
    vals = u.values()
    s = 0.5 * np.sum(vals * vals, axis=0)
    return FourierField.from_values(u.lattice, s)


# ----------------------------------------------------------------------
# lifting a velocity trajectory to a magnetization trajectory
# ----------------------------------------------------------------------


@dataclass
class ConstructedMagnetization:
    """Magnetization trajectory w = u + grad q built alongside a velocity march."""

    times: list
    w_fields: list
    final_u: FourierField
    final_q: FourierField

    @property
    def final_w(self) -> FourierField:
        return self.w_fields[-1]


def magnetization_from_velocity(
    u0: FourierField,
    q0: FourierField | None,
    dt: float,
    n_steps: int,
    nu: float = 1.0,
    record_every: int = 1,
) -> ConstructedMagnetization:
    """March the velocity together with its scalar potential and assemble w.

    The velocity march is bit-identical to a standalone `nse` march; the
    potential sees the velocity's internal RK4 stages, so the pair solves
    the coupled system with a single consistent scheme.  The potential's
    mean is pinned to zero (the driving term's mean is discarded).
    """
    lat = u0.lattice
    if q0 is None:
        q0 = FourierField.zeros(lat, ncomp=1)
    if q0.ncomp != 1:
        raise ValueError("scalar potential must have one component")
    e_half, e_full = heat_factors(lat, nu, dt)

    def nl_u(spec: np.ndarray, t: float) -> np.ndarray:
        return dynamics.nonlinear_rhs("nse", FourierField(lat, spec), t).spec

    def nl_q(u_spec: np.ndarray, q_spec: np.ndarray) -> np.ndarray:
        u = FourierField(lat, u_spec)
        q = FourierField(lat, q_spec)
        drive = dynamics.pressure_from_velocity(u) - half_speed_squared(u)
        out = drive - dynamics.advect(u, q)
        spec = out.spec.copy()
        spec[:, 0, 0, 0] = 0.0
        return spec

    u = u0.spec.copy()
    q = q0.spec.copy()
    times = [0.0]
    w_fields = [gauge_shift(u0, q0)]
    for i in range(1, n_steps + 1):
        t = (i - 1) * dt
        k1u = nl_u(u, t)
        k1q = nl_q(u, q)
        u2 = e_half * (u + (0.5 * dt) * k1u)
        q2 = e_half * (q + (0.5 * dt) * k1q)
        k2u = nl_u(u2, t + 0.5 * dt)
        k2q = nl_q(u2, q2)
        u3 = e_half * u + (0.5 * dt) * k2u
        q3 = e_half * q + (0.5 * dt) * k2q
        k3u = nl_u(u3, t + 0.5 * dt)
        k3q = nl_q(u3, q3)
        u4 = e_full * u + dt * (e_half * k3u)
        q4 = e_full * q + dt * (e_half * k3q)
        k4u = nl_u(u4, t + dt)
        k4q = nl_q(u4, q4)
        u = e_full * u + (dt / 6.0) * (e_full * k1u + 2.0 * (e_half * (k2u + k3u)) + k4u)
        q = e_full * q + (dt / 6.0) * (e_full * k1q + 2.0 * (e_half * (k2q + k3q)) + k4q)
        if (record_every and i % record_every == 0) or i == n_steps:
            times.append(i * dt)
            w_fields.append(
                gauge_shift(FourierField(lat, u), FourierField(lat, q))
            )
    return ConstructedMagnetization(
        times=times,
        w_fields=w_fields,
        final_u=FourierField(lat, u),
        final_q=FourierField(lat, q),
    )


# ----------------------------------------------------------------------
# lockstep dual runs
# ----------------------------------------------------------------------


@dataclass
class DualRunResult:
    """Two marches compared through their projected velocities."""

    times: np.ndarray
    resid_abs: np.ndarray
    resid_rel: np.ndarray
    final_a: FourierField
    final_b: FourierField

    @property
    def max_abs(self) -> float:
        return float(np.max(self.resid_abs))

    @property
    def max_rel(self) -> float:
        return float(np.max(self.resid_rel))


def dual_run(
    tag_a: str,
    w0_a: FourierField,
    tag_b: str,
    w0_b: FourierField,
    dt: float,
    n_steps: int,
    nu: float = 1.0,
    every: int = 1,
) -> DualRunResult:
    """March two systems in lockstep and record || P a - P b ||_{H^{1/2}}.

    The relative residual is measured against || P a(0) ||_{H^{1/2}}.
    """
    check_tag(tag_a)
    check_tag(tag_b)
    lat = w0_a.lattice
    sa = IFRK4Stepper(tag_a, lat, dt, nu=nu)
    sb = IFRK4Stepper(tag_b, lat, dt, nu=nu)
    ref = spectral.hs_norm(spectral.leray_project(w0_a), 0.5)
    a = w0_a.spec.copy()
    b = w0_b.spec.copy()

    times = [0.0]
    r0, rel0 = projection_residual(FourierField(lat, b), FourierField(lat, a), ref)
    resid_abs = [r0]
    resid_rel = [rel0]
    for i in range(1, n_steps + 1):
        t = (i - 1) * dt
        a = sa.step(a, t)
        b = sb.step(b, t)
        if i % every == 0 or i == n_steps:
            r, rel = projection_residual(
                FourierField(lat, b), FourierField(lat, a), ref
            )
            times.append(i * dt)
            resid_abs.append(r)
            resid_rel.append(rel)
    return DualRunResult(
        times=np.array(times),
        resid_abs=np.array(resid_abs),
        resid_rel=np.array(resid_rel),
        final_a=FourierField(lat, a),
        final_b=FourierField(lat, b),
    )


def gradient_part_norm(w: FourierField) -> float:
    """H^{1/2} size of the gradient (non-solenoidal) part of w."""
    grad_part = w - spectral.leray_project(w)
    return spectral.hs_norm(grad_part, 0.5)
