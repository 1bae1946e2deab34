"""Velocity/magnetization correspondence at the level of whole marches."""

import numpy as np
import pytest

from torusflow import equivalence, spectral
from torusflow.equivalence import (
    dual_run,
    gauge_shift,
    gradient_part_norm,
    half_speed_squared,
    magnetization_from_velocity,
    projection_residual,
    velocity_from_magnetization,
)
from torusflow.initial import random_scalar, taylor_green
from torusflow.lattice import WaveLattice
from torusflow.spectral import FourierField, gradient, hs_norm, leray_project
from torusflow.stepping import IFRK4Stepper

from conftest import random_state


def test_gauge_shift_preserves_velocity(lat4):
    w = random_state(lat4, seed=1)
    q = random_scalar(lat4, 1, 2, seed=2)
    shifted = gauge_shift(w, q)
    u0 = velocity_from_magnetization(w)
    u1 = velocity_from_magnetization(shifted)
    assert hs_norm(u0 - u1, 0.5) < 1e-13
    abs_r, rel_r = projection_residual(shifted, u0)
    assert abs_r < 1e-13 and rel_r < 1e-13


def test_gauge_shift_requires_scalar(lat4):
    w = random_state(lat4, seed=3)
    with pytest.raises(ValueError):
        gauge_shift(w, w)


def test_gradient_part_norm_splits(lat4):
    w = random_state(lat4, seed=4, divfree=0.5, gradient=0.3)
    g = gradient_part_norm(w)
    assert g > 0.1
    assert gradient_part_norm(leray_project(w)) < 1e-13


def test_potential_march_reduces_to_heat_without_velocity():
    """With u = 0 the potential equation is a pure heat equation.

    The drive p - |u|^2/2 vanishes, so q(t) = exp(t Lap) q0 exactly and
    the assembled w = grad q must match the closed form.
    """
    lat = WaveLattice(4)
    u0 = FourierField.zeros(lat)
    q0 = random_scalar(lat, 1, 3, seed=5)
    cons = magnetization_from_velocity(u0, q0, dt=1e-2, n_steps=10)
    want_q = q0.spec * np.exp(-lat.ksq * 0.1)
    assert np.max(np.abs(cons.final_q.spec - want_q)) < 1e-15
    want_w = gradient(FourierField(lat, want_q))
    assert np.max(np.abs(cons.final_w.spec - want_w.spec)) < 1e-14


def test_potential_march_projects_to_velocity():
    lat = WaveLattice(4)
    u0 = random_state(lat, seed=6, gradient=0.0, divfree=0.5)
    q0 = random_scalar(lat, 1, 2, seed=7, amp=0.4)
    cons = magnetization_from_velocity(u0, q0, dt=2e-3, n_steps=25)
    # P w = u holds structurally: the gradient part projects away
    resid = hs_norm(leray_project(cons.final_w) - cons.final_u, 0.5)
    assert resid < 1e-13


def test_lifted_march_equals_direct_magnetization_march():
    """Lifting u through the potential equation reproduces the direct w march.

    The discrete flows are conjugate: both paths produce the same w
    trajectory down to rounding, not merely to O(dt^4).
    """
    lat = WaveLattice(4)
    u0 = random_state(lat, seed=8, gradient=0.0, divfree=0.5)
    q0 = random_scalar(lat, 1, 2, seed=9, amp=0.4)
    dt, n = 2e-3, 25
    cons = magnetization_from_velocity(u0, q0, dt, n)
    stepper = IFRK4Stepper("magnetization", lat, dt)
    spec = gauge_shift(u0, q0).spec.copy()
    for i in range(n):
        spec = stepper.step(spec, i * dt)
    rel = hs_norm(FourierField(lat, spec) - cons.final_w, 0.5) / hs_norm(
        cons.final_w, 0.5
    )
    assert rel < 1e-12


def test_dual_run_nse_vs_magnetization(lat4):
    u0 = random_state(lat4, seed=10, gradient=0.0, divfree=0.5)
    q0 = random_scalar(lat4, 1, 2, seed=11, amp=0.3)
    w0 = gauge_shift(u0, q0)
    dual = dual_run("nse", u0, "magnetization", w0, 2e-3, 25, every=5)
    assert dual.max_rel < 1e-12
    assert len(dual.times) == 6


def test_dual_run_gauge_pair(lat4):
    w0 = random_state(lat4, seed=12)
    q0 = random_scalar(lat4, 1, 2, seed=13, amp=0.5)
    dual = dual_run(
        "magnetization", w0, "magnetization", gauge_shift(w0, q0), 2e-3, 25, every=5
    )
    assert dual.max_rel < 1e-12
    # the state difference itself stays a pure gradient
    diff = dual.final_b - dual.final_a
    assert gradient_part_norm(diff) > 0.0
    assert hs_norm(leray_project(diff), 0.5) < 1e-12 * gradient_part_norm(diff)


def test_half_speed_squared_taylor_green(lat8):
    u = taylor_green(lat8)
    s = half_speed_squared(u)
    vals = u.values()
    want = 0.5 * np.sum(vals * vals, axis=0)
    assert np.max(np.abs(s.values()[0] - want)) < 1e-14
