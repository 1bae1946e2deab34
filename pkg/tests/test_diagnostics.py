"""Checks for the run-ledger toolkit: CSV bookkeeping, inequality reports,
envelope calibration, and the existence-window evaluators."""

import numpy as np
import pytest

from conftest import synthetic_window_case
from torusflow import diagnostics, initial, spectral
from torusflow.diagnostics import (
    DiagnosticsLedger,
    LedgerBuilder,
    calibrate_envelope_constant,
    cumulative_trapezoid,
    envelope_check,
    existence_time_lemma,
    fixed_u_bound_check,
    fixed_u_existence_time,
    h1_blowup_envelope,
    h1_growth_envelope,
    heat_estimate_check,
    max_principle_check,
    momentum_bound_check,
    momentum_conservation_check,
)
from torusflow.dynamics import PrescribedVelocity
from torusflow.lattice import WaveLattice
from torusflow.spectral import FourierField
from torusflow.stepping import evolve, evolve_calderon_split


def _ledger(times, **columns):
    """Ledger with the given columns set and everything else zero."""
    times = np.asarray(times, dtype=np.float64)
    series = {
        name: np.zeros_like(times)
        for name in diagnostics.LEDGER_COLUMNS
        if name != "t"
    }
    for name, vals in columns.items():
        series[name] = np.asarray(vals, dtype=np.float64)
    return DiagnosticsLedger(times=times, series=series, blowup=None)


def _semigroup_ledger(lattice, w0, dt, n, linf_refine=1):
    """Ledger of the exact heat flow of w0 sampled every dt."""
    builder = LedgerBuilder(lattice, linf_refine=linf_refine)
    ksq = lattice.ksq[None, :]
    for i in range(n + 1):
        t = i * dt
        builder.append(t, FourierField(lattice, w0.spec * np.exp(-t * ksq)))
    return builder.finish()


def test_cumulative_trapezoid_matches_a_direct_sum():
    rng = np.random.default_rng(5)
    times = np.concatenate([[0.0], np.cumsum(rng.uniform(0.1, 0.5, 12))])
    vals = rng.uniform(-1.0, 2.0, len(times))
    out = cumulative_trapezoid(times, vals)
    acc, expect = 0.0, [0.0]
    for i in range(1, len(times)):
        acc += 0.5 * (vals[i] + vals[i - 1]) * (times[i] - times[i - 1])
        expect.append(acc)
    assert np.allclose(out, expect, rtol=0, atol=1e-15)
    # exact for a linear integrand
    lin = 3.0 * times + 1.0
    assert np.allclose(
        cumulative_trapezoid(times, lin), 1.5 * times**2 + times, rtol=1e-14
    )


class TestLedgerRoundTrip:
    """The CSV format must reproduce every recorded float bit-for-bit."""

    def test_csv_preserves_floats_exactly(self, lat4, tmp_path):
        w0 = initial.taylor_green(lat4)
        res = evolve("simplified", w0, 1e-3, 10)
        path = tmp_path / "ledger.csv"
        res.ledger.to_csv(path)
        back = DiagnosticsLedger.from_csv(path)
        assert np.array_equal(back.times, res.ledger.times)
        for name in diagnostics.LEDGER_COLUMNS:
            if name == "t":
                continue
            assert np.array_equal(
                back.column(name), res.ledger.column(name), equal_nan=True
            ), name

    def test_blowup_marker_row_survives_the_round_trip(self, lat4, tmp_path):
        builder = LedgerBuilder(lat4)
        builder.append(0.0, initial.taylor_green(lat4))
        builder.append_blowup_marker(0.5)
        led = builder.finish(
            diagnostics.BlowupInfo(time=0.5, last_finite_time=0.0, reason="test")
        )
        path = tmp_path / "ledger.csv"
        led.to_csv(path)
        back = DiagnosticsLedger.from_csv(path)
        assert np.isinf(back.column("h1")[-1])
        assert np.isnan(back.column("resid_half")[-1])
        # the blow-up annotation itself is not serialized
        assert back.blowup is None

    def test_from_csv_rejects_a_foreign_header(self, tmp_path):
        path = tmp_path / "other.csv"
        path.write_text("time,value\n0.0,1.0\n", encoding="utf-8")
        with pytest.raises(ValueError):
            DiagnosticsLedger.from_csv(path)

    def test_velocity_columns_go_to_the_extras_sidecar(self, lat4):
        w0 = initial.taylor_green(lat4)
        builder = LedgerBuilder(lat4, track_velocity=True)
        builder.append(0.0, w0, u=w0)
        led = builder.finish()
        header = led.csv_text().splitlines()[0]
        assert header == ",".join(diagnostics.LEDGER_COLUMNS)
        extras = led.extras_text()
        assert extras is not None
        assert "cum_u32sq" in extras.splitlines()[0]

    def test_inspection_seminorms_up_to_six(self, lat4):
        w0 = initial.taylor_green(lat4)
        builder = LedgerBuilder(lat4, extra_seminorms=(2.5, 6.0))
        builder.append(0.0, w0)
        led = builder.finish()
        assert led.series["h_s2.5"][0] == spectral.sobolev_seminorm(w0, 2.5)
        assert led.series["h_s6"][0] == spectral.sobolev_seminorm(w0, 6.0)
        assert "h_s6" in led.extras_text()


class TestExistenceWindow:
    """The bootstrap-window evaluator on sampled (A, B, C, f, g) data."""

    def test_quiescent_case_runs_to_the_horizon(self):
        times = np.linspace(0.0, 2.0, 9)
        zero = np.zeros_like(times)
        res = existence_time_lemma(
            times,
            zero,
            np.full_like(times, 0.5),
            np.full_like(times, 0.1),
            np.full_like(times, 0.05),
            zero,
        )
        assert res.T == 2.0
        assert res.verified
        assert res.margin == pytest.approx(0.15, abs=1e-15)

    def test_linear_clock_caps_the_window_at_one_half(self):
        times = np.linspace(0.0, 2.0, 9)  # grid hits 0.5 exactly
        zero = np.zeros_like(times)
        res = existence_time_lemma(
            times, times.copy(), zero, np.ones_like(times), zero, zero
        )
        assert res.T == 0.5
        assert res.verified
        assert res.margin == pytest.approx(2.0, abs=1e-15)

    def test_window_is_the_horizon_when_the_clock_stays_low(self):
        times = np.linspace(0.0, 0.4, 5)
        zero = np.zeros_like(times)
        res = existence_time_lemma(
            times, times.copy(), zero, np.ones_like(times), zero, zero
        )
        assert res.T == 0.4

    def test_crossing_between_samples_takes_the_midpoint(self):
        times = np.array([0.0, 0.5, 1.0])
        zero = np.zeros_like(times)
        res = existence_time_lemma(
            times, times**2, zero, np.ones_like(times), zero, zero
        )
        # clock 0, 0.25, 1.0: first sample at or above 1/2 is t = 1.0
        assert res.T == 0.75

    def test_tail_integral_is_interpolated(self):
        times = np.array([0.0, 0.25, 0.75, 1.0])
        zero = np.zeros_like(times)
        res = existence_time_lemma(
            times,
            times.copy(),
            zero,
            np.ones_like(times),
            zero,
            np.ones_like(times),
        )
        assert res.T == 0.5
        assert res.margin == pytest.approx(1.5, abs=1e-15)

    @pytest.mark.parametrize(
        "case", ["b_decreasing", "negative_c", "negative_g", "grid_offset"]
    )
    def test_rejects_data_outside_the_hypothesis(self, case):
        times = np.linspace(0.0, 1.0, 5)
        zero = np.zeros_like(times)
        ones = np.ones_like(times)
        a, b, c, g, t = zero, zero, ones, zero, times
        if case == "b_decreasing":
            b = 1.0 - times
        elif case == "negative_c":
            c = -ones
        elif case == "negative_g":
            g = -ones
        elif case == "grid_offset":
            t = times + 0.1
        with pytest.raises(ValueError):
            existence_time_lemma(t, a, b, c, zero, g)

    def test_clock_starting_past_the_threshold_collapses_the_window(self):
        times = np.linspace(0.0, 1.0, 5)
        zero = np.zeros_like(times)
        ones = np.ones_like(times)
        res = existence_time_lemma(times, ones, zero, ones, 0.5 * ones, zero)
        assert res.T == 0.0
        assert res.margin == pytest.approx(1.5, abs=1e-15)

    def test_split_fluctuation_energy_fits_its_own_window(self):
        lat = WaveLattice(6)
        split = evolve_calderon_split(
            "simplified", initial.taylor_green(lat), 1e-3, 100
        )
        times = split.z_ledger.times
        f = split.z_ledger.column("h_half") ** 2
        g = split.z_ledger.column("h_3half") ** 2
        forcing = cumulative_trapezoid(times, split.v_ledger.column("h1") ** 4)
        # smallest constant making the hypothesis hold at every sample
        cum_g = cumulative_trapezoid(times, g)
        need = np.maximum.accumulate(f) + cum_g - 0.5 * cum_g**2
        pos = forcing > 0.0
        c = float(np.max(need[pos] / forcing[pos]))
        res = existence_time_lemma(
            times,
            np.zeros_like(times),
            np.full_like(times, 0.5),
            c * forcing,
            f,
            g,
        )
        assert res.T == times[-1]
        assert res.verified
        assert res.margin >= 0.0


def test_existence_window_fuzz_conclusion_always_holds():
    rng = np.random.default_rng(424242)
    horizon_hits = 0
    for _ in range(300):
        times, a, b, c, f, g = synthetic_window_case(rng)
        res = existence_time_lemma(times, a, b, c, f, g)
        assert res.verified
        assert res.margin >= 0.0
        # the window stops short of the horizon exactly when the clock crosses
        clock = a + 2.0 * b * c
        crossed = bool(np.any(clock >= 0.5))
        assert (res.T < times[-1]) == crossed
        horizon_hits += not crossed
    # the draw must exercise both outcomes
    assert 0 < horizon_hits < 300


class TestEnvelopes:
    """H^1 growth envelopes, their margins, and constant calibration."""

    def test_blowup_envelope_starts_at_the_initial_square(self):
        times = np.array([0.0, 0.1, 0.2])
        env = h1_blowup_envelope(3.0, 0.001, times)
        assert env[0] == 9.0
        assert np.all(np.diff(env) > 0.0)

    def test_blowup_envelope_is_infinite_past_the_pole(self):
        h1_0, c = 2.0, 0.01
        t_pole = 1.0 / (2.0 * c * h1_0**4)
        times = np.array([0.0, 0.5 * t_pole, t_pole, 2.0 * t_pole])
        env = h1_blowup_envelope(h1_0, c, times)
        assert np.isfinite(env[1])
        assert np.isinf(env[2]) and np.isinf(env[3])

    def test_growth_envelope_is_flat_for_flat_data(self):
        times = np.linspace(0.0, 5.0, 11)
        env = h1_growth_envelope(2.0, 0.0, 0.7, times)
        assert np.all(env == 4.0)

    def test_margins_flip_sign_with_the_constant(self):
        times = np.linspace(0.0, 0.5, 21)
        c0, h0 = 0.02, 2.0
        boundary = np.sqrt(h1_blowup_envelope(h0, c0, times))
        led = _ledger(times, h1=boundary)
        assert envelope_check(led, "blowup", 2.0 * c0).passed
        tight = envelope_check(led, "blowup", 0.5 * c0)
        assert not tight.passed
        assert tight.first_violation_time == times[1]

    def test_calibration_recovers_a_boundary_constant(self):
        times = np.linspace(0.0, 0.5, 21)
        h0, linf0 = 2.0, 1.3
        c_blow, c_grow = 0.02, 0.4
        on_blowup = _ledger(
            times,
            h1=np.sqrt(h1_blowup_envelope(h0, c_blow, times)),
            linf=np.full_like(times, linf0),
        )
        on_growth = _ledger(
            times,
            h1=np.sqrt(h1_growth_envelope(h0, linf0, c_grow, times)),
            linf=np.full_like(times, linf0),
        )
        assert calibrate_envelope_constant([on_blowup], "blowup") == pytest.approx(
            c_blow, rel=1e-12
        )
        assert calibrate_envelope_constant([on_growth], "growth") == pytest.approx(
            c_grow, rel=1e-12
        )

    def test_calibrated_constant_covers_training_and_holdout_runs(self, lat8):
        def run(seed):
            w0 = initial.random_bandlimited(
                lat8, 1, 8, slope=-1.0, divfree_amp=4.0, gradient_amp=2.0, seed=seed
            )
            return evolve("simplified", w0, 2e-3, 60, ledger_every=5).ledger

        training = [run(seed) for seed in range(5)]
        for kind in ("blowup", "growth"):
            c = calibrate_envelope_constant(training, kind)
            assert c >= 1e-6
            for led in training:
                assert envelope_check(led, kind, c).passed
            holdout = envelope_check(run(99), kind, c)
            assert holdout.passed, holdout.summary()

    def test_decaying_runs_calibrate_to_the_floor(self):
        times = np.linspace(0.0, 1.0, 11)
        led = _ledger(times, h1=2.0 * np.exp(-times), linf=np.ones_like(times))
        for kind in ("blowup", "growth"):
            assert calibrate_envelope_constant([led], kind) == 1e-6

    def test_unknown_kind_is_rejected(self):
        led = _ledger([0.0, 1.0], h1=[1.0, 1.0])
        with pytest.raises(ValueError):
            envelope_check(led, "quadratic", 1.0)
        with pytest.raises(ValueError):
            calibrate_envelope_constant([led], "quadratic")


class TestFixedVelocityHorizon:
    """Existence horizon and growth bound for transport by a known velocity."""

    def test_zero_velocity_gives_half_the_horizon(self, lat4):
        zero = FourierField.zeros(lat4)
        builder = LedgerBuilder(lat4)
        for i in range(5):
            builder.append(0.25 * i, zero)
        assert fixed_u_existence_time(builder.finish(), c=1.0) == 0.5

    def test_stronger_transport_shortens_the_horizon(self, lat4):
        base = evolve("nse", initial.taylor_green(lat4, amplitude=0.8), 2e-3, 50)
        horizons = []
        for lam in (1.0, 2.0, 4.0):
            scaled = DiagnosticsLedger(
                base.ledger.times,
                {k: lam * v for k, v in base.ledger.series.items()},
                None,
            )
            horizons.append(fixed_u_existence_time(scaled, c=1e-3))
        assert horizons[0] > horizons[1] >= horizons[2]

    def test_growth_bound_holds_on_an_evolved_trajectory(self, lat4):
        base = evolve(
            "nse", initial.taylor_green(lat4, amplitude=0.8), 2e-3, 50, snapshot_every=1
        )
        traj = PrescribedVelocity.from_fields(
            [t for t, _ in base.snapshots], [f for _, f in base.snapshots]
        )
        w0 = initial.random_bandlimited(
            lat4, 1, 3, slope=-1.0, divfree_amp=0.5, gradient_amp=0.5, seed=7
        )
        res = evolve("linear_fixed_u", w0, 2e-3, 50, u_traj=traj)
        report = fixed_u_bound_check(res.ledger, c=1.0)
        assert report.passed, report.summary()
        assert report.worst_margin > 0.0

    def test_growth_bound_requires_velocity_columns(self, lat4):
        res = evolve("simplified", initial.taylor_green(lat4), 1e-3, 3)
        with pytest.raises(ValueError):
            fixed_u_bound_check(res.ledger, c=1.0)


class TestTrajectoryChecks:
    def test_momentum_conservation_flags_a_drift(self):
        times = np.linspace(0.0, 1.0, 6)
        steady = _ledger(times, mom_x=np.full_like(times, 0.25))
        assert momentum_conservation_check(steady).passed
        drifting = _ledger(times, mom_x=0.25 + 1e-10 * times)
        report = momentum_conservation_check(drifting)
        assert not report.passed
        assert report.worst_time == 1.0

    def test_momentum_bound_on_transported_momentum(self, lat4):
        base = evolve(
            "nse", initial.taylor_green(lat4, amplitude=0.8), 2e-3, 50, snapshot_every=1
        )
        traj = PrescribedVelocity.from_fields(
            [t for t, _ in base.snapshots], [f for _, f in base.snapshots]
        )
        w0 = initial.random_bandlimited(
            lat4,
            1,
            3,
            slope=-1.0,
            divfree_amp=0.5,
            gradient_amp=0.5,
            seed=7,
            mean=(0.2, -0.1, 0.05),
        )
        res = evolve("linear_fixed_u", w0, 2e-3, 50, u_traj=traj)
        report = momentum_bound_check(res.ledger, slack_coeff=0.0)
        assert report.passed, report.summary()
        # the one-sided bound must have been exercised by a genuine drift
        mom = np.hypot(
            np.hypot(res.ledger.column("mom_x"), res.ledger.column("mom_y")),
            res.ledger.column("mom_z"),
        )
        assert np.max(np.abs(mom - mom[0])) > 1e-9

    def test_momentum_bound_requires_velocity_columns(self, lat4):
        res = evolve("simplified", initial.taylor_green(lat4), 1e-3, 3)
        with pytest.raises(ValueError):
            momentum_bound_check(res.ledger)

    def test_heat_identity_holds_at_fine_sampling(self, lat4):
        w0 = initial.random_bandlimited(
            lat4, 1, 3, slope=-1.0, divfree_amp=0.7, gradient_amp=0.3, seed=11
        )
        fine = _semigroup_ledger(lat4, w0, 2e-4, 250)
        report = heat_estimate_check(fine, tol=1e-6)
        assert report.passed, report.summary()

    def test_heat_identity_defect_is_quadrature_limited(self, lat4):
        w0 = initial.random_bandlimited(
            lat4, 1, 3, slope=-1.0, divfree_amp=0.7, gradient_amp=0.3, seed=11
        )
        coarse = _semigroup_ledger(lat4, w0, 1e-3, 50)
        assert not heat_estimate_check(coarse, tol=1e-6).passed
        assert heat_estimate_check(coarse, tol=1e-4).passed

    def test_energy_monotone_check_catches_an_increase(self):
        times = np.linspace(0.0, 1.0, 5)
        rising = _ledger(times, l2=1.0 + times)
        report = diagnostics.energy_monotone_check(rising, "l2", slack=1e-10)
        assert not report.passed
        falling = _ledger(times, l2=1.0 - 0.1 * times)
        assert diagnostics.energy_monotone_check(falling, "l2").passed


def test_heat_semigroup_never_raises_the_grid_sup(lat4):
    for seed in range(20):
        w0 = initial.random_bandlimited(
            lat4, 1, 4, slope=-1.0, divfree_amp=0.6, gradient_amp=0.4, seed=seed
        )
        builder = LedgerBuilder(lat4, linf_refine=2)
        ksq = lat4.ksq[None, :]
        for t in np.linspace(0.0, 0.5, 26):
            builder.append(t, FourierField(lat4, w0.spec * np.exp(-t * ksq)))
        report = max_principle_check(builder.finish(), slack=1e-8)
        assert report.passed, f"seed {seed}: {report.summary()}"


def test_norm_interpolation_between_half_and_three_halves(lat4):
    rng = np.random.default_rng(31)
    m = lat4.grid_size
    for _ in range(50):
        w = FourierField.from_values(lat4, rng.standard_normal((3, m, m, m)))
        mid = spectral.sobolev_seminorm(w, 1.0)
        lo = spectral.sobolev_seminorm(w, 0.5)
        hi = spectral.sobolev_seminorm(w, 1.5)
        assert mid <= np.sqrt(lo * hi) * (1.0 + 1e-12)


def test_seminorms_are_ordered_in_smoothness(lat4):
    rng = np.random.default_rng(32)
    m = lat4.grid_size
    for _ in range(50):
        w = FourierField.from_values(lat4, rng.standard_normal((3, m, m, m)))
        s, t = np.sort(rng.uniform(0.0, 3.0, 2))
        assert spectral.sobolev_seminorm(w, s) <= spectral.sobolev_seminorm(
            w, t
        ) * (1.0 + 1e-12)
