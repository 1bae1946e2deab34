"""Run orchestration: output directories, check batteries, and suites.

A run directory contains::

    config.txt     canonical echo of the scenario configuration
    ledger.csv     diagnostics time series (fixed column set)
    ledger_extras.csv   extra columns, if the run tracked any
    snapshots/step_NNNNNNNN.snap   states at the snapshot cadence
    final.snap     last finite state
    status.txt     key = value summary (ok / blowup, final time, backend)

Identical configurations produce byte-identical ledgers and snapshots.
A blow-up is a reported outcome, not a failure -- except for the
`simplified` system, which is globally well-posed, so a blow-up there
raises :class:`SolverFailure`.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import diagnostics, equivalence, initial, kernels, spectral, stepping
from .config import ScenarioConfig
from .diagnostics import DiagnosticsLedger
from .lattice import WaveLattice
from .snapshots import read_snapshot, write_snapshot
from .spectral import FourierField

OUT_ENV_VAR = "TORUSFLOW_OUT"


class SolverFailure(RuntimeError):
    """A run violated a guarantee of the system it was integrating."""


def resolve_out_dir(explicit: str | None = None) -> Path:
    if explicit:
        return Path(explicit)
    env = os.environ.get(OUT_ENV_VAR)
    if env:
        return Path(env)
    return Path("runs")


def run_scenario(cfg: ScenarioConfig, out_dir) -> stepping.EvolveResult:
    """Execute one configured run and persist its artifacts."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lat = cfg.lattice()
    w0 = cfg.initial_field(lat)
    (out / "config.txt").write_text(cfg.echo_text(), encoding="utf-8")

    result = stepping.evolve(
        cfg.system,
        w0,
        cfg.dt,
        cfg.n_steps,
        nu=cfg.nu,
        ledger_every=cfg.ledger_every,
        snapshot_every=cfg.snapshot_every,
        linf_refine=cfg.linf_refine,
        h1_ceiling=cfg.h1_ceiling,
    )

    result.ledger.to_csv(out / "ledger.csv")
    extras = result.ledger.extras_text()
    if extras is not None:
        (out / "ledger_extras.csv").write_text(extras, encoding="utf-8")
    if result.snapshots:
        snap_dir = out / "snapshots"
        snap_dir.mkdir(exist_ok=True)
        for t, field in result.snapshots:
            step = int(round(t / cfg.dt))
            write_snapshot(snap_dir / f"step_{step:08d}.snap", field, t)
    write_snapshot(out / "final.snap", result.final, result.final_time)

    lines = [
        f"status = {'blowup' if result.blew_up else 'ok'}",
        f"final_time = {result.final_time!r}",
        f"steps = {cfg.n_steps}",
        f"kernel_backend = {kernels.backend_name()}",
    ]
    if result.blew_up:
        lines += [
            f"blowup_time = {result.blowup.time!r}",
            f"last_finite_time = {result.blowup.last_finite_time!r}",
            f"blowup_reason = {result.blowup.reason}",
        ]
    (out / "status.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    if result.blew_up and cfg.system == "simplified":
        raise SolverFailure(
            "the simplified system is globally well-posed but the run blew "
            f"up at t = {result.blowup.time:g} ({result.blowup.reason}); "
            "this indicates a solver defect or an unstable dt"
        )
    return result


# ----------------------------------------------------------------------
# check battery on a finished run
# ----------------------------------------------------------------------

#: systems with a sup-norm maximum principle
MAX_PRINCIPLE_TAGS = frozenset({"simplified", "burgers"})
#: systems whose L^2 norm is nonincreasing
ENERGY_DECAY_TAGS = frozenset({"nse"})


@dataclass
class CheckLine:
    name: str
    passed: bool
    detail: str
    worst_time: float = math.nan
    worst_margin: float = math.nan

    def as_csv_row(self) -> str:
        return (
            f"{self.name},{self.worst_time!r},{self.worst_margin!r},"
            f"{'pass' if self.passed else 'fail'}"
        )

    def as_text(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


CHECK_CSV_HEADER = "name,worst_time,worst_margin,result"


def standard_checks(
    system: str, ledger: DiagnosticsLedger, slack: float = 1e-8
) -> list[CheckLine]:
    """The inequality battery appropriate to one system's guarantees."""
    checks: list[CheckLine] = []

    def add(report: diagnostics.EnvelopeReport) -> None:
        checks.append(
            CheckLine(
                report.name,
                report.passed,
                f"worst_margin={report.worst_margin!r} at t={report.worst_time!r}",
                worst_time=report.worst_time,
                worst_margin=report.worst_margin,
            )
        )

    finite = bool(np.all(np.isfinite(ledger.column("h1"))))
    checks.append(
        CheckLine("finite_trajectory", finite, f"rows={len(ledger)}")
    )
    if not finite:
        return checks
    if system in MAX_PRINCIPLE_TAGS:
        add(diagnostics.max_principle_check(ledger, slack=slack))
    if system in ENERGY_DECAY_TAGS:
        add(diagnostics.energy_monotone_check(ledger, "l2", slack=slack))
    if system in ("nse", "simplified"):
        add(diagnostics.momentum_conservation_check(ledger))
    return checks


def check_run(run_dir) -> list[CheckLine]:
    """Re-read a run directory and evaluate its standard checks."""
    run = Path(run_dir)
    cfg = ScenarioConfig.from_file(run / "config.txt")
    ledger = DiagnosticsLedger.from_csv(run / "ledger.csv")
    checks = standard_checks(cfg.system, ledger)
    text = "\n".join(c.as_csv_row() for c in checks) + "\n"
    (run / "checks.csv").write_text(CHECK_CSV_HEADER + "\n" + text, encoding="utf-8")
    return checks


def compare_runs(dir_a, dir_b) -> dict:
    """Compare two finished runs: ledgers column-wise and final states."""
    a, b = Path(dir_a), Path(dir_b)
    led_a = DiagnosticsLedger.from_csv(a / "ledger.csv")
    led_b = DiagnosticsLedger.from_csv(b / "ledger.csv")
    out: dict = {"rows": (len(led_a), len(led_b))}
    n = min(len(led_a), len(led_b))
    col_diff = {}
    for name in diagnostics.LEDGER_COLUMNS:
        va, vb = led_a.column(name)[:n], led_b.column(name)[:n]
        both = np.isfinite(va) & np.isfinite(vb)
        col_diff[name] = float(np.max(np.abs(va[both] - vb[both]), initial=0.0))
    out["ledger_max_abs_diff"] = col_diff
    fa, ta = read_snapshot(a / "final.snap")
    fb, tb = read_snapshot(b / "final.snap")
    out["final_times"] = (ta, tb)
    if fa.lattice == fb.lattice:
        out["final_coeff_max_diff"] = float(np.max(np.abs(fa.spec - fb.spec)))
        diff = fa - fb
        out["final_h_half_diff"] = spectral.hs_norm(diff, 0.5)
    else:
        out["final_coeff_max_diff"] = float("nan")
        out["final_h_half_diff"] = float("nan")
    return out


def format_comparison(rep: dict) -> str:
    lines = [f"rows: {rep['rows'][0]} vs {rep['rows'][1]}"]
    for name, val in rep["ledger_max_abs_diff"].items():
        lines.append(f"ledger {name}: max abs diff {val!r}")
    lines.append(f"final times: {rep['final_times'][0]!r} vs {rep['final_times'][1]!r}")
    lines.append(f"final coeff max diff: {rep['final_coeff_max_diff']!r}")
    lines.append(f"final H^1/2 diff: {rep['final_h_half_diff']!r}")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# named suites
# ----------------------------------------------------------------------


def _suite_smoke() -> list[CheckLine]:
    """Short simplified-system run: finishes, stays bounded, conserves momentum."""
    lat = WaveLattice(4)
    w0 = initial.taylor_green(lat)
    res = stepping.evolve("simplified", w0, 1e-2, 50)
    checks = standard_checks("simplified", res.ledger)
    checks.append(
        CheckLine("completed", not res.blew_up, f"final_time={res.final_time!r}")
    )
    return checks

def _suite_equivalence() -> list[CheckLine]:
    """Velocity and magnetization marches stay projection-consistent."""
    lat = WaveLattice(6)
    u0 = initial.random_bandlimited(lat, 1, 3, slope=-1.0, divfree_amp=0.5, seed=7)
    q0 = initial.random_scalar(lat, 1, 3, amp=0.3, seed=8)
    w0 = equivalence.gauge_shift(u0, q0)
    dual = equivalence.dual_run("nse", u0, "magnetization", w0, 2e-3, 50, every=5)
    tol = 1e-8
    return [
        CheckLine(
            "projection_residual",
            dual.max_rel <= tol,
            f"max_rel={dual.max_rel!r} tol={tol!r}",
        )
    ]


def _suite_gauge() -> list[CheckLine]:
    """Gauge-shifted magnetization data projects to the same velocity flow."""
    lat = WaveLattice(6)
    w0 = initial.random_bandlimited(
        lat, 1, 3, slope=-1.0, divfree_amp=0.5, gradient_amp=0.2, seed=11
    )
    q0 = initial.random_scalar(lat, 1, 3, amp=0.4, seed=12)
    w0_shifted = equivalence.gauge_shift(w0, q0)
    dual = equivalence.dual_run(
        "magnetization", w0, "magnetization", w0_shifted, 2e-3, 50, every=5
    )
    tol = 1e-8
    return [
        CheckLine(
            "gauge_invariance",
            dual.max_rel <= tol,
            f"max_rel={dual.max_rel!r} tol={tol!r}",
        )
    ]


def _suite_calderon() -> list[CheckLine]:
    """Heat/fluctuation split march agrees with the direct march."""
    lat = WaveLattice(6)
    w0 = initial.random_bandlimited(lat, 1, 3, slope=-1.0, divfree_amp=0.5, seed=21)
    # dt small enough that trapezoid error in the energy identity sits
    # well under the 1e-6 tolerance (the defect scales as dt^2)
    dt, n = 2e-4, 250
    direct = stepping.evolve("simplified", w0, dt, n)
    split = stepping.evolve_calderon_split("simplified", w0, dt, n)
    diff = spectral.hs_norm(direct.final - split.final, 0.5)
    heat = diagnostics.heat_estimate_check(split.v_ledger, tol=1e-6)
    return [
        CheckLine(
            "split_vs_direct",
            diff <= 1e-8,
            f"h_half_diff={diff!r}",
            worst_time=direct.final_time,
            worst_margin=1e-8 - diff,
        ),
        CheckLine(
            "v_heat_identity",
            heat.passed,
            heat.summary(),
            worst_time=heat.worst_time,
            worst_margin=heat.worst_margin,
        ),
    ]


SUITES = {
    "smoke": _suite_smoke,
    "equivalence": _suite_equivalence,
    "gauge": _suite_gauge,
    "calderon": _suite_calderon,
}


def run_suite(name: str, out_dir=None) -> list[CheckLine]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; available: {sorted(SUITES)}")
    checks = SUITES[name]()
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        text = "\n".join(c.as_csv_row() for c in checks) + "\n"
        (out / f"suite_{name}.csv").write_text(
            CHECK_CSV_HEADER + "\n" + text, encoding="utf-8"
        )
    return checks
