"""Norm ledgers, a priori envelope checks and existence-time evaluators.

The ledger records, per sample time, the norms used by every bound in the
verification suite plus cumulative trapezoid integrals of the dissipation
terms.  Checks return an :class:`EnvelopeReport` carrying the margin
(bound minus observed quantity) at every sample; a check passes when the
margin never goes negative.  Quadrature slack in time-integrated bounds
scales with dt^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import spectral
from .spectral import FourierField

#: Exact column set of the run ledger CSV, in order.
LEDGER_COLUMNS = (
    "t",
    "l2",
    "h_half",
    "h1",
    "h_3half",
    "h2",
    "hnorm_half",
    "linf",
    "mom_x",
    "mom_y",
    "mom_z",
    "cum_h32sq",
    "resid_half",
)


def cumulative_trapezoid(times: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Running trapezoid integral with the same length as the input."""
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    out = np.zeros_like(values)
    if len(times) > 1:
        increments = 0.5 * (values[1:] + values[:-1]) * np.diff(times)
        out[1:] = np.cumsum(increments)
    return out


@dataclass
class BlowupInfo:
    """Record of a detected blow-up: where the march stopped and why."""

    time: float
    last_finite_time: float
    reason: str


@dataclass
class DiagnosticsLedger:
    """Time series of run diagnostics; `series` maps column name to array."""

    times: np.ndarray
    series: dict[str, np.ndarray]
    blowup: BlowupInfo | None = None

    def column(self, name: str) -> np.ndarray:
        if name == "t":
            return self.times
        return self.series[name]

    def __len__(self) -> int:
        return len(self.times)

    # ---------------- CSV round trip ----------------

    def csv_text(self) -> str:
        lines = [",".join(LEDGER_COLUMNS)]
        resid = self.series.get("resid_half")
        for i in range(len(self.times)):
            row = [_fmt(self.times[i])]
            for name in LEDGER_COLUMNS[1:-1]:
                row.append(_fmt(self.series[name][i]))
            row.append("" if resid is None else _fmt(resid[i]))
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.csv_text())

    def extras_text(self) -> str | None:
        extras = {k: v for k, v in self.series.items() if k not in LEDGER_COLUMNS}
        if not extras:
            return None
        names = sorted(extras)
        lines = [",".join(["t"] + names)]
        for i in range(len(self.times)):
            row = [_fmt(self.times[i])] + [_fmt(extras[n][i]) for n in names]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, path) -> "DiagnosticsLedger":
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            if tuple(header) != LEDGER_COLUMNS:
                raise ValueError(f"unexpected ledger header {header}")
            rows = [line.strip().split(",") for line in fh if line.strip()]
        cols = list(zip(*rows)) if rows else [[] for _ in LEDGER_COLUMNS]
        times = np.array([float(x) for x in cols[0]])
        series = {}
        for j, name in enumerate(LEDGER_COLUMNS[1:], start=1):
            vals = [float(x) if x != "" else math.nan for x in cols[j]]
            series[name] = np.array(vals)
        return cls(times=times, series=series)


def _fmt(x: float) -> str:
    """Shortest decimal string that round-trips binary64 exactly."""
    return repr(float(x))


class LedgerBuilder:
    """Accumulates ledger rows during a run."""

    def __init__(
        self,
        lattice,
        linf_refine: int = 2,
        track_velocity: bool = False,
        extra_seminorms: tuple = (),
    ):
        self.lattice = lattice
        self.linf_refine = linf_refine
        self.track_velocity = track_velocity
        # inspection-only columns (e.g. s up to 6); stored in the extras
        # sidecar so the main CSV schema stays fixed
        self.extra_seminorms = tuple(float(s) for s in extra_seminorms)
        self.rows: dict[str, list[float]] = {name: [] for name in LEDGER_COLUMNS}
        self._last_integrand: dict[str, float] = {}
        for s in self.extra_seminorms:
            self.rows[f"h_s{s:g}"] = []
        if track_velocity:
            for name in ("u_half", "u_h1norm", "u_h_3half", "cum_wu_half", "cum_u32sq"):
                self.rows[name] = []

    def append(
        self,
        t: float,
        w: FourierField,
        u: FourierField | None = None,
        resid: float = math.nan,
    ) -> None:
        r = self.rows
        r["t"].append(float(t))
        r["l2"].append(spectral.l2_norm(w))
        h_half = spectral.sobolev_seminorm(w, 0.5)
        h32 = spectral.sobolev_seminorm(w, 1.5)
        r["h_half"].append(h_half)
        r["h1"].append(spectral.sobolev_seminorm(w, 1.0))
        r["h_3half"].append(h32)
        r["h2"].append(spectral.sobolev_seminorm(w, 2.0))
        r["hnorm_half"].append(spectral.hs_norm(w, 0.5))
        r["linf"].append(spectral.linf_norm(w, refine=self.linf_refine))
        mom = w.zeroth_mode()
        r["mom_x"].append(float(mom[0]))
        r["mom_y"].append(float(mom[1]))
        r["mom_z"].append(float(mom[2]))
        self._accumulate("cum_h32sq", h32 * h32)
        r["resid_half"].append(float(resid))
        for s in self.extra_seminorms:
            r[f"h_s{s:g}"].append(spectral.sobolev_seminorm(w, s))
        if self.track_velocity:
            if u is None:
                raise ValueError("ledger tracks a prescribed velocity; none given")
            u_half = spectral.sobolev_seminorm(u, 0.5)
            u32 = spectral.sobolev_seminorm(u, 1.5)
            r["u_half"].append(u_half)
            r["u_h1norm"].append(spectral.hs_norm(u, 1.0))
            r["u_h_3half"].append(u32)
            self._accumulate("cum_wu_half", h_half * u_half)
            self._accumulate("cum_u32sq", u32 * u32)

    def _accumulate(self, name: str, value: float) -> None:
        r = self.rows
        if not r[name]:
            r[name].append(0.0)
        else:
            dt = r["t"][-1] - r["t"][-2]
            prev_val = self._last_integrand.get(name, value)
            r[name].append(r[name][-1] + 0.5 * (prev_val + value) * dt)
        self._last_integrand[name] = value

    def append_blowup_marker(self, t: float) -> None:
        """Terminal row flagging a blow-up: norms recorded as +inf."""
        for name in LEDGER_COLUMNS:
            if name == "t":
                self.rows["t"].append(float(t))
            elif name == "resid_half":
                self.rows[name].append(math.nan)
            else:
                self.rows[name].append(math.inf)
        for name in self.rows:
            if name not in LEDGER_COLUMNS:
                self.rows[name].append(math.inf)

    def finish(self, blowup: BlowupInfo | None = None) -> DiagnosticsLedger:
        times = np.array(self.rows["t"])
        series = {
            name: np.array(vals) for name, vals in self.rows.items() if name != "t"
        }
        return DiagnosticsLedger(times=times, series=series, blowup=blowup)


# ----------------------------------------------------------------------
# envelope reports and checks
# ----------------------------------------------------------------------


@dataclass
class EnvelopeReport:
    """Margin time series for one inequality check (margin >= 0 passes)."""

    name: str
    times: np.ndarray
    margins: np.ndarray
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(np.all(self.margins >= 0.0))

    @property
    def worst_index(self) -> int:
        return int(np.argmin(self.margins))

    @property
    def worst_margin(self) -> float:
        return float(self.margins[self.worst_index])

    @property
    def worst_time(self) -> float:
        return float(self.times[self.worst_index])

    @property
    def first_violation_time(self) -> float | None:
        bad = np.nonzero(self.margins < 0.0)[0]
        return float(self.times[bad[0]]) if len(bad) else None

    def summary(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return (
            f"{self.name}: {status} (worst margin {self.worst_margin:.6e} "
            f"at t={self.worst_time:g})"
        )


def max_principle_check(ledger: DiagnosticsLedger, slack: float = 1e-8) -> EnvelopeReport:
    """Sup-norm bound ||w(t)||_inf <= ||w(0)||_inf + slack at every sample."""
    linf = ledger.column("linf")
    margins = (linf[0] + slack) - linf
    return EnvelopeReport(
        "max_principle", ledger.times.copy(), margins, {"slack": slack}
    )


def momentum_conservation_check(
    ledger: DiagnosticsLedger, tol: float = 1e-13
) -> EnvelopeReport:
    """|what_0(t) - what_0(0)| <= tol for momentum-conserving systems."""
    mom = np.stack(
        [ledger.column("mom_x"), ledger.column("mom_y"), ledger.column("mom_z")]
    )
    drift = np.sqrt(np.sum((mom - mom[:, :1]) ** 2, axis=0))
    return EnvelopeReport(
        "momentum_conservation", ledger.times.copy(), tol - drift, {"tol": tol}
    )


def momentum_bound_check(
    ledger: DiagnosticsLedger, constant: float = 2.0, slack_coeff: float = 1.0
) -> EnvelopeReport:
    """Zero-mode growth bound for the fixed-velocity linear system.

    |what_0(t)| <= |what_0(0)| + constant * int_0^t ||w||_{1/2} ||u||_{1/2}
    plus a quadrature slack proportional to dt^2.
    """
    if "cum_wu_half" not in ledger.series:
        raise ValueError("ledger does not track a prescribed velocity")
    mom = np.stack(
        [ledger.column("mom_x"), ledger.column("mom_y"), ledger.column("mom_z")]
    )
    amp = np.sqrt(np.sum(mom**2, axis=0))
    cum = ledger.column("cum_wu_half")
    dts = np.diff(ledger.times)
    dt = float(np.max(dts)) if len(dts) else 0.0
    integrand_scale = float(
        np.max(ledger.column("h_half") * ledger.column("u_half"), initial=0.0)
    )
    slack = slack_coeff * dt * dt * (1.0 + ledger.times) * integrand_scale
    bound = amp[0] + constant * cum + slack
    return EnvelopeReport(
        "momentum_bound",
        ledger.times.copy(),
        bound - amp,
        {"constant": constant, "slack_coeff": slack_coeff},
    )


def heat_estimate_check(
    ledger: DiagnosticsLedger, tol: float = 1e-6, prefix: str = ""
) -> EnvelopeReport:
    """Energy identity of the heat flow in the 1/2-norm.

    ||v(t)||_{1/2}^2 + 2 int_0^t ||v||_{3/2}^2 ds = ||v(0)||_{1/2}^2 holds
    exactly for the heat semigroup; the check verifies it to a relative
    quadrature tolerance.  With `prefix` it runs on the v-part columns of a
    split run instead of the main field.
    """
    h_half = ledger.column(prefix + "h_half")
    cum = ledger.column(prefix + "cum_h32sq")
    lhs = h_half**2 + 2.0 * cum
    defect = np.abs(lhs - h_half[0] ** 2)
    allowed = tol * max(h_half[0] ** 2, 1e-300)
    return EnvelopeReport(
        "heat_estimate", ledger.times.copy(), allowed - defect, {"tol": tol}
    )


def energy_monotone_check(
    ledger: DiagnosticsLedger, column: str = "l2", slack: float = 1e-10
) -> EnvelopeReport:
    """Column nonincreasing in time within slack (e.g. NSE energy)."""
    vals = ledger.column(column)
    drops = np.concatenate([[0.0], np.diff(vals)])
    return EnvelopeReport(
        f"{column}_nonincreasing", ledger.times.copy(), slack - drops, {"slack": slack}
    )


# ----------------------------------------------------------------------
# H^1 envelopes and calibration
# ----------------------------------------------------------------------


def h1_blowup_envelope(h1_0: float, c: float, times: np.ndarray) -> np.ndarray:
    """Finite-time bound ||w(t)||_1^2 <= h1_0^2 / sqrt(1 - 2 c t h1_0^4).

    Returns +inf at and beyond the vanishing denominator.
    """
    times = np.asarray(times, dtype=np.float64)
    den = 1.0 - 2.0 * c * times * h1_0**4
    out = np.full_like(times, np.inf)
    ok = den > 0.0
    out[ok] = h1_0**2 / np.sqrt(den[ok])
    return out


def h1_growth_envelope(
    h1_0: float, linf_0: float, c: float, times: np.ndarray
) -> np.ndarray:
    """Global-in-time bound ||w(t)||_1^2 <= h1_0^2 exp(c t ||w(0)||_inf^2)."""
    times = np.asarray(times, dtype=np.float64)
    return h1_0**2 * np.exp(c * times * linf_0**2)


def envelope_check(
    ledger: DiagnosticsLedger, kind: str, c: float
) -> EnvelopeReport:
    """Compare the H^1 ledger against one of the two a priori envelopes."""
    h1 = ledger.column("h1")
    if kind == "blowup":
        env = h1_blowup_envelope(h1[0], c, ledger.times)
    elif kind == "growth":
        env = h1_growth_envelope(h1[0], ledger.column("linf")[0], c, ledger.times)
    else:
        raise ValueError(f"unknown envelope kind {kind!r}")
    margins = env - h1**2
    margins = np.where(np.isinf(env), np.inf, margins)
    return EnvelopeReport(f"h1_{kind}_envelope", ledger.times.copy(), margins, {"c": c})


def calibrate_envelope_constant(
    ledgers, kind: str, floor: float = 1e-6
) -> float:
    """Smallest constant keeping the chosen envelope above all given runs."""
    c_needed = floor
    for led in ledgers:
        h1 = led.column("h1")
        t = led.times
        pos = t > 0.0
        if h1[0] == 0.0 or not np.any(pos):
            continue
        if kind == "blowup":
            ratio = (h1[0] ** 2 / np.maximum(h1[pos] ** 2, 1e-300)) ** 2
            cands = (1.0 - ratio) / (2.0 * t[pos] * h1[0] ** 4)
        elif kind == "growth":
            linf0 = led.column("linf")[0]
            cands = np.log(np.maximum(h1[pos] ** 2, 1e-300) / h1[0] ** 2) / (
                t[pos] * linf0**2
            )
        else:
            raise ValueError(f"unknown envelope kind {kind!r}")
        c_needed = max(c_needed, float(np.max(cands)))
    return c_needed


# ----------------------------------------------------------------------
# existence-time evaluators
# ----------------------------------------------------------------------


@dataclass
class LemmaResult:
    T: float
    verified: bool
    margin: float


def _threshold_scan(times: np.ndarray, vals: np.ndarray) -> float:
    """Supremum of {t : vals(t) < 1/2} with a half-step-back convention.

    The first sample at or above the threshold ends the scan; if it sits
    exactly on the threshold its own time is the supremum, otherwise the
    midpoint of the bracketing samples is returned.
    """
    above = np.nonzero(vals >= 0.5)[0]
    if len(above) == 0:
        return float(times[-1])
    i = int(above[0])
    if vals[i] == 0.5:
        return float(times[i])
    if i == 0:
        return float(times[0])
    return float(0.5 * (times[i - 1] + times[i]))


def _interp(times: np.ndarray, vals: np.ndarray, t: float) -> float:
    return float(np.interp(t, times, vals))


def existence_time_lemma(
    times,
    a_vals,
    b_vals,
    c_vals,
    f_vals,
    g_vals,
    pre_tol: float = 1e-12,
) -> LemmaResult:
    """Existence window from the bootstrap inequality on sampled trajectories.

    Given nondecreasing nonnegative A, B, C, the window is
    T = sup{t : A + 2 B C < 1/2}; when the hypothesis

        sup_{[0,t]} f + int_0^t g <= A(t) sup f + B(t) (int g)^2 + C(t)

    holds and the clock A + 2 B C starts below 1/2, the conclusion
    sup_{[0,T]} f + int_0^T g <= 2 C(T) follows.  A clock already at or
    above 1/2 at t = 0 collapses the window to T = 0 rather than raising.
    Returns the window together with the verified conclusion margin.
    """
    times = np.asarray(times, dtype=np.float64)
    a_vals, b_vals, c_vals = (
        np.asarray(x, dtype=np.float64) for x in (a_vals, b_vals, c_vals)
    )
    f_vals = np.asarray(f_vals, dtype=np.float64)
    g_vals = np.asarray(g_vals, dtype=np.float64)
    if times[0] != 0.0:
        raise ValueError("sample grid must start at t = 0")
    for name, arr in (("A", a_vals), ("B", b_vals), ("C", c_vals)):
        if np.any(arr < -pre_tol):
            raise ValueError(f"{name} must be nonnegative")
        if np.any(np.diff(arr) < -pre_tol):
            raise ValueError(f"{name} must be nondecreasing")
    if np.any(g_vals < -pre_tol):
        raise ValueError("g must be nonnegative")

    T = _threshold_scan(times, a_vals + 2.0 * b_vals * c_vals)
    sel = times <= T
    sup_f = float(np.max(f_vals[sel]))
    if T > times[sel][-1]:
        sup_f = max(sup_f, _interp(times, f_vals, T))
    # integral of g over [0, T] including a partial last interval
    cum_g = cumulative_trapezoid(times, g_vals)
    int_g = _interp(times, cum_g, T)
    c_at_t = _interp(times, c_vals, T)
    margin = 2.0 * c_at_t - (sup_f + int_g)
    return LemmaResult(T=T, verified=bool(margin >= 0.0), margin=float(margin))


def fixed_u_existence_time(u_ledger: DiagnosticsLedger, c: float) -> float:
    """Existence horizon for transport by the ledgered velocity trajectory.

    T' = (1/2) sup{ t : c I1(t) + c t I2(t) I3(t) < 1/2 } where
    I1 = int (||u||_{H^1}^4 + ||u||_{3/2}^2), I2 = int ||u||_{3/2}^2,
    I3 = int ||u||_{1/2}^2, all read off the velocity's own ledger.
    """
    times = u_ledger.times
    h1n = np.hypot(u_ledger.column("l2"), u_ledger.column("h1"))
    h32 = u_ledger.column("h_3half")
    hh = u_ledger.column("h_half")
    i1 = cumulative_trapezoid(times, h1n**4 + h32**2)
    i2 = cumulative_trapezoid(times, h32**2)
    i3 = cumulative_trapezoid(times, hh**2)
    vals = c * i1 + c * times * i2 * i3
    return 0.5 * _threshold_scan(times, vals)


def fixed_u_bound_check(
    ledger: DiagnosticsLedger, c: float, t_max: float | None = None
) -> EnvelopeReport:
    """Growth bound ||w(t)||_{1/2} <= 2 ||w(0)||_{H^{1/2}} (1 + c int ||u||_{3/2}^2)^{1/2}."""
    if "cum_u32sq" not in ledger.series:
        raise ValueError("ledger does not track a prescribed velocity")
    sel = (
        ledger.times <= t_max if t_max is not None else np.ones_like(ledger.times, bool)
    )
    h_half = ledger.column("h_half")[sel]
    w0_full = ledger.column("hnorm_half")[0]
    bound = 2.0 * w0_full * np.sqrt(1.0 + c * ledger.column("cum_u32sq")[sel])
    return EnvelopeReport(
        "fixed_u_bound", ledger.times[sel].copy(), bound - h_half, {"c": c}
    )
