import numpy as np
import pytest

from torusflow import initial
from torusflow.lattice import WaveLattice


class AcceptanceLog:
    """Collects one pass/fail line per acceptance criterion for the summary."""

    def __init__(self):
        self.lines = []

    def record(self, criterion: str, passed: bool, detail: str) -> None:
        word = "PASS" if passed else "FAIL"
        self.lines.append(f"{word} {criterion}: {detail}")


_LOG = AcceptanceLog()


@pytest.fixture(scope="session")
def acceptance_log():
    return _LOG


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _LOG.lines:
        terminalreporter.section("acceptance criteria")
        for line in _LOG.lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def lat4():
    return WaveLattice(4)


@pytest.fixture(scope="session")
def lat8():
    return WaveLattice(8)


def random_state(lattice, seed, divfree=0.5, gradient=0.25, mean=None, band=None):
    """Seeded generic magnetization state with both solenoidal and gradient parts."""
    k_min, k_max = band if band else (1, max(1, lattice.max_wavenumber // 2))
    return initial.random_bandlimited(
        lattice,
        k_min,
        k_max,
        slope=-1.0,
        divfree_amp=divfree,
        gradient_amp=gradient,
        seed=seed,
        mean=mean,
    )


def synthetic_window_case(rng):
    """Random sampled (times, A, B, C, f, g) satisfying the window hypothesis.

    A, B, C are nondecreasing with A(0) = 0, B(0) = 0, C(0) >= 0.01; f, g are
    nonnegative and rescaled so that at every sample

        sup_{[0,t]} f + int_0^t g  <=  A sup f + B (int g)^2 + C

    holds on the small-solution branch of the quadratic, which also keeps the
    running total below 1.9 C at the previous sample so the conclusion of the
    window lemma is guaranteed rather than accidental.
    """
    n = int(rng.integers(8, 41))
    incr = rng.uniform(0.02, 1.0, n - 1)
    times = np.concatenate([[0.0], np.cumsum(incr)])
    times *= rng.uniform(0.5, 3.0) / times[-1]

    def ramp(amp):
        steps = np.concatenate([[0.0], np.cumsum(rng.uniform(0.0, 1.0, n - 1))])
        return amp * steps / steps[-1] if steps[-1] > 0 else steps

    a_vals = ramp(rng.uniform(0.0, 0.8))
    b_vals = ramp(rng.uniform(0.0, 1.5))
    c_vals = rng.uniform(0.01, 0.5) + ramp(rng.uniform(0.0, 1.0))

    f_raw = rng.uniform(0.0, 1.0, n)
    g_raw = rng.uniform(0.0, 1.0, n)
    sup_f = np.maximum.accumulate(f_raw)
    int_g = np.concatenate(
        [[0.0], np.cumsum(0.5 * (g_raw[1:] + g_raw[:-1]) * np.diff(times))]
    )
    total = sup_f + int_g

    lam = np.inf
    for i in range(n):
        c_prev = c_vals[max(i - 1, 0)]
        lam = min(lam, 1.9 * c_prev / total[i])
        d = total[i] - a_vals[i] * sup_f[i]
        q = b_vals[i] * int_g[i] ** 2
        if d <= 0.0:
            continue
        if q < 1e-300:
            lam = min(lam, c_vals[i] / d)
            continue
        disc = d * d - 4.0 * q * c_vals[i]
        if disc > 0.0:
            lam = min(lam, (d - np.sqrt(disc)) / (2.0 * q))
    lam *= 0.9

    f_vals = lam * f_raw
    g_vals = lam * g_raw
    lhs = lam * total
    rhs = a_vals * lam * sup_f + b_vals * (lam * int_g) ** 2 + c_vals
    assert np.all(lhs <= rhs), "generator must satisfy its own hypothesis"
    return times, a_vals, b_vals, c_vals, f_vals, g_vals
