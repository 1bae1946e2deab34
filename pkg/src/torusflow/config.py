"""Run configuration: a flat UTF-8 ``key = value`` file, strictly validated.

Blank lines and ``#`` comments are ignored.  Every key must belong to the
schema below; unknown or duplicate keys are hard errors so a typo cannot
silently fall back to a default.  Exactly one of ``steps`` / ``t_end``
fixes the run length (``t_end`` must be an integer multiple of ``dt``).
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from . import initial as initial_mod
from .dynamics import SYSTEM_TAGS
from .lattice import WaveLattice
from .snapshots import read_snapshot
from .spectral import FourierField

INITIAL_KINDS = ("taylor_green", "abc", "random", "snapshot")

#: key -> (python type, default).  A default of ... means "no default".
SCHEMA: dict[str, tuple[type, object]] = {
    "system": (str, "simplified"),
    "max_wavenumber": (int, 8),
    "grid_size": (int, 0),  # 0 = dealiasing-safe minimum
    "nu": (float, 1.0),
    "dt": (float, 1e-3),
    "steps": (int, 0),
    "t_end": (float, 0.0),
    "initial": (str, "taylor_green"),
    "amplitude": (float, 1.0),
    "abc_a": (float, 1.0),
    "abc_b": (float, 1.0),
    "abc_c": (float, 1.0),
    "k_min": (int, 1),
    "k_max": (int, 2),
    "slope": (float, 0.0),
    "divfree_amp": (float, 1.0),
    "gradient_amp": (float, 0.0),
    "seed": (int, 0),
    "mean_x": (float, 0.0),
    "mean_y": (float, 0.0),
    "mean_z": (float, 0.0),
    "snapshot_path": (str, ""),
    "ledger_every": (int, 1),
    "snapshot_every": (int, 0),
    "linf_refine": (int, 2),
    "h1_ceiling": (float, 1.0e6),
}


def parse_config_text(text: str) -> dict:
    """Parse the flat file into a fully-defaulted, type-checked dict."""
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in SCHEMA:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        typ, _default = SCHEMA[key]
        try:
            values[key] = typ(val)
        except ValueError as exc:
            raise ValueError(
                f"line {lineno}: cannot parse {key} = {val!r} as {typ.__name__}"
            ) from exc
    for key, (_typ, default) in SCHEMA.items():
        values.setdefault(key, default)
    return values


@dataclass
class ScenarioConfig:
    system: str
    max_wavenumber: int
    grid_size: int
    nu: float
    dt: float
    steps: int
    t_end: float
    initial: str
    amplitude: float
    abc_a: float
    abc_b: float
    abc_c: float
    k_min: int
    k_max: int
    slope: float
    divfree_amp: float
    gradient_amp: float
    seed: int
    mean_x: float
    mean_y: float
    mean_z: float
    snapshot_path: str
    ledger_every: int
    snapshot_every: int
    linf_refine: int
    h1_ceiling: float

    @classmethod
    def from_text(cls, text: str) -> "ScenarioConfig":
        cfg = cls(**parse_config_text(text))
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_text(fh.read())

    def validate(self) -> None:
        if self.system not in SYSTEM_TAGS:
            raise ValueError(
                f"unknown system {self.system!r}; expected one of {SYSTEM_TAGS}"
            )
        if self.system == "linear_fixed_u":
            raise ValueError(
                "system linear_fixed_u transports by an in-process velocity "
                "trajectory and cannot be configured from a file"
            )
        if self.initial not in INITIAL_KINDS:
            raise ValueError(
                f"unknown initial kind {self.initial!r}; expected one of "
                f"{INITIAL_KINDS}"
            )
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if (self.steps > 0) == (self.t_end > 0.0):
            raise ValueError("set exactly one of steps / t_end")
        if self.t_end > 0.0:
            n = self.t_end / self.dt
            if abs(n - round(n)) > 1e-9 * max(1.0, abs(n)):
                raise ValueError("t_end must be an integer multiple of dt")
        if self.initial == "snapshot" and not self.snapshot_path:
            raise ValueError("initial = snapshot requires snapshot_path")

    @property
    def n_steps(self) -> int:
        return self.steps if self.steps > 0 else int(round(self.t_end / self.dt))

    def lattice(self) -> WaveLattice:
        gs = self.grid_size if self.grid_size > 0 else None
        return WaveLattice(self.max_wavenumber, gs)

    def initial_field(self, lattice: WaveLattice | None = None) -> FourierField:
        lat = lattice if lattice is not None else self.lattice()
        if self.initial == "taylor_green":
            return initial_mod.taylor_green(lat, self.amplitude)
        if self.initial == "abc":
            return initial_mod.abc(lat, self.abc_a, self.abc_b, self.abc_c)
        if self.initial == "random":
            mean = (self.mean_x, self.mean_y, self.mean_z)
            if mean == (0.0, 0.0, 0.0):
                mean = None
            return initial_mod.random_bandlimited(
                lat,
                self.k_min,
                self.k_max,
                slope=self.slope,
                divfree_amp=self.divfree_amp,
                gradient_amp=self.gradient_amp,
                seed=self.seed,
                mean=mean,
            )
        field, _time = read_snapshot(self.snapshot_path)
        if field.lattice != lat:
            raise ValueError(
                f"snapshot lattice {field.lattice!r} does not match "
                f"configured lattice {lat!r}"
            )
        return field

    def echo_text(self) -> str:
        """Canonical config text with every key explicit (run record)."""
        lines = []
        for f in fields(self):
            lines.append(f"{f.name} = {getattr(self, f.name)}")
        return "\n".join(lines) + "\n"
