"""INI-style run configuration.

Every dimensionful quantity carries an explicit unit suffix: `au` for atomic
units or `hw01` for multiples of the 0->1 transition quantum (temperature
only). Example:

    [molecule]
    preset = HI

    [state]
    nbar = 4

    [bath]
    delta = 540 au
    temperature = 10 hw01

    [time]
    snapshots = 0.125 0.25

    [grid]
    x_min = -0.4
    x_max = 0.8
    n_x = 256
    p_min = -12
    p_max = 12
    n_p = 256

    [output]
    dir = out
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .basis import HI_PRESET, MorseParams
from .errors import ConfigError
from .wigner import GridSpec

__all__ = ["RunConfig", "Quantity", "parse_config", "default_config"]

PRESETS = {"HI": HI_PRESET}


@dataclass(frozen=True)
class Quantity:
    value: float
    unit: str    # "au" | "hw01"

    def in_au(self, w01: float | None = None) -> float:
        if self.unit == "au":
            return self.value
        if self.unit == "hw01":
            if w01 is None:
                raise ConfigError("hw01 unit needs the 0->1 transition frequency")
            return self.value * w01
        raise ConfigError(f"unknown unit {self.unit!r}")


def _parse_quantity(raw: str, section: str, key: str) -> Quantity:
    parts = raw.split()
    if len(parts) != 2 or parts[1] not in ("au", "hw01"):
        raise ConfigError(
            f"[{section}] {key} = {raw!r}: expected '<number> au' or '<number> hw01'")
    try:
        return Quantity(value=float(parts[0]), unit=parts[1])
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r}: not a number") from exc


@dataclass
class RunConfig:
    molecule: MorseParams
    # exactly one of alpha / eta / nbar is set
    alpha: float | None = None
    eta: float | None = None
    nbar: float | None = None
    delta: Quantity = field(default_factory=lambda: Quantity(0.0, "au"))
    temperature: Quantity = field(default_factory=lambda: Quantity(0.0, "au"))
    snapshots: tuple[float, ...] = (0.125,)   # fractions of T_rev
    t_final: Quantity | None = None           # optional, else max snapshot
    grid: GridSpec = field(default_factory=GridSpec)
    out_dir: Path = Path("out")
    threads: int = 1

    def __post_init__(self):
        n_set = sum(v is not None for v in (self.alpha, self.eta, self.nbar))
        if n_set != 1:
            raise ConfigError("exactly one of alpha, eta, nbar must be specified")
        for f in self.snapshots:
            if not 0 < f <= 1:
                raise ConfigError(f"snapshot fraction {f} outside (0, 1]")


def default_config() -> RunConfig:
    return RunConfig(molecule=HI_PRESET, nbar=4.0,
                     delta=Quantity(0.0, "au"), temperature=Quantity(10.0, "hw01"))


def _molecule_from(section: configparser.SectionProxy) -> MorseParams:
    if "preset" in section:
        name = section["preset"].strip()
        if name not in PRESETS:
            raise ConfigError(f"[molecule] preset = {name!r}: known presets "
                              f"{sorted(PRESETS)}")
        return PRESETS[name]
    fields = {}
    for key in ("D", "beta", "r0", "mu"):
        if key not in section:
            raise ConfigError(f"[molecule] missing field {key!r} "
                              "(or use 'preset = HI')")
        raw = section[key].split()
        try:
            fields[key] = float(raw[0])
        except (ValueError, IndexError) as exc:
            raise ConfigError(f"[molecule] {key} = {section[key]!r}: not a number") from exc
    return MorseParams(**fields)


def parse_config(path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if "molecule" not in cp:
        raise ConfigError(f"{path}: missing [molecule] section")
    molecule = _molecule_from(cp["molecule"])

    kwargs: dict = {"molecule": molecule}
    state = cp["state"] if "state" in cp else {}
    for key in ("alpha", "eta", "nbar"):
        if key in state:
            try:
                kwargs[key] = float(state[key])
            except ValueError as exc:
                raise ConfigError(f"[state] {key} = {state[key]!r}: not a number") from exc

    if "bath" in cp:
        bath = cp["bath"]
        if "delta" in bath:
            kwargs["delta"] = _parse_quantity(bath["delta"], "bath", "delta")
        if "temperature" in bath:
            kwargs["temperature"] = _parse_quantity(bath["temperature"], "bath",
                                                    "temperature")
    if "time" in cp:
        sec = cp["time"]
        if "snapshots" in sec:
            try:
                kwargs["snapshots"] = tuple(float(v) for v in sec["snapshots"].split())
            except ValueError as exc:
                raise ConfigError(f"[time] snapshots = {sec['snapshots']!r}") from exc
        if "t_final" in sec:
            kwargs["t_final"] = _parse_quantity(sec["t_final"], "time", "t_final")
    if "grid" in cp:
        g = cp["grid"]
        spec = {}
        for key, conv in (("x_min", float), ("x_max", float), ("n_x", int),
                          ("p_min", float), ("p_max", float), ("n_p", int),
                          ("half_width", float), ("dx_prime", float)):
            if key in g:
                try:
                    spec[key] = conv(g[key])
                except ValueError as exc:
                    raise ConfigError(f"[grid] {key} = {g[key]!r}") from exc
        kwargs["grid"] = GridSpec(**spec)
    if "output" in cp and "dir" in cp["output"]:
        kwargs["out_dir"] = Path(cp["output"]["dir"])
    return RunConfig(**kwargs)
