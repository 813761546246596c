"""Simulation configuration: domain types and the sectioned key-value loader.

Config files have four sections, ``[barrier]``, ``[packet]``, ``[drive]`` and
``[run]``.  Every dimensional key carries its unit as a suffix
(``mass_mev``, ``x0_fm``, ``omega_hz`` ...).  Unknown keys are rejected.
See ``docs/config.md`` for the full key list.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import units
from .drive import DriveSpec, read_drive_table
from .precision import Tier, as_tier


class ConfigError(ValueError):
    """Malformed or invalid configuration."""


@dataclass(frozen=True)
class BarrierConfig:
    """Symmetric double barrier.

    ``kind="square"``: height ``gamma`` (fm^-1) on ``x0 < |x| < d``.
    ``kind="delta"``: ``nu * delta(|x| - x0)`` with dimensionless ``nu``;
    ``gamma`` and ``d`` are kept only as provenance when ``nu`` was derived.
    """

    mass: float
    gamma: float | None
    x0: float
    d: float | None
    kind: str = "square"
    nu: float | None = None

    def __post_init__(self):
        if not self.mass > 0:
            raise ConfigError(f"barrier mass must be > 0, got {self.mass}")
        if not self.x0 > 0:
            raise ConfigError(f"x0 must be > 0, got {self.x0}")
        if self.kind == "square":
            if self.gamma is None or not self.gamma > 0:
                raise ConfigError(f"barrier gamma must be > 0, got {self.gamma}")
            if self.d is None or not self.d > self.x0:
                raise ConfigError(f"square barrier needs 0 < x0 < d, got x0={self.x0}, d={self.d}")
        elif self.kind == "delta":
            if self.nu is None or not self.nu > 0:
                raise ConfigError(f"delta barrier needs nu > 0, got {self.nu}")
        else:
            raise ConfigError(f"unknown barrier kind {self.kind!r}")

    @classmethod
    def square(cls, mass, gamma, x0, d):
        return cls(mass=mass, gamma=gamma, x0=x0, d=d, kind="square")

    @classmethod
    def delta(cls, mass, nu, x0):
        return cls(mass=mass, gamma=None, x0=x0, d=None, kind="delta", nu=nu)

    @property
    def p(self) -> float:
        """Momentum at the barrier top, sqrt(2 m gamma)."""
        return math.sqrt(2.0 * self.mass * self.gamma)

    def equivalent_delta(self, nu: float | None = None) -> "BarrierConfig":
        """Delta barrier with the same integrated strength, nu = gamma (d - x0)."""
        if self.kind != "square":
            raise ConfigError("equivalent_delta needs a square barrier")
        nu = self.gamma * (self.d - self.x0) if nu is None else nu
        return BarrierConfig(mass=self.mass, gamma=self.gamma, x0=self.x0, d=self.d, kind="delta", nu=nu)


def alpha_barrier() -> BarrierConfig:
    """Alpha-decay barrier: m = 3727 MeV, gamma = 22 MeV, x0 = 12 fm, d = 22 fm."""
    return BarrierConfig.square(units.mev_to_invfm(3727.0), units.mev_to_invfm(22.0), 12.0, 22.0)


@dataclass(frozen=True)
class PacketSpec:
    """Initial Gaussian ``exp(-x**2 / width**2)`` centred between the barriers.

    ``normalization="unit"`` scales the packet to unit L2 norm;
    ``"bare"`` keeps the bare exponential with the unnormalized prefactors.
    """

    width: float
    normalization: str = "unit"

    def __post_init__(self):
        if not self.width > 0:
            raise ConfigError(f"packet width must be > 0, got {self.width}")
        if self.normalization not in ("unit", "bare"):
            raise ConfigError(f"packet normalization must be 'unit' or 'bare', got {self.normalization!r}")

    def well_localized(self, barrier: BarrierConfig) -> bool:
        return self.width < barrier.x0


@dataclass(frozen=True)
class TimeGrid:
    """Sample times; ``unit`` is ``fm``, ``s`` or ``tau`` (dominant-pole lifetime)."""

    start: float
    stop: float
    count: int
    unit: str = "fm"
    spacing: str = "linear"

    def __post_init__(self):
        if self.unit not in ("fm", "s", "tau"):
            raise ConfigError(f"time unit must be fm, s or tau, got {self.unit!r}")
        if self.spacing not in ("linear", "log"):
            raise ConfigError(f"time spacing must be linear or log, got {self.spacing!r}")
        if self.count < 1:
            raise ConfigError("time grid needs at least one sample")
        if self.start < 0 or (self.count > 1 and not self.stop > self.start):
            raise ConfigError("time grid must be strictly increasing from start >= 0")
        if self.spacing == "log" and not self.start > 0:
            raise ConfigError("log-spaced time grid needs start > 0")

    def resolve(self, tau_fm: float | None = None) -> np.ndarray:
        """Times in fm."""
        if self.count == 1:
            raw = np.array([self.start])
        elif self.spacing == "log":
            raw = np.geomspace(self.start, self.stop, self.count)
        else:
            raw = np.linspace(self.start, self.stop, self.count)
        if self.unit == "s":
            return units.seconds_to_fm(raw)
        if self.unit == "tau":
            if tau_fm is None:
                raise ConfigError("time grid in units of tau needs a pole catalog")
            return raw * tau_fm
        return raw


@dataclass(frozen=True)
class SimulationConfig:
    barrier: BarrierConfig
    packet: PacketSpec
    drive: DriveSpec
    times: TimeGrid
    poles_even: int = 5
    poles_odd: int = 5
    quadrature_order: int = 64
    precision: Tier = Tier.EXTENDED
    # when set, mu is chosen so the largest pole rotation angle hits this value
    max_rotation: float | None = None
    fit_window: tuple[float, float] = (0.5, 3.0)
    workers: int = 1
    source: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.poles_even < 1 or self.poles_odd < 1:
            raise ConfigError("pole counts per sector must be >= 1")
        if self.quadrature_order < 2:
            raise ConfigError("quadrature order must be >= 2")
        if self.max_rotation is not None and not self.max_rotation > 0:
            raise ConfigError("max_rotation must be > 0")
        if not 0 <= self.fit_window[0] < self.fit_window[1]:
            raise ConfigError("fit window must satisfy 0 <= start < stop")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        object.__setattr__(self, "precision", as_tier(self.precision))

    def with_(self, **changes) -> "SimulationConfig":
        return replace(self, **changes)


_KEYS = {
    "barrier": {"kind", "mass_mev", "mass_invfm", "gamma_mev", "gamma_invfm", "x0_fm", "d_fm", "nu"},
    "packet": {"width_fm", "normalization"},
    "drive": {
        "kind", "mu_invfm2", "field_v_per_m", "charge_multiple", "max_rotation",
        "omega_hz", "omega_invfm", "table_path",
    },
    "run": {
        "poles_even", "poles_odd", "t_start", "t_stop", "t_count", "t_unit", "t_spacing",
        "quadrature_order", "precision", "fit_window_tau", "workers",
    },
}


class _Reader:
    def __init__(self, parser, text, origin):
        self.parser = parser
        self.lines = text.splitlines()
        self.origin = origin

    def line_of(self, section, key):
        in_section = False
        for i, line in enumerate(self.lines, 1):
            s = line.strip()
            if s.startswith("["):
                in_section = s.strip("[] ").lower() == section
            elif in_section and re.match(rf"{re.escape(key)}\s*[=:]", s, re.IGNORECASE):
                return i
        return None

    def fail(self, section, key, msg):
        line = self.line_of(section, key) if key else None
        where = f"{self.origin}:{line}" if line else self.origin
        raise ConfigError(f"{where}: [{section}] {key + ': ' if key else ''}{msg}")

    def has(self, section, key):
        return self.parser.has_option(section, key)

    def str(self, section, key, default=None):
        if not self.has(section, key):
            if default is None:
                self.fail(section, key, "missing required key")
            return default
        return self.parser.get(section, key).strip()

    def float(self, section, key, default=None):
        if not self.has(section, key):
            if default is None:
                self.fail(section, key, "missing required key")
            return default
        raw = self.parser.get(section, key)
        try:
            value = float(raw)
        except ValueError:
            self.fail(section, key, f"not a number: {raw!r}")
        if not math.isfinite(value):
            self.fail(section, key, f"must be finite, got {raw!r}")
        return value

    def int(self, section, key, default=None):
        value = self.float(section, key, default)
        if value != int(value):
            self.fail(section, key, f"must be an integer, got {value}")
        return int(value)

    def one_of(self, section, keys, required=True):
        present = [k for k in keys if self.has(section, k)]
        if len(present) > 1:
            self.fail(section, present[1], f"conflicts with {present[0]}")
        if not present and required:
            self.fail(section, None, f"needs one of {', '.join(keys)}")
        return present[0] if present else None


def load_config(source, origin: str | None = None) -> SimulationConfig:
    """Parse and validate a configuration.

    ``source`` is a path or the config text itself.  Parse errors carry the
    offending line; validation errors name the violated invariant.
    """
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and "[" not in source):
        path = Path(source)
        text = path.read_text()
        origin = origin or str(path)
        base_dir = path.parent
    else:
        text = str(source)
        origin = origin or "<config>"
        base_dir = Path.cwd()

    parser = configparser.ConfigParser(interpolation=None, strict=True)
    try:
        parser.read_string(text, source=origin)
    except configparser.Error as exc:
        raise ConfigError(f"parse error: {exc}") from exc

    r = _Reader(parser, text, origin)
    for section in parser.sections():
        if section not in _KEYS:
            r.fail(section, None, "unknown section")
        for key in parser.options(section):
            if key not in _KEYS[section]:
                r.fail(section, key, "unknown key")
    for section in ("barrier", "packet", "run"):
        if not parser.has_section(section):
            raise ConfigError(f"{origin}: missing section [{section}]")

    try:
        barrier = _barrier(r)
        packet = PacketSpec(r.float("packet", "width_fm"), r.str("packet", "normalization", "unit"))
        drive, max_rotation = _drive(r, base_dir)
        times = TimeGrid(
            start=r.float("run", "t_start", 0.0),
            stop=r.float("run", "t_stop"),
            count=r.int("run", "t_count", 101),
            unit=r.str("run", "t_unit", "fm"),
            spacing=r.str("run", "t_spacing", "linear"),
        )
        window = r.str("run", "fit_window_tau", "0.5, 3.0")
        try:
            fit_window = tuple(float(v) for v in window.split(","))
        except ValueError:
            r.fail("run", "fit_window_tau", f"expected 'start, stop', got {window!r}")
        if len(fit_window) != 2:
            r.fail("run", "fit_window_tau", f"expected 'start, stop', got {window!r}")
        return SimulationConfig(
            barrier=barrier,
            packet=packet,
            drive=drive,
            times=times,
            poles_even=r.int("run", "poles_even", 5),
            poles_odd=r.int("run", "poles_odd", 5),
            quadrature_order=r.int("run", "quadrature_order", 64),
            precision=r.str("run", "precision", "extended"),
            max_rotation=max_rotation,
            fit_window=fit_window,
            workers=r.int("run", "workers", 1),
            source={s: dict(parser.items(s)) for s in parser.sections()},
        )
    except ConfigError as exc:
        if str(exc).startswith(origin):
            raise
        raise ConfigError(f"{origin}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"{origin}: {exc}") from None


def _barrier(r: _Reader) -> BarrierConfig:
    kind = r.str("barrier", "kind", "square")
    mkey = r.one_of("barrier", ["mass_mev", "mass_invfm"])
    mass = r.float("barrier", mkey)
    if mkey == "mass_mev":
        mass = units.mev_to_invfm(mass)
    x0 = r.float("barrier", "x0_fm")
    gkey = r.one_of("barrier", ["gamma_mev", "gamma_invfm"], required=(kind == "square"))
    gamma = None
    if gkey:
        gamma = r.float("barrier", gkey)
        if gkey == "gamma_mev":
            gamma = units.mev_to_invfm(gamma)
    d = r.float("barrier", "d_fm", float("nan")) if r.has("barrier", "d_fm") else None
    if kind == "square":
        if r.has("barrier", "nu"):
            r.fail("barrier", "nu", "only valid for kind = delta")
        if d is None:
            r.fail("barrier", "d_fm", "missing required key")
        return BarrierConfig.square(mass, gamma, x0, d)
    if kind == "delta":
        if r.has("barrier", "nu"):
            nu = r.float("barrier", "nu")
        elif gamma is not None and d is not None:
            nu = gamma * (d - x0)
        else:
            r.fail("barrier", "nu", "delta barrier needs nu, or gamma and d_fm to derive it")
        return BarrierConfig(mass=mass, gamma=gamma, x0=x0, d=d, kind="delta", nu=nu)
    r.fail("barrier", "kind", f"expected square or delta, got {kind!r}")


def _drive(r: _Reader, base_dir: Path):
    if not r.parser.has_section("drive"):
        return DriveSpec.off(), None
    kind = r.str("drive", "kind", "none")
    if kind == "none":
        extra = [k for k in r.parser.options("drive") if k != "kind"]
        if extra:
            r.fail("drive", extra[0], "not allowed when kind = none")
        return DriveSpec.off(), None

    ckey = r.one_of("drive", ["mu_invfm2", "field_v_per_m", "max_rotation"])
    max_rotation = None
    if ckey == "mu_invfm2":
        mu = r.float("drive", "mu_invfm2")
    elif ckey == "field_v_per_m":
        mu = units.field_to_mu(r.float("drive", "field_v_per_m"), r.int("drive", "charge_multiple", 2))
    else:
        mu = 0.0
        max_rotation = r.float("drive", "max_rotation")
    if r.has("drive", "charge_multiple") and ckey != "field_v_per_m":
        r.fail("drive", "charge_multiple", "only valid with field_v_per_m")

    if kind == "harmonic":
        okey = r.one_of("drive", ["omega_hz", "omega_invfm"])
        omega = r.float("drive", okey)
        if okey == "omega_hz":
            omega = units.hz_to_invfm(omega)
        return DriveSpec.harmonic(mu, omega), max_rotation
    if kind == "tabulated":
        path = Path(r.str("drive", "table_path"))
        if not path.is_absolute():
            path = base_dir / path
        t, g = read_drive_table(path)
        return DriveSpec.tabulated(mu, t, g), max_rotation
    r.fail("drive", "kind", f"expected none, harmonic or tabulated, got {kind!r}")
