"""Time-dependent linear perturbation ``V(x, t) = mu * x * G(t)``.

The perturbation is removed from the Hamiltonian by the phase transform
``Psi = exp(-i sigma) Phi`` with

    sigma(x, t) = mu * x * zeta(t) + mu**2 / (2 m) * int_0^t zeta**2 dt'
    zeta(t)     = int_0^t G dt'
    Y(t)        = int_0^t zeta dt'

All integration constants are fixed at t = 0, so the transform is the
identity at the initial time.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import cumulative_trapezoid


class DriveRangeError(ValueError):
    """Requested time lies outside a tabulated drive."""


@dataclass(frozen=True)
class DriveSpec:
    """Coupling ``mu`` (fm^-2) and the dimensionless time profile ``G``.

    ``shape`` is ``"harmonic"`` (``G = sin(omega t)``), ``"tabulated"``
    (samples of ``G`` on a grid starting at t = 0) or ``"none"``.
    """

    mu: float = 0.0
    shape: str = "none"
    omega: float | None = None
    times: np.ndarray | None = field(default=None, compare=False, repr=False)
    samples: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not np.isfinite(self.mu) or self.mu < 0:
            raise ValueError(f"drive coupling mu must be finite and >= 0, got {self.mu}")
        if self.shape == "harmonic":
            if self.omega is None or not self.omega > 0:
                raise ValueError("harmonic drive needs omega > 0")
        elif self.shape == "tabulated":
            t = np.asarray(self.times, dtype=float)
            g = np.asarray(self.samples, dtype=float)
            if t.ndim != 1 or t.shape != g.shape or t.size < 2:
                raise ValueError("tabulated drive needs matching 1-d time and sample arrays")
            if t[0] != 0.0:
                raise ValueError("tabulated drive must start at t = 0")
            if np.any(np.diff(t) <= 0):
                raise ValueError("tabulated drive times must be strictly increasing")
            zeta = cumulative_trapezoid(g, t, initial=0.0)
            object.__setattr__(self, "times", t)
            object.__setattr__(self, "samples", g)
            object.__setattr__(self, "_zeta", zeta)
            object.__setattr__(self, "_Y", cumulative_trapezoid(zeta, t, initial=0.0))
            object.__setattr__(self, "_zeta_sq", cumulative_trapezoid(zeta**2, t, initial=0.0))
        elif self.shape != "none":
            raise ValueError(f"unknown drive shape {self.shape!r}")

    @classmethod
    def harmonic(cls, mu: float, omega: float) -> "DriveSpec":
        return cls(mu=mu, shape="harmonic", omega=omega)

    @classmethod
    def tabulated(cls, mu: float, times, samples) -> "DriveSpec":
        return cls(mu=mu, shape="tabulated", times=times, samples=samples)

    @classmethod
    def off(cls) -> "DriveSpec":
        return cls()

    def with_mu(self, mu: float) -> "DriveSpec":
        if self.shape == "tabulated":
            return DriveSpec.tabulated(mu, self.times, self.samples)
        return DriveSpec(mu=mu, shape=self.shape, omega=self.omega)

    @property
    def active(self) -> bool:
        return self.mu > 0 and self.shape != "none"

    def _interp(self, table, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.times[-1]):
            raise DriveRangeError(
                f"time outside tabulated drive range [0, {self.times[-1]}] fm"
            )
        return np.interp(t, self.times, table)


def read_drive_table(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column ``t_fm, G`` CSV (header row required)."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["t_fm", "G"]:
        raise ValueError(f"{path}: expected header 't_fm,G'")
    data = np.array([[float(a), float(b)] for a, b in rows[1:]])
    return data[:, 0], data[:, 1]


def _check_time(t):
    if np.any(np.asarray(t) < 0):
        raise ValueError("drive integrals are defined for t >= 0")


def G(t, drive: DriveSpec):
    _check_time(t)
    if drive.shape == "harmonic":
        return np.sin(drive.omega * np.asarray(t, dtype=float))
    if drive.shape == "tabulated":
        return drive._interp(drive.samples, t)
    return np.zeros_like(np.asarray(t, dtype=float))


def zeta(t, drive: DriveSpec):
    """First time integral of ``G`` with ``zeta(0) = 0``."""
    _check_time(t)
    if drive.shape == "harmonic":
        w = drive.omega
        return (1.0 - np.cos(w * np.asarray(t, dtype=float))) / w
    if drive.shape == "tabulated":
        return drive._interp(drive._zeta, t)
    return np.zeros_like(np.asarray(t, dtype=float))


def bigY(t, drive: DriveSpec):
    """Second time integral ``Y(t) = int_0^t zeta``."""
    _check_time(t)
    if drive.shape == "harmonic":
        w = drive.omega
        t = np.asarray(t, dtype=float)
        return t / w - np.sin(w * t) / w**2
    if drive.shape == "tabulated":
        return drive._interp(drive._Y, t)
    return np.zeros_like(np.asarray(t, dtype=float))


def zeta_squared_integral(t, drive: DriveSpec):
    """``int_0^t zeta(t')**2 dt'``."""
    _check_time(t)
    if drive.shape == "harmonic":
        w = drive.omega
        t = np.asarray(t, dtype=float)
        return (1.5 * t - 2.0 * np.sin(w * t) / w + np.sin(2.0 * w * t) / (4.0 * w)) / w**2
    if drive.shape == "tabulated":
        return drive._interp(drive._zeta_sq, t)
    return np.zeros_like(np.asarray(t, dtype=float))


def sigma_phase(x, t, drive: DriveSpec, mass: float):
    """Phase of the unitary transform, ``Psi = exp(-i sigma) Phi``."""
    if not drive.active:
        return np.zeros(np.broadcast(np.asarray(x), np.asarray(t)).shape)
    mu = drive.mu
    return mu * np.asarray(x) * zeta(t, drive) + mu**2 / (2.0 * mass) * zeta_squared_integral(t, drive)
