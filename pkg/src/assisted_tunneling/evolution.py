"""Pole-sum wavefunction between the barriers and the survival probability.

The expansion amplitudes rotate exactly,

    c_e(k, t) =  c_e(k, 0) cos(theta),   c_o(k, t) = -c_e(k, 0) sin(theta),
    theta     =  mu k Y(t) / (m n_e(k) n_o(k)),

and expanding the harmonic functions in powers of ``theta`` turns each
pole of ``1/n_e`` or ``1/n_o`` into a prefactor times a factorial series
(see :mod:`assisted_tunneling.specfun`).  With ``q = kr**2 - i sqrt(beta/lam)``,
``s = sqrt(q)``, ``w = -q (Delta**2/4 + i t/(2m))`` and ``P`` the packet
constant, the four families are

    ee (even pole):  P cos(s x) s e^w / (2 sqrt(beta lam))                 * S0(u_e)
    oe (even pole): -P sin(s x) mu q Y e^w / (2 m n_o(s)**2 sqrt(beta lam)) * S1(u_e)
    oo (odd pole):  -P sin(s x) mu q Y e^w / (2 m n_e(s)**2 sqrt(beta lam)) * S1(u_o)
    eo (odd pole):   P cos(s x) sqrt(beta) e^w / (s sqrt(lam) n_e(s)**2)     * S2(u_o)

with ``u = -(mu q Y / (2 m n_cross(s) sqrt(beta)))**2``.  The expressions
hold on the inner region ``|x| <= x0`` only.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from . import units
from .config import BarrierConfig, PacketSpec
from .drive import DriveSpec, bigY, sigma_phase
from .poles import PoleCatalog, PoleRecord
from .precision import Tier, working
from .specfun import SeriesKind, bracket
from .stationary import Parity, norm_squared


class Component(str, enum.Enum):
    EE = "ee"
    OO = "oo"
    EO = "eo"
    OE = "oe"


def packet_constant(packet: PacketSpec) -> float:
    """Prefactor ``P`` of the pole terms.

    ``(2 pi)**(1/4) sqrt(Delta)`` for the unit-norm packet and
    ``pi**(3/4) Delta`` for the bare ``exp(-x**2/Delta**2)`` convention.
    """
    if packet.normalization == "bare":
        return math.pi**0.75 * packet.width
    return (2 * math.pi) ** 0.25 * math.sqrt(packet.width)


def _amplitude_constant(packet: PacketSpec) -> float:
    if packet.normalization == "bare":
        return packet.width * math.pi**-0.25
    return (2 / math.pi) ** 0.25 * math.sqrt(packet.width)


def initial_amplitude(k, packet: PacketSpec, barrier: BarrierConfig):
    """``c_e(k, 0) = N exp(-k**2 Delta**2 / 4) / n_e(k)`` for real ``k > 0``.

    ``N = (2/pi)**(1/4) sqrt(Delta)`` is the overlap of the unit-norm
    Gaussian with ``cos(kx) / sqrt(pi)`` over the whole line; the
    ``"bare"`` convention uses ``N = Delta pi**(-1/4)``.
    """
    with working(Tier.EXTENDED):
        k = mp.mpf(k)
        n = mp.sqrt(mp.re(norm_squared(Parity.EVEN, k, barrier)))
        value = _amplitude_constant(packet) * mp.exp(-k * k * mp.mpf(packet.width) ** 2 / 4) / n
    return float(value)


@dataclass(frozen=True)
class AmplitudePair:
    k: float
    c_e: float
    c_o: float
    theta: float


def amplitudes_at(k, t, barrier: BarrierConfig, packet: PacketSpec, drive: DriveSpec) -> AmplitudePair:
    """Exact amplitude rotation at real momentum ``k`` and time ``t``."""
    c0 = initial_amplitude(k, packet, barrier)
    if not drive.active:
        return AmplitudePair(float(k), c0, 0.0, 0.0)
    with working(Tier.EXTENDED):
        kk = mp.mpf(k)
        ne = mp.sqrt(mp.re(norm_squared(Parity.EVEN, kk, barrier)))
        no = mp.sqrt(mp.re(norm_squared(Parity.ODD, kk, barrier)))
        theta = mp.mpf(drive.mu) * kk * mp.mpf(float(bigY(t, drive))) / (mp.mpf(barrier.mass) * ne * no)
        ce, co = c0 * mp.cos(theta), -c0 * mp.sin(theta)
    return AmplitudePair(float(k), float(ce), float(co), float(theta))


@dataclass(frozen=True)
class ComponentTerm:
    """One pole's contribution: ``coefficient * bracket * f(s x)``.

    ``f`` is ``cos`` for ee/eo and ``sin`` for oe/oo; ``coefficient``
    already carries ``e^w``.
    """

    pole: PoleRecord
    which: Component
    coefficient: complex
    bracket: complex
    u: complex
    w: complex

    @property
    def s(self) -> complex:
        return complex(self.pole.s)

    def value(self, x):
        f = np.cos if self.which in (Component.EE, Component.EO) else np.sin
        return self.coefficient * self.bracket * f(self.s * np.asarray(x, dtype=float))


def rotation_angles(catalog: PoleCatalog, mu: float, Y: float) -> list:
    """``|theta_j| = |mu q Y / (m n_cross(s) sqrt(beta))|`` for every pole."""
    out = []
    with working(Tier.EXTENDED):
        m = mp.mpf(catalog.barrier.mass)
        for r in catalog:
            out.append(float(abs(mp.mpf(mu) * r.q * mp.mpf(Y) / (m * r.cross_norm * mp.sqrt(r.beta)))))
    return out


def mu_for_rotation(catalog: PoleCatalog, drive: DriveSpec, t_max: float, target: float) -> float:
    """Coupling for which the largest pole rotation angle up to ``t_max`` is ``target``."""
    if not target > 0:
        raise ValueError("target rotation must be > 0")
    ts = np.linspace(0.0, t_max, 257)
    y_max = float(np.max(np.abs(bigY(ts, drive))))
    if y_max == 0:
        raise ValueError("drive has Y = 0 on the whole interval")
    return target / max(rotation_angles(catalog, 1.0, y_max))


def pole_terms(t, catalog: PoleCatalog, drive: DriveSpec, packet: PacketSpec) -> list:
    """All component terms at time ``t`` (x-independent parts).

    Computed at the extended tier so that ``e^w`` keeps its phase at
    ``t ~ 1e23`` fm; results are returned as Python complex numbers.
    """
    if len(catalog) == 0:
        raise ValueError("empty pole catalog")
    if t < 0:
        raise ValueError("t must be >= 0")
    terms = []
    with working(Tier.EXTENDED):
        m = mp.mpf(catalog.barrier.mass)
        P = mp.mpf(packet_constant(packet))
        mu = mp.mpf(drive.mu) if drive.active else mp.mpf(0)
        Y = mp.mpf(float(bigY(t, drive))) if drive.active else mp.mpf(0)
        tau = mp.mpf(packet.width) ** 2 / 4 + mp.mpc(0, 1) * mp.mpf(t) / (2 * m)
        for r in catalog:
            q, s, beta, lam = r.q, r.s, r.beta, r.lam
            nc2 = r.cross_norm**2
            ew = mp.exp(-q * tau)
            u = -((mu * q * Y) ** 2) / (4 * m * m * nc2 * beta)
            sbl = mp.sqrt(beta * lam)
            drift = mu * q * Y * ew / (2 * m * nc2 * sbl)
            if r.parity is Parity.EVEN:
                pairs = (
                    (Component.EE, P * s * ew / (2 * sbl), SeriesKind.S0),
                    (Component.OE, -P * drift, SeriesKind.S1),
                )
            else:
                pairs = (
                    (Component.OO, -P * drift, SeriesKind.S1),
                    (Component.EO, P * mp.sqrt(beta) * ew / (s * mp.sqrt(lam) * nc2), SeriesKind.S2),
                )
            for which, coef, kind in pairs:
                b = bracket(kind, u) if coef != 0 else mp.mpf(0)
                terms.append(ComponentTerm(r, which, complex(coef), complex(b), complex(u), complex(-q * tau)))
    return terms


def _check_x(x, barrier: BarrierConfig):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > barrier.x0 * (1 + 1e-12)):
        raise ValueError("pole-sum wavefunction is only valid for |x| <= x0")
    return x


def component(which, x, t, catalog: PoleCatalog, drive: DriveSpec, packet: PacketSpec):
    """Sum over the catalog of one component family at ``(x, t)``."""
    which = Component(which)
    x = _check_x(x, catalog.barrier)
    total = np.zeros(x.shape, dtype=complex)
    for term in pole_terms(t, catalog, drive, packet):
        if term.which is which:
            total = total + term.value(x)
    return total if total.ndim else complex(total)


def _phi_from_terms(terms, x):
    total = np.zeros(np.shape(x), dtype=complex)
    for term in terms:
        total = total + term.value(x)
    return total


def phi_total(x, t, catalog: PoleCatalog, drive: DriveSpec, packet: PacketSpec):
    """``Phi = Phi_ee + Phi_oo + Phi_eo + Phi_oe`` in the transformed frame."""
    x = _check_x(x, catalog.barrier)
    total = _phi_from_terms(pole_terms(t, catalog, drive, packet), x)
    return total if total.ndim else complex(total)


def psi_total(x, t, catalog: PoleCatalog, drive: DriveSpec, packet: PacketSpec):
    """Lab-frame wavefunction ``Psi = exp(-i sigma) Phi``."""
    phi = phi_total(x, t, catalog, drive, packet)
    return np.exp(-1j * sigma_phase(x, t, drive, catalog.barrier.mass)) * phi


def gaussian_packet(x, packet: PacketSpec):
    x = np.asarray(x, dtype=float)
    base = np.exp(-(x**2) / packet.width**2)
    if packet.normalization == "bare":
        return base
    return (2 / (math.pi * packet.width**2)) ** 0.25 * base


@dataclass(frozen=True)
class SurvivalSeries:
    times: np.ndarray
    values: np.ndarray
    raw: np.ndarray
    renormalization: float
    truncation_defect: float
    barrier_kind: str
    drive_on: bool
    mu: float
    poles_even: int
    poles_odd: int
    normalization: str

    @property
    def times_seconds(self) -> np.ndarray:
        return units.fm_to_seconds(self.times)


def _quadrature(order: int, x0: float):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes * x0, weights * x0


def survival(times, catalog: PoleCatalog, drive: DriveSpec, packet: PacketSpec, order: int = 64) -> SurvivalSeries:
    """``S(t) = int_{-x0}^{x0} |Psi|**2 dx`` by Gauss-Legendre quadrature.

    Values are divided by the raw ``S(0)`` of the pole sum (recorded as
    ``renormalization``), so every curve starts at 1.  The L2 mismatch
    between the normalized pole-sum packet at t = 0 and the normalized
    Gaussian on the same interval is reported as ``truncation_defect``.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-d array")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    x, wts = _quadrature(order, catalog.barrier.x0)
    mass = catalog.barrier.mass

    phi0 = _phi_from_terms(pole_terms(0.0, catalog, DriveSpec.off(), packet), x)
    s0 = float(np.sum(wts * np.abs(phi0) ** 2))
    if not s0 > 0:
        raise ArithmeticError("pole sum vanishes at t = 0")
    g = gaussian_packet(x, packet)
    gn = g / math.sqrt(np.sum(wts * g**2))
    defect = math.sqrt(float(np.sum(wts * np.abs(phi0 / math.sqrt(s0) - gn) ** 2)))

    raw = np.empty(times.size)
    for i, t in enumerate(times):
        phi = _phi_from_terms(pole_terms(float(t), catalog, drive, packet), x)
        psi = np.exp(-1j * sigma_phase(x, t, drive, mass)) * phi
        raw[i] = float(np.sum(wts * np.abs(psi) ** 2))
    return SurvivalSeries(
        times=times, values=raw / s0, raw=raw, renormalization=s0, truncation_defect=defect,
        barrier_kind=catalog.barrier.kind, drive_on=drive.active, mu=drive.mu if drive.active else 0.0,
        poles_even=len(catalog.even), poles_odd=len(catalog.odd), normalization=packet.normalization,
    )


def fit_decay_rate(series: SurvivalSeries, t_start: float, t_stop: float) -> float:
    """Least-squares slope ``-d log S / dt`` over ``[t_start, t_stop]`` (fm^-1)."""
    sel = (series.times >= t_start) & (series.times <= t_stop) & (series.values > 0)
    if np.count_nonzero(sel) < 2:
        raise ValueError("fewer than two positive samples in the fit window")
    slope = np.polyfit(series.times[sel], np.log(series.values[sel]), 1)[0]
    return -float(slope)


def pole_weights(catalog: PoleCatalog, packet: PacketSpec) -> list:
    """Norm carried by each even pole, ``int |c_e(k, 0)|**2 dk`` over its peak.

    With ``1/n_e**2 ~ k**2 / (lam (k**2 - kr**2)**2 + beta)`` the peak
    integrates to ``N**2 exp(-kr**2 Delta**2 / 2) pi kr / (2 sqrt(lam beta))``.
    """
    N2 = _amplitude_constant(packet) ** 2
    out = []
    with working(Tier.EXTENDED):
        for r in catalog.even:
            kr = mp.re(r.k)
            out.append(float(N2 * mp.exp(-kr * kr * mp.mpf(packet.width) ** 2 / 2) * mp.pi * kr
                             / (2 * mp.sqrt(r.lam * r.beta))))
    return out


def completeness_integral(catalog: PoleCatalog, packet: PacketSpec, barrier: BarrierConfig | None = None) -> float:
    """Numerical ``int |c_e(k, 0)|**2 dk`` over the span of the cataloged even poles.

    Each pole's segment (bounded by midpoints in ``k**2`` between
    neighbours) is mapped by ``k**2 = kr**2 + g tan(phi)``, ``g =
    sqrt(beta/lam)``, which flattens the resonance peak for quadrature.
    """
    barrier = barrier or catalog.barrier
    poles = catalog.even
    N2 = _amplitude_constant(packet) ** 2
    total = mp.mpf(0)
    with working(Tier.EXTENDED):
        D2 = mp.mpf(packet.width) ** 2
        K = [mp.re(r.k) ** 2 for r in poles]
        for i, r in enumerate(poles):
            lo = (K[i - 1] + K[i]) / 2 if i else K[i] / 4
            hi = (K[i] + K[i + 1]) / 2 if i + 1 < len(K) else K[i] + (K[i] - lo)
            g = mp.sqrt(r.beta / r.lam)

            def integrand(phi, Kj=K[i], g=g):
                KK = Kj + g * mp.tan(phi)
                k = mp.sqrt(KK)
                dK = g / mp.cos(phi) ** 2
                n2 = mp.re(norm_squared(Parity.EVEN, k, barrier))
                return N2 * mp.exp(-KK * D2 / 2) / n2 * dK / (2 * k)

            a, b = mp.atan((lo - K[i]) / g), mp.atan((hi - K[i]) / g)
            # the flanks are squeezed into thin strips next to +-pi/2
            strip = mp.pi / 2 - mp.mpf("1e-3")
            pts = [a] + [p for p in (-strip, mp.mpf(0), strip) if a < p < b] + [b]
            total += mp.quad(integrand, pts)
    return float(total)
