"""Continuum eigenstates of the symmetric double barrier.

Even states are ``cos(kx)`` between the barriers and odd states ``sin(kx)``;
outside the barriers they read ``C cos(k|x|) + D sin(k|x|)`` (times
``sign(x)`` for odd parity).  The normalization factor is the analytic
continuation ``n**2 = C**2 + D**2``.  Literal squares, not moduli, are what
give ``n**2`` its complex zeros.

All evaluations run in the current mpmath context; wrap calls in
:func:`assisted_tunneling.precision.working` to pick a tier.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import mpmath as mp

from .config import BarrierConfig

DEGENERATE_RADIUS = 1e-8


class DegeneratePointError(ArithmeticError):
    """k or kappa is too close to zero for the 1/(kappa k) closed forms."""


class Parity(str, enum.Enum):
    EVEN = "even"
    ODD = "odd"

    @property
    def other(self) -> "Parity":
        return Parity.ODD if self is Parity.EVEN else Parity.EVEN


def as_parity(parity) -> Parity:
    return parity if isinstance(parity, Parity) else Parity(str(parity).lower())


@dataclass(frozen=True)
class PiecewiseCoefficients:
    parity: Parity
    k: object
    kappa: object
    A: object
    B: object
    C: object
    D: object
    e1: object = None
    e2: object = None
    e3: object = None
    c1: object = None
    c2: object = None
    s1: object = None
    s2: object = None


@dataclass(frozen=True)
class NormalizationValue:
    parity: Parity
    k: object
    n2: object
    n: object


def kappa(k, barrier: BarrierConfig):
    """sqrt(2 m gamma - k**2), principal branch.

    Above the barrier top (real k > p) this is ``+i sqrt(k**2 - p**2)``.
    """
    if barrier.kind != "square":
        raise ValueError("kappa is only defined for square barriers")
    return mp.sqrt(2 * mp.mpf(barrier.mass) * mp.mpf(barrier.gamma) - mp.mpmathify(k) ** 2)


def _inner(parity: Parity, k, x):
    if parity is Parity.EVEN:
        return mp.cos(k * x), -k * mp.sin(k * x)
    return mp.sin(k * x), k * mp.cos(k * x)


def _square_CD(parity: Parity, k, kap, e1, e2, e3, c1, c2, s1, s2):
    den = 2 * kap * k * e3
    if parity is Parity.EVEN:
        D = -(
            c2 * kap * e2 * k * s1 - c2 * kap**2 * e2 * c1 + c2 * kap**2 * e1 * c1
            + c2 * kap * e1 * k * s1 + e2 * k**2 * s1 * s2 - e2 * kap * c1 * k * s2
            - e1 * kap * c1 * k * s2 - e1 * k**2 * s1 * s2
        ) / den
        C = (
            e2 * k * s1 * kap * s2 - e2 * kap**2 * c1 * s2 + e1 * kap**2 * c1 * s2
            + e1 * k * s1 * kap * s2 - c2 * e2 * k**2 * s1 + c2 * e2 * kap * c1 * k
            + c2 * e1 * kap * c1 * k + c2 * e1 * k**2 * s1
        ) / den
    else:
        D = -(
            -c2 * e2 * kap * c1 * k - c2 * kap**2 * e2 * s1 + c2 * kap**2 * e1 * s1
            - c2 * e1 * kap * c1 * k - e2 * k**2 * c1 * s2 - e2 * k * s1 * kap * s2
            - e1 * k * s1 * kap * s2 + e1 * k**2 * c1 * s2
        ) / den
        C = -(
            e2 * kap * c1 * k * s2 + e2 * kap**2 * s1 * s2 - e1 * kap**2 * s1 * s2
            + e1 * kap * c1 * k * s2 - c2 * e2 * k**2 * c1 - c2 * kap * e2 * k * s1
            - c2 * kap * e1 * k * s1 + c2 * e1 * k**2 * c1
        ) / den
    return C, D


def coefficients(parity, k, barrier: BarrierConfig) -> PiecewiseCoefficients:
    """Piecewise coefficients of the parity-``parity`` state at momentum ``k``.

    ``C`` and ``D`` come from the closed forms; ``A`` and ``B`` (barrier
    region) from continuity of value and slope at ``x0``.  Delta barriers
    return ``A = B = kappa = None``.
    """
    parity = as_parity(parity)
    k = mp.mpmathify(k)
    if abs(k) < DEGENERATE_RADIUS:
        raise DegeneratePointError(f"|k| = {mp.nstr(abs(k), 3)} below degenerate radius")
    if barrier.kind == "delta":
        C, D = _delta_CD(parity, k, barrier.nu, barrier.x0, barrier.mass)
        return PiecewiseCoefficients(parity, k, None, None, None, C, D)

    kap = kappa(k, barrier)
    if abs(kap) < DEGENERATE_RADIUS:
        raise DegeneratePointError(f"|kappa| = {mp.nstr(abs(kap), 3)} below degenerate radius")
    x0, d = mp.mpf(barrier.x0), mp.mpf(barrier.d)
    e1 = mp.exp(2 * kap * x0)
    e2 = mp.exp(2 * kap * d)
    e3 = mp.exp(kap * (x0 + d))
    c1, s1 = mp.cos(k * x0), mp.sin(k * x0)
    c2, s2 = mp.cos(k * d), mp.sin(k * d)
    C, D = _square_CD(parity, k, kap, e1, e2, e3, c1, c2, s1, s2)
    f, fp = _inner(parity, k, x0)
    A = (f + fp / kap) * mp.exp(-kap * x0) / 2
    B = (f - fp / kap) * mp.exp(kap * x0) / 2
    return PiecewiseCoefficients(parity, k, kap, A, B, C, D, e1, e2, e3, c1, c2, s1, s2)


def _delta_CD(parity: Parity, k, nu, x0, mass):
    g = 2 * mp.mpf(mass) * mp.mpf(nu) / k
    c, s = mp.cos(k * x0), mp.sin(k * x0)
    if parity is Parity.EVEN:
        return 1 - g * s * c, g * c * c
    return -g * s * s, 1 + g * s * c


def delta_coefficients(parity, k, nu, x0, mass):
    """Outer coefficients and normalization for ``nu delta(|x| - x0)`` barriers.

    The outer wave is fixed by continuity at ``x0`` and the slope jump
    ``phi'(x0+) - phi'(x0-) = 2 m nu phi(x0)``.
    """
    parity = as_parity(parity)
    k = mp.mpmathify(k)
    C, D = _delta_CD(parity, k, nu, x0, mass)
    return C, D, mp.sqrt(C * C + D * D)


def norm_squared(parity, k, barrier: BarrierConfig):
    c = coefficients(parity, k, barrier)
    return c.C * c.C + c.D * c.D


def norm(parity, k, barrier: BarrierConfig) -> NormalizationValue:
    parity = as_parity(parity)
    n2 = norm_squared(parity, k, barrier)
    return NormalizationValue(parity, mp.mpmathify(k), n2, mp.sqrt(n2))


def solve_matching_system(parity, k, barrier: BarrierConfig):
    """Independent 4x4 solve of the matching conditions at x0 and d.

    Returns ``(A, B, C, D)``; used as the oracle for the closed forms.
    """
    parity = as_parity(parity)
    if barrier.kind != "square":
        raise ValueError("matching system is for square barriers")
    k = mp.mpmathify(k)
    kap = kappa(k, barrier)
    x0, d = mp.mpf(barrier.x0), mp.mpf(barrier.d)
    ep0, em0 = mp.exp(kap * x0), mp.exp(-kap * x0)
    epd, emd = mp.exp(kap * d), mp.exp(-kap * d)
    cd, sd = mp.cos(k * d), mp.sin(k * d)
    M = mp.matrix([
        [ep0, em0, 0, 0],
        [kap * ep0, -kap * em0, 0, 0],
        [epd, emd, -cd, -sd],
        [kap * epd, -kap * emd, k * sd, -k * cd],
    ])
    f, fp = _inner(parity, k, x0)
    sol = mp.lu_solve(M, mp.matrix([f, fp, 0, 0]))
    return tuple(sol[i] for i in range(4))


def _phi_abs(c: PiecewiseCoefficients, x, barrier: BarrierConfig):
    """Value and slope of the state at ``x >= 0``, unnormalized."""
    k = c.k
    if x < barrier.x0 or (barrier.kind == "delta" and x == barrier.x0):
        return _inner(c.parity, k, x)
    if barrier.kind == "square" and x < barrier.d:
        a, b = c.A * mp.exp(c.kappa * x), c.B * mp.exp(-c.kappa * x)
        return a + b, c.kappa * (a - b)
    return (
        c.C * mp.cos(k * x) + c.D * mp.sin(k * x),
        k * (-c.C * mp.sin(k * x) + c.D * mp.cos(k * x)),
    )


def phi(parity, k, x, barrier: BarrierConfig, coeffs: PiecewiseCoefficients | None = None):
    """Unnormalized state ``phi(k, x)`` and its x-derivative."""
    parity = as_parity(parity)
    c = coeffs or coefficients(parity, k, barrier)
    x = mp.mpmathify(x)
    v, dv = _phi_abs(c, abs(x), barrier)
    if x < 0:
        # even: phi(-x) = phi(x), phi'(-x) = -phi'(x); odd: the reverse
        return (v, -dv) if parity is Parity.EVEN else (-v, dv)
    return v, dv


def eval_chi(parity, k, x, barrier: BarrierConfig, coeffs=None):
    """Normalized eigenstate ``chi(k, x) = phi(k, x) / (sqrt(pi) n(k))``."""
    parity = as_parity(parity)
    c = coeffs or coefficients(parity, k, barrier)
    n = mp.sqrt(c.C**2 + c.D**2)
    return phi(parity, k, x, barrier, c)[0] / (mp.sqrt(mp.pi) * n)


def eval_chi_derivative(parity, k, x, barrier: BarrierConfig, coeffs=None):
    parity = as_parity(parity)
    c = coeffs or coefficients(parity, k, barrier)
    n = mp.sqrt(c.C**2 + c.D**2)
    return phi(parity, k, x, barrier, c)[1] / (mp.sqrt(mp.pi) * n)


def matching_residuals(coeffs: PiecewiseCoefficients, barrier: BarrierConfig) -> dict:
    """Relative mismatch of value and slope across each interface.

    Each residual is scaled by the largest term entering the comparison so
    that exponentially large barrier components do not mask errors.
    """
    c, k = coeffs, coeffs.k
    x0 = mp.mpf(barrier.x0)
    f, fp = _inner(c.parity, k, x0)
    if barrier.kind == "delta":
        g, gp = c.C * mp.cos(k * x0) + c.D * mp.sin(k * x0), k * (-c.C * mp.sin(k * x0) + c.D * mp.cos(k * x0))
        jump = 2 * mp.mpf(barrier.mass) * mp.mpf(barrier.nu) * f
        scale_v = max(abs(f), abs(c.C), abs(c.D))
        scale_d = max(abs(fp), abs(gp), abs(jump), abs(k) * max(abs(c.C), abs(c.D)))
        return {
            "value_x0": abs(g - f) / scale_v,
            "slope_x0": abs(gp - fp - jump) / scale_d,
        }
    kap, d = c.kappa, mp.mpf(barrier.d)
    a0, b0 = c.A * mp.exp(kap * x0), c.B * mp.exp(-kap * x0)
    ad, bd = c.A * mp.exp(kap * d), c.B * mp.exp(-kap * d)
    cd, sd = c.C * mp.cos(k * d), c.D * mp.sin(k * d)
    out_v = cd + sd
    out_d = k * (-c.C * mp.sin(k * d) + c.D * mp.cos(k * d))
    return {
        "value_x0": abs(a0 + b0 - f) / max(abs(a0), abs(b0), abs(f)),
        "slope_x0": abs(kap * (a0 - b0) - fp) / max(abs(kap * a0), abs(kap * b0), abs(fp)),
        "value_d": abs(ad + bd - out_v) / max(abs(ad), abs(bd), abs(cd), abs(sd)),
        "slope_d": abs(kap * (ad - bd) - out_d)
        / max(abs(kap * ad), abs(kap * bd), abs(k * c.C), abs(k * c.D)),
    }
