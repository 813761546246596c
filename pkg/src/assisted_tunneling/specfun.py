"""Factorial power series of the pole components and their Bessel/Struve forms.

The three entire series in ``u`` are

    S0(u) = sum_{n>=0} u**n / (n!)**2
    S1(u) = sum_{n>=0} u**n / ((n!)**2 (2n+1))
    S2(u) = sum_{n>=1} u**n / (((n-1)!)**2 n (2n-1))

They are the normative definitions.  With ``z = 2 sqrt(-u)`` they close as

    S0 = J0(z)
    S1 = J0(z) + pi/2 (J1(z) H0(z) - J0(z) H1(z))
    S2 = (z J1(z) - z**2 S1) / 2

(all three are even in ``z``, so the square-root branch is immaterial).
For large ``|u|`` the Hankel expansions of ``J`` and the ``H - Y``
expansion of the Struve functions give, using ``J1 Y0 - J0 Y1 = 2/(pi z)``,

    S1 = J0 + 1/z + pi/2 (J1 R0 - J0 R1),   R = H - Y,

so ``S1 ~ 1/z`` and ``S2 ~ -z/2`` along the negative real axis.
"""

from __future__ import annotations

import enum
import math

import mpmath as mp

SERIES_OVERFLOW = 1e8
BESSEL_SERIES_RADIUS = 25.0
STRUVE_RADIUS = 30.0
CLOSED_FORM_RADIUS = 200.0
ASYMPTOTIC_CROSSOVER = 50.0


class SeriesKind(str, enum.Enum):
    S0 = "S0"
    S1 = "S1"
    S2 = "S2"


class SeriesOverflowError(OverflowError):
    """Argument too large for direct summation."""


class RangeError(ValueError):
    """Argument outside the validated range of an evaluation route."""


def _guard_bits(size) -> int:
    # the largest term of an alternating exponential-type series is about
    # exp(size); that many bits cancel before the sum emerges
    return int(1.45 * float(size)) + 20


def _kind(kind) -> SeriesKind:
    return kind if isinstance(kind, SeriesKind) else SeriesKind(str(kind).upper())


def series_eval(kind, u, threshold: float = 1e-20):
    """Sum the factorial series of ``kind`` at ``u``.

    Terms are generated by their ratio recurrence and summed with
    ``mpmath.fsum`` at raised precision; summation stops once past the
    largest term and the latest term is below ``threshold`` times the
    partial sum.

    Raises
    ------
    SeriesOverflowError
        ``|u| > 1e8``.
    """
    kind = _kind(kind)
    u = mp.mpmathify(u)
    au = abs(u)
    if au > SERIES_OVERFLOW:
        raise SeriesOverflowError(f"|u| = {mp.nstr(au, 4)} exceeds series limit {SERIES_OVERFLOW:g}")
    if au == 0:
        return mp.mpf(0) if kind is SeriesKind.S2 else mp.mpf(1)
    peak = math.sqrt(float(au))
    with mp.workprec(mp.mp.prec + _guard_bits(2 * peak)):
        thr = mp.mpf(threshold)
        terms = []
        total = mp.mpf(0)
        if kind is SeriesKind.S2:
            # a_n = u**n / ((n-1)!**2 n (2n-1)); a_1 = u
            a, n = u, 1
            base = u  # u**n / ((n-1)!)**2
        else:
            base, n = mp.mpf(1), 0  # u**n / (n!)**2
            a = base
        while True:
            terms.append(a)
            total += a
            if n > peak and abs(a) <= thr * abs(total):
                break
            n += 1
            if kind is SeriesKind.S2:
                base = base * u / ((n - 1) ** 2)
                a = base / (n * (2 * n - 1))
            else:
                base = base * u / (n * n)
                a = base if kind is SeriesKind.S0 else base / (2 * n + 1)
        result = mp.fsum(terms)
    return +result


def _bessel_series(order: int, z):
    with mp.workprec(mp.mp.prec + _guard_bits(abs(z))):
        h = z / 2
        term = mp.mpf(1) if order == 0 else h
        w = -h * h
        terms, k = [term], 0
        total = term
        while True:
            k += 1
            term = term * w / (k * (k + order))
            terms.append(term)
            total += term
            if k > abs(h) and abs(term) <= mp.mp.eps * abs(total) / 1024:
                break
        result = mp.fsum(terms)
    return +result


def _hankel_pq(order: int, z):
    """Truncated Hankel P, Q at optimal truncation."""
    mu = 4 * order * order
    P, Q = mp.mpf(0), mp.mpf(0)
    a = mp.mpf(1)
    best = mp.inf
    zk = mp.mpf(1)
    k = 0
    while True:
        term = a / zk
        if abs(term) > best or abs(term) < mp.mp.eps * 1e-3:
            break
        best = abs(term)
        # a_k contributes to P for even k (sign (-1)**(k/2)), to Q for odd k
        sign = -1 if (k // 2) % 2 else 1
        if k % 2 == 0:
            P += sign * term
        else:
            Q += sign * term
        k += 1
        a = a * (mu - (2 * k - 1) ** 2) / (k * 8)
        zk = zk * z
    return P, Q


def _bessel_asymptotic(order: int, z):
    if mp.re(z) < 0:
        # J_n(-z) = (-1)**n J_n(z) keeps the expansion in |arg z| <= pi/2
        return (-1) ** order * _bessel_asymptotic(order, -z)
    P, Q = _hankel_pq(order, z)
    chi = z - (mp.mpf(order) / 2 + mp.mpf(1) / 4) * mp.pi
    return mp.sqrt(2 / (mp.pi * z)) * (P * mp.cos(chi) - Q * mp.sin(chi))


def bessel_j(order: int, z):
    """``J_order(z)`` for order 0 or 1 and complex ``z``.

    Power series for ``|z| <= 25``, Hankel asymptotic expansion beyond.
    """
    if order not in (0, 1):
        raise ValueError("only orders 0 and 1 are supported")
    z = mp.mpmathify(z)
    if abs(z) <= BESSEL_SERIES_RADIUS:
        return _bessel_series(order, z)
    with mp.workprec(mp.mp.prec + 10):
        result = _bessel_asymptotic(order, z)
    return +result


def struve_h(order: int, z, radius: float = STRUVE_RADIUS):
    """Struve ``H_order(z)`` for order 0 or 1 by its power series.

    Raises
    ------
    RangeError
        ``|z|`` above ``radius``.
    """
    if order not in (0, 1):
        raise ValueError("only orders 0 and 1 are supported")
    z = mp.mpmathify(z)
    if abs(z) > radius:
        raise RangeError(f"|z| = {mp.nstr(abs(z), 4)} beyond the validated Struve series radius {radius}")
    with mp.workprec(mp.mp.prec + _guard_bits(abs(z))):
        h = z / 2
        half = mp.mpf(1) / 2
        # Gamma(3/2) = sqrt(pi)/2, Gamma(5/2) = 3 sqrt(pi)/4
        g1 = mp.sqrt(mp.pi) / 2
        g2 = g1 if order == 0 else g1 * 3 / 2
        term = h ** (order + 1) / (g1 * g2)
        w = -h * h
        terms, total, k = [term], term, 0
        while True:
            term = term * w / ((k + 1 + half) * (k + order + 1 + half))
            k += 1
            terms.append(term)
            total += term
            if k > abs(h) and abs(term) <= mp.mp.eps * abs(total) / 1024:
                break
        result = mp.fsum(terms)
    return +result


def _bessel_argument(u):
    return 2 * mp.sqrt(-mp.mpmathify(u))


def closed_form(kind, u):
    """Bessel/Struve closed form of the series ``kind`` at ``u``.

    Raises
    ------
    RangeError
        ``|u| > 200`` (Struve argument beyond its validated radius).
    """
    kind = _kind(kind)
    u = mp.mpmathify(u)
    if abs(u) > CLOSED_FORM_RADIUS:
        raise RangeError(f"|u| = {mp.nstr(abs(u), 4)} beyond closed-form radius {CLOSED_FORM_RADIUS}")
    with mp.workprec(mp.mp.prec + 10):
        z = _bessel_argument(u)
        J0 = bessel_j(0, z)
        if kind is SeriesKind.S0:
            return +J0
        J1 = bessel_j(1, z)
        S1 = J0 + mp.pi / 2 * (J1 * struve_h(0, z) - J0 * struve_h(1, z))
        result = S1 if kind is SeriesKind.S1 else (z * J1 - z * z * S1) / 2
    return +result


def _struve_minus_y(order: int, z):
    """``H_order(z) - Y_order(z)`` by its large-argument expansion."""
    h = z / 2
    total = mp.mpf(0)
    best = mp.inf
    k = 0
    while True:
        term = mp.gamma(k + mp.mpf(1) / 2) * h ** (order - 2 * k - 1) / mp.gamma(order + mp.mpf(1) / 2 - k)
        if abs(term) > best or abs(term) < mp.mp.eps * abs(total) * 1e-3:
            break
        best = abs(term)
        total += term
        k += 1
    return total / mp.pi


def asymptotic_form(kind, u, crossover: float = ASYMPTOTIC_CROSSOVER):
    """Large-``|u|`` evaluation of the series ``kind``.

    Raises
    ------
    RangeError
        ``|u|`` at or below ``crossover``.
    """
    kind = _kind(kind)
    u = mp.mpmathify(u)
    if abs(u) <= crossover:
        raise RangeError(f"|u| = {mp.nstr(abs(u), 4)} below asymptotic crossover {crossover}")
    with mp.workprec(mp.mp.prec + 10):
        z = _bessel_argument(u)
        J0 = _bessel_asymptotic(0, z)
        if kind is SeriesKind.S0:
            return +J0
        J1 = _bessel_asymptotic(1, z)
        S1 = J0 + 1 / z + mp.pi / 2 * (J1 * _struve_minus_y(0, z) - J0 * _struve_minus_y(1, z))
        result = S1 if kind is SeriesKind.S1 else (z * J1 - z * z * S1) / 2
    return +result


def bracket(kind, u):
    """Series value with the evaluation route chosen by ``|u|``."""
    if abs(mp.mpmathify(u)) > SERIES_OVERFLOW:
        return asymptotic_form(kind, u)
    return series_eval(kind, u)
