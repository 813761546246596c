"""Numerical check of the even/odd superposition matrix element.

The coupling between sectors is

    M(k, k') = int chi_e(k, x) d/dx chi_o(k', x) dx = k delta(k - k') / (n_e(k) n_o(k)).

We regularize with ``exp(-eps x**2)``.  The outer region, where both
states are plane waves, is integrated in closed form:

    int_d^inf exp(-eps x**2 + i b x) dx
        = sqrt(pi) / (2 sqrt(eps)) exp(-b**2 / (4 eps)) erfc(sqrt(eps) d - i b / (2 sqrt(eps)))

The inner and barrier regions go through adaptive quadrature.  On the
diagonal the smeared value is ``W / (2 sqrt(pi eps)) + finite part``;
:func:`delta_weight` extracts ``W`` by fitting a ladder of regulators.
Off the diagonal the element tends to a principal-value kernel, see
:func:`principal_kernel`.
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np

from .config import BarrierConfig
from .precision import Tier, working
from .stationary import Parity, as_parity, coefficients, eval_chi


def outer_wave_coeffs(parity, k, barrier: BarrierConfig):
    """``E = (C1 - i D1)/2`` (even) or ``F = (C2 - i D2)/2`` (odd)."""
    c = coefficients(as_parity(parity), k, barrier)
    return (c.C - 1j * c.D) / 2


def _plane_wave_integral(b, eps, start):
    """``int_start^inf exp(-eps x**2 + i b x) dx``."""
    r = mp.sqrt(eps)
    return mp.sqrt(mp.pi) / (2 * r) * mp.exp(-b * b / (4 * eps)) * mp.erfc(r * start - 1j * b / (2 * r))


def smeared_matrix_element(k, kp, eps, barrier: BarrierConfig, tier=Tier.EXTENDED):
    """``int chi_e(k, x) d/dx chi_o(k', x) exp(-eps x**2) dx`` over the real line.

    The integrand is even in ``x``, so twice the half line is used.
    """
    if not eps > 0:
        raise ValueError("regulator eps must be > 0")
    with working(tier):
        k, kp, eps = mp.mpf(k), mp.mpf(kp), mp.mpf(eps)
        ce = coefficients(Parity.EVEN, k, barrier)
        co = coefficients(Parity.ODD, kp, barrier)
        ne, no = mp.sqrt(ce.C**2 + ce.D**2), mp.sqrt(co.C**2 + co.D**2)
        x0 = mp.mpf(barrier.x0)
        reg = lambda x: mp.exp(-eps * x * x)  # noqa: E731

        inner = mp.quad(lambda x: mp.cos(k * x) * kp * mp.cos(kp * x) * reg(x), [0, x0])
        if barrier.kind == "square":
            d = mp.mpf(barrier.d)
            ka, kb = ce.kappa, co.kappa
            middle = mp.quad(
                lambda x: (ce.A * mp.exp(ka * x) + ce.B * mp.exp(-ka * x))
                * kb * (co.A * mp.exp(kb * x) - co.B * mp.exp(-kb * x)) * reg(x),
                [x0, d],
            )
        else:
            d, middle = x0, 0

        # outer: (C1 cos kx + D1 sin kx) * k' (D2 cos k'x - C2 sin k'x), expanded in exponentials
        outer = 0
        for s1 in (1, -1):
            a_e = ce.C / 2 + ce.D / (2j) * s1
            for s2 in (1, -1):
                a_o = kp * (co.D / 2 - co.C / (2j) * s2)
                outer += a_e * a_o * _plane_wave_integral(s1 * k + s2 * kp, eps, d)
        value = 2 * (inner + middle + outer) / (mp.pi * ne * no)
    return value


def expected_weight(k, barrier: BarrierConfig, tier=Tier.EXTENDED):
    """``k / (n_e(k) n_o(k))`` on the real axis."""
    with working(tier):
        k = mp.mpf(k)
        ce = coefficients(Parity.EVEN, k, barrier)
        co = coefficients(Parity.ODD, k, barrier)
        return k / (mp.sqrt(ce.C**2 + ce.D**2) * mp.sqrt(co.C**2 + co.D**2))


def regulator_ladder(eps0=1e-6, count=10, ratio=1.5):
    return [mp.mpf(eps0) * mp.mpf(ratio) ** i for i in range(count)]


def delta_weight(k, barrier: BarrierConfig, eps_values=None, tier=Tier.EXTENDED):
    """Weight ``W`` of the delta function in ``M(k, k')`` at ``k' = k``.

    Fits the diagonal values at ``N`` regulators to
    ``a / sqrt(eps) + sum_{j < N-1} b_j eps**j`` exactly and returns
    ``W = 2 sqrt(pi) a``.
    """
    eps_values = list(eps_values or regulator_ladder())
    n = len(eps_values)
    if n < 2:
        raise ValueError("need at least two regulator values")
    with working(tier):
        vals = [mp.re(smeared_matrix_element(k, k, e, barrier, tier)) for e in eps_values]
        A = mp.matrix(n, n)
        for i, e in enumerate(eps_values):
            e = mp.mpf(e)
            A[i, 0] = 1 / mp.sqrt(e)
            for j in range(1, n):
                A[i, j] = e ** (j - 1)
        sol = mp.lu_solve(A, mp.matrix(vals))
        return 2 * mp.sqrt(mp.pi) * sol[0]


def principal_kernel(k, kp, barrier: BarrierConfig, tier=Tier.EXTENDED):
    """Regular part of ``M(k, k')`` for ``k' != k``, from ``[d/dx, H] = V'``.

    ``M = 2 m <e|V'|o> / (k'**2 - k**2)`` with
    ``<e|V'|o> = 2 gamma (chi_e chi_o(x0) - chi_e chi_o(d))``.  This
    principal-value kernel carries O(1) weight at every ``k``, whereas the
    delta weight is tiny away from resonances.  Square barriers only.
    """
    if barrier.kind != "square":
        raise ValueError("principal kernel is implemented for square barriers")
    with working(tier):
        k, kp = mp.mpf(k), mp.mpf(kp)
        if k == kp:
            raise ValueError("principal kernel is singular at k' = k")
        prod = lambda x: eval_chi(Parity.EVEN, k, x, barrier) * eval_chi(Parity.ODD, kp, x, barrier)  # noqa: E731
        vp = 2 * mp.mpf(barrier.gamma) * (prod(mp.mpf(barrier.x0)) - prod(mp.mpf(barrier.d)))
        return 2 * mp.mpf(barrier.mass) * vp / (kp * kp - k * k)


def check_delta_identity(k, test_width, barrier: BarrierConfig, eps=1e-6, order=20,
                         tier=Tier.EXTENDED) -> float:
    """Test-function check of ``M(k, k') = k delta(k - k') / (n_e n_o)``.

    Integrates the smeared element against ``exp(-(k' - k)**2 / (2 w**2))``
    (unit value at ``k' = k``, so a pure delta kernel returns its weight)
    over ``|k' - k| < 7 w`` with composite Gauss-Legendre, panels graded
    towards ``k`` on the scale ``sqrt(eps)``.  Returns the relative residual
    ``|result - k/(n_e n_o)| / |k/(n_e n_o)|``.

    The regular kernel (:func:`principal_kernel`) contributes to the
    result as well, so the residual is small only where the delta weight
    dominates it.
    """
    if not test_width > 0:
        raise ValueError("test_width must be > 0")
    if not math.sqrt(2 * eps) < test_width:
        raise ValueError(f"regulator width sqrt(2 eps) = {math.sqrt(2 * eps):.3g} not below test_width")
    nodes, weights = np.polynomial.legendre.leggauss(order)
    with working(tier):
        k, w, eps = mp.mpf(k), mp.mpf(test_width), mp.mpf(eps)
        r, edge = mp.sqrt(eps), 7 * w
        cuts = [mp.mpf(0)]
        while cuts[-1] * 2 < edge:
            cuts.append(r if cuts[-1] == 0 else cuts[-1] * 2)
        cuts.append(edge)
        cuts = [-c for c in reversed(cuts[1:])] + cuts
        total = mp.mpf(0)
        for a, b in zip(cuts[:-1], cuts[1:]):
            half, mid = (b - a) / 2, (a + b) / 2
            for x, wt in zip(nodes, weights):
                off = mid + half * mp.mpf(x)
                m_val = mp.re(smeared_matrix_element(k, k + off, eps, barrier, tier))
                total += mp.mpf(wt) * half * m_val * mp.exp(-off * off / (2 * w * w))
        expected = expected_weight(k, barrier, tier)
        return float(abs(total - expected) / abs(expected))


def delta_weight_residual(k, barrier: BarrierConfig, eps_values=None, tier=Tier.EXTENDED) -> float:
    """Relative residual of the regulator-ladder weight against ``k/(n_e n_o)``."""
    with working(tier):
        W = delta_weight(k, barrier, eps_values, tier)
        expected = expected_weight(k, barrier, tier)
        return float(abs(W - expected) / abs(expected))


def regulator_exponent(k, barrier: BarrierConfig, eps_values=(1e-4, 1e-5, 1e-6), tier=Tier.EXTENDED) -> float:
    """Least-squares slope of ``log |M(k, k; eps)|`` against ``log eps``.

    A pure delta approximant gives -1/2.  The finite part only drops out
    where ``k / (n_e n_o)`` is not small, i.e. near the resonance minima.
    """
    with working(tier):
        xs = [mp.log(mp.mpf(e)) for e in eps_values]
        ys = [mp.log(abs(smeared_matrix_element(k, k, e, barrier, tier))) for e in eps_values]
        xm, ym = mp.fsum(xs) / len(xs), mp.fsum(ys) / len(ys)
        slope = mp.fsum((x - xm) * (y - ym) for x, y in zip(xs, ys)) / mp.fsum((x - xm) ** 2 for x in xs)
    return float(slope)
