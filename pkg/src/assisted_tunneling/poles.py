"""Complex zeros of the normalization factors and their local quadratic fits.

Near each resonance the real-axis profile behaves as

    k**2 n(k)**2 ~ lam * (k**2 - k_j**2)**2 + beta

and the zero of the analytic continuation ``n(k)**2`` sits a distance of
order ``|Im k_j|`` below the axis.  For the alpha-decay barrier that
distance is ~1e-21 fm^-1 against ``Re k_j ~ 0.1``, so refinement needs the
extended precision tier.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import mpmath as mp

from .config import BarrierConfig, SimulationConfig
from .precision import Tier, as_tier, working
from .stationary import Parity, as_parity, norm_squared

DEDUP_TOLERANCE = 1e-6
FIT_SAMPLES = 41
FIT_HALF_WIDTHS = 5


class PoleSearchError(ArithmeticError):
    """Newton refinement failed to converge to an isolated zero."""


class DuplicateRootError(PoleSearchError):
    """Refinement landed on a zero that is already known."""


class CatalogError(PoleSearchError):
    """One or more seeds failed while building a catalog.

    ``failures`` holds ``(parity, j, seed, message)`` tuples.
    """

    def __init__(self, failures):
        self.failures = list(failures)
        lines = [f"{p.value} j={j} seed={float(s):.6g}: {msg}" for p, j, s, msg in self.failures]
        super().__init__("pole refinement failed:\n  " + "\n  ".join(lines))


@dataclass(frozen=True)
class PoleRecord:
    parity: Parity
    j: int
    seed: float
    k: mp.mpc
    lam: mp.mpf
    beta: mp.mpf
    q: mp.mpc
    s: mp.mpc
    cross_norm: mp.mpc
    gamma: mp.mpf
    residual: mp.mpf
    iterations: int
    fit_residual: float
    ill_conditioned: bool

    @property
    def decay_time(self):
        """Probability e-folding time ``1 / gamma`` in fm."""
        return 1 / self.gamma


@dataclass(frozen=True)
class PoleCatalog:
    barrier: BarrierConfig
    even: tuple
    odd: tuple
    tier: Tier
    metadata: dict = field(default_factory=dict, compare=False)

    def sector(self, parity) -> tuple:
        return self.even if as_parity(parity) is Parity.EVEN else self.odd

    def __iter__(self):
        yield from self.even
        yield from self.odd

    def __len__(self):
        return len(self.even) + len(self.odd)


def seed_poles(parity, n_max: int, barrier: BarrierConfig, below_barrier: bool = True) -> list:
    """Approximate real positions of the first ``n_max`` minima of ``n``.

    Square barriers use ``(2n+1) pi p / (2 (1 + p x0))`` (even) and
    ``n pi p / (1 + p x0)`` (odd, n >= 1); delta barriers use the
    hard-wall values ``(2n+1) pi / (2 x0)`` and ``n pi / x0``.  The odd
    ``n = 0`` seed is the origin and is never returned.
    """
    parity = as_parity(parity)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    x0 = barrier.x0
    if barrier.kind == "square":
        p = math.sqrt(2 * barrier.mass * barrier.gamma)
        base, cutoff = math.pi * p / (1 + p * x0), p
    else:
        base, cutoff = math.pi / x0, math.inf
    seeds = []
    n = 0 if parity is Parity.EVEN else 1
    while len(seeds) < n_max:
        k = base * (n + 0.5) if parity is Parity.EVEN else base * n
        if below_barrier and k >= cutoff:
            break
        seeds.append(k)
        n += 1
    return seeds


def _tolerances(tier: Tier):
    if tier is Tier.EXTENDED:
        return mp.mpf("1e-40"), mp.mpf("1e-30")
    # the extended thresholds are below double-precision resolution
    return mp.mpf("1e-40"), mp.mpf(2) ** (-48)


def refine_pole(parity, seed, barrier: BarrierConfig, tier=Tier.EXTENDED, known=(), max_iter: int = 400):
    """Newton iteration on ``n(k)**2`` from ``seed - 1e-3 i seed``.

    The derivative is a central difference with step
    ``1e-10 min(|k|, |Im k|)``: the conjugate zero sits ``2 |Im k|`` away,
    so a step of ``1e-10 |k|`` would leave an O(1) derivative error and
    stall convergence once ``|Im k|`` reaches resonance scale.  The step
    is floored at ``eps**(3/4) |k|`` of the working precision.  The
    iteration stops once ``|n**2| < 1e-40`` or, after a step below the
    tier's step tolerance, after a few extra polishing steps.  The returned
    zero is the lower-half member of the conjugate pair.

    Returns ``(k_j, iterations)``.

    Raises
    ------
    PoleSearchError
        No convergence within ``max_iter`` steps, or a vanishing derivative.
    DuplicateRootError
        ``Re k_j`` lies within 1e-6 of an entry of ``known``.
    """
    parity = as_parity(parity)
    tier = as_tier(tier)
    ftol, steptol = _tolerances(tier)
    with working(tier):
        seed_mp = mp.mpf(seed)
        k = mp.mpc(seed_mp, -seed_mp * mp.mpf("1e-3"))
        polish = None
        for it in range(1, max_iter + 1):
            f = norm_squared(parity, k, barrier)
            if abs(f) < ftol:
                break
            h = mp.mpf("1e-10") * min(abs(k), abs(mp.im(k)) or abs(k))
            # keep k +- h distinguishable from k at the working precision
            h = max(h, mp.mp.eps ** 0.75 * abs(k))
            df = (norm_squared(parity, k + h, barrier) - norm_squared(parity, k - h, barrier)) / (2 * h)
            if df == 0 or not mp.isfinite(df):
                raise PoleSearchError(f"vanishing derivative at k={mp.nstr(k, 8)}")
            step = f / df
            k -= step
            if not mp.isfinite(k) or k.real <= 0:
                raise PoleSearchError(f"iteration left the right half plane from seed {seed}")
            if polish is None and abs(step) < steptol:
                polish = 3
            elif polish is not None:
                polish -= 1
                if polish == 0:
                    break
        else:
            raise PoleSearchError(f"no convergence after {max_iter} iterations from seed {seed}")
        if mp.im(k) > 0:
            k = mp.conj(k)
    for other in known:
        if abs(mp.re(k) - mp.re(other)) < DEDUP_TOLERANCE:
            raise DuplicateRootError(f"seed {seed} converged to known zero {mp.nstr(other, 12)}")
    return k, it


def root_residual(parity, k, barrier: BarrierConfig):
    """``|n(k)**2|`` re-evaluated at the extended tier."""
    with working(Tier.EXTENDED):
        return abs(norm_squared(parity, mp.mpc(k), barrier))


@dataclass(frozen=True)
class QuadraticFit:
    lam: mp.mpf
    beta: mp.mpf
    residual: float
    ill_conditioned: bool


def fit_quadratic(parity, k_j, barrier: BarrierConfig, tier=Tier.EXTENDED) -> QuadraticFit:
    """Fit ``k**2 n**2 = lam (k**2 - kr**2)**2 + beta`` on the real axis.

    Samples 41 points over ``Re k_j +- 5 |Im k_j|`` (the half-width of the
    dip).  ``beta`` is the smallest sample and ``lam`` the least-squares
    slope of ``y - beta`` against ``(k**2 - kr**2)**2``.  The residual is
    the RMS misfit relative to ``beta``; above 1% the fit is flagged.
    """
    parity = as_parity(parity)
    with working(tier):
        k_j = mp.mpc(k_j)
        kr, hw = mp.re(k_j), abs(mp.im(k_j))
        if hw == 0:
            raise PoleSearchError("zero imaginary part; no resonance width to fit")
        half = (FIT_SAMPLES - 1) // 2
        ks = [kr + FIT_HALF_WIDTHS * hw * (i - half) / half for i in range(FIT_SAMPLES)]
        ys = [mp.re(kk**2 * norm_squared(parity, kk, barrier)) for kk in ks]
        xs = [(kk**2 - kr**2) ** 2 for kk in ks]
        beta = min(ys)
        lam = mp.fsum((y - beta) * x for x, y in zip(xs, ys)) / mp.fsum(x * x for x in xs)
        rms = mp.sqrt(mp.fsum((lam * x + beta - y) ** 2 for x, y in zip(xs, ys)) / len(xs))
        residual = float(rms / beta) if beta > 0 else math.inf
    return QuadraticFit(lam, beta, residual, not residual <= 0.01)


def make_record(parity, j, seed, k_j, iterations, barrier: BarrierConfig, tier=Tier.EXTENDED) -> PoleRecord:
    """Fit, derive ``q = kr**2 - i sqrt(beta/lam)`` and the cross-parity norm."""
    parity = as_parity(parity)
    fit = fit_quadratic(parity, k_j, barrier, tier)
    with working(Tier.EXTENDED):
        # mpmath constructors round to the active precision
        k_j = mp.mpc(k_j)
        kr = mp.re(k_j)
        width = mp.sqrt(fit.beta / fit.lam)
        q = mp.mpc(kr**2, -width)
        s = mp.sqrt(q)
        cross = mp.sqrt(norm_squared(parity.other, s, barrier))
        gamma = width / mp.mpf(barrier.mass)
    return PoleRecord(
        parity=parity, j=j, seed=float(seed), k=k_j, lam=fit.lam, beta=fit.beta,
        q=q, s=s, cross_norm=cross, gamma=gamma,
        residual=root_residual(parity, k_j, barrier), iterations=iterations,
        fit_residual=fit.residual, ill_conditioned=fit.ill_conditioned,
    )


def _refine_task(args):
    parity, j, seed, barrier, tier = args
    try:
        k, its = refine_pole(parity, seed, barrier, tier)
        return make_record(parity, j, seed, k, its, barrier, tier)
    except (PoleSearchError, ArithmeticError, ZeroDivisionError) as exc:
        return (parity, j, seed, str(exc))


def build_catalog(config: SimulationConfig, tier=None, workers: int | None = None) -> PoleCatalog:
    """Seed, refine and fit ``config.poles_even`` + ``config.poles_odd`` poles.

    Seeds are refined independently (in a process pool when ``workers``
    exceeds 1); the catalog is assembled in seed order, sorted by
    ``Re k_j`` and checked for duplicates.
    """
    barrier = config.barrier
    tier = as_tier(tier or config.precision)
    workers = config.workers if workers is None else workers
    if config.poles_even < 1 or config.poles_odd < 1:
        raise ValueError("pole counts must be >= 1")
    tasks = []
    for parity, count in ((Parity.EVEN, config.poles_even), (Parity.ODD, config.poles_odd)):
        for j, seed in enumerate(seed_poles(parity, count, barrier), start=1):
            tasks.append((parity, j, seed, barrier, tier))
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_refine_task, tasks))
    else:
        results = [_refine_task(t) for t in tasks]

    failures = [r for r in results if not isinstance(r, PoleRecord)]
    records = [r for r in results if isinstance(r, PoleRecord)]
    sectors = {}
    for parity in Parity:
        recs = sorted((r for r in records if r.parity is parity), key=lambda r: mp.re(r.k))
        for a, b in zip(recs, recs[1:]):
            if abs(mp.re(a.k) - mp.re(b.k)) < DEDUP_TOLERANCE:
                failures.append((parity, b.j, b.seed, f"duplicate of j={a.j}"))
        sectors[parity] = tuple(recs)
    if failures:
        raise CatalogError(failures)
    return PoleCatalog(
        barrier=barrier,
        even=sectors[Parity.EVEN],
        odd=sectors[Parity.ODD],
        tier=tier,
        metadata={
            "iterations": [r.iterations for r in records],
            "max_residual": max(float(r.residual) for r in records),
        },
    )


CATALOG_COLUMNS = ("parity", "j", "re_k", "im_k", "lambda", "beta", "re_q", "im_q", "gamma_decay", "residual")


def catalog_rows(catalog: PoleCatalog, digits: int | None = None):
    digits = digits or catalog.tier.dps
    fmt = lambda v: mp.nstr(v, digits, min_fixed=1, max_fixed=0)  # noqa: E731
    for r in catalog:
        yield (
            r.parity.value, r.j, fmt(mp.re(r.k)), fmt(mp.im(r.k)), fmt(r.lam), fmt(r.beta),
            fmt(mp.re(r.q)), fmt(mp.im(r.q)), fmt(r.gamma), fmt(r.residual),
        )


def write_catalog_csv(catalog: PoleCatalog, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CATALOG_COLUMNS)
        w.writerows(catalog_rows(catalog))


def norm_scan(barrier: BarrierConfig, k_values, tier=Tier.EXTENDED):
    """Rows ``(k, 1/n_e, 1/n_o)`` along the real axis."""
    rows = []
    with working(tier):
        for k in k_values:
            ne = mp.sqrt(norm_squared(Parity.EVEN, k, barrier))
            no = mp.sqrt(norm_squared(Parity.ODD, k, barrier))
            rows.append((float(k), float(mp.re(1 / ne)), float(mp.re(1 / no))))
    return rows
