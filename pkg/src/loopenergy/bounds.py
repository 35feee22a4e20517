"""Energy of a self-loop graph and the bounds evaluated against it.

Throughout, ``mu`` is the spectrum shifted by the mean eigenvalue ``sigma/n``
and ``d = |mu|_max - |mu|_min`` is the spread of the shifted magnitudes.
The closed forms below are written with numpy so they also accept arrays;
the exhaustive sweep evaluates them on whole batches of spectra.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import OrderTooSmall
from .graph import SelfLoopGraph
from .spectral import ShiftedSpectrum, Spectrum, eigenvalues, shifted_spectrum

DEFAULT_EQ_TOL = 1e-9

BOUND_IDS = (
    "gutman",
    "improved",
    "lambda1_lower",
    "lambda1_upper",
    "pair_product",
    "spectral_lower",
    "ozeki",
    "spread_ratio",
)


def is_close(value, target, tol: float = DEFAULT_EQ_TOL):
    """Hybrid equality test ``|value - target| <= tol * max(1, |target|)``."""
    return np.abs(np.asarray(value) - target) <= tol * np.maximum(1.0, np.abs(target))


# ---------------------------------------------------------------------------
# closed forms (scalar or array)
# ---------------------------------------------------------------------------


def centered_square_sum(n, m, sigma):
    """``n * sum(mu_i^2) = n(2m + sigma) - sigma^2``, exact for integer input."""
    return n * (2 * m + sigma) - sigma * sigma


def gutman_upper(n, m, sigma):
    """sqrt(n (2m + sigma - sigma^2/n)); the radicand is never negative."""
    return np.sqrt(centered_square_sum(n, m, sigma))


def improved_radicand(n, m, sigma, d):
    return centered_square_sum(n, m, sigma) - 0.5 * n * d * d


def ozeki_radicand(n, m, sigma, d):
    return centered_square_sum(n, m, sigma) - (n * n / 3.0) * d * d


def spectral_radicand(lambda1, n, sigma):
    return 2.0 * lambda1 * lambda1 - 2.0 * sigma * sigma / n


def spread_numerator(n, m, sigma):
    """4m + 2 sigma - 2 sigma^2/n, i.e. twice the centered sum of squares."""
    return 2.0 * centered_square_sum(n, m, sigma) / n


def pair_product_rhs(n, m, sigma):
    return m + sigma * (n - sigma) / (2.0 * n)


def clamped_sqrt(radicand):
    return np.sqrt(np.maximum(0.0, radicand))


# ---------------------------------------------------------------------------
# spectrum-level operations
# ---------------------------------------------------------------------------


def energy(mu: ShiftedSpectrum) -> float:
    return float(sum(abs(x) for x in mu.mu))


def improved_upper(n: int, m: int, sigma: int, mu: ShiftedSpectrum) -> tuple[float, float]:
    """Return ``(value, radicand)`` of the refined upper bound.

    The radicand is at least E^2/n for every graph, so no clamping happens;
    tiny negative rounding is floored at zero.
    """
    if n < 2:
        raise OrderTooSmall(f"the refined bound needs n >= 2, got {n}")
    rad = float(improved_radicand(n, m, sigma, mu.abs_max - mu.abs_min))
    return float(clamped_sqrt(rad)), rad


def lambda1_bounds(n: int, m: int, sigma: int) -> tuple[float, float]:
    return (2 * m + sigma) / n, math.sqrt(2 * m + sigma)


def pair_product(mu: ShiftedSpectrum, n: int, m: int, sigma: int) -> tuple[float, float]:
    a = np.abs(np.asarray(mu.mu))
    lhs = (a.sum() ** 2 - (a * a).sum()) / 2.0
    return float(lhs), float(pair_product_rhs(n, m, sigma))


def spectral_lower(lambda1: float, n: int, sigma: int) -> tuple[float, float]:
    rad = float(spectral_radicand(lambda1, n, sigma))
    return float(clamped_sqrt(rad)), rad


def ozeki_lower(n: int, m: int, sigma: int, mu: ShiftedSpectrum) -> tuple[float, float]:
    rad = float(ozeki_radicand(n, m, sigma, mu.abs_max - mu.abs_min))
    return float(clamped_sqrt(rad)), rad


def spread_ratio_lower(spec: Spectrum, n: int, m: int, sigma: int,
                       tol: float = DEFAULT_EQ_TOL) -> float | None:
    """``(4m + 2 sigma - 2 sigma^2/n) / (lambda_1 - lambda_n)``, or None when
    all eigenvalues coincide."""
    spread = spec.largest - spec.smallest
    if spread <= tol:
        return None
    return float(spread_numerator(n, m, sigma) / spread)


def ultimate_energy(x: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    if x.size < 1:
        raise ValueError("need at least one value")
    return float(np.abs(x - x.mean()).sum())


def ultimate_energy_lower(x: Sequence[float], tol: float = 0.0) -> float | None:
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two values")
    spread = x.max() - x.min()
    if spread <= tol:
        return None
    return float(2.0 * ((x - x.mean()) ** 2).sum() / spread)


# ---------------------------------------------------------------------------
# per-graph report
# ---------------------------------------------------------------------------


@dataclass
class BoundReport:
    n: int
    m: int
    sigma: int
    spectrum: tuple[float, ...]
    energy: float
    gutman_upper: float
    improved_upper: float | None
    improved_radicand: float | None
    lambda1: float
    lambda1_lower: float
    lambda1_upper: float
    pair_product_lhs: float
    pair_product_rhs: float
    spectral_lower: float
    spectral_radicand: float
    ozeki_lower: float
    ozeki_radicand: float
    spread_ratio_lower: float | None
    equality_flags: dict[str, bool] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def bound_report(g: SelfLoopGraph, tol: float = DEFAULT_EQ_TOL,
                 spec: Spectrum | None = None) -> BoundReport:
    if spec is None:
        spec = eigenvalues(g)
    n, m, sigma = g.n, g.m, g.sigma
    mu = shifted_spectrum(spec, n, sigma)
    e = energy(mu)
    gut = float(gutman_upper(n, m, sigma))
    imp, imp_rad = improved_upper(n, m, sigma, mu) if n >= 2 else (None, None)
    lam1 = spec.largest
    lo1, hi1 = lambda1_bounds(n, m, sigma)
    lhs, rhs = pair_product(mu, n, m, sigma)
    spl, spl_rad = spectral_lower(lam1, n, sigma)
    oz, oz_rad = ozeki_lower(n, m, sigma, mu)
    spr = spread_ratio_lower(spec, n, m, sigma, tol)

    def close(value, target):
        return value is not None and bool(is_close(value, target, tol))

    flags = {
        "gutman": close(gut, e),
        "improved": close(imp, e),
        "lambda1_lower": close(lo1, lam1),
        "lambda1_upper": close(hi1, lam1),
        "pair_product": close(rhs, lhs),
        "spectral_lower": close(spl, e),
        "ozeki": close(oz, e),
        "spread_ratio": close(spr, e),
    }
    return BoundReport(
        n=n, m=m, sigma=sigma, spectrum=spec.values, energy=e,
        gutman_upper=gut, improved_upper=imp, improved_radicand=imp_rad,
        lambda1=lam1, lambda1_lower=lo1, lambda1_upper=hi1,
        pair_product_lhs=lhs, pair_product_rhs=rhs,
        spectral_lower=spl, spectral_radicand=spl_rad,
        ozeki_lower=oz, ozeki_radicand=oz_rad,
        spread_ratio_lower=spr, equality_flags=flags,
    )
