"""Quadrature, Laplace-Stieltjes inversion and Kolmogorov-Smirnov distances."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import comb

from .errors import DomainError, InversionUnstable, QuadratureFailure

TAIL_RTOL = 1e-10


def integrate_tail(tail, a: float = 0.0, b: float = math.inf, points=None) -> float:
    """Integrate a nonnegative, nonincreasing ``tail`` over ``(a, b)``.

    The interval is split at ``points`` and each piece is handed to QUADPACK;
    an infinite upper limit goes through QUADPACK's semi-infinite transform.

    Raises
    ------
    QuadratureFailure
        If the combined error estimate exceeds ``1e-10`` relative.
    """
    if a < 0 or b < a:
        raise DomainError(f"need 0 <= a <= b, got a={a}, b={b}")
    if a == b:
        return 0.0
    cuts = sorted({float(p) for p in (points or []) if a < p < b})
    edges = [a, *cuts]
    finite_end = b if math.isfinite(b) else None
    if finite_end is not None:
        edges.append(b)
    total = 0.0
    err = 0.0

    def f(t):
        return float(tail(t))

    for lo, hi in zip(edges[:-1], edges[1:]):
        val, e = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=1e-12, limit=500)
        total += val
        err += e
    if finite_end is None:
        val, e = integrate.quad(f, edges[-1], math.inf, epsabs=0.0, epsrel=1e-12, limit=500)
        total += val
        err += e
    if not math.isfinite(total) or err > TAIL_RTOL * max(abs(total), 1e-300) and err > 1e-14:
        raise QuadratureFailure(f"tail integral {total:.6g} has error estimate {err:.3g}")
    return total


@dataclass(frozen=True)
class InversionConfig:
    """Settings for Euler-smoothed Fourier-series inversion.

    ``series_terms`` partial sums are formed before binomial (Euler) averaging
    over ``euler_terms + 1`` successive partial sums.  The contour abscissa is
    chosen so that the discretization error ``exp(-A)`` sits a decade below
    ``target``.
    """

    series_terms: int = 32
    euler_terms: int = 16
    target: float = 1e-8

    def __post_init__(self):
        if self.series_terms < 1 or self.euler_terms < 1:
            raise DomainError("series_terms and euler_terms must be >= 1")
        if not 1e-14 <= self.target < 1:
            raise DomainError(f"precision target must lie in [1e-14, 1), got {self.target}")

    @property
    def abscissa(self) -> float:
        return math.log(10.0 / self.target)


def invert_lst_to_cdf(lst, x, cfg: InversionConfig | None = None, atom: float = 0.0, check: bool = True):
    """Recover ``P(M <= x)`` from the Laplace-Stieltjes transform ``lst``.

    ``lst`` must accept complex arrays with positive real part.  A known
    atom at zero of mass ``atom`` is removed before inversion and added back,
    so the series only sees the continuous part.

    Raises
    ------
    InversionUnstable
        If the Euler error estimate exceeds ``cfg.target`` (with ``check``).
    """
    cfg = cfg or InversionConfig()
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(xs > 0)):
        raise DomainError("inversion abscissas must be > 0")
    A = cfg.abscissa
    n, m = cfg.series_terms, cfg.euler_terms
    k = np.arange(n + m + 2)
    weights = comb(m, np.arange(m + 1)) / 2.0**m
    s = (A + 2j * math.pi * k[None, :]) / (2.0 * xs[:, None])
    vals = (np.asarray(lst(s), dtype=complex) - atom) / s
    terms = (-1.0) ** k * vals.real
    terms[:, 0] *= 0.5
    partial = np.cumsum(terms, axis=1) * math.exp(A / 2.0) / xs[:, None]
    est = partial[:, n : n + m + 1] @ weights
    nxt = partial[:, n + 1 : n + m + 2] @ weights
    err = np.abs(est - nxt)
    if check and np.any(err > cfg.target):
        i = int(np.argmax(err))
        raise InversionUnstable(
            f"Euler error estimate {err[i]:.3g} exceeds target {cfg.target:.1g} at x={xs[i]:.6g}"
        )
    out = est + atom
    return out[0] if np.ndim(x) == 0 else out


def _sorted_values(batch) -> np.ndarray:
    values = np.asarray(getattr(batch, "values", batch), dtype=float)
    if values.size == 0:
        raise DomainError("empty sample")
    return np.sort(values)


def ks_distance(batch, cdf, cdf_left=None) -> float:
    """Sup-distance between the empirical CDF of ``batch`` and ``cdf``.

    Both one-sided gaps are checked at every sample point.  Pass
    ``cdf_left`` (the left limit ``P(M < x)``) when ``cdf`` has atoms.
    """
    v = _sorted_values(batch)
    n = v.size
    uniq = np.unique(v)
    upper = np.searchsorted(v, uniq, side="right") / n
    lower = np.searchsorted(v, uniq, side="left") / n
    f_at = np.asarray(cdf(uniq), dtype=float)
    f_before = f_at if cdf_left is None else np.asarray(cdf_left(uniq), dtype=float)
    d_plus = np.max(upper - f_at)
    d_minus = np.max(f_before - lower)
    return float(min(max(d_plus, d_minus, 0.0), 1.0))


def ks_two_sample(first, second) -> float:
    """Two-sample Kolmogorov-Smirnov statistic ``sup |F_1 - F_2|``."""
    a = _sorted_values(first)
    b = _sorted_values(second)
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))
