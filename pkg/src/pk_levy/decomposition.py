"""Geometric-compound representation of the stationary workload and its exact sampler.

For a model with finite mean jump rate ``nu_bar < c`` put ``rho = nu_bar / c``,
``lambda = 2 c / sigma2`` and let ``F_e`` have density ``tail(x) / nu_bar``.
Then the stationary workload is distributed as

    X_0 + sum_{n=1}^{N} (X_n + Y_n),

with ``N`` geometric (``P[N = n] = (1 - rho) rho^n``), ``X_i ~ Exp(lambda)``
(identically zero when ``lambda`` is infinite) and ``Y_i ~ F_e``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DomainError, NotDecomposable
from .exponent import ExponentView
from .jumps import JumpMeasure
from .model import ValidatedModel, is_infinite, rate_to_float
from .rng import SAMPLE_BLOCK, SAMPLER_STREAM, block_generator, map_blocks

QUANTILE_TABLE_SIZE = 4096
QUANTILE_TOL = 1e-12


@dataclass(frozen=True)
class ExcessDistribution:
    """Stationary excess law ``F_e`` of the jump measure ``source``."""

    source: JumpMeasure
    nu_bar: float

    def __post_init__(self):
        if not (self.nu_bar > 0 and math.isfinite(self.nu_bar)):
            raise DomainError(f"excess law needs 0 < nu_bar < inf, got {self.nu_bar}")

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(x > 0, self.source.tail(np.where(x > 0, x, 1.0)) / self.nu_bar, 0.0)
            out = np.where(x == 0, self.source.tail(np.finfo(float).tiny) / self.nu_bar, out)
        return out[()] if out.ndim == 0 else out

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x > 0, 1.0 - self.source.tail_integral(np.maximum(x, 0.0)) / self.nu_bar, 0.0)
        out = np.clip(out, 0.0, 1.0)
        return out[()] if out.ndim == 0 else out

    def lst(self, alpha):
        a = np.asarray(alpha)
        safe = np.where(a == 0, 1.0, a)
        out = np.where(a == 0, 1.0, self.source.jump_integral(safe) / (safe * self.nu_bar))
        return out[()] if out.ndim == 0 else out

    def mean(self) -> float:
        """``E Y = int x^2 nu(dx) / (2 nu_bar)``."""
        return self.source.second_moment() / (2.0 * self.nu_bar)

    def quantile(self, u):
        """``inf{x : F_e(x) >= u}`` for ``u`` in [0, 1)."""
        arr = np.asarray(u, dtype=float)
        if np.any(~((arr >= 0) & (arr < 1))):
            raise DomainError("excess quantile needs u in [0, 1)")
        closed = self.source.excess_quantile(arr)
        if closed is None:
            closed = self._solve_from_table(arr)
        closed = np.asarray(closed, dtype=float)
        return closed[()] if closed.ndim == 0 else closed

    # -- numerical quantile -------------------------------------------------

    def _upper_bracket(self, u: np.ndarray) -> np.ndarray:
        hi = np.full_like(u, max(self.nu_bar, 1e-12))
        while np.any(low := self.cdf(hi) < u):
            hi = np.where(low, hi * 2.0, hi)
        return hi

    def _bracketed_solve(self, u, lo, hi):
        # F_e is concave: Newton from the left never overshoots, the chord root never undershoots.
        # Bisection is kept as a fallback because 1 - tail_integral / nu_bar cancels for tiny x.
        f_lo, f_hi = self.cdf(lo), self.cdf(hi)
        for _ in range(200):
            active = (f_hi - u > QUANTILE_TOL) & (hi - lo > 4 * np.spacing(hi))
            if not np.any(active):
                break
            with np.errstate(divide="ignore", invalid="ignore"):
                dens = self.pdf(lo)
                newton = lo + (u - f_lo) / dens
                chord = lo + (u - f_lo) * (hi - lo) / (f_hi - f_lo)
            newton = np.where(np.isfinite(newton), np.clip(newton, lo, hi), lo)
            chord = np.where(np.isfinite(chord), np.clip(chord, lo, hi), hi)
            for cand in (newton, chord, 0.5 * (newton + chord), 0.5 * (lo + hi)):
                f_c = self.cdf(cand)
                below = f_c < u
                move_lo = active & below & (cand > lo)
                move_hi = active & ~below & (cand < hi)
                lo, f_lo = np.where(move_lo, cand, lo), np.where(move_lo, f_c, f_lo)
                hi, f_hi = np.where(move_hi, cand, hi), np.where(move_hi, f_c, f_hi)
        return hi

    @cached_property
    def quantile_table(self) -> np.ndarray:
        """Exact quantiles at ``u = j / 4096`` for ``j = 0..4096`` (last entry: an upper bracket)."""
        grid = np.arange(QUANTILE_TABLE_SIZE) / QUANTILE_TABLE_SIZE
        lo = np.zeros_like(grid)
        hi = self._upper_bracket(grid)
        solved = self._bracketed_solve(grid, lo, hi)
        solved[0] = 0.0
        return np.append(solved, np.nan)

    def _solve_from_table(self, u: np.ndarray) -> np.ndarray:
        flat = np.atleast_1d(u)
        table = self.quantile_table
        scaled = flat * QUANTILE_TABLE_SIZE
        idx = np.floor(scaled).astype(int)
        on_grid = scaled == idx
        lo = table[idx]
        hi = table[idx + 1]
        last = idx == QUANTILE_TABLE_SIZE - 1
        if np.any(last):
            hi = hi.copy()
            hi[last] = self._upper_bracket(flat[last])
        out = np.where(on_grid, lo, 0.0)
        off = ~on_grid
        if np.any(off):
            out[off] = self._bracketed_solve(flat[off], lo[off], hi[off])
        return out.reshape(np.shape(u))


@dataclass(frozen=True)
class PKDecomposition:
    """``(rho, lambda, F_e)``: a sampleable description of the stationary law."""

    rho: float
    lam: object
    excess: ExcessDistribution | None
    model_digest: str = ""

    def __post_init__(self):
        if not 0 <= self.rho < 1:
            raise DomainError(f"rho must lie in [0, 1), got {self.rho}")
        if self.rho > 0 and self.excess is None:
            raise DomainError("a positive rho needs an excess law")

    def geometric_weights(self, k_max: int) -> np.ndarray:
        k = np.arange(k_max + 1)
        return (1.0 - self.rho) * self.rho**k

    def exponential_lst(self, alpha):
        if is_infinite(self.lam):
            return np.ones_like(np.asarray(alpha, dtype=float))[()]
        return self.lam / (self.lam + alpha)

    def mean(self) -> float:
        """``1/lambda + rho/(1-rho) (1/lambda + E Y)``."""
        inv_lam = 0.0 if is_infinite(self.lam) else 1.0 / self.lam
        ey = 0.0 if self.excess is None else self.excess.mean()
        return inv_lam + self.rho / (1.0 - self.rho) * (inv_lam + ey)


def decompose(model: ValidatedModel | ExponentView) -> PKDecomposition:
    """Return ``(rho, lambda, F_e)`` for a model with finite mean jump rate.

    Raises
    ------
    NotDecomposable
        If the small jumps have infinite mean; call ``exponent.truncate`` first.
    """
    if isinstance(model, ExponentView):
        model = model.model
    if not model.decomposable:
        raise NotDecomposable(
            f"{model.jumps.family} jumps have infinite mean; truncate the model (truncate(view, eps)) first"
        )
    excess = ExcessDistribution(model.jumps, model.nu_bar) if model.nu_bar > 0 else None
    return PKDecomposition(rho=model.rho, lam=model.lam, excess=excess, model_digest=model.digest())


def excess_quantile(excess: ExcessDistribution, u):
    """``inf{x : F_e(x) >= u}``; closed form where available, bracketed solve otherwise."""
    return excess.quantile(u)


@dataclass(frozen=True)
class SampleBatch:
    """Seeded draws of the stationary workload with provenance."""

    values: np.ndarray
    seed: int
    model_digest: str
    n: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if values.shape != (self.n,):
            raise DomainError(f"batch holds {values.size} values but n={self.n}")


def _sample_block(decomp: PKDecomposition, seed: int, block: int) -> np.ndarray:
    rng = block_generator(seed, block, SAMPLER_STREAM)
    size = SAMPLE_BLOCK
    if decomp.rho > 0:
        v = 1.0 - rng.random(size)  # (0, 1]
        counts = np.floor(np.log(v) / math.log(decomp.rho)).astype(np.int64)
    else:
        counts = np.zeros(size, dtype=np.int64)
    out = np.zeros(size)
    if not is_infinite(decomp.lam):
        n_exp = counts + 1
        exps = rng.standard_exponential(int(n_exp.sum())) / decomp.lam
        out += np.bincount(np.repeat(np.arange(size), n_exp), weights=exps, minlength=size)
    total = int(counts.sum())
    if total:
        ys = decomp.excess.quantile(rng.random(total))
        out += np.bincount(np.repeat(np.arange(size), counts), weights=ys, minlength=size)
    return out


def sample_stationary(decomp: PKDecomposition, seed: int, n: int) -> SampleBatch:
    """Draw ``n`` exact samples of the stationary workload, deterministic in ``seed``.

    Draw ``i`` depends only on ``(seed, i)``.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    n_blocks = -(-n // SAMPLE_BLOCK)
    blocks = map_blocks(lambda b: _sample_block(decomp, seed, b), n_blocks)
    values = np.concatenate(blocks)[:n]
    meta = {"source": "pk_sampler", "rho": decomp.rho, "lambda": rate_to_float(decomp.lam)}
    return SampleBatch(values, int(seed), decomp.model_digest, n, meta)


def empirical_lst(batch: SampleBatch, alpha: float) -> tuple[float, float]:
    """Sample mean of ``exp(-alpha W)`` and its standard error."""
    if not alpha >= 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    values = np.asarray(getattr(batch, "values", batch), dtype=float)
    if values.size == 0:
        raise DomainError("empty batch")
    if alpha == 0:
        return 1.0, 0.0
    w = np.exp(-alpha * values)
    se = float(w.std(ddof=1) / math.sqrt(w.size)) if w.size > 1 else 0.0
    return float(w.mean()), se


def series_lst(decomp: PKDecomposition, alpha: float, k_max: int = 64) -> float:
    """Partial sum ``sum_{k<=K} (1-rho) rho^k F_e(alpha)^k (lambda/(lambda+alpha))^(k+1)``."""
    fe = 1.0 if decomp.excess is None else float(decomp.excess.lst(alpha))
    ex = float(decomp.exponential_lst(alpha))
    k = np.arange(k_max + 1)
    return float(np.sum(decomp.geometric_weights(k_max) * fe**k * ex ** (k + 1)))
