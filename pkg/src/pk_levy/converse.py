"""Build a Lévy model from a prescribed geometric-compound stationary law.

Given ``0 < p <= 1``, a rate ``0 < lambda <= inf`` and a nonincreasing
density ``f``, the model with

    tail(x) = beta f(x),   c = beta / (1 - p),   sigma2 = 2 beta / (lambda (1 - p))

has stationary workload ``X_0 + sum_{n=1}^N (X_n + Y_n)`` with
``N ~ G(p)``, ``X_i ~ Exp(lambda)`` and ``Y_i ~ f``.  ``beta`` only rescales
time and does not change the stationary law.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from scipy import optimize

from .decomposition import PKDecomposition, decompose
from .errors import DomainError, NonMonotoneTail, NotADensity, NotNonincreasing
from .jumps import (
    CompoundPoisson,
    DeterministicLaw,
    ExponentialLaw,
    GammaSubordinator,
    JumpMeasure,
    NoJumps,
    TabulatedTail,
    jumps_from_dict,
    jumps_to_dict,
)
from .model import LevyModel, ValidatedModel, is_infinite, rate_from_value, rate_to_float, validate
from .numerics import integrate_tail

NORMALIZATION_SILENT = 1e-9
NORMALIZATION_RESCALE = 1e-6


@dataclass(frozen=True)
class DensitySpec:
    """A nonincreasing probability density on (0, inf), stored as a unit-mean tail.

    Families: ``exponential`` (``theta``), ``uniform`` (``upper``),
    ``gamma_excess`` (``rate``; density ``rate E1(rate x)``, unbounded at 0)
    ``tabulated`` (``x``, ``f``, ``interpolation``) and ``excess_of``
    (``jumps``: the excess density ``tail / nu_bar`` of a jump measure).
    """

    family: str
    params: dict = field(default_factory=dict)

    @classmethod
    def excess_of(cls, jumps: JumpMeasure) -> DensitySpec:
        return cls("excess_of", {"jumps": jumps_to_dict(jumps)})

    def measure(self) -> JumpMeasure:
        """The jump measure whose tail equals this density (so its mean is 1)."""
        p = self.params
        if self.family == "exponential":
            theta = float(p["theta"])
            return CompoundPoisson(theta, ExponentialLaw(theta))
        if self.family == "uniform":
            upper = float(p["upper"])
            return CompoundPoisson(1.0 / upper, DeterministicLaw(upper))
        if self.family == "gamma_excess":
            rate = float(p["rate"])
            return GammaSubordinator(rate, rate)
        if self.family == "tabulated":
            return _tabulated_density(p)
        if self.family == "excess_of":
            jumps = jumps_from_dict(p["jumps"])
            return jumps.scaled(1.0 / jumps.mean())
        raise DomainError(f"unknown density family {self.family!r}")

    def pdf(self, x):
        return self.measure().tail(x)

    def cdf(self, x: float) -> float:
        m = self.measure()
        return integrate_tail(m.tail, 0.0, x, points=m.knots())

    def quantile(self, u: float) -> float:
        """``F^{-1}(u)``, closed form or by root-finding on the quadrature CDF."""
        if self.family == "exponential":
            return -math.log1p(-u) / float(self.params["theta"])
        if self.family == "uniform":
            return u * float(self.params["upper"])
        hi = 1.0
        while self.cdf(hi) < u:
            hi *= 2.0
        return optimize.brentq(lambda x: self.cdf(x) - u, 0.0, hi, xtol=1e-14, rtol=1e-14)

    def to_dict(self) -> dict:
        return {"family": self.family, "params": dict(self.params)}


def _tabulated_density(params: dict) -> TabulatedTail:
    x = tuple(float(t) for t in params["x"])
    f = tuple(float(t) for t in params["f"])
    interpolation = params.get("interpolation", "loglinear")
    try:
        table = TabulatedTail(x, f, interpolation)
    except NonMonotoneTail as exc:
        raise NotNonincreasing(f"density must be nonincreasing: {exc}") from None
    total = integrate_tail(table.tail, 0.0, x[-1], points=list(x))
    delta = abs(total - 1.0)
    if delta > NORMALIZATION_RESCALE:
        raise NotADensity(f"density integrates to {total:.12g}, not 1")
    if delta > NORMALIZATION_SILENT:
        warnings.warn(f"tabulated density integrates to {total:.12g}; rescaled to 1", stacklevel=3)
        table = table.scaled(1.0 / total)
    return table


@dataclass(frozen=True)
class ExcessSpec:
    p: float
    lam: object
    density: DensitySpec
    beta: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "lam", rate_from_value(self.lam))
        if not 0 < self.p <= 1:
            raise DomainError(f"p must lie in (0, 1], got {self.p}")
        if not is_infinite(self.lam) and not self.lam > 0:
            raise DomainError(f"lambda must be > 0, got {self.lam}")
        if not self.beta > 0:
            raise DomainError(f"beta must be > 0, got {self.beta}")

    def with_beta(self, beta: float) -> ExcessSpec:
        return ExcessSpec(self.p, self.lam, self.density, beta)

    @classmethod
    def from_dict(cls, data: dict) -> ExcessSpec:
        dens = data["density"]
        return cls(
            p=float(data["p"]),
            lam=data.get("lambda", "inf"),
            density=DensitySpec(dens["family"], dict(dens.get("params", {}))),
            beta=float(data.get("beta", 1.0)),
        )

    def to_dict(self) -> dict:
        lam = "inf" if is_infinite(self.lam) else self.lam
        return {"p": self.p, "lambda": lam, "beta": self.beta, "density": self.density.to_dict()}


def spec_from_decomposition(dec: PKDecomposition, beta: float = 1.0) -> ExcessSpec:
    """The ``(p, lambda, f)`` description of an existing decomposition."""
    if dec.excess is None:
        density = DensitySpec("exponential", {"theta": 1.0})
    else:
        density = DensitySpec.excess_of(dec.excess.source)
    return ExcessSpec(1.0 - dec.rho, dec.lam, density, beta)


def build(spec: ExcessSpec) -> ValidatedModel:
    """Reverse-engineer the model whose PK law is ``spec``.

    With ``p = 1`` the jump part vanishes, ``f`` is ignored and the result is
    Brownian motion with drift ``c = beta`` (pure drift if ``lambda`` is
    infinite).
    """
    beta = spec.beta
    if spec.p == 1:
        c = beta
        jumps: JumpMeasure = NoJumps()
        sigma2 = 0.0 if is_infinite(spec.lam) else 2.0 * c / spec.lam
    else:
        c = beta / (1.0 - spec.p)
        sigma2 = 0.0 if is_infinite(spec.lam) else 2.0 * beta / (spec.lam * (1.0 - spec.p))
        jumps = spec.density.measure().scaled(beta)
    return validate(LevyModel(drift_c=c, sigma2=sigma2, jumps=jumps))


# rho and lambda are exact for closed-form densities; tabulated ones go through quadrature
PARAM_RTOL = 1e-12
ROUND_TRIP_U = tuple(k / 10 for k in range(1, 10))


def round_trip(spec: ExcessSpec, tol: float = 1e-9) -> dict:
    """Decompose ``build(spec)`` and compare against ``(1 - p, lambda, F)``."""
    model = build(spec)
    dec = decompose(model)
    discrepancies = []
    expected_rho = 1.0 - spec.p
    if abs(dec.rho - expected_rho) > PARAM_RTOL:
        discrepancies.append(f"rho={dec.rho!r} differs from 1-p={expected_rho!r}")
    lam_ok = (is_infinite(dec.lam) and is_infinite(spec.lam)) or (
        not is_infinite(dec.lam) and not is_infinite(spec.lam) and abs(dec.lam - spec.lam) <= PARAM_RTOL * spec.lam
    )
    if not lam_ok:
        discrepancies.append(f"lambda={rate_to_float(dec.lam)!r} differs from {rate_to_float(spec.lam)!r}")
    errors = []
    if dec.excess is not None:
        for u in ROUND_TRIP_U:
            got = float(dec.excess.quantile(u))
            want = spec.density.quantile(u)
            err = abs(got - want)
            errors.append(err)
            if err > tol * max(1.0, abs(want)):
                discrepancies.append(f"excess quantile at u={u:.1f}: {got!r} vs {want!r}")
    return {
        "rho": dec.rho,
        "expected_rho": expected_rho,
        "lambda": rate_to_float(dec.lam),
        "expected_lambda": rate_to_float(spec.lam),
        "quantile_errors": errors,
        "max_quantile_error": max(errors) if errors else 0.0,
        "discrepancies": discrepancies,
        "ok": not discrepancies,
    }
