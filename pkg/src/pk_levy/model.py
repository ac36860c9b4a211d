"""Process triplets and their validation.

A model is ``X_t = -c t + sigma B_t + S_t`` with ``S`` a subordinator whose
Lévy measure is ``jumps``.  When the small jumps have infinite mean the drift
``c`` does not exist and the model is given in compensated form by
``mu = phi'(0)`` instead.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidParameter, UnstableModel
from .jumps import JumpMeasure, NoJumps, jumps_from_dict, jumps_to_dict


class _InfiniteRate:
    """Marker for an infinite rate, i.e. a phase that is identically zero."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"

    def __float__(self):
        return math.inf

    def __reduce__(self):
        return (_InfiniteRate, ())


INFINITE = _InfiniteRate()


def is_infinite(rate) -> bool:
    return rate is INFINITE


def rate_to_float(rate) -> float:
    return math.inf if rate is INFINITE else float(rate)


def rate_from_value(value):
    """Parse a user-facing rate (number, ``"inf"``, or ``math.inf``)."""
    if value is INFINITE:
        return value
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "+inf"):
            return INFINITE
        value = float(value)
    value = float(value)
    if math.isinf(value) and value > 0:
        return INFINITE
    return value


@dataclass(frozen=True)
class LevyModel:
    """Triplet ``(c, sigma2, jumps)``, or ``(mu, sigma2, jumps)`` in general mode.

    Exactly one of ``drift_c`` and ``mu`` must be given.
    """

    drift_c: float | None = None
    sigma2: float = 0.0
    jumps: JumpMeasure = field(default_factory=NoJumps)
    mu: float | None = None

    def scaled(self, gamma: float) -> LevyModel:
        """Time change ``t -> gamma t``: multiplies the exponent by ``gamma``."""
        return LevyModel(
            drift_c=None if self.drift_c is None else gamma * self.drift_c,
            sigma2=gamma * self.sigma2,
            jumps=self.jumps.scaled(gamma),
            mu=None if self.mu is None else gamma * self.mu,
        )

    def to_dict(self) -> dict:
        out: dict = {}
        if self.drift_c is not None:
            out["drift_c"] = self.drift_c
        if self.mu is not None:
            out["mu"] = self.mu
        out["sigma2"] = self.sigma2
        out["jumps"] = jumps_to_dict(self.jumps)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> LevyModel:
        def num(key):
            value = data.get(key)
            return None if value is None else float(value)

        return cls(
            drift_c=num("drift_c"),
            sigma2=float(data.get("sigma2", 0.0)),
            jumps=jumps_from_dict(data.get("jumps")),
            mu=num("mu"),
        )


@dataclass(frozen=True)
class ValidatedModel:
    """A model annotated with its derived quantities.

    ``drift_c``, ``rho`` and ``lam`` are None when the jump measure has
    infinite mean (the c-form does not exist).  ``lam`` is ``INFINITE`` when
    ``sigma2 == 0``.
    """

    model: LevyModel
    nu_bar: float
    mu: float
    drift_c: float | None
    rho: float | None
    lam: object
    general_drift_b: float
    decomposable: bool
    truncation_required: bool

    @property
    def sigma2(self) -> float:
        return self.model.sigma2

    @property
    def jumps(self) -> JumpMeasure:
        return self.model.jumps

    def digest(self) -> str:
        """Content hash of the canonical model description."""
        payload = json.dumps(self.model.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    def report(self) -> dict:
        return {
            "nu_bar": self.nu_bar,
            "mu": self.mu,
            "drift_c": self.drift_c,
            "rho": self.rho,
            "lambda": None if self.lam is None else rate_to_float(self.lam),
            "b": self.general_drift_b,
            "decomposable": self.decomposable,
            "truncation_required": self.truncation_required,
        }


def _check_number(name: str, value, *, positive: bool = False, nonnegative: bool = False):
    if value is None:
        return
    if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
        raise InvalidParameter(f"{name} must be a finite number, got {value!r}")
    if positive and not value > 0:
        raise InvalidParameter(f"{name} must be > 0, got {value}")
    if nonnegative and not value >= 0:
        raise InvalidParameter(f"{name} must be >= 0, got {value}")


def validate(model: LevyModel) -> ValidatedModel:
    """Check stability and annotate ``model`` with ``nu_bar, mu, rho, lambda``.

    Raises
    ------
    InvalidParameter
        A field is missing or out of range.
    UnstableModel
        ``mu = c - nu_bar <= 0`` (or a supplied ``mu <= 0``).
    """
    if (model.drift_c is None) == (model.mu is None):
        raise InvalidParameter("exactly one of drift_c and mu must be given")
    _check_number("drift_c", model.drift_c)
    _check_number("mu", model.mu)
    _check_number("sigma2", model.sigma2, nonnegative=True)
    if not isinstance(model.jumps, JumpMeasure):
        raise InvalidParameter(f"jumps must be a JumpMeasure, got {type(model.jumps).__name__}")

    nu_bar = float(model.jumps.mean())
    decomposable = math.isfinite(nu_bar)

    if model.drift_c is not None:
        if not decomposable:
            raise InvalidParameter(
                f"{model.jumps.family} has infinite small-jump mean; give mu instead of drift_c"
            )
        if not model.drift_c > 0:
            raise UnstableModel(f"drift_c must be > 0, got {model.drift_c}")
        c = float(model.drift_c)
        mu = c - nu_bar
        if not mu > 0:
            raise UnstableModel(f"rho = nu_bar / c = {nu_bar / c:.6g} >= 1 (nu_bar={nu_bar:.6g}, c={c:.6g})")
    else:
        mu = float(model.mu)
        if not mu > 0:
            raise UnstableModel(f"mu must be > 0, got {mu}")
        c = mu + nu_bar if decomposable else None

    if c is not None:
        rho = nu_bar / c
        lam = INFINITE if model.sigma2 == 0 else 2.0 * c / model.sigma2
    else:
        rho = None
        lam = None

    # b = mu + int_(1, inf) x nu(dx), and int_(1, inf) x nu(dx) = tail(1) + int_1^inf tail
    large = float(model.jumps.tail(1.0)) + float(model.jumps.tail_integral(1.0))

    return ValidatedModel(
        model=model,
        nu_bar=nu_bar,
        mu=mu,
        drift_c=c,
        rho=rho,
        lam=lam,
        general_drift_b=mu + large,
        decomposable=decomposable,
        truncation_required=not decomposable,
    )


def tail(jumps: JumpMeasure, x):
    """``nu((x, inf))``, for ``x > 0``."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"tail is defined for x > 0, got {x!r}")
    return jumps.tail(arr)


def mean_jump(jumps: JumpMeasure) -> float:
    """``nu_bar = int x nu(dx)``; ``math.inf`` for infinite small-jump mean."""
    return float(jumps.mean())


def load_model(data: dict) -> ValidatedModel:
    return validate(LevyModel.from_dict(data))
