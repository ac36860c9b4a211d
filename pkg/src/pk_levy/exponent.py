"""Laplace exponent, the generalized Pollaczek-Khinchine transform, and truncation.

With ``E exp(-alpha X_t) = exp(phi(alpha) t)``, the supremum ``M`` of ``X``
(equivalently the stationary workload) has transform

    E exp(-alpha M) = alpha phi'(0) / phi(alpha).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .jumps import CompoundPoisson, ParetoLaw, TruncatedJumps
from .model import LevyModel, ValidatedModel, is_infinite, validate
from .numerics import InversionConfig, invert_lst_to_cdf

FORMS = ("c_form", "mu_form", "truncated")


@dataclass(frozen=True)
class ExponentView:
    """A validated model together with the exponent representation to evaluate.

    ``form`` is ``"c_form"`` (drift minus subordinator), ``"mu_form"``
    (compensated jumps) or ``"truncated"`` (c-form of the model whose jumps
    below ``epsilon`` were removed; ``parent`` is the untruncated model).
    """

    model: ValidatedModel
    form: str = "c_form"
    epsilon: float | None = None
    parent: ValidatedModel | None = None

    def __post_init__(self):
        if self.form not in FORMS:
            raise DomainError(f"form must be one of {FORMS}, got {self.form!r}")
        if self.form != "mu_form" and not self.model.decomposable:
            raise DomainError("c-form evaluation needs a finite mean jump rate; use mu_form or truncate")


def exponent_view(model: ValidatedModel | LevyModel, form: str | None = None) -> ExponentView:
    """Wrap ``model``, choosing the c-form whenever the jump mean is finite."""
    if isinstance(model, LevyModel):
        model = validate(model)
    if form is None:
        form = "c_form" if model.decomposable else "mu_form"
    return ExponentView(model, form)


def _check_alpha(alpha):
    arr = np.asarray(alpha)
    if np.iscomplexobj(arr) or np.any(~(arr >= 0)):
        raise DomainError(f"alpha must be real and >= 0, got {alpha!r}")
    return arr.astype(float)


def phi_complex(view: ExponentView, s):
    """Exponent at real or complex ``s`` (no domain checks)."""
    m = view.model
    quad = 0.5 * m.sigma2 * s * s
    if view.form == "mu_form":
        return m.mu * s + quad + m.jumps.compensated_integral(s)
    return m.drift_c * s + quad - m.jumps.jump_integral(s)


def phi(view: ExponentView, alpha):
    """Laplace exponent ``phi(alpha)`` for ``alpha >= 0``."""
    a = _check_alpha(alpha)
    out = np.where(a == 0, 0.0, phi_complex(view, np.where(a == 0, 1.0, a)))
    return out[()] if out.ndim == 0 else out


def phi_prime_zero(view: ExponentView) -> float:
    """``phi'(0) = mu``, which equals ``c (1 - rho)`` in the c-form."""
    return view.model.mu


def excess_lst(view: ExponentView, s):
    """LST of the stationary excess law: ``J(s) / (s nu_bar)``."""
    m = view.model
    return m.jumps.jump_integral(s) / (s * m.nu_bar)


def pk_lst_complex(view: ExponentView, s):
    return s * view.model.mu / phi_complex(view, s)


def pk_lst(view: ExponentView, alpha):
    """Generalized Pollaczek-Khinchine transform ``alpha phi'(0) / phi(alpha)``.

    Extended continuously by 1 at ``alpha = 0``.
    """
    a = _check_alpha(alpha)
    safe = np.where(a == 0, 1.0, a)
    out = np.where(a == 0, 1.0, pk_lst_complex(view, safe))
    return out[()] if out.ndim == 0 else out


def pk_lst_decomposed(view: ExponentView, alpha):
    """The same transform written as ``(1 - rho) / (1 + alpha/lambda - rho F_e(alpha))``."""
    a = _check_alpha(alpha)
    m = view.model
    if view.form == "mu_form":
        raise DomainError("the decomposed form needs a finite mean jump rate")
    safe = np.where(a == 0, 1.0, a)
    diffusive = 0.0 if is_infinite(m.lam) else safe / m.lam
    jump_part = 0.0 if m.rho == 0 else m.rho * excess_lst(view, safe)
    out = np.where(a == 0, 1.0, (1.0 - m.rho) / (1.0 + diffusive - jump_part))
    return out[()] if out.ndim == 0 else out


def truncate(view: ExponentView, eps: float) -> ExponentView:
    """Drop jumps of size ``<= eps`` and compensate the drift so that ``phi'(0)`` is unchanged.

    The result is the c-form view of a finite-activity model with
    ``c_eps = mu + int_(eps, inf) x nu(dx)``.
    """
    if not eps > 0:
        raise DomainError(f"truncation level must be > 0, got {eps}")
    parent = view.parent if view.form == "truncated" else view.model
    jumps = parent.jumps
    base = jumps.base if isinstance(jumps, TruncatedJumps) else jumps
    cut = TruncatedJumps(base, max(eps, jumps.epsilon) if isinstance(jumps, TruncatedJumps) else eps)
    # mu-mode keeps phi'(0) bit-identical to the parent's
    truncated = validate(LevyModel(mu=parent.mu, sigma2=parent.sigma2, jumps=cut))
    return ExponentView(truncated, "truncated", epsilon=eps, parent=parent)


def zero_atom(view: ExponentView) -> float:
    """Mass of the stationary law at zero: ``1 - rho`` without a Brownian part, else 0."""
    m = view.model
    if m.sigma2 == 0 and m.decomposable and view.form != "mu_form":
        return 1.0 - m.rho
    return 0.0


def _heavy_tailed(view: ExponentView) -> bool:
    jumps = view.model.jumps
    if isinstance(jumps, TruncatedJumps):
        jumps = jumps.base
    return isinstance(jumps, CompoundPoisson) and isinstance(jumps.jump, ParetoLaw)


def default_inversion_config(view: ExponentView) -> InversionConfig:
    """Default settings; Pareto jumps get the looser ``1e-6`` target."""
    return InversionConfig(target=1e-6) if _heavy_tailed(view) else InversionConfig()


def stationary_cdf(view: ExponentView, x, cfg: InversionConfig | None = None, check: bool = True):
    """``P(M <= x)`` for ``x > 0`` by numerical inversion of the PK transform."""
    cfg = cfg or default_inversion_config(view)
    return invert_lst_to_cdf(lambda s: pk_lst_complex(view, s), x, cfg, atom=zero_atom(view), check=check)


def stationary_mean(view: ExponentView) -> float:
    """``E M = (sigma2 + int x^2 nu(dx)) / (2 mu)``, possibly infinite."""
    m = view.model
    return (m.sigma2 + m.jumps.second_moment()) / (2.0 * m.mu) if math.isfinite(m.jumps.second_moment()) else math.inf
