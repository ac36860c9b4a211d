"""Jump measures of spectrally positive Lévy processes, stored by their tails.

Every measure exposes ``tail(x) = nu((x, inf))`` together with the handful of
integrals the rest of the package consumes:

* ``tail_integral(x)``: the upper integral of the tail over ``(x, inf)``;
  at ``x = 0`` this is the mean jump rate ``nu_bar``.
* ``jump_integral(alpha)``: ``J(alpha) = int (1 - exp(-alpha x)) nu(dx)``.
* ``compensated_integral(alpha)``: ``int (exp(-alpha x) - 1 + alpha x) nu(dx)``.

Closed forms are used wherever they exist; ``alpha`` may be complex with a
positive real part, which the transform inversion relies on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar

import mpmath
import numpy as np
from scipy import integrate, special

from .errors import DomainError, InvalidParameter, NonMonotoneTail, NotDecomposable, QuadratureFailure

QUAD_RTOL = 1e-10


def _scalar_or_array(value):
    value = np.asarray(value)
    return value[()] if value.ndim == 0 else value


def _complex_quad(func, a, b, points=None):
    """Integrate a possibly complex integrand with a hard relative error budget."""
    kwargs = dict(epsabs=0.0, epsrel=1e-12, limit=400)
    if points is not None and np.isfinite(b):
        kwargs["points"] = points
    re, re_err = integrate.quad(lambda t: np.real(func(t)), a, b, **kwargs)
    im, im_err = integrate.quad(lambda t: np.imag(func(t)), a, b, **kwargs)
    value = complex(re, im)
    err = math.hypot(re_err, im_err)
    if err > QUAD_RTOL * max(abs(value), 1e-300) and err > 1e-15:
        raise QuadratureFailure(f"quadrature error {err:.3g} exceeds budget for value {value:.6g}")
    return value if im != 0.0 else re


class JumpMeasure:
    """Interface shared by all jump-measure families."""

    family: ClassVar[str] = "abstract"

    def params(self) -> dict:
        raise NotImplementedError

    def tail(self, x):
        raise NotImplementedError

    def tail_integral(self, x):
        raise NotImplementedError

    def mean(self) -> float:
        return float(self.tail_integral(0.0))

    def second_moment(self) -> float:
        """Return ``int x^2 nu(dx)`` (may be infinite)."""
        raise NotImplementedError

    def activity(self) -> float:
        """Total mass ``nu((0, inf))``; infinite for infinite-activity families."""
        raise NotImplementedError

    @property
    def finite_activity(self) -> bool:
        return math.isfinite(self.activity())

    @property
    def finite_mean(self) -> bool:
        return math.isfinite(self.mean())

    def jump_integral(self, alpha):
        raise NotImplementedError

    def compensated_integral(self, alpha):
        return alpha * self.mean() - self.jump_integral(alpha)

    def jump_integral_above(self, eps: float, alpha):
        """``int_(eps, inf) (1 - exp(-alpha x)) nu(dx)`` by quadrature over the tail."""
        return _scalar_or_array(
            np.vectorize(lambda a: self._jump_integral_above_one(eps, a), otypes=[np.result_type(alpha, float)])(alpha)
        )

    def _jump_integral_above_one(self, eps, alpha):
        if alpha == 0:
            return 0.0 * alpha
        head = self.tail(eps) * -np.expm1(-alpha * eps)
        pts = [k for k in self.knots() if k > eps]
        body = 0.0
        lo = eps
        for hi in pts:
            body = body + _complex_quad(lambda x: np.exp(-alpha * x) * self.tail(x), lo, hi)
            lo = hi
        body = body + _complex_quad(lambda x: np.exp(-alpha * x) * self.tail(x), lo, np.inf)
        return head + alpha * body

    def second_moment_above(self, eps: float) -> float:
        """``int_(eps, inf) x^2 nu(dx)`` via ``eps^2 tail(eps) + 2 int_eps^inf x tail(x) dx``."""
        if not math.isfinite(self.second_moment()):
            return math.inf
        body = _complex_quad(lambda x: x * self.tail(x), eps, np.inf)
        return float(eps * eps * self.tail(eps) + 2.0 * body)

    def tail_inverse(self, t):
        """Generalized inverse ``inf{x > 0 : tail(x) <= t}``, by bisection on log x."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros_like(t)
        todo = t < self.activity()
        if np.any(todo):
            tt = t[todo]
            lo = np.full_like(tt, 1e-300)
            hi = np.ones_like(tt)
            while np.any(grow := self.tail(hi) > tt):
                hi = np.where(grow, hi * 2.0, hi)
            while np.any(shrink := self.tail(lo) <= tt):
                lo = np.where(shrink, lo * 0.5, lo)
            for _ in range(200):
                mid = np.sqrt(lo * hi) if np.all(lo > 0) else 0.5 * (lo + hi)
                above = self.tail(mid) > tt
                lo = np.where(above, mid, lo)
                hi = np.where(above, hi, mid)
                if np.all(hi - lo <= 4 * np.spacing(hi)):
                    break
            out[todo] = hi
        return out

    def tail_integral_inverse(self, y):
        """Closed-form inverse of ``tail_integral`` where one exists, else None."""
        return None

    def excess_quantile(self, u):
        """Closed-form quantile of the stationary excess law, or None."""
        return None

    def knots(self) -> list[float]:
        """Breakpoints where the tail is non-smooth (used to split quadrature)."""
        return []

    def scaled(self, gamma: float) -> JumpMeasure:
        raise NotImplementedError

    def truncated(self, eps: float) -> TruncatedJumps:
        return TruncatedJumps(self, eps)

    def sample_jumps(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw i.i.d. jump sizes from the normalized measure (finite activity only)."""
        mass = self.activity()
        if not math.isfinite(mass) or mass <= 0:
            raise NotDecomposable(f"{self.family} has no finite jump-size law; truncate first")
        v = 1.0 - rng.random(size)  # in (0, 1]
        return self.tail_inverse(mass * v)

    def increment(self, rng: np.random.Generator, h: float, size: int) -> np.ndarray:
        """Sum of jumps over a time step ``h`` for ``size`` independent paths."""
        counts = rng.poisson(self.activity() * h, size)
        total = int(counts.sum())
        out = np.zeros(size)
        if total:
            jumps = self.sample_jumps(rng, total)
            out += np.bincount(np.repeat(np.arange(size), counts), weights=jumps, minlength=size)
        return out


# --------------------------------------------------------------------------
# Jump-size laws for compound Poisson measures
# --------------------------------------------------------------------------


class JumpLaw:
    kind: ClassVar[str] = "abstract"


@dataclass(frozen=True)
class ExponentialLaw(JumpLaw):
    theta: float
    kind: ClassVar[str] = "exponential"

    def __post_init__(self):
        if not self.theta > 0:
            raise InvalidParameter(f"exponential rate theta must be > 0, got {self.theta}")

    def params(self):
        return {"kind": self.kind, "theta": self.theta}

    def survival(self, x):
        return np.exp(-self.theta * np.asarray(x, dtype=float))

    def survival_integral(self, x):
        return np.exp(-self.theta * np.asarray(x, dtype=float)) / self.theta

    def mean(self):
        return 1.0 / self.theta

    def second_moment(self):
        return 2.0 / self.theta**2

    def one_minus_lst(self, alpha):
        return alpha / (self.theta + alpha)

    def quantile(self, u):
        return -np.log1p(-np.asarray(u, dtype=float)) / self.theta

    def excess_quantile(self, u):
        # memoryless: the excess law is the jump law itself
        return self.quantile(u)

    def knots(self):
        return []


@dataclass(frozen=True)
class DeterministicLaw(JumpLaw):
    size: float
    kind: ClassVar[str] = "deterministic"

    def __post_init__(self):
        if not self.size > 0:
            raise InvalidParameter(f"deterministic jump size must be > 0, got {self.size}")

    def params(self):
        return {"kind": self.kind, "d": self.size}

    def survival(self, x):
        return (np.asarray(x, dtype=float) < self.size).astype(float)

    def survival_integral(self, x):
        return np.maximum(self.size - np.asarray(x, dtype=float), 0.0)

    def mean(self):
        return self.size

    def second_moment(self):
        return self.size**2

    def one_minus_lst(self, alpha):
        return -np.expm1(-alpha * self.size)

    def quantile(self, u):
        return np.full_like(np.asarray(u, dtype=float), self.size)

    def excess_quantile(self, u):
        return self.size * np.asarray(u, dtype=float)

    def knots(self):
        return [self.size]


@dataclass(frozen=True)
class UniformLaw(JumpLaw):
    upper: float
    kind: ClassVar[str] = "uniform"

    def __post_init__(self):
        if not self.upper > 0:
            raise InvalidParameter(f"uniform upper bound must be > 0, got {self.upper}")

    def params(self):
        return {"kind": self.kind, "u": self.upper}

    def survival(self, x):
        return np.clip(1.0 - np.asarray(x, dtype=float) / self.upper, 0.0, 1.0)

    def survival_integral(self, x):
        r = np.maximum(self.upper - np.asarray(x, dtype=float), 0.0)
        return r * r / (2.0 * self.upper)

    def mean(self):
        return self.upper / 2.0

    def second_moment(self):
        return self.upper**2 / 3.0

    def one_minus_lst(self, alpha):
        z = np.asarray(alpha * self.upper)
        safe = np.where(z == 0, 1.0, z)
        return np.where(z == 0, 0.0, 1.0 + np.expm1(-safe) / safe)

    def quantile(self, u):
        return self.upper * np.asarray(u, dtype=float)

    def excess_quantile(self, u):
        # excess density 2(1 - x/u)/u on (0, u)
        return self.upper * (1.0 - np.sqrt(1.0 - np.asarray(u, dtype=float)))

    def knots(self):
        return [self.upper]


PARETO_CF_MIN = 0.05
TABULATED_CF_MIN = 0.05
STABLE_CF_MIN = 0.05


def _expint_cf(p: float, z: np.ndarray, max_iter: int = 10_000) -> np.ndarray:
    """``E_p(z)`` for ``Re z >= 0``, ``z != 0``, by the modified Lentz continued fraction."""
    z = np.asarray(z, dtype=complex)
    b = z + p
    c = np.full_like(z, 1e300)
    d = 1.0 / b
    h = d.copy()
    live = np.arange(z.size)
    for i in range(1, max_iter):
        if live.size == 0:
            break
        a = -i * (p - 1.0 + i)
        b[live] += 2.0
        d[live] = 1.0 / (a * d[live] + b[live])
        c[live] = b[live] + a / c[live]
        step = c[live] * d[live]
        h[live] *= step
        live = live[np.abs(step - 1.0) >= 1e-15]
    if live.size:
        raise QuadratureFailure(f"exponential integral continued fraction did not converge at z={z[live[0]]}")
    return h * np.exp(-z)


@dataclass(frozen=True)
class ParetoLaw(JumpLaw):
    """Pareto(x_m, k): ``P(J > x) = (x_m / x)^k`` for ``x >= x_m``.

    ``k > 2`` is required unless ``allow_heavy`` is set, in which case
    ``k > 1`` suffices and the second moment may be infinite.
    """

    scale: float
    shape: float
    allow_heavy: bool = False
    kind: ClassVar[str] = "pareto"

    def __post_init__(self):
        if not self.scale > 0:
            raise InvalidParameter(f"pareto scale x_m must be > 0, got {self.scale}")
        floor = 1.0 if self.allow_heavy else 2.0
        if not self.shape > floor:
            raise InvalidParameter(f"pareto shape k must be > {floor:g}, got {self.shape}")

    def params(self):
        out = {"kind": self.kind, "x_m": self.scale, "k": self.shape}
        if self.allow_heavy:
            out["allow_heavy"] = True
        return out

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(x < self.scale, 1.0, (self.scale / np.maximum(x, self.scale)) ** self.shape)

    def survival_integral(self, x):
        x = np.asarray(x, dtype=float)
        k, xm = self.shape, self.scale
        below = (xm - x) + xm / (k - 1.0)
        above = xm**k * np.maximum(x, xm) ** (1.0 - k) / (k - 1.0)
        return np.where(x < xm, below, above)

    def mean(self):
        return self.scale * self.shape / (self.shape - 1.0)

    def second_moment(self):
        if self.shape <= 2.0:
            return math.inf
        return self.scale**2 * self.shape / (self.shape - 2.0)

    def one_minus_lst(self, alpha):
        # E exp(-alpha J) = k E_{k+1}(alpha x_m), generalized exponential integral
        a = np.asarray(alpha)
        z = np.atleast_1d(a * self.scale).astype(complex)
        small = np.abs(z) < PARETO_CF_MIN
        ep = np.empty_like(z)
        ep[~small] = _expint_cf(self.shape + 1.0, z[~small])
        ep[small] = [complex(mpmath.expint(self.shape + 1.0, t)) if t != 0 else 1.0 / self.shape for t in z[small]]
        out = (1.0 - self.shape * ep).reshape(a.shape)
        return _scalar_or_array(out if np.iscomplexobj(a) else out.real)

    def quantile(self, u):
        return self.scale * (1.0 - np.asarray(u, dtype=float)) ** (-1.0 / self.shape)

    def excess_quantile(self, u):
        u = np.asarray(u, dtype=float)
        k, xm = self.shape, self.scale
        split = (k - 1.0) / k
        lin = u * xm * k / (k - 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            power = xm * (k * (1.0 - u)) ** (-1.0 / (k - 1.0))
        return np.where(u <= split, lin, power)

    def knots(self):
        return [self.scale]


JUMP_LAWS = {cls.kind: cls for cls in (ExponentialLaw, DeterministicLaw, UniformLaw, ParetoLaw)}


def jump_law_from_params(spec: dict) -> JumpLaw:
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind == "exponential":
        return ExponentialLaw(float(spec["theta"]))
    if kind == "deterministic":
        return DeterministicLaw(float(spec["d"]))
    if kind == "uniform":
        return UniformLaw(float(spec["u"]))
    if kind == "pareto":
        return ParetoLaw(float(spec["x_m"]), float(spec["k"]), bool(spec.get("allow_heavy", False)))
    raise InvalidParameter(f"unknown jump distribution {kind!r}; expected one of {sorted(JUMP_LAWS)}")


# --------------------------------------------------------------------------
# Families
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class NoJumps(JumpMeasure):
    """The zero measure (Brownian motion with drift)."""

    family: ClassVar[str] = "none"

    def params(self):
        return {}

    def tail(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))[()]

    def tail_integral(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))[()]

    def mean(self):
        return 0.0

    def second_moment(self):
        return 0.0

    def activity(self):
        return 0.0

    def jump_integral(self, alpha):
        return np.zeros_like(alpha)[()] if np.ndim(alpha) else 0.0 * alpha

    def compensated_integral(self, alpha):
        return self.jump_integral(alpha)

    def jump_integral_above(self, eps, alpha):
        return self.jump_integral(alpha)

    def second_moment_above(self, eps):
        return 0.0

    def tail_inverse(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def scaled(self, gamma):
        return self

    def increment(self, rng, h, size):
        return np.zeros(size)


@dataclass(frozen=True)
class CompoundPoisson(JumpMeasure):
    """Jumps arriving at ``rate`` per unit time with i.i.d. sizes from ``jump``."""

    rate: float
    jump: JumpLaw
    family: ClassVar[str] = "compound_poisson"

    def __post_init__(self):
        if not self.rate > 0:
            raise InvalidParameter(f"compound Poisson rate must be > 0, got {self.rate}")

    def params(self):
        return {"rate": self.rate, "jump_dist": self.jump.params()}

    def tail(self, x):
        return _scalar_or_array(self.rate * self.jump.survival(x))

    def tail_integral(self, x):
        return _scalar_or_array(self.rate * self.jump.survival_integral(x))

    def mean(self):
        return self.rate * self.jump.mean()

    def second_moment(self):
        return self.rate * self.jump.second_moment()

    def second_moment_above(self, eps):
        if isinstance(self.jump, ExponentialLaw):
            th = self.jump.theta
            return self.rate * math.exp(-th * eps) * (eps * eps + 2 * eps / th + 2 / th**2)
        return super().second_moment_above(eps)

    def activity(self):
        return self.rate

    def jump_integral(self, alpha):
        return self.rate * self.jump.one_minus_lst(alpha)

    def compensated_integral(self, alpha):
        if isinstance(self.jump, ExponentialLaw):
            th = self.jump.theta
            return self.rate * alpha * alpha / (th * (th + alpha))
        return super().compensated_integral(alpha)

    def tail_inverse(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = self.jump.quantile(np.clip(1.0 - t / self.rate, 0.0, 1.0))
        return np.where(t >= self.rate, 0.0, q)

    def excess_quantile(self, u):
        return self.jump.excess_quantile(u)

    def knots(self):
        return self.jump.knots()

    def scaled(self, gamma):
        return CompoundPoisson(self.rate * gamma, self.jump)

    def sample_jumps(self, rng, size):
        return self.jump.quantile(rng.random(size))


@dataclass(frozen=True)
class GammaSubordinator(JumpMeasure):
    """Lévy density ``shape * x^-1 * exp(-rate x)``; infinite activity, finite mean."""

    shape: float
    rate: float
    family: ClassVar[str] = "gamma_subordinator"

    def __post_init__(self):
        if not self.shape > 0:
            raise InvalidParameter(f"gamma subordinator shape must be > 0, got {self.shape}")
        if not self.rate > 0:
            raise InvalidParameter(f"gamma subordinator rate must be > 0, got {self.rate}")

    def params(self):
        return {"shape": self.shape, "rate": self.rate}

    def tail(self, x):
        return _scalar_or_array(self.shape * special.exp1(self.rate * np.asarray(x, dtype=float)))

    def tail_integral(self, x):
        x = np.asarray(x, dtype=float)
        b = self.rate
        with np.errstate(invalid="ignore"):
            xe1 = np.where(x > 0, x * special.exp1(b * np.where(x > 0, x, 1.0)), 0.0)
        return _scalar_or_array(self.shape * (np.exp(-b * x) / b - xe1))

    def mean(self):
        return self.shape / self.rate

    def second_moment(self):
        return self.shape / self.rate**2

    def second_moment_above(self, eps):
        b = self.rate
        return self.shape * math.exp(-b * eps) * (eps / b + 1 / b**2)

    def activity(self):
        return math.inf

    def jump_integral(self, alpha):
        return self.shape * np.log1p(alpha / self.rate)

    def compensated_integral(self, alpha):
        z = alpha / self.rate
        return self.shape * (z - np.log1p(z))

    def jump_integral_above(self, eps, alpha):
        b = self.rate
        return self.shape * (special.exp1(b * eps) - special.exp1((b + alpha) * eps))

    def scaled(self, gamma):
        return GammaSubordinator(self.shape * gamma, self.rate)

    def increment(self, rng, h, size):
        return rng.gamma(self.shape * h, 1.0 / self.rate, size)


@dataclass(frozen=True)
class StableSmallJumps(JumpMeasure):
    """Lévy density ``scale * x^(-1-index)`` with ``index`` in (1, 2).

    The small jumps have infinite mean, so this family only admits the
    compensated (mu-form) exponent and must be truncated before decomposition.
    """

    scale: float
    index: float
    family: ClassVar[str] = "stable_small_jumps"

    def __post_init__(self):
        if not self.scale > 0:
            raise InvalidParameter(f"stable scale C must be > 0, got {self.scale}")
        if not 1.0 < self.index < 2.0:
            raise InvalidParameter(f"stable index must lie in (1, 2), got {self.index}")

    def params(self):
        return {"scale": self.scale, "index": self.index}

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return _scalar_or_array(self.scale / self.index * x ** (-self.index))

    def tail_integral(self, x):
        x = np.asarray(x, dtype=float)
        a = self.index
        with np.errstate(divide="ignore"):
            return _scalar_or_array(self.scale * x ** (1.0 - a) / (a * (a - 1.0)))

    def mean(self):
        return math.inf

    def second_moment(self):
        return math.inf

    def second_moment_above(self, eps):
        return math.inf

    def activity(self):
        return math.inf

    def jump_integral(self, alpha):
        raise NotDecomposable("stable small jumps have infinite mean; truncate first")

    def compensated_integral(self, alpha):
        a = self.index
        return self.scale * special.gamma(-a) * np.power(alpha, a)

    def jump_integral_above(self, eps, alpha):
        # C [eps^-a / a - alpha^a Gamma(-a, alpha eps)] = C eps^-a [1/a - E_{1+a}(alpha eps)];
        # near z = 0 the bracket cancels, so small |z| goes to mpmath at raised precision
        a, c = self.index, self.scale
        al = np.asarray(alpha)
        z = np.atleast_1d(al * eps).astype(complex)
        small = np.abs(z) < STABLE_CF_MIN
        out = np.empty_like(z)
        out[~small] = c * eps ** (-a) * (1.0 / a - _expint_cf(1.0 + a, z[~small]))

        def one(t):
            with mpmath.workdps(40):
                return complex(c * mpmath.mpf(eps) ** (-a) * (mpmath.mpf(1) / a - mpmath.expint(1 + a, t)))

        out[small] = [one(t) for t in z[small]]
        out = out.reshape(al.shape)
        return _scalar_or_array(out if np.iscomplexobj(al) else out.real)

    def tail_inverse(self, t):
        t = np.asarray(t, dtype=float)
        return (self.scale / (self.index * t)) ** (1.0 / self.index)

    def tail_integral_inverse(self, y):
        a = self.index
        y = np.asarray(y, dtype=float)
        return (y * a * (a - 1.0) / self.scale) ** (1.0 / (1.0 - a))

    def scaled(self, gamma):
        return StableSmallJumps(self.scale * gamma, self.index)


@dataclass(frozen=True)
class TabulatedTail(JumpMeasure):
    """Tail given on a grid ``x_0 < ... < x_{n-1}`` of strictly positive, nonincreasing values.

    ``values[i]`` is the tail just left of ``x[i]``.  Below ``x[0]`` the tail
    is flat (no mass there) and at ``x[n-1]`` it drops to zero.  Between knots
    the tail is either log-log linear (``"loglinear"``) or a right-continuous
    step (``"step"``, atoms at the knots).
    """

    x: tuple[float, ...]
    values: tuple[float, ...]
    interpolation: str = "loglinear"
    family: ClassVar[str] = "tabulated_tail"
    _slopes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.shape != v.shape or x.size < 1:
            raise InvalidParameter("tabulated tail needs equal-length, nonempty x and values")
        if self.interpolation not in ("loglinear", "step"):
            raise InvalidParameter(f"interpolation must be 'loglinear' or 'step', got {self.interpolation!r}")
        if not x[0] > 0 or np.any(np.diff(x) <= 0):
            raise InvalidParameter("tabulated abscissas must be strictly increasing with x_0 > 0")
        if np.any(v <= 0) or not np.all(np.isfinite(v)):
            raise InvalidParameter("tabulated tail values must be strictly positive and finite")
        if np.any(np.diff(v) > 0):
            raise NonMonotoneTail("tabulated tail increases between knots")
        object.__setattr__(self, "x", tuple(float(t) for t in x))
        object.__setattr__(self, "values", tuple(float(t) for t in v))
        if x.size > 1:
            slopes = np.diff(np.log(v)) / np.diff(np.log(x))
        else:
            slopes = np.zeros(0)
        object.__setattr__(self, "_slopes", slopes)

    def params(self):
        return {"x": list(self.x), "tail": list(self.values), "interpolation": self.interpolation}

    @property
    def _xa(self):
        return np.asarray(self.x)

    @property
    def _va(self):
        return np.asarray(self.values)

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        xa, va = self._xa, self._va
        if self.interpolation == "step":
            ext = np.append(va, 0.0)
            return _scalar_or_array(ext[np.searchsorted(xa, x, side="right")])
        i = np.clip(np.searchsorted(xa, x, side="right") - 1, 0, max(xa.size - 2, 0))
        out = np.full_like(x, va[0])
        if xa.size > 1:
            seg = va[i] * (np.maximum(x, xa[0]) / xa[i]) ** self._slopes[i]
            out = np.where(x <= xa[0], va[0], seg)
        return _scalar_or_array(np.where(x >= xa[-1], 0.0, out))

    def _segment_integrals(self):
        """Integral of the tail over each knot interval ``[x_i, x_{i+1}]``."""
        xa, va = self._xa, self._va
        if self.interpolation == "step":
            return va[1:] * np.diff(xa)
        s1 = self._slopes + 1.0
        log_ratio = np.log(xa[1:] / xa[:-1])
        return va[:-1] * xa[:-1] * log_ratio * special.exprel(s1 * log_ratio)

    def tail_integral(self, x):
        x = np.asarray(x, dtype=float)
        xa, va = self._xa, self._va
        seg = self._segment_integrals()
        # suffix sums: total from x_i to the last knot
        suffix = np.append(np.cumsum(seg[::-1])[::-1], 0.0)
        flat = va[0] * np.maximum(xa[0] - x, 0.0) + suffix[0]
        i = np.clip(np.searchsorted(xa, x, side="right") - 1, 0, xa.size - 1)
        xi, xnext = xa[i], xa[np.minimum(i + 1, xa.size - 1)]
        if self.interpolation == "step":
            partial = va[np.minimum(i + 1, xa.size - 1)] * (xnext - x)
        else:
            s1 = np.append(self._slopes, 0.0)[i] + 1.0
            xc = np.clip(x, xi, xnext)
            log_ratio = np.log(xnext / xc)
            partial = self.tail(xc) * xc * log_ratio * special.exprel(s1 * log_ratio)
        inner = partial + suffix[np.minimum(i + 1, xa.size - 1)]
        out = np.where(x <= xa[0], flat, np.where(x >= xa[-1], 0.0, inner))
        return _scalar_or_array(out)

    def mean(self):
        from .numerics import integrate_tail

        return float(integrate_tail(self.tail, 0.0, self.x[-1], points=list(self.x)))

    def second_moment(self):
        from .numerics import integrate_tail

        return float(2.0 * integrate_tail(lambda t: t * self.tail(t), 0.0, self.x[-1], points=list(self.x)))

    def second_moment_above(self, eps):
        from .numerics import integrate_tail

        if eps >= self.x[-1]:
            return 0.0
        pts = [k for k in self.x if k > eps]
        body = integrate_tail(lambda t: t * self.tail(t), eps, self.x[-1], points=pts)
        return float(eps * eps * self.tail(eps) + 2.0 * body)

    def activity(self):
        return self.values[0]

    def _atoms(self):
        va = self._va
        return self._xa, va - np.append(va[1:], 0.0)

    def jump_integral(self, alpha):
        if self.interpolation == "step":
            xs, masses = self._atoms()
            a = np.asarray(alpha)
            return _scalar_or_array(np.sum(masses * -np.expm1(-np.multiply.outer(a, xs)), axis=-1))
        a = np.asarray(alpha)
        flat = np.atleast_1d(a).astype(complex)
        out = np.empty_like(flat)
        small = np.abs(flat) * self.x[0] < TABULATED_CF_MIN
        out[~small] = self._jump_integral_cf(flat[~small])
        out[small] = [self._jump_integral_one(t) for t in flat[small]]
        out = out.reshape(a.shape)
        return _scalar_or_array(out if np.iscomplexobj(a) else out.real)

    def _jump_integral_cf(self, alpha):
        # alpha int t^s e^{-alpha t} over [x_i, x_{i+1}] = alpha (x_i v_i E_{-s}(alpha x_i) - x_{i+1} v_{i+1} E_{-s}(alpha x_{i+1}))
        xa, va = self._xa, self._va
        total = va[0] * -np.expm1(-alpha * xa[0])
        for i, slope in enumerate(self._slopes):
            e_lo = _expint_cf(-slope, alpha * xa[i])
            e_hi = _expint_cf(-slope, alpha * xa[i + 1])
            total = total + alpha * (xa[i] * va[i] * e_lo - xa[i + 1] * va[i + 1] * e_hi)
        return total

    def _jump_integral_one(self, alpha):
        if alpha == 0:
            return 0.0
        xa = self.x
        head = self.values[0] * -np.expm1(-alpha * xa[0])
        body = 0.0
        for lo, hi in zip(xa[:-1], xa[1:]):
            body = body + _complex_quad(lambda t: np.exp(-alpha * t) * self.tail(t), lo, hi)
        return head + alpha * body

    def jump_integral_above(self, eps, alpha):
        if self.interpolation == "step":
            xs, masses = self._atoms()
            keep = xs > eps
            a = np.asarray(alpha)
            inner = np.sum(masses[keep] * -np.expm1(-np.multiply.outer(a, xs[keep])), axis=-1)
            return _scalar_or_array(self.tail(eps) * 0.0 + inner)
        return super().jump_integral_above(eps, alpha)

    def tail_inverse(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        xa, va = self._xa, self._va
        out = np.zeros_like(t)
        positive = t < va[0]
        if self.interpolation == "step":
            # smallest i with values[i+1] <= t (values[n] = 0) gives the knot x_i
            ext = np.append(va, 0.0)
            idx = np.searchsorted(-ext[1:], -t, side="left")
            out = np.where(positive, xa[np.minimum(idx, xa.size - 1)], 0.0)
            return out
        if xa.size == 1:
            return np.where(positive, xa[-1], 0.0)
        i = np.clip(np.searchsorted(-va, -t, side="left") - 1, 0, xa.size - 2)  # va[i] > t >= va[i+1]
        s = self._slopes[i]
        flat = s == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            inside = np.where(flat, xa[i + 1], xa[i] * (t / va[i]) ** (1.0 / np.where(flat, 1.0, s)))
        out = np.where(t <= va[-1], xa[-1], inside)
        return np.where(positive, out, 0.0)

    def knots(self):
        return list(self.x)

    def scaled(self, gamma):
        return TabulatedTail(self.x, tuple(gamma * v for v in self.values), self.interpolation)


@dataclass(frozen=True)
class TruncatedJumps(JumpMeasure):
    """``base`` restricted to jumps larger than ``epsilon``: a finite compound Poisson measure."""

    base: JumpMeasure
    epsilon: float
    family: ClassVar[str] = "truncated"

    def __post_init__(self):
        if not self.epsilon > 0:
            raise DomainError(f"truncation level must be > 0, got {self.epsilon}")
        if isinstance(self.base, TruncatedJumps):
            raise InvalidParameter("nested truncation is not supported")

    def params(self):
        return {"epsilon": self.epsilon, "base": {"family": self.base.family, "params": self.base.params()}}

    def tail(self, x):
        return self.base.tail(np.maximum(np.asarray(x, dtype=float), self.epsilon))

    def tail_integral(self, x):
        x = np.asarray(x, dtype=float)
        eps = self.epsilon
        return _scalar_or_array(
            self.base.tail_integral(np.maximum(x, eps)) + np.maximum(eps - x, 0.0) * self.base.tail(eps)
        )

    def second_moment(self):
        return self.base.second_moment_above(self.epsilon)

    def second_moment_above(self, eps):
        return self.base.second_moment_above(max(eps, self.epsilon))

    def activity(self):
        return float(self.base.tail(self.epsilon))

    def jump_integral(self, alpha):
        return self.base.jump_integral_above(self.epsilon, alpha)

    def tail_inverse(self, t):
        t = np.asarray(t, dtype=float)
        inner = self.base.tail_inverse(np.minimum(t, self.activity()))
        return np.where(t >= self.activity(), 0.0, np.maximum(inner, self.epsilon))

    def excess_quantile(self, u):
        u = np.asarray(u, dtype=float)
        nu_bar = self.mean()
        edge = self.epsilon * self.activity() / nu_bar
        linear = u * nu_bar / self.activity()
        if np.all(u <= edge):
            return linear
        rest = self.base.tail_integral_inverse(nu_bar * (1.0 - np.maximum(u, edge)))
        if rest is None:
            return None
        return np.where(u <= edge, linear, np.maximum(rest, self.epsilon))

    def knots(self):
        return [self.epsilon] + [k for k in self.base.knots() if k > self.epsilon]

    def scaled(self, gamma):
        return TruncatedJumps(self.base.scaled(gamma), self.epsilon)

    def truncated(self, eps):
        return TruncatedJumps(self.base, max(eps, self.epsilon))


FAMILIES = {
    cls.family: cls
    for cls in (NoJumps, CompoundPoisson, GammaSubordinator, StableSmallJumps, TabulatedTail, TruncatedJumps)
}


def jumps_from_dict(spec: dict | None) -> JumpMeasure:
    """Build a measure from ``{"family": ..., "params": {...}}`` (None means no jumps)."""
    if spec is None:
        return NoJumps()
    family = spec.get("family")
    params = spec.get("params", {}) or {}
    try:
        if family in (None, "none"):
            return NoJumps()
        if family == "compound_poisson":
            return CompoundPoisson(float(params["rate"]), jump_law_from_params(params["jump_dist"]))
        if family == "gamma_subordinator":
            return GammaSubordinator(float(params["shape"]), float(params["rate"]))
        if family == "stable_small_jumps":
            return StableSmallJumps(float(params["scale"]), float(params["index"]))
        if family == "tabulated_tail":
            return TabulatedTail(
                tuple(params["x"]), tuple(params["tail"]), params.get("interpolation", "loglinear")
            )
        if family == "truncated":
            return TruncatedJumps(jumps_from_dict(params["base"]), float(params["epsilon"]))
    except KeyError as exc:
        raise InvalidParameter(f"missing parameter {exc.args[0]!r} for jump family {family!r}") from None
    raise InvalidParameter(f"unknown jump family {family!r}; expected one of {sorted(FAMILIES)}")


def jumps_to_dict(jumps: JumpMeasure) -> dict:
    return {"family": jumps.family, "params": jumps.params()}
