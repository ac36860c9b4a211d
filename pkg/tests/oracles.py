"""Reference values computed independently of the package's code paths.

Everything here works from the Lévy density or tail by brute-force mpmath
quadrature, plain bisection or textbook closed forms.
"""
import math

import mpmath
import numpy as np

mpmath.mp.dps = 40


def jump_integral_from_density(density, alpha, lo=0, hi=mpmath.inf):
    """int (1 - e^{-alpha x}) density(x) dx."""
    return float(mpmath.quad(lambda x: -mpmath.expm1(-alpha * x) * density(x), [lo, 1, hi]))


def compensated_integral_from_density(density, alpha, lo=0, hi=mpmath.inf):
    """int (e^{-alpha x} - 1 + alpha x) density(x) dx."""
    return float(mpmath.quad(lambda x: (mpmath.expm1(-alpha * x) + alpha * x) * density(x), [lo, 1, hi]))


def stable_phi(mu, scale, index, alpha):
    dens = lambda x: scale * x ** (-1 - index)
    return mu * alpha + compensated_integral_from_density(dens, alpha)


def truncated_stable_phi(mu, scale, index, eps, alpha):
    dens = lambda x: scale * x ** (-1 - index)
    return mu * alpha + compensated_integral_from_density(dens, alpha, lo=eps)


def bisect(f, lo, hi, iters=200):
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def gamma_excess_quantile(shape, rate, u):
    """Quantile of the excess law with tail shape*E1(rate x), by quadrature of the tail and bisection."""
    tail = lambda y: shape * mpmath.e1(rate * y)
    nu_bar = mpmath.quad(tail, [0, 1, mpmath.inf])
    cdf = lambda x: mpmath.quad(tail, [0, x]) / nu_bar
    return float(bisect(lambda x: cdf(x) - u, mpmath.mpf(0), mpmath.mpf(50), iters=120))


def mm1_lst(rho, theta, alpha):
    """Classical M/M/1 workload transform."""
    return (1 - rho) * (theta + alpha) / (theta + alpha - rho * theta)


def mm1_cdf(rho, theta, x):
    return 1 - rho * np.exp(-theta * (1 - rho) * np.asarray(x, dtype=float))


def mean_workload(sigma2, second_jump_moment, mu):
    return (sigma2 + second_jump_moment) / (2 * mu)
