"""Totally-skewed Stable variables, specialized closed forms for the Levy case alpha = 1/2.

Parameterization follows the 1-parameterization: S ~ Stable(alpha, beta, gamma, delta)
has characteristic function

    E exp(iuS) = exp[-gamma^alpha |u|^alpha {1 - i beta tan(pi alpha/2) sign(u)} + i delta u]

for alpha != 1.  With alpha = 1/2 and beta = 1 this is the Levy distribution, whose
distribution function has the closed form erfc(sqrt(gamma / (2(x - delta)))).
"""

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DegeneracyError, ParameterError

__all__ = [
    "StableParams",
    "sample_stable",
    "levy_density",
    "levy_cdf",
    "levy_quantile",
    "stable_tail_asymptote",
    "tail_constant",
    "mixture_scale",
]


@dataclass(frozen=True)
class StableParams:
    """Parameters of a Stable law: concentration, skewness, scale, location."""

    alpha: float = 0.5
    beta: float = 1.0
    gamma: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise ParameterError(f"alpha must be in (0, 2], got {self.alpha}")
        if not -1.0 <= self.beta <= 1.0:
            raise ParameterError(f"beta must be in [-1, 1], got {self.beta}")
        if not self.gamma > 0.0:
            raise ParameterError(f"gamma must be positive, got {self.gamma}")
        if not np.isfinite(self.delta):
            raise ParameterError(f"delta must be finite, got {self.delta}")


def sample_stable(params, n, rng):
    """Draw n i.i.d. Stable variates by the uniform-angle/exponential transformation.

    Exact and rejection-free for alpha != 1 (the alpha = 1 branch is not needed by
    the model and is not implemented).  For beta = 1, alpha < 1 the support is
    [delta, inf).
    """
    if not isinstance(params, StableParams):
        params = StableParams(*params)
    if params.alpha == 1.0:
        raise ParameterError("alpha = 1 branch not implemented (model never uses it)")
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    a, b = params.alpha, params.beta
    u = rng.uniform(-np.pi / 2, np.pi / 2, size=n)
    e = rng.exponential(1.0, size=n)
    theta0 = np.arctan(b * np.tan(np.pi * a / 2)) / a
    z = (
        np.sin(a * (theta0 + u))
        / (np.cos(a * theta0) * np.cos(u)) ** (1.0 / a)
        * (np.cos(a * theta0 + (a - 1.0) * u) / e) ** ((1.0 - a) / a)
    )
    return params.gamma * z + params.delta


def levy_density(x, gamma, delta=0.0):
    """Levy density sqrt(gamma/2pi) (x-delta)^{-3/2} exp(-gamma/(2(x-delta))); 0 at x <= delta."""
    if not gamma > 0:
        raise ParameterError(f"gamma must be positive, got {gamma}")
    x = np.asarray(x, dtype=float)
    t = x - delta
    out = np.zeros_like(t)
    pos = t > 0
    tp = t[pos]
    out[pos] = np.sqrt(gamma / (2 * np.pi)) * tp ** -1.5 * np.exp(-gamma / (2 * tp))
    return out if out.ndim else float(out)


def levy_cdf(x, gamma, delta=0.0):
    """Levy distribution function erfc(sqrt(gamma/(2(x-delta)))); 0 at x <= delta."""
    if not gamma > 0:
        raise ParameterError(f"gamma must be positive, got {gamma}")
    x = np.asarray(x, dtype=float)
    t = x - delta
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = special.erfc(np.sqrt(gamma / (2 * t[pos])))
    return out if out.ndim else float(out)


def levy_quantile(p, gamma, delta=0.0):
    """Inverse of levy_cdf: delta + gamma / (2 erfcinv(p)^2)."""
    if not gamma > 0:
        raise ParameterError(f"gamma must be positive, got {gamma}")
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise ParameterError("p must lie in (0, 1)")
    out = delta + gamma / (2.0 * special.erfcinv(p) ** 2)
    return out if out.ndim else float(out)


def tail_constant(alpha):
    """C_alpha = Gamma(alpha) sin(alpha pi / 2) / pi."""
    return special.gamma(alpha) * np.sin(alpha * np.pi / 2) / np.pi


def stable_tail_asymptote(x, params):
    """Pareto-like upper-tail approximation gamma^alpha (1+beta) C_alpha x^{-alpha}.

    Valid for 0 < alpha < 2, 0 < beta <= 1; the ratio to the exact survival tends
    to 1 as x -> inf.
    """
    if not isinstance(params, StableParams):
        params = StableParams(*params)
    if not 0 < params.alpha < 2:
        raise ParameterError("tail asymptote requires 0 < alpha < 2")
    if not 0 < params.beta <= 1:
        raise ParameterError("tail asymptote requires 0 < beta <= 1")
    x = np.asarray(x, dtype=float)
    out = params.gamma ** params.alpha * (1 + params.beta) * tail_constant(params.alpha) * x ** -params.alpha
    return out if out.ndim else float(out)


def mixture_scale(weights, gammas, alpha):
    """Aggregated scale of a weighted sum of co-skewed Stable variables.

    For S_k ~ Stable(alpha, 1, gamma_k, delta) independent and w_k >= 0, the sum
    sum_k w_k S_k is Stable(alpha, 1, gbar, sum_k w_k delta) with

        gbar = { sum_k (w_k gamma_k)^alpha }^{1/alpha}.
    """
    w = np.asarray(weights, dtype=float)
    g = np.asarray(gammas, dtype=float)
    if np.any(w < 0):
        raise ParameterError("weights must be nonnegative")
    if np.any(g <= 0):
        raise ParameterError("gammas must be positive")
    if not np.any(w > 0):
        raise DegeneracyError("all mixture weights are zero")
    return float(np.sum((w * g) ** alpha) ** (1.0 / alpha))
