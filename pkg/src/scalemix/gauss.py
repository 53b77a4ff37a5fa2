"""Nonstationary Matern covariance, factorization, simulation, and Gaussian conditioning."""

from dataclasses import dataclass

import numpy as np
from scipy import linalg, special
from scipy.spatial.distance import cdist

from .errors import FactorizationError, ParameterError

__all__ = [
    "MaternConfig",
    "CovarianceFactor",
    "matern_correlation",
    "build_covariance",
    "sample_gp",
    "conditional_gp",
]

# jitter ladder for near-duplicate stations
_JITTER_START = 1e-10
_JITTER_MAX = 1e-6


@dataclass(frozen=True)
class MaternConfig:
    """Smoothness and per-site range surface; variance surface is fixed at one."""

    nu: float = 0.5
    range_surface: np.ndarray = None

    def __post_init__(self):
        if not self.nu > 0:
            raise ParameterError("nu must be positive")
        if self.range_surface is not None:
            r = np.asarray(self.range_surface, dtype=float)
            if np.any(r <= 0):
                raise ParameterError("all ranges must be positive")
            object.__setattr__(self, "range_surface", r)


@dataclass(frozen=True)
class CovarianceFactor:
    """Covariance matrix with its lower Cholesky factor and log-determinant."""

    matrix: np.ndarray
    lower_factor: np.ndarray
    log_det: float

    @property
    def dim(self):
        return self.matrix.shape[0]


def matern_correlation(d, nu):
    """Matern correlation with range 1: 2^{1-nu}/Gamma(nu) d^nu K_nu(d).

    nu = 1/2 reduces to exp(-d); 1 at d = 0.
    """
    if not nu > 0:
        raise ParameterError("nu must be positive")
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ParameterError("distances must be nonnegative")
    if nu == 0.5:
        out = np.exp(-d)
    else:
        out = np.ones_like(d)
        pos = d > 0
        dp = d[pos]
        out[pos] = 2.0 ** (1.0 - nu) / special.gamma(nu) * dp**nu * special.kv(nu, dp)
    return out if out.ndim else float(out)


def _nonstationary_matrix(sites, rho_values, nu):
    rho = np.asarray(rho_values, dtype=float)
    if np.any(rho <= 0):
        raise ParameterError("rho_values must be positive")
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    d = cdist(sites, sites)
    mean_rho = (rho[:, None] + rho[None, :]) / 2.0
    prefac = np.sqrt(np.outer(rho, rho)) / mean_rho
    cov = prefac * matern_correlation(d / np.sqrt(mean_rho), nu)
    np.fill_diagonal(cov, 1.0)
    return cov


def _chol_with_jitter(cov):
    jitter = 0.0
    while True:
        try:
            L = linalg.cholesky(cov + jitter * np.eye(cov.shape[0]), lower=True)
            return L, jitter
        except linalg.LinAlgError:
            jitter = _JITTER_START if jitter == 0.0 else jitter * 10.0
            if jitter > _JITTER_MAX:
                raise FactorizationError(
                    f"covariance not positive definite after jitter up to {_JITTER_MAX}"
                ) from None


def build_covariance(sites, rho_values, nu=0.5):
    """Locally isotropic nonstationary Matern covariance with unit variances.

    C(s_i, s_j) = sqrt(rho_i rho_j) / ((rho_i + rho_j)/2)
                  * M_nu( ||s_i - s_j|| / sqrt((rho_i + rho_j)/2) ).

    The diagonal is exactly one.  Factorization retries with diagonal jitter
    escalating from 1e-10 by factors of 10 up to 1e-6, then raises.
    """
    cov = _nonstationary_matrix(sites, rho_values, nu)
    L, _ = _chol_with_jitter(cov)
    log_det = 2.0 * float(np.sum(np.log(np.diag(L))))
    return CovarianceFactor(matrix=cov, lower_factor=L, log_det=log_det)


def sample_gp(factor, n_replicates, rng):
    """Draw a D x n matrix whose columns are i.i.d. N(0, Sigma)."""
    if n_replicates < 1:
        raise ParameterError("n_replicates must be >= 1")
    eps = rng.standard_normal((factor.dim, n_replicates))
    return factor.lower_factor @ eps


def conditional_gp(factor, observed_values, obs_idx=None, new_idx=None):
    """Conditional mean and covariance of the Gaussian vector at new sites.

    The factor (or plain covariance matrix) covers observed + new sites jointly.
    By default the first len(observed_values) indices are observed and the rest
    are new; pass explicit index arrays to override.
    """
    cov = factor.matrix if isinstance(factor, CovarianceFactor) else np.asarray(factor, dtype=float)
    obs = np.asarray(observed_values, dtype=float)
    n = cov.shape[0]
    if obs_idx is None:
        obs_idx = np.arange(obs.size)
    obs_idx = np.asarray(obs_idx, dtype=int)
    if new_idx is None:
        new_idx = np.setdiff1d(np.arange(n), obs_idx)
    new_idx = np.asarray(new_idx, dtype=int)
    if obs.size != obs_idx.size:
        raise ParameterError("observed_values length must match obs_idx")

    k_oo = cov[np.ix_(obs_idx, obs_idx)]
    k_no = cov[np.ix_(new_idx, obs_idx)]
    k_nn = cov[np.ix_(new_idx, new_idx)]
    try:
        c = linalg.cho_factor(k_oo, lower=True)
    except linalg.LinAlgError:
        raise FactorizationError("observed covariance block is singular") from None
    mean = k_no @ linalg.cho_solve(c, obs)
    cond_cov = k_nn - k_no @ linalg.cho_solve(c, k_no.T)
    return mean, cond_cov
