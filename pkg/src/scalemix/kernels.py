"""Knot grids, compact Wendland weights, and Gaussian-kernel smoothing of knot values."""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .errors import CoverageError, ParameterError

__all__ = [
    "KnotGrid",
    "KernelConfig",
    "WeightMatrix",
    "uniform_grid",
    "isometric_grid",
    "wendland_weights",
    "gaussian_smooth",
    "active_set",
    "gaussian_effective_range",
]


@dataclass(frozen=True)
class KnotGrid:
    """K spatial anchor points, pairwise distinct."""

    knots: np.ndarray

    def __post_init__(self):
        k = np.atleast_2d(np.asarray(self.knots, dtype=float))
        if k.ndim != 2 or k.shape[1] != 2 or k.shape[0] < 1:
            raise ParameterError("knots must be a K x 2 array with K >= 1")
        d = cdist(k, k)
        np.fill_diagonal(d, np.inf)
        if np.any(d < 1e-12):
            raise ParameterError("knots must be pairwise distinct")
        object.__setattr__(self, "knots", k)

    @property
    def K(self):
        return self.knots.shape[0]


@dataclass(frozen=True)
class KernelConfig:
    """Radii and bandwidths of the kernels tied to a knot grid.

    wendland_radius is the exact support radius of the compact kernel.  The
    smoothing bandwidths are length scales of the Gaussian kernel
    exp(-d^2 / (2 h^2)).
    """

    wendland_radius: float = 4.0
    wendland_exponent: int = 2
    bandwidth_phi: float = 4.0
    bandwidth_rho: float = 4.0

    def __post_init__(self):
        if not self.wendland_radius > 0:
            raise ParameterError("wendland_radius must be positive")
        if self.wendland_exponent < 2:
            raise ParameterError("wendland_exponent must be >= 2")
        if not (self.bandwidth_phi > 0 and self.bandwidth_rho > 0):
            raise ParameterError("bandwidths must be positive")


@dataclass
class WeightMatrix:
    """D x K simplex-normalized kernel weights and the per-site active index sets."""

    entries: np.ndarray
    row_active_sets: list = field(default_factory=list)

    def __post_init__(self):
        if not self.row_active_sets:
            self.row_active_sets = [active_set(row) for row in self.entries]


def uniform_grid(n_side, bounds=((0.0, 10.0), (0.0, 10.0))):
    """n_side x n_side knots, evenly spaced strictly inside the bounding box.

    Spacing matches the equal-margin convention: for n_side = 3 on [0, 10]^2 the
    knots sit at {10/6, 5, 50/6}^2.
    """
    (x0, x1), (y0, y1) = bounds
    xs = x0 + (x1 - x0) * (2 * np.arange(n_side) + 1) / (2 * n_side)
    ys = y0 + (y1 - y0) * (2 * np.arange(n_side) + 1) / (2 * n_side)
    pts = np.array([(x, y) for y in ys for x in xs])
    return KnotGrid(pts)


def isometric_grid(n_outer_side, bounds=((0.0, 10.0), (0.0, 10.0))):
    """Two interleaved regular grids: n^2 outer knots plus (n-1)^2 cell-center knots.

    n = 3, 4, 5 gives the 13-, 25- and 41-knot layouts.
    """
    if n_outer_side < 2:
        raise ParameterError("isometric grid needs n_outer_side >= 2")
    (x0, x1), (y0, y1) = bounds
    xo = np.linspace(x0, x1, n_outer_side)
    yo = np.linspace(y0, y1, n_outer_side)
    outer = np.array([(x, y) for y in yo for x in xo])
    xi = (xo[:-1] + xo[1:]) / 2
    yi = (yo[:-1] + yo[1:]) / 2
    inner = np.array([(x, y) for y in yi for x in xi])
    return KnotGrid(np.vstack([outer, inner]))


def _wendland_raw(d, radius, exponent):
    # support radius exactly `radius`: weight > 0 iff d < radius
    u = d / radius
    return np.where(u < 1.0, (1.0 - u**2) ** exponent, 0.0)


def wendland_weights(sites, knots, config):
    """Compact Wendland weights (1 - (d/r)^2)_+^l, simplex-normalized per site.

    Every site must lie strictly within distance r of at least one knot;
    otherwise a CoverageError names the first offending site.
    """
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    d = cdist(sites, knots.knots)
    raw = _wendland_raw(d, config.wendland_radius, config.wendland_exponent)
    row_sums = raw.sum(axis=1)
    bad = np.where(row_sums <= 0)[0]
    if bad.size:
        j = int(bad[0])
        raise CoverageError(
            f"site {j} at {tuple(sites[j])} is outside every Wendland kernel "
            f"(radius {config.wendland_radius}); {bad.size} site(s) uncovered"
        )
    return WeightMatrix(raw / row_sums[:, None])


def gaussian_smooth(knot_values, sites, knots, bandwidth):
    """Interpolate knot values to sites with normalized Gaussian kernel weights.

    Weights exp(-d^2/(2 h^2)) are renormalized to sum to one per site, so the
    output is a convex combination of the knot values (global support, no cutoff).
    """
    if not bandwidth > 0:
        raise ParameterError("bandwidth must be positive")
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    vals = np.asarray(knot_values, dtype=float)
    d2 = cdist(sites, knots.knots, "sqeuclidean")
    # subtract the row minimum before exponentiating so tiny bandwidths stay finite
    expo = -d2 / (2.0 * bandwidth**2)
    expo -= expo.max(axis=1, keepdims=True)
    w = np.exp(expo)
    return (w @ vals) / w.sum(axis=1)


def active_set(weight_row):
    """Indices of strictly positive weights; empty rows are a coverage violation."""
    idx = np.flatnonzero(np.asarray(weight_row) > 0)
    if idx.size == 0:
        raise CoverageError("weight row has no active kernel")
    return frozenset(int(i) for i in idx)


def gaussian_effective_range(bandwidth_b):
    """Distance at which exp(-d^2/(2b)) drops below 0.05, for a Table-style bandwidth b.

    Model names quote the Gaussian bandwidth b in squared-length units
    (kernel exp(-d^2/(2b)), length scale h = sqrt(b)); the 0.05 crossing is at
    sqrt(2 b log 20).
    """
    if not bandwidth_b > 0:
        raise ParameterError("bandwidth must be positive")
    return float(np.sqrt(2.0 * bandwidth_b * np.log(20.0)))
