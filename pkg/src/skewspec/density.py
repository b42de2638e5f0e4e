"""Skew-spectrum density, its negative log, and reference densities.

The unnormalized density of the skew spectrum {(x_k, y_k)} under a radial
Gaussian weight is

    w(||Z||_F) * prod_k x_k y_k sqrt(x_k^2 + y_k^2) * prod_{i<j} f(z_i, z_j)

with ||Z||_F^2 = 2 sum_k (x_k^2 + y_k^2) and f the four-factor repulsion
product between two points. Everything is evaluated in log space; the
normalization constant is never computed here.

``tau`` is the negative log density in the form the Fekete machinery is
calibrated to: its quadratic term is (1/2) sum |z_k|^2, which corresponds
to the Gaussian weight exp(-||Z||_F^2 / 4). With the WeightSpec convention
w(t) = exp(-gamma t^2 / 2), ``-log_rho`` at gamma has quadratic term
gamma * sum |z_k|^2, so tau coincides with -log_rho at gamma = 1/2 up to
the dropped constant. Both parametrizations are kept verbatim; neither is
"corrected" toward the other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import SkewSpectrum


@dataclass(frozen=True)
class WeightSpec:
    """Radial weight w(t) = exp(-gamma t^2 / 2), applied to t = ||Z||_F."""

    gamma: float
    kind: str = "gaussian"

    def __post_init__(self):
        if self.kind != "gaussian":
            raise ValueError(f"unsupported weight kind: {self.kind!r}")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")

    def log_weight(self, t: float) -> float:
        return -0.5 * self.gamma * t * t


@dataclass(frozen=True)
class LogDensityValue:
    """Natural log of an unnormalized density; finite=False encodes a zero."""

    log_unnormalized: float
    finite: bool


def _points(s) -> np.ndarray:
    """Coerce a SkewSpectrum, an (p, 2) array, or a flat (x1, y1, ...) row."""
    if isinstance(s, SkewSpectrum):
        return s.points
    pts = np.asarray(s, dtype=float)
    if pts.ndim == 1:
        if pts.size % 2 != 0 or pts.size == 0:
            raise ValueError(f"flat configuration must have even positive length, got {pts.size}")
        pts = pts.reshape(-1, 2)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"expected (p, 2) points, got shape {pts.shape}")
    return pts


def pair_factor_f(z_i, z_j) -> float:
    """Four-factor repulsion product between two skew-spectrum points.

    [(xi-xj)^2+(yi-yj)^2][(xi+xj)^2+(yi-yj)^2][(xi-xj)^2+(yi+yj)^2][(xi+xj)^2+(yi+yj)^2]
    """
    xi, yi = float(z_i[0]), float(z_i[1])
    xj, yj = float(z_j[0]), float(z_j[1])
    dx, sx = xi - xj, xi + xj
    dy, sy = yi - yj, yi + yj
    return (dx * dx + dy * dy) * (sx * sx + dy * dy) * (dx * dx + sy * sy) * (sx * sx + sy * sy)


def lemma_d1_bounds(z_i, z_j, eps: float, m: float):
    """Two-sided bound (128 eps^6 d^2, 200 M^6 d^2) for the pair factor.

    Valid when all four coordinates lie in [eps, M]; d^2 is the squared
    Euclidean distance between the points.
    """
    if not (0 < eps <= m):
        raise ValueError("need 0 < eps <= M")
    coords = np.array([z_i[0], z_i[1], z_j[0], z_j[1]], dtype=float)
    if np.any(coords < eps) or np.any(coords > m):
        raise ValueError(f"coordinates {coords} outside [{eps}, {m}]")
    d2 = (coords[0] - coords[2]) ** 2 + (coords[1] - coords[3]) ** 2
    return 128.0 * eps**6 * d2, 200.0 * m**6 * d2


def _pairwise_factors(pts: np.ndarray):
    """The four (p, p) factor arrays f1..f4 of the pair product."""
    x, y = pts[:, 0], pts[:, 1]
    dx = x[:, None] - x[None, :]
    sx = x[:, None] + x[None, :]
    dy = y[:, None] - y[None, :]
    sy = y[:, None] + y[None, :]
    return dx * dx + dy * dy, sx * sx + dy * dy, dx * dx + sy * sy, sx * sx + sy * sy


def _log_pair_sum(pts: np.ndarray):
    """(sum_{i<j} log f(z_i, z_j), all factors positive?)."""
    p = pts.shape[0]
    if p < 2:
        return 0.0, True
    f1, f2, f3, f4 = _pairwise_factors(pts)
    iu = np.triu_indices(p, 1)
    prod_parts = np.stack([f1[iu], f2[iu], f3[iu], f4[iu]])
    if np.any(prod_parts <= 0.0):
        return -np.inf, False
    return float(np.sum(np.log(prod_parts))), True


def log_rho(s, w: WeightSpec) -> LogDensityValue:
    """Log of the unnormalized skew-spectrum density under weight w.

    Accepts a SkewSpectrum or a raw configuration array; configurations
    with a vanishing factor (nonpositive coordinate, coincident points)
    give ``finite=False``.
    """
    pts = _points(s)
    if np.any(pts <= 0.0):
        return LogDensityValue(-np.inf, False)
    x, y = pts[:, 0], pts[:, 1]
    r2 = x * x + y * y
    z_norm_sq = 2.0 * float(np.sum(r2))
    log_point = float(np.sum(np.log(x) + np.log(y) + 0.5 * np.log(r2)))
    log_pairs, ok = _log_pair_sum(pts)
    if not ok:
        return LogDensityValue(-np.inf, False)
    total = w.log_weight(np.sqrt(z_norm_sq)) + log_point + log_pairs
    return LogDensityValue(float(total), True)


def tau(s, gamma: float = 1.0) -> float:
    """Negative log density in the Fekete normalization.

    tau = gamma/2 sum_k |z_k|^2 - sum_k log(x_k y_k |z_k|)
          - 1/2 sum_{k != l} log f(z_k, z_l)

    with |z_k| = sqrt(x_k^2 + y_k^2). gamma = 1 is the formula the grid
    and length bounds of the Fekete module are calibrated to. Returns
    +inf when any log argument vanishes.
    """
    pts = _points(s)
    if np.any(pts <= 0.0):
        return np.inf
    x, y = pts[:, 0], pts[:, 1]
    r2 = x * x + y * y
    quad = 0.5 * gamma * float(np.sum(r2))
    log_point = float(np.sum(np.log(x) + np.log(y) + 0.5 * np.log(r2)))
    log_pairs, ok = _log_pair_sum(pts)
    if not ok:
        return np.inf
    return quad - log_point - log_pairs


def grad_tau(s, gamma: float = 1.0) -> np.ndarray:
    """Analytic gradient of :func:`tau`, shape (p, 2).

    d tau / d x_k = gamma x_k - 1/x_k - x_k/(x_k^2+y_k^2)
                    - sum_{l != k} d/dx_k log f(z_k, z_l),
    and symmetrically in y. Raises ValueError where tau is infinite.
    """
    pts = _points(s)
    if np.any(pts <= 0.0):
        raise ValueError("tau is infinite at this configuration; gradient undefined")
    x, y = pts[:, 0], pts[:, 1]
    r2 = x * x + y * y
    gx = gamma * x - 1.0 / x - x / r2
    gy = gamma * y - 1.0 / y - y / r2
    p = pts.shape[0]
    if p > 1:
        f1, f2, f3, f4 = _pairwise_factors(pts)
        np.fill_diagonal(f1, 1.0)  # diagonal excluded from the pair sums
        if np.any(f1 <= 0.0):
            raise ValueError("tau is infinite at this configuration; gradient undefined")
        dx = x[:, None] - x[None, :]
        sx = x[:, None] + x[None, :]
        dy = y[:, None] - y[None, :]
        sy = y[:, None] + y[None, :]
        inv1, inv2, inv3, inv4 = 1.0 / f1, 1.0 / f2, 1.0 / f3, 1.0 / f4
        np.fill_diagonal(inv1, 0.0)
        np.fill_diagonal(inv2, 0.0)
        np.fill_diagonal(inv3, 0.0)
        np.fill_diagonal(inv4, 0.0)
        gx -= np.sum(2.0 * dx * (inv1 + inv3) + 2.0 * sx * (inv2 + inv4), axis=1)
        gy -= np.sum(2.0 * dy * (inv1 + inv2) + 2.0 * sy * (inv3 + inv4), axis=1)
    return np.column_stack([gx, gy])


def log_kappa_commuting(lambdas, gamma: float) -> LogDensityValue:
    """Log of the commuting-pair joint eigenvalue density.

    exp(-gamma sum |lambda_j|^2) * prod_{i<j} |lambda_i - lambda_j|^2 with
    Euclidean norms in R^d; the constant is omitted.
    """
    pts = np.asarray(lambdas, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    n = pts.shape[0]
    quad = -gamma * float(np.sum(pts * pts))
    if n < 2:
        return LogDensityValue(quad, True)
    diff = pts[:, None, :] - pts[None, :, :]
    dist_sq = np.sum(diff * diff, axis=2)
    iu = np.triu_indices(n, 1)
    gaps = dist_sq[iu]
    if np.any(gaps <= 0.0):
        return LogDensityValue(-np.inf, False)
    return LogDensityValue(quad + float(np.sum(np.log(gaps))), True)


def equilibrium_radius(d: int, gamma: float) -> float:
    """Support radius of the equilibrium measure for confinement gamma |x|^2."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if d == 1:
        return float(np.sqrt(2.0 / gamma))
    if d == 2:
        return float(1.0 / np.sqrt(gamma))
    if d == 3:
        return float(np.sqrt(2.0 / (3.0 * gamma)))
    return float(1.0 / np.sqrt(2.0 * gamma))


def equilibrium_density(d: int, gamma: float, x) -> float:
    """Closed-form equilibrium density at a point x in R^d.

    d=1: semicircle-type (2/(pi R^2)) sqrt((R^2 - x^2)_+);
    d=2: uniform 1/(pi R^2) on the disk;
    d=3: 1/(pi^2 R^2) / sqrt(R^2 - |x|^2) on the ball;
    d>=4: uniform surface measure on the sphere of radius R, reported as a
    surface density (1 over the sphere area); points off the sphere give 0.
    """
    r_d = equilibrium_radius(d, gamma)
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    if xv.size != d:
        raise ValueError(f"point has {xv.size} coordinates, expected d = {d}")
    r = float(np.linalg.norm(xv))
    if d == 1:
        if r >= r_d:
            return 0.0
        return 2.0 / (np.pi * r_d**2) * np.sqrt(r_d**2 - r**2)
    if d == 2:
        return 1.0 / (np.pi * r_d**2) if r < r_d else 0.0
    if d == 3:
        if r >= r_d:
            return 0.0
        return 1.0 / (np.pi**2 * r_d**2) / np.sqrt(r_d**2 - r**2)
    if abs(r - r_d) > 1e-12 * r_d:
        return 0.0
    # normalized surface measure: 1 / (area of the (d-1)-sphere of radius R)
    from math import gamma as gamma_fn

    area = 2.0 * np.pi ** (d / 2.0) / gamma_fn(d / 2.0) * r_d ** (d - 1)
    return 1.0 / area
