"""Maximal-likelihood (Fekete) point configurations.

Minimizes the negative log density ``tau`` over the open quadrant by
projected gradient descent with Armijo backtracking, starting from an
integer grid whose tau value is provably at most n^2. An a-priori length
bound K (any configuration with tau <= 4p^2 stays inside radius K) keeps
the iterates in a compact box. The same optimizer drives the commuting
reference case used for the figure comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .density import grad_tau, log_kappa_commuting, tau
from .ensemble import SkewSpectrum


@dataclass(frozen=True)
class OptimizerConfig:
    """Projected-gradient settings; defaults suit log-barrier landscapes."""

    max_iters: int = 50_000
    step_init: float = 0.1
    armijo_c: float = 1e-4
    shrink: float = 0.5
    grad_tol: float | None = None  # None: 1e-6 * p at solve time
    boundary_floor: float = 1e-8
    restarts: int = 8
    seed: int = 0

    def __post_init__(self):
        if not (0 < self.armijo_c < 1 and 0 < self.shrink < 1):
            raise ValueError("armijo_c and shrink must lie in (0, 1)")
        if self.grad_tol is not None and self.grad_tol < 0:
            raise ValueError("grad_tol must be nonnegative")
        if self.boundary_floor <= 0 or self.step_init <= 0:
            raise ValueError("boundary_floor and step_init must be positive")
        if self.max_iters < 1 or self.restarts < 1:
            raise ValueError("max_iters and restarts must be >= 1")


@dataclass(frozen=True)
class FeketeResult:
    """Optimized configuration with convergence bookkeeping.

    ``trace`` has one row per accepted iterate of the best restart:
    (iteration, tau, max point norm).
    """

    points: SkewSpectrum
    tau_final: float
    grad_norm_final: float
    iterations: int
    K_bound: float
    converged: bool
    trace: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class CommutingResult:
    """Optimizer output for the commuting reference density."""

    points: np.ndarray
    value_final: float
    grad_norm_final: float
    iterations: int
    converged: bool
    trace: np.ndarray = field(repr=False)


class SpacingStats(NamedTuple):
    nn_mean: float
    nn_cv: float
    max_norm: float


def grid_initialization(p: int) -> SkewSpectrum:
    """First p points (row-major) of the integer grid {1..q}^2, q minimal with q^2 >= p.

    By the two-sided pair-factor bound, tau of this set is at most n^2 = 4p^2.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    q = math.isqrt(p - 1) + 1
    pts = [(i, j) for i in range(1, q + 1) for j in range(1, q + 1)][:p]
    return SkewSpectrum(np.array(pts, dtype=float))


def _k_constraint_lhs(k: float, p: int) -> float:
    return 0.5 * k * k - (3 * p + 4 * p * p) * math.log(k) - 0.5 * p * p * math.log(400.0) - 4 * p * p


def solve_K_bound(p: int, tol: float = 1e-6) -> float:
    """Smallest K >= 3p with (1/2)K^2 - (3p + 4p^2) log K - (p^2/2) log 400 - 4p^2 > 0.

    The left side is increasing in K on [3p, infinity), so bisection after
    doubling out a bracket finds the root; any configuration with
    tau <= 4p^2 then has all points of length at most K.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    lo = 3.0 * p
    if _k_constraint_lhs(lo, p) > 0:
        return lo
    hi = 2.0 * lo
    while _k_constraint_lhs(hi, p) <= 0:
        hi *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _k_constraint_lhs(mid, p) > 0:
            hi = mid
        else:
            lo = mid
    return hi


def _max_norm(pts: np.ndarray) -> float:
    return float(np.max(np.linalg.norm(pts, axis=1)))


def _tie_tol(value: float) -> float:
    # restart values within roundoff of each other count as ties, which the
    # earliest restart wins (deterministic merging)
    return 1e-12 * max(1.0, abs(value))


def _descend(z0, value_fn, grad_fn, lower, upper, config, grad_tol):
    """Projected gradient descent with Armijo backtracking on one start.

    Returns (points, value, grad_inf_norm, iterations, trace, converged);
    value is +inf when the start itself is infeasible.
    """
    z = np.clip(z0, lower, upper)
    f = value_fn(z)
    if not np.isfinite(f):
        return z, np.inf, np.inf, 0, np.zeros((0, 3)), False
    trace = [(0, f, _max_norm(z))]
    eta = config.step_init
    converged = False
    iteration = 0
    stalled = 0
    g = grad_fn(z)
    for iteration in range(1, config.max_iters + 1):
        gnorm = float(np.max(np.abs(g)))
        if gnorm <= grad_tol:
            converged = True
            iteration -= 1
            break
        # warm-started step: retry one notch above the last accepted step
        eta = min(config.step_init, eta / config.shrink)
        gsq = float(np.sum(g * g))
        accepted = False
        while eta > 1e-18:
            z_new = np.clip(z - eta * g, lower, upper)
            f_new = value_fn(z_new)
            if np.isfinite(f_new) and f_new <= f - config.armijo_c * eta * gsq:
                accepted = True
                break
            eta *= config.shrink
        if not accepted:
            break
        # the required decrease can round to zero near the optimum; stop once
        # iterates cease to make numerical progress
        if np.array_equal(z_new, z):
            break
        stalled = stalled + 1 if f_new >= f else 0
        z, f = z_new, f_new
        if stalled >= 10:
            break
        g = grad_fn(z)
        trace.append((iteration, f, _max_norm(z)))
    gnorm = float(np.max(np.abs(grad_fn(z))))
    converged = converged or gnorm <= grad_tol
    return z, f, gnorm, iteration, np.array(trace), converged


def minimize_tau(p: int, config: OptimizerConfig | None = None, gamma: float = 1.0) -> FeketeResult:
    """Best local minimizer of tau over `restarts` perturbed grid starts.

    Restart 0 descends from the exact grid initialization; later restarts
    multiply it by log-normal noise (sigma = 0.1). The lowest tau wins,
    ties resolved by restart index, so a fixed seed gives bit-identical
    output. Points are returned sorted ascending in x.
    """
    cfg = config or OptimizerConfig()
    grad_tol = cfg.grad_tol if cfg.grad_tol is not None else 1e-6 * p
    k_bound = solve_K_bound(p)
    start = grid_initialization(p).points
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)

    best = None
    for r in range(cfg.restarts):
        if r == 0:
            z0 = start.copy()
        else:
            rng = np.random.default_rng(streams[r])
            z0 = start * np.exp(0.1 * rng.standard_normal(start.shape))
        z, f, gnorm, iters, trace, conv = _descend(
            z0,
            lambda z: tau(z, gamma),
            lambda z: grad_tau(z, gamma),
            cfg.boundary_floor,
            k_bound,
            cfg,
            grad_tol,
        )
        if np.isfinite(f) and (best is None or f < best[1] - _tie_tol(best[1])):
            best = (z, f, gnorm, iters, trace, conv)
    if best is None:
        raise RuntimeError("no restart reached a finite tau value")

    z, f, gnorm, iters, trace, conv = best
    order = np.argsort(z[:, 0], kind="stable")
    return FeketeResult(
        points=SkewSpectrum(z[order]),
        tau_final=float(f),
        grad_norm_final=gnorm,
        iterations=iters,
        K_bound=k_bound,
        converged=conv,
        trace=trace,
    )


def fekete_set(p: int, config: OptimizerConfig | None = None, gamma: float = 1.0) -> SkewSpectrum:
    """Maximal-likelihood configuration rescaled by 1/sqrt(p)."""
    result = minimize_tau(p, config=config, gamma=gamma)
    return SkewSpectrum(result.points.points / np.sqrt(p))


def _commuting_value_grad(pts: np.ndarray, gamma: float):
    n = pts.shape[0]
    quad = gamma * float(np.sum(pts * pts))
    grad = 2.0 * gamma * pts
    if n > 1:
        diff = pts[:, None, :] - pts[None, :, :]
        dist2 = np.sum(diff * diff, axis=2)
        gaps = dist2[np.triu_indices(n, 1)]
        if np.any(gaps <= 0.0):
            return np.inf, None
        quad -= float(np.sum(np.log(gaps)))
        np.fill_diagonal(dist2, 1.0)
        inv = 1.0 / dist2
        np.fill_diagonal(inv, 0.0)
        grad -= 2.0 * np.einsum("klj,kl->kj", diff, inv)
    return quad, grad


def _commuting_grid(n: int, d: int) -> np.ndarray:
    q = math.isqrt(n - 1) + 1
    if d == 2:
        pts = np.array([(i, j) for i in range(1, q + 1) for j in range(1, q + 1)][:n], dtype=float)
    else:
        # centered 1-d ladder replicated in extra dimensions with tiny tilts
        pts = np.zeros((n, d))
        pts[:, 0] = np.arange(1, n + 1, dtype=float)
        for j in range(1, d):
            pts[:, j] = 0.01 * np.arange(n) * (j + 1)
    return pts - np.mean(pts, axis=0)


def minimize_commuting(
    n: int, d: int = 2, gamma: float = 0.5, config: OptimizerConfig | None = None
) -> CommutingResult:
    """Minimize the negative log of the commuting joint-eigenvalue density.

    No positivity constraint; iterates are clamped to the box of
    half-width 4 sqrt(n). gamma = 1/2 reproduces the reference circle of
    radius sqrt(2n) in the figure comparison.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    cfg = config or OptimizerConfig()
    grad_tol = cfg.grad_tol if cfg.grad_tol is not None else 1e-6 * n
    half_width = 4.0 * np.sqrt(n)
    start = _commuting_grid(n, d)
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)

    def value_fn(z):
        v, _ = _commuting_value_grad(z, gamma)
        return v

    def grad_fn(z):
        _, g = _commuting_value_grad(z, gamma)
        if g is None:
            raise ValueError("objective is infinite; gradient undefined")
        return g

    best = None
    for r in range(cfg.restarts):
        if r == 0:
            z0 = start.copy()
        else:
            rng = np.random.default_rng(streams[r])
            z0 = start + 0.1 * rng.standard_normal(start.shape)
        z, f, gnorm, iters, trace, conv = _descend(
            z0, value_fn, grad_fn, -half_width, half_width, cfg, grad_tol
        )
        if np.isfinite(f) and (best is None or f < best[1] - _tie_tol(best[1])):
            best = (z, f, gnorm, iters, trace, conv)
    if best is None:
        raise RuntimeError("no restart reached a finite objective value")

    z, f, gnorm, iters, trace, conv = best
    order = np.lexsort(z.T[::-1])
    check = log_kappa_commuting(z, gamma)
    assert check.finite, "optimizer returned a coincident configuration"
    return CommutingResult(
        points=z[order],
        value_final=float(f),
        grad_norm_final=gnorm,
        iterations=iters,
        converged=conv,
        trace=trace,
    )


def spacing_stats(points) -> SpacingStats:
    """Nearest-neighbor mean and coefficient of variation, plus the max norm."""
    pts = points.points if isinstance(points, SkewSpectrum) else np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("spacing statistics need at least 2 points")
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    np.fill_diagonal(dist, np.inf)
    nn = np.min(dist, axis=1)
    nn_mean = float(np.mean(nn))
    nn_cv = float(np.std(nn) / nn_mean) if nn_mean > 0 else np.inf
    return SpacingStats(nn_mean=nn_mean, nn_cv=nn_cv, max_norm=_max_norm(pts))
