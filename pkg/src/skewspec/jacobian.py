"""Numerical verification of the skew-spectrum Jacobian.

The parametrization G maps (unitary coset, skew spectrum) to a generic
anti-commuting pair. Its derivative dG is assembled column by column from
an orthonormal tangent basis: three skew-Hermitian directions R_k, S_k,
T_k per 2x2 block, eight inter-block directions R_{ij,ab}, S_{ij,ab} per
block pair, and the 2p spectral directions e1_k, e2_k. The Gram
determinant det(dG^T dG) then has the closed form

    prod_k 256 x_k^2 y_k^2 (x_k^2 + y_k^2) * prod_{i<j} f(z_i, z_j)^2,

whose square root times the radial weight reproduces the skew-spectrum
density up to one constant. This module computes both sides and compares.

Basis matrices live in real ambient coordinates for Hermitian pairs
(diagonal entries plus sqrt(2)-scaled real/imaginary parts of the strict
upper triangle per slot), chosen so the coordinate map is an isometry and
the determinant is chart-independent.

The printed form of S_{ij,ab} in the source derivation carries a minus
sign between its two elementary-matrix terms, which would make it
Hermitian rather than skew-Hermitian; the plus sign used here is the one
consistent with the commutator table and with S_k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import WeightSpec, log_rho, pair_factor_f
from .ensemble import SkewSpectrum, build_block_diag
from .matrixcore import check_unitary

RANK_TOL = 1e-10


class DegenerateJacobian(RuntimeError):
    """The parametrization is not a chart at the requested spectrum."""


@dataclass(frozen=True)
class TangentBasisElement:
    """One orthonormal tangent direction.

    Unitary directions carry a skew-Hermitian ``matrix`` of unit Frobenius
    norm; spectral directions carry a unit ``vector`` in R^{2p} (x slots
    first, then y slots).
    """

    tag: str
    indices: tuple
    matrix: np.ndarray | None = None
    vector: np.ndarray | None = None


def _elementary(n: int, a: int, b: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=np.complex128)
    m[a, b] = 1.0
    return m


def enumerate_tangent_basis(p: int) -> list[TangentBasisElement]:
    """The full ordered tangent basis at the identity coset; 4p^2 + p elements.

    Order: (R_k, S_k, T_k) for k = 1..p, then (R_{ij,ab} for ab in
    00,10,01,11, then S_{ij,ab}) for i < j, then e1_1..e1_p, e2_1..e2_p.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    n = 2 * p
    s2 = np.sqrt(2.0)
    basis: list[TangentBasisElement] = []
    for k in range(1, p + 1):
        a, b = 2 * k - 2, 2 * k - 1  # rows 2k-1, 2k in 1-based terms
        basis.append(
            TangentBasisElement("R", (k,), matrix=(_elementary(n, a, b) - _elementary(n, b, a)) / s2)
        )
        basis.append(
            TangentBasisElement(
                "S", (k,), matrix=1j * (_elementary(n, a, b) + _elementary(n, b, a)) / s2
            )
        )
        basis.append(
            TangentBasisElement(
                "T", (k,), matrix=1j * (_elementary(n, a, a) - _elementary(n, b, b)) / s2
            )
        )
    for i in range(1, p + 1):
        for j in range(i + 1, p + 1):
            for alpha, beta in ((0, 0), (1, 0), (0, 1), (1, 1)):
                a, b = 2 * i - alpha - 1, 2 * j - beta - 1
                basis.append(
                    TangentBasisElement(
                        "Rij",
                        (i, j, alpha, beta),
                        matrix=(_elementary(n, a, b) - _elementary(n, b, a)) / s2,
                    )
                )
            for alpha, beta in ((0, 0), (1, 0), (0, 1), (1, 1)):
                a, b = 2 * i - alpha - 1, 2 * j - beta - 1
                basis.append(
                    TangentBasisElement(
                        "Sij",
                        (i, j, alpha, beta),
                        matrix=1j * (_elementary(n, a, b) + _elementary(n, b, a)) / s2,
                    )
                )
    for k in range(1, p + 1):
        v = np.zeros(2 * p)
        v[k - 1] = 1.0
        basis.append(TangentBasisElement("e1", (k,), vector=v))
    for k in range(1, p + 1):
        v = np.zeros(2 * p)
        v[p + k - 1] = 1.0
        basis.append(TangentBasisElement("e2", (k,), vector=v))
    return basis


def hermitian_coordinates(a: np.ndarray) -> np.ndarray:
    """Orthonormal real coordinates of a Hermitian matrix (length n^2).

    Diagonal first, then sqrt(2) * Re and sqrt(2) * Im of the strict upper
    triangle; the 2-norm of the result equals the Frobenius norm.
    """
    n = a.shape[0]
    iu = np.triu_indices(n, 1)
    upper = a[iu]
    return np.concatenate([np.real(np.diag(a)), np.sqrt(2.0) * upper.real, np.sqrt(2.0) * upper.imag])


def ambient_coordinates(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Isometric real coordinates of a Hermitian pair (length 2 n^2)."""
    return np.concatenate([hermitian_coordinates(x), hermitian_coordinates(y)])


def _image_pair(pair, v: TangentBasisElement):
    """(slot-1, slot-2) Hermitian image of one tangent direction under dG."""
    n = pair.n
    if v.matrix is not None:
        m = v.matrix
        return m @ pair.X - pair.X @ m, m @ pair.Y - pair.Y @ m
    k = v.indices[0]
    block = np.zeros((n, n), dtype=np.complex128)
    zero = np.zeros((n, n), dtype=np.complex128)
    if v.tag == "e1":
        block[2 * k - 2, 2 * k - 2] = 1.0
        block[2 * k - 1, 2 * k - 1] = -1.0
        return block, zero
    if v.tag == "e2":
        block[2 * k - 2, 2 * k - 1] = 1.0
        block[2 * k - 1, 2 * k - 2] = 1.0
        return zero, block
    raise ValueError(f"unknown basis element tag {v.tag!r}")


def apply_dG(s: SkewSpectrum, v: TangentBasisElement) -> np.ndarray:
    """Image of one tangent direction under dG, in ambient coordinates.

    A unitary direction S maps to ([S, A_x], [S, B_y]); the spectral
    direction e1_k maps to (A_{delta_k}, 0) and e2_k to (0, B_{delta_k}).
    """
    ax, by = _image_pair(build_block_diag(s), v)
    return ambient_coordinates(ax, by)


def _require_generic(s: SkewSpectrum):
    if not s.is_generic():
        raise DegenerateJacobian(
            "skew spectrum has coincident x or y coordinates; "
            "the parametrization is a chart only on the generic stratum"
        )


def assemble_dG(s: SkewSpectrum, unitary=None) -> np.ndarray:
    """The (2 n^2) x (4p^2 + p) real matrix of dG images, column per basis element.

    When ``unitary`` is given, every image pair is conjugated by it before
    taking coordinates; the Gram determinant is invariant under this (the
    test hook for base-point independence).
    """
    pair = build_block_diag(s)
    u = check_unitary(unitary) if unitary is not None else None
    cols = []
    for v in enumerate_tangent_basis(s.p):
        ax, by = _image_pair(pair, v)
        if u is not None:
            ax, by = u @ ax @ u.conj().T, u @ by @ u.conj().T
        cols.append(ambient_coordinates(ax, by))
    return np.array(cols).T


def gram_matrix(s: SkewSpectrum, unitary=None) -> np.ndarray:
    m = assemble_dG(s, unitary=unitary)
    return m.T @ m


def _singular_values(s: SkewSpectrum, unitary=None) -> np.ndarray:
    _require_generic(s)
    m = assemble_dG(s, unitary=unitary)
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[-1] < RANK_TOL * sv[0]:
        raise DegenerateJacobian(
            f"dG is rank deficient: smallest singular value {sv[-1]:.3e} "
            f"below {RANK_TOL:.0e} * largest {sv[0]:.3e}"
        )
    return sv


def jacobian_rank(s: SkewSpectrum) -> int:
    """Numerical rank of dG (full rank 4p^2 + p on the generic stratum)."""
    _require_generic(s)
    m = assemble_dG(s)
    sv = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(sv >= RANK_TOL * sv[0]))


def gram_log_determinant(s: SkewSpectrum, unitary=None) -> float:
    """log det(dG^T dG); overflow-safe for large p."""
    sv = _singular_values(s, unitary=unitary)
    return float(2.0 * np.sum(np.log(sv)))


def gram_determinant(s: SkewSpectrum, unitary=None) -> float:
    """det(dG^T dG) for a generic spectrum.

    Raises :class:`DegenerateJacobian` for non-generic input or numerical
    rank deficiency. Use :func:`gram_log_determinant` beyond p ~ 6, where
    the determinant overflows double precision.
    """
    return float(np.exp(gram_log_determinant(s, unitary=unitary)))


def closed_form_log_gram(s: SkewSpectrum) -> float:
    """log of the closed-form Gram determinant."""
    x, y = s.x, s.y
    r2 = x * x + y * y
    total = float(np.sum(np.log(256.0 * x * x * y * y * r2)))
    for i in range(s.p):
        for j in range(i + 1, s.p):
            total += 2.0 * np.log(pair_factor_f(s.points[i], s.points[j]))
    return total


def closed_form_gram(s: SkewSpectrum) -> float:
    """prod_k 256 x_k^2 y_k^2 (x_k^2 + y_k^2) * prod_{i<j} f(z_i, z_j)^2.

    Per-block factor = 4(x^2+y^2) * 4x^2 * 4y^2 * 4 (the last 4 from the
    two sqrt(2)-length spectral columns); the pair factor is the square of
    the four-factor repulsion product.
    """
    return float(np.exp(closed_form_log_gram(s)))


def shape_ratio(s: SkewSpectrum, gamma: float = 1.0) -> float:
    """sqrt(det Gram) * w(||Z||_F) / exp(log_rho); constant (16^p) over generic s."""
    w = WeightSpec(gamma=gamma)
    value = log_rho(s, w)
    if not value.finite:
        raise DegenerateJacobian("density vanishes at this spectrum")
    pair = build_block_diag(s)
    log_ratio = (
        0.5 * gram_log_determinant(s)
        + w.log_weight(np.sqrt(pair.norm_squared))
        - value.log_unnormalized
    )
    return float(np.exp(log_ratio))


@dataclass(frozen=True)
class DensityShapeReport:
    """Shape-test outcome: the recorded ratios and their spread."""

    ratios: np.ndarray
    mean: float
    coefficient_of_variation: float
    tolerance: float
    passed: bool


def verify_density_shape(spectra, gamma: float = 1.0, tolerance: float = 1e-8) -> DensityShapeReport:
    """Check sqrt(Gram det) * w equals exp(log_rho) up to a single constant.

    ``spectra`` is one SkewSpectrum or a sequence of them (all the same p);
    the ratio is recorded per spectrum and the report passes when the
    coefficient of variation is within ``tolerance``.
    """
    if isinstance(spectra, SkewSpectrum):
        spectra = [spectra]
    ratios = np.array([shape_ratio(s, gamma=gamma) for s in spectra])
    mean = float(np.mean(ratios))
    cv = float(np.std(ratios) / mean) if mean != 0 else np.inf
    return DensityShapeReport(
        ratios=ratios,
        mean=mean,
        coefficient_of_variation=cv,
        tolerance=tolerance,
        passed=bool(cv <= tolerance),
    )
