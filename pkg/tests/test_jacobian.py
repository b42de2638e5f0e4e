import numpy as np
import pytest

from skewspec.density import pair_factor_f
from skewspec.ensemble import SkewSpectrum, random_generic_spectrum
from skewspec.jacobian import (
    DegenerateJacobian,
    ambient_coordinates,
    apply_dG,
    assemble_dG,
    closed_form_gram,
    closed_form_log_gram,
    enumerate_tangent_basis,
    gram_determinant,
    gram_log_determinant,
    gram_matrix,
    jacobian_rank,
    shape_ratio,
    verify_density_shape,
)
from skewspec.matrixcore import haar_unitary


def test_basis_count_and_tags():
    basis = enumerate_tangent_basis(1)
    assert [b.tag for b in basis] == ["R", "S", "T", "e1", "e2"]
    assert len(enumerate_tangent_basis(2)) == 18
    for p in (1, 2, 3, 5):
        assert len(enumerate_tangent_basis(p)) == 4 * p * p + p


def test_basis_orthonormal():
    basis = enumerate_tangent_basis(3)
    matrices = [b for b in basis if b.matrix is not None]
    for i, a in enumerate(matrices):
        # skew-Hermitian, unit Frobenius norm
        assert np.allclose(a.matrix.conj().T, -a.matrix)
        for j, b in enumerate(matrices):
            inner = np.real(np.trace(a.matrix.conj().T @ b.matrix))
            assert abs(inner - (1.0 if i == j else 0.0)) <= 1e-12
    vectors = [b.vector for b in basis if b.vector is not None]
    gram = np.array(vectors) @ np.array(vectors).T
    assert np.max(np.abs(gram - np.eye(len(vectors)))) <= 1e-12


def test_ambient_coordinates_isometry():
    rng = np.random.default_rng(0)
    for _ in range(20):
        n = int(rng.integers(1, 9))
        z1 = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        z2 = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        x, y = (z1 + z1.conj().T) / 2, (z2 + z2.conj().T) / 2
        coords = ambient_coordinates(x, y)
        target = np.sqrt(np.linalg.norm(x) ** 2 + np.linalg.norm(y) ** 2)
        assert abs(np.linalg.norm(coords) - target) <= 1e-12 * max(1.0, target)


def test_apply_dG_single_block_images():
    s = SkewSpectrum([(1.7, 0.6), (0.4, 2.2)])
    basis = enumerate_tangent_basis(2)
    by_key = {(b.tag, b.indices): b for b in basis}

    for k in (1, 2):
        x_k, y_k = s.points[k - 1]
        img = apply_dG(s, by_key[("S", (k,))])
        # ([S_k, A_x], 0) with norm 2 x_k
        assert np.linalg.norm(img) == pytest.approx(2.0 * x_k, rel=1e-12)
        r_k = by_key[("R", (k,))].matrix
        expected = ambient_coordinates(-2j * x_k * r_k, np.zeros((4, 4), dtype=complex))
        assert np.allclose(img, expected, atol=1e-14)

        img = apply_dG(s, by_key[("T", (k,))])
        expected = ambient_coordinates(np.zeros((4, 4), dtype=complex), 2j * y_k * r_k)
        assert np.linalg.norm(img) == pytest.approx(2.0 * y_k, rel=1e-12)
        assert np.allclose(img, expected, atol=1e-14)

        img = apply_dG(s, by_key[("e1", (k,))])
        assert np.linalg.norm(img) == pytest.approx(np.sqrt(2.0), rel=1e-12)
        diag = img[:4]
        assert diag[2 * k - 2] == 1.0 and diag[2 * k - 1] == -1.0


def test_gram_determinant_p1_values():
    assert gram_determinant(SkewSpectrum([(1.0, 1.0)])) == pytest.approx(512.0, rel=1e-10)
    s = SkewSpectrum([(2.0, 1.0)])
    # columns are orthogonal: (4x^2+4y^2)(4x^2)(4y^2)(2)(2)
    assert gram_determinant(s) == pytest.approx(5120.0, rel=1e-10)
    assert gram_determinant(s) == pytest.approx(closed_form_gram(s), rel=1e-10)


def test_gram_determinant_p2_example():
    s = SkewSpectrum([(1.0, 1.0), (2.0, 2.0)])
    expected = 512.0 * (256.0 * 4.0 * 4.0 * 8.0) * 3600.0**2
    assert closed_form_gram(s) == pytest.approx(expected, rel=1e-12)
    assert gram_determinant(s) == pytest.approx(expected, rel=1e-8)


def test_gram_rejects_degenerate_spectrum():
    with pytest.raises(DegenerateJacobian):
        gram_determinant(SkewSpectrum([(1.0, 1.0), (1.0, 2.0)]))


def test_closed_form_factorization_identity():
    rng = np.random.default_rng(1)
    for _ in range(20):
        s = random_generic_spectrum(int(rng.integers(1, 5)), rng)
        r = np.sqrt(s.x**2 + s.y**2)
        point_part = float(np.prod(16.0 * s.x * s.y * r))
        pair_part = 1.0
        for i in range(s.p):
            for j in range(i + 1, s.p):
                pair_part *= pair_factor_f(s.points[i], s.points[j])
        assert np.sqrt(closed_form_gram(s)) == pytest.approx(point_part * pair_part, rel=1e-12)


def test_closed_form_matches_numeric():
    rng = np.random.default_rng(2)
    for p in (1, 2, 3):
        for _ in range(5):
            s = random_generic_spectrum(p, rng)
            rel = abs(np.exp(gram_log_determinant(s) - closed_form_log_gram(s)) - 1.0)
            assert rel <= 1e-8


def test_rank_equals_dimension():
    rng = np.random.default_rng(3)
    for p in (1, 2, 3, 4):
        s = random_generic_spectrum(p, rng)
        assert jacobian_rank(s) == 4 * p * p + p


def test_gram_block_structure():
    s = random_generic_spectrum(3, np.random.default_rng(4))
    basis = enumerate_tangent_basis(3)
    gram = gram_matrix(s)

    def group(element):
        if element.tag in ("Rij", "Sij"):
            return ("ij", element.indices[0], element.indices[1])
        return ("k", element.indices[0])

    groups = [group(b) for b in basis]
    scale = np.max(np.abs(gram))
    for a in range(len(basis)):
        for b in range(len(basis)):
            if groups[a] != groups[b]:
                assert abs(gram[a, b]) <= 1e-12 * scale


def test_inter_block_determinant_equals_f_squared():
    # the 16x8 inter-block system alone must have Gram determinant f^2
    rng = np.random.default_rng(5)
    for _ in range(100):
        s = random_generic_spectrum(2, rng, low=0.1, high=5.0)
        basis = enumerate_tangent_basis(2)
        columns = assemble_dG(s)
        idx = [i for i, b in enumerate(basis) if b.tag in ("Rij", "Sij")]
        m = columns[:, idx]
        det = np.linalg.det(m.T @ m)
        f = pair_factor_f(s.points[0], s.points[1])
        assert det == pytest.approx(f * f, rel=1e-8)


def test_determinant_invariant_under_conjugation():
    rng = np.random.default_rng(6)
    s = random_generic_spectrum(2, rng)
    base = gram_log_determinant(s)
    for seed in range(3):
        moved = gram_log_determinant(s, unitary=haar_unitary(4, seed))
        assert abs(np.exp(moved - base) - 1.0) <= 1e-8


def test_shape_ratio_p1_is_16():
    assert shape_ratio(SkewSpectrum([(1.0, 1.0)])) == pytest.approx(16.0, rel=1e-10)


def test_shape_ratio_scale_invariant():
    s = SkewSpectrum([(0.8, 1.4), (2.1, 0.9)])
    base = shape_ratio(s)
    for t in (0.5, 2.0, 7.0):
        scaled = SkewSpectrum(np.asarray(s.points) * t)
        assert shape_ratio(scaled) == pytest.approx(base, rel=1e-9)


def test_verify_density_shape_report():
    rng = np.random.default_rng(7)
    spectra = [random_generic_spectrum(2, rng) for _ in range(20)]
    report = verify_density_shape(spectra, gamma=1.0)
    assert report.passed
    assert report.coefficient_of_variation <= 1e-8
    assert report.mean == pytest.approx(256.0, rel=1e-10)

    single = verify_density_shape(spectra[0], gamma=2.0)
    assert single.ratios.shape == (1,)
    assert single.passed
