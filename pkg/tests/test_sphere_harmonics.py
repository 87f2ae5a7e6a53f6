"""Real spherical harmonics, sampling, synthesis, and spectrum estimation."""

import math

import numpy as np
import pytest

from invspan.errors import DimensionError
from invspan.so3_irreps import RotationSpec, cartesian_rotation, random_rotation
from invspan.sphere_harmonics import (
    MAX_LMAX,
    RADIAL_LAWS,
    CoefficientArray,
    PowerSpectrum,
    dump_coefficients,
    empirical_power_spectrum,
    eval_ylm,
    gauss_legendre_grid,
    grid_mean_square,
    laplacian_eigen_check,
    lm_index,
    load_coefficients,
    read_power_spectrum,
    rotate_coefficient_array,
    rotate_coefficients,
    sample_coefficient_arrays,
    sample_coefficients,
    sample_degree_block,
    synthesize,
    synthesize_batch,
    write_power_spectrum,
    ylm_matrix,
)


def _sphere_angles(points):
    points = np.asarray(points, dtype=float)
    theta = np.arccos(np.clip(points[:, 2], -1.0, 1.0))
    phi = np.mod(np.arctan2(points[:, 1], points[:, 0]), 2.0 * math.pi)
    return theta, phi


def test_lm_index_layout():
    assert lm_index(0, 0) == 0
    assert lm_index(1, -1) == 1
    assert lm_index(1, 0) == 2
    assert lm_index(1, 1) == 3
    assert lm_index(2, -2) == 4
    assert lm_index(3, 3) == 15


def test_y00_is_constant():
    rng = np.random.default_rng(0)
    theta = rng.uniform(0.1, math.pi - 0.1, 20)
    phi = rng.uniform(0.0, 2.0 * math.pi, 20)
    np.testing.assert_allclose(
        eval_ylm(0, 0, theta, phi), np.full(20, 1.0 / math.sqrt(4.0 * math.pi)), atol=1e-15
    )


def test_y10_matches_closed_form():
    rng = np.random.default_rng(1)
    theta = rng.uniform(0.1, math.pi - 0.1, 20)
    phi = rng.uniform(0.0, 2.0 * math.pi, 20)
    coeff = math.sqrt(3.0 / (4.0 * math.pi))
    np.testing.assert_allclose(eval_ylm(1, 0, theta, phi), coeff * np.cos(theta), atol=1e-14)


def test_degree_one_and_two_closed_forms():
    rng = np.random.default_rng(2)
    theta = rng.uniform(0.1, math.pi - 0.1, 15)
    phi = rng.uniform(0.0, 2.0 * math.pi, 15)
    st, ct = np.sin(theta), np.cos(theta)
    c1 = math.sqrt(3.0 / (4.0 * math.pi))
    np.testing.assert_allclose(eval_ylm(1, 1, theta, phi), c1 * st * np.cos(phi), atol=1e-14)
    np.testing.assert_allclose(eval_ylm(1, -1, theta, phi), c1 * st * np.sin(phi), atol=1e-14)
    c20 = math.sqrt(5.0 / (16.0 * math.pi))
    np.testing.assert_allclose(
        eval_ylm(2, 0, theta, phi), c20 * (3.0 * ct * ct - 1.0), atol=1e-13
    )
    c22 = math.sqrt(15.0 / (16.0 * math.pi))
    np.testing.assert_allclose(
        eval_ylm(2, 2, theta, phi), c22 * st * st * np.cos(2.0 * phi), atol=1e-13
    )
    np.testing.assert_allclose(
        eval_ylm(2, -2, theta, phi), c22 * st * st * np.sin(2.0 * phi), atol=1e-13
    )


def test_eval_ylm_rejects_bad_order():
    with pytest.raises(DimensionError):
        eval_ylm(2, 3, 0.5, 0.5)
    with pytest.raises(DimensionError):
        eval_ylm(-1, 0, 0.5, 0.5)


def test_orthonormality_on_quadrature_grid():
    grid = gauss_legendre_grid(4)
    basis = ylm_matrix(4, grid.theta, grid.phi)
    gram = (basis * grid.weights) @ basis.T
    np.testing.assert_allclose(gram, np.eye(25), atol=1e-6)


def test_laplacian_eigen_residuals():
    assert laplacian_eigen_check(0, 1e-3) <= 1e-9
    assert laplacian_eigen_check(1, 1e-3) <= 1e-4
    assert laplacian_eigen_check(3, 1e-3) <= 1e-3


def test_laplacian_second_order_convergence():
    r_h = laplacian_eigen_check(6, 1e-3)
    r_half = laplacian_eigen_check(6, 5e-4)
    assert 3.5 <= r_h / r_half <= 4.5


def test_laplacian_rejects_bad_step():
    with pytest.raises(ValueError):
        laplacian_eigen_check(1, 0.0)
    with pytest.raises(ValueError):
        laplacian_eigen_check(1, 0.5)


def test_grid_weights():
    grid = gauss_legendre_grid(8)
    assert grid.npoints == 9 * 17
    assert np.all(grid.weights > 0.0)
    assert float(grid.weights.sum()) == pytest.approx(4.0 * math.pi, abs=1e-10)


def test_constant_law_block_norm_is_exact():
    block = sample_degree_block(3, 1.0, "constant", 200, 42)
    norms2 = np.einsum("ij,ij->i", block, block)
    np.testing.assert_allclose(norms2, np.full(200, 7.0), atol=1e-12)


def test_zero_power_gives_zero_coefficients():
    spectrum = PowerSpectrum(np.array([1.0, 0.0, 2.0]))
    coeffs = sample_coefficients(spectrum, "chi", 3)
    np.testing.assert_array_equal(coeffs.block(1), np.zeros(3))
    assert np.any(coeffs.block(2) != 0.0)


def test_chi_law_marginals_match_power():
    # one draw of eta times an independent direction is jointly Gaussian,
    # so each coordinate has variance C within Monte Carlo error
    n = 100_000
    block = sample_degree_block(2, 0.7, "chi", n, 99)
    sq = block * block
    var = sq.mean(axis=0)
    se = sq.std(axis=0, ddof=1) / math.sqrt(n)
    assert np.all(np.abs(var - 0.7) <= 3.0 * se)


def test_expected_block_norm_all_laws():
    # E[norm^2] = (2 ell + 1) C for every radial law
    n = 60_000
    for law in RADIAL_LAWS:
        block = sample_degree_block(3, 2.0, law, n, 7)
        norms2 = np.einsum("ij,ij->i", block, block)
        se = norms2.std(ddof=1) / math.sqrt(n)
        assert abs(norms2.mean() - 14.0) <= 3.0 * se + 1e-9


def test_sample_rejects_unknown_law():
    with pytest.raises(ValueError):
        sample_degree_block(2, 1.0, "cauchy", 10, 0)


def test_sampling_is_deterministic():
    spectrum = PowerSpectrum(np.array([0.5, 1.0, 0.25]))
    a = sample_coefficient_arrays(spectrum, "lognormal", 50, 123)
    b = sample_coefficient_arrays(spectrum, "lognormal", 50, 123)
    np.testing.assert_array_equal(a, b)
    c = sample_coefficient_arrays(spectrum, "lognormal", 50, 124)
    assert np.any(a != c)


def test_synthesize_constant_field():
    coeffs = CoefficientArray(lmax=2, values=np.zeros(9))
    coeffs.values[0] = 3.0
    grid = gauss_legendre_grid(2)
    field = synthesize(coeffs, grid)
    np.testing.assert_allclose(field, np.full(grid.npoints, 3.0 / math.sqrt(4.0 * math.pi)), atol=1e-14)


def test_synthesize_single_mode_is_cos_theta():
    coeffs = CoefficientArray(lmax=1, values=np.zeros(4))
    coeffs.values[lm_index(1, 0)] = 1.0
    grid = gauss_legendre_grid(3)
    field = synthesize(coeffs, grid)
    np.testing.assert_allclose(
        field, math.sqrt(3.0 / (4.0 * math.pi)) * np.cos(grid.theta), atol=1e-14
    )


def test_parseval_identity():
    rng = np.random.default_rng(31)
    rows = rng.standard_normal((1, 81))
    grid = gauss_legendre_grid(8)
    fields = synthesize_batch(rows, 8, grid)
    lhs = float(fields[0] ** 2 @ grid.weights)
    rhs = float(rows[0] @ rows[0])
    assert lhs == pytest.approx(rhs, rel=1e-4)
    assert grid_mean_square(fields[0], grid) == pytest.approx(rhs / (4.0 * math.pi), rel=1e-4)


def test_rotate_identity_is_noop():
    rng = np.random.default_rng(17)
    block = rng.standard_normal(5)
    out = rotate_coefficients(2, RotationSpec(0.0, 0.0, 0.0), block)
    np.testing.assert_allclose(out, block, atol=1e-14)


def test_rotate_preserves_norm():
    rng = np.random.default_rng(18)
    for _ in range(5):
        block = rng.standard_normal(7)
        out = rotate_coefficients(3, random_rotation(rng), block)
        assert np.linalg.norm(out) == pytest.approx(np.linalg.norm(block), abs=1e-10)


def test_rotation_equivariance_of_synthesis():
    # rotating coefficients evaluates the original field at g^-1 x
    rng = np.random.default_rng(19)
    values = rng.standard_normal(25)
    coeffs = CoefficientArray(lmax=4, values=values)
    rot = random_rotation(rng)
    rotated = rotate_coefficient_array(coeffs, rot)
    points = rng.standard_normal((20, 3))
    points /= np.linalg.norm(points, axis=1, keepdims=True)
    g = cartesian_rotation(rot)
    theta_x, phi_x = _sphere_angles(points)
    theta_b, phi_b = _sphere_angles(points @ g)
    field_rot = ylm_matrix(4, theta_x, phi_x).T @ rotated.values
    field_orig = ylm_matrix(4, theta_b, phi_b).T @ coeffs.values
    np.testing.assert_allclose(field_rot, field_orig, atol=1e-8)


def test_rotate_rejects_wrong_block_length():
    with pytest.raises(DimensionError):
        rotate_coefficients(2, RotationSpec(0.1, 0.2, 0.3), np.zeros(7))


def test_empirical_spectrum_constant_law():
    spectrum = PowerSpectrum(np.ones(9))
    rows = sample_coefficient_arrays(spectrum, "constant", 10_000, 5)
    estimate, moments = empirical_power_spectrum(rows)
    assert np.all(estimate.values >= 0.95)
    assert np.all(estimate.values <= 1.05)
    # distinct orders in one degree are uncorrelated within MC error
    bound = 4.0 / math.sqrt(10_000)
    for m in moments:
        off = m - np.diag(np.diag(m))
        assert np.max(np.abs(off)) <= bound


def test_empirical_spectrum_zero_input():
    rows = np.zeros((10, 16))
    estimate, _ = empirical_power_spectrum(rows)
    np.testing.assert_array_equal(estimate.values, np.zeros(4))


def test_empirical_spectrum_rejects_empty():
    with pytest.raises(ValueError):
        empirical_power_spectrum([])


def test_empirical_spectrum_accepts_coefficient_arrays():
    rows = sample_coefficient_arrays(PowerSpectrum(np.ones(3)), "chi", 4, 9)
    arrays = [CoefficientArray(lmax=2, values=r) for r in rows]
    from_rows, _ = empirical_power_spectrum(rows)
    from_arrays, _ = empirical_power_spectrum(arrays)
    np.testing.assert_allclose(from_rows.values, from_arrays.values, atol=1e-15)


def test_power_spectrum_file_round_trip(tmp_path):
    path = tmp_path / "spec.txt"
    spectrum = PowerSpectrum(np.array([1.0, 0.25, 0.125]))
    write_power_spectrum(spectrum, path)
    back = read_power_spectrum(path)
    np.testing.assert_array_equal(back.values, spectrum.values)


def test_power_spectrum_file_errors(tmp_path):
    gap = tmp_path / "gap.txt"
    gap.write_text("0 1.0\n2 0.5\n")
    with pytest.raises(ValueError):
        read_power_spectrum(gap)
    dup = tmp_path / "dup.txt"
    dup.write_text("0 1.0\n0 0.5\n")
    with pytest.raises(ValueError):
        read_power_spectrum(dup)
    neg = tmp_path / "neg.txt"
    neg.write_text("0 -1.0\n")
    with pytest.raises(ValueError):
        read_power_spectrum(neg)


def test_coefficient_file_round_trip(tmp_path):
    path = tmp_path / "coeffs.csv"
    coeffs = sample_coefficients(PowerSpectrum(np.array([1.0, 0.5, 2.0])), "chi", 11)
    dump_coefficients(coeffs, path)
    back = load_coefficients(path)
    assert back.lmax == coeffs.lmax
    np.testing.assert_array_equal(back.values, coeffs.values)


def test_coefficient_file_rejects_missing_entry(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("ell,m,value\n0,0,1.0\n1,0,2.0\n")
    with pytest.raises(ValueError):
        load_coefficients(path)


def test_lmax_cap_enforced():
    with pytest.raises(DimensionError):
        gauss_legendre_grid(MAX_LMAX + 1)


def test_coefficient_array_validation():
    with pytest.raises(DimensionError):
        CoefficientArray(lmax=2, values=np.zeros(8))
    with pytest.raises(ValueError):
        CoefficientArray(lmax=0, values=np.array([math.inf]))
