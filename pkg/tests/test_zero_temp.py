"""Unit tests for the zero-temperature crystal, kernels, and covariances."""
import numpy as np
import pytest

from lagcorners import zero_temp
from lagcorners.specfun import laguerre_roots


def gram_schmidt_monic(nodes, weights, num):
    """Monic orthogonal polynomials on a discrete measure, as coefficient
    tables (lowest degree first), plus their squared norms.  Independent
    oracle for the dual polynomial family."""
    polys = []
    norms = []
    V = np.vander(nodes, num, increasing=True)  # V[:, d] = nodes**d
    for m in range(num):
        c = np.zeros(num)
        c[m] = 1.0
        for p, nrm in zip(polys, norms):
            proj = np.sum(weights * (V @ c) * (V @ p)) / nrm
            c -= proj * p
        polys.append(c)
        norms.append(float(np.sum(weights * (V @ c) ** 2)))
    return polys, norms, V


def test_crystal_roots_match_laguerre():
    for N in (1, 3, 5):
        crys = zero_temp.crystal(N, 9)
        for k in range(1, 10):
            full = crys.full_roots(k)
            ref = laguerre_roots(k, N - k)
            assert np.allclose(full, ref, rtol=1e-10, atol=1e-10)
            assert len(crys.nonzero_roots(k)) == min(N, k)
            assert crys.zero_multiplicity(k) == max(k - N, 0)


def test_crystal_root_accessor():
    crys = zero_temp.crystal(2, 5)
    assert crys.root(1, 3) == crys.nonzero_roots(3)[0]
    assert crys.root(3, 4) == 0.0
    with pytest.raises(ValueError):
        crys.root(4, 3)
    with pytest.raises(ValueError):
        crys.root(0, 2)


def test_crystal_validates():
    with pytest.raises(ValueError):
        zero_temp.crystal(0, 3)
    crys = zero_temp.crystal(2, 3)
    with pytest.raises(ValueError):
        crys.nonzero_roots(5)  # levels only go one past n


def test_transition_matrix_rows_and_identity():
    for N, k in [(3, 2), (3, 5), (2, 4), (5, 5)]:
        crys = zero_temp.crystal(N, k + 1)
        A = zero_temp.transition_matrix(k, crys).matrix
        assert A.shape == (k, k + 1)
        assert np.all(A >= 0)
        assert np.allclose(A.sum(axis=1), 1.0, atol=1e-12)
        # row-sum closed form: sum_b (x - l'_b)^{-2} = (k+1)/x
        src = crys.full_roots(k)
        tgt = crys.full_roots(k + 1)
        for a in range(min(N, k)):
            s = np.sum((src[a] - tgt) ** -2.0)
            assert abs(s - (k + 1) / src[a]) < 1e-9 * s


def test_diffusion_kernel_composition():
    crys = zero_temp.crystal(3, 7)
    K = zero_temp.diffusion_kernel(2, 6, crys)
    assert K.matrix.shape == (2, 6)
    assert np.allclose(K.matrix.sum(axis=1), 1.0, atol=1e-12)
    ident = zero_temp.diffusion_kernel(4, 4, crys)
    assert np.allclose(ident.matrix, np.eye(4))


def test_spectral_kernel_matches_composition():
    for N, k, r in [(3, 2, 5), (4, 3, 4), (2, 3, 6), (5, 5, 7)]:
        crys = zero_temp.crystal(N, r)
        full = zero_temp.diffusion_kernel(k, r, crys).matrix
        spec = zero_temp.diffusion_kernel_spectral(k, r, crys)
        M1, M2 = min(N, k), min(N, r)
        assert np.allclose(spec, full[:M1, :M2], atol=1e-12)


def test_dual_polys_match_gram_schmidt():
    for N, k in [(3, 3), (4, 2), (2, 5), (5, 4)]:
        crys = zero_temp.crystal(N, k)
        tab = zero_temp.dual_polys(k, crys)
        l = crys.nonzero_roots(k)
        w = l / (k + 1.0)
        polys, norms, V = gram_schmidt_monic(l, w, tab.num)
        for m in range(tab.num):
            assert abs(norms[m] - tab.norms[m]) < 1e-8 * tab.norms[m]
            vals = V @ polys[m] / np.sqrt(norms[m])
            assert np.allclose(vals, tab.values[m], atol=1e-8)


def test_dual_poly_eval_consistent_with_table():
    crys = zero_temp.crystal(4, 6)
    tab = zero_temp.dual_polys(6, crys)
    l = crys.nonzero_roots(6)
    for m in range(tab.num):
        vals = zero_temp.dual_poly_eval(m, 6, 4, l) / np.sqrt(tab.norms[m])
        assert np.allclose(vals, tab.values[m], rtol=1e-8, atol=1e-8)


def test_dual_poly_contour_matches_recurrence():
    for m, k, N, x in [(0, 3, 2, 1.5), (1, 4, 3, 2.0), (2, 5, 4, 0.7), (3, 6, 6, 4.2)]:
        a = zero_temp.dual_poly_contour(m, k, N, x)
        b = float(zero_temp.dual_poly_eval(m, k, N, np.array(x)))
        assert abs(a - b) < 1e-10 * max(1.0, abs(b))
    with pytest.raises(ValueError):
        zero_temp.dual_poly_contour(3, 3, 5, 1.0)


def test_apply_Dk_on_constants():
    # the jump operator contracts constants by k/(k+1)
    for N, k in [(3, 2), (2, 4), (4, 4)]:
        crys = zero_temp.crystal(N, k + 1)
        out = zero_temp.apply_Dk(np.ones(k), k, crys)
        assert np.allclose(out, k / (k + 1.0), atol=1e-12)


def test_apply_Dk_rejects_inconsistent_zero_values():
    crys = zero_temp.crystal(2, 6)
    f = np.array([1.0, 2.0, 3.0, 4.0, 5.0])  # level 5 has a triple zero root
    with pytest.raises(ValueError):
        zero_temp.apply_Dk(f, 5, crys)
    with pytest.raises(ValueError):
        zero_temp.apply_Dk(np.ones(3), 5, crys)


def test_eta_variance():
    crys = zero_temp.crystal(3, 4)
    assert zero_temp.eta_variance(2, 3, crys) == 2.0 * crys.root(2, 3) / 4.0
    assert zero_temp.eta_variance(4, 4, crys) == 0.0


def test_covariance_small_closed_forms():
    # single particle: lam ~ Gamma(k+1-ish) fluctuation variance 2 l^2 / stuff;
    # the N = n = 1 field has Var(xi_11) = 2 and the N=1, n=2 field has
    # covariance [[2, 2], [2, 4]] in the order (1,1), (1,2)
    crys = zero_temp.crystal(1, 1)
    assert abs(zero_temp.covariance(1, 1, 1, 1, crys) - 2.0) < 1e-12
    crys = zero_temp.crystal(1, 2)
    cov = zero_temp.covariance_matrix(crys)
    assert np.allclose(cov, [[2.0, 2.0], [2.0, 4.0]], atol=1e-12)
    P = zero_temp.precision_matrix(crys)
    assert np.allclose(P, [[1.0, -0.5], [-0.5, 0.5]], atol=1e-12)
    assert np.allclose(cov @ P, np.eye(2), atol=1e-12)


def test_covariance_symmetry_and_zero_roots():
    crys = zero_temp.crystal(2, 6)
    a = zero_temp.covariance(1, 3, 2, 5, crys)
    b = zero_temp.covariance(2, 5, 1, 3, crys)
    assert abs(a - b) < 1e-14
    assert zero_temp.covariance(3, 4, 1, 2, crys) == 0.0


def test_top_level_covariance_matches_pointwise():
    crys = zero_temp.crystal(3, 5)
    top = zero_temp.top_level_covariance(crys)
    for a in range(1, 4):
        for b in range(1, 4):
            ref = zero_temp.covariance(a, 5, b, 5, crys)
            assert abs(top[a - 1, b - 1] - ref) < 1e-11


def test_field_index_order():
    crys = zero_temp.crystal(2, 4)
    assert zero_temp.field_index(crys) == [
        (1, 1), (1, 2), (2, 2), (1, 3), (2, 3), (1, 4), (2, 4)]


def test_precision_covariance_positive_definite():
    crys = zero_temp.crystal(3, 6)
    P = zero_temp.precision_matrix(crys)
    assert np.allclose(P, P.T)
    assert np.min(np.linalg.eigvalsh(P)) > 0
    cov = zero_temp.precision_covariance(crys)
    assert np.allclose(cov @ P, np.eye(P.shape[0]), atol=1e-10)


def test_sample_infinity_corners_shapes_and_determinism():
    crys = zero_temp.crystal(3, 5)
    out1 = zero_temp.sample_infinity_corners(crys, np.random.default_rng(0), size=4)
    out2 = zero_temp.sample_infinity_corners(crys, np.random.default_rng(0), size=4)
    assert len(out1) == 5
    for k in range(1, 6):
        assert out1[k - 1].shape == (4, min(3, k))
        assert np.array_equal(out1[k - 1], out2[k - 1])
