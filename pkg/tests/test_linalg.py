import numpy as np
import pytest

from relaybounds.linalg import (NumericalDomainError, check_hermitian_psd,
                                hermitize, log_det_plus_identity,
                                project_psd_trace, psd_tril_factor,
                                schur_conditional_cov)


def random_psd(rng, n, complex_entries=True):
    f = rng.standard_normal((n, n))
    if complex_entries:
        f = f + 1j * rng.standard_normal((n, n))
    return f @ f.conj().T


class TestLogDetPlusIdentity:
    def test_zero_matrix(self):
        assert log_det_plus_identity(np.zeros((2, 2))) == 0.0

    def test_diagonal(self):
        assert log_det_plus_identity(np.diag([1.0, 3.0])) == pytest.approx(3.0)

    def test_matches_eigenvalue_product(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            m = random_psd(rng, 3)
            expected = float(np.sum(np.log2(1.0 + np.linalg.eigvalsh(m))))
            assert log_det_plus_identity(m) == pytest.approx(expected, abs=1e-10)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            log_det_plus_identity(np.array([[1.0, 5.0], [0.0, 1.0]]))

    def test_rejects_non_pd_argument(self):
        with pytest.raises(NumericalDomainError):
            log_det_plus_identity(np.diag([-2.0, 1.0]))

    def test_monotone_in_psd_order(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            m1 = random_psd(rng, 3)
            m2 = m1 + random_psd(rng, 3)
            assert log_det_plus_identity(m2) >= log_det_plus_identity(m1) - 1e-12


class TestSchurConditionalCov:
    def test_zero_cross_returns_upper_block(self):
        rng = np.random.default_rng(0)
        su = random_psd(rng, 2)
        sx = random_psd(rng, 2) + np.eye(2)
        joint = np.block([[su, np.zeros((2, 2))], [np.zeros((2, 2)), sx]])
        out = schur_conditional_cov(joint, 2)
        np.testing.assert_allclose(out, hermitize(su), atol=1e-12)

    def test_scalar_case(self):
        joint = np.array([[1.0, 0.5], [0.5, 1.0]])
        out = schur_conditional_cov(joint, 1)
        assert out[0, 0] == pytest.approx(0.75)

    def test_matches_explicit_inverse(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            joint = random_psd(rng, 4) + 0.1 * np.eye(4)
            s = schur_conditional_cov(joint, 2)
            g = joint[:2, 2:]
            expected = joint[:2, :2] - g @ np.linalg.inv(joint[2:, 2:]) @ g.conj().T
            np.testing.assert_allclose(s, hermitize(expected), atol=1e-10)

    def test_output_psd_for_psd_joint(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            n = int(rng.integers(2, 5))
            split = int(rng.integers(1, n))
            joint = random_psd(rng, n)
            out = schur_conditional_cov(joint, split)
            assert np.min(np.linalg.eigvalsh(out)) >= -1e-10

    def test_determinant_identity(self):
        # det(joint) = det(lower block) * det(conditional block)
        rng = np.random.default_rng(5)
        for _ in range(50):
            joint = random_psd(rng, 4) + 0.05 * np.eye(4)
            cond = schur_conditional_cov(joint, 2)
            lhs = np.real(np.linalg.det(joint))
            rhs = np.real(np.linalg.det(joint[2:, 2:]) * np.linalg.det(cond))
            assert lhs == pytest.approx(rhs, rel=1e-8)


class TestProjectPsdTrace:
    def test_identity_within_budget(self):
        out = project_psd_trace(np.eye(2), 2.0)
        np.testing.assert_allclose(out, np.eye(2), atol=1e-14)

    def test_rescales_onto_budget(self):
        out = project_psd_trace(2.0 * np.eye(2), 2.0)
        np.testing.assert_allclose(out, np.eye(2), atol=1e-14)

    def test_random_factors_stay_feasible(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            f = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            s = project_psd_trace(f, 3.0)
            assert np.real(np.trace(s)) <= 3.0 + 1e-12
            assert np.min(np.linalg.eigvalsh(s)) >= -1e-10

    def test_factor_product_passes_psd_invariants(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            f = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
            check_hermitian_psd(f @ f.conj().T)


class TestPsdTrilFactor:
    def test_rank_deficient_exact(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            v = rng.standard_normal(3)
            s = np.outer(v, v)
            low = psd_tril_factor(s)
            np.testing.assert_allclose(low @ low.conj().T, s, atol=1e-10)

    def test_zero_leading_block(self):
        s = np.diag([0.0, 2.0])
        low = psd_tril_factor(s)
        np.testing.assert_allclose(low @ low.conj().T, s, atol=1e-14)
