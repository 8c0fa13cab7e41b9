import numpy as np
import pytest

from ccisim import linalg

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1j], [1j, 0.0]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def random_hermitian(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (m + m.conj().T) / 2


class TestEigHermitian:
    def test_pauli_x(self):
        w, v = linalg.eig_hermitian(SX)
        assert np.allclose(w, [-1.0, 1.0], atol=1e-12)

    def test_triangle_adjacency(self):
        # characteristic polynomial (x+1)^2 (x-2): eigenvalues -1, -1, 2
        m = np.ones((3, 3), dtype=complex) - np.eye(3)
        w, v = linalg.eig_hermitian(m)
        assert np.allclose(w, [-1.0, -1.0, 2.0], atol=1e-10)

    def test_eigen_equation_and_orthonormality(self):
        rng = np.random.default_rng(3)
        for dim in (2, 3, 4):
            for _ in range(20):
                m = random_hermitian(rng, dim)
                w, v = linalg.eig_hermitian(m)
                assert np.max(np.abs(m @ v - v * w)) < 1e-10
                assert np.max(np.abs(v.conj().T @ v - np.eye(dim))) < 1e-10
                assert np.all(np.diff(w) >= -1e-14)

    def test_spectral_reconstruction(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            m = random_hermitian(rng, 3)
            w, v = linalg.eig_hermitian(m)
            assert np.max(np.abs((v * w) @ v.conj().T - m)) < 1e-10

    def test_rejects_non_hermitian(self):
        bad = np.array([[0.0, 1.0], [0.5, 0.0]], dtype=complex)
        with pytest.raises(ValueError, match="not Hermitian"):
            linalg.eig_hermitian(bad)

    def test_rejects_bad_dims(self):
        with pytest.raises(ValueError):
            linalg.eig_hermitian(np.eye(5, dtype=complex))
        with pytest.raises(ValueError):
            linalg.eig_hermitian(np.ones((2, 3)))


class TestExpm:
    def test_zero_time_is_identity(self):
        rng = np.random.default_rng(5)
        m = random_hermitian(rng, 3)
        assert np.max(np.abs(linalg.expm_i(m, 0.0) - np.eye(3))) < 1e-14

    def test_half_rabi_period(self):
        # exp(-i (w/2) sx * pi/w) = -i sx
        omega = 2 * np.pi * 7.0
        u = linalg.expm_i(0.5 * omega * SX, np.pi / omega)
        assert np.max(np.abs(u - (-1j) * SX)) < 1e-12

    def test_group_property(self):
        rng = np.random.default_rng(6)
        for _ in range(25):
            m = random_hermitian(rng, 3)
            t1, t2 = rng.uniform(-1, 1, 2)
            lhs = linalg.expm_i(m, t1) @ linalg.expm_i(m, t2)
            assert np.max(np.abs(lhs - linalg.expm_i(m, t1 + t2))) < 1e-12

    def test_unitarity(self):
        rng = np.random.default_rng(7)
        for dim in (2, 3, 4):
            for _ in range(20):
                u = linalg.expm_i(random_hermitian(rng, dim), rng.uniform(-3, 3))
                assert linalg.unitary_defect(u) < 1e-10

    def test_norm_conservation(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            u = linalg.expm_i(random_hermitian(rng, 4), rng.uniform(0, 2))
            psi = rng.normal(size=4) + 1j * rng.normal(size=4)
            psi /= np.linalg.norm(psi)
            assert abs(np.linalg.norm(u @ psi) - 1.0) < 1e-10

    def test_evolve_matches_expm(self):
        rng = np.random.default_rng(9)
        m = random_hermitian(rng, 3)
        psi0 = np.array([1.0, 0.0, 0.0], dtype=complex)
        ts = np.linspace(0, 2, 7)
        states = linalg.evolve(m, ts, psi0)
        for t, s in zip(ts, states):
            assert np.max(np.abs(s - linalg.expm_i(m, t) @ psi0)) < 1e-12


class TestFidelity:
    def test_pure_state_self_fidelity(self):
        psi = np.array([1.0, 1j, 0.0], dtype=complex) / np.sqrt(2)
        assert linalg.fidelity(linalg.projector(psi), psi) == pytest.approx(1.0, abs=1e-12)

    def test_maximally_mixed(self):
        psi = np.array([1.0, 0.0, 0.0], dtype=complex)
        assert linalg.fidelity(np.eye(3, dtype=complex) / 3, psi) == pytest.approx(1 / 3, abs=1e-12)

    def test_dim_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            linalg.fidelity(np.eye(3, dtype=complex) / 3, np.array([1.0, 0.0]))


class TestTensor:
    def test_identity(self):
        assert np.array_equal(linalg.tensor(I2, I2), np.eye(4))

    def test_flip_flop_expansion(self):
        # sx sx + sy sy couples only |ge> <-> |eg>, worked out by hand
        expected = np.zeros((4, 4), dtype=complex)
        expected[1, 2] = expected[2, 1] = 2.0
        got = linalg.tensor(SX, SX) + linalg.tensor(SY, SY)
        assert np.max(np.abs(got - expected)) < 1e-15

    def test_mixed_product(self):
        lhs = linalg.tensor(SX, I2) @ linalg.tensor(I2, SX)
        assert np.max(np.abs(lhs - linalg.tensor(SX, SX))) < 1e-15

    def test_rejects_larger_dims(self):
        with pytest.raises(ValueError, match="2x2"):
            linalg.tensor(np.eye(3), I2)


class TestPhaseDist:
    def test_pure_phase_is_zero(self):
        rng = np.random.default_rng(10)
        u = linalg.expm_i(random_hermitian(rng, 3), 0.3)
        assert linalg.phase_dist(u, np.exp(0.7j) * u) < 1e-12

    def test_detects_difference(self):
        assert linalg.phase_dist(SX, I2) > 0.5
