import numpy as np
import pytest

from ecps import (RECONSTRUCTION_TOL, STRUCTURAL_TOL, eig_hermitian,
                  is_density, is_hermitian, is_unitary, kron, partial_trace,
                  singular_values)
from oracles import kron_oracle


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_hermitian(rng, n):
    m = random_complex(rng, (n, n))
    return (m + m.conj().T) / 2


def random_density(rng, n):
    m = random_complex(rng, (n, n))
    rho = m @ m.conj().T
    return rho / np.trace(rho)


class TestKron:
    def test_identity(self):
        assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_sigma_z_with_identity(self):
        sz = np.diag([1.0, -1.0])
        assert np.array_equal(kron(sz, np.eye(2)), np.diag([1.0, 1.0, -1.0, -1.0]))

    def test_matches_index_formula(self):
        rng = np.random.default_rng(1)
        a = random_complex(rng, (2, 2))
        b = random_complex(rng, (2, 2))
        assert np.abs(kron(a, b) - kron_oracle(a, b)).max() <= 1e-12

    def test_associativity(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            a, b, c = (random_complex(rng, (2, 2)) for _ in range(3))
            lhs = kron(kron(a, b), c)
            rhs = kron(a, kron(b, c))
            assert np.abs(lhs - rhs).max() <= 1e-12


class TestPartialTrace:
    def test_product_state(self):
        rng = np.random.default_rng(3)
        rho_a = random_density(rng, 2)
        rho_b = random_density(rng, 10)
        out = partial_trace(kron(rho_a, rho_b), [2, 10], keep=0)
        assert np.abs(out - rho_a).max() <= 1e-12

    def test_maximally_entangled(self):
        psi = np.zeros(4, dtype=complex)
        psi[0] = psi[3] = 1 / np.sqrt(2)
        out = partial_trace(np.outer(psi, psi.conj()), [2, 2], keep=0)
        assert np.abs(out - np.eye(2) / 2).max() <= 1e-12

    def test_trace_preserved(self):
        rng = np.random.default_rng(4)
        rho = random_density(rng, 4 * 7)
        out = partial_trace(rho, [2, 14], keep=1)
        assert abs(np.trace(out) - 1.0) <= 1e-12

    def test_kron_contraction_identity(self):
        rng = np.random.default_rng(5)
        a = random_complex(rng, (3, 3))
        b = random_complex(rng, (4, 4))
        out = partial_trace(kron(a, b), [3, 4], keep=0)
        assert np.abs(out - a * np.trace(b)).max() <= 1e-12

    def test_three_factor(self):
        rng = np.random.default_rng(6)
        a, b, c = (random_density(rng, d) for d in (2, 3, 2))
        out = partial_trace(kron(kron(a, b), c), [2, 3, 2], keep=1)
        assert np.abs(out - b).max() <= 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            partial_trace(np.eye(6), [2, 2], keep=0)


class TestEigHermitian:
    def test_diagonal(self):
        w, v = eig_hermitian(np.diag([1.0, 2.0, 3.0]))
        assert np.allclose(w, [1, 2, 3])
        assert np.abs(np.abs(v) - np.eye(3)).max() <= 1e-12

    def test_sigma_x(self):
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        w, _ = eig_hermitian(sx)
        assert np.allclose(w, [-1.0, 1.0])

    def test_reconstruction_dim_240(self):
        rng = np.random.default_rng(7)
        m = random_hermitian(rng, 240)
        w, v = eig_hermitian(m)
        assert np.all(np.diff(w) >= 0)
        assert np.abs(v @ v.conj().T - np.eye(240)).max() <= 1e-10
        assert np.abs((v * w) @ v.conj().T - m).max() <= RECONSTRUCTION_TOL

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            eig_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))


class TestSingularValues:
    def test_identity(self):
        assert np.allclose(singular_values(np.eye(16)), np.ones(16))

    def test_zero(self):
        assert np.allclose(singular_values(np.zeros((5, 5))), 0.0)

    def test_matches_eig_oracle(self):
        rng = np.random.default_rng(8)
        m = random_complex(rng, (9, 9))
        sv = singular_values(m)
        oracle = np.sqrt(np.sort(np.linalg.eigvalsh(m.conj().T @ m))[::-1])
        assert np.all(np.diff(sv) <= 1e-12)
        assert np.abs(sv - oracle).max() <= 1e-10


class TestPredicates:
    def test_structural(self):
        rng = np.random.default_rng(9)
        h = random_hermitian(rng, 5)
        assert is_hermitian(h, STRUCTURAL_TOL)
        assert not is_hermitian(h + 1e-6 * 1j * np.eye(5))
        _, v = eig_hermitian(h)
        assert is_unitary(v)
        assert is_density(random_density(rng, 6))
        assert not is_density(2 * random_density(rng, 6))
        assert not is_density(np.diag([1.5, -0.5]).astype(complex))
