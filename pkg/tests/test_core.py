import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strongpert.core import (
    bessel_j,
    bessel_j_symmetric,
    bessel_j_table,
    check_hermitian,
    degenerate_pairs,
    expi_action,
    hermitian_eigendecompose,
)
from strongpert.errors import NotHermitianError

from conftest import random_hermitian, random_state


def bessel_series(n, z, dps=60):
    """Ascending series sum_k (-1)^k (z/2)^(2k+n) / (k! (k+n)!) at high precision."""
    with mpmath.workdps(dps):
        z = mpmath.mpf(z)
        total = mpmath.mpf(0)
        k = 0
        while True:
            term = (-1) ** k * (z / 2) ** (2 * k + n) / (mpmath.factorial(k) * mpmath.factorial(k + n))
            total += term
            if k > 5 and abs(term) < mpmath.mpf(10) ** (-dps + 5):
                break
            k += 1
        return float(total)


class TestEigendecompose:
    def test_pauli_x(self):
        es = hermitian_eigendecompose([[0, 1], [1, 0]])
        np.testing.assert_allclose(es.eigenvalues, [-1.0, 1.0], atol=1e-15)

    @pytest.mark.parametrize("d", [1, 3, 7])
    def test_identity(self, d):
        es = hermitian_eigendecompose(np.eye(d))
        np.testing.assert_allclose(es.eigenvalues, np.ones(d))
        q = es.eigenvectors
        assert np.max(np.abs(q.conj().T @ q - np.eye(d))) < 1e-12
        assert es.is_degenerate == (d > 1)

    def test_random_reconstruction(self, rng):
        m = random_hermitian(rng, 6)
        es = hermitian_eigendecompose(m)
        assert np.max(np.abs(es.reconstruct() - m)) < 1e-10
        q = es.eigenvectors
        assert np.max(np.abs(m @ q - q * es.eigenvalues)) < 1e-10
        assert np.all(np.diff(es.eigenvalues) >= 0)

    @pytest.mark.parametrize("d", [2, 4, 8, 32])
    def test_invariants_many(self, rng, d):
        for _ in range(20):
            m = random_hermitian(rng, d)
            es = hermitian_eigendecompose(m)
            q = es.eigenvectors
            assert np.max(np.abs(es.reconstruct() - m)) < 1e-10
            assert np.max(np.abs(q.conj().T @ q - np.eye(d))) < 1e-10

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitianError, match="not Hermitian"):
            hermitian_eigendecompose([[0, 1], [0, 0]], name="V")
        with pytest.raises(NotHermitianError):
            check_hermitian(np.ones((2, 3)))

    def test_degeneracy_threshold(self):
        assert degenerate_pairs([0.0, 1.0, 1.0 + 1e-12]) == [1]
        assert degenerate_pairs([0.0, 1.0, 1.0 + 1e-6]) == []


class TestExpiAction:
    def test_zero_hamiltonian(self, rng):
        psi = random_state(rng, 3)
        np.testing.assert_allclose(expi_action(np.zeros((3, 3)), 2.3, psi), psi, atol=1e-15)

    def test_pauli_x_quarter_period(self):
        # exp(-i sigma_x pi/2) = -i sigma_x
        out = expi_action([[0, 1], [1, 0]], math.pi / 2, [1, 0], hbar=1.0)
        np.testing.assert_allclose(out, [0, -1j], atol=1e-15)

    def test_hbar_scaling(self, rng):
        h = random_hermitian(rng, 4)
        psi = random_state(rng, 4)
        np.testing.assert_allclose(expi_action(h, 2.0, psi, hbar=2.0), expi_action(h, 1.0, psi), atol=1e-13)

    @pytest.mark.parametrize("d", [2, 4, 8, 32])
    def test_unitary(self, rng, d):
        for _ in range(100):
            h = random_hermitian(rng, d)
            psi = rng.normal(size=d) + 1j * rng.normal(size=d)
            out = expi_action(h, rng.uniform(-5, 5), psi)
            assert abs(np.linalg.norm(out) - np.linalg.norm(psi)) < 1e-12 * np.linalg.norm(psi)

    def test_non_finite_dt(self):
        with pytest.raises(ValueError, match="finite"):
            expi_action(np.eye(2), float("nan"), [1, 0])


class TestBessel:
    def test_zero(self):
        assert bessel_j(0, 0.0) == 1.0
        assert bessel_j(3, 0.0) == 0.0

    def test_order_one_at_one(self):
        expected = bessel_series(1, 1.0)
        assert abs(expected - 0.4400505857449335) < 1e-15
        assert abs(bessel_j(1, 1.0) - expected) < 1e-15

    @pytest.mark.parametrize("n", [0, 1, 2, 5, 10, 25])
    @pytest.mark.parametrize("z", [0.1, 0.5, 1.0, 2.0, 5.0, 12.0])
    def test_against_series(self, n, z):
        assert abs(bessel_j(n, z) - bessel_series(n, z)) < 1e-14

    def test_large_argument_against_mpmath(self):
        for n, z in [(0, 30.0), (7, 45.5), (60, 50.0), (3, 150.0)]:
            assert abs(bessel_j(n, z) - float(mpmath.besselj(n, z))) < 1e-13

    def test_large_order_underflows_cleanly(self):
        assert bessel_j(10_000, 1.0) == 0.0
        assert bessel_j(-10_000, 3.0) == 0.0
        with pytest.raises(ValueError):
            bessel_j(10_001, 1.0)

    @given(st.integers(-40, 40), st.floats(-30, 30))
    @settings(max_examples=200, deadline=None)
    def test_negative_order_symmetry(self, m, z):
        assert abs(bessel_j(-m, z) - (-1) ** m * bessel_j(m, z)) < 1e-12

    def test_completeness_at_two(self):
        s = sum(bessel_j(m, 2.0) ** 2 for m in range(-40, 41))
        assert abs(s - 1.0) < 1e-12

    @pytest.mark.parametrize("z", [0.1, 0.5, 1.0, 2.0, 5.0])
    def test_sum_identities(self, z):
        m = np.arange(-60, 61)
        j2 = bessel_j_symmetric(60, z) ** 2
        assert abs(j2.sum() - 1.0) < 1e-10
        assert abs((m * j2).sum()) < 1e-10
        assert abs((m**2 * j2).sum() - z**2 / 2) < 1e-8

    def test_table_consistent_with_scalar(self):
        tab = bessel_j_table(12, 3.3)
        for n in range(13):
            assert tab[n] == pytest.approx(bessel_j(n, 3.3), abs=1e-16)

    def test_negative_argument(self):
        assert bessel_j(3, -2.0) == pytest.approx(-bessel_j(3, 2.0), abs=1e-16)

    @pytest.mark.parametrize("z", [1e-300, 1e-90, 1e-9, 9.99e-7, 1.01e-6, 1e-3])
    def test_tiny_argument(self, z):
        for n in (0, 1, 2, 7):
            ref = bessel_series(n, z)
            assert abs(bessel_j(n, z) - ref) <= 1e-15 * max(abs(ref), 1e-300)
