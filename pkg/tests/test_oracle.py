import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strongpert.core import expi_action, expi_matrix
from strongpert.errors import NotHermitianError
from strongpert.models import TwoLevelParams, two_level_scenario
from strongpert.oracle import evolve_exact, rabi_closed_form

from conftest import constant, random_hermitian, random_state

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def driven(t):
    return SZ + 0.7 * math.cos(1.3 * t) * SX + 0.2 * math.sin(t) * np.array([[0, -1j], [1j, 0]])


class TestClosedForm:
    def test_uncoupled(self):
        u = rabi_closed_form(0.3, -0.5, 0.0, 2.0)
        np.testing.assert_allclose(u, np.diag(np.exp(-1j * np.array([0.3, -0.5]) * 2.0)), atol=1e-15)

    def test_half_period(self):
        np.testing.assert_allclose(rabi_closed_form(0, 0, 1, math.pi), -np.eye(2), atol=1e-15)

    @given(
        st.floats(-3, 3),
        st.floats(-3, 3),
        st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
        st.floats(0, 20),
        st.floats(0.2, 3),
    )
    @settings(max_examples=200, deadline=None)
    def test_matches_matrix_exponential(self, e1, e2, v12, t, hbar):
        h = np.array([[e1, v12], [np.conj(v12), e2]])
        assert np.max(np.abs(rabi_closed_form(e1, e2, v12, t, hbar) - expi_matrix(h, t, hbar))) < 1e-12


class TestEvolution:
    def test_constant_hamiltonian(self, rng):
        h = random_hermitian(rng, 5)
        psi0 = random_state(rng, 5)
        grid = np.linspace(0, 3, 31)
        tr = evolve_exact(constant(h), psi0, grid)
        for k in (0, 10, 30):
            assert np.max(np.abs(tr.states[k] - expi_action(h, grid[k], psi0))) < 1e-11

    def test_two_level_rabi(self):
        p = TwoLevelParams(0.1, 0.2, 1.0, 1.0)
        grid = np.linspace(0, 10, 10_001)
        tr = evolve_exact(constant(p.h0_matrix() + p.v_matrix()), [1, 0], grid, estimate_error=False)
        for k in range(0, 10_001, 1000):
            exact = rabi_closed_form(0.1, 0.2, 1.0, grid[k]) @ np.array([1, 0])
            assert np.max(np.abs(tr.states[k] - exact)) < 1e-9

    def test_second_order_convergence(self):
        grid = np.linspace(0, 5, 51)
        ends = [evolve_exact(driven, [1, 0], grid, s, estimate_error=False).states[-1] for s in (4, 8, 16)]
        ratio = np.linalg.norm(ends[0] - ends[1]) / np.linalg.norm(ends[1] - ends[2])
        assert 3.0 < ratio < 5.0

    def test_error_estimate(self):
        grid = np.linspace(0, 5, 51)
        tr = evolve_exact(driven, [1, 0], grid, 4)
        ref = evolve_exact(driven, [1, 0], grid, 64, estimate_error=False)
        true_err = np.linalg.norm(tr.states - ref.states, axis=1)
        # the step-doubling difference is 3/4 of the true error for a second-order scheme
        assert np.all(tr.estimated_error <= true_err * 1.1 + 1e-15)
        assert tr.estimated_error[-1] > 0.5 * true_err[-1]

    def test_norm_drift(self):
        grid = np.linspace(0, 100, 100_001)
        tr = evolve_exact(driven, [0.6, 0.8j], grid, estimate_error=False)
        assert np.max(np.abs(np.linalg.norm(tr.states, axis=1) - 1.0)) < 1e-9
        np.testing.assert_allclose(tr.probabilities().sum(axis=1), 1.0, atol=1e-9)

    def test_hbar(self):
        grid = np.linspace(0, 2, 201)
        a = evolve_exact(lambda s: 4 * driven(2 * s), [1, 0], grid / 2, hbar=2.0, estimate_error=False)
        b = evolve_exact(driven, [1, 0], grid, estimate_error=False)
        # i hbar d/ds psi = hbar c H(c s) psi with t = c s is the same equation
        assert np.max(np.abs(a.states - b.states)) < 1e-12

    def test_non_hermitian(self):
        bad = lambda t: driven(t) + (0.1j * SX if t > 1 else 0)
        with pytest.raises(NotHermitianError, match=r"t=1\.1"):
            evolve_exact(bad, [1, 0], np.linspace(0, 2, 11))

    def test_bad_substeps(self):
        with pytest.raises(ValueError):
            evolve_exact(driven, [1, 0], np.linspace(0, 1, 11), 0)


def leading_order_deviation(eps):
    p = TwoLevelParams(eps / 2, eps, 1.0, 1.0)
    sc = two_level_scenario(p, 5.0, 1001, initial="e1")
    path = sc.leading_order()
    lead = np.einsum("kab,b->ka", np.stack([path.propagator(k) for k in range(path.grid.size)]), sc.psi0)
    tr = evolve_exact(sc.hamiltonian, sc.psi0, sc.grid, 2, estimate_error=False)
    return np.max(np.linalg.norm(tr.states - lead, axis=1))


def test_deviation_from_leading_order_is_linear_in_epsilon():
    eps = np.array([0.2, 0.1, 0.05, 0.025])
    dev = np.array([leading_order_deviation(e) for e in eps])
    slope = np.polyfit(np.log(eps), np.log(dev), 1)[0]
    assert abs(slope - 1.0) < 0.1
