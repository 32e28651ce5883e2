import numpy as np
import pytest

from diracsim import (
    Observable,
    PureState,
    random_density,
    random_pure_state,
    reconstruct_pure_state,
    row_sum_check,
    validate_density,
    weak_value,
    weak_value_decomposed,
)
from diracsim.errors import DegenerateInputError, UndefinedWeakValueError
from diracsim.weak import projector_weak_values


def random_hermitian(n, rng):
    h = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return Observable((h + h.conj().T) / 2)


class TestWeakValue:
    def test_identity_observable_gives_one(self):
        rng = np.random.default_rng(0)
        for n in (2, 3, 5):
            rho = random_density(n, n, seed=n)
            c = random_pure_state(n, seed=n + 50)
            val = weak_value(Observable.identity(n), rho, c)
            assert val == pytest.approx(1.0, abs=1e-12)

    def test_projector_on_phase_state(self, qubit_state):
        """<c|pi_1|psi>/<c|psi> = (i/2)/((1+i)/2) = (1+i)/2."""
        post = PureState(np.array([1.0, 1.0]) / np.sqrt(2))
        val = weak_value(Observable.standard_projector(2, 1), qubit_state.density(), post)
        assert val == pytest.approx((1 + 1j) / 2, abs=1e-12)

    def test_sign_observable_outside_spectrum_not_needed_here(self):
        """diag(1, -1) on (|0>+|1>)/sqrt2 post-selected on |1> gives -1."""
        psi = PureState(np.array([1.0, 1.0]) / np.sqrt(2))
        post = PureState(np.array([0.0, 1.0]))
        val = weak_value(Observable(np.diag([1.0, -1.0])), psi.density(), post)
        assert val == pytest.approx(-1.0, abs=1e-12)

    def test_vanishing_post_selection_raises(self):
        rho = PureState(np.array([1.0, 0.0])).density()
        post = PureState(np.array([0.0, 1.0]))
        with pytest.raises(UndefinedWeakValueError):
            weak_value(Observable.identity(2), rho, post)


class TestSpectralDecompositionRoute:
    def test_pure_state_reduces_to_closed_form(self):
        rng = np.random.default_rng(1)
        for seed in range(5):
            psi = random_pure_state(3, seed=seed)
            c = random_pure_state(3, seed=seed + 100)
            a = random_hermitian(3, rng)
            assert weak_value_decomposed(a, psi.density(), c) == pytest.approx(
                weak_value(a, psi.density(), c), abs=1e-12
            )

    def test_maximally_mixed_gives_plain_expectation(self):
        rng = np.random.default_rng(2)
        rho = validate_density(np.eye(2) / 2)
        c = random_pure_state(2, seed=8)
        a = random_hermitian(2, rng)
        val = weak_value_decomposed(a, rho, c)
        plain = complex(c.amplitudes.conj() @ a.matrix @ c.amplitudes)
        assert val == pytest.approx(plain, abs=1e-12)

    def test_agrees_with_closed_form_on_random_triples(self):
        rng = np.random.default_rng(3)
        for n in (2, 3, 4, 8):
            for seed in range(12):
                rho = random_density(n, 1 + seed % n, seed=seed)
                c = random_pure_state(n, seed=seed + 17)
                a = random_hermitian(n, rng)
                lhs = weak_value_decomposed(a, rho, c)
                rhs = weak_value(a, rho, c)
                assert abs(lhs - rhs) < 1e-10


class TestPureStateReconstruction:
    def test_uniform_weak_values_give_the_post_selection_state(self):
        n = 4
        psi = reconstruct_pure_state(np.full(n, 1.0 / n), b0_index=0)
        np.testing.assert_allclose(psi.amplitudes, np.full(n, 1 / np.sqrt(n)), atol=1e-12)

    def test_phase_state_recovered_with_convention(self):
        psi = reconstruct_pure_state([(1 - 1j) / 2, (1 + 1j) / 2], b0_index=0)
        np.testing.assert_allclose(
            psi.amplitudes, np.array([1.0, 1.0j]) / np.sqrt(2), atol=1e-12
        )

    def test_basis_state_recovered(self):
        psi = reconstruct_pure_state([1.0, 0.0], b0_index=0)
        np.testing.assert_allclose(psi.amplitudes, [1.0, 0.0], atol=1e-12)

    def test_roundtrip_from_analytic_weak_values_any_b0(self):
        for n in (2, 3, 5, 16):
            for seed in range(6):
                target = random_pure_state(n, seed=seed)
                b0 = seed % n
                wv = projector_weak_values(target.density(), b0)
                rebuilt = reconstruct_pure_state(wv, b0)
                fidelity = abs(np.vdot(rebuilt.amplitudes, target.amplitudes)) ** 2
                assert fidelity >= 1 - 1e-10

    def test_all_zero_vector_rejected(self):
        with pytest.raises(DegenerateInputError):
            reconstruct_pure_state(np.zeros(3), b0_index=0)


class TestRowSums:
    def test_maximally_mixed(self):
        rho = validate_density(np.eye(2) / 2)
        wv = row_sum_check(rho, b0_index=0)
        np.testing.assert_allclose(wv, [0.5, 0.5], atol=1e-12)

    def test_phase_state_matches_reconstruction_input(self, qubit_state):
        wv = row_sum_check(qubit_state.density(), b0_index=0)
        np.testing.assert_allclose(wv, [(1 - 1j) / 2, (1 + 1j) / 2], atol=1e-12)

    def test_classical_mixture(self):
        rho = validate_density(np.diag([0.75, 0.25]))
        wv = row_sum_check(rho, b0_index=0)
        np.testing.assert_allclose(wv, [0.75, 0.25], atol=1e-12)

    def test_cross_check_holds_for_every_fourier_post_selection(self):
        for n in (2, 3, 4, 8):
            rho = random_density(n, n, seed=n + 5)
            for b0 in range(n):
                row_sum_check(rho, b0)  # raises InternalCheckError on mismatch

    def test_distinct_densities_with_equal_row_sums_are_indistinguishable(self):
        """A Hermitian zero-row-sum perturbation is invisible to the scan.

        K = i * antisymmetric([[0,1,-1],[-1,0,1],[1,-1,0]]) has zero row sums
        and spectrum {0, +sqrt(3), -sqrt(3)}, so I/3 + eps K stays a valid
        density for eps <= 1/(3 sqrt(3)) while differing from I/3.
        """
        k = 1j * np.array([[0.0, 1.0, -1.0], [-1.0, 0.0, 1.0], [1.0, -1.0, 0.0]])
        eps = 0.1
        rho_a = validate_density(np.eye(3) / 3)
        rho_b = validate_density(np.eye(3) / 3 + eps * k)
        assert np.max(np.abs(rho_a.matrix - rho_b.matrix)) > 0.05
        wv_a = row_sum_check(rho_a, b0_index=0)
        wv_b = row_sum_check(rho_b, b0_index=0)
        assert np.max(np.abs(wv_a - wv_b)) < 1e-12

    def test_zero_probability_post_selection_raises(self):
        # Fourier vector b=1 is orthogonal to the uniform superposition
        psi = PureState(np.full(2, 1 / np.sqrt(2)))
        with pytest.raises(UndefinedWeakValueError):
            row_sum_check(psi.density(), b0_index=1)
