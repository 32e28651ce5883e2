import numpy as np
import pytest

from diracsim import (
    BasisSet,
    DensityOperator,
    Observable,
    PureState,
    distance_report,
    fourier_basis,
    purity,
    random_density,
    random_pure_state,
    trace_distance,
    validate_density,
)
from diracsim.errors import (
    DimensionMismatchError,
    InvalidDimensionError,
    NotHermitianError,
    NotNormalizedError,
    NotPositiveError,
    TraceNotOneError,
)


class TestFourierBasis:
    def test_one_dimensional_basis_is_trivial(self):
        basis = fourier_basis(1)
        assert basis.vectors.shape == (1, 1)
        assert basis.vector(0)[0] == pytest.approx(1.0)

    def test_qubit_vectors(self):
        """exp(i pi a b) gives (1, 1)/sqrt2 and (1, -1)/sqrt2."""
        basis = fourier_basis(2)
        np.testing.assert_allclose(basis.vector(0), np.array([1, 1]) / np.sqrt(2), atol=1e-15)
        np.testing.assert_allclose(basis.vector(1), np.array([1, -1]) / np.sqrt(2), atol=1e-15)

    def test_dim4_component(self):
        """Component a=2 of vector b=1 is exp(i pi)/2 = -1/2."""
        basis = fourier_basis(4)
        assert basis.vectors[2, 1] == pytest.approx(-0.5, abs=1e-15)

    def test_unitary_for_all_dims_up_to_64(self):
        for n in range(1, 65):
            m = fourier_basis(n).vectors
            np.testing.assert_allclose(m.conj().T @ m, np.eye(n), atol=1e-12)

    def test_mutually_unbiased_against_standard(self):
        for n in (2, 3, 5, 8, 16, 31):
            m = fourier_basis(n).vectors
            np.testing.assert_allclose(np.abs(m) ** 2, np.full((n, n), 1.0 / n), atol=1e-12)

    def test_zero_dimension_rejected(self):
        with pytest.raises(InvalidDimensionError):
            fourier_basis(0)

    def test_basis_set_rejects_non_orthonormal(self):
        with pytest.raises(NotNormalizedError):
            BasisSet(np.array([[1.0, 0.9], [0.0, 1.0]]), "standard")


class TestValidateDensity:
    def test_maximally_mixed_accepted(self):
        for n in (1, 2, 5):
            rho = validate_density(np.eye(n) / n)
            assert rho.dim == n

    def test_indefinite_matrix_rejected(self):
        """[[0.5, 0.6], [0.6, 0.5]] has eigenvalues 1.1 and -0.1."""
        with pytest.raises(NotPositiveError):
            validate_density([[0.5, 0.6], [0.6, 0.5]])

    def test_wrong_trace_rejected(self):
        with pytest.raises(TraceNotOneError):
            validate_density([[1.0, 0.0], [0.0, 0.1]])

    def test_non_hermitian_rejected(self):
        with pytest.raises(NotHermitianError):
            validate_density([[0.5, 0.3], [0.0, 0.5]])

    def test_non_square_rejected(self):
        with pytest.raises(InvalidDimensionError):
            validate_density(np.ones((2, 3)))


class TestRandomStates:
    def test_rank_one_draw_is_pure(self):
        rho = random_density(3, rank=1, seed=11)
        assert purity(rho) == pytest.approx(1.0, abs=1e-10)

    def test_full_rank_draw_is_mixed(self):
        rho = random_density(2, rank=2, seed=11)
        assert purity(rho) < 1.0

    def test_same_seed_bitwise_identical(self):
        a = random_density(4, rank=2, seed=99)
        b = random_density(4, rank=2, seed=99)
        assert np.array_equal(a.matrix, b.matrix)

    def test_every_draw_passes_validation(self):
        for n in (2, 3, 5, 8):
            for rank in (1, n // 2 + 1, n):
                rho = random_density(n, rank, seed=7 * n + rank)
                validate_density(rho.matrix)

    def test_requested_rank_achieved(self):
        for n in (3, 5, 8):
            for rank in (1, 2, n):
                rho = random_density(n, rank, seed=13 * n + rank)
                achieved = int(np.sum(np.linalg.eigvalsh(rho.matrix) > 1e-10))
                assert achieved == rank

    def test_rank_out_of_range(self):
        with pytest.raises(ValueError):
            random_density(3, rank=0, seed=1)
        with pytest.raises(ValueError):
            random_density(3, rank=4, seed=1)

    def test_random_pure_state_normalized_and_seeded(self):
        psi = random_pure_state(5, seed=3)
        assert np.sum(np.abs(psi.amplitudes) ** 2) == pytest.approx(1.0, abs=1e-12)
        assert np.array_equal(psi.amplitudes, random_pure_state(5, seed=3).amplitudes)


class TestPurity:
    def test_maximally_mixed(self):
        for n in (2, 3, 7):
            assert purity(validate_density(np.eye(n) / n)) == pytest.approx(1.0 / n, abs=1e-12)

    def test_rank_one_projector(self):
        psi = random_pure_state(4, seed=5)
        assert purity(psi.density()) == pytest.approx(1.0, abs=1e-12)

    def test_classical_mixture(self):
        rho = validate_density(np.diag([0.75, 0.25]))
        assert purity(rho) == pytest.approx(0.625, abs=1e-15)

    def test_bounds_over_random_ensemble(self):
        for n in (2, 4, 8):
            for seed in range(10):
                rho = random_density(n, rank=min(n, 1 + seed % n), seed=seed)
                mu = purity(rho)
                assert 1.0 / n - 1e-12 <= mu <= 1.0 + 1e-12


class TestDistanceReport:
    def test_self_distance_zero(self):
        rho = random_density(3, 2, seed=0)
        rep = distance_report(rho, rho)
        assert rep.trace_distance == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_pure_states(self):
        zero = PureState(np.array([1.0, 0.0])).density()
        one = PureState(np.array([0.0, 1.0])).density()
        rep = distance_report(zero, one)
        assert rep.trace_distance == pytest.approx(1.0, abs=1e-12)
        assert rep.pure_target_fidelity == pytest.approx(0.0, abs=1e-12)

    def test_mixed_against_pure_target(self):
        mixed = validate_density(np.eye(2) / 2)
        target = PureState(np.array([1.0, 0.0])).density()
        rep = distance_report(mixed, target)
        assert rep.trace_distance == pytest.approx(0.5, abs=1e-12)
        assert rep.pure_target_fidelity == pytest.approx(0.5, abs=1e-12)

    def test_no_fidelity_for_mixed_target(self):
        rep = distance_report(random_density(2, 1, seed=1), validate_density(np.eye(2) / 2))
        assert rep.pure_target_fidelity is None

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            distance_report(random_density(2, 1, seed=1), random_density(3, 1, seed=1))

    def test_trace_distance_symmetry(self):
        a = random_density(4, 3, seed=2)
        b = random_density(4, 2, seed=3)
        assert trace_distance(a.matrix, b.matrix) == pytest.approx(
            trace_distance(b.matrix, a.matrix), abs=1e-14
        )


class TestTypes:
    def test_pure_state_requires_unit_norm(self):
        with pytest.raises(NotNormalizedError):
            PureState(np.array([1.0, 1.0]))

    def test_pure_state_is_immutable(self):
        psi = random_pure_state(3, seed=0)
        with pytest.raises(ValueError):
            psi.amplitudes[0] = 0.0

    def test_observable_hermitian_flag_checked(self):
        with pytest.raises(NotHermitianError):
            Observable(np.array([[0.0, 1.0], [0.0, 0.0]]), hermitian=True)

    def test_non_hermitian_product_storable_and_normality_checkable(self):
        product = np.array([[0.0, 1.0], [0.0, 0.0]])
        obs = Observable(product, hermitian=False)
        assert not obs.is_normal()
        unitary = Observable(fourier_basis(2).vectors, hermitian=False)
        assert unitary.is_normal()

    def test_density_operator_exposes_eig(self):
        rho = DensityOperator(np.diag([0.25, 0.75]))
        evals, _ = rho.eig()
        np.testing.assert_allclose(evals, [0.25, 0.75], atol=1e-14)
