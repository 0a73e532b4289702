"""Unit tests for the dense density-matrix oracle."""

import numpy as np
import pytest

from entstruct.core.config import get_settings
from entstruct.core.exceptions import DomainError, NumericIntegrityError, OracleScaleError
from entstruct.physics import qcore
from entstruct.physics.qcore import (
    SIGMA_X,
    DenseState,
    dense_compose,
    dense_observables,
    dense_seed_state,
    expectation,
    kron,
    witness_operator,
)
from entstruct.physics.seeds import SeedParams, witness_value


def _random_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


class TestKron:
    """Tests for the Kronecker product."""

    def test_identity(self):
        """I_2 (x) I_2 is I_4."""
        assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_associative_on_integer_entries(self, rng):
        """Grouping does not change integer-valued products."""
        a, b, c = (rng.integers(-3, 4, size=(2, 2)) for _ in range(3))

        assert np.array_equal(kron(kron(a, b), c), kron(a, kron(b, c)))


class TestDenseSeedState:
    """Tests for seed-state construction."""

    def test_pure_single_qubit_seed_is_plus_state(self):
        """A one-qubit GHZ seed without noise is |+><+|."""
        state = dense_seed_state(1, SeedParams(0.0, 0.0))

        assert np.allclose(state.matrix, np.full((2, 2), 0.5), atol=1e-12)

    def test_fully_mixed_seed(self):
        """beta = 1 gives the maximally mixed state."""
        state = dense_seed_state(2, SeedParams(0.0, 1.0))

        assert np.allclose(state.matrix, np.eye(4) / 4, atol=1e-12)

    def test_noisy_seed_is_a_density_matrix(self):
        """Trace one, Hermitian and positive semidefinite."""
        state = dense_seed_state(2, SeedParams(0.3, 0.2))

        assert abs(np.trace(state.matrix) - 1.0) <= 1e-12
        assert np.max(np.abs(state.matrix - state.matrix.conj().T)) <= 1e-12
        assert np.min(np.linalg.eigvalsh(state.matrix)) >= -1e-12

    def test_invalid_weights_rejected(self):
        """alpha + beta > 1 is outside the convex mixture."""
        with pytest.raises(DomainError) as exc_info:
            SeedParams(0.7, 0.5)

        assert exc_info.value.code == "INVALID_SEED_PARAMS"

    def test_empty_block_rejected(self):
        """A seed needs at least one qubit."""
        with pytest.raises(DomainError):
            dense_seed_state(0, SeedParams(0.0, 0.0))

    def test_matrix_is_read_only(self):
        """States are immutable once built."""
        state = dense_seed_state(1, SeedParams(0.1, 0.1))

        with pytest.raises(ValueError):
            state.matrix[0, 0] = 1.0


class TestDenseState:
    """Tests for DenseState validation."""

    def test_wrong_trace_rejected(self):
        """Unnormalized matrices fail construction."""
        with pytest.raises(NumericIntegrityError):
            DenseState(1, np.eye(2, dtype=np.complex128))

    def test_dimension_mismatch_rejected(self):
        """Matrix size must be 2^n."""
        with pytest.raises(DomainError):
            DenseState(2, np.eye(2, dtype=np.complex128) / 2)


class TestDenseCompose:
    """Tests for tensor composition."""

    def test_single_block_unchanged(self):
        """Composing one block returns the same matrix."""
        block = dense_seed_state(2, SeedParams(0.3, 0.2))

        composed = dense_compose([block])

        assert composed.qubit_count == 2
        assert np.array_equal(composed.matrix, block.matrix)

    def test_two_pure_blocks_are_rank_one(self):
        """|+> (x) |+> stays pure."""
        plus = dense_seed_state(1, SeedParams(0.0, 0.0))

        composed = dense_compose([plus, plus])

        assert composed.qubit_count == 2
        assert np.linalg.matrix_rank(composed.matrix, tol=1e-10) == 1

    def test_composition_keeps_invariants(self):
        """Trace and Hermiticity survive composition."""
        blocks = [dense_seed_state(size, SeedParams(0.1, 0.2)) for size in (1, 2, 3)]

        composed = dense_compose(blocks)

        assert composed.qubit_count == 6
        assert abs(np.trace(composed.matrix) - 1.0) <= 1e-12

    def test_cap_exceeded(self, monkeypatch):
        """The oracle refuses states beyond the configured cap."""
        blocks = [dense_seed_state(2, SeedParams(0.0, 0.0))] * 2
        monkeypatch.setenv("ENTSTRUCT_ORACLE_CAP", "3")
        get_settings.cache_clear()

        with pytest.raises(OracleScaleError) as exc_info:
            dense_compose(blocks)

        assert exc_info.value.code == "ORACLE_CAP_EXCEEDED"
        assert exc_info.value.context == {"requested": 4, "cap": 3}

    def test_empty_list_rejected(self):
        with pytest.raises(DomainError):
            dense_compose([])


class TestExpectation:
    """Tests for Tr[op rho]."""

    def test_identity_gives_trace(self):
        """<I> = 1 for any state."""
        state = dense_seed_state(3, SeedParams(0.2, 0.3))

        assert expectation(np.eye(8), state) == pytest.approx(1.0, abs=1e-12)

    def test_sigma_x_on_plus_state(self):
        """<+|X|+> = 1."""
        plus = dense_seed_state(1, SeedParams(0.0, 0.0))

        assert expectation(SIGMA_X, plus) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    @pytest.mark.parametrize("alpha,beta", [(0.0, 0.0), (0.2, 0.2), (0.5, 0.1), (0.0, 0.6)])
    def test_witness_expectation_matches_closed_form(self, n, alpha, beta):
        """Tr[W_G rho] equals witness_value."""
        state = dense_seed_state(n, SeedParams(alpha, beta))

        value = expectation(witness_operator(n), state)

        assert value == pytest.approx(witness_value(n, alpha, beta), abs=1e-10)

    def test_linear_in_both_arguments(self, rng):
        """Tr[(aA + bB) rho] and Tr[A (a rho1 + b rho2)] split linearly."""
        op_a, op_b = (_random_density(4, rng) for _ in range(2))
        rho_1 = DenseState(2, _random_density(4, rng))
        rho_2 = DenseState(2, _random_density(4, rng))
        a, b = 0.3, 0.7

        mixed_op = expectation(a * op_a + b * op_b, rho_1)
        mixed_state = expectation(op_a, DenseState(2, a * rho_1.matrix + b * rho_2.matrix))

        assert mixed_op == pytest.approx(
            a * expectation(op_a, rho_1) + b * expectation(op_b, rho_1), abs=1e-10
        )
        assert mixed_state == pytest.approx(
            a * expectation(op_a, rho_1) + b * expectation(op_a, rho_2), abs=1e-10
        )

    def test_non_hermitian_operator_rejected(self):
        """An operator with complex expectation is refused."""
        state = dense_seed_state(1, SeedParams(0.0, 0.0))
        op = np.array([[0, 1j], [0, 0]])

        with pytest.raises(NumericIntegrityError):
            expectation(op, state)

    def test_dimension_mismatch(self):
        state = dense_seed_state(1, SeedParams(0.0, 0.0))

        with pytest.raises(DomainError) as exc_info:
            expectation(np.eye(4), state)

        assert exc_info.value.code == "DIMENSION_MISMATCH"


class TestDenseObservables:
    """Tests for the four witness observables."""

    def test_single_qubit_mz_is_identity(self):
        """|0><0| + |1><1| = I."""
        mz, _, _, _ = dense_observables(1)

        assert np.allclose(mz, np.eye(2))

    def test_two_qubit_mx_is_antidiagonal(self):
        """X (x) X has ones exactly on the anti-diagonal."""
        _, mx, _, _ = dense_observables(2)

        assert np.array_equal(mx, np.fliplr(np.eye(4)))

    @pytest.mark.parametrize("n", range(2, 9))
    def test_observables_hermitian_and_bounded(self, n):
        """All four are Hermitian with entries of magnitude at most one."""
        for op in dense_observables(n):
            assert np.allclose(op, op.conj().T, atol=1e-12)
            assert np.max(np.abs(op)) <= 1.0 + 1e-12

    def test_observables_are_read_only(self):
        mz, _, _, _ = dense_observables(2)

        with pytest.raises(ValueError):
            mz[0, 0] = 2.0

    def test_cap_checked_on_cached_call(self, monkeypatch):
        """Lowering the cap is honored even after the observables were built."""
        dense_observables(3)
        monkeypatch.setenv("ENTSTRUCT_ORACLE_CAP", "2")
        get_settings.cache_clear()

        with pytest.raises(OracleScaleError):
            qcore.dense_observables(3)
