"""Dense density-matrix oracle.

Exact 2^n x 2^n matrices used to verify the closed-form feature path and to
provide small-n ground truth. Nothing here is on the dataset hot path.
"""

from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np

from entstruct.core.config import get_settings
from entstruct.core.exceptions import DomainError, NumericIntegrityError, OracleScaleError
from entstruct.physics.angles import angle_for
from entstruct.physics.seeds import SeedParams

CONSTRUCTION_TOL = 1e-12
COMPARISON_TOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PROJ_0 = np.array([[1, 0], [0, 0]], dtype=np.complex128)
PROJ_1 = np.array([[0, 0], [0, 1]], dtype=np.complex128)


@dataclass(frozen=True)
class DenseState:
    """An n-qubit density matrix. The matrix is read-only after construction."""

    qubit_count: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        dim = 1 << self.qubit_count
        if self.matrix.shape != (dim, dim):
            raise DomainError(
                "Density matrix dimension does not match qubit count",
                "STATE_DIMENSION_MISMATCH",
                {"qubit_count": self.qubit_count, "shape": self.matrix.shape}
            )
        hermitian_defect = float(np.max(np.abs(self.matrix - self.matrix.conj().T)))
        trace = complex(np.trace(self.matrix))
        if hermitian_defect > CONSTRUCTION_TOL or abs(trace - 1.0) > CONSTRUCTION_TOL:
            raise NumericIntegrityError(
                "Matrix is not a normalized Hermitian density matrix",
                "INVALID_DENSITY_MATRIX",
                {"hermitian_defect": hermitian_defect, "trace": trace}
            )
        self.matrix.setflags(write=False)


def check_oracle_cap(qubits: int) -> None:
    """Raise if a dense object on ``qubits`` qubits exceeds the configured cap."""
    cap = get_settings().oracle_cap
    if qubits > cap:
        raise OracleScaleError(
            f"Dense oracle limited to {cap} qubits, requested {qubits}",
            "ORACLE_CAP_EXCEEDED",
            {"requested": qubits, "cap": cap}
        )


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; dimensions multiply."""
    return np.kron(a, b)


def _kron_power(op: np.ndarray, times: int) -> np.ndarray:
    return reduce(kron, [op] * times)


def ghz_vector(qubits: int, theta: float = np.pi / 4) -> np.ndarray:
    """cos(theta)|0...0> + sin(theta)|1...1>; theta = pi/4 gives the GHZ state."""
    vec = np.zeros(1 << qubits, dtype=np.complex128)
    vec[0] = np.cos(theta)
    vec[-1] += np.sin(theta)
    return vec


def _classical_mixture(qubits: int) -> np.ndarray:
    eta = np.zeros((1 << qubits, 1 << qubits), dtype=np.complex128)
    eta[0, 0] += 0.5
    eta[-1, -1] += 0.5
    return eta


def dense_seed_state(block_size: int, params: SeedParams) -> DenseState:
    """(1 - a - b)|G><G| + a*eta + b*I/2^l for one block of ``block_size`` qubits.

    Raises:
        DomainError: If the block is empty (weights are validated by SeedParams)
    """
    alpha, beta = params.alpha, params.beta
    if block_size < 1:
        raise DomainError("Block size must be at least 1", "INVALID_BLOCK_SIZE",
                          {"block_size": block_size})
    check_oracle_cap(block_size)

    dim = 1 << block_size
    ghz = ghz_vector(block_size)
    rho = (
        (1.0 - alpha - beta) * np.outer(ghz, ghz.conj())
        + alpha * _classical_mixture(block_size)
        + beta * np.eye(dim, dtype=np.complex128) / dim
    )
    return DenseState(block_size, rho)


def dense_noised_ghz(qubits: int, p: float) -> DenseState:
    """p|GHZ><GHZ| + (1 - p) I/2^n."""
    check_oracle_cap(qubits)
    dim = 1 << qubits
    ghz = ghz_vector(qubits)
    rho = p * np.outer(ghz, ghz.conj()) + (1.0 - p) * np.eye(dim, dtype=np.complex128) / dim
    return DenseState(qubits, rho)


def dense_gen_ghz(qubits: int, theta: float) -> DenseState:
    """Pure generalized GHZ state cos(theta)|0...0> + sin(theta)|1...1>."""
    check_oracle_cap(qubits)
    vec = ghz_vector(qubits, theta)
    return DenseState(qubits, np.outer(vec, vec.conj()))


def dense_compose(blocks: list[DenseState]) -> DenseState:
    """Tensor product of the blocks in order.

    Raises:
        OracleScaleError: If the total qubit count exceeds the oracle cap
    """
    if not blocks:
        raise DomainError("Cannot compose an empty block list", "EMPTY_COMPOSITION")
    total = sum(block.qubit_count for block in blocks)
    check_oracle_cap(total)
    matrix = reduce(kron, [block.matrix for block in blocks])
    return DenseState(total, np.array(matrix))


def expectation(op: np.ndarray, state: DenseState) -> float:
    """Tr[op rho] for a Hermitian operator.

    Raises:
        DomainError: On a dimension mismatch
        NumericIntegrityError: If op is not Hermitian or the trace keeps an imaginary part
    """
    if op.shape != state.matrix.shape:
        raise DomainError(
            "Operator and state dimensions differ",
            "DIMENSION_MISMATCH",
            {"op_shape": op.shape, "state_shape": state.matrix.shape}
        )
    if not np.allclose(op, op.conj().T, atol=COMPARISON_TOL, rtol=0.0):
        raise NumericIntegrityError("Operator is not Hermitian", "NON_HERMITIAN_OPERATOR")

    # Tr[AB] = sum_ij A_ij B_ji, O(4^n) instead of a full product
    value = complex(np.sum(op * state.matrix.T))
    if abs(value.imag) > COMPARISON_TOL:
        raise NumericIntegrityError(
            "Expectation value has an imaginary residue",
            "IMAGINARY_RESIDUE",
            {"imag": value.imag}
        )
    return value.real


def witness_operator(qubits: int) -> np.ndarray:
    """W_G = I/2 - |GHZ><GHZ|."""
    check_oracle_cap(qubits)
    ghz = ghz_vector(qubits)
    return np.eye(1 << qubits, dtype=np.complex128) / 2 - np.outer(ghz, ghz.conj())


def measurement_settings(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Single-qubit A_+ and A_- for the global qubit count ``n``."""
    phi = angle_for(n)
    plus = (n + 1) * phi / (2 * n)
    minus = -(n - 1) * phi / (2 * n)
    a_plus = np.cos(plus) * SIGMA_X + np.sin(plus) * SIGMA_Y
    a_minus = np.cos(minus) * SIGMA_X + np.sin(minus) * SIGMA_Y
    return a_plus, a_minus


def dense_observables(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Dense (M_z, M_x, A_z, A_x) on n qubits. Returned arrays are read-only.

    Raises:
        OracleScaleError: If n exceeds the oracle cap
    """
    check_oracle_cap(n)
    return _build_observables(n)


@lru_cache(maxsize=16)
def _build_observables(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    a_plus, a_minus = measurement_settings(n)

    mz = _kron_power(PROJ_0, n) + _kron_power(PROJ_1, n)
    mx = _kron_power(SIGMA_X, n)
    az = _kron_power(a_plus, n)
    ax = _kron_power((a_plus + a_minus) / 2, n)

    observables = (np.array(mz), np.array(mx), np.array(az), np.array(ax))
    for op in observables:
        op.setflags(write=False)
    return observables
