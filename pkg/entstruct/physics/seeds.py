"""GHZ-class witness and random seed parameters."""

from dataclasses import dataclass

import numpy as np

from entstruct.core.config import get_settings
from entstruct.core.exceptions import DomainError, SamplingError

SAMPLER_ID = "uniform-rejection-v1"
DRAWS_PER_ATTEMPT = 2  # one uniform for alpha, one for beta

_WEIGHT_TOL = 1e-12


@dataclass(frozen=True, slots=True)
class SeedParams:
    """Noise weights (alpha, beta) of one seed block."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.alpha <= 1.0 and 0.0 <= self.beta <= 1.0):
            raise DomainError(
                "Seed weights must lie in [0, 1]",
                "INVALID_SEED_PARAMS",
                {"alpha": self.alpha, "beta": self.beta}
            )
        if self.alpha + self.beta > 1.0 + _WEIGHT_TOL:
            raise DomainError(
                "Seed weights must satisfy alpha + beta <= 1",
                "INVALID_SEED_PARAMS",
                {"alpha": self.alpha, "beta": self.beta}
            )

    @property
    def ghz_weight(self) -> float:
        return 1.0 - self.alpha - self.beta


def witness_value(n: int, alpha: float, beta: float) -> float:
    """Tr[W_G rho_n] = (alpha - 1)/2 + (2^n - 1)/2^n * beta. Negative inside the GHZ class."""
    if n < 1:
        raise DomainError("Qubit count must be at least 1", "INVALID_QUBIT_COUNT", {"n": n})
    return 0.5 * (-1.0 + alpha) + (1.0 - 0.5 ** n) * beta


def valid_region_area(n: int) -> float:
    """Area of {alpha, beta >= 0, alpha + beta <= 1, witness < 0}.

    The witness line alpha + 2(1 - 2^-n) beta = 1 stays inside the simplex, so the
    region is the triangle under it.
    """
    slope = 2.0 * (1.0 - 0.5 ** n)
    return 1.0 / (2.0 * slope)


class SeedSampler:
    """Uniform rejection sampler over the witness-valid region for blocks of size ``n``.

    Each attempt consumes exactly ``DRAWS_PER_ATTEMPT`` uniform doubles from the stream.
    Counters are kept for acceptance-rate diagnostics.
    """

    def __init__(self, n: int, attempt_cap: int | None = None):
        if n < 1:
            raise DomainError("Block size must be at least 1", "INVALID_BLOCK_SIZE", {"n": n})
        self.n = n
        self.attempt_cap = attempt_cap or get_settings().sampler_attempt_cap
        self.attempts = 0
        self.accepted = 0

    def sample(self, rng: np.random.Generator) -> SeedParams:
        """Draw one SeedParams.

        Raises:
            SamplingError: If ``attempt_cap`` attempts are all rejected
        """
        for _ in range(self.attempt_cap):
            alpha, beta = rng.random(DRAWS_PER_ATTEMPT)
            self.attempts += 1
            if alpha + beta <= 1.0 and witness_value(self.n, alpha, beta) < 0.0:
                self.accepted += 1
                return SeedParams(float(alpha), float(beta))

        raise SamplingError(
            "Rejection sampling exhausted its attempt budget",
            "SAMPLER_ATTEMPTS_EXHAUSTED",
            {"n": self.n, "attempt_cap": self.attempt_cap}
        )

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts if self.attempts else 0.0


def sample_seed_params(n: int, rng: np.random.Generator) -> SeedParams:
    """Uniform (alpha, beta) over the witness-valid region for a block of ``n`` qubits."""
    return SeedSampler(n).sample(rng)
