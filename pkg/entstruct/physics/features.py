"""Closed-form evaluation of the four witness observables.

Every observable is a tensor product (M_z is a sum of two), so its expectation on a
product of seed blocks factors into per-block traces. For a block of size l with
GHZ weight w = 1 - alpha - beta:

    Tr[P0^l rho]          = w/2 + alpha/2 + beta/2^l      (same for P1^l)
    Tr[X^l rho]           = w
    Tr[A_+^l rho]         = w cos(l * psi),  psi = (n + 1) phi_n / (2n)
    Tr[((A_++A_-)/2)^l rho] = w cos^l(phi_n/2) cos(l phi_n / (2n))

The dense oracle (qcore) is the reference these forms are tested against.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from entstruct.core.exceptions import DomainError
from entstruct.physics import qcore
from entstruct.physics.angles import angle_for
from entstruct.physics.seeds import SeedParams
from entstruct.physics.structure import Composition

FEATURE_NAMES = ("mz", "mx", "az", "ax")


@dataclass(frozen=True, slots=True)
class FeatureVector:
    """(<M_z>, <M_x>, <A_z>, <A_x>), always in this order on disk and in arrays."""

    mz: float
    mx: float
    az: float
    ax: float

    def as_array(self) -> np.ndarray:
        return np.array([self.mz, self.mx, self.az, self.ax], dtype=np.float64)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "FeatureVector":
        mz, mx, az, ax = (float(v) for v in values)
        return cls(mz, mx, az, ax)


@dataclass(frozen=True, slots=True)
class _AngleFactors:
    psi: float
    half_phi_cos: float
    shift: float


def _angle_factors(n: int) -> _AngleFactors:
    phi = angle_for(n)
    return _AngleFactors(
        psi=(n + 1) * phi / (2 * n),
        half_phi_cos=math.cos(phi / 2),
        shift=phi / (2 * n),
    )


def features_composed(
    n: int,
    composition: Composition,
    params: Sequence[SeedParams],
) -> FeatureVector:
    """Features of the product state of seed blocks, O(number of blocks).

    Raises:
        DomainError: If params are not aligned with the composition's blocks
    """
    if len(params) != len(composition.blocks) or composition.n != n:
        raise DomainError(
            "Seed parameters are not aligned with the composition",
            "MISALIGNED_PARAMS",
            {"n": n, "blocks": composition.blocks, "params": len(params)}
        )

    angles = _angle_factors(n)
    diag = 1.0
    mx = 1.0
    az = 1.0
    ax = 1.0
    for size, seed in zip(composition.blocks, params):
        w = seed.ghz_weight
        diag *= w / 2 + seed.alpha / 2 + seed.beta / (1 << size)
        mx *= w
        az *= w * math.cos(size * angles.psi)
        ax *= w * angles.half_phi_cos ** size * math.cos(size * angles.shift)

    return FeatureVector(2.0 * diag, mx, az, ax)


def features_composed_batch(
    n: int,
    composition: Composition,
    alphas: np.ndarray,
    betas: np.ndarray,
) -> np.ndarray:
    """Vectorized features_composed for k parameter tuples.

    Args:
        n: Global qubit count
        composition: Block structure shared by all rows
        alphas: (k, blocks) array of alpha weights
        betas: (k, blocks) array of beta weights

    Returns:
        (k, 4) array in (mz, mx, az, ax) order
    """
    blocks = np.asarray(composition.blocks)
    if alphas.shape != betas.shape or alphas.ndim != 2 or alphas.shape[1] != len(blocks):
        raise DomainError(
            "Seed parameter arrays are not aligned with the composition",
            "MISALIGNED_PARAMS",
            {"blocks": composition.blocks, "shape": alphas.shape}
        )

    angles = _angle_factors(n)
    weights = 1.0 - alphas - betas
    diag = weights / 2 + alphas / 2 + betas / np.exp2(blocks)
    az_factor = np.cos(blocks * angles.psi)
    ax_factor = angles.half_phi_cos ** blocks * np.cos(blocks * angles.shift)

    out = np.empty((alphas.shape[0], 4), dtype=np.float64)
    out[:, 0] = 2.0 * np.prod(diag, axis=1)
    out[:, 1] = np.prod(weights, axis=1)
    out[:, 2] = np.prod(weights * az_factor, axis=1)
    out[:, 3] = np.prod(weights * ax_factor, axis=1)
    return out


def noised_ghz_features_array(n: int, p: np.ndarray) -> np.ndarray:
    """(k, 4) features of p|GHZ><GHZ| + (1 - p) I/2^n for a grid of p."""
    p = np.asarray(p, dtype=np.float64)
    if not np.all((p >= 0.0) & (p <= 1.0)):
        raise DomainError("Mixing weight p must lie in [0, 1]", "INVALID_MIXING_WEIGHT")
    phi = angle_for(n)
    out = np.empty((p.shape[0], 4), dtype=np.float64)
    out[:, 0] = p + (1.0 - p) * 2.0 ** (1 - n)
    out[:, 1] = p
    out[:, 2] = p * math.cos((n + 1) * phi / 2)
    out[:, 3] = p * math.cos(phi / 2) ** (n + 1)
    return out


def gen_ghz_features_array(n: int, theta: np.ndarray) -> np.ndarray:
    """(k, 4) features of cos(theta)|0...0> + sin(theta)|1...1> for a grid of theta."""
    theta = np.asarray(theta, dtype=np.float64)
    if not np.all((theta >= 0.0) & (theta <= math.pi / 4)):
        raise DomainError("theta must lie in [0, pi/4]", "INVALID_THETA")
    phi = angle_for(n)
    coherence = np.sin(2 * theta)
    out = np.empty((theta.shape[0], 4), dtype=np.float64)
    out[:, 0] = 1.0
    out[:, 1] = coherence
    out[:, 2] = coherence * math.cos((n + 1) * phi / 2)
    out[:, 3] = coherence * math.cos(phi / 2) ** (n + 1)
    return out


def features_noised_ghz(n: int, p: float) -> FeatureVector:
    """Features of the noised GHZ state at mixing weight p.

    Raises:
        DomainError: If p is outside [0, 1] or NaN
    """
    return FeatureVector.from_array(noised_ghz_features_array(n, np.array([p]))[0])


def features_pure_gen_ghz(n: int, theta: float) -> FeatureVector:
    """Features of the pure generalized GHZ state.

    Raises:
        DomainError: If theta is outside [0, pi/4] or NaN
    """
    return FeatureVector.from_array(gen_ghz_features_array(n, np.array([theta]))[0])


def features_dense(state: qcore.DenseState) -> FeatureVector:
    """Reference path: direct traces against the dense observables."""
    observables = qcore.dense_observables(state.qubit_count)
    return FeatureVector(*(qcore.expectation(op, state) for op in observables))
