"""Discrete Dirac quasi-probability distribution over the standard/Fourier pair.

The forward map sends a density operator to S(a, b) = <a|rho|b><b|a>; the
inverse is a discrete Fourier transform over the b index.  Entries are
complex in general, but the full sum, every row sum over b, and every column
sum over a are real probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    DistributionValidationError,
    ReconstructionError,
)
from .hilbert import DensityOperator, Observable, fourier_basis, validate_density

SUM_ATOL = 1e-10

A_THEN_B = "A_then_B"
B_THEN_A = "B_then_A"


def distribution_violations(values: np.ndarray, atol: float = SUM_ATOL) -> list[str]:
    """Return human-readable invariant violations (empty list when clean)."""
    problems: list[str] = []
    total = complex(values.sum())
    if abs(total - 1.0) > atol:
        problems.append(f"total sum {total!r} differs from 1 beyond {atol}")
    col = values.sum(axis=0)  # per-b marginal
    row = values.sum(axis=1)  # per-a marginal
    for name, sums in (("b-column", col), ("a-row", row)):
        if np.max(np.abs(sums.imag)) > atol:
            problems.append(f"{name} sums not real (max imag {np.max(np.abs(sums.imag)):.3e})")
        if np.min(sums.real) < -atol:
            problems.append(f"{name} sums negative (min {np.min(sums.real):.3e})")
    return problems


@dataclass(frozen=True, eq=False)
class DiracDistribution:
    """N x N complex array indexed (a, b) over the standard-then-Fourier pair.

    ``ordering`` records which projector was (conceptually) measured first;
    estimates from finite-coupling protocols are built with ``check=False``
    since their invariants hold only within error bars.
    """

    values: np.ndarray
    ordering: str = A_THEN_B
    check: bool = True

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] == 0:
            raise DimensionMismatchError("values must be a nonempty square array")
        if self.ordering not in (A_THEN_B, B_THEN_A):
            raise ValueError(f"unknown ordering tag {self.ordering!r}")
        if self.check:
            problems = distribution_violations(v)
            if problems:
                raise DistributionValidationError("; ".join(problems))
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.values.shape[0]


def _dirac_values(matrix: np.ndarray) -> np.ndarray:
    """<a|M|b><b|a> for every (a, b); works for any square operator M."""
    n = matrix.shape[0]
    f = fourier_basis(n).vectors
    return (matrix @ f) * f.conj()


def dirac_from_density(rho: DensityOperator) -> DiracDistribution:
    """Forward map: S(a, b) = <a|rho|b><b|a> with A measured before B."""
    return DiracDistribution(_dirac_values(rho.matrix))


def alternative_ordering(rho: DensityOperator) -> DiracDistribution:
    """Opposite time ordering: values (a, b) hold <b|rho|a><a|b|.

    For Hermitian rho this equals the complex conjugate of the forward map,
    and differs from it whenever rho has off-diagonal structure.
    """
    n = rho.dim
    f = fourier_basis(n).vectors
    # <b|rho|a> = (F^dagger rho)[b, a];  <a|b> = f[a, b]
    values = (f.conj().T @ rho.matrix).T * f
    return DiracDistribution(values, ordering=B_THEN_A)


def invert_values(values: np.ndarray) -> np.ndarray:
    """rho[a1, a2] = sum_b S(a1, b) exp(i 2 pi b (a1 - a2) / N), direct sum."""
    n = values.shape[0]
    idx = np.arange(n)
    phase = np.exp(2j * np.pi * np.einsum("b,ij->ijb", idx, np.subtract.outer(idx, idx)) / n)
    return np.einsum("ib,ijb->ij", values, phase)


def density_from_dirac(
    dist: DiracDistribution, validate: bool = True
) -> DensityOperator | np.ndarray:
    """Invert the distribution back to a density matrix.

    The ordering tag selects the matching transform (the opposite ordering
    inverts through the conjugated array).  With ``validate`` the result must
    pass density validation; a failure means the input was corrupted or is a
    noisy estimate, reported as :class:`ReconstructionError`.  With
    ``validate=False`` the raw linear inversion is returned as an array.
    """
    values = dist.values if dist.ordering == A_THEN_B else dist.values.conj()
    raw = invert_values(values)
    if not validate:
        return raw
    try:
        return validate_density(raw)
    except ValueError as exc:
        raise ReconstructionError(
            f"inverted distribution fails density validation: {exc}"
        ) from exc


def expectation(dist: DiracDistribution, observable: Observable) -> complex:
    """Overlap formula N sum_ab S_rho(a,b) S_O(a,b)^*.

    Equals Tr[O rho] (real) when O is Hermitian; for general O the complex
    value itself is the contract.
    """
    if dist.dim != observable.dim:
        raise DimensionMismatchError(
            f"dims differ: distribution {dist.dim} vs observable {observable.dim}"
        )
    s_o = _dirac_values(observable.matrix)
    return complex(dist.dim * np.sum(dist.values * s_o.conj()))


def dirac_purity(dist: DiracDistribution) -> float:
    """N sum_ab |S(a,b)|^2 = Tr[rho^2]."""
    return float(dist.dim * np.sum(np.abs(dist.values) ** 2))


def marginals(dist: DiracDistribution) -> tuple[np.ndarray, np.ndarray]:
    """(prob_a, prob_b): outcome distributions in the two bases.

    prob_a[a] = Re sum_b S(a,b) = <a|rho|a> and prob_b[b] = Re sum_a S(a,b)
    = <b|rho|b>.
    """
    prob_a = dist.values.sum(axis=1).real
    prob_b = dist.values.sum(axis=0).real
    return prob_a, prob_b
