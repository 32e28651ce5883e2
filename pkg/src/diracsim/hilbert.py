"""Hilbert-space domain types and the standard/Fourier mutually unbiased pair.

Index convention: basis labels a, b run over 0..N-1.  Complex scalars are
double precision; analytic tolerances default to 1e-12 and the PSD check
uses a looser eigenvalue floor because eigensolvers lose a digit on
near-degenerate spectra.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidDimensionError,
    NotHermitianError,
    NotNormalizedError,
    NotPositiveError,
    TraceNotOneError,
)

ATOL = 1e-12
PSD_FLOOR = 1e-10


def _as_vector(values, name: str = "vector") -> np.ndarray:
    v = np.asarray(values, dtype=np.complex128)
    if v.ndim != 1 or v.size == 0:
        raise InvalidDimensionError(f"{name} must be a nonempty 1-d complex array")
    v = v.copy()
    v.setflags(write=False)
    return v


def _as_square_matrix(values, name: str = "matrix") -> np.ndarray:
    m = np.asarray(values, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise InvalidDimensionError(f"{name} must be a nonempty square complex matrix")
    m = m.copy()
    m.setflags(write=False)
    return m


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit-norm complex amplitude vector in the standard basis."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _as_vector(self.amplitudes, "amplitudes")
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > ATOL:
            raise NotNormalizedError(
                f"pure-state norm^2 = {norm_sq!r}, must be 1 within {ATOL}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> "DensityOperator":
        return DensityOperator(self.projector())


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, unit-trace, positive-semidefinite matrix.

    Construction validates all three invariants; use :func:`validate_density`
    when you want the named error for each failure mode.
    """

    matrix: np.ndarray
    hermitian_tol: float = ATOL
    trace_tol: float = ATOL
    psd_floor: float = PSD_FLOOR

    def __post_init__(self):
        m = _as_square_matrix(self.matrix, "density matrix")
        herm_err = float(np.max(np.abs(m - m.conj().T)))
        if herm_err > self.hermitian_tol:
            raise NotHermitianError(
                f"max |rho - rho^dagger| = {herm_err:.3e} exceeds {self.hermitian_tol}"
            )
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > self.trace_tol:
            raise TraceNotOneError(f"trace = {tr!r}, must be 1 within {self.trace_tol}")
        min_eig = float(np.linalg.eigvalsh(m)[0])
        if min_eig < -self.psd_floor:
            raise NotPositiveError(
                f"smallest eigenvalue {min_eig:.3e} below floor -{self.psd_floor}"
            )
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eig(self) -> tuple[np.ndarray, np.ndarray]:
        """Spectral decomposition (ascending eigenvalues, column eigenvectors)."""
        return np.linalg.eigh(self.matrix)


@dataclass(frozen=True, eq=False)
class BasisSet:
    """N orthonormal vectors stored as matrix columns, tagged standard/fourier."""

    vectors: np.ndarray
    label: str

    def __post_init__(self):
        m = _as_square_matrix(self.vectors, "basis vectors")
        if self.label not in ("standard", "fourier"):
            raise ValueError(f"unknown basis label {self.label!r}")
        gram_err = float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))
        if gram_err > ATOL:
            raise NotNormalizedError(
                f"basis not orthonormal: max |G - I| = {gram_err:.3e}"
            )
        if self.label == "fourier":
            # mutual unbiasedness against the standard basis: |<a|b>| = 1/sqrt(N)
            n = m.shape[0]
            mub_err = float(np.max(np.abs(np.abs(m) - 1.0 / np.sqrt(n))))
            if mub_err > ATOL:
                raise NotNormalizedError(
                    f"fourier basis not mutually unbiased: max deviation {mub_err:.3e}"
                )
        object.__setattr__(self, "vectors", m)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def vector(self, index: int) -> np.ndarray:
        return self.vectors[:, index]


@dataclass(frozen=True, eq=False)
class Observable:
    """A complex matrix to be measured.  ``hermitian`` is validated when set;
    non-Hermitian product operators are stored with the flag cleared."""

    matrix: np.ndarray
    hermitian: bool = True

    def __post_init__(self):
        m = _as_square_matrix(self.matrix, "observable")
        if self.hermitian:
            herm_err = float(np.max(np.abs(m - m.conj().T)))
            if herm_err > ATOL:
                raise NotHermitianError(
                    f"observable flagged hermitian but max |A - A^dagger| = {herm_err:.3e}"
                )
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def is_normal(self, atol: float = ATOL) -> bool:
        m = self.matrix
        return bool(np.max(np.abs(m @ m.conj().T - m.conj().T @ m)) <= atol)

    @staticmethod
    def identity(dim: int) -> "Observable":
        return Observable(np.eye(dim))

    @staticmethod
    def projector(vector) -> "Observable":
        v = np.asarray(vector, dtype=np.complex128)
        return Observable(np.outer(v, v.conj()) / float(np.sum(np.abs(v) ** 2)))

    @staticmethod
    def standard_projector(dim: int, index: int) -> "Observable":
        m = np.zeros((dim, dim), dtype=np.complex128)
        m[index, index] = 1.0
        return Observable(m)


def fourier_basis(dim: int) -> BasisSet:
    """Fourier partner of the standard basis.

    Vector b has component a equal to exp(i 2 pi a b / N) / sqrt(N), so the
    cross overlap <b|a> carries phase -2 pi a b / N.
    """
    if dim < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {dim}")
    a = np.arange(dim)
    vectors = np.exp(2j * np.pi * np.outer(a, a) / dim) / np.sqrt(dim)
    return BasisSet(vectors, "fourier")


def standard_basis(dim: int) -> BasisSet:
    if dim < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {dim}")
    return BasisSet(np.eye(dim, dtype=np.complex128), "standard")


def validate_density(
    matrix,
    hermitian_tol: float = ATOL,
    trace_tol: float = ATOL,
    psd_floor: float = PSD_FLOOR,
) -> DensityOperator:
    """Validate a raw matrix as a density operator or raise a named error."""
    return DensityOperator(
        matrix, hermitian_tol=hermitian_tol, trace_tol=trace_tol, psd_floor=psd_floor
    )


def random_density(dim: int, rank: int, seed: int) -> DensityOperator:
    """Seeded random mixed state of the requested rank.

    Draws an N x rank matrix of independent standard complex Gaussians G and
    returns G G^dagger / Tr[G G^dagger]; rank-1 draws are pure.
    """
    if dim < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {dim}")
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must lie in [1, {dim}], got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    m /= np.trace(m).real
    return DensityOperator(m)


def random_pure_state(dim: int, seed: int) -> PureState:
    """Seeded Haar-like random pure state (normalized complex Gaussian)."""
    if dim < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {dim}")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(v / np.linalg.norm(v))


def purity(rho: DensityOperator | np.ndarray) -> float:
    """Tr[rho^2]; 1 for pure states, 1/N for the maximally mixed state."""
    m = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho)
    return float(np.real(np.trace(m @ m)))


def trace_distance(m1: np.ndarray, m2: np.ndarray) -> float:
    """Half the sum of absolute eigenvalues of the (Hermitian) difference."""
    a = np.asarray(m1, dtype=np.complex128)
    b = np.asarray(m2, dtype=np.complex128)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    diff = (diff + diff.conj().T) / 2
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


@dataclass(frozen=True)
class DistanceReport:
    trace_distance: float
    pure_target_fidelity: float | None


def distance_report(
    rho: DensityOperator, sigma: DensityOperator, rank1_tol: float = 1e-8
) -> DistanceReport:
    """Trace distance between two states, plus <psi|rho|psi> when the target
    sigma is (numerically) rank one with eigenvector psi."""
    if rho.dim != sigma.dim:
        raise DimensionMismatchError(f"dims differ: {rho.dim} vs {sigma.dim}")
    td = trace_distance(rho.matrix, sigma.matrix)
    fidelity = None
    evals, evecs = sigma.eig()
    if evals[-1] >= 1.0 - rank1_tol:
        psi = evecs[:, -1]
        fidelity = float(np.real(psi.conj() @ rho.matrix @ psi))
    return DistanceReport(trace_distance=td, pure_target_fidelity=fidelity)
