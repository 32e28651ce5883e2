"""Weak values, the von Neumann pointer simulation, and both readout protocols.

A weak measurement couples a system observable A to a Gaussian pointer via
U = exp(-i g A (x) P), with P the pointer momentum.  Each eigenbranch of A
carries a copy of the pointer displaced by g times its eigenvalue, so a
system-pointer state after the coupling is fully described by the system
matrix in A's eigenbasis plus one displaced wavefunction per branch; storage
and all readouts stay O(N^2 M) instead of densifying the N M-dimensional
joint space.

Conditioned on a later projective outcome |c>, the mean pointer position
shifts by g Re W and the mean momentum by g Im W / (2 sigma^2), where
W = <c|A rho|c> / <c|rho|c> is the (generally complex) weak value.  Those
two proportionality constants are never assumed: they are re-fitted
numerically on a reference configuration whose weak value is known in closed
form, and only then applied to estimates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dirac import A_THEN_B, B_THEN_A, DiracDistribution
from .errors import (
    CalibrationError,
    DegenerateInputError,
    DimensionMismatchError,
    InternalCheckError,
    NonHermitianCouplingError,
    UndefinedWeakValueError,
)
from .hilbert import ATOL, DensityOperator, Observable, PureState, fourier_basis
from .pointer import PointerState, displace, gaussian_pointer

POST_SELECTION_FLOOR = 1e-12
EIGENWEIGHT_FLOOR = 1e-14
MAX_WEAK_RATIO = 0.1


# ---------------------------------------------------------------------------
# analytic weak values
# ---------------------------------------------------------------------------

def weak_value(observable: Observable, rho: DensityOperator, post: PureState) -> complex:
    """Post-selected weak average <c|A rho|c> / <c|rho|c>.

    Reduces to <c|A|psi> / <c|psi> when rho is the pure state psi.  Raises
    when the post-selection probability vanishes: the divergence is physical.
    """
    if not (observable.dim == rho.dim == post.dim):
        raise DimensionMismatchError(
            f"dims differ: A={observable.dim}, rho={rho.dim}, c={post.dim}"
        )
    c = post.amplitudes
    p_post = float(np.real(c.conj() @ rho.matrix @ c))
    if p_post <= POST_SELECTION_FLOOR:
        raise UndefinedWeakValueError(
            f"post-selection probability {p_post:.3e} below {POST_SELECTION_FLOOR}"
        )
    return complex(c.conj() @ observable.matrix @ rho.matrix @ c) / p_post


def weak_value_decomposed(
    observable: Observable, rho: DensityOperator, post: PureState
) -> complex:
    """Same quantity assembled from rho's spectral decomposition.

    Writes rho as a random preparation of orthogonal pure states |l> with
    probabilities p_l, Bayes-updates each preparation probability on the
    post-selected outcome, and averages the per-preparation weak values.
    Must agree with :func:`weak_value`; serves as an independent route.
    """
    if not (observable.dim == rho.dim == post.dim):
        raise DimensionMismatchError(
            f"dims differ: A={observable.dim}, rho={rho.dim}, c={post.dim}"
        )
    c = post.amplitudes
    p_post = float(np.real(c.conj() @ rho.matrix @ c))
    if p_post <= POST_SELECTION_FLOOR:
        raise UndefinedWeakValueError(
            f"post-selection probability {p_post:.3e} below {POST_SELECTION_FLOOR}"
        )
    probs, vecs = rho.eig()
    total = 0.0 + 0.0j
    for p_l, vec in zip(probs, vecs.T):
        if p_l < EIGENWEIGHT_FLOOR:
            continue
        overlap = complex(c.conj() @ vec)
        weight = p_l * abs(overlap) ** 2 / p_post  # P(l | c)
        if weight == 0.0:
            continue  # zero-probability preparation given c; contributes nothing
        branch_wv = complex(c.conj() @ observable.matrix @ vec) / overlap
        total += weight * branch_wv
    return total


def reconstruct_pure_state(weak_values, b0_index: int) -> PureState:
    """Rebuild a pure state from the weak values of every standard projector
    post-selected on Fourier vector ``b0_index``.

    Each weak value equals <b0|a><a|psi> / <b0|psi>, so after dividing out
    the known Fourier phase of <b0|a> the vector is proportional to psi.
    For b0 = 0 every overlap phase is unity and the weak values themselves
    are the amplitudes up to one constant.  The global phase is fixed by
    making the first nonzero component real-positive.
    """
    wv = np.asarray(weak_values, dtype=np.complex128)
    if wv.ndim != 1 or wv.size == 0:
        raise DegenerateInputError("weak-value vector must be 1-d and nonempty")
    n = wv.shape[0]
    if not 0 <= b0_index < n:
        raise ValueError(f"b0_index must lie in [0, {n}), got {b0_index}")
    a = np.arange(n)
    amps = wv * np.exp(2j * np.pi * a * b0_index / n)
    norm = float(np.linalg.norm(amps))
    if norm <= 1e-300:
        raise DegenerateInputError("all-zero weak-value vector")
    amps = amps / norm
    nonzero = np.flatnonzero(np.abs(amps) > 1e-12)
    if nonzero.size == 0:
        raise DegenerateInputError("weak-value vector has no resolvable component")
    lead = amps[nonzero[0]]
    amps = amps * (abs(lead) / lead)
    return PureState(amps)


def projector_weak_values(rho: DensityOperator, b0_index: int) -> np.ndarray:
    """Weak values of every standard projector post-selected on Fourier b0."""
    n = rho.dim
    b0 = fourier_basis(n).vector(b0_index)
    p_post = float(np.real(b0.conj() @ rho.matrix @ b0))
    if p_post <= POST_SELECTION_FLOOR:
        raise UndefinedWeakValueError(
            f"post-selection probability {p_post:.3e} below {POST_SELECTION_FLOOR}"
        )
    # <b0|a> <a|rho|b0> / <b0|rho|b0> for each a
    return (b0.conj() * (rho.matrix @ b0)) / p_post


def row_sum_check(rho: DensityOperator, b0_index: int, atol: float = 1e-10) -> np.ndarray:
    """Projector weak values, cross-checked against density-matrix row sums.

    The same vector must equal (1 / (N rho_b0b0)) sum_a2 rho[a, a2] times the
    phase <a2|b0>/<a|b0>; with b0 = 0 the phases drop and each weak value is
    a plain row sum.  Any two densities with equal (phase-weighted) row sums
    are indistinguishable to this scan, which is why a single post-selected
    scan cannot certify purity.
    """
    wv = projector_weak_values(rho, b0_index)
    n = rho.dim
    b0 = fourier_basis(n).vector(b0_index)
    p_post = float(np.real(b0.conj() @ rho.matrix @ b0))
    a = np.arange(n)
    # phases[a, a2] = <a2|b0>/<a|b0> = exp(2 pi i (a2 - a) b0 / N)
    phases = np.exp(-2j * np.pi * np.subtract.outer(a, a) * b0_index / n)
    row_route = (rho.matrix * phases).sum(axis=1) / (n * p_post)
    gap = float(np.max(np.abs(wv - row_route)))
    if gap > atol:
        raise InternalCheckError(
            f"row-sum route disagrees with direct weak values by {gap:.3e}"
        )
    return wv


# ---------------------------------------------------------------------------
# pointer simulation
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class JointState:
    """System-pointer state after one coupling, in branch form.

    ``rho_eig`` is the system state rotated into the coupling observable's
    eigenbasis (columns of ``eigenvectors``); ``branch_amps[j]`` is the
    pointer wavefunction riding on eigenbranch j.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    rho_eig: np.ndarray
    branch_amps: np.ndarray
    pointer: PointerState
    coupling: float

    @property
    def dim(self) -> int:
        return self.rho_eig.shape[0]

    def branch_gram(self) -> np.ndarray:
        """G[k, j] = <phi_k|phi_j> over the grid."""
        return (self.branch_amps.conj() @ self.branch_amps.T) * self.pointer.grid_spacing

    def position_gram(self) -> np.ndarray:
        """X[k, j] = <phi_k| x |phi_j>."""
        x = self.pointer.positions()
        return (self.branch_amps.conj() @ (self.branch_amps * x).T) * self.pointer.grid_spacing

    def momentum_gram(self) -> np.ndarray:
        """P[k, j] = <phi_k| p |phi_j>, evaluated spectrally."""
        m = self.pointer.grid_points
        p = self.pointer.momenta()
        f = np.fft.fft(self.branch_amps, axis=1)
        return (f.conj() @ (f * p).T) * (self.pointer.grid_spacing / m)

    def reduced_system(self) -> np.ndarray:
        """Partial trace over the pointer, back in the original basis."""
        red = self.rho_eig * self.branch_gram().T
        v = self.eigenvectors
        return v @ red @ v.conj().T

    def norm(self) -> float:
        return float(np.real(np.sum(np.diag(self.rho_eig) * np.diag(self.branch_gram()))))


def evolve_pointer(
    rho: DensityOperator, observable: Observable, pointer: PointerState, g: float
) -> JointState:
    """Apply U = exp(-i g A (x) P) to rho (x) |pointer><pointer|.

    A must be Hermitian (a non-Hermitian coupling Hamiltonian would not
    conserve probability); eigenbranch alpha carries the pointer displaced
    by g alpha.  g = 0 returns the product state unchanged.
    """
    if observable.dim != rho.dim:
        raise DimensionMismatchError(
            f"dims differ: rho={rho.dim}, observable={observable.dim}"
        )
    if g < 0:
        raise ValueError(f"coupling must be nonnegative, got {g}")
    a = observable.matrix
    if not observable.hermitian or np.max(np.abs(a - a.conj().T)) > ATOL:
        raise NonHermitianCouplingError(
            "coupling observable must be Hermitian; measure non-Hermitian "
            "products with two Hermitian couplings instead"
        )
    evals, evecs = np.linalg.eigh(a)
    rho_eig = evecs.conj().T @ rho.matrix @ evecs
    if g == 0.0:
        branches = np.broadcast_to(
            pointer.amplitudes, (rho.dim, pointer.grid_points)
        ).copy()
    else:
        branches = np.stack(
            [displace(pointer.amplitudes, pointer.grid_spacing, g * al) for al in evals]
        )
    return JointState(
        eigenvalues=evals,
        eigenvectors=evecs,
        rho_eig=rho_eig,
        branch_amps=branches,
        pointer=pointer,
        coupling=g,
    )


def _branch_weights(joint: JointState, post: np.ndarray | None) -> np.ndarray:
    """w[j, k] weighting |phi_j><phi_k| in the (unnormalized) reduced pointer.

    Post-selection on |c> gives w = rho_eig * outer(<c|u_j>, <c|u_k>^*);
    tracing the system out keeps only the diagonal of rho_eig.
    """
    if post is None:
        return np.diag(np.diag(joint.rho_eig))
    cc = post.conj() @ joint.eigenvectors  # <c|u_j>
    return joint.rho_eig * np.outer(cc, cc.conj())


@dataclass(frozen=True)
class Readout:
    shift_x: float
    shift_p: float
    p_post: float


def pointer_readout(joint: JointState, postselect: PureState | None = None) -> Readout:
    """Mean position/momentum of the (conditioned) reduced pointer.

    Without post-selection the probability is 1 and the momentum shift is
    exactly zero (the coupling commutes with the pointer momentum).
    """
    post = postselect.amplitudes if postselect is not None else None
    if post is not None and post.shape[0] != joint.dim:
        raise DimensionMismatchError(
            f"post-selection dim {post.shape[0]} != system dim {joint.dim}"
        )
    w = _branch_weights(joint, post)
    p_post = float(np.real(np.sum(w * joint.branch_gram().T)))
    if p_post <= POST_SELECTION_FLOOR:
        raise UndefinedWeakValueError(
            f"post-selection probability {p_post:.3e} below {POST_SELECTION_FLOOR}"
        )
    shift_x = float(np.real(np.sum(w * joint.position_gram().T))) / p_post
    shift_p = float(np.real(np.sum(w * joint.momentum_gram().T))) / p_post
    return Readout(shift_x=shift_x, shift_p=shift_p, p_post=p_post)


# ---------------------------------------------------------------------------
# calibration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointerCalibration:
    """Fitted linear-response constants: shift_x ~ g c_x Re W, shift_p ~ g c_p Im W."""

    c_x: float
    c_p: float


@dataclass(frozen=True, eq=False)
class WeakValueEstimate:
    """Weak value read off a simulated pointer; value is reconstructed from
    the two quadrature shifts and the calibration by construction."""

    value: complex
    coupling: float
    shift_x: float
    shift_p: float
    calibration: PointerCalibration


def _reference_shifts(pointer: PointerState, g: float) -> tuple[float, float]:
    """Quadrature shifts for a qubit configuration with weak value (1+i)/2."""
    psi = PureState(np.array([1.0, 1.0j]) / np.sqrt(2.0))
    post = PureState(np.array([1.0, 1.0]) / np.sqrt(2.0))
    proj = Observable.standard_projector(2, 1)
    joint = evolve_pointer(psi.density(), proj, pointer, g)
    readout = pointer_readout(joint, post)
    return readout.shift_x, readout.shift_p


def calibrate_pointer_response(
    pointer: PointerState, g: float, residual_tol: float = 0.10
) -> PointerCalibration:
    """Fit c_x and c_p on a reference configuration with known weak value.

    The response of a symmetric real pointer is an even function of g (the
    displaced-Gaussian moment matrices are odd-in-g over even-in-g), so the
    two-point fit at g and g/2 extrapolates the quadratic term away.  The
    relative spread between the two points is the fit residual; beyond
    ``residual_tol`` the coupling is too strong or the grid too coarse for a
    trustworthy linear response.
    """
    if g <= 0:
        raise ValueError(f"coupling must be positive, got {g}")
    if g / pointer.sigma >= MAX_WEAK_RATIO:
        raise CalibrationError(
            f"g/sigma = {g / pointer.sigma:.3g} is not weak (needs < {MAX_WEAK_RATIO})"
        )
    wv_re, wv_im = 0.5, 0.5
    sx1, sp1 = _reference_shifts(pointer, g)
    sx2, sp2 = _reference_shifts(pointer, g / 2)
    ex1, ex2 = sx1 / (g * wv_re), sx2 / ((g / 2) * wv_re)
    ep1, ep2 = sp1 / (g * wv_im), sp2 / ((g / 2) * wv_im)
    c_x = (4.0 * ex2 - ex1) / 3.0
    c_p = (4.0 * ep2 - ep1) / 3.0
    if abs(ex1 - ex2) > residual_tol * abs(c_x) or abs(ep1 - ep2) > residual_tol * abs(c_p):
        raise CalibrationError(
            f"calibration residuals ({abs(ex1 - ex2):.3g}, {abs(ep1 - ep2):.3g}) "
            f"exceed {residual_tol:.0%} of the fitted response"
        )
    return PointerCalibration(c_x=c_x, c_p=c_p)


def measure_weak_value(
    observable: Observable,
    rho: DensityOperator,
    post: PureState,
    pointer: PointerState,
    g: float,
    calibration: PointerCalibration | None = None,
) -> WeakValueEstimate:
    """Estimate a weak value by simulating the coupled pointer and reading
    both quadrature shifts."""
    if calibration is None:
        calibration = calibrate_pointer_response(pointer, g)
    joint = evolve_pointer(rho, observable, pointer, g)
    readout = pointer_readout(joint, post)
    value = readout.shift_x / (g * calibration.c_x) + 1j * readout.shift_p / (
        g * calibration.c_p
    )
    return WeakValueEstimate(
        value=value,
        coupling=g,
        shift_x=readout.shift_x,
        shift_p=readout.shift_p,
        calibration=calibration,
    )


# ---------------------------------------------------------------------------
# protocols
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CellDiagnostics:
    a: int
    b: int
    post_selection_probability: float
    flagged: bool


def scan_protocol(
    rho: DensityOperator,
    g: float,
    pointer: PointerState,
    calibration: PointerCalibration | None = None,
    with_diagnostics: bool = False,
):
    """Weak projector scan followed by a strong Fourier-basis measurement.

    For each a the pointer couples weakly to |a><a|, the system is measured
    projectively in the Fourier basis, and every outcome b contributes one
    cell: P(b) times the conditioned quadrature shifts divided by g and the
    calibration.  The assembled table converges to the analytic distribution
    as g -> 0.  Outcomes with probability below the post-selection floor are
    flagged and left as NaN rather than fabricated.
    """
    if calibration is None:
        calibration = calibrate_pointer_response(pointer, g)
    n = rho.dim
    basis = fourier_basis(n)
    values = np.zeros((n, n), dtype=np.complex128)
    diagnostics: list[CellDiagnostics] = []
    for a in range(n):
        joint = evolve_pointer(rho, Observable.standard_projector(n, a), pointer, g)
        for b in range(n):
            post = PureState(basis.vector(b))
            try:
                readout = pointer_readout(joint, post)
            except UndefinedWeakValueError:
                values[a, b] = np.nan
                diagnostics.append(CellDiagnostics(a, b, 0.0, True))
                continue
            cell = readout.p_post * (
                readout.shift_x / (g * calibration.c_x)
                + 1j * readout.shift_p / (g * calibration.c_p)
            )
            values[a, b] = cell
            diagnostics.append(CellDiagnostics(a, b, readout.p_post, False))
    dist = DiracDistribution(values, check=False)
    if with_diagnostics:
        return dist, diagnostics
    return dist


def two_pointer_correlators(
    rho: DensityOperator,
    a: int,
    b: int,
    g1: float,
    g2: float,
    pointers: tuple[PointerState, PointerState],
    couple_a_first: bool = True,
) -> dict[str, float]:
    """Exact post-coupling correlators <x1 x2>, <p1 x2>, <x1 p2>, <p1 p2>.

    Pointer 1 couples to the first projector, pointer 2 to the second.  The
    second coupling commutes with both x1 and p1 and shifts x2 by g2 on the
    second projector's branch, so in the Heisenberg picture

        <D1 x2> = g2 Tr[ rho_1 (Pi_second (x) D1) ],   D1 in {x1, p1},

    with rho_1 the state after the first coupling only.  This is exact in
    g2.  Both p2 correlators vanish identically: the second pointer's
    momentum commutes with every coupling, stays at zero mean, and remains
    uncorrelated with pointer 1.
    """
    n = rho.dim
    if not (0 <= a < n and 0 <= b < n):
        raise ValueError(f"cell ({a}, {b}) outside [0, {n})^2")
    p1, p2 = pointers
    for g, ptr in ((g1, p1), (g2, p2)):
        if g <= 0 or g / ptr.sigma >= MAX_WEAK_RATIO:
            raise CalibrationError(
                f"coupling ratio g/sigma = {g / ptr.sigma:.3g} is not weak"
            )
    std_vec = np.zeros(n, dtype=np.complex128)
    std_vec[a] = 1.0
    fourier_vec = fourier_basis(n).vector(b)
    first_vec, second_vec = (
        (std_vec, fourier_vec) if couple_a_first else (fourier_vec, std_vec)
    )
    joint1 = evolve_pointer(rho, Observable.projector(first_vec), p1, g1)
    w = _branch_weights(joint1, second_vec)
    c_x1 = float(np.real(np.sum(w * joint1.position_gram().T)))
    c_p1 = float(np.real(np.sum(w * joint1.momentum_gram().T)))
    return {
        "x1x2": g2 * c_x1,
        "p1x2": g2 * c_p1,
        "x1p2": 0.0,
        "p1p2": 0.0,
    }


def joint_weak_product(
    rho: DensityOperator,
    a: int,
    b: int,
    g1: float,
    g2: float,
    pointers: tuple[PointerState, PointerState] | None = None,
    calibration: PointerCalibration | None = None,
    couple_a_first: bool = True,
) -> complex:
    """Estimate one distribution cell from two weak couplings and no
    post-selection.

    The standard projector couples to pointer 1 first, the Fourier projector
    to pointer 2 second; the product's expectation is read out of the
    cross-quadrature correlators.  Expanding the sequential couplings to
    first order in each g and using the Gaussian moments <x P> = i/2 and
    <p P> = 1/(4 sigma^2) per pointer gives

        <x1 x2> = g1 g2 Re S + O(g1^2 g2),
        <p1 x2> = g1 g2 Im S / (2 sigma_1^2) + O(g1^2 g2),

    so the estimate divides those two correlators by g1 g2 and the same
    calibration constants as the single-pointer protocol.  Reversing the
    coupling order estimates the opposite-ordered product, the entrywise
    conjugate for Hermitian states.
    """
    if pointers is None:
        pointers = (gaussian_pointer(), gaussian_pointer())
    if calibration is None:
        calibration = calibrate_pointer_response(pointers[0], g1)
    corr = two_pointer_correlators(rho, a, b, g1, g2, pointers, couple_a_first)
    re = corr["x1x2"] / (g1 * g2 * calibration.c_x)
    im = corr["p1x2"] / (g1 * g2 * calibration.c_p)
    return complex(re, im)


def joint_weak_scan(
    rho: DensityOperator,
    g1: float,
    g2: float,
    pointers: tuple[PointerState, PointerState] | None = None,
    couple_a_first: bool = True,
) -> DiracDistribution:
    """Assemble the full N^2 table from :func:`joint_weak_product`."""
    if pointers is None:
        pointers = (gaussian_pointer(), gaussian_pointer())
    calibration = calibrate_pointer_response(pointers[0], g1)
    n = rho.dim
    values = np.empty((n, n), dtype=np.complex128)
    for a in range(n):
        for b in range(n):
            values[a, b] = joint_weak_product(
                rho, a, b, g1, g2, pointers, calibration, couple_a_first
            )
    ordering = A_THEN_B if couple_a_first else B_THEN_A
    return DiracDistribution(values, ordering=ordering, check=False)
