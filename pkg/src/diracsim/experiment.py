"""Monte Carlo shot-noise emulation of the readout protocols.

Trials are drawn from the exact joint post-measurement distributions of the
pointer simulation, so the only gap between an estimate and the analytic
distribution is sampling noise plus the finite-coupling bias that the
exact-expectation mode isolates.  Trial randomness is a pure function of
(seed, trial_id): row t of the pregenerated uniform block belongs to trial
t regardless of execution order, and per-bin accumulation is trial-ordered,
so reports are reproducible byte-for-byte on every backend and thread count.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .dirac import DiracDistribution, dirac_from_density, invert_values
from .errors import (
    DimensionMismatchError,
    FileFormatError,
    MissingKeyError,
    RankDeficiencyError,
)
from .hilbert import (
    DensityOperator,
    Observable,
    fourier_basis,
    random_density,
    trace_distance,
)
from .pointer import PointerState, displace, gaussian_pointer, position_density
from .weak import (
    PointerCalibration,
    _branch_weights,
    calibrate_pointer_response,
    evolve_pointer,
    joint_weak_scan,
    scan_protocol,
)

PROTOCOL_SCAN = "scan"
PROTOCOL_JOINT = "joint-weak"

DEAD_CELL_FLOOR = 1e-12


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointerSpec:
    grid_points: int = 512
    extent_sigmas: float = 12.0
    sigma: float = 1.0

    def build(self) -> PointerState:
        return gaussian_pointer(self.sigma, self.grid_points, self.extent_sigmas)


@dataclass(frozen=True)
class StateSpec:
    """Either a state file path or a seeded random draw of given rank."""

    path: str | None = None
    rank: int | None = None
    seed: int | None = None

    def __post_init__(self):
        from_file = self.path is not None
        from_seed = self.rank is not None and self.seed is not None
        if from_file == from_seed:
            raise ValueError("state must come from exactly one of: file, (rank, seed)")


@dataclass(frozen=True)
class ExperimentConfig:
    dim: int
    state: StateSpec
    protocol: str
    g: float
    trials: int
    seed: int
    g2: float | None = None
    pointer: PointerSpec = field(default_factory=PointerSpec)
    readout_split: float = 0.5

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.protocol not in (PROTOCOL_SCAN, PROTOCOL_JOINT):
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not 0.0 < self.readout_split < 1.0:
            raise ValueError(f"readout_split must lie in (0, 1), got {self.readout_split}")
        if self.g <= 0:
            raise ValueError(f"g must be positive, got {self.g}")
        if self.g2 is not None and self.g2 <= 0:
            raise ValueError(f"g2 must be positive, got {self.g2}")
        if self.pointer.sigma <= 0 or self.pointer.grid_points < 8 or self.pointer.extent_sigmas <= 0:
            raise ValueError("pointer parameters must be positive")

    @property
    def second_coupling(self) -> float:
        return self.g if self.g2 is None else self.g2


_CONFIG_KEYS = {
    "format_version",
    "dim",
    "protocol",
    "g",
    "g2",
    "trials",
    "seed",
    "readout_split",
    "state_file",
    "state_rank",
    "state_seed",
    "pointer_points",
    "pointer_extent",
    "pointer_sigma",
}

_REQUIRED_KEYS = ("dim", "protocol", "g", "trials", "seed")


def config_from_mapping(mapping: dict[str, str]) -> ExperimentConfig:
    """Build a config from parsed ``key = value`` pairs, naming missing keys."""
    unknown = set(mapping) - _CONFIG_KEYS
    if unknown:
        raise FileFormatError(f"unknown config keys: {sorted(unknown)}")
    for key in _REQUIRED_KEYS:
        if key not in mapping:
            raise MissingKeyError(key)
    if "state_file" in mapping:
        state = StateSpec(path=mapping["state_file"])
    else:
        for key in ("state_rank", "state_seed"):
            if key not in mapping:
                raise MissingKeyError(key)
        state = StateSpec(rank=int(mapping["state_rank"]), seed=int(mapping["state_seed"]))
    pointer = PointerSpec(
        grid_points=int(mapping.get("pointer_points", 512)),
        extent_sigmas=float(mapping.get("pointer_extent", 12.0)),
        sigma=float(mapping.get("pointer_sigma", 1.0)),
    )
    return ExperimentConfig(
        dim=int(mapping["dim"]),
        state=state,
        protocol=mapping["protocol"],
        g=float(mapping["g"]),
        g2=float(mapping["g2"]) if "g2" in mapping else None,
        trials=int(mapping["trials"]),
        seed=int(mapping["seed"]),
        pointer=pointer,
        readout_split=float(mapping.get("readout_split", 0.5)),
    )


def config_to_mapping(config: ExperimentConfig) -> dict[str, str]:
    """Resolved key/value form; parsing it back reproduces the config."""
    out: dict[str, str] = {"format_version": "1", "dim": repr(config.dim)}
    if config.state.path is not None:
        out["state_file"] = config.state.path
    else:
        out["state_rank"] = repr(config.state.rank)
        out["state_seed"] = repr(config.state.seed)
    out.update(
        protocol=config.protocol,
        g=repr(config.g),
        trials=repr(config.trials),
        seed=repr(config.seed),
        readout_split=repr(config.readout_split),
        pointer_points=repr(config.pointer.grid_points),
        pointer_extent=repr(config.pointer.extent_sigmas),
        pointer_sigma=repr(config.pointer.sigma),
    )
    if config.g2 is not None:
        out["g2"] = repr(config.g2)
    return out


def resolve_state(config: ExperimentConfig) -> DensityOperator:
    """Materialize the ground-truth state described by the config."""
    if config.state.path is not None:
        from .io import read_state

        state = read_state(config.state.path)
        rho = state if isinstance(state, DensityOperator) else state.density()
    else:
        rho = random_density(config.dim, config.state.rank, config.state.seed)
    if rho.dim != config.dim:
        raise DimensionMismatchError(
            f"config dim {config.dim} != state dim {rho.dim}"
        )
    return rho


# ---------------------------------------------------------------------------
# trials
# ---------------------------------------------------------------------------

TrialRecord = namedtuple(
    "TrialRecord",
    ["trial_id", "scan_a", "readout_quadrature", "pointer_value",
     "system_outcome_b", "second_pointer_value"],
)

_QUADRATURE_NAMES = ("position", "momentum")


@dataclass(frozen=True, eq=False)
class TrialSet:
    """Columnar store of Monte Carlo trials (records view via indexing)."""

    trial_id: np.ndarray
    scan_a: np.ndarray
    quadrature: np.ndarray
    pointer_value: np.ndarray
    system_outcome_b: np.ndarray
    second_pointer_value: np.ndarray
    protocol: str

    def __len__(self) -> int:
        return self.trial_id.shape[0]

    def __getitem__(self, i: int) -> TrialRecord:
        return TrialRecord(
            trial_id=int(self.trial_id[i]),
            scan_a=int(self.scan_a[i]),
            readout_quadrature=_QUADRATURE_NAMES[self.quadrature[i]],
            pointer_value=float(self.pointer_value[i]),
            system_outcome_b=int(self.system_outcome_b[i]),
            second_pointer_value=float(self.second_pointer_value[i]),
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))


def _cdf_rows(masses: np.ndarray) -> np.ndarray:
    """Row-wise CDFs; all-zero rows become a uniform ramp (never drawn)."""
    masses = np.maximum(masses, 0.0)
    cdf = np.cumsum(masses, axis=-1)
    totals = cdf[..., -1:].copy()
    dead = totals[..., 0] <= DEAD_CELL_FLOOR
    if np.any(dead):
        k = masses.shape[-1]
        cdf[dead] = np.arange(1, k + 1, dtype=np.float64)
        totals[dead] = float(k)
    return cdf / totals


@dataclass(frozen=True, eq=False)
class ScanTables:
    """Exact joint distribution of (Fourier outcome, pointer readout) per scan
    setting, discretized on the pointer grids."""

    outcome_cdf: np.ndarray  # (N, N)  CDF over b for each a
    pos_cdf: np.ndarray      # (N*N, M) pointer-position CDF given (a, b)
    mom_cdf: np.ndarray      # (N*N, M) pointer-momentum CDF given (a, b)
    prob_b: np.ndarray       # (N, N)  joint branch probabilities
    xgrid: np.ndarray
    pgrid: np.ndarray


def scan_sampling_tables(
    rho: DensityOperator, g: float, pointer: PointerState
) -> ScanTables:
    n = rho.dim
    m = pointer.grid_points
    dx = pointer.grid_spacing
    basis = fourier_basis(n)
    xgrid = pointer.positions()
    pgrid = np.fft.fftshift(pointer.momenta())
    prob_b = np.empty((n, n))
    pos_mass = np.empty((n * n, m))
    mom_mass = np.empty((n * n, m))
    for a in range(n):
        joint = evolve_pointer(rho, Observable.standard_projector(n, a), pointer, g)
        phi = joint.branch_amps
        phi_f = np.fft.fft(phi, axis=1)
        for b in range(n):
            w = _branch_weights(joint, basis.vector(b))
            qx = np.maximum(np.real(np.sum((w.T @ phi) * phi.conj(), axis=0)) * dx, 0.0)
            qp = np.maximum(
                np.real(np.sum((w.T @ phi_f) * phi_f.conj(), axis=0)) * (dx / m), 0.0
            )
            prob_b[a, b] = qx.sum()
            pos_mass[a * n + b] = qx
            mom_mass[a * n + b] = np.fft.fftshift(qp)
    outcome_cdf = _cdf_rows(prob_b)
    return ScanTables(
        outcome_cdf=outcome_cdf,
        pos_cdf=_cdf_rows(pos_mass),
        mom_cdf=_cdf_rows(mom_mass),
        prob_b=prob_b,
        xgrid=xgrid,
        pgrid=pgrid,
    )


@dataclass(frozen=True, eq=False)
class JointTables:
    """Exact two-pointer joint distribution per (a, b) cell.

    Conditioned on whether the second projector's branch fired, pointer 1 is
    drawn from the matching branch distribution and pointer 2 from the
    displaced or undisplaced Gaussian; the second pointer is always read in
    position since its momentum carries no signal.
    """

    hit_prob: np.ndarray       # (N*N,) probability of the second-projector branch
    hit_pos_cdf: np.ndarray    # (N*N, M1)
    miss_pos_cdf: np.ndarray
    hit_mom_cdf: np.ndarray
    miss_mom_cdf: np.ndarray
    p2_hit_cdf: np.ndarray     # (M2,)
    p2_base_cdf: np.ndarray
    x1grid: np.ndarray
    p1grid: np.ndarray
    x2grid: np.ndarray


def joint_sampling_tables(
    rho: DensityOperator,
    g1: float,
    g2: float,
    pointers: tuple[PointerState, PointerState],
) -> JointTables:
    n = rho.dim
    p1, p2 = pointers
    m1 = p1.grid_points
    dx1 = p1.grid_spacing
    basis = fourier_basis(n)
    hit_prob = np.empty(n * n)
    hit_pos = np.empty((n * n, m1))
    miss_pos = np.empty((n * n, m1))
    hit_mom = np.empty((n * n, m1))
    miss_mom = np.empty((n * n, m1))
    for a in range(n):
        joint = evolve_pointer(rho, Observable.standard_projector(n, a), p1, g1)
        phi = joint.branch_amps
        phi_f = np.fft.fft(phi, axis=1)
        w_tot = np.diag(np.diag(joint.rho_eig))
        qx_tot = np.maximum(np.real(np.sum((w_tot.T @ phi) * phi.conj(), axis=0)) * dx1, 0.0)
        qp_tot = np.maximum(
            np.real(np.sum((w_tot.T @ phi_f) * phi_f.conj(), axis=0)) * (dx1 / m1), 0.0
        )
        qp_tot = np.fft.fftshift(qp_tot)
        for b in range(n):
            w = _branch_weights(joint, basis.vector(b))
            qx = np.maximum(np.real(np.sum((w.T @ phi) * phi.conj(), axis=0)) * dx1, 0.0)
            qp = np.fft.fftshift(
                np.maximum(np.real(np.sum((w.T @ phi_f) * phi_f.conj(), axis=0)) * (dx1 / m1), 0.0)
            )
            cell = a * n + b
            hit_prob[cell] = qx.sum()
            hit_pos[cell] = qx
            hit_mom[cell] = qp
            miss_pos[cell] = np.maximum(qx_tot - qx, 0.0)
            miss_mom[cell] = np.maximum(qp_tot - qp, 0.0)
    base2 = position_density(p2.amplitudes, p2.grid_spacing)
    shifted2 = position_density(
        displace(p2.amplitudes, p2.grid_spacing, g2), p2.grid_spacing
    )
    return JointTables(
        hit_prob=hit_prob,
        hit_pos_cdf=_cdf_rows(hit_pos),
        miss_pos_cdf=_cdf_rows(miss_pos),
        hit_mom_cdf=_cdf_rows(hit_mom),
        miss_mom_cdf=_cdf_rows(miss_mom),
        p2_hit_cdf=_cdf_rows(shifted2),
        p2_base_cdf=_cdf_rows(base2),
        x1grid=p1.positions(),
        p1grid=np.fft.fftshift(p1.momenta()),
        x2grid=p2.positions(),
    )


def _assignments(config: ExperimentConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Deterministic (scan_a, cell, quadrature) per trial.

    Cells rotate round-robin with trial id; the quadrature follows an exact
    Bresenham split of the per-cell occurrence counter so position/momentum
    stay balanced within every cell at any readout_split.
    """
    n = config.dim
    t = np.arange(config.trials, dtype=np.int64)
    if config.protocol == PROTOCOL_SCAN:
        cell = t % n
        scan_a = cell
        occurrence = t // n
    else:
        cell = t % (n * n)
        scan_a = cell // n
        occurrence = t // (n * n)
    f = config.readout_split
    quad = np.where(
        np.floor((occurrence + 1) * f) - np.floor(occurrence * f) >= 1.0, 0, 1
    ).astype(np.uint8)
    return scan_a, cell, quad


def sample_trials(config: ExperimentConfig) -> TrialSet:
    """Draw all trials from the exact post-measurement joint distributions."""
    rho = resolve_state(config)
    pointer = config.pointer.build()
    scan_a, cell, quad = _assignments(config)
    rng = np.random.default_rng(config.seed)
    n = config.trials
    if config.protocol == PROTOCOL_SCAN:
        u = rng.random((n, 2))
        tables = scan_sampling_tables(rho, config.g, pointer)
        b_idx, d = _kernels.scan_sample(
            tables.outcome_cdf,
            tables.pos_cdf,
            tables.mom_cdf,
            tables.xgrid,
            tables.pgrid,
            scan_a,
            quad,
            u[:, 0],
            u[:, 1],
        )
        outcome = b_idx.astype(np.int32)
        second = np.full(n, np.nan)
    else:
        u = rng.random((n, 3))
        p2 = config.pointer.build()
        tables = joint_sampling_tables(rho, config.g, config.second_coupling, (pointer, p2))
        _, d, second = _kernels.joint_sample(
            tables.hit_prob,
            tables.hit_pos_cdf,
            tables.miss_pos_cdf,
            tables.hit_mom_cdf,
            tables.miss_mom_cdf,
            tables.p2_hit_cdf,
            tables.p2_base_cdf,
            tables.x1grid,
            tables.p1grid,
            tables.x2grid,
            cell,
            quad,
            u[:, 0],
            u[:, 1],
            u[:, 2],
        )
        outcome = np.full(n, -1, dtype=np.int32)
    return TrialSet(
        trial_id=np.arange(n, dtype=np.int64),
        scan_a=scan_a.astype(np.int32),
        quadrature=quad,
        pointer_value=np.asarray(d, dtype=np.float64),
        system_outcome_b=outcome,
        second_pointer_value=second,
        protocol=config.protocol,
    )


# ---------------------------------------------------------------------------
# estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EstimateReport:
    """Monte Carlo estimate of the distribution with per-cell error bars.

    ``standard_errors`` combines both quadratures per cell; the component
    errors and counts are kept for diagnostics.  ``reconstruction`` is the
    symmetrized linear inversion (no PSD projection unless requested) and is
    None when any cell is flagged for lack of data.
    """

    dirac_estimate: DiracDistribution
    standard_errors: np.ndarray
    trials_used: int
    trace_distance_to_truth: float | None
    se_real: np.ndarray
    se_imag: np.ndarray
    cell_counts: np.ndarray
    flagged_cells: np.ndarray
    reconstruction: np.ndarray | None
    calibration: PointerCalibration


def estimate_dirac(
    trials: TrialSet,
    config: ExperimentConfig,
    clip_psd: bool = False,
    truth: DensityOperator | None = None,
) -> EstimateReport:
    """Empirical estimator: cell value = readout gain times the mean of the
    per-trial statistic; real part from position trials, imaginary from
    momentum trials; errors from per-cell sample variance."""
    if len(trials) == 0:
        raise ValueError("no trials to estimate from")
    if len(trials) != config.trials:
        raise ValueError(
            f"trial set holds {len(trials)} records but config says {config.trials}"
        )
    if trials.protocol != config.protocol:
        raise ValueError(
            f"trial set from protocol {trials.protocol!r}, config says {config.protocol!r}"
        )
    n = config.dim
    pointer = config.pointer.build()
    calibration = calibrate_pointer_response(pointer, config.g)
    scan_a, cell, quad = _assignments(config)
    quad64 = quad.astype(np.int64)
    if config.protocol == PROTOCOL_SCAN:
        b_obs = trials.system_outcome_b.astype(np.int64)
        bins = (scan_a * n + b_obs) * 2 + quad64
        stat = trials.pointer_value
        counts_group = np.bincount(scan_a * 2 + quad64, minlength=n * 2)
        gains = (
            1.0 / (config.g * calibration.c_x),
            1.0 / (config.g * calibration.c_p),
        )
    else:
        bins = cell * 2 + quad64
        stat = trials.pointer_value * trials.second_pointer_value
        counts_group = np.bincount(bins, minlength=n * n * 2)
        g1g2 = config.g * config.second_coupling
        gains = (1.0 / (g1g2 * calibration.c_x), 1.0 / (g1g2 * calibration.c_p))
    sums, sumsq = _kernels.accumulate(bins, stat, n * n * 2)
    sums = sums.reshape(n, n, 2)
    sumsq = sumsq.reshape(n, n, 2)
    if config.protocol == PROTOCOL_SCAN:
        per_cell_counts = np.repeat(
            counts_group.reshape(n, 2)[:, None, :], n, axis=1
        ).astype(np.int64)
    else:
        per_cell_counts = counts_group.reshape(n, n, 2).astype(np.int64)

    means = np.full((n, n, 2), np.nan)
    ok = per_cell_counts > 0
    cnt = np.where(ok, per_cell_counts, 1)
    means[ok] = (sums / cnt)[ok]
    with np.errstate(invalid="ignore", divide="ignore"):
        var = sumsq / cnt - (sums / cnt) ** 2
        var = np.maximum(var, 0.0)
        enough = per_cell_counts > 1
        corrected = np.where(enough, var * cnt / np.maximum(cnt - 1, 1), np.nan)
        ses = np.sqrt(corrected / cnt)
    values = means[:, :, 0] * gains[0] + 1j * means[:, :, 1] * gains[1]
    se_real = ses[:, :, 0] * gains[0]
    se_imag = ses[:, :, 1] * gains[1]
    flagged = ~ok.all(axis=2)
    estimate = DiracDistribution(values, check=False)
    combined_se = np.hypot(
        np.nan_to_num(se_real, nan=np.inf), np.nan_to_num(se_imag, nan=np.inf)
    )
    reconstruction = None
    distance = None
    if not flagged.any():
        raw = invert_values(values)
        reconstruction = (raw + raw.conj().T) / 2
        if clip_psd:
            reconstruction = clip_to_physical(reconstruction)
        truth_op = truth if truth is not None else resolve_state(config)
        distance = trace_distance(reconstruction, truth_op.matrix)
    return EstimateReport(
        dirac_estimate=estimate,
        standard_errors=combined_se,
        trials_used=len(trials),
        trace_distance_to_truth=distance,
        se_real=se_real,
        se_imag=se_imag,
        cell_counts=per_cell_counts,
        flagged_cells=flagged,
        reconstruction=reconstruction,
        calibration=calibration,
    )


def clip_to_physical(matrix: np.ndarray) -> np.ndarray:
    """Project a Hermitian matrix onto the PSD cone and renormalize the trace."""
    sym = (matrix + matrix.conj().T) / 2
    evals, evecs = np.linalg.eigh(sym)
    evals = np.clip(evals, 0.0, None)
    total = evals.sum()
    if total <= 0:
        raise RankDeficiencyError("clipped matrix has no positive weight")
    evals /= total
    return (evecs * evals) @ evecs.conj().T


def exact_expectation_estimate(config: ExperimentConfig) -> DiracDistribution:
    """Infinite-trial limit: the per-cell sums evaluated analytically."""
    rho = resolve_state(config)
    pointer = config.pointer.build()
    if config.protocol == PROTOCOL_SCAN:
        return scan_protocol(rho, config.g, pointer)
    return joint_weak_scan(
        rho, config.g, config.second_coupling, (pointer, config.pointer.build())
    )


# ---------------------------------------------------------------------------
# SNR study
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SnrRow:
    protocol: str
    n_weak_ops: int
    g: float
    trials: int
    mean_abs_error: float
    mean_se: float
    snr_per_trial: float
    flagged: bool


@dataclass(frozen=True)
class ExponentRow:
    g: float
    trials: int
    snr_single: float
    snr_joint: float
    exponent: float


@dataclass(frozen=True, eq=False)
class SnrStudyResult:
    rows: list[SnrRow]
    se_slopes: dict[tuple[str, float], float]
    exponents: list[ExponentRow]


def _per_trial_snr(report: EstimateReport, analytic: np.ndarray) -> float:
    """Mean |signal| over mean per-trial noise, averaging both quadratures.

    The per-trial noise of each component is its standard error scaled back
    by sqrt(count); with that normalization the joint protocol's SNR should
    behave like the square of the single-pointer SNR at matched settings.
    """
    counts = report.cell_counts
    var_re = np.square(report.se_real) * counts[:, :, 0]
    var_im = np.square(report.se_imag) * counts[:, :, 1]
    noise = np.sqrt((var_re + var_im) / 2.0)
    return float(np.mean(np.abs(analytic)) / np.mean(noise))


def snr_study(
    config: ExperimentConfig,
    trial_ladder: list[int],
    g_ladder: list[float],
) -> SnrStudyResult:
    """Sweep trials and couplings over both protocols.

    Reports per-(protocol, g, M) error and standard-error summaries, fits the
    log-log slope of SE versus M (expected -1/2), and at each matched (g, M)
    forms log(SNR_joint)/log(SNR_single) from the per-trial SNRs.
    """
    if not trial_ladder or not g_ladder:
        raise ValueError("trial and coupling ladders must be nonempty")
    truth = resolve_state(config)
    analytic = dirac_from_density(truth).values
    rows: list[SnrRow] = []
    snr_table: dict[tuple[float, int, str], float] = {}
    for i, g in enumerate(g_ladder):
        for j, trials in enumerate(trial_ladder):
            for proto, n_ops in ((PROTOCOL_SCAN, 1), (PROTOCOL_JOINT, 2)):
                run_cfg = replace(
                    config,
                    protocol=proto,
                    g=g,
                    g2=g,
                    trials=trials,
                    seed=config.seed + 7919 * i + 104729 * j + (0 if n_ops == 1 else 15485863),
                )
                report = estimate_dirac(sample_trials(run_cfg), run_cfg, truth=truth)
                flagged = bool(report.flagged_cells.any())
                err = float(np.nanmean(np.abs(report.dirac_estimate.values - analytic)))
                se = float(np.nanmean(np.where(np.isfinite(report.standard_errors),
                                               report.standard_errors, np.nan)))
                snr = np.nan if flagged else _per_trial_snr(report, analytic)
                snr_table[(g, trials, proto)] = snr
                rows.append(
                    SnrRow(proto, n_ops, g, trials, err, se, snr, flagged)
                )
    slopes: dict[tuple[str, float], float] = {}
    for proto in (PROTOCOL_SCAN, PROTOCOL_JOINT):
        for g in g_ladder:
            pts = [
                (np.log(r.trials), np.log(r.mean_se))
                for r in rows
                if r.protocol == proto and r.g == g and np.isfinite(r.mean_se)
            ]
            if len(pts) >= 3:
                xs, ys = zip(*pts)
                slopes[(proto, g)] = float(np.polyfit(xs, ys, 1)[0])
    exponents = [
        ExponentRow(
            g=g,
            trials=trials,
            snr_single=snr_table[(g, trials, PROTOCOL_SCAN)],
            snr_joint=snr_table[(g, trials, PROTOCOL_JOINT)],
            exponent=float(
                np.log(snr_table[(g, trials, PROTOCOL_JOINT)])
                / np.log(snr_table[(g, trials, PROTOCOL_SCAN)])
            )
            if 0 < snr_table[(g, trials, PROTOCOL_SCAN)] < 1
            and 0 < snr_table[(g, trials, PROTOCOL_JOINT)] < 1
            else np.nan,
        )
        for g in g_ladder
        for trials in trial_ladder
    ]
    return SnrStudyResult(rows=rows, se_slopes=slopes, exponents=exponents)


# ---------------------------------------------------------------------------
# baseline: linear-inversion tomography
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TomographyResult:
    estimate: np.ndarray
    trace_distance: float
    bases_used: int


def _haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r)
    return q * (phases / np.abs(phases))


def baseline_tomography(
    rho: DensityOperator,
    trials: int,
    seed: int,
    bases: int | None = None,
    exact: bool = False,
) -> TomographyResult:
    """Projective tomography in seeded Haar-random bases with least-squares
    inversion.

    Needs at least N+1 bases to be informationally complete; contrast with
    the direct scan, which uses only the fixed standard/Fourier pair.  With
    ``exact`` the true outcome probabilities replace sampled frequencies.
    """
    n = rho.dim
    n_bases = int(bases) if bases is not None else n + 1
    if n_bases < 1:
        raise ValueError("bases must be >= 1")
    if not exact and trials < n * n:
        raise ValueError(f"need at least N^2 = {n * n} trials, got {trials}")
    rng = np.random.default_rng(seed)
    design = np.empty((n_bases * n, n * n), dtype=np.complex128)
    freqs = np.empty(n_bases * n)
    shots_per_basis = max(1, trials // n_bases)
    for k in range(n_bases):
        u = _haar_unitary(n, rng)
        probs = np.real(np.einsum("ij,jk,ik->i", u.conj().T, rho.matrix, u.T))
        probs = np.clip(probs, 0.0, None)
        probs /= probs.sum()
        if exact:
            f = probs
        else:
            f = rng.multinomial(shots_per_basis, probs) / shots_per_basis
        for i in range(n):
            vec = u[:, i]
            design[k * n + i] = np.outer(vec.conj(), vec).ravel()
            freqs[k * n + i] = f[i]
    rank = np.linalg.matrix_rank(design)
    if rank < n * n:
        raise RankDeficiencyError(
            f"measurement set spans rank {rank} < {n * n}; add bases"
        )
    solution = np.linalg.lstsq(design, freqs.astype(np.complex128), rcond=None)[0]
    estimate = solution.reshape(n, n)
    estimate = (estimate + estimate.conj().T) / 2
    estimate /= np.real(np.trace(estimate))
    return TomographyResult(
        estimate=estimate,
        trace_distance=trace_distance(estimate, rho.matrix),
        bases_used=n_bases,
    )
