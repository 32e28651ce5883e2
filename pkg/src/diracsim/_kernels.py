"""Hot sampling/accumulation kernels with numba and pure-numpy backends.

The numba path is selected by default; set DIRACSIM_NO_NUMBA=1 (or install
without numba) to force the vectorized numpy fallback.  Both backends make
bit-identical choices: inverse-CDF lookups use the same binary search
semantics as ``np.searchsorted(..., side="right")`` and per-bin floating
accumulation runs in trial order, so estimates do not depend on the backend
or on thread count.  ``benchmarks/bench_kernels.py`` times the two paths
against each other and asserts equality.
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("DIRACSIM_NO_NUMBA", "").strip().lower()
NUMBA_REQUESTED = _flag not in ("1", "true", "yes", "on")
NUMBA_ACTIVE = False

if NUMBA_REQUESTED:
    try:
        from numba import njit, prange

        NUMBA_ACTIVE = True
    except ImportError:  # pragma: no cover - numba is a hard dependency
        NUMBA_ACTIVE = False


def backend_name() -> str:
    return "numba" if NUMBA_ACTIVE else "numpy"


def set_threads(n: int | None) -> None:
    """Cap numba's thread pool; no-op on the numpy backend."""
    if not NUMBA_ACTIVE or n is None:
        return
    import numba

    numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------

def _draw_rows_numpy(cdfs: np.ndarray, rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Per-trial inverse-CDF draw where trial t uses table row rows[t]."""
    k = cdfs.shape[1]
    out = np.empty(rows.shape[0], dtype=np.int64)
    for r in np.unique(rows):
        mask = rows == r
        out[mask] = np.searchsorted(cdfs[r], u[mask], side="right")
    return np.minimum(out, k - 1)


def scan_sample_numpy(outcome_cdf, pos_cdf, mom_cdf, xgrid, pgrid, scan_a, quad, u1, u2):
    n_outcomes = outcome_cdf.shape[1]
    b_idx = _draw_rows_numpy(outcome_cdf, scan_a, u1)
    rows = scan_a * n_outcomes + b_idx
    d = np.empty(scan_a.shape[0], dtype=np.float64)
    pos = quad == 0
    d[pos] = xgrid[_draw_rows_numpy(pos_cdf, rows[pos], u2[pos])]
    d[~pos] = pgrid[_draw_rows_numpy(mom_cdf, rows[~pos], u2[~pos])]
    return b_idx, d


def joint_sample_numpy(
    hit_prob,
    hit_pos_cdf,
    miss_pos_cdf,
    hit_mom_cdf,
    miss_mom_cdf,
    p2_hit_cdf,
    p2_base_cdf,
    x1grid,
    p1grid,
    x2grid,
    cell,
    quad,
    u1,
    u2,
    u3,
):
    n = cell.shape[0]
    hit = u1 < hit_prob[cell]
    d1 = np.empty(n, dtype=np.float64)
    for is_hit, pos_tab, mom_tab in (
        (True, hit_pos_cdf, hit_mom_cdf),
        (False, miss_pos_cdf, miss_mom_cdf),
    ):
        sel = hit == is_hit
        pos = sel & (quad == 0)
        mom = sel & (quad == 1)
        d1[pos] = x1grid[_draw_rows_numpy(pos_tab, cell[pos], u2[pos])]
        d1[mom] = p1grid[_draw_rows_numpy(mom_tab, cell[mom], u2[mom])]
    m2 = p2_hit_cdf.shape[0]
    idx2 = np.empty(n, dtype=np.int64)
    idx2[hit] = np.searchsorted(p2_hit_cdf, u3[hit], side="right")
    idx2[~hit] = np.searchsorted(p2_base_cdf, u3[~hit], side="right")
    d2 = x2grid[np.minimum(idx2, m2 - 1)]
    return hit, d1, d2


def accumulate_numpy(bins, w, n_bins):
    """Per-bin sum and sum of squares, accumulated in trial order."""
    sums = np.zeros(n_bins, dtype=np.float64)
    sumsq = np.zeros(n_bins, dtype=np.float64)
    np.add.at(sums, bins, w)
    np.add.at(sumsq, bins, w * w)
    return sums, sumsq


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

if NUMBA_ACTIVE:

    @njit(cache=True, inline="always")
    def _bisect_right(cdf, u):
        # identical comparisons to np.searchsorted(cdf, u, side="right")
        lo = 0
        hi = cdf.shape[0]
        while lo < hi:
            mid = (lo + hi) >> 1
            if u < cdf[mid]:
                hi = mid
            else:
                lo = mid + 1
        if lo >= cdf.shape[0]:
            lo = cdf.shape[0] - 1
        return lo

    @njit(cache=True, parallel=True)
    def _scan_sample_numba(outcome_cdf, pos_cdf, mom_cdf, xgrid, pgrid, scan_a, quad, u1, u2):
        n = scan_a.shape[0]
        n_outcomes = outcome_cdf.shape[1]
        b_idx = np.empty(n, dtype=np.int64)
        d = np.empty(n, dtype=np.float64)
        for t in prange(n):
            a = scan_a[t]
            b = _bisect_right(outcome_cdf[a], u1[t])
            b_idx[t] = b
            row = a * n_outcomes + b
            if quad[t] == 0:
                d[t] = xgrid[_bisect_right(pos_cdf[row], u2[t])]
            else:
                d[t] = pgrid[_bisect_right(mom_cdf[row], u2[t])]
        return b_idx, d

    @njit(cache=True, parallel=True)
    def _joint_sample_numba(
        hit_prob,
        hit_pos_cdf,
        miss_pos_cdf,
        hit_mom_cdf,
        miss_mom_cdf,
        p2_hit_cdf,
        p2_base_cdf,
        x1grid,
        p1grid,
        x2grid,
        cell,
        quad,
        u1,
        u2,
        u3,
    ):
        n = cell.shape[0]
        hit = np.empty(n, dtype=np.bool_)
        d1 = np.empty(n, dtype=np.float64)
        d2 = np.empty(n, dtype=np.float64)
        for t in prange(n):
            c = cell[t]
            h = u1[t] < hit_prob[c]
            hit[t] = h
            if h:
                if quad[t] == 0:
                    d1[t] = x1grid[_bisect_right(hit_pos_cdf[c], u2[t])]
                else:
                    d1[t] = p1grid[_bisect_right(hit_mom_cdf[c], u2[t])]
                d2[t] = x2grid[_bisect_right(p2_hit_cdf, u3[t])]
            else:
                if quad[t] == 0:
                    d1[t] = x1grid[_bisect_right(miss_pos_cdf[c], u2[t])]
                else:
                    d1[t] = p1grid[_bisect_right(miss_mom_cdf[c], u2[t])]
                d2[t] = x2grid[_bisect_right(p2_base_cdf, u3[t])]
        return hit, d1, d2

    @njit(cache=True)
    def _accumulate_numba(bins, w, n_bins):
        sums = np.zeros(n_bins, dtype=np.float64)
        sumsq = np.zeros(n_bins, dtype=np.float64)
        for t in range(bins.shape[0]):
            b = bins[t]
            v = w[t]
            sums[b] += v
            sumsq[b] += v * v
        return sums, sumsq

    def scan_sample_numba(outcome_cdf, pos_cdf, mom_cdf, xgrid, pgrid, scan_a, quad, u1, u2):
        return _scan_sample_numba(
            outcome_cdf, pos_cdf, mom_cdf, xgrid, pgrid, scan_a, quad, u1, u2
        )

    def joint_sample_numba(*args):
        return _joint_sample_numba(*args)

    def accumulate_numba(bins, w, n_bins):
        return _accumulate_numba(bins, w, n_bins)

    scan_sample = scan_sample_numba
    joint_sample = joint_sample_numba
    accumulate = accumulate_numba
else:
    scan_sample = scan_sample_numpy
    joint_sample = joint_sample_numpy
    accumulate = accumulate_numpy
