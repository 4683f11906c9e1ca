"""Reproducible experiment drivers.

* ``zero_inertia_study``    couples the second-order scheme against the
  first-order one on a ladder of inertia values, with shared initial clouds
  and shared noise tapes, and fits the log-log rate of the sup-in-time paired
  mean-square gap.
* ``compare_distributions`` emits per-time W2 / KL between the coupled clouds.
* ``optimize``              runs one scheme to its horizon and reports the
  final consensus point and mean particle speed.
* ``laplace_sweep``         tabulates the exponential-average value against
  the sample minimum over a ladder of regularization strengths.

All drivers are deterministic functions of their seeds; replicate cells are
independent and may be evaluated by a worker pool without changing a single
bit of the output (aggregation is a fixed-order fold over preallocated slots).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .consensus import laplace_value
from .dynamics import Params, RunRecord, run
from .metrics import default_bins, kl_histogram, paired_msq_gap, wasserstein2_1d
from .noise import NoiseTape, initial_positions

GAP_METRIC_PLAIN = "paired_msq_gap(x)"
GAP_METRIC_JOINT = "paired_msq_gap(x)+paired_msq_gap(y)"


@dataclass(frozen=True)
class LimitStudyConfig:
    """Ladder study setup: everything but the inertia value itself."""

    m_ladder: tuple[float, ...]
    base: Params
    replicates: int = 20
    scheme_pair: str = "plain"  # "plain" or "memory"
    init: tuple = ("gaussian", 0.0, 1.0)
    v0: np.ndarray | None = None  # zeros unless configured

    def __post_init__(self):
        ladder = tuple(float(m) for m in self.m_ladder)
        object.__setattr__(self, "m_ladder", ladder)
        if not ladder:
            raise ValueError("m_ladder must be nonempty")
        if any(not 0.0 < m <= 0.5 for m in ladder):
            raise ValueError(f"m_ladder values must lie in (0, 1/2], got {ladder}")
        if any(b >= a for a, b in zip(ladder, ladder[1:])) and len(ladder) > 1:
            raise ValueError(f"m_ladder must be strictly decreasing, got {ladder}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.scheme_pair not in ("plain", "memory"):
            raise ValueError(f"scheme_pair must be plain or memory, got {self.scheme_pair!r}")
        if self.scheme_pair == "memory" and self.base.memory is None:
            raise ValueError("memory scheme pair needs base.memory params")


@dataclass
class StudyResult:
    """Per-ladder-point gaps, their aggregate, and the fitted rate."""

    m_values: np.ndarray          # (n_m,)
    sup_gaps: np.ndarray          # (n_m, replicates)
    gap_mean: np.ndarray          # (n_m,)
    gap_stderr: np.ndarray        # (n_m,)
    slope: float
    intercept: float
    times: np.ndarray             # (n_steps + 1,)
    w2_mean: np.ndarray | None    # (n_m, n_steps + 1), d = 1 plain pair only
    kl_mean: np.ndarray | None
    gap_metric: str
    estimator: str
    bins: int | None
    seed: int
    scheme_pair: str


def _gap_series(first: RunRecord, second: RunRecord, joint: bool) -> np.ndarray:
    steps = first.snapshot_steps
    gaps = np.empty(len(steps))
    for idx in range(len(steps)):
        g = paired_msq_gap(first.snapshot_x[idx], second.snapshot_x[idx])
        if joint:
            g += paired_msq_gap(first.snapshot_y[idx], second.snapshot_y[idx])
        gaps[idx] = g
    return gaps


def zero_inertia_study(cfg: LimitStudyConfig, obj, seed: int,
                       workers: int = 1) -> StudyResult:
    """Coupled ladder study of the sup-in-time paired mean-square gap.

    For each replicate the first-order reference run is computed once (it does
    not depend on the inertia) and every ladder point reuses it together with
    the identical tape and initial cloud.  The rate is the least-squares slope
    of ``ln(mean gap)`` against ``ln m`` over all ladder points.
    """
    base = cfg.base
    memory = cfg.scheme_pair == "memory"
    second_order = "pso_mem" if memory else "pso"
    first_order = "cbo_mem" if memory else "cbo"
    n_steps = base.n_steps
    n_m = len(cfg.m_ladder)
    reps = cfg.replicates
    track_dist = base.dim == 1 and not memory
    bins = default_bins(base.n_particles) if track_dist else None

    tape = NoiseTape(seed, reps, base.n_particles, n_steps, base.dim,
                     channels=2 if memory else 1)

    sup_gaps = np.empty((n_m, reps))
    w2 = np.zeros((n_m, n_steps + 1)) if track_dist else None
    kl = np.zeros((n_m, n_steps + 1)) if track_dist else None
    times = np.empty(0)

    def replicate_cell(r: int):
        x0 = initial_positions([seed, r], base.n_particles, base.dim, cfg.init)
        ref = run(first_order, base, obj, tape, r, x0, y0=None, snapshot_every=1)
        g_row = np.empty(n_m)
        w2_rows = np.empty((n_m, n_steps + 1)) if track_dist else None
        kl_rows = np.empty((n_m, n_steps + 1)) if track_dist else None
        for j, m in enumerate(cfg.m_ladder):
            p_m = replace(base, m=m)
            rec = run(second_order, p_m, obj, tape, r, x0, v0=cfg.v0,
                      snapshot_every=1)
            g_row[j] = _gap_series(rec, ref, joint=memory).max()
            if track_dist:
                for t in range(n_steps + 1):
                    a = rec.snapshot_x[t][:, 0]
                    b = ref.snapshot_x[t][:, 0]
                    w2_rows[j, t] = wasserstein2_1d(a, b)
                    kl_rows[j, t] = kl_histogram(a, b, bins)
        return ref.times, g_row, w2_rows, kl_rows

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(replicate_cell, range(reps)))
    else:
        cells = [replicate_cell(r) for r in range(reps)]

    for r, (run_times, g_row, w2_rows, kl_rows) in enumerate(cells):
        times = run_times
        sup_gaps[:, r] = g_row
        if track_dist:
            w2 += w2_rows
            kl += kl_rows
    if track_dist:
        w2 /= reps
        kl /= reps

    gap_mean = sup_gaps.mean(axis=1)
    if reps > 1:
        gap_stderr = sup_gaps.std(axis=1, ddof=1) / np.sqrt(reps)
    else:
        gap_stderr = np.zeros(n_m)

    if n_m >= 2 and np.all(gap_mean > 0.0):
        log_m = np.log(np.asarray(cfg.m_ladder))
        slope, intercept = np.polyfit(log_m, np.log(gap_mean), 1)
    else:
        # degenerate ladders (single point or frozen dynamics) have no rate
        slope, intercept = np.nan, np.nan

    return StudyResult(
        m_values=np.asarray(cfg.m_ladder),
        sup_gaps=sup_gaps,
        gap_mean=gap_mean,
        gap_stderr=gap_stderr,
        slope=float(slope),
        intercept=float(intercept),
        times=times,
        w2_mean=w2,
        kl_mean=kl,
        gap_metric=GAP_METRIC_JOINT if memory else GAP_METRIC_PLAIN,
        estimator=f"replicates(R={reps})" if reps > 1 else "single-run",
        bins=bins,
        seed=seed,
        scheme_pair=cfg.scheme_pair,
    )


@dataclass
class CompareTable:
    """Per-time W2 and KL between the coupled second- and first-order clouds."""

    times: np.ndarray
    w2: np.ndarray
    kl: np.ndarray
    m: float
    bins: int
    seed: int


def compare_distributions(p: Params, obj, seed: int, snapshot_times=None,
                          init: tuple = ("gaussian", 0.0, 1.0),
                          bins: int | None = None) -> CompareTable:
    """Couple one PSO(m) run against CBO and compare clouds at snapshot times.

    Requires ``dim == 1`` (the exact order-statistics W2).  ``snapshot_times``
    defaults to every step; values are matched to the nearest step.
    """
    if p.dim != 1:
        raise ValueError("compare_distributions requires dim == 1")
    n_steps = p.n_steps
    tape = NoiseTape(seed, 1, p.n_particles, n_steps, p.dim, channels=1)
    x0 = initial_positions([seed, 0], p.n_particles, p.dim, init)
    pso_rec = run("pso", p, obj, tape, 0, x0, snapshot_every=1)
    cbo_rec = run("cbo", p, obj, tape, 0, x0, snapshot_every=1)

    if snapshot_times is None:
        steps = np.arange(n_steps + 1)
    else:
        steps = np.unique([
            min(n_steps, max(0, round(t / p.dt))) for t in snapshot_times
        ]).astype(int)
    if bins is None:
        bins = default_bins(p.n_particles)

    w2 = np.empty(len(steps))
    kl = np.empty(len(steps))
    for out_idx, t in enumerate(steps):
        a = pso_rec.snapshot_x[t][:, 0]
        b = cbo_rec.snapshot_x[t][:, 0]
        w2[out_idx] = wasserstein2_1d(a, b)
        kl[out_idx] = kl_histogram(a, b, bins)
    return CompareTable(times=pso_rec.times[steps], w2=w2, kl=kl, m=p.m,
                        bins=bins, seed=seed)


def optimize(scheme: str, p: Params, obj, seed: int, t_end: float | None = None,
             init: tuple = ("gaussian", 0.0, 1.0)) -> tuple[np.ndarray, float]:
    """Run one scheme to its horizon; return (final consensus, mean speed).

    Mean speed is the particle-average Euclidean velocity norm, identically 0
    for the first-order schemes.
    """
    if t_end is not None:
        p = replace(p, t_end=t_end)
    tape = NoiseTape(seed, 1, p.n_particles, p.n_steps, p.dim,
                     channels=2 if scheme.endswith("_mem") else 1)
    x0 = initial_positions([seed, 0], p.n_particles, p.dim, init)
    rec = run(scheme, p, obj, tape, 0, x0)
    final = rec.final
    if final.v is not None:
        mean_speed = float(np.mean(np.linalg.norm(final.v, axis=1)))
    else:
        mean_speed = 0.0
    return rec.consensus[-1], mean_speed


def laplace_sweep(points, obj, alphas) -> list[tuple[float, float, float]]:
    """Rows (alpha, exponential-average value, gap to the sample minimum)."""
    alphas = [float(a) for a in alphas]
    if any(a <= 0 for a in alphas):
        raise ValueError("alphas must be positive")
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alphas must be increasing")
    pts = np.asarray(points, dtype=np.float64)
    costs = np.asarray(obj(pts), dtype=np.float64)
    low = float(costs.min())
    rows = []
    for a in alphas:
        value = laplace_value(pts, obj, a)
        rows.append((a, value, value - low))
    return rows
