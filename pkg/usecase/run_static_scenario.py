# usecase/run_static_scenario.py
"""
Use Case: RunStaticScenarioInteractor
---------------------------------
  * Called by the `static` command
  * Fixed-geometry Monte Carlo of the two-way protocol:
      1. Per instance draw clock B's offset and skew from its own random stream
      2. Simulate pairs born at A (A1 local, B2 remote) and at B (B1 local, A2 remote)
      3. Optionally undo the skew (known value or grid search)
      4. Correlate both directions and estimate the offset
  * Instances that find no correlation peak count as failures
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial
from typing import Dict, List, Optional, Protocol, Sequence, Tuple, runtime_checkable

import numpy as np
import structlog

from domain.correlation import average_offsets, cross_correlate, estimate_offset, estimate_skew, lag_window
from domain.entities import (
    ClockModel,
    CorrelationDirection,
    OffsetEstimate,
    SkewCompensation,
    SkewMode,
    StaticScenario,
    StaticSummary,
    TimestampSeries,
)
from domain.errors import NoPeakError
from domain.timestamps import (
    apply_skew_compensation,
    coincidence_count,
    generate_pair_events,
    transmit_and_detect,
)
from usecase.build_traces import TaskPool

logger = structlog.get_logger(__name__)

# candidate skews tried by the grid search, spanning +/- the configured magnitude
SKEW_SEARCH_POINTS = 21


# --------------------------------------------------------------------------- #
# 1. One instance
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class InstanceResult:
    index: int
    true_offset_s: float
    skew: float
    estimate: Optional[OffsetEstimate]
    snr: float
    coincidences: int
    series: Dict[str, TimestampSeries] = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return bool(self.estimate is not None and self.estimate.success)

    @property
    def error_s(self) -> float:
        if self.estimate is None or self.estimate.error_s is None:
            return math.nan
        return self.estimate.error_s


def instance_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream per instance, stable under any worker count"""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _draw_skew(sc: StaticScenario, rng: np.random.Generator) -> float:
    if sc.skew_mode is SkewMode.UNIFORM:
        return float(rng.uniform(-sc.skew, sc.skew))
    return sc.skew if rng.random() < 0.5 else -sc.skew


def _acquire(
    sc: StaticScenario, clock_a: ClockModel, clock_b: ClockModel, rng: np.random.Generator,
) -> Dict[str, TimestampSeries]:
    """One acquisition window at both ends"""
    T = sc.acquisition_s
    d = sc.detectors
    from_a = generate_pair_events(sc.pair_rate, T, rng)
    a1 = transmit_and_detect(from_a, sc.local_loss_db, d["A1"], clock_a, 0.0, rng, T, "A1")
    b2 = transmit_and_detect(from_a, sc.link_loss_db, d["B2"], clock_b, sc.propagation_delay_s, rng, T, "B2")
    from_b = generate_pair_events(sc.pair_rate, T, rng)
    b1 = transmit_and_detect(from_b, sc.local_loss_db, d["B1"], clock_b, 0.0, rng, T, "B1")
    a2 = transmit_and_detect(from_b, sc.link_loss_db, d["A2"], clock_a, sc.propagation_delay_s, rng, T, "A2")
    return {"A1": a1, "A2": a2, "B1": b1, "B2": b2}


def _compensate(
    sc: StaticScenario, series: Dict[str, TimestampSeries], skew: float, window: Tuple[float, float],
) -> Dict[str, TimestampSeries]:
    if sc.compensation is SkewCompensation.NONE:
        return series
    if sc.compensation is SkewCompensation.KNOWN:
        assumed = skew
    else:
        limit = abs(sc.skew)
        candidates = np.linspace(-limit, limit, SKEW_SEARCH_POINTS) if limit > 0 else np.zeros(1)
        assumed, _ = estimate_skew(
            series["A1"], series["B2"], candidates, window, skewed_is_remote=True, period_s=sc.correlation_period_s,
        )
    return {
        **series,
        "B1": apply_skew_compensation(series["B1"], assumed),
        "B2": apply_skew_compensation(series["B2"], assumed),
    }


def run_instance(sc: StaticScenario, index: int, keep_series: bool = False) -> InstanceResult:
    rng = instance_rng(sc.seed, index)
    offset = float(rng.uniform(0.0, sc.offset_max_s))
    if sc.whole_tick_offset:
        offset = round(offset / sc.resolution_s) * sc.resolution_s
    skew = _draw_skew(sc, rng)
    clock_a = ClockModel()
    clock_b = ClockModel(offset_s=offset, skew=skew)
    window = lag_window(sc.propagation_delay_s, sc.search_half_width_s)
    frame = sc.correlation_period_s

    estimates: List[OffsetEstimate] = []
    snrs: List[float] = []
    coincidences = 0
    kept: Dict[str, TimestampSeries] = {}
    for w in range(sc.windows_per_estimate):
        series = _acquire(sc, clock_a, clock_b, rng)
        coincidences += coincidence_count(series["A1"], series["B2"]) + coincidence_count(series["B1"], series["A2"])
        if keep_series and w == 0:
            kept = series
        series = _compensate(sc, series, skew, window)
        try:
            c_ab = cross_correlate(series["A1"], series["B2"], window, CorrelationDirection.AB, period_s=frame)
            c_ba = cross_correlate(series["B1"], series["A2"], window, CorrelationDirection.BA, period_s=frame)
        except NoPeakError:
            continue
        estimates.append(estimate_offset(c_ab, c_ba, offset, sc.success_threshold_s))
        snrs.append(0.5 * (c_ab.snr + c_ba.snr))

    if not estimates:
        estimate = None
    elif len(estimates) == 1:
        estimate = estimates[0]
    else:
        estimate, _ = average_offsets(estimates, offset, sc.success_threshold_s)

    return InstanceResult(
        index=index,
        true_offset_s=offset,
        skew=skew,
        estimate=estimate,
        snr=float(np.mean(snrs)) if snrs else math.nan,
        coincidences=coincidences,
        series=kept,
    )


# --------------------------------------------------------------------------- #
# 2. Aggregation
# --------------------------------------------------------------------------- #
def _mean_sd(values: np.ndarray) -> Tuple[float, float]:
    values = values[np.isfinite(values)]
    if values.size == 0:
        return math.nan, math.nan
    return float(values.mean()), float(values.std())


def summarize(sc: StaticScenario, results: Sequence[InstanceResult]) -> StaticSummary:
    n = len(results)
    success = np.array([r.success for r in results], dtype=bool)
    errors_ps = np.abs(np.array([r.error_s for r in results], dtype=float)) * 1e12
    snrs = np.array([r.snr for r in results], dtype=float)
    # two directions per window
    per_direction = np.array([r.coincidences for r in results], dtype=float) / (2.0 * sc.windows_per_estimate)

    snr_mean, snr_sd = _mean_sd(snrs)
    err_mean, err_sd = _mean_sd(errors_ps)
    ok_mean, ok_sd = _mean_sd(errors_ps[success])
    return StaticSummary(
        label=sc.label,
        loss_db=sc.link_loss_db,
        acquisition_s=sc.acquisition_s,
        n_instances=n,
        success_pct=100.0 * float(success.mean()) if n else math.nan,
        mean_ebit_rate=sc.analytic_ebit_rate,
        measured_ebit_rate=float(per_direction.mean() / sc.acquisition_s) if n else math.nan,
        mean_total_ebits=float(per_direction.mean()) if n else math.nan,
        snr_mean=snr_mean,
        snr_sd=snr_sd,
        err_mean_ps=err_mean,
        err_sd_ps=err_sd,
        err_success_mean_ps=ok_mean,
        err_success_sd_ps=ok_sd,
    )


def run_static_scenario(sc: StaticScenario, pool: TaskPool | None = None) -> StaticSummary:
    """Run every instance and reduce them to one summary row"""
    return summarize(sc, _run_all(sc, pool, keep_first=False))


def _run_all(sc: StaticScenario, pool: TaskPool | None, keep_first: bool) -> List[InstanceResult]:
    indices = list(range(sc.n_instances))
    if pool is None:
        return [run_instance(sc, i, keep_first and i == 0) for i in indices]
    results = pool.map(partial(run_instance, sc), indices)
    if keep_first:
        results[0] = run_instance(sc, 0, keep_series=True)
    return results


# --------------------------------------------------------------------------- #
# 3. Input / Output DTO
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class RunStaticInput:
    scenarios: Tuple[StaticScenario, ...]
    keep_timestamps: bool = False


@dataclass(frozen=True)
class RunStaticOutput:
    summaries: List[StaticSummary]
    timestamps: Dict[str, Dict[str, TimestampSeries]] = field(default_factory=dict)


# --------------------------------------------------------------------------- #
# 4. Use-Case Interface
# --------------------------------------------------------------------------- #
@runtime_checkable
class RunStaticUseCase(Protocol):
    def execute(self, inp: RunStaticInput) -> RunStaticOutput: ...


# --------------------------------------------------------------------------- #
# 5. Use Case Implementation
# --------------------------------------------------------------------------- #
class RunStaticScenarioInteractor(RunStaticUseCase):
    def __init__(self, pool: TaskPool) -> None:
        self._pool = pool

    # ---------- Business Entry ----------
    def execute(self, inp: RunStaticInput) -> RunStaticOutput:
        summaries: List[StaticSummary] = []
        timestamps: Dict[str, Dict[str, TimestampSeries]] = {}
        for sc in inp.scenarios:
            logger.info("static_row_started", label=sc.label, loss_db=sc.link_loss_db,
                        acquisition_s=sc.acquisition_s, instances=sc.n_instances)
            results = _run_all(sc, self._pool, keep_first=inp.keep_timestamps)
            failures = sum(1 for r in results if r.estimate is None)
            if failures:
                logger.warning("no_peak_instances", label=sc.label, loss_db=sc.link_loss_db, count=failures)
            summary = summarize(sc, results)
            logger.info("static_row_done", label=sc.label, loss_db=sc.link_loss_db,
                        success_pct=summary.success_pct, snr_mean=summary.snr_mean)
            summaries.append(summary)
            if inp.keep_timestamps and results:
                timestamps[f"{sc.label}_{sc.link_loss_db:g}dB_{sc.acquisition_s:g}s"] = results[0].series
        return RunStaticOutput(summaries=summaries, timestamps=timestamps)
