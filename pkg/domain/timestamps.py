"""
Photon-pair generation and detector timestamp simulation.

Detection times are kept as int64 counts of the timestamper resolution so
that histogramming and lag arithmetic stay exact.
"""
from __future__ import annotations

import numpy as np

from .entities import ClockModel, DetectorModel, TimestampSeries

# jitter draws beyond this many sigma are redrawn
JITTER_TRUNCATION_SIGMA = 5.0
MAX_SKEW_FOR_COMPENSATION = 1e-6


def generate_pair_events(rate: float, acquisition_s: float, rng: np.random.Generator) -> np.ndarray:
    """
    Sorted emission times of a Poisson pair source on [0, acquisition_s).
    """
    if rate <= 0:
        raise ValueError(f"Pair rate must be positive, got {rate}")
    if acquisition_s <= 0:
        return np.empty(0)
    n = int(rng.poisson(rate * acquisition_s))
    if n == 0:
        return np.empty(0)
    # order statistics of n uniforms via normalised exponential gaps
    gaps = rng.exponential(1.0, size=n + 1)
    cumulative = np.cumsum(gaps)
    return acquisition_s * cumulative[:-1] / cumulative[-1]


def _truncated_normal(sigma: float, size: int, rng: np.random.Generator) -> np.ndarray:
    if sigma == 0 or size == 0:
        return np.zeros(size)
    draws = rng.normal(0.0, sigma, size=size)
    bad = np.abs(draws) > JITTER_TRUNCATION_SIGMA * sigma
    while np.any(bad):
        draws[bad] = rng.normal(0.0, sigma, size=int(bad.sum()))
        bad = np.abs(draws) > JITTER_TRUNCATION_SIGMA * sigma
    return draws


def transmit_and_detect(
    events: np.ndarray,
    loss_db: float,
    detector: DetectorModel,
    clock: ClockModel,
    propagation_delay_s: float,
    rng: np.random.Generator,
    acquisition_s: float,
    label: str = "",
) -> TimestampSeries:
    """
    Thin the pair photons by channel loss and detector efficiency, delay them,
    add timing jitter and dark counts, read them on the local clock and
    quantise to the timestamper grid. Clicks outside the acquisition window
    are dropped.
    """
    events = np.asarray(events, dtype=float)
    keep_prob = 10.0 ** (-loss_db / 10.0) * detector.efficiency
    kept = rng.random(events.shape[0]) < keep_prob
    pair_ids = np.flatnonzero(kept).astype(np.int64)
    arrivals = events[kept] + propagation_delay_s
    arrivals = arrivals + _truncated_normal(detector.jitter_sigma_s, arrivals.shape[0], rng)

    n_dark = int(rng.poisson(detector.dark_rate_hz * acquisition_s)) if acquisition_s > 0 else 0
    darks = rng.uniform(0.0, acquisition_s, size=n_dark)

    true_times = np.concatenate([arrivals, darks])
    ids = np.concatenate([pair_ids, np.full(n_dark, -1, dtype=np.int64)])

    readings = np.asarray(clock.read(true_times), dtype=float)
    ticks = np.rint(readings / detector.resolution_s).astype(np.int64)

    last_tick = int(round(acquisition_s / detector.resolution_s))
    inside = (ticks >= 0) & (ticks <= last_tick)
    ticks, ids = ticks[inside], ids[inside]

    order = np.argsort(ticks, kind="stable")
    return TimestampSeries(
        detector=label,
        ticks=ticks[order],
        resolution_s=detector.resolution_s,
        acquisition_s=acquisition_s,
        pair_ids=ids[order],
    )


def apply_skew_compensation(series: TimestampSeries, skew: float, epoch_s: float = 0.0) -> TimestampSeries:
    """
    Undo a known fractional frequency offset by rescaling about the clock epoch.
    """
    if abs(skew) >= MAX_SKEW_FOR_COMPENSATION:
        raise ValueError(f"Skew {skew} too large to compensate (limit {MAX_SKEW_FOR_COMPENSATION})")
    if skew == 0:
        return series
    epoch_ticks = epoch_s / series.resolution_s
    corrected = np.rint(epoch_ticks + (series.ticks - epoch_ticks) / (1.0 + skew)).astype(np.int64)
    # rescaling is monotone so order is preserved
    return TimestampSeries(
        detector=series.detector,
        ticks=corrected,
        resolution_s=series.resolution_s,
        acquisition_s=series.acquisition_s,
        pair_ids=series.pair_ids,
    )


def coincidence_count(a: TimestampSeries, b: TimestampSeries) -> int:
    """Pairs detected at both ends, dark counts excluded"""
    ids_a = a.pair_ids[a.pair_ids >= 0]
    ids_b = b.pair_ids[b.pair_ids >= 0]
    return int(np.intersect1d(ids_a, ids_b).shape[0])
