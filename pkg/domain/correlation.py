"""
Cross-correlation of timestamp series and two-way offset extraction.

The histogram counts every difference remote - local that falls inside a
lag window. The sparse path walks the two sorted series with searchsorted
and never materialises a dense time axis; the dense path bins both series
on the full tick grid and correlates them with FFTs. Both produce the same
integer histogram.

Given a period, both series are folded modulo that many ticks and the lags
become circular, as when one fixed-length FFT frame is correlated over a
whole acquisition. Every uncorrelated pair then lands somewhere in the frame,
so the accidental floor per bin is about N_local * N_remote / period.
"""
from __future__ import annotations

import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .entities import CorrelationDirection, CorrelationResult, OffsetEstimate, TimestampSeries
from .errors import NoPeakError
from .policies import SuccessPolicy
from .timestamps import apply_skew_compensation

# bins on each side of the peak left out of the off-peak statistics
PEAK_EXCLUSION_BINS = 3
# bounds the temporary arrays of one histogram pass
MAX_MATCHES_PER_CHUNK = 1 << 22


def lag_window(propagation_delay_s: float, half_width_s: float) -> Tuple[float, float]:
    """Search window centred on the expected one-way delay"""
    return propagation_delay_s - half_width_s, propagation_delay_s + half_width_s


def _window_ticks(window: Tuple[float, float], resolution_s: float) -> Tuple[int, int]:
    lo_s, hi_s = window
    if hi_s < lo_s:
        raise ValueError(f"Empty lag window {window}")
    # small tolerance keeps exact multiples of the resolution on their own bin
    lo = int(math.floor(lo_s / resolution_s + 1e-9))
    hi = int(math.ceil(hi_s / resolution_s - 1e-9))
    return lo, hi


def _check_compatible(local: TimestampSeries, remote: TimestampSeries) -> None:
    if not math.isclose(local.resolution_s, remote.resolution_s, rel_tol=1e-12):
        raise ValueError(
            f"Series resolutions differ: {local.resolution_s} vs {remote.resolution_s}"
        )


def _check_period(lo: int, hi: int, period: int) -> None:
    if hi - lo + 1 > period or hi >= period or lo <= -period:
        raise ValueError(f"Lag window [{lo}, {hi}] does not fit inside a {period}-tick period")


def _wrap_edges(folded: np.ndarray, lo: int, hi: int, period: int) -> np.ndarray:
    """Folded local ticks plus the copies one period away that lags in [lo, hi] can reach"""
    below = folded[folded >= period - max(hi, 0)] - period
    above = folded[folded < max(-lo, 0)] + period
    return np.concatenate([below, folded, above])


def _count_runs(
    local_ticks: np.ndarray, remote_ticks: np.ndarray, start: np.ndarray, matches: np.ndarray, lo: int, n_bins: int,
) -> np.ndarray:
    total = int(matches.sum())
    if total == 0:
        return np.zeros(n_bins, dtype=np.int64)
    # local indices of every match, run by run
    run_start = np.cumsum(matches) - matches
    within = np.arange(total) - np.repeat(run_start, matches)
    local_idx = np.repeat(start, matches) + within
    lags = np.repeat(remote_ticks, matches) - local_ticks[local_idx]
    return np.bincount(lags - lo, minlength=n_bins).astype(np.int64)


def sparse_histogram(
    local_ticks: np.ndarray, remote_ticks: np.ndarray, lo: int, hi: int, period: Optional[int] = None,
) -> np.ndarray:
    """
    Counts of remote - local for every lag in [lo, hi]. With a period (in
    ticks) both series are folded modulo it first and lags are circular.
    """
    local_ticks = np.asarray(local_ticks, dtype=np.int64)
    remote_ticks = np.asarray(remote_ticks, dtype=np.int64)
    n_bins = hi - lo + 1
    if local_ticks.size == 0 or remote_ticks.size == 0:
        return np.zeros(n_bins, dtype=np.int64)
    if period is not None:
        _check_period(lo, hi, period)
        local_ticks = _wrap_edges(np.sort(np.mod(local_ticks, period)), lo, hi, period)
        remote_ticks = np.mod(remote_ticks, period)

    start = np.searchsorted(local_ticks, remote_ticks - hi, side="left")
    stop = np.searchsorted(local_ticks, remote_ticks - lo, side="right")
    matches = stop - start
    total = int(matches.sum())

    counts = np.zeros(n_bins, dtype=np.int64)
    n_chunks = max(1, -(-total // MAX_MATCHES_PER_CHUNK))
    for part in np.array_split(np.arange(remote_ticks.size), n_chunks):
        counts += _count_runs(local_ticks, remote_ticks[part], start[part], matches[part], lo, n_bins)
    return counts


def dense_histogram(
    local_ticks: np.ndarray, remote_ticks: np.ndarray, lo: int, hi: int, period: Optional[int] = None,
) -> np.ndarray:
    """FFT cross-correlation on the full tick grid (or one folded period), read out on [lo, hi]"""
    local_ticks = np.asarray(local_ticks, dtype=np.int64)
    remote_ticks = np.asarray(remote_ticks, dtype=np.int64)
    n_bins = hi - lo + 1
    if local_ticks.size == 0 or remote_ticks.size == 0:
        return np.zeros(n_bins, dtype=np.int64)
    lags = np.arange(lo, hi + 1)

    if period is not None:
        _check_period(lo, hi, period)
        a = np.bincount(np.mod(local_ticks, period), minlength=period)
        b = np.bincount(np.mod(remote_ticks, period), minlength=period)
        spectrum = np.conj(np.fft.rfft(a)) * np.fft.rfft(b)
        circular = np.rint(np.fft.irfft(spectrum, period)).astype(np.int64)
        return circular[np.mod(lags, period)]

    origin = min(int(local_ticks.min()), int(remote_ticks.min()))
    a = np.bincount(local_ticks - origin)
    b = np.bincount(remote_ticks - origin)
    n = max(a.size, b.size)
    nfft = 1 << int(math.ceil(math.log2(2 * n)))

    spectrum = np.conj(np.fft.rfft(a, nfft)) * np.fft.rfft(b, nfft)
    circular = np.rint(np.fft.irfft(spectrum, nfft)).astype(np.int64)

    counts = circular[np.mod(lags, nfft)]
    # lags beyond the series length would alias onto real ones
    counts[np.abs(lags) > n - 1] = 0
    return counts


def summarize_histogram(
    counts: np.ndarray,
    lo: int,
    resolution_s: float,
    direction: CorrelationDirection,
) -> CorrelationResult:
    """Peak location, height and prominence of a lag histogram"""
    counts = np.asarray(counts, dtype=np.int64)
    if counts.size == 0 or counts.max() == counts.min():
        raise NoPeakError(f"{direction.value} cross-correlation has no distinguishable peak")

    peak = int(np.argmax(counts))
    offpeak = np.ones(counts.size, dtype=bool)
    offpeak[max(0, peak - PEAK_EXCLUSION_BINS): peak + PEAK_EXCLUSION_BINS + 1] = False
    peak_height = int(counts[peak])

    if not offpeak.any():
        snr = math.inf
    else:
        mean_off = float(counts[offpeak].mean())
        std_off = float(counts[offpeak].std())
        if std_off == 0.0:
            snr = math.inf if peak_height > mean_off else 0.0
        else:
            snr = max(0.0, (peak_height - mean_off) / std_off)

    return CorrelationResult(
        direction=direction,
        peak_lag_s=(lo + peak) * resolution_s,
        peak_height=peak_height,
        snr=snr,
        bin_s=resolution_s,
        lag_ticks=np.arange(lo, lo + counts.size, dtype=np.int64),
        counts=counts,
    )


def cross_correlate(
    local: TimestampSeries,
    remote: TimestampSeries,
    window: Tuple[float, float],
    direction: CorrelationDirection = CorrelationDirection.AB,
    dense: bool = False,
    period_s: Optional[float] = None,
) -> CorrelationResult:
    """
    Histogram of remote - local over `window` (seconds), binned at the
    shared timestamp resolution. With `period_s` both series are folded
    into one correlation frame of that length first. Raises NoPeakError
    for an empty series or a flat histogram.
    """
    _check_compatible(local, remote)
    if len(local) == 0 or len(remote) == 0:
        raise NoPeakError(f"{direction.value} correlation on an empty timestamp series")
    lo, hi = _window_ticks(window, local.resolution_s)
    build = dense_histogram if dense else sparse_histogram
    period = None if period_s is None else int(round(period_s / local.resolution_s))
    counts = build(local.ticks, remote.ticks, lo, hi, period)
    return summarize_histogram(counts, lo, local.resolution_s, direction)


def estimate_offset(
    c_ab: CorrelationResult,
    c_ba: CorrelationResult,
    true_offset_s: Optional[float] = None,
    threshold_s: float = 1e-9,
) -> OffsetEstimate:
    """delta = (tau_AB - tau_BA) / 2, round trip = tau_AB + tau_BA"""
    delta_hat = 0.5 * (c_ab.peak_lag_s - c_ba.peak_lag_s)
    roundtrip_hat = c_ab.peak_lag_s + c_ba.peak_lag_s
    return SuccessPolicy(threshold_s).judge(delta_hat, roundtrip_hat, true_offset_s)


def estimate_skew(
    reference: TimestampSeries,
    skewed: TimestampSeries,
    candidates: Sequence[float],
    window: Tuple[float, float],
    skewed_is_remote: bool = True,
    period_s: Optional[float] = None,
) -> Tuple[float, np.ndarray]:
    """
    Pick the candidate skew whose compensation gives the tallest correlation
    peak between the two series. Returns the winner and every candidate's
    peak height (first candidate wins ties).
    """
    if len(candidates) == 0:
        raise ValueError("Need at least one candidate skew")
    heights = np.zeros(len(candidates), dtype=np.int64)
    for k, candidate in enumerate(candidates):
        corrected = apply_skew_compensation(skewed, candidate)
        local, remote = (reference, corrected) if skewed_is_remote else (corrected, reference)
        try:
            heights[k] = cross_correlate(local, remote, window, period_s=period_s).peak_height
        except NoPeakError:
            heights[k] = 0
    return float(candidates[int(np.argmax(heights))]), heights


def average_offsets(
    estimates: Iterable[OffsetEstimate],
    true_offset_s: Optional[float] = None,
    threshold_s: float = 1e-9,
) -> Tuple[OffsetEstimate, float]:
    """
    Combine estimates from successive acquisition windows into one.
    Returns the averaged estimate and the standard deviation of the inputs.
    """
    items: List[OffsetEstimate] = list(estimates)
    if not items:
        raise ValueError("Nothing to average")
    deltas = np.array([e.delta_hat_s for e in items])
    roundtrips = np.array([e.roundtrip_hat_s for e in items])
    combined = SuccessPolicy(threshold_s).judge(float(deltas.mean()), float(roundtrips.mean()), true_offset_s)
    return combined, float(deltas.std())
