"""
Business Policy: pure decision rules of the network simulator, kept apart
from the numerics so they can be tested and swapped on their own.
"""
from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .entities import LossAverage, OffsetEstimate


class VisibilityPolicy:
    """
    Line-of-sight rule
    -------------------------------------------------
    * The satellite must be above the local horizon, and
    * its zenith angle must not exceed the elevation mask
    """

    def __init__(self, max_zenith_rad: float = math.radians(60.0)) -> None:
        if not 0.0 < max_zenith_rad <= math.pi / 2:
            raise ValueError(f"Zenith mask must lie in (0, pi/2], got {max_zenith_rad}")
        self.max_zenith_rad = max_zenith_rad

    # ---------- Rule Entry ----------
    def is_visible(self, zenith_angle_rad):
        """Elementwise for array input"""
        return np.asarray(zenith_angle_rad) <= self.max_zenith_rad


class SyncAdmissionPolicy:
    """
    When a satellite counts toward a station pair's sync trace
    -------------------------------------------------
    * Its rate to this station exceeds the cut-off now, and
    * its rate to the partner station exceeded the cut-off at some
      sample within +/- tau (tau = inf means anywhere in the trace)
    """

    def __init__(self, cutoff: float, tau_s: float) -> None:
        if cutoff < 0:
            raise ValueError(f"Cut-off rate cannot be negative, got {cutoff}")
        if tau_s < 0:
            raise ValueError(f"Holdover time cannot be negative, got {tau_s}")
        self.cutoff = cutoff
        self.tau_s = tau_s

    def above(self, rates: np.ndarray) -> np.ndarray:
        return rates > self.cutoff

    def window_samples(self, step_s: float) -> Optional[int]:
        """Half-width of the holdover window in samples, None for an unbounded window"""
        if math.isinf(self.tau_s):
            return None
        # tolerance so tau = k * step lands on k, not k - 1
        return int(math.floor(self.tau_s / step_s + 1e-9))


class LossAveragingPolicy:
    """
    How connected samples collapse into one loss figure
    -------------------------------------------------
    * db:   mean of per-sample dB losses
    * rate: loss of the mean rate
    """

    def __init__(self, mode: LossAverage = LossAverage.DB) -> None:
        self.mode = mode

    def average_loss_db(self, rates: np.ndarray, source_rate: float) -> float:
        connected = rates[rates > 0]
        if connected.size == 0:
            return math.inf
        if self.mode is LossAverage.RATE:
            return float(-10.0 * np.log10(connected.mean() / source_rate))
        return float(np.mean(-10.0 * np.log10(connected / source_rate)))


class SuccessPolicy:
    """
    An offset estimate succeeds when its error is strictly below the
    threshold (1 ns unless configured otherwise)
    """

    def __init__(self, threshold_s: float = 1e-9) -> None:
        if threshold_s <= 0:
            raise ValueError(f"Success threshold must be positive, got {threshold_s}")
        self.threshold_s = threshold_s

    def judge(self, delta_hat_s: float, roundtrip_hat_s: float,
              true_offset_s: Optional[float]) -> OffsetEstimate:
        if true_offset_s is None:
            return OffsetEstimate(delta_hat_s=delta_hat_s, roundtrip_hat_s=roundtrip_hat_s)
        error = delta_hat_s - true_offset_s
        return OffsetEstimate(
            delta_hat_s=delta_hat_s,
            roundtrip_hat_s=roundtrip_hat_s,
            success=abs(error) < self.threshold_s,
            error_s=error,
        )
