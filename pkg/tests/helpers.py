"""Shared analysis utilities for the test suite.

Collapse/revival detection works on the envelope of an oscillating signal:
the peak-to-trough amplitude inside a sliding time window.  A revival is a
local maximum of that envelope after the initial collapse has died down.
"""
from __future__ import annotations

import numpy as np


def rolling_amplitude(t: np.ndarray, y: np.ndarray, window: float) -> np.ndarray:
    """Peak-to-trough spread of y inside [t_j - window/2, t_j + window/2]."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    lo = np.searchsorted(t, t - 0.5 * window, side="left")
    hi = np.searchsorted(t, t + 0.5 * window, side="right")
    out = np.empty_like(y)
    for j, (a, b) in enumerate(zip(lo, hi)):
        seg = y[a:b]
        out[j] = seg.max() - seg.min()
    return out


def first_revival_window(
    t: np.ndarray,
    y: np.ndarray,
    window: float = 2.0,
    settle: float = 1.0,
) -> tuple[float, float]:
    """Locate the first revival of an oscillating signal.

    Uses the rolling envelope: skip the initial burst (everything before the
    envelope first drops below half its starting value, plus `settle`), then
    take the time of the next envelope maximum.  Returns (t_lo, t_hi) of a
    window of width 2*window centred there.
    """
    amp = rolling_amplitude(t, y, window)
    start = amp[0]
    below = np.nonzero(amp < 0.5 * start)[0]
    if below.size == 0:
        raise ValueError("no collapse detected")
    t_collapse = t[below[0]] + settle
    mask = t >= t_collapse
    peak = np.argmax(amp[mask])
    t_peak = t[mask][peak]
    return (t_peak - window, t_peak + window)


def window_amplitude(t: np.ndarray, y: np.ndarray, lo: float, hi: float) -> float:
    """Peak-to-trough spread of y restricted to lo <= t <= hi."""
    seg = np.asarray(y)[(t >= lo) & (t <= hi)]
    if seg.size == 0:
        raise ValueError("empty window")
    return float(seg.max() - seg.min())


def exponential_fit_r2(t: np.ndarray, y: np.ndarray) -> float:
    """R^2 of a least-squares fit of y to A * exp(-b t).

    The fit is linear in log space; R^2 is reported in the original space so
    oscillatory residuals are not hidden by the log transform.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValueError("exponential fit needs positive data")
    slope, intercept = np.polyfit(t, np.log(y), 1)
    model = np.exp(intercept + slope * t)
    ss_res = float(np.sum((y - model) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return 1.0 - ss_res / ss_tot


def local_minima(y: np.ndarray) -> np.ndarray:
    """Indices of strict interior local minima, NaN-safe."""
    y = np.asarray(y, dtype=float)
    idx = []
    for j in range(1, len(y) - 1):
        trio = y[j - 1 : j + 2]
        if np.any(np.isnan(trio)):
            continue
        if y[j] < y[j - 1] and y[j] <= y[j + 1]:
            idx.append(j)
    return np.asarray(idx, dtype=int)
