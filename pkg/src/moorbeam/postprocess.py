"""Amplitude extraction from oscillatory channels.

Two estimators: the mean peak-to-trough excursion (half of it, so a pure
sine of amplitude a reports a) and the magnitude of the dominant FFT bin of
the mean-removed, Hann-tapered signal, corrected for the taper's coherent
gain.  Default analysis windows: [8, 16] s for body motions and tensions,
[6, 14] s for wave elevation channels.
"""

import numpy as np
from scipy.signal import find_peaks

from .timeseries import TimeSeries

MOTION_WINDOW = (8.0, 16.0)
WAVE_WINDOW = (6.0, 14.0)


def default_window(channel_name: str) -> tuple:
    return WAVE_WINDOW if channel_name.startswith("wave") else MOTION_WINDOW


def _refined_extremum(values, index, half_width):
    """Extremum value from a local quadratic fit around a detected index;
    averages out sample noise that would otherwise bias raw peaks upward."""
    lo = max(index - half_width, 0)
    hi = min(index + half_width + 1, values.size)
    if hi - lo < 5:
        return float(values[index])
    x = np.arange(lo, hi, dtype=float) - index
    c = np.polynomial.polynomial.polyfit(x, values[lo:hi], 2)
    if c[2] != 0.0:
        vertex = -c[1] / (2.0 * c[2])
        if abs(vertex) <= half_width:
            return float(c[0] + c[1] * vertex + c[2] * vertex**2)
    return float(values[index])


def amplitude_peak_to_trough(series: TimeSeries, window: tuple | None = None,
                             prominence_fraction: float = 0.05) -> float:
    """Half the mean excursion between consecutive extrema inside the window.

    Extrema are detected with a prominence filter (default 5 % of the channel
    range in the window) to ignore ripple, and their values are refined with
    a local quadratic fit so sample noise does not inflate the excursions."""
    if window is not None:
        series = series.window(*window)
    v = series.values
    if v.size < 3:
        raise ValueError("window contains too few samples")
    span = float(v.max() - v.min())
    if span <= 0.0:
        raise ValueError("channel is constant in the window")
    # detect on a lightly smoothed, mean-removed copy so sample noise cannot
    # fake extrema (and the offset cannot leak in through the edge padding),
    # but measure on the raw signal
    k = max(3, v.size // 64) | 1
    kernel = np.ones(k) / k
    padded = np.pad(v - v.mean(), k // 2, mode="reflect")
    smooth = np.convolve(padded, kernel, mode="valid")
    prominence = prominence_fraction * span
    peaks, _ = find_peaks(smooth, prominence=prominence)
    troughs, _ = find_peaks(-smooth, prominence=prominence)
    extrema = sorted([(i, +1) for i in peaks] + [(i, -1) for i in troughs])
    if len(extrema) < 2:
        raise ValueError("no peak-trough pair found in the window")
    spacing = np.diff([i for i, _ in extrema])
    half_width = max(int(round(0.15 * float(np.median(spacing)))), 2)
    refined = [(_refined_extremum(v, i, half_width), s) for i, s in extrema]
    excursions = [abs(v2 - v1) for (v1, s1), (v2, s2) in zip(refined, refined[1:])
                  if s1 != s2]
    if not excursions:
        raise ValueError("no peak-trough pair found in the window")
    return 0.5 * float(np.mean(excursions))


def fft_dominant_amplitude(series: TimeSeries, window: tuple | None = None) -> tuple:
    """(frequency, amplitude) of the dominant spectral line.

    The windowed signal is mean-removed and Hann-tapered; the returned
    magnitude is corrected for the taper's coherent gain so an on-bin sine of
    amplitude a reports a."""
    if window is not None:
        series = series.window(*window)
    t, v = series.times, series.values
    if t.size < 4:
        raise ValueError("window contains too few samples")
    steps = np.diff(t)
    if not np.allclose(steps, steps[0], rtol=1e-8, atol=1e-12):
        raise ValueError("FFT amplitude requires uniform sampling")
    dt = float(steps[0])
    x = v - v.mean()
    taper = np.hanning(x.size)
    spectrum = np.fft.rfft(x * taper)
    freqs = np.fft.rfftfreq(x.size, dt)
    mags = np.abs(spectrum)
    mags[0] = 0.0
    k = int(np.argmax(mags))
    amplitude = 2.0 * mags[k] / taper.sum()
    return float(freqs[k]), float(amplitude)
