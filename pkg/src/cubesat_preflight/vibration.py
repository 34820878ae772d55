"""Random-vibration data processing.

Covers the test-data side of a vibration campaign: breakpoint PSD input
profiles with log-log interpolation and closed-form Grms, Welch PSD estimation
of measured acceleration channels, response magnification (per-bin square root
of the PSD ratio against a reference channel), first-resonance identification,
and the minimum-frequency requirement gate. Shaker control and nonlinear
resonance-shift prediction are out of scope; the tool reports what the data
shows.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import signal as _signal

#: reference-PSD floor below which magnification bins are masked (G^2/Hz)
MAG_REFERENCE_FLOOR = 1e-8


@dataclass(frozen=True)
class PsdProfile:
    """Breakpoint spectral profile, interpolated log-log between points."""

    breakpoints: tuple[tuple[float, float], ...]

    def __post_init__(self):
        bp = tuple((float(f), float(p)) for f, p in self.breakpoints)
        if len(bp) < 2:
            raise ValueError("a PSD profile needs at least two breakpoints")
        freqs = [f for f, _ in bp]
        if any(f <= 0 for f in freqs):
            raise ValueError("breakpoint frequencies must be > 0")
        if any(f2 <= f1 for f1, f2 in zip(freqs, freqs[1:])):
            raise ValueError("breakpoint frequencies must be strictly increasing")
        if any(p <= 0 for _, p in bp):
            raise ValueError("breakpoint levels must be > 0")
        object.__setattr__(self, "breakpoints", bp)

    @property
    def f_min(self) -> float:
        return self.breakpoints[0][0]

    @property
    def f_max(self) -> float:
        return self.breakpoints[-1][0]


@dataclass(frozen=True)
class TimeSeries:
    """One sampled acceleration channel in G."""

    channel: str
    sample_rate_hz: float
    samples: np.ndarray

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise ValueError("sample rate must be > 0")
        arr = np.asarray(self.samples, dtype=float)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("need at least 2 samples in a 1-d array")
        object.__setattr__(self, "samples", arr)


@dataclass(frozen=True)
class PsdEstimate:
    """Sampled one-sided PSD in G^2/Hz."""

    channel: str
    frequencies_hz: np.ndarray
    psd_g2_hz: np.ndarray


@dataclass(frozen=True)
class MagSpectrum:
    """Per-bin response magnification relative to a reference channel.

    Bins where the reference PSD sits below the noise floor are masked: the
    magnification value there is NaN and `valid` is False.
    """

    channel: str
    reference_channel: str
    frequencies_hz: np.ndarray
    magnification: np.ndarray
    valid: np.ndarray


def psd_interp(profile: PsdProfile, f: float) -> float:
    """Profile level at frequency f, straight-line in (log f, log PSD)."""
    if not profile.f_min <= f <= profile.f_max:
        raise ValueError(
            f"frequency {f} Hz outside profile range [{profile.f_min}, {profile.f_max}] Hz")
    bp = profile.breakpoints
    for (f1, p1), (f2, p2) in zip(bp, bp[1:]):
        if f <= f2:
            if f == f1:
                return p1
            if f == f2:
                return p2
            slope = math.log(p2 / p1) / math.log(f2 / f1)
            return p1 * (f / f1) ** slope
    return bp[-1][1]


def _segment_area(f1: float, p1: float, f2: float, p2: float) -> float:
    """Exact integral of one log-log segment (constant dB/octave slope)."""
    s = math.log(p2 / p1) / math.log(f2 / f1)
    if abs(s + 1.0) < 1e-9:
        return p1 * f1 * math.log(f2 / f1)
    return (f2 * p2 - f1 * p1) / (s + 1.0)


def grms(profile: PsdProfile, f_lo: float, f_hi: float) -> float:
    """Root of the integral of the profile between f_lo and f_hi, in G rms."""
    if f_hi <= f_lo:
        raise ValueError(f"need f_lo < f_hi, got [{f_lo}, {f_hi}]")
    if f_lo < profile.f_min or f_hi > profile.f_max:
        raise ValueError(
            f"band [{f_lo}, {f_hi}] Hz not covered by profile "
            f"[{profile.f_min}, {profile.f_max}] Hz")
    area = 0.0
    bp = profile.breakpoints
    for (f1, p1), (f2, p2) in zip(bp, bp[1:]):
        a = max(f1, f_lo)
        b = min(f2, f_hi)
        if b <= a:
            continue
        pa = psd_interp(profile, a)
        pb = psd_interp(profile, b)
        area += _segment_area(a, pa, b, pb)
    return math.sqrt(area)


def estimate_psd(series: TimeSeries, segment_length: int | None = None,
                 overlap: float = 0.5, window: str = "hann") -> PsdEstimate:
    """Averaged-periodogram one-sided PSD whose integral approximates variance.

    Defaults choose the segment length so at least 8 averages are available.
    """
    n = series.samples.size
    if segment_length is None:
        # largest power of two giving >= 8 half-overlapping segments
        segment_length = 256
        while segment_length * 2 <= n // 4 and segment_length < 4096:
            segment_length *= 2
        segment_length = min(segment_length, n)
    if segment_length > n:
        raise ValueError(f"segment length {segment_length} exceeds series length {n}")
    if not 0.0 <= overlap < 1.0:
        raise ValueError("overlap must be in [0, 1)")
    freqs, psd = _signal.welch(
        series.samples, fs=series.sample_rate_hz, window=window,
        nperseg=segment_length, noverlap=int(segment_length * overlap),
        detrend="constant", scaling="density")
    return PsdEstimate(channel=series.channel, frequencies_hz=freqs, psd_g2_hz=psd)


def response_mag(psd_channel: PsdEstimate, psd_reference: PsdEstimate,
                 floor: float = MAG_REFERENCE_FLOOR) -> MagSpectrum:
    """Per-bin sqrt(PSD_channel / PSD_reference) on a shared frequency grid."""
    f1 = psd_channel.frequencies_hz
    f2 = psd_reference.frequencies_hz
    if f1.shape != f2.shape or not np.allclose(f1, f2, rtol=0, atol=1e-9):
        raise ValueError("channel and reference PSDs are on different frequency grids")
    ref = psd_reference.psd_g2_hz
    valid = ref >= floor
    mag = np.full_like(ref, np.nan, dtype=float)
    np.divide(psd_channel.psd_g2_hz, ref, out=mag, where=valid)
    mag[valid] = np.sqrt(mag[valid])
    return MagSpectrum(
        channel=psd_channel.channel,
        reference_channel=psd_reference.channel,
        frequencies_hz=f1.copy(),
        magnification=mag,
        valid=valid,
    )


class NoPeakError(ValueError):
    """No qualifying resonance peak in the spectrum."""


def first_resonance(mag: MagSpectrum, f_min: float = 0.0,
                    prominence: float = 1.5, window_octaves: float = 1.0 / 6.0) -> float:
    """Lowest-frequency qualifying local maximum of the magnification spectrum.

    A bin qualifies when it is a local maximum above f_min and exceeds
    `prominence` times the median magnification within +-window_octaves
    around it. Masked bins are ignored.
    """
    f = mag.frequencies_hz
    m = np.where(mag.valid, mag.magnification, np.nan)
    factor = 2.0 ** window_octaves
    for i in range(1, len(f) - 1):
        if not (f[i] > f_min and f[i] > 0.0) or not np.isfinite(m[i]):
            continue
        if not (m[i] >= m[i - 1] and m[i] > m[i + 1]):
            continue
        lo, hi = f[i] / factor, f[i] * factor
        sel = (f >= lo) & (f <= hi) & np.isfinite(m)
        neighborhood = np.median(m[sel])
        if neighborhood > 0 and m[i] > prominence * neighborhood:
            return float(f[i])
    raise NoPeakError(
        f"no local maximum above {f_min} Hz exceeds {prominence}x its "
        f"+-{window_octaves:.3g}-octave median")


@dataclass(frozen=True)
class FrequencyCheck:
    channel: str
    first_resonance_hz: float
    limit_hz: float
    passed: bool


def min_frequency_check(resonances, limit_hz: float) -> list[FrequencyCheck]:
    """Strict gate: a channel passes only if its first resonance exceeds the limit."""
    if limit_hz <= 0:
        raise ValueError("frequency limit must be > 0")
    out = []
    for channel, f_hz in resonances:
        out.append(FrequencyCheck(
            channel=str(channel),
            first_resonance_hz=float(f_hz),
            limit_hz=limit_hz,
            passed=float(f_hz) > limit_hz,
        ))
    return out


# ---------------------------------------------------------------------------
# file formats

def read_profile_csv(path: str | Path) -> PsdProfile:
    """Breakpoint CSV with header 'freq_hz,psd_g2hz'."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty profile file")
        for row in reader:
            if not row or row[0].strip().startswith("#"):
                continue
            rows.append((float(row[0]), float(row[1])))
    return PsdProfile(tuple(rows))


def read_timeseries_csv(path: str | Path) -> list[TimeSeries]:
    """Time-series CSV: first column time_s (or a '# sample_rate_hz=' header
    line and no time column), remaining columns one channel each."""
    path = Path(path)
    sample_rate = None
    with open(path, newline="") as fh:
        first = fh.readline()
        if first.startswith("#"):
            for token in first.lstrip("#").split(","):
                token = token.strip()
                if token.startswith("sample_rate_hz="):
                    sample_rate = float(token.split("=", 1)[1])
            header_line = fh.readline()
        else:
            header_line = first
        names = [c.strip() for c in header_line.strip().split(",")]
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.shape[0] < 2:
        raise ValueError(f"{path}: need at least 2 samples")
    if names[0] == "time_s":
        times = data[:, 0]
        dt = np.diff(times)
        if np.any(dt <= 0):
            raise ValueError(f"{path}: time column must be strictly increasing")
        sample_rate = 1.0 / float(np.mean(dt))
        channels = names[1:]
        cols = data[:, 1:]
    else:
        if sample_rate is None:
            raise ValueError(f"{path}: no time_s column and no sample_rate_hz header")
        channels = names
        cols = data
    return [TimeSeries(channel=name, sample_rate_hz=sample_rate, samples=cols[:, i])
            for i, name in enumerate(channels)]
