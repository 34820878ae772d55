import math

import numpy as np
import pytest

from cubesat_preflight import vibration as vb

AT_PROFILE = vb.PsdProfile(((20.0, 0.01), (50.0, 0.01), (70.0, 0.0115),
                            (120.0, 0.0155), (230.0, 0.0155)))


# --- profiles -----------------------------------------------------------------

def test_profile_validation():
    with pytest.raises(ValueError):
        vb.PsdProfile(((20.0, 0.01),))
    with pytest.raises(ValueError):
        vb.PsdProfile(((50.0, 0.01), (20.0, 0.01)))
    with pytest.raises(ValueError):
        vb.PsdProfile(((20.0, 0.0), (50.0, 0.01)))


def test_interp_exact_at_breakpoints():
    assert vb.psd_interp(AT_PROFILE, 70.0) == 0.0115
    assert vb.psd_interp(AT_PROFILE, 20.0) == 0.01
    assert vb.psd_interp(AT_PROFILE, 230.0) == 0.0155


def test_interp_loglog_midpoint():
    """Geometric-mean frequency maps to the geometric mean of the levels."""
    f = math.sqrt(50.0 * 70.0)
    assert vb.psd_interp(AT_PROFILE, f) == pytest.approx(math.sqrt(0.01 * 0.0115), rel=1e-12)


def test_interp_out_of_range():
    with pytest.raises(ValueError):
        vb.psd_interp(AT_PROFILE, 10.0)


def test_grms_flat_unit_band():
    prof = vb.PsdProfile(((10.0, 1.0), (11.0, 1.0)))
    assert vb.grms(prof, 10.0, 11.0) == pytest.approx(1.0)


def test_grms_flat_segment():
    assert vb.grms(AT_PROFILE, 20.0, 50.0) == pytest.approx(math.sqrt(0.3))


def test_grms_full_listed_table():
    assert vb.grms(AT_PROFILE, 20.0, 230.0) == pytest.approx(1.7028, abs=0.001)


def test_grms_range_not_covered():
    with pytest.raises(ValueError):
        vb.grms(AT_PROFILE, 10.0, 230.0)


def test_grms_band_additivity():
    """grms(a,c)^2 = grms(a,b)^2 + grms(b,c)^2, split points anywhere."""
    for b in (35.0, 50.0, 63.7, 119.9, 121.0, 200.0):
        full = vb.grms(AT_PROFILE, 20.0, 230.0) ** 2
        parts = vb.grms(AT_PROFILE, 20.0, b) ** 2 + vb.grms(AT_PROFILE, b, 230.0) ** 2
        assert abs(full - parts) / full < 1e-12


def test_grms_scales_with_sqrt_level():
    scaled = vb.PsdProfile(tuple((f, 4.0 * p) for f, p in AT_PROFILE.breakpoints))
    assert vb.grms(scaled, 20.0, 230.0) == pytest.approx(2.0 * vb.grms(AT_PROFILE, 20.0, 230.0))


# --- estimation ----------------------------------------------------------------

def test_estimate_zero_signal():
    ts = vb.TimeSeries("z", 1024.0, np.zeros(8192))
    est = vb.estimate_psd(ts)
    assert np.all(est.psd_g2_hz == 0.0)


def test_estimate_white_noise_parseval():
    rng = np.random.default_rng(42)
    x = rng.standard_normal(1 << 17)
    ts = vb.TimeSeries("wn", 2048.0, x)
    est = vb.estimate_psd(ts, segment_length=1024)
    integral = np.trapezoid(est.psd_g2_hz, est.frequencies_hz)
    assert abs(integral - x.var()) / x.var() < 0.05


def test_estimate_sine_parseval():
    fs = 1024.0
    n = 1 << 16
    t = np.arange(n) / fs
    amp = 2.5
    f0 = 96.0  # bin-centered for nperseg=512 (bin width 2 Hz)
    x = amp * np.sin(2 * np.pi * f0 * t)
    est = vb.estimate_psd(vb.TimeSeries("sine", fs, x), segment_length=512)
    integral = np.trapezoid(est.psd_g2_hz, est.frequencies_hz)
    assert abs(integral - amp**2 / 2) / (amp**2 / 2) < 0.02


def test_estimate_independent_signals_add():
    rng = np.random.default_rng(7)
    n = 1 << 17
    x = rng.standard_normal(n)
    y = 0.5 * rng.standard_normal(n)
    both = vb.estimate_psd(vb.TimeSeries("xy", 1024.0, x + y), segment_length=1024)
    integral = np.trapezoid(both.psd_g2_hz, both.frequencies_hz)
    expected = x.var() + y.var()
    assert abs(integral - expected) / expected < 0.05


def test_estimate_too_short():
    ts = vb.TimeSeries("s", 100.0, np.zeros(64))
    with pytest.raises(ValueError):
        vb.estimate_psd(ts, segment_length=128)


# --- magnification ---------------------------------------------------------------

def _white(channel, scale, seed, n=1 << 16, fs=1024.0):
    rng = np.random.default_rng(seed)
    return vb.TimeSeries(channel, fs, scale * rng.standard_normal(n))


def test_mag_identity():
    est = vb.estimate_psd(_white("a", 1.0, 3))
    mag = vb.response_mag(est, est)
    assert np.allclose(mag.magnification[mag.valid], 1.0)


def test_mag_sqrt_ratio():
    x = _white("a", 1.0, 3)
    double = vb.TimeSeries("b", x.sample_rate_hz, 2.0 * x.samples)
    e1 = vb.estimate_psd(x)
    e2 = vb.estimate_psd(double)
    mag = vb.response_mag(e2, e1)
    assert np.allclose(mag.magnification[mag.valid], 2.0, rtol=1e-9)


def test_mag_scale_invariance():
    a = vb.estimate_psd(_white("a", 1.0, 5))
    b = vb.estimate_psd(_white("b", 0.7, 6))
    m1 = vb.response_mag(b, a)
    a4 = vb.PsdEstimate("a", a.frequencies_hz, 4.0 * a.psd_g2_hz)
    b4 = vb.PsdEstimate("b", b.frequencies_hz, 4.0 * b.psd_g2_hz)
    m2 = vb.response_mag(b4, a4)
    assert np.allclose(m1.magnification[m1.valid], m2.magnification[m2.valid])


def test_mag_grid_mismatch():
    a = vb.estimate_psd(_white("a", 1.0, 3), segment_length=512)
    b = vb.estimate_psd(_white("b", 1.0, 4), segment_length=1024)
    with pytest.raises(ValueError, match="grid"):
        vb.response_mag(b, a)


def test_mag_floor_masking():
    f = np.array([10.0, 20.0, 30.0])
    ref = vb.PsdEstimate("ref", f, np.array([1e-3, 1e-12, 1e-3]))
    ch = vb.PsdEstimate("ch", f, np.array([1e-3, 1e-3, 4e-3]))
    mag = vb.response_mag(ch, ref)
    assert list(mag.valid) == [True, False, True]
    assert np.isnan(mag.magnification[1])
    assert mag.magnification[2] == pytest.approx(2.0)


# --- resonance -------------------------------------------------------------------

def _sdof_response(base: vb.TimeSeries, f_n: float, q: float) -> vb.TimeSeries:
    """Oracle: shape the base spectrum with the analytic base-excitation
    transmissibility |H| of a single-degree-of-freedom oscillator."""
    n = base.samples.size
    spectrum = np.fft.rfft(base.samples)
    freqs = np.fft.rfftfreq(n, d=1.0 / base.sample_rate_hz)
    zeta = 1.0 / (2.0 * q)
    r = freqs / f_n
    h = np.sqrt((1.0 + (2.0 * zeta * r) ** 2)
                / ((1.0 - r**2) ** 2 + (2.0 * zeta * r) ** 2))
    shaped = np.fft.irfft(spectrum * h, n=n)
    return vb.TimeSeries("resp", base.sample_rate_hz, shaped)


def test_sdof_peak_recovered():
    base = _white("base", 1.0, 11, n=1 << 17)
    resp = _sdof_response(base, 100.0, 10.0)
    e_ref = vb.estimate_psd(base, segment_length=512)
    e_resp = vb.estimate_psd(resp, segment_length=512)
    mag = vb.response_mag(e_resp, e_ref)
    peak = vb.first_resonance(mag, f_min=20.0)
    bin_width = mag.frequencies_hz[1] - mag.frequencies_hz[0]
    assert abs(peak - 100.0) <= bin_width
    peak_value = mag.magnification[np.argmin(np.abs(mag.frequencies_hz - peak))]
    assert abs(peak_value - 10.0) / 10.0 < 0.15


def test_first_resonance_flat_spectrum():
    f = np.linspace(10.0, 500.0, 200)
    mag = vb.MagSpectrum("c", "r", f, np.ones_like(f), np.ones_like(f, dtype=bool))
    with pytest.raises(vb.NoPeakError):
        vb.first_resonance(mag)


def test_first_resonance_picks_lowest_peak():
    """Two-peak layout at 47 and 122 Hz: the lower one is reported."""
    f = np.linspace(10.0, 300.0, 1200)
    mag = np.ones_like(f)
    for f0, height in ((47.0, 8.0), (122.0, 12.0)):
        mag += height * np.exp(-0.5 * ((f - f0) / 2.0) ** 2)
    spec = vb.MagSpectrum("c", "r", f, mag, np.ones_like(f, dtype=bool))
    assert vb.first_resonance(spec, f_min=20.0) == pytest.approx(47.0, abs=0.5)


def test_first_resonance_scale_invariant():
    f = np.linspace(10.0, 300.0, 1200)
    mag = np.ones_like(f) + 8.0 * np.exp(-0.5 * ((f - 47.0) / 2.0) ** 2)
    spec1 = vb.MagSpectrum("c", "r", f, mag, np.ones_like(f, dtype=bool))
    spec2 = vb.MagSpectrum("c", "r", f, 10.0 * mag, np.ones_like(f, dtype=bool))
    assert vb.first_resonance(spec1, 20.0) == vb.first_resonance(spec2, 20.0)


def test_min_frequency_check_gate():
    checks = vb.min_frequency_check([("CH13", 53.0), ("CH14", 232.0), ("CHX", 60.0)], 60.0)
    by = {c.channel: c.passed for c in checks}
    assert by == {"CH13": False, "CH14": True, "CHX": False}


def test_min_frequency_check_limit_positive():
    with pytest.raises(ValueError):
        vb.min_frequency_check([("a", 100.0)], 0.0)


# --- file formats ------------------------------------------------------------------

def test_profile_csv_round_trip(tmp_path):
    p = tmp_path / "prof.csv"
    p.write_text("freq_hz,psd_g2hz\n20,0.01\n50,0.01\n70,0.0115\n120,0.0155\n230,0.0155\n")
    prof = vb.read_profile_csv(p)
    assert prof.breakpoints == AT_PROFILE.breakpoints


def test_timeseries_csv_with_time_column(tmp_path):
    p = tmp_path / "ts.csv"
    rows = ["time_s,CH1,CH2"]
    for i in range(64):
        rows.append(f"{i / 256.0},{0.1 * i},{-0.1 * i}")
    p.write_text("\n".join(rows) + "\n")
    channels = vb.read_timeseries_csv(p)
    assert [c.channel for c in channels] == ["CH1", "CH2"]
    assert channels[0].sample_rate_hz == pytest.approx(256.0)
    assert channels[1].samples[3] == pytest.approx(-0.3)


def test_timeseries_csv_with_rate_header(tmp_path):
    p = tmp_path / "ts.csv"
    body = "\n".join(f"{0.01 * i},{0.02 * i}" for i in range(32))
    p.write_text("# sample_rate_hz=512\nCHA,CHB\n" + body + "\n")
    channels = vb.read_timeseries_csv(p)
    assert channels[0].sample_rate_hz == 512.0
    assert len(channels) == 2
