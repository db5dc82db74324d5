import wave

import numpy as np
import pytest

from sdgf.errors import TooShort, UnknownKind, UnsupportedFormat
from sdgf.gabor import make_lattice
from sdgf.signals import (
    add_gaussian_noise,
    analysis_sparse_signal,
    gaussian_matrix,
    load_wav_segment,
    make_signal,
    signal_profile,
    signal_to_csv,
    write_wav,
)


def _write_pcm(path, samples, width=2, channels=1):
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(channels)
        wf.setsampwidth(width)
        wf.setframerate(16000)
        wf.writeframes(np.asarray(samples, dtype=f"<i{width}").tobytes())


@pytest.mark.parametrize("kind", ["two_chirp", "bumps", "cusp"])
@pytest.mark.parametrize("L", [8, 51, 57, 1155])
def test_signals_unit_norm(kind, L):
    s = make_signal(kind, L)
    assert s.samples.shape == (L,)
    assert np.all(np.isfinite(s.samples)) and not np.iscomplexobj(s.samples)
    assert abs(np.linalg.norm(s.samples) - 1) < 1e-12
    assert s.field == "R" and s.source == "synthetic"


def test_cusp_minimum_location():
    for L in (57, 100, 1155):
        raw = signal_profile("cusp", L)
        assert abs(int(np.argmin(raw)) - round(0.37 * L)) <= 1


def test_bumps_positive():
    assert np.all(make_signal("bumps", 45).samples > 0)


def test_signal_errors():
    with pytest.raises(UnknownKind):
        make_signal("doppler", 64)
    with pytest.raises(ValueError):
        make_signal("cusp", 4)


def test_analysis_sparse_signal():
    lat = make_lattice(105, 7, 5)
    s = analysis_sparse_signal(lat, 5, seed=3)
    assert np.iscomplexobj(s.samples) and s.field == "C"
    np.testing.assert_array_equal(s.samples, analysis_sparse_signal(lat, 5, seed=3).samples)


def test_wav_scaling(tmp_path):
    p = tmp_path / "a.wav"
    _write_pcm(p, [-32768, 0, 16384, 32767])
    s = load_wav_segment(p, 0, 4)
    assert s.samples[0] == -1.0 and s.samples[1] == 0.0 and s.samples[2] == 0.5
    assert s.samples[3] < 1.0
    assert s.source == "wav-file"


def test_wav_truncation(tmp_path):
    p = tmp_path / "long.wav"
    data = (np.arange(36240) % 2000 - 1000).astype("<i2")
    _write_pcm(p, data)
    s = load_wav_segment(p, 0, 33915)
    assert s.L == 33915
    np.testing.assert_array_equal(s.samples, data[:33915] / 32768.0)
    s = load_wav_segment(p, 100, 50)
    np.testing.assert_array_equal(s.samples, data[100:150] / 32768.0)


def test_wav_errors(tmp_path):
    p = tmp_path / "stereo.wav"
    _write_pcm(p, np.zeros(20), channels=2)
    with pytest.raises(UnsupportedFormat):
        load_wav_segment(p, 0, 5)
    p = tmp_path / "w32.wav"
    _write_pcm(p, np.zeros(20), width=4)
    with pytest.raises(UnsupportedFormat):
        load_wav_segment(p, 0, 5)
    p = tmp_path / "short.wav"
    _write_pcm(p, np.zeros(20))
    with pytest.raises(TooShort):
        load_wav_segment(p, 10, 11)
    p = tmp_path / "junk.wav"
    p.write_bytes(b"not a wav file at all")
    with pytest.raises(UnsupportedFormat):
        load_wav_segment(p, 0, 1)


def test_wav_round_trip(tmp_path, rng):
    x = rng.uniform(-1, 1, 500)
    write_wav(tmp_path / "x.wav", x)
    first = load_wav_segment(tmp_path / "x.wav", 0, 500).samples
    assert np.max(np.abs(first - x)) <= 2.0**-15
    write_wav(tmp_path / "y.wav", first)
    second = load_wav_segment(tmp_path / "y.wav", 0, 500).samples
    np.testing.assert_array_equal(first, second)


def test_gaussian_matrix_column_norms():
    norms = [np.linalg.norm(gaussian_matrix(64, 64, "R", s).A, axis=0).mean() for s in range(100)]
    assert np.mean(norms) == pytest.approx(1.0, rel=0.1)
    cnorms = [np.linalg.norm(gaussian_matrix(64, 64, "C", s).A, axis=0).mean() for s in range(100)]
    assert np.mean(cnorms) == pytest.approx(1.0, rel=0.1)


def test_gaussian_matrix_determinism():
    a = gaussian_matrix(10, 20, "C", 5)
    b = gaussian_matrix(10, 20, "C", 5)
    assert a.A.tobytes() == b.A.tobytes()
    assert a.K == 10
    with pytest.raises(ValueError):
        gaussian_matrix(0, 20)


def test_noise_zero():
    x = np.arange(5.0)
    y, n = add_gaussian_noise(x, 0.0, 1)
    np.testing.assert_array_equal(x, y)
    assert n == 0.0


def test_noise_norm_mean():
    from math import gamma, sqrt

    L, sigma = 57, 0.001
    norms = [add_gaussian_noise(np.zeros(L), sigma, s)[1] for s in range(1000)]
    chi_mean = sigma * sqrt(2) * gamma((L + 1) / 2) / gamma(L / 2)
    assert np.mean(norms) == pytest.approx(chi_mean, rel=0.05)
    assert np.mean(norms) == pytest.approx(sigma * np.sqrt(L), rel=0.05)


def test_noise_complex_power():
    x = np.zeros(20000, dtype=complex)
    y, _ = add_gaussian_noise(x, 0.5, 2)
    assert np.mean(np.abs(y) ** 2) == pytest.approx(0.25, rel=0.03)
    assert np.var(y.real) == pytest.approx(0.125, rel=0.05)


def test_noise_determinism():
    a = add_gaussian_noise(np.zeros(10), 1.0, 9)[0]
    b = add_gaussian_noise(np.zeros(10), 1.0, 9)[0]
    np.testing.assert_array_equal(a, b)


def test_signal_csv():
    assert signal_to_csv(np.array([1.0, 2.0])).splitlines() == ["l,value", "0,1.0", "1,2.0"]
    assert signal_to_csv(np.array([1j])).splitlines() == ["l,re,im", "0,0.0,1.0"]
