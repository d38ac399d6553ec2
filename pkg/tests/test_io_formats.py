import logging
import struct

import numpy as np
import pytest

from fmstack.analysis import AnalysisFrame, measure_spectrum
from fmstack.io_formats import WavSpec, write_spectrum_csv, write_wav
from fmstack.spectrum import LineSpectrum, predict_second_order


def _read_wav(path):
    """Minimal independent RIFF reader for round-trip checks."""
    raw = path.read_bytes()
    assert raw[:4] == b"RIFF" and raw[8:12] == b"WAVE"
    assert raw[12:16] == b"fmt "
    fmt_tag, channels, rate, _, _, bits = struct.unpack("<HHIIHH", raw[20:36])
    assert raw[36:40] == b"data"
    (size,) = struct.unpack("<I", raw[40:44])
    data = raw[44 : 44 + size]
    if fmt_tag == 1 and bits == 16:
        samples = np.frombuffer(data, dtype="<i2")
    elif fmt_tag == 3 and bits == 32:
        samples = np.frombuffer(data, dtype="<f4")
    else:
        raise AssertionError(f"unexpected format {fmt_tag}/{bits}")
    return rate, channels, samples


def test_pcm16_file_size(tmp_path):
    path = tmp_path / "z.wav"
    write_wav(path, np.zeros(48000), WavSpec(48000, 16))
    assert path.stat().st_size == 44 + 96000


def test_pcm16_full_scale_value(tmp_path):
    path = tmp_path / "fs.wav"
    write_wav(path, np.array([1.0, -1.0, 0.0]), WavSpec(48000, 16))
    _, _, samples = _read_wav(path)
    assert samples[0] == 32767
    assert samples[1] == -32767
    assert samples[2] == 0


def test_float_roundtrip_bit_identical(tmp_path):
    rng = np.random.default_rng(21)
    x = rng.uniform(-1.0, 1.0, 4096)
    path = tmp_path / "f.wav"
    write_wav(path, x, WavSpec(44100, 32))
    rate, channels, samples = _read_wav(path)
    assert rate == 44100 and channels == 1
    assert np.array_equal(samples, x.astype(np.float32))


def test_clipping_logged(tmp_path, caplog):
    path = tmp_path / "c.wav"
    with caplog.at_level(logging.WARNING):
        write_wav(path, np.array([0.5, 1.5, -2.0]), WavSpec(48000, 16))
    assert "clipped 2 of 3" in caplog.text
    _, _, samples = _read_wav(path)
    assert samples[1] == 32767 and samples[2] == -32767


def test_wav_spec_validation():
    with pytest.raises(ValueError):
        WavSpec(0, 16)
    with pytest.raises(ValueError):
        WavSpec(48000, 24)
    with pytest.raises(ValueError):
        WavSpec(48000, 16, channels=2)


def test_csv_single_line_bytes(tmp_path):
    path = tmp_path / "one.csv"
    write_spectrum_csv(path, LineSpectrum(np.array([500.0]), np.array([1.0])))
    assert path.read_bytes() == b"freq_hz,amplitude\n500,1\n"


def test_csv_empty_spectrum(tmp_path):
    path = tmp_path / "empty.csv"
    write_spectrum_csv(path, LineSpectrum(np.empty(0), np.empty(0)))
    assert path.read_bytes() == b"freq_hz,amplitude\n"


def test_csv_row_count_matches_prediction(tmp_path):
    pred = predict_second_order(500.0, 500.0, 500.0, 3.0, 2.0)
    path = tmp_path / "fig3.csv"
    write_spectrum_csv(path, pred)
    rows = path.read_text().strip().split("\n")
    assert len(rows) == 1 + len(pred.freqs)


def test_csv_measured_spectrum_and_determinism(tmp_path):
    x = np.cos(2.0 * np.pi * 500.0 * np.arange(96 * 16) / 48000.0)
    spec = measure_spectrum(AnalysisFrame(x, 48000.0, 500.0))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_spectrum_csv(a, spec)
    write_spectrum_csv(b, spec)
    assert a.read_bytes() == b.read_bytes()
    first = a.read_text().split("\n")[1]
    assert first.startswith("0,")


def test_csv_rejects_other_types(tmp_path):
    with pytest.raises(TypeError):
        write_spectrum_csv(tmp_path / "x.csv", [(500.0, 1.0)])
