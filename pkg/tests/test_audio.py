import struct

import numpy as np
import pytest
from scipy.io import wavfile

from dualmark.audio import AudioBuffer, wav_read, wav_write
from dualmark.errors import CorruptFile, InvalidInput, UnsupportedFormat


def test_float32_roundtrip_exact(tmp_path):
    x = np.random.default_rng(0).uniform(-1, 1, 1000).astype(np.float32)
    p = tmp_path / "a.wav"
    wav_write(p, AudioBuffer(x, 8000))
    buf = wav_read(p)
    assert buf.sample_rate == 8000
    assert np.array_equal(buf.samples, x.astype(np.float64))


def test_pcm16_scaling(tmp_path):
    p = tmp_path / "p.wav"
    wavfile.write(p, 16000, np.array([16384, -32768, 0], dtype=np.int16))
    buf = wav_read(p)
    assert list(buf.samples) == [0.5, -1.0, 0.0]
    assert buf.sample_rate == 16000


def test_pcm16_write_clips(tmp_path):
    p = tmp_path / "c.wav"
    wav_write(p, AudioBuffer([2.0, -2.0, 0.5], 8000), pcm16=True)
    assert list(wav_read(p).samples) == [32767 / 32768, -1.0, 0.5]


def test_stereo_downmix(tmp_path):
    p = tmp_path / "s.wav"
    wavfile.write(p, 8000, np.array([[0.5, 0.25], [-1.0, 0.0]], dtype=np.float32))
    assert list(wav_read(p).samples) == [0.375, -0.5]


def test_non_riff_unsupported(tmp_path):
    p = tmp_path / "x.wav"
    p.write_bytes(b"ID3\x03" + b"\x00" * 100)
    with pytest.raises(UnsupportedFormat):
        wav_read(p)


def test_int32_unsupported(tmp_path):
    p = tmp_path / "i.wav"
    wavfile.write(p, 8000, np.array([1, 2, 3], dtype=np.int32))
    with pytest.raises(UnsupportedFormat):
        wav_read(p)


def test_truncated_corrupt(tmp_path):
    p = tmp_path / "t.wav"
    wav_write(p, AudioBuffer(np.zeros(1000), 8000))
    p.write_bytes(p.read_bytes()[:30])
    with pytest.raises(CorruptFile):
        wav_read(p)


def test_truncated_data_chunk_corrupt(tmp_path):
    p = tmp_path / "d.wav"
    wav_write(p, AudioBuffer(np.zeros(1000), 8000))
    p.write_bytes(p.read_bytes()[:-2000])
    with pytest.raises(CorruptFile):
        wav_read(p)


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        wav_read(tmp_path / "nope.wav")


def test_buffer_validation():
    with pytest.raises(InvalidInput):
        AudioBuffer([0.0], 0)
    with pytest.raises(InvalidInput):
        AudioBuffer([np.nan], 8000)
    assert AudioBuffer(np.zeros(4000), 8000).duration == 0.5
