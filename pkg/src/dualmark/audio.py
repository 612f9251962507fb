"""Mono audio buffers and WAV file I/O (PCM16 and IEEE float32)."""
from dataclasses import dataclass
import warnings

import numpy as np
from scipy.io import wavfile

from .errors import CorruptFile, InvalidInput, UnsupportedFormat


@dataclass
class AudioBuffer:
    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64).ravel()
        if self.sample_rate <= 0:
            raise InvalidInput(f"sample rate must be positive, got {self.sample_rate}")
        if not np.all(np.isfinite(self.samples)):
            raise InvalidInput("audio contains non-finite samples")

    def __len__(self):
        return self.samples.size

    @property
    def duration(self):
        return self.samples.size / self.sample_rate


def wav_read(path):
    """Read a PCM16 or float32 WAV file; multichannel input is averaged to mono.

    PCM16 samples are mapped to [-1, 1) by dividing by 32768.
    """
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", wavfile.WavFileWarning)
            rate, data = wavfile.read(path)
    except wavfile.WavFileWarning as exc:
        raise CorruptFile(f"{path}: {exc}") from exc
    except ValueError as exc:
        msg = str(exc)
        if "not understood" in msg or "Unknown wave file format" in msg or "Unsupported" in msg:
            raise UnsupportedFormat(f"{path}: {msg}") from exc
        raise CorruptFile(f"{path}: {msg}") from exc
    except EOFError as exc:
        raise CorruptFile(f"{path}: unexpected end of file") from exc
    except Exception as exc:  # struct.error and friends on mangled headers
        if isinstance(exc, OSError):
            raise
        raise CorruptFile(f"{path}: {exc}") from exc

    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise UnsupportedFormat(f"{path}: sample format {data.dtype} (only PCM16 and float32 are supported)")
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    if samples.size == 0:
        raise CorruptFile(f"{path}: no audio samples")
    return AudioBuffer(samples, int(rate))


def wav_write(path, buf, pcm16=False):
    x = np.asarray(buf.samples, dtype=np.float64)
    if pcm16:
        data = np.clip(np.round(x * 32768.0), -32768, 32767).astype(np.int16)
    else:
        data = x.astype(np.float32)
    wavfile.write(path, int(buf.sample_rate), data)
