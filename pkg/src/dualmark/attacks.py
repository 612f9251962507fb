"""Signal-degradation channels used to probe watermark robustness.

All functions are pure; ``awgn`` draws from a generator seeded by its
``seed`` argument.
"""
from dataclasses import dataclass
from enum import Enum
import math

import numpy as np

from .dsp import dct_forward, dct_inverse
from .errors import InvalidInput


class AttackKind(str, Enum):
    AWGN = "awgn"
    HUM = "hum"
    AMPLIFY = "amplify"
    DELAY = "delay"
    INVERT = "invert"
    SPARSIFY = "sparsify"


def awgn(signal, snr_db, seed=0):
    """Add white Gaussian noise whose realised power sits exactly ``snr_db`` below the signal's."""
    x = np.asarray(signal, dtype=np.float64)
    p_signal = float(np.mean(x * x)) if x.size else 0.0
    if p_signal == 0.0:
        raise InvalidInput("AWGN needs a non-silent signal")
    noise = np.random.default_rng(seed).standard_normal(x.shape)
    noise -= noise.mean()
    noise *= math.sqrt(p_signal / (10.0 ** (snr_db / 10.0)) / float(np.mean(noise * noise)))
    return x + noise


def hum(signal, amplitude=0.125, freq=50.0, sample_rate=8000):
    if not 0.0 <= freq < sample_rate / 2.0:
        raise InvalidInput(f"hum frequency {freq} Hz is not below Nyquist ({sample_rate / 2} Hz)")
    x = np.asarray(signal, dtype=np.float64)
    t = np.arange(x.size) / sample_rate
    return x + amplitude * np.sin(2.0 * np.pi * freq * t)


def amplify(signal, gain_db=14.0):
    # no clipping: the pipeline is floating point end to end
    return np.asarray(signal, dtype=np.float64) * 10.0 ** (gain_db / 20.0)


def delay_samples(delay_ms, sample_rate):
    return int(round(delay_ms * sample_rate / 1000.0))


def delay(signal, delay_ms=100.0, sample_rate=8000):
    x = np.asarray(signal, dtype=np.float64)
    n = delay_samples(delay_ms, sample_rate)
    if n < 0:
        raise InvalidInput("delay must be non-negative")
    return np.concatenate([np.zeros(n), x])


def invert(signal):
    return -np.asarray(signal, dtype=np.float64)


def sparsify(signal, cutoff=0.05, return_fraction=False):
    """Zero every whole-signal DCT coefficient smaller than ``cutoff`` in magnitude."""
    c = dct_forward(np.asarray(signal, dtype=np.float64))
    small = np.abs(c) < cutoff
    c[small] = 0.0
    out = dct_inverse(c)
    if return_fraction:
        return out, float(small.mean()) if small.size else 0.0
    return out


@dataclass
class AttackSpec:
    kind: AttackKind
    snr_db: float = 20.0
    hum_amplitude: float = 0.125
    hum_freq: float = 50.0
    gain_db: float = 14.0
    delay_ms: float = 100.0
    cutoff: float = 0.05
    seed: int = 0

    def __post_init__(self):
        self.kind = AttackKind(self.kind)

    @property
    def label(self):
        return {
            AttackKind.AWGN: f"awgn({self.snr_db:g} dB)",
            AttackKind.HUM: f"hum({2 * self.hum_amplitude:g} Vpp, {self.hum_freq:g} Hz)",
            AttackKind.AMPLIFY: f"amplify({self.gain_db:g} dB)",
            AttackKind.DELAY: f"delay({self.delay_ms:g} ms)",
            AttackKind.INVERT: "invert",
            AttackKind.SPARSIFY: f"sparsify(<{self.cutoff:g})",
        }[self.kind]


def apply_attack(signal, spec, sample_rate):
    """Run ``spec`` on ``signal``; returns ``(attacked, realised_parameters)``."""
    x = np.asarray(signal, dtype=np.float64)
    kind = spec.kind
    if kind is AttackKind.AWGN:
        y = awgn(x, spec.snr_db, spec.seed)
        d = y - x
        return y, {"snr_db": spec.snr_db, "measured_snr_db": 10 * math.log10(np.dot(x, x) / np.dot(d, d)),
                   "seed": spec.seed}
    if kind is AttackKind.HUM:
        return hum(x, spec.hum_amplitude, spec.hum_freq, sample_rate), {
            "amplitude": spec.hum_amplitude, "freq": spec.hum_freq}
    if kind is AttackKind.AMPLIFY:
        return amplify(x, spec.gain_db), {"gain_db": spec.gain_db, "factor": 10 ** (spec.gain_db / 20)}
    if kind is AttackKind.DELAY:
        return delay(x, spec.delay_ms, sample_rate), {
            "delay_ms": spec.delay_ms, "delay_samples": delay_samples(spec.delay_ms, sample_rate)}
    if kind is AttackKind.INVERT:
        return invert(x), {}
    y, frac = sparsify(x, spec.cutoff, return_fraction=True)
    return y, {"cutoff": spec.cutoff, "fraction_zeroed": frac}
