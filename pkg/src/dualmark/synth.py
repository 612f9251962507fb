"""Deterministic speech-like test signals.

The reference recordings are not redistributable, so tests and the
evaluation defaults use a synthetic talker: voiced syllables (glottal pulse
train through vowel formant resonators), fricative noise bursts and short
pauses over a faint noise floor.

Run ``python -m dualmark.synth out.wav`` to write one to disk.
"""
import sys

import numpy as np
from scipy import signal as sps

from .audio import AudioBuffer, wav_write

# (F1, F2, F3) in Hz for a handful of vowels
_VOWELS = [(730, 1090, 2440), (270, 2290, 3010), (530, 1840, 2480),
           (300, 870, 2240), (570, 840, 2410), (440, 1020, 2240)]


def _resonator(x, freq, bw, fs):
    # Klatt digital resonator, unity gain at DC
    c = -np.exp(-2 * np.pi * bw / fs)
    b = 2 * np.exp(-np.pi * bw / fs) * np.cos(2 * np.pi * freq / fs)
    return sps.lfilter([1.0 - b - c], [1.0, -b, -c], x)


def _voiced(n, fs, rng):
    f0 = rng.uniform(95, 150)
    contour = f0 * (1 + 0.12 * np.sin(np.linspace(0, np.pi, n) + rng.uniform(0, np.pi)))
    phase = np.cumsum(contour / fs)
    pulses = np.diff(np.floor(phase), prepend=0.0)
    # glottal source (-12 dB/oct) and lip radiation (+6 dB/oct)
    source = sps.lfilter([1.0], [1.0, -1.9, 0.9025], pulses)
    source = np.diff(source, prepend=0.0)
    y = source
    for freq, bw in zip(_VOWELS[rng.integers(len(_VOWELS))], (90, 120, 180)):
        y = _resonator(y, freq, bw, fs)
    return y * np.hanning(n) ** 0.5


def _fricative(n, fs, rng):
    b, a = sps.butter(4, [min(2500, fs / 2 * 0.6) / (fs / 2), 0.97], btype="band")
    y = sps.lfilter(b, a, rng.standard_normal(n))
    return 0.35 * y * np.hanning(n)


def synthetic_speech(duration=8.0, sample_rate=8000, seed=2024, peak=0.9):
    """A mono speech-like signal normalised to ``peak``."""
    rng = np.random.default_rng(seed)
    total = int(round(duration * sample_rate))
    out = np.zeros(total)
    pos = 0
    while pos < total:
        kind = rng.choice(["voiced", "voiced", "voiced", "fricative", "pause"])
        if kind == "voiced":
            n = int(rng.uniform(0.12, 0.35) * sample_rate)
            seg = _voiced(n, sample_rate, rng) * rng.uniform(0.5, 1.0)
        elif kind == "fricative":
            n = int(rng.uniform(0.05, 0.15) * sample_rate)
            seg = _fricative(n, sample_rate, rng) * rng.uniform(0.5, 1.0)
        else:
            n = int(rng.uniform(0.04, 0.2) * sample_rate)
            seg = np.zeros(n)
        seg = seg[: total - pos]
        out[pos: pos + seg.size] += seg
        pos += seg.size
    out /= np.max(np.abs(out))
    out += 1e-3 * rng.standard_normal(total)  # room noise; keeps pauses non-silent
    out *= peak / np.max(np.abs(out))
    return AudioBuffer(out, sample_rate)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    if not argv:
        print("usage: python -m dualmark.synth OUT.wav [SECONDS] [SEED]", file=sys.stderr)
        return 2
    duration = float(argv[1]) if len(argv) > 1 else 8.0
    seed = int(argv[2]) if len(argv) > 2 else 2024
    wav_write(argv[0], synthetic_speech(duration, seed=seed))
    return 0


if __name__ == "__main__":
    sys.exit(main())
