"""Watermark extraction with static or known-character-tuned thresholds.

Every domain prefixes its payload with a known character (``'U'`` =
1010101). The detection ratios of those seven frames are used to tune the
threshold that is then applied to the remaining payload frames.
"""
from dataclasses import dataclass, field
from enum import Enum
import warnings

import numpy as np

from .codec import (
    BITS_PER_CHAR,
    Domain,
    bits_to_text,
    fit_length,
    frame_s11,
    invert_domain,
    known_bits,
    mismatch_fraction,
)
from .errors import InvalidKey, LikelyDesync

LEVEL2_MAX_ITER = 20
LEVEL3_MAX_ITER = 20
DESYNC_FRACTION = 0.10


class Mode(str, Enum):
    STATIC = "static"
    AOT = "aot"
    AOTX = "aotx"


class Detector(str, Enum):
    """What ``extract`` runs per domain."""

    STATIC = "static"
    ADAPTIVE = "adaptive"  # AOT on DCT-SVD, AOTx on DWT-SVD
    AOT = "aot"
    AOTX = "aotx"

    def mode_for(self, domain):
        if self is Detector.ADAPTIVE:
            return Mode.AOT if Domain(domain) is Domain.DCT_SVD else Mode.AOTX
        return Mode(self.value)


@dataclass
class RatioVector:
    ratios: np.ndarray
    domain: Domain


@dataclass
class ThresholdReport:
    mode: Mode
    threshold: float
    known_char_ber: float
    iterations: int = 0
    flag: bool = False

    def as_dict(self):
        return {"mode": self.mode.value, "threshold": self.threshold,
                "known_char_ber": self.known_char_ber, "iterations": self.iterations,
                "flag": self.flag}


@dataclass
class DomainDetection:
    domain: Domain
    bits: np.ndarray
    text: str
    report: ThresholdReport
    ratios: RatioVector


@dataclass
class DetectionResult:
    per_domain: dict
    warnings: list = field(default_factory=list)

    @property
    def desync(self):
        return bool(self.warnings)

    def __getitem__(self, domain):
        return self.per_domain[Domain(domain)]


def compute_ratios(signal, key):
    """Observed largest singular value of each frame divided by the stored key."""
    if np.any(~(key.s11_originals > 0.0)):
        raise InvalidKey(f"{key.domain.value}: key holds non-positive singular values")
    s = frame_s11(signal, key.domain, key.n_frames, key.frame_length)
    return RatioVector(s / key.s11_originals, key.domain)


def static_threshold(alpha):
    return 1.0 + alpha / 2.0


def detect_static(ratios, alpha):
    r = ratios.ratios if isinstance(ratios, RatioVector) else np.asarray(ratios, dtype=np.float64)
    return (r >= static_threshold(alpha)).astype(np.uint8)


def _error_rates(ratios, bits, th):
    read = ratios >= th
    ones = bits == 1
    ze = float(np.mean(~read[ones])) if ones.any() else 0.0
    oe = float(np.mean(read[~ones])) if (~ones).any() else 0.0
    n1 = int(ones.sum())
    ber = (ze * n1 + oe * (bits.size - n1)) / bits.size
    return ze, oe, ber


def _prepare(known_ratios, bits):
    r = np.asarray(known_ratios, dtype=np.float64).ravel()
    b = np.asarray(known_bits() if bits is None else bits, dtype=np.uint8).ravel()
    if r.size != b.size:
        raise ValueError(f"{r.size} ratios for {b.size} known bits")
    if b.all() or not b.any():
        raise ValueError("known bits must contain both 0s and 1s")
    return r, b


def aot_threshold(known_ratios, bits=None):
    """Midpoint between the highest 0-bit ratio and the lowest 1-bit ratio."""
    r, b = _prepare(known_ratios, bits)
    hi0 = r[b == 0].max()
    lo1 = r[b == 1].min()
    th = float(hi0 + (lo1 - hi0) / 2.0)
    return ThresholdReport(Mode.AOT, th, _error_rates(r, b, th)[2])


def aotx_threshold(known_ratios, bits=None):
    """AOT followed by coarse (x1.5 / x0.5) and fine (x1.1 / x0.9) refinement.

    Missed 1-bits (``ze``) pull the threshold down, spurious 1-bits (``oe``)
    push it up. The best threshold seen anywhere is returned, smallest on ties.
    """
    r, b = _prepare(known_ratios, bits)
    th = aot_threshold(r, b).threshold
    visited = {}
    iterations = 0

    def refine(th, step, cap):
        nonlocal iterations
        for _ in range(cap):
            iterations += 1
            ze, oe, ber = _error_rates(r, b, th)
            visited.setdefault(th, ber)
            if ze == 0.0 and oe == 0.0:
                return th, True
            th = th - th * step if ze > oe else th + th * step
            if th in visited:
                break
        return th, False

    th, flag = refine(th, 0.5, LEVEL2_MAX_ITER)
    if flag:
        return ThresholdReport(Mode.AOTX, th, 0.0, iterations, True)
    refine(th, 0.1, LEVEL3_MAX_ITER)
    best = min(visited, key=lambda t: (visited[t], t))
    return ThresholdReport(Mode.AOTX, float(best), float(visited[best]), iterations, False)


def _decide(ratios, alpha, mode, kbits):
    r = ratios.ratios
    n = kbits.size
    if mode is Mode.STATIC:
        th = static_threshold(alpha)
        report = ThresholdReport(Mode.STATIC, th, _error_rates(r[:n], kbits, th)[2])
    elif mode is Mode.AOT:
        report = aot_threshold(r[:n], kbits)
    else:
        report = aotx_threshold(r[:n], kbits)
    return (r >= report.threshold).astype(np.uint8), report


def _detect_domain(signal, key, mode, kbits):
    ratios = compute_ratios(signal, key)
    all_bits, report = _decide(ratios, key.alpha, mode, kbits)
    payload = all_bits[kbits.size:]
    text = bits_to_text(payload) if payload.size % BITS_PER_CHAR == 0 else ""
    det = DomainDetection(key.domain, payload, text, report, ratios)
    # known frames are inverted with their true bits
    frame_bits = np.concatenate([kbits, payload])
    return det, frame_bits


def extract(signal, keyfile, detector=Detector.ADAPTIVE):
    """Recover every watermark described by ``keyfile`` from ``signal``.

    The DCT-SVD layer is read first and undone before the DWT-SVD layer is
    read. The signal is zero-padded or truncated to the key's padded length.
    """
    detector = Detector(detector)
    x = np.asarray(getattr(signal, "samples", signal), dtype=np.float64).ravel()
    notes = []
    frac = mismatch_fraction(x.size, keyfile.padded_length)
    x = fit_length(x, keyfile.padded_length)
    kbits = known_bits(keyfile.known_char)

    per_domain = {}
    if keyfile.dct_key is not None:
        key = keyfile.dct_key
        det, frame_bits = _detect_domain(x[: key.span], key, detector.mode_for(key.domain), kbits)
        per_domain[key.domain] = det
        x = x.copy()
        x[: key.span] = invert_domain(x[: key.span], key, frame_bits)
    if keyfile.dwt_key is not None:
        key = keyfile.dwt_key
        det, _ = _detect_domain(x[: key.span], key, detector.mode_for(key.domain), kbits)
        per_domain[key.domain] = det

    if frac > DESYNC_FRACTION:
        notes.append(f"signal length differs from the key's by {frac:.1%}; framing is likely misaligned")
    elif frac > 0 and any(d.report.known_char_ber > 0 for d in per_domain.values()):
        notes.append("signal length differs from the key's and the known character is misread; "
                     "framing is likely misaligned")
    for note in notes:
        warnings.warn(note, LikelyDesync, stacklevel=2)
    return DetectionResult(per_domain, notes)
