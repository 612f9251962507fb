"""Bit error rate and signal-to-noise ratio."""
from dataclasses import dataclass
import math

import numpy as np

from .errors import InvalidInput


@dataclass
class BerResult:
    ber: float
    errors: int
    size: int
    per_watermark: tuple | None = None


def ber(reference, recovered):
    a = np.asarray(reference, dtype=np.uint8).ravel()
    b = np.asarray(recovered, dtype=np.uint8).ravel()
    if a.size != b.size:
        raise InvalidInput(f"bit sequences differ in length ({a.size} vs {b.size})")
    if a.size == 0:
        raise InvalidInput("cannot compute BER of empty sequences")
    errors = int(np.count_nonzero(a ^ b))
    return BerResult(errors / a.size, errors, a.size)


def multilevel_ber(*results):
    """Unweighted mean of the per-watermark BERs."""
    if not results:
        raise InvalidInput("no BER results to combine")
    return BerResult(
        ber=float(np.mean([r.ber for r in results])),
        errors=sum(r.errors for r in results),
        size=sum(r.size for r in results),
        per_watermark=tuple(r.ber for r in results),
    )


def snr(original, modified):
    """``10 log10(sum x^2 / sum (x - y)^2)`` in dB; ``inf`` when the signals match."""
    x = np.asarray(original, dtype=np.float64).ravel()
    y = np.asarray(modified, dtype=np.float64).ravel()
    if x.size != y.size:
        raise InvalidInput(f"signals differ in length ({x.size} vs {y.size})")
    power = float(np.dot(x, x))
    if power == 0.0:
        raise InvalidInput("original signal is all zeros")
    diff = x - y
    noise = float(np.dot(diff, diff))
    if noise == 0.0:
        return math.inf
    return 10.0 * math.log10(power / noise)


def format_db(value):
    return "inf" if math.isinf(value) else f"{value:.4f}"
