"""Text payloads, per-domain SVD embedding, key files and exact inversion.

Each frame carries one bit by scaling the largest singular value of a small
matrix assembled from the frame's transform coefficients:

* DWT-SVD: 4-level Haar, row ``i`` of a 4x4 matrix is the first four
  coefficients of detail band ``D(i+1)``.
* DCT-SVD: orthonormal DCT-II, a 3x3 matrix from the first, middle and last
  three coefficients.

The multilevel scheme embeds in the DWT-SVD domain first and the DCT-SVD
domain second; extraction runs in the opposite order.
"""
from dataclasses import dataclass
from enum import Enum
import json
import math

import numpy as np

from . import dsp
from .audio import AudioBuffer
from .errors import DegenerateFrame, InvalidInput, InvalidKey

FORMAT_VERSION = 1
KNOWN_CHAR = "U"
BITS_PER_CHAR = 7


class Domain(str, Enum):
    DWT_SVD = "dwt_svd"
    DCT_SVD = "dct_svd"


@dataclass
class BitPayload:
    bits: np.ndarray
    source_text: str

    def __len__(self):
        return self.bits.size


def text_to_bits(text):
    """7-bit big-endian ASCII encoding, one character after another."""
    if not isinstance(text, str) or not text:
        raise InvalidInput("watermark text must be a non-empty string")
    bad = sorted({c for c in text if ord(c) > 127})
    if bad:
        raise InvalidInput(f"non-ASCII character(s) in watermark: {''.join(bad)!r}")
    codes = np.frombuffer(text.encode("ascii"), dtype=np.uint8)
    shifts = np.arange(BITS_PER_CHAR - 1, -1, -1, dtype=np.uint8)
    bits = (codes[:, None] >> shifts) & 1
    return BitPayload(bits.ravel().astype(np.uint8), text)


def bits_to_text(bits):
    b = np.asarray(bits, dtype=np.uint8).ravel()
    if b.size % BITS_PER_CHAR:
        raise InvalidInput(f"bit count {b.size} is not a multiple of {BITS_PER_CHAR}")
    weights = 1 << np.arange(BITS_PER_CHAR - 1, -1, -1)
    codes = b.reshape(-1, BITS_PER_CHAR) @ weights
    return "".join(chr(int(c)) for c in codes)


def _as_bits(payload):
    if isinstance(payload, BitPayload):
        return payload.bits
    bits = np.asarray(payload, dtype=np.uint8).ravel()
    if bits.size == 0 or np.any(bits > 1):
        raise InvalidInput("payload must be a non-empty sequence of 0/1")
    return bits


# -- matrix layouts ---------------------------------------------------------

def dct_matrix_indices(length):
    if length < 9:
        raise InvalidInput(f"need at least 9 DCT coefficients, got {length}")
    mid = length // 2
    return np.array([[0, 1, 2], [mid - 1, mid, mid + 1], [length - 3, length - 2, length - 1]])


def build_dct_matrix(coeffs):
    c = np.asarray(coeffs, dtype=np.float64)
    return c[..., dct_matrix_indices(c.shape[-1])]


def scatter_dct_matrix(x, coeffs):
    out = np.array(coeffs, dtype=np.float64, copy=True)
    out[..., dct_matrix_indices(out.shape[-1])] = x
    return out


def dwt_matrix_indices(length):
    """Positions, in the packed ``[a4, d4, d3, d2, d1]`` layout, of the 4x4 matrix entries."""
    if length < dsp.MIN_FRAME or length % dsp.FRAME_MULTIPLE:
        raise InvalidInput(f"frame length {length} leaves fewer than 4 coefficients in D4")
    starts = [length // 2, length // 4, length // 8, length // 16]  # D1..D4
    return np.array([[s + j for j in range(4)] for s in starts])


def build_dwt_matrix(pyramid):
    bands = pyramid.details
    if any(np.size(b) < 4 for b in bands):
        raise InvalidInput("every detail band needs at least 4 coefficients")
    return np.array([np.asarray(b, dtype=np.float64)[:4] for b in bands])


def scatter_dwt_matrix(x, pyramid):
    x = np.asarray(x, dtype=np.float64)
    bands = [np.array(b, dtype=np.float64, copy=True) for b in pyramid.details]
    if any(b.size < 4 for b in bands):
        raise InvalidInput("every detail band needs at least 4 coefficients")
    for row, band in zip(x, bands):
        band[:4] = row
    return dsp.DwtPyramid(d1=bands[0], d2=bands[1], d3=bands[2], d4=bands[3],
                          a4=np.array(pyramid.a4, dtype=np.float64, copy=True))


_FORWARD = {Domain.DWT_SVD: dsp.dwt4_packed, Domain.DCT_SVD: dsp.dct_forward}
_INVERSE = {Domain.DWT_SVD: dsp.dwt4_unpacked, Domain.DCT_SVD: dsp.dct_inverse}
_INDICES = {Domain.DWT_SVD: dwt_matrix_indices, Domain.DCT_SVD: dct_matrix_indices}


# -- keys -------------------------------------------------------------------

@dataclass
class DomainKey:
    domain: Domain
    s11_originals: np.ndarray
    alpha: float
    n_frames: int
    frame_length: int
    payload_bits: int = 0

    def __post_init__(self):
        self.domain = Domain(self.domain)
        self.s11_originals = np.asarray(self.s11_originals, dtype=np.float64).ravel()
        if self.s11_originals.size != self.n_frames:
            raise InvalidKey(f"{self.domain.value}: {self.s11_originals.size} key values for {self.n_frames} frames")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidKey(f"alpha must lie in (0, 1), got {self.alpha}")

    @property
    def span(self):
        return self.n_frames * self.frame_length


@dataclass
class KeyFile:
    alpha: float
    sample_rate: int
    padded_length: int
    dwt_key: DomainKey | None = None
    dct_key: DomainKey | None = None
    known_char: str = KNOWN_CHAR
    format_version: int = FORMAT_VERSION

    @property
    def known_char_frames(self):
        return BITS_PER_CHAR

    @property
    def payload_lengths(self):
        return {k.domain: k.payload_bits for k in self.keys()}

    def keys(self):
        return [k for k in (self.dwt_key, self.dct_key) if k is not None]

    def key_for(self, domain):
        return self.dwt_key if Domain(domain) is Domain.DWT_SVD else self.dct_key

    def to_json(self):
        doc = {
            "format_version": self.format_version,
            "alpha": self.alpha,
            "sample_rate": self.sample_rate,
            "padded_length": self.padded_length,
            "known_char": self.known_char,
        }
        raw = {}
        for key in self.keys():
            marker = f"@@s11:{key.domain.value}@@"
            doc[key.domain.value] = {
                "n_frames": key.n_frames,
                "frame_length": key.frame_length,
                "payload_bits": key.payload_bits,
                "s11_originals": marker,
            }
            # 17 significant digits round-trip every double exactly
            raw[marker] = "[" + ", ".join(f"{v:.17g}" for v in key.s11_originals) + "]"
        text = json.dumps(doc, indent=2)
        for marker, arr in raw.items():
            text = text.replace(json.dumps(marker), arr)
        return text + "\n"

    @classmethod
    def from_json(cls, text):
        try:
            doc = json.loads(text)
            version = int(doc["format_version"])
            if version != FORMAT_VERSION:
                raise InvalidKey(f"unsupported key format_version {version}")
            alpha = float(doc["alpha"])
            keys = {}
            for dom in Domain:
                d = doc.get(dom.value)
                if d is None:
                    continue
                keys[dom] = DomainKey(
                    domain=dom,
                    s11_originals=np.array(d["s11_originals"], dtype=np.float64),
                    alpha=alpha,
                    n_frames=int(d["n_frames"]),
                    frame_length=int(d["frame_length"]),
                    payload_bits=int(d["payload_bits"]),
                )
            kf = cls(
                alpha=alpha,
                sample_rate=int(doc["sample_rate"]),
                padded_length=int(doc["padded_length"]),
                dwt_key=keys.get(Domain.DWT_SVD),
                dct_key=keys.get(Domain.DCT_SVD),
                known_char=doc.get("known_char", KNOWN_CHAR),
                format_version=version,
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidKey):
                raise
            raise InvalidKey(f"malformed key file: {exc}") from exc
        if not kf.keys():
            raise InvalidKey("key file holds no domain keys")
        for key in kf.keys():
            if key.n_frames != kf.known_char_frames + key.payload_bits:
                raise InvalidKey(f"{key.domain.value}: n_frames does not match known character + payload")
        return kf

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


# -- per-domain embedding ---------------------------------------------------

def _frames_to_matrices(frames, domain):
    coeffs = _FORWARD[domain](frames)
    idx = _INDICES[domain](coeffs.shape[1])
    return coeffs, idx, coeffs[:, idx]


def frame_s11(signal, domain, n_frames, frame_length=None):
    """Largest singular value of every frame's matrix in ``domain``."""
    x = np.asarray(signal, dtype=np.float64).ravel()
    if frame_length is not None:
        if x.size != n_frames * frame_length:
            raise InvalidInput(f"signal has {x.size} samples, framing expects {n_frames * frame_length}")
        frames = x.reshape(n_frames, frame_length)
    else:
        frames = dsp.frame_signal(x, n_frames)
    _, _, mats = _frames_to_matrices(frames, Domain(domain))
    _, s, _ = dsp.svd_stack(mats)
    return s[:, 0]


def _rescale_s11(frames, domain, factors):
    """Multiply each frame's largest singular value by ``factors[n]`` and resynthesise."""
    coeffs, idx, mats = _frames_to_matrices(frames, domain)
    u, s, v = dsp.svd_stack(mats)
    original = s[:, 0].copy()
    touched = factors != 1.0
    if touched.any():
        s[:, 0] *= factors
        new = dsp.reconstruct_stack(u[touched], s[touched], v[touched])
        rows = np.flatnonzero(touched)
        coeffs[rows[:, None, None], idx[None]] = new
        frames = frames.copy()
        frames[touched] = _INVERSE[domain](coeffs[touched])
    return frames, original


def domain_frame_length(n_samples, n_frames):
    """Frame length used when embedding ``n_frames`` bits into ``n_samples``.

    Hosts with room for ``n_frames`` minimum-size frames get the largest
    multiple-of-16 length that fits, leaving a tail of fewer than
    ``16 * n_frames`` samples untouched; padding up instead would leave whole
    frames of zeros. Shorter inputs fall back to zero padding.
    """
    if n_frames < 1:
        raise InvalidInput("n_frames must be >= 1")
    if n_samples >= n_frames * dsp.MIN_FRAME:
        return (n_samples // n_frames) // dsp.FRAME_MULTIPLE * dsp.FRAME_MULTIPLE
    return dsp.frame_length_for(n_samples, n_frames)


def embed_domain(signal, payload, alpha, domain):
    """Embed one bit per frame in ``domain``; returns ``(watermarked, DomainKey)``.

    ``payload`` is the complete frame sequence, known character included.
    """
    domain = Domain(domain)
    bits = _as_bits(payload)
    if not 0.0 < alpha < 1.0:
        raise InvalidInput(f"alpha must lie in (0, 1), got {alpha}")
    x = np.asarray(signal, dtype=np.float64).ravel()
    if x.size == 0:
        raise InvalidInput("cannot embed into an empty signal")
    frame_len = domain_frame_length(x.size, bits.size)
    span = bits.size * frame_len
    if span <= x.size:
        out = x.copy()
        frames = x[:span].reshape(bits.size, frame_len)
    else:
        frames = dsp.frame_signal(x, bits.size)
        out = np.zeros(span)
    marked, k = _rescale_s11(frames, domain, 1.0 + alpha * bits)
    dead = np.flatnonzero(~(k > 0.0))
    if dead.size:
        raise DegenerateFrame(domain.value, dead)
    out[:span] = marked.ravel()
    key = DomainKey(domain, k, alpha, bits.size, frame_len,
                    payload_bits=max(bits.size - BITS_PER_CHAR, 0))
    return out, key


def invert_domain(signal, key, detected_bits):
    """Undo one domain's embedding given the bits read from every frame."""
    x = np.asarray(signal, dtype=np.float64).ravel()
    if x.size != key.span:
        raise InvalidInput(f"signal has {x.size} samples, key framing expects {key.span}")
    bits = np.asarray(detected_bits, dtype=np.float64).ravel()
    if bits.size != key.n_frames:
        raise InvalidInput(f"{bits.size} bits for {key.n_frames} frames")
    frames = x.reshape(key.n_frames, key.frame_length)
    out, _ = _rescale_s11(frames, key.domain, 1.0 / (1.0 + key.alpha * bits))
    return out.ravel()


def known_bits(char=KNOWN_CHAR):
    return text_to_bits(char).bits


def min_host_length(*n_frames):
    return max(n_frames) * dsp.MIN_FRAME


def _check_host(host, *n_frames):
    need = min_host_length(*n_frames)
    if host.samples.size < need:
        raise InvalidInput(
            f"host has {host.samples.size} samples; at least {need} are required "
            f"({max(n_frames)} frames x {dsp.MIN_FRAME} samples)"
        )


def embed_multilevel(host, wm_dwt, wm_dct, alpha, known_char=KNOWN_CHAR):
    """DWT-SVD embedding of ``wm_dwt`` followed by DCT-SVD embedding of ``wm_dct``."""
    if not isinstance(host, AudioBuffer):
        raise InvalidInput("host must be an AudioBuffer")
    prefix = known_bits(known_char)
    dwt_bits = np.concatenate([prefix, text_to_bits(wm_dwt).bits])
    dct_bits = np.concatenate([prefix, text_to_bits(wm_dct).bits])
    _check_host(host, dwt_bits.size, dct_bits.size)

    stage1, dwt_key = embed_domain(host.samples, dwt_bits, alpha, Domain.DWT_SVD)
    stage2, dct_key = embed_domain(stage1, dct_bits, alpha, Domain.DCT_SVD)
    keyfile = KeyFile(alpha=alpha, sample_rate=host.sample_rate, padded_length=stage2.size,
                      dwt_key=dwt_key, dct_key=dct_key, known_char=known_char)
    return AudioBuffer(stage2, host.sample_rate), keyfile


def embed_single(host, text, alpha, domain, known_char=KNOWN_CHAR):
    """One watermark in one domain (the single-domain reference schemes)."""
    domain = Domain(domain)
    bits = np.concatenate([known_bits(known_char), text_to_bits(text).bits])
    _check_host(host, bits.size)
    out, key = embed_domain(host.samples, bits, alpha, domain)
    keyfile = KeyFile(alpha=alpha, sample_rate=host.sample_rate, padded_length=out.size,
                      known_char=known_char,
                      **{"dwt_key" if domain is Domain.DWT_SVD else "dct_key": key})
    return AudioBuffer(out, host.sample_rate), keyfile


def fit_length(signal, length):
    """Zero-pad or truncate to ``length`` samples."""
    x = np.asarray(signal, dtype=np.float64).ravel()
    if x.size >= length:
        return x[:length].copy()
    out = np.zeros(length)
    out[: x.size] = x
    return out


def mismatch_fraction(n_samples, padded_length):
    return abs(n_samples - padded_length) / padded_length if padded_length else math.inf
