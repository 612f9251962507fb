"""Framing, orthonormal DCT, 4-level Haar DWT and small-matrix SVD.

Frames are handled as rows of a 2-D array so every transform can run over a
whole signal at once.
"""
from dataclasses import dataclass

import numpy as np
from scipy import fft

from . import kernels
from .errors import InvalidInput

DWT_LEVELS = 4
MIN_FRAME = 64
FRAME_MULTIPLE = 16


def frame_length_for(n_samples, n_frames):
    """Smallest valid frame length that fits ``n_samples`` into ``n_frames`` frames."""
    if n_frames < 1:
        raise InvalidInput("n_frames must be >= 1")
    per = -(-n_samples // n_frames)
    per = -(-per // FRAME_MULTIPLE) * FRAME_MULTIPLE
    return max(MIN_FRAME, per)


def frame_signal(signal, n_frames):
    """Zero-pad ``signal`` at the end and split it into ``n_frames`` equal frames.

    Returns an array of shape ``(n_frames, frame_length)``.
    """
    x = np.asarray(signal, dtype=np.float64).ravel()
    if x.size == 0:
        raise InvalidInput("cannot frame an empty signal")
    frame_len = frame_length_for(x.size, n_frames)
    padded = np.zeros(n_frames * frame_len)
    padded[: x.size] = x
    return padded.reshape(n_frames, frame_len)


def dct_forward(frame):
    """Orthonormal DCT-II along the last axis."""
    return fft.dct(np.asarray(frame, dtype=np.float64), type=2, norm="ortho", axis=-1)


def dct_inverse(coeffs):
    return fft.idct(np.asarray(coeffs, dtype=np.float64), type=2, norm="ortho", axis=-1)


@dataclass
class DwtPyramid:
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray
    d4: np.ndarray
    a4: np.ndarray

    @property
    def details(self):
        return (self.d1, self.d2, self.d3, self.d4)


def _check_dyadic(length):
    if length < FRAME_MULTIPLE or length % FRAME_MULTIPLE:
        raise InvalidInput(f"frame length {length} is not a positive multiple of {FRAME_MULTIPLE}")


def dwt4_packed(frames):
    """Batched 4-level Haar analysis; rows packed as ``[a4, d4, d3, d2, d1]``."""
    f = np.atleast_2d(np.asarray(frames, dtype=np.float64))
    _check_dyadic(f.shape[1])
    return kernels.haar_analysis(f, DWT_LEVELS)


def dwt4_unpacked(packed):
    p = np.atleast_2d(np.asarray(packed, dtype=np.float64))
    _check_dyadic(p.shape[1])
    return kernels.haar_synthesis(p, DWT_LEVELS)


def dwt4_forward(frame):
    """4-level Haar decomposition of a single frame."""
    packed = dwt4_packed(frame)[0]
    n = packed.size
    q = n // 16
    return DwtPyramid(
        d1=packed[n // 2:],
        d2=packed[n // 4: n // 2],
        d3=packed[n // 8: n // 4],
        d4=packed[q: n // 8],
        a4=packed[:q],
    )


def dwt4_inverse(pyramid):
    d1, d2, d3, d4, a4 = (np.asarray(b, dtype=np.float64).ravel() for b in
                          (pyramid.d1, pyramid.d2, pyramid.d3, pyramid.d4, pyramid.a4))
    q = a4.size
    if q == 0 or d4.size != q or d3.size != 2 * q or d2.size != 4 * q or d1.size != 8 * q:
        raise InvalidInput(
            f"inconsistent band lengths a4={a4.size} d4={d4.size} d3={d3.size} d2={d2.size} d1={d1.size}"
        )
    return dwt4_unpacked(np.concatenate([a4, d4, d3, d2, d1]))[0]


@dataclass
class SvdTriple:
    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    @property
    def dim(self):
        return self.s.size


def svd_small(x):
    """Exact SVD of a 3x3 or 4x4 matrix by cyclic one-sided Jacobi."""
    m = np.asarray(x, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in (3, 4):
        raise InvalidInput(f"expected a 3x3 or 4x4 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInput("matrix has non-finite entries")
    u, s, v = kernels.svd_batch(m[None])
    return SvdTriple(u[0], s[0], v[0])


def svd_reconstruct(t):
    return (t.u * t.s) @ t.v.T


def svd_stack(mats):
    """Batched variant of :func:`svd_small` returning ``(u, s, v)`` arrays."""
    m = np.asarray(mats, dtype=np.float64)
    if not np.all(np.isfinite(m)):
        raise InvalidInput("matrix stack has non-finite entries")
    return kernels.svd_batch(m)


def reconstruct_stack(u, s, v):
    return np.einsum("nij,nj,nkj->nik", u, s, v)
