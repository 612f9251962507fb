"""NumPy implementations of the hot kernels.

Used when the compiled extension is unavailable (or disabled with
``DUALMARK_PURE_PYTHON=1``). Every function operates on a batch of frames or
matrices at once; the compiled twin in ``_ckernels.pyx`` has the same
signatures and agrees to rounding.
"""
import numpy as np

SQRT1_2 = np.sqrt(0.5)
_EPS = np.finfo(np.float64).eps
_MAX_SWEEPS = 60


def haar_analysis(frames, levels):
    """Multilevel Haar analysis of each row of ``frames``.

    Returns an array of the same shape packed as ``[a_J, d_J, ..., d_1]``.
    """
    x = np.ascontiguousarray(frames, dtype=np.float64)
    out = np.empty_like(x)
    n = x.shape[1]
    approx = x
    for _ in range(levels):
        even = approx[:, 0::2]
        odd = approx[:, 1::2]
        half = n // 2
        out[:, half:n] = (even - odd) * SQRT1_2
        approx = (even + odd) * SQRT1_2
        n = half
    out[:, :n] = approx
    return out


def haar_synthesis(packed, levels):
    c = np.ascontiguousarray(packed, dtype=np.float64)
    n = c.shape[1] >> levels
    approx = c[:, :n].copy()
    for _ in range(levels):
        detail = c[:, n:2 * n]
        nxt = np.empty((c.shape[0], 2 * n))
        nxt[:, 0::2] = (approx + detail) * SQRT1_2
        nxt[:, 1::2] = (approx - detail) * SQRT1_2
        approx = nxt
        n *= 2
    return approx


def svd_batch(mats):
    """One-sided (Hestenes) cyclic Jacobi SVD of a stack of small square matrices.

    Returns ``(u, s, v)`` with ``mats[i] == u[i] @ diag(s[i]) @ v[i].T``,
    singular values descending, and the first nonzero entry of every column
    of ``u`` non-negative (the matching ``v`` column is flipped with it).
    """
    a = np.array(mats, dtype=np.float64, copy=True)
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError("expected a stack of square matrices")
    count, d, _ = a.shape
    # exact power-of-two normalisation keeps squared norms clear of under/overflow
    _, expo = np.frexp(np.abs(a).reshape(count, -1).max(axis=1, initial=0.0))
    a = np.ldexp(a, -expo[:, None, None])
    v = np.broadcast_to(np.eye(d), (count, d, d)).copy()

    for _ in range(_MAX_SWEEPS):
        rotated = False
        for p in range(d - 1):
            for q in range(p + 1, d):
                wp = a[:, :, p]
                wq = a[:, :, q]
                alpha = np.einsum("ij,ij->i", wp, wp)
                beta = np.einsum("ij,ij->i", wq, wq)
                gamma = np.einsum("ij,ij->i", wp, wq)
                need = (gamma != 0.0) & (np.abs(gamma) > _EPS * np.sqrt(alpha * beta))
                if not need.any():
                    continue
                rotated = True
                g = np.where(need, gamma, 1.0)
                zeta = (beta - alpha) / (2.0 * g)
                with np.errstate(over="ignore"):  # zeta**2 -> inf gives t = 0, as in the C kernel
                    t = np.where(zeta >= 0.0, 1.0, -1.0) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                c = np.where(need, c, 1.0)[:, None]
                s = np.where(need, s, 0.0)[:, None]
                ap, aq = a[:, :, p].copy(), a[:, :, q].copy()
                a[:, :, p] = c * ap - s * aq
                a[:, :, q] = s * ap + c * aq
                vp, vq = v[:, :, p].copy(), v[:, :, q].copy()
                v[:, :, p] = c * vp - s * vq
                v[:, :, q] = s * vp + c * vq
        if not rotated:
            break

    sig = np.sqrt(np.einsum("ijk,ijk->ik", a, a))
    order = np.argsort(-sig, axis=1, kind="stable")
    sig = np.take_along_axis(sig, order, axis=1)
    a = np.take_along_axis(a, order[:, None, :], axis=2)
    v = np.take_along_axis(v, order[:, None, :], axis=2)

    u = np.zeros_like(a)
    for i in range(count):
        _finish_u(a[i], sig[i], u[i], v[i])
    return u, np.ldexp(sig, expo[:, None]), v


def _finish_u(w, sig, u, v):
    d = w.shape[0]
    cutoff = sig[0] * d * _EPS
    for j in range(d):
        if sig[j] > cutoff and sig[j] > 0.0:
            u[:, j] = w[:, j] / sig[j]
        else:
            sig[j] = 0.0
            # complete the basis with the unit vector least covered by earlier columns
            best, best_norm = None, -1.0
            for k in range(d):
                cand = np.zeros(d)
                cand[k] = 1.0
                for _ in range(2):
                    cand -= u[:, :j] @ (u[:, :j].T @ cand)
                norm = np.linalg.norm(cand)
                if norm > best_norm:
                    best, best_norm = cand, norm
            u[:, j] = best / best_norm
    for j in range(d):
        col = u[:, j]
        nz = np.flatnonzero(np.abs(col) > _EPS)
        if nz.size and col[nz[0]] < 0.0:
            u[:, j] = -col
            v[:, j] = -v[:, j]
