"""Hot numeric loops, each in a numba and a pure-numpy flavour.

The public functions dispatch on :func:`superstab._backend.numba_enabled` at
call time, so flipping ``SUPERSTAB_NUMBA`` in the environment is enough to
switch paths. Both flavours enumerate p-subsets in the same lexicographic order.
"""
from itertools import combinations, islice

import numpy as np

from ._backend import njit, numba_enabled

_CHUNK = 1 << 15


def distance_matrix(x):
    x = np.asarray(x, dtype=np.float64)
    diff = x[:, None, :] - x[None, :, :]
    return np.sqrt((diff * diff).sum(axis=-1))


# --------------------------------------------------------------------------
# p-body energy over all p-subsets of a point cloud
# --------------------------------------------------------------------------

@njit
def _p_body_energy_numba(dist, p, A, B, m, n):
    N = dist.shape[0]
    if N < p:
        return 0.0
    idx = np.arange(p)
    total = 0.0
    while True:
        S = 0.0
        for a in range(p):
            ia = idx[a]
            for b in range(a + 1, p):
                S += dist[ia, idx[b]]
        if S == 0.0:
            return np.inf
        total += A * S ** (-m) - B * S ** (-n)
        i = p - 1
        while i >= 0 and idx[i] == N - p + i:
            i -= 1
        if i < 0:
            break
        idx[i] += 1
        for j in range(i + 1, p):
            idx[j] = idx[j - 1] + 1
    return total


def _p_body_energy_numpy(dist, p, A, B, m, n):
    N = dist.shape[0]
    if N < p:
        return 0.0
    pairs = list(combinations(range(p), 2))
    total = 0.0
    it = combinations(range(N), p)
    while True:
        block = np.array(list(islice(it, _CHUNK)), dtype=np.intp)
        if block.size == 0:
            break
        S = np.zeros(block.shape[0])
        for a, b in pairs:
            S += dist[block[:, a], block[:, b]]
        if np.any(S == 0.0):
            return np.inf
        total += float(np.sum(A * S ** (-m) - B * S ** (-n)))
    return total


def p_body_energy_kernel(points, p, A, B, m, n, backend=None):
    """Sum of ``A/S^m - B/S^n`` over all p-subsets; ``inf`` on a fully coincident subset."""
    dist = distance_matrix(points)
    backend = backend or ("numba" if numba_enabled() else "numpy")
    args = (dist, int(p), float(A), float(B), float(m), float(n))
    if backend == "numba":
        return float(_p_body_energy_numba(*args))
    return _p_body_energy_numpy(*args)


# --------------------------------------------------------------------------
# |V^-| of the scaled potential S^-m - S^-n with the first point at the origin
# --------------------------------------------------------------------------

@njit
def _abs_neg_origin_numba(z, p, d, m, n):
    k = z.shape[0]
    out = np.empty(k)
    q = p - 1
    for s in range(k):
        S = 0.0
        for i in range(q):
            r2 = 0.0
            for c in range(d):
                v = z[s, i * d + c]
                r2 += v * v
            S += np.sqrt(r2)
            for j in range(i + 1, q):
                r2 = 0.0
                for c in range(d):
                    v = z[s, i * d + c] - z[s, j * d + c]
                    r2 += v * v
                S += np.sqrt(r2)
        if S <= 1.0:
            out[s] = 0.0
        else:
            out[s] = S ** (-n) - S ** (-m)
    return out


def _abs_neg_origin_numpy(z, p, d, m, n):
    k = z.shape[0]
    pts = np.zeros((k, p, d))
    pts[:, 1:, :] = z.reshape(k, p - 1, d)
    ia, ib = np.triu_indices(p, 1)
    diff = pts[:, ia, :] - pts[:, ib, :]
    S = np.sqrt((diff * diff).sum(axis=-1)).sum(axis=1)
    out = np.zeros(k)
    mask = S > 1.0
    Sm = S[mask]
    out[mask] = Sm ** (-n) - Sm ** (-m)
    return out


def abs_negative_part_scaled(z, p, d, m, n, backend=None):
    """``|min(0, S^-m - S^-n)|`` for rows of ``z`` holding points 2..p (point 1 at 0)."""
    z = np.ascontiguousarray(z, dtype=np.float64)
    backend = backend or ("numba" if numba_enabled() else "numpy")
    if backend == "numba":
        return _abs_neg_origin_numba(z, int(p), int(d), float(m), float(n))
    return _abs_neg_origin_numpy(z, int(p), int(d), float(m), float(n))


def pairwise_sums(points):
    """Pairwise-distance sums for a batch shaped ``(k, p, d)``."""
    pts = np.asarray(points, dtype=np.float64)
    p = pts.shape[1]
    ia, ib = np.triu_indices(p, 1)
    diff = pts[:, ia, :] - pts[:, ib, :]
    return np.sqrt((diff * diff).sum(axis=-1)).sum(axis=1)
