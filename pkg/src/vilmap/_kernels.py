"""Compiled inner loops.

Every sum here is a plain left-to-right accumulation so results are
bit-identical to a naive Python loop over the same terms.
"""
import math

import numba
import numpy as np

_jit = numba.njit(cache=True, nogil=True)


@_jit
def aligned_terms(x, c, w, offset, m):
    """Return (sum w*(x-c)^2, sum w) over ``x[:m]`` against ``c[offset:offset+m]``."""
    s = 0.0
    sw = 0.0
    for i in range(m):
        wi = w[offset + i]
        d = x[i] - c[offset + i]
        s += wi * (d * d)
        sw += wi
    return s, sw


@_jit
def activation_from_terms(s, sw, eps):
    return sw / (sw + math.sqrt(s) + eps)


@_jit
def best_offset_above(x, c, w, eps, floor):
    """Best alignment of pattern ``x`` against one node; returns (act, offset, overlap).

    An offset is abandoned early once even unit relevances on the remaining
    positions could not lift it above the best so far (or above ``floor``).
    Abandoned offsets are strictly worse, so whenever the returned activation
    is at least ``floor`` it equals the exhaustive scan. If every offset falls
    below ``floor`` the result is only a lower bound.
    """
    p = x.shape[0]
    L = c.shape[0]
    if L > p:
        n_off = L - p + 1
        m = p
    else:
        n_off = 1
        m = L
    best = -1.0
    best_o = 0
    for o in range(n_off):
        thr = best if best > floor else floor
        s = 0.0
        sw = 0.0
        abandoned = False
        for i in range(m):
            wi = w[o + i]
            d = x[i] - c[o + i]
            s += wi * (d * d)
            sw += wi
            if thr > 0.0 and (i & 7) == 7:
                cap = sw + (m - 1 - i)
                if cap / (cap + math.sqrt(s) + eps) < thr * (1.0 - 1e-12):
                    abandoned = True
                    break
        if abandoned:
            continue
        a = activation_from_terms(s, sw, eps)
        if a > best:
            best = a
            best_o = o
    return best, best_o, m


@_jit
def best_offset(x, c, w, eps):
    return best_offset_above(x, c, w, eps, -1.0)


@_jit
def winner_rows(x, C, W, ids, n, eps, best, best_id, best_off):
    """Fold rows into a running (activation, id, offset) winner; lowest id wins ties."""
    for r in range(n):
        a, o, _ = best_offset_above(x, C[r], W[r], eps, best)
        if a > best or (a == best and ids[r] < best_id):
            best = a
            best_id = ids[r]
            best_off = o
    return best, best_id, best_off


@_jit
def best_offsets_rows(x, C, W, n, eps, acts, offs):
    for r in range(n):
        a, o, _ = best_offset(x, C[r], W[r], eps)
        acts[r] = a
        offs[r] = o


@_jit
def relevance_row(d, out, eps_ds):
    L = d.shape[0]
    lo = d[0]
    hi = d[0]
    total = 0.0
    for i in range(L):
        v = d[i]
        total += v
        if v < lo:
            lo = v
        if v > hi:
            hi = v
    scale = eps_ds * (hi - lo)
    # a spread too small to represent counts as no spread
    if scale == 0.0:
        for i in range(L):
            out[i] = 1.0
        return
    mean = total / L
    for i in range(L):
        z = (d[i] - mean) / scale
        if z > 700.0:
            out[i] = 0.0
        else:
            out[i] = 1.0 / (1.0 + math.exp(z))


@_jit
def adapt_row(x, c, w, d, offset, rate, beta, eps_ds):
    """One node's update on the aligned overlap: distances, then relevances, then center."""
    m = min(x.shape[0], c.shape[0] - offset)
    rb = rate * beta
    for i in range(m):
        j = offset + i
        diff = x[i] - c[j]
        d[j] = (1.0 - rb) * d[j] + rb * abs(diff)
    relevance_row(d, w, eps_ds)
    for i in range(m):
        j = offset + i
        c[j] = c[j] + rate * (x[i] - c[j])


@_jit
def similarity_rows(W, n, w, m, out):
    """``1 - mean|W[r, :m] - w[:m]|`` for the first ``n`` rows."""
    for r in range(n):
        t = 0.0
        for i in range(m):
            t += abs(W[r, i] - w[i])
        out[r] = 1.0 - t / m


@_jit
def adapt_rows(x, C, W, D, rows, offsets, rate, beta, eps_ds):
    for k in range(rows.shape[0]):
        r = rows[k]
        adapt_row(x, C[r], W[r], D[r], offsets[k], rate, beta, eps_ds)


def warmup():
    """Trigger compilation (or cache load) of every kernel once."""
    x = np.zeros(2)
    C = np.zeros((1, 3))
    W = np.ones((1, 3))
    D = np.zeros((1, 3))
    acts = np.empty(1)
    offs = np.empty(1, dtype=np.int64)
    best_offsets_rows(x, C, W, 1, 1e-9, acts, offs)
    winner_rows(x, C, W, np.zeros(1, dtype=np.int64), 1, 1e-9, -1.0, -1, 0)
    adapt_rows(x, C, W, D, np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64), 0.1, 0.1, 0.1)
    similarity_rows(W, 1, W[0], 2, acts)
