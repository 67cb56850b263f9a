"""Pure numpy replication loops, used when the compiled extension is absent.

Same signatures, draw order and error codes as ``_kernels.pyx``. Instead of
looping over replications, these advance a whole batch of replications in
lockstep, which the counter-based streams make possible.
"""

import numpy as np

from .rng import GOLDEN, MASK64, mix64_array, stream_keys, uniforms


def stream_times(t, n, m, seed, start, count, cap):
    t = np.asarray(t, dtype=np.float64)
    keys = stream_keys(seed, start, count)
    out = np.empty(count, dtype=np.int64)
    idx = np.arange(count)
    last = np.zeros(count)
    k = np.zeros(count, dtype=np.int64)
    blk = np.zeros(count, dtype=np.int64)
    fm = float(m)
    j = 0
    while idx.size:
        j += 1
        if j > cap:
            out[idx] = -1
            break
        word = mix64_array(keys + np.uint64((GOLDEN * j) & MASK64))
        u = (word >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)
        um = u * fm
        b = np.floor(um)
        y = um - b
        hi = last + t[n - k] * (1.0 - last)
        acc = (b == blk) & (y >= last) & (y <= hi)
        if not acc.any():
            continue
        last = np.where(acc, y, last)
        k += acc
        full = k == n
        if full.any():
            blk += full
            k[full] = 0
            last[full] = 0.0
            done = blk == m
            if done.any():
                out[idx[done]] = j
                keep = ~done
                idx, keys, last, k, blk = idx[keep], keys[keep], last[keep], k[keep], blk[keep]
    return out


def shortcut_times(t, n, seed, start, count):
    t = np.asarray(t, dtype=np.float64)
    keys = stream_keys(seed, start, count)
    j = np.zeros(count, dtype=np.uint64)
    x = np.zeros(count)
    total = np.zeros(count, dtype=np.int64)
    bad = np.zeros(count, dtype=bool)
    one = np.uint64(1)
    for k in range(n):
        lam = t[n - k] * (1.0 - x)
        bad |= ~(lam > 0.0)
        j += one
        u = uniforms(keys, j)
        zero = u == 0.0
        while zero.any():
            j[zero] += one
            u[zero] = uniforms(keys[zero], j[zero])
            zero = u == 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            gap = np.ceil(np.log(u) / np.log1p(-lam))
        gap = np.where(lam >= 1.0, 1.0, gap)
        total += np.where(bad, 0, gap).astype(np.int64)
        j += one
        x = x + uniforms(keys, j) * lam
    total[bad] = -2
    return total


def size_focused_counts(values, horizon, seed, start, count):
    values = np.asarray(values, dtype=np.float64)
    width = values.shape[1]
    keys = stream_keys(seed, start, count)
    x = np.zeros(count)
    ix = np.zeros(count, dtype=np.int64)
    out = np.zeros(count, dtype=np.int64)
    for step, i in enumerate(range(horizon, 0, -1), start=1):
        y = uniforms(keys, np.full(count, step, dtype=np.uint64))
        row = values[i - 1]
        iy = np.floor(y * (width - 1) + 0.5).astype(np.int64)
        np.minimum(iy, width - 1, out=iy)
        acc = (y > x) & (1.0 + row[iy] >= row[ix])
        out += acc
        x = np.where(acc, y, x)
        ix = np.where(acc, iy, ix)
    return out
