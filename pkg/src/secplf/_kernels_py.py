"""Pure-Python/numpy versions of the sliding-window kernels.

Used when the compiled extension is unavailable (or SECPLF_PURE_PYTHON=1).
Results are identical to the compiled kernels: only exact operations (min,
comparison) and the same single multiplication ``eps * min`` are involved.
"""

from __future__ import annotations

from bisect import bisect_left

import numpy as np


def window_min(d: np.ndarray, T: int) -> np.ndarray:
    """Windowed minimum over d[M-T..M] for M = T..N-1.

    Van Herk / Gil-Werman: split into blocks of the window width, take prefix
    and suffix minima inside each block; any window is one suffix plus one
    prefix. O(N) regardless of T.
    """
    d = np.asarray(d, dtype=np.float64)
    n, w = d.shape[0], T + 1
    if n < w:
        return np.empty(0, dtype=np.float64)
    nblocks = -(-n // w)
    padded = np.full(nblocks * w, np.inf)
    padded[:n] = d
    blocks = padded.reshape(nblocks, w)
    prefix = np.minimum.accumulate(blocks, axis=1).ravel()
    suffix = np.minimum.accumulate(blocks[:, ::-1], axis=1)[:, ::-1].ravel()
    starts = np.arange(n - T)
    return np.minimum(suffix[starts], prefix[starts + T])


def max_delta(d: np.ndarray, T: int, eps: float) -> np.ndarray:
    d = np.asarray(d, dtype=np.float64)
    return d[T:] - eps * window_min(d, T)


def count_within(d: np.ndarray, T: int, eps: float) -> int:
    d = np.asarray(d, dtype=np.float64)
    return int(np.count_nonzero(d[T:] <= eps * window_min(d, T)))


def exceedance_lags(d: np.ndarray, eps: float) -> np.ndarray:
    d = np.asarray(d, dtype=np.float64)
    lags = np.empty(d.shape[0], dtype=np.int64)
    idx: list[int] = []
    val: list[float] = []
    for m, x in enumerate(d.tolist()):
        k = bisect_left(val, x)
        lags[m] = m - idx[k - 1] if k else -1
        a = eps * x
        while val and val[-1] >= a:
            val.pop()
            idx.pop()
        idx.append(m)
        val.append(a)
    return lags
