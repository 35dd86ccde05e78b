"""Pure-Python/numpy versions of the compiled kernels in ``_kernels.pyx``.

Used when the extension is not built, or when ``BCIHOME_PURE_PYTHON=1``.
"""

import numpy as np


def autocorr_biased(x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = x.shape[0]
    return np.correlate(x, x, mode="full")[n - 1:] / n


def lfilter(b, a, x):
    b = [float(v) for v in b]
    a = [float(v) for v in a]
    order = max(len(b), len(a)) - 1
    b += [0.0] * (order + 1 - len(b))
    a += [0.0] * (order + 1 - len(a))
    z = [0.0] * (order + 1)
    out = np.empty(len(x), dtype=np.float64)
    for i, xi in enumerate(np.asarray(x, dtype=np.float64).tolist()):
        yi = b[0] * xi + z[0]
        for k in range(order - 1):
            z[k] = b[k + 1] * xi + z[k + 1] - a[k + 1] * yi
        if order > 0:
            z[order - 1] = b[order] * xi - a[order] * yi
        out[i] = yi
    return out


def above_runs(x, threshold):
    above = np.asarray(x, dtype=np.float64) > threshold
    edges = np.diff(np.concatenate(([False], above, [False])).astype(np.int8))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return starts.astype(np.intp), ends.astype(np.intp)
