"""
Optimization Module for gfcodebook.

Thread-count selection, optional Numba acceleration and the chunked worker
pool used by the shift-sum loops. The Numba kernels and their numpy fallbacks
return identical integer histograms, so results never depend on whether
Numba is installed.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

logger = logging.getLogger(__name__)

# Try to import optional dependencies
try:
    import numba
    from numba import jit, prange
    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False

# Upper bound on the size of one (shifts x set) exponent block in the numpy path.
CHUNK_ENTRIES = 2 ** 22


def get_optimal_thread_count():
    """
    Determine the number of worker threads for the shift loops.

    Returns:
        int: Physical cores minus one, capped at 8; 2 when psutil is missing.
    """
    try:
        import psutil
        num_physical_cores = psutil.cpu_count(logical=False)
        if num_physical_cores is None:
            num_physical_cores = psutil.cpu_count() or 2
        return min(max(1, num_physical_cores - 1), 8)
    except ImportError:
        return 2


def configure_numba(thread_count=None):
    """Set the Numba and BLAS thread counts; returns the count used, or None without Numba."""
    if not NUMBA_AVAILABLE:
        logger.debug("Numba not available, using numpy kernels")
        return None

    thread_count = thread_count or get_optimal_thread_count()
    numba.set_num_threads(thread_count)
    for var in ("OMP_NUM_THREADS", "MKL_NUM_THREADS", "OPENBLAS_NUM_THREADS"):
        os.environ[var] = str(thread_count)
    logger.debug("Numba configured with %d threads", thread_count)
    return thread_count


def map_chunks(func, total, chunk, workers=None):
    """
    Apply func(start, stop) over consecutive ranges covering [0, total).

    Chunks run on a ThreadPoolExecutor; results come back in chunk order so
    any reduction over them is deterministic.
    """
    bounds = [(start, min(start + chunk, total)) for start in range(0, total, max(1, chunk))]
    workers = workers or get_optimal_thread_count()
    if workers <= 1 or len(bounds) <= 1:
        return [func(a, b) for a, b in bounds]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(lambda ab: func(*ab), bounds))


if NUMBA_AVAILABLE:

    @jit(nopython=True, parallel=True)
    def _shift_histograms_kernel(shift_logs, set_logs, offsets, antilog, trace, m, p):
        n = shift_logs.shape[0]
        out = np.zeros((n, p), dtype=np.int64)
        for i in prange(n):
            la = shift_logs[i]
            for k in range(set_logs.shape[0]):
                lx = set_logs[k]
                if la < 0 or lx < 0:
                    e = offsets[k] % p
                else:
                    e = (trace[antilog[(la + lx) % m]] + offsets[k]) % p
                out[i, e] += 1
        return out


def _shift_histograms_numpy(shift_logs, set_logs, offsets, antilog, trace, m, p, workers):
    n, k = shift_logs.size, set_logs.size
    chunk = max(1, CHUNK_ENTRIES // max(k, 1))
    zero_x = set_logs < 0

    def block(start, stop):
        la = shift_logs[start:stop, None]
        prod = antilog[(la + set_logs[None, :]) % m]
        exps = np.where((la < 0) | zero_x[None, :], 0, trace[prod])
        exps = (exps + offsets[None, :]) % p
        rows = stop - start
        flat = (exps + p * np.arange(rows, dtype=np.int64)[:, None]).ravel()
        return np.bincount(flat, minlength=rows * p).reshape(rows, p)

    parts = map_chunks(block, n, chunk, workers)
    return np.concatenate(parts, axis=0) if parts else np.zeros((0, p), dtype=np.int64)


def shift_histograms(shift_logs, set_logs, antilog, trace, p, offsets=None, workers=None):
    """
    Exponent histograms of additive character sums over a fixed set.

    For each shift a = alpha^shift_logs[i] returns counts[i, e] =
    #{x = alpha^set_logs[k] : Tr(a x) + offsets[k] = e mod p}. A log of -1
    stands for the zero element on either side.

    Args:
        shift_logs: Discrete logs of the shifts (int64, -1 for zero).
        set_logs: Discrete logs of the summation set (int64, -1 for zero).
        antilog: Antilog table of the ambient field.
        trace: Absolute trace table of the ambient field (values in 0..p-1).
        p: Characteristic.
        offsets: Optional per-element exponent offsets.
        workers: Thread count for the numpy path.

    Returns:
        np.ndarray: int64 array of shape (len(shift_logs), p).
    """
    shift_logs = np.ascontiguousarray(shift_logs, dtype=np.int64)
    set_logs = np.ascontiguousarray(set_logs, dtype=np.int64)
    if offsets is None:
        offsets = np.zeros(set_logs.size, dtype=np.int64)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    m = antilog.size
    if NUMBA_AVAILABLE:
        return _shift_histograms_kernel(shift_logs, set_logs, offsets,
                                        np.ascontiguousarray(antilog, dtype=np.int64),
                                        np.ascontiguousarray(trace, dtype=np.int64), m, p)
    return _shift_histograms_numpy(shift_logs, set_logs, offsets, antilog, trace, m, p, workers)
