"""Hot simulation kernels for exhaustive enumeration.

Two rules have dedicated kernels: direction-table rules (memoryless, shift
invariant, locally decided) and the last-block-setter rule. Each kernel
exists twice, as a numba @njit scalar loop and as a vectorized pure-numpy
lockstep simulation over a whole batch of words.

Backend selection: the PARKING_BACKEND environment variable picks the
default: "numba" (default when importable), "numpy", or "python" (no
kernels; everything goes through the reference engine in procedures.py).
Call sites may override per call via the `backend=` argument.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap


BACKENDS = ("numba", "numpy", "python")


def default_backend() -> str:
    choice = os.environ.get("PARKING_BACKEND", "").strip().lower()
    if choice in BACKENDS:
        if choice == "numba" and not _HAVE_NUMBA:
            warnings.warn("numba unavailable, falling back to numpy")
            return "numpy"
        return choice
    if choice:
        warnings.warn(f"unknown PARKING_BACKEND={choice!r}, using default")
    return "numba" if _HAVE_NUMBA else "numpy"


def resolve_backend(backend: str | None) -> str:
    if backend is None:
        return default_backend()
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not _HAVE_NUMBA:
        raise ValueError("numba backend requested but numba is unavailable")
    return backend


def word_space_size(r: int, lo: int = 1, hi: int | None = None) -> int:
    hi = r + 1 if hi is None else hi
    return (hi - lo + 1) ** r


def alphabet_chunks(alphabet, r: int, chunk: int = 1 << 15):
    """Yield all length-r words over the given letters as (m, r) int64
    arrays, in mixed-radix order (last letter fastest)."""
    letters = np.asarray(sorted(alphabet), dtype=np.int64)
    base = len(letters)
    total = base**r
    weights = base ** np.arange(r - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        yield letters[(idx[:, None] // weights[None, :]) % base]


def word_chunks(r: int, lo: int = 1, hi: int | None = None, chunk: int = 1 << 15):
    """Yield the word space {lo..hi}^r as (m, r) int64 arrays."""
    hi = r + 1 if hi is None else hi
    yield from alphabet_chunks(range(lo, hi + 1), r, chunk)


# ---------------------------------------------------------------------------
# direction-table rule
#
# words hold absolute spots; positions are offset by `base` so that every
# reachable cell, including the scan sentinels, stays inside the buffer.


@njit(cache=True, nogil=True)
def _table_parked_numba(words, rights, default_right, base, width):
    n, r = words.shape
    nrows = rights.shape[0]
    parked = np.empty((n, r), np.int64)
    occ = np.zeros(width, np.uint8)
    touched = np.empty(r, np.int64)
    for w in range(n):
        for j in range(r):
            pos = words[w, j] - base
            if occ[pos] == 0:
                spot = pos
            else:
                t = pos
                while occ[t - 1] == 1:
                    t -= 1
                u = pos
                while occ[u + 1] == 1:
                    u += 1
                size = u - t + 1
                if size <= nrows:
                    go_right = rights[size - 1, pos - t]
                else:
                    go_right = default_right
                spot = u + 1 if go_right else t - 1
            occ[spot] = 1
            touched[j] = spot
            parked[w, j] = spot + base
        for j in range(r):
            occ[touched[j]] = 0
    return parked


def _table_parked_numpy(words, rights, default_right, base, width):
    n, r = words.shape
    nrows = rights.shape[0]
    occ = np.zeros((n, width), bool)
    parked = np.empty((n, r), np.int64)
    cols = np.arange(width)
    rows_idx = np.arange(n)
    for j in range(r):
        pos = words[:, j] - base
        bumped = occ[rows_idx, pos]
        free = ~occ
        # nearest free cell at or left/right of each column
        lf = np.maximum.accumulate(np.where(free, cols, -1), axis=1)
        nf = np.minimum.accumulate(np.where(free, cols, width)[:, ::-1], axis=1)[:, ::-1]
        lfp = lf[rows_idx, pos]  # == t-1 where bumped (pos itself is occupied)
        nfp = nf[rows_idx, pos]  # == u+1 where bumped
        size = nfp - lfp - 1
        i = pos - lfp
        lookup = rights[
            np.clip(size, 1, nrows) - 1, np.clip(i, 1, nrows) - 1
        ].astype(bool)
        go_right = np.where(size <= nrows, lookup, default_right)
        spot = np.where(bumped, np.where(go_right, nfp, lfp), pos)
        occ[rows_idx, spot] = True
        parked[:, j] = spot + base
    return parked


# ---------------------------------------------------------------------------
# last-block-setter rule
#
# rec[·] holds, at the two endpoints of every block, the preference of the
# last car that parked on that block; interior entries may be stale.


@njit(cache=True, nogil=True)
def _lbs_parked_numba(words, base, width):
    n, r = words.shape
    parked = np.empty((n, r), np.int64)
    occ = np.zeros(width, np.uint8)
    rec = np.zeros(width, np.int64)
    touched = np.empty(r, np.int64)
    for w in range(n):
        for j in range(r):
            a = words[w, j]
            pos = a - base
            if occ[pos] == 0:
                spot = pos
            else:
                t = pos
                while occ[t - 1] == 1:
                    t -= 1
                u = pos
                while occ[u + 1] == 1:
                    u += 1
                spot = u + 1 if a >= rec[t] else t - 1
            occ[spot] = 1
            t2 = spot
            while occ[t2 - 1] == 1:
                t2 -= 1
            u2 = spot
            while occ[u2 + 1] == 1:
                u2 += 1
            rec[t2] = a
            rec[u2] = a
            touched[j] = spot
            parked[w, j] = spot + base
        for j in range(r):
            occ[touched[j]] = 0
    return parked


def _lbs_parked_numpy(words, base, width):
    n, r = words.shape
    occ = np.zeros((n, width), bool)
    rec = np.zeros((n, width), np.int64)
    parked = np.empty((n, r), np.int64)
    cols = np.arange(width)
    rows_idx = np.arange(n)

    def free_bounds(pos):
        free = ~occ
        lf = np.maximum.accumulate(np.where(free, cols, -1), axis=1)
        nf = np.minimum.accumulate(np.where(free, cols, width)[:, ::-1], axis=1)[:, ::-1]
        return lf[rows_idx, pos], nf[rows_idx, pos]

    for j in range(r):
        a = words[:, j]
        pos = a - base
        bumped = occ[rows_idx, pos]
        lfp, nfp = free_bounds(pos)
        block_rec = rec[rows_idx, np.clip(lfp + 1, 0, width - 1)]
        spot = np.where(bumped, np.where(a >= block_rec, nfp, lfp), pos)
        occ[rows_idx, spot] = True
        # endpoints of the (possibly merged) block around the parked spot
        lf2, nf2 = free_bounds(spot)
        rec[rows_idx, lf2 + 1] = a
        rec[rows_idx, nf2 - 1] = a
        parked[:, j] = spot + base
    return parked


# ---------------------------------------------------------------------------
# dispatch


def rights_array(dir_rule, r_max: int) -> np.ndarray:
    """Materialize Dir(r, i) as a (r_max, r_max) uint8 matrix of go-right
    flags (row r padded with zeros past column r)."""
    from .procedures import Direction

    out = np.zeros((r_max, r_max), np.uint8)
    for r in range(1, r_max + 1):
        for i in range(1, r + 1):
            out[r - 1, i - 1] = 1 if dir_rule(r, i) is Direction.RIGHT else 0
    return out


def _window(words: np.ndarray) -> tuple[int, int]:
    r = words.shape[1]
    lo = int(words.min()) if words.size else 0
    hi = int(words.max()) if words.size else 0
    # cars drift at most r cells past the letter range; +2 for scan sentinels
    base = lo - r - 1
    width = (hi - lo + 1) + 2 * r + 2
    return base, width


def table_parked(
    words: np.ndarray,
    rights: np.ndarray,
    default_right: bool,
    backend: str | None = None,
) -> np.ndarray:
    """Parked spot of every car for every word under a table rule."""
    words = np.ascontiguousarray(words, dtype=np.int64)
    base, width = _window(words)
    if resolve_backend(backend) == "numba":
        return _table_parked_numba(
            words, rights, np.uint8(default_right), base, width
        )
    return _table_parked_numpy(words, rights, bool(default_right), base, width)


def lbs_parked(words: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Parked spot of every car for every word under the last-block-setter
    rule."""
    words = np.ascontiguousarray(words, dtype=np.int64)
    base, width = _window(words)
    if resolve_backend(backend) == "numba":
        return _lbs_parked_numba(words, base, width)
    return _lbs_parked_numpy(words, base, width)
