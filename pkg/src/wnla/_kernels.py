"""Hot inner loops: two-mode Fock expansion and Monte Carlo shot tallies.

Each kernel exists twice: an explicit-loop version compiled with numba and a
vectorised pure-numpy version. ``WNLA_DISABLE_NUMBA=1`` in the environment (or
numba being absent) selects the numpy path at import time. Both versions are
importable under explicit names so they can be compared and benchmarked.
"""
from __future__ import annotations

import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

_disabled = os.environ.get("WNLA_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}
USE_NUMBA = numba is not None and not _disabled
BACKEND = "numba" if USE_NUMBA else "numpy"

# Largest photon number the factorial table covers on a single mode pair.
MAX_OCCUPATION = 60
FACT = np.array([math.factorial(k) for k in range(MAX_OCCUPATION + 1)], dtype=np.float64)


def two_mode_coeff(m, n, k, u00, u01, u10, u11, fact):
    """Amplitude of |k, m+n-k> produced from |m, n> by a 2x2 creation-operator transform.

    Expands (u00 a0† + u10 a1†)^m (u01 a0† + u11 a1†)^n / sqrt(m! n!) and reads
    off the coefficient of a0†^k a1†^(m+n-k), times sqrt(k! (m+n-k)!).
    """
    acc = 0.0 + 0.0j
    lo = k - n if k > n else 0
    hi = m if m < k else k
    for p in range(lo, hi + 1):
        q = k - p
        term = (fact[m] / (fact[p] * fact[m - p])) * (fact[n] / (fact[q] * fact[n - q])) + 0.0j
        for _ in range(p):
            term *= u00
        for _ in range(m - p):
            term *= u10
        for _ in range(q):
            term *= u01
        for _ in range(n - q):
            term *= u11
        acc += term
    s = m + n
    return acc * math.sqrt(fact[k] * fact[s - k] / (fact[m] * fact[n]))


def _make_expand_loop(coeff):
    def expand(occ, amp, i, j, u, fact):
        n_terms, n_modes = occ.shape
        total = 0
        for r in range(n_terms):
            total += int(occ[r, i]) + int(occ[r, j]) + 1
        out_occ = np.empty((total, n_modes), dtype=occ.dtype)
        out_amp = np.empty(total, dtype=np.complex128)
        u00, u01, u10, u11 = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
        pos = 0
        for r in range(n_terms):
            m = int(occ[r, i])
            n = int(occ[r, j])
            s = m + n
            for k in range(s + 1):
                out_occ[pos, :] = occ[r, :]
                out_occ[pos, i] = k
                out_occ[pos, j] = s - k
                out_amp[pos] = amp[r] * coeff(m, n, k, u00, u01, u10, u11, fact)
                pos += 1
        return out_occ, out_amp

    return expand


def _tally_loop(u_branch, u_outcome, p_signal, cdf_signal, cdf_vacuum):
    hist_signal = np.zeros(cdf_signal.shape[0], dtype=np.int64)
    hist_vacuum = np.zeros(cdf_vacuum.shape[0], dtype=np.int64)
    last_s = cdf_signal.shape[0] - 1
    last_v = cdf_vacuum.shape[0] - 1
    for s in range(u_branch.shape[0]):
        if u_branch[s] < p_signal:
            k = np.searchsorted(cdf_signal, u_outcome[s], side="right")
            hist_signal[min(k, last_s)] += 1
        else:
            k = np.searchsorted(cdf_vacuum, u_outcome[s], side="right")
            hist_vacuum[min(k, last_v)] += 1
    return hist_signal, hist_vacuum


def expand_two_mode_numpy(occ, amp, i, j, u, fact=FACT):
    """Vectorised expansion: one coefficient table per distinct (m, n) pair."""
    m_col = occ[:, i].astype(np.int64)
    n_col = occ[:, j].astype(np.int64)
    keys = m_col * (MAX_OCCUPATION + 1) + n_col
    blocks_occ, blocks_amp = [], []
    for key in np.unique(keys):
        m, n = divmod(int(key), MAX_OCCUPATION + 1)
        s = m + n
        rows = np.flatnonzero(keys == key)
        coeffs = np.array(
            [two_mode_coeff(m, n, k, u[0, 0], u[0, 1], u[1, 0], u[1, 1], fact) for k in range(s + 1)]
        )
        block = np.repeat(occ[rows], s + 1, axis=0)
        ks = np.tile(np.arange(s + 1), rows.size)
        block[:, i] = ks
        block[:, j] = s - ks
        blocks_occ.append(block)
        blocks_amp.append(np.outer(amp[rows], coeffs).ravel())
    if not blocks_occ:
        return occ.copy(), amp.astype(np.complex128)
    return np.concatenate(blocks_occ), np.concatenate(blocks_amp)


def tally_numpy(u_branch, u_outcome, p_signal, cdf_signal, cdf_vacuum):
    signal = u_branch < p_signal
    ks = np.searchsorted(cdf_signal, u_outcome[signal], side="right")
    kv = np.searchsorted(cdf_vacuum, u_outcome[~signal], side="right")
    ks = np.minimum(ks, cdf_signal.shape[0] - 1)
    kv = np.minimum(kv, cdf_vacuum.shape[0] - 1)
    return (
        np.bincount(ks, minlength=cdf_signal.shape[0]).astype(np.int64),
        np.bincount(kv, minlength=cdf_vacuum.shape[0]).astype(np.int64),
    )


if numba is not None:
    _coeff_jit = numba.njit(two_mode_coeff)
    _expand_jit = numba.njit(_make_expand_loop(_coeff_jit))
    _tally_jit = numba.njit(_tally_loop)

    def expand_two_mode_numba(occ, amp, i, j, u, fact=FACT):
        return _expand_jit(
            np.ascontiguousarray(occ), np.ascontiguousarray(amp, dtype=np.complex128),
            int(i), int(j), np.ascontiguousarray(u, dtype=np.complex128), fact,
        )

    def tally_numba(u_branch, u_outcome, p_signal, cdf_signal, cdf_vacuum):
        return _tally_jit(u_branch, u_outcome, float(p_signal), cdf_signal, cdf_vacuum)
else:  # pragma: no cover
    expand_two_mode_numba = None
    tally_numba = None


if USE_NUMBA:
    expand_two_mode = expand_two_mode_numba
    tally = tally_numba
else:
    expand_two_mode = expand_two_mode_numpy
    tally = tally_numpy


def canonicalize(occ, amp, prune):
    """Merge duplicate rows, drop amplitudes below ``prune``, sort rows lexicographically."""
    if amp.size == 0:
        return occ[:0].copy(), amp[:0].astype(np.complex128)
    uniq, inverse = np.unique(occ, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    re = np.bincount(inverse, weights=amp.real, minlength=len(uniq))
    im = np.bincount(inverse, weights=amp.imag, minlength=len(uniq))
    merged = re + 1j * im
    keep = np.abs(merged) >= prune
    return uniq[keep], merged[keep]
