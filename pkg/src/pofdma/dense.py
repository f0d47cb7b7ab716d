"""Dense reference matrices for the transform and chain algebra.

These build the operators entry by entry from their defining formulas and
are kept as independent cross-checks for the fast paths. They are O(N^2)
or worse and intended for N <= 64; nothing in the production chains calls
them.
"""

from __future__ import annotations

import numpy as np


def dft_matrix(n: int) -> np.ndarray:
    """Unitary forward DFT matrix: entry (k, t) = W^(k*t) / sqrt(n)."""
    w = np.exp(-2j * np.pi / n)
    k = np.arange(n)
    return w ** np.outer(k, k) / np.sqrt(n)


def shifted_idft_matrix(ell: int, n: int) -> np.ndarray:
    """Shifted inverse transform: entry (r, c) = W^((ell - r) * c) / sqrt(n).

    ell = 0 gives the plain unitary inverse DFT matrix; general ell shifts
    the inverse-transform output circularly by ell samples.
    """
    w = np.exp(-2j * np.pi / n)
    r = np.arange(n)[:, None]
    c = np.arange(n)[None, :]
    return w ** ((ell - r) * c) / np.sqrt(n)


def repetition_matrix(m: int, k: int) -> np.ndarray:
    """(k*m) x m block matrix stacking k identity blocks: A @ s tiles s."""
    return np.tile(np.eye(m), (k, 1))


def user_phase_matrix(ell: int, n: int, k: int) -> np.ndarray:
    """Dense per-user phase operator: forward DFT times the ell-shifted
    inverse DFT, scaled by 1/sqrt(k). Diagonal by construction."""
    return dft_matrix(n) @ shifted_idft_matrix(ell, n) / np.sqrt(k)


def circulant(taps: np.ndarray, n: int) -> np.ndarray:
    """n x n circular-convolution matrix whose first column is the
    zero-padded tap vector: entry (i, j) = h[(i - j) mod n]."""
    taps = np.asarray(taps, dtype=np.complex128)
    if taps.shape[-1] > n:
        raise ValueError(f"{taps.shape[-1]} taps exceed block size {n}")
    col = np.zeros(n, dtype=np.complex128)
    col[: taps.shape[-1]] = taps
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    return col[(i - j) % n]
