"""Unitary Fourier/cosine transforms and per-user phase ramps.

All transforms act on the last axis, so stacks of vectors can be processed
in one call. The Fourier kernel is fixed to W = exp(-2j*pi/N) for the
forward direction; the inverse uses the conjugate kernel. Both are scaled
by 1/sqrt(N) so that round trips are exact and norms are preserved.

The FFT is an iterative radix-2 Cooley-Tukey with precomputed bit-reversal
and twiddle tables, cached per size. Tables are immutable after
construction, so concurrent callers are safe.
"""

from __future__ import annotations

import numpy as np

_BITREV: dict[int, np.ndarray] = {}
_TWIDDLES: dict[tuple[int, bool], tuple[np.ndarray, ...]] = {}
_DCT: dict[int, np.ndarray] = {}


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _bit_reversal(n: int) -> np.ndarray:
    """Index permutation that sorts 0..n-1 by reversed bit pattern."""
    idx = _BITREV.get(n)
    if idx is None:
        bits = n.bit_length() - 1
        idx = np.zeros(n, dtype=np.intp)
        for i in range(1, n):
            idx[i] = (idx[i >> 1] >> 1) | ((i & 1) << (bits - 1))
        idx.setflags(write=False)
        _BITREV[n] = idx
    return idx


def _twiddles(n: int, inverse: bool) -> tuple[np.ndarray, ...]:
    """Per-stage twiddle factors for a size-n radix-2 pass."""
    key = (n, inverse)
    tables = _TWIDDLES.get(key)
    if tables is None:
        sign = 1.0 if inverse else -1.0
        stages = []
        half = 1
        while half < n:
            w = np.exp(sign * 2j * np.pi * np.arange(half) / (2 * half))
            w.setflags(write=False)
            stages.append(w)
            half *= 2
        tables = tuple(stages)
        _TWIDDLES[key] = tables
    return tables


def _fft_core(x: np.ndarray, inverse: bool) -> np.ndarray:
    n = x.shape[-1]
    if not is_power_of_two(n):
        raise ValueError(f"transform size must be a power of two, got {n}")
    y = np.asarray(x, dtype=np.complex128)[..., _bit_reversal(n)]
    if n == 1:
        return y
    shape = y.shape
    for w in _twiddles(n, inverse):
        half = w.shape[0]
        y = y.reshape(shape[:-1] + (n // (2 * half), 2, half))
        t = y[..., 1, :] * w
        y[..., 1, :] = y[..., 0, :] - t
        y[..., 0, :] += t
        y = y.reshape(shape)
    return y


def dft(x: np.ndarray) -> np.ndarray:
    """Unitary forward DFT along the last axis (power-of-two length)."""
    n = np.asarray(x).shape[-1]
    return _fft_core(x, inverse=False) / np.sqrt(n)


def idft(x: np.ndarray) -> np.ndarray:
    """Unitary inverse DFT along the last axis; exact inverse of :func:`dft`."""
    n = np.asarray(x).shape[-1]
    return _fft_core(x, inverse=True) / np.sqrt(n)


def shifted_idft(x: np.ndarray, ell: int) -> np.ndarray:
    """Inverse DFT followed by a circular shift of ``ell`` samples.

    Entry ``n`` of the result equals ``idft(x)[(n - ell) % N]``, which is
    exactly the action of the shifted inverse-transform matrix (see
    :func:`pofdma.dense.shifted_idft_matrix` for the dense reference).
    """
    n = np.asarray(x).shape[-1]
    if not 0 <= ell < n:
        raise ValueError(f"shift must be in [0, {n}), got {ell}")
    return np.roll(idft(x), ell, axis=-1)


def user_phase_diagonal(ell: int, n: int, k: int) -> np.ndarray:
    """Diagonal entries of the per-user phase-ramp operator.

    Entry ``i`` is ``exp(-2j*pi*i*ell/n) / sqrt(k)``: a unit-magnitude
    geometric ramp scaled so that applying it after a k-fold repetition
    preserves the signal norm. Equals the diagonal of the dense product of
    the forward transform with the ell-shifted inverse transform, scaled by
    1/sqrt(k); tests pin it to that product.

    Parameters
    ----------
    ell : user offset, one-to-one per user, in [0, k).
    n : transform size (k must divide n).
    k : number of users sharing the band.
    """
    if n % k != 0:
        raise ValueError(f"user count {k} must divide transform size {n}")
    if not 0 <= ell < k:
        raise ValueError(f"user offset must be in [0, {k}), got {ell}")
    return np.exp(-2j * np.pi * np.arange(n) * ell / n) / np.sqrt(k)


def dct_matrix(m: int) -> np.ndarray:
    """Orthonormal type-II DCT matrix of size m x m.

    Row 0 is constant 1/sqrt(m); the remaining rows carry sqrt(2/m) cosine
    weights, so C @ C.T is the identity.
    """
    if m < 1:
        raise ValueError(f"DCT size must be >= 1, got {m}")
    c = _DCT.get(m)
    if c is None:
        i = np.arange(m)[:, None]
        j = np.arange(m)[None, :]
        c = np.sqrt(2.0 / m) * np.cos(np.pi * i * (2 * j + 1) / (2 * m))
        c[0, :] *= 1.0 / np.sqrt(2.0)
        c.setflags(write=False)
        _DCT[m] = c
    return c
