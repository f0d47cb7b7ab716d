"""Gray-labelled square QAM with unit average symbol energy.

Bits are grouped per symbol; the first half of each group selects the
in-phase level and the second half the quadrature level, each through a
reflected Gray code so that neighbouring levels differ in a single bit.
Scaling is exact: 1/sqrt(10) for 16-QAM and 1/sqrt(42) for 64-QAM.
"""

from __future__ import annotations

import numpy as np

_ORDERS = (16, 64)


def bits_per_symbol(order: int) -> int:
    if order not in _ORDERS:
        raise ValueError(f"modulation order must be one of {_ORDERS}, got {order}")
    return int(np.log2(order))


def _axis_levels(order: int) -> int:
    return int(np.sqrt(order))


def _scale(order: int) -> float:
    L = _axis_levels(order)
    # mean of (2i - (L-1))^2 over both axes is 2(L^2 - 1)/3
    return 1.0 / np.sqrt(2.0 * (L * L - 1) / 3.0)


def _gray_decode(g: np.ndarray, width: int) -> np.ndarray:
    b = g.copy()
    shift = 1
    while shift < width:
        b ^= b >> shift
        shift *= 2
    return b


def constellation(order: int) -> np.ndarray:
    """All constellation points, indexed by bit-label value."""
    b = bits_per_symbol(order)
    labels = np.arange(order)
    bits = ((labels[:, None] >> np.arange(b - 1, -1, -1)[None, :]) & 1).astype(np.uint8)
    return qam_modulate(bits.reshape(-1), order)


def qam_modulate(bits: np.ndarray, order: int) -> np.ndarray:
    """Map a {0,1} bit stream to unit-energy Gray-coded QAM symbols.

    ``bits`` may carry leading batch axes; the last axis length must be a
    multiple of log2(order).
    """
    b = bits_per_symbol(order)
    bits = np.asarray(bits)
    if bits.shape[-1] % b != 0:
        raise ValueError(
            f"bit count {bits.shape[-1]} not divisible by {b} bits/symbol"
        )
    h = b // 2
    L = _axis_levels(order)
    groups = bits.reshape(bits.shape[:-1] + (-1, b)).astype(np.int64)
    weights = 1 << np.arange(h - 1, -1, -1)
    gray_i = groups[..., :h] @ weights
    gray_q = groups[..., h:] @ weights
    lvl_i = _gray_decode(gray_i, h)
    lvl_q = _gray_decode(gray_q, h)
    return ((2 * lvl_i - (L - 1)) + 1j * (2 * lvl_q - (L - 1))) * _scale(order)


def qam_demodulate(symbols: np.ndarray, order: int) -> np.ndarray:
    """Hard-decision demapping: nearest level per axis, Gray label out.

    Every complex input maps to some point, so this never raises on noisy
    symbols.
    """
    b = bits_per_symbol(order)
    h = b // 2
    L = _axis_levels(order)
    symbols = np.asarray(symbols) / _scale(order)

    def axis_bits(vals: np.ndarray) -> np.ndarray:
        idx = np.clip(np.round((vals + (L - 1)) / 2.0).astype(np.int64), 0, L - 1)
        gray = idx ^ (idx >> 1)
        return ((gray[..., None] >> np.arange(h - 1, -1, -1)) & 1).astype(np.uint8)

    out = np.concatenate([axis_bits(symbols.real), axis_bits(symbols.imag)], axis=-1)
    return out.reshape(symbols.shape[:-1] + (-1,))
