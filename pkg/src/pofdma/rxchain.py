"""Per-user receivers: subcarrier extraction, single-tap equalization and
inverse precoding, assuming perfect channel knowledge per user.

The received block (cyclic prefix already removed) is the superposition of
all users' channel outputs. Because the per-user subcarrier supports are
disjoint, each user can be recovered independently:

* OFDMA / SC-FDMA read the user's contiguous bins of the full-size
  transform and divide by the channel response there (SC-FDMA then undoes
  the transmit-side spreading transform).
* The periodic schemes undo the phase ramp, fold the K repetitions
  together, take the M-point transform, and divide entry i by the channel
  response at bin (N - ell + K*i) mod N - the user's periodic bin set.

Equalization is zero-forcing; coefficients below ``EQ_FLOOR`` in magnitude
are clamped to that floor (a numerical guard only) and counted on the
returned estimate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import transforms
from .mapping import qam_demodulate
from .txchain import SchemeConfig

EQ_FLOOR = 1e-12


@dataclass
class RxEstimate:
    """Recovered payload of one user: symbol estimates and hard bits."""

    user: int
    symbols: np.ndarray  # (..., m)
    bits: np.ndarray     # (..., m * bits_per_symbol)
    clamped: int = 0


def user_bin_indices(ell: int, n: int, k: int) -> np.ndarray:
    """Subcarrier indices owned by the user with offset ell under the
    periodic mapping: (n - ell + k*i) mod n for i = 0..n/k-1.

    The sets for ell = 0..k-1 partition the full band.
    """
    if n % k != 0:
        raise ValueError(f"user count {k} must divide {n}")
    if not 0 <= ell < k:
        raise ValueError(f"offset must be in [0, {k}), got {ell}")
    return (n - ell + k * np.arange(n // k)) % n


def _response_of(chan) -> np.ndarray:
    return np.asarray(getattr(chan, "freq_response", chan), dtype=np.complex128)


def _clamp(coeffs: np.ndarray) -> tuple[np.ndarray, int]:
    mag = np.abs(coeffs)
    small = mag < EQ_FLOOR
    count = int(np.count_nonzero(small))
    if count:
        coeffs = coeffs.copy()
        # keep the phase where there is one; dead-zero coefficients get the floor
        vals = coeffs[small]
        mags = mag[small]
        phase = np.divide(vals, mags, out=np.ones_like(vals), where=mags > 0)
        coeffs[small] = EQ_FLOOR * phase
    return coeffs, count


def equalizer_taps(chan, m: int, cfg: SchemeConfig) -> np.ndarray:
    """Per-symbol zero-forcing coefficients of user m under the periodic
    mapping: the channel response gathered at the user's bin set."""
    resp = _response_of(chan)
    return resp[..., user_bin_indices(m, cfg.n, cfg.k)]


def superpose(blocks, noise: np.ndarray | None = None) -> np.ndarray:
    """Elementwise sum of the users' channel outputs, plus optional noise."""
    blocks = [np.asarray(b) for b in blocks]
    if not blocks:
        raise ValueError("nothing to superpose")
    length = blocks[0].shape[-1]
    for b in blocks:
        if b.shape[-1] != length:
            raise ValueError(f"length mismatch: {b.shape[-1]} != {length}")
    total = blocks[0].astype(np.complex128, copy=True)
    for b in blocks[1:]:
        total = total + b
    if noise is not None:
        total = total + noise
    return total


def pofdma_rx(
    received: np.ndarray,
    m: int,
    cfg: SchemeConfig,
    chan,
    variant: str = "plain",
) -> RxEstimate:
    """Recover user m from a periodic-mapping block (plain/dct/dft variant).

    ``received`` is the post-CP-removal superposition, shape (..., n);
    ``chan`` is user m's own realization (or its frequency response).
    """
    if variant not in ("plain", "dct", "dft"):
        raise ValueError(f"unknown variant {variant!r}")
    received = np.asarray(received, dtype=np.complex128)
    if received.shape[-1] != cfg.n:
        raise ValueError(f"expected {cfg.n} samples, got {received.shape[-1]}")
    if not 0 <= m < cfg.k:
        raise ValueError(f"user index {m} out of range for {cfg.k} users")

    ramp = transforms.user_phase_diagonal(m, cfg.n, cfg.k)
    folded = (np.conj(ramp) * received).reshape(
        received.shape[:-1] + (cfg.k, cfg.m)
    ).sum(axis=-2)
    freq = transforms.dft(folded)

    coeffs, clamped = _clamp(equalizer_taps(chan, m, cfg))
    est = freq / coeffs
    if variant == "dct":
        est = est @ transforms.dct_matrix(cfg.m)
    elif variant == "dft":
        est = transforms.idft(est)
    return RxEstimate(m, est, qam_demodulate(est, cfg.order), clamped)


def ofdma_rx(received: np.ndarray, m: int, cfg: SchemeConfig, chan) -> RxEstimate:
    """Recover user m from a contiguous-mapping block."""
    received = np.asarray(received, dtype=np.complex128)
    if received.shape[-1] != cfg.n:
        raise ValueError(f"expected {cfg.n} samples, got {received.shape[-1]}")
    if not 0 <= m < cfg.k:
        raise ValueError(f"user index {m} out of range for {cfg.k} users")
    bins = np.arange(m * cfg.m, (m + 1) * cfg.m)
    spectrum = transforms.dft(received)[..., bins]
    coeffs, clamped = _clamp(_response_of(chan)[..., bins])
    est = spectrum / coeffs
    return RxEstimate(m, est, qam_demodulate(est, cfg.order), clamped)


def scfdma_rx(received: np.ndarray, m: int, cfg: SchemeConfig, chan) -> RxEstimate:
    """Recover user m from a DFT-spread contiguous-mapping block."""
    received = np.asarray(received, dtype=np.complex128)
    if received.shape[-1] != cfg.n:
        raise ValueError(f"expected {cfg.n} samples, got {received.shape[-1]}")
    if not 0 <= m < cfg.k:
        raise ValueError(f"user index {m} out of range for {cfg.k} users")
    bins = np.arange(m * cfg.m, (m + 1) * cfg.m)
    spectrum = transforms.dft(received)[..., bins]
    coeffs, clamped = _clamp(_response_of(chan)[..., bins])
    est = transforms.idft(spectrum / coeffs)
    return RxEstimate(m, est, qam_demodulate(est, cfg.order), clamped)


def receive(received: np.ndarray, m: int, cfg: SchemeConfig, chan) -> RxEstimate:
    """Dispatch to the receiver matching ``cfg.scheme``."""
    if cfg.scheme == "OFDMA":
        return ofdma_rx(received, m, cfg, chan)
    if cfg.scheme == "SC-FDMA":
        return scfdma_rx(received, m, cfg, chan)
    variant = {"P-OFDMA": "plain", "P-OFDMA-DCT": "dct", "P-OFDMA-DFT": "dft"}[cfg.scheme]
    return pofdma_rx(received, m, cfg, chan, variant)
