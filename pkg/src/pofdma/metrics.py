"""Measurement helpers: PAPR, empirical CCDF, bit-error counting, Welch PSD.

Conventions (echoed into every result file written by the harness):

* PAPR is taken over the CP-stripped body, by default at Nyquist rate; an
  integer oversampling factor interpolates the envelope first.
* The average PAPR of a sample set is the arithmetic mean of the per-block
  dB values, not the dB of the mean power ratio.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import transforms


def papr_db(samples: np.ndarray) -> np.ndarray:
    """Peak-to-average power ratio over the last axis, in dB.

    Invariant under any global complex scaling of the input. All-zero
    input has no defined ratio and raises.
    """
    power = np.abs(np.asarray(samples)) ** 2
    if power.shape[-1] == 0:
        raise ValueError("empty sample vector")
    mean = power.mean(axis=-1)
    if np.any(mean == 0):
        raise ValueError("PAPR of an all-zero vector is undefined")
    return 10.0 * np.log10(power.max(axis=-1) / mean)


def oversampled(body: np.ndarray, factor: int) -> np.ndarray:
    """Interpolate the body by an integer factor via spectral zero padding."""
    if factor < 1:
        raise ValueError(f"oversampling factor must be >= 1, got {factor}")
    if factor == 1:
        return np.asarray(body)
    body = np.asarray(body, dtype=np.complex128)
    n = body.shape[-1]
    spectrum = transforms.dft(body)
    padded = np.zeros(body.shape[:-1] + (factor * n,), dtype=np.complex128)
    half = n // 2
    padded[..., :half] = spectrum[..., :half]
    padded[..., factor * n - (n - half):] = spectrum[..., half:]
    return transforms.idft(padded) * np.sqrt(factor)


def ccdf(samples_db: np.ndarray, thresholds_db: np.ndarray) -> np.ndarray:
    """Empirical probability that a sample strictly exceeds each threshold."""
    samples_db = np.asarray(samples_db).reshape(-1)
    if samples_db.size == 0:
        raise ValueError("empty PAPR sample set")
    sorted_samples = np.sort(samples_db)
    above = samples_db.size - np.searchsorted(
        sorted_samples, np.asarray(thresholds_db), side="right"
    )
    return above / samples_db.size


def average_papr(samples_db: np.ndarray) -> float:
    """Arithmetic mean of dB-valued PAPR samples."""
    samples_db = np.asarray(samples_db).reshape(-1)
    if samples_db.size == 0:
        raise ValueError("empty PAPR sample set")
    return float(samples_db.mean())


@dataclass
class BerCounter:
    """Running bit-error tally. Counters add, so partial tallies merge."""

    bit_errors: int = 0
    bits_total: int = 0

    def update(self, tx_bits: np.ndarray, rx_bits: np.ndarray) -> "BerCounter":
        tx_bits = np.asarray(tx_bits)
        rx_bits = np.asarray(rx_bits)
        if tx_bits.shape != rx_bits.shape:
            raise ValueError(f"bit shapes differ: {tx_bits.shape} vs {rx_bits.shape}")
        self.bit_errors += int(np.count_nonzero(tx_bits != rx_bits))
        self.bits_total += tx_bits.size
        return self

    def __add__(self, other: "BerCounter") -> "BerCounter":
        return BerCounter(self.bit_errors + other.bit_errors,
                          self.bits_total + other.bits_total)

    @property
    def ber(self) -> float:
        if self.bits_total == 0:
            raise ValueError("no bits counted")
        return self.bit_errors / self.bits_total


@dataclass
class PsdEstimate:
    """Averaged periodogram: normalized frequencies and dB densities."""

    freq_norm: np.ndarray
    psd_db: np.ndarray
    segment: int
    overlap: float
    n_segments: int

    def psd_linear(self) -> np.ndarray:
        return 10.0 ** (self.psd_db / 10.0)


def welch_psd(samples: np.ndarray, segment: int = 256, overlap: float = 0.5) -> PsdEstimate:
    """Welch PSD of a complex sample stream.

    Hann-windowed, ``overlap``-fraction overlapped periodograms, averaged
    and normalized by the window power so the bins sum to the mean signal
    power. Bins are shifted to run from -1/2 to +1/2 cycles per sample.
    """
    samples = np.asarray(samples, dtype=np.complex128).reshape(-1)
    if segment > samples.size:
        raise ValueError(f"segment {segment} longer than stream ({samples.size})")
    if not 0 <= overlap < 1:
        raise ValueError(f"overlap fraction must be in [0, 1), got {overlap}")
    step = max(1, int(round(segment * (1.0 - overlap))))
    starts = range(0, samples.size - segment + 1, step)
    window = 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(segment) / segment)
    win_power = float(np.sum(window**2))

    segs = np.stack([samples[s:s + segment] for s in starts])
    spectra = transforms.dft(segs * window)
    psd = (np.abs(spectra) ** 2).mean(axis=0) / win_power
    psd = np.fft.fftshift(psd)
    freq = (np.arange(segment) - segment // 2) / segment
    return PsdEstimate(freq, 10.0 * np.log10(np.maximum(psd, 1e-300)),
                       segment, overlap, len(segs))
