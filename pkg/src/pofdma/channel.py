"""Tapped-delay-line fading channel with exponential power decay, plus AWGN.

Each realization is a short FIR tap vector; tap ``l`` is zero-mean circular
complex Gaussian with variance following exp(-alpha*l), normalized so the
expected total power is one. The decay constant is set from the power of
the last tap relative to the first (``decay_floor_db``).

The default 50 ns sample period corresponds to a 20 MHz complex baseband,
which maps the simulated 50-3500 ns delay spreads to 1-71 taps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import transforms


@dataclass(frozen=True)
class ChannelProfile:
    """Power-delay profile description for one link."""

    delay_spread_ns: float
    sample_period_ns: float = 50.0
    decay_floor_db: float = -20.0

    def __post_init__(self):
        if self.delay_spread_ns < 0:
            raise ValueError("delay spread must be non-negative")
        if self.sample_period_ns <= 0:
            raise ValueError("sample period must be positive")

    @property
    def tap_count(self) -> int:
        return int(self.delay_spread_ns // self.sample_period_ns) + 1

    def tap_powers(self) -> np.ndarray:
        """Mean tap powers: exponential decay, unit total."""
        L = self.tap_count
        if L == 1:
            return np.ones(1)
        alpha = -math.log(10.0 ** (self.decay_floor_db / 10.0)) / (L - 1)
        p = np.exp(-alpha * np.arange(L))
        return p / p.sum()


@dataclass
class ChannelRealization:
    """One drawn channel: taps plus the N-point frequency response."""

    taps: np.ndarray
    freq_response: np.ndarray


def draw_taps(profile: ChannelProfile, rng: np.random.Generator) -> np.ndarray:
    """Draw one tap vector from the profile (Rayleigh per tap)."""
    p = profile.tap_powers()
    g = rng.standard_normal((p.shape[0], 2))
    return np.sqrt(p / 2.0) * (g[:, 0] + 1j * g[:, 1])


def freq_response(taps: np.ndarray, n: int) -> np.ndarray:
    """Length-n frequency response of a tap vector (batched on leading axes).

    This is the unnormalized n-point forward DFT of the zero-padded taps:
    the diagonal that the unitary transform pair pulls out of the circular
    channel matrix.
    """
    taps = np.asarray(taps, dtype=np.complex128)
    if taps.shape[-1] > n:
        raise ValueError(f"{taps.shape[-1]} taps do not fit a size-{n} transform")
    padded = np.zeros(taps.shape[:-1] + (n,), dtype=np.complex128)
    padded[..., : taps.shape[-1]] = taps
    return transforms.dft(padded) * np.sqrt(n)


def draw_channel(profile: ChannelProfile, n: int, rng: np.random.Generator) -> ChannelRealization:
    """Draw a fresh realization and attach its size-n frequency response."""
    taps = draw_taps(profile, rng)
    return ChannelRealization(taps, freq_response(taps, n))


def apply_channel(samples: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Linear convolution of the taps with a CP-extended block, truncated to
    the block length. Leading axes of ``samples`` and ``taps`` broadcast.

    When the tap count stays within cp_len + 1, stripping the prefix from
    the output leaves an exact circular convolution of the body.
    """
    samples = np.asarray(samples, dtype=np.complex128)
    taps = np.asarray(taps, dtype=np.complex128)
    n = samples.shape[-1]
    n_taps = taps.shape[-1]
    if n_taps <= 32:
        # short channels: accumulate shifted copies directly
        lead = np.broadcast_shapes(samples.shape[:-1], taps.shape[:-1])
        out = np.zeros(lead + (n,), dtype=np.complex128)
        for l in range(min(n_taps, n)):
            out[..., l:] += taps[..., l, None] * samples[..., : n - l]
        return out
    size = 1
    while size < n + n_taps - 1:
        size *= 2
    a = np.zeros(samples.shape[:-1] + (size,), dtype=np.complex128)
    a[..., :n] = samples
    b = np.zeros(taps.shape[:-1] + (size,), dtype=np.complex128)
    b[..., :n_taps] = taps
    conv = transforms.idft(transforms.dft(a) * transforms.dft(b)) * np.sqrt(size)
    return conv[..., :n]


def add_awgn(
    samples: np.ndarray,
    snr_db: float,
    signal_power_ref: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Add circular complex Gaussian noise at the target SNR.

    Per-sample noise variance is ``signal_power_ref / 10**(snr_db/10)``.
    ``snr_db = inf`` disables the noise entirely.
    """
    samples = np.asarray(samples, dtype=np.complex128)
    if math.isinf(snr_db) and snr_db > 0:
        return samples.copy()
    var = signal_power_ref / 10.0 ** (snr_db / 10.0)
    g = rng.standard_normal(samples.shape + (2,))
    return samples + np.sqrt(var / 2.0) * (g[..., 0] + 1j * g[..., 1])
