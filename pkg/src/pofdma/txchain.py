"""Per-user transmit chains for the five multiple-access schemes.

Every chain maps M payload symbols to an N-sample body and appends a
cyclic prefix. All chains preserve the payload norm exactly. Symbol
arrays may carry leading batch axes (e.g. one block per row); the user
index and configuration stay scalar per call.

Scheme summary, for user m with offset ell_m = m:

* OFDMA      - symbols on the contiguous bins [m*M, m*M + M), N-point
               inverse transform.
* SC-FDMA    - M-point forward transform, then the OFDMA mapping.
* P-OFDMA    - M-point inverse transform, K-fold repetition, per-user
               phase ramp.
* P-OFDMA-DCT - as P-OFDMA with a DCT applied to the symbols first.
* P-OFDMA-DFT - repetition and phase ramp applied to the raw symbols
               (the M-point transform pair cancels), so the transmitter
               performs no additions at all.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import transforms

SCHEMES = ("OFDMA", "SC-FDMA", "P-OFDMA", "P-OFDMA-DCT", "P-OFDMA-DFT")


@dataclass(frozen=True)
class SchemeConfig:
    """One transmit-chain configuration: scheme, sizes and modulation."""

    scheme: str
    n: int = 256
    k: int = 64
    cp_len: int = 64
    order: int = 16

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if not transforms.is_power_of_two(self.n):
            raise ValueError(f"subcarrier count must be a power of two, got {self.n}")
        if self.k < 1 or self.n % self.k != 0:
            raise ValueError(f"user count {self.k} must divide N={self.n}")
        if not 1 <= self.cp_len < self.n:
            raise ValueError(f"cyclic prefix must be in [1, {self.n}), got {self.cp_len}")
        if self.order not in (16, 64):
            raise ValueError(f"modulation order must be 16 or 64, got {self.order}")

    @property
    def m(self) -> int:
        """Symbols per user per block."""
        return self.n // self.k

    @property
    def block_len(self) -> int:
        return self.n + self.cp_len


@dataclass
class TxBlock:
    """Transmit block of one user: CP-extended samples plus the payload."""

    user: int
    samples: np.ndarray  # (..., n + cp_len)
    payload: np.ndarray  # (..., m)
    cp_len: int = field(default=0, repr=False)

    @property
    def body(self) -> np.ndarray:
        """Samples with the cyclic prefix stripped."""
        return self.samples[..., self.cp_len:]


def repeat_map(symbols: np.ndarray, k: int) -> np.ndarray:
    """Concatenate k copies of the last axis: the repetition mapping A @ s."""
    symbols = np.asarray(symbols)
    return np.concatenate([symbols] * k, axis=-1)


def add_cp(body: np.ndarray, cp_len: int) -> np.ndarray:
    """Prepend the last cp_len samples of the body."""
    body = np.asarray(body)
    if not 0 < cp_len < body.shape[-1]:
        raise ValueError(
            f"cyclic prefix length {cp_len} must be in (0, {body.shape[-1]})"
        )
    return np.concatenate([body[..., -cp_len:], body], axis=-1)


def remove_cp(block: np.ndarray, cp_len: int) -> np.ndarray:
    """Drop the first cp_len samples; exact inverse of :func:`add_cp`."""
    block = np.asarray(block)
    if not 0 < cp_len < block.shape[-1]:
        raise ValueError(f"cyclic prefix length {cp_len} out of range")
    return block[..., cp_len:]


def _check_user(m: int, cfg: SchemeConfig) -> None:
    if not 0 <= m < cfg.k:
        raise ValueError(f"user index {m} out of range for {cfg.k} users")


def _check_payload(symbols: np.ndarray, cfg: SchemeConfig) -> np.ndarray:
    symbols = np.asarray(symbols, dtype=np.complex128)
    if symbols.shape[-1] != cfg.m:
        raise ValueError(f"expected {cfg.m} payload symbols, got {symbols.shape[-1]}")
    return symbols


def _localized_body(freq_symbols: np.ndarray, m: int, cfg: SchemeConfig) -> np.ndarray:
    spectrum = np.zeros(freq_symbols.shape[:-1] + (cfg.n,), dtype=np.complex128)
    spectrum[..., m * cfg.m:(m + 1) * cfg.m] = freq_symbols
    return transforms.idft(spectrum)


def _periodic_body(time_symbols: np.ndarray, m: int, cfg: SchemeConfig) -> np.ndarray:
    ramp = transforms.user_phase_diagonal(m, cfg.n, cfg.k)
    return ramp * repeat_map(time_symbols, cfg.k)


def ofdma_tx(symbols: np.ndarray, m: int, cfg: SchemeConfig) -> TxBlock:
    """Contiguous subcarrier mapping: bins [m*M, m*M + M) carry the payload."""
    symbols = _check_payload(symbols, cfg)
    _check_user(m, cfg)
    body = _localized_body(symbols, m, cfg)
    return TxBlock(m, add_cp(body, cfg.cp_len), symbols, cfg.cp_len)


def scfdma_tx(symbols: np.ndarray, m: int, cfg: SchemeConfig) -> TxBlock:
    """DFT-spread mapping: M-point transform, then contiguous bins."""
    symbols = _check_payload(symbols, cfg)
    _check_user(m, cfg)
    body = _localized_body(transforms.dft(symbols), m, cfg)
    return TxBlock(m, add_cp(body, cfg.cp_len), symbols, cfg.cp_len)


def pofdma_tx(symbols: np.ndarray, m: int, cfg: SchemeConfig) -> TxBlock:
    """Periodic mapping: M-point inverse transform, repetition, phase ramp."""
    symbols = _check_payload(symbols, cfg)
    _check_user(m, cfg)
    body = _periodic_body(transforms.idft(symbols), m, cfg)
    return TxBlock(m, add_cp(body, cfg.cp_len), symbols, cfg.cp_len)


def pofdma_dct_tx(symbols: np.ndarray, m: int, cfg: SchemeConfig) -> TxBlock:
    """Periodic mapping with DCT precoding of the payload symbols."""
    symbols = _check_payload(symbols, cfg)
    _check_user(m, cfg)
    precoded = symbols @ transforms.dct_matrix(cfg.m).T
    body = _periodic_body(transforms.idft(precoded), m, cfg)
    return TxBlock(m, add_cp(body, cfg.cp_len), symbols, cfg.cp_len)


def pofdma_dft_tx(symbols: np.ndarray, m: int, cfg: SchemeConfig) -> TxBlock:
    """Periodic mapping with DFT precoding; the transform pair cancels, so
    the body is just the phase-ramped repetition of the raw symbols."""
    symbols = _check_payload(symbols, cfg)
    _check_user(m, cfg)
    body = _periodic_body(symbols, m, cfg)
    return TxBlock(m, add_cp(body, cfg.cp_len), symbols, cfg.cp_len)


_TX = {
    "OFDMA": ofdma_tx,
    "SC-FDMA": scfdma_tx,
    "P-OFDMA": pofdma_tx,
    "P-OFDMA-DCT": pofdma_dct_tx,
    "P-OFDMA-DFT": pofdma_dft_tx,
}


def transmit(symbols: np.ndarray, m: int, cfg: SchemeConfig) -> TxBlock:
    """Dispatch to the transmit chain selected by ``cfg.scheme``."""
    return _TX[cfg.scheme](symbols, m, cfg)
