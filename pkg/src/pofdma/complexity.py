"""Closed-form complex-operation counts for the five schemes.

Counts assume radix-2 transforms: a size-n FFT costs (n/2)*log2(n)
multiplications and n*log2(n) additions; a size-n DCT is counted as two
half-size transforms (n*log2(n) multiplications, 2*n*log2(n) additions).
Transmitter counts are per user; receiver counts are the total at the
base station for all K users. ``log2(1) = 0``, so single-symbol users
(M = 1) pay nothing for their small transform.

These are symbolic integer evaluations of the operation formulas, never
measured runtimes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .txchain import SCHEMES


@dataclass(frozen=True)
class ComplexityReport:
    """Operation counts of one (scheme, N, K) cell."""

    scheme: str
    n: int
    k: int
    m: int
    tx_mult: int
    tx_add: int
    rx_mult: int
    rx_add: int

    @property
    def tot_mult(self) -> int:
        return self.k * self.tx_mult + self.rx_mult

    @property
    def tot_add(self) -> int:
        return self.k * self.tx_add + self.rx_add


def _log2_exact(n: int) -> int:
    l = n.bit_length() - 1
    if n < 1 or (1 << l) != n:
        raise ValueError(f"{n} is not a power of two")
    return l


def op_counts(scheme: str, n: int, k: int) -> ComplexityReport:
    """Evaluate the per-scheme operation-count formulas at (n, k)."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    ln = _log2_exact(n)
    if k < 1 or n % k != 0:
        raise ValueError(f"user count {k} must divide {n}")
    m = n // k
    lm = _log2_exact(m)

    if scheme == "OFDMA":
        tx_mult, tx_add = n // 2 * ln, n * ln
        rx_mult, rx_add = n // 2 * ln + n, n * ln
    elif scheme == "SC-FDMA":
        tx_mult = n // 2 * ln + m // 2 * lm
        tx_add = n * ln + m * lm
        rx_mult = n // 2 * ln + k * (m // 2 * lm + m)
        rx_add = n * ln + k * m * lm
    elif scheme == "P-OFDMA":
        tx_mult, tx_add = m // 2 * lm + n, m * lm
        rx_mult, rx_add = k * (n + m // 2 * lm + m), k * m * lm
    elif scheme == "P-OFDMA-DCT":
        tx_mult, tx_add = m * lm + n, 2 * m * lm
        rx_mult, rx_add = k * (n + m * lm + m), k * 2 * m * lm
    else:  # P-OFDMA-DFT
        tx_mult, tx_add = n, 0
        rx_mult, rx_add = k * (n + m * lm + m), k * 2 * m * lm

    return ComplexityReport(scheme, n, k, m, tx_mult, tx_add, rx_mult, rx_add)


def total_counts(scheme: str, n: int, m: int) -> tuple[int, int]:
    """Closed-form system totals (K*tx + rx) for OFDMA and P-OFDMA.

    Expressed directly in (n, m); always equal to aggregating
    :func:`op_counts` with k = n/m.
    """
    ln = _log2_exact(n)
    lm = _log2_exact(m)
    if n % m != 0:
        raise ValueError(f"per-user symbol count {m} must divide {n}")
    if scheme == "OFDMA":
        return ((n // m + 1) * (n // 2) * ln + n, (n // m + 1) * n * ln)
    if scheme == "P-OFDMA":
        return (n * lm + 2 * n * n // m + n, 2 * n * lm)
    raise ValueError(f"no closed-form totals for {scheme!r}")


# (N, K) grid of the load-comparison report.
TABLE_ROWS: tuple[tuple[int, int], ...] = (
    (128, 8), (128, 32), (128, 64), (128, 128),
    (256, 8), (256, 32), (256, 64), (256, 128), (256, 256),
    (512, 8), (512, 32), (512, 64), (512, 128), (512, 256), (512, 512),
    (1024, 8), (1024, 32), (1024, 64), (1024, 128), (1024, 256), (1024, 512),
)

CSV_HEADER = ("scheme", "N", "K", "M", "tx_mult", "tx_add",
              "rx_mult", "rx_add", "tot_mult", "tot_add")


def full_report(rows: tuple[tuple[int, int], ...] = TABLE_ROWS) -> list[ComplexityReport]:
    """Operation counts for every scheme over the (N, K) grid."""
    return [op_counts(s, n, k) for (n, k) in rows for s in SCHEMES]


def report_csv_rows(reports: list[ComplexityReport]) -> list[tuple]:
    return [
        (r.scheme, r.n, r.k, r.m, r.tx_mult, r.tx_add,
         r.rx_mult, r.rx_add, r.tot_mult, r.tot_add)
        for r in reports
    ]


def report_text(reports: list[ComplexityReport]) -> str:
    """Aligned text table of the reports."""
    header = CSV_HEADER
    rows = [tuple(str(v) for v in row) for row in report_csv_rows(reports)]
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) for i in range(len(header))]
    def fmt(row):
        return "  ".join(str(v).rjust(widths[i]) for i, v in enumerate(row))
    return "\n".join([fmt(header)] + [fmt(r) for r in rows]) + "\n"
