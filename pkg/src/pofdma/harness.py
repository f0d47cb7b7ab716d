"""Monte Carlo orchestration: experiment configuration, deterministic
random-stream keying, the PAPR/BER/PSD/complexity experiment drivers, and
CSV persistence.

Determinism contract: every random draw comes from a substream keyed by
(master seed, experiment, block, user, purpose) through a counter-based
generator, never from sequential draws of a shared stream. Grid points are
therefore independent of how work is scheduled, and a given (config, seed)
pair always produces byte-identical CSV files, whatever the worker count.
"""

from __future__ import annotations

import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from . import __version__
from . import complexity as complexity_mod
from . import metrics, rxchain, transforms, txchain
from .channel import ChannelProfile, apply_channel, draw_taps, freq_response
from .mapping import bits_per_symbol, qam_demodulate, qam_modulate
from .metrics import BerCounter, PsdEstimate
from .txchain import SCHEMES, SchemeConfig

DEFAULT_SNR_DB = tuple(float(s) for s in range(0, 41, 4))
DEFAULT_DELAYS_NS = (50.0, 100.0, 200.0, 300.0, 500.0, 750.0,
                     1000.0, 1500.0, 2000.0, 2500.0, 3000.0, 3500.0)
PAPR_THRESHOLDS_DB = tuple(round(0.2 * i, 1) for i in range(71))  # 0..14 dB

_CHUNK_BLOCKS = 250

# experiment / purpose tags for substream keying
_EXP_PAPR, _EXP_BER, _EXP_PSD = 1, 2, 3
_P_BITS, _P_CHAN, _P_NOISE = 1, 2, 3


class ConfigError(ValueError):
    """Invalid configuration; carries the offending key."""

    def __init__(self, key: str, message: str):
        super().__init__(f"config key '{key}': {message}")
        self.key = key


@dataclass(frozen=True)
class ExperimentConfig:
    """Full experiment grid plus bookkeeping knobs."""

    n: int = 256
    k_list: tuple[int, ...] = (16, 32, 64, 128)
    schemes: tuple[str, ...] = SCHEMES
    modulations: tuple[int, ...] = (16, 64)
    snr_db: tuple[float, ...] = DEFAULT_SNR_DB
    delay_ns: tuple[float, ...] = DEFAULT_DELAYS_NS
    blocks: int = 500
    seed: int = 1
    cp_len: int | None = None  # None selects n // 4
    oversample: int = 1
    sample_period_ns: float = 50.0
    decay_floor_db: float = -20.0
    out: str = "results"
    workers: int = 1

    @property
    def cp(self) -> int:
        return self.n // 4 if self.cp_len is None else self.cp_len

    def validate(self) -> "ExperimentConfig":
        if not transforms.is_power_of_two(self.n):
            raise ConfigError("N", f"{self.n} is not a power of two")
        for k in self.k_list:
            if k < 1 or self.n % k != 0:
                raise ConfigError("K", f"{k} does not divide N={self.n}")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ConfigError("scheme", f"unknown scheme {s!r}")
        for mod in self.modulations:
            if mod not in (16, 64):
                raise ConfigError("mod", f"order must be 16 or 64, got {mod}")
        if self.blocks < 1:
            raise ConfigError("blocks", "need at least one block")
        if not 1 <= self.cp < self.n:
            raise ConfigError("cp_len", f"{self.cp} outside [1, {self.n})")
        if self.oversample < 1:
            raise ConfigError("oversample", "factor must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers", "need at least one worker")
        for d in self.delay_ns:
            if d < 0:
                raise ConfigError("delay_ns", "delay spread must be >= 0")
        return self

    def to_json(self) -> str:
        """Canonical config echo. Execution details (output directory,
        worker count) do not influence any result value and are omitted so
        reruns produce byte-identical files."""
        values = asdict(self)
        del values["out"], values["workers"]
        return json.dumps(values, sort_keys=True, separators=(",", ":"))


def substream(seed: int, experiment: int, block: int, user: int,
              purpose: int) -> np.random.Generator:
    """Counter-keyed generator for one (experiment, block, user, purpose)."""
    if not 0 <= block < 2**32:
        raise ValueError("block index out of keyable range")
    if not 0 <= user < 2**16:
        raise ValueError("user index out of keyable range")
    word = (experiment << 56) | (block << 24) | (user << 8) | purpose
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, word], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _draw_bits(cfg: ExperimentConfig, experiment: int, blocks: range,
               k: int, n_bits: int) -> np.ndarray:
    out = np.empty((len(blocks), k, n_bits), dtype=np.uint8)
    for i, b in enumerate(blocks):
        for u in range(k):
            rng = substream(cfg.seed, experiment, b, u, _P_BITS)
            out[i, u] = rng.integers(0, 2, size=n_bits, dtype=np.uint8)
    return out


def _draw_taps(cfg: ExperimentConfig, blocks: range, k: int,
               profile: ChannelProfile) -> np.ndarray:
    out = np.empty((len(blocks), k, profile.tap_count), dtype=np.complex128)
    for i, b in enumerate(blocks):
        for u in range(k):
            rng = substream(cfg.seed, _EXP_BER, b, u, _P_CHAN)
            out[i, u] = draw_taps(profile, rng)
    return out


def _draw_noise(cfg: ExperimentConfig, blocks: range, length: int) -> np.ndarray:
    out = np.empty((len(blocks), length), dtype=np.complex128)
    for i, b in enumerate(blocks):
        rng = substream(cfg.seed, _EXP_BER, b, 0, _P_NOISE)
        g = rng.standard_normal((length, 2))
        out[i] = (g[:, 0] + 1j * g[:, 1]) / np.sqrt(2.0)
    return out


def _chunks(total: int) -> list[range]:
    return [range(s, min(s + _CHUNK_BLOCKS, total))
            for s in range(0, total, _CHUNK_BLOCKS)]


# ---------------------------------------------------------------------------
# PAPR experiment
# ---------------------------------------------------------------------------

def _papr_point(args) -> dict[str, np.ndarray]:
    cfg, k, mod = args
    cfgs = {s: SchemeConfig(s, cfg.n, k, cfg.cp, mod) for s in cfg.schemes}
    m = cfg.n // k
    n_bits = m * bits_per_symbol(mod)
    samples = {s: np.empty((cfg.blocks, k)) for s in cfg.schemes}
    for blocks in _chunks(cfg.blocks):
        bits = _draw_bits(cfg, _EXP_PAPR, blocks, k, n_bits)
        sym = qam_modulate(bits, mod)
        sl = slice(blocks.start, blocks.stop)
        for s in cfg.schemes:
            for u in range(k):
                body = txchain.transmit(sym[:, u], u, cfgs[s]).body
                if cfg.oversample > 1:
                    body = metrics.oversampled(body, cfg.oversample)
                samples[s][sl, u] = metrics.papr_db(body)
    return {s: arr.reshape(-1) for s, arr in samples.items()}


def run_papr_experiment(cfg: ExperimentConfig, write: bool = True) -> dict:
    """Collect per-(scheme, K, modulation) PAPR sample sets; write the CCDF
    grid and average-PAPR CSVs."""
    cfg.validate()
    points = [(k, mod) for k in cfg.k_list for mod in cfg.modulations]
    outputs = _map_jobs(_papr_point, [(cfg, k, mod) for k, mod in points],
                        cfg.workers, label="papr")
    results = {}
    for (k, mod), per_scheme in zip(points, outputs):
        for s in cfg.schemes:
            results[(s, k, mod)] = per_scheme[s]
    if write:
        ccdf_rows = []
        avg_rows = []
        for s in cfg.schemes:
            for k in cfg.k_list:
                for mod in cfg.modulations:
                    samp = results[(s, k, mod)]
                    probs = metrics.ccdf(samp, np.array(PAPR_THRESHOLDS_DB))
                    ccdf_rows += [(s, cfg.n, k, mod, z, p)
                                  for z, p in zip(PAPR_THRESHOLDS_DB, probs)]
                    avg_rows.append((s, cfg.n, k, mod,
                                     metrics.average_papr(samp), samp.size))
        _write_csv(cfg, "ccdf.csv", "papr",
                   ("scheme", "N", "K", "modulation", "threshold_db", "ccdf"),
                   ccdf_rows)
        _write_csv(cfg, "avg_papr.csv", "papr",
                   ("scheme", "N", "K", "modulation", "avg_papr_db", "samples"),
                   avg_rows)
    return results


# ---------------------------------------------------------------------------
# BER experiment
# ---------------------------------------------------------------------------

def _fold_pofdma(received: np.ndarray, ramp: np.ndarray, k: int, m: int) -> np.ndarray:
    z = np.conj(ramp) * received
    return transforms.dft(z.reshape(z.shape[:-1] + (k, m)).sum(axis=-2))


def _ber_point(args) -> dict:
    """Full pipeline for one (K, modulation, delay) cell across all schemes
    and SNRs; the payloads, channels and noise draws are shared between the
    schemes so that their error rates are directly comparable."""
    cfg, k, mod, delay = args
    m = cfg.n // k
    cp = cfg.cp
    block_len = cfg.n + cp
    bps = bits_per_symbol(mod)
    profile = ChannelProfile(delay, cfg.sample_period_ns, cfg.decay_floor_db)
    cfgs = {s: SchemeConfig(s, cfg.n, k, cp, mod) for s in cfg.schemes}
    ref_power = k * m / cfg.n  # unit-energy constellations -> 1.0

    conv_size = 1
    while conv_size < block_len + profile.tap_count - 1:
        conv_size *= 2

    errors = {(s, snr): 0 for s in cfg.schemes for snr in cfg.snr_db}
    total_bits = 0

    bins_by_user = np.stack([np.arange(u * m, (u + 1) * m) for u in range(k)])
    periodic_bins = np.stack(
        [rxchain.user_bin_indices(u, cfg.n, k) for u in range(k)])
    ramps = np.stack(
        [transforms.user_phase_diagonal(u, cfg.n, k) for u in range(k)])

    for blocks in _chunks(cfg.blocks):
        nb = len(blocks)
        bits = _draw_bits(cfg, _EXP_BER, blocks, k, m * bps)
        taps = _draw_taps(cfg, blocks, k, profile)
        noise = _draw_noise(cfg, blocks, block_len)
        sym = qam_modulate(bits, mod)
        resp = freq_response(taps, cfg.n)
        total_bits += nb * k * m * bps

        taps_f = None
        if profile.tap_count > 32:
            taps_pad = np.zeros((nb, k, conv_size), dtype=np.complex128)
            taps_pad[..., : profile.tap_count] = taps
            taps_f = transforms.dft(taps_pad)

        for s in cfg.schemes:
            blks = np.empty((nb, k, block_len), dtype=np.complex128)
            for u in range(k):
                blks[:, u] = txchain.transmit(sym[:, u], u, cfgs[s]).samples
            if taps_f is None:
                clean = apply_channel(blks, taps).sum(axis=1)
            else:
                blk_pad = np.zeros((nb, k, conv_size), dtype=np.complex128)
                blk_pad[..., :block_len] = blks
                mixed_f = (transforms.dft(blk_pad) * taps_f).sum(axis=1)
                clean = (transforms.idft(mixed_f) * np.sqrt(conv_size))[..., :block_len]

            for snr in cfg.snr_db:
                if math.isinf(snr):
                    r = txchain.remove_cp(clean, cp)
                else:
                    sigma = math.sqrt(ref_power / 10.0 ** (snr / 10.0))
                    r = txchain.remove_cp(clean + sigma * noise, cp)
                err = errors[(s, snr)]
                if s in ("OFDMA", "SC-FDMA"):
                    spectrum = transforms.dft(r)
                    for u in range(k):
                        est = spectrum[:, bins_by_user[u]] / resp[:, u, bins_by_user[u]]
                        if s == "SC-FDMA":
                            est = transforms.idft(est)
                        rx_bits = qam_demodulate(est, mod)
                        err += int(np.count_nonzero(rx_bits != bits[:, u]))
                else:
                    variant = {"P-OFDMA": "plain", "P-OFDMA-DCT": "dct",
                               "P-OFDMA-DFT": "dft"}[s]
                    for u in range(k):
                        freq = _fold_pofdma(r, ramps[u], k, m)
                        est = freq / resp[:, u, periodic_bins[u]]
                        if variant == "dct":
                            est = est @ transforms.dct_matrix(m)
                        elif variant == "dft":
                            est = transforms.idft(est)
                        rx_bits = qam_demodulate(est, mod)
                        err += int(np.count_nonzero(rx_bits != bits[:, u]))
                errors[(s, snr)] = err

    return {"errors": errors, "bits": total_bits}


def run_ber_experiment(cfg: ExperimentConfig, write: bool = True) -> dict:
    """Run the modulate/transmit/fade/superpose/receive pipeline over the
    (scheme, K, modulation, SNR, delay-spread) grid and tally bit errors."""
    cfg.validate()
    points = [(k, mod, delay) for k in cfg.k_list
              for mod in cfg.modulations for delay in cfg.delay_ns]
    outputs = _map_jobs(_ber_point,
                        [(cfg, k, mod, delay) for k, mod, delay in points],
                        cfg.workers, label="ber")
    results: dict[tuple, BerCounter] = {}
    for (k, mod, delay), out in zip(points, outputs):
        for (s, snr), err in out["errors"].items():
            results[(s, k, mod, snr, delay)] = BerCounter(err, out["bits"])
    if write:
        rows = []
        for s in cfg.schemes:
            for k in cfg.k_list:
                for mod in cfg.modulations:
                    for snr in cfg.snr_db:
                        for delay in cfg.delay_ns:
                            c = results[(s, k, mod, snr, delay)]
                            rows.append((s, cfg.n, k, mod, snr, delay,
                                         c.ber, c.bits_total))
        _write_csv(cfg, "ber.csv", "ber",
                   ("scheme", "N", "K", "modulation", "snr_db", "delay_ns",
                    "ber", "bits"), rows)
    return results


# ---------------------------------------------------------------------------
# PSD experiment
# ---------------------------------------------------------------------------

def run_psd_experiment(cfg: ExperimentConfig, write: bool = True) -> dict[str, PsdEstimate]:
    """Welch PSDs of two representative periodic-mapping users and of the
    superposed band. Streams are concatenated CP-free bodies; the segment
    length equals N so peaks land on the subcarrier grid."""
    cfg.validate()
    k = cfg.k_list[0]
    mod = cfg.modulations[0]
    scfg = SchemeConfig("P-OFDMA", cfg.n, k, cfg.cp, mod)
    m = cfg.n // k
    n_bits = m * bits_per_symbol(mod)
    users = (1, min(32, k - 1)) if k > 1 else (0, 0)

    picked = {u: np.empty((cfg.blocks, cfg.n), dtype=np.complex128) for u in users}
    aggregate = np.zeros((cfg.blocks, cfg.n), dtype=np.complex128)
    for blocks in _chunks(cfg.blocks):
        bits = _draw_bits(cfg, _EXP_PSD, blocks, k, n_bits)
        sym = qam_modulate(bits, mod)
        sl = slice(blocks.start, blocks.stop)
        for u in range(k):
            body = txchain.transmit(sym[:, u], u, scfg).body
            aggregate[sl] += body
            if u in picked:
                picked[u][sl] = body

    streams = {f"user{u}": picked[u].reshape(-1) for u in picked}
    streams["aggregate"] = aggregate.reshape(-1)
    estimates = {name: metrics.welch_psd(data, segment=cfg.n, overlap=0.5)
                 for name, data in streams.items()}
    if write:
        rows = []
        for name in sorted(estimates):
            est = estimates[name]
            rows += [(name, i, f, p)
                     for i, (f, p) in enumerate(zip(est.freq_norm, est.psd_db))]
        _write_csv(cfg, "psd.csv", "psd",
                   ("stream_id", "bin", "freq_norm", "psd_db"), rows)
    return estimates


# ---------------------------------------------------------------------------
# complexity report
# ---------------------------------------------------------------------------

def run_complexity_report(cfg: ExperimentConfig, write: bool = True):
    """Operation counts over the standard (N, K) grid; CSV plus text table."""
    reports = complexity_mod.full_report()
    if write:
        _write_csv(cfg, "complexity.csv", "complexity",
                   complexity_mod.CSV_HEADER,
                   complexity_mod.report_csv_rows(reports))
        path = Path(cfg.out) / "complexity.txt"
        path.write_text(complexity_mod.report_text(reports), encoding="utf-8")
    return reports


# ---------------------------------------------------------------------------
# plumbing: job scheduling, CSV output, config parsing
# ---------------------------------------------------------------------------

def _map_jobs(fn, arg_list, workers: int, label: str) -> list:
    if workers <= 1 or len(arg_list) <= 1:
        out = []
        for i, a in enumerate(arg_list):
            out.append(fn(a))
            print(f"[{label}] point {i + 1}/{len(arg_list)} done", file=sys.stderr)
        return out
    with ProcessPoolExecutor(max_workers=workers) as pool:
        out = []
        for i, res in enumerate(pool.map(fn, arg_list)):
            out.append(res)
            print(f"[{label}] point {i + 1}/{len(arg_list)} done", file=sys.stderr)
        return out


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".10g")
    return str(value)


def _write_csv(cfg: ExperimentConfig, name: str, experiment: str,
               header: tuple, rows) -> Path:
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    lines = [
        f"# pofdma {__version__}",
        f"# experiment: {experiment}",
        f"# seed: {cfg.seed}",
        f"# config: {cfg.to_json()}",
        "# conventions: papr over CP-stripped body at the configured "
        "oversampling; avg_papr = arithmetic mean of per-block dB values; "
        "equalizer = zero-forcing with exact per-user channel knowledge",
        ",".join(header),
    ]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def ensure_outdir(cfg: ExperimentConfig) -> None:
    """Create the output directory up front; raises OSError if unwritable."""
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    probe = out_dir / ".write_probe"
    probe.write_text("", encoding="utf-8")
    probe.unlink()


_COMMAND_DEFAULTS = {
    "papr": {},
    "ber": {"k_list": (64,)},
    "psd": {"n": 1024, "k_list": (64,), "modulations": (16,), "blocks": 200},
    "complexity": {},
    "all": {},
}


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.replace(";", ",").split(",") if v.strip())


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())


def parse_snr_spec(text: str) -> tuple[float, ...]:
    """Expand an SNR grid spec: 'lo..hi:step', or a comma list, or a number."""
    text = text.strip()
    if ".." in text:
        span, _, step = text.partition(":")
        lo, _, hi = span.partition("..")
        if not step:
            raise ValueError(f"missing step in SNR range {text!r}")
        lo, hi, step = float(lo), float(hi), float(step)
        if step <= 0 or hi < lo:
            raise ValueError(f"bad SNR range {text!r}")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return tuple(lo + i * step for i in range(count))
    return _parse_float_list(text)


_FILE_KEYS = {
    "N": ("n", int),
    "K": ("k_list", _parse_int_list),
    "scheme": ("schemes", lambda t: tuple(v.strip() for v in t.split(",") if v.strip())),
    "mod": ("modulations", _parse_int_list),
    "snr": ("snr_db", parse_snr_spec),
    "delay_ns": ("delay_ns", _parse_float_list),
    "blocks": ("blocks", int),
    "seed": ("seed", int),
    "cp_len": ("cp_len", int),
    "oversample": ("oversample", int),
    "out": ("out", str),
    "workers": ("workers", int),
}


def read_config_file(path: str) -> dict:
    """Parse a key=value config file into ExperimentConfig field overrides."""
    overrides = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("file", f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _FILE_KEYS:
            raise ConfigError(key, f"unknown key at {path}:{lineno}")
        field, parser = _FILE_KEYS[key]
        try:
            overrides[field] = parser(value.strip())
        except ValueError as exc:
            raise ConfigError(key, f"{path}:{lineno}: {exc}") from exc
    return overrides


def parse_config(provided: dict, file_path: str | None = None,
                 command: str = "all") -> ExperimentConfig:
    """Merge defaults, config-file values and explicit flags (in that
    order of increasing precedence) into a validated ExperimentConfig."""
    if command not in _COMMAND_DEFAULTS:
        raise ConfigError("command", f"unknown command {command!r}")
    values = dict(_COMMAND_DEFAULTS[command])
    if file_path:
        values.update(read_config_file(file_path))
    values.update({k: v for k, v in provided.items() if v is not None})
    try:
        cfg = ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError("args", str(exc)) from exc
    return cfg.validate()
