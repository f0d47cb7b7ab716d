"""Figure construction from result tables.

One function per figure kind, a FigureSpec/render pair for single
figures, and render_all to sweep a results directory into the full
figure set plus an HTML index. Output bytes are reproducible: the Agg
backend is forced and date metadata is suppressed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import ResultTable, TableError, read_table  # noqa: E402

SCHEME_ORDER = ("OFDMA", "SC-FDMA", "P-OFDMA", "P-OFDMA-DCT", "P-OFDMA-DFT")

# colour/marker per scheme, fixed across every figure
SCHEME_STYLE = {
    "OFDMA": dict(color="tab:green", marker="^", linestyle="-"),
    "SC-FDMA": dict(color="tab:red", marker="o", linestyle="-"),
    "P-OFDMA": dict(color="tab:blue", marker="s", linestyle="-"),
    "P-OFDMA-DCT": dict(color="tab:purple", marker="D", linestyle="--"),
    "P-OFDMA-DFT": dict(color="tab:orange", marker="v", linestyle="-"),
}

FIGURE_KINDS = ("ccdf", "avg_papr", "ber_vs_snr", "ber_vs_delay", "psd")


@dataclass
class FigureSpec:
    """One figure to render: kind, inputs, filters and destination."""

    kind: str
    csv_path: Path
    out_path: Path
    filters: dict = field(default_factory=dict)
    log_y: bool = True

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise TableError(f"unknown figure kind {self.kind!r}")


def _save(fig, out_path: Path) -> Path:
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, metadata={"Date": None}
                if out_path.suffix == ".svg" else None)
    plt.close(fig)
    return out_path


def _schemes_in(table: ResultTable) -> list[str]:
    present = set(table.column("scheme"))
    unknown = present - set(SCHEME_ORDER)
    if unknown:
        raise TableError(f"{table.path}: unknown schemes {sorted(unknown)}")
    return [s for s in SCHEME_ORDER if s in present]


def _mods_in(table: ResultTable) -> list[str]:
    return sorted(table.distinct("modulation"), key=int)


def _fig_ccdf(table: ResultTable, spec: FigureSpec) -> Path:
    sub = table.where(**spec.filters) if spec.filters else table
    mods = _mods_in(sub)
    n = sub.distinct("N")[0]
    k = sub.distinct("K")[0]
    fig, axes = plt.subplots(1, len(mods), figsize=(5.2 * len(mods), 4.0),
                             squeeze=False)
    for ax, mod in zip(axes[0], mods):
        for scheme in _schemes_in(sub):
            cut = sub.where(scheme=scheme, modulation=mod)
            z = np.array(cut.floats("threshold_db"))
            p = np.array(cut.floats("ccdf"))
            keep = p > 0
            ax.semilogy(z[keep], p[keep], label=scheme, markevery=8,
                        markersize=4, **SCHEME_STYLE[scheme])
        ax.set_xlabel("PAPR threshold (dB)")
        ax.set_ylabel("Pr(PAPR > threshold)")
        ax.set_title(f"{mod}-QAM, N={n}, N/K={int(n) // int(k)}")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
    fig.tight_layout()
    return _save(fig, spec.out_path)


def _fig_avg_papr(table: ResultTable, spec: FigureSpec) -> Path:
    sub = table.where(**spec.filters) if spec.filters else table
    mods = _mods_in(sub)
    fig, axes = plt.subplots(1, len(mods), figsize=(5.2 * len(mods), 4.0),
                             squeeze=False)
    for ax, mod in zip(axes[0], mods):
        for scheme in _schemes_in(sub):
            cut = sub.where(scheme=scheme, modulation=mod)
            n_over_k = [int(a) // int(b) for a, b in
                        zip(cut.column("N"), cut.column("K"))]
            order = np.argsort(n_over_k)
            x = np.array(n_over_k)[order]
            y = np.array(cut.floats("avg_papr_db"))[order]
            ax.plot(x, y, label=scheme, markersize=5, **SCHEME_STYLE[scheme])
        ax.set_xscale("log", base=2)
        ax.set_xticks(sorted(set(n_over_k)))
        ax.get_xaxis().set_major_formatter(plt.ScalarFormatter())
        ax.set_xlabel("subcarriers per user (N/K)")
        ax.set_ylabel("average PAPR (dB)")
        ax.set_title(f"{mod}-QAM")
        ax.grid(True, alpha=0.3)
        ax.legend()
    fig.tight_layout()
    return _save(fig, spec.out_path)


def _fig_ber(table: ResultTable, spec: FigureSpec, x_col: str,
             x_label: str, fixed_col: str) -> Path:
    sub = table.where(**spec.filters) if spec.filters else table
    mods = _mods_in(sub)
    fixed_val = sub.distinct(fixed_col)
    if len(fixed_val) != 1:
        raise TableError(
            f"{table.path}: expected a single {fixed_col} after filtering, "
            f"got {fixed_val}")
    fig, axes = plt.subplots(1, len(mods), figsize=(5.2 * len(mods), 4.0),
                             squeeze=False)
    for ax, mod in zip(axes[0], mods):
        for scheme in _schemes_in(sub):
            cut = sub.where(scheme=scheme, modulation=mod)
            x = np.array(cut.floats(x_col))
            y = np.array(cut.floats("ber"))
            order = np.argsort(x)
            x, y = x[order], y[order]
            keep = y > 0
            ax.semilogy(x[keep], y[keep], label=scheme, markersize=5,
                        **SCHEME_STYLE[scheme])
        ax.set_xlabel(x_label)
        ax.set_ylabel("bit error rate")
        ax.set_title(f"{mod}-QAM ({fixed_col}={fixed_val[0]})")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
    fig.tight_layout()
    return _save(fig, spec.out_path)


def _fig_psd(table: ResultTable, spec: FigureSpec) -> Path:
    sub = table.where(**spec.filters) if spec.filters else table
    streams = sub.distinct("stream_id")
    fig, axes = plt.subplots(1, len(streams), figsize=(4.2 * len(streams), 3.6),
                             squeeze=False)
    for ax, stream in zip(axes[0], streams):
        cut = sub.where(stream_id=stream)
        f = np.array(cut.floats("freq_norm"))
        p = np.array(cut.floats("psd_db"))
        order = np.argsort(f)
        ax.plot(f[order], p[order], color="tab:blue", linewidth=0.8)
        ax.set_xlabel("normalized frequency")
        ax.set_ylabel("PSD (dB)")
        ax.set_title(stream)
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return _save(fig, spec.out_path)


def render(spec: FigureSpec) -> Path:
    """Render one figure from its spec; returns the written image path."""
    table = read_table(spec.csv_path)
    if spec.kind == "ccdf":
        return _fig_ccdf(table, spec)
    if spec.kind == "avg_papr":
        return _fig_avg_papr(table, spec)
    if spec.kind == "ber_vs_snr":
        return _fig_ber(table, spec, "snr_db", "SNR (dB)", "delay_ns")
    if spec.kind == "ber_vs_delay":
        return _fig_ber(table, spec, "delay_ns", "maximum delay spread (ns)",
                        "snr_db")
    return _fig_psd(table, spec)


def _pick(values: list[str], preferred: float, largest: bool) -> str:
    """Choose the preferred grid value when present, else the extreme one."""
    floats = [(float(v), v) for v in values]
    for fv, v in floats:
        if fv == preferred:
            return v
    return max(floats)[1] if largest else min(floats)[1]


def build_specs(results_dir: Path, fmt: str) -> list[FigureSpec]:
    """Figure specs for everything renderable in a results directory."""
    results_dir = Path(results_dir)
    specs: list[FigureSpec] = []
    ext = f".{fmt}"

    ccdf_path = results_dir / "ccdf.csv"
    if ccdf_path.exists():
        table = read_table(ccdf_path)
        for n in table.distinct("N"):
            for k in sorted(table.where(N=n).distinct("K"), key=int):
                specs.append(FigureSpec(
                    "ccdf", ccdf_path,
                    results_dir / f"ccdf_nk{int(n) // int(k)}{ext}",
                    filters={"N": n, "K": k}))

    avg_path = results_dir / "avg_papr.csv"
    if avg_path.exists():
        specs.append(FigureSpec("avg_papr", avg_path,
                                results_dir / f"avg_papr{ext}"))

    ber_path = results_dir / "ber.csv"
    if ber_path.exists():
        table = read_table(ber_path)
        delay = _pick(table.distinct("delay_ns"), 300.0, largest=False)
        specs.append(FigureSpec("ber_vs_snr", ber_path,
                                results_dir / f"ber_vs_snr{ext}",
                                filters={"delay_ns": delay}))
        snr = _pick(table.distinct("snr_db"), 32.0, largest=True)
        specs.append(FigureSpec("ber_vs_delay", ber_path,
                                results_dir / f"ber_vs_delay{ext}",
                                filters={"snr_db": snr}))

    psd_path = results_dir / "psd.csv"
    if psd_path.exists():
        specs.append(FigureSpec("psd", psd_path, results_dir / f"psd{ext}"))
    return specs


def _index_html(results_dir: Path, images: list[Path]) -> Path:
    """Static index of the figure set with each file's config echo."""
    lines = ["<!DOCTYPE html>", "<html><head><meta charset='utf-8'>",
             "<title>pofdma figures</title></head><body>",
             "<h1>pofdma figures</h1>"]
    for csv_name in ("ccdf.csv", "avg_papr.csv", "ber.csv", "psd.csv",
                     "complexity.csv"):
        path = results_dir / csv_name
        if not path.exists():
            continue
        meta = read_table(path).metadata
        lines.append(f"<h2>{csv_name}</h2><pre>")
        lines += [m.replace("<", "&lt;") for m in meta]
        lines.append("</pre>")
    lines.append("<h2>figures</h2>")
    for img in images:
        lines.append(f"<div><h3>{img.name}</h3>"
                     f"<img src='{img.name}' alt='{img.name}'></div>")
    lines.append("</body></html>")
    out = results_dir / "index.html"
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return out


def render_all(results_dir: Path | str, fmt: str = "png") -> list[Path]:
    """Render every applicable figure plus the HTML index.

    Overwrites previous output; identical inputs give identical bytes.
    """
    if fmt not in ("svg", "png"):
        raise TableError(f"unsupported format {fmt!r}; use svg or png")
    results_dir = Path(results_dir)
    if not results_dir.is_dir():
        raise TableError(f"{results_dir}: not a directory")
    specs = build_specs(results_dir, fmt)
    if not specs:
        raise TableError(f"{results_dir}: no renderable result files found")
    images = [render(spec) for spec in specs]
    _index_html(results_dir, images)
    return images
