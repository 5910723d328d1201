"""Sum-rate bounds versus pilot dimension from sweep report CSVs.

Reads one or more report files written by the simulator (fixed header with
method, T, dl_snr, sum_lb, sum_ub, ... columns), averages the bounds over
geometry seeds, and draws one curve pair per (method, SNR): by default a
shaded band from the lower to the upper bound, optionally separate curves.
"""

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

REQUIRED_COLUMNS = ("method", "T", "dl_snr", "sum_lb", "sum_ub")

_METHOD_COLORS = {"proposed": "tab:blue", "jomp": "tab:red"}
_SNR_STYLES = ("-", "--", ":", "-.")


class ReportFormatError(ValueError):
    """Input rows or header do not match the report schema."""


@dataclass
class PlotSpec:
    """What to read and how to draw it."""

    inputs: list
    output: str
    snr_values: list = None  # None draws every SNR present
    band: bool = True  # shaded lb..ub band; False draws separate curves
    title: str = "Sum-rate bounds vs. pilot dimension"
    dpi: int = 150


@dataclass
class BoundSeries:
    method: str
    dl_snr: float
    T: np.ndarray
    lb: np.ndarray
    ub: np.ndarray


def load_rows(paths):
    """Rows from every input CSV, validated against the required header."""
    rows = []
    for path in paths:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in REQUIRED_COLUMNS if c not in header]
            if missing:
                raise ReportFormatError(
                    f"{path}: missing required columns {', '.join(missing)}"
                )
            for rec in reader:
                rows.append(
                    {
                        "method": rec["method"],
                        "T": int(rec["T"]),
                        "dl_snr": float(rec["dl_snr"]),
                        "sum_lb": float(rec["sum_lb"]),
                        "sum_ub": float(rec["sum_ub"]),
                    }
                )
    if not rows:
        raise ReportFormatError(f"no data rows in {', '.join(str(p) for p in paths)}")
    return rows


def aggregate(rows, snr_values=None):
    """Mean bounds over seeds, grouped by (method, dl_snr), sorted by T."""
    if snr_values is not None:
        wanted = set(float(s) for s in snr_values)
        rows = [r for r in rows if r["dl_snr"] in wanted]
        if not rows:
            raise ReportFormatError(
                f"no rows left after SNR filter {sorted(wanted)}"
            )
    groups = {}
    for r in rows:
        groups.setdefault((r["method"], r["dl_snr"], r["T"]), []).append(r)
    series = {}
    for (method, snr, T), cell in sorted(groups.items()):
        lb = float(np.mean([c["sum_lb"] for c in cell]))
        ub = float(np.mean([c["sum_ub"] for c in cell]))
        series.setdefault((method, snr), []).append((T, lb, ub))
    out = []
    for (method, snr), pts in sorted(series.items()):
        pts.sort()
        arr = np.array(pts, dtype=float)
        out.append(BoundSeries(method, snr, arr[:, 0], arr[:, 1], arr[:, 2]))
    return out


def render(spec):
    """Draw the figure described by the spec and write it to spec.output."""
    rows = load_rows(spec.inputs)
    series = aggregate(rows, spec.snr_values)
    snrs = sorted({s.dl_snr for s in series})

    fig, ax = plt.subplots(figsize=(7.5, 5.0))
    for s in series:
        color = _METHOD_COLORS.get(s.method, "tab:gray")
        style = _SNR_STYLES[snrs.index(s.dl_snr) % len(_SNR_STYLES)]
        label = f"{s.method}, SNR {s.dl_snr:g} dB"
        if spec.band:
            ax.fill_between(s.T, s.lb, s.ub, color=color, alpha=0.20, linewidth=0)
            ax.plot(s.T, s.lb, style, color=color, label=f"{label} (lb..ub)")
            ax.plot(s.T, s.ub, style, color=color, alpha=0.55)
        else:
            ax.plot(s.T, s.lb, style, color=color, label=f"{label} lb")
            ax.plot(s.T, s.ub, style, color=color, alpha=0.55, label=f"{label} ub")
        if s.T.size == 1:  # single sweep point: make the band visible
            ax.plot(s.T, s.lb, "o", color=color)
            ax.plot(s.T, s.ub, "o", color=color, alpha=0.55)
    ax.set_xlabel("pilot dimension T")
    ax.set_ylabel("sum rate (bits / channel use)")
    ax.set_title(spec.title)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    fig.savefig(spec.output, dpi=spec.dpi)
    plt.close(fig)
    return spec.output
