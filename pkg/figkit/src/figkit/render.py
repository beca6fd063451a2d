"""CSV loading and figure construction.

Inputs are the simulator's documented CSV schemas; every figure draws one
series per objective function (taken from each file's `of` column) and the
timeseries kinds mark the attack start with a vertical line.
"""

import csv
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

FIGSIZE = (7.0, 4.2)
DPI = 120

SERIES_COLORS = {"of0": "#d62728", "mrhof": "#1f77b4", "secof": "#2ca02c"}

PDR_COLUMNS = ("sample_s", "of", "pdr", "mean_power_mw")
NODE_COLUMNS = ("node_id", "of", "level", "mean_mW")

KINDS = ("pdr-timeseries", "power-timeseries", "power-per-node")


class FigkitError(ValueError):
    pass


def load_rows(path):
    if not os.path.exists(path):
        raise FigkitError(f"{path}: no such file")
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    if not rows:
        raise FigkitError(f"{path}: empty CSV, nothing to plot")
    return rows


def _require(rows, columns, path):
    present = set(rows[0])
    for col in columns:
        if col not in present:
            raise FigkitError(f"{path}: missing column {col!r}")


def _series_label(rows, path):
    of = rows[0].get("of", "").strip()
    if not of:
        raise FigkitError(f"{path}: missing column 'of'")
    return of


def _color(label):
    return SERIES_COLORS.get(label)


def _mark_attack(ax, attack_start_s):
    if attack_start_s is not None:
        ax.axvline(attack_start_s, color="0.3", linestyle="--", linewidth=1.0,
                   label=f"attack start ({attack_start_s:g} s)")


def _timeseries(inputs, column, ylabel, title, attack_start_s):
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    for path in inputs:
        rows = load_rows(path)
        _require(rows, PDR_COLUMNS, path)
        label = _series_label(rows, path)
        xs = [float(r["sample_s"]) for r in rows]
        ys = [float(r[column]) for r in rows]
        ax.plot(xs, ys, label=label, color=_color(label), linewidth=1.6)
    _mark_attack(ax, attack_start_s)
    ax.set_xlabel("time (s)")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, linewidth=0.3, alpha=0.6)
    ax.legend()
    fig.tight_layout()
    return fig


def render_pdr_timeseries(inputs, attack_start_s=120.0):
    return _timeseries(inputs, "pdr", "cumulative packet delivery ratio",
                       "Delivery ratio over time", attack_start_s)


def render_power_timeseries(inputs, attack_start_s=120.0):
    return _timeseries(inputs, "mean_power_mw", "mean power (mW)",
                       "Network mean power over time", attack_start_s)


def render_power_per_node(inputs):
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    series = []
    for path in inputs:
        rows = load_rows(path)
        _require(rows, NODE_COLUMNS, path)
        label = _series_label(rows, path)
        data = {int(r["node_id"]): float(r["mean_mW"]) for r in rows}
        series.append((label, data))
    nodes = sorted(set().union(*(d for _, d in series)))
    width = 0.8 / len(series)
    for i, (label, data) in enumerate(series):
        offsets = [n + (i - (len(series) - 1) / 2) * width for n in nodes]
        ax.bar(offsets, [data.get(n, 0.0) for n in nodes], width=width,
               label=label, color=_color(label))
    ax.set_xticks(nodes)
    ax.set_xlabel("node id")
    ax.set_ylabel("mean power (mW)")
    ax.set_title("Per-node mean power")
    ax.grid(True, axis="y", linewidth=0.3, alpha=0.6)
    ax.legend()
    fig.tight_layout()
    return fig


def render(kind, inputs, attack_start_s=120.0):
    if kind == "pdr-timeseries":
        return render_pdr_timeseries(inputs, attack_start_s)
    if kind == "power-timeseries":
        return render_power_timeseries(inputs, attack_start_s)
    if kind == "power-per-node":
        return render_power_per_node(inputs)
    raise FigkitError(f"unknown figure kind {kind!r}; expected one of {KINDS}")


def save(fig, out_path):
    """Write the raster image plus a vector twin next to it."""
    base, ext = os.path.splitext(out_path)
    if not ext:
        ext = ".png"
        out_path = base + ext
    vector = base + (".svg" if ext.lower() != ".svg" else ".pdf")
    directory = os.path.dirname(out_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    fig.savefig(out_path)
    fig.savefig(vector)
    plt.close(fig)
    return [out_path, vector]
