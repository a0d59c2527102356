"""Figure rendering for sweep, Gaussian-bound and phase-search CSV files.

Every CLI report path writes its delimited output first and then renders a
matching PNG next to it through these helpers. `emit_plot_script` instead
writes a standalone matplotlib script that reproduces the same figure from
the CSV, for users who want to restyle plots outside this package.
"""

from __future__ import annotations

import csv
import os
from typing import Dict, List

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .errors import SchemaError

#: figure ids accepted by `emit_plot_script` (fig5/6/7 share the sweep layout)
FIGURE_KINDS = {
    "fig4": "gaussian",
    "gaussian": "gaussian",
    "fig5": "sweep",
    "fig6": "sweep",
    "fig7": "sweep",
    "sweep": "sweep",
    "phases": "phases",
}

_REQUIRED = {
    "gaussian": ("snr_db", "r1_bound", "regime"),
    "sweep": ("snr_db",),
    "phases": ("phase_rad", "ij", "ij_se"),
}


def read_csv_columns(path) -> Dict[str, List[str]]:
    """Read a CSV into {column: list of raw strings}; empty file -> SchemaError."""
    try:
        with open(path, "r", newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaError(f"{path}: empty CSV, no header") from None
            rows = [row for row in reader if row]
    except OSError as exc:
        raise SchemaError(f"cannot read CSV {path}: {exc}") from None
    if not rows:
        raise SchemaError(f"{path}: CSV has a header but no data rows")
    cols = {name: [row[i] for row in rows] for i, name in enumerate(header)}
    return cols


def _check_schema(path, cols, kind: str):
    missing = [c for c in _REQUIRED[kind] if c not in cols]
    if missing:
        raise SchemaError(f"{path}: missing column(s) {', '.join(missing)} for a {kind} figure")
    if kind == "sweep":
        curves = [c for c in cols if c == "sud" or c == "s2" or c.startswith(("mud_", "gauss_"))]
        curves = [c for c in curves if not c.endswith("_se")]
        if not curves:
            raise SchemaError(f"{path}: no rate columns found for a sweep figure")


def _floats(cols, name):
    return [float(v) for v in cols[name]]


_MUD_STYLE = dict(marker="o", markersize=3)


def render_sweep_figure(csv_path, out_path, title=None):
    """Rate-vs-SNR lines, one per strategy / interferer code rate."""
    cols = read_csv_columns(csv_path)
    _check_schema(csv_path, cols, "sweep")
    snr = _floats(cols, "snr_db")
    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    if "sud" in cols:
        ax.plot(snr, _floats(cols, "sud"), color="k", label="SUD")
    for name in cols:
        if name.startswith("mud_") and not name.endswith("_se"):
            tag = name[len("mud_"):]
            ax.plot(snr, _floats(cols, name), label=f"MUD×2, r2={_pretty_tag(tag)}", **_MUD_STYLE)
    if "s2" in cols:
        ax.plot(snr, _floats(cols, "s2"), linestyle="--", color="tab:purple", label="time division")
    for name in cols:
        if name.startswith("gauss_"):
            tag = name[len("gauss_"):]
            ax.plot(snr, _floats(cols, name), linestyle=":", label=f"Gaussian ref, r2={_pretty_tag(tag)}")
    ax.set_xlabel("P/N (dB)")
    ax.set_ylabel("rate (bits/symbol)")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.4)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def _pretty_tag(tag: str) -> str:
    if tag.startswith("r") and len(tag) == 3:
        return f"{tag[1]}/{tag[2]}"
    return tag


def render_gaussian_figure(csv_path, out_path, title=None):
    """Branch curves plus the overall bound (red) for the Gaussian example."""
    cols = read_csv_columns(csv_path)
    _check_schema(csv_path, cols, "gaussian")
    snr = _floats(cols, "snr_db")
    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    branches = (
        ("branch_full", "interferer decodable"),
        ("branch_sumrate", "sum-rate limited"),
        ("branch_interference", "interferer as noise"),
    )
    for name, label in branches:
        if name in cols:
            ax.plot(snr, _floats(cols, name), linestyle="--", linewidth=1.0, label=label)
    ax.plot(snr, _floats(cols, "r1_bound"), color="red", linewidth=2.0, label="overall bound")
    if "mc_rate" in cols:
        ax.plot(snr, _floats(cols, "mc_rate"), "k.", markersize=4, label="Monte-Carlo")
    ax.set_xlabel("P/N (dB)")
    ax.set_ylabel("rate (bits/symbol)")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.4)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_phases_figure(csv_path, out_path, title=None):
    """Estimated sum-rate over the phase grid with the argmax marked."""
    cols = read_csv_columns(csv_path)
    _check_schema(csv_path, cols, "phases")
    phases = _floats(cols, "phase_rad")
    rates = _floats(cols, "ij")
    errs = _floats(cols, "ij_se")
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.errorbar(phases, rates, yerr=errs, fmt="o-", markersize=3, capsize=2)
    best = max(range(len(rates)), key=lambda i: rates[i])
    ax.plot(phases[best], rates[best], "r*", markersize=12, label="argmax")
    ax.set_xlabel("phase shift (rad)")
    ax.set_ylabel("sum-rate (bits/symbol)")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.4)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


_SCRIPT_TEMPLATE = '''#!/usr/bin/env python3
"""Standalone plot script generated by satrate; renders {kind} figure."""
import csv

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

CSV_PATH = {csv_path!r}
OUT_PATH = {png_path!r}

with open(CSV_PATH, newline="") as fh:
    reader = csv.reader(fh)
    header = next(reader)
    rows = [row for row in reader if row]
cols = {{name: [row[i] for row in rows] for i, name in enumerate(header)}}

def f(name):
    return [float(v) for v in cols[name]]

fig, ax = plt.subplots(figsize=(7.0, 4.6))
{body}
ax.grid(True, alpha=0.4)
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT_PATH, dpi=150)
print("wrote", OUT_PATH)
'''

_SCRIPT_BODY = {
    "sweep": '''snr = f("snr_db")
if "sud" in cols:
    ax.plot(snr, f("sud"), color="k", label="SUD")
for name in cols:
    if name.startswith("mud_") and not name.endswith("_se"):
        ax.plot(snr, f(name), marker="o", markersize=3, label="MUDx2 " + name[4:])
if "s2" in cols:
    ax.plot(snr, f("s2"), linestyle="--", color="tab:purple", label="time division")
for name in cols:
    if name.startswith("gauss_"):
        ax.plot(snr, f(name), linestyle=":", label="Gaussian ref " + name[6:])
ax.set_xlabel("P/N (dB)")
ax.set_ylabel("rate (bits/symbol)")''',
    "gaussian": '''snr = f("snr_db")
for name, label in (("branch_full", "interferer decodable"),
                    ("branch_sumrate", "sum-rate limited"),
                    ("branch_interference", "interferer as noise")):
    if name in cols:
        ax.plot(snr, f(name), linestyle="--", linewidth=1.0, label=label)
ax.plot(snr, f("r1_bound"), color="red", linewidth=2.0, label="overall bound")
if "mc_rate" in cols:
    ax.plot(snr, f("mc_rate"), "k.", markersize=4, label="Monte-Carlo")
ax.set_xlabel("P/N (dB)")
ax.set_ylabel("rate (bits/symbol)")''',
    "phases": '''phases = f("phase_rad")
rates = f("ij")
ax.errorbar(phases, rates, yerr=f("ij_se"), fmt="o-", markersize=3, capsize=2)
best = max(range(len(rates)), key=lambda i: rates[i])
ax.plot(phases[best], rates[best], "r*", markersize=12, label="argmax")
ax.set_xlabel("phase shift (rad)")
ax.set_ylabel("sum-rate (bits/symbol)")''',
}


def emit_plot_script(csv_path, figure_id: str, out_path) -> str:
    """Write a standalone matplotlib script for `csv_path`.

    `figure_id` is one of fig4..fig7 or a layout name (gaussian, sweep,
    phases). The CSV schema is validated before anything is written.
    """
    kind = FIGURE_KINDS.get(str(figure_id).lower())
    if kind is None:
        raise SchemaError(
            f"unknown figure id {figure_id!r}; valid: {', '.join(sorted(FIGURE_KINDS))}"
        )
    cols = read_csv_columns(csv_path)
    _check_schema(csv_path, cols, kind)
    png_path = os.path.splitext(str(out_path))[0] + ".png"
    script = _SCRIPT_TEMPLATE.format(
        kind=kind,
        csv_path=os.path.abspath(str(csv_path)),
        png_path=png_path,
        body=_SCRIPT_BODY[kind],
    )
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(script)
    return str(out_path)
