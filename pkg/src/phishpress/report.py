"""Report rendering: JSON/CSV/TXT outputs with matplotlib figures alongside.

Every writer returns the paths it produced so callers (and tests) can track
exactly what landed on disk. Figures are rendered with the Agg backend; no
display is ever required.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Mapping

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .dictionary import LikelihoodTable, ThresholdSweepReport, likelihood_percentiles, top_k_words
from .evaluation import ImbalancedEvalReport, MetricsReport, render_metrics_table

_FIG_DPI = 150


def _save_fig(fig, path: Path) -> Path:
    fig.savefig(path, dpi=_FIG_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def save_sweep_outputs(report: ThresholdSweepReport, out_dir: str | Path,
                       seed: int | None = None) -> list[Path]:
    """sweep.json + sweep.csv + the accuracy-vs-threshold curve."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []

    doc = {
        "best_threshold": report.best_threshold,
        "best_accuracy": report.best_accuracy,
        "grid": [
            {
                "threshold": p.threshold,
                "phish_dict_size": p.phish_dict_size,
                "nonphish_dict_size": p.nonphish_dict_size,
                "accuracy": p.accuracy,
            }
            for p in report.grid
        ],
    }
    if seed is not None:
        doc["seed"] = seed
    json_path = out / "sweep.json"
    json_path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    paths.append(json_path)

    csv_path = out / "sweep.csv"
    with csv_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["threshold", "phish_dict_size", "nonphish_dict_size", "accuracy"])
        for p in report.grid:
            writer.writerow([p.threshold, p.phish_dict_size, p.nonphish_dict_size,
                             "" if p.accuracy is None else p.accuracy])
    paths.append(csv_path)

    evaluated = [(p.threshold, p.accuracy) for p in report.grid if p.accuracy is not None]
    fig, ax = plt.subplots(figsize=(6, 4))
    if evaluated:
        xs, ys = zip(*evaluated)
        ax.plot(xs, ys, marker="o", color="tab:blue")
        ax.axvline(report.best_threshold, color="tab:red", linestyle="--",
                   label=f"best {report.best_threshold:.2e}")
        ax.legend()
    ax.set_xscale("log")
    ax.set_xlabel("likelihood threshold")
    ax.set_ylabel("accuracy")
    ax.set_title("Accuracy vs likelihood threshold")
    ax.grid(True, alpha=0.3)
    paths.append(_save_fig(fig, out / "accuracy_vs_threshold.png"))
    return paths


def save_likelihood_figures(
    tables: Mapping[str, LikelihoodTable], out_dir: str | Path, top_n: int = 100
) -> list[Path]:
    """Percentile curve of stored likelihoods and the normalized frequency
    histogram of the most frequent words, one series per class."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []

    fig, ax = plt.subplots(figsize=(6, 4))
    percentiles = [i / 10 for i in range(1, 11)]
    for name, table in tables.items():
        points = likelihood_percentiles(table, percentiles)
        ax.plot([100 * p for p, _ in points], [v for _, v in points],
                marker="o", label=name)
    ax.set_yscale("log")
    ax.set_xlabel("percentile")
    ax.set_ylabel("word occurrence likelihood")
    ax.set_title("Distribution of word occurrence likelihood")
    ax.grid(True, alpha=0.3)
    ax.legend()
    paths.append(_save_fig(fig, out / "likelihood_percentiles.png"))

    fig, axes = plt.subplots(1, len(tables), figsize=(6 * len(tables), 4), squeeze=False)
    for ax, (name, table) in zip(axes[0], tables.items()):
        top = top_k_words(table, top_n)
        freqs = [table.counts[w] / max(table.n_total, 1) for w, _ in top]
        ax.bar(range(len(freqs)), freqs, width=1.0)
        ax.set_xlabel(f"top {len(freqs)} words by likelihood")
        ax.set_ylabel("normalized frequency")
        ax.set_title(name)
    fig.suptitle("Word frequency distribution")
    paths.append(_save_fig(fig, out / "word_frequency.png"))
    return paths


def save_metrics_outputs(
    reports: Mapping[str, MetricsReport | ImbalancedEvalReport],
    out_dir: str | Path,
    stem: str = "metrics",
) -> list[Path]:
    """metrics.json + the aligned text table + a grouped bar chart."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []

    json_path = out / f"{stem}.json"
    json_path.write_text(
        json.dumps({name: r.to_dict() for name, r in reports.items()}, indent=2) + "\n",
        encoding="utf-8",
    )
    paths.append(json_path)

    txt_path = out / f"{stem}.txt"
    txt_path.write_text(render_metrics_table(dict(reports)), encoding="utf-8")
    paths.append(txt_path)

    metric_names = ["TPR", "FPR", "Accuracy", "F1"]
    fig, ax = plt.subplots(figsize=(7, 4))
    width = 0.8 / max(len(reports), 1)
    for i, (name, report) in enumerate(reports.items()):
        if isinstance(report, ImbalancedEvalReport):
            values = [report.mean_tpr, report.mean_fpr, report.mean_accuracy, report.mean_f1]
        else:
            values = [report.tpr, report.fpr, report.accuracy, report.f1]
        xs = [j + i * width for j in range(len(metric_names))]
        ax.bar(xs, [0.0 if v is None else v for v in values], width=width, label=name)
    ax.set_xticks([j + width * (len(reports) - 1) / 2 for j in range(len(metric_names))])
    ax.set_xticklabels(metric_names)
    ax.set_ylim(0, 1)
    ax.set_ylabel("fraction")
    ax.set_title("Detector performance")
    ax.grid(True, axis="y", alpha=0.3)
    ax.legend()
    paths.append(_save_fig(fig, out / f"{stem}.png"))
    return paths
