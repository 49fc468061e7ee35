"""Figure rendering for search reports (headless, file output only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .search import SearchReport


def plot_kill_histogram(report: SearchReport, path: str, top: int = 25) -> str:
    """Render the counterexample kill counts as a horizontal bar chart."""
    items = sorted(report.histogram.items(), key=lambda kv: kv[1])[-top:]
    fig, ax = plt.subplots(figsize=(8, max(2.5, 0.3 * len(items) + 1)))
    if items:
        names = [name for name, _ in items]
        counts = [count for _, count in items]
        ax.barh(range(len(items)), counts, color="#336699")
        ax.set_yticks(range(len(items)))
        ax.set_yticklabels(names, fontsize=8, fontfamily="monospace")
        ax.set_xlabel("candidates refuted")
    else:
        ax.text(0.5, 0.5, "no refutations", ha="center", va="center")
        ax.set_axis_off()
    ax.set_title(
        f"refuted {report.refuted} of {report.candidates_total} candidates, "
        f"{len(report.survivors)} survivors"
    )
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
