"""JSON reports and figures for benchmark runs."""
from __future__ import annotations

import json
from pathlib import Path
from typing import List, Sequence, Union

from .measure import Report


def report_json(reports: Sequence[Report]) -> str:
    """Deterministic JSON: a single report object, or a list of them."""
    data: Union[dict, List[dict]]
    data = reports[0].to_json() if len(reports) == 1 else [r.to_json() for r in reports]
    return json.dumps(data, indent=2) + "\n"


def figure_path(json_path: Union[str, Path]) -> Path:
    return Path(json_path).with_suffix(".png")


def write_figure(reports: Sequence[Report], path: Union[str, Path]) -> Path:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.2))
    for r in reports:
        ns = [row.n for row in r.rows]
        label = "%s / %s" % (r.family, r.mode)
        ax1.plot(ns, [row.adjusted_ratio for row in r.rows], marker="o", label=label)
        ax2.plot(ns, [row.cost_derivative for row in r.rows], marker="o", label=label)
    ax1.set_xscale("log", base=2)
    ax1.set_xlabel("size n")
    ax1.set_ylabel("adjusted cost ratio (derivative / primal)")
    ax1.set_title("derivative overhead")
    ax2.set_xscale("log", base=2)
    ax2.set_yscale("log")
    ax2.set_xlabel("size n")
    ax2.set_ylabel("derivative cost (steps)")
    ax2.set_title("derivative cost")
    for ax in (ax1, ax2):
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=110, metadata={"Software": None})
    plt.close(fig)
    return path


def write_report(reports: Sequence[Report], out: Union[str, Path]) -> Path:
    """Write the JSON report to `out` and the figure next to it."""
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report_json(reports))
    return write_figure(reports, figure_path(out))
