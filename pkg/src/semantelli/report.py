"""Render a search response to files: a delimited score table plus figures.

Written for offline inspection of the ranking: the stacked-bar figure
shows how much of each result's score comes from engine trust
(weight x damping) versus page relevance (hits + out-links), and the
engine figure shows how many results each engine contributed and how
many of those were shared with another engine.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Any

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

MAX_BARS = 15

CSV_COLUMNS = [
    "final_rank",
    "canonical_url",
    "title",
    "engines",
    "hit_count",
    "out_links",
    "effective_weight",
    "relevance_factor",
    "telli_factor",
]


def write_report(
    response: dict[str, Any], out_dir: str | Path, *, delimiter: str = ","
) -> list[Path]:
    """Write results.csv/tsv plus the two PNG figures; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    suffix = "tsv" if delimiter == "\t" else "csv"

    table_path = out_dir / f"results.{suffix}"
    _write_table(response, table_path, delimiter)
    breakdown_path = out_dir / "score_breakdown.png"
    _plot_score_breakdown(response, breakdown_path)
    engines_path = out_dir / "engine_contribution.png"
    _plot_engine_contribution(response, engines_path)
    return [table_path, breakdown_path, engines_path]


def _write_table(response: dict[str, Any], path: Path, delimiter: str) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, delimiter=delimiter)
        writer.writerow(CSV_COLUMNS)
        for row in response["results"]:
            writer.writerow(
                [
                    row["final_rank"],
                    row["canonical_url"],
                    row["title"],
                    "+".join(e["engine_id"] for e in row["engines"]),
                    row["hit_count"],
                    row["out_links"],
                    row["effective_weight"],
                    row["relevance_factor"],
                    row["telli_factor"],
                ]
            )


def _short_label(row: dict[str, Any], width: int = 40) -> str:
    label = row["title"] or row["canonical_url"]
    return label if len(label) <= width else label[: width - 3] + "..."


def _plot_score_breakdown(response: dict[str, Any], path: Path) -> None:
    rows = response["results"][:MAX_BARS]
    fig, ax = plt.subplots(figsize=(9, max(2.5, 0.45 * len(rows) + 1.2)))
    if rows:
        damping = _infer_damping(rows)
        labels = [f"{row['final_rank']}. {_short_label(row)}" for row in rows]
        trust = [row["effective_weight"] * damping for row in rows]
        relevance = [row["relevance_factor"] for row in rows]
        positions = range(len(rows))
        ax.barh(positions, trust, color="#4878cf", label="engine trust (weight x damping)")
        ax.barh(positions, relevance, left=trust, color="#e1812c", label="relevance (hits + links)")
        ax.set_yticks(list(positions))
        ax.set_yticklabels(labels, fontsize=8)
        ax.invert_yaxis()
        ax.legend(loc="lower right", fontsize=8)
    else:
        ax.text(0.5, 0.5, "no results", ha="center", va="center")
    ax.set_xlabel("telliFactor")
    ax.set_title(f"Score composition for {response['query']!r}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _infer_damping(rows: list[dict[str, Any]]) -> float:
    # The response stores the final score, not the damping constant; back it
    # out from the first row with a nonzero weight so the stack sums to t_F.
    for row in rows:
        if row["effective_weight"] > 0:
            return (row["telli_factor"] - row["relevance_factor"]) / row["effective_weight"]
    return 0.0


def _plot_engine_contribution(response: dict[str, Any], path: Path) -> None:
    engine_ids = [entry["engine_id"] for entry in response["engine_plan"]]
    total = {eid: 0 for eid in engine_ids}
    shared = {eid: 0 for eid in engine_ids}
    for row in response["results"]:
        contributors = [e["engine_id"] for e in row["engines"]]
        for eid in contributors:
            if eid in total:
                total[eid] += 1
                if len(contributors) > 1:
                    shared[eid] += 1

    fig, ax = plt.subplots(figsize=(7, 4))
    positions = range(len(engine_ids))
    sole = [total[eid] - shared[eid] for eid in engine_ids]
    ax.bar(positions, sole, color="#4878cf", label="sole source")
    ax.bar(positions, [shared[eid] for eid in engine_ids], bottom=sole,
           color="#e1812c", label="shared with another engine")
    ax.set_xticks(list(positions))
    ax.set_xticklabels(engine_ids)
    ax.set_ylabel("ranked results contributed")
    ax.set_title(f"Engine contributions for {response['query']!r}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
