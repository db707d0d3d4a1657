"""Verification report output for the CLI: delimited log, JSON, and an
optional obligation-timing figure rendered next to them."""

from __future__ import annotations

import json
from pathlib import Path

from .verifier import VerificationReport


def write_report(report: VerificationReport, out_dir: str | Path,
                 figure: bool = True) -> list[Path]:
    """Write report.log (one `<id> <status> <millis>` line per obligation),
    report.json, and, when requested and obligations exist, timings.png."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    log_path = out_dir / "report.log"
    log_path.write_text(report.text_log())
    written.append(log_path)
    json_path = out_dir / "report.json"
    json_path.write_text(json.dumps(report.to_dict(), indent=1) + "\n")
    written.append(json_path)
    if figure and report.obligations:
        written.append(_timing_figure(report, out_dir / "timings.png"))
    return written


def _timing_figure(report: VerificationReport, path: Path) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ids = list(report.obligations)
    millis = [report.obligations[i].wall_millis for i in ids]
    statuses = [report.obligations[i].status.value for i in ids]
    colors = {
        "verified": "#2a9d3a",
        "countersatisfiable": "#d08700",
        "gaveup": "#c02f1d",
    }
    fig, ax = plt.subplots(figsize=(max(4, len(ids) * 0.35), 3.2))
    ax.bar(
        range(len(ids)),
        millis,
        color=[colors.get(s, "#888888") for s in statuses],
    )
    ax.set_xlabel("obligation")
    ax.set_ylabel("check time [ms]")
    ax.set_title(f"{report.article}: {len(ids)} obligations")
    if len(ids) <= 30:
        ax.set_xticks(range(len(ids)))
        ax.set_xticklabels(ids, rotation=90, fontsize=6)
    else:
        ax.set_xticks([])
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
