"""Render an event log to files: a delimited event table plus figures.

The log is the JSON-lines file written by `caio run --log`; the report
summarizes it as events.csv, an emotion-intensity timeline and the last
appraisal profile, all written into one output directory.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

SEC_FIELDS = (
    "novelty",
    "pleasantness",
    "goal_congruence",
    "coping_potential",
    "norm_compatibility",
)


def load_event_log(path: Path) -> list[dict]:
    events = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line:
            events.append(json.loads(line))
    return events


def write_events_csv(events: list[dict], path: Path) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tick", "kind", "payload"])
        for event in events:
            writer.writerow(
                [event["tick"], event["kind"], json.dumps(event["payload"], sort_keys=True, ensure_ascii=False)]
            )
    return path


def plot_emotion_timeline(events: list[dict], path: Path) -> Path:
    by_category: dict[str, list[tuple[int, float]]] = {}
    expressed: list[tuple[int, str]] = []
    for event in events:
        if event["kind"] == "emotion_triggered":
            payload = event["payload"]
            by_category.setdefault(payload["category"], []).append(
                (event["tick"], payload["intensity"])
            )
        elif event["kind"] == "utterance_out":
            expressed.append((event["tick"], event["payload"]["definition"]))
    fig, ax = plt.subplots(figsize=(8, 4))
    for category in sorted(by_category):
        points = by_category[category]
        ax.plot(
            [t for t, _ in points],
            [v for _, v in points],
            marker="o",
            linestyle="-",
            label=category,
        )
    for tick, name in expressed:
        ax.axvline(tick, color="grey", alpha=0.3, linestyle="--")
        ax.annotate(name, (tick, 1.02), fontsize=7, rotation=45, annotation_clip=False)
    ax.set_xlabel("tick")
    ax.set_ylabel("intensity")
    ax.set_ylim(0, 1.1)
    ax.set_title("Triggered emotions (dashed: acts uttered)")
    if by_category:
        ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_last_sec_profile(events: list[dict], path: Path) -> Path:
    profile = None
    for event in events:
        if event["kind"] == "sec_profile":
            profile = event["payload"]
    fig, ax = plt.subplots(figsize=(7, 3.5))
    if profile is not None:
        values = [profile[f] for f in SEC_FIELDS]
        colors = ["#c0392b" if v < -0.3 else "#27ae60" if v > 0.3 else "#7f8c8d" for v in values]
        ax.bar(range(len(SEC_FIELDS)), values, color=colors)
        ax.set_xticks(range(len(SEC_FIELDS)))
        ax.set_xticklabels(SEC_FIELDS, rotation=20, fontsize=8)
        ax.axhline(0, color="black", linewidth=0.8)
        ax.set_ylim(-1.05, 1.05)
    ax.set_title("Last appraisal profile")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_report(log_path: Path, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    events = load_event_log(log_path)
    return [
        write_events_csv(events, out_dir / "events.csv"),
        plot_emotion_timeline(events, out_dir / "emotions.png"),
        plot_last_sec_profile(events, out_dir / "sec_profile.png"),
    ]
