"""
Result files: metrics.csv, stats tables, partitions, timings, dendrograms
of hierarchical runs and the per-metric SVG line plots.
"""

import csv
import json
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from app.core.errors import ParseError
from app.core.logging import get_logger
from app.models.base import MaxModularityRow, MetricRow, MetricSeries, NetworkStats, PartitionRecord, RunTiming
from app.models.dendrogram import Dendrogram

logger = get_logger()

METRICS_HEADER = ["algorithm", "k", "modularity_newman", "modularity_literal", "like_mindedness"]
PLOTTED_METRICS = {
    "modularity_newman": "modularity (Newman)",
    "modularity_literal": "modularity (literal)",
    "like_mindedness": "like-mindedness",
}
MARKERS = ["o", "s", "^", "x", "D", "v", "P", "*"]


def write_metrics_csv(series: MetricSeries, path: Union[str, Path]) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(METRICS_HEADER)
        for row in series.rows:
            # repr is the shortest string that parses back to the same float
            writer.writerow(
                [row.algorithm, row.k, repr(row.modularity_newman), repr(row.modularity_literal), repr(row.like_mindedness)]
            )
    return path


def read_metrics_csv(path: Union[str, Path]) -> MetricSeries:
    path = Path(path)
    try:
        handle = path.open(encoding="utf-8", newline="")
    except OSError as e:
        raise ParseError(f"cannot read metrics: {e}", str(path)) from e
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != METRICS_HEADER:
            raise ParseError(f"unexpected header {header}", str(path), 1)
        rows = []
        for line_number, fields in enumerate(reader, start=2):
            if len(fields) != len(METRICS_HEADER):
                raise ParseError(f"expected {len(METRICS_HEADER)} columns", str(path), line_number)
            try:
                rows.append(
                    MetricRow(
                        algorithm=fields[0],
                        k=int(fields[1]),
                        modularity_newman=float(fields[2]),
                        modularity_literal=float(fields[3]),
                        like_mindedness=float(fields[4]),
                    )
                )
            except ValueError as e:
                raise ParseError(str(e), str(path), line_number) from e
    try:
        return MetricSeries(rows=rows)
    except ValueError as e:
        raise ParseError(str(e), str(path)) from e


def format_stats_table(stats: NetworkStats) -> str:
    rows = stats.table_rows()
    width = max(len(name) for name, _ in rows)
    return "".join(f"{name.ljust(width)}  {value}\n" for name, value in rows)


def write_stats(stats: NetworkStats, out_dir: Union[str, Path]) -> List[Path]:
    out = Path(out_dir)
    text_path = out / "stats.txt"
    text_path.write_text(format_stats_table(stats), encoding="utf-8")
    json_path = out / "stats.json"
    json_path.write_text(stats.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return [text_path, json_path]


def write_degree_histogram(histogram: Dict[int, int], path: Union[str, Path]) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["degree", "node_count"])
        writer.writerows(sorted(histogram.items()))
    return path


def write_partitions(records: Iterable[PartitionRecord], out_dir: Union[str, Path]) -> List[Path]:
    directory = Path(out_dir) / "partitions"
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for record in records:
        path = directory / f"{record.algorithm}.json"
        path.write_text(json.dumps(record.model_dump(), indent=2) + "\n", encoding="utf-8")
        written.append(path)
    return written


def write_timings(timings: Sequence[RunTiming], path: Union[str, Path]) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["algorithm", "node_count", "seconds"])
        for timing in timings:
            writer.writerow([timing.algorithm, timing.node_count, f"{timing.seconds:.6f}"])
    return path


def format_max_modularity(report: Sequence[MaxModularityRow]) -> str:
    lines = [f"{'algorithm':<10} {'Q newman':>10} {'k':>6} {'Q literal':>10} {'k':>6}"]
    for row in report:
        lines.append(
            f"{row.algorithm:<10} {row.max_modularity_newman:>10.3f} {row.k_newman:>6} "
            f"{row.max_modularity_literal:>10.3f} {row.k_literal:>6}"
        )
    return "\n".join(lines) + "\n"


def save_metric_plot(series: MetricSeries, metric: str, path: Union[str, Path]) -> Path:
    """Plot one metric against k, one marked line per algorithm.

    A single-row series (Louvain, Modified Louvain) shows as a lone marker.
    Each line is wrapped in an SVG group with id `series-<code>`.
    """
    path = Path(path)
    with plt.rc_context({"svg.fonttype": "none", "svg.hashsalt": "likeminded-bench"}):
        fig, ax = plt.subplots(figsize=(8, 5))
        for index, algorithm in enumerate(series.algorithms()):
            rows = series.rows_for(algorithm)
            (line,) = ax.plot(
                [row.k for row in rows],
                [getattr(row, metric) for row in rows],
                marker=MARKERS[index % len(MARKERS)],
                markersize=4,
                markevery=max(1, len(rows) // 25),
                linewidth=1.5,
                label=algorithm,
            )
            line.set_gid(f"series-{algorithm}")
        ax.set_xlabel("number of communities |C|")
        ax.set_ylabel(PLOTTED_METRICS[metric])
        ax.set_title(PLOTTED_METRICS[metric])
        ax.grid(linestyle="--", alpha=0.4)
        if series.rows:
            ax.legend()
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path


def write_dendrograms(dendrograms: Mapping[str, Dendrogram], out_dir: Union[str, Path]) -> List[Path]:
    directory = Path(out_dir) / "dendrograms"
    written = []
    for code, dendrogram in dendrograms.items():
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{code}.txt"
        dendrogram.write(path)
        written.append(path)
    return written


def emit_outputs(
    series: MetricSeries,
    stats: Optional[NetworkStats],
    out_dir: Union[str, Path],
    partitions: Sequence[PartitionRecord] = (),
    timings: Sequence[RunTiming] = (),
    dendrograms: Optional[Mapping[str, Dendrogram]] = None,
) -> List[Path]:
    """Write every sweep artifact into `out_dir` and return the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [write_metrics_csv(series, out / "metrics.csv")]
    if stats is not None:
        written.extend(write_stats(stats, out))
    written.extend(write_partitions(partitions, out))
    written.extend(write_dendrograms(dendrograms or {}, out))
    if timings:
        written.append(write_timings(timings, out / "timings.csv"))
    for metric in PLOTTED_METRICS:
        written.append(save_metric_plot(series, metric, out / f"{metric}.svg"))
    logger.info(f"Wrote {len(written)} output files to {out}")
    return written
