from pathlib import Path

from app.core.logging import get_logger
from app.services.benchmark_service import max_modularity_report
from app.services.output_service import format_max_modularity, read_metrics_csv

logger = get_logger()


def register(subparsers) -> None:
    parser = subparsers.add_parser("report", help="Highest modularity per algorithm and running times")
    parser.add_argument("--metrics", required=True, help="metrics.csv written by sweep")
    parser.add_argument("--timings", default=None, help="timings.csv (default: next to metrics.csv)")
    parser.set_defaults(handler=run)


def run(args) -> int:
    metrics_path = Path(args.metrics)
    series = read_metrics_csv(metrics_path)
    print(format_max_modularity(max_modularity_report(series)), end="")

    timings_path = Path(args.timings) if args.timings else metrics_path.parent / "timings.csv"
    if timings_path.exists():
        print()
        print(timings_path.read_text(encoding="utf-8"), end="")
    return 0
