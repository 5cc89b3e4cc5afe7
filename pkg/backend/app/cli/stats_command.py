from pathlib import Path

from app.cli.common import load_dataset, load_graph
from app.core.logging import get_logger
from app.services.metrics_service import degree_histogram, network_stats
from app.services.output_service import format_stats_table, write_degree_histogram, write_stats

logger = get_logger()


def register(subparsers) -> None:
    parser = subparsers.add_parser("stats", help="Network statistics table for a graph or dataset")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--graph", help="Edge list file (isolated nodes need --nodes)")
    source.add_argument("--dataset", help="Filtered dataset directory")
    parser.add_argument("--nodes", help="Node list file to go with --graph")
    parser.add_argument("--vectors", choices=["rating", "interest", "celebrity"], default=None)
    parser.add_argument("--no-cache", action="store_true", help="Skip the similarity cache")
    parser.add_argument("--out", default=None, help="Directory for stats.txt, stats.json, degree_histogram.csv")
    parser.set_defaults(handler=run)


def run(args) -> int:
    sim = None
    if args.dataset:
        dataset = load_dataset(args.dataset)
        graph = dataset.graph
        if dataset.vectors:
            kind = dataset.default_kind(args.vectors)
            sim = dataset.similarities(False if args.no_cache else None)[kind]
    else:
        graph = load_graph(Path(args.graph), Path(args.nodes) if args.nodes else None)

    stats = network_stats(graph, sim)
    print(format_stats_table(stats), end="")

    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_stats(stats, out)
        write_degree_histogram(degree_histogram(graph), out / "degree_histogram.csv")
        logger.info(f"Wrote statistics to {out}")
    return 0
