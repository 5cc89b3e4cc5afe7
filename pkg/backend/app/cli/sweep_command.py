from pathlib import Path

from app.cli.common import add_dataset_argument, add_variant_argument, load_dataset
from app.core.config import settings
from app.core.logging import get_logger
from app.services.benchmark_service import BenchmarkService, parse_algorithm_codes
from app.services.metrics_service import network_stats
from app.services.output_service import emit_outputs

logger = get_logger()


def register(subparsers) -> None:
    parser = subparsers.add_parser("sweep", help="Sweep algorithms over all community counts and write results")
    add_dataset_argument(parser)
    add_variant_argument(parser)
    parser.add_argument(
        "--algorithms",
        required=True,
        nargs="+",
        help="Algorithm codes, comma or space separated (LMM L ML GN S A C, with S/R suffixes)",
    )
    parser.add_argument("--workers", type=int, default=None, help="Parallel algorithm runs")
    parser.add_argument("--out", default=None, help="Output directory (default: OUTPUT_PATH)")
    parser.set_defaults(handler=run)


def run(args) -> int:
    specs = parse_algorithm_codes(args.algorithms)
    dataset = load_dataset(args.dataset)
    sims = dataset.similarities(False if args.no_cache else None)
    default_sim = sims[dataset.default_kind(args.vectors)]

    service = BenchmarkService(dataset.graph, default_sim, sims, args.modularity_variant, args.workers)
    result = service.sweep(specs)

    out = Path(args.out or settings.OUTPUT_PATH)
    written = emit_outputs(
        result.series,
        network_stats(dataset.graph, default_sim),
        out,
        partitions=result.partitions,
        timings=result.timings,
        dendrograms={run.spec.code: run.dendrogram for run in result.runs if run.dendrogram is not None},
    )
    print(f"{len(result.series.rows)} metric rows for {len(specs)} algorithms; {len(written)} files in {out}")
    return 0
