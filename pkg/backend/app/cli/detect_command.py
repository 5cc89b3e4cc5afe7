from pathlib import Path

from app.cli.common import add_dataset_argument, add_variant_argument, load_dataset
from app.core.errors import UsageError
from app.core.logging import get_logger
from app.models.base import PartitionRecord
from app.services.benchmark_service import BenchmarkService, parse_algorithm_code
from app.services.hierarchical_service import cut
from app.services.metrics_service import like_mindedness, modularity
from app.services.output_service import write_dendrograms, write_partitions

logger = get_logger()

_LINKAGE_CODES = {"single": "S", "average": "A", "complete": "C"}


def register(subparsers) -> None:
    parser = subparsers.add_parser("detect", help="Run one algorithm and write its partition")
    add_dataset_argument(parser)
    add_variant_argument(parser)
    choice = parser.add_mutually_exclusive_group(required=True)
    choice.add_argument("--algorithm", help="Algorithm code, e.g. L, MLS, LMMR, GN")
    choice.add_argument("--linkage", choices=sorted(_LINKAGE_CODES), help="Linkage clustering on the --vectors kind")
    parser.add_argument("--k", type=int, default=None, help="Community count to cut a hierarchy at")
    parser.add_argument("--out", default=None, help="Directory for partitions/<code>.json and dendrograms/<code>.txt")
    parser.set_defaults(handler=run)


def run(args) -> int:
    code = args.algorithm if args.algorithm else _LINKAGE_CODES[args.linkage]
    spec = parse_algorithm_code(code)
    dataset = load_dataset(args.dataset)
    sims = dataset.similarities(False if args.no_cache else None)
    service = BenchmarkService(dataset.graph, sims[dataset.default_kind(args.vectors)], sims, args.modularity_variant)

    result = service.run_one(spec)
    partition = result.partition
    if args.k is not None:
        if result.dendrogram is None:
            raise UsageError(f"{spec.code} is not hierarchical; --k does not apply")
        partition = cut(result.dendrogram, args.k)

    sim = service.similarity_for(spec)
    print(f"algorithm          {spec.code}")
    print(f"communities        {partition.community_count}")
    print(f"modularity newman  {modularity(dataset.graph, partition, 'newman'):.6f}")
    print(f"modularity literal {modularity(dataset.graph, partition, 'paper_literal'):.6f}")
    print(f"like-mindedness    {like_mindedness(sim, partition):.6f}")
    for name, value in result.extras.items():
        print(f"{name:<18} {value:g}")
    print(f"seconds            {result.seconds:.3f}")

    if args.out:
        record = PartitionRecord(
            algorithm=spec.code,
            k=partition.community_count,
            communities=partition.communities_by_label(dataset.graph.labels),
        )
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_partitions([record], out)
        if result.dendrogram is not None:
            write_dendrograms({spec.code: result.dendrogram}, out)
    return 0
