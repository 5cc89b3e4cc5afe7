from app.cli.common import load_dataset
from app.core.logging import get_logger
from app.models.behavior import VectorKind
from app.services.behavior_service import matrix_cosine

logger = get_logger()


def register(subparsers) -> None:
    parser = subparsers.add_parser("vectors", help="Summarize behavioral vectors and build similarity tables")
    parser.add_argument("--dataset", required=True, help="Filtered dataset directory")
    parser.add_argument("--no-cache", action="store_true", help="Skip the similarity cache")
    parser.set_defaults(handler=run)


def run(args) -> int:
    dataset = load_dataset(args.dataset)
    sims = dataset.similarities(False if args.no_cache else None)
    for kind, matrix in sorted(dataset.vectors.items(), key=lambda item: item[0].value):
        density = matrix.vectors.nnz / max(1, matrix.node_count * matrix.dimension)
        upper = sims[kind].upper()
        mean_sim = float(upper.mean()) if upper.size else 0.0
        print(f"{kind.value}: {matrix.node_count} x {matrix.dimension}, density {density:.4f}, mean similarity {mean_sim:.4f}")

    if VectorKind.RATING in sims and VectorKind.INTEREST in sims:
        cosine = matrix_cosine(sims[VectorKind.RATING], sims[VectorKind.INTEREST])
        print(f"rating vs interest similarity cosine: {cosine:.4f}")
    return 0
