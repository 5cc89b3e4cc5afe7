#!/usr/bin/env python3
"""
Manual benchmark run on a generated dataset with planted communities.
"""

import sys
import tempfile
from pathlib import Path

sys.path.append('.')

from app.core.logging import configure_logging, get_logger
from app.models.behavior import VectorKind
from app.services.behavior_service import get_similarity
from app.services.benchmark_service import BenchmarkService, max_modularity_report, parse_algorithm_codes
from app.services.fixture_service import get_fixture_service
from app.services.output_service import emit_outputs, format_max_modularity
from app.services.pipeline_service import get_pipeline_service, load_filter_config


def main(seed: int = 0):
    configure_logging()
    logger = get_logger()

    print("🧪 Like-mindedness benchmark on a synthetic dataset")
    print("=" * 50)

    work = Path(tempfile.mkdtemp(prefix="likeminded-"))

    # Step 1: generate
    print(f"\n1. 🎲 Generating ratings fixture (seed {seed})...")
    raw = work / "raw"
    get_fixture_service(seed=seed).write_ratings_dataset(raw)
    print(f"✅ Wrote {raw}")

    # Step 2: filter
    print("\n2. 🧹 Filtering...")
    config = load_filter_config(raw / "filter.env")
    dataset = get_pipeline_service(config).run(raw / "follows.tsv", work / "dataset", ratings_path=raw / "ratings.tsv")
    print(f"   👥 Users: {dataset.graph.node_count}")
    print(f"   🔗 Friendships: {dataset.graph.edge_count}")
    print(f"   🎬 Items: {len(dataset.columns)}")

    # Step 3: sweep
    print("\n3. 📈 Sweeping LMM, L, ML, GN, S, A, C...")
    sims = {kind: get_similarity(matrix, use_cache=False) for kind, matrix in dataset.vectors.items()}
    service = BenchmarkService(dataset.graph, sims[VectorKind.RATING], sims)
    result = service.sweep(parse_algorithm_codes(["LMM", "LMMS", "L", "ML", "GN", "S", "A", "C"]))
    for timing in result.timings:
        print(f"   ⏱️  {timing.algorithm:<5} {timing.seconds:.3f}s")

    # Step 4: write and report
    print("\n4. 💾 Writing results...")
    dendrograms = {run.spec.code: run.dendrogram for run in result.runs if run.dendrogram is not None}
    written = emit_outputs(result.series, None, work / "results", result.partitions, result.timings, dendrograms)
    print(f"✅ {len(written)} files in {work / 'results'}")
    print()
    print(format_max_modularity(max_modularity_report(result.series)))

    logger.info(f"Fixture benchmark finished in {work}")
    return True


if __name__ == "__main__":
    success = main(int(sys.argv[1]) if len(sys.argv) > 1 else 0)
    sys.exit(0 if success else 1)
