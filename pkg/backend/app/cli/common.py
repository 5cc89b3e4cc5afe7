"""Shared argument handling and dataset loading for the subcommands."""

import argparse
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional

from app.core.errors import DataError, UsageError
from app.core.logging import get_logger
from app.models.behavior import BehavioralMatrix, SimMatrix, VectorKind
from app.models.graph import Graph
from app.services.behavior_service import get_similarity, load_behavioral_matrix
from app.services.graph_service import read_edge_list, read_node_list

logger = get_logger()

VECTOR_KINDS = [kind.value for kind in VectorKind]
DEFAULT_KIND_ORDER = (VectorKind.RATING, VectorKind.CELEBRITY, VectorKind.INTEREST)


class BenchArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting."""

    def error(self, message: str):
        raise UsageError(message)


@dataclass
class Dataset:
    graph: Graph
    vectors: Dict[VectorKind, BehavioralMatrix] = field(default_factory=dict)

    def default_kind(self, requested: Optional[str] = None) -> VectorKind:
        if requested is not None:
            kind = VectorKind(requested)
            if kind not in self.vectors:
                raise DataError(f"No {kind.value} vectors in this dataset")
            return kind
        for kind in DEFAULT_KIND_ORDER:
            if kind in self.vectors:
                return kind
        raise DataError("Dataset has no behavioral vectors")

    def similarities(self, use_cache: Optional[bool] = None) -> Dict[VectorKind, SimMatrix]:
        sims = {}
        for kind, matrix in self.vectors.items():
            if matrix.node_count != self.graph.node_count:
                raise DataError(
                    f"{kind.value} vectors cover {matrix.node_count} users, graph has {self.graph.node_count}"
                )
            sims[kind] = get_similarity(matrix, use_cache)
        return sims


def load_graph(edges_path: Path, nodes_path: Optional[Path] = None) -> Graph:
    labels = read_node_list(nodes_path) if nodes_path is not None and nodes_path.exists() else None
    return read_edge_list(edges_path, node_labels=labels)


def load_dataset(directory: str) -> Dataset:
    """A filtered dataset directory: edges.txt, nodes.txt and vectors-<kind>.npz files."""
    root = Path(directory)
    edges_path = root / "edges.txt"
    if not edges_path.exists():
        raise UsageError(f"{root} has no edges.txt; run the filter command first")
    graph = load_graph(edges_path, root / "nodes.txt")
    vectors = {}
    for kind in VectorKind:
        path = root / f"vectors-{kind.value}.npz"
        if path.exists():
            vectors[kind] = load_behavioral_matrix(path)
    logger.info(f"Loaded dataset {root}: {graph.node_count} nodes, vectors {[k.value for k in vectors]}")
    return Dataset(graph, vectors)


def add_dataset_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dataset", required=True, help="Filtered dataset directory")
    parser.add_argument(
        "--vectors",
        choices=VECTOR_KINDS,
        default=None,
        help="Vector kind for codes without an S/R suffix (default: rating, then celebrity, then interest)",
    )
    parser.add_argument("--no-cache", action="store_true", help="Skip the similarity cache")


def add_variant_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--modularity-variant",
        choices=["newman", "paper_literal"],
        default=None,
        help="Modularity definition optimized by Louvain-type runs",
    )
