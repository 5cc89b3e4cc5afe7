"""
Benchmark harness: runs algorithms by code, sweeps hierarchies level by
level and collects modularity, like-mindedness and running time.

Codes: LMM, L, ML, GN, S, A, C. A trailing S selects interest vectors and a
trailing R rating vectors (LMMS, MLR, SS, AR, ...); no suffix uses the
default similarity table.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from app.core.config import settings
from app.core.errors import DataError, ModularityUndefinedError, PartitionMismatchError, UsageError
from app.core.logging import get_logger
from app.models.base import MaxModularityRow, MetricRow, MetricSeries, ModularityVariant, PartitionRecord, RunTiming
from app.models.behavior import SimMatrix, VectorKind
from app.models.dendrogram import Dendrogram
from app.models.graph import Graph, Partition
from app.services.hierarchical_service import Linkage, agglomerate, cut, lmm_agglomerate
from app.services.metrics_service import PartitionStats, like_mindedness, modularity
from app.services.structural_service import girvan_newman, louvain, modified_louvain

logger = get_logger()

_FAMILIES = {
    "LMM": "lmm",
    "L": "louvain",
    "ML": "modified_louvain",
    "GN": "girvan_newman",
    "S": Linkage.SINGLE.value,
    "A": Linkage.AVERAGE.value,
    "C": Linkage.COMPLETE.value,
}
_SUFFIXES = {"S": VectorKind.INTEREST, "R": VectorKind.RATING}
_STRUCTURE_ONLY = {"L", "GN"}
_HIERARCHICAL = {"lmm", "girvan_newman", "single", "average", "complete"}


@dataclass(frozen=True)
class AlgorithmSpec:
    code: str
    family: str
    vector_kind: Optional[VectorKind] = None

    @property
    def hierarchical(self) -> bool:
        return self.family in _HIERARCHICAL


def parse_algorithm_code(code: str) -> AlgorithmSpec:
    """Map a code such as LMMS or AR to its algorithm family and vector kind."""
    code = code.strip().upper()
    if code in _FAMILIES:
        return AlgorithmSpec(code, _FAMILIES[code])
    base, suffix = code[:-1], code[-1:]
    if base in _FAMILIES and base not in _STRUCTURE_ONLY and suffix in _SUFFIXES:
        return AlgorithmSpec(code, _FAMILIES[base], _SUFFIXES[suffix])
    raise UsageError(f"Unknown algorithm code: {code!r}")


def parse_algorithm_codes(codes: Sequence[str]) -> List[AlgorithmSpec]:
    specs = [parse_algorithm_code(code) for raw in codes for code in raw.split(",") if code.strip()]
    seen = set()
    for spec in specs:
        if spec.code in seen:
            raise UsageError(f"Algorithm code {spec.code} requested twice")
        seen.add(spec.code)
    if not specs:
        raise UsageError("No algorithm codes given")
    return specs


@dataclass
class AlgorithmRun:
    spec: AlgorithmSpec
    rows: List[MetricRow]
    partition: Partition
    partition_k: int
    seconds: float
    dendrogram: Optional[Dendrogram] = None
    extras: Dict[str, float] = field(default_factory=dict)


@dataclass
class SweepResult:
    series: MetricSeries
    partitions: List[PartitionRecord]
    timings: List[RunTiming]
    runs: List[AlgorithmRun]


class _LevelTracker:
    """Modularity (both variants) and like-mindedness kept current while a
    hierarchy is replayed one merge at a time from singletons."""

    def __init__(self, g: Graph, s: SimMatrix):
        self.stats = PartitionStats.from_graph(g, range(g.node_count))
        self.values = s.values
        self.q = {
            variant: sum(self.stats.community_term(c, variant) for c in range(g.node_count))
            for variant in ("newman", "paper_literal")
        }
        self.intra_sum = 0.0
        self.intra_pairs = 0

    @property
    def like_mindedness(self) -> float:
        return self.intra_sum / self.intra_pairs if self.intra_pairs else 0.0

    def merge(self, a: int, b: int) -> None:
        members = self.stats.members
        a_nodes = np.fromiter(members[a], dtype=np.int64)
        b_nodes = np.fromiter(members[b], dtype=np.int64)
        self.intra_sum += float(self.values[np.ix_(a_nodes, b_nodes)].sum())
        self.intra_pairs += a_nodes.size * b_nodes.size

        for variant in self.q:
            self.q[variant] -= self.stats.community_term(a, variant) + self.stats.community_term(b, variant)
        kept, removed = min(a, b), max(a, b)
        self.stats.merge(kept, removed)
        for variant in self.q:
            self.q[variant] += self.stats.community_term(kept, variant)

    def row(self, code: str, k: int) -> MetricRow:
        return MetricRow(
            algorithm=code,
            k=k,
            modularity_newman=self.q["newman"],
            modularity_literal=self.q["paper_literal"],
            like_mindedness=self.like_mindedness,
        )


def hierarchy_rows(code: str, g: Graph, s: SimMatrix, dendrogram: Dendrogram) -> List[MetricRow]:
    """One row per level, k = leaf_count down to min_k."""
    tracker = _LevelTracker(g, s)
    k = dendrogram.leaf_count
    rows = [tracker.row(code, k)]
    for step in dendrogram.merge_steps:
        a = tracker.stats.assignment[step.a_id]
        b = tracker.stats.assignment[step.b_id]
        tracker.merge(a, b)
        k -= 1
        rows.append(tracker.row(code, k))
    return rows


def _terminal_row(code: str, g: Graph, s: SimMatrix, partition: Partition) -> MetricRow:
    return MetricRow(
        algorithm=code,
        k=partition.community_count,
        modularity_newman=modularity(g, partition, "newman"),
        modularity_literal=modularity(g, partition, "paper_literal"),
        like_mindedness=like_mindedness(s, partition),
    )


class BenchmarkService:
    """Runs a list of algorithm codes over one graph and its similarity tables."""

    def __init__(
        self,
        g: Graph,
        s: SimMatrix,
        extra_sims: Optional[Mapping[VectorKind, SimMatrix]] = None,
        variant: Optional[ModularityVariant] = None,
        workers: Optional[int] = None,
    ):
        self.graph = g
        self.sim = s
        self.extra_sims = dict(extra_sims or {})
        self.variant = variant or settings.MODULARITY_VARIANT
        self.workers = workers or settings.SWEEP_WORKERS

    def similarity_for(self, spec: AlgorithmSpec) -> SimMatrix:
        if spec.vector_kind is None or spec.vector_kind == self.sim.kind:
            sim = self.sim
        elif spec.vector_kind in self.extra_sims:
            sim = self.extra_sims[spec.vector_kind]
        else:
            raise DataError(f"{spec.code} needs {spec.vector_kind.value} vectors, which were not supplied")
        if sim.size != self.graph.node_count:
            raise PartitionMismatchError(
                f"{spec.code}: similarity table has {sim.size} nodes, graph has {self.graph.node_count}"
            )
        return sim

    def _best_level(self, rows: List[MetricRow]) -> int:
        """k of the highest-modularity level under the configured variant; larger k on ties."""
        key = "modularity_newman" if self.variant == "newman" else "modularity_literal"
        return max(rows, key=lambda row: (getattr(row, key), row.k)).k

    def run_one(self, spec: AlgorithmSpec) -> AlgorithmRun:
        g = self.graph
        s = self.similarity_for(spec)
        with logger.span("run {algorithm}", algorithm=spec.code, node_count=g.node_count):
            start = time.perf_counter()
            extras: Dict[str, float] = {}
            dendrogram = None
            if spec.family == "louvain":
                result = louvain(g, self.variant)
                partition = result.partition
            elif spec.family == "modified_louvain":
                result = modified_louvain(g, s, self.variant)
                partition = result.partition
                extras = {
                    "modularity_augmented": result.modularity_augmented,
                    "injected_edges": float(result.injected_edges),
                }
            elif spec.family == "girvan_newman":
                if g.node_count > settings.GN_NODE_WARNING:
                    logger.warning(
                        f"Girvan-Newman on {g.node_count} nodes (above {settings.GN_NODE_WARNING}) will be very slow"
                    )
                dendrogram = girvan_newman(g)
            elif spec.family == "lmm":
                dendrogram = lmm_agglomerate(s)
            else:
                dendrogram = agglomerate(s, Linkage(spec.family))
            seconds = time.perf_counter() - start

            if dendrogram is not None:
                rows = hierarchy_rows(spec.code, g, s, dendrogram)
                best_k = self._best_level(rows)
                partition = cut(dendrogram, best_k)
            else:
                rows = [_terminal_row(spec.code, g, s, partition)]
                best_k = partition.community_count

        logger.info(f"{spec.code}: {len(rows)} rows in {seconds:.3f}s")
        return AlgorithmRun(spec, rows, partition, best_k, seconds, dendrogram, extras)

    def sweep(self, specs: Sequence[AlgorithmSpec]) -> SweepResult:
        if self.graph.edge_count == 0:
            raise ModularityUndefinedError("Cannot sweep a graph without edges")
        for spec in specs:
            self.similarity_for(spec)

        if self.workers > 1 and len(specs) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                runs = list(pool.map(self.run_one, specs))
        else:
            runs = [self.run_one(spec) for spec in specs]

        labels = self.graph.labels
        return SweepResult(
            series=MetricSeries(rows=[row for run in runs for row in run.rows]),
            partitions=[
                PartitionRecord(
                    algorithm=run.spec.code,
                    k=run.partition_k,
                    communities=run.partition.communities_by_label(labels),
                )
                for run in runs
            ],
            timings=[RunTiming(algorithm=run.spec.code, node_count=self.graph.node_count, seconds=run.seconds) for run in runs],
            runs=runs,
        )


def sweep(
    g: Graph,
    s: SimMatrix,
    algorithms: Sequence[str],
    extra_sims: Optional[Mapping[VectorKind, SimMatrix]] = None,
) -> MetricSeries:
    """Metric rows for every requested code, in request order and k descending."""
    return BenchmarkService(g, s, extra_sims).sweep(parse_algorithm_codes(algorithms)).series


def max_modularity_report(series: MetricSeries) -> List[MaxModularityRow]:
    """Highest modularity per algorithm under both variants, with the k it was reached at."""
    if not series.rows:
        raise DataError("Cannot report on an empty metric series")
    report = []
    for algorithm in series.algorithms():
        rows = series.rows_for(algorithm)
        best_newman = max(rows, key=lambda row: row.modularity_newman)
        best_literal = max(rows, key=lambda row: row.modularity_literal)
        report.append(
            MaxModularityRow(
                algorithm=algorithm,
                max_modularity_newman=best_newman.modularity_newman,
                k_newman=best_newman.k,
                max_modularity_literal=best_literal.modularity_literal,
                k_literal=best_literal.k,
            )
        )
    return report


def get_benchmark_service(
    g: Graph,
    s: SimMatrix,
    extra_sims: Optional[Mapping[VectorKind, SimMatrix]] = None,
) -> BenchmarkService:
    """Get a configured benchmark service instance."""
    return BenchmarkService(g, s, extra_sims)
