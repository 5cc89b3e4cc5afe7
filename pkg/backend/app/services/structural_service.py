"""
Structure-driven community detection: Girvan-Newman edge removal, Louvain
local moving, and Modified Louvain, which grows a working copy of the graph
with edges between highly similar users while it moves nodes.
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from app.core.config import settings
from app.core.errors import ModularityUndefinedError, PartitionMismatchError
from app.core.logging import get_logger
from app.models.base import ModularityVariant
from app.models.behavior import SimMatrix
from app.models.dendrogram import Dendrogram, MergeStep
from app.models.graph import Graph, Partition
from app.services.graph_service import connected_components
from app.services.metrics_service import PartitionStats, modularity

logger = get_logger()

Edge = Tuple[int, int]

# gains closer than this are treated as equal
GAIN_EPSILON = 1e-12
BETWEENNESS_TOLERANCE = 1e-9


def _accumulate_betweenness(
    adjacency: Sequence[Iterable[int]], sources: Iterable[int], scores: Dict[Edge, float]
) -> None:
    """Brandes dependency accumulation, one BFS per source; adds ordered-pair counts to `scores`."""
    for source in sources:
        stack: List[int] = []
        predecessors: Dict[int, List[int]] = {source: []}
        sigma: Dict[int, int] = {source: 1}
        distance: Dict[int, int] = {source: 0}
        queue = deque([source])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in adjacency[v]:
                if w not in distance:
                    distance[w] = distance[v] + 1
                    sigma[w] = 0
                    predecessors[w] = []
                    queue.append(w)
                if distance[w] == distance[v] + 1:
                    sigma[w] += sigma[v]
                    predecessors[w].append(v)

        dependency: Dict[int, float] = dict.fromkeys(stack, 0.0)
        while stack:
            w = stack.pop()
            for v in predecessors[w]:
                contribution = sigma[v] / sigma[w] * (1.0 + dependency[w])
                edge = (v, w) if v < w else (w, v)
                scores[edge] += contribution
                dependency[v] += contribution


def _betweenness(adjacency: Sequence[Iterable[int]], nodes: Iterable[int]) -> Dict[Edge, float]:
    nodes = list(nodes)
    scores: Dict[Edge, float] = {}
    for u in nodes:
        for v in adjacency[u]:
            if u < v:
                scores[(u, v)] = 0.0
    _accumulate_betweenness(adjacency, nodes, scores)
    # every unordered pair was counted from both ends
    return {edge: score / 2.0 for edge, score in scores.items()}


def edge_betweenness(g: Graph) -> Dict[Edge, float]:
    """Shortest-path betweenness of every edge, each unordered node pair counted once."""
    return _betweenness([g.adjacency(v) for v in range(g.node_count)], range(g.node_count))


@dataclass(frozen=True)
class EdgeRemoval:
    edge: Edge
    betweenness: float
    component_count: int


class GirvanNewman:
    """Divisive clustering by repeatedly cutting the highest-betweenness edge.

    Betweenness is recomputed only inside the component that lost the edge.
    Each time a component splits, the split is recorded; read bottom-up, the
    splits form a Dendrogram whose levels are the component counts seen.
    """

    def __init__(self, g: Graph):
        self.graph = g
        self.adjacency: List[Set[int]] = [set(g.adjacency(v)) for v in range(g.node_count)]
        self.removals: List[EdgeRemoval] = []
        self.initial_components = connected_components(g).community_count

    def _component(self, start: int) -> List[int]:
        seen = {start}
        queue = deque([start])
        while queue:
            node = queue.popleft()
            for nbr in self.adjacency[node]:
                if nbr not in seen:
                    seen.add(nbr)
                    queue.append(nbr)
        return sorted(seen)

    @staticmethod
    def _pick(scores: Dict[Edge, float]) -> Tuple[Edge, float]:
        top = max(scores.values())
        edge = min(e for e, score in scores.items() if score >= top - BETWEENNESS_TOLERANCE)
        return edge, scores[edge]

    def run(self) -> Dendrogram:
        n = self.graph.node_count
        scores = _betweenness(self.adjacency, range(n))
        component_count = self.initial_components
        splits: List[MergeStep] = []

        while scores:
            (u, v), score = self._pick(scores)
            self.adjacency[u].discard(v)
            self.adjacency[v].discard(u)

            side_u = self._component(u)
            if v in side_u:
                affected = [side_u]
            else:
                side_v = self._component(v)
                affected = [side_u, side_v]
                component_count += 1
                low, high = sorted((side_u[0], side_v[0]))
                splits.append(MergeStep(low, high, low, score))

            self.removals.append(EdgeRemoval((u, v), score, component_count))

            touched = {node for part in affected for node in part}
            scores = {edge: s for edge, s in scores.items() if edge[0] not in touched}
            for part in affected:
                scores.update(_betweenness(self.adjacency, part))

        logger.info(
            f"Girvan-Newman removed {len(self.removals)} edges, "
            f"{len(splits)} splits from {self.initial_components} components"
        )
        return Dendrogram(n, tuple(reversed(splits)))


def girvan_newman(g: Graph) -> Dendrogram:
    return GirvanNewman(g).run()


@dataclass
class LouvainResult:
    partition: Partition
    modularity: float
    trace: List[float] = field(default_factory=list)
    moves: int = 0
    levels: int = 1


@dataclass
class ModifiedLouvainResult:
    partition: Partition
    modularity: float
    modularity_augmented: float
    injected_edges: int
    like_mindedness: float
    trace: List[float] = field(default_factory=list)
    injection_trace: List[int] = field(default_factory=list)
    moves: int = 0


def _best_move(stats: PartitionStats, node: int, variant: ModularityVariant) -> Optional[Tuple[int, Dict[int, float]]]:
    """Strictly improving neighbor community with the largest gain, smallest id on ties."""
    links = stats.links(node)
    current = stats.assignment[node]
    best_comm = current
    best_gain = 0.0
    for comm in sorted(links):
        if comm == current:
            continue
        gain = stats.gain(node, comm, links, variant)
        if gain > best_gain + GAIN_EPSILON:
            best_comm, best_gain = comm, gain
    if best_comm == current:
        return None
    return best_comm, links


def _local_moving(stats: PartitionStats, variant: ModularityVariant, trace: List[float]) -> int:
    """Sweep nodes in ascending order until a sweep makes no move; returns the move count."""
    total_moves = 0
    while True:
        moves = 0
        for node in range(len(stats.assignment)):
            move = _best_move(stats, node, variant)
            if move is not None:
                stats.move(node, *move)
                moves += 1
        trace.append(stats.modularity(variant))
        total_moves += moves
        if moves == 0:
            return total_moves


def _aggregate(stats: PartitionStats) -> Tuple[PartitionStats, List[int]]:
    """Collapse each community into one node; internal weight becomes a self-loop."""
    communities = stats.communities()
    index = {comm: i for i, comm in enumerate(communities)}
    adjacency: List[Dict[int, float]] = [dict() for _ in communities]
    self_loops = [stats.internal[comm] for comm in communities]
    for node, nbrs in enumerate(stats.adjacency):
        a = index[stats.assignment[node]]
        for nbr, weight in nbrs.items():
            b = index[stats.assignment[nbr]]
            if a != b:
                adjacency[a][b] = adjacency[a].get(b, 0.0) + weight
    mapping = [index[comm] for comm in stats.assignment]
    return PartitionStats(adjacency, range(len(communities)), self_loops), mapping


def _check_edges(g: Graph) -> None:
    if g.edge_count == 0:
        raise ModularityUndefinedError("Modularity-based detection needs at least one edge")


def louvain(
    g: Graph,
    variant: Optional[ModularityVariant] = None,
    aggregate: Optional[bool] = None,
) -> LouvainResult:
    """Louvain local moving from singletons. With `aggregate`, communities are
    collapsed and moved again until a level makes no move."""
    _check_edges(g)
    variant = variant or settings.MODULARITY_VARIANT
    aggregate = settings.LOUVAIN_AGGREGATE if aggregate is None else aggregate

    stats = PartitionStats.from_graph(g, range(g.node_count))
    trace: List[float] = []
    moves = _local_moving(stats, variant, trace)
    assignment = list(stats.assignment)
    node_of = list(range(g.node_count))
    levels = 1

    if aggregate:
        while True:
            coarse, mapping = _aggregate(stats)
            level_moves = _local_moving(coarse, variant, trace)
            if level_moves == 0:
                break
            levels += 1
            moves += level_moves
            node_of = [mapping[x] for x in node_of]
            assignment = [coarse.assignment[x] for x in node_of]
            stats = coarse

    partition = Partition.from_assignment(assignment)
    q = modularity(g, partition, variant)
    logger.info(f"Louvain found {partition.community_count} communities, Q={q:.5f} ({moves} moves, {levels} levels)")
    return LouvainResult(partition, q, trace, moves, levels)


class _LikeMindednessTracker:
    """Running intra-community similarity sum and pair count."""

    def __init__(self, s: SimMatrix):
        self.values = s.values
        self.intra_sum = 0.0
        self.intra_pairs = 0

    @property
    def value(self) -> float:
        return self.intra_sum / self.intra_pairs if self.intra_pairs else 0.0

    def move(self, node: int, source: Set[int], target: Set[int]) -> None:
        """Account for `node` leaving `source` (which still contains it) for `target`."""
        row = self.values[node]
        others = [v for v in source if v != node]
        self.intra_sum -= float(row[others].sum()) if others else 0.0
        self.intra_sum += float(row[list(target)].sum()) if target else 0.0
        self.intra_pairs += len(target) - len(others)


def _sorted_similar_pairs(s: SimMatrix) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pairs u < v with positive similarity, by descending similarity then (u, v)."""
    rows, cols = np.triu_indices(s.size, k=1)
    values = s.values[rows, cols]
    positive = values > 0.0
    rows, cols, values = rows[positive], cols[positive], values[positive]
    order = np.lexsort((cols, rows, -values))
    return rows[order], cols[order], values[order]


def modified_louvain(
    g: Graph,
    s: SimMatrix,
    variant: Optional[ModularityVariant] = None,
) -> ModifiedLouvainResult:
    """Louvain local moving on a working copy G' that gains an edge for every
    pair whose similarity reaches the current like-mindedness.

    After each applied move, like-mindedness L is updated and the not yet
    consumed pairs with sim >= L (and sim > 0) are added to G'. Gains are
    computed on G'; the reported modularity is measured on g.
    """
    _check_edges(g)
    if s.size != g.node_count:
        raise PartitionMismatchError(f"Graph has {g.node_count} nodes, similarity table has {s.size}")
    variant = variant or settings.MODULARITY_VARIANT

    stats = PartitionStats.from_graph(g, range(g.node_count))
    tracker = _LikeMindednessTracker(s)
    pair_u, pair_v, pair_sim = _sorted_similar_pairs(s)
    cursor = 0
    injected = 0
    trace: List[float] = []
    injection_trace: List[int] = []
    total_moves = 0

    while True:
        moves = 0
        for node in range(g.node_count):
            move = _best_move(stats, node, variant)
            if move is None:
                continue
            target, links = move
            tracker.move(node, stats.members[stats.assignment[node]], stats.members[target])
            stats.move(node, target, links)
            moves += 1

            threshold = tracker.value
            while cursor < pair_sim.size and pair_sim[cursor] >= threshold:
                u, v = int(pair_u[cursor]), int(pair_v[cursor])
                if v not in stats.adjacency[u]:
                    stats.add_edge(u, v)
                    injected += 1
                cursor += 1

        trace.append(stats.modularity(variant))
        injection_trace.append(injected)
        total_moves += moves
        if moves == 0:
            break

    partition = Partition.from_assignment(stats.assignment)
    q = modularity(g, partition, variant)
    q_augmented = stats.modularity(variant)
    logger.info(
        f"Modified Louvain found {partition.community_count} communities, Q={q:.5f} on G, "
        f"Q={q_augmented:.5f} on G' with {injected} injected edges"
    )
    return ModifiedLouvainResult(
        partition=partition,
        modularity=q,
        modularity_augmented=q_augmented,
        injected_edges=injected,
        like_mindedness=tracker.value,
        trace=trace,
        injection_trace=injection_trace,
        moves=total_moves,
    )
