"""
Quality functions (modularity, like-mindedness), the homophily ratio and
descriptive network statistics.
"""

from collections import defaultdict
from typing import Dict, List, Mapping, Optional, Sequence

import networkx as nx
import numpy as np

from app.core.errors import (
    HomophilyDivisionError,
    HomophilyUndefinedError,
    ModularityUndefinedError,
    PartitionMismatchError,
)
from app.core.logging import get_logger
from app.models.base import ModularityVariant, NetworkStats
from app.models.behavior import SimMatrix
from app.models.graph import Graph, Partition
from app.services.graph_service import connected_components

logger = get_logger()


class PartitionStats:
    """Per-community edge counters for a (possibly weighted) working graph.

    internal: weight with both endpoints inside the community
    boundary: weight with exactly one endpoint inside
    degree_sum: endpoint weight inside (2 * internal + boundary)

    Counters are kept current under `move` and `add_edge`, which is what makes
    modularity gains O(deg(node)).
    """

    def __init__(
        self,
        adjacency: List[Dict[int, float]],
        assignment: Sequence[int],
        self_loops: Optional[Sequence[float]] = None,
    ):
        n = len(adjacency)
        if len(assignment) != n:
            raise PartitionMismatchError(f"Assignment covers {len(assignment)} nodes, graph has {n}")

        self.adjacency = adjacency
        self.assignment: List[int] = list(assignment)
        self.self_loops: List[float] = list(self_loops) if self_loops is not None else [0.0] * n
        self.strength: List[float] = [
            2.0 * self.self_loops[v] + float(sum(adjacency[v].values())) for v in range(n)
        ]
        self.total_weight = sum(self.strength) / 2.0

        self.internal: Dict[int, float] = defaultdict(float)
        self.boundary: Dict[int, float] = defaultdict(float)
        self.degree_sum: Dict[int, float] = defaultdict(float)
        self.members: Dict[int, set] = defaultdict(set)

        for v in range(n):
            comm = self.assignment[v]
            self.members[comm].add(v)
            self.degree_sum[comm] += self.strength[v]
            self.internal[comm] += self.self_loops[v]
            for u, weight in adjacency[v].items():
                if u <= v:
                    continue
                if self.assignment[u] == comm:
                    self.internal[comm] += weight
                else:
                    self.boundary[comm] += weight
                    self.boundary[self.assignment[u]] += weight

    @classmethod
    def from_graph(cls, g: Graph, assignment: Sequence[int]) -> "PartitionStats":
        adjacency = [{nbr: 1.0 for nbr in g.adjacency(v)} for v in range(g.node_count)]
        return cls(adjacency, assignment)

    @property
    def total_edges(self) -> float:
        return self.total_weight

    def incident(self, comm: int) -> float:
        return self.internal[comm] + self.boundary[comm]

    def communities(self) -> List[int]:
        return sorted(c for c, nodes in self.members.items() if nodes)

    def links(self, node: int) -> Dict[int, float]:
        """Edge weight from `node` into each community, self-loop excluded."""
        weights: Dict[int, float] = defaultdict(float)
        assignment = self.assignment
        for nbr, weight in self.adjacency[node].items():
            weights[assignment[nbr]] += weight
        return weights

    def _term(self, internal: float, boundary: float, degree_sum: float, variant: ModularityVariant) -> float:
        m = self.total_weight
        if variant == "newman":
            share = degree_sum / (2.0 * m)
        else:
            share = (internal + boundary) / m
        return internal / m - share * share

    def community_term(self, comm: int, variant: ModularityVariant = "newman") -> float:
        """One community's contribution to Q."""
        return self._term(self.internal[comm], self.boundary[comm], self.degree_sum[comm], variant)

    def modularity(self, variant: ModularityVariant = "newman") -> float:
        if self.total_weight == 0:
            raise ModularityUndefinedError("Modularity is undefined on a graph without edges")
        return sum(self.community_term(c, variant) for c in self.communities())

    def gain(self, node: int, to_comm: int, links: Mapping[int, float], variant: ModularityVariant) -> float:
        from_comm = self.assignment[node]
        if to_comm == from_comm:
            return 0.0
        k = self.strength[node]
        loop = self.self_loops[node]
        outward = k - 2.0 * loop
        l_from = links.get(from_comm, 0.0)
        l_to = links.get(to_comm, 0.0)

        before = (
            self._term(self.internal[from_comm], self.boundary[from_comm], self.degree_sum[from_comm], variant)
            + self._term(self.internal[to_comm], self.boundary[to_comm], self.degree_sum[to_comm], variant)
        )
        after = (
            self._term(
                self.internal[from_comm] - l_from - loop,
                self.boundary[from_comm] + l_from - (outward - l_from),
                self.degree_sum[from_comm] - k,
                variant,
            )
            + self._term(
                self.internal[to_comm] + l_to + loop,
                self.boundary[to_comm] - l_to + (outward - l_to),
                self.degree_sum[to_comm] + k,
                variant,
            )
        )
        return after - before

    def move(self, node: int, to_comm: int, links: Optional[Mapping[int, float]] = None) -> None:
        from_comm = self.assignment[node]
        if to_comm == from_comm:
            return
        if links is None:
            links = self.links(node)
        k = self.strength[node]
        loop = self.self_loops[node]
        outward = k - 2.0 * loop
        l_from = links.get(from_comm, 0.0)
        l_to = links.get(to_comm, 0.0)

        self.internal[from_comm] -= l_from + loop
        self.boundary[from_comm] += l_from - (outward - l_from)
        self.degree_sum[from_comm] -= k
        self.internal[to_comm] += l_to + loop
        self.boundary[to_comm] += (outward - l_to) - l_to
        self.degree_sum[to_comm] += k

        self.members[from_comm].discard(node)
        self.members[to_comm].add(node)
        self.assignment[node] = to_comm

    def add_edge(self, u: int, v: int, weight: float = 1.0) -> None:
        self.adjacency[u][v] = self.adjacency[u].get(v, 0.0) + weight
        self.adjacency[v][u] = self.adjacency[v].get(u, 0.0) + weight
        self.strength[u] += weight
        self.strength[v] += weight
        self.total_weight += weight

        cu, cv = self.assignment[u], self.assignment[v]
        if cu == cv:
            self.internal[cu] += weight
            self.degree_sum[cu] += 2.0 * weight
        else:
            self.boundary[cu] += weight
            self.boundary[cv] += weight
            self.degree_sum[cu] += weight
            self.degree_sum[cv] += weight

    def merge(self, kept: int, removed: int) -> None:
        """Fold community `removed` into `kept`."""
        if kept == removed:
            return
        small, other = (removed, kept) if len(self.members[removed]) <= len(self.members[kept]) else (kept, removed)
        between = 0.0
        for node in self.members[small]:
            for nbr, weight in self.adjacency[node].items():
                if self.assignment[nbr] == other:
                    between += weight

        self.internal[kept] += self.internal.pop(removed, 0.0) + between
        self.boundary[kept] += self.boundary.pop(removed, 0.0) - 2.0 * between
        self.degree_sum[kept] += self.degree_sum.pop(removed, 0.0)
        moved = self.members.pop(removed, set())
        for node in moved:
            self.assignment[node] = kept
        self.members[kept] |= moved

    def recount(self) -> "PartitionStats":
        """Fresh counters from the current adjacency and assignment."""
        return PartitionStats([dict(nbrs) for nbrs in self.adjacency], self.assignment, self.self_loops)

    def matches(self, other: "PartitionStats", tolerance: float = 1e-9) -> bool:
        communities = set(self.communities()) | set(other.communities())
        return abs(self.total_weight - other.total_weight) <= tolerance and all(
            abs(self.internal[c] - other.internal[c]) <= tolerance
            and abs(self.boundary[c] - other.boundary[c]) <= tolerance
            and abs(self.degree_sum[c] - other.degree_sum[c]) <= tolerance
            for c in communities
        )


def modularity(g: Graph, p: Partition, variant: ModularityVariant = "newman") -> float:
    """Q(C) under the Newman-Girvan definition or the literal a_i - b_i^2 reading."""
    if p.node_count != g.node_count:
        raise PartitionMismatchError(f"Partition covers {p.node_count} nodes, graph has {g.node_count}")
    if g.edge_count == 0:
        raise ModularityUndefinedError("Modularity is undefined on a graph without edges")
    return PartitionStats.from_graph(g, p.assignment).modularity(variant)


def modularity_delta(
    stats: PartitionStats,
    g: Graph,
    node: int,
    from_comm: int,
    to_comm: int,
    variant: ModularityVariant = "newman",
) -> float:
    """Q(after) - Q(before) for moving `node` from `from_comm` to `to_comm`."""
    if not 0 <= node < g.node_count or len(stats.assignment) != g.node_count:
        raise PartitionMismatchError(f"Node {node} is not part of this graph")
    if stats.assignment[node] != from_comm:
        raise PartitionMismatchError(
            f"Node {node} is in community {stats.assignment[node]}, not {from_comm}"
        )
    if to_comm == from_comm:
        return 0.0
    return stats.gain(node, to_comm, stats.links(node), variant)


def like_mindedness(s: SimMatrix, p: Partition) -> float:
    """Mean similarity over intra-community pairs u < v; 0.0 when there are none."""
    if p.node_count != s.size:
        raise PartitionMismatchError(f"Partition covers {p.node_count} nodes, similarity table has {s.size}")
    total = 0.0
    pairs = 0
    for block in p.members:
        size = len(block)
        if size < 2:
            continue
        idx = np.asarray(block)
        total += float(np.triu(s.values[np.ix_(idx, idx)], k=1).sum())
        pairs += size * (size - 1) // 2
    return total / pairs if pairs else 0.0


def homophily_ratio(g: Graph, s: SimMatrix) -> float:
    """Mean similarity of friend pairs over mean similarity of non-friend pairs."""
    if g.node_count != s.size:
        raise PartitionMismatchError(f"Graph has {g.node_count} nodes, similarity table has {s.size}")
    n = g.node_count
    edge_count = g.edge_count
    non_edge_count = n * (n - 1) // 2 - edge_count
    if edge_count == 0:
        raise HomophilyUndefinedError("Homophily ratio is undefined on a graph without edges")
    if non_edge_count == 0:
        raise HomophilyUndefinedError("Homophily ratio is undefined on a complete graph")

    edges = np.fromiter((x for edge in g.edges() for x in edge), dtype=np.int64, count=2 * edge_count)
    edges = edges.reshape(-1, 2)
    edge_mean = float(s.values[edges[:, 0], edges[:, 1]].sum()) / edge_count

    non_edge_mask = np.triu(np.ones((n, n), dtype=bool), k=1)
    non_edge_mask[edges[:, 0], edges[:, 1]] = False
    non_edge_mean = float(s.values[non_edge_mask].sum()) / non_edge_count
    if non_edge_mean == 0.0:
        raise HomophilyDivisionError("Non-friend pairs have zero mean similarity")

    return edge_mean / non_edge_mean


def degree_histogram(g: Graph) -> Dict[int, int]:
    """Node count per degree, zero counts omitted."""
    counts = nx.degree_histogram(g.to_networkx())
    return {degree: count for degree, count in enumerate(counts) if count}


def network_stats(g: Graph, s: Optional[SimMatrix] = None) -> NetworkStats:
    """Dataset property table: clustering, diameter and path length on the giant component."""
    nx_graph = g.to_networkx()
    components = connected_components(g)
    giant = max(components.members, key=len)

    if len(giant) > 1:
        giant_graph = nx_graph.subgraph(giant)
        diameter = nx.diameter(giant_graph)
        avg_path_length = nx.average_shortest_path_length(giant_graph)
    else:
        diameter = 0
        avg_path_length = 0.0

    homophily = None
    if s is not None:
        try:
            homophily = homophily_ratio(g, s)
        except (HomophilyUndefinedError, HomophilyDivisionError) as e:
            logger.warning(f"Homophily ratio not calculated: {e}")

    stats = NetworkStats(
        node_count=g.node_count,
        isolated_count=sum(1 for d in g.degrees() if d == 0),
        edge_count=g.edge_count,
        avg_degree=2.0 * g.edge_count / g.node_count,
        avg_clustering_coefficient=nx.average_clustering(nx_graph),
        diameter=diameter,
        avg_path_length=avg_path_length,
        giant_component_size=len(giant),
        giant_component_fraction=len(giant) / g.node_count,
        homophily_ratio=homophily,
    )
    logger.info(
        f"Network stats: {stats.node_count} nodes, {stats.edge_count} edges, "
        f"giant component {stats.giant_component_fraction:.2%}"
    )
    return stats
