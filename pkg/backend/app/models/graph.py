"""
Immutable graph and partition types shared by every algorithm.
"""

import hashlib
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from ..core.errors import GraphError, PartitionMismatchError


class Graph:
    """Undirected, unweighted simple graph over dense node ids 0..n-1.

    Adjacency lists are sorted tuples. Each node carries an external label
    (the string read from an input file) kept for I/O.
    """

    __slots__ = ("_adjacency", "_labels", "_index", "_edge_count", "_neighbor_sets")

    def __init__(self, adjacency: Sequence[Sequence[int]], labels: Optional[Sequence[str]] = None):
        if len(adjacency) == 0:
            raise GraphError("Graph must contain at least one node")

        self._adjacency: Tuple[Tuple[int, ...], ...] = tuple(tuple(sorted(set(nbrs))) for nbrs in adjacency)
        self._labels: Tuple[str, ...] = (
            tuple(str(label) for label in labels) if labels is not None
            else tuple(str(i) for i in range(len(adjacency)))
        )
        if len(self._labels) != len(self._adjacency):
            raise GraphError(f"Got {len(self._labels)} labels for {len(self._adjacency)} nodes")

        self._index: Dict[str, int] = {label: i for i, label in enumerate(self._labels)}
        if len(self._index) != len(self._labels):
            raise GraphError("Node labels must be unique")

        degree_sum = 0
        for u, nbrs in enumerate(self._adjacency):
            for v in nbrs:
                if v == u or not 0 <= v < len(self._adjacency):
                    raise GraphError(f"Invalid neighbor {v} of node {u}")
            degree_sum += len(nbrs)
        self._neighbor_sets: Tuple[frozenset, ...] = tuple(frozenset(nbrs) for nbrs in self._adjacency)
        for u, nbrs in enumerate(self._adjacency):
            for v in nbrs:
                if u not in self._neighbor_sets[v]:
                    raise GraphError(f"Edge {u}-{v} is not symmetric")
        self._edge_count = degree_sum // 2

    @property
    def node_count(self) -> int:
        return len(self._adjacency)

    @property
    def edge_count(self) -> int:
        return self._edge_count

    @property
    def labels(self) -> Tuple[str, ...]:
        return self._labels

    def adjacency(self, node: int) -> Tuple[int, ...]:
        return self._adjacency[node]

    def degree(self, node: int) -> int:
        return len(self._adjacency[node])

    def degrees(self) -> List[int]:
        return [len(nbrs) for nbrs in self._adjacency]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._neighbor_sets[u]

    def edges(self) -> Iterator[Tuple[int, int]]:
        """Yield every edge once as (u, v) with u < v, in lexicographic order."""
        for u, nbrs in enumerate(self._adjacency):
            for v in nbrs:
                if u < v:
                    yield u, v

    def label_of(self, node: int) -> str:
        return self._labels[node]

    def index_of(self, label: str) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise GraphError(f"Unknown node label: {label!r}") from None

    def has_label(self, label: str) -> bool:
        return str(label) in self._index

    def content_hash(self) -> str:
        digest = hashlib.sha256()
        for label, nbrs in zip(self._labels, self._adjacency):
            digest.update(label.encode("utf-8"))
            digest.update(b"\x00")
            digest.update(",".join(map(str, nbrs)).encode("ascii"))
            digest.update(b"\n")
        return digest.hexdigest()

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.node_count))
        graph.add_edges_from(self.edges())
        return graph

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._labels == other._labels and self._adjacency == other._adjacency

    def __hash__(self) -> int:
        return hash((self._labels, self._adjacency))

    def __repr__(self) -> str:
        return f"Graph(nodes={self.node_count}, edges={self.edge_count})"


@dataclass(frozen=True)
class Partition:
    """Disjoint assignment of every node to one community.

    Community ids are 0..k-1, numbered in order of each community's smallest
    member, so two partitions with the same blocks compare equal.
    """

    assignment: Tuple[int, ...]
    _members: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        relabel: Dict[int, int] = {}
        canonical: List[int] = []
        members: List[List[int]] = []
        for node, comm in enumerate(self.assignment):
            if comm not in relabel:
                relabel[comm] = len(relabel)
                members.append([])
            canonical.append(relabel[comm])
            members[relabel[comm]].append(node)
        object.__setattr__(self, "assignment", tuple(canonical))
        object.__setattr__(self, "_members", tuple(tuple(block) for block in members))

    @classmethod
    def from_assignment(cls, raw: Sequence[int]) -> "Partition":
        """Build from arbitrary community ids; they are relabelled canonically."""
        return cls(tuple(raw))

    @classmethod
    def from_communities(cls, communities: Iterable[Iterable[int]], node_count: int) -> "Partition":
        raw = [-1] * node_count
        for comm_id, nodes in enumerate(communities):
            for node in nodes:
                if not 0 <= node < node_count:
                    raise PartitionMismatchError(f"Unknown node {node}")
                if raw[node] != -1:
                    raise PartitionMismatchError(f"Node {node} appears in two communities")
                raw[node] = comm_id
        if -1 in raw:
            raise PartitionMismatchError(f"Node {raw.index(-1)} has no community")
        return cls.from_assignment(raw)

    @classmethod
    def singletons(cls, node_count: int) -> "Partition":
        return cls(tuple(range(node_count)))

    @classmethod
    def single(cls, node_count: int) -> "Partition":
        return cls((0,) * node_count)

    @property
    def node_count(self) -> int:
        return len(self.assignment)

    @property
    def community_count(self) -> int:
        return len(self._members)

    @property
    def members(self) -> Tuple[Tuple[int, ...], ...]:
        return self._members

    def community_of(self, node: int) -> int:
        return self.assignment[node]

    def same_community(self, u: int, v: int) -> bool:
        return self.assignment[u] == self.assignment[v]

    def community_sets(self) -> List[frozenset]:
        return [frozenset(block) for block in self._members]

    def refines(self, coarser: "Partition") -> bool:
        """True if every community here lies inside one community of `coarser`."""
        return all(len({coarser.assignment[v] for v in block}) == 1 for block in self._members)

    def communities_by_label(self, labels: Sequence[str]) -> List[List[str]]:
        return [[labels[v] for v in block] for block in self._members]
