"""
Tests for graph construction, components, induced subgraphs and edge-list I/O.
"""

from collections import deque

import numpy as np
import pytest

from app.core.errors import GraphError, ParseError, PartitionMismatchError
from app.models.graph import Graph, Partition
from app.services.graph_service import (
    build_graph,
    connected_components,
    induced_subgraph,
    natural_order,
    read_edge_list,
    read_node_list,
    write_edge_list,
    write_node_list,
)


def _reachable(g: Graph, start: int) -> set:
    seen = {start}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for nbr in g.adjacency(node):
            if nbr not in seen:
                seen.add(nbr)
                queue.append(nbr)
    return seen


class TestBuildGraph:
    """Test graph construction from edge pairs."""

    def test_duplicates_and_self_loops_dropped(self):
        """Reversed duplicates collapse and self-loops disappear."""
        g = build_graph([(0, 1), (1, 0), (1, 1), (1, 2)])
        assert g.node_count == 3
        assert g.edge_count == 2
        assert list(g.edges()) == [(0, 1), (1, 2)]

    def test_declared_nodes_without_edges(self):
        """Nodes declared up front stay as isolated nodes."""
        g = build_graph([], node_count=4)
        assert g.node_count == 4
        assert g.edge_count == 0
        assert g.degrees() == [0, 0, 0, 0]

    def test_two_triangles(self, two_triangles):
        """Two triangles and a bridge have 6 nodes and 7 edges."""
        assert two_triangles.node_count == 6
        assert two_triangles.edge_count == 7
        assert two_triangles.adjacency(2) == (0, 1, 3)

    def test_labels_resolve_to_dense_ids(self):
        """String endpoints map through the label list."""
        g = build_graph([("bob", "alice"), ("alice", "carol")], node_labels=["alice", "bob", "carol"])
        assert g.index_of("alice") == 0
        assert g.has_edge(0, 1)
        assert g.has_edge(0, 2)
        assert not g.has_edge(1, 2)
        assert g.label_of(2) == "carol"

    def test_empty_universe_rejected(self):
        """A graph needs at least one node."""
        with pytest.raises(GraphError):
            build_graph([])

    def test_unresolvable_label_rejected(self):
        """Endpoints must name a known label."""
        with pytest.raises(GraphError):
            build_graph([("a", "z")], node_labels=["a", "b"])

    def test_out_of_range_id_rejected(self):
        """Integer endpoints must fall in 0..n-1."""
        with pytest.raises(GraphError):
            build_graph([(0, 5)], node_count=3)

    def test_asymmetric_adjacency_rejected(self):
        """Graph refuses adjacency lists that are not symmetric."""
        with pytest.raises(GraphError):
            Graph([[1], []])

    def test_rebuild_from_edges_is_identical(self, two_triangles):
        """Rebuilding from the emitted edge list gives the same graph."""
        rebuilt = build_graph(list(two_triangles.edges()), node_count=two_triangles.node_count)
        assert rebuilt == two_triangles
        assert rebuilt.content_hash() == two_triangles.content_hash()

    def test_natural_order(self):
        """Integer labels sort numerically, anything else lexicographically."""
        assert natural_order(["10", "2", "1"]) == ["1", "2", "10"]
        assert natural_order(["b", "10", "a"]) == ["10", "a", "b"]


class TestConnectedComponents:
    """Test component detection."""

    def test_two_disjoint_triangles(self):
        """Two triangles give two components of size three."""
        g = build_graph([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
        components = connected_components(g)
        assert components.community_count == 2
        assert components.members == ((0, 1, 2), (3, 4, 5))

    def test_path_is_one_component(self):
        """A path is connected."""
        assert connected_components(build_graph([(0, 1), (1, 2)])).community_count == 1

    def test_isolated_nodes(self):
        """Every isolated node is its own component."""
        components = connected_components(build_graph([], node_count=5))
        assert components.community_count == 5
        assert components.assignment == (0, 1, 2, 3, 4)

    def test_numbering_follows_smallest_member(self):
        """Component ids follow each component's smallest node id."""
        g = build_graph([(0, 4), (1, 2)], node_count=5)
        components = connected_components(g)
        assert components.assignment == (0, 1, 1, 2, 0)

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_reachability_oracle(self, seed):
        """Same component exactly when a path exists."""
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 11))
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.2]
        g = build_graph(edges, node_count=n)
        components = connected_components(g)
        for u in range(n):
            reachable = _reachable(g, u)
            for v in range(n):
                assert components.same_community(u, v) == (v in reachable)


class TestInducedSubgraph:
    """Test induced subgraphs."""

    def test_keep_one_triangle(self, two_triangles):
        """Keeping one triangle keeps its three edges."""
        sub = induced_subgraph(two_triangles, {0, 1, 2})
        assert sub.node_count == 3
        assert sub.edge_count == 3

    def test_keep_everything(self, two_triangles):
        """Keeping every node returns an identical graph."""
        assert induced_subgraph(two_triangles, range(6)) == two_triangles

    def test_non_adjacent_pair(self, two_triangles):
        """Two non-adjacent nodes give an edgeless subgraph."""
        sub = induced_subgraph(two_triangles, {0, 3})
        assert sub.node_count == 2
        assert sub.edge_count == 0

    def test_labels_preserved(self):
        """Kept nodes keep their labels in id order."""
        g = build_graph([("a", "b"), ("b", "c")], node_labels=["a", "b", "c"])
        sub = induced_subgraph(g, [2, 1])
        assert sub.labels == ("b", "c")
        assert sub.has_edge(0, 1)

    def test_unknown_node_rejected(self, two_triangles):
        """Kept nodes must exist."""
        with pytest.raises(GraphError):
            induced_subgraph(two_triangles, {0, 9})


class TestPartition:
    """Test the partition type."""

    def test_canonical_relabelling(self):
        """Community ids follow the order of each community's smallest node."""
        p = Partition.from_assignment([7, 7, 3, 3, 7])
        assert p.assignment == (0, 0, 1, 1, 0)
        assert p.community_count == 2
        assert p.members == ((0, 1, 4), (2, 3))
        assert p == Partition.from_assignment([1, 1, 0, 0, 1])

    def test_from_communities_rejects_overlap(self):
        """A node cannot sit in two communities."""
        with pytest.raises(PartitionMismatchError):
            Partition.from_communities([[0, 1], [1, 2]], 3)

    def test_from_communities_rejects_uncovered_node(self):
        """Every node needs a community."""
        with pytest.raises(PartitionMismatchError):
            Partition.from_communities([[0, 1]], 3)

    def test_refines(self):
        """Singletons refine everything; the single community refines only itself."""
        p = Partition.from_assignment([0, 0, 1, 1])
        assert Partition.singletons(4).refines(p)
        assert p.refines(Partition.single(4))
        assert not Partition.single(4).refines(p)


class TestEdgeListFiles:
    """Test edge-list and node-list reading and writing."""

    def test_round_trip_with_isolated_nodes(self, tmp_path):
        """The node list carries isolated nodes the edge list cannot."""
        g = build_graph([("a", "b")], node_labels=["a", "b", "c"])
        write_edge_list(g, tmp_path / "edges.txt")
        write_node_list(g, tmp_path / "nodes.txt")

        reread = read_edge_list(tmp_path / "edges.txt", node_labels=read_node_list(tmp_path / "nodes.txt"))
        assert reread == g
        assert reread.degree(2) == 0

    def test_comments_and_blank_lines_skipped(self, tmp_path):
        """Comment lines and blank lines are ignored."""
        path = tmp_path / "edges.txt"
        path.write_text("# header\n\n2 10\n10 1\n", encoding="utf-8")
        g = read_edge_list(path)
        assert g.labels == ("1", "2", "10")
        assert g.edge_count == 2

    def test_malformed_line_reports_location(self, tmp_path):
        """A line with the wrong field count raises ParseError with its line number."""
        path = tmp_path / "edges.txt"
        path.write_text("1 2\n3\n", encoding="utf-8")
        with pytest.raises(ParseError) as exc_info:
            read_edge_list(path)
        assert exc_info.value.line_number == 2

    def test_missing_file(self, tmp_path):
        """An unreadable file is a ParseError."""
        with pytest.raises(ParseError):
            read_edge_list(tmp_path / "missing.txt")

    def test_networkx_view(self, two_triangles):
        """The networkx copy has the same nodes and edges."""
        nx_graph = two_triangles.to_networkx()
        assert nx_graph.number_of_nodes() == 6
        assert sorted(tuple(sorted(e)) for e in nx_graph.edges()) == list(two_triangles.edges())
