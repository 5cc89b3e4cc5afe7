"""
Tests for edge betweenness, Girvan-Newman, Louvain and Modified Louvain.
"""

import itertools

import networkx as nx
import numpy as np
import pytest

from app.core.errors import ModularityUndefinedError, PartitionMismatchError
from app.models.behavior import SimMatrix
from app.models.graph import Partition
from app.services.graph_service import build_graph, connected_components
from app.services.hierarchical_service import cut
from app.services.metrics_service import like_mindedness, modularity
from app.services.structural_service import (
    GirvanNewman,
    edge_betweenness,
    girvan_newman,
    louvain,
    modified_louvain,
)

TRIANGLES = Partition.from_assignment([0, 0, 0, 1, 1, 1])


def _random_graph(seed, n, p=0.35):
    rng = np.random.default_rng(seed)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return build_graph(edges, node_count=n)


def _defector_fixture(defector):
    """Two K10 cliques joined by 9-10. One member of the first clique shares
    its taste with the whole second clique and with nobody in its own."""
    first, second = list(range(10)), list(range(10, 20))
    edges = [(u, v) for group in (first, second) for u, v in itertools.combinations(group, 2)] + [(9, 10)]
    g = build_graph(edges)
    values = np.zeros((20, 20))
    for group in (first, second):
        for u, v in itertools.combinations(group, 2):
            values[u, v] = values[v, u] = 1.0
    for v in first:
        values[defector, v] = values[v, defector] = 0.0
    for v in second:
        values[defector, v] = values[v, defector] = 1.0
    return g, SimMatrix(values)


def _brute_force_betweenness(g):
    """Enumerate every shortest path of every connected pair; each of the k
    paths of a pair adds 1/k to the edges it uses."""
    nx_graph = g.to_networkx()
    scores = {edge: 0.0 for edge in g.edges()}
    for u, v in itertools.combinations(range(g.node_count), 2):
        if not nx.has_path(nx_graph, u, v):
            continue
        paths = list(nx.all_shortest_paths(nx_graph, u, v))
        for path in paths:
            for a, b in zip(path, path[1:]):
                scores[(min(a, b), max(a, b))] += 1.0 / len(paths)
    return scores


def _planted_taste_fixture(seed, p_in=0.6, p_out=0.02):
    """Two planted blocks of 20. Node 0 sits in the first block but shares
    its taste only with the second block."""
    planted = nx.planted_partition_graph(2, 20, p_in, p_out, seed=seed)
    g = build_graph(list(planted.edges()), node_count=40)
    taste = np.array([1] + [0] * 19 + [1] * 20)
    values = np.equal.outer(taste, taste).astype(float)
    return g, SimMatrix(values)


class TestEdgeBetweenness:
    """Test shortest-path edge betweenness."""

    def test_path(self):
        """Both edges of a three-node path carry two pairs."""
        assert edge_betweenness(build_graph([(0, 1), (1, 2)])) == {(0, 1): 2.0, (1, 2): 2.0}

    def test_bridge(self, two_triangles):
        """Every cross pair uses the bridge."""
        assert edge_betweenness(two_triangles)[(2, 3)] == pytest.approx(9.0)

    def test_four_cycle(self, four_cycle):
        """Opposite pairs split across two paths."""
        scores = edge_betweenness(four_cycle)
        assert set(scores) == {(0, 1), (1, 2), (2, 3), (0, 3)}
        assert all(score == pytest.approx(2.0) for score in scores.values())

    def test_tree(self):
        """On a tree each edge scores subtree size times complement size."""
        g = build_graph([(0, 1), (1, 2), (1, 3), (3, 4)])
        scores = edge_betweenness(g)
        assert scores[(0, 1)] == pytest.approx(1 * 4)
        assert scores[(1, 2)] == pytest.approx(1 * 4)
        assert scores[(1, 3)] == pytest.approx(2 * 3)
        assert scores[(3, 4)] == pytest.approx(1 * 4)

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_networkx_and_path_lengths(self, seed):
        """Scores match networkx, and they sum to the total shortest-path length."""
        g = _random_graph(seed, 10)
        scores = edge_betweenness(g)
        nx_graph = g.to_networkx()
        expected = nx.edge_betweenness_centrality(nx_graph, normalized=False)
        for (u, v), value in expected.items():
            assert scores[(min(u, v), max(u, v))] == pytest.approx(value, abs=1e-9)

        lengths = dict(nx.all_pairs_shortest_path_length(nx_graph))
        total_length = sum(lengths[u][v] for u in range(10) for v in range(u + 1, 10) if v in lengths[u])
        assert sum(scores.values()) == pytest.approx(total_length, abs=1e-9)
        assert all(score >= 0.0 for score in scores.values())

    @pytest.mark.parametrize("seed", range(100))
    def test_matches_path_enumeration(self, seed):
        """Scores equal the brute-force split over all shortest paths on 3 to 9 nodes."""
        g = _random_graph(seed, 3 + seed % 7, p=0.45)
        expected = _brute_force_betweenness(g)
        scores = edge_betweenness(g)
        assert set(scores) == set(expected)
        for edge, value in expected.items():
            assert scores[edge] == pytest.approx(value, abs=1e-9)



class TestGirvanNewman:
    """Test divisive clustering."""

    def test_bridge_removed_first(self, two_triangles):
        """The bridge goes first and the first split is the two triangles."""
        runner = GirvanNewman(two_triangles)
        d = runner.run()
        assert runner.removals[0].edge == (2, 3)
        assert runner.removals[0].component_count == 2
        assert d.merge_steps[-1].a_id == 0 and d.merge_steps[-1].b_id == 3
        assert cut(d, 2) == TRIANGLES

    def test_component_counts(self, two_triangles):
        """Component counts never drop and end with every node alone."""
        runner = GirvanNewman(two_triangles)
        runner.run()
        counts = [removal.component_count for removal in runner.removals]
        assert counts == sorted(counts)
        assert counts[-1] == 6
        assert len(runner.removals) == two_triangles.edge_count

    def test_edgeless_graph(self):
        """No edges: nothing to remove, every node already alone."""
        d = girvan_newman(build_graph([], node_count=4))
        assert d.merge_steps == ()
        assert d.min_k == 4
        assert cut(d, 4) == Partition.singletons(4)

    def test_barbell_of_k4(self, clique):
        """Two K4 joined by one edge split into the two cliques."""
        g = build_graph(clique(range(4)) + clique(range(4, 8)) + [(3, 4)])
        assert cut(girvan_newman(g), 2) == Partition.from_assignment([0, 0, 0, 0, 1, 1, 1, 1])

    def test_disconnected_start(self):
        """Levels start at the initial component count."""
        g = build_graph([(0, 1), (1, 2), (0, 2), (3, 4)])
        d = girvan_newman(g)
        assert d.min_k == 2
        assert cut(d, 2) == connected_components(g)
        for k in d.levels():
            assert cut(d, k).community_count == k

    @pytest.mark.parametrize("seed", range(5))
    def test_levels_refine(self, seed):
        """Every finer level refines the coarser one."""
        d = girvan_newman(_random_graph(seed, 9, p=0.4))
        levels = list(d.levels())
        for finer, coarser in zip(levels, levels[1:]):
            assert cut(d, finer).refines(cut(d, coarser))


class TestLouvain:
    """Test Louvain local moving."""

    def test_two_triangles(self, two_triangles):
        """The triangles come back with Q = 5/14."""
        result = louvain(two_triangles)
        assert result.partition == TRIANGLES
        assert result.modularity == pytest.approx(5 / 14, abs=1e-12)

    def test_single_edge(self):
        """Two connected nodes end up together with Q = 0."""
        result = louvain(build_graph([(0, 1)]))
        assert result.partition == Partition.single(2)
        assert result.modularity == pytest.approx(0.0, abs=1e-12)

    def test_k8_barbell(self, barbell):
        """Two K8 cliques and a bridge give the planted split."""
        result = louvain(barbell)
        planted = Partition.from_assignment([0] * 8 + [1] * 8)
        assert result.partition == planted
        assert result.modularity > modularity(barbell, Partition.singletons(16))

    def test_literal_variant_optimizes_literal_score(self, two_triangles):
        """With the literal variant the reported score is the literal modularity."""
        result = louvain(two_triangles, "paper_literal")
        assert result.modularity == pytest.approx(modularity(two_triangles, result.partition, "paper_literal"))

    @pytest.mark.parametrize("seed", range(6))
    def test_trace_non_decreasing_and_deterministic(self, seed):
        """Every sweep keeps or raises Q; two runs agree exactly."""
        g = _random_graph(seed, 14, p=0.25)
        if g.edge_count == 0:
            pytest.skip("edgeless sample")
        first, second = louvain(g), louvain(g)
        assert all(b >= a - 1e-12 for a, b in zip(first.trace, first.trace[1:]))
        assert first.partition == second.partition
        assert first.modularity == pytest.approx(first.trace[-1], abs=1e-12)

    def test_aggregation_keeps_or_improves(self, barbell):
        """Collapsing communities never lowers the score on the barbell."""
        plain = louvain(barbell, aggregate=False)
        aggregated = louvain(barbell, aggregate=True)
        assert aggregated.modularity >= plain.modularity - 1e-12
        assert aggregated.levels >= 1

    def test_edgeless_graph(self):
        """Modularity needs an edge."""
        with pytest.raises(ModularityUndefinedError):
            louvain(build_graph([], node_count=3))


class TestModifiedLouvain:
    """Test Louvain with similarity edge injection."""

    def test_agreeing_similarity(self, two_triangles, sim_of):
        """Similarity that matches the triangles adds nothing new."""
        s = sim_of(6, {pair: 1.0 for group in ((0, 1, 2), (3, 4, 5)) for pair in itertools.combinations(group, 2)})
        result = modified_louvain(two_triangles, s)
        assert result.partition == louvain(two_triangles).partition
        assert result.modularity == pytest.approx(5 / 14, abs=1e-12)
        assert result.injected_edges == 0
        assert result.like_mindedness == pytest.approx(1.0)

    def test_zero_similarity_injects_nothing(self, two_triangles, sim_of):
        """Pairs with zero similarity are never injected."""
        result = modified_louvain(two_triangles, sim_of(6))
        assert result.injected_edges == 0
        assert result.partition == TRIANGLES
        assert result.modularity_augmented == pytest.approx(result.modularity, abs=1e-12)

    def test_injected_edges_are_new_pairs(self, path_graph, sim_of):
        """Only pairs missing from the graph count as injected."""
        s = sim_of(4, {(0, 1): 1.0, (0, 2): 0.9, (0, 3): 0.8, (1, 3): 0.7})
        result = modified_louvain(path_graph, s)
        non_edges_with_similarity = 3
        assert 0 < result.injected_edges <= non_edges_with_similarity
        assert result.injection_trace == sorted(result.injection_trace)
        assert result.injection_trace[-1] == result.injected_edges

    @pytest.mark.parametrize("seed", range(10))
    def test_defector_never_lowers_like_mindedness(self, seed):
        """Like-mindedness is at least the Louvain value; Q on the original graph is reported."""
        defector = 1 + seed % 8
        g, s = _defector_fixture(defector)
        plain = louvain(g)
        modified = modified_louvain(g, s)

        assert like_mindedness(s, plain.partition) == pytest.approx(0.9)
        assert like_mindedness(s, modified.partition) >= like_mindedness(s, plain.partition) - 1e-12
        assert modified.like_mindedness == pytest.approx(like_mindedness(s, modified.partition), abs=1e-12)
        assert modified.modularity == pytest.approx(modularity(g, modified.partition), abs=1e-12)
        assert plain.modularity - modified.modularity < 0.15
        # the defector's ten cross-clique pairs are the only non-edges with similarity
        assert modified.injected_edges == 10
        assert modified.modularity_augmented != pytest.approx(modified.modularity)

    def test_planted_family(self):
        """On ten seeded planted graphs where one member's taste sides with the
        other block, ML is at least as like-minded as Louvain and keeps Q on G
        within 0.15 on at least eight."""
        like_minded = close_modularity = 0
        for seed in range(10):
            g, s = _planted_taste_fixture(seed)
            plain, modified = louvain(g), modified_louvain(g, s)
            if like_mindedness(s, modified.partition) >= like_mindedness(s, plain.partition) - 1e-12:
                like_minded += 1
            if plain.modularity - modified.modularity <= 0.15:
                close_modularity += 1
        assert like_minded >= 8
        assert close_modularity >= 8


    def test_deterministic(self, barbell, random_sim_of):
        """Two runs agree exactly."""
        s = random_sim_of(16, seed=5)
        first, second = modified_louvain(barbell, s), modified_louvain(barbell, s)
        assert first.partition == second.partition
        assert first.injected_edges == second.injected_edges

    def test_size_mismatch(self, two_triangles, random_sim_of):
        """Graph and similarity table must cover the same nodes."""
        with pytest.raises(PartitionMismatchError):
            modified_louvain(two_triangles, random_sim_of(5, seed=0))

    def test_edgeless_graph(self, sim_of):
        """Modularity needs an edge."""
        with pytest.raises(ModularityUndefinedError):
            modified_louvain(build_graph([], node_count=3), sim_of(3))
