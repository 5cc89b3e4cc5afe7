"""
Tests for the command-line entry point.
"""

import pytest

from app.cli.router import main
from app.models.dendrogram import Dendrogram
from app.services.output_service import read_metrics_csv


@pytest.fixture
def raw_dataset(tmp_path):
    out = tmp_path / "raw"
    assert main(["fixture", "--kind", "ratings", "--seed", "11", "--out", str(out)]) == 0
    return out


@pytest.fixture
def filtered_dataset(raw_dataset, tmp_path):
    out = tmp_path / "dataset"
    code = main(
        [
            "filter",
            "--follows", str(raw_dataset / "follows.tsv"),
            "--ratings", str(raw_dataset / "ratings.tsv"),
            "--config", str(raw_dataset / "filter.env"),
            "--out", str(out),
        ]
    )
    assert code == 0
    return out


class TestExitCodes:
    """Test error mapping."""

    def test_unknown_subcommand(self):
        """Bad invocations exit with 1."""
        assert main(["cluster"]) == 1

    def test_missing_required_flag(self):
        """argparse errors exit with 1."""
        assert main(["sweep", "--algorithms", "L"]) == 1

    def test_unknown_algorithm(self, filtered_dataset):
        """Unknown codes exit with 1."""
        assert main(["sweep", "--dataset", str(filtered_dataset), "--algorithms", "LX"]) == 1

    def test_invalid_fixture_size(self, tmp_path):
        """Out-of-range generator settings exit with 1."""
        assert main(["fixture", "--users", "1", "--out", str(tmp_path)]) == 1

    def test_malformed_ratings(self, tmp_path):
        """Data errors exit with 2."""
        (tmp_path / "follows.tsv").write_text("a\tb\nb\ta\n", encoding="utf-8")
        (tmp_path / "ratings.tsv").write_text("a\tm1\t7\n", encoding="utf-8")
        code = main(
            [
                "filter",
                "--follows", str(tmp_path / "follows.tsv"),
                "--ratings", str(tmp_path / "ratings.tsv"),
                "--out", str(tmp_path / "out"),
            ]
        )
        assert code == 2

    def test_k_on_louvain(self, filtered_dataset):
        """--k only applies to hierarchies."""
        assert main(["detect", "--dataset", str(filtered_dataset), "--algorithm", "L", "--k", "3"]) == 1

    def test_k_out_of_range(self, filtered_dataset):
        """A cut above the node count is a usage error."""
        assert main(["detect", "--dataset", str(filtered_dataset), "--linkage", "single", "--k", "100000"]) == 1


@pytest.mark.integration
class TestWorkflow:
    """Test fixture, filter, sweep and report chained together."""

    def test_sweep_and_report(self, filtered_dataset, tmp_path, capsys):
        """A sweep writes every output and the report lists each algorithm."""
        results = tmp_path / "results"
        code = main(
            ["sweep", "--dataset", str(filtered_dataset), "--algorithms", "LMM,L", "MLS", "A", "--out", str(results)]
        )
        assert code == 0
        for name in ("metrics.csv", "timings.csv", "stats.txt", "like_mindedness.svg", "partitions/MLS.json"):
            assert (results / name).exists()
        assert sorted(path.name for path in (results / "dendrograms").iterdir()) == ["A.txt", "LMM.txt"]
        assert read_metrics_csv(results / "metrics.csv").algorithms() == ["LMM", "L", "MLS", "A"]

        capsys.readouterr()
        assert main(["report", "--metrics", str(results / "metrics.csv")]) == 0
        report = capsys.readouterr().out
        for code_name in ("LMM", "MLS", "seconds"):
            assert code_name in report

    def test_detect_writes_partition(self, filtered_dataset, tmp_path, capsys):
        """detect prints the metrics and writes the partition and dendrogram."""
        code = main(
            ["detect", "--dataset", str(filtered_dataset), "--linkage", "average", "--k", "3", "--out", str(tmp_path)]
        )
        assert code == 0
        assert "communities        3" in capsys.readouterr().out
        assert (tmp_path / "partitions" / "A.json").exists()
        assert Dendrogram.read(tmp_path / "dendrograms" / "A.txt").min_k <= 3

    def test_stats_and_vectors(self, filtered_dataset, tmp_path, capsys):
        """stats prints the property table; vectors compares rating and interest tables."""
        assert main(["stats", "--dataset", str(filtered_dataset), "--out", str(tmp_path / "stats")]) == 0
        assert "Homophily ratio" in capsys.readouterr().out
        assert (tmp_path / "stats" / "degree_histogram.csv").exists()

        assert main(["vectors", "--dataset", str(filtered_dataset)]) == 0
        assert "rating vs interest" in capsys.readouterr().out

    def test_follow_dataset(self, tmp_path):
        """The follow-type recipe runs from fixture to sweep."""
        raw, dataset = tmp_path / "raw", tmp_path / "dataset"
        assert main(["fixture", "--kind", "follows", "--seed", "2", "--out", str(raw)]) == 0
        assert main(
            ["filter", "--follows", str(raw / "follows.tsv"), "--config", str(raw / "filter.env"), "--out", str(dataset)]
        ) == 0
        assert main(["sweep", "--dataset", str(dataset), "--algorithms", "L", "ML", "--out", str(tmp_path / "r")]) == 0
