import csv
import json

from phishpress.corpus import generate_synthetic_corpus
from phishpress.dictionary import SweepPoint, ThresholdSweepReport, build_class_tables
from phishpress.evaluation import compute_metrics
from phishpress.report import save_likelihood_figures, save_metrics_outputs, save_sweep_outputs

from synthdata import disjoint_spec


def sweep_report():
    return ThresholdSweepReport(
        grid=(
            SweepPoint(1e-4, 50, 48, 0.71),
            SweepPoint(5e-4, 30, 31, 0.93),
            SweepPoint(2e-3, 12, 9, 0.80),
            SweepPoint(5e-2, 0, 0, None),
        ),
        best_threshold=5e-4,
        best_accuracy=0.93,
    )


class TestSweepOutputs:
    def test_writes_json_csv_and_figure(self, tmp_path):
        paths = save_sweep_outputs(sweep_report(), tmp_path, seed=42)
        names = {p.name for p in paths}
        assert names == {"sweep.json", "sweep.csv", "accuracy_vs_threshold.png"}
        doc = json.loads((tmp_path / "sweep.json").read_text())
        assert doc["best_threshold"] == 5e-4
        assert doc["seed"] == 42
        assert doc["grid"][3]["accuracy"] is None
        with (tmp_path / "sweep.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        assert rows[1]["accuracy"] == "0.93"
        assert rows[3]["accuracy"] == ""  # skipped point
        assert (tmp_path / "accuracy_vs_threshold.png").stat().st_size > 0


class TestLikelihoodFigures:
    def test_writes_both_figures(self, tmp_path):
        corpus = generate_synthetic_corpus(disjoint_spec(docs_per_class=10, vocab=20))
        phish, legit, _ = build_class_tables(corpus)
        paths = save_likelihood_figures({"phishing": phish, "non-phishing": legit}, tmp_path)
        assert {p.name for p in paths} == {"likelihood_percentiles.png", "word_frequency.png"}
        for p in paths:
            assert p.stat().st_size > 0


class TestMetricsOutputs:
    def test_writes_json_table_and_chart(self, tmp_path):
        report = compute_metrics([(1, 1)] * 8 + [(1, 0)] * 2 + [(0, 0)] * 9 + [(0, 1)])
        paths = save_metrics_outputs({"compression": report}, tmp_path)
        assert {p.name for p in paths} == {"metrics.json", "metrics.txt", "metrics.png"}
        doc = json.loads((tmp_path / "metrics.json").read_text())
        assert doc["compression"]["counts"] == {"tp": 8, "fp": 1, "tn": 9, "fn": 2}
        table = (tmp_path / "metrics.txt").read_text()
        assert "80.00%" in table
