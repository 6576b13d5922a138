from datetime import datetime, timezone

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phishpress.compressor import CompressionModel
from phishpress.corpus import Corpus, Label, WebDocument, generate_synthetic_corpus, temporal_split
from phishpress.dictionary import build_class_tables, build_dictionary
from phishpress.errors import EmptyCorpus, EmptyPredictions, PoolTooSmall
from phishpress.evaluation import (
    ConfusionCounts,
    PipelineConfig,
    compute_metrics,
    evaluate_pipeline,
    imbalanced_eval,
    metrics_from_counts,
    render_metrics_table,
)
from phishpress.ml import Algorithm, train, with_feature_mask
from phishpress.evaluation import document_features

from synthdata import disjoint_spec

UTC = timezone.utc


def pairs_from_counts(tp, fn, fp, tn):
    return ([(1, 1)] * tp + [(1, 0)] * fn + [(0, 1)] * fp + [(0, 0)] * tn)


class TestComputeMetrics:
    def test_definition_arithmetic(self):
        report = compute_metrics(pairs_from_counts(tp=8, fn=2, fp=1, tn=9))
        assert report.tpr == pytest.approx(0.8)
        assert report.fpr == pytest.approx(0.1)
        assert report.accuracy == pytest.approx(0.85)

    def test_all_correct(self):
        report = compute_metrics(pairs_from_counts(tp=5, fn=0, fp=0, tn=5))
        assert report.accuracy == 1.0
        assert report.f1 == 1.0

    def test_no_phishing_samples_tpr_absent(self):
        report = compute_metrics(pairs_from_counts(tp=0, fn=0, fp=1, tn=9))
        assert report.tpr is None
        assert report.fpr == pytest.approx(0.1)

    def test_no_predicted_positives_precision_and_f1_absent(self):
        report = compute_metrics(pairs_from_counts(tp=0, fn=3, fp=0, tn=7))
        assert report.precision is None
        assert report.f1 is None
        assert report.tpr == 0.0

    def test_empty_rejected(self):
        with pytest.raises(EmptyPredictions):
            compute_metrics([])

    @given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
    @settings(max_examples=100, deadline=None)
    def test_metric_identities(self, tp, fn, fp, tn):
        counts = ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)
        report = metrics_from_counts(counts)
        if report.tpr is not None:
            fnr = fn / (tp + fn)
            assert report.tpr + fnr == pytest.approx(1.0)
        if report.fpr is not None:
            tnr = tn / (fp + tn)
            assert report.fpr + tnr == pytest.approx(1.0)
        if report.accuracy is not None and report.tpr is not None and report.fpr is not None:
            prevalence = (tp + fn) / counts.total
            expected = prevalence * report.tpr + (1 - prevalence) * (1 - report.fpr)
            assert report.accuracy == pytest.approx(expected)

    @given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=40))
    @settings(max_examples=60, deadline=None)
    def test_order_invariance(self, raw):
        shuffled = list(reversed(raw))
        assert compute_metrics(raw) == compute_metrics(shuffled)


def make_docs(n, label, stem):
    return [
        WebDocument(f"{stem}{i}", "https://x.example/p", label, b"<p>page</p>",
                    datetime(2019, 1, 1, tzinfo=UTC))
        for i in range(n)
    ]


class TestImbalancedEval:
    def test_all_nonphishing_classifier(self):
        pool = make_docs(50, Label.PHISHING, "p")
        legit = make_docs(100, Label.NONPHISHING, "n")
        report = imbalanced_eval(lambda d: 0, pool, legit, ratio=100, iterations=100, seed=1)
        assert report.mean_tpr == 0.0
        assert report.mean_fpr == 0.0
        assert report.mean_accuracy == pytest.approx(100 / 101, abs=1e-9)
        assert report.mean_f1 is None  # no predicted positives, ever

    def test_all_phishing_classifier(self):
        pool = make_docs(50, Label.PHISHING, "p")
        legit = make_docs(100, Label.NONPHISHING, "n")
        report = imbalanced_eval(lambda d: 1, pool, legit, ratio=100, iterations=50, seed=1)
        assert report.mean_tpr == 1.0
        assert report.mean_fpr == 1.0

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(0)
        verdicts = {f"p{i}": int(rng.integers(0, 2)) for i in range(50)}
        classifier = lambda d: verdicts.get(d.id, 0)
        pool = make_docs(50, Label.PHISHING, "p")
        legit = make_docs(60, Label.NONPHISHING, "n")
        a = imbalanced_eval(classifier, pool, legit, iterations=30, seed=9)
        b = imbalanced_eval(classifier, pool, legit, iterations=30, seed=9)
        assert a == b

    def test_single_iteration_equals_direct_metrics(self):
        rng = np.random.default_rng(0)
        verdicts = {f"p{i}": int(rng.integers(0, 2)) for i in range(40)}
        classifier = lambda d: verdicts.get(d.id, 0)
        pool = make_docs(40, Label.PHISHING, "p")
        legit = make_docs(100, Label.NONPHISHING, "n")
        seed = 123
        report = imbalanced_eval(classifier, pool, legit, iterations=1, seed=seed)
        # replay the single iteration's draw
        stream = np.random.SeedSequence(seed).spawn(1)[0]
        picked = np.random.default_rng(stream).choice(40, size=1, replace=False)
        pairs = [(1, classifier(pool[i])) for i in picked] + [(0, classifier(d)) for d in legit]
        direct = compute_metrics(pairs)
        assert report.mean_tpr == direct.tpr
        assert report.mean_fpr == direct.fpr
        assert report.mean_accuracy == direct.accuracy

    def test_subsample_size_rounds_up(self):
        pool = make_docs(2, Label.PHISHING, "p")
        legit = make_docs(150, Label.NONPHISHING, "n")  # ceil(150/100) = 2
        report = imbalanced_eval(lambda d: 0, pool, legit, iterations=5, seed=0)
        assert report.mean_accuracy == pytest.approx(150 / 152)

    def test_pool_too_small(self):
        pool = make_docs(1, Label.PHISHING, "p")
        legit = make_docs(150, Label.NONPHISHING, "n")
        with pytest.raises(PoolTooSmall):
            imbalanced_eval(lambda d: 0, pool, legit, iterations=5, seed=0)


def compression_setup(threshold=1e-3):
    spec = disjoint_spec(docs_per_class=40, vocab=50, seed=13)
    corpus = generate_synthetic_corpus(spec)
    ordered = sorted(corpus, key=lambda d: d.fetched_at)
    train_c, test_c = temporal_split(corpus, ordered[60].fetched_at)
    phish_t, legit_t, _ = build_class_tables(train_c)
    fp = train_c.fingerprint()
    pm = CompressionModel(Label.PHISHING, build_dictionary(phish_t, threshold, fp))
    lm = CompressionModel(Label.NONPHISHING, build_dictionary(legit_t, threshold, fp))
    return pm, lm, train_c, test_c


class TestEvaluatePipeline:
    def test_compression_mode_on_separable_fixture(self):
        pm, lm, _, test_c = compression_setup()
        config = PipelineConfig(mode="compression", phish_model=pm, legit_model=lm)
        report = evaluate_pipeline(config, test_c)
        assert report.accuracy >= 0.95

    def test_html_mode_all_features_zero_forces_tpr_zero(self):
        # pages without forms or links: every heuristic is 0
        docs = make_docs(5, Label.PHISHING, "p") + make_docs(5, Label.NONPHISHING, "n")
        report = evaluate_pipeline(PipelineConfig(mode="html"), Corpus(tuple(docs)))
        assert report.tpr == 0.0
        assert report.fpr == 0.0

    def test_ml_mode_with_ratio_features(self):
        pm, lm, train_c, test_c = compression_setup()
        config = PipelineConfig(mode="compression", phish_model=pm, legit_model=lm)
        mask = ("phish_ratio", "legit_ratio")
        vectors = [document_features(d, config, mask) for d in train_c]
        model, _ = train(vectors, Algorithm.DECISION_TREE, seed=3)
        model = with_feature_mask(model, mask)
        ml_config = PipelineConfig(mode="ml", phish_model=pm, legit_model=lm, model=model)
        report = evaluate_pipeline(ml_config, test_c)
        assert report.accuracy >= 0.9

    def test_ml_mode_requires_models_for_ratio_features(self):
        pm, lm, train_c, _ = compression_setup()
        config = PipelineConfig(mode="compression", phish_model=pm, legit_model=lm)
        mask = ("phish_ratio", "legit_ratio")
        vectors = [document_features(d, config, mask) for d in train_c]
        model, _ = train(vectors, Algorithm.DECISION_TREE, seed=3)
        model = with_feature_mask(model, mask)
        with pytest.raises(ValueError):
            PipelineConfig(mode="ml", model=model)

    def test_unlabeled_only_corpus_rejected(self):
        pm, lm, _, _ = compression_setup()
        config = PipelineConfig(mode="compression", phish_model=pm, legit_model=lm)
        docs = make_docs(3, Label.UNKNOWN, "u")
        with pytest.raises(EmptyCorpus):
            evaluate_pipeline(config, Corpus(tuple(docs)))

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            PipelineConfig(mode="svm")


class TestRenderTable:
    def test_layout_and_formatting(self):
        report = compute_metrics(pairs_from_counts(tp=8, fn=2, fp=1, tn=9))
        text = render_metrics_table({"compression": report})
        lines = text.splitlines()
        assert lines[0].split() == ["Metric", "compression"]
        assert "TPR" in text and "80.00%" in text
        assert "Accuracy" in text and "85.00%" in text

    def test_absent_metric_rendered_as_dash(self):
        report = compute_metrics(pairs_from_counts(tp=0, fn=3, fp=0, tn=7))
        text = render_metrics_table({"html": report})
        f1_line = [l for l in text.splitlines() if l.startswith("F1")][0]
        assert "-" in f1_line
