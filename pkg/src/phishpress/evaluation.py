"""Confusion-based metrics and the evaluation protocols: balanced test runs,
and the repeated-downsampling imbalanced protocol (non-phishing:phishing at
100:1, metrics averaged over seeded iterations).

Zero-denominator metrics are reported as absent (None), never as 0: under
heavy imbalance the distinction carries real information.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .compressor import CompressionModel, classify, compression_ratio
from .corpus import Corpus, Label, WebDocument
from .errors import EmptyCorpus, EmptyPredictions, PoolTooSmall
from .html_features import (
    DEFAULT_SENSITIVE_KEYWORDS,
    NonMatchingThreshold,
    detect_bad_action_field,
    detect_bad_form,
    detect_non_matching_urls,
    url_similarity_stats,
)
from .ml import FeatureVector, TrainedModel
from .ml import predict as ml_predict


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class MetricsReport:
    tpr: float | None
    fpr: float | None
    accuracy: float | None
    precision: float | None
    f1: float | None
    counts: ConfusionCounts

    def to_dict(self) -> dict:
        return {
            "tpr": self.tpr,
            "fpr": self.fpr,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "f1": self.f1,
            "counts": {
                "tp": self.counts.tp,
                "fp": self.counts.fp,
                "tn": self.counts.tn,
                "fn": self.counts.fn,
            },
        }


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def metrics_from_counts(counts: ConfusionCounts) -> MetricsReport:
    tpr = _ratio(counts.tp, counts.tp + counts.fn)
    fpr = _ratio(counts.fp, counts.fp + counts.tn)
    accuracy = _ratio(counts.tp + counts.tn, counts.total)
    precision = _ratio(counts.tp, counts.tp + counts.fp)
    if precision is None or tpr is None or precision + tpr == 0:
        f1 = None
    else:
        f1 = 2 * precision * tpr / (precision + tpr)
    return MetricsReport(tpr, fpr, accuracy, precision, f1, counts)


def compute_metrics(predictions: Sequence[tuple[int, int]]) -> MetricsReport:
    """Metrics over (label, predicted) pairs; 1 marks phishing."""
    if not predictions:
        raise EmptyPredictions("no predictions to score")
    tp = fp = tn = fn = 0
    for label, predicted in predictions:
        if label == 1:
            tp += predicted == 1
            fn += predicted == 0
        else:
            fp += predicted == 1
            tn += predicted == 0
    return metrics_from_counts(ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn))


# --- pipeline configurations ---------------------------------------------------

DEFAULT_NONMATCHING = NonMatchingThreshold(0.5, 0.5, fitted_on="default")


@dataclass(frozen=True)
class PipelineConfig:
    """Which detector to run end-to-end.

    mode "compression" needs the two compression models; "html" needs the
    non-matching threshold; "ml" needs a trained model whose feature_mask
    names the columns to assemble (ratio columns need the models too).
    """

    mode: str  # compression | html | ml
    phish_model: CompressionModel | None = None
    legit_model: CompressionModel | None = None
    nonmatching: NonMatchingThreshold = DEFAULT_NONMATCHING
    sensitive_keywords: frozenset[str] = DEFAULT_SENSITIVE_KEYWORDS
    model: TrainedModel | None = None

    def __post_init__(self):
        if self.mode not in ("compression", "html", "ml"):
            raise ValueError(f"unknown pipeline mode {self.mode!r}")
        if self.mode == "compression" and not (self.phish_model and self.legit_model):
            raise ValueError("compression mode needs both compression models")
        if self.mode == "ml":
            if self.model is None:
                raise ValueError("ml mode needs a trained model")
            ratio_cols = {"phish_ratio", "legit_ratio"} & set(self.model.feature_mask)
            if ratio_cols and not (self.phish_model and self.legit_model):
                raise ValueError("model uses ratio features; compression models required")


def document_features(doc: WebDocument, config: PipelineConfig,
                      mask: Sequence[str]) -> FeatureVector:
    """Assemble one document's features for the named canonical columns."""
    values = {}
    if "phish_ratio" in mask:
        values["phish_ratio"] = compression_ratio(doc.html, config.phish_model).ratio
    if "legit_ratio" in mask:
        values["legit_ratio"] = compression_ratio(doc.html, config.legit_model).ratio
    if "bad_form" in mask:
        values["bad_form"] = detect_bad_form(doc.html, doc.url, config.sensitive_keywords)
    if "bad_action_field" in mask:
        values["bad_action_field"] = detect_bad_action_field(doc.html, doc.url)
    if "non_matching_urls" in mask:
        values["non_matching_urls"] = detect_non_matching_urls(
            url_similarity_stats(doc.html, doc.url), config.nonmatching
        )
    label = {Label.PHISHING: 1, Label.NONPHISHING: 0}.get(doc.label)
    return FeatureVector(
        doc_id=doc.id,
        features=tuple(float(values[m]) for m in mask),
        label=label,
    )


def make_classifier(config: PipelineConfig) -> Callable[[WebDocument], int]:
    """A document-level binary classifier for the configured detector."""
    if config.mode == "compression":
        def compression_rule(doc: WebDocument) -> int:
            result = classify(doc, config.phish_model, config.legit_model)
            return int(result.predicted is Label.PHISHING)
        return compression_rule

    if config.mode == "html":
        def html_rule(doc: WebDocument) -> int:
            # any heuristic firing flags the page
            if detect_bad_form(doc.html, doc.url, config.sensitive_keywords):
                return 1
            if detect_bad_action_field(doc.html, doc.url):
                return 1
            stats = url_similarity_stats(doc.html, doc.url)
            return detect_non_matching_urls(stats, config.nonmatching)
        return html_rule

    mask = config.model.feature_mask

    def ml_rule(doc: WebDocument) -> int:
        vector = document_features(doc, config, mask)
        label, _ = ml_predict(config.model, vector)
        return label

    return ml_rule


def evaluate_pipeline(config: PipelineConfig, test: Corpus) -> MetricsReport:
    """Run the configured detector over the labeled test documents."""
    labeled = [d for d in test if d.label in (Label.PHISHING, Label.NONPHISHING)]
    if not labeled:
        raise EmptyCorpus("test corpus has no labeled documents")
    rule = make_classifier(config)
    pairs = [(1 if d.label is Label.PHISHING else 0, rule(d)) for d in labeled]
    return compute_metrics(pairs)


# --- imbalanced protocol ---------------------------------------------------------

@dataclass(frozen=True)
class ImbalancedEvalReport:
    iterations: int
    class_ratio: int
    mean_tpr: float | None
    mean_fpr: float | None
    mean_accuracy: float | None
    mean_f1: float | None
    seed: int

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "class_ratio": self.class_ratio,
            "mean_tpr": self.mean_tpr,
            "mean_fpr": self.mean_fpr,
            "mean_accuracy": self.mean_accuracy,
            "mean_f1": self.mean_f1,
            "seed": self.seed,
        }


def _mean_or_none(values: list[float | None]) -> float | None:
    defined = [v for v in values if v is not None]
    if not defined:
        return None
    return math.fsum(defined) / len(defined)


def imbalanced_eval(
    classifier: Callable[[WebDocument], int],
    phishing_pool: Sequence[WebDocument],
    nonphishing_test: Sequence[WebDocument],
    ratio: int = 100,
    iterations: int = 100,
    seed: int = 42,
) -> ImbalancedEvalReport:
    """Repeatedly downsample the phishing pool to a non-phishing:phishing
    ratio of ``ratio``:1, classify the union, and average the metrics.

    Each iteration draws without replacement from its own random stream
    derived from the master seed, so results are schedule-independent. The
    classifier is assumed deterministic per document, so documents are
    scored once and cached.
    """
    pool = list(phishing_pool)
    legit = list(nonphishing_test)
    if not legit:
        raise EmptyCorpus("non-phishing test set is empty")
    sample_size = max(1, math.ceil(len(legit) / ratio))
    if len(pool) < sample_size:
        raise PoolTooSmall(
            f"pool of {len(pool)} cannot supply {sample_size} phishing samples"
        )

    legit_preds = [(0, classifier(d)) for d in legit]
    pool_preds = [classifier(d) for d in pool]

    streams = np.random.SeedSequence(seed).spawn(iterations)
    tprs: list[float | None] = []
    fprs: list[float | None] = []
    accs: list[float | None] = []
    f1s: list[float | None] = []
    for stream in streams:
        rng = np.random.default_rng(stream)
        picked = rng.choice(len(pool), size=sample_size, replace=False)
        pairs = [(1, pool_preds[i]) for i in picked] + legit_preds
        report = compute_metrics(pairs)
        tprs.append(report.tpr)
        fprs.append(report.fpr)
        accs.append(report.accuracy)
        f1s.append(report.f1)
    return ImbalancedEvalReport(
        iterations=iterations,
        class_ratio=ratio,
        mean_tpr=_mean_or_none(tprs),
        mean_fpr=_mean_or_none(fprs),
        mean_accuracy=_mean_or_none(accs),
        mean_f1=_mean_or_none(f1s),
        seed=seed,
    )


# --- table rendering ----------------------------------------------------------------

_METRIC_ROWS = (("TPR", "tpr"), ("FPR", "fpr"), ("Accuracy", "accuracy"), ("F1-score", "f1"))


def _fmt(value: float | None) -> str:
    return "-" if value is None else f"{100.0 * value:.2f}%"


def render_metrics_table(reports: dict[str, MetricsReport | ImbalancedEvalReport]) -> str:
    """Aligned text table: metric rows by detector/feature-set columns."""
    names = list(reports)
    cells: dict[str, list[str]] = {}
    for name, report in reports.items():
        if isinstance(report, ImbalancedEvalReport):
            values = [report.mean_tpr, report.mean_fpr, report.mean_accuracy, report.mean_f1]
        else:
            values = [report.tpr, report.fpr, report.accuracy, report.f1]
        cells[name] = [_fmt(v) for v in values]
    header = ["Metric", *names]
    rows = [
        [label, *(cells[name][i] for name in names)]
        for i, (label, _) in enumerate(_METRIC_ROWS)
    ]
    widths = [max(len(r[c]) for r in [header, *rows]) for c in range(len(header))]
    def line(parts: list[str]) -> str:
        return "  ".join(p.ljust(w) for p, w in zip(parts, widths)).rstrip()
    sep = "-" * (sum(widths) + 2 * (len(widths) - 1))
    return "\n".join([line(header), sep, *(line(r) for r in rows)]) + "\n"
