"""Per-class word-occurrence likelihood tables and preset-dictionary assembly.

The likelihood of a word in a class is the m-estimate with uniform priors,
``(count + 1) / (n + |V|)``, where ``n`` is the number of word positions in
the class corpus and ``|V|`` the distinct-token count over both classes'
training text. Words above a likelihood threshold become the class's preset
compression dictionary: space-joined, ascending by likelihood, so the most
frequent words sit nearest the end of the dictionary window where
back-reference distances are shortest.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import Corpus, Label
from .errors import (
    EmptyCorpus,
    EmptyDictionary,
    EmptyTable,
    EmptyVocabulary,
    SweepFailed,
)
from .textprep import StopwordList, TokenSequence, default_stopwords, extract_text, tokenize

DICT_BYTE_BUDGET = 32768  # preset-dictionary window limit of the stream format
DEFAULT_STORED_K = 3000
WORD_SEPARATOR = b" "


@dataclass(frozen=True)
class LikelihoodTable:
    """Smoothed word likelihoods for one class.

    ``likelihoods`` holds the stored top-k words only; ``likelihood()``
    answers for any word, giving unseen words the uniform-prior floor
    ``1 / (n + |V|)``.
    """

    class_label: Label
    n_total: int
    counts: Mapping[str, int]
    vocab_size: int
    likelihoods: Mapping[str, float]

    def likelihood(self, word: str) -> float:
        return (self.counts.get(word, 0) + 1) / (self.n_total + self.vocab_size)

    def full_likelihood_sum(self) -> float:
        """Sum of likelihoods over the entire |V|-word vocabulary."""
        counted = math.fsum(self.likelihood(w) for w in self.counts)
        floor = 1.0 / (self.n_total + self.vocab_size)
        return counted + (self.vocab_size - len(self.counts)) * floor


def build_likelihood_table(
    class_tokens: Sequence[TokenSequence],
    global_vocab_size: int,
    class_label: Label = Label.PHISHING,
    stored_k: int = DEFAULT_STORED_K,
) -> LikelihoodTable:
    """Fold one class's token sequences into a likelihood table.

    ``global_vocab_size`` is the distinct-token count over the union of both
    classes' training text and must be computed by the caller once.
    """
    if global_vocab_size <= 0:
        raise EmptyVocabulary("global vocabulary size must be >= 1")
    counts: Counter[str] = Counter()
    for seq in class_tokens:
        counts.update(seq.tokens)
    if global_vocab_size < len(counts):
        raise ValueError(
            f"global_vocab_size {global_vocab_size} < {len(counts)} distinct class tokens"
        )
    n_total = sum(counts.values())
    denom = n_total + global_vocab_size
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:stored_k]
    likelihoods = {w: (c + 1) / denom for w, c in ranked}
    return LikelihoodTable(
        class_label=class_label,
        n_total=n_total,
        counts=dict(counts),
        vocab_size=global_vocab_size,
        likelihoods=likelihoods,
    )


def top_k_words(table: LikelihoodTable, k: int) -> list[tuple[str, float]]:
    """The k highest-likelihood stored words, descending; ties break
    lexicographically ascending."""
    if k < 1:
        raise ValueError("k must be >= 1")
    ranked = sorted(table.likelihoods.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:k]


def likelihood_percentiles(
    table: LikelihoodTable, percentiles: Sequence[float]
) -> list[tuple[float, float]]:
    """Nearest-rank percentile values over the stored likelihood list."""
    values = sorted(table.likelihoods.values())
    if not values:
        raise EmptyTable("no stored likelihoods")
    out = []
    for p in percentiles:
        if not 0 < p <= 1:
            raise ValueError(f"percentile {p} outside (0, 1]")
        rank = math.ceil(p * len(values))
        out.append((p, values[rank - 1]))
    return out


@dataclass(frozen=True)
class DictionaryModel:
    """Ordered word list above a likelihood threshold, plus its byte form."""

    class_label: Label
    threshold: float
    words: tuple[tuple[str, float], ...]
    dict_bytes: bytes
    built_from: str = ""

    def __post_init__(self):
        if len(self.dict_bytes) > DICT_BYTE_BUDGET:
            raise ValueError(f"dict_bytes exceeds {DICT_BYTE_BUDGET} bytes")

    @property
    def word_count(self) -> int:
        return len(self.words)


def _serialize(words: Sequence[tuple[str, float]]) -> bytes:
    return WORD_SEPARATOR.join(w.encode("utf-8") for w, _ in words)


def build_dictionary(
    table: LikelihoodTable,
    threshold: float,
    fingerprint: str = "",
) -> DictionaryModel:
    """Words with likelihood strictly above ``threshold``, ascending by
    likelihood. If the byte budget would be exceeded, the lowest-likelihood
    words are dropped first until the serialized form fits."""
    if not 0 < threshold < 1:
        raise ValueError(f"threshold {threshold} outside (0, 1)")
    selected = sorted(
        ((w, lk) for w, lk in table.likelihoods.items() if lk > threshold),
        key=lambda kv: (kv[1], kv[0]),
    )
    if not selected:
        raise EmptyDictionary(
            f"no {table.class_label.value} word has likelihood > {threshold}"
        )
    blob = _serialize(selected)
    while selected and len(blob) > DICT_BYTE_BUDGET:
        selected = selected[1:]
        blob = _serialize(selected)
    if not selected:
        raise EmptyDictionary("no word fits the dictionary byte budget")
    return DictionaryModel(
        class_label=table.class_label,
        threshold=threshold,
        words=tuple(selected),
        dict_bytes=blob,
        built_from=fingerprint,
    )


def save_dictionary(model: DictionaryModel, prefix: str | Path) -> tuple[Path, Path]:
    """Write PREFIX.json metadata and the sibling PREFIX.dict byte file."""
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    meta_path = prefix.with_suffix(".json")
    dict_path = prefix.with_suffix(".dict")
    meta = {
        "class": model.class_label.value,
        "threshold": model.threshold,
        "corpus_fingerprint": model.built_from,
        "word_count": model.word_count,
        "words": [{"word": w, "likelihood": lk} for w, lk in model.words],
    }
    meta_path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    dict_path.write_bytes(model.dict_bytes)
    return meta_path, dict_path


def load_dictionary(path: str | Path) -> DictionaryModel:
    """Load a dictionary from its .dict or .json path (the sibling must exist).

    The .dict bytes are authoritative and must agree with the metadata."""
    path = Path(path)
    meta_path = path.with_suffix(".json")
    dict_path = path.with_suffix(".dict")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    blob = dict_path.read_bytes()
    words = tuple((w["word"], float(w["likelihood"])) for w in meta["words"])
    if _serialize(words) != blob:
        raise ValueError(f"{dict_path} does not match its metadata word list")
    return DictionaryModel(
        class_label=Label.from_string(meta["class"]),
        threshold=float(meta["threshold"]),
        words=words,
        dict_bytes=blob,
        built_from=meta.get("corpus_fingerprint", ""),
    )


# --- corpus-level helpers ----------------------------------------------------

def corpus_token_sequences(
    corpus: Corpus, stopwords: StopwordList | None = None
) -> dict[Label, list[TokenSequence]]:
    """Extract and tokenize every labeled document, grouped by class."""
    stopwords = stopwords or default_stopwords()
    grouped: dict[Label, list[TokenSequence]] = {Label.PHISHING: [], Label.NONPHISHING: []}
    for doc in corpus:
        if doc.label not in grouped:
            continue
        text = extract_text(doc.html)
        grouped[doc.label].append(tokenize(text, stopwords, doc_id=doc.id))
    return grouped


def build_class_tables(
    corpus: Corpus,
    stopwords: StopwordList | None = None,
    stored_k: int = DEFAULT_STORED_K,
) -> tuple[LikelihoodTable, LikelihoodTable, int]:
    """Both class tables over a shared union vocabulary.

    Returns (phishing_table, nonphishing_table, vocab_size)."""
    grouped = corpus_token_sequences(corpus, stopwords)
    if not grouped[Label.PHISHING] or not grouped[Label.NONPHISHING]:
        raise EmptyCorpus("corpus must contain both phishing and non-phishing documents")
    vocab: set[str] = set()
    for seqs in grouped.values():
        for seq in seqs:
            vocab.update(seq.tokens)
    if not vocab:
        raise EmptyVocabulary("no tokens survive preprocessing")
    vocab_size = len(vocab)
    phish = build_likelihood_table(
        grouped[Label.PHISHING], vocab_size, Label.PHISHING, stored_k
    )
    legit = build_likelihood_table(
        grouped[Label.NONPHISHING], vocab_size, Label.NONPHISHING, stored_k
    )
    return phish, legit, vocab_size


# --- threshold sweep ---------------------------------------------------------

@dataclass(frozen=True)
class SweepPoint:
    threshold: float
    phish_dict_size: int
    nonphish_dict_size: int
    accuracy: float | None  # None when the point was skipped


@dataclass(frozen=True)
class ThresholdSweepReport:
    grid: tuple[SweepPoint, ...]
    best_threshold: float
    best_accuracy: float


def default_threshold_grid(
    low: float = 1e-5, high: float = 5e-3, points: int = 20
) -> list[float]:
    """Logarithmically spaced thresholds bracketing the useful range."""
    if points < 2:
        return [low]
    ratio = (high / low) ** (1 / (points - 1))
    return [low * ratio**i for i in range(points)]


def sweep_threshold(
    train_corpus: Corpus,
    holdout: Corpus,
    grid: Sequence[float],
    stopwords: StopwordList | None = None,
    stored_k: int = DEFAULT_STORED_K,
    level: int = 9,
) -> ThresholdSweepReport:
    """Accuracy of compression classification on ``holdout`` for each
    candidate threshold. Grid points where either dictionary is empty are
    recorded with absent accuracy and skipped."""
    from . import compressor  # deferred: compressor type-annotates against this module

    grid = [float(t) for t in grid]
    if not grid:
        raise ValueError("threshold grid must be non-empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("threshold grid must be strictly increasing")

    phish_table, legit_table, _ = build_class_tables(train_corpus, stopwords, stored_k)
    fingerprint = train_corpus.fingerprint()
    eval_docs = [d for d in holdout if d.label in (Label.PHISHING, Label.NONPHISHING)]
    if not eval_docs:
        raise EmptyCorpus("holdout has no labeled documents")

    points: list[SweepPoint] = []
    best: tuple[float, float] | None = None  # (accuracy, threshold)
    for threshold in grid:
        try:
            phish_dict = build_dictionary(phish_table, threshold, fingerprint)
            legit_dict = build_dictionary(legit_table, threshold, fingerprint)
        except EmptyDictionary:
            points.append(SweepPoint(threshold, 0, 0, None))
            continue
        phish_model = compressor.CompressionModel(Label.PHISHING, phish_dict, level)
        legit_model = compressor.CompressionModel(Label.NONPHISHING, legit_dict, level)
        correct = 0
        for doc in eval_docs:
            result = compressor.classify(doc, phish_model, legit_model)
            correct += result.predicted is doc.label
        accuracy = correct / len(eval_docs)
        points.append(
            SweepPoint(threshold, phish_dict.word_count, legit_dict.word_count, accuracy)
        )
        if best is None or accuracy > best[0]:
            best = (accuracy, threshold)
    if best is None:
        raise SweepFailed("every grid point produced an empty dictionary")
    return ThresholdSweepReport(
        grid=tuple(points), best_threshold=best[1], best_accuracy=best[0]
    )
