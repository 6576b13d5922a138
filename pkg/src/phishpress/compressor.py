"""DEFLATE compression with class-specific preset dictionaries.

Streams use the zlib container (RFC 1950) rather than raw deflate because
that is where the preset-dictionary handshake lives: the FDICT flag plus the
Adler-32 checksum of the dictionary. Classification compresses the raw HTML
bytes of a page once per class model and compares the resulting compression
ratios; the model whose dictionary matches the page's word distribution
compresses it further.
"""

from __future__ import annotations

import json
import logging
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Sequence

from .corpus import Corpus, Label, WebDocument
from .errors import EmptyInput, MismatchedModels

if TYPE_CHECKING:
    from .dictionary import DictionaryModel

logger = logging.getLogger(__name__)

DEFAULT_LEVEL = 9  # maximize back-referencing into the preset dictionary


@dataclass(frozen=True)
class CompressionModel:
    class_label: Label
    dictionary: "DictionaryModel"
    level: int = DEFAULT_LEVEL

    def __post_init__(self):
        if not self.dictionary.dict_bytes:
            raise ValueError("dictionary bytes must be non-empty")
        if not 1 <= self.level <= 9:
            raise ValueError(f"level {self.level} outside [1, 9]")


@dataclass(frozen=True)
class CompressionOutcome:
    model_label: Label
    input_size: int
    output_size: int
    ratio: float

    def __post_init__(self):
        if self.input_size < 1 or self.output_size < 1:
            raise ValueError("sizes must be >= 1")


@dataclass(frozen=True)
class ClassificationResult:
    doc_id: str
    phishing_outcome: CompressionOutcome
    nonphishing_outcome: CompressionOutcome
    predicted: Label
    tie: bool


def compress_with_dictionary(payload: bytes, model: CompressionModel) -> bytes:
    """Compress ``payload`` into a zlib stream primed with the model's
    preset dictionary. Deterministic for fixed (payload, dictionary, level)."""
    if not payload:
        raise EmptyInput("cannot compress an empty payload")
    comp = zlib.compressobj(
        model.level,
        zlib.DEFLATED,
        zlib.MAX_WBITS,
        zlib.DEF_MEM_LEVEL,
        zlib.Z_DEFAULT_STRATEGY,
        zdict=model.dictionary.dict_bytes,
    )
    return comp.compress(payload) + comp.flush()


def decompress_with_dictionary(stream: bytes, model: CompressionModel) -> bytes:
    decomp = zlib.decompressobj(zlib.MAX_WBITS, zdict=model.dictionary.dict_bytes)
    return decomp.decompress(stream) + decomp.flush()


def compression_ratio(payload: bytes, model: CompressionModel) -> CompressionOutcome:
    """Original size over compressed size; higher means better compression."""
    compressed = compress_with_dictionary(payload, model)
    return CompressionOutcome(
        model_label=model.class_label,
        input_size=len(payload),
        output_size=len(compressed),
        ratio=len(payload) / len(compressed),
    )


def classify(
    doc: WebDocument,
    phish_model: CompressionModel,
    legit_model: CompressionModel,
) -> ClassificationResult:
    """Compress the raw HTML bytes under both models and pick the class whose
    model yields the higher ratio. Equal ratios resolve to non-phishing with
    the tie flagged."""
    if not doc.html:
        raise EmptyInput(f"document {doc.id} has empty html")
    fp_a, fp_b = phish_model.dictionary.built_from, legit_model.dictionary.built_from
    if fp_a and fp_b and fp_a != fp_b:
        raise MismatchedModels(f"models built from different corpora: {fp_a} vs {fp_b}")
    phish = compression_ratio(doc.html, phish_model)
    legit = compression_ratio(doc.html, legit_model)
    # Same input size cancels, so ratio comparison == reversed size comparison.
    is_phish = phish.output_size < legit.output_size
    tie = phish.output_size == legit.output_size
    return ClassificationResult(
        doc_id=doc.id,
        phishing_outcome=phish,
        nonphishing_outcome=legit,
        predicted=Label.PHISHING if is_phish else Label.NONPHISHING,
        tie=tie,
    )


def classify_batch(
    corpus: Corpus | Sequence[WebDocument],
    phish_model: CompressionModel,
    legit_model: CompressionModel,
    jobs: int = 1,
) -> list[ClassificationResult]:
    """Order-preserving batch classification. Documents that fail (e.g.
    empty html) are logged and skipped rather than aborting the batch."""
    docs = list(corpus)

    def run(doc: WebDocument) -> ClassificationResult | None:
        try:
            return classify(doc, phish_model, legit_model)
        except EmptyInput as exc:
            logger.warning("skipping %s: %s", doc.id, exc)
            return None

    if jobs > 1 and len(docs) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            raw = list(pool.map(run, docs))
    else:
        raw = [run(d) for d in docs]
    return [r for r in raw if r is not None]


def write_results_jsonl(results: Iterable[ClassificationResult], path: str | Path) -> Path:
    """One JSON object per document: doc_id, both ratios, prediction, tie."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for r in results:
            fh.write(
                json.dumps(
                    {
                        "doc_id": r.doc_id,
                        "phish_ratio": r.phishing_outcome.ratio,
                        "legit_ratio": r.nonphishing_outcome.ratio,
                        "predicted": r.predicted.value,
                        "tie": r.tie,
                    }
                )
                + "\n"
            )
    return path
