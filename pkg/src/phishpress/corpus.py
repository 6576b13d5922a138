"""Labeled web-page corpora: document types, manifest persistence, temporal
splitting, and a deterministic synthetic-corpus generator.

A corpus on disk is a directory with a ``manifest.jsonl`` (one JSON object per
document: id, url, label, fetched_at, brand, path) and one raw HTML file per
document. HTML bytes survive round trips unmodified because classification
compresses the raw bytes, not re-serialized markup.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Iterator
from urllib.parse import urlparse

import numpy as np

from .errors import EmptySplit, InvalidDistribution

MANIFEST_NAME = "manifest.jsonl"
MANIFEST_VERSION = 1


class Label(enum.Enum):
    PHISHING = "phishing"
    NONPHISHING = "nonphishing"
    UNKNOWN = "unknown"

    @classmethod
    def from_string(cls, value: str) -> "Label":
        return cls(value.strip().lower())


class Source(enum.Enum):
    FETCHED = "fetched"
    IMPORTED = "imported"
    SYNTHETIC = "synthetic"


@dataclass(frozen=True)
class WebDocument:
    """One labeled web page, raw bytes as fetched."""

    id: str
    url: str
    label: Label
    html: bytes
    fetched_at: datetime
    target_brand: str | None = None
    source: Source = Source.IMPORTED

    def __post_init__(self):
        parsed = urlparse(self.url)
        if parsed.scheme not in ("http", "https") or not parsed.netloc:
            raise ValueError(f"url must be absolute http(s), got {self.url!r}")
        if self.fetched_at.tzinfo is None:
            raise ValueError("fetched_at must be timezone-aware (UTC)")


@dataclass(frozen=True)
class Corpus:
    documents: tuple[WebDocument, ...]
    manifest_version: int = MANIFEST_VERSION

    def __post_init__(self):
        ids = [d.id for d in self.documents]
        if len(set(ids)) != len(ids):
            raise ValueError("document ids must be unique within a corpus")

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self) -> Iterator[WebDocument]:
        return iter(self.documents)

    def by_label(self, label: Label) -> tuple[WebDocument, ...]:
        return tuple(d for d in self.documents if d.label is label)

    def fingerprint(self) -> str:
        """Stable hex digest over (id, html) pairs, order-independent."""
        h = hashlib.sha256()
        for doc in sorted(self.documents, key=lambda d: d.id):
            h.update(doc.id.encode("utf-8"))
            h.update(hashlib.sha256(doc.html).digest())
        return h.hexdigest()[:16]


def from_documents(docs: Iterable[WebDocument]) -> Corpus:
    return Corpus(documents=tuple(docs))


def save_corpus(corpus: Corpus, out_dir: str | Path) -> Path:
    """Write manifest + per-document HTML files; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = out / MANIFEST_NAME
    with manifest.open("w", encoding="utf-8") as fh:
        for doc in corpus:
            rel = f"{doc.id}.html"
            (out / rel).write_bytes(doc.html)
            record = {
                "id": doc.id,
                "url": doc.url,
                "label": doc.label.value,
                "fetched_at": doc.fetched_at.isoformat(),
                "brand": doc.target_brand,
                "path": rel,
            }
            fh.write(json.dumps(record) + "\n")
    return manifest


def load_corpus(in_dir: str | Path) -> Corpus:
    in_path = Path(in_dir)
    manifest = in_path / MANIFEST_NAME if in_path.is_dir() else in_path
    docs = []
    with manifest.open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            docs.append(
                WebDocument(
                    id=rec["id"],
                    url=rec["url"],
                    label=Label.from_string(rec["label"]),
                    html=(manifest.parent / rec["path"]).read_bytes(),
                    fetched_at=datetime.fromisoformat(rec["fetched_at"]),
                    target_brand=rec.get("brand"),
                    source=Source.IMPORTED,
                )
            )
    return from_documents(docs)


def temporal_split(corpus: Corpus, cutoff: datetime) -> tuple[Corpus, Corpus]:
    """Train = documents fetched strictly before ``cutoff``, test = the rest."""
    train = [d for d in corpus if d.fetched_at < cutoff]
    test = [d for d in corpus if not d.fetched_at < cutoff]
    if not train or not test:
        raise EmptySplit(
            f"cutoff {cutoff.isoformat()} leaves {len(train)} train / {len(test)} test documents"
        )
    return from_documents(train), from_documents(test)


# --- synthetic corpora -----------------------------------------------------

@dataclass(frozen=True)
class ClassSpec:
    """Word distribution for one synthetic class."""

    words: tuple[str, ...]
    probabilities: tuple[float, ...]

    def validate(self, name: str) -> None:
        if len(self.words) != len(self.probabilities) or not self.words:
            raise InvalidDistribution(f"{name}: words and probabilities must align and be non-empty")
        if any(p < 0 for p in self.probabilities):
            raise InvalidDistribution(f"{name}: negative probability")
        total = math.fsum(self.probabilities)
        if abs(total - 1.0) > 1e-9:
            raise InvalidDistribution(f"{name}: probabilities sum to {total!r}, not 1")


@dataclass(frozen=True)
class SyntheticSpec:
    phishing: ClassSpec
    nonphishing: ClassSpec
    docs_per_class: int
    tokens_per_doc: int = 120
    seed: int = 42
    base_time: datetime = field(
        default=datetime(2019, 1, 1, tzinfo=timezone.utc)
    )

    @classmethod
    def from_json(cls, path: str | Path) -> "SyntheticSpec":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        classes = raw["classes"]

        def cspec(key: str) -> ClassSpec:
            c = classes[key]
            return ClassSpec(tuple(c["words"]), tuple(float(p) for p in c["probabilities"]))

        return cls(
            phishing=cspec("phishing"),
            nonphishing=cspec("nonphishing"),
            docs_per_class=int(raw["docs_per_class"]),
            tokens_per_doc=int(raw.get("tokens_per_doc", 120)),
            seed=int(raw.get("seed", 42)),
        )


def _wrap_html(title: str, words: list[str]) -> bytes:
    body = " ".join(words)
    page = f"<html><head><title>{title}</title></head><body><p>{body}</p></body></html>"
    return page.encode("utf-8")


def generate_synthetic_corpus(spec: SyntheticSpec) -> Corpus:
    """Deterministic two-class corpus of minimal HTML pages.

    Documents of the two classes interleave in time (one-minute steps from
    ``base_time``) so temporal splits retain both classes.
    """
    spec.phishing.validate("phishing")
    spec.nonphishing.validate("nonphishing")
    rng = np.random.default_rng(spec.seed)
    docs = []
    per_class = (
        (Label.PHISHING, "phish", spec.phishing),
        (Label.NONPHISHING, "legit", spec.nonphishing),
    )
    for class_idx, (label, stem, cspec) in enumerate(per_class):
        probs = np.asarray(cspec.probabilities, dtype=float)
        for i in range(spec.docs_per_class):
            picks = rng.choice(len(cspec.words), size=spec.tokens_per_doc, p=probs)
            words = [cspec.words[j] for j in picks]
            doc_id = f"{stem}-{i:05d}"
            docs.append(
                WebDocument(
                    id=doc_id,
                    url=f"https://{stem}.example/{i:05d}",
                    label=label,
                    html=_wrap_html(doc_id, words),
                    fetched_at=spec.base_time + timedelta(minutes=2 * i + class_idx),
                    source=Source.SYNTHETIC,
                )
            )
    return from_documents(docs)
