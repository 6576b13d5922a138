"""HTML-to-text extraction and tokenization for dictionary building."""

from __future__ import annotations

import re
from dataclasses import dataclass
from html.parser import HTMLParser
from importlib import resources

_WORD_SPLIT = re.compile(r"[^a-z0-9]+")
_NUMERIC = re.compile(r"^[0-9]+$")


@dataclass(frozen=True)
class StopwordList:
    words: frozenset[str]
    source_name: str

    def __post_init__(self):
        if not self.words:
            raise ValueError("stopword list must be non-empty")
        if any(w != w.lower() for w in self.words):
            raise ValueError("stopword entries must be lowercase")

    def __contains__(self, word: str) -> bool:
        return word in self.words


@dataclass(frozen=True)
class TokenSequence:
    doc_id: str
    tokens: tuple[str, ...]


def default_stopwords() -> StopwordList:
    """The 179-word English stopword list shipped with the package."""
    text = resources.files("phishpress.data").joinpath("stopwords_english.txt").read_text("utf-8")
    return StopwordList(
        words=frozenset(w for w in text.splitlines() if w),
        source_name="english-179",
    )


class _TextExtractor(HTMLParser):
    """Collects visible text, skipping script/style/noscript and comments."""

    _SKIP = {"script", "style", "noscript"}

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self._skip_depth = 0
        self.chunks: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag in self._SKIP:
            self._skip_depth += 1

    def handle_endtag(self, tag):
        if tag in self._SKIP and self._skip_depth > 0:
            self._skip_depth -= 1

    def handle_data(self, data):
        if self._skip_depth == 0 and data:
            self.chunks.append(data)


def extract_text(html: bytes) -> str:
    """Visible text of a page: tags stripped, entities decoded, whitespace
    runs collapsed to single spaces. Invalid UTF-8 is replaced, not fatal."""
    decoded = html.decode("utf-8", errors="replace")
    parser = _TextExtractor()
    parser.feed(decoded)
    parser.close()
    return " ".join(" ".join(parser.chunks).split())


def tokenize(text: str, stopwords: StopwordList, doc_id: str = "") -> TokenSequence:
    """Lowercase, split on non-alphanumeric runs, drop empty/purely numeric
    tokens and stopwords. Order and multiplicity preserved."""
    tokens = [
        t
        for t in _WORD_SPLIT.split(text.lower())
        if t and not _NUMERIC.match(t) and t not in stopwords
    ]
    return TokenSequence(doc_id=doc_id, tokens=tuple(tokens))
