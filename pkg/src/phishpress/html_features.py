"""Binary HTML heuristics for phishing pages: bad forms, bad action fields,
and non-matching URLs.

All three detectors are pure functions of (html, page_url, config). Parsing
is error-tolerant: malformed fragments contribute nothing instead of
aborting, so a heuristic on an unparseable page is simply 0.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from html.parser import HTMLParser
from pathlib import Path
from typing import Iterable, Sequence
from urllib.parse import urljoin, urlparse

from .corpus import Corpus, Label
from .errors import EmptyCorpus

logger = logging.getLogger(__name__)

DEFAULT_SENSITIVE_KEYWORDS = frozenset(
    {
        "password",
        "credit card",
        "card number",
        "cvv",
        "ssn",
        "pin",
        "social security",
    }
)

SIMILARITY_CUTOFF = 0.9
THRESHOLD_GRID = tuple(round(0.05 * i, 2) for i in range(1, 20))  # 0.05 .. 0.95

_WEB_SCHEMES = ("http", "https", "")


@dataclass(frozen=True)
class HtmlFeatureVector:
    doc_id: str
    bad_form: int
    bad_action_field: int
    non_matching_urls: int


@dataclass(frozen=True)
class UrlSimilarityStats:
    total_links: int
    similar_fraction: float
    empty_or_illformed_fraction: float


@dataclass(frozen=True)
class NonMatchingThreshold:
    similar_threshold: float
    illformed_threshold: float
    fitted_on: str = ""


# --- tolerant page parsing ---------------------------------------------------

class _FormInfo:
    __slots__ = ("action", "has_action_attr", "has_input", "has_image", "text_chunks")

    def __init__(self, action: str | None, has_action_attr: bool):
        self.action = action or ""
        self.has_action_attr = has_action_attr
        self.has_input = False
        self.has_image = False
        self.text_chunks: list[str] = []

    @property
    def text(self) -> str:
        return " ".join(" ".join(self.text_chunks).split())


class _PageParser(HTMLParser):
    """Single pass collecting form scopes and anchor hrefs.

    Unclosed forms stay open to end of document; a nested form opens a new
    innermost scope. Script/style content never counts as form text.
    """

    _SKIP = {"script", "style", "noscript"}

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.forms: list[_FormInfo] = []
        self.hrefs: list[str] = []
        self._open_forms: list[_FormInfo] = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in self._SKIP:
            self._skip_depth += 1
            return
        attr_map = {k: (v if v is not None else "") for k, v in attrs}
        if tag == "form":
            form = _FormInfo(attr_map.get("action"), "action" in attr_map)
            self.forms.append(form)
            self._open_forms.append(form)
        elif tag == "input" and self._open_forms:
            self._open_forms[-1].has_input = True
        elif tag == "img" and self._open_forms:
            self._open_forms[-1].has_image = True
        elif tag == "a":
            self.hrefs.append(attr_map.get("href", ""))

    def handle_endtag(self, tag):
        if tag in self._SKIP:
            if self._skip_depth > 0:
                self._skip_depth -= 1
        elif tag == "form" and self._open_forms:
            self._open_forms.pop()

    def handle_data(self, data):
        if self._skip_depth == 0 and self._open_forms and data.strip():
            self._open_forms[-1].text_chunks.append(data)


def parse_page(html: bytes) -> _PageParser:
    parser = _PageParser()
    try:
        parser.feed(html.decode("utf-8", errors="replace"))
        parser.close()
    except Exception:  # pragma: no cover - HTMLParser is tolerant by design
        logger.debug("page parse aborted mid-way; using partial structure", exc_info=True)
    return parser


# --- registrable domains -----------------------------------------------------

# Minimal public-suffix subset: enough to keep common two-label country
# suffixes from being mistaken for registrable domains. Approximation; the
# full public-suffix list is out of scope.
_MULTI_LABEL_SUFFIXES = frozenset(
    {
        "co.uk", "org.uk", "ac.uk", "gov.uk", "me.uk", "net.uk",
        "com.au", "net.au", "org.au", "edu.au", "gov.au",
        "co.nz", "net.nz", "org.nz",
        "co.jp", "or.jp", "ne.jp", "ac.jp", "go.jp",
        "com.br", "net.br", "org.br",
        "com.mx", "com.ar", "com.tr", "com.cn", "com.tw", "com.hk",
        "com.sg", "com.my", "co.in", "co.za", "co.kr", "com.vn",
    }
)


def registrable_domain(host: str) -> str:
    host = host.lower().rstrip(".").split(":")[0]
    labels = host.split(".")
    if len(labels) <= 2:
        return host
    if ".".join(labels[-2:]) in _MULTI_LABEL_SUFFIXES:
        return ".".join(labels[-3:])
    return ".".join(labels[-2:])


# --- detectors ----------------------------------------------------------------

def detect_bad_form(
    html: bytes,
    page_url: str,
    sensitive_keywords: frozenset[str] | set[str] = DEFAULT_SENSITIVE_KEYWORDS,
) -> int:
    """1 iff some form has an input, sensitive keywords (or images with no
    text) in its scope, and a non-https action URL (the page URL standing in
    when the action is empty)."""
    page = parse_page(html)
    for form in page.forms:
        if not form.has_input:
            continue
        text = form.text.lower()
        keyword_hit = any(kw in text for kw in sensitive_keywords)
        image_only = form.has_image and not text
        if not (keyword_hit or image_only):
            continue
        resolved = urljoin(page_url, form.action)
        if urlparse(resolved).scheme != "https":
            return 1
    return 0


def detect_bad_action_field(html: bytes, page_url: str) -> int:
    """1 iff any form action is empty, a bare file name, or points to a
    different registrable domain than the page."""
    page = parse_page(html)
    page_domain = registrable_domain(urlparse(page_url).netloc)
    for form in page.forms:
        action = form.action.strip()
        if not action:
            return 1
        parsed = urlparse(action)
        if parsed.netloc:
            if registrable_domain(parsed.netloc) != page_domain:
                return 1
            continue
        if parsed.scheme:  # non-http action like javascript:, not a file name
            continue
        if "/" not in action:
            return 1  # simple file name such as login.php
    return 0


def _levenshtein_within(a: str, b: str, max_dist: int) -> bool:
    """True iff edit distance(a, b) <= max_dist; banded DP with early exit."""
    if abs(len(a) - len(b)) > max_dist:
        return False
    if a == b:
        return True
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        row_min = i
        for j, cb in enumerate(b, start=1):
            cost = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb))
            cur.append(cost)
            row_min = min(row_min, cost)
        if row_min > max_dist:
            return False
        prev = cur
    return prev[-1] <= max_dist


def _similar(a: str, b: str, cutoff: float) -> bool:
    longest = max(len(a), len(b))
    if longest == 0:
        return True
    # sim = 1 - dist/longest >= cutoff  <=>  dist <= (1 - cutoff) * longest
    # (epsilon guards the boundary against float rounding, e.g. 0.1 * 10)
    return _levenshtein_within(a, b, int((1.0 - cutoff) * longest + 1e-9))


def url_similarity_stats(
    html: bytes, page_url: str, cutoff: float = SIMILARITY_CUTOFF
) -> UrlSimilarityStats:
    """Share of empty/ill-formed hrefs and the largest cluster share of
    highly similar absolute link URLs (connected components under
    normalized edit similarity >= ``cutoff``)."""
    page = parse_page(html)
    total = len(page.hrefs)
    if total == 0:
        return UrlSimilarityStats(0, 0.0, 0.0)
    bad = 0
    links: list[str] = []
    for href in page.hrefs:
        href = href.strip()
        if not href or href == "#":
            bad += 1
            continue
        try:
            resolved = urljoin(page_url, href)
            scheme = urlparse(resolved).scheme
        except ValueError:
            bad += 1
            continue
        if scheme not in ("http", "https"):
            bad += 1
            continue
        links.append(resolved)

    similar_fraction = 0.0
    if links:
        parent = list(range(len(links)))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i in range(len(links)):
            for j in range(i + 1, len(links)):
                if _similar(links[i], links[j], cutoff):
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        parent[ri] = rj
        sizes: dict[int, int] = {}
        for i in range(len(links)):
            root = find(i)
            sizes[root] = sizes.get(root, 0) + 1
        similar_fraction = max(sizes.values()) / len(links)

    return UrlSimilarityStats(
        total_links=total,
        similar_fraction=similar_fraction,
        empty_or_illformed_fraction=bad / total,
    )


def detect_non_matching_urls(stats: UrlSimilarityStats, thr: NonMatchingThreshold) -> int:
    """Strict inequality at both boundaries."""
    return int(
        stats.similar_fraction > thr.similar_threshold
        or stats.empty_or_illformed_fraction > thr.illformed_threshold
    )


def fit_nonmatching_threshold(
    train: Corpus, grid: Sequence[float] = THRESHOLD_GRID
) -> NonMatchingThreshold:
    """Grid-search both thresholds maximizing TP+TN on the training corpus;
    ties resolve to the smallest (similar, illformed) pair."""
    labeled = [d for d in train if d.label in (Label.PHISHING, Label.NONPHISHING)]
    if not labeled:
        raise EmptyCorpus("threshold fitting needs labeled documents")
    stats = [(url_similarity_stats(d.html, d.url), d.label) for d in labeled]
    best: tuple[int, float, float] | None = None
    for s_thr in grid:
        for i_thr in grid:
            thr = NonMatchingThreshold(s_thr, i_thr)
            correct = 0
            for st, label in stats:
                flagged = detect_non_matching_urls(st, thr)
                correct += flagged == (1 if label is Label.PHISHING else 0)
            if best is None or correct > best[0]:
                best = (correct, s_thr, i_thr)
    assert best is not None
    return NonMatchingThreshold(best[1], best[2], fitted_on=train.fingerprint())


# --- feature rows --------------------------------------------------------------

def extract_features(
    corpus: Corpus | Iterable,
    nonmatching: NonMatchingThreshold,
    sensitive_keywords: frozenset[str] | set[str] = DEFAULT_SENSITIVE_KEYWORDS,
) -> list[HtmlFeatureVector]:
    rows = []
    for doc in corpus:
        stats = url_similarity_stats(doc.html, doc.url)
        rows.append(
            HtmlFeatureVector(
                doc_id=doc.id,
                bad_form=detect_bad_form(doc.html, doc.url, sensitive_keywords),
                bad_action_field=detect_bad_action_field(doc.html, doc.url),
                non_matching_urls=detect_non_matching_urls(stats, nonmatching),
            )
        )
    return rows


def save_threshold(thr: NonMatchingThreshold, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(
        json.dumps(
            {
                "similar_threshold": thr.similar_threshold,
                "illformed_threshold": thr.illformed_threshold,
                "fitted_on": thr.fitted_on,
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    return path


def load_threshold(path: str | Path) -> NonMatchingThreshold:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return NonMatchingThreshold(
        similar_threshold=float(raw["similar_threshold"]),
        illformed_threshold=float(raw["illformed_threshold"]),
        fitted_on=raw.get("fitted_on", ""),
    )
