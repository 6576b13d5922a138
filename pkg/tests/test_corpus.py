import math
from collections import Counter
from datetime import datetime, timedelta, timezone

import pytest

from phishpress.corpus import (
    ClassSpec,
    Corpus,
    Label,
    Source,
    SyntheticSpec,
    WebDocument,
    generate_synthetic_corpus,
    load_corpus,
    save_corpus,
    temporal_split,
)
from phishpress.errors import EmptySplit, InvalidDistribution
from phishpress.textprep import extract_text

from synthdata import disjoint_spec

UTC = timezone.utc


def doc(i, when, label=Label.PHISHING, html=b"<p>x</p>"):
    return WebDocument(
        id=f"d{i}", url=f"https://s.example/{i}", label=label, html=html,
        fetched_at=when,
    )


class TestWebDocument:
    def test_rejects_relative_url(self):
        with pytest.raises(ValueError):
            WebDocument("a", "/page", Label.UNKNOWN, b"x", datetime.now(UTC))

    def test_rejects_non_http_scheme(self):
        with pytest.raises(ValueError):
            WebDocument("a", "ftp://x.example/", Label.UNKNOWN, b"x", datetime.now(UTC))

    def test_rejects_naive_timestamp(self):
        with pytest.raises(ValueError):
            WebDocument("a", "https://x.example/", Label.UNKNOWN, b"x", datetime(2019, 1, 1))


class TestCorpus:
    def test_duplicate_ids_rejected(self):
        t = datetime(2019, 1, 1, tzinfo=UTC)
        with pytest.raises(ValueError):
            Corpus((doc(1, t), doc(1, t)))

    def test_fingerprint_is_order_independent(self):
        t = datetime(2019, 1, 1, tzinfo=UTC)
        a, b = doc(1, t), doc(2, t)
        assert Corpus((a, b)).fingerprint() == Corpus((b, a)).fingerprint()

    def test_fingerprint_tracks_content(self):
        t = datetime(2019, 1, 1, tzinfo=UTC)
        c1 = Corpus((doc(1, t, html=b"<p>a</p>"),))
        c2 = Corpus((doc(1, t, html=b"<p>b</p>"),))
        assert c1.fingerprint() != c2.fingerprint()


class TestManifestRoundtrip:
    def test_html_bytes_bit_exact(self, tmp_path):
        t = datetime(2019, 3, 2, 4, 5, tzinfo=UTC)
        raw = b"<html>\xff\xfe raw bytes \x00</html>"  # invalid UTF-8 on purpose
        corpus = Corpus((doc(1, t, html=raw), doc(2, t + timedelta(days=1))))
        save_corpus(corpus, tmp_path)
        loaded = load_corpus(tmp_path)
        assert len(loaded) == 2
        assert loaded.documents[0].html == raw
        assert loaded.documents[0].fetched_at == t
        assert loaded.documents[0].label is Label.PHISHING
        assert loaded.documents[0].source is Source.IMPORTED

    def test_manifest_is_jsonl(self, tmp_path):
        t = datetime(2019, 3, 2, tzinfo=UTC)
        save_corpus(Corpus((doc(1, t),)), tmp_path)
        import json
        lines = (tmp_path / "manifest.jsonl").read_text().splitlines()
        rec = json.loads(lines[0])
        assert set(rec) == {"id", "url", "label", "fetched_at", "brand", "path"}


class TestTemporalSplit:
    def test_partitions_by_cutoff(self):
        base = datetime(2019, 1, 1, tzinfo=UTC)
        docs = [doc(i, base + timedelta(days=i)) for i in range(10)]
        train, test = temporal_split(Corpus(tuple(docs)), base + timedelta(days=8))
        assert (len(train), len(test)) == (8, 2)
        train_ids = {d.id for d in train}
        test_ids = {d.id for d in test}
        assert not train_ids & test_ids
        assert len(train_ids | test_ids) == len(docs)

    def test_all_after_cutoff_is_empty_split(self):
        base = datetime(2019, 5, 1, tzinfo=UTC)
        docs = [doc(i, base + timedelta(days=i)) for i in range(3)]
        with pytest.raises(EmptySplit):
            temporal_split(Corpus(tuple(docs)), base)


class TestSyntheticCorpus:
    def test_deterministic_given_seed(self):
        spec = disjoint_spec(docs_per_class=20, seed=7)
        c1 = generate_synthetic_corpus(spec)
        c2 = generate_synthetic_corpus(spec)
        assert [d.html for d in c1] == [d.html for d in c2]
        assert len(c1.by_label(Label.PHISHING)) == 20
        assert len(c1.by_label(Label.NONPHISHING)) == 20

    def test_invalid_distribution_rejected(self):
        bad = ClassSpec(("a", "b"), (0.5, 0.4))
        spec = SyntheticSpec(phishing=bad, nonphishing=bad, docs_per_class=2)
        with pytest.raises(InvalidDistribution):
            generate_synthetic_corpus(spec)

    def test_sampled_frequencies_converge(self):
        # multinomial oracle: observed rates within 3 standard errors at 10k tokens
        spec = disjoint_spec(docs_per_class=1, vocab=20, tokens_per_doc=10_000, seed=3)
        corpus = generate_synthetic_corpus(spec)
        page = corpus.by_label(Label.PHISHING)[0]
        counts = Counter(extract_text(page.html).split())
        n = sum(counts[w] for w in spec.phishing.words)
        assert n == 10_000
        for word, p in zip(spec.phishing.words, spec.phishing.probabilities):
            se = math.sqrt(p * (1 - p) / n)
            assert abs(counts[word] / n - p) <= 3 * se, word

    def test_labels_interleave_in_time(self):
        spec = disjoint_spec(docs_per_class=10)
        corpus = generate_synthetic_corpus(spec)
        ordered = sorted(corpus, key=lambda d: d.fetched_at)
        midpoint = ordered[len(ordered) // 2].fetched_at
        train, test = temporal_split(corpus, midpoint)
        assert {d.label for d in train} == {Label.PHISHING, Label.NONPHISHING}
        assert {d.label for d in test} == {Label.PHISHING, Label.NONPHISHING}
