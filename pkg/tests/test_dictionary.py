from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phishpress.corpus import Label, generate_synthetic_corpus, temporal_split
from phishpress.dictionary import (
    DICT_BYTE_BUDGET,
    LikelihoodTable,
    build_class_tables,
    build_dictionary,
    build_likelihood_table,
    likelihood_percentiles,
    load_dictionary,
    save_dictionary,
    sweep_threshold,
    top_k_words,
)
from phishpress.errors import (
    EmptyDictionary,
    EmptyTable,
    EmptyVocabulary,
    SweepFailed,
)
from phishpress.textprep import TokenSequence

from synthdata import disjoint_spec


def seq(*tokens):
    return TokenSequence("t", tuple(tokens))


def table_from_likelihoods(values: dict[str, float]) -> LikelihoodTable:
    # direct construction for ranking/percentile math tests
    return LikelihoodTable(
        class_label=Label.PHISHING,
        n_total=100,
        counts={w: 1 for w in values},
        vocab_size=len(values),
        likelihoods=dict(values),
    )


class TestLikelihoodTable:
    def test_hand_evaluated_counts(self):
        t = build_likelihood_table([seq("account", "password", "account")], 4)
        assert t.likelihood("account") == pytest.approx(3 / 7, abs=1e-12)
        assert t.likelihood("password") == pytest.approx(2 / 7, abs=1e-12)
        assert t.likelihood("shop") == pytest.approx(1 / 7, abs=1e-12)
        assert t.n_total == 3

    def test_empty_class_corpus_gives_uniform_prior(self):
        t = build_likelihood_table([], 5)
        assert t.likelihood("anything") == pytest.approx(0.2, abs=1e-12)

    def test_zero_vocabulary_rejected(self):
        with pytest.raises(EmptyVocabulary):
            build_likelihood_table([seq("a")], 0)

    def test_vocab_smaller_than_distinct_rejected(self):
        with pytest.raises(ValueError):
            build_likelihood_table([seq("a", "b", "c")], 2)

    def test_matches_exact_rational_oracle(self):
        rng = np.random.default_rng(17)
        vocab = ["w%d" % i for i in range(8)]
        for _ in range(50):
            n = int(rng.integers(0, 21))
            tokens = [vocab[i] for i in rng.integers(0, len(vocab), size=n)]
            t = build_likelihood_table([seq(*tokens)], len(vocab))
            for w in vocab:
                count = tokens.count(w)
                exact = Fraction(count + 1, n + len(vocab))
                assert round(t.likelihood(w), 12) == round(float(exact), 12)

    def test_normalization_over_full_vocabulary(self):
        rng = np.random.default_rng(201)
        for _ in range(20):
            vocab_size = int(rng.integers(1, 200))
            n = int(rng.integers(0, 3000))
            tokens = ["w%d" % i for i in rng.integers(0, vocab_size, size=n)]
            t = build_likelihood_table([seq(*tokens)], vocab_size)
            assert abs(t.full_likelihood_sum() - 1.0) < 1e-9

    @given(st.lists(st.integers(0, 9), max_size=60), st.integers(10, 50))
    @settings(max_examples=80, deadline=None)
    def test_normalization_property(self, picks, vocab_size):
        tokens = ["w%d" % i for i in picks]
        t = build_likelihood_table([seq(*tokens)], vocab_size)
        assert abs(t.full_likelihood_sum() - 1.0) < 1e-9

    def test_count_order_matches_likelihood_order(self):
        t = build_likelihood_table(
            [seq(*(["often"] * 7 + ["some"] * 3 + ["rare"]))], 10
        )
        words = ["often", "some", "rare"]
        for w1 in words:
            for w2 in words:
                c1, c2 = t.counts[w1], t.counts[w2]
                assert (c1 > c2) == (t.likelihood(w1) > t.likelihood(w2))

    def test_stored_k_caps_likelihood_map(self):
        tokens = ["w%d" % i for i in range(30) for _ in range(i + 1)]
        t = build_likelihood_table([seq(*tokens)], 30, stored_k=5)
        assert len(t.likelihoods) == 5
        assert set(t.likelihoods) == {"w29", "w28", "w27", "w26", "w25"}


class TestTopK:
    def test_sort_and_take(self):
        t = table_from_likelihoods({"a": 0.5, "b": 0.3, "c": 0.2})
        assert top_k_words(t, 2) == [("a", 0.5), ("b", 0.3)]

    def test_k_beyond_vocabulary(self):
        t = table_from_likelihoods({"a": 0.5, "b": 0.3})
        assert top_k_words(t, 10) == [("a", 0.5), ("b", 0.3)]

    def test_lexicographic_tie_break(self):
        t = table_from_likelihoods({"x": 0.5, "w": 0.5})
        assert top_k_words(t, 1) == [("w", 0.5)]


class TestPercentiles:
    def test_nearest_rank_on_ten_items(self):
        t = table_from_likelihoods({f"w{i}": i * 1e-4 for i in range(1, 11)})
        assert likelihood_percentiles(t, [0.5]) == [(0.5, 5e-4)]

    def test_percentile_one_is_maximum(self):
        t = table_from_likelihoods({f"w{i}": i * 1e-4 for i in range(1, 11)})
        assert likelihood_percentiles(t, [1.0]) == [(1.0, 1e-3)]

    def test_non_decreasing(self):
        t = table_from_likelihoods({f"w{i}": i * 7e-5 for i in range(1, 23)})
        points = likelihood_percentiles(t, [i / 10 for i in range(1, 11)])
        values = [v for _, v in points]
        assert values == sorted(values)

    def test_empty_table(self):
        t = table_from_likelihoods({"a": 0.1})
        empty = LikelihoodTable(Label.PHISHING, 0, {}, 5, {})
        with pytest.raises(EmptyTable):
            likelihood_percentiles(empty, [0.5])
        assert likelihood_percentiles(t, [1.0]) == [(1.0, 0.1)]

    def test_heavy_tailed_fixture_shape(self):
        # ~80% of stored words sit in [1e-5, 2e-4]: 800 tail words of count
        # 100 and 200 head words of count 4595 over |V|=1000 gives
        # (100+1)/1e6 in range and (4595+1)/1e6 well above it.
        tokens = []
        for i in range(800):
            tokens.extend([f"tail{i}"] * 100)
        for i in range(200):
            tokens.extend([f"head{i}"] * 4595)
        t = build_likelihood_table([seq(*tokens)], 1000)
        assert t.n_total + t.vocab_size == 1_000_000
        stored = list(t.likelihoods.values())
        in_range = sum(1e-5 <= v <= 2e-4 for v in stored)
        assert in_range / len(stored) == 0.8


class TestBuildDictionary:
    def test_filters_by_threshold(self):
        t = table_from_likelihoods({"a": 0.6, "b": 0.4})
        d = build_dictionary(t, 0.5)
        assert [w for w, _ in d.words] == ["a"]
        assert d.dict_bytes == b"a"

    def test_empty_dictionary_error(self):
        t = table_from_likelihoods({"a": 0.6, "b": 0.4})
        with pytest.raises(EmptyDictionary):
            build_dictionary(t, 0.7)

    def test_words_ascending_most_likely_last(self):
        t = table_from_likelihoods({"low": 0.2, "mid": 0.3, "high": 0.6})
        d = build_dictionary(t, 0.1)
        assert [w for w, _ in d.words] == ["low", "mid", "high"]
        assert d.dict_bytes == b"low mid high"

    def test_byte_budget_evicts_lowest_likelihood_first(self):
        values = {f"word{i:05d}": (i + 1) * 1e-5 for i in range(5000)}
        t = table_from_likelihoods(values)
        d = build_dictionary(t, 1e-9)
        assert len(d.dict_bytes) <= DICT_BYTE_BUDGET
        assert d.word_count < 5000
        kept = {w for w, _ in d.words}
        # the dropped words are exactly the lowest-likelihood ones
        dropped = set(values) - kept
        max_dropped = max(values[w] for w in dropped)
        min_kept = min(values[w] for w in kept)
        assert max_dropped < min_kept

    def test_monotone_in_threshold(self):
        t = table_from_likelihoods({f"w{i}": (i + 1) * 0.01 for i in range(30)})
        sizes = []
        for threshold in (0.005, 0.05, 0.15, 0.25):
            try:
                sizes.append(build_dictionary(t, threshold).word_count)
            except EmptyDictionary:
                sizes.append(0)
        assert sizes == sorted(sizes, reverse=True)

    def test_deterministic_bytes(self):
        spec = disjoint_spec(docs_per_class=10, vocab=30, seed=5)
        corpus = generate_synthetic_corpus(spec)
        outs = []
        for _ in range(2):
            phish, _, _ = build_class_tables(corpus)
            outs.append(build_dictionary(phish, 1e-4, corpus.fingerprint()).dict_bytes)
        assert outs[0] == outs[1]

    def test_save_load_roundtrip(self, tmp_path):
        t = table_from_likelihoods({"alpha": 0.3, "beta": 0.5})
        d = build_dictionary(t, 0.1, fingerprint="abc123")
        save_dictionary(d, tmp_path / "phish")
        loaded = load_dictionary(tmp_path / "phish.dict")
        assert loaded == d
        assert (tmp_path / "phish.dict").read_bytes() == d.dict_bytes


class TestSweep:
    def _corpora(self):
        spec = disjoint_spec(docs_per_class=40, vocab=50, seed=9)
        corpus = generate_synthetic_corpus(spec)
        ordered = sorted(corpus, key=lambda d: d.fetched_at)
        cutoff = ordered[60].fetched_at
        return temporal_split(corpus, cutoff)

    def test_separable_corpus_reaches_high_accuracy(self):
        train, holdout = self._corpora()
        report = sweep_threshold(train, holdout, [1e-4, 1e-3, 1e-2])
        assert report.best_accuracy >= 0.95
        assert any(p.accuracy is not None and p.accuracy >= 0.95 for p in report.grid)

    def test_too_high_threshold_point_is_skipped(self):
        train, holdout = self._corpora()
        report = sweep_threshold(train, holdout, [1e-3, 0.9])
        by_thr = {p.threshold: p for p in report.grid}
        assert by_thr[0.9].accuracy is None
        assert by_thr[1e-3].accuracy is not None

    def test_all_points_skipped_fails(self):
        train, holdout = self._corpora()
        with pytest.raises(SweepFailed):
            sweep_threshold(train, holdout, [0.8, 0.9])

    def test_best_threshold_is_smallest_at_max(self):
        train, holdout = self._corpora()
        report = sweep_threshold(train, holdout, [1e-4, 5e-4, 1e-3])
        best = report.best_accuracy
        firsts = [p.threshold for p in report.grid if p.accuracy == best]
        assert report.best_threshold == firsts[0]

    def test_grid_must_increase(self):
        train, holdout = self._corpora()
        with pytest.raises(ValueError):
            sweep_threshold(train, holdout, [1e-3, 1e-4])
