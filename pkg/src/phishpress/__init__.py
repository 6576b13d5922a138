"""phishpress: compression-based phishing page detection.

Two DEFLATE models carry class-specific preset dictionaries built from word
occurrence likelihoods; a page is classified by which model compresses its
raw HTML further. Compression ratios double as ML features alongside three
binary HTML heuristics.
"""

from .corpus import (
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
from .compressor import (
    ClassificationResult,
    CompressionModel,
    CompressionOutcome,
    classify,
    classify_batch,
    compress_with_dictionary,
    compression_ratio,
    decompress_with_dictionary,
)
from .dictionary import (
    DictionaryModel,
    LikelihoodTable,
    ThresholdSweepReport,
    build_dictionary,
    build_likelihood_table,
    likelihood_percentiles,
    sweep_threshold,
    top_k_words,
)
from .evaluation import (
    ConfusionCounts,
    ImbalancedEvalReport,
    MetricsReport,
    PipelineConfig,
    compute_metrics,
    evaluate_pipeline,
    imbalanced_eval,
)
from .fetch import fetch_url
from .html_features import (
    HtmlFeatureVector,
    NonMatchingThreshold,
    UrlSimilarityStats,
    detect_bad_action_field,
    detect_bad_form,
    detect_non_matching_urls,
    fit_nonmatching_threshold,
    url_similarity_stats,
)
from .textprep import StopwordList, TokenSequence, default_stopwords, extract_text, tokenize

__version__ = "0.1.0"
