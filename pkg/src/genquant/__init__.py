"""genquant: which quantifier does a language model find most natural?

Given a sentence like "tigers have stripes" the toolkit scores the
variations "all/most/some tigers have stripes" (and the bare generic)
with a logprob-serving model and picks the quantifier that minimizes the
mean surprisal of the property tokens. On top of that single metric it
ships corpus ingestion, candidate mining, a score cache and the full set
of experiment drivers (confusion, implicit quantification, context
sweeps, stereotype paraphrases, whole-sequence comparison).
"""

__version__ = "0.1.0"

from genquant.backends import (
    Backend,
    BackendError,
    BackendRequestError,
    HttpBackend,
    MockBackend,
    ProtocolError,
    ScoredSequence,
    ScoredToken,
    TransportError,
)
from genquant.cache import CachedBackend, FileStore, cached
from genquant.corpus import (
    CANONICAL_ORDER,
    CorpusSample,
    PropertySpan,
    Quantifier,
    StereotypeSeed,
    generate_stereotype_dataset,
    load_bundled_seeds,
    read_samples,
    write_samples,
)
from genquant.scoring import (
    DEFAULT_TIE_EPSILON,
    PAcceptabilityResult,
    SpanAlignmentError,
    SurprisalScore,
    p_acceptable,
    property_surprisal,
    select_winner,
    truncate_context,
)
from genquant.variation import Variation, build_variations, strip_quantifier

__all__ = [
    "__version__",
    "Backend",
    "BackendError",
    "BackendRequestError",
    "CachedBackend",
    "CANONICAL_ORDER",
    "CorpusSample",
    "DEFAULT_TIE_EPSILON",
    "FileStore",
    "HttpBackend",
    "MockBackend",
    "PAcceptabilityResult",
    "PropertySpan",
    "ProtocolError",
    "Quantifier",
    "ScoredSequence",
    "ScoredToken",
    "SpanAlignmentError",
    "StereotypeSeed",
    "SurprisalScore",
    "TransportError",
    "Variation",
    "build_variations",
    "cached",
    "generate_stereotype_dataset",
    "load_bundled_seeds",
    "p_acceptable",
    "property_surprisal",
    "read_samples",
    "select_winner",
    "strip_quantifier",
    "truncate_context",
    "write_samples",
]
