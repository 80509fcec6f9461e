from __future__ import annotations

import math

import pytest

from genquant.backends import MockBackend, ScoredSequence, ScoredToken
from genquant.corpus import CorpusSample, PropertySpan, Quantifier
from genquant.variation import build_variations


def span_over(base: str, fragment: str) -> PropertySpan:
    """Span of the first occurrence of ``fragment`` in ``base``."""
    start = base.index(fragment)
    return PropertySpan(start, start + len(fragment))


def make_sample(
    sample_id: str,
    base: str,
    fragment: str,
    quantifier: Quantifier = Quantifier.GEN,
    context: str = "",
    source: str = "other",
    metadata: dict | None = None,
    span: PropertySpan | None = None,
) -> CorpusSample:
    if quantifier is Quantifier.GEN:
        sentence = base
    else:
        sentence = f"{quantifier.surface} {base}"
    sample = CorpusSample(
        id=sample_id,
        source=source,
        context=context,
        sentence=sentence,
        original_quantifier=quantifier,
        base_sentence=base,
        property_span=span if span is not None else span_over(base, fragment),
        metadata=metadata or {},
    )
    sample.validate()
    return sample


def rig_table(
    sample: CorpusSample,
    winner: Quantifier,
    candidates=tuple(Quantifier),
    context: str = "",
    best_p: float = 0.9,
    other_p: float = 0.1,
) -> dict[tuple[str, str], float]:
    """Table entries making ``winner`` the lowest-surprisal candidate.

    Assumes a single-token property; every property token of the winning
    variation gets ``best_p`` and the others ``other_p``.
    """
    table = {}
    for v in build_variations(sample.base_sentence, sample.property_span, context, list(candidates)):
        prefix = v.full_text[: v.property_span_in_full.start].rstrip()
        token = v.property_text.strip()
        table[(prefix, token)] = best_p if v.quantifier is winner else other_p
    return table


class CountingBackend:
    """Wrapper that counts upstream score_text calls."""

    def __init__(self, inner):
        self.inner = inner
        self.calls = 0

    @property
    def backend_id(self):
        return self.inner.backend_id

    def score_text(self, text):
        self.calls += 1
        return self.inner.score_text(text)

    def tokenize(self, text):
        return self.inner.tokenize(text)


class ScalingBackend:
    """Multiply every logprob by a positive constant (log-base changes
    and positive rescalings for the argmin-invariance checks)."""

    def __init__(self, inner, factor: float):
        assert factor > 0
        self.inner = inner
        self.factor = factor
        self.backend_id = f"{inner.backend_id}*{factor}"

    def score_text(self, text):
        seq = self.inner.score_text(text)
        tokens = tuple(
            ScoredToken(
                t.text,
                None if t.logprob is None else t.logprob * self.factor,
                t.char_start,
                t.char_end,
            )
            for t in seq.tokens
        )
        return ScoredSequence(text=seq.text, tokens=tokens, backend_id=self.backend_id)

    def tokenize(self, text):
        return self.inner.tokenize(text)


@pytest.fixture
def tiger_sample() -> CorpusSample:
    return make_sample("tiger", "tigers have stripes", "stripes")


@pytest.fixture
def tiger_backend() -> MockBackend:
    return MockBackend(
        {
            ("Tigers have", "stripes"): 0.4,
            ("All tigers have", "stripes"): 0.25,
            ("Most tigers have", "stripes"): 0.5,
            ("Some tigers have", "stripes"): 0.1,
        },
        vocab_size=1000,
        backend_id="mock-tiger",
    )


TIGER_HP = {
    Quantifier.GEN: -math.log(0.4),
    Quantifier.ALL: -math.log(0.25),
    Quantifier.MOST: -math.log(0.5),
    Quantifier.SOME: -math.log(0.1),
}
