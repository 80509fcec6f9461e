"""Surprisal scoring and quantifier selection.

For every candidate quantifier q the variation c+q+s is scored; the
property surprisal H_p is the mean negative logprob (nats/token) over the
tokens overlapping the property span, and the winning quantifier is the
one minimizing H_p, with ties broken in canonical order. The full-sentence
surprisal H averages over the q+s tokens only: context tokens condition
the model but are never averaged.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from statistics import fmean
from typing import Mapping, Sequence

from genquant.backends import Backend
from genquant.corpus import CANONICAL_ORDER, CorpusSample, Quantifier
from genquant.variation import Variation, build_variations

logger = logging.getLogger(__name__)

#: h_p differences below this (nats/token) count as a tie.
DEFAULT_TIE_EPSILON = 1e-9


class SpanAlignmentError(Exception):
    """No scoreable token overlaps the property span."""


@dataclass(frozen=True)
class SurprisalScore:
    h_p: float  # mean -logprob over property tokens, nats/token
    h_full: float  # mean -logprob over the quantifier+sentence tokens
    n_property_tokens: int


@dataclass(frozen=True)
class PAcceptabilityResult:
    sample_id: str
    context_tokens_used: int
    per_quantifier: Mapping[Quantifier, SurprisalScore]
    winner: Quantifier
    tie: bool
    margin: float  # h_p gap between best and second best; inf for one candidate

    def to_obj(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "context_tokens_used": self.context_tokens_used,
            "winner": self.winner.label,
            "tie": self.tie,
            "margin": self.margin if math.isfinite(self.margin) else None,
            "per_quantifier": {
                q.label: {
                    "h_p": s.h_p,
                    "h_full": s.h_full,
                    "n_property_tokens": s.n_property_tokens,
                }
                for q, s in self.per_quantifier.items()
            },
        }


def _overlaps_nonspace(text: str, tok_start: int, tok_end: int, lo: int, hi: int) -> bool:
    start = max(tok_start, lo)
    end = min(tok_end, hi)
    return start < end and bool(text[start:end].strip())


def property_surprisal(backend: Backend, variation: Variation) -> SurprisalScore:
    """Score one variation.

    A token belongs to the property set iff it overlaps the property span
    by at least one non-whitespace character; the same overlap rule maps
    tokens onto the quantifier+sentence segment for h_full. Tokens without
    a logprob (the sequence-initial one) are skipped with a warning.
    """
    seq = backend.score_text(variation.full_text)
    span = variation.property_span_in_full
    qs_start = variation.sentence_char_start
    prop_terms: list[float] = []
    full_terms: list[float] = []
    n_skipped = 0
    for tok in seq.tokens:
        in_span = _overlaps_nonspace(seq.text, tok.char_start, tok.char_end, span.start, span.end)
        in_sentence = _overlaps_nonspace(
            seq.text, tok.char_start, tok.char_end, qs_start, len(seq.text)
        )
        if tok.logprob is None:
            if in_span:
                n_skipped += 1
            continue
        if in_span:
            prop_terms.append(-tok.logprob)
        if in_sentence:
            full_terms.append(-tok.logprob)
    if n_skipped:
        logger.warning(
            "property span includes the sequence-initial token of %r; skipped",
            variation.full_text[:40],
        )
    if not prop_terms:
        raise SpanAlignmentError(
            f"no scoreable token overlaps span "
            f"[{span.start}, {span.end}) of {variation.full_text!r}"
        )
    return SurprisalScore(
        h_p=fmean(prop_terms),
        h_full=fmean(full_terms),
        n_property_tokens=len(prop_terms),
    )


def select_winner(
    per_quantifier: Mapping[Quantifier, SurprisalScore],
    by: str = "h_p",
    tie_epsilon: float = DEFAULT_TIE_EPSILON,
) -> tuple[Quantifier, bool, float]:
    """Argmin over candidates with canonical-order tie-breaking.

    Returns (winner, tie flag, margin). The winner is the first quantifier
    in canonical order attaining the exact minimum; the tie flag is set
    when the gap to the second-best value is below ``tie_epsilon``.
    """
    ordered = [q for q in CANONICAL_ORDER if q in per_quantifier]
    if not ordered:
        raise ValueError("empty candidate scores")
    values = {q: getattr(per_quantifier[q], by) for q in ordered}
    winner = ordered[0]
    for q in ordered[1:]:
        if values[q] < values[winner]:
            winner = q
    others = [values[q] for q in ordered if q is not winner]
    margin = min(others) - values[winner] if others else math.inf
    return winner, margin < tie_epsilon, margin


def truncate_context(backend: Backend, context: str, k: int) -> str:
    """Suffix of ``context`` covering its last ``k`` backend tokens.

    Slices at token boundaries and strips leading whitespace; ``k = 0``
    yields the empty string and ``k`` at or beyond the token count yields
    the full context.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0 or not context.strip():
        return ""
    spans = backend.tokenize(context)
    if k >= len(spans):
        return context
    start = spans[len(spans) - k][0]
    return context[start:].lstrip()


def context_token_count(backend: Backend, context: str) -> int:
    if not context.strip():
        return 0
    return len(backend.tokenize(context))


def p_acceptable(
    backend: Backend,
    sample: CorpusSample,
    candidates: Sequence[Quantifier] = CANONICAL_ORDER,
    context_tokens: int | None = 0,
    tie_epsilon: float = DEFAULT_TIE_EPSILON,
    capitalize: bool = True,
    context_override: str | None = None,
) -> PAcceptabilityResult:
    """The quantifier whose variation has the lowest property surprisal.

    ``context_tokens`` selects how much left context conditions the
    scores: 0 for none, a positive k for the last k backend tokens, None
    for the full context. ``context_override`` substitutes a different
    context text (used by the random-context control). Scoring failures in
    any variation abort the whole sample; a partial argmin would be
    meaningless.
    """
    raw_context = sample.context if context_override is None else context_override
    if context_tokens is None:
        context = raw_context if raw_context.strip() else ""
        used = context_token_count(backend, context)
    elif context_tokens == 0:
        context, used = "", 0
    else:
        context = truncate_context(backend, raw_context, context_tokens)
        used = min(context_tokens, context_token_count(backend, raw_context))
    variations = build_variations(
        sample.base_sentence,
        sample.property_span,
        context,
        list(candidates),
        capitalize=capitalize,
    )
    per_quantifier = {v.quantifier: property_surprisal(backend, v) for v in variations}
    winner, tie, margin = select_winner(per_quantifier, "h_p", tie_epsilon)
    return PAcceptabilityResult(
        sample_id=sample.id,
        context_tokens_used=used,
        per_quantifier=per_quantifier,
        winner=winner,
        tie=tie,
        margin=margin,
    )
