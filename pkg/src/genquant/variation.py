"""Build the per-quantifier surface variations of a base sentence.

Given a base sentence s with a property span, a (possibly empty) context c
and a candidate set Q, this produces the strings scored downstream: c and
the quantifier surface are joined to s with single spaces, and the span is
shifted onto the combined text. Sentence-initial words are capitalized
when there is no context; after any prefix the base keeps its stored
lowercase-initial form.
"""
from __future__ import annotations

from dataclasses import dataclass

from genquant.corpus import (
    CANONICAL_ORDER,
    PropertySpan,
    Quantifier,
    lower_first,
    upper_first,
)


class QuantifierPrefixError(ValueError):
    """The sentence does not start with the promised quantifier."""


#: Joiner between context and continuation. A single space is the minimal
#: natural-text join; changing it here changes every built variation.
CONTEXT_SEPARATOR = " "


@dataclass(frozen=True)
class Variation:
    quantifier: Quantifier
    full_text: str
    property_span_in_full: PropertySpan
    context_char_len: int
    separator_len: int = 1

    @property
    def property_text(self) -> str:
        span = self.property_span_in_full
        return self.full_text[span.start : span.end]

    @property
    def sentence_char_start(self) -> int:
        """Offset where the quantifier + base segment begins (after the
        context and its separator)."""
        return self.context_char_len + self.separator_len if self.context_char_len else 0


def strip_quantifier(sentence: str, label: Quantifier) -> tuple[str, int]:
    """Remove the leading quantifier, returning (base sentence, chars removed).

    The base keeps a lowercase first character unless the first token is
    acronym-like; GEN sentences are returned unshifted under the same case
    rule.
    """
    if label is Quantifier.GEN:
        return lower_first(sentence), 0
    prefix = label.surface + " "
    if not sentence.lower().startswith(prefix):
        raise QuantifierPrefixError(
            f"expected {sentence!r} to start with {label.surface!r}"
        )
    return lower_first(sentence[len(prefix) :]), len(prefix)


def build_variations(
    base: str,
    span: PropertySpan,
    context: str,
    candidates: list[Quantifier] | tuple[Quantifier, ...],
    capitalize: bool = True,
    separator: str = CONTEXT_SEPARATOR,
) -> list[Variation]:
    """One variation per candidate, in canonical order.

    With empty context the sentence-initial word (the quantifier surface,
    or the base's first word for GEN) is capitalized unless ``capitalize``
    is off; with context everything after the context stays lowercase.
    """
    span.validate(base)
    if not candidates:
        raise ValueError("empty candidate list")
    if len(set(candidates)) != len(candidates):
        raise ValueError("duplicate candidates")
    wanted = set(candidates)
    out = []
    for q in CANONICAL_ORDER:
        if q not in wanted:
            continue
        if context:
            if q is Quantifier.GEN:
                prefix = context + separator
            else:
                prefix = context + separator + q.surface + " "
            full_text = prefix + base
            shift = len(prefix)
        else:
            if q is Quantifier.GEN:
                full_text = upper_first(base) if capitalize else base
                shift = 0
            else:
                lead = upper_first(q.surface) if capitalize else q.surface
                full_text = lead + " " + base
                shift = len(q.surface) + 1
        out.append(
            Variation(
                quantifier=q,
                full_text=full_text,
                property_span_in_full=span.shifted(shift),
                context_char_len=len(context),
                separator_len=len(separator),
            )
        )
    return out
