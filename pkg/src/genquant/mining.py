"""Mine candidate bare-plural generalisations from raw document streams.

Documents are split into sentences, pushed through cheap deterministic
filters (exclusion pattern, passive-voice heuristic, optionally the
bare-plural check) and, when a classifier scorer is configured, kept only
above its threshold. Emitted candidates carry the full filter trace and
their left context so they can be annotated into corpus samples.
"""
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator, Mapping

from genquant import tagging
from genquant.corpus import infer_property_span, InvalidSampleError
from genquant.tagging import RuleTagger

logger = logging.getLogger(__name__)

# Hand-tuned pattern of words rarely compatible with the bare-plural
# generalisations we mine; kept verbatim as data. Every alternative is
# pinned by a golden test.
EXCLUSION_PATTERN = (
    "is | may | can | should | would | must | have to | will | you |^i | were "
    "| was | many | we | they | ought | your |^[^ ]+ of | us | \\? | this "
    "| that | those | these | all in all |,|^the |^a |than "
)

EXCLUSION_ALTERNATIVES: tuple[str, ...] = tuple(EXCLUSION_PATTERN.split("|"))

_EXCLUSION_RE = re.compile(EXCLUSION_PATTERN, re.IGNORECASE)

PASSIVE_BE_FORMS = frozenset(["are", "were", "being", "been", "be"])


@dataclass(frozen=True)
class FilterResult:
    name: str
    outcome: str  # "pass" | "fail" | "skipped"
    detail: str | None = None

    @property
    def passed(self) -> bool:
        return self.outcome != "fail"


def exclusion_filter(sentence: str) -> FilterResult:
    """Fail iff the verbatim exclusion pattern matches (case-insensitive).

    The reported detail is the first-listed alternative matching at the
    leftmost position, mirroring the regex engine's choice.
    """
    if not _EXCLUSION_RE.search(sentence):
        return FilterResult("exclusion", "pass")
    best: tuple[int, int] | None = None
    best_alt = None
    for idx, alt in enumerate(EXCLUSION_ALTERNATIVES):
        m = re.search(alt, sentence, re.IGNORECASE)
        if m and (best is None or (m.start(), idx) < best):
            best = (m.start(), idx)
            best_alt = alt
    return FilterResult("exclusion", "fail", best_alt)


def passive_filter(sentence: str) -> FilterResult:
    """Heuristic passive-voice rejection.

    Fails when a plural be-form is followed within two tokens (one
    intervening adverb allowed) by a probable past participle: a regular
    -ed/-en form or a member of the bundled irregular list.
    """
    ws = tagging.words(sentence)
    lowered = [w.lower() for w in ws]
    for i, w in enumerate(lowered):
        if w not in PASSIVE_BE_FORMS:
            continue
        nxt = lowered[i + 1] if i + 1 < len(lowered) else None
        nxt2 = lowered[i + 2] if i + 2 < len(lowered) else None
        if nxt and tagging.looks_like_participle(nxt):
            return FilterResult("passive", "fail", f"{w} {nxt}")
        if (
            nxt
            and nxt2
            and (nxt in tagging.ADVERBS or (nxt.endswith("ly") and len(nxt) >= 4))
            and tagging.looks_like_participle(nxt2)
        ):
            return FilterResult("passive", "fail", f"{w} {nxt} {nxt2}")
    return FilterResult("passive", "pass")


def bare_plural_filter(sentence: str, tagger: RuleTagger | None = None) -> FilterResult:
    """Keep only plural-subject, present-indicative sentences.

    Requires the subject noun phrase to carry no leading article and to be
    plural, and the main verb to be a plural present form. Tagger failures
    fail closed.
    """
    tagger = tagger or RuleTagger()
    try:
        tags = tagger.tag(sentence)
    except Exception as exc:  # pluggable tagger; never let it crash mining
        logger.warning("tagger failure on %r: %s", sentence[:60], exc)
        return FilterResult("bare_plural", "fail", f"tagger error: {exc}")
    if len(tags) < 2:
        return FilterResult("bare_plural", "fail", "too short")
    if tags[0].pos in ("DET", "PRON"):
        return FilterResult("bare_plural", "fail", f"leading {tags[0].pos.lower()}: {tags[0].text}")
    verb_idx = tagging.main_verb_index([t.text for t in tags])
    if verb_idx is None:
        return FilterResult("bare_plural", "fail", "no main verb found")
    verb = tags[verb_idx]
    if verb.pos == "VERB":
        if verb.tense != "pres" or verb.number == "sing":
            return FilterResult("bare_plural", "fail", f"verb not plural present: {verb.text}")
    else:
        w = verb.text.lower()
        if tagging.looks_like_participle(w) or (w.endswith("s") and not w.endswith("ss")):
            return FilterResult("bare_plural", "fail", f"verb not plural present: {verb.text}")
    subject_head = tags[verb_idx - 1]
    if not tagging.looks_like_plural_noun(subject_head.text):
        return FilterResult("bare_plural", "fail", f"subject not plural: {subject_head.text}")
    return FilterResult("bare_plural", "pass")


FILTERS: dict[str, Callable[[str], FilterResult]] = {
    "exclusion": exclusion_filter,
    "passive": passive_filter,
    "bare_plural": bare_plural_filter,
}


# ---------------------------------------------------------------------------
# Sentence splitting

_ABBREVIATIONS = frozenset(
    """dr mr mrs ms prof sr jr st etc e.g i.e vs fig no dept inc ltd co corp
    jan feb mar apr jun jul aug sep sept oct nov dec approx est min max
    u.s u.k u.n a.m p.m ph.d""".split()
)

_BOUNDARY_RE = re.compile(r"[.!?]+")


def split_sentences(text: str) -> list[tuple[int, int]]:
    """Spans of sentences, split on terminal punctuation.

    A period is not a boundary when the preceding word is a known
    abbreviation or a single letter (initials), or when it is not followed
    by whitespace (decimals, URLs).
    """
    boundaries = []
    for m in _BOUNDARY_RE.finditer(text):
        end = m.end()
        if end < len(text) and not text[end].isspace():
            continue
        if "." in m.group():
            before = text[: m.start()]
            word = before.split()[-1] if before.split() else ""
            word = word.strip("\"'()[]").lower()
            if word in _ABBREVIATIONS or (len(word) == 1 and word.isalpha()):
                continue
        boundaries.append(end)
    spans = []
    start = 0
    for b in boundaries:
        chunk = text[start:b]
        stripped = chunk.strip()
        if stripped:
            lead = len(chunk) - len(chunk.lstrip())
            spans.append((start + lead, start + lead + len(stripped)))
        start = b
    tail = text[start:].strip()
    if tail:
        lead = len(text[start:]) - len(text[start:].lstrip())
        spans.append((start + lead, start + lead + len(tail)))
    return spans


# ---------------------------------------------------------------------------
# Mining driver


@dataclass(frozen=True)
class MiningConfig:
    threshold: float = 0.7
    filters: tuple[str, ...] = ("exclusion", "passive")
    drop_duplicates: bool = True
    source: str = "other"


@dataclass(frozen=True)
class CandidateSentence:
    document_id: str
    sentence: str
    context: str
    classifier_score: float | None
    filter_trace: tuple[FilterResult, ...]


Scorer = Callable[[str], float]


def keyword_stub_scorer(sentence: str) -> float:
    """Test stub: fraction of words that look like generalisation verbs."""
    ws = [w.lower() for w in tagging.words(sentence)]
    if not ws:
        return 0.0
    hits = sum(1 for w in ws if w in tagging.COMMON_BASE_VERBS or w in ("are", "have"))
    return min(1.0, 2.0 * hits / len(ws))


def mine(
    documents: Iterable[Mapping[str, Any]],
    scorer: Scorer | None = None,
    config: MiningConfig = MiningConfig(),
) -> Iterator[CandidateSentence]:
    """Stream candidates out of {id, text} documents.

    Filters run in configured order; the classifier (when present) runs
    last and keeps sentences with score strictly above the threshold. A
    document that raises is logged and skipped; the stream continues.
    Exact duplicate sentences are dropped across the whole run.
    """
    unknown = [name for name in config.filters if name not in FILTERS]
    if unknown:
        raise ValueError(f"unknown filters: {unknown}")
    seen: set[str] = set()
    for doc in documents:
        try:
            doc_id = str(doc["id"])
            text = str(doc["text"])
        except (KeyError, TypeError) as exc:
            logger.warning("skipping malformed document: %s", exc)
            continue
        try:
            spans = split_sentences(text)
        except Exception as exc:
            logger.warning("skipping document %s: %s", doc.get("id"), exc)
            continue
        for start, end in spans:
            sentence = text[start:end]
            if config.drop_duplicates:
                if sentence in seen:
                    continue
                seen.add(sentence)
            trace: list[FilterResult] = []
            ok = True
            for name in config.filters:
                result = FILTERS[name](sentence)
                trace.append(result)
                if not result.passed:
                    ok = False
                    break
            if not ok:
                continue
            score: float | None = None
            if scorer is None:
                trace.append(FilterResult("classifier", "skipped"))
            else:
                score = float(scorer(sentence))
                outcome = "pass" if score > config.threshold else "fail"
                trace.append(FilterResult("classifier", outcome, f"score={score:.4f}"))
                if outcome == "fail":
                    continue
            yield CandidateSentence(
                document_id=doc_id,
                sentence=sentence,
                context=text[:start].rstrip(),
                classifier_score=score,
                filter_trace=tuple(trace),
            )


def write_candidates(candidates: Iterable[CandidateSentence], path: str | Path, source: str = "other") -> int:
    """Emit candidates in congen-jsonl shape with an empty quantifier field.

    The property span is a provisional verb-heuristic guess, flagged in
    the metadata; annotation fills the quantifier and fixes the span.
    """
    n = 0
    with Path(path).open("w", encoding="utf-8") as fh:
        for i, cand in enumerate(candidates):
            try:
                span = infer_property_span(cand.sentence)
                span_start, span_end = span.start, span.end
            except InvalidSampleError:
                span_start, span_end = -1, -1
            obj = {
                "id": f"{cand.document_id}#{i}",
                "source": source,
                "context": cand.context,
                "quantifier": "",
                "sentence": cand.sentence,
                "base": cand.sentence,
                "span_start": span_start,
                "span_end": span_end,
                "metadata": {
                    "classifier_score": cand.classifier_score,
                    "filter_trace": [[r.name, r.outcome] for r in cand.filter_trace],
                    "provisional_span": True,
                },
            }
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
            n += 1
    return n


def read_documents(path: str | Path) -> Iterator[dict[str, Any]]:
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield json.loads(line)
