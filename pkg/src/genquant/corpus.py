"""Core types and file formats for quantified-sentence corpora.

A corpus sample is one sentence (a bare-plural generic, or a sentence
explicitly quantified with all/most/some) together with the document
context it occurred in, the quantifier-stripped base sentence, and the
character span of its property segment: the predicate tail whose tokens
the scorer averages over.

Two file formats are supported: ``congen-jsonl`` (this package's native
format, one JSON object per line with explicit character spans) and
``genericskb-tsv`` (the public GenericsKB column layout, spans inferred
with a rule-based verb heuristic).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator

from genquant import tagging


class Quantifier(Enum):
    """Candidate quantifiers; GEN is the bare (unpronounced) variant."""

    GEN = ""
    ALL = "all"
    MOST = "most"
    SOME = "some"

    @property
    def surface(self) -> str:
        """Word prepended to the base sentence; empty for GEN."""
        return self.value

    @property
    def label(self) -> str:
        """Serialization label: "gen", "all", "most" or "some"."""
        return "gen" if self is Quantifier.GEN else self.value

    @classmethod
    def from_label(cls, label: str) -> "Quantifier":
        try:
            return _LABELS[label.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown quantifier label: {label!r}") from None


_LABELS = {q.label: q for q in Quantifier}

#: Iteration and tie-breaking order used everywhere in the package.
CANONICAL_ORDER: tuple[Quantifier, ...] = (
    Quantifier.GEN,
    Quantifier.ALL,
    Quantifier.MOST,
    Quantifier.SOME,
)

SOURCES = ("dolma", "reddit", "genericskb", "stereotype", "other")


class InvalidSampleError(ValueError):
    """A sample violates one of the documented invariants."""


def lower_first(text: str) -> str:
    """Lowercase the first character, keeping acronym-like first tokens.

    A first token that has uppercase letters beyond position 0 ("MCTs",
    "NASA", "McDonald's") is left untouched; only normally capitalized
    words ("Tigers") are lowered.
    """
    if not text:
        return text
    first_token = text.split(None, 1)[0]
    if any(c.isupper() for c in first_token[1:]):
        return text
    return text[0].lower() + text[1:]


def upper_first(text: str) -> str:
    if not text:
        return text
    return text[0].upper() + text[1:]


@dataclass(frozen=True)
class PropertySpan:
    """Half-open character interval [start, end) on a base sentence."""

    start: int
    end: int

    def validate(self, base: str) -> None:
        if not (0 <= self.start < self.end <= len(base)):
            raise InvalidSampleError(
                f"span [{self.start}, {self.end}) out of bounds for text of length {len(base)}"
            )
        if not base[self.start : self.end].strip():
            raise InvalidSampleError("property span covers only whitespace")

    def shifted(self, offset: int) -> "PropertySpan":
        return PropertySpan(self.start + offset, self.end + offset)


@dataclass(frozen=True)
class CorpusSample:
    """One annotated sentence-in-context.

    ``sentence`` is the text as found; ``base_sentence`` is the same text
    with the quantifier removed and its first character case-normalized
    (see :func:`lower_first`); ``property_span`` indexes into
    ``base_sentence``.
    """

    id: str
    source: str
    context: str
    sentence: str
    original_quantifier: Quantifier
    base_sentence: str
    property_span: PropertySpan
    metadata: dict[str, Any] = field(default_factory=dict)

    def validate(self) -> None:
        if self.source not in SOURCES:
            raise InvalidSampleError(f"unknown source: {self.source!r}")
        q = self.original_quantifier
        if q is Quantifier.GEN:
            rest = self.sentence
        else:
            prefix = q.surface + " "
            if not self.sentence.lower().startswith(prefix):
                raise InvalidSampleError(
                    f"sentence does not start with {q.surface!r}: {self.sentence!r}"
                )
            rest = self.sentence[len(prefix) :]
        if self.base_sentence not in (rest, lower_first(rest)):
            raise InvalidSampleError(
                f"base sentence {self.base_sentence!r} does not match sentence {self.sentence!r}"
            )
        self.property_span.validate(self.base_sentence)

    @property
    def property_text(self) -> str:
        return self.base_sentence[self.property_span.start : self.property_span.end]


def infer_property_span(base: str) -> PropertySpan:
    """Best-effort span over everything after the main verb of ``base``.

    Used for formats that carry no explicit spans (GenericsKB rows, mined
    candidates). The verb is located with the rule tagger's heuristics;
    annotation should correct the result where the guess is wrong.
    """
    spans = tagging.word_spans(base)
    words = [base[a:b] for a, b in spans]
    verb_idx = tagging.main_verb_index(words)
    if verb_idx is None or verb_idx + 1 >= len(spans):
        raise InvalidSampleError(f"could not locate a property segment in {base!r}")
    start = spans[verb_idx + 1][0]
    span = PropertySpan(start, len(base))
    span.validate(base)
    return span


# ---------------------------------------------------------------------------
# congen-jsonl / genericskb-tsv readers and writers


@dataclass(frozen=True)
class LineError:
    """A rejected input line, reported instead of silently dropped."""

    path: str
    line_no: int
    message: str


class CorpusFormatError(ValueError):
    def __init__(self, path: str, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


_JSONL_KEYS = ("id", "source", "context", "quantifier", "sentence", "base", "span_start", "span_end")


def _sample_from_jsonl(obj: dict[str, Any]) -> CorpusSample:
    missing = [k for k in _JSONL_KEYS if k not in obj]
    if missing:
        raise InvalidSampleError(f"missing fields: {', '.join(missing)}")
    sample = CorpusSample(
        id=str(obj["id"]),
        source=str(obj["source"]),
        context=str(obj["context"]),
        sentence=str(obj["sentence"]),
        original_quantifier=Quantifier.from_label(str(obj["quantifier"])),
        base_sentence=str(obj["base"]),
        property_span=PropertySpan(int(obj["span_start"]), int(obj["span_end"])),
        metadata=dict(obj.get("metadata") or {}),
    )
    sample.validate()
    return sample


def _sample_from_tsv(line_no: int, row: list[str]) -> CorpusSample:
    if len(row) != 5:
        raise InvalidSampleError(f"expected 5 tab-separated columns, got {len(row)}")
    source, term, q_label, sentence, score = row
    quantifier = Quantifier.GEN if not q_label.strip() else Quantifier.from_label(q_label)
    if quantifier is Quantifier.GEN:
        base = lower_first(sentence)
    else:
        prefix = quantifier.surface + " "
        if not sentence.lower().startswith(prefix):
            raise InvalidSampleError(
                f"sentence does not start with {quantifier.surface!r}: {sentence!r}"
            )
        base = lower_first(sentence[len(prefix) :])
    metadata: dict[str, Any] = {"term": term}
    if score.strip():
        metadata["score"] = float(score)
    sample = CorpusSample(
        id=f"gkb-{line_no}",
        source="genericskb",
        context="",
        sentence=sentence,
        original_quantifier=quantifier,
        base_sentence=base,
        property_span=infer_property_span(base),
        metadata=metadata,
    )
    sample.validate()
    return sample


def iter_samples(
    path: str | Path,
    fmt: str = "congen-jsonl",
    on_error: Callable[[LineError], None] | None = None,
) -> Iterator[CorpusSample]:
    """Yield samples from ``path``, validating every line.

    Lines violating the format or the sample invariants raise
    :class:`CorpusFormatError` carrying the line number; when ``on_error``
    is given they are reported to it and skipped instead.
    """
    if fmt not in ("congen-jsonl", "genericskb-tsv"):
        raise ValueError(f"unknown corpus format: {fmt!r}")
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                if fmt == "congen-jsonl":
                    try:
                        obj = json.loads(line)
                    except json.JSONDecodeError as exc:
                        raise InvalidSampleError(f"malformed JSON: {exc}") from None
                    if not isinstance(obj, dict):
                        raise InvalidSampleError("line is not a JSON object")
                    yield _sample_from_jsonl(obj)
                else:
                    yield _sample_from_tsv(line_no, line.rstrip("\n").split("\t"))
            except (InvalidSampleError, ValueError) as exc:
                err = LineError(str(path), line_no, str(exc))
                if on_error is None:
                    raise CorpusFormatError(err.path, err.line_no, err.message) from None
                on_error(err)


def read_samples(
    path: str | Path,
    fmt: str = "congen-jsonl",
    on_error: Callable[[LineError], None] | None = None,
) -> list[CorpusSample]:
    return list(iter_samples(path, fmt, on_error))


def sample_to_obj(sample: CorpusSample) -> dict[str, Any]:
    return {
        "id": sample.id,
        "source": sample.source,
        "context": sample.context,
        "quantifier": sample.original_quantifier.label,
        "sentence": sample.sentence,
        "base": sample.base_sentence,
        "span_start": sample.property_span.start,
        "span_end": sample.property_span.end,
        "metadata": sample.metadata,
    }


def write_samples(samples: Iterable[CorpusSample], path: str | Path, fmt: str = "congen-jsonl") -> None:
    """Write samples as congen-jsonl; round-trips field-for-field."""
    if fmt != "congen-jsonl":
        raise ValueError(f"unsupported output format: {fmt!r}")
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for sample in samples:
            sample.validate()
            fh.write(json.dumps(sample_to_obj(sample), ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# Stereotype seed data and paraphrase generation

POLARITIES = ("negative", "positive")
REALNESS = ("real", "invented")
PARAPHRASES = ("bp", "sg_ppl", "ppl_who")


@dataclass(frozen=True)
class StereotypeSeed:
    """A (social group, predicate) pair used to build probe sentences."""

    group_singular: str
    group_plural: str
    predicate: str
    polarity: str
    realness: str

    def validate(self) -> None:
        if self.polarity not in POLARITIES:
            raise InvalidSampleError(f"bad polarity: {self.polarity!r}")
        if self.realness not in REALNESS:
            raise InvalidSampleError(f"bad realness: {self.realness!r}")
        if self.group_plural == self.group_singular:
            raise InvalidSampleError(f"plural must differ from singular: {self.group_singular!r}")
        words = self.predicate.split()
        if not words:
            raise InvalidSampleError("empty predicate")
        verb = words[0]
        # plural present verbs are uninflected ("are", "have", "smell", ...)
        if not verb.isalpha() or (verb.endswith("s") and not verb.endswith("ss")):
            raise InvalidSampleError(f"predicate must start with a plural present verb: {self.predicate!r}")


def paraphrase_surface(seed: StereotypeSeed, paraphrase: str) -> str:
    if paraphrase == "bp":
        return f"{seed.group_plural} {seed.predicate}"
    if paraphrase == "sg_ppl":
        return f"{seed.group_singular} people {seed.predicate}"
    if paraphrase == "ppl_who":
        return f"people who are {seed.group_singular} {seed.predicate}"
    raise ValueError(f"unknown paraphrase: {paraphrase!r}")


def generate_stereotype_dataset(seeds: Iterable[StereotypeSeed]) -> list[CorpusSample]:
    """Expand each seed into its three paraphrase samples.

    The property span covers the predicate minus its leading verb; all
    surfaces are lowercase, contextless generics.
    """
    samples = []
    for i, seed in enumerate(seeds):
        seed.validate()
        verb_len = len(seed.predicate.split()[0])
        for paraphrase in PARAPHRASES:
            surface = paraphrase_surface(seed, paraphrase)
            pred_offset = len(surface) - len(seed.predicate)
            span = PropertySpan(pred_offset + verb_len + 1, len(surface))
            sample = CorpusSample(
                id=f"stereo-{seed.realness}-{seed.polarity}-{i:03d}-{paraphrase}",
                source="stereotype",
                context="",
                sentence=surface,
                original_quantifier=Quantifier.GEN,
                base_sentence=surface,
                property_span=span,
                metadata={
                    "paraphrase": paraphrase,
                    "polarity": seed.polarity,
                    "realness": seed.realness,
                    "group_singular": seed.group_singular,
                    "group_plural": seed.group_plural,
                    "predicate": seed.predicate,
                },
            )
            sample.validate()
            samples.append(sample)
    return samples


def load_bundled_seeds() -> list[StereotypeSeed]:
    """The packaged stereotype seed list (144/120 real, 120/120 invented)."""
    raw = json.loads(
        resources.files("genquant").joinpath("data/stereotype_seeds.json").read_text("utf-8")
    )
    seeds: list[StereotypeSeed] = []
    for singular, plural in raw["real_negative"]["groups"]:
        for predicate in raw["real_negative"]["predicates"]:
            seeds.append(StereotypeSeed(singular, plural, predicate, "negative", "real"))
    for group in raw["real_positive"]:
        for predicate in group["predicates"]:
            seeds.append(StereotypeSeed(group["singular"], group["plural"], predicate, "positive", "real"))
    for polarity in POLARITIES:
        for demonym in raw["invented"]["demonyms"]:
            for predicate in raw["invented"][f"{polarity}_predicates"]:
                seeds.append(StereotypeSeed(demonym, demonym + "s", predicate, polarity, "invented"))
    for seed in seeds:
        seed.validate()
    return seeds


def seed_to_obj(seed: StereotypeSeed) -> dict[str, str]:
    return {
        "group_singular": seed.group_singular,
        "group_plural": seed.group_plural,
        "predicate": seed.predicate,
        "polarity": seed.polarity,
        "realness": seed.realness,
    }


def read_seeds(path: str | Path) -> list[StereotypeSeed]:
    seeds = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            seed = StereotypeSeed(
                obj["group_singular"], obj["group_plural"], obj["predicate"],
                obj["polarity"], obj["realness"],
            )
            seed.validate()
            seeds.append(seed)
    return seeds


def write_seeds(seeds: Iterable[StereotypeSeed], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for seed in seeds:
            fh.write(json.dumps(seed_to_obj(seed), ensure_ascii=False) + "\n")
