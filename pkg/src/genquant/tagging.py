"""Rule-based lexical tagging: verb/noun heuristics shared by the mining
filters and the context feature analysis.

This is deliberately a small, deterministic approximation. Callers that
need real tagging can pass any object with the same surface (``tag``,
``noun_last``, ``main_verb_index``) backed by an NLP pipeline; the default
here ships with the package so results are reproducible with no model
downloads.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

WORD_RE = re.compile(r"[A-Za-z][A-Za-z'’-]*")

DETERMINERS = frozenset(
    "a an the this that these those my your his her its our their".split()
)
PRONOUNS = frozenset(
    "i you he she it we they me him us them who whom whose which what someone anyone everyone nobody".split()
)
PREPOSITIONS = frozenset(
    "of in on at for with to from by about over under between through during against into onto within without across behind beyond near after before around along among".split()
)
CONJUNCTIONS = frozenset("and or but nor so yet because although while if when than as".split())

# Finite be/have/do forms with (tense, number); None marks underspecified.
_AUX_FORMS = {
    "is": ("pres", "sing"),
    "are": ("pres", "plur"),
    "was": ("past", "sing"),
    "were": ("past", "plur"),
    "has": ("pres", "sing"),
    "have": ("pres", "plur"),
    "had": ("past", None),
    "does": ("pres", "sing"),
    "do": ("pres", "plur"),
    "did": ("past", None),
    "be": (None, None),
    "being": (None, None),
    "been": (None, None),
    "am": ("pres", "sing"),
}

MODALS_PRESENT = frozenset("can may must shall will".split())
MODALS_PAST = frozenset("could might should would ought".split())

IRREGULAR_PAST = frozenset(
    """went came saw said got made took gave found told thought knew became felt
    kept held stood heard meant met ran paid sat spoke led grew lost fell sent
    built understood drew broke spent wore caught taught bought brought fought
    sought wrote drove ate drank sang swam flew rose chose froze won began swung
    hung struck threw fed bred slept wept dealt dug spun bit hid forgot forgave
    shook stole tore bore rode slid stuck stung swore woke lay""".split()
)

IRREGULAR_PARTICIPLES = frozenset(
    """written seen done made known taken given found born borne built kept held
    lost won sold told bought brought caught taught thought eaten driven drawn
    grown thrown shown broken chosen frozen spoken stolen worn torn sung hung
    struck hit put set cut shut hurt read said paid laid left felt meant sent
    spent lent bent burnt learnt understood shaken hidden bitten beaten
    forgotten forbidden ridden risen fallen mistaken gotten begun swum flown
    heard met held stood led fed bred slept dealt dug spun sworn woken lain
    blown sewn sown mown proven woven stricken smitten trodden sunk drunk
    shrunk sprung stung strung swung hanged slain""".split()
)

# -en words that are not participles (common nouns/adjectives/numbers)
NON_PARTICIPLE_EN = frozenset(
    """open even often oxygen chicken children women men kitchen garden linen
    mitten heaven seven ten eleven hyphen siren queen green teen keen between
    screen canteen thirteen fourteen fifteen sixteen seventeen eighteen nineteen
    umpteen wooden golden woolen earthen silken sudden barren brazen citizen
    dozen happen listen len glen wren amen pollen burden warren haven oven""".split()
)

IRREGULAR_PLURALS = frozenset(
    """people children men women mice teeth feet geese oxen cacti fungi larvae
    algae bacteria criteria phenomena data media fish sheep deer cattle police
    species series offspring aircraft bison moose salmon trout shrimp swine
    lice dice nuclei stimuli alumni vertebrae antennae formulae appendices
    indices matrices analyses bases crises theses hypotheses diagnoses oases
    parentheses syntheses""".split()
)

ADVERBS = frozenset(
    """not never always often usually also still already once twice well badly
    poorly first typically generally currently now then very quite rather too
    almost nearly really just only sometimes rarely seldom frequently""".split()
)

LY_NOUN_EXCEPTIONS = frozenset(
    """family italy supply apply reply fly belly jelly ally assembly monopoly
    butterfly firefly anomaly bully folly holly lily melancholy rally tally
    dragonfly""".split()
)

# Base-form verbs common in kind-level generalisations; used to spot the
# main verb when morphology alone cannot.
COMMON_BASE_VERBS = frozenset(
    """eat live make need use grow produce contain cause carry attack lay give
    take get come go help work play move run fly swim feed hunt build form keep
    hold show provide include require tend taste smell look sound feel become
    remain stay lack love like prefer avoid protect serve act function exist
    occur appear develop spread reproduce breathe sleep drink kill die survive
    thrive migrate communicate learn know think believe say tell speak sing
    dance cook celebrate wear bake brew weave respect treat welcome adapt
    transport descend damage bind release stop start lose drop share express
    prey graze nest burrow hatch bloom wilt absorb emit reflect store""".split()
)


def word_spans(text: str) -> list[tuple[int, int]]:
    """Character spans of the alphabetic words of ``text``."""
    return [(m.start(), m.end()) for m in WORD_RE.finditer(text)]


def words(text: str) -> list[str]:
    return [text[a:b] for a, b in word_spans(text)]


@dataclass(frozen=True)
class WordTag:
    text: str
    pos: str  # DET, PRON, ADP, CONJ, ADV, VERB, NOUN, X
    tense: str | None = None  # "pres" | "past" | "part" for verbs
    number: str | None = None  # "sing" | "plur" where determinable


def looks_like_participle(word: str) -> bool:
    w = word.lower()
    if w in IRREGULAR_PARTICIPLES:
        return True
    if w in NON_PARTICIPLE_EN:
        return False
    if w.endswith("ed") and len(w) >= 4:
        return True
    if w.endswith("en") and len(w) >= 5:
        return True
    return False


def looks_like_plural_noun(word: str) -> bool:
    w = word.lower()
    if w in IRREGULAR_PLURALS:
        return True
    return w.endswith("s") and not w.endswith("ss") and len(w) >= 3


def _tag_word(word: str) -> WordTag:
    w = word.lower()
    if w in DETERMINERS:
        return WordTag(word, "DET")
    if w in PRONOUNS:
        return WordTag(word, "PRON")
    if w in PREPOSITIONS:
        return WordTag(word, "ADP")
    if w in CONJUNCTIONS:
        return WordTag(word, "CONJ")
    if w in _AUX_FORMS:
        tense, number = _AUX_FORMS[w]
        return WordTag(word, "VERB", tense, number)
    if w in MODALS_PRESENT:
        return WordTag(word, "VERB", "pres", "plur")
    if w in MODALS_PAST:
        return WordTag(word, "VERB", "past", None)
    if w in IRREGULAR_PAST:
        return WordTag(word, "VERB", "past", None)
    if w in IRREGULAR_PARTICIPLES:
        return WordTag(word, "VERB", "part", None)
    if w in COMMON_BASE_VERBS:
        return WordTag(word, "VERB", "pres", "plur")
    if w.endswith("ed") and len(w) >= 4:
        return WordTag(word, "VERB", "past", None)
    if w in ADVERBS or (w.endswith("ly") and len(w) >= 4 and w not in LY_NOUN_EXCEPTIONS):
        return WordTag(word, "ADV")
    return WordTag(word, "NOUN", None, "plur" if looks_like_plural_noun(w) else "sing")


class RuleTagger:
    """Default lexicon-and-morphology tagger."""

    def tag(self, text: str) -> list[WordTag]:
        return [_tag_word(w) for w in words(text)]

    def noun_last(self, text: str) -> bool:
        """Whether the last alphabetic word of ``text`` is noun-like."""
        ws = words(text)
        if not ws:
            return False
        return _tag_word(ws[-1]).pos == "NOUN"

    def main_verb_index(self, word_list: Sequence[str]) -> int | None:
        return main_verb_index(word_list)


def main_verb_index(word_list: Sequence[str]) -> int | None:
    """Index of the best main-verb candidate in a subject-first sentence.

    A lexicon hit wins; otherwise the first post-subject word that is not
    plural-noun-like, adverbial or a determiner is taken.
    """
    for i, word in enumerate(word_list):
        if i == 0:
            continue
        w = word.lower()
        if w in _AUX_FORMS or w in MODALS_PRESENT or w in MODALS_PAST:
            return i
        if w in IRREGULAR_PAST or w in COMMON_BASE_VERBS:
            return i
        if w.endswith("ed") and len(w) >= 4 and w not in NON_PARTICIPLE_EN:
            return i
    for i in range(1, len(word_list)):
        w = word_list[i].lower()
        if w in DETERMINERS or w in ADVERBS:
            continue
        if looks_like_plural_noun(w) or (w.endswith("ly") and len(w) >= 4):
            continue
        return i
    return None
