from __future__ import annotations

import pytest

from genquant.tagging import (
    RuleTagger,
    looks_like_participle,
    looks_like_plural_noun,
    main_verb_index,
    word_spans,
    words,
)


def test_word_spans_offsets():
    text = "Red blood cells transport oxygen."
    spans = word_spans(text)
    assert [text[a:b] for a, b in spans] == ["Red", "blood", "cells", "transport", "oxygen"]


def test_words_handles_apostrophes():
    assert words("Bees don't sting.") == ["Bees", "don't", "sting"]


@pytest.mark.parametrize(
    "word,expected",
    [
        ("written", True),
        ("cooked", True),
        ("eaten", True),
        ("insects", False),
        ("chicken", False),
        ("red", False),
        ("wooden", False),
        ("seen", True),
    ],
)
def test_looks_like_participle(word, expected):
    assert looks_like_participle(word) is expected


@pytest.mark.parametrize(
    "word,expected",
    [
        ("beetles", True),
        ("people", True),
        ("fish", True),
        ("glass", False),
        ("tiger", False),
        ("mice", True),
    ],
)
def test_looks_like_plural_noun(word, expected):
    assert looks_like_plural_noun(word) is expected


@pytest.mark.parametrize(
    "sentence,verb",
    [
        ("Beetles are insects.", "are"),
        ("Tigers had stripes.", "had"),
        ("Electric eels deliver shocks", "deliver"),
        ("vegetables taste like iron and dirt.", "taste"),
        ("Mother velvet worms carry their babies", "carry"),
    ],
)
def test_main_verb_index(sentence, verb):
    ws = words(sentence)
    idx = main_verb_index(ws)
    assert idx is not None and ws[idx] == verb


def test_main_verb_index_gives_up():
    assert main_verb_index(["beetles"]) is None


def test_noun_last():
    tagger = RuleTagger()
    assert tagger.noun_last("this surprising reaction of the spider.")
    assert tagger.noun_last("an explanation for this surprising reaction")
    assert not tagger.noun_last("they ran quickly")
    assert not tagger.noun_last("look at the")
    assert not tagger.noun_last("")
    assert not tagger.noun_last("?!...")


def test_tagger_basic_pos():
    tags = {t.text: t for t in RuleTagger().tag("The beetles are small")}
    assert tags["The"].pos == "DET"
    assert tags["are"].pos == "VERB" and tags["are"].tense == "pres" and tags["are"].number == "plur"
    assert tags["beetles"].pos == "NOUN" and tags["beetles"].number == "plur"
