#!/usr/bin/env python3
"""End-to-end offline demo: builds a toy corpus and a deterministic mock
table, then runs scoring and two experiments through the CLI.

Usage: python3 scripts/demo_offline.py [outdir]
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

from genquant.cli import main
from genquant.corpus import CorpusSample, PropertySpan, Quantifier, write_samples
from genquant.variation import build_variations

TOY = [
    ("gen", "tigers have stripes", "stripes", Quantifier.GEN,
     "The zoo guide pointed at the big cats and smiled."),
    ("most", "vegetables taste like iron and dirt.", "like iron and dirt.", Quantifier.MOST,
     "I can just taste waaaay too much of the minerals."),
    ("all", "unicellular organisms have just one cell.", "just one cell.", Quantifier.ALL,
     "Biology class covered the smallest living things."),
    ("some", "berries are toxic to humans", "toxic to humans", Quantifier.SOME,
     "Foraging guides warn about colorful fruit."),
]


def toy_samples() -> list[CorpusSample]:
    samples = []
    for sid, base, fragment, quantifier, context in TOY:
        start = base.index(fragment)
        sentence = base if quantifier is Quantifier.GEN else f"{quantifier.surface} {base}"
        sample = CorpusSample(
            id=sid,
            source="dolma",
            context=context,
            sentence=sentence,
            original_quantifier=quantifier,
            base_sentence=base,
            property_span=PropertySpan(start, start + len(fragment)),
            metadata={"document_id": sid},
        )
        sample.validate()
        samples.append(sample)
    return samples


def build_mock_table(samples) -> dict:
    """Make each sample's original quantifier the easy continuation."""
    entries = []
    for sample in samples:
        variations = build_variations(
            sample.base_sentence, sample.property_span, "", list(Quantifier)
        )
        for v in variations:
            p = 0.8 if v.quantifier is sample.original_quantifier else 0.2
            prefix = v.full_text[: v.property_span_in_full.start].rstrip()
            first_property_word = v.property_text.split()[0]
            entries.append({"prefix": prefix, "token": first_property_word, "p": p})
    return {"backend_id": "mock:demo", "vocab_size": 100, "entries": entries}


def run(outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    samples = toy_samples()
    data = outdir / "toy.jsonl"
    write_samples(samples, data)
    table = outdir / "mock_table.json"
    table.write_text(json.dumps(build_mock_table(samples), indent=2))
    cache = outdir / "cache"

    for argv in (
        ["score", "--data", str(data), "--mock", str(table),
         "--cache", str(cache), "--out", str(outdir / "score")],
        ["exp", "confusion", "--data", str(data), "--mock", str(table),
         "--cache", str(cache), "--out", str(outdir / "confusion")],
        ["exp", "context", "--data", str(data), "--mock", str(table),
         "--cache", str(cache), "--max-ctx", "16", "--out", str(outdir / "context")],
    ):
        code = main(argv)
        if code != 0:
            raise SystemExit(f"demo step failed ({code}): {' '.join(argv)}")
    print(f"demo outputs under {outdir}/")


if __name__ == "__main__":
    run(Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_out"))
