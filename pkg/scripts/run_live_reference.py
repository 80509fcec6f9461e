#!/usr/bin/env python3
"""Reference harness against a live logprob endpoint.

Runs the full experiment battery (quantifier confusion, implicit
quantification, context sweep with its random control, stereotype
paraphrases, whole-sequence vs property surprisal) on a corpus file and
writes one output directory per experiment. Endpoint settings come from
GENQUANT_ENDPOINT / GENQUANT_MODEL / GENQUANT_API_KEY or flags.

With a Mistral-7B-class base model, expect results in these ranges (not
tolerances, just sanity magnitudes):
  - confusion: the most prevalent selected quantifier matches the original
  - implicit quantification of generics: roughly 40% all / 40% most and an
    18-23% share of *some* (the weak-generic share)
  - context sweep: generics gain around 20 accuracy points over the first
    20 context tokens; explicit quantifiers stay comparatively flat;
    random contexts give no gain

Usage:
  python3 scripts/run_live_reference.py --data congen.jsonl --out live_out \
      [--endpoint URL --model NAME] [--max-ctx 64] [--seed 13] [--parallelism 4]
"""
from __future__ import annotations

import argparse
import sys

from genquant.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--data", required=True, help="congen-jsonl corpus")
    parser.add_argument("--out", default="live_out")
    parser.add_argument("--endpoint")
    parser.add_argument("--model")
    parser.add_argument("--cache", default="live_cache")
    parser.add_argument("--max-ctx", default="64")
    parser.add_argument("--seed", default="13")
    parser.add_argument("--parallelism", default="4")
    args = parser.parse_args()

    common = ["--data", args.data, "--cache", args.cache, "--parallelism", args.parallelism]
    if args.endpoint:
        common += ["--endpoint", args.endpoint]
    if args.model:
        common += ["--model", args.model]

    runs = [
        ["exp", "confusion", *common, "--out", f"{args.out}/confusion"],
        ["exp", "implicit", *common, "--out", f"{args.out}/implicit"],
        ["exp", "context", *common, "--max-ctx", args.max_ctx, "--out", f"{args.out}/context"],
        ["exp", "context", *common, "--max-ctx", args.max_ctx, "--random-context",
         "--seed", args.seed, "--out", f"{args.out}/context_random"],
        ["exp", "context", *common, "--max-ctx", args.max_ctx, "--no-gen",
         "--out", f"{args.out}/context_no_gen"],
        ["exp", "hvshp", *common, "--out", f"{args.out}/hvshp"],
        ["exp", "stereo", "--cache", args.cache, "--parallelism", args.parallelism,
         *(["--endpoint", args.endpoint] if args.endpoint else []),
         *(["--model", args.model] if args.model else []),
         "--out", f"{args.out}/stereo"],
    ]
    worst = 0
    for argv in runs:
        print("::", "genquant", " ".join(argv))
        worst = max(worst, cli_main(argv))
    return worst


if __name__ == "__main__":
    sys.exit(main())
