"""Experiment drivers: quantifier confusion, implicit quantification,
context sweeps with random-context control, minimal-context analysis,
stereotype paraphrases and the H vs H_p comparison.

Every experiment is a deterministic fold over per-sample scoring results:
re-running against a warm cache reproduces the output files byte for
byte. Percentages are always derived from recorded counts, and samples
that fail to score are excluded from denominators and reported.
"""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from genquant import tagging
from genquant.backends import Backend
from genquant.corpus import (
    CANONICAL_ORDER,
    CorpusSample,
    Quantifier,
    StereotypeSeed,
    generate_stereotype_dataset,
)
from genquant.scoring import (
    DEFAULT_TIE_EPSILON,
    PAcceptabilityResult,
    p_acceptable,
    select_winner,
    truncate_context,
)
from genquant.tagging import RuleTagger

logger = logging.getLogger(__name__)

EXPLICIT_CANDIDATES = (Quantifier.ALL, Quantifier.MOST, Quantifier.SOME)


def load_quantifier_words() -> frozenset[str]:
    """The bundled context-quantifier word list (matching is set-based)."""
    text = resources.files("genquant").joinpath("data/quantifier_words.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


@dataclass(frozen=True)
class FailureRecord:
    sample_id: str
    error: str


def _score_many(
    samples: Sequence[CorpusSample],
    fn: Callable[[CorpusSample], PAcceptabilityResult],
    parallelism: int = 1,
) -> tuple[list[tuple[CorpusSample, PAcceptabilityResult]], list[FailureRecord]]:
    """Apply ``fn`` per sample, preserving input order; failures are
    collected, not raised."""

    def run(sample: CorpusSample):
        try:
            return sample, fn(sample), None
        except Exception as exc:
            logger.warning("sample %s failed: %s", sample.id, exc)
            return sample, None, f"{type(exc).__name__}: {exc}"

    if parallelism > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            rows = list(pool.map(run, samples))
    else:
        rows = [run(s) for s in samples]
    scored = [(s, r) for s, r, err in rows if err is None]
    failures = [FailureRecord(s.id, err) for s, _, err in rows if err is not None]
    return scored, failures


def _shares(counts: Mapping[Quantifier, int]) -> dict[Quantifier, float]:
    total = sum(counts.values())
    if total == 0:
        return {q: 0.0 for q in counts}
    return {q: 100.0 * n / total for q, n in counts.items()}


# ---------------------------------------------------------------------------
# Quantifier confusion


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: Mapping[Quantifier, Mapping[Quantifier, int]]

    def row_total(self, original: Quantifier) -> int:
        return sum(self.counts[original].values())

    def row_percentages(self) -> dict[Quantifier, dict[Quantifier, float]]:
        return {q: _shares(dict(row)) for q, row in self.counts.items()}


@dataclass(frozen=True)
class ConfusionResult:
    matrix: ConfusionMatrix
    scored: list[tuple[CorpusSample, PAcceptabilityResult]]
    failures: list[FailureRecord]
    use_context: bool


def run_confusion(
    backend: Backend,
    samples: Sequence[CorpusSample],
    use_context: bool = False,
    candidates: Sequence[Quantifier] = CANONICAL_ORDER,
    parallelism: int = 1,
    tie_epsilon: float = DEFAULT_TIE_EPSILON,
) -> ConfusionResult:
    """Cross-tabulate original quantifiers against the selected ones."""
    context_tokens = None if use_context else 0
    scored, failures = _score_many(
        samples,
        lambda s: p_acceptable(
            backend, s, candidates, context_tokens=context_tokens, tie_epsilon=tie_epsilon
        ),
        parallelism,
    )
    counts: dict[Quantifier, dict[Quantifier, int]] = {
        q: {c: 0 for c in candidates} for q in CANONICAL_ORDER
    }
    for sample, result in scored:
        counts[sample.original_quantifier][result.winner] += 1
    return ConfusionResult(ConfusionMatrix(counts), scored, failures, use_context)


# ---------------------------------------------------------------------------
# Implicit quantification of generics


@dataclass(frozen=True)
class ImplicitResult:
    counts: Mapping[Quantifier, int]
    weak: list[CorpusSample]  # selected quantifier is SOME
    scored: list[tuple[CorpusSample, PAcceptabilityResult]]
    failures: list[FailureRecord]

    def shares(self) -> dict[Quantifier, float]:
        return _shares(dict(self.counts))


def run_implicit_quantification(
    backend: Backend,
    samples: Sequence[CorpusSample],
    use_context: bool = False,
    parallelism: int = 1,
    tie_epsilon: float = DEFAULT_TIE_EPSILON,
) -> ImplicitResult:
    """Pick among the explicit quantifiers only; GEN is excluded."""
    for sample in samples:
        if sample.original_quantifier is not Quantifier.GEN:
            raise ValueError(f"sample {sample.id} is not a generic")
    context_tokens = None if use_context else 0
    scored, failures = _score_many(
        samples,
        lambda s: p_acceptable(
            backend, s, EXPLICIT_CANDIDATES, context_tokens=context_tokens, tie_epsilon=tie_epsilon
        ),
        parallelism,
    )
    counts = {q: 0 for q in EXPLICIT_CANDIDATES}
    weak = []
    for sample, result in scored:
        counts[result.winner] += 1
        if result.winner is Quantifier.SOME:
            weak.append(sample)
    return ImplicitResult(counts, weak, scored, failures)


# ---------------------------------------------------------------------------
# Context sweeps


@dataclass(frozen=True)
class SweepCurve:
    context_lengths: tuple[int, ...]
    values: tuple[float, ...]  # accuracy or share (%), one per length


@dataclass(frozen=True)
class SweepRecord:
    sample_id: str
    original: Quantifier
    context_tokens: int
    winner: Quantifier
    correct: bool


@dataclass(frozen=True)
class SweepResult:
    context_lengths: tuple[int, ...]
    mode: str  # "with_gen" | "without_gen"
    context_source: str  # "true" | "random"
    records: list[SweepRecord]
    curves: dict[str, SweepCurve]  # by original quantifier (with_gen) or winner (without_gen)
    failures: list[FailureRecord]
    seed: int | None


def _random_context_assignments(
    samples: Sequence[CorpusSample], seed: int | None
) -> dict[str, str]:
    """Seed-reproducible choice of a same-source, other-document context."""
    rng = random.Random(seed)
    pool = [
        (s.source, str(s.metadata.get("document_id", s.id)), s.context)
        for s in samples
        if s.context.strip()
    ]
    assigned: dict[str, str] = {}
    for sample in samples:
        own_doc = str(sample.metadata.get("document_id", sample.id))
        eligible = [c for src, doc, c in pool if src == sample.source and doc != own_doc]
        if not eligible:
            logger.warning("no random context available for sample %s; using empty", sample.id)
            assigned[sample.id] = ""
            continue
        assigned[sample.id] = eligible[rng.randrange(len(eligible))]
    return assigned


def run_context_sweep(
    backend: Backend,
    samples: Sequence[CorpusSample],
    max_tokens: int = 64,
    candidates_mode: str = "with_gen",
    context_source: str = "true",
    seed: int | None = None,
    parallelism: int = 1,
    tie_epsilon: float = DEFAULT_TIE_EPSILON,
) -> SweepResult:
    """Selection at increasing left-context sizes in 4-token chunks.

    Samples whose context runs out saturate at the full-context result.
    With ``context_source="random"`` every sample scores against one
    seeded same-source other-document context instead of its own.
    """
    if max_tokens % 4 != 0 or max_tokens < 0:
        raise ValueError("max_tokens must be a non-negative multiple of 4")
    if candidates_mode not in ("with_gen", "without_gen"):
        raise ValueError(f"unknown candidates_mode: {candidates_mode!r}")
    if context_source not in ("true", "random"):
        raise ValueError(f"unknown context_source: {context_source!r}")
    candidates = CANONICAL_ORDER if candidates_mode == "with_gen" else EXPLICIT_CANDIDATES
    if candidates_mode == "without_gen":
        for sample in samples:
            if sample.original_quantifier is not Quantifier.GEN:
                raise ValueError(f"sample {sample.id} is not a generic")
    overrides: dict[str, str] | None = None
    if context_source == "random":
        overrides = _random_context_assignments(samples, seed)
    ks = tuple(range(0, max_tokens + 1, 4))

    def run(sample: CorpusSample) -> dict[int, PAcceptabilityResult]:
        override = overrides[sample.id] if overrides is not None else None
        return {
            k: p_acceptable(
                backend,
                sample,
                candidates,
                context_tokens=k,
                tie_epsilon=tie_epsilon,
                context_override=override,
            )
            for k in ks
        }

    scored, failures = _score_many(samples, run, parallelism)
    records = [
        SweepRecord(
            sample_id=sample.id,
            original=sample.original_quantifier,
            context_tokens=k,
            winner=by_k[k].winner,
            correct=by_k[k].winner is sample.original_quantifier,
        )
        for sample, by_k in scored
        for k in ks
    ]
    curves: dict[str, SweepCurve] = {}
    if candidates_mode == "with_gen":
        for q in CANONICAL_ORDER:
            values = []
            for k in ks:
                rows = [r for r in records if r.original is q and r.context_tokens == k]
                values.append(100.0 * sum(r.correct for r in rows) / len(rows) if rows else 0.0)
            curves[q.label] = SweepCurve(ks, tuple(values))
    else:
        for q in EXPLICIT_CANDIDATES:
            values = []
            for k in ks:
                rows = [r for r in records if r.context_tokens == k]
                values.append(
                    100.0 * sum(r.winner is q for r in rows) / len(rows) if rows else 0.0
                )
            curves[q.label] = SweepCurve(ks, tuple(values))
    return SweepResult(ks, candidates_mode, context_source, records, curves, failures, seed)


# ---------------------------------------------------------------------------
# Minimal contexts


FEATURE_NAMES = ("quantifier_word", "noun_last", "question", "all", "most", "some")


def context_features(
    text: str,
    tagger: RuleTagger | None = None,
    quantifier_words: frozenset[str] | None = None,
) -> dict[str, bool]:
    tagger = tagger or RuleTagger()
    quantifier_words = quantifier_words or load_quantifier_words()
    lowered = {w.lower() for w in tagging.words(text)}
    return {
        "quantifier_word": bool(lowered & quantifier_words),
        "noun_last": tagger.noun_last(text),
        "question": "?" in text,
        "all": "all" in lowered,
        "most": "most" in lowered,
        "some": "some" in lowered,
    }


@dataclass(frozen=True)
class MinimalContextRecord:
    sample_id: str
    original: Quantifier
    minimal_k: int
    features: dict[str, bool]


@dataclass(frozen=True)
class MinimalContextAnalysis:
    records: list[MinimalContextRecord]
    # feature -> quantifier label -> (full-context %, minimal-context %)
    feature_table: dict[str, dict[str, tuple[float, float]]]


def extract_minimal_contexts(
    sweep: SweepResult,
    samples: Sequence[CorpusSample],
    backend: Backend,
    tagger: RuleTagger | None = None,
) -> MinimalContextAnalysis:
    """Smallest context at which selection first recovers the original.

    Only samples wrong with no context and right at some swept size
    qualify. Feature percentages compare these minimal contexts against
    all non-empty contexts (truncated to the sweep cap), per original
    quantifier.
    """
    if sweep.context_source != "true":
        raise ValueError("minimal contexts require a true-context sweep")
    tagger = tagger or RuleTagger()
    quantifier_words = load_quantifier_words()
    by_sample: dict[str, dict[int, SweepRecord]] = {}
    for record in sweep.records:
        by_sample.setdefault(record.sample_id, {})[record.context_tokens] = record
    samples_by_id = {s.id: s for s in samples}
    records = []
    for sample_id, by_k in by_sample.items():
        if 0 not in by_k or by_k[0].correct:
            continue
        crossing = [k for k in sorted(by_k) if k > 0 and by_k[k].correct]
        if not crossing:
            continue
        minimal_k = crossing[0]
        assert not by_k[0].correct and by_k[minimal_k].correct
        sample = samples_by_id[sample_id]
        minimal_text = truncate_context(backend, sample.context, minimal_k)
        records.append(
            MinimalContextRecord(
                sample_id=sample_id,
                original=sample.original_quantifier,
                minimal_k=minimal_k,
                features=context_features(minimal_text, tagger, quantifier_words),
            )
        )

    max_k = sweep.context_lengths[-1] if sweep.context_lengths else 0
    full_features: dict[Quantifier, list[dict[str, bool]]] = {q: [] for q in CANONICAL_ORDER}
    for sample in samples:
        if not sample.context.strip():
            continue
        text = truncate_context(backend, sample.context, max_k) if max_k else sample.context
        full_features[sample.original_quantifier].append(
            context_features(text, tagger, quantifier_words)
        )
    table: dict[str, dict[str, tuple[float, float]]] = {}
    for feature in FEATURE_NAMES:
        row: dict[str, tuple[float, float]] = {}
        for q in CANONICAL_ORDER:
            full = full_features[q]
            minimal = [r.features for r in records if r.original is q]
            full_pct = 100.0 * sum(f[feature] for f in full) / len(full) if full else 0.0
            min_pct = 100.0 * sum(f[feature] for f in minimal) / len(minimal) if minimal else 0.0
            row[q.label] = (full_pct, min_pct)
        table[feature] = row
    return MinimalContextAnalysis(records, table)


# ---------------------------------------------------------------------------
# Stereotype paraphrases


@dataclass(frozen=True)
class StereotypeResult:
    # (realness, polarity, paraphrase) -> winner counts
    counts: dict[tuple[str, str, str], dict[Quantifier, int]]
    scored: list[tuple[CorpusSample, PAcceptabilityResult]]
    failures: list[FailureRecord]

    def shares(self) -> dict[tuple[str, str, str], dict[Quantifier, float]]:
        return {key: _shares(row) for key, row in self.counts.items()}


def run_stereotypes(
    backend: Backend,
    seeds: Sequence[StereotypeSeed],
    parallelism: int = 1,
    tie_epsilon: float = DEFAULT_TIE_EPSILON,
) -> StereotypeResult:
    """Contextless selection over the three paraphrases of every seed."""
    samples = generate_stereotype_dataset(seeds)
    scored, failures = _score_many(
        samples,
        lambda s: p_acceptable(backend, s, CANONICAL_ORDER, context_tokens=0, tie_epsilon=tie_epsilon),
        parallelism,
    )
    counts: dict[tuple[str, str, str], dict[Quantifier, int]] = {}
    for sample, result in scored:
        key = (
            sample.metadata["realness"],
            sample.metadata["polarity"],
            sample.metadata["paraphrase"],
        )
        counts.setdefault(key, {q: 0 for q in CANONICAL_ORDER})[result.winner] += 1
    return StereotypeResult(counts, scored, failures)


# ---------------------------------------------------------------------------
# Whole-sequence vs property surprisal


@dataclass(frozen=True)
class HvsHpResult:
    context_lengths: tuple[int, ...]
    accuracy_h: dict[int, float]
    accuracy_hp: dict[int, float]
    n_scored: dict[int, int]
    records: list[tuple[str, int, Quantifier, Quantifier]]  # id, k, winner_hp, winner_h
    failures: list[FailureRecord]


def run_h_vs_hp(
    backend: Backend,
    samples: Sequence[CorpusSample],
    context_lengths: Sequence[int] = (0, 32, 128),
    parallelism: int = 1,
    tie_epsilon: float = DEFAULT_TIE_EPSILON,
) -> HvsHpResult:
    """Accuracy on generics when the argmin uses h_full instead of h_p."""
    for sample in samples:
        if sample.original_quantifier is not Quantifier.GEN:
            raise ValueError(f"sample {sample.id} is not a generic")
    records: list[tuple[str, int, Quantifier, Quantifier]] = []
    accuracy_h: dict[int, float] = {}
    accuracy_hp: dict[int, float] = {}
    n_scored: dict[int, int] = {}
    all_failures: list[FailureRecord] = []
    for k in context_lengths:
        scored, failures = _score_many(
            samples,
            lambda s, k=k: p_acceptable(
                backend, s, CANONICAL_ORDER, context_tokens=k, tie_epsilon=tie_epsilon
            ),
            parallelism,
        )
        all_failures.extend(failures)
        hits_hp = hits_h = 0
        for sample, result in scored:
            winner_h, _, _ = select_winner(result.per_quantifier, "h_full", tie_epsilon)
            records.append((sample.id, k, result.winner, winner_h))
            hits_hp += result.winner is Quantifier.GEN
            hits_h += winner_h is Quantifier.GEN
        n = len(scored)
        n_scored[k] = n
        accuracy_hp[k] = 100.0 * hits_hp / n if n else 0.0
        accuracy_h[k] = 100.0 * hits_h / n if n else 0.0
    return HvsHpResult(
        tuple(context_lengths), accuracy_h, accuracy_hp, n_scored, records, all_failures
    )


# ---------------------------------------------------------------------------
# Output files


Table = tuple[list[str], list[list]]


def _fnum(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return format(x, ".6f") if x == x else ""
    return str(x)


def _pct(x: float) -> str:
    return format(x, ".4f")


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fnum(v) if not isinstance(v, str) else v for v in row])


def config_hash(params: Mapping) -> str:
    canonical = json.dumps(params, sort_keys=True, ensure_ascii=False, default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def write_manifest(outdir: Path, experiment: str, backend_id: str, params: Mapping, seed=None) -> None:
    from genquant import __version__

    manifest = {
        "experiment": experiment,
        "version": __version__,
        "backend_id": backend_id,
        "seed": seed,
        "params": dict(params),
        "config_hash": config_hash({"experiment": experiment, "backend_id": backend_id, "seed": seed, **params}),
    }
    (outdir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True, ensure_ascii=False) + "\n", "utf-8"
    )


def _failures_table(failures: Sequence[FailureRecord]) -> Table:
    return ["sample_id", "error"], [[f.sample_id, f.error] for f in failures]


def _per_sample_table(
    scored: Sequence[tuple[CorpusSample, PAcceptabilityResult]],
    candidates: Sequence[Quantifier],
) -> Table:
    header = ["sample_id", "source", "original", "winner", "tie", "margin", "context_tokens_used"]
    header += [f"h_p_{q.label}" for q in candidates]
    rows = []
    for sample, result in scored:
        row = [
            sample.id,
            sample.source,
            sample.original_quantifier.label,
            result.winner.label,
            int(result.tie),
            result.margin,
            result.context_tokens_used,
        ]
        row += [result.per_quantifier[q].h_p for q in candidates]
        rows.append(row)
    return header, rows


def confusion_tables(result: ConfusionResult) -> dict[str, Table]:
    pcts = result.matrix.row_percentages()
    agg_header = ["original", "n"]
    agg_header += [f"pct_{q.label}" for q in CANONICAL_ORDER]
    agg_header += [f"count_{q.label}" for q in CANONICAL_ORDER]
    agg_rows = []
    for q in CANONICAL_ORDER:
        row_counts = result.matrix.counts[q]
        agg_rows.append(
            [q.label, result.matrix.row_total(q)]
            + [_pct(pcts[q].get(c, 0.0)) for c in CANONICAL_ORDER]
            + [row_counts.get(c, 0) for c in CANONICAL_ORDER]
        )
    return {
        "results.csv": _per_sample_table(result.scored, CANONICAL_ORDER),
        "aggregate.csv": (agg_header, agg_rows),
        "failures.csv": _failures_table(result.failures),
    }


def implicit_tables(result: ImplicitResult) -> dict[str, Table]:
    shares = result.shares()
    agg = (
        ["quantifier", "count", "pct"],
        [[q.label, result.counts[q], _pct(shares[q])] for q in EXPLICIT_CANDIDATES],
    )
    weak = (
        ["sample_id", "base_sentence"],
        [[s.id, s.base_sentence] for s in result.weak],
    )
    return {
        "results.csv": _per_sample_table(result.scored, EXPLICIT_CANDIDATES),
        "aggregate.csv": agg,
        "weak_generics.csv": weak,
        "failures.csv": _failures_table(result.failures),
    }


def sweep_tables(result: SweepResult) -> dict[str, Table]:
    per_sample = (
        ["sample_id", "original", "context_tokens", "winner", "correct"],
        [
            [r.sample_id, r.original.label, r.context_tokens, r.winner.label, int(r.correct)]
            for r in result.records
        ],
    )
    labels = list(result.curves)
    prefix = "acc" if result.mode == "with_gen" else "pct"
    agg_header = ["context_tokens"] + [f"{prefix}_{label}" for label in labels]
    agg_rows = []
    for i, k in enumerate(result.context_lengths):
        agg_rows.append([k] + [_pct(result.curves[label].values[i]) for label in labels])
    return {
        "results.csv": per_sample,
        "aggregate.csv": (agg_header, agg_rows),
        "failures.csv": _failures_table(result.failures),
    }


def minimal_context_tables(analysis: MinimalContextAnalysis) -> dict[str, Table]:
    records = (
        ["sample_id", "original", "minimal_k"] + list(FEATURE_NAMES),
        [
            [r.sample_id, r.original.label, r.minimal_k] + [int(r.features[f]) for f in FEATURE_NAMES]
            for r in analysis.records
        ],
    )
    header = ["feature"]
    for q in CANONICAL_ORDER:
        header += [f"{q.label}_full", f"{q.label}_minimal"]
    rows = []
    for feature in FEATURE_NAMES:
        row = [feature]
        for q in CANONICAL_ORDER:
            full_pct, min_pct = analysis.feature_table[feature][q.label]
            row += [_pct(full_pct), _pct(min_pct)]
        rows.append(row)
    return {"minimal_contexts.csv": records, "feature_table.csv": (header, rows)}


def stereotype_tables(result: StereotypeResult) -> dict[str, Table]:
    per_sample_header = ["sample_id", "realness", "polarity", "paraphrase", "sentence", "winner", "tie"]
    per_sample_rows = [
        [
            sample.id,
            sample.metadata["realness"],
            sample.metadata["polarity"],
            sample.metadata["paraphrase"],
            sample.sentence,
            res.winner.label,
            int(res.tie),
        ]
        for sample, res in result.scored
    ]
    shares = result.shares()
    agg_header = ["realness", "polarity", "paraphrase", "n"]
    agg_header += [f"pct_{q.label}" for q in CANONICAL_ORDER]
    agg_rows = []
    for realness in ("real", "invented"):
        for polarity in ("negative", "positive"):
            for paraphrase in ("bp", "sg_ppl", "ppl_who"):
                key = (realness, polarity, paraphrase)
                if key not in result.counts:
                    continue
                row_counts = result.counts[key]
                agg_rows.append(
                    [realness, polarity, paraphrase, sum(row_counts.values())]
                    + [_pct(shares[key][q]) for q in CANONICAL_ORDER]
                )
    return {
        "results.csv": (per_sample_header, per_sample_rows),
        "aggregate.csv": (agg_header, agg_rows),
        "failures.csv": _failures_table(result.failures),
    }


def h_vs_hp_tables(result: HvsHpResult) -> dict[str, Table]:
    per_sample = (
        ["sample_id", "context_tokens", "winner_hp", "winner_h", "correct_hp", "correct_h"],
        [
            [sid, k, whp.label, wh.label, int(whp is Quantifier.GEN), int(wh is Quantifier.GEN)]
            for sid, k, whp, wh in result.records
        ],
    )
    agg = (
        ["context_tokens", "n", "accuracy_h", "accuracy_hp"],
        [
            [k, result.n_scored[k], _pct(result.accuracy_h[k]), _pct(result.accuracy_hp[k])]
            for k in result.context_lengths
        ],
    )
    return {"results.csv": per_sample, "aggregate.csv": agg, "failures.csv": _failures_table(result.failures)}


def write_tables(outdir: Path, tables: Mapping[str, Table]) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    for name, (header, rows) in tables.items():
        write_csv(outdir / name, header, rows)


# ---------------------------------------------------------------------------
# Optional charts


def render_chart(kind: str, result, path: Path) -> bool:
    """Best-effort chart rendering; returns False if matplotlib is absent."""
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        logger.warning("matplotlib not installed; skipping chart")
        return False

    fig, ax = plt.subplots(figsize=(7, 4.5))
    if kind == "confusion":
        pcts = result.matrix.row_percentages()
        originals = [q.label for q in CANONICAL_ORDER]
        width = 0.2
        for i, winner in enumerate(CANONICAL_ORDER):
            xs = [j + (i - 1.5) * width for j in range(len(originals))]
            ax.bar(xs, [pcts[q].get(winner, 0.0) for q in CANONICAL_ORDER], width, label=winner.label)
        ax.set_xticks(range(len(originals)), originals)
        ax.set_xlabel("original quantifier")
        ax.set_ylabel("selected (%)")
    elif kind in ("context", "sweep"):
        for label, curve in result.curves.items():
            ax.plot(curve.context_lengths, curve.values, marker="o", label=label)
        ax.set_xlabel("context tokens")
        ax.set_ylabel("accuracy (%)" if result.mode == "with_gen" else "share (%)")
    elif kind == "implicit":
        shares = result.shares()
        labels = [q.label for q in EXPLICIT_CANDIDATES]
        ax.bar(labels, [shares[q] for q in EXPLICIT_CANDIDATES])
        ax.set_ylabel("share (%)")
    elif kind == "stereo":
        shares = result.shares()
        keys = sorted(shares)
        width = 0.2
        for i, q in enumerate(CANONICAL_ORDER):
            xs = [j + (i - 1.5) * width for j in range(len(keys))]
            ax.bar(xs, [shares[key][q] for key in keys], width, label=q.label)
        ax.set_xticks(range(len(keys)), ["\n".join(k) for k in keys], fontsize=7)
        ax.set_ylabel("share (%)")
    elif kind == "hvshp":
        ks = list(result.context_lengths)
        ax.plot(ks, [result.accuracy_h[k] for k in ks], marker="o", label="H (full sequence)")
        ax.plot(ks, [result.accuracy_hp[k] for k in ks], marker="s", label="H_p (property tokens)")
        ax.set_xlabel("context tokens")
        ax.set_ylabel("accuracy on generics (%)")
    else:
        plt.close(fig)
        raise ValueError(f"unknown chart kind: {kind!r}")
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return True
