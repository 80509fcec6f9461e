"""Command-line entrypoint.

Subcommands: ``score`` (per-sample quantifier selection), ``exp``
(experiment drivers), ``mine`` (candidate mining) and ``gen-stereo``
(stereotype seed/sample generation). Backend settings resolve with the
precedence flags > environment (GENQUANT_ENDPOINT, GENQUANT_MODEL,
GENQUANT_API_KEY) > config file (``key = value`` lines).

Exit codes: 0 success, 1 configuration error, 2 partial data failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from genquant import __version__, experiments, mining
from genquant.backends import Backend, HttpBackend, MockBackend
from genquant.cache import CachedBackend, FileStore
from genquant.corpus import (
    CANONICAL_ORDER,
    LineError,
    Quantifier,
    generate_stereotype_dataset,
    load_bundled_seeds,
    read_samples,
    read_seeds,
    write_samples,
    write_seeds,
)
from genquant.scoring import DEFAULT_TIE_EPSILON, p_acceptable

logger = logging.getLogger(__name__)

ENV_PREFIX = "GENQUANT_"


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    endpoint: str | None = None
    model: str | None = None
    api_key: str | None = None
    mock: str | None = None
    cache: str | None = None
    parallelism: int = 1
    tie_epsilon: float = DEFAULT_TIE_EPSILON
    seed: int | None = None
    max_context: int = 64
    out: str = "out"

    def validate(self) -> None:
        if self.parallelism < 1:
            raise ConfigError("parallelism must be >= 1")
        if self.max_context % 4 != 0 or self.max_context < 0:
            raise ConfigError("context cap must be a non-negative multiple of 4")


def _read_config_file(path: str) -> dict[str, str]:
    values = {}
    for line_no, line in enumerate(Path(path).read_text("utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
        key, _, value = line.partition("=")
        values[key.strip().lower()] = value.strip()
    return values


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """flags > env vars > config file > defaults."""
    cfg = RunConfig()
    file_values: dict[str, str] = {}
    if getattr(args, "config", None):
        file_values = _read_config_file(args.config)

    def pick(name: str, flag_value, cast=str):
        env = os.environ.get(ENV_PREFIX + name.upper())
        if flag_value is not None:
            return flag_value
        if env is not None:
            return cast(env)
        if name in file_values:
            return cast(file_values[name])
        return getattr(cfg, name)

    cfg.endpoint = pick("endpoint", getattr(args, "endpoint", None))
    cfg.model = pick("model", getattr(args, "model", None))
    cfg.api_key = pick("api_key", getattr(args, "api_key", None))
    cfg.mock = pick("mock", getattr(args, "mock", None))
    cfg.cache = pick("cache", getattr(args, "cache", None))
    cfg.parallelism = int(pick("parallelism", getattr(args, "parallelism", None), int))
    cfg.tie_epsilon = float(pick("tie_epsilon", getattr(args, "tie_epsilon", None), float))
    seed = pick("seed", getattr(args, "seed", None), int)
    cfg.seed = int(seed) if seed is not None else None
    cfg.max_context = int(pick("max_context", getattr(args, "max_ctx", None), int))
    cfg.out = str(pick("out", getattr(args, "out", None)))
    cfg.validate()
    return cfg


def build_backend(cfg: RunConfig) -> Backend:
    if cfg.mock:
        backend: Backend = MockBackend.from_table_file(cfg.mock)
    elif cfg.endpoint and cfg.model:
        backend = HttpBackend(cfg.endpoint, cfg.model, api_key=cfg.api_key)
    else:
        raise ConfigError(
            "no backend configured: pass --mock TABLE.json, or --endpoint URL with "
            "--model NAME (or set GENQUANT_ENDPOINT / GENQUANT_MODEL)"
        )
    if cfg.cache:
        backend = CachedBackend(backend, FileStore(cfg.cache))
    return backend


def _load_samples(path: str, fmt: str) -> tuple[list, list[LineError]]:
    errors: list[LineError] = []
    samples = read_samples(path, fmt, on_error=errors.append)
    for err in errors:
        logger.error("%s:%d: %s", err.path, err.line_no, err.message)
    return samples, errors


def _candidates(no_gen: bool) -> tuple[Quantifier, ...]:
    return experiments.EXPLICIT_CANDIDATES if no_gen else CANONICAL_ORDER


# ---------------------------------------------------------------------------
# Subcommands


def cmd_score(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    backend = build_backend(cfg)
    samples, line_errors = _load_samples(args.data, args.format)
    if args.context == "none":
        context_tokens: int | None = 0
    elif args.context == "full":
        context_tokens = None
    else:
        try:
            context_tokens = int(args.context)
        except ValueError:
            raise ConfigError(f"--context must be none, full or an integer, got {args.context!r}")
        if context_tokens < 0:
            raise ConfigError("--context must be >= 0")
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    candidates = _candidates(args.no_gen)
    failures: list[tuple[str, str]] = [(f"line:{e.line_no}", e.message) for e in line_errors]
    n_written = 0
    with (outdir / "results.jsonl").open("w", encoding="utf-8") as fh:
        for sample in samples:
            try:
                result = p_acceptable(
                    backend,
                    sample,
                    candidates,
                    context_tokens=context_tokens,
                    tie_epsilon=cfg.tie_epsilon,
                )
            except Exception as exc:
                logger.error("sample %s failed: %s", sample.id, exc)
                failures.append((sample.id, f"{type(exc).__name__}: {exc}"))
                continue
            fh.write(json.dumps(result.to_obj(), ensure_ascii=False) + "\n")
            n_written += 1
    with (outdir / "failures.jsonl").open("w", encoding="utf-8") as fh:
        for sample_id, error in failures:
            fh.write(json.dumps({"sample_id": sample_id, "error": error}) + "\n")
    experiments.write_manifest(
        outdir,
        "score",
        backend.backend_id,
        {
            "data": args.data,
            "format": args.format,
            "context": args.context,
            "candidates": [q.label for q in candidates],
            "tie_epsilon": cfg.tie_epsilon,
        },
        seed=cfg.seed,
    )
    print(f"scored {n_written} samples, {len(failures)} failures -> {outdir}")
    return 2 if failures else 0


def cmd_exp(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    backend = build_backend(cfg)
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    name = args.experiment
    params: dict = {"tie_epsilon": cfg.tie_epsilon}
    failures: list = []

    if name == "stereo":
        seeds = read_seeds(args.seeds) if args.seeds else load_bundled_seeds()
        result = experiments.run_stereotypes(
            backend, seeds, parallelism=cfg.parallelism, tie_epsilon=cfg.tie_epsilon
        )
        tables = experiments.stereotype_tables(result)
        params["n_seeds"] = len(seeds)
        failures = result.failures
    else:
        if not args.data:
            raise ConfigError(f"experiment {name!r} requires --data")
        samples, line_errors = _load_samples(args.data, args.format)
        params["data"] = args.data
        if line_errors:
            failures.extend(experiments.FailureRecord(f"line:{e.line_no}", e.message) for e in line_errors)
        if name == "confusion":
            result = experiments.run_confusion(
                backend,
                samples,
                use_context=args.use_context,
                parallelism=cfg.parallelism,
                tie_epsilon=cfg.tie_epsilon,
            )
            tables = experiments.confusion_tables(result)
            params["use_context"] = args.use_context
            failures.extend(result.failures)
        elif name == "implicit":
            generics = [s for s in samples if s.original_quantifier is Quantifier.GEN]
            result = experiments.run_implicit_quantification(
                backend,
                generics,
                use_context=args.use_context,
                parallelism=cfg.parallelism,
                tie_epsilon=cfg.tie_epsilon,
            )
            tables = experiments.implicit_tables(result)
            params["use_context"] = args.use_context
            params["n_generics"] = len(generics)
            failures.extend(result.failures)
        elif name == "context":
            mode = "without_gen" if args.no_gen else "with_gen"
            if args.no_gen:
                samples = [s for s in samples if s.original_quantifier is Quantifier.GEN]
            result = experiments.run_context_sweep(
                backend,
                samples,
                max_tokens=cfg.max_context,
                candidates_mode=mode,
                context_source="random" if args.random_context else "true",
                seed=cfg.seed,
                parallelism=cfg.parallelism,
                tie_epsilon=cfg.tie_epsilon,
            )
            tables = experiments.sweep_tables(result)
            params.update(
                max_tokens=cfg.max_context,
                candidates_mode=mode,
                context_source=result.context_source,
            )
            failures.extend(result.failures)
            if not args.random_context and mode == "with_gen":
                analysis = experiments.extract_minimal_contexts(result, samples, backend)
                tables.update(experiments.minimal_context_tables(analysis))
        elif name == "hvshp":
            generics = [s for s in samples if s.original_quantifier is Quantifier.GEN]
            try:
                lengths = [int(x) for x in args.context_lengths.split(",")]
            except ValueError:
                raise ConfigError(
                    f"--context-lengths must be comma-separated integers, got {args.context_lengths!r}"
                )
            if any(k < 0 for k in lengths):
                raise ConfigError("--context-lengths must be >= 0")
            result = experiments.run_h_vs_hp(
                backend,
                generics,
                context_lengths=lengths,
                parallelism=cfg.parallelism,
                tie_epsilon=cfg.tie_epsilon,
            )
            tables = experiments.h_vs_hp_tables(result)
            params["context_lengths"] = lengths
            failures.extend(result.failures)
        else:
            raise ConfigError(f"unknown experiment: {name!r}")

    experiments.write_tables(outdir, tables)
    experiments.write_manifest(outdir, name, backend.backend_id, params, seed=cfg.seed)
    if args.charts:
        chart_kind = {"context": "sweep"}.get(name, name)
        experiments.render_chart(chart_kind, result, outdir / "chart.png")
    print(f"experiment {name}: wrote {', '.join(sorted(tables))} -> {outdir}")
    if failures:
        print(f"{len(failures)} samples failed; see failures.csv")
        return 2
    return 0


def cmd_mine(args: argparse.Namespace) -> int:
    if args.threshold < 0 or args.threshold > 1:
        raise ConfigError("--threshold must be in [0, 1]")
    scorer = None
    if args.scorer == "stub":
        scorer = mining.keyword_stub_scorer
    elif args.scorer and args.scorer != "none":
        scorer = _http_scorer(args.scorer)
    config = mining.MiningConfig(
        threshold=args.threshold,
        filters=tuple(args.filters.split(",")) if args.filters else ("exclusion", "passive"),
    )
    candidates = mining.mine(mining.read_documents(args.input), scorer, config)
    n = mining.write_candidates(candidates, args.out, source=args.source)
    print(f"wrote {n} candidates -> {args.out}")
    return 0


def _http_scorer(endpoint: str):
    import requests

    def score(sentence: str) -> float:
        resp = requests.post(endpoint, json={"text": sentence}, timeout=60)
        resp.raise_for_status()
        return float(resp.json()["score"])

    return score


def cmd_gen_stereo(args: argparse.Namespace) -> int:
    seeds = read_seeds(args.seeds) if args.seeds else load_bundled_seeds()
    if args.samples:
        samples = generate_stereotype_dataset(seeds)
        write_samples(samples, args.out)
        print(f"wrote {len(samples)} paraphrase samples ({len(seeds)} seeds) -> {args.out}")
    else:
        write_seeds(seeds, args.out)
        print(f"wrote {len(seeds)} seeds -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# Parser


def _add_backend_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--endpoint", help="scoring endpoint URL")
    p.add_argument("--model", help="model name at the endpoint")
    p.add_argument("--api-key", dest="api_key", help="bearer token for the endpoint")
    p.add_argument("--mock", help="JSON table file for the deterministic mock backend")
    p.add_argument("--cache", help="directory for the persistent score cache")
    p.add_argument("--parallelism", type=int, help="concurrent scoring requests (default 1)")
    p.add_argument("--tie-epsilon", dest="tie_epsilon", type=float, help="tie threshold in nats/token")
    p.add_argument("--seed", type=int, help="seed for randomized controls")
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--out", help="output directory or file")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="genquant",
        description="Quantifier acceptability of generic sentences via language-model surprisal",
    )
    parser.add_argument("--version", action="version", version=f"genquant {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="per-sample quantifier selection")
    p_score.add_argument("--data", required=True)
    p_score.add_argument("--format", default="congen-jsonl", choices=["congen-jsonl", "genericskb-tsv"])
    p_score.add_argument("--context", default="none", help="none, full, or a token count")
    p_score.add_argument("--no-gen", dest="no_gen", action="store_true", help="exclude GEN from candidates")
    _add_backend_flags(p_score)
    p_score.set_defaults(func=cmd_score)

    p_exp = sub.add_parser("exp", help="run an experiment")
    p_exp.add_argument("experiment", choices=["confusion", "implicit", "context", "stereo", "hvshp"])
    p_exp.add_argument("--data")
    p_exp.add_argument("--format", default="congen-jsonl", choices=["congen-jsonl", "genericskb-tsv"])
    p_exp.add_argument("--use-context", dest="use_context", action="store_true",
                       help="condition on the full context (confusion/implicit)")
    p_exp.add_argument("--no-gen", dest="no_gen", action="store_true",
                       help="exclude GEN from candidates (context sweep shares)")
    p_exp.add_argument("--random-context", dest="random_context", action="store_true",
                       help="random-context control for the sweep")
    p_exp.add_argument("--max-ctx", dest="max_ctx", type=int, help="context cap in tokens (multiple of 4)")
    p_exp.add_argument("--context-lengths", dest="context_lengths", default="0,32,128",
                       help="comma-separated lengths for hvshp")
    p_exp.add_argument("--seeds", help="stereotype seeds jsonl (stereo; default: bundled)")
    p_exp.add_argument("--charts", action="store_true", help="also render a chart (needs matplotlib)")
    _add_backend_flags(p_exp)
    p_exp.set_defaults(func=cmd_exp)

    p_mine = sub.add_parser("mine", help="mine candidate sentences from documents")
    p_mine.add_argument("--input", required=True, help="JSON-lines of {id, text}")
    p_mine.add_argument("--out", required=True, help="candidates output (congen-jsonl shape)")
    p_mine.add_argument("--threshold", type=float, default=0.7)
    p_mine.add_argument("--scorer", default="none", help="none, stub, or a classifier endpoint URL")
    p_mine.add_argument("--filters", help="comma-separated: exclusion,passive,bare_plural")
    p_mine.add_argument("--source", default="other", help="source tag for emitted candidates")
    p_mine.set_defaults(func=cmd_mine)

    p_gen = sub.add_parser("gen-stereo", help="emit stereotype seeds or paraphrase samples")
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--seeds", help="custom seeds jsonl (default: bundled)")
    p_gen.add_argument("--samples", action="store_true", help="emit paraphrase samples instead of seeds")
    p_gen.set_defaults(func=cmd_gen_stereo)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
