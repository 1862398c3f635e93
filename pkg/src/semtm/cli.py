"""Command-line entry point.

Subcommands wire the library into the standard workflows: ``ingest``
builds a memory store from TSV/JSONL (optionally embedding every source
segment), ``query`` retrieves matches for one segment, ``eval-sts`` runs
the sentence-similarity benchmark, ``eval-tm`` runs the end-to-end
retrieval comparison, and ``bench`` times the pipeline steps.

Output is one JSON object per line by default; ``--format table`` prints
aligned text tables instead. Exit codes: 0 success, 1 usage error,
2 data error (unreadable files, malformed content, provider failures).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import contextmanager

from .benchmark import BENCH_STEPS, bench_timing
from .embedding import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_DIM,
    HashingEmbedder,
    SubprocessEmbedder,
    embed_batch,
)
from .evaluation import (
    PAIRINGS,
    PartitionSpec,
    build_eval_rows,
    drop_ties,
    format_partition_table,
    format_sts_table,
    mean_sts_per_bucket,
    partition_and_average,
)
from .exceptions import SemtmError
from .index import VectorIndex
from .lexical import FuzzyThresholds, classify_match, fuzzy_score
from .placeholders import GazetteerTagger, Normalizer
from .store import TranslationMemoryStore
from .sts import evaluate_sts, load_sts
from .units import load_units

SIDECAR_ENV = "TMR_SIDECAR_CMD"


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1; argparse's default of 2 is reserved for data errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_provider_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("embedding provider")
    group.add_argument(
        "--provider",
        choices=("deterministic", "sidecar"),
        default="deterministic",
        help="deterministic hash embedder (default) or an external encoder process",
    )
    group.add_argument(
        "--sidecar-cmd",
        default=None,
        help=f"command line for the sidecar process (env {SIDECAR_ENV} overrides)",
    )
    group.add_argument(
        "--dim",
        type=int,
        default=None,
        help="vector dimension for the deterministic provider; defaults to the"
        f" store's dimension where one is open, else {DEFAULT_DIM}",
    )
    group.add_argument("--batch-size", type=int, default=DEFAULT_BATCH_SIZE, help="texts per embed call")


def _add_common_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("json", "table"), default="json", help="output format")
    parser.add_argument(
        "--threads",
        type=int,
        default=1,
        help="cap on worker threads; the current pipeline runs single-threaded,"
        " so this is an upper bound, not a demand",
    )


@contextmanager
def _provider(args, store_dim: int | None = None):
    if args.provider == "sidecar":
        cmd = os.environ.get(SIDECAR_ENV) or args.sidecar_cmd
        if not cmd:
            raise SemtmError(f"sidecar provider needs --sidecar-cmd or {SIDECAR_ENV}")
        provider = SubprocessEmbedder(cmd, batch_size=args.batch_size)
    else:
        dim = args.dim if args.dim is not None else (store_dim or DEFAULT_DIM)
        provider = HashingEmbedder(dim=dim, batch_size=args.batch_size)
    try:
        yield provider
    finally:
        close = getattr(provider, "close", None)
        if close is not None:
            close()


def _emit(obj) -> None:
    print(json.dumps(obj, ensure_ascii=False, sort_keys=True))


def _read_lines(path: str) -> list[str]:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read().splitlines()


def _edges(raw: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in raw.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad edge list {raw!r}") from None


def _match_payload(rank: int, unit, score: float, method: str, thresholds: FuzzyThresholds) -> dict:
    return {
        "rank": rank,
        "id": unit.id,
        "score": score,
        "kind": classify_match(score, thresholds).name.lower(),
        "method": method,
        "source_text": unit.source_text,
        "target_text": unit.target_text,
    }


def cmd_ingest(args) -> int:
    units = load_units(args.tm, args.tm_format, source_lang=args.source_lang, target_lang=args.target_lang)
    vectors = None
    dim = args.dim if args.dim is not None else DEFAULT_DIM
    if args.embed:
        with _provider(args) as provider:
            vectors = embed_batch(provider, [u.source_text for u in units]) if units else None
            dim = provider.spec.dim
    with TranslationMemoryStore.build(args.db, units, vectors, dim=dim) as store:
        payload = {"db": store.path, "count": len(store), "dim": store.dim, "embedded": args.embed}
    if args.format == "table":
        print("\n".join(f"{k}: {v}" for k, v in payload.items()))
    else:
        _emit(payload)
    return 0


def _lexical_top_k(query: str, store: TranslationMemoryStore, k: int):
    scored = [(fuzzy_score(query, rec.unit.source_text), rec.unit) for rec in store.scan()]
    scored.sort(key=lambda pair: (-pair[0], pair[1].id))
    return scored[:k]


def cmd_query(args) -> int:
    thresholds = FuzzyThresholds(fuzzy_low=args.fuzzy_low)
    with TranslationMemoryStore.open(args.db) as store:
        if len(store) == 0:
            raise SemtmError("store is empty")
        if args.method == "embed":
            index = VectorIndex.from_store(store)
            with _provider(args, store_dim=store.dim) as provider:
                vector = embed_batch(provider, [args.text])[0]
            matches = [
                (min(max(sim, 0.0), 1.0), store.get(uid).unit)
                for uid, sim in index.get_nearest(vector, k=args.k)
            ]
            method = "embedding"
        else:
            matches = _lexical_top_k(args.text, store, args.k)
            method = "lexical"
    payloads = [
        _match_payload(rank, unit, score, method, thresholds)
        for rank, (score, unit) in enumerate(matches, start=1)
    ]
    if args.format == "table":
        for p in payloads:
            print(f"{p['rank']:>2}  {p['score']:.4f}  {p['kind']:<8}  #{p['id']}  {p['target_text']}")
    else:
        for p in payloads:
            _emit(p)
    return 0


def cmd_eval_sts(args) -> int:
    pairs = load_sts(args.dataset, args.sts_format, scale=(args.scale[0], args.scale[1]))
    method = "embed_cosine" if args.method == "embed" else "edit_minmax"
    if method == "embed_cosine":
        with _provider(args) as provider:
            metrics = evaluate_sts(pairs, method, provider)
    else:
        metrics = evaluate_sts(pairs, method)
    payload = {
        "method": method,
        "pearson": metrics.pearson,
        "spearman": metrics.spearman,
        "mse": metrics.mse,
        "n": len(pairs),
    }
    if args.format == "table":
        print("\n".join(f"{k}: {v}" for k, v in payload.items()))
    else:
        _emit(payload)
    return 0


def cmd_eval_tm(args) -> int:
    queries = _read_lines(args.input)
    refs = _read_lines(args.refs)
    if len(queries) != len(refs):
        raise SemtmError(f"{len(queries)} queries but {len(refs)} references")
    normalizer = None
    if args.normalize:
        tagger = GazetteerTagger.from_tsv(args.gazetteer) if args.gazetteer else None
        normalizer = Normalizer(tagger)
    spec = PartitionSpec(args.edges)
    with TranslationMemoryStore.open(args.db) as store:
        index = VectorIndex.from_store(store)
        with _provider(args, store_dim=store.dim) as provider:
            rows = build_eval_rows(list(zip(queries, refs)), store, index, provider)
            kept = drop_ties(rows)
            report = partition_and_average(kept, spec, normalizer)
            sts_buckets = (
                mean_sts_per_bucket(kept, provider, spec, pairing=args.pairing)
                if args.sts_table
                else None
            )
    if args.format == "table":
        print(format_partition_table(report))
        print(f"rows: {len(rows)} total, {len(rows) - len(kept)} tied, {report.total} scored")
        if sts_buckets is not None:
            print()
            print(format_sts_table(sts_buckets))
    else:
        payload = report.to_dict()
        payload["rows_total"] = len(rows)
        payload["rows_tied"] = len(rows) - len(kept)
        if sts_buckets is not None:
            payload["sts_buckets"] = [
                {"range": b.label, "count": b.count, "mean_sts": b.mean_sts} for b in sts_buckets
            ]
        _emit(payload)
    return 0


def cmd_bench(args) -> int:
    steps = tuple(args.steps.split(",")) if args.steps else BENCH_STEPS
    with _provider(args) as provider:
        report = bench_timing(args.n, provider, args.repetitions, steps=steps, seed=args.seed)
    if args.format == "table":
        for name, timing in report.steps.items():
            samples = ", ".join(f"{s:.4f}" for s in timing.samples)
            print(f"{name}: median {timing.median:.4f}s  (samples: {samples})")
    else:
        _emit(report.to_dict())
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="semtm", description="translation-memory retrieval toolkit")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("ingest", help="build a memory store from a unit file")
    p.add_argument("--tm", required=True, help="unit file (TSV source<TAB>target or JSONL)")
    p.add_argument("--tm-format", choices=("tsv", "jsonl"), default="tsv")
    p.add_argument("--db", required=True, help="store file to create")
    p.add_argument("--embed", action="store_true", help="embed source segments into the store")
    p.add_argument("--source-lang", default="en")
    p.add_argument("--target-lang", default="es")
    _add_provider_args(p)
    _add_common_args(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("query", help="retrieve matches for one segment")
    p.add_argument("--db", required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--method", choices=("embed", "edit"), default="embed")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--fuzzy-low", type=float, default=0.70, help="lower bound of the fuzzy band")
    _add_provider_args(p)
    _add_common_args(p)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("eval-sts", help="sentence-similarity benchmark")
    p.add_argument("--dataset", required=True)
    p.add_argument("--sts-format", choices=("sick", "tsv3"), default="sick")
    p.add_argument("--method", choices=("embed", "edit"), required=True)
    p.add_argument("--scale", type=float, nargs=2, default=(1.0, 5.0), metavar=("LO", "HI"))
    _add_provider_args(p)
    _add_common_args(p)
    p.set_defaults(func=cmd_eval_sts)

    p = sub.add_parser("eval-tm", help="end-to-end retrieval comparison")
    p.add_argument("--db", required=True)
    p.add_argument("--input", required=True, help="incoming segments, one per line")
    p.add_argument("--refs", required=True, help="actual translations, one per line")
    p.add_argument("--normalize", action="store_true", help="placeholder-normalize before METEOR")
    p.add_argument("--gazetteer", default=None, help="entity table (surface<TAB>kind) for --normalize")
    p.add_argument("--edges", type=_edges, default=(0.0, 0.2, 0.4, 0.6, 0.8, 1.0), help="bucket edges, comma-separated")
    p.add_argument("--sts-table", action="store_true", help="also report mean similarity per bucket")
    p.add_argument("--pairing", choices=PAIRINGS, default="query_vs_source")
    _add_provider_args(p)
    _add_common_args(p)
    p.set_defaults(func=cmd_eval_tm)

    p = sub.add_parser("bench", help="time the pipeline steps")
    p.add_argument("--n", type=int, required=True, help="synthetic memory size")
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--steps", default=None, help=f"comma-separated subset of {','.join(BENCH_STEPS)}")
    p.add_argument("--seed", type=int, default=0)
    _add_provider_args(p)
    _add_common_args(p)
    p.set_defaults(func=cmd_bench)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SemtmError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
