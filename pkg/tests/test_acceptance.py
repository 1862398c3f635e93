"""Acceptance gate: one test per shipped guarantee.

Every test records a "[ACCEPT] <criterion>: PASS/FAIL/SKIP" line that
the terminal summary hook in conftest echoes after the run, so the
verdict list is visible in any pytest invocation. Tolerances are pinned
in the assertions, not configurable: loosening them is an API change,
not a test tweak.

The correlation baselines need two public datasets that cannot be
bundled; run scripts/fetch_sts_data.py on a connected machine to place
them under data/ (or point SEMTM_STS_DATA at them). The cross-component
criteria additionally need the sidecar built (npm --prefix sidecar
install && npm --prefix sidecar run build); the real-encoder one also
needs its checkpoint download.
"""

import os
import random
import subprocess
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

import conftest

from semtm import (
    GazetteerTagger,
    HashingEmbedder,
    MatchResult,
    Normalizer,
    PartitionSpec,
    SubprocessEmbedder,
    TranslationMemoryStore,
    TranslationUnit,
    VectorIndex,
    align_exact,
    build_eval_rows,
    cosine,
    detect_dates,
    drop_ties,
    embed_batch,
    evaluate_sts,
    levenshtein,
    load_sts,
    meteor_score,
    partition_and_average,
    pearson,
    spearman,
)
from semtm.benchmark import bench_timing
from semtm.evaluation import EvalRow

TESTS_DIR = Path(__file__).resolve().parent
STS_DATA_DIR = Path(os.environ.get("SEMTM_STS_DATA", TESTS_DIR.parent / "data"))


def _report(name: str, verdict: str) -> None:
    conftest.ACCEPTANCE_VERDICTS.append(f"[ACCEPT] {name}: {verdict}")


@contextmanager
def criterion(name: str):
    try:
        yield
    except pytest.skip.Exception as exc:
        _report(name, f"SKIP ({exc})")
        raise
    except BaseException:
        _report(name, "FAIL")
        raise
    _report(name, "PASS")


# --- 1. edit distance against the textbook recursive definition ---------


def recursive_levenshtein(a: str, b: str) -> int:
    memo: dict[tuple[int, int], int] = {}

    def rec(i: int, j: int) -> int:
        if (i, j) in memo:
            return memo[(i, j)]
        if i == 0:
            result = j
        elif j == 0:
            result = i
        else:
            cost = a[i - 1] != b[j - 1]
            result = min(rec(i - 1, j) + 1, rec(i, j - 1) + 1, rec(i - 1, j - 1) + cost)
        memo[(i, j)] = result
        return result

    return rec(len(a), len(b))


def test_edit_distance_oracle():
    with criterion("edit-distance-oracle"):
        rng = random.Random(20250817)
        alphabet = "abcd"
        t0 = time.perf_counter()
        for _ in range(10_000):
            a = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))
            b = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))
            assert levenshtein(a, b) == recursive_levenshtein(a, b), (a, b)
        elapsed = time.perf_counter() - t0
        assert elapsed < 10.0, f"oracle comparison took {elapsed:.1f}s"


# --- 2. top-k retrieval against an exhaustive scan -----------------------


def exhaustive_top5(ids, matrix, norms, query):
    qnorm = np.linalg.norm(query)
    sims = [float(np.dot(row, query)) / (norms[i] * qnorm) for i, row in enumerate(matrix)]
    order = sorted(range(len(ids)), key=lambda i: (-sims[i], ids[i]))
    return [ids[i] for i in order[:5]]


def test_knn_oracle():
    with criterion("knn-oracle"):
        rng = np.random.default_rng(7)
        matrix = rng.standard_normal((1000, 512))
        matrix[500:510] = matrix[0:10]  # engineered exact ties
        ids = [(i * 7) % 1000 for i in range(1000)]  # unique, non-monotonic
        norms = [float(np.linalg.norm(row)) for row in matrix]
        index = VectorIndex.from_matrix(ids, matrix)
        queries = list(rng.standard_normal((50, 512)))
        queries.extend(matrix[i].copy() for i in range(5))  # hit the duplicated rows
        for q in queries:
            expected = exhaustive_top5(ids, matrix, norms, q)
            got = [uid for uid, _ in index.get_nearest(q, k=5)]
            assert got == expected


# --- 3. metric axioms -----------------------------------------------------


def test_metric_axioms():
    with criterion("metric-axioms"):
        tol = 1e-9
        rng = np.random.default_rng(11)
        for _ in range(200):
            dim = int(rng.integers(2, 65))
            a = rng.standard_normal(dim)
            b = rng.standard_normal(dim)
            c_ab = cosine(a, b)
            assert abs(c_ab - cosine(b, a)) <= tol
            assert -1.0 - tol <= c_ab <= 1.0 + tol
            scale = float(rng.uniform(0.01, 100.0))
            assert abs(cosine(scale * a, b) - c_ab) <= tol
        # positive scaling of the query must not change which memory
        # vector wins
        memory = rng.standard_normal((50, 32))
        for _ in range(20):
            q = rng.standard_normal(32)
            base = max(range(50), key=lambda i: cosine(q, memory[i]))
            for scale in (0.001, 0.5, 40.0):
                assert max(range(50), key=lambda i: cosine(scale * q, memory[i])) == base
        for seed in range(10):
            r = np.random.default_rng(seed)
            x = r.standard_normal(40)
            y = r.standard_normal(40)
            p = pearson(x, y)
            assert abs(pearson(2.5 * x + 3.0, y) - p) <= tol
            assert abs(pearson(-2.5 * x + 3.0, y) + p) <= tol
            s = spearman(x, y)
            assert abs(spearman(np.exp(x), y) - s) <= tol
            assert abs(spearman(x**3, y) - s) <= tol


# --- 4. METEOR worked examples and alignment oracle ----------------------


def oracle_align(hyp, ref):
    """Exhaustively enumerate one-to-one matchings: maximum matches,
    then minimum chunk count. Only viable for tiny token lists."""

    def chunks_of(pairs):
        chunks = 0
        prev = None
        for i, j in pairs:
            if prev is None or i != prev[0] + 1 or j != prev[1] + 1:
                chunks += 1
            prev = (i, j)
        return chunks

    best = None

    def rec(i, used, pairs):
        nonlocal best
        if i == len(hyp):
            key = (len(pairs), -chunks_of(pairs))
            if best is None or key > best:
                best = key
            return
        rec(i + 1, used, pairs)
        for j, token in enumerate(ref):
            if token == hyp[i] and j not in used:
                rec(i + 1, used | {j}, pairs + [(i, j)])

    rec(0, frozenset(), [])
    matches, neg_chunks = best
    return matches, -neg_chunks if matches else 0


def test_meteor_hand_cases():
    with criterion("meteor-hand-cases"):
        # worked examples from the scorer's docstring
        assert meteor_score("the cat sat", "the cat sat") == pytest.approx(
            1.0 - 0.5 * (1.0 / 3.0) ** 3, abs=1e-6
        )
        assert meteor_score("the cat", "cat the") == pytest.approx(0.5, abs=1e-6)
        assert meteor_score("aa bb", "cc dd") == 0.0
        # alignment equals the exhaustive oracle for token lists <= 6
        rng = random.Random(99)
        cases = [
            ([], []),
            (["a"] * 6, ["a"] * 6),
            (["a", "b"], ["b", "a"]),
            (["a", "b", "c"], ["x", "y", "z"]),
            (["b", "c"], ["b", "a", "b", "c"][:4]),
        ]
        for _ in range(1500):
            hyp = [rng.choice("abc") for _ in range(rng.randint(0, 6))]
            ref = [rng.choice("abc") for _ in range(rng.randint(0, 6))]
            cases.append((hyp, ref))
        for hyp, ref in cases:
            expected = oracle_align(hyp, ref)
            got = align_exact(hyp, ref)
            assert (got.matches, got.chunks) == expected, (hyp, ref)


# --- 5. correlation baselines on the public datasets ---------------------


def test_sts_baselines():
    with criterion("sts-baselines"):
        sick = STS_DATA_DIR / "sick_test.tsv"
        sts2017 = STS_DATA_DIR / "sts2017_test.tsv"
        if not (sick.exists() and sts2017.exists()):
            pytest.skip(
                f"datasets not found under {STS_DATA_DIR}; "
                "run scripts/fetch_sts_data.py on a connected machine"
            )
        t0 = time.perf_counter()
        sick_metrics = evaluate_sts(load_sts(sick, "sick"), "edit_minmax")
        assert abs(sick_metrics.pearson - 0.321) <= 0.05, sick_metrics
        assert abs(sick_metrics.spearman - 0.422) <= 0.05, sick_metrics
        assert 3.112 / 10 <= sick_metrics.mse <= 3.112 * 10, sick_metrics
        sts_metrics = evaluate_sts(load_sts(sts2017, "tsv3", scale=(0.0, 5.0)), "edit_minmax")
        assert abs(sts_metrics.pearson - 0.360) <= 0.05, sts_metrics
        assert abs(sts_metrics.spearman - 0.481) <= 0.05, sts_metrics
        assert 2.331 / 10 <= sts_metrics.mse <= 2.331 * 10, sts_metrics
        assert time.perf_counter() - t0 < 120.0


# --- 6. retrieval latency -------------------------------------------------


def test_retrieval_latency():
    with criterion("retrieval-latency"):
        provider = HashingEmbedder(dim=512)
        sizes = (10_000, 50_000, 230_000)
        per_vector = {}
        medians = {}
        for n in sizes:
            report = bench_timing(n, provider, repetitions=3, steps=("retrieve_single_query",))
            med = report.steps["retrieve_single_query"].median
            medians[n] = med
            per_vector[n] = med / n
        assert medians[230_000] <= 0.40, f"median {medians[230_000]:.3f}s over 230k vectors"
        ratio = max(per_vector.values()) / min(per_vector.values())
        assert ratio < 3.0, f"per-vector medians not linear: {per_vector}"


# --- 7. end-to-end determinism -------------------------------------------

CITIES = ("Madrid", "Lisboa", "Roma", "Berna", "Viena")
ITEMS = ("toner", "papel", "licencias", "cables", "mesas")


def toy_tm_rows():
    rows = []
    for i in range(100):
        city = CITIES[i % 5]
        item = ITEMS[(i * 3) % 5]
        day = 1 + (i % 27)
        n = 3 + (i * 7) % 90
        kind = i % 4
        if kind == 0:
            rows.append(
                (
                    f"order {i} ships {n} boxes of {item} to {city}",
                    f"el pedido {i} envía {n} cajas de {item} a {city}",
                )
            )
        elif kind == 1:
            rows.append(
                (
                    f"invoice {i} is due on {day}/3/2021 in {city}",
                    f"la factura {i} vence el {day}/3/2021 en {city}",
                )
            )
        elif kind == 2:
            rows.append(
                (
                    f"the meeting about {item} moved to room {n}",
                    f"la reunión sobre {item} pasó a la sala {n}",
                )
            )
        else:
            rows.append(
                (
                    f"please confirm receipt of {n} {item} units for ticket {i}",
                    f"confirme la recepción de {n} unidades de {item} para el caso {i}",
                )
            )
    return rows


def run_cli(argv, cwd):
    return subprocess.run(
        [sys.executable, "-m", "semtm.cli", *argv],
        cwd=cwd,
        capture_output=True,
        timeout=300,
    )


def test_eval_determinism(tmp_path):
    with criterion("eval-determinism"):
        rows = toy_tm_rows()
        tm = tmp_path / "toy.tsv"
        tm.write_text("".join(f"{s}\t{t}\n" for s, t in rows), encoding="utf-8")
        db = tmp_path / "toy.stm"
        proc = run_cli(
            ["ingest", "--tm", str(tm), "--db", str(db), "--embed", "--dim", "64"], tmp_path
        )
        assert proc.returncode == 0, proc.stderr

        verbatim = [rows[i] for i in range(0, 100, 7)]
        perturbed = [
            (s.replace("3", "8", 1) + " urgently", t.replace("3", "8", 1))
            for s, t in (rows[i] for i in range(1, 100, 9))
        ]
        queries, refs = zip(*(verbatim + perturbed))
        (tmp_path / "q.txt").write_text("\n".join(queries) + "\n", encoding="utf-8")
        (tmp_path / "r.txt").write_text("\n".join(refs) + "\n", encoding="utf-8")

        base_argv = [
            "eval-tm", "--db", str(db), "--input", str(tmp_path / "q.txt"),
            "--refs", str(tmp_path / "r.txt"), "--dim", "64",
        ]
        for argv in (base_argv, base_argv + ["--normalize", "--sts-table"]):
            first = run_cli(argv, tmp_path)
            second = run_cli(argv, tmp_path)
            assert first.returncode == 0, first.stderr
            assert second.returncode == 0, second.stderr
            assert first.stdout == second.stdout  # byte-identical reports

        # verbatim queries: both methods must return the very unit the
        # query came from, at similarity 1.0 (embedding within one float64
        # rounding step of 1.0, clamped into [0, 1]); all such rows are
        # ties and drop out
        units = [TranslationUnit(i, s, t) for i, (s, t) in enumerate(rows)]
        provider = HashingEmbedder(dim=64)
        vectors = embed_batch(provider, [u.source_text for u in units])
        index = VectorIndex.from_matrix([u.id for u in units], vectors)
        store = TranslationMemoryStore.build(tmp_path / "lib.stm", units, vectors, dim=64)
        try:
            inputs = [(u.source_text, u.target_text) for u in units[:20]]
            eval_rows = build_eval_rows(inputs, store, index, provider)
        finally:
            store.close()
        for row, unit in zip(eval_rows, units):
            assert row.lex_match.unit.id == unit.id
            assert row.emb_match.unit.id == unit.id
            assert row.lex_match.score == 1.0
            assert row.lex_fuzzy == 1.0
            assert abs(row.emb_match.score - 1.0) <= 1e-9
        assert drop_ties(eval_rows) == []


# --- 8. placeholder normalization ----------------------------------------


def make_eval_row(fuzzy):
    lex = TranslationUnit(0, "src a", "tgt a")
    emb = TranslationUnit(1, "src b", "tgt b")
    return EvalRow(
        query="q",
        reference="r",
        lex_match=MatchResult(lex, fuzzy, "lexical"),
        emb_match=MatchResult(emb, fuzzy, "embedding"),
        lex_fuzzy=fuzzy,
        meteor_lex=0.5,
        meteor_emb=0.5,
    )


def test_normalization_pipeline():
    with criterion("normalization-pipeline"):
        sentences = (TESTS_DIR / "data" / "spanish_50.txt").read_text(encoding="utf-8").splitlines()
        assert len(sentences) == 50
        tagger = GazetteerTagger.from_tsv(TESTS_DIR / "data" / "gazetteer.tsv")
        normalizer = Normalizer(tagger)
        for sentence in sentences:
            once = normalizer(sentence)
            assert normalizer(once) == once, sentence  # idempotent
            assert not any(ch.isdigit() for ch in once), sentence
            if detect_dates(sentence):
                # date spans survive as one token; the number pass never
                # shreds their digits
                assert "DATE" in once, sentence
        assert normalizer("el 5 de marzo de 2018") == "el DATE"
        assert normalizer("María pagó 50 en Madrid") == "PER pagó NUM en LOC"

        spec = PartitionSpec()
        assert spec.bucket_of(0.8) == spec.n_buckets - 1  # boundary joins the top bucket
        fuzzies = [0.0, 0.1, 0.2, 0.5, 0.79, 0.8, 0.95, 1.0]
        report = partition_and_average([make_eval_row(f) for f in fuzzies])
        assert report.total == len(fuzzies)
        assert sum(b.count for b in report.buckets) == report.total
        assert report.buckets[-1].count == 3  # 0.8, 0.95 and 1.0


# --- 9/10. cross-component checks through the encoder sidecar -----------
#
# Both run the real wire protocol against the TypeScript process under
# sidecar/. They skip, with instructions, when the sidecar is not built;
# the first additionally needs the pretrained checkpoint (a download) and
# the benchmark datasets, so offline it reports exactly what is missing.

SIDECAR_MAIN = TESTS_DIR.parent / "sidecar" / "dist" / "main.js"
SIDECAR_BUILD_HINT = "npm --prefix sidecar install && npm --prefix sidecar run build"


def _sidecar_cmd(*extra: str) -> list[str]:
    import shutil

    if shutil.which("node") is None:
        pytest.skip("node is not on PATH")
    if not SIDECAR_MAIN.exists():
        pytest.skip(f"sidecar not built; run {SIDECAR_BUILD_HINT}")
    return ["node", str(SIDECAR_MAIN), *extra]


def test_sidecar_real_encoder_baselines():
    from semtm.exceptions import ProviderError

    with criterion("sidecar-real-encoder"):
        cmd = _sidecar_cmd("--model", "use")
        sick = STS_DATA_DIR / "sick_test.tsv"
        sts17 = STS_DATA_DIR / "sts2017_test.tsv"
        if not (sick.exists() and sts17.exists()):
            pytest.skip(
                f"datasets not found under {STS_DATA_DIR}; run scripts/fetch_sts_data.py"
                " on a connected machine"
            )
        try:
            provider = SubprocessEmbedder(cmd)
        except ProviderError as exc:
            # the sidecar answers but cannot load the checkpoint (offline)
            pytest.skip(f"real encoder unavailable: {exc}")
        with provider:
            sick_metrics = evaluate_sts(load_sts(sick, "sick"), "embed_cosine", provider)
            assert sick_metrics.pearson >= 0.70
            sts17_metrics = evaluate_sts(
                load_sts(sts17, "tsv3", scale=(0.0, 5.0)), "embed_cosine", provider
            )
            assert sts17_metrics.pearson >= 0.70


# The directional claim: on memories where surface form and meaning come
# apart, embedding retrieval wins every band below 0.8 and loses the
# near-verbatim band. The fixture constructs that separation explicitly:
# per probe, one stored unit shares the query's token multiset (reordered,
# correct target) and one is a character-level mutation (token soup,
# unrelated target) tuned to a chosen fuzzy band. Groups use disjoint
# alphabets, so cross-talk is bounded: with no shared letters but spaces,
# levenshtein(a, b) >= max(len) - min(space counts). Fillers are hundreds
# of characters longer than any query, so the lexical scan's length prune
# drops them in O(1) and the 10k-unit scan stays fast.

DIRECTIONAL_BANDS = ((0.160, 0.185), (0.27, 0.33), (0.47, 0.53), (0.67, 0.73))


def _unique_tokens(rng: random.Random, alphabet: str, count: int, length: int = 7) -> list[str]:
    seen: set[str] = set()
    out: list[str] = []
    while len(out) < count:
        tok = "".join(rng.choice(alphabet) for _ in range(length))
        if tok not in seen:
            seen.add(tok)
            out.append(tok)
    return out


def _mutate_to_band(rng: random.Random, query: str, alphabet: str, band: tuple[float, float]) -> str:
    """Character-substitute a copy of ``query`` until its fuzzy score lands in ``band``."""
    from semtm import fuzzy_score

    lo, hi = band
    letters = [i for i, ch in enumerate(query) if ch != " "]
    k = min(len(letters), round(len(query) * (1.0 - (lo + hi) / 2.0)))
    for _ in range(40):
        chosen = rng.sample(letters, k)
        chars = list(query)
        for i in chosen:
            chars[i] = rng.choice([c for c in alphabet if c != chars[i]])
        bait = "".join(chars)
        got = fuzzy_score(query, bait)
        if lo <= got <= hi:
            return bait
        k += 1 if got > hi else -1
        k = max(1, min(len(letters), k))
    raise AssertionError(f"could not tune a bait into {band}")


def _directional_fixture(rng: random.Random):
    """40 probe groups over disjoint alphabets plus fillers; >= 10k units."""
    from semtm import fuzzy_score

    # alphabets must be wide: over ~239 characters, random same-alphabet
    # strings keep edit similarity near 0.13, leaving room below the
    # lowest bait band; narrow alphabets push every string pair above it
    pool = [chr(0x4E00 + i) for i in range(41 * 239)]
    alphabets = ["".join(pool[i * 239 : (i + 1) * 239]) for i in range(41)]
    units: list[TranslationUnit] = []
    probes = []  # (query, reference, lex_winner_id, emb_winner_id, bucket_index)

    for p in range(40):
        alphabet = alphabets[p]
        bucket = p % 5
        toks = _unique_tokens(rng, alphabet, 60)
        ref = " ".join(toks[30:38])
        garbage = " ".join(toks[40:48])
        aligned_id, other_id = 2 * p, 2 * p + 1
        if bucket < 4:
            band = DIRECTIONAL_BANDS[bucket]
            n_src = 10
            while True:
                src = toks[:n_src]
                query = " ".join(src)
                aligned_src = " ".join(reversed(src))
                # the reordered twin must sit safely below the bait's band
                if fuzzy_score(query, aligned_src) <= band[0] - 0.03:
                    break
                n_src += 2
                # 18 tokens is also the length prune's headroom: longer
                # queries would stop the fillers from being skipped
                assert n_src <= 18, "reversal never left the bait's band"
            bait_src = _mutate_to_band(rng, query, alphabet, band)
            units.append(TranslationUnit(aligned_id, aligned_src, ref))
            units.append(TranslationUnit(other_id, bait_src, garbage))
            probes.append((query, ref, other_id, aligned_id, bucket))
        else:
            src = toks[:10]
            query = " ".join(src)
            mutated = list(src)
            mutated[4] = toks[50]  # one token swapped: near-verbatim
            verbatim_src = " ".join(mutated)
            decoy_src = " ".join(src[3:] + src[:3])  # same multiset, reordered
            assert fuzzy_score(query, verbatim_src) >= 0.85
            assert fuzzy_score(query, decoy_src) <= 0.75
            units.append(TranslationUnit(aligned_id, verbatim_src, ref))
            units.append(TranslationUnit(other_id, decoy_src, garbage))
            probes.append((query, ref, aligned_id, other_id, bucket))

    # Filler sources must be long enough that the scan's length prune can
    # reject them in O(1): the prune allows distances up to about
    # (1 - incumbent) * len(filler), so len(filler) must exceed
    # len(query) / incumbent even for the weakest incumbent (~0.16).
    filler_tokens = _unique_tokens(rng, alphabets[40], 300)
    for i in range(9_970):
        src = " ".join(rng.choice(filler_tokens) for _ in range(120))
        tgt = " ".join(rng.choice(filler_tokens) for _ in range(5))
        units.append(TranslationUnit(80 + i, src, tgt))
    return units, probes


def test_sidecar_directional_buckets(tmp_path):
    with criterion("sidecar-directional-buckets"):
        cmd = _sidecar_cmd("--model", "mock", "--dim", "128")
        units, probes = _directional_fixture(random.Random(20250821))
        assert len(units) >= 10_000

        with SubprocessEmbedder(cmd) as provider:
            assert provider.spec.dim == 128
            vectors = embed_batch(provider, [u.source_text for u in units])
            with TranslationMemoryStore.build(
                tmp_path / "directional.stm", units, vectors, dim=128
            ) as store:
                index = VectorIndex.from_store(store)
                rows = build_eval_rows(
                    [(query, ref) for query, ref, _, _, _ in probes], store, index, provider
                )

        for row, (query, _, lex_id, emb_id, _) in zip(rows, probes):
            assert row.lex_match.unit.id == lex_id, query
            assert row.emb_match.unit.id == emb_id, query

        kept = drop_ties(rows)
        assert len(kept) == len(rows)  # winners always differ, nothing to drop
        report = partition_and_average(kept)
        assert [b.count for b in report.buckets] == [8, 8, 8, 8, 8]
        for stats in report.buckets[:-1]:
            assert stats.avg_meteor_emb > stats.avg_meteor_lex, stats.label
        top = report.buckets[-1]
        assert top.avg_meteor_emb < top.avg_meteor_lex, top.label
