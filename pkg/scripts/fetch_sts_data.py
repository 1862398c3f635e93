#!/usr/bin/env python3
"""Fetch the public sentence-similarity test sets used by the benchmarks.

Writes two files into the data directory (default: ./data):

  sick_test.tsv      SICK test split, tab-separated with a header row;
                     relatedness scores on the 1-5 scale.
  sts2017_test.tsv   STS 2017 track 5 (en-en) test pairs as headerless
                     sentence1<TAB>sentence2<TAB>score lines; scores on
                     the 0-5 scale.

Needs outbound network access. The correlation tests in
tests/test_acceptance.py skip themselves when these files are missing,
so run this script on a connected machine and copy the directory over
if the test environment is offline.

Usage:
    python3 scripts/fetch_sts_data.py [--data-dir DIR]
"""

from __future__ import annotations

import argparse
import io
import sys
import urllib.error
import urllib.request
import zipfile
from pathlib import Path

SICK_URLS = [
    # community mirror of the annotated test split
    "https://raw.githubusercontent.com/brmson/dataset-sts/master/data/sts/sick2014/SICK_test_annotated.txt",
]

STS2017_EVAL_URL = "http://alt.qcri.org/semeval2017/task1/data/uploads/sts2017.eval.v1.1.zip"
STS2017_GOLD_URL = "http://alt.qcri.org/semeval2017/task1/data/uploads/sts2017.gs.zip"

STS_INPUT_MEMBER = "STS2017.eval.v1.1/STS.input.track5.en-en.txt"
STS_GOLD_MEMBER = "STS2017.gs/STS.gs.track5.en-en.txt"


def fetch(url: str) -> bytes:
    print(f"fetching {url}")
    with urllib.request.urlopen(url, timeout=60) as resp:
        return resp.read()


def write_sick(data_dir: Path) -> None:
    last_error: Exception | None = None
    for url in SICK_URLS:
        try:
            raw = fetch(url).decode("utf-8")
            break
        except (urllib.error.URLError, OSError) as exc:
            last_error = exc
    else:
        raise SystemExit(f"could not download the SICK test split: {last_error}")
    lines = [line for line in raw.splitlines() if line.strip()]
    header = lines[0].split("\t")
    # accept any column order as long as the three needed names are present
    for name in ("sentence_A", "sentence_B", "relatedness_score"):
        if name not in header:
            raise SystemExit(f"unexpected SICK header, missing {name}: {header}")
    out = data_dir / "sick_test.tsv"
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out} ({len(lines) - 1} pairs)")


def write_sts2017(data_dir: Path) -> None:
    try:
        eval_zip = zipfile.ZipFile(io.BytesIO(fetch(STS2017_EVAL_URL)))
        gold_zip = zipfile.ZipFile(io.BytesIO(fetch(STS2017_GOLD_URL)))
    except (urllib.error.URLError, OSError) as exc:
        raise SystemExit(f"could not download STS2017: {exc}")
    pairs = eval_zip.read(STS_INPUT_MEMBER).decode("utf-8").splitlines()
    golds = gold_zip.read(STS_GOLD_MEMBER).decode("utf-8").splitlines()
    pairs = [p for p in pairs if p.strip()]
    golds = [g for g in golds if g.strip()]
    if len(pairs) != len(golds):
        raise SystemExit(f"{len(pairs)} sentence pairs but {len(golds)} gold scores")
    out = data_dir / "sts2017_test.tsv"
    with open(out, "w", encoding="utf-8") as fh:
        for pair, gold in zip(pairs, golds):
            s1, s2 = pair.split("\t")[:2]
            fh.write(f"{s1}\t{s2}\t{float(gold)}\n")
    print(f"wrote {out} ({len(pairs)} pairs)")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--data-dir", default="data", help="output directory (default: ./data)")
    args = parser.parse_args()
    data_dir = Path(args.data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    write_sick(data_dir)
    write_sts2017(data_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
