"""Command-line driver: extract, eval, synth, bench."""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from typing import Sequence

from .corpus import load_dictionary, load_documents
from .eval import generate_dictionary, generate_synthetic_corpus, load_jsonl, score_predictions
from .pipeline import MODES, Config, Extractor, Stats, default_threads


def atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _jsonl(records) -> str:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records)


def _require(path: str) -> None:
    if not os.path.exists(path):
        raise FileNotFoundError(f"no such file or directory: {path}")


def cmd_extract(args) -> int:
    _require(args.dict)
    _require(args.docs)
    cfg = Config(args.delta, args.tau, args.mode, not args.no_core_tokens, args.overlap)
    ex = Extractor(load_dictionary(args.dict), cfg.tau)
    out = ex.extract(load_documents(args.docs), cfg, threads=args.threads)
    atomic_write(args.out, _jsonl(e.to_record() for e in out))
    print(f"{len(out)} extractions written to {args.out}", file=sys.stderr)
    return 0


def cmd_eval(args) -> int:
    _require(args.pred)
    _require(args.truth)
    p, r, f1 = score_predictions(load_jsonl(args.pred), load_jsonl(args.truth))
    print(round(p, 6), round(r, 6), round(f1, 6))
    return 0


def cmd_synth(args) -> int:
    if args.entities:
        ents = generate_dictionary(args.entities, args.seed)
        atomic_write(args.dict, "".join(e.text + "\n" for e in ents))
    _require(args.dict)
    corpus = generate_synthetic_corpus(load_dictionary(args.dict), args.docs, args.typo_rate,
                                       args.seed, doc_tokens=args.doc_tokens,
                                       plants_per_doc=args.plants)
    for doc in corpus.documents:
        atomic_write(os.path.join(args.out_dir, doc.id + ".txt"), doc.text)
    atomic_write(args.truth, _jsonl(l.to_record() for l in corpus.truth))
    t = corpus.trace
    print(f"{len(corpus.documents)} documents, {len(corpus.truth)} labels; "
          f"{t.selected_tokens}/{t.planted_tokens} tokens selected for corruption, "
          f"{t.char_edits} character edits, {t.variant_edits} token variants, {t.skipped} skipped",
          file=sys.stderr)
    return 0


def cmd_bench(args) -> int:
    _require(args.dict)
    _require(args.docs)
    dictionary = load_dictionary(args.dict)
    docs = load_documents(args.docs)
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    for m in modes:
        if m not in MODES:
            raise ValueError(f"unknown mode {m!r}")
    cols = ("mode", "seconds", "pair_seconds", "pairs", "landmarks", "candidates", "windows", "scored",
            "extracted")
    print("\t".join(cols))
    for m in modes:
        cfg = Config(args.delta, args.tau, m)
        st = Stats()
        t0 = time.perf_counter()
        ex = Extractor(dictionary, cfg.tau)
        out = ex.extract(docs, cfg, threads=args.threads, stats=st)
        dt = time.perf_counter() - t0
        d = st.as_dict()
        print("\t".join([m, f"{dt:.3f}", f"{st.pair_seconds:.3f}"] + [str(d[c]) for c in cols[3:-1]]
                        + [str(len(out))]))
        sys.stdout.flush()
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fuzzyextract", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("extract", help="extract approximate entity mentions")
    e.add_argument("--dict", required=True)
    e.add_argument("--docs", required=True)
    e.add_argument("--delta", type=float, default=0.9)
    e.add_argument("--tau", type=float, default=0.8)
    e.add_argument("--mode", choices=MODES, default="fed-s")
    e.add_argument("--out", required=True)
    e.add_argument("--no-core-tokens", action="store_true")
    e.add_argument("--overlap", choices=("all", "best"), default="all")
    e.add_argument("--threads", type=int, default=default_threads())
    e.set_defaults(func=cmd_extract)

    v = sub.add_parser("eval", help="precision / recall / F1 of predictions")
    v.add_argument("--pred", required=True)
    v.add_argument("--truth", required=True)
    v.set_defaults(func=cmd_eval)

    s = sub.add_parser("synth", help="generate a labelled synthetic corpus")
    s.add_argument("--dict", required=True)
    s.add_argument("--docs", type=int, required=True)
    s.add_argument("--typo-rate", type=float, default=0.3)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out-dir", required=True)
    s.add_argument("--truth", required=True)
    s.add_argument("--entities", type=int, default=0,
                   help="first write a synthetic dictionary of this many entities to --dict")
    s.add_argument("--doc-tokens", type=int, default=100)
    s.add_argument("--plants", type=int, default=4)
    s.set_defaults(func=cmd_synth)

    b = sub.add_parser("bench", help="time extraction modes and report candidate counts")
    b.add_argument("--dict", required=True)
    b.add_argument("--docs", required=True)
    b.add_argument("--modes", default="fed-e,fed-s,fj-e,fj-s")
    b.add_argument("--delta", type=float, default=0.9)
    b.add_argument("--tau", type=float, default=0.8)
    b.add_argument("--threads", type=int, default=1)
    b.set_defaults(func=cmd_bench)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
