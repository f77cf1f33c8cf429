"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--end-to-end]

Kernel timings call both backends directly on the same inputs. --end-to-end also
runs a small extraction in two subprocesses, one with FUZZYEXTRACT_PURE=1.
"""
import argparse
import os
import random
import subprocess
import sys
import tempfile
import timeit
from collections import Counter

from fuzzyextract import _pykernels
from fuzzyextract.eval import generate_dictionary
from fuzzyextract.matcher import TokenIndex, bigrams

try:
    from fuzzyextract import _ckernels
except ImportError:
    _ckernels = None


def _words(rng, n):
    return ["".join(rng.choice("abcdefghij") for _ in range(rng.randint(3, 12))) for _ in range(n)]


def cases(seed=0):
    rng = random.Random(seed)
    pairs = list(zip(_words(rng, 2000), _words(rng, 2000)))
    dps = []
    for _ in range(300):
        m, c = rng.randint(1, 6), rng.randint(1, 12)
        ew = [rng.random() for _ in range(m)]
        cw = [rng.random() for _ in range(c)]
        eds = [rng.choice([-1.0, rng.uniform(0.8, 1.0)]) for _ in range(m * c)]
        dps.append((ew, cw, eds))
    index = TokenIndex(generate_dictionary(5000, seed), 0.8)
    queries = []
    for tok in rng.sample(index.strings, 500):
        gids, cnts = [], []
        for g, c in Counter(bigrams(tok)).items():
            gids.append(index.gram_id[g])
            cnts.append(c)
        need = [0] * (2 * len(tok) + 2)
        for length in range(len(tok) - 1, len(tok) + 2):
            if length > 0:
                need[length] = max(0, max(len(tok), length) - 1 - 2 * 2)
        queries.append((gids, cnts, need))
    return pairs, dps, index, queries


def run_kernels(mod, pairs, dps, index, queries):
    from array import array
    for a, b in pairs:
        mod.levenshtein(a, b)
        mod.levenshtein(a, b, 2)
    for ew, cw, eds in dps:
        mod.fed_dp(ew, cw, eds, False)
        mod.fed_dp(ew, cw, eds, True)
    for gids, cnts, need in queries:
        mod.count_filter(gids, cnts, index._offsets, index._post_sids, index._post_cnts,
                         index._str_len, array("i", need), index._scratch)


def end_to_end(pure: bool) -> float:
    env = dict(os.environ)
    if pure:
        env["FUZZYEXTRACT_PURE"] = "1"
    with tempfile.TemporaryDirectory() as tmp:
        d = os.path.join(tmp, "dict.txt")
        subprocess.run([sys.executable, "-m", "fuzzyextract", "synth", "--dict", d, "--entities", "2000",
                        "--docs", "40", "--doc-tokens", "300", "--typo-rate", "0.3", "--seed", "3",
                        "--out-dir", os.path.join(tmp, "docs"), "--truth", os.path.join(tmp, "t.jsonl")],
                       check=True, env=env, capture_output=True)
        res = subprocess.run([sys.executable, "-m", "fuzzyextract", "bench", "--dict", d, "--docs",
                              os.path.join(tmp, "docs"), "--modes", "fed-s,fj-s"],
                             check=True, env=env, capture_output=True, text=True)
    rows = [line.split("\t") for line in res.stdout.strip().splitlines()[1:]]
    return sum(float(r[1]) for r in rows)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args()
    data = cases()
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    times = {}
    for name, mod in backends:
        times[name] = min(timeit.repeat(lambda: run_kernels(mod, *data), number=1, repeat=args.repeat))
        print(f"kernels  {name:7s} {times[name]:.3f}s")
    if "cython" in times:
        print(f"kernels  speedup {times['python'] / times['cython']:.1f}x")
    else:
        print("compiled kernels not built; only the fallback was timed")
    if args.end_to_end:
        py = end_to_end(True)
        print(f"extract  python  {py:.3f}s")
        if _ckernels:
            cy = end_to_end(False)
            print(f"extract  cython  {cy:.3f}s")
            print(f"extract  speedup {py / cy:.1f}x")


if __name__ == "__main__":
    main()
