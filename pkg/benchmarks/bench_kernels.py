"""Time the compiled kernels against the numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Each kernel is run on identical inputs through both backends; outputs are
checked for agreement before timings are reported.
"""

import argparse
import json
import time

import numpy as np

from compop._ext import _fallback

try:
    from compop._ext import _kernels as _compiled
except ImportError:
    _compiled = None


def _inputs(rng, terms=8, primes=6, samples=200_000):
    exps = rng.integers(0, 3, size=(terms, primes)).astype(np.float64)
    coeffs = rng.standard_normal(terms) + 1j * rng.standard_normal(terms)
    angles = rng.random((samples, primes)) * 2 * np.pi
    return exps, coeffs, angles


def _conv_inputs(rng, size=400, top=5000):
    fa = np.unique(rng.integers(1, top, size=size)).astype(np.int64)
    fb = np.unique(rng.integers(1, top, size=size)).astype(np.int64)
    ca = rng.standard_normal(fa.size) + 1j * rng.standard_normal(fa.size)
    cb = rng.standard_normal(fb.size) + 1j * rng.standard_normal(fb.size)
    return fa, ca, fb, cb, top * 50


def _flat(out) -> np.ndarray:
    parts = out if isinstance(out, tuple) else (out,)
    return np.concatenate([np.ravel(np.asarray(x, dtype=complex)) for x in parts])


def _best(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def run(repeat: int = 5, seed: int = 0) -> list[dict]:
    rng = np.random.default_rng(seed)
    exps, coeffs, angles = _inputs(rng)
    conv = _conv_inputs(rng)
    cases = {
        "char_eval": lambda m: m.char_eval(exps, coeffs, angles),
        "mc_moments": lambda m: m.mc_moments(exps, coeffs, angles, 4.0),
        "convolve": lambda m: m.convolve(*conv),
    }
    rows = []
    for name, call in cases.items():
        t_py, o_py = _best(lambda: call(_fallback), repeat)
        row = {"kernel": name, "python_s": t_py, "cython_s": None, "speedup": None, "max_rel_diff": None}
        if _compiled is not None:
            t_cy, o_cy = _best(lambda: call(_compiled), repeat)
            a, b = _flat(o_py), _flat(o_cy)
            row.update(cython_s=t_cy, speedup=t_py / t_cy,
                       max_rel_diff=float(np.max(np.abs(a - b)) / max(np.max(np.abs(a)), 1e-300)))
        rows.append(row)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", help="write results here")
    args = ap.parse_args()
    rows = run(args.repeat, args.seed)
    print(f"{'kernel':<12}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}{'max rel diff':>14}")
    for r in rows:
        cy = f"{r['cython_s']:.4f}" if r["cython_s"] is not None else "n/a"
        sp = f"{r['speedup']:.1f}x" if r["speedup"] is not None else "n/a"
        df = f"{r['max_rel_diff']:.1e}" if r["max_rel_diff"] is not None else "n/a"
        print(f"{r['kernel']:<12}{r['python_s']:>12.4f}{cy:>12}{sp:>10}{df:>14}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
