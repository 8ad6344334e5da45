"""Command-line front end.

Every subcommand writes a primary result (JSON document or CSV table) and a
metadata block with the seed, versions, timings and truncations.  In CSV mode
the metadata goes to ``<out>.meta.json`` (or stderr when writing to stdout)
so that the table itself stays a plain header-plus-rows file.

Exit codes: 0 success, 1 invalid input, 2 resource guard, 3 numerical
failure, 4 verification budget exceeded, 5 verification check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import platform
import sys
import time
import warnings
from datetime import datetime, timezone

import numpy as np

from .errors import CompopError, DomainError, MethodError, NumericalFailure, ResourceGuardError

EXIT_OK, EXIT_INPUT, EXIT_GUARD, EXIT_NUMERIC, EXIT_BUDGET, EXIT_FAILED = 0, 1, 2, 3, 4, 5


class InputError(CompopError, ValueError):
    """Malformed command-line input."""


# ---------------------------------------------------------------------------
# input parsing


def _load_json_arg(text: str):
    """Inline JSON or a path to a JSON file."""
    t = text.strip()
    if t[:1] in "[{":
        return json.loads(t)
    try:
        with open(t, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {text!r}: {exc}") from exc


def parse_poly(text: str):
    """``1:1,2:0.5-0.2j`` or polynomial JSON (inline or file)."""
    from .dirichlet import DirichletPolynomial

    t = text.strip()
    if t[:1] in "[{" or os.path.exists(t):
        obj = _load_json_arg(t)
        if isinstance(obj, dict) and "terms" in obj:
            return DirichletPolynomial.from_json_obj(obj)
        if isinstance(obj, dict):
            return DirichletPolynomial({int(k): complex(v) for k, v in obj.items()})
        raise InputError("polynomial JSON must be an object")
    terms = {}
    for part in t.split(","):
        n, _, c = part.partition(":")
        try:
            terms[int(n)] = terms.get(int(n), 0) + complex(c.replace(" ", ""))
        except ValueError as exc:
            raise InputError(f"bad polynomial term {part!r}") from exc
    return DirichletPolynomial(terms)


def parse_corpus(text: str):
    from .dirichlet import DirichletPolynomial

    obj = _load_json_arg(text)
    if not isinstance(obj, list):
        raise InputError("a corpus is a JSON array of polynomials")
    return [DirichletPolynomial.from_json_obj(o) for o in obj]


def parse_points(text: str, kind: str | None = None):
    from .kernels import PointSequence

    obj = _load_json_arg(text)
    if isinstance(obj, list):
        obj = {"points": obj}
    if kind:
        obj = dict(obj, kind=kind)
    return PointSequence.from_json_obj(obj)


def parse_complex_list(text: str) -> np.ndarray:
    t = text.strip()
    if t[:1] == "[" or os.path.exists(t):
        obj = _load_json_arg(t)
        return np.array([complex(a, b) if isinstance(a, (int, float)) and isinstance(b, (int, float)) else complex(a)
                         for a, b in (x if isinstance(x, list) else (x, 0) for x in obj)])
    return np.array([complex(x) for x in t.split(",")])


def parse_budget(text: str) -> float:
    t = text.strip().lower()
    mult = 1.0
    for suf, m in (("ms", 1e-3), ("s", 1.0), ("m", 60.0), ("h", 3600.0)):
        if t.endswith(suf):
            t, mult = t[: -len(suf)], m
            break
    try:
        v = float(t) * mult
    except ValueError as exc:
        raise InputError(f"bad budget {text!r}") from exc
    if v <= 0:
        raise InputError("budget must be positive")
    return v


def _window(text: str | None):
    if not text:
        return None
    lo, _, hi = text.partition(",")
    return int(lo), int(hi)


# ---------------------------------------------------------------------------
# results


class Result:
    """A payload dict plus an optional table ``(columns, rows)``; rows end with a provenance column."""

    def __init__(self, payload: dict, table: tuple[list, list] | None = None, truncations: dict | None = None):
        self.payload = payload
        self.table = table
        self.truncations = truncations or {}


def _num(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, complex) or isinstance(v, np.complexfloating):
        return [float(v.real), float(v.imag)]
    if isinstance(v, np.ndarray):
        return [_num(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_num(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _num(x) for k, x in v.items()}
    return v


def _fmt_cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (complex, np.complexfloating)):
        return repr(complex(v)).strip("()")
    return str(v)


def _table_from_payload(payload: dict) -> tuple[list, list]:
    prov = payload.get("provenance", "exact")
    rows = []
    for k, v in payload.items():
        if k == "provenance" or isinstance(v, (dict, list)):
            continue
        rows.append([k, v, prov])
    return ["key", "value", "provenance"], rows


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt_cell(c) for c in r])
    return buf.getvalue()


def _versions() -> dict:
    from . import __version__
    from ._ext import BACKEND

    out = {"compop": __version__, "python": platform.python_version(), "numpy": np.__version__, "backend": BACKEND}
    for mod in ("scipy", "mpmath", "flint"):
        try:
            out[mod] = __import__(mod).__version__
        except Exception:  # optional at runtime
            pass
    return out


def _emit(args, res: Result, seconds: float):
    meta = {
        "command": args.command,
        "seed": getattr(args, "seed", None),
        "versions": _versions(),
        "seconds": seconds,
        "truncations": res.truncations,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    fmt = getattr(args, "format", "json") or "json"
    if fmt == "csv":
        cols, rows = res.table or _table_from_payload(res.payload)
        text = _csv_text(cols, rows)
        meta_text = json.dumps(meta, indent=2, sort_keys=True)
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            with open(args.out + ".meta.json", "w", encoding="utf-8") as fh:
                fh.write(meta_text + "\n")
        else:
            sys.stdout.write(text)
            sys.stderr.write(meta_text + "\n")
        return
    doc = {"result": _num(res.payload)}
    if res.table is not None:
        cols, rows = res.table
        doc["table"] = {"columns": cols, "rows": _num([list(r) for r in rows])}
    doc["meta"] = meta
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def _guard(args) -> int:
    from .operator import DEFAULT_MAX_ENTRIES

    if args.max_entries is None:
        return DEFAULT_MAX_ENTRIES
    if not args.ack_resource_guard:
        raise InputError("--max-entries needs --ack-resource-guard")
    return args.max_entries


def _need(args, *names):
    for n in names:
        if getattr(args, n, None) is None:
            raise InputError(f"--{n.replace('_', '-')} is required for {args.command}")


def cmd_compose(args) -> Result:
    from .operator import compose_basis_element, compose_polynomial
    from .symbols import parse_symbol

    _need(args, "symbol", "rows")
    sym = parse_symbol(args.symbol)
    if args.poly:
        out, disc = compose_polynomial(sym, parse_poly(args.poly), args.rows)
    else:
        _need(args, "n")
        out = compose_basis_element(sym, args.n, args.rows)
        disc = None
    rows = [[n, c.real, c.imag, "exact"] for n, c in out]
    payload = {"poly": out.to_json_obj(), "discarded_l2": disc, "provenance": "exact"}
    return Result(payload, (["n", "re", "im", "provenance"], rows), {"M": args.rows})


def _operator(args):
    from .discmaps import parse_disc_map
    from .operator import assemble, assemble_disc
    from .symbols import parse_symbol

    _need(args, "trunc")
    if args.disc_map:
        return assemble_disc(parse_disc_map(args.disc_map), args.trunc)
    _need(args, "symbol")
    return assemble(parse_symbol(args.symbol), args.trunc, M=args.rows, rows=args.row_mode, basis=args.basis,
                    max_entries=_guard(args))


def cmd_assemble(args) -> Result:
    op = _operator(args)
    cols = ["row_freq", "col_freq", "re", "im", "provenance"]
    A = op.matrix
    ii, jj = np.nonzero(A)
    rows = [[op.row_freqs[i], op.col_freqs[j], A[i, j].real, A[i, j].imag, "exact"] for i, j in zip(ii, jj)]
    obj = op.to_json_obj()
    obj["meta"].pop("timestamp", None)
    obj["provenance"] = "exact"
    obj["tails_provenance"] = "heuristic audit"
    return Result(obj, (cols, rows), {"N": len(op.col_freqs), "M": len(op.row_freqs)})


def cmd_approx(args) -> Result:
    from .spectral import approx_numbers_h2, approx_numbers_range_gram
    from .symbols import parse_symbol

    if args.method == "range-gram":
        _need(args, "symbol")
        sp = approx_numbers_range_gram(parse_symbol(args.symbol), rows=args.rows or 64)
        trunc = {"rows": args.rows or 64}
    else:
        op = _operator(args)
        sp = approx_numbers_h2(op)
        trunc = {"N": len(op.col_freqs), "M": len(op.row_freqs)}
    rows = [[n, v, "exact"] for n, v in enumerate(sp.values, 1)]
    return Result({"values": sp.values, "meta": sp.meta, "p": 2, "provenance": "exact"},
                  (["n", "value", "provenance"], rows), trunc)


def cmd_eig(args) -> Result:
    from .operator import assemble
    from .spectral import compare_spectrum, eigenvalues, leading_eigenvalues_hp
    from .symbols import parse_symbol

    _need(args, "symbol", "trunc")
    sym = parse_symbol(args.symbol)
    if args.high_precision:
        le = leading_eigenvalues_hp(sym, args.trunc, k=args.k)
        rows = [[j + 1, v.real, v.imag, q.real, q.imag, d, "exact"]
                for j, (v, q, d) in enumerate(zip(le.values, le.predicted, le.deviations))]
        payload = {"values": le.values, "predicted": le.predicted, "deviations": le.deviations,
                   "max_rel_dev": le.max_rel_dev, "prec": le.prec, "resolution": le.resolution, "provenance": "exact"}
        return Result(payload, (["n", "re", "im", "pred_re", "pred_im", "rel_dev", "provenance"], rows),
                      {"N": args.trunc, "basis": "semigroup"})
    op = assemble(sym, args.trunc, M=args.rows, basis=args.basis, max_entries=_guard(args))
    ev = eigenvalues(op)
    cmp = compare_spectrum(ev, sym, min(args.k, len(ev)))
    rows = [[j + 1, v.real, v.imag, "exact"] for j, v in enumerate(ev.values)]
    payload = {"values": ev.values, "comparison": {k: v for k, v in cmp.items() if k != "computed"},
               "provenance": "exact"}
    return Result(payload, (["n", "re", "im", "provenance"], rows), {"N": args.trunc, "basis": args.basis})


def _read_spectrum(path: str) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip()[:1] in "[{":
        obj = json.loads(text)
        if isinstance(obj, dict):
            obj = obj.get("result", obj).get("values", obj)
        return np.abs(np.array([complex(*v) if isinstance(v, list) else v for v in obj], dtype=complex))
    rd = list(csv.reader(io.StringIO(text)))
    head = rd[0]
    if "value" in head:
        j = head.index("value")
        return np.array([float(r[j]) for r in rd[1:]])
    if "re" in head and "im" in head:
        a, b = head.index("re"), head.index("im")
        return np.abs(np.array([complex(float(r[a]), float(r[b])) for r in rd[1:]]))
    raise InputError("spectrum CSV needs a value column or re/im columns")


def cmd_fit(args) -> Result:
    from .spectral import fit_decay

    _need(args, "input")
    rep = fit_decay(_read_spectrum(args.input), window=_window(args.window))
    payload = {"model": rep.model, "params": rep.params, "r2": rep.r2, "scores": rep.scores, "r2_all": rep.r2_all,
               "window": list(rep.window), "provenance": "exact"}
    rows = [[m, rep.r2_all[m], rep.scores[m], "exact"] for m in rep.scores]
    return Result(payload, (["model", "r2", "score", "provenance"], rows))


def cmd_gram(args) -> Result:
    from .kernels import gram

    _need(args, "points")
    S = parse_points(args.points, args.kernel)
    g = gram(S)
    payload = {"kind": S.kind, "n": len(S), "lam_min": g.lam_min, "lam_max": g.lam_max,
               "carleson_const": g.lam_max,
               "interp_const": g.lam_min ** -0.5 if g.lam_min > 0 else float("inf"), "provenance": "exact"}
    return Result(payload)


def cmd_carleson(args) -> Result:
    from .kernels import carleson_const_h2, lemma_bounds

    _need(args, "points")
    S = parse_points(args.points, args.kernel)
    c = carleson_const_h2(S)
    payload = {"carleson_h2": c, "provenance": "exact"}
    if args.theta is not None and S.kind == "zeta":
        if args.p >= 2:
            payload["lemma_4_1_rhs"] = lemma_bounds("4.1", theta=args.theta, p=args.p, carleson_h2=c)
        else:
            from .zeta import zeta

            mass = float(np.sum(1 / np.array([float(zeta(2 * x)) for x in S.points.real])))
            payload["lemma_4_1_rhs"] = lemma_bounds("4.1", theta=args.theta, p=args.p, mass=mass)
    return Result(payload)


def cmd_interp(args) -> Result:
    from .kernels import blaschke_separation, hinfty_interp_surrogate, interp_const_h2, lemma_bounds

    _need(args, "points")
    S = parse_points(args.points, args.kernel)
    M = interp_const_h2(S)
    payload = {"interp_h2": M, "provenance": "exact"}
    if S.kind != "disc":
        payload["blaschke_separation"] = blaschke_separation(S)
        payload["hinfty_surrogate"] = {"value": hinfty_interp_surrogate(S)["value"], "provenance": "surrogate"}
    if args.theta is not None and S.kind == "zeta":
        delta = float(S.points.real.min()) - 0.5
        payload["lemma_4_2_rhs"] = lemma_bounds("4.2", theta=args.theta, delta=delta, n=len(S), p=args.p,
                                                m_shifted=interp_const_h2(S.shift(args.theta)))
    return Result(payload)


def cmd_squaretrick(args) -> Result:
    from .kernels import h1_interp_by_squaring

    _need(args, "points", "targets")
    S = parse_points(args.points, "zeta")
    r = h1_interp_by_squaring(S, parse_complex_list(args.targets), samples=args.samples or 100_000, seed=args.seed,
                              cap=args.cap)
    payload = {
        "h1_norm_exact": {"value": r.h1_norm_exact, "provenance": "exact"},
        "h1_norm_mc": {"value": r.h1_norm_mc, "se": r.h1_se, "provenance": "mc"},
        "bound": {"value": r.bound, "provenance": "exact"},
        "m_h2": {"value": r.m_h2, "provenance": "exact"},
        "truncation_mass": {"value": r.truncation_mass, "provenance": "exact"},
        "residual": {"value": r.residual, "provenance": "exact"},
        "kernel_coeffs": {"value": r.g.coeffs, "provenance": "exact"},
        "cap": r.cap, "samples": r.samples, "seed": r.seed,
    }
    rows = [["h1_norm_exact", r.h1_norm_exact, 0.0, "exact"], ["h1_norm_mc", r.h1_norm_mc, r.h1_se, "mc"],
            ["bound", r.bound, 0.0, "exact"], ["m_h2", r.m_h2, 0.0, "exact"]]
    return Result(payload, (["quantity", "value", "se", "provenance"], rows), {"cap": r.cap})


def cmd_lp(args) -> Result:
    from .littlewood_paley import LPQuadratureSpec, comparability_ratio, lp_functional

    base = _load_json_arg(args.spec) if args.spec else {}
    base.setdefault("p", args.p)
    base.setdefault("seed", args.seed)
    if args.samples:
        base["samples"] = args.samples
    spec = LPQuadratureSpec.from_json_obj(base)
    if args.corpus:
        c = comparability_ratio(parse_corpus(args.corpus), spec.p, spec)
        rows = [[i, v, "mc"] for i, v in enumerate(c["ratios"])]
        payload = {"min": c["min"], "max": c["max"], "p": spec.p, "norm_method": c["norm_method"],
                   "spec": spec.to_json_obj(), "provenance": "mc"}
        return Result(payload, (["index", "ratio", "provenance"], rows), {"sigma_count": spec.sigma_count})
    _need(args, "poly")
    r = lp_functional(parse_poly(args.poly), spec)
    payload = r.to_json_obj()
    payload["error"] = r.error
    return Result(payload, None, {"sigma_count": spec.sigma_count, "sigma_max": r.sigma_max})


def cmd_transfer(args) -> Result:
    from .discmaps import parse_disc_map, parse_tmap
    from .spectral import kernel_frame, transferred_approx_numbers

    _need(args, "disc_map")
    rep = transferred_approx_numbers(parse_disc_map(args.disc_map), parse_tmap(args.tmap), kernel_frame(),
                                     prec=args.prec)
    n = min(len(rep.sv_phi), args.k)
    rows = [[j + 1, rep.sv_phi[j], rep.sv_omega[j], rep.sv_phi[j] / (rep.ct_estimate * rep.sv_omega[j]), "exact"]
            for j in range(n)]
    payload = {"sv_phi": rep.sv_phi[:n], "sv_omega": rep.sv_omega[:n],
               "ct_estimate": {"value": rep.ct_estimate, "provenance": "estimate", "note": rep.ct_provenance},
               "frame_size": rep.frame_size, "prec": rep.prec, "provenance": "exact"}
    return Result(payload, (["n", "a_phi", "a_omega", "ratio", "provenance"], rows),
                  {"frame_size": rep.frame_size, "prec": rep.prec})


def cmd_nevanlinna(args) -> Result:
    from .symbols import nevanlinna_counting, parse_symbol

    _need(args, "symbol", "at")
    sym = parse_symbol(args.symbol)
    pts = parse_complex_list(args.at)
    rows = []
    for s in pts:
        v, status = nevanlinna_counting(sym, complex(s), return_status=True)
        rows.append([complex(s).real, complex(s).imag, v, status, "exact"])
    return Result({"values": [r[2] for r in rows], "status": [r[3] for r in rows], "provenance": "exact"},
                  (["re", "im", "value", "status", "provenance"], rows))


def cmd_compactness(args) -> Result:
    from .symbols import check_class_g, compactness_criterion, parse_symbol

    _need(args, "symbol")
    sym = parse_symbol(args.symbol)
    rep = compactness_criterion(sym)
    g = check_class_g(sym)
    payload = {"verdict": rep.verdict, "im_bound": rep.im_bound, "sigmas": rep.sigmas, "ratio_trace": rep.ratio_trace,
               "univalence_spot_check": rep.univalence_spot_check, "class_g": g.verdict, "class_g_margin": g.margin,
               "provenance": "surrogate"}
    rows = [[s, r, "surrogate"] for s, r in zip(rep.sigmas, rep.ratio_trace)]
    return Result(payload, (["sigma", "ratio", "provenance"], rows))


def cmd_lowerbound(args) -> Result:
    from .discmaps import parse_disc_map, parse_tmap
    from .kernels import lower_bound_general
    from .symbols import parse_symbol

    _need(args, "inputs")
    inp = dict(_load_json_arg(args.inputs))
    inp.setdefault("p", args.p)
    for key in ("S", "S_prime", "Z"):
        if key in inp:
            inp[key] = [complex(a, b) for a, b in inp[key]]
    if "omega" in inp:
        om = inp["omega"]
        inp["omega"] = parse_disc_map(om if isinstance(om, str) else json.dumps(om))
    if isinstance(inp.get("T"), str):
        inp["T"] = parse_tmap(inp["T"])
    if args.symbol:
        inp["symbol"] = parse_symbol(args.symbol)
    out = lower_bound_general(args.variant, **inp)
    out["provenance"] = "surrogate" if any(t.get("provenance") == "surrogate" for t in out["terms"].values()) \
        else "exact"
    return Result(out)


def cmd_saksman(args) -> Result:
    from .operator import saksman_multiplier

    _need(args, "poly", "trunc")
    r = saksman_multiplier(parse_poly(args.poly), args.trunc)
    rows = [[n, c.real, c.imag, "exact"] for n, c in r.poly]
    return Result({"poly": r.poly.to_json_obj(), "kernel_l1": r.kernel_l1, "provenance": "exact"},
                  (["n", "re", "im", "provenance"], rows), {"N": args.trunc})


def cmd_partialsum(args) -> Result:
    from .dirichlet import norm
    from .operator import partial_sum

    _need(args, "poly", "trunc")
    f = parse_poly(args.poly)
    g = partial_sum(f, args.trunc)
    payload = {"poly": g.to_json_obj(), "provenance": "exact"}
    if args.samples:
        a = norm(g, args.p, "monte-carlo", samples=args.samples, seed=args.seed)
        b = norm(f, args.p, "monte-carlo", samples=args.samples, seed=args.seed)
        payload["norm_ratio"] = {"value": a.value / b.value if b.value else float("nan"), "p": args.p,
                                 "se_num": a.stderr, "se_den": b.stderr, "provenance": "mc"}
    rows = [[n, c.real, c.imag, "exact"] for n, c in g]
    return Result(payload, (["n", "re", "im", "provenance"], rows), {"N": args.trunc})


def cmd_verify(args) -> int:
    from .acceptance import run_suite

    budget = parse_budget(args.budget) if args.budget else None
    t0 = time.perf_counter()
    lines = []

    def show(r):
        # stdout carries the report unless --out is given
        print(r.line(), file=sys.stdout if args.out else sys.stderr, flush=True)
        lines.append(r)

    results, exceeded = run_suite(args.suite, budget, show)
    failed = [r.id for r in results if not r.passed and not r.skipped]
    report = {"suite": args.suite, "budget_s": budget, "budget_exceeded": exceeded, "failed": failed,
              "checks": [r.to_json_obj() for r in results]}
    meta = {"command": "verify", "seed": None, "versions": _versions(), "seconds": time.perf_counter() - t0,
            "timestamp": datetime.now(timezone.utc).isoformat()}
    if args.format == "csv":
        rows = [[r.id, r.name, "SKIP" if r.skipped else ("PASS" if r.passed else "FAIL"),
                 json.dumps({k: _num(v) for k, v in r.measured.items()}), r.required, r.provenance] for r in results]
        text = _csv_text(["id", "name", "status", "measured", "required", "provenance"], rows)
    else:
        text = json.dumps({"result": _num(report), "meta": meta}, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"{len(results) - len(failed)}/{len(results)} checks passed" + (" (budget exceeded)" if exceeded else ""),
          file=sys.stderr)
    if exceeded:
        return EXIT_BUDGET
    return EXIT_FAILED if failed else EXIT_OK


HANDLERS = {
    "compose": cmd_compose, "assemble": cmd_assemble, "approx": cmd_approx, "eig": cmd_eig, "fit": cmd_fit,
    "gram": cmd_gram, "carleson": cmd_carleson, "interp": cmd_interp, "squaretrick": cmd_squaretrick, "lp": cmd_lp,
    "transfer": cmd_transfer, "nevanlinna": cmd_nevanlinna, "compactness": cmd_compactness,
    "lowerbound": cmd_lowerbound, "saksman": cmd_saksman, "partialsum": cmd_partialsum,
}


# ---------------------------------------------------------------------------
# argument parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--symbol", help="shift:A, affine:a,c[,q], identity, inline JSON or JSON file")
    common.add_argument("--disc-map", help="identity, scalar:a, lens:t, mobius:a,b,c,d or JSON")
    common.add_argument("--points", help="point set: inline JSON or JSON file")
    common.add_argument("--poly", help="polynomial: 'n:c,...', inline JSON or JSON file")
    common.add_argument("--trunc", type=int, help="truncation size N")
    common.add_argument("--rows", type=int, help="row truncation M")
    common.add_argument("--p", type=float, default=2.0)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int)
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--max-entries", type=int, help="override the dense-matrix resource guard")
    common.add_argument("--ack-resource-guard", action="store_true",
                        help="acknowledge that --max-entries may exhaust memory")

    ap = argparse.ArgumentParser(prog="compop", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compose", parents=[common], help="compose a basis element or polynomial with a symbol")
    p.add_argument("--n", type=int, help="basis frequency when --poly is absent")

    for name, hlp in (("assemble", "truncated operator matrix"), ("approx", "p=2 approximation numbers")):
        p = sub.add_parser(name, parents=[common], help=hlp)
        p.add_argument("--basis", choices=("integers", "semigroup"), default="integers")
        p.add_argument("--row-mode", choices=("dense", "support"), default="dense")
        if name == "approx":
            p.add_argument("--method", choices=("dense", "range-gram"), default="dense")

    p = sub.add_parser("eig", parents=[common], help="eigenvalues and comparison with the predicted spectrum")
    p.add_argument("--basis", choices=("integers", "semigroup"), default="integers")
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--high-precision", action="store_true", help="ball-arithmetic leading eigenvalues (c0 = 0)")

    p = sub.add_parser("fit", parents=[common], help="decay model selection for a spectrum file")
    p.add_argument("--in", dest="input", help="spectrum CSV or JSON")
    p.add_argument("--window", help="1-based inclusive index window 'lo,hi'")

    for name, hlp in (("gram", "Gram matrix extremes"), ("carleson", "Carleson constant"),
                      ("interp", "interpolation constant")):
        p = sub.add_parser(name, parents=[common], help=hlp)
        p.add_argument("--kernel", choices=("zeta", "halfplane", "disc"))
        if name != "gram":
            p.add_argument("--theta", type=float, help="shift for the lemma right-hand side")

    p = sub.add_parser("squaretrick", parents=[common], help="H^1 interpolation by squaring")
    p.add_argument("--targets", help="comma list or JSON array of complex targets")
    p.add_argument("--cap", type=int, default=64)

    p = sub.add_parser("lp", parents=[common], help="Littlewood-Paley functional or corpus ratios")
    p.add_argument("--spec", help="LPQuadratureSpec JSON")
    p.add_argument("--corpus", help="JSON array of polynomials")

    p = sub.add_parser("transfer", parents=[common], help="transferred approximation numbers")
    p.add_argument("--tmap", default="T_eps:0.1")
    p.add_argument("--prec", type=int, default=160)
    p.add_argument("--k", type=int, default=40)

    p = sub.add_parser("nevanlinna", parents=[common], help="counting function of a univalent symbol")
    p.add_argument("--at", help="comma list of points")

    sub.add_parser("compactness", parents=[common], help="sampled compactness criterion")

    p = sub.add_parser("lowerbound", parents=[common], help="general lower bound for a_n")
    p.add_argument("--variant", choices=("6.1", "6.2", "9.2"), required=True)
    p.add_argument("--inputs", help="inputs JSON")

    sub.add_parser("saksman", parents=[common], help="Saksman multiplier and kernel L1 norm")
    sub.add_parser("partialsum", parents=[common], help="partial sum and MC norm ratio")

    p = sub.add_parser("verify", parents=[common], help="run acceptance suites")
    p.add_argument("suite", choices=("core", "spectral", "kernels", "lp", "all"))
    p.add_argument("--budget", help="time cap, e.g. 600s or 10m")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        if args.command == "verify":
            return cmd_verify(args)
        t0 = time.perf_counter()
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            res = HANDLERS[args.command](args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        _emit(args, res, time.perf_counter() - t0)
        return EXIT_OK
    except ResourceGuardError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, DomainError, MethodError, CompopError, ValueError, KeyError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
