"""Symbols ``phi(s) = c0 s + psi(s)`` of composition operators on Dirichlet series.

``psi`` is a Dirichlet polynomial with coefficients ``c_1, c_2, ...``.  The
module also builds transferred symbols ``T o omega o 2^{-s}`` from disc maps
and runs the sampled diagnostics (class membership, Nevanlinna counting
function, compactness criterion).  Every sampling-based verdict is labelled
heuristic.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .dirichlet import DirichletPolynomial, evaluate
from .discmaps import DiscMap, TMap, parse_tmap
from .errors import ClassGError, DomainError, NumericalFailure

__all__ = [
    "Symbol",
    "MapCheckReport",
    "FixedPoint",
    "CompactnessReport",
    "PoleContactWarning",
    "check_class_g",
    "fixed_point",
    "make_symbol",
    "parse_symbol",
    "transfer_symbol",
    "nevanlinna_counting",
    "compactness_criterion",
]


class PoleContactWarning(UserWarning):
    """The closure of the disc-map image touches the pole of ``T``."""


@dataclass(frozen=True)
class Symbol:
    """``phi(s) = c0 * s + psi(s)``.

    Attributes
    ----------
    c0 : int
        Nonnegative integer slope.
    psi : DirichletPolynomial
        Finite Dirichlet part; its coefficient at ``1`` is ``c1``.
    meta : dict
        Free-form provenance (ignored by equality).
    """

    c0: int
    psi: DirichletPolynomial
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if int(self.c0) != self.c0 or self.c0 < 0:
            raise ClassGError("c0 must be a nonnegative integer")
        object.__setattr__(self, "c0", int(self.c0))
        if self.c0 == 0:
            nonconst = any(n > 1 for n, _ in self.psi)
            if not nonconst and not self.psi.coeff(1).real > 0.5:
                raise ClassGError("c0 = 0 requires psi nonconstant or a constant with real part > 1/2")

    @property
    def c1(self) -> complex:
        return self.psi.coeff(1)

    @property
    def is_constant(self) -> bool:
        return self.c0 == 0 and all(n == 1 for n, _ in self.psi)

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        out = self.c0 * s + evaluate(self.psi, s)
        return complex(out) if np.ndim(out) == 0 else out

    def derivative(self, s):
        s = np.asarray(s, dtype=complex)
        out = self.c0 + evaluate(self.psi, s, 1)
        return complex(out) if np.ndim(out) == 0 else out

    def to_json_obj(self) -> dict[str, Any]:
        return {"c0": self.c0, "psi": self.psi.to_json_obj()}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj) -> "Symbol":
        return cls(int(obj["c0"]), DirichletPolynomial.from_json_obj(obj["psi"]))

    def __repr__(self):
        return f"Symbol(c0={self.c0}, psi={self.psi!r})"


def make_symbol(family: str, **params) -> Symbol:
    """Build a symbol from a named family.

    ``shift`` (``A``): ``s + A``.  ``affine`` (``a, c, q``): ``a + c q^{-s}``.
    ``custom`` (``coeffs``, ``c0``): ``c0 s + sum coeffs[n] n^{-s}``.
    """
    if family == "shift":
        A = complex(params["A"])
        return Symbol(1, DirichletPolynomial({1: A}), {"family": "shift", "A": A})
    if family == "affine":
        a, c, q = complex(params["a"]), complex(params["c"]), int(params.get("q", 2))
        if q < 2:
            raise DomainError("affine frequency q must be >= 2")
        return Symbol(0, DirichletPolynomial({1: a, q: c}), {"family": "affine"})
    if family == "custom":
        coeffs = params.get("coeffs", {})
        psi = coeffs if isinstance(coeffs, DirichletPolynomial) else DirichletPolynomial(coeffs)
        return Symbol(int(params.get("c0", 0)), psi, {"family": "custom"})
    raise DomainError(f"unknown symbol family {family!r}")


def parse_symbol(text: str) -> Symbol:
    """Parse ``shift:A``, ``affine:a,c,q``, ``identity``, inline JSON or a JSON file path."""
    text = text.strip()
    if text.startswith("{"):
        return Symbol.from_json_obj(json.loads(text))
    name, _, arg = text.partition(":")
    if name == "identity":
        return Symbol(1, DirichletPolynomial())
    if name == "shift":
        return make_symbol("shift", A=complex(arg))
    if name == "affine":
        parts = [p for p in arg.split(",") if p]
        q = int(parts[2]) if len(parts) > 2 else 2
        return make_symbol("affine", a=complex(parts[0]), c=complex(parts[1]), q=q)
    try:
        with open(text) as fh:
            return Symbol.from_json_obj(json.load(fh))
    except OSError as exc:
        raise DomainError(f"cannot parse symbol {text!r}") from exc


# ---------------------------------------------------------------------------
# class membership


@dataclass(frozen=True)
class MapCheckReport:
    verdict: str
    margin: float
    min_re_psi: float
    worst_point: complex
    grid: dict
    tolerance: float
    heuristic: bool = True


def check_class_g(sym: Symbol, eps: float = 0.01, height: float = 200.0, count: int = 4001,
                  tol: float = 1e-9) -> MapCheckReport:
    """Sample ``Re psi`` on the line ``Re s = eps`` and compare with the class threshold.

    The threshold is ``0`` when ``c0 >= 1`` and ``1/2`` when ``c0 = 0``.
    """
    if count < 1:
        raise DomainError("empty sampling grid")
    if not eps > 0:
        raise DomainError("grid abscissa must be positive")
    t = np.linspace(-height, height, count) if count > 1 else np.zeros(1)
    s = eps + 1j * t
    re = np.real(evaluate(sym.psi, s))
    i = int(np.argmin(re))
    thresh = 0.0 if sym.c0 >= 1 else 0.5
    margin = float(re[i] - thresh)
    verdict = "heuristic-pass" if margin > tol else "fail"
    return MapCheckReport(verdict, margin, float(re[i]), complex(s[i]),
                          {"eps": eps, "height": height, "count": count}, tol)


# ---------------------------------------------------------------------------
# fixed point


@dataclass(frozen=True)
class FixedPoint:
    alpha: complex
    residual: float
    derivative: complex
    iterations: int


def fixed_point(sym: Symbol, max_iter: int = 200, tol: float = 1e-12) -> FixedPoint:
    """Fixed point of a ``c0 = 0`` symbol in ``Re s > 1/2`` by Newton's method from ``c1``."""
    if sym.c0 != 0:
        raise DomainError("fixed point is defined for c0 = 0 symbols")
    a = complex(sym.c1)
    for it in range(1, max_iter + 1):
        g = sym(a) - a
        dg = sym.derivative(a) - 1.0
        if dg == 0:
            raise NumericalFailure("Newton step with zero derivative")
        a = a - g / dg
        res = abs(sym(a) - a)
        if res <= tol:
            if not a.real > 0.5:
                raise NumericalFailure(f"fixed point {a} escapes Re s > 1/2")
            return FixedPoint(a, float(res), complex(sym.derivative(a)), it)
    raise NumericalFailure(f"fixed point iteration did not converge in {max_iter} steps")


# ---------------------------------------------------------------------------
# transference


def transfer_symbol(omega: DiscMap, T: TMap | str, K: int, pole_tol: float = 1e-6,
                    cauchy_radius: float = 0.9, tail_abscissa: float = 1.0) -> Symbol:
    """Symbol ``T(omega(2^{-s}))`` truncated to frequencies ``2^0 .. 2^K``.

    The Taylor expansion of ``T o omega`` at the origin needs ``|1 + omega(0)|``
    away from zero; that is checked against ``pole_tol``.  When the closure of
    the image merely touches ``-1`` (lens maps do) a ``PoleContactWarning`` is
    issued and recorded in ``meta``.  ``meta["tail_bound"]`` bounds the
    discarded tail on ``Re s >= tail_abscissa`` via Cauchy estimates on
    ``|z| = cauchy_radius``.
    """
    if K < 1:
        raise DomainError("K must be >= 1")
    T = parse_tmap(T) if isinstance(T, str) else T
    w = omega.taylor(K)
    if abs(1 + w[0]) < pole_tol:
        raise DomainError("omega(0) is within tolerance of the pole of T at -1")
    margins = omega.margins
    contact = margins["dist_to_minus_one"] < pole_tol
    if contact:
        warnings.warn("image closure of omega touches -1; T o omega is unbounded near that point",
                      PoleContactWarning, stacklevel=2)
    phi = T.compose_series(w, K + 1)
    psi = DirichletPolynomial({2**k: phi[k] for k in range(K + 1)})
    r = cauchy_radius
    t = np.linspace(0, 2 * np.pi, 4097)[:-1]
    Mr = float(np.max(np.abs(T(omega(r * np.exp(1j * t))))))
    q = 2.0 ** (-tail_abscissa) / r
    tail = Mr * q ** (K + 1) / (1 - q) if q < 1 else float("inf")
    meta = {
        "construction": "transfer",
        "disc_map": omega.to_json_obj(),
        "T": T.label(),
        "K": K,
        "pole_contact": bool(contact),
        "tail_bound": {"value": tail, "abscissa": tail_abscissa, "radius": r, "provenance": "cauchy-estimate"},
    }
    return Symbol(0, psi, meta)


# ---------------------------------------------------------------------------
# Nevanlinna counting function and compactness


def _inverse(sym: Symbol, s: complex, starts, max_iter: int, tol: float):
    best = None
    for w in starts:
        w = complex(w)
        for _ in range(max_iter):
            g = sym(w) - s
            if abs(g) <= tol:
                break
            d = sym.derivative(w)
            if d == 0 or not np.isfinite(d):
                break
            step = g / d
            # damp long steps so iterates do not run far into Re w < 0
            if abs(step) > 2.0:
                step *= 2.0 / abs(step)
            w = w - step
        res = abs(sym(w) - s)
        if res <= tol and w.real > 0:
            return w, res
        if best is None or res < best[1]:
            best = (w, res)
    return None, best[1] if best else np.inf


def nevanlinna_counting(sym: Symbol, s: complex, max_iter: int = 100, tol: float = 1e-10,
                        return_status: bool = False):
    """``Re phi^{-1}(s)`` for a symbol the caller declares univalent, else ``0``.

    The inverse is found by damped Newton iteration from ``(s - c1) / max(c0, 1)``
    and a few vertical offsets.  A point whose inverse does not converge to
    ``Re w > 0`` within ``tol`` is reported as outside the image.
    """
    s = complex(s)
    if s.real <= 0 and sym.c0 >= 1:
        out = (0.0, "outside image")
        return out if return_status else out[0]
    base = (s - sym.c1) / max(sym.c0, 1)
    starts = [base, complex(max(base.real, 0.5), base.imag), 1 + 1j * base.imag, 2 + 1j * base.imag]
    w, _ = _inverse(sym, s, starts, max_iter, tol)
    if w is None:
        out = (0.0, "outside image (numerical)")
    else:
        out = (float(w.real), "inverse converged")
    return out if return_status else out[0]


@dataclass(frozen=True)
class CompactnessReport:
    im_bound: float
    sigmas: tuple
    ratio_trace: tuple
    univalence_spot_check: float
    verdict: str


def compactness_criterion(sym: Symbol, sigmas=None, heights=None, ratio_tol: float = 0.05) -> CompactnessReport:
    """Sampled check of bounded ``Im psi`` and ``N_phi(s) = o(Re s)`` as ``Re s -> 0``.

    The verdict is ``"criterion satisfied (heuristic)"`` when the sampled
    ``|Im psi|`` is finite, the ratio trace is nonincreasing as ``Re s``
    decreases, and its last value is below ``ratio_tol``.
    """
    if sym.c0 < 1:
        raise DomainError("compactness criterion applies to c0 >= 1")
    sigmas = np.geomspace(1.0, 1e-3, 13) if sigmas is None else np.asarray(sigmas, dtype=float)
    heights = np.linspace(-20, 20, 41) if heights is None else np.asarray(heights, dtype=float)
    grid = np.add.outer(np.concatenate([sigmas, [2.0, 5.0]]), 1j * heights)
    im_bound = float(np.max(np.abs(np.imag(evaluate(sym.psi, grid.ravel())))))
    trace = []
    for sg in sigmas:
        vals = [nevanlinna_counting(sym, sg + 1j * t) / sg for t in heights]
        trace.append(float(max(vals)))
    # injectivity spot check: smallest |phi(a) - phi(b)| / |a - b| on a coarse grid
    pts = np.add.outer(np.linspace(0.05, 2, 6), 1j * np.linspace(-5, 5, 7)).ravel()
    vals = sym(pts)
    da = np.abs(np.subtract.outer(pts, pts))
    dv = np.abs(np.subtract.outer(vals, vals))
    np.fill_diagonal(da, 1.0)
    np.fill_diagonal(dv, 1.0)
    spot = float(np.min(dv / da))
    tr = np.array(trace)
    nonincreasing = bool(np.all(np.diff(tr) <= 1e-9))
    ok = np.isfinite(im_bound) and nonincreasing and tr[-1] <= ratio_tol
    verdict = "criterion satisfied (heuristic)" if ok else "criterion not satisfied (heuristic)"
    return CompactnessReport(im_bound, tuple(float(x) for x in sigmas), tuple(trace), spot, verdict)
