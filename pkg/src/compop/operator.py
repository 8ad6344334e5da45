"""Truncated matrices of composition operators and related coefficient operators.

Column ``j`` of a truncated operator holds the Dirichlet coefficients of
``C_phi(n_j^{-s}) = n_j^{-phi(s)}`` restricted to the chosen row frequencies.
For the disc basis, column ``j`` holds the Taylor coefficients of ``omega^j``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import polygamma

from .dirichlet import (DirichletPolynomial, default_workers, evaluate, evaluate_on_characters, factorize,
                        mc_power_mean, multiply, norm, omega)
from .discmaps import DiscMap, TMap
from .errors import DomainError, ResourceGuardError
from .symbols import Symbol, check_class_g

__all__ = [
    "TruncatedOperator",
    "compose_basis_element",
    "compose_polynomial",
    "assemble",
    "assemble_disc",
    "semigroup_frequencies",
    "project_omega",
    "partial_sum",
    "saksman_multiplier",
    "saksman_lambda",
    "saksman_kernel_l1",
    "contraction_multiplier",
    "verify_bohr_pullback",
    "ct_norm_estimate",
    "DEFAULT_MAX_ENTRIES",
]

DEFAULT_MAX_ENTRIES = 4000 * 4000
_TERM_FLOOR = 1e-16
_INT64_SAFE = 2**61


# ---------------------------------------------------------------------------
# basis elements


def _exp_factor(c: complex, x: float, j: int, cap: int, scale: float = 1.0):
    """Terms of ``exp(-c x j^{-s})`` as (freqs, coeffs, dropped_l1) up to ``cap``.

    Expansion stops once ``scale * |term|`` falls below ``1e-16`` past the peak.
    """
    a = -c * x
    freqs, coefs = [1], [1.0 + 0j]
    term, f, l = 1.0 + 0j, 1, 0
    dropped = 0.0
    while True:
        l += 1
        term = term * a / l
        f = f * j
        small = abs(term) * scale < _TERM_FLOOR and l > abs(a)
        if small:
            break
        if f > cap:
            dropped += abs(term)
            continue
        freqs.append(f)
        coefs.append(term)
    return freqs, coefs, dropped * scale


@lru_cache(maxsize=4096)
def _prime_part(psi: DirichletPolynomial, p: int, cap: int):
    """``prod_{j >= 2} exp(-c_j log p j^{-s})`` truncated at ``cap``."""
    out = DirichletPolynomial({1: 1.0})
    disc = 0.0
    lp = math.log(p)
    for j, c in psi:
        if j == 1:
            continue
        fr, co, d = _exp_factor(c, lp, j, cap)
        res = multiply(out, DirichletPolynomial(zip(fr, co)), cap)
        out = res.poly
        disc += d + res.discarded
    return out, disc


def _compose(sym: Symbol, n: int, M: int):
    """Coefficients of ``n^{-phi}`` with frequencies ``<= M`` and the dropped l1 mass."""
    n = int(n)
    if n < 1:
        raise DomainError("basis index must be >= 1")
    head = n**sym.c0
    if M < head:
        raise DomainError(f"row cap M={M} is below n^c0={head}")
    cap = M // head
    scale = abs(n ** (-complex(sym.c1))) if n > 1 else 1.0
    if n == 1:
        body, disc = DirichletPolynomial({1: 1.0}), 0.0
    elif n < 2**40:
        body, disc = DirichletPolynomial({1: 1.0}), 0.0
        for p, e in factorize(n):
            part, dp = _prime_part(sym.psi, p, cap)
            disc += dp * e
            for _ in range(e):
                res = multiply(body, part, cap)
                body = res.poly
                disc += res.discarded
    else:
        # direct exponent formula; avoids repeated products for huge n
        body, disc = DirichletPolynomial({1: 1.0}), 0.0
        ln = math.log(n)
        for j, c in sym.psi:
            if j == 1:
                continue
            fr, co, d = _exp_factor(c, ln, j, cap, scale)
            res = multiply(body, DirichletPolynomial(zip(fr, co)), cap)
            body = res.poly
            disc += d / scale + res.discarded
    w = n ** (-complex(sym.c1)) if n > 1 else 1.0
    out = DirichletPolynomial._from_sorted([f * head for f in body._freqs], body.coeffs * w)
    return out, disc * scale


def compose_basis_element(sym: Symbol, n: int, M: int) -> DirichletPolynomial:
    """Dirichlet coefficients of ``C_phi(n^{-s}) = n^{-phi(s)}`` up to frequency ``M``.

    Computed as ``n^{-c0 s} n^{-c1} prod_j exp(-c_j log n j^{-s})`` and
    multiplicatively over the prime factors of ``n``.
    """
    return _compose(sym, n, M)[0]


def compose_polynomial(sym: Symbol, f: DirichletPolynomial, M: int) -> tuple[DirichletPolynomial, float]:
    """``C_phi f`` truncated at frequency ``M`` and the dropped l1 mass."""
    acc: dict[int, complex] = {}
    disc = 0.0
    for n, b in f:
        col, d = _compose(sym, n, M)
        disc += abs(b) * d
        for k, v in col:
            acc[k] = acc.get(k, 0j) + b * v
    return DirichletPolynomial(acc), disc


# ---------------------------------------------------------------------------
# truncated operators


@dataclass(frozen=True)
class TruncatedOperator:
    """Finite section of a composition operator.

    Attributes
    ----------
    matrix : ndarray, shape (len(row_freqs), len(col_freqs))
    row_freqs, col_freqs : tuple of int
        Frequencies (Dirichlet basis) or monomial degrees (disc basis).
    tails : ndarray
        Per-column l2 mass of coefficients outside the row set, up to the
        audit ceiling recorded in ``meta``.
    basis : {"dirichlet", "disc-monomial"}
    """

    matrix: np.ndarray
    row_freqs: tuple
    col_freqs: tuple
    tails: np.ndarray
    basis: str = "dirichlet"
    symbol: object = None
    meta: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def is_square_section(self) -> bool:
        return tuple(self.row_freqs) == tuple(self.col_freqs)

    def to_json_obj(self) -> dict:
        A = self.matrix
        ii, jj = np.nonzero(A)
        ent = [[int(i), int(j), float(A[i, j].real), float(A[i, j].imag)] for i, j in zip(ii, jj)]
        sym = self.symbol.to_json_obj() if hasattr(self.symbol, "to_json_obj") else None
        return {
            "rows": A.shape[0],
            "cols": A.shape[1],
            "entries": ent,
            "meta": {
                "basis": self.basis,
                "symbol": sym,
                "row_freqs": [str(f) if f >= 2**53 else int(f) for f in self.row_freqs],
                "col_freqs": [str(f) if f >= 2**53 else int(f) for f in self.col_freqs],
                "tails": [float(t) for t in self.tails],
                **{k: v for k, v in self.meta.items() if k != "timestamp"},
                "timestamp": self.meta.get("timestamp"),
            },
        }

    def to_csv(self) -> str:
        """Dense CSV: header of column frequencies, one line per row, complex entries as ``a+bj``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["row_freq"] + [str(c) for c in self.col_freqs])
        for f, row in zip(self.row_freqs, self.matrix):
            w.writerow([str(f)] + [repr(complex(v)).strip("()") for v in row])
        return buf.getvalue()


def semigroup_frequencies(generators: Sequence[int], count: int) -> list[int]:
    """The ``count`` smallest elements of the multiplicative semigroup generated by ``generators``.

    The element ``1`` is always included.
    """
    gens = sorted({int(g) for g in generators if int(g) > 1})
    if not gens:
        return [1]
    import heapq

    seen = {1}
    heap = [1]
    out = []
    while heap and len(out) < count:
        x = heapq.heappop(heap)
        out.append(x)
        for g in gens:
            y = x * g
            if y not in seen:
                seen.add(y)
                heapq.heappush(heap, y)
    return out


def assemble(sym: Symbol, N: int, M: int | None = None, rows: str = "dense", basis: str = "integers",
             max_entries: int = DEFAULT_MAX_ENTRIES) -> TruncatedOperator:
    """Truncated matrix of ``C_phi``.

    Parameters
    ----------
    N : int
        Number of input columns.
    M : int, optional
        Largest output frequency.  Defaults to ``N ** max(c0, 1)`` for the
        integer basis and to the largest column frequency for the semigroup
        basis.
    rows : {"dense", "support"}
        ``dense`` uses every frequency ``1..M`` (or the semigroup list);
        ``support`` keeps only frequencies that actually occur.
    basis : {"integers", "semigroup"}
        ``integers`` takes columns ``1..N``.  ``semigroup`` (``c0 = 0`` only)
        takes the ``N`` smallest products of the frequencies of ``psi``; that
        span contains the range of ``C_phi``, so it is invariant and carries
        every nonzero eigenvalue.
    """
    t0 = time.time()
    if N < 1:
        raise DomainError("N must be >= 1")
    if basis == "integers":
        cols = list(range(1, N + 1))
        default_M = N ** max(sym.c0, 1)
    elif basis == "semigroup":
        if sym.c0 != 0:
            raise DomainError("the semigroup basis applies to c0 = 0 symbols")
        cols = semigroup_frequencies([n for n, _ in sym.psi], N)
        default_M = cols[-1]
    else:
        raise DomainError(f"unknown basis {basis!r}")
    if M is None:
        M = default_M
    elif M < default_M and basis == "integers":
        warnings.warn(f"M={M} is below the recommended {default_M}", stacklevel=2)
    if M < max(c ** sym.c0 for c in cols):
        raise DomainError("M is below n^c0 for some column")
    F = max((n for n, _ in sym.psi), default=1)
    ceiling = max(M, min(_INT64_SAFE, default_M * max(F, 2) ** 2))
    if rows == "dense" and basis == "integers" and M * len(cols) > max_entries:
        raise ResourceGuardError(f"{M}x{len(cols)} matrix exceeds the cap of {max_entries} entries")
    columns, tails = [], np.zeros(len(cols))
    for j, n in enumerate(cols):
        full, _ = _compose(sym, n, ceiling)
        kept = {f: v for f, v in full if f <= M}
        columns.append(kept)
        beyond = [abs(v) ** 2 for f, v in full if f > M]
        tails[j] = math.sqrt(sum(beyond))
    if rows == "dense":
        row_freqs = list(range(1, M + 1)) if basis == "integers" else list(cols)
    elif rows == "support":
        row_freqs = sorted({f for col in columns for f in col})
    else:
        raise DomainError(f"unknown row mode {rows!r}")
    if len(row_freqs) * len(cols) > max_entries:
        raise ResourceGuardError(f"{len(row_freqs)}x{len(cols)} matrix exceeds the cap of {max_entries} entries")
    index = {f: i for i, f in enumerate(row_freqs)}
    A = np.zeros((len(row_freqs), len(cols)), dtype=complex)
    for j, col in enumerate(columns):
        lost = 0.0
        for f, v in col.items():
            i = index.get(f)
            if i is None:
                lost += abs(v) ** 2
            else:
                A[i, j] = v
        if lost:
            tails[j] = math.sqrt(tails[j] ** 2 + lost)
    A.setflags(write=False)
    meta = {"N": N, "M": int(M) if M < 2**53 else str(M), "rows": rows, "basis_order": basis,
            "audit_ceiling": int(ceiling) if ceiling < 2**53 else str(ceiling),
            "tail_provenance": "heuristic audit", "seconds": time.time() - t0, "timestamp": time.time()}
    return TruncatedOperator(A, tuple(row_freqs), tuple(cols), tails, "dirichlet", sym, meta)


def assemble_disc(omega_map: DiscMap, N: int, quad_points: int = 1 << 15) -> TruncatedOperator:
    """Matrix of ``C_omega`` on ``H^2`` of the disc: column ``j`` holds ``omega^j``, rows ``0..N``.

    Column tails are ``sqrt(||omega^j||^2 - sum_{k<=N} |c_k|^2)`` with the
    full norm taken by boundary quadrature.
    """
    if N < 0:
        raise DomainError("N must be >= 0")
    w = omega_map.taylor(N)
    A = np.zeros((N + 1, N + 1), dtype=complex)
    cur = np.zeros(N + 1, dtype=complex)
    cur[0] = 1.0
    nfft = 1 << int(np.ceil(np.log2(2 * N + 2)))
    W = np.fft.fft(w, nfft)
    for j in range(N + 1):
        A[:, j] = cur
        cur = np.fft.ifft(np.fft.fft(cur, nfft) * W)[: N + 1]
    t = (np.arange(quad_points) + 0.5) * (2 * np.pi / quad_points)
    b = np.abs(omega_map(np.exp(1j * t)))
    full = np.array([np.mean(b ** (2 * j)) for j in range(N + 1)])
    kept = np.sum(np.abs(A) ** 2, axis=0)
    tails = np.sqrt(np.clip(full - kept, 0.0, None))
    A.setflags(write=False)
    meta = {"N": N, "tail_provenance": "boundary quadrature", "timestamp": time.time()}
    idx = tuple(range(N + 1))
    return TruncatedOperator(A, idx, idx, tails, "disc-monomial", omega_map, meta)


# ---------------------------------------------------------------------------
# coefficient operators


def project_omega(f: DirichletPolynomial, k: int) -> DirichletPolynomial:
    """Keep the terms whose frequency has exactly ``k`` prime factors (with multiplicity)."""
    return DirichletPolynomial((n, b) for n, b in f if omega(n) == k)


def partial_sum(f: DirichletPolynomial, N: int) -> DirichletPolynomial:
    """Keep the terms with frequency ``<= N``."""
    if N < 1:
        raise DomainError("N must be >= 1")
    return DirichletPolynomial((n, b) for n, b in f if n <= N)


def saksman_lambda(x, N: int):
    """Even trapezoid equal to 1 on ``|x| <= 1 - 1/N`` and 0 beyond ``1 + 1/N``."""
    x = np.abs(np.asarray(x, dtype=float))
    return np.clip((1 + 1 / N - x) * N / 2, 0.0, 1.0)


def _panel_sum(func, k0: int, k1: int, nodes: int) -> float:
    """Composite Gauss-Legendre of ``func`` over the panels ``[k pi, (k+1) pi]``, ``k0 <= k < k1``."""
    x, wts = np.polynomial.legendre.leggauss(nodes)
    total = 0.0
    for lo in range(k0, k1, 200_000):
        k = np.arange(lo, min(k1, lo + 200_000))[:, None]
        total += float((func((k + 0.5 + 0.5 * x[None, :]) * np.pi) @ wts).sum()) * np.pi / 2
    return total


@lru_cache(maxsize=64)
def saksman_kernel_l1(N: int, periods_per_N: int = 32, nodes: int = 16) -> float:
    """``||psi||_1`` for the kernel whose transform is ``Lambda(x / log N)``.

    Equals ``(2N/pi) int_0^inf |sin u sin(u/N)| / u^2 du``.  The integrand is
    smooth between consecutive multiples of ``pi``, so composite Gauss-Legendre
    on those panels is used over the first ``K = periods_per_N * N`` panels.
    Past ``K pi`` the factor ``1/u^2`` is frozen at each panel midpoint; the
    remaining numerator is periodic in the panel index with period ``N``, so
    the tail is a sum over residues weighted by trigamma values.
    """
    if N < 2:
        raise DomainError("N must be >= 2")
    K = periods_per_N * N
    total = _panel_sum(lambda u: np.abs(np.sin(u) * np.sin(u / N)) / u**2, 0, K, nodes)
    # P_r = int over panel r of |sin u sin(u/N)|, r = 0..N-1
    x, wts = np.polynomial.legendre.leggauss(nodes)
    r = np.arange(N)[:, None]
    u = (r + 0.5 + 0.5 * x[None, :]) * np.pi
    P = (np.abs(np.sin(u) * np.sin(u / N)) @ wts) * np.pi / 2
    w = polygamma(1, (K + np.arange(N) + 0.5) / N) / (N * np.pi) ** 2
    tail = float(P @ w)
    return float(2 * N / np.pi * (total + tail))


@dataclass(frozen=True)
class SaksmanResult:
    poly: DirichletPolynomial
    kernel_l1: float


def saksman_multiplier(f: DirichletPolynomial, N: int) -> SaksmanResult:
    """Apply ``b_n -> b_n Lambda(log n / log N)`` and report ``||psi||_1``."""
    if N < 2:
        raise DomainError("N must be >= 2")
    L = math.log(N)
    out = {}
    for n, b in f:
        lam = float(saksman_lambda(math.log(n) / L, N))
        if lam:
            out[n] = b * lam
    return SaksmanResult(DirichletPolynomial(out), saksman_kernel_l1(int(N)))


@dataclass(frozen=True)
class ContractionResult:
    result: DirichletPolynomial
    bound: float
    lambda_N: float
    norm_f: float
    basis_constant: float


def contraction_multiplier(f: DirichletPolynomial, lam: Callable[[int], float] | Sequence[float], N: int,
                           p: float, C: float = 1.0, method: str | None = None, samples: int = 200_000,
                           seed: int = 0) -> ContractionResult:
    """Apply ``b_n -> lam_n b_n`` for ``n >= N`` (zero below) and report ``2 C lam_N ||f||_p``.

    ``lam`` is a callable or a sequence indexed from ``n = 1``.
    """
    get = lam if callable(lam) else (lambda n: lam[n - 1])
    top = max(N, f.max_freq)
    if not callable(lam):
        top = min(top, len(lam))
    vals = np.array([float(get(n)) for n in range(N, top + 1)])
    if np.any(vals < 0) or np.any(np.diff(vals) > 0):
        raise DomainError("lambda must be nonnegative and nonincreasing from index N")
    res = DirichletPolynomial((n, b * get(n)) for n, b in f if n >= N)
    if method is None:
        method = "coeff-l2" if p == 2 else ("even-convolution" if p % 2 == 0 else "monte-carlo")
    nf = norm(f, p, method, samples=samples, seed=seed).value
    lN = float(get(N))
    return ContractionResult(res, 2 * C * lN * nf, lN, nf, C)


# ---------------------------------------------------------------------------
# Bohr lift check


@dataclass(frozen=True)
class PullbackReport:
    lhs: float
    lhs_se: float
    rhs: float
    rhs_se: float
    sigma: float
    truncation_l1: float
    p: float
    samples: int
    seed: int


def verify_bohr_pullback(sym: Symbol, f: DirichletPolynomial, p: float, samples: int = 200_000, seed: int = 0,
                         M: int | None = None) -> PullbackReport:
    """Compare ``||C_phi f||_p^p`` with ``E |f(Phi*(chi))|^p`` over Haar characters.

    The left side composes ``f`` through the truncated operator (frequencies
    ``<= M``); the right side samples the Bohr lift of ``psi`` directly.
    """
    if sym.c0 != 0:
        raise DomainError("the pullback identity is checked for c0 = 0 symbols")
    rep = check_class_g(sym)
    if rep.verdict != "heuristic-pass":
        raise DomainError("symbol fails the sampled image check")
    if M is None:
        F = max(n for n, _ in sym.psi)
        M = max(F, 2) ** 24
    g, disc = compose_polynomial(sym, f, M)
    if p == 2:
        lhs, lse = float(np.sum(np.abs(g.coeffs) ** 2)), 0.0
    elif float(p).is_integer() and p % 2 == 0 and len(g) <= 400:
        lhs, lse = norm(g, p, "even-convolution").value ** p, 0.0
    else:
        lhs, lse = mc_power_mean(g, p, samples, seed)
    # right side: Phi*(chi) = c1 + sum_{n >= 2} c_n chi(n)
    from .dirichlet import prime_exponent_table

    primes, _ = prime_exponent_table([n for n, _ in sym.psi])
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(2)[1])
    ang = rng.random((samples, max(1, len(primes)))) * 2 * np.pi
    phi = evaluate_on_characters(sym.psi, ang, primes if primes else (2,))
    vals = np.abs(evaluate(f, phi)) ** p
    rhs, rse = float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(samples))
    sig = abs(lhs - rhs) / max(math.hypot(lse, rse), 1e-300)
    return PullbackReport(lhs, lse, rhs, rse, sig, disc, p, samples, seed)


def ct_norm_estimate(T: TMap, trials: int = 200, terms: int = 6, max_freq: int = 64, seed: int = 0,
                     quad_points: int = 1 << 14) -> dict:
    """Sampled Rayleigh estimate of ``||C_T||`` from Dirichlet ``H^2`` to ``H^2`` of the disc.

    Draws random Dirichlet polynomials and returns the largest observed ratio
    ``||f o T|| / ||f||``.  This is a lower estimate of the true norm.
    """
    rng = np.random.default_rng(seed)
    t = (np.arange(quad_points) + 0.5) * (2 * np.pi / quad_points)
    pts = T(np.exp(1j * t))
    best = 0.0
    for _ in range(trials):
        fr = rng.choice(np.arange(1, max_freq + 1), size=terms, replace=False)
        co = rng.standard_normal(terms) + 1j * rng.standard_normal(terms)
        f = DirichletPolynomial(zip(fr, co))
        num = math.sqrt(float(np.mean(np.abs(evaluate(f, pts)) ** 2)))
        best = max(best, num / math.sqrt(float(np.sum(np.abs(f.coeffs) ** 2))))
    return {"value": best, "provenance": "estimate", "method": "random-polynomial Rayleigh quotient",
            "trials": trials, "seed": seed}
