"""Dirichlet polynomials, their arithmetic, and Hardy-space norms.

A Dirichlet polynomial ``sum b_n n^{-s}`` is stored sparsely as sorted integer
frequencies with complex coefficients.  Norms are available three ways:

* ``coeff-l2``: the exact Hilbert-space norm (``p = 2`` only),
* ``even-convolution``: the exact ``p = 2k`` norm via ``||f^k||_2^{1/k}``,
* ``monte-carlo``: averages of ``|f(chi)|^p`` over Haar-random characters.

Characters only need values at the primes that divide frequencies in use,
because Haar measure on the infinite torus marginalises onto finitely many
coordinates.
"""

from __future__ import annotations

import json
import os
from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from . import _ext
from .errors import CoverageError, DomainError, MethodError

__all__ = [
    "DirichletPolynomial",
    "BohrIndex",
    "CharacterSample",
    "NormEstimate",
    "Product",
    "multiply",
    "evaluate",
    "shift_twist",
    "norm",
    "mc_power_mean",
    "primes_up_to",
    "first_primes",
    "factorize",
    "omega",
    "default_workers",
    "evaluate_on_characters",
    "prime_exponent_table",
]

_INT64_SAFE = 2**62


# ---------------------------------------------------------------------------
# primes and factorisation


@lru_cache(maxsize=8)
def primes_up_to(n: int) -> tuple[int, ...]:
    """All primes ``<= n`` by an Eratosthenes sieve."""
    if n < 2:
        return ()
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, int(n**0.5) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return tuple(int(x) for x in np.flatnonzero(sieve))


def first_primes(k: int) -> tuple[int, ...]:
    """The first ``k`` primes."""
    if k <= 0:
        return ()
    bound = 16
    while True:
        ps = primes_up_to(bound)
        if len(ps) >= k:
            return ps[:k]
        bound *= 2


@lru_cache(maxsize=200_000)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorisation of ``n >= 1`` as ``((p, e), ...)`` with ``p`` increasing."""
    n = int(n)
    if n < 1:
        raise DomainError("frequencies must be >= 1")
    out = []
    m = n
    for q in (2, 3):
        e = 0
        while m % q == 0:
            m //= q
            e += 1
        if e:
            out.append((q, e))
    q = 5
    step = 2
    while q * q <= m:
        e = 0
        while m % q == 0:
            m //= q
            e += 1
        if e:
            out.append((q, e))
        q += step
        step = 6 - step
    if m > 1:
        out.append((m, 1))
    return tuple(out)


def omega(n: int) -> int:
    """Number of prime factors of ``n`` counted with multiplicity."""
    return sum(e for _, e in factorize(n))


@dataclass(frozen=True)
class BohrIndex:
    """Exponent vector ``alpha`` with ``n = prod p_j^{alpha_j}`` over ``2, 3, 5, ...``."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        ex = tuple(int(a) for a in self.exponents)
        if any(a < 0 for a in ex):
            raise DomainError("exponents must be nonnegative")
        while ex and ex[-1] == 0:
            ex = ex[:-1]
        object.__setattr__(self, "exponents", ex)

    @classmethod
    def from_int(cls, n: int) -> "BohrIndex":
        fac = factorize(n)
        if not fac:
            return cls(())
        ps = primes_up_to(fac[-1][0])
        pos = {p: i for i, p in enumerate(ps)}
        ex = [0] * len(ps)
        for p, e in fac:
            ex[pos[p]] = e
        return cls(tuple(ex))

    def to_int(self) -> int:
        n = 1
        for p, a in zip(first_primes(len(self.exponents)), self.exponents):
            n *= p**a
        return n

    @property
    def omega(self) -> int:
        return sum(self.exponents)

    def __mul__(self, other: "BohrIndex") -> "BohrIndex":
        k = max(len(self.exponents), len(other.exponents))
        a = self.exponents + (0,) * (k - len(self.exponents))
        b = other.exponents + (0,) * (k - len(other.exponents))
        return BohrIndex(tuple(x + y for x, y in zip(a, b)))


# ---------------------------------------------------------------------------
# polynomials


class DirichletPolynomial:
    """Finite Dirichlet polynomial ``sum_n b_n n^{-s}``; immutable.

    Parameters
    ----------
    terms : mapping or iterable of (n, b_n)
        Frequencies must be integers ``>= 1``.  Repeated frequencies are summed
        and exact zeros are dropped.
    """

    __slots__ = ("_freqs", "_coeffs", "_hash")

    def __init__(self, terms: Mapping[int, complex] | Iterable[tuple[int, complex]] | None = None):
        acc: dict[int, complex] = {}
        items = terms.items() if isinstance(terms, Mapping) else (terms or ())
        for n, b in items:
            n_int = int(n)
            if n_int != n or n_int < 1:
                raise DomainError(f"frequency {n!r} is not an integer >= 1")
            b = complex(b)
            if not (np.isfinite(b.real) and np.isfinite(b.imag)):
                raise DomainError(f"coefficient at n={n_int} is not finite")
            acc[n_int] = acc.get(n_int, 0j) + b
        keys = sorted(k for k, v in acc.items() if v != 0)
        self._freqs = tuple(keys)
        c = np.array([acc[k] for k in keys], dtype=np.complex128)
        c.setflags(write=False)
        self._coeffs = c
        self._hash = None

    @classmethod
    def _from_sorted(cls, freqs, coeffs) -> "DirichletPolynomial":
        obj = cls.__new__(cls)
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        nz = coeffs != 0
        obj._freqs = tuple(int(x) for x in np.asarray(freqs, dtype=object)[nz])
        c = np.array(coeffs[nz])
        c.setflags(write=False)
        obj._coeffs = c
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, c: complex) -> "DirichletPolynomial":
        return cls({1: c})

    @classmethod
    def monomial(cls, n: int, c: complex = 1.0) -> "DirichletPolynomial":
        return cls({n: c})

    # -- accessors --------------------------------------------------------
    @property
    def freqs(self) -> np.ndarray:
        """Frequencies as an integer array (object dtype beyond int64 range)."""
        if self._freqs and self._freqs[-1] >= _INT64_SAFE:
            return np.array(self._freqs, dtype=object)
        return np.array(self._freqs, dtype=np.int64)

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def max_freq(self) -> int:
        return self._freqs[-1] if self._freqs else 1

    def __len__(self) -> int:
        return len(self._freqs)

    def __iter__(self):
        return iter(zip(self._freqs, (complex(c) for c in self._coeffs)))

    def coeff(self, n: int) -> complex:
        i = bisect_left(self._freqs, n)
        if i < len(self._freqs) and self._freqs[i] == n:
            return complex(self._coeffs[i])
        return 0j

    def as_dict(self) -> dict[int, complex]:
        return dict(iter(self))

    @property
    def is_zero(self) -> bool:
        return not self._freqs

    # -- algebra ----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, DirichletPolynomial):
            other = DirichletPolynomial.constant(other)
        d = self.as_dict()
        for n, b in other:
            d[n] = d.get(n, 0j) + b
        return DirichletPolynomial(d)

    __radd__ = __add__

    def __neg__(self):
        return DirichletPolynomial._from_sorted(self._freqs, -self._coeffs)

    def __sub__(self, other):
        return self + (-other if isinstance(other, DirichletPolynomial) else -complex(other))

    def __mul__(self, other):
        if isinstance(other, DirichletPolynomial):
            return multiply(self, other, self.max_freq * other.max_freq).poly
        return DirichletPolynomial._from_sorted(self._freqs, self._coeffs * complex(other))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, DirichletPolynomial):
            return NotImplemented
        return self._freqs == other._freqs and np.array_equal(self._coeffs, other._coeffs)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._freqs, self._coeffs.tobytes()))
        return self._hash

    def allclose(self, other: "DirichletPolynomial", atol: float = 1e-12) -> bool:
        keys = set(self._freqs) | set(other._freqs)
        return all(abs(self.coeff(k) - other.coeff(k)) <= atol for k in keys)

    def __call__(self, s, order: int = 0):
        return evaluate(self, s, order)

    def __repr__(self):
        body = " + ".join(f"({complex(c):.6g})*{n}^-s" for n, c in iter(self))
        return f"DirichletPolynomial({body or '0'})"

    # -- serialisation ----------------------------------------------------
    def to_json_obj(self) -> dict:
        return {"terms": [{"n": n, "re": b.real, "im": b.imag} for n, b in iter(self)]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj) -> "DirichletPolynomial":
        try:
            return cls((int(t["n"]), complex(float(t["re"]), float(t.get("im", 0.0)))) for t in obj["terms"])
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed polynomial JSON: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "DirichletPolynomial":
        return cls.from_json_obj(json.loads(text))


class Product(NamedTuple):
    poly: DirichletPolynomial
    discarded: float


def multiply(f: DirichletPolynomial, g: DirichletPolynomial, cap: int) -> Product:
    """Dirichlet convolution of ``f`` and ``g`` keeping frequencies ``<= cap``.

    Returns the product together with the l1 mass of dropped coefficients.
    """
    cap = int(cap)
    if cap < 1:
        raise DomainError("cap must be >= 1")
    if f.is_zero or g.is_zero:
        return Product(DirichletPolynomial(), 0.0)
    if f.max_freq * g.max_freq < _INT64_SAFE and cap < _INT64_SAFE:
        fr, co, disc = _ext.convolve(f.freqs, f.coeffs, g.freqs, g.coeffs, cap)
        return Product(DirichletPolynomial._from_sorted(fr, co), float(disc))
    acc: dict[int, complex] = {}
    disc = 0.0
    for n, b in f:
        for m, c in g:
            k = n * m
            if k > cap:
                disc += abs(b * c)
            else:
                acc[k] = acc.get(k, 0j) + b * c
    return Product(DirichletPolynomial(acc), disc)


def evaluate(f: DirichletPolynomial, s, order: int = 0):
    """Evaluate ``f^{(order)}(s) = sum b_n (-log n)^order n^{-s}``.

    ``s`` may be a scalar or an array; ``order`` is limited to 0..4.
    """
    if not 0 <= order <= 4:
        raise DomainError("order must be between 0 and 4")
    s_arr = np.asarray(s, dtype=complex)
    if f.is_zero:
        out = np.zeros(s_arr.shape, dtype=complex)
    else:
        logs = np.log(np.array(f._freqs, dtype=float))
        w = f.coeffs * (-logs) ** order
        out = np.exp(-np.multiply.outer(s_arr, logs)) @ w
    return complex(out) if s_arr.ndim == 0 else out


@dataclass(frozen=True)
class CharacterSample:
    """Unimodular values assigned to the first ``m`` primes.

    ``values[j]`` is the value at the ``j``-th prime (``2, 3, 5, ...``).
    """

    values: tuple[complex, ...]
    seed: int | None = None
    _primes: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vals = tuple(complex(v) for v in self.values)
        if any(abs(abs(v) - 1.0) > 1e-12 for v in vals):
            raise DomainError("character values must be unimodular")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "_primes", first_primes(len(vals)))

    @classmethod
    def random(cls, m: int, seed: int | None = None) -> "CharacterSample":
        rng = np.random.default_rng(seed)
        ang = rng.random(m) * 2 * np.pi
        return cls(tuple(np.exp(1j * ang)), seed)

    @property
    def m(self) -> int:
        return len(self.values)

    def __call__(self, n: int) -> complex:
        out = 1 + 0j
        pos = {p: i for i, p in enumerate(self._primes)}
        for p, e in factorize(n):
            if p not in pos:
                raise CoverageError(f"character sample does not cover prime {p}")
            out *= self.values[pos[p]] ** e
        return out

    def to_json_obj(self) -> dict:
        return {"seed": self.seed, "values": [[v.real, v.imag] for v in self.values]}

    @classmethod
    def from_json_obj(cls, obj) -> "CharacterSample":
        return cls(tuple(complex(a, b) for a, b in obj["values"]), obj.get("seed"))


def shift_twist(f: DirichletPolynomial, theta: float = 0.0, chi: CharacterSample | None = None) -> DirichletPolynomial:
    """Map ``b_n -> b_n n^{-theta} chi(n)``; ``chi=None`` applies only the shift."""
    out = {}
    for n, b in f:
        v = b * n ** (-float(theta))
        if chi is not None:
            v *= chi(n)
        out[n] = v
    return DirichletPolynomial(out)


# ---------------------------------------------------------------------------
# norms


@dataclass(frozen=True)
class NormEstimate:
    value: float
    stderr: float
    method: str
    p: float
    samples: int | None = None
    seed: int | None = None
    workers: int | None = None

    def __float__(self):
        return self.value


def default_workers() -> int:
    """Worker count from ``COMPOP_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("COMPOP_THREADS", "1")))
    except ValueError:
        return 1


def prime_exponent_table(freqs: Iterable[int]) -> tuple[tuple[int, ...], np.ndarray]:
    """Primes dividing any frequency and the ``(terms, primes)`` exponent matrix."""
    freqs = [int(n) for n in freqs]
    facs = [factorize(n) for n in freqs]
    primes = sorted({p for fac in facs for p, _ in fac})
    pos = {p: j for j, p in enumerate(primes)}
    ex = np.zeros((len(freqs), max(1, len(primes))), dtype=np.float64)
    for i, fac in enumerate(facs):
        for p, e in fac:
            ex[i, pos[p]] = e
    return tuple(primes), ex


_MC_CHUNK = 65_536


def _mc_worker(ex, coeffs, p, n, seq):
    rng = np.random.default_rng(seq)
    s1 = s2 = 0.0
    done = 0
    P = ex.shape[1]
    while done < n:
        k = min(_MC_CHUNK, n - done)
        ang = rng.random((k, P)) * (2 * np.pi)
        a, b = _ext.mc_moments(ex, coeffs, ang, float(p))
        s1 += a
        s2 += b
        done += k
    return s1, s2


def mc_power_mean(f: DirichletPolynomial, p: float, samples: int, seed: int | None = 0,
                  workers: int | None = None) -> tuple[float, float]:
    """Monte Carlo mean of ``|f(chi)|^p`` over Haar characters and its standard error.

    Samples are split evenly across ``workers`` independent substreams spawned
    from ``seed``; results are bit-reproducible for fixed ``(seed, workers)``.
    """
    if samples < 1:
        raise MethodError("monte-carlo requires samples >= 1")
    if f.is_zero:
        return 0.0, 0.0
    workers = workers or default_workers()
    _, ex = prime_exponent_table(f._freqs)
    seqs = np.random.SeedSequence(seed).spawn(workers)
    sizes = [samples // workers + (1 if i < samples % workers else 0) for i in range(workers)]
    if workers == 1:
        parts = [_mc_worker(ex, f.coeffs, p, sizes[0], seqs[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _mc_worker(ex, f.coeffs, p, *a), zip(sizes, seqs)))
    s1 = sum(a for a, _ in parts)
    s2 = sum(b for _, b in parts)
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0)
    return mean, float(np.sqrt(var / samples))


def _even_convolution_norm(f: DirichletPolynomial, k: int) -> float:
    g = f
    for _ in range(k - 1):
        g = multiply(g, f, g.max_freq * f.max_freq).poly
    return float(np.sum(np.abs(g.coeffs) ** 2) ** (1.0 / (2 * k)))


def norm(f: DirichletPolynomial, p: float, method: str = "coeff-l2", samples: int | None = None,
         seed: int | None = 0, workers: int | None = None) -> NormEstimate:
    """Hardy-space norm of a Dirichlet polynomial.

    Parameters
    ----------
    p : float
        Exponent ``>= 1``.
    method : {"coeff-l2", "even-convolution", "monte-carlo"}
        ``coeff-l2`` needs ``p == 2``; ``even-convolution`` needs ``p`` an even
        integer; ``monte-carlo`` needs ``samples``.
    """
    if p < 1:
        raise MethodError("p must be >= 1")
    if method == "coeff-l2":
        if p != 2:
            raise MethodError("coeff-l2 requires p = 2")
        return NormEstimate(float(np.sqrt(np.sum(np.abs(f.coeffs) ** 2))), 0.0, method, p)
    if method == "even-convolution":
        k = p / 2
        if k != int(k) or k < 1:
            raise MethodError("even-convolution requires p = 2k with integer k >= 1")
        return NormEstimate(_even_convolution_norm(f, int(k)), 0.0, method, p)
    if method == "monte-carlo":
        if samples is None or samples < 1:
            raise MethodError("monte-carlo requires samples >= 1")
        workers = workers or default_workers()
        mean, se = mc_power_mean(f, p, samples, seed, workers)
        val = mean ** (1.0 / p)
        se_norm = se * val / (p * mean) if mean > 0 else 0.0
        return NormEstimate(val, se_norm, method, p, samples, seed, workers)
    raise MethodError(f"unknown norm method {method!r}")


def evaluate_on_characters(f: DirichletPolynomial, angles: np.ndarray, primes: tuple[int, ...]) -> np.ndarray:
    """Values ``sum b_n chi(n)`` for characters given by prime angles.

    ``angles[s, j]`` is the argument of the character at ``primes[j]``.
    """
    if f.is_zero:
        return np.zeros(angles.shape[0], dtype=complex)
    pos = {p: j for j, p in enumerate(primes)}
    ex = np.zeros((len(f), len(primes)), dtype=np.float64)
    for i, n in enumerate(f._freqs):
        for p, e in factorize(n):
            if p not in pos:
                raise CoverageError(f"character angles do not cover prime {p}")
            ex[i, pos[p]] = e
    return _ext.char_eval(ex, f.coeffs, np.ascontiguousarray(angles, dtype=np.float64))
