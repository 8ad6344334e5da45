"""Littlewood-Paley type functional for Hardy spaces of Dirichlet series.

The functional is

    |b_1|^p + E_chi int_0^inf sigma int |f_chi(sigma+it)|^(p-2) |f_chi'(sigma+it)|^2 dmu(t) dsigma

with ``chi`` a Haar-random character and ``mu`` a probability measure.  The
character average is done by Monte Carlo with common random numbers across
the ``sigma`` grid, the ``sigma`` integral on a geometric grid, and the ``t``
integral by Gauss-Legendre nodes of ``mu``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .dirichlet import DirichletPolynomial, NormEstimate, norm, prime_exponent_table
from .errors import DomainError, MethodError

__all__ = [
    "LPQuadratureSpec",
    "LPResult",
    "lp_functional",
    "comparability_ratio",
    "norm_via_measure",
    "measure_nodes",
    "TailWarning",
]

_MEASURES = ("uniform", "two-point", "dirac")
_CHUNK = 8192


class TailWarning(UserWarning):
    """The sigma grid stops before the integrand has decayed."""


@dataclass(frozen=True)
class LPQuadratureSpec:
    """Quadrature and sampling choices for :func:`lp_functional`.

    ``measure``: ``uniform`` on [0, 1], ``two-point`` (delta_0 + delta_1)/2 or
    ``dirac`` at 0.  ``sigma_max = None`` picks the cut from the decay rate of
    the integrand.  ``floor`` regularizes ``|f|^(p-2)`` for ``p < 2``.
    """

    p: float = 2.0
    measure: str = "uniform"
    t_nodes: int = 2
    sigma_min: float = 1e-4
    sigma_max: float | None = None
    sigma_count: int = 96
    samples: int = 20_000
    seed: int = 0
    floor: float = 1e-8

    def __post_init__(self):
        if self.p < 1:
            raise DomainError("p must be >= 1")
        if self.measure not in _MEASURES:
            raise DomainError(f"unknown measure {self.measure!r}")
        if not 0 < self.sigma_min:
            raise DomainError("sigma grid must be positive")
        if self.sigma_max is not None and self.sigma_max <= self.sigma_min:
            raise DomainError("sigma grid must be increasing")
        if self.sigma_count < 8 or self.samples < 2 or self.t_nodes < 1:
            raise DomainError("need sigma_count >= 8, samples >= 2 and t_nodes >= 1")

    def refined(self, factor: int = 2) -> "LPQuadratureSpec":
        """Same spec with ``factor`` times the sigma points and samples."""
        d = asdict(self)
        d["sigma_count"] = self.sigma_count * factor
        d["samples"] = self.samples * factor
        return LPQuadratureSpec(**d)

    def to_json_obj(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json_obj(cls, obj) -> "LPQuadratureSpec":
        return cls(**obj)

    @classmethod
    def from_json(cls, text: str) -> "LPQuadratureSpec":
        return cls.from_json_obj(json.loads(text))


def measure_nodes(measure: str, count: int = 2) -> tuple[np.ndarray, np.ndarray, float]:
    """Nodes, weights and total mass of the named measure."""
    if measure == "uniform":
        x, w = np.polynomial.legendre.leggauss(count)
        return (x + 1) / 2, w / 2, 1.0
    if measure == "two-point":
        return np.array([0.0, 1.0]), np.array([0.5, 0.5]), 1.0
    if measure == "dirac":
        return np.array([0.0]), np.array([1.0]), 1.0
    raise DomainError(f"unknown measure {measure!r}")


def _char_values(f: DirichletPolynomial, samples: int, seed: int, t: np.ndarray) -> np.ndarray:
    """``chi(n) n^{-it}`` for Haar samples ``chi``: shape (len(t), samples, terms)."""
    primes, ex = prime_exponent_table(f._freqs)
    rng = np.random.default_rng(seed)
    ang = rng.random((samples, ex.shape[1])) * (2 * np.pi)
    phase = ang @ ex.T
    logn = np.log(np.asarray(f._freqs, dtype=float))
    return np.exp(1j * (phase[None, :, :] - t[:, None, None] * logn[None, None, :]))


def _decay_rate(f: DirichletPolynomial, p: float) -> float:
    fr = [n for n in f._freqs if n > 1]
    if not fr:
        return math.inf
    lmin = math.log(min(fr))
    return (2.0 if f.coeff(1) != 0 else p) * lmin


def _auto_sigma_max(f: DirichletPolynomial, p: float, rel: float = 1e-10) -> float:
    k = _decay_rate(f, p)
    if math.isinf(k):
        return 1.0
    # int_X^inf sigma e^{-k sigma} = e^{-k X} (X/k + 1/k^2); make it rel / k^2 of the scale
    X = 1.0
    while math.exp(-k * X) * (X * k + 1) > rel:
        X *= 1.25
    return X


@dataclass(frozen=True)
class LPResult:
    """Value of the functional and its error budget.

    ``mc_se`` is the character-sampling standard error, ``grid_error`` the
    change against the half-resolution sigma grid, ``tail_bound`` an estimate
    of the mass beyond ``sigma_max`` and ``floor_sensitivity`` the change when
    the ``p < 2`` floor is raised a hundredfold.
    """

    value: float
    mc_se: float
    grid_error: float
    tail_bound: float
    floor_sensitivity: float
    sigma_max: float
    spec: LPQuadratureSpec

    @property
    def error(self) -> float:
        return math.sqrt(self.mc_se**2 + self.grid_error**2) + self.tail_bound + self.floor_sensitivity

    def to_json_obj(self) -> dict:
        return {"value": self.value, "mc_se": self.mc_se, "grid_error": self.grid_error,
                "tail_bound": self.tail_bound, "floor_sensitivity": self.floor_sensitivity,
                "sigma_max": self.sigma_max, "spec": self.spec.to_json_obj(), "provenance": "mc"}


def _integrate_logsigma(sig: np.ndarray, vals: np.ndarray) -> np.ndarray:
    """``int sigma h(sigma) dsigma`` over the grid, per sample (axis 1 of ``vals``), via log-spaced trapezoid."""
    u = np.log(sig)
    y = vals * (sig**2)[:, None]
    return np.trapezoid(y, u, axis=0)


def lp_functional(f: DirichletPolynomial, spec: LPQuadratureSpec | None = None) -> LPResult:
    """Evaluate the Littlewood-Paley functional of ``f``."""
    spec = spec or LPQuadratureSpec()
    p = spec.p
    b1 = f.coeff(1)
    head = abs(b1) ** p
    tail_part = DirichletPolynomial((n, b) for n, b in f if n > 1)
    if tail_part.is_zero:
        return LPResult(head, 0.0, 0.0, 0.0, 0.0, 0.0, spec)
    smax = spec.sigma_max or _auto_sigma_max(f, p)
    sig = np.geomspace(spec.sigma_min, smax, spec.sigma_count)
    tn, tw, _ = measure_nodes(spec.measure, spec.t_nodes)
    X = _char_values(f, spec.samples, spec.seed, tn)  # (T, S, m)
    fr = np.asarray(f._freqs, dtype=float)
    logn = np.log(fr)
    decay = np.exp(-np.outer(logn, sig))  # (m, K)
    Cf = f.coeffs[:, None] * decay
    Cd = -(f.coeffs * logn)[:, None] * decay

    def run(floor):
        acc = np.zeros(spec.samples)
        acc_half = np.zeros(spec.samples)
        for ti, wt in enumerate(tw):
            for lo in range(0, spec.samples, _CHUNK):
                sl = slice(lo, lo + _CHUNK)
                F = X[ti, sl] @ Cf  # (chunk, K)
                D = X[ti, sl] @ Cd
                h = np.abs(D) ** 2
                if p != 2:
                    a = np.abs(F)
                    if p < 2:
                        a = np.maximum(a, floor)
                    h *= a ** (p - 2)
                # [0, sigma_min]: h is nearly constant there, so sigma h integrates to sigma_min^2 h / 2
                near0 = 0.5 * sig[0] ** 2 * h[:, 0]
                acc[sl] += wt * (_integrate_logsigma(sig, h.T) + near0)
                acc_half[sl] += wt * (_integrate_logsigma(sig[::2], h.T[::2]) + near0)
        return acc, acc_half

    J, Jh = run(spec.floor)
    base = float(J.mean())
    se = float(J.std(ddof=1) / math.sqrt(spec.samples))
    grid = abs(base - float(Jh.mean()))
    sens = 0.0
    if p < 2:
        J2, _ = run(spec.floor * 100)
        sens = abs(float(J2.mean()) - base)
    k = _decay_rate(f, p)
    scale = float(np.sum(np.abs(f.coeffs) * np.maximum(logn, 1))) ** 2 * max(abs(b1), 1.0) ** max(p - 2, 0)
    tail = scale * math.exp(-k * smax) * (smax / k + 1 / k**2) if math.isfinite(k) else 0.0
    if spec.sigma_max is not None and tail > 1e-6 * max(base, 1e-300):
        warnings.warn(f"sigma_max={smax} leaves an estimated tail of {tail:.2e}", TailWarning, stacklevel=2)
    return LPResult(head + base, se, grid, tail, sens, smax, spec)


def comparability_ratio(corpus: Sequence[DirichletPolynomial], p: float, spec: LPQuadratureSpec | None = None,
                        norm_samples: int = 200_000) -> dict:
    """Extremes of ``lp_functional(f) / ||f||_p^p`` over a corpus.

    Norms are exact for even ``p`` and Monte Carlo otherwise.
    """
    spec = spec or LPQuadratureSpec(p=p)
    if spec.p != p:
        raise DomainError("spec.p and p disagree")
    ratios = []
    for i, f in enumerate(corpus):
        if f.is_zero:
            continue
        if p == 2:
            nv = norm(f, 2, "coeff-l2").value
        elif float(p).is_integer() and int(p) % 2 == 0:
            nv = norm(f, p, "even-convolution").value
        else:
            nv = norm(f, p, "monte-carlo", samples=norm_samples, seed=spec.seed + i).value
        ratios.append(lp_functional(f, spec).value / nv**p)
    r = np.array(ratios)
    return {"min": float(r.min()), "max": float(r.max()), "ratios": r, "p": p,
            "norm_method": "exact" if (float(p).is_integer() and int(p) % 2 == 0) else "mc"}


def norm_via_measure(f: DirichletPolynomial, p: float, measure: str = "uniform", samples: int = 100_000,
                     seed: int = 0, t_nodes: int = 4) -> NormEstimate:
    """``(E_chi int |f_chi(it)|^p dmu(t) / mu(R))^(1/p)`` by Monte Carlo over characters."""
    if p < 1:
        raise MethodError("p must be >= 1")
    if f.is_zero:
        return NormEstimate(0.0, 0.0, "measure-" + measure, p, samples, seed)
    tn, tw, mass = measure_nodes(measure, t_nodes)
    X = _char_values(f, samples, seed, tn)
    vals = np.zeros(samples)
    for ti, wt in enumerate(tw):
        vals += wt * np.abs(X[ti] @ f.coeffs) ** p
    vals /= mass
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(samples))
    v = mean ** (1 / p)
    return NormEstimate(v, se * v / (p * mean) if mean > 0 else 0.0, "measure-" + measure, p, samples, seed)
