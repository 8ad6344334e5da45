"""Reproducing-kernel Gram systems over finite point sets.

Three kernels are supported:

* ``zeta``: the Dirichlet Hardy space kernel ``zeta(s + conj w)`` on ``Re s > 1/2``;
* ``halfplane``: the classical half-plane kernel ``1 / (s + conj w - 1)``;
* ``disc``: the Szego kernel ``1 / (1 - z conj w)``.

For a finite set the Carleson constant of the normalized point measure is the
largest eigenvalue of the normalized Gram matrix, and the interpolation
constant is the inverse square root of the smallest one.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .dirichlet import DirichletPolynomial, mc_power_mean
from .discmaps import DiscMap, TMap
from .errors import DomainError, NumericalFailure
from .zeta import zeta, zeta_complex

__all__ = [
    "ConditioningWarning",
    "PointSequence",
    "GramSystem",
    "gram",
    "carleson_const_h2",
    "interp_const_h2",
    "lemma_bounds",
    "KernelExpansion",
    "SquaringResult",
    "h1_interp_by_squaring",
    "blaschke_separation",
    "hinfty_interp_surrogate",
    "lower_bound_general",
    "random_strip",
]

_KINDS = ("zeta", "halfplane", "disc")


class ConditioningWarning(UserWarning):
    """Points are so close that the Gram matrix is nearly singular."""


@dataclass(frozen=True)
class PointSequence:
    """Finite set of distinct points tagged with the ambient kernel.

    ``height`` optionally records the cap ``R`` used by :meth:`restrict`.
    """

    points: np.ndarray
    kind: str = "zeta"
    height: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"unknown point-sequence kind {self.kind!r}")
        z = np.atleast_1d(np.asarray(self.points, dtype=complex)).copy()
        if z.size == 0:
            raise DomainError("empty point sequence")
        if not np.all(np.isfinite(z)):
            raise DomainError("points must be finite")
        if self.kind == "disc":
            if np.any(np.abs(z) >= 1):
                raise DomainError("disc points must satisfy |z| < 1")
        elif np.any(z.real <= 0.5):
            raise DomainError("half-plane points must satisfy Re s > 1/2")
        d = np.abs(z[:, None] - z[None, :])
        np.fill_diagonal(d, np.inf)
        if np.any(d == 0):
            raise DomainError("points must be distinct")
        z.setflags(write=False)
        object.__setattr__(self, "points", z)

    def __len__(self):
        return self.points.size

    def shift(self, theta: float) -> "PointSequence":
        """The sequence ``S + theta`` (half-plane kinds only)."""
        if self.kind == "disc":
            raise DomainError("shift applies to half-plane sequences")
        return PointSequence(self.points + theta, self.kind, self.height)

    def restrict(self, R: float) -> "PointSequence":
        """The subsequence ``S_R`` with ``|Im s| <= R``."""
        keep = np.abs(self.points.imag) <= R
        if not np.any(keep):
            raise DomainError(f"no points with |Im s| <= {R}")
        return PointSequence(self.points[keep], self.kind, R)

    def without(self, j: int) -> "PointSequence":
        return PointSequence(np.delete(self.points, j), self.kind, self.height)

    def to_json_obj(self) -> dict:
        return {"kind": self.kind, "points": [[float(z.real), float(z.imag)] for z in self.points],
                "height": self.height}

    @classmethod
    def from_json_obj(cls, obj) -> "PointSequence":
        if isinstance(obj, list):
            obj = {"points": obj}
        pts = [complex(a, b) for a, b in obj["points"]]
        return cls(np.array(pts), obj.get("kind", "zeta"), obj.get("height"))

    @classmethod
    def from_json(cls, text: str) -> "PointSequence":
        return cls.from_json_obj(json.loads(text))


def random_strip(n: int, rng: np.random.Generator, re_range=(0.6, 1.5), height: float = 10.0,
                 kind: str = "zeta") -> PointSequence:
    """``n`` uniform points in ``re_range x [-height, height]``."""
    re = rng.uniform(*re_range, size=n)
    im = rng.uniform(-height, height, size=n)
    return PointSequence(re + 1j * im, kind)


def _kernel_matrix(z: np.ndarray, w: np.ndarray, kind: str) -> np.ndarray:
    if kind == "zeta":
        return zeta_complex(z[:, None] + w.conj()[None, :])
    if kind == "halfplane":
        return 1.0 / (z[:, None] + w.conj()[None, :] - 1.0)
    return 1.0 / (1.0 - z[:, None] * w.conj()[None, :])


def _diag_norm2(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "zeta":
        return np.array([zeta(2 * x) for x in z.real])
    if kind == "halfplane":
        return 1.0 / (2 * z.real - 1.0)
    return 1.0 / (1.0 - np.abs(z) ** 2)


@dataclass(frozen=True)
class GramSystem:
    """Kernel Gram matrix, its normalized version and extreme eigenvalues."""

    G: np.ndarray
    G_normalized: np.ndarray
    lam_min: float
    lam_max: float
    kind: str
    norms: np.ndarray = field(default=None)


def gram(S: PointSequence) -> GramSystem:
    """Gram matrix ``G[j,k] = K(s_j, s_k)`` and ``G[j,k] / (||k_j|| ||k_k||)``."""
    z = S.points
    if len(z) > 1:
        d = np.abs(z[:, None] - z[None, :])
        np.fill_diagonal(d, np.inf)
        if d.min() < 1e-8:
            warnings.warn(f"points at distance {d.min():.1e}; Gram matrix is nearly singular",
                          ConditioningWarning, stacklevel=2)
    G = _kernel_matrix(z, z, S.kind)
    nrm2 = _diag_norm2(z, S.kind)
    np.fill_diagonal(G, nrm2)
    G = (G + G.conj().T) / 2
    nrm = np.sqrt(nrm2)
    Gn = G / np.outer(nrm, nrm)
    np.fill_diagonal(Gn, 1.0)
    ev = scipy.linalg.eigvalsh(Gn)
    return GramSystem(G, Gn, float(ev[0]), float(ev[-1]), S.kind, nrm)


def carleson_const_h2(S: PointSequence) -> float:
    """Carleson constant of the normalized point measure at p = 2, i.e. ``lambda_max`` of the normalized Gram."""
    return gram(S).lam_max


def interp_const_h2(S: PointSequence, rcond: float = 1e-13) -> float:
    """Interpolation constant at p = 2: ``lambda_min^{-1/2}`` of the normalized Gram."""
    g = gram(S)
    if g.lam_min <= rcond * g.lam_max:
        raise NumericalFailure("sequence not interpolating at this precision")
    return float(g.lam_min ** -0.5)


def lemma_bounds(kind: str, **params) -> float:
    """Right-hand sides of the Carleson transfer bound (``"4.1"``) and the shifted interpolation bound (``"4.2"``).

    ``"4.1"``: ``theta``, ``p`` and either ``carleson_h2`` (``p >= 2``) or
    ``mass`` (``p < 2``).  Returns ``zeta(2 theta)^((p-2)/p) * carleson_h2`` or
    ``zeta(2 theta) * mass``.

    ``"4.2"``: ``theta``, ``delta``, ``n``, ``p`` (``inf`` allowed) and
    ``m_shifted`` (the p = 2 interpolation constant of ``S + theta``).
    """
    theta = float(params["theta"])
    if theta <= 0.5:
        raise DomainError("theta must exceed 1/2")
    p = float(params["p"])
    if p < 1:
        raise DomainError("p must be >= 1")
    z2t = float(zeta(2 * theta))
    if kind == "4.1":
        if p >= 2:
            c = float(params["carleson_h2"])
            if c < 0:
                raise DomainError("Carleson constant must be nonnegative")
            return z2t ** ((p - 2) / p) * c
        mass = float(params["mass"])
        if mass < 0:
            raise DomainError("mass must be nonnegative")
        return z2t * mass
    if kind == "4.2":
        delta = float(params["delta"])
        n = int(params["n"])
        m = float(params["m_shifted"])
        if delta <= 0 or n < 1 or m < 1 - 1e-12:
            raise DomainError("need delta > 0, n >= 1 and an interpolation constant >= 1")
        q = min(2.0, p)
        ratio = float(zeta(1 + 2 * delta)) / float(zeta(1 + 2 * (delta + theta)))
        inv_p = 0.0 if math.isinf(p) else 1 / p
        return z2t ** (1 / q) * ratio ** (1 / q) * n ** (1 / q - inv_p) * m ** (2 / q)
    raise DomainError(f"unknown lemma kind {kind!r}")


# ---------------------------------------------------------------------------
# H^1 interpolation by squaring


@dataclass(frozen=True)
class KernelExpansion:
    """``g = sum_j c_j zeta(. + conj s_j)``, an element of the Dirichlet Hardy space."""

    nodes: np.ndarray
    coeffs: np.ndarray

    def __call__(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        out = zeta_complex(s[:, None] + self.nodes.conj()[None, :]) @ self.coeffs
        return out

    def norm2(self) -> float:
        """``||g||^2 = c^H G c`` with the exact Gram matrix."""
        G = _kernel_matrix(self.nodes, self.nodes, "zeta")
        np.fill_diagonal(G, _diag_norm2(self.nodes, "zeta"))
        return float(np.real(self.coeffs.conj() @ G @ self.coeffs))

    def truncate(self, cap: int) -> DirichletPolynomial:
        """Partial sum over frequencies ``n <= cap``: coefficients ``sum_j c_j n^{-conj s_j}``."""
        n = np.arange(1, cap + 1)
        b = np.exp(-np.log(n)[:, None] * self.nodes.conj()[None, :]) @ self.coeffs
        return DirichletPolynomial(zip(n.tolist(), b))


@dataclass(frozen=True)
class SquaringResult:
    """Output of :func:`h1_interp_by_squaring`.

    ``h1_norm_exact`` is ``||g||_2^2 = ||g^2||_1``.  ``h1_norm_mc`` is the
    Monte Carlo mean of ``|g_cap|^2`` for the frequency-truncated ``g_cap``;
    since truncation is an orthogonal projection it never exceeds the exact
    value, and ``truncation_mass`` records the gap.
    """

    g: KernelExpansion
    f_truncated: DirichletPolynomial
    h1_norm_exact: float
    h1_norm_mc: float
    h1_se: float
    truncation_mass: float
    bound: float
    m_h2: float
    residual: float
    cap: int
    samples: int
    seed: int

    def __call__(self, s):
        return self.g(s) ** 2


def h1_interp_by_squaring(S: PointSequence, targets: Sequence[complex], samples: int = 100_000, seed: int = 0,
                          cap: int = 64) -> SquaringResult:
    """Solve ``f(s_j) = a_j`` in the H^1 space as ``f = g^2`` with ``g`` the
    minimal-norm H^2 solution of ``g(s_j) = sqrt(a_j)``.

    The bound is ``M_{H^2}(S)^2 * sum_j |a_j| / zeta(2 Re s_j)``.
    """
    if S.kind != "zeta":
        raise DomainError("squaring works with the zeta kernel")
    a = np.asarray(targets, dtype=complex)
    if a.shape != (len(S),) or not np.all(np.isfinite(a)):
        raise DomainError("need one finite target per point")
    gs = gram(S)
    M = interp_const_h2(S)
    root = np.sqrt(a)
    try:
        c = scipy.linalg.solve(gs.G, root, assume_a="her")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"singular Gram system: {exc}") from exc
    g = KernelExpansion(S.points, c)
    exact = float(np.real(c.conj() @ gs.G @ c))
    resid = float(np.max(np.abs(g(S.points) ** 2 - a))) if np.any(a) else 0.0
    gt = g.truncate(cap)
    if gt.is_zero:
        mc, se = 0.0, 0.0
    else:
        mc, se = mc_power_mean(gt, 2.0, samples, seed)
    kept = float(np.sum(np.abs(gt.coeffs) ** 2)) if not gt.is_zero else 0.0
    bound = M**2 * float(np.sum(np.abs(a) / gs.norms**2))
    return SquaringResult(g, gt * gt, exact, mc, se, max(exact - kept, 0.0), bound, M, resid, cap, samples, seed)


# ---------------------------------------------------------------------------
# separation and lower bounds


def blaschke_separation(S: PointSequence) -> float:
    """``min_j prod_{k != j} |s_j - s_k| / |s_j + conj s_k - 1|`` for half-plane points."""
    if S.kind == "disc":
        raise DomainError("use half-plane points")
    z = S.points
    if len(z) == 1:
        return 1.0
    num = np.abs(z[:, None] - z[None, :])
    den = np.abs(z[:, None] + z.conj()[None, :] - 1.0)
    r = num / den
    np.fill_diagonal(r, 1.0)
    with np.errstate(divide="ignore"):
        logs = np.sum(np.log(r), axis=1)
    return float(np.exp(logs.min()))


def hinfty_interp_surrogate(S: PointSequence) -> dict:
    """Classical upper bound ``(2e + 4e |log delta|) / delta`` for the bounded interpolation constant."""
    d = blaschke_separation(S)
    if d <= 0:
        raise NumericalFailure("coincident points")
    val = (2 * math.e + 4 * math.e * abs(math.log(d))) / d
    return {"value": val, "provenance": "surrogate", "delta": d}


def _item(value, provenance):
    return {"value": float(value), "provenance": provenance}


def lower_bound_general(variant: str, **inputs) -> dict:
    """Evaluate the printed right-hand side of a general lower bound for ``a_n``.

    ``"6.1"`` / ``"6.2"``: ``S``, ``S_prime`` (point arrays of equal length),
    ``p``, ``interp`` (bounded-interpolation surrogate for 6.1, H^p
    interpolation constant for 6.2), ``carleson`` (Carleson constant of
    ``mu_{S'}``), optional ``symbol`` to check ``phi(s'_j) = s_j`` and
    ``rho`` (default 1).

    ``"9.2"``: ``Z`` (disc points), ``omega`` (a :class:`DiscMap`), ``T``,
    ``p``, optional ``interp`` (default: computed from ``Phi(Z)``; at p = 1
    via the squaring bound), optional ``carleson`` (default: disc Gram) and
    ``c`` (default 1).

    Every term is returned with its provenance.
    """
    p = float(inputs["p"])
    if p < 1:
        raise DomainError("p must be >= 1")
    q = min(2.0, p)
    if variant in ("6.1", "6.2"):
        S = np.asarray(inputs["S"], dtype=complex)
        Sp = np.asarray(inputs["S_prime"], dtype=complex)
        if S.shape != Sp.shape:
            raise DomainError("S and S_prime need equal lengths")
        sym = inputs.get("symbol")
        if sym is not None:
            err = np.max(np.abs(np.asarray(sym(Sp)) - S))
            if err > 1e-8:
                raise DomainError(f"S_prime is not a preimage of S (error {err:.1e})")
        n = S.size
        ratio = min(float(zeta(2 * a.real)) / float(zeta(2 * b.real)) for a, b in zip(S, Sp))
        interp = float(inputs["interp"])
        carl = float(inputs["carleson"])
        const_name = "rho_p" if variant == "6.1" else None
        const = float(inputs.get("rho", 1.0)) if variant == "6.1" else 1.0
        value = const * n ** (-(1 / q - 1 / p)) / interp * carl ** (-1 / p) * ratio ** (1 / p)
        terms = {
            "interp": _item(interp, inputs.get("interp_provenance", "surrogate" if variant == "6.1" else "computed")),
            "carleson": _item(carl, inputs.get("carleson_provenance", "computed")),
            "zeta_ratio_inf": _item(ratio, "computed"),
            "n_factor": _item(n ** (-(1 / q - 1 / p)), "computed"),
        }
        consts = {const_name: {"value": const, "provenance": "default-constant"}} if const_name else {}
        return {"variant": variant, "value": value, "terms": terms, "constants": consts, "p": p, "n": n}
    if variant == "9.2":
        Z = np.asarray(inputs["Z"], dtype=complex)
        om: DiscMap = inputs["omega"]
        T = inputs.get("T") or TMap("T0")
        W = np.asarray(om(Z), dtype=complex)
        n = Z.size
        PointSequence(W, "disc")  # omega(Z) must be n distinct disc points
        if "interp" in inputs:
            interp = _item(inputs["interp"], inputs.get("interp_provenance", "surrogate"))
        else:
            m2 = interp_const_h2(PointSequence(np.asarray(T(W)), "zeta"))
            if p == 2:
                interp = _item(m2, "computed")
            elif p == 1:
                interp = _item(m2**2, "computed (squaring bound)")
            else:
                raise DomainError("an interpolation constant must be supplied for p not in {1, 2}")
        if "carleson" in inputs:
            carl = _item(inputs["carleson"], inputs.get("carleson_provenance", "surrogate"))
        else:
            carl = _item(gram(PointSequence(Z, "disc")).lam_max, "computed")
        ratio = float(np.min((1 - np.abs(Z) ** 2) / (1 - np.abs(W) ** 2)))
        c = float(inputs.get("c", 1.0))
        value = c * n ** (-(1 / q - 1 / p)) / interp["value"] * carl["value"] ** (-1 / p) * ratio ** (1 / p)
        return {"variant": variant, "value": value, "p": p, "n": n,
                "terms": {"interp": interp, "carleson": carl, "disc_ratio_inf": _item(ratio, "computed")},
                "constants": {"c": {"value": c, "provenance": "default-constant"}}}
    raise DomainError(f"unknown variant {variant!r}")
