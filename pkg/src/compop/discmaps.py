"""Analytic self-maps of the unit disc and the half-plane maps used for transference."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import series
from .errors import DomainError

__all__ = ["DiscMap", "TMap", "parse_disc_map", "parse_tmap"]

_FAMILIES = ("identity", "scalar", "lens", "mobius")


def _cx(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(v)


@dataclass(frozen=True)
class DiscMap:
    """A self-map of the unit disc from a small parametric family.

    Families
    --------
    identity : ``z``
    scalar   : ``a z`` with ``|a| <= 1``; params ``{"a"}``
    lens     : ``((1+z)^t - (1-z)^t) / ((1+z)^t + (1-z)^t)`` with ``0 < t <= 1``;
               params ``{"theta"}``
    mobius   : ``(a z + b) / (c z + d)``; params ``{"a", "b", "c", "d"}``

    Construction validates the self-map property by sampling the boundary.
    """

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise DomainError(f"unknown disc map family {self.family!r}")
        p = dict(self.params)
        if self.family == "scalar":
            p = {"a": _cx(p.get("a", 0.5))}
        elif self.family == "lens":
            th = float(p.get("theta", 0.5))
            if not 0 < th <= 1:
                raise DomainError("lens parameter must lie in (0, 1]")
            p = {"theta": th}
        elif self.family == "mobius":
            p = {k: _cx(p.get(k, d)) for k, d in (("a", 1), ("b", 0), ("c", 0), ("d", 1))}
            if abs(p["a"] * p["d"] - p["b"] * p["c"]) < 1e-14:
                raise DomainError("degenerate Mobius map")
        object.__setattr__(self, "params", p)
        t = np.linspace(0, 2 * np.pi, 4097)[:-1]
        bnd = np.abs(self(0.999999 * np.exp(1j * t)))
        if not np.all(bnd <= 1 + 1e-9):
            raise DomainError(f"{self.family} map with {self.params} is not a self-map of the disc")

    # -- evaluation -------------------------------------------------------
    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        f, p = self.family, self.params
        if f == "identity":
            out = z.copy()
        elif f == "scalar":
            out = p["a"] * z
        elif f == "lens":
            th = p["theta"]
            a = (1 + z) ** th
            b = (1 - z) ** th
            out = (a - b) / (a + b)
        else:
            den = p["c"] * z + p["d"]
            with np.errstate(divide="ignore", invalid="ignore"):
                out = (p["a"] * z + p["b"]) / den
        return complex(out) if out.ndim == 0 else out

    def taylor(self, order: int) -> np.ndarray:
        """Taylor coefficients ``w_0 .. w_order`` at the origin."""
        n = int(order) + 1
        f, p = self.family, self.params
        out = np.zeros(n, dtype=complex)
        if f == "identity":
            if n > 1:
                out[1] = 1.0
        elif f == "scalar":
            if n > 1:
                out[1] = p["a"]
        elif f == "lens":
            th = p["theta"]
            a = series.binomial(th, 1.0, n)
            b = series.binomial(th, -1.0, n)
            out = series.div(a - b, a + b, n)
        else:
            out = series.div([p["b"], p["a"]], [p["d"], p["c"]], n)
        return out

    def derivative(self, z, h: float = 1e-6):
        z = np.asarray(z, dtype=complex)
        return (self(z + h) - self(z - h)) / (2 * h)

    # -- metadata ---------------------------------------------------------
    @property
    def margins(self) -> dict[str, float]:
        """Distance of the image closure to ``-1`` and to the unit circle.

        Exact for the identity, scalar and lens families; sampled for Mobius.
        """
        if self.family in ("identity", "lens"):
            return {"dist_to_minus_one": 0.0, "dist_to_circle": 0.0}
        if self.family == "scalar":
            r = 1 - abs(self.params["a"])
            return {"dist_to_minus_one": r, "dist_to_circle": r}
        t = np.linspace(0, 2 * np.pi, 20001)
        w = self(np.exp(1j * t) * (1 - 1e-12))
        w = w[np.isfinite(w)]
        return {
            "dist_to_minus_one": float(np.min(np.abs(w + 1))),
            "dist_to_circle": float(max(0.0, 1 - np.max(np.abs(w)))),
        }

    def to_json_obj(self) -> dict[str, Any]:
        ps = {}
        for k, v in self.params.items():
            ps[k] = [v.real, v.imag] if isinstance(v, complex) else v
        return {"family": self.family, "params": ps}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj) -> "DiscMap":
        return cls(obj["family"], dict(obj.get("params", {})))

    @classmethod
    def identity(cls):
        return cls("identity")

    @classmethod
    def scalar(cls, a):
        return cls("scalar", {"a": a})

    @classmethod
    def lens(cls, theta):
        return cls("lens", {"theta": theta})

    @classmethod
    def mobius(cls, a, b, c, d):
        return cls("mobius", {"a": a, "b": b, "c": c, "d": d})


@dataclass(frozen=True)
class TMap:
    """Map from the disc into ``Re s > 1/2``.

    ``T0(z) = 1/2 + (1-z)/(1+z)`` and ``T_eps(z) = 1/2 + ((1-z)/(1+z))^(1-eps)``.
    Both are singular at ``z = -1``.
    """

    kind: str = "T0"
    eps: float = 0.0

    def __post_init__(self):
        if self.kind not in ("T0", "T_eps"):
            raise DomainError(f"unknown T map {self.kind!r}")
        if self.kind == "T_eps" and not 0 < self.eps < 1:
            raise DomainError("T_eps requires 0 < eps < 1")
        if self.kind == "T0":
            object.__setattr__(self, "eps", 0.0)

    @property
    def exponent(self) -> float:
        return 1.0 - self.eps

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            u = (1 - w) / (1 + w)
            out = 0.5 + (u if self.kind == "T0" else u ** self.exponent)
        return complex(out) if out.ndim == 0 else out

    def compose_series(self, w: np.ndarray, n: int) -> np.ndarray:
        """Taylor coefficients of ``T(w(z))`` given those of ``w``."""
        w = np.asarray(w, dtype=complex)
        num = -w.copy()
        num[0] += 1.0
        den = w.copy()
        den[0] += 1.0
        u = series.div(num, den, n)
        v = u if self.kind == "T0" else series.power(u, self.exponent, n)
        v = v.copy()
        v[0] += 0.5
        return v

    def label(self) -> str:
        return "T0" if self.kind == "T0" else f"T_eps({self.eps:g})"


def parse_disc_map(text: str) -> DiscMap:
    """Parse ``identity``, ``scalar:0.5``, ``lens:0.5``, ``mobius:a,b,c,d`` or JSON."""
    text = text.strip()
    if text.startswith("{"):
        return DiscMap.from_json_obj(json.loads(text))
    name, _, arg = text.partition(":")
    if name == "identity":
        return DiscMap.identity()
    if name == "scalar":
        return DiscMap.scalar(complex(arg))
    if name == "lens":
        return DiscMap.lens(float(arg))
    if name == "mobius":
        a, b, c, d = (complex(x) for x in arg.split(","))
        return DiscMap.mobius(a, b, c, d)
    raise DomainError(f"cannot parse disc map {text!r}")


def parse_tmap(text: str) -> TMap:
    """Parse ``T0``, ``T_eps:0.1`` or ``T_eps(0.1)``."""
    t = text.strip().replace("(", ":").rstrip(")")
    if t == "T0":
        return TMap("T0")
    name, _, arg = t.partition(":")
    if name == "T_eps" and arg:
        return TMap("T_eps", float(arg))
    raise DomainError(f"cannot parse T map {text!r}")
