"""Singular values, eigenvalues, decay fits and the closed-form bounds around them.

Everything here is a Hilbert-space (p = 2) statement unless a function says
otherwise.  Truncated spectra only approximate operator spectra, so c0 = 0
comparisons are meant to be read as convergence studies over growing ``N``.
"""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .dirichlet import DirichletPolynomial, first_primes, omega
from .discmaps import DiscMap, TMap
from .errors import DomainError, NumericalFailure
from .operator import TruncatedOperator, semigroup_frequencies
from .symbols import Symbol, fixed_point
from .zeta import zeta

__all__ = [
    "SingularSpectrum",
    "EigenSpectrum",
    "DecayFitReport",
    "approx_numbers_h2",
    "eigenvalues",
    "predicted_spectrum",
    "compare_spectrum",
    "fit_decay",
    "weyl_pietsch_check",
    "bernstein_lower_c1",
    "gelfand_upper_part_a",
    "approx_numbers_range_gram",
    "TransferenceReport",
    "kernel_frame",
    "transferred_approx_numbers",
    "LeadingEigenvalues",
    "leading_eigenvalues_hp",
]


def _series_csv(values) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cx = np.iscomplexobj(values)
    w.writerow(["n", "re", "im"] if cx else ["n", "value"])
    for n, v in enumerate(values, 1):
        w.writerow([n, repr(float(v.real)), repr(float(v.imag))] if cx else [n, repr(float(v))])
    return buf.getvalue()


@dataclass(frozen=True)
class SingularSpectrum:
    """Nonincreasing singular values ``a_1 >= a_2 >= ...`` with truncation metadata."""

    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if np.any(v < 0) or np.any(np.diff(v) > 1e-12 * max(1.0, v[0] if v.size else 1.0)):
            raise NumericalFailure("singular values must be nonnegative and nonincreasing")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    def to_csv(self) -> str:
        return _series_csv(self.values)

    def to_json_obj(self) -> dict:
        return {"kind": "singular", "values": self.values.tolist(), "meta": self.meta}


@dataclass(frozen=True)
class EigenSpectrum:
    """Eigenvalues sorted by descending modulus, ties broken by argument."""

    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return self.values.size

    def to_csv(self) -> str:
        return _series_csv(np.asarray(self.values, dtype=complex))

    def to_json_obj(self) -> dict:
        return {"kind": "eigen", "values": [[float(v.real), float(v.imag)] for v in self.values], "meta": self.meta}


def _sort_modulus(ev: np.ndarray) -> np.ndarray:
    ev = np.asarray(ev, dtype=complex)
    # round the modulus so that numerically equal values tie and fall back on the argument
    mod = np.round(np.abs(ev), 12)
    order = np.lexsort((np.angle(ev), -mod))
    return ev[order]


def approx_numbers_h2(op: TruncatedOperator) -> SingularSpectrum:
    """Singular values of the truncated matrix (approximation numbers at p = 2)."""
    try:
        sv = scipy.linalg.svdvals(np.asarray(op.matrix))
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"SVD failed: {exc}") from exc
    meta = {"N": len(op.col_freqs), "M": len(op.row_freqs), "basis": op.basis, "p": 2}
    return SingularSpectrum(np.sort(sv)[::-1], meta)


def _square_section(op: TruncatedOperator) -> np.ndarray:
    if op.is_square_section:
        return np.asarray(op.matrix)
    index = {f: i for i, f in enumerate(op.row_freqs)}
    try:
        rows = [index[f] for f in op.col_freqs]
    except KeyError as exc:
        raise DomainError(f"row set misses column frequency {exc.args[0]}") from None
    return np.asarray(op.matrix)[rows, :]


def eigenvalues(op: TruncatedOperator) -> EigenSpectrum:
    """Eigenvalues of the square compression onto the column frequencies."""
    A = _square_section(op)
    try:
        ev = scipy.linalg.eigvals(A)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"eigensolver failed: {exc}") from exc
    return EigenSpectrum(_sort_modulus(ev), {"N": A.shape[0], "basis": op.basis})


def predicted_spectrum(sym: Symbol, k: int) -> tuple[np.ndarray, str]:
    """First ``k`` predicted eigenvalues and a scope label.

    ``c0 = 0``: powers of ``phi'(alpha)`` at the attracting fixed point.
    ``c0 = 1``: ``j^{-c1}`` for ``j = 1..k``.
    ``c0 >= 2``: ``{1, 0, 0, ...}``, no prediction is made beyond the top eigenvalue.
    """
    if sym.c0 == 0:
        if sym.is_constant:
            out = np.zeros(k, dtype=complex)
            out[0] = 1.0
            return out, "constant symbol"
        d = complex(sym.derivative(fixed_point(sym).alpha))
        return d ** np.arange(k), "c0=0 fixed-point powers"
    if sym.c0 == 1:
        return np.arange(1, k + 1, dtype=float) ** (-complex(sym.c1)), "c0=1 diagonal"
    out = np.zeros(k, dtype=complex)
    out[0] = 1.0
    return out, "c0>=2 (no prediction)"


def compare_spectrum(computed: EigenSpectrum, sym: Symbol, k: int) -> dict:
    """Relative deviation of the first ``k`` computed eigenvalues from the prediction.

    Both lists are aligned by descending modulus.  A zero prediction is
    compared in absolute terms.
    """
    if k > len(computed):
        raise DomainError(f"k={k} exceeds the {len(computed)} available eigenvalues")
    pred, label = predicted_spectrum(sym, k)
    pred = _sort_modulus(pred)
    got = np.asarray(computed.values[:k], dtype=complex)
    den = np.where(pred == 0, 1.0, np.abs(pred))
    dev = np.abs(got - pred) / den
    return {"max_rel_dev": float(dev.max()), "deviations": dev, "predicted": pred, "computed": got, "scope": label}


# ---------------------------------------------------------------------------
# decay fits

_MODELS = {
    "geometric": lambda n: n.astype(float),
    "power": lambda n: np.log(n),
    "power-log": lambda n: np.log(n * np.log(n)),
    "stretched": lambda n: np.sqrt(n),
}


@dataclass(frozen=True)
class DecayFitReport:
    """Least-squares fit of ``log a_n`` against a transformed index.

    ``params`` holds ``a`` (the prefactor) and the model rate: ``delta`` and
    ``rate`` for geometric, ``A`` for power, ``gamma`` for power-log, ``b``
    for stretched.  ``scores`` are AICc values (lower is better) for every
    model; ``r2_all`` the corresponding R².
    """

    model: str
    params: dict
    r2: float
    residuals: np.ndarray
    scores: dict
    r2_all: dict
    window: tuple
    x: np.ndarray = None
    y: np.ndarray = None

    def to_json_obj(self) -> dict:
        return {"model": self.model, "params": self.params, "r2": self.r2, "residuals": self.residuals.tolist(),
                "scores": self.scores, "r2_all": self.r2_all, "window": list(self.window),
                "x": None if self.x is None else self.x.tolist(), "y": None if self.y is None else self.y.tolist()}


def _linfit(x, y):
    X = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    res = y - X @ coef
    ss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(res @ res) / ss if ss > 0 else 1.0
    return coef, res, min(1.0, max(0.0, r2))


def fit_decay(values, window: tuple[int, int] | None = None, models=None) -> DecayFitReport:
    """Fit decay models to ``values[lo-1 : hi]`` (1-based inclusive window).

    Models are geometric ``delta^n``, power ``n^{-A}``, power-log
    ``(n log n)^{-gamma}`` and stretched ``exp(-b sqrt n)``.  Every model has
    two parameters, so the AICc ranking is a ranking by residual sum of squares
    kept in its penalized form for reporting.
    """
    v = np.asarray(values, dtype=float)
    lo, hi = window if window is not None else (1, v.size)
    if lo < 1 or hi > v.size or hi - lo + 1 < 5:
        raise DomainError("fit window needs at least 5 points inside the sequence")
    n = np.arange(lo, hi + 1)
    y = v[lo - 1:hi]
    if np.any(y <= 0):
        raise DomainError("decay fits need positive values")
    models = list(models or _MODELS)
    if "power-log" in models and lo < 2:
        models.remove("power-log")
    y = np.log(y)
    m, k = y.size, 2
    fits, scores, r2s = {}, {}, {}
    for name in models:
        x = _MODELS[name](n)
        coef, res, r2 = _linfit(x, y)
        rss = max(float(res @ res), 1e-300 * m)
        aicc = m * math.log(rss / m) + 2 * k + (2 * k * (k + 1)) / max(m - k - 1, 1)
        fits[name] = (coef, res, r2, x)
        scores[name] = aicc
        r2s[name] = r2
    best = min(scores, key=scores.get)
    coef, res, r2, x = fits[best]
    a = float(math.exp(coef[0]))
    s = float(coef[1])
    params = {"geometric": {"a": a, "delta": math.exp(s), "rate": -s},
              "power": {"a": a, "A": -s},
              "power-log": {"a": a, "gamma": -s},
              "stretched": {"a": a, "b": -s}}[best]
    return DecayFitReport(best, params, r2, res, scores, r2s, (lo, hi), x, y)


# ---------------------------------------------------------------------------
# inequalities and bounds


def weyl_pietsch_check(eigs: EigenSpectrum, approx: SingularSpectrum, r: float = 1.0, rtol: float = 1e-9) -> dict:
    """Check ``|lambda_{2n}| <= e (prod_{j<=n} a_j)^{1/n}`` for every admissible ``n``.

    Also reports ``||lambda||_r / ||a||_r``; the constant in that additive
    inequality is not known, so only the ratio is given.
    """
    lam = np.abs(np.asarray(eigs.values, dtype=complex))
    a = np.asarray(approx.values, dtype=float)
    L = min(lam.size // 2, a.size)
    ns = np.arange(1, L + 1)
    with np.errstate(divide="ignore"):
        logs = np.cumsum(np.log(a[:L]))
    geo = np.exp(logs / ns)
    bound = math.e * geo
    lhs = lam[2 * ns - 1]
    slack_abs = rtol * bound + 1e-13 * (a[0] if a.size else 1.0)
    ok = lhs <= bound + slack_abs
    with np.errstate(divide="ignore", invalid="ignore"):
        margin = lhs / (bound + slack_abs)
    m = min(lam.size, a.size)
    wr = float(np.sum(lam[:m] ** r) ** (1 / r) / np.sum(a[:m] ** r) ** (1 / r)) if np.any(a[:m] > 0) else 0.0
    return {"holds": bool(np.all(ok)), "n_checked": int(L), "worst_ratio": float(margin.max()) if L else 0.0,
            "failures": ns[~ok].tolist(), "weyl_ratio": wr, "r": r}


def bernstein_lower_c1(op: TruncatedOperator, n: int, c0: int | None = None) -> float:
    """Smallest singular value of the prime-column block projected onto ``Omega = c0`` rows.

    Columns are the first ``n`` primes; rows are the row frequencies with
    ``c0`` prime factors.  At p = 2 this lower-bounds the Bernstein number
    ``b_n``.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if c0 is None:
        c0 = getattr(op.symbol, "c0", None)
        if c0 is None:
            raise DomainError("operator carries no symbol; pass c0")
    if c0 < 1:
        raise DomainError("the prime-block bound needs c0 >= 1")
    primes = first_primes(n)
    cidx = {f: j for j, f in enumerate(op.col_freqs)}
    missing = [p for p in primes if p not in cidx]
    if missing:
        raise DomainError(f"primes {missing} are outside the column range")
    rows = [i for i, f in enumerate(op.row_freqs) if omega(f) == c0]
    top = max(primes) ** c0
    if max(op.row_freqs) < top:
        raise DomainError(f"row range ends below {top}")
    B = np.asarray(op.matrix)[np.ix_(rows, [cidx[p] for p in primes])]
    return float(scipy.linalg.svdvals(B).min())


def gelfand_upper_part_a(r: float, theta: float, p: float, n):
    """Closed-form bound ``2 sqrt(n) r^(n-1) zeta(1/2 + theta)^(1/p)``."""
    if not 0 < r < 1:
        raise DomainError("r must lie in (0, 1)")
    if theta <= 0.5:
        raise DomainError("theta must exceed 1/2")
    if p < 1:
        raise DomainError("p must be >= 1")
    n = np.asarray(n, dtype=float)
    if np.any(n < 1):
        raise DomainError("n must be >= 1")
    out = 2 * np.sqrt(n) * r ** (n - 1) * float(zeta(0.5 + theta)) ** (1 / p)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# high-precision singular values for c0 = 0 symbols


def approx_numbers_range_gram(sym: Symbol, rows: int = 64, dps: int = 100) -> SingularSpectrum:
    """Singular values of ``P_R C_phi`` for a ``c0 = 0`` symbol, with ``P_R`` the
    projection onto the first ``rows`` output frequencies.

    With ``phi = c1 + psi~`` the coefficient of ``m^{-s}`` in ``n^{-phi}`` is
    ``n^{-c1} Q_m(log n)`` where ``Q_m(x) = sum_k B[m,k] x^k`` and ``B[m,k]`` is
    the ``m``-th coefficient of ``(-psi~)^k / k!``.  Summing over all columns
    ``n`` gives the row Gram ``B Z B^H`` with
    ``Z[k,k'] = (-1)^(k+k') zeta^(k+k')(2 Re c1)``, evaluated in ``dps``-digit
    arithmetic.  No column truncation is involved, and the values increase to
    the true approximation numbers as ``rows`` grows.
    """
    import mpmath as mp

    if sym.c0 != 0:
        raise DomainError("the range Gram applies to c0 = 0 symbols")
    x = 2 * complex(sym.c1).real
    if x <= 1:
        raise DomainError("need Re c1 > 1/2")
    if sym.is_constant:
        vals = np.zeros(rows)
        vals[0] = math.sqrt(float(zeta(x)))
        return SingularSpectrum(vals, {"rows": rows, "method": "range-gram"})
    t0 = time.time()
    gens = [n for n, _ in sym.psi if n > 1]
    freqs = semigroup_frequencies(gens, rows)
    top = freqs[-1]
    K = int(math.floor(math.log(top) / math.log(min(gens)) + 1e-9))
    idx = {f: i for i, f in enumerate(freqs)}
    with mp.workdps(dps):
        neg = {n: -mp.mpc(c.real, c.imag) for n, c in sym.psi if n > 1}
        B = mp.matrix(rows, K + 1)
        cur = {1: mp.mpc(1)}
        fact = mp.mpf(1)
        for k in range(K + 1):
            if k:
                fact *= k
                nxt: dict = {}
                for a, u in cur.items():
                    for b, v in neg.items():
                        f = a * b
                        if f <= top:
                            nxt[f] = nxt.get(f, 0) + u * v
                cur = nxt
            for f, v in cur.items():
                i = idx.get(f)
                if i is not None:
                    B[i, k] = v / fact
        xm = mp.mpf(x)
        zd = [(-1) ** j * mp.zeta(xm, 1, j) for j in range(2 * K + 1)]
        Z = mp.matrix(K + 1, K + 1)
        for i in range(K + 1):
            for j in range(K + 1):
                Z[i, j] = zd[i + j]
        G = B * Z * B.transpose_conj()
        G = (G + G.transpose_conj()) / 2
        ev = mp.eighe(G, eigvals_only=True)
        vals = sorted((float(mp.sqrt(max(mp.re(e), 0))) for e in ev), reverse=True)
    return SingularSpectrum(np.array(vals), {"rows": rows, "row_freq_max": int(top) if top < 2**53 else str(top),
                                             "exp_order": K, "dps": dps, "method": "range-gram",
                                             "seconds": time.time() - t0})


# ---------------------------------------------------------------------------
# transference through a disc map, by kernel frames


def kernel_frame(ratio: float = 0.4, d_min: float = 1e-12, rays: int = 5, d_max: float = 0.7,
                 spread: float = 0.85) -> np.ndarray:
    """Points of the disc accumulating geometrically at ``+1`` and ``-1``.

    Besides the origin, for each sign and each of ``rays`` directions
    ``a in spread * [-pi/2, pi/2]`` the points ``sign * (1 - d e^{ia})`` with
    ``d = d_max, d_max*ratio, ...`` down to ``d_min``.
    """
    d = []
    x = d_max
    while x > d_min:
        d.append(x)
        x *= ratio
    d = np.array(d)
    out = [np.array([0j])]
    for sgn in (1, -1):
        for a in np.linspace(-spread, spread, rays) * np.pi / 2:
            z = sgn * (1 - d * np.exp(1j * a))
            out.append(z[np.abs(z) < 1])
    return np.concatenate(out)


def _acb_disc_map(omega_map: DiscMap):
    from flint import acb

    p = omega_map.params
    f = omega_map.family
    if f == "identity":
        return lambda z: z
    if f == "scalar":
        a = acb(p["a"].real, p["a"].imag)
        return lambda z: a * z
    if f == "lens":
        th = p["theta"]

        def lens(z):
            u, v = (1 + z) ** th, (1 - z) ** th
            return (u - v) / (u + v)

        return lens
    a, b, c, d = (acb(p[k].real, p[k].imag) for k in "abcd")
    return lambda z: (a * z + b) / (c * z + d)


def _acb_tmap(T: TMap):
    from flint import acb

    half = acb(0.5)
    if T.kind == "T0":
        return lambda w: half + (1 - w) / (1 + w)
    e = T.exponent
    return lambda w: half + ((1 - w) / (1 + w)) ** e


def _tm_factor(z):
    """Lower-triangular Cholesky factor of the Szego Gram ``1/(1 - z_i conj z_k)``.

    Column ``k`` holds the ``k``-th Takenaka-Malmquist function at the points.
    """
    from flint import acb_mat

    m = len(z)
    L = [[0] * m for _ in range(m)]
    blas = [1] * m
    for k in range(m):
        zk = z[k]
        ck = zk.conjugate()
        nk = (1 - abs(zk) ** 2).sqrt()
        for i in range(k, m):
            L[i][k] = nk / (1 - ck * z[i]) * blas[i]
        for i in range(k + 1, m):
            blas[i] = blas[i] * (z[i] - zk) / (1 - ck * z[i])
    return acb_mat(L)


def _hermitian(kern, pts):
    from flint import acb_mat

    m = len(pts)
    G = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(i, m):
            v = kern(pts[i], pts[j])
            G[i][j] = v
            G[j][i] = v.conjugate()
    return acb_mat(G)


def _whitened_sv(L, G) -> np.ndarray:
    """Square roots of the eigenvalues of ``L^{-1} G L^{-H}`` (rounded to double at the end)."""
    X = L.solve(G, algorithm="approx")
    Y = L.solve(X.conjugate().transpose(), algorithm="approx")
    m = Y.nrows()
    M = np.array([[complex(Y[i, j].mid()) for j in range(m)] for i in range(m)])
    M = (M + M.conj().T) / 2
    return np.sqrt(np.clip(np.linalg.eigvalsh(M)[::-1], 0.0, None))


@dataclass(frozen=True)
class TransferenceReport:
    """Kernel-frame singular values of ``C_omega`` and of ``f -> f o T o omega``.

    ``ct_estimate`` is the largest frame singular value of ``C_T``: a sampled
    lower estimate of ``||C_T||``, flagged by ``ct_provenance``.
    """

    sv_phi: np.ndarray
    sv_omega: np.ndarray
    ct_estimate: float
    ct_provenance: str
    frame_size: int
    prec: int
    seconds: float

    def domination_ratio(self, n_max: int) -> np.ndarray:
        return self.sv_phi[:n_max] / (self.ct_estimate * self.sv_omega[:n_max])


def transferred_approx_numbers(omega_map: DiscMap, T: TMap, frame: np.ndarray | None = None,
                               prec: int = 160) -> TransferenceReport:
    """Approximation numbers of ``C_omega`` and of the transferred operator, from a kernel frame.

    For points ``z_i`` the adjoints act on reproducing kernels by
    ``C_omega^* k_z = k_{omega(z)}`` and, for ``f -> f o Phi`` with
    ``Phi = T o omega``, by sending ``k_z`` to the Dirichlet kernel
    ``zeta(. + conj Phi(z))``.  Restricting each adjoint to the span of the
    frame kernels gives the generalized eigenproblem of the image Gram against
    the Szego Gram; its singular values bound ``a_n`` from below and increase
    to it as the frame fills the disc.  The Szego Gram is factored in closed
    form and the whitening is carried out in ``prec``-bit ball arithmetic,
    since the Gram condition numbers exceed double range.
    """
    from flint import acb, ctx

    t0 = time.time()
    Z = kernel_frame() if frame is None else np.asarray(frame, dtype=complex)
    old = ctx.prec
    ctx.prec = prec
    try:
        z = [acb(float(v.real), float(v.imag)) for v in Z]
        om = _acb_disc_map(omega_map)
        Tm = _acb_tmap(T)
        w = [om(v) for v in z]
        ph = [Tm(v) for v in w]
        L = _tm_factor(z)
        Gw = _hermitian(lambda a, b: 1 / (1 - a * b.conjugate()), w)
        Gz = _hermitian(lambda a, b: (a + b.conjugate()).zeta(), ph)
        sv_omega = _whitened_sv(L, Gw)
        sv_phi = _whitened_sv(L, Gz)
        ct = float(_whitened_sv(_tm_factor(w), Gz)[0])
    finally:
        ctx.prec = old
    return TransferenceReport(sv_phi, sv_omega, ct, "sampled estimate (kernel-frame lower bound)", len(Z), prec,
                              time.time() - t0)


# ---------------------------------------------------------------------------
# high-precision leading eigenvalues for c0 = 0 symbols


@dataclass(frozen=True)
class LeadingEigenvalues:
    """Leading eigenvalues of a semigroup section in ``prec``-bit arithmetic.

    ``resolution`` is the relative level below which two deviations are not
    distinguished; it is ``2^(-prec/2)``, well above the observed rounding
    floor of the subspace iteration.
    """

    values: np.ndarray
    N: int
    prec: int
    resolution: float
    deviations: np.ndarray | None = None
    predicted: np.ndarray | None = None

    @property
    def max_rel_dev(self) -> float:
        return float(np.max(self.deviations))


def _semigroup_section_acb(sym: Symbol, freqs: list, K: int):
    """Factors ``B`` (N x K+1) and ``V`` (K+1 x N) of the semigroup section, at the current flint precision."""
    from flint import acb, acb_mat, arb

    N = len(freqs)
    top = freqs[-1]
    idx = {f: i for i, f in enumerate(freqs)}
    c1 = acb(complex(sym.c1).real, complex(sym.c1).imag)
    neg = [(n, -acb(c.real, c.imag)) for n, c in sym.psi if n > 1]
    Brows = [[acb(0)] * (K + 1) for _ in range(N)]
    cur = {1: acb(1)}
    fact = arb(1)
    for l in range(K + 1):
        if l:
            fact *= l
            nxt: dict = {}
            for a, u in cur.items():
                for b, v in neg:
                    f = a * b
                    if f <= top:
                        nxt[f] = nxt.get(f, acb(0)) + u * v
            cur = nxt
        for f, v in cur.items():
            i = idx.get(f)
            if i is not None:
                Brows[i][l] = v / fact
    Vrows = [[acb(0)] * N for _ in range(K + 1)]
    for j, m in enumerate(freqs):
        lm = arb(m).log()
        w = (-c1 * lm).exp()
        p = acb(1)
        for l in range(K + 1):
            Vrows[l][j] = p * w
            p = p * lm
    # move the row scale of V onto B; B V is unchanged and V B stays balanced
    for l in range(K + 1):
        sc = max((abs(v) for v in Vrows[l]), key=lambda x: float(x.mid().log()) if x > 0 else -math.inf)
        if sc > 0:
            Vrows[l] = [v / sc for v in Vrows[l]]
            for i in range(N):
                Brows[i][l] = Brows[i][l] * sc
    return acb_mat(Brows), acb_mat(Vrows)


def leading_eigenvalues_hp(sym: Symbol, N: int, k: int = 8, prec: int = 256, iters: int = 24,
                           guard: int = 6) -> LeadingEigenvalues:
    """First ``k`` eigenvalues of the ``N``-element semigroup section of ``C_phi`` (``c0 = 0``).

    The section factors as ``B V`` with ``B[f, l] = [f] (-psi~)^l / l!`` and
    ``V[l, m] = (log m)^l m^{-c1}``; both are built in ball arithmetic.  The
    leading eigenvalues of the smaller product ``V B`` are found by
    simultaneous iteration with ``k + guard`` vectors and a Rayleigh-Ritz
    step, or by a direct eigensolve when ``V B`` is that small already.  Deviations from the
    predicted powers ``phi'(alpha)^j`` are also computed at full precision.
    """
    from flint import acb, acb_mat, arb, ctx

    if sym.c0 != 0 or sym.is_constant:
        raise DomainError("needs a nonconstant c0 = 0 symbol")
    gens = [n for n, _ in sym.psi if n > 1]
    freqs = semigroup_frequencies(gens, N)
    if len(freqs) < k:
        raise DomainError("section too small for the requested eigenvalues")
    top = freqs[-1]
    K = int(math.floor(math.log(top) / math.log(min(gens)) + 1e-9))
    idx = {f: i for i, f in enumerate(freqs)}
    old = ctx.prec
    ctx.prec = prec
    try:
        Bm, Vm = _semigroup_section_acb(sym, freqs, K)
        # B V and V B share their nonzero spectrum; the latter is never larger
        C = (Vm * Bm).mid()
        r = K + 1
        if r < k:
            raise DomainError(f"section has rank at most {r} < k")
        b = min(k + guard, r)
        if b == r:
            H = C
        else:
            X = acb_mat([[acb(1) if i == j else acb(0) for j in range(b)] for i in range(r)])
            piv = list(range(b))
            for _ in range(iters):
                X = C * X
                # normalize on the best-conditioned rows, chosen by pivoted QR in double
                Xd = np.array([[complex(X[i, j].mid()) for j in range(b)] for i in range(r)])
                piv = list(scipy.linalg.qr(Xd.T, pivoting=True, mode="r")[1][:b])
                head = acb_mat([[X[i, j] for j in range(b)] for i in piv])
                X = head.transpose().solve(X.transpose(), algorithm="approx").transpose().mid()
            CX = C * X
            H = acb_mat([[CX[i, j] for j in range(b)] for i in piv])
        ev = sorted(H.eig(algorithm="approx"), key=lambda e: (-float(abs(e).mid()), float(e.arg().mid())))[:k]
        # prediction at the same precision: Newton on phi(s) = s from the double fixed point
        a = acb(complex(fixed_point(sym).alpha))
        for _ in range(64):
            g, dg = acb(0), acb(0)
            for n, c in sym.psi:
                cc = acb(c.real, c.imag)
                if n == 1:
                    g += cc
                else:
                    ln = arb(n).log()
                    e = (-a * ln).exp()
                    g += cc * e
                    dg -= cc * ln * e
            a = (a - (g - a) / (dg - 1)).mid()
        d = acb(0)
        for n, c in sym.psi:
            if n > 1:
                ln = arb(n).log()
                d -= acb(c.real, c.imag) * ln * (-a * ln).exp()
        pred = [d**j for j in range(k)]
        dev = np.array([float((abs(e - q) / abs(q)).mid()) if not q.is_zero() else float(abs(e).mid())
                        for e, q in zip(ev, pred)])
        vals = np.array([complex(e.mid()) for e in ev])
        pv = np.array([complex(q.mid()) for q in pred])
    finally:
        ctx.prec = old
    return LeadingEigenvalues(vals, N, prec, 2.0 ** (-prec / 2), dev, pv)
