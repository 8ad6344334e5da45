"""Pure numpy implementations of the hot kernels.

Signatures mirror the compiled module exactly; the dispatcher in
``compop._ext`` picks one at import time.
"""

import numpy as np

_CHUNK = 65_536


def char_eval(exps, coeffs, angles):
    """Evaluate ``sum_k b_k exp(i <exps[k], angles[s]>)`` for every sample row."""
    exps = np.asarray(exps, dtype=np.float64)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    angles = np.asarray(angles, dtype=np.float64)
    out = np.empty(angles.shape[0], dtype=np.complex128)
    for lo in range(0, angles.shape[0], _CHUNK):
        ph = angles[lo:lo + _CHUNK] @ exps.T
        out[lo:lo + _CHUNK] = np.exp(1j * ph) @ coeffs
    return out


def mc_moments(exps, coeffs, angles, p):
    """Return ``(sum |v|^p, sum |v|^{2p})`` over sample rows."""
    v = np.abs(char_eval(exps, coeffs, angles))
    w = v ** p
    return float(w.sum()), float((w * w).sum())


def convolve(fa, ca, fb, cb, cap):
    """Capped Dirichlet convolution of two sparse polynomials.

    Returns ``(freqs, coeffs, discarded_l1)`` with ``freqs`` sorted ascending
    and duplicates merged.
    """
    fa = np.asarray(fa, dtype=np.int64)
    fb = np.asarray(fb, dtype=np.int64)
    ca = np.asarray(ca, dtype=np.complex128)
    cb = np.asarray(cb, dtype=np.complex128)
    if fa.size == 0 or fb.size == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.complex128), 0.0
    prod = np.multiply.outer(fa, fb).ravel()
    vals = np.multiply.outer(ca, cb).ravel()
    keep = prod <= cap
    discarded = float(np.abs(vals[~keep]).sum())
    freqs, inv = np.unique(prod[keep], return_inverse=True)
    out = np.zeros(freqs.size, dtype=np.complex128)
    np.add.at(out, inv, vals[keep])
    return freqs, out, discarded
