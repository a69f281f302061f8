"""Hot numeric kernels with two interchangeable backends.

Two operations dominate runtime: evaluating rational functions on frequency
grids and solving the nodal admittance system per frequency.  Both exist as
numba @njit kernels and as vectorized pure-numpy fallbacks.  The numba path
is used when numba imports cleanly; setting the environment variable
``PDNZ_NO_NUMBA=1`` (before first use) forces the numpy path.  numba is
imported lazily so that commands which never touch a kernel stay fast.

Polynomial evaluation runs a compensated Horner recurrence.  With s = j*w
every Horner step is one real multiply and one real add per component, so
the rounding error of each step is captured exactly (TwoProd/TwoSum) and
propagated through the same recurrence.  This keeps rational evaluations
accurate even at deep resonance dips where plain Horner loses 6-8 digits.

Both backends use identical operation order, so results agree to the last
few ulps; within one backend, results are bitwise independent of how the
frequency axis is chunked.
"""

from __future__ import annotations

import math
import os

import numpy as np

_ENV_FLAG = "PDNZ_NO_NUMBA"
_SPLIT = 134217729.0  # 2**27 + 1, Veltkamp splitting constant
_PIVOT_FLOOR = 1e-280
_SINGULAR_LOG10 = -300.0


def _numba_disabled() -> bool:
    return os.environ.get(_ENV_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------

def _two_prod(a, b):
    # exact a*b = p + e without FMA (Dekker)
    p = a * b
    aa = _SPLIT * a
    ah = aa - (aa - a)
    al = a - ah
    bb = _SPLIT * b
    bh = bb - (bb - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def _two_sum(a, b):
    # exact a+b = s + e (Knuth)
    s = a + b
    z = s - a
    e = (a - (s - z)) - (z - b)
    return s, e


def _comp_eval_numpy(coeffs, omega):
    """Compensated evaluation of sum c_k (j*omega)**k, vectorized over omega."""
    re = np.zeros_like(omega)
    im = np.zeros_like(omega)
    er = np.zeros_like(omega)
    ei = np.zeros_like(omega)
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        p, e1 = _two_prod(-im, omega)
        rnew, e2 = _two_sum(p, c)
        q, e3 = _two_prod(re, omega)
        er, ei = -ei * omega + (e1 + e2), er * omega + e3
        re, im = rnew, q
    return (re + er) + 1j * (im + ei)


def _eval_ratio_numpy(num, den, omega):
    dmax = np.max(np.abs(den))
    if dmax == 0.0:
        return np.full(omega.shape, np.nan, dtype=np.complex128), \
            np.ones(omega.shape, dtype=np.uint8)
    vn = _comp_eval_numpy(num, omega)
    vd = _comp_eval_numpy(den, omega)
    # denominator counts as singular when it is zero relative to its own
    # coefficient scale at this |s|; compare in log space to avoid overflow
    thr = _SINGULAR_LOG10 + math.log10(dmax) + (len(den) - 1) * np.log10(omega)
    mag = np.abs(vd)
    status = np.zeros(omega.shape, dtype=np.uint8)
    zero = mag == 0.0
    with np.errstate(divide="ignore"):
        status[zero | (np.log10(np.where(zero, 1.0, mag)) < thr)] = 1
    with np.errstate(divide="ignore", invalid="ignore"):
        out = vn / vd
    out[status > 0] = np.nan
    return out, status


def _mna_numpy(na, nb, r, l, c, n_nodes, inject, observe, omega):
    """Batched complex nodal solve, Gaussian elimination with partial pivoting."""
    nf = omega.shape[0]
    n = n_nodes
    y_mat = np.zeros((nf, n, n), dtype=np.complex128)
    for e in range(na.shape[0]):
        y = 1.0 / (r[e] + 1j * (omega * l[e] - 1.0 / (omega * c[e])))
        a, b = na[e], nb[e]
        if a:
            y_mat[:, a - 1, a - 1] += y
        if b:
            y_mat[:, b - 1, b - 1] += y
        if a and b:
            y_mat[:, a - 1, b - 1] -= y
            y_mat[:, b - 1, a - 1] -= y
    rhs = np.zeros((nf, n), dtype=np.complex128)
    rhs[:, inject - 1] = 1.0
    status = np.zeros(nf, dtype=np.uint8)
    rows = np.arange(nf)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for k in range(n):
            piv = np.argmax(np.abs(y_mat[:, k:, k]), axis=1) + k
            bad = np.abs(y_mat[rows, piv, k]) < _PIVOT_FLOOR
            status[bad] = 1
            tmp = y_mat[rows, k, :].copy()
            y_mat[rows, k, :] = y_mat[rows, piv, :]
            y_mat[rows, piv, :] = tmp
            tmpr = rhs[rows, k].copy()
            rhs[rows, k] = rhs[rows, piv]
            rhs[rows, piv] = tmpr
            y_mat[bad, k, k] = 1.0  # keep arithmetic finite, result discarded
            fac = y_mat[:, k + 1:, k] / y_mat[:, k, k][:, None]
            y_mat[:, k + 1:, k:] -= fac[:, :, None] * y_mat[:, k, k:][:, None, :]
            rhs[:, k + 1:] -= fac * rhs[:, k][:, None]
        x = np.zeros_like(rhs)
        for k in range(n - 1, -1, -1):
            acc = (y_mat[:, k, k + 1:] * x[:, k + 1:]).sum(axis=1)
            x[:, k] = (rhs[:, k] - acc) / y_mat[:, k, k]
    out = x[:, observe - 1].copy()
    out[status > 0] = np.nan
    return out, status


_NUMPY_BACKEND = {
    "name": "numpy",
    "eval_ratio": _eval_ratio_numpy,
    "mna_solve": _mna_numpy,
}


# ---------------------------------------------------------------------------
# numba backend (compiled on first use)
# ---------------------------------------------------------------------------

_numba_cache = None


def _build_numba():
    global _numba_cache
    if _numba_cache is not None:
        return _numba_cache

    from numba import njit

    opts = {"cache": True, "nogil": True}

    @njit(**opts)
    def comp_eval(coeffs, w):
        re = 0.0
        im = 0.0
        er = 0.0
        ei = 0.0
        for k in range(coeffs.shape[0] - 1, -1, -1):
            a = -im
            p = a * w
            aa = _SPLIT * a
            ah = aa - (aa - a)
            al = a - ah
            bb = _SPLIT * w
            bh = bb - (bb - w)
            bl = w - bh
            e1 = ((ah * bh - p) + ah * bl + al * bh) + al * bl
            c = coeffs[k]
            rnew = p + c
            z = rnew - p
            e2 = (p - (rnew - z)) - (z - c)
            a = re
            q = a * w
            aa = _SPLIT * a
            ah = aa - (aa - a)
            al = a - ah
            e3 = ((ah * bh - q) + ah * bl + al * bh) + al * bl
            ernew = -ei * w + (e1 + e2)
            ei = er * w + e3
            er = ernew
            re = rnew
            im = q
        return complex(re + er, im + ei)

    @njit(**opts)
    def eval_ratio(num, den, omega):
        nf = omega.shape[0]
        out = np.empty(nf, dtype=np.complex128)
        status = np.zeros(nf, dtype=np.uint8)
        dmax = 0.0
        for k in range(den.shape[0]):
            if abs(den[k]) > dmax:
                dmax = abs(den[k])
        if dmax == 0.0:
            for i in range(nf):
                status[i] = 1
                out[i] = complex(np.nan, np.nan)
            return out, status
        c0 = _SINGULAR_LOG10 + math.log10(dmax)
        deg = den.shape[0] - 1
        for i in range(nf):
            w = omega[i]
            vn = comp_eval(num, w)
            vd = comp_eval(den, w)
            mag = abs(vd)
            if mag == 0.0 or math.log10(mag) < c0 + deg * math.log10(w):
                status[i] = 1
                out[i] = complex(np.nan, np.nan)
            else:
                out[i] = vn / vd
        return out, status

    @njit(**opts)
    def mna_solve(na, nb, r, l, c, n_nodes, inject, observe, omega):
        nf = omega.shape[0]
        n = n_nodes
        out = np.empty(nf, dtype=np.complex128)
        status = np.zeros(nf, dtype=np.uint8)
        y_mat = np.empty((n, n), dtype=np.complex128)
        rhs = np.empty(n, dtype=np.complex128)
        for i in range(nf):
            w = omega[i]
            for p in range(n):
                rhs[p] = 0.0
                for q in range(n):
                    y_mat[p, q] = 0.0
            for e in range(na.shape[0]):
                y = 1.0 / (r[e] + 1j * (w * l[e] - 1.0 / (w * c[e])))
                a = na[e]
                b = nb[e]
                if a > 0:
                    y_mat[a - 1, a - 1] += y
                if b > 0:
                    y_mat[b - 1, b - 1] += y
                if a > 0 and b > 0:
                    y_mat[a - 1, b - 1] -= y
                    y_mat[b - 1, a - 1] -= y
            rhs[inject - 1] = 1.0
            ok = True
            for k in range(n):
                piv = k
                best = abs(y_mat[k, k])
                for p in range(k + 1, n):
                    m = abs(y_mat[p, k])
                    if m > best:
                        best = m
                        piv = p
                if best < _PIVOT_FLOOR:
                    ok = False
                    break
                if piv != k:
                    for q in range(n):
                        t = y_mat[k, q]
                        y_mat[k, q] = y_mat[piv, q]
                        y_mat[piv, q] = t
                    t = rhs[k]
                    rhs[k] = rhs[piv]
                    rhs[piv] = t
                for p in range(k + 1, n):
                    fac = y_mat[p, k] / y_mat[k, k]
                    for q in range(k, n):
                        y_mat[p, q] -= fac * y_mat[k, q]
                    rhs[p] -= fac * rhs[k]
            if not ok:
                status[i] = 1
                out[i] = complex(np.nan, np.nan)
                continue
            for k in range(n - 1, -1, -1):
                acc = 0.0 + 0.0j
                for q in range(k + 1, n):
                    acc += y_mat[k, q] * rhs[q]
                rhs[k] = (rhs[k] - acc) / y_mat[k, k]
            out[i] = rhs[observe - 1]
        return out, status

    _numba_cache = {
        "name": "numba",
        "eval_ratio": eval_ratio,
        "mna_solve": mna_solve,
    }
    return _numba_cache


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

_active = None


def _backend():
    global _active
    if _active is None:
        if _numba_disabled():
            _active = _NUMPY_BACKEND
        else:
            try:
                _active = _build_numba()
            except ImportError:
                _active = _NUMPY_BACKEND
    return _active


def backend_name() -> str:
    return _backend()["name"]


def numpy_backend():
    return _NUMPY_BACKEND


def numba_backend():
    """Compile and return the numba backend (raises ImportError without numba)."""
    return _build_numba()


def eval_ratio(num, den, omega):
    """Evaluate num(s)/den(s) at s = j*omega. Returns (values, status)."""
    num = np.ascontiguousarray(num, dtype=np.float64)
    den = np.ascontiguousarray(den, dtype=np.float64)
    omega = np.ascontiguousarray(omega, dtype=np.float64)
    return _backend()["eval_ratio"](num, den, omega)


def mna_solve(na, nb, r, l, c, n_nodes, inject, observe, omega):
    """Port voltage for unit current injection, per frequency. Returns (values, status)."""
    na = np.ascontiguousarray(na, dtype=np.int64)
    nb = np.ascontiguousarray(nb, dtype=np.int64)
    r = np.ascontiguousarray(r, dtype=np.float64)
    l = np.ascontiguousarray(l, dtype=np.float64)
    c = np.ascontiguousarray(c, dtype=np.float64)
    omega = np.ascontiguousarray(omega, dtype=np.float64)
    return _backend()["mna_solve"](na, nb, r, l, c, int(n_nodes),
                                   int(inject), int(observe), omega)
