"""Real-coefficient polynomial and rational-function algebra in s.

Polynomials store ascending coefficients (coeffs[k] multiplies s**k).  The
zero polynomial is the single coefficient 0.0 and has undefined degree.
Rational functions are kept exactly as constructed: common factors are never
cancelled, only the sign of the denominator's leading coefficient is
normalized.  All types are immutable values and every operation is a pure
function, so concurrent use needs no locking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import EvaluationSingular, IdenticallyZeroDenominator, NoConvergence

_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


def _trim(coeffs):
    out = [float(c) for c in coeffs]
    while len(out) > 1 and out[-1] == 0.0:
        out.pop()
    if not out:
        out = [0.0]
    return tuple(out)


@dataclass(frozen=True)
class Polynomial:
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @property
    def is_zero(self) -> bool:
        return self.coeffs == (0.0,)

    @property
    def degree(self):
        """Degree, or None for the zero polynomial."""
        return None if self.is_zero else len(self.coeffs) - 1

    def __call__(self, s: complex) -> complex:
        v = 0j
        for c in reversed(self.coeffs):
            v = v * s + c
        return v

    def scaled(self, factor: float) -> "Polynomial":
        return Polynomial(tuple(c * factor for c in self.coeffs))


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.is_zero or b.is_zero:
        return Polynomial((0.0,))
    return Polynomial(tuple(np.convolve(a.coeffs, b.coeffs)))


def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    n = max(len(a.coeffs), len(b.coeffs))
    out = [0.0] * n
    for i, c in enumerate(a.coeffs):
        out[i] += c
    for i, c in enumerate(b.coeffs):
        out[i] += c
    return Polynomial(tuple(out))


@dataclass(frozen=True)
class RationalFunction:
    num: Polynomial
    den: Polynomial

    def __post_init__(self):
        if self.den.is_zero:
            raise IdenticallyZeroDenominator("denominator is the zero polynomial")
        if self.den.coeffs[-1] < 0:
            object.__setattr__(self, "num", self.num.scaled(-1.0))
            object.__setattr__(self, "den", self.den.scaled(-1.0))

    def __add__(self, other):
        return rf_add(self, other)

    def __mul__(self, other):
        return rf_mul(self, other)

    def __truediv__(self, other):
        return rf_div(self, other)


def rf_add(a: RationalFunction, b: RationalFunction) -> RationalFunction:
    num = poly_add(poly_mul(a.num, b.den), poly_mul(b.num, a.den))
    return RationalFunction(num, poly_mul(a.den, b.den))


def rf_mul(a: RationalFunction, b: RationalFunction) -> RationalFunction:
    return RationalFunction(poly_mul(a.num, b.num), poly_mul(a.den, b.den))


def rf_div(a: RationalFunction, b: RationalFunction) -> RationalFunction:
    if b.num.is_zero:
        raise IdenticallyZeroDenominator("division by the zero rational function")
    return RationalFunction(poly_mul(a.num, b.den), poly_mul(a.den, b.num))


def rf_parallel(a: RationalFunction, b: RationalFunction) -> RationalFunction:
    """Parallel combination a*b/(a+b), written over the common denominator."""
    den = poly_add(poly_mul(a.num, b.den), poly_mul(b.num, a.den))
    if den.is_zero:
        raise IdenticallyZeroDenominator("a + b is identically zero")
    return RationalFunction(poly_mul(a.num, b.num), den)


def rf_eval_grid(f: RationalFunction, freqs) -> np.ndarray:
    """Evaluate f at s = j*2*pi*freqs for an array of frequencies in Hz."""
    freqs = np.asarray(freqs, dtype=float)
    values, status = _kernels.eval_ratio(f.num.coeffs, f.den.coeffs,
                                         2.0 * math.pi * freqs)
    if status.any():
        raise EvaluationSingular(float(freqs[int(np.argmax(status))]))
    return values


def rf_eval(f: RationalFunction, freq_hz: float) -> complex:
    """Evaluate f at s = j*2*pi*freq_hz; both parts finite or EvaluationSingular."""
    if freq_hz <= 0:
        raise ValueError("frequency must be positive")
    return complex(rf_eval_grid(f, np.array([freq_hz]))[0])


@dataclass(frozen=True)
class RootSet:
    """Roots of a polynomial in the scaled variable s' = s/scale.

    residual[i] is |q(roots[i])| for the scaled polynomial q normalized to
    unit largest coefficient, so the quality bound is residual <= 1e-9.
    """

    roots: tuple
    residual: tuple
    scale: float

    def s_plane(self):
        """Roots mapped back to the unscaled s plane (rad/s)."""
        return tuple(r * self.scale for r in self.roots)


def _pair_conjugates(roots):
    """Force exact conjugate pairing of a real polynomial's root estimates."""
    roots = list(roots)
    used = [False] * len(roots)
    out = list(roots)
    pos = [i for i, r in enumerate(roots) if r.imag > 0]
    neg = [i for i, r in enumerate(roots) if r.imag < 0]
    for i in pos:
        best = None
        best_d = math.inf
        for j in neg:
            if used[j]:
                continue
            d = abs(roots[i] - roots[j].conjugate())
            if d < best_d:
                best_d = d
                best = j
        if best is None:
            continue
        scale = abs(roots[i]) + abs(roots[best])
        if best_d <= 1e-6 * scale:
            m = 0.5 * (roots[i] + roots[best].conjugate())
            out[i] = m
            out[best] = m.conjugate()
            used[best] = used[i] = True
    for i, r in enumerate(out):
        if not used[i] and r.imag != 0 and abs(r.imag) <= 1e-9 * max(1.0, abs(r)):
            out[i] = complex(r.real, 0.0)
    return out


def rf_roots(p: Polynomial, scale_hint: float, max_iter: int = 500) -> RootSet:
    """All roots of p via Aberth-Ehrlich simultaneous iteration.

    The polynomial is rewritten in s' = s/omega_c with omega_c =
    2*pi*scale_hint (scale_hint in Hz) to condition coefficients whose raw
    magnitudes span hundreds of decades.  Starting points sit on a circle of
    radius (|a0/an|)**(1/n) with golden-angle spacing; iteration stops when
    the largest per-root step falls below 1e-13 relative, or when every
    residual reaches the rounding floor (multiple roots stall the step
    criterion at ~eps**(1/m) while their residuals sit at eps already).
    Exact roots at the origin are deflated first, since the starting radius
    degenerates when a0 = 0.  Conjugate symmetry is enforced afterwards.
    """
    if p.is_zero or p.degree < 1:
        raise ValueError("need a nonzero polynomial of degree >= 1")
    if scale_hint <= 0:
        raise ValueError("scale_hint must be positive")
    omega_c = 2.0 * math.pi * scale_hint

    scaled = np.array(p.coeffs, dtype=float)
    scaled *= omega_c ** np.arange(len(scaled))
    scaled /= np.max(np.abs(scaled))

    n_zero = 0
    while scaled[n_zero] == 0.0:
        n_zero += 1
    work = scaled[n_zero:]
    n = len(work) - 1

    roots = [0.0j] * n_zero
    if n >= 1:
        radius = (abs(work[0]) / abs(work[-1])) ** (1.0 / n)
        z = radius * np.exp(1j * _GOLDEN_ANGLE * np.arange(n))
        deriv = work[1:] * np.arange(1, n + 1)
        converged = False
        step = math.inf
        it = 0
        for it in range(1, max_iter + 1):
            pv = np.zeros(n, dtype=complex)
            for c in work[::-1]:
                pv = pv * z + c
            resid = float(np.max(np.abs(pv)))
            dv = np.zeros(n, dtype=complex)
            for c in deriv[::-1]:
                dv = dv * z + c
            dv = np.where(dv == 0, 1e-300, dv)
            newton = pv / dv
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            recip = 1.0 / diff
            np.fill_diagonal(recip, 0.0)
            sums = recip.sum(axis=1)
            denom = 1.0 - newton * sums
            denom = np.where(denom == 0, 1.0, denom)
            w = newton / denom
            prev_step = step
            z = z - w
            step = float(np.max(np.abs(w) / (np.abs(z) + 1e-300)))
            if step < 1e-13:
                converged = True
                break
            if resid <= 1e-12 and step >= 0.25 * prev_step:
                # multiple roots: steps stall near eps**(1/m) while the
                # residuals already sit at the rounding floor
                converged = True
                break
        residual = [abs(Polynomial(tuple(work))(zz)) for zz in z]
        if not converged:
            raise NoConvergence(it, step, tuple(complex(v) for v in z),
                                tuple(residual))
        roots.extend(complex(v) for v in z)

    roots = _pair_conjugates(roots)
    poly_scaled = Polynomial(tuple(scaled))
    residuals = tuple(abs(poly_scaled(r)) for r in roots)
    return RootSet(tuple(roots), residuals, omega_c)
