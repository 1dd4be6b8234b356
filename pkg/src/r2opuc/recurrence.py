"""Evaluation of P_n and the rational/circle families built from it.

P_n obeys P_{k+1} = (x - c_{k+1}) P_k - d_{k+1} (x^2 + 1) P_{k-1} with
P_0 = 1, P_1 = x - c_1.  The factor x^2 + 1 makes |P_n| grow like |x|^{2n}
away from the zeros, so point values are returned as :class:`PolyValue`
(mantissa times a power of two).  Circle-side polynomials R_n, R̂_n, Φ_n are
available both pointwise and as coefficient arrays.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .chain import ChainSequence, as_chain, minimal_params
from .errors import (
    CoincidentPoints,
    DeflationResidual,
    DegreeOutOfRange,
    NotAChainSequence,
)

MAX_COEFF_DEGREE = 512


def _split(m, e):
    if m == 0:
        return (0.0 if isinstance(m, float) else 0j), 0
    if isinstance(m, complex):
        scale = max(abs(m.real), abs(m.imag))
        s = math.frexp(scale)[1]
        return complex(math.ldexp(m.real, -s), math.ldexp(m.imag, -s)), e + s
    f, s = math.frexp(m)
    return f, e + s


@dataclass(frozen=True)
class PolyValue:
    """The number ``mantissa * 2**exp2`` with a normalised mantissa.

    Real mantissas lie in [1/2, 1), complex ones have max(|re|, |im|) in
    [1/2, 1).  Zero is stored as (0, 0).
    """

    mantissa: complex
    exp2: int = 0

    @classmethod
    def make(cls, m, e=0) -> "PolyValue":
        if isinstance(m, (complex, np.complexfloating)):
            m = complex(m)
        else:
            m = float(m)
        if not (cmath.isfinite(m) if isinstance(m, complex) else math.isfinite(m)):
            raise OverflowError("non-finite mantissa")
        m, e = _split(m, int(e))
        return cls(m, e)

    @property
    def value(self):
        """Plain float/complex value (may be inf or 0 when out of range)."""
        m, e = self.mantissa, self.exp2
        try:
            if isinstance(m, complex):
                return complex(math.ldexp(m.real, e), math.ldexp(m.imag, e))
            return math.ldexp(m, e)
        except OverflowError:
            if isinstance(m, complex):
                return complex(math.copysign(math.inf, m.real) if m.real else 0.0,
                               math.copysign(math.inf, m.imag) if m.imag else 0.0)
            return math.copysign(math.inf, m)

    def log2_abs(self) -> float:
        if self.mantissa == 0:
            return -math.inf
        return math.log2(abs(self.mantissa)) + self.exp2

    def __mul__(self, other):
        if isinstance(other, PolyValue):
            return PolyValue.make(self.mantissa * other.mantissa, self.exp2 + other.exp2)
        return PolyValue.make(self.mantissa * other, self.exp2)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PolyValue):
            return PolyValue.make(self.mantissa / other.mantissa, self.exp2 - other.exp2)
        return PolyValue.make(self.mantissa / other, self.exp2)

    def __neg__(self):
        return PolyValue(-self.mantissa, self.exp2)

    def conjugate(self):
        return PolyValue(self.mantissa.conjugate(), self.exp2)

    def __float__(self):
        return float(self.value)

    def __complex__(self):
        return complex(self.value)


@dataclass(frozen=True)
class ComplexPoly:
    """Polynomial with complex coefficients in ascending degree."""

    coeffs: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if a.size == 0:
            a = np.zeros(1, dtype=complex)
        a.setflags(write=False)
        object.__setattr__(self, "coeffs", a)

    @property
    def degree(self) -> int:
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else 0

    @property
    def leading(self) -> complex:
        return complex(self.coeffs[self.degree])

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for a in self.coeffs[::-1]:
            out = out * z + a
        return out if out.ndim else complex(out)

    def reversed(self, n: Optional[int] = None) -> "ComplexPoly":
        """The reversed polynomial z^n conj(p(1/conj z)) with n = degree by default."""
        n = self.degree if n is None else n
        a = np.zeros(n + 1, dtype=complex)
        a[: self.degree + 1] = self.coeffs[: self.degree + 1]
        return ComplexPoly(np.conj(a[::-1]))


@dataclass(frozen=True)
class CoefficientData:
    """Recurrence data c_1..c_N and chain sequence d_2, d_3, ...

    ``ell`` holds the minimal parameters ℓ_1..ℓ_{len(d)+1}.  ``N`` is the
    largest degree for which P_N is defined.  ``chain`` may be an unbounded
    sequence; it is what :func:`r2opuc.chain.maximal_params` consumes.
    """

    c: np.ndarray
    d: np.ndarray
    ell: np.ndarray
    chain: ChainSequence = field(repr=False)

    @property
    def N(self) -> int:
        return min(len(self.c), len(self.d) + 1)

    @classmethod
    def from_arrays(cls, c, d, chain=None) -> "CoefficientData":
        c = np.array(c, dtype=float).reshape(-1)
        d = np.array(d, dtype=float).reshape(-1)
        if c.size == 0:
            raise DegreeOutOfRange("need at least c_1")
        if not np.all(np.isfinite(c)) or not np.all(np.isfinite(d)):
            raise NotAChainSequence("coefficients must be finite")
        if np.any(d <= 0):
            raise NotAChainSequence("chain sequence entries must be positive")
        ell = np.array(minimal_params(d, d.size + 1).ell)
        for a in (c, d, ell):
            a.setflags(write=False)
        return cls(c, d, ell, as_chain(d) if chain is None else as_chain(chain))

    @classmethod
    def from_ell(cls, c, ell) -> "CoefficientData":
        """Build from c_1.. and minimal parameters ℓ_1 = 0, ℓ_2, ..."""
        ell = np.asarray(ell, dtype=float)
        d = (1.0 - ell[:-1]) * ell[1:]
        return cls.from_arrays(c, d)

    def _need(self, n, what="P"):
        if n < 0 or n > self.N:
            raise DegreeOutOfRange(f"{what}_{n} needs degree <= {self.N}")

    def _need_ell(self, k):
        if k < 1 or k > len(self.ell):
            raise DegreeOutOfRange(f"ell_{k} not available (have {len(self.ell)})")


def eval_P(cd: CoefficientData, n: int, x: float, derivative: bool = False):
    """P_n(x) as a PolyValue; with ``derivative`` also returns P_n'(x)."""
    cd._need(n)
    p, _, dp, _, e = kernels.p_eval(cd.c, cd.d, n, float(x))
    val = PolyValue.make(p, e)
    if derivative:
        return val, PolyValue.make(dp, e)
    return val


def eval_P_pair(cd: CoefficientData, n: int, x: float):
    """(P_n, P_{n-1}, P_n', P_{n-1}', e) sharing one exponent; n >= 1."""
    cd._need(n)
    return kernels.p_eval(cd.c, cd.d, n, float(x))


def coeffs_P(cd: CoefficientData, n: int) -> np.ndarray:
    """Dense real coefficients of P_n, ascending (for n <= 512)."""
    cd._need(n)
    if n > MAX_COEFF_DEGREE:
        raise DegreeOutOfRange(f"coefficient form limited to degree {MAX_COEFF_DEGREE}")
    prev = np.array([1.0])
    if n == 0:
        return prev
    cur = np.array([-cd.c[0], 1.0])
    q = np.array([1.0, 0.0, 1.0])
    for k in range(1, n):
        nxt = np.zeros(k + 2)
        nxt[1:] += cur
        nxt[:-1] -= cd.c[k] * cur
        nxt[: k + 2] -= cd.d[k - 1] * np.convolve(q, prev)
        prev, cur = cur, nxt
    return cur


def leading_coeff(cd: CoefficientData, n: int) -> float:
    """Leading coefficient of P_n, the product of (1 - ℓ_j) for j = 1..n.

    The minimal parameters are regenerated from d in extended precision:
    the forward map amplifies rounding wherever 1 - ℓ_j is small.
    """
    cd._need(n)
    if n > len(cd.ell):
        raise DegreeOutOfRange(f"ell_{n} not available")
    one = np.longdouble(1)
    ell = np.longdouble(0)
    prod = one
    for k in range(n):
        if k:
            ell = np.longdouble(cd.d[k - 1]) / (one - ell)
        prod *= one - ell
    return float(prod)


def wronskian_G(cd: CoefficientData, n: int, x: float) -> PolyValue:
    """P_n' P_{n-1} - P_{n-1}' P_n at x (positive for real x)."""
    if n < 1:
        raise DegreeOutOfRange("the Wronskian needs n >= 1")
    p, pp, dp, dpp, e = eval_P_pair(cd, n, x)
    return PolyValue.make(dp * pp - dpp * p, 2 * e)


def wronskian_at_zeros(cd: CoefficientData, n: int, zeros) -> list:
    """The Wronskian at every zero of P_n, as PolyValues.

    At a zero x_r the Wronskian is P_n'(x_r) P_{n-1}(x_r).  Both factors
    are formed without running the recurrence forward through x_r, which
    is unstable there once the eigenvector is localised:

    * P_n'(x_r) = (leading coefficient) * prod_{s != r} (x_r - x_s),
    * P_{n-1}(x_r) from a two-sided ratio sweep anchored at P_n(x_r) = 0.

    ``zeros`` must be the complete set of zeros, decreasing.
    """
    if n < 1:
        raise DegreeOutOfRange("the Wronskian needs n >= 1")
    cd._need(n)
    x = np.asarray(zeros, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"need all {n} zeros of P_{n}")
    lead = math.log2(leading_coeff(cd, n))
    out = []
    for r in range(n):
        diffs = x[r] - np.delete(x, r)
        lg = lead + float(np.sum(np.log2(np.abs(diffs))))
        sign = -1.0 if np.count_nonzero(diffs < 0) % 2 else 1.0
        ie = math.floor(lg)
        m, e = kernels.prev_at_zero(cd.c, cd.d, n, float(x[r]))
        out.append(PolyValue.make(sign * 2.0 ** (lg - ie) * m, ie + e))
    return out


def wronskian_G_recursive(cd: CoefficientData, n: int, x: float) -> float:
    """Same Wronskian from G_{k+1} = P_k (P_k - 2 d_{k+1} x P_{k-1}) + d_{k+1}(x^2+1) G_k.

    Plain floating point; used as an independent check for moderate n.
    """
    if n < 1:
        raise DegreeOutOfRange("the Wronskian needs n >= 1")
    cd._need(n)
    x = float(x)
    q = x * x + 1.0
    p_prev, p = 1.0, x - cd.c[0]
    g = 1.0
    for k in range(1, n):
        dk = cd.d[k - 1]
        g = p * (p - 2.0 * dk * x * p_prev) + dk * q * g
        p_prev, p = p, (x - cd.c[k]) * p - dk * q * p_prev
    return g


def kernel_G(cd: CoefficientData, n: int, x: float, y: float) -> float:
    """(P_n(x) P_{n-1}(y) - P_{n-1}(x) P_n(y)) / (x - y)."""
    if n < 1:
        raise DegreeOutOfRange("kernel needs n >= 1")
    x, y = float(x), float(y)
    if abs(x - y) <= 1e-13 * max(abs(x), abs(y), 1.0):
        raise CoincidentPoints("x and y coincide; use wronskian_G")
    px, ppx, _, _, ex = eval_P_pair(cd, n, x)
    py, ppy, _, _, ey = eval_P_pair(cd, n, y)
    return math.ldexp((px * ppy - ppx * py) / (x - y), ex + ey)


def _log2_sqrt_dprod(cd, n):
    # log2 of prod_{j=1..n} sqrt(d_{j+1})
    if n > len(cd.d):
        raise DegreeOutOfRange(f"d_{n + 1} not available")
    return 0.5 * float(np.sum(np.log2(cd.d[:n])))


def _scaled_over_xmi(m, e, x, n, extra_log2):
    """m 2^e / (x - i)^n * 2^(-extra_log2) as a complex PolyValue."""
    r = math.hypot(x, 1.0)
    phi = math.atan2(-1.0, x)
    lg = e - n * math.log2(r) - extra_log2
    ie = math.floor(lg)
    return PolyValue.make(complex(m) * cmath.exp(-1j * n * phi) * 2.0 ** (lg - ie), ie)


def eval_u(cd: CoefficientData, n: int, x: float) -> PolyValue:
    """u_n(x) = (-1)^n P_n(x) / ((x - i)^n prod sqrt(d_{j+1})), u_0 = 1."""
    cd._need(n)
    if n == 0:
        return PolyValue.make(1 + 0j)
    p, _, _, _, e = eval_P_pair(cd, n, x)
    sign = -1.0 if n % 2 else 1.0
    return _scaled_over_xmi(sign * p, e, float(x), n, _log2_sqrt_dprod(cd, n))


def eval_u_hat(cd: CoefficientData, k: int, x: float, form: str = "combination") -> complex:
    """û_k(x) = sqrt(ℓ_{k+1}) u_k(x) + sqrt(1 - ℓ_k) u_{k-1}(x), k >= 1.

    ``form="closed"`` uses the equivalent single expression with
    P_k - (1 - ℓ_k)(x - i) P_{k-1}, which avoids the cancellation between
    the two terms for large |x|.
    """
    if k < 1:
        raise DegreeOutOfRange("u_hat needs k >= 1")
    cd._need(k)
    cd._need_ell(k + 1)
    lk, lk1 = cd.ell[k - 1], cd.ell[k]
    if form == "combination":
        return complex(
            math.sqrt(lk1) * eval_u(cd, k, x).value
            + math.sqrt(1.0 - lk) * eval_u(cd, k - 1, x).value
        )
    if form != "closed":
        raise ValueError("form must be 'combination' or 'closed'")
    x = float(x)
    p, pp, _, _, e = eval_P_pair(cd, k, x)
    inner = p - (1.0 - lk) * (x - 1j) * pp
    sign = -1.0 if k % 2 else 1.0
    lg = _log2_sqrt_dprod(cd, k) - 0.5 * math.log2(lk1)
    return complex(_scaled_over_xmi(sign * inner, e, x, k, lg).value)


def _c_factor(c):
    return 1.0 + 1j * c


def _R_normalised_pair(cd, n, z):
    """(R̃_n, R̃_{n-1}, log2 scale) where R̃_k = R_k / prod_{j<=k}(1 + i c_j)."""
    z = complex(z)
    prev, cur = 0j, 1 + 0j
    e = 0
    for k in range(n):
        a = _c_factor(cd.c[k])
        nxt = (z + a.conjugate() / a) * cur
        if k >= 1:
            nxt -= 4.0 * cd.d[k - 1] * z / (a * _c_factor(cd.c[k - 1])) * prev
        prev, cur = cur, nxt
        m = max(abs(prev), abs(cur))
        if m > 2.0 ** 256 or (0 < m < 2.0 ** -256):
            s = math.frexp(m)[1]
            prev, cur = prev * 2.0 ** -s, cur * 2.0 ** -s
            e += s
    return cur, prev, e


def _c_product(cd, n):
    # prod_{j<=n}(1 + i c_j) as (unit phase, log2 modulus)
    c = cd.c[:n]
    return complex(np.prod((1 + 1j * c) / np.abs(1 + 1j * c))), float(np.sum(np.log2(np.hypot(1.0, c))))


def eval_R(cd: CoefficientData, n: int, z: complex) -> PolyValue:
    """R_n(z) from R_{k+1} = [(1 + i c_{k+1}) z + (1 - i c_{k+1})] R_k - 4 d_{k+1} z R_{k-1}."""
    cd._need(n, "R")
    cur, _, e = _R_normalised_pair(cd, n, z)
    phase, lg = _c_product(cd, n)
    ie = math.floor(lg)
    return PolyValue.make(cur * phase * 2.0 ** (lg - ie), e + ie)


def eval_R_hat(cd: CoefficientData, k: int, z: complex) -> complex:
    """R̂_k(z) = R_k(z) - 2 (1 - ℓ_k) R_{k-1}(z), k >= 1."""
    if k < 1:
        raise DegreeOutOfRange("R_hat needs k >= 1")
    cd._need(k, "R")
    cur, prev, e = _R_normalised_pair(cd, k, z)
    a = _c_factor(cd.c[k - 1])
    val = cur - 2.0 * (1.0 - cd.ell[k - 1]) * prev / a
    phase, lg = _c_product(cd, k)
    return complex(val * phase) * 2.0 ** (lg + e)


def _coeffs_R_normalised(cd, n):
    prev = np.zeros(1, dtype=complex)
    cur = np.ones(1, dtype=complex)
    for k in range(n):
        a = _c_factor(cd.c[k])
        nxt = np.zeros(k + 2, dtype=complex)
        nxt[1:] += cur
        nxt[:-1] += (a.conjugate() / a) * cur
        if k >= 1:
            nxt[1:k + 1] -= 4.0 * cd.d[k - 1] / (a * _c_factor(cd.c[k - 1])) * prev
        prev, cur = cur, nxt
    return cur, prev


def coeffs_R(cd: CoefficientData, n: int) -> ComplexPoly:
    """Coefficient form of R_n (degree <= 512)."""
    cd._need(n, "R")
    if n > MAX_COEFF_DEGREE:
        raise DegreeOutOfRange(f"coefficient form limited to degree {MAX_COEFF_DEGREE}")
    cur, _ = _coeffs_R_normalised(cd, n)
    return ComplexPoly(cur * np.prod(1 + 1j * cd.c[:n]))


def _coeffs_R_hat_normalised(cd, k):
    cur, prev = _coeffs_R_normalised(cd, k)
    out = cur.copy()
    out[:-1] -= 2.0 * (1.0 - cd.ell[k - 1]) / _c_factor(cd.c[k - 1]) * prev
    return out


def coeffs_R_hat(cd: CoefficientData, k: int) -> ComplexPoly:
    """Coefficient form of R̂_k (degree <= 512)."""
    if k < 1:
        raise DegreeOutOfRange("R_hat needs k >= 1")
    cd._need(k, "R")
    if k > MAX_COEFF_DEGREE:
        raise DegreeOutOfRange(f"coefficient form limited to degree {MAX_COEFF_DEGREE}")
    return ComplexPoly(_coeffs_R_hat_normalised(cd, k) * np.prod(1 + 1j * cd.c[:k]))


def _deflate_at_one(a):
    """Synthetic division of ascending coefficients ``a`` by (z - 1)."""
    m = len(a) - 1
    q = np.zeros(m, dtype=complex)
    acc = 0j
    for j in range(m, 0, -1):
        acc = a[j] + acc
        q[j - 1] = acc
    rem = a[0] + acc
    return q, rem


def coeffs_Phi(cd: CoefficientData, n: int) -> ComplexPoly:
    """Monic Φ_n = R̂_{n+1} / ((z - 1) prod_{j<=n+1}(1 + i c_j)) by exact deflation."""
    if n < 0:
        raise DegreeOutOfRange("Phi needs n >= 0")
    cd._need(n + 1, "R")
    cd._need_ell(n + 1)
    if n + 1 > MAX_COEFF_DEGREE:
        raise DegreeOutOfRange(f"coefficient form limited to degree {MAX_COEFF_DEGREE}")
    a = _coeffs_R_hat_normalised(cd, n + 1)
    q, rem = _deflate_at_one(a)
    if abs(rem) > 1e-10 * np.linalg.norm(a):
        raise DeflationResidual(f"R_hat_{n + 1}(1) = {rem!r} is not zero")
    return ComplexPoly(q)


def eval_Phi(cd: CoefficientData, n: int, z: complex, method: str = "deflation") -> complex:
    """Φ_n(z); ``method="pointwise"`` divides R̂_{n+1}(z) by (z - 1) directly.

    The pointwise route falls back to deflation within 1e-8 of z = 1.
    """
    if method == "pointwise" and abs(complex(z) - 1) > 1e-8:
        cd._need(n + 1, "R")
        cd._need_ell(n + 1)
        k = n + 1
        cur, prev, e = _R_normalised_pair(cd, k, z)
        val = cur - 2.0 * (1.0 - cd.ell[k - 1]) * prev / _c_factor(cd.c[k - 1])
        return complex(val / (complex(z) - 1.0)) * 2.0 ** e
    if method not in ("deflation", "pointwise"):
        raise ValueError("method must be 'deflation' or 'pointwise'")
    return coeffs_Phi(cd, n)(z)


def zeta_of_x(x):
    """Cayley map x -> (x + i)/(x - i), renormalised onto the unit circle."""
    x = np.asarray(x, dtype=float)
    z = (x + 1j) / (x - 1j)
    return z / np.abs(z)


def x_of_zeta(z):
    """Inverse map i (z + 1)/(z - 1)."""
    z = np.asarray(z, dtype=complex)
    return (1j * (z + 1) / (z - 1)).real
