"""Maps between recurrence data (c, d) and unit-circle data.

The pair (c, d) corresponds one to one with (α, τ_1): the Verblunsky
coefficients α_n of the measure μ and one unimodular number.  The rotations
τ_n come in two equivalent forms:

* product form: τ_0 = 1, τ_n = τ_{n-1} (1 - i c_n)/(1 + i c_n);
* Möbius form: τ_1 given, τ_{n+1} = (τ_n + conj α_{n-1})/(1 + τ_n α_{n-1}).

Both are computed and compared wherever both apply.  When the chain
sequence has multiple parameter sequences the measure ν ∝ |ζ - 1|^{-2} μ
exists and :func:`nu_data` returns its Verblunsky coefficients β_n and the
norms γ_n of the real-line orthogonality.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from . import fixtures
from .chain import Classification, classify, maximal_params
from .errors import (
    ConsistencyFailure,
    DegenerateTau,
    DegreeOutOfRange,
    ParameterOutOfDomain,
    RequiresMultipleParameter,
    TauCollision,
    UnsupportedExample,
)
from .recurrence import CoefficientData, ComplexPoly, coeffs_P, eval_P, eval_R, leading_coeff

UNIT_TOL = 1e-12
COLLISION_TOL = 1e-14
ALT_TOL = 1e-11
EPS = float(np.finfo(float).eps)


class TauConvention(str, enum.Enum):
    PRODUCT = "product"
    MOBIUS = "mobius"


@dataclass(frozen=True)
class VerblunskyData:
    """α_0..α_{N-1} with the rotations τ_1..τ_N.

    ``tau_convention`` records how ``tau`` was produced.
    ``tau_mismatch`` is the largest |τ_n(product) - τ_n(Möbius)| seen.
    """

    alpha: np.ndarray
    tau: np.ndarray
    tau_convention: TauConvention
    tau_mismatch: float = 0.0

    @property
    def tau1(self) -> complex:
        return complex(self.tau[0])


def _check_alpha(alpha):
    alpha = np.asarray(alpha, dtype=complex).reshape(-1)
    if np.any(~np.isfinite(alpha)) or np.any(np.abs(alpha) >= 1.0):
        raise ParameterOutOfDomain("Verblunsky coefficients must satisfy |α| < 1")
    return alpha


def _check_tau(tau):
    tau = complex(tau)
    if abs(abs(tau) - 1.0) > UNIT_TOL:
        raise ParameterOutOfDomain(f"|τ| = {abs(tau)!r} is not 1")
    if abs(1 + tau) <= COLLISION_TOL:
        raise ParameterOutOfDomain("τ = -1 is excluded")
    return tau / abs(tau)


def tau_product(c, N: int) -> np.ndarray:
    """τ_1..τ_N from τ_0 = 1, τ_n = τ_{n-1} (1 - i c_n)/(1 + i c_n)."""
    c = np.asarray(c, dtype=float)
    if len(c) < N:
        raise DegreeOutOfRange(f"need c_1..c_{N}")
    den = 1 + 1j * c[:N]
    if np.any(np.abs(den) < 1e-300):
        raise DegenerateTau("1 + i c_n underflowed")
    steps = np.conj(den) / den
    return np.cumprod(steps / np.abs(steps))


def tau_mobius(alpha, tau1: complex, N: int) -> np.ndarray:
    """τ_1..τ_N from τ_1 and τ_{n+1} = (τ_n + conj α_{n-1})/(1 + τ_n α_{n-1})."""
    alpha = _check_alpha(alpha)
    if len(alpha) < N - 1:
        raise DegreeOutOfRange(f"need α_0..α_{N - 2}")
    out = np.empty(N, dtype=complex)
    t = _check_tau(tau1)
    out[0] = t
    for n in range(1, N):
        a = alpha[n - 1]
        den = 1 + t * a
        if abs(den) <= COLLISION_TOL:
            raise TauCollision(f"1 + τ_{n} α_{n - 1} vanished")
        t = (t + a.conjugate()) / den
        t /= abs(t)
        out[n] = t
    return out


def mobius_condition(alpha, tau) -> float:
    """Bound on how far the Möbius recursion amplifies one rounding error.

    A perturbation of τ_n is multiplied by |dτ_{n+1}/dτ_n| =
    (1 - |α_{n-1}|^2)/|1 + τ_n α_{n-1}|^2 per step; the result is the
    largest accumulated sum of these products along τ_1..τ_N.
    """
    alpha = np.asarray(alpha, dtype=complex)
    tau = np.asarray(tau, dtype=complex)
    amp = worst = 1.0
    for n in range(1, len(tau)):
        a = alpha[n - 1]
        amp = amp * (1 - abs(a) ** 2) / abs(1 + tau[n - 1] * a) ** 2 + 1.0
        worst = max(worst, amp)
    return worst


def verblunsky_from_cd(cd: CoefficientData, N: int) -> VerblunskyData:
    """α_{n-1} = -(1/τ_n)(1 - 2ℓ_{n+1} - i c_{n+1})/(1 - i c_{n+1}) for n = 1..N.

    Needs c_1..c_{N+1} and ℓ_1..ℓ_{N+1}.  The product-form τ are returned;
    the Möbius form is recomputed from the result and the two must agree
    up to the error growth estimated by :func:`mobius_condition`.
    """
    if N < 1:
        raise DegreeOutOfRange("N must be at least 1")
    if len(cd.c) < N + 1 or len(cd.ell) < N + 1:
        raise DegreeOutOfRange(f"need c_1..c_{N + 1} and ℓ_1..ℓ_{N + 1}")
    tau = tau_product(cd.c, N)
    c = cd.c[1 : N + 1]
    ell = cd.ell[1 : N + 1]
    alpha = -(1 - 2 * ell - 1j * c) / ((1 - 1j * c) * tau)
    if np.any(np.abs(alpha) >= 1.0):
        raise ConsistencyFailure("a Verblunsky coefficient reached the unit circle")
    mob = tau_mobius(alpha, tau[0], N)
    mismatch = float(np.max(np.abs(mob - tau)))
    if mismatch > max(1e-12 * N, 64 * EPS * mobius_condition(alpha, tau)):
        raise ConsistencyFailure(f"product and Möbius forms of τ differ by {mismatch:.2e}")
    for a in (alpha, tau):
        a.setflags(write=False)
    return VerblunskyData(alpha, tau, TauConvention.PRODUCT, mismatch)


@dataclass(frozen=True)
class ReciprocalReport:
    """Largest disagreement between the alternative forms of c, ℓ and τ."""

    c_alt: float
    ell_alt: float
    identity: float


def _reciprocal(alpha, tau1, N):
    alpha = _check_alpha(alpha)
    if len(alpha) < N:
        raise DegreeOutOfRange(f"need α_0..α_{N - 1}")
    t = _check_tau(tau1)
    c = np.empty(N + 1)
    ell = np.zeros(N + 1)
    tau = np.empty(N + 1, dtype=complex)
    c[0] = (1j * (t - 1) / (t + 1)).real
    tau[0] = t
    c_alt = ell_alt = ident = 0.0
    for n in range(1, N + 1):
        a = alpha[n - 1]
        ta = t * a
        den = 1 + ta
        if abs(den) <= COLLISION_TOL:
            raise TauCollision(f"1 + τ_{n} α_{n - 1} vanished")
        re = 1 + ta.real
        c[n] = ta.imag / re
        ell[n] = 0.5 * abs(den) ** 2 / re
        t_next = (t + a.conjugate()) / den
        t_next /= abs(t_next)
        # the same c and ℓ through τ_{n+1}
        r = t_next / t
        c_alt = max(c_alt, abs(c[n] - (1j * (r - 1) / (r + 1)).real))
        ell_alt = max(ell_alt, abs(ell[n] - (den * (1 - 1j * c[n]) / 2).real), abs((den * (1 - 1j * c[n])).imag) / 2)
        ident = max(ident, abs((1 - t_next * a) * den - (1 - abs(a) ** 2)))
        t = t_next
        tau[n] = t
    return c, ell, tau, ReciprocalReport(c_alt, ell_alt, ident)


def cd_from_verblunsky(alpha, tau1: complex, N: int) -> CoefficientData:
    """Recurrence data c_1..c_{N+1}, d_2..d_{N+1} from α_0..α_{N-1} and τ_1.

    c_1 = i(τ_1 - 1)/(τ_1 + 1), c_{n+1} = Im(τ_n α_{n-1})/(1 + Re(τ_n α_{n-1})),
    ℓ_{n+1} = |1 + τ_n α_{n-1}|^2 / (2 (1 + Re(τ_n α_{n-1}))), d_{n+1} = (1 - ℓ_n) ℓ_{n+1}.
    The alternative expressions through τ_{n+1} must agree to 1e-11.
    """
    c, ell, _, rep = _reciprocal(alpha, tau1, N)
    worst = max(rep.c_alt, rep.ell_alt, rep.identity)
    if worst > ALT_TOL:
        raise ConsistencyFailure(f"alternative reciprocal forms differ by {worst:.2e}")
    if np.any(ell[1:] <= 0) or np.any(ell[1:] >= 1):
        raise ConsistencyFailure("a minimal parameter left (0, 1)")
    d = (1 - ell[:-1]) * ell[1:]
    return CoefficientData.from_arrays(c, d)


def reciprocal_report(alpha, tau1: complex, N: int) -> ReciprocalReport:
    """Alternative-form discrepancies of :func:`cd_from_verblunsky`, without raising."""
    return _reciprocal(alpha, tau1, N)[3]


@dataclass(frozen=True)
class NuData:
    """Verblunsky coefficients β_0..β_{N-1} of ν, maximal parameters M_1..M_N
    and norms γ_0..γ_N.

    ``gamma_residual`` is max |γ_{n+1} - γ_n + d_{n+1} γ_{n-1}| relative to γ_n.
    """

    beta: np.ndarray
    M: np.ndarray
    gamma: np.ndarray
    gamma_residual: float


def nu_data(cd: CoefficientData, N: int, **maximal_kw) -> NuData:
    """β_{n-1} = (1/τ_{n-1})(1 - 2M_n - i c_n)/(1 - i c_n), γ_n = (1 - M_n) γ_{n-1}.

    Requires the chain sequence to be classified as multiple parameter.
    Extra keywords go to :func:`r2opuc.chain.maximal_params`.
    """
    if N < 1:
        raise DegreeOutOfRange("N must be at least 1")
    if len(cd.c) < N or len(cd.d) < N:
        raise DegreeOutOfRange(f"need c_1..c_{N} and d_2..d_{N + 1}")
    chain = cd.chain
    probe = 4096 if chain.length is None else min(4096, chain.length - 1)
    if classify(chain, probe).classification is not Classification.MULTIPLE:
        raise RequiresMultipleParameter("ν exists only for multiple parameter chain sequences")
    M = np.asarray(maximal_params(chain, N + 1, **maximal_kw))
    tau = np.concatenate([[1 + 0j], tau_product(cd.c, N)])
    c = cd.c[:N]
    beta = (1 - 2 * M[:N] - 1j * c) / ((1 - 1j * c) * tau[:N])
    gamma = np.concatenate([[1.0], np.cumprod(1 - M[:N])])
    res = 0.0
    for n in range(1, N):
        r = gamma[n + 1] - gamma[n] + cd.d[n - 1] * gamma[n - 1]
        res = max(res, abs(r) / gamma[n])
    if res > 1e-11:
        raise ConsistencyFailure(f"γ recurrence violated by {res:.2e}")
    for a in (beta, gamma):
        a.setflags(write=False)
    return NuData(beta, M[:N].copy(), gamma, res)


def cd_from_nu(beta, N: int):
    """Inverse of :func:`nu_data`: (c_1..c_N, g_1..g_N) from β_0..β_{N-1}.

    c_n = -Im(τ_{n-1} β_{n-1})/(1 - Re(τ_{n-1} β_{n-1})),
    g_n = |1 - τ_{n-1} β_{n-1}|^2 / (2 (1 - Re(τ_{n-1} β_{n-1}))),
    τ_n = (τ_{n-1} - conj β_{n-1})/(1 - τ_{n-1} β_{n-1}), τ_0 = 1.
    """
    beta = _check_alpha(beta)
    if len(beta) < N:
        raise DegreeOutOfRange(f"need β_0..β_{N - 1}")
    c = np.empty(N)
    g = np.empty(N)
    t = 1 + 0j
    for n in range(1, N + 1):
        b = beta[n - 1]
        tb = t * b
        den = 1 - tb
        if abs(den) <= COLLISION_TOL:
            raise TauCollision(f"1 - τ_{n - 1} β_{n - 1} vanished")
        c[n - 1] = -tb.imag / (1 - tb.real)
        g[n - 1] = 0.5 * abs(den) ** 2 / (1 - tb.real)
        t = (t - b.conjugate()) / den
        t /= abs(t)
    return c, g


@dataclass(frozen=True)
class SFamily:
    """Member s of the family of recurrence data sharing the measure μ.

    ``c_s`` holds c_1..c_{N+1}, ``d_s`` d_2..d_{N+1}, ``ell_s`` ℓ_1..ℓ_{N+1}
    and ``tau`` τ_1..τ_{N+1}.
    """

    s: float
    I_value: complex
    c_s: np.ndarray
    d_s: np.ndarray
    ell_s: np.ndarray
    tau: np.ndarray

    def coefficient_data(self) -> CoefficientData:
        return CoefficientData.from_arrays(self.c_s, self.d_s)


def s_family(alpha, I_value: complex, s: float, N: int) -> SFamily:
    """Recurrence data of the s-family: τ_1(s) = (I + is)/(conj I - is).

    ``I_value`` is the principal value I(μ) = ⨍ ζ/(ζ - 1) dμ, whose real
    part is always 1/2.  c_1(s) = -2(s + Im I).
    """
    I_value = complex(I_value)
    if abs(I_value.real - 0.5) > 1e-12:
        raise ParameterOutOfDomain(f"Re I = {I_value.real!r}, must be 1/2")
    s = float(s)
    if not math.isfinite(s):
        raise ParameterOutOfDomain("s must be finite")
    tau1 = (I_value + 1j * s) / (I_value.conjugate() - 1j * s)
    c, ell, tau, rep = _reciprocal(alpha, tau1, N)
    if max(rep.c_alt, rep.ell_alt, rep.identity) > ALT_TOL:
        raise ConsistencyFailure("alternative reciprocal forms disagree")
    c1 = -2.0 * (s + I_value.imag)
    if abs(c[0] - c1) > 1e-12 * max(1.0, abs(c1)):
        raise ConsistencyFailure("c_1(s) disagrees with -2(s + Im I)")
    c[0] = c1
    d = (1 - ell[:-1]) * ell[1:]
    for a in (c, d, ell, tau):
        a.setflags(write=False)
    return SFamily(s, I_value, c, d, ell, tau)


def phi_coeffs_from_verblunsky(alpha, N: int) -> ComplexPoly:
    """Monic Φ_N from Φ_{n+1} = z Φ_n - conj(α_n) Φ_n^*, in coefficient form."""
    alpha = _check_alpha(alpha)
    if len(alpha) < N:
        raise DegreeOutOfRange(f"need α_0..α_{N - 1}")
    phi = np.ones(1, dtype=complex)
    for n in range(N):
        nxt = np.zeros(n + 2, dtype=complex)
        nxt[1:] = phi
        nxt[:-1] -= alpha[n].conjugate() * np.conj(phi[::-1])
        phi = nxt
    return ComplexPoly(phi)


def phi_from_verblunsky(alpha, N: int, z: complex) -> complex:
    """Φ_N(z) by the Szegő recurrence."""
    return complex(phi_coeffs_from_verblunsky(alpha, N)(complex(z)))


def para_orthogonal(alpha, tau_seq, n: int, z: complex, check: bool = True) -> complex:
    """z Φ_{n-1}(z) + τ_n Φ_{n-1}^*(z).

    With ``check`` the value is compared with R_n(z) of the recurrence data
    built from (α, τ_1): the two differ by the constant factor
    ((1 + τ_1)/2) Π_{k=1}^{n-1} (1 + Re(τ_k α_{k-1}))/(1 + τ_k α_{k-1}).
    """
    if n < 1:
        raise DegreeOutOfRange("n must be at least 1")
    alpha = _check_alpha(alpha)
    tau_seq = np.asarray(tau_seq, dtype=complex)
    if len(tau_seq) < n or len(alpha) < n - 1:
        raise DegreeOutOfRange(f"need τ_1..τ_{n} and α_0..α_{n - 2}")
    z = complex(z)
    phi = phi_coeffs_from_verblunsky(alpha, n - 1)
    val = z * phi(z) + tau_seq[n - 1] * phi.reversed(n - 1)(z)
    if check:
        if n == 1:
            c1 = (1j * (tau_seq[0] - 1) / (tau_seq[0] + 1)).real
            cd = CoefficientData.from_arrays([c1], [])
        else:
            cd = cd_from_verblunsky(alpha[: n - 1], tau_seq[0], n - 1)
        ta = tau_seq[: n - 1] * alpha[: n - 1]
        factor = (1 + tau_seq[0]) / 2 * np.prod((1 + ta.real) / (1 + ta))
        r = complex(eval_R(cd, n, z).value) * factor
        if abs(r - val) > 1e-10 * max(1.0, abs(val)):
            raise ConsistencyFailure(f"para-orthogonal polynomial not proportional to R_{n}")
    return complex(val)


# ---- real-line orthogonality checks ----------------------------------------


def _quad(f: Callable[[float], float], lo: float, hi: float) -> float:
    val, _ = integrate.quad(f, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=400)
    return val


@dataclass(frozen=True)
class PVReport:
    """Left and right sides of the principal-value orthogonality, k = 0..n-1."""

    n: int
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def max_error(self) -> float:
        return float(np.max(np.abs(self.lhs - self.rhs)))

    def passed(self, tol: float = 1e-6) -> bool:
        return self.max_error <= tol


def _trig_poly(q, m_total, t):
    """Σ_m q_m sin^m t cos^(m_total - m) t split into even-m and odd-m parts.

    This is Q(x)/(x^2+1)^(m_total/2) at x = tan t, evaluated without forming
    tan t.  Terms with m > m_total carry negative powers of cos t.
    """
    s, c = math.sin(t), math.cos(t)
    even = odd = 0.0
    for m, a in enumerate(q):
        if a == 0.0:
            continue
        v = a * s ** m * c ** (m_total - m) if m <= m_total else a * s ** m / c ** (m - m_total)
        if m % 2:
            odd += v
        else:
            even += v
    return even, odd


def pv_moment(cd: CoefficientData, n: int, k: int, density: Callable, masses=()) -> float:
    """⨍ x^k P_n(x)/(x^2+1)^(n-1) dψ(x) as the symmetric limit over [-Y, Y].

    Pairing x with -x cancels the odd x^(-1) tail exactly: with Q = x^k P_n
    split into even and odd parts E + O, the symmetric integrand is
    E (ψ(x) + ψ(-x)) + O (ψ(x) - ψ(-x)) over (x^2+1)^(n-1), which is
    integrable on [0, ∞).  It is mapped to [0, π/2) by x = tan t and the
    parts are evaluated as trigonometric polynomials.  ``density`` is dψ/dx;
    ``masses`` are (x, weight) pairs.
    """
    q = np.convolve(np.r_[np.zeros(k), 1.0], coeffs_P(cd, n))

    def g(t):
        x = math.tan(t)
        even, odd = _trig_poly(q, 2 * n - 2, t)
        a, b = float(density(x)), float(density(-x))
        return (even * (a + b) + odd * (a - b)) * (1.0 + x * x)

    total = _quad(g, 0.0, math.pi / 2)
    for x0, w in masses:
        total += w * x0 ** k * float(eval_P(cd, n, x0).value) / (x0 * x0 + 1.0) ** (n - 1)
    return total


def _pv_density(ex: fixtures.ExampleSpec):
    dens = lambda x: fixtures.example_density(ex, x, "psi").values  # noqa: E731
    masses = fixtures.example_density(ex, 0.0, "psi").masses
    mean = ex.kappa if ex.id is fixtures.ExampleId.EX2 else 0.0
    return dens, masses, mean


def pv_checks(example_id, s: float, n: int, kappa: float = 0.5) -> PVReport:
    """⨍ x^k P_n(s;x)/(x^2+1)^n (x^2+1) dψ(x) against -[c_1 - ⨍x dψ] 𝔭_n δ_{n-1,k}.

    ``example_id`` is 1, 2 or 3 (or the matching ``ExampleId``).  For Ex2
    ``kappa`` sets the mass at x = 1.
    """
    key = str(getattr(example_id, "value", example_id)).lower().lstrip("ex")
    if key == "1":
        ex = fixtures.ExampleSpec.ex1(s)
    elif key == "2":
        ex = fixtures.ExampleSpec.ex2(kappa, s)
    elif key == "3":
        ex = fixtures.ExampleSpec.ex3(s)
    else:
        raise UnsupportedExample("principal value checks are available for examples 1, 2 and 3")
    if not 1 <= n <= 12:
        raise DegreeOutOfRange("principal value checks need 1 <= n <= 12")
    cd = fixtures.example_sequences(ex, n)
    dens, masses, mean = _pv_density(ex)
    lhs = np.array([pv_moment(cd, n, k, dens, masses) for k in range(n)])
    rhs = np.zeros(n)
    rhs[n - 1] = -(cd.c[0] - mean) * leading_coeff(cd, n)
    return PVReport(n, lhs, rhs)


def phi_from_psi(psi_density: Callable) -> Callable:
    """Density of φ from that of ψ: dφ ∝ (x^2+1) dψ, normalised to mass 1.

    This is the pushforward of ν ∝ |ζ - 1|^{-2} μ, since |ζ - 1|^2 = 4/(x^2+1).
    """

    def g(t):
        x = math.tan(t)
        return float(psi_density(x)) * (1.0 + x * x) ** 2

    Z = _quad(g, -math.pi / 2, math.pi / 2)
    return lambda x: (x * x + 1.0) * psi_density(x) / Z


@dataclass(frozen=True)
class NuMomentReport:
    """∫ x^j P_n(x)/(x^2+1)^n dφ(x) for j = 0..n against γ_n δ_{n,j}."""

    n: int
    values: np.ndarray
    expected: np.ndarray

    @property
    def max_error(self) -> float:
        return float(np.max(np.abs(self.values - self.expected)))

    def passed(self, tol: float = 1e-6) -> bool:
        return self.max_error <= tol


def nu_moments(cd: CoefficientData, n: int, phi_density: Callable, gamma: Optional[float] = None) -> NuMomentReport:
    """Moments of P_n/(x^2+1)^n against φ by adaptive quadrature.

    ``gamma`` defaults to γ_n from :func:`nu_data`.
    """
    if gamma is None:
        gamma = float(nu_data(cd, max(n, 1)).gamma[n])
    p = coeffs_P(cd, n)
    vals = np.empty(n + 1)
    for j in range(n + 1):
        q = np.convolve(np.r_[np.zeros(j), 1.0], p)

        def g(t, q=q):
            x = math.tan(t)
            even, odd = _trig_poly(q, 2 * n, t)
            return (even + odd) * float(phi_density(x)) * (1.0 + x * x)

        vals[j] = _quad(g, -math.pi / 2, math.pi / 2)
    expected = np.zeros(n + 1)
    expected[n] = gamma
    return NuMomentReport(n, vals, expected)
