"""Closed-form example families used as ground truth.

Four families are available:

* ``Ex1(s)``: c_1 = -2s, c_n = 0 otherwise, d_2 = 1/2, d_{n+1} = 1/4.
  Lebesgue measure on the circle for every s.
* ``Ex2(κ, s)``: Lebesgue measure with mass κ moved to ζ = i; the
  recurrence data depend on s through lengthy rational expressions that
  repeat with period four.
* ``Ex3(s)``: the family with Verblunsky coefficients α_{n-1} = -1/(n+1);
  s = 0 gives c_n = 0, d_{n+1} = 1/4.
* ``Ex4(λ, η)``: hypergeometric family c_n = η/(λ+n); optionally moved
  along the s-family (λ > -1/2 only).

Everything returned here is computed from explicit formulas, never from
the recurrence engine, so the other modules can be tested against it.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special

from .chain import ChainSequence
from .errors import ParameterOutOfDomain, PoleInC, UnsupportedExample
from .recurrence import CoefficientData


class ExampleId(str, enum.Enum):
    EX1 = "ex1"
    EX2 = "ex2"
    EX3 = "ex3"
    EX4 = "ex4"


@dataclass(frozen=True)
class ExampleSpec:
    """One member of an example family.

    Use the ``ex1`` ... ``ex4`` constructors.  ``s`` is the shift along
    the s-family; for Ex4 ``None`` means the plain hypergeometric data.
    """

    id: ExampleId
    kappa: Optional[float] = None
    lam: Optional[float] = None
    eta: Optional[float] = None
    s: Optional[float] = 0.0

    def __post_init__(self):
        object.__setattr__(self, "id", ExampleId(self.id))
        if self.s is not None and not math.isfinite(self.s):
            raise ParameterOutOfDomain("s must be finite")
        if self.id is ExampleId.EX2:
            if self.kappa is None or not 0.0 < self.kappa < 1.0:
                raise ParameterOutOfDomain("Ex2 needs 0 < kappa < 1")
        if self.id is ExampleId.EX4:
            if self.lam is None or not self.lam > -1.0 or not math.isfinite(self.lam):
                raise ParameterOutOfDomain("Ex4 needs lambda > -1")
            if self.eta is None or not math.isfinite(self.eta):
                raise ParameterOutOfDomain("Ex4 needs a real eta")
            if self.s is not None and not self.lam > -0.5:
                raise ParameterOutOfDomain("the Ex4 s-family is only available for lambda > -1/2")

    @classmethod
    def ex1(cls, s: float = 0.0) -> "ExampleSpec":
        return cls(ExampleId.EX1, s=float(s))

    @classmethod
    def ex2(cls, kappa: float, s: float = 0.0) -> "ExampleSpec":
        return cls(ExampleId.EX2, kappa=float(kappa), s=float(s))

    @classmethod
    def ex3(cls, s: float = 0.0) -> "ExampleSpec":
        return cls(ExampleId.EX3, s=float(s))

    @classmethod
    def ex4(cls, lam: float, eta: float, s: Optional[float] = None) -> "ExampleSpec":
        return cls(ExampleId.EX4, lam=float(lam), eta=float(eta), s=None if s is None else float(s))

    @property
    def shift(self) -> float:
        return 0.0 if self.s is None else self.s

    @property
    def b(self) -> complex:
        """b = λ + iη (Ex4 only)."""
        return complex(self.lam, self.eta)

    def params(self) -> dict:
        out = {"id": self.id.value}
        for k in ("kappa", "lam", "eta", "s"):
            v = getattr(self, k)
            if v is not None:
                out[k] = v
        return out


def pochhammer(a: complex, n: int) -> complex:
    """(a)_n by direct product."""
    out = 1 + 0j
    for k in range(n):
        out *= a + k
    return out


def eval_2f1_poly(n: int, a2: complex, c: complex, w: complex) -> complex:
    """₂F₁(-n, a2; c; w) as the finite sum of n + 1 terms.

    Terms follow t_{k+1} = t_k (k - n)(a2 + k) w / ((c + k)(k + 1)).
    Raises PoleInC if c + k vanishes for some k < n.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    a2, c, w = complex(a2), complex(c), complex(w)
    term = 1 + 0j
    total = term
    for k in range(n):
        den = c + k
        if abs(den) <= 1e-14 * max(1.0, abs(c)):
            raise PoleInC(f"c = {c} is a non-positive integer within the first {n} terms")
        term *= (k - n) * (a2 + k) * w / (den * (k + 1))
        total += term
    return total


# ---- recurrence data -------------------------------------------------------


def _ex2_c(kappa, s, n):
    """c_n(s) for n >= 2 (Ex2)."""
    k = kappa
    m = (n - 2) // 4
    j = (n - 2) % 4 + 2
    A = lambda t: 1.0 + t * k  # noqa: E731  (1 + t κ)
    if j == 2:
        num = (1 - k) ** 2 * A(4 * m + 1) + 4 * s * k * (1 - k) - 4 * s * s * A(4 * m - 1)
        den = (1 - k) ** 2 * A(4 * m + 1) + 4 * s * s * A(4 * m - 1)
        return -k / A(4 * m) * num / den
    if j == 3:
        num = (1 - k) * A(4 * m + 1) + 2 * s * k
        den = (1 - k) ** 2 * A(4 * m + 1) + 4 * s * k * (1 - k) + 4 * s * s * A(4 * m + 1)
        return -4 * s * k / A(4 * m + 1) * num / den
    if j == 4:
        num = (1 - k) ** 2 * A(4 * m + 1) + 4 * s * k * (1 - k) - 4 * s * s * A(4 * m + 3)
        den = (1 - k) ** 2 * A(4 * m + 1) + 4 * s * s * A(4 * m + 3)
        return k / A(4 * m + 2) * num / den
    num = (1 - k) * k - 2 * s * A(4 * m + 3)
    den = (1 - k) ** 2 * A(4 * m + 3) - 4 * s * k * (1 - k) + 4 * s * s * A(4 * m + 3)
    return -2 * k * (1 - k) / A(4 * m + 3) * num / den


def _ex2_ell(kappa, s, n):
    """ℓ_n(s) for n >= 2 (Ex2)."""
    k = kappa
    m = (n - 2) // 4
    j = (n - 2) % 4 + 2
    A = lambda t: 1.0 + t * k  # noqa: E731
    if j == 2:
        num = (1 - k) ** 2 * A(4 * m + 1) ** 2 + 4 * s * k * (1 - k) * A(4 * m + 1) + 4 * s * s * (k * k + A(4 * m) ** 2)
        den = (1 - k) ** 2 * A(4 * m + 1) + 4 * s * s * A(4 * m - 1)
        return A(4 * m - 1) / (2 * A(4 * m) ** 2) * num / den
    if j == 3:
        num = (1 - k) ** 2 * A(4 * m + 1) ** 2 + 4 * s * k * (1 - k) * A(4 * m + 1) + 4 * s * s * (k * k + A(4 * m + 2) ** 2)
        den = (1 - k) ** 2 * A(4 * m + 1) + 4 * s * k * (1 - k) + 4 * s * s * A(4 * m + 1)
        return A(4 * m) / (2 * A(4 * m + 1) ** 2) * num / den
    if j == 4:
        num = (1 - k) ** 2 * (k * k + A(4 * m + 2) ** 2) - 4 * s * k * (1 - k) * A(4 * m + 3) + 4 * s * s * A(4 * m + 3) ** 2
        den = (1 - k) ** 2 * A(4 * m + 1) + 4 * s * s * A(4 * m + 3)
        return A(4 * m + 1) / (2 * A(4 * m + 2) ** 2) * num / den
    num = (1 - k) ** 2 * (k * k + A(4 * m + 4) ** 2) - 4 * s * k * (1 - k) * A(4 * m + 3) + 4 * s * s * A(4 * m + 3) ** 2
    den = (1 - k) ** 2 * A(4 * m + 3) - 4 * s * k * (1 - k) + 4 * s * s * A(4 * m + 3)
    return A(4 * m + 2) / (2 * A(4 * m + 3) ** 2) * num / den


def c_term(ex: ExampleSpec, n: int) -> float:
    """c_n for n >= 1 from the closed formulas (Ex4 with s excluded)."""
    if n < 1:
        raise ValueError("c_n is defined for n >= 1")
    s = ex.shift
    if ex.id is ExampleId.EX1:
        return -2.0 * s if n == 1 else 0.0
    if ex.id is ExampleId.EX2:
        return ex.kappa - 2.0 * s if n == 1 else _ex2_c(ex.kappa, s, n)
    if ex.id is ExampleId.EX3:
        # from c_{n+1} = Im(τ_n α_{n-1})/(1 + Re(τ_n α_{n-1})) with τ_n = (1 + in(n+1)s)/(1 - in(n+1)s)
        return -2.0 * n * s / (1.0 + (n * n - 1.0) * n * n * s * s)
    if ex.s is not None:
        raise UnsupportedExample("the Ex4 s-family has no closed form for c_n")
    return ex.eta / (ex.lam + n)


def ell_term(ex: ExampleSpec, n: int) -> float:
    """Minimal parameter ℓ_n for n >= 1 from the closed formulas."""
    if n < 1:
        raise ValueError("ℓ_n is defined for n >= 1")
    if n == 1:
        return 0.0
    s = ex.shift
    if ex.id is ExampleId.EX1:
        return 0.5
    if ex.id is ExampleId.EX2:
        return _ex2_ell(ex.kappa, s, n)
    if ex.id is ExampleId.EX3:
        m = n - 1
        return (
            m / (2.0 * (m + 1))
            * (1.0 + (m + 1.0) ** 2 * (m + 2.0) ** 2 * s * s)
            / (1.0 + m * (m + 1.0) ** 2 * (m + 2.0) * s * s)
        )
    if ex.s is not None:
        raise UnsupportedExample("the Ex4 s-family has no closed form for ℓ_n")
    return (n - 1) / (2.0 * (ex.lam + n))


def d_term(ex: ExampleSpec, n: int) -> float:
    """d_{n+1} for n >= 1."""
    if ex.id is ExampleId.EX4 and ex.s is None:
        lam = ex.lam
        return n * (2 * lam + n + 1) / (4.0 * (lam + n) * (lam + n + 1))
    return (1.0 - ell_term(ex, n)) * ell_term(ex, n + 1)


def chain_of(ex: ExampleSpec) -> ChainSequence:
    """The chain sequence d_2, d_3, ... as an unbounded rule."""
    if ex.id is ExampleId.EX1:
        return ChainSequence(term=lambda n: np.where(n == 1, 0.5, 0.25))
    if ex.id is ExampleId.EX3 and ex.shift == 0.0:
        return ChainSequence(term=lambda n: np.full(np.shape(n), 0.25))
    if ex.id is ExampleId.EX4 and ex.s is None:
        lam = ex.lam

        def term(n):
            n = np.asarray(n, dtype=float)
            return n * (2 * lam + n + 1) / (4.0 * (lam + n) * (lam + n + 1))

        return ChainSequence(term=term)
    if ex.id is ExampleId.EX4:
        raise UnsupportedExample("the Ex4 s-family has no unbounded chain rule")
    return ChainSequence(term=lambda n: np.array([d_term(ex, int(k)) for k in np.atleast_1d(n)]))


def example_I(ex: ExampleSpec) -> complex:
    """The principal value I(μ) = ⨍ ζ/(ζ - 1) dμ of the family's measure.

    Ex4 uses I = 1/2 - iη/(2(λ + 1)), the value for which the plain data
    sit at s = 0 (valid for λ > -1/2).
    """
    if ex.id in (ExampleId.EX1, ExampleId.EX3):
        return 0.5 + 0j
    if ex.id is ExampleId.EX2:
        return complex(0.5, -0.5 * ex.kappa)
    if not ex.lam > -0.5:
        raise UnsupportedExample("I(μ) for Ex4 is only provided for lambda > -1/2")
    return complex(0.5, -0.5 * ex.eta / (ex.lam + 1.0))


def example_sequences(ex: ExampleSpec, N: int) -> CoefficientData:
    """c_1..c_N and d_2..d_{N+1} of the example.

    The attached chain is unbounded where a closed rule exists, so maximal
    parameters and Wall's test can look beyond N.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if ex.id is ExampleId.EX4 and ex.s is not None:
        from .opuc import s_family

        fam = s_family(closed_form_alpha(ex, N + 1), example_I(ex), ex.s, N)
        return CoefficientData.from_arrays(fam.c_s[:N], fam.d_s[:N])
    c = [c_term(ex, n) for n in range(1, N + 1)]
    d = [d_term(ex, n) for n in range(1, N + 1)]
    return CoefficientData.from_arrays(c, d, chain=chain_of(ex))


# ---- closed forms ----------------------------------------------------------


def _plain(ex: ExampleSpec, what: str):
    if ex.id is ExampleId.EX2:
        raise UnsupportedExample(f"Ex2 has no closed form for {what}")
    if ex.shift != 0.0:
        raise UnsupportedExample(f"closed form of {what} only at s = 0")


def closed_form_P(ex: ExampleSpec, n: int, x: float) -> complex:
    """P_n(x) from the closed formulas (Ex1, Ex3, Ex4 at s = 0).

    The result is real for real x; it is returned as complex so that the
    rounding residue in the imaginary part stays visible.
    """
    _plain(ex, "P_n")
    if n < 0:
        raise ValueError("n must be non-negative")
    x = complex(x)
    a, b = (x - 1j) / 2, (x + 1j) / 2
    if ex.id is ExampleId.EX1:
        return 1 + 0j if n == 0 else a ** n + b ** n
    if ex.id is ExampleId.EX3:
        return 1j * a ** (n + 1) - 1j * b ** (n + 1)
    if n == 0:
        return 1 + 0j
    lam, bb = ex.lam, ex.b
    lead = pochhammer(2 * lam + 2, n) / pochhammer(lam + 1, n)
    return lead * a ** n * eval_2f1_poly(n, bb + 1, 2 * lam + 2, -2j / (x - 1j))


def closed_form_R(ex: ExampleSpec, n: int, z: complex) -> complex:
    """R_n(z) from the closed formulas (Ex1, Ex3, Ex4 at s = 0)."""
    _plain(ex, "R_n")
    z = complex(z)
    if ex.id is ExampleId.EX1:
        return 1 + 0j if n == 0 else z ** n + 1
    if ex.id is ExampleId.EX3:
        return sum(z ** k for k in range(n + 1))
    if n == 0:
        return 1 + 0j
    lam = ex.lam
    lead = pochhammer(2 * lam + 2, n) / pochhammer(lam + 1, n)
    return lead * eval_2f1_poly(n, ex.b + 1, 2 * lam + 2, 1 - z)


def closed_form_Phi(ex: ExampleSpec, n: int, z: complex) -> complex:
    """Monic Φ_n(z) of the family's measure (any s; not Ex2)."""
    if ex.id is ExampleId.EX2:
        raise UnsupportedExample("Ex2 has no closed form for Φ_n")
    z = complex(z)
    if ex.id is ExampleId.EX1:
        return z ** n
    if ex.id is ExampleId.EX3:
        # (n+1)(z^{n+2}-1) - (n+2)(z^{n+1}-1) over (n+1)(z-1)^2, expanded
        return sum((k + 1) * z ** k for k in range(n + 1)) / (n + 1)
    b = ex.b
    c = b + b.conjugate() + 3
    return pochhammer(c, n) / pochhammer(b + 2, n) * eval_2f1_poly(n, b + 2, c, 1 - z)


def closed_form_alpha(ex: ExampleSpec, N: int) -> np.ndarray:
    """Verblunsky coefficients α_0..α_{N-1} (not Ex2)."""
    if ex.id is ExampleId.EX2:
        raise UnsupportedExample("Ex2 has no closed form for the Verblunsky coefficients")
    n = np.arange(1, N + 1)
    if ex.id is ExampleId.EX1:
        return np.zeros(N, dtype=complex)
    if ex.id is ExampleId.EX3:
        return (-1.0 / (n + 1)).astype(complex)
    b = ex.b
    out = np.empty(N, dtype=complex)
    ratio = 1 + 0j
    for k in range(N):
        ratio *= (b + 1 + k) / (b.conjugate() + 2 + k)
        out[k] = -ratio
    return out


# ---- densities -------------------------------------------------------------


@dataclass(frozen=True)
class Density:
    """Absolutely continuous part (values at the requested points) plus point masses.

    ``masses`` holds (location, weight) pairs in the same variable as the
    density: angles for ``kind="circle"``, real x otherwise.
    """

    values: np.ndarray
    masses: tuple


def _ex4_circle_const(b: complex) -> float:
    # normaliser of e^{(π-θ) Im b} sin^{2 Re b}(θ/2):  2^{b+b̄} |Γ(b+1)|^2 / (2π Γ(b+b̄+1))
    lam = b.real
    lg = 2 * lam * math.log(2.0) + 2.0 * special.loggamma(b + 1).real
    lg -= math.log(2 * math.pi) + special.gammaln(2 * lam + 1)
    return math.exp(lg)


def example_density(ex: ExampleSpec, t, kind: str = "circle") -> Density:
    """Density of the example measure.

    ``kind="circle"``: μ as a density in θ on [0, 2π).
    ``kind="psi"``: the real-line measure ψ with dψ(x) = -dμ((x+i)/(x-i)).
    ``kind="phi"``: the real-line measure φ of the ν-orthogonality, which
    exists only when the chain sequence has multiple parameter sequences
    (Ex3 at s = 0 and Ex4 with λ > -1/2).
    """
    t = np.asarray(t, dtype=float)
    if kind not in ("circle", "psi", "phi"):
        raise ValueError("kind must be 'circle', 'psi' or 'phi'")
    if kind == "phi":
        if ex.id is ExampleId.EX3 and ex.shift == 0.0:
            return Density(1.0 / (math.pi * (t * t + 1.0)), ())
        if ex.id is ExampleId.EX4 and ex.lam > -0.5 and ex.shift == 0.0:
            b = ex.b
            const = 2.0 * _ex4_circle_const(b)
            arccot = np.arctan2(1.0, t)
            return Density(const * np.exp((math.pi - 2 * arccot) * ex.eta) * (t * t + 1.0) ** (-ex.lam - 1), ())
        raise UnsupportedExample("φ exists only for multiple parameter chain sequences at s = 0")
    if kind == "psi":
        theta = 2.0 * np.arctan2(1.0, t)
        circ = example_density(ex, theta, "circle")
        masses = tuple((math.cos(th / 2) / math.sin(th / 2), w) for th, w in circ.masses)
        return Density(circ.values * 2.0 / (t * t + 1.0), masses)
    if ex.id is ExampleId.EX1:
        return Density(np.full(t.shape, 1.0 / (2 * math.pi)), ())
    if ex.id is ExampleId.EX2:
        return Density(np.full(t.shape, (1.0 - ex.kappa) / (2 * math.pi)), ((math.pi / 2, ex.kappa),))
    if ex.id is ExampleId.EX3:
        return Density(np.sin(t / 2) ** 2 / math.pi, ())
    b = ex.b
    const = _ex4_circle_const(b + 1)
    return Density(const * np.exp((math.pi - t) * ex.eta) * (np.sin(t / 2) ** 2) ** (ex.lam + 1), ())


# ---- export ----------------------------------------------------------------


def export_table(ex: ExampleSpec, N: int) -> dict:
    """Sequences (and Verblunsky coefficients when known) as plain lists.

    ``d[0]`` is d_2 and ``ell[0]`` is ℓ_1.
    """
    cd = example_sequences(ex, N)
    out = {
        "example": ex.params(),
        "N": N,
        "c": [float(v) for v in cd.c],
        "d": [float(v) for v in cd.d],
        "ell": [float(v) for v in cd.ell],
    }
    if ex.id is not ExampleId.EX2:
        a = closed_form_alpha(ex, N)
        out["alpha_re"] = [float(v) for v in a.real]
        out["alpha_im"] = [float(v) for v in a.imag]
    return out


def export_json(ex: ExampleSpec, N: int, path=None) -> str:
    """JSON text of :func:`export_table`; also written to ``path`` if given."""
    text = json.dumps(export_table(ex, N), indent=2)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text
