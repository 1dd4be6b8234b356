"""The tridiagonal pencil (A_n, B_n) whose eigenvalues are the zeros of P_n.

A_n is Hermitian with diagonal c_k and off-diagonal +i sqrt(d_{k+1}) above,
-i sqrt(d_{k+1}) below.  B_n is real symmetric positive definite with unit
diagonal and off-diagonal sqrt(d_{k+1}); it factors as L L^T with a lower
bidiagonal L built from the minimal parameters.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from . import kernels
from .errors import (
    BracketFailure,
    ConvergenceFailure,
    DegreeOutOfRange,
    DimensionTooSmall,
    NotPositiveDefinite,
    SimplicityWarning,
)
from .recurrence import CoefficientData


class SignCondition(str, enum.Enum):
    ALL_POSITIVE = "AllPositive"
    ALL_NEGATIVE = "AllNegative"
    NO_CONCLUSION = "NoConclusion"


@dataclass(frozen=True)
class Pencil:
    n: int
    a_diag: np.ndarray
    a_off: np.ndarray
    b_diag: np.ndarray
    b_off: np.ndarray
    ell: np.ndarray
    d: np.ndarray

    def dense_A(self) -> np.ndarray:
        A = np.diag(self.a_diag.astype(complex))
        A += np.diag(1j * self.a_off, 1) + np.diag(-1j * self.a_off, -1)
        return A

    def dense_B(self) -> np.ndarray:
        return np.diag(self.b_diag) + np.diag(self.b_off, 1) + np.diag(self.b_off, -1)


def build_pencil(cd: CoefficientData, n: int) -> Pencil:
    """Pencil of size n for the data ``cd``."""
    if n < 2:
        raise DimensionTooSmall("pencil needs n >= 2")
    if n > cd.N:
        raise DegreeOutOfRange(f"data supports n <= {cd.N}")
    off = np.sqrt(cd.d[: n - 1])
    return Pencil(
        n=n,
        a_diag=np.array(cd.c[:n]),
        a_off=off,
        b_diag=np.ones(n),
        b_off=off.copy(),
        ell=np.array(cd.ell[:n]),
        d=np.array(cd.d[: n - 1]),
    )


@dataclass(frozen=True)
class RealPencil:
    """Real symmetric 2n x 2n embedding of a Hermitian pencil.

    A complex vector v = p + i q is stored as [p; q].  Each eigenvalue of the
    complex pencil appears twice, with eigenvectors (p, q) and (-q, p).
    """

    A: np.ndarray
    B: np.ndarray
    n: int

    def eigenvalues(self) -> np.ndarray:
        w = linalg.eigh(self.A, self.B, eigvals_only=True)
        return np.sort(w[::2])[::-1]

    def to_complex(self, v: np.ndarray) -> np.ndarray:
        return v[: self.n] + 1j * v[self.n:]

    def from_complex(self, v: np.ndarray) -> np.ndarray:
        return np.concatenate([v.real, v.imag])


def realify(p: Pencil) -> RealPencil:
    """Real symmetric embedding [[Re A, -Im A], [Im A, Re A]], B block-diagonal."""
    A = p.dense_A()
    B = p.dense_B()
    Z = np.zeros_like(B)
    RA = np.block([[A.real, -A.imag], [A.imag, A.real]])
    RB = np.block([[B, Z], [Z, B]])
    return RealPencil(RA, RB, p.n)


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower bidiagonal L with B = L L^T."""

    diag: np.ndarray
    sub: np.ndarray

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.sub, -1)


def cholesky(p: Pencil, ell=None) -> CholeskyFactor:
    """Factor B_n from the minimal parameters: diag sqrt(1 - ℓ_k), sub sqrt(ℓ_{k+1})."""
    ell = p.ell if ell is None else np.asarray(getattr(ell, "ell", ell), dtype=float)[: p.n]
    if len(ell) < p.n:
        raise DegreeOutOfRange("not enough minimal parameters for this pencil")
    one_minus = 1.0 - ell
    if np.any(one_minus <= 0) or np.any(ell[1:] <= 0):
        raise NotPositiveDefinite("minimal parameters outside (0, 1)")
    return CholeskyFactor(np.sqrt(one_minus), np.sqrt(ell[1:]))


@dataclass(frozen=True)
class SpectralData:
    """Eigen-decomposition of a pencil.

    ``x`` is strictly decreasing.  Column r of ``vectors`` is the eigenvector
    for x[r] scaled to first entry 1 (when that entry is representable),
    which is (u_0, ..., u_{n-1}) at x[r] up to a diagonal unitary gauge.
    ``eig_weights[r]`` is 1 / (v^H B v) for that scaling.
    """

    x: np.ndarray
    vectors: Optional[np.ndarray]
    residual: float
    eig_weights: Optional[np.ndarray] = None


def _initial_eigenvalues(p: Pencil, L: np.ndarray) -> np.ndarray:
    A = p.dense_A()
    try:
        T = linalg.solve_triangular(L, A, lower=True)
        C = linalg.solve_triangular(L, T.conj().T, lower=True).conj().T
        C = 0.5 * (C + C.conj().T)
        w = linalg.eigh(C, eigvals_only=True)
    except (linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceFailure(f"eigensolver failed: {exc}") from exc
    return np.sort(w)[::-1]


def solve(p: Pencil, vectors: bool = True) -> SpectralData:
    """All eigenvalues (and eigenvectors) of A u = x B u.

    The pencil is reduced by the bidiagonal factor L to the Hermitian matrix
    C = L^{-1} A L^{-T} and handed to LAPACK's Hermitian eigensolver.  Each
    eigenvalue is then polished by Rayleigh-quotient iteration on the
    tridiagonal pencil in extended precision, using twisted factorisations
    so that tiny eigenvector entries come out with full relative accuracy.
    """
    n = p.n
    L = cholesky(p).dense()
    guess = _initial_eigenvalues(p, L)
    spread = max(guess[0] - guess[-1], 1.0)
    if np.min(-np.diff(guess)) <= 1e-12 * spread:
        warnings.warn(
            f"eigenvalues closer than {1e-12 * spread:.2e}; the data may be invalid",
            SimplicityWarning,
            stacklevel=2,
        )
    x = np.empty(n)
    logw = np.empty(n)
    Z = np.empty((n, n), dtype=complex)
    for r, g in enumerate(guess):
        x[r], logw[r], Z[:, r] = kernels.twisted_refine(p.a_diag, p.d, n, float(g))
    order = np.argsort(x)[::-1]
    x, logw, Z = x[order], logw[order], Z[:, order]
    if np.any(np.diff(x) >= 0):
        raise ConvergenceFailure("refinement merged two eigenvalues")

    A = p.dense_A()
    B = p.dense_B()
    R = A @ Z - (B @ Z) * x
    res = float(np.max(np.linalg.norm(R, axis=0) / np.linalg.norm(Z, axis=0)))
    if not vectors:
        return SpectralData(x=x, vectors=None, residual=res)
    first = Z[0, :]
    ok = np.abs(first) > 1e-280
    Z[:, ok] = Z[:, ok] / first[ok]
    return SpectralData(x=x, vectors=Z, residual=res, eig_weights=np.exp2(logw))


def zeros_by_bisection(cd: CoefficientData, n: int, all_levels: bool = False, tol: float = 0.0):
    """Zeros of P_n by Sturm-count bisection, decreasing.

    Only the pivots of A_k - x B_k (equivalently the ratios P_k/P_{k-1})
    are used, never the eigensolver.  With ``all_levels`` the zeros of
    P_1..P_n are returned and each consecutive pair is certified to
    interlace strictly; BracketFailure is raised if it does not.
    """
    if n < 1:
        raise DegreeOutOfRange("need n >= 1")
    if n > cd.N:
        raise DegreeOutOfRange(f"data supports n <= {cd.N}")
    if not all_levels:
        return np.asarray(kernels.sturm_zeros(cd.c, cd.d, n, tol))
    levels = [np.asarray(kernels.sturm_zeros(cd.c, cd.d, k, tol)) for k in range(1, n + 1)]
    for k in range(2, n + 1):
        if not np.all(interlacing_signs(cd, k, levels[k - 1]) > 0):
            raise BracketFailure(f"zeros of P_{k - 1} and P_{k} do not interlace")
    return levels


def interlacing_signs(cd: CoefficientData, n: int, zeros=None) -> np.ndarray:
    """(-1)^(j-1) sign P_{n-1}(y_j) at the zeros y_1 > ... > y_n of P_n.

    All entries +1 certify strict interlacing: P_{n-1} then changes sign
    between consecutive zeros of P_n and is positive beyond y_1, which
    places exactly one of its n - 1 zeros in each gap.  The values of
    P_{n-1} come from twisted sweeps, so the signs stay reliable even when
    the two sets of zeros are far closer than double precision resolves.
    """
    if n < 2:
        raise DimensionTooSmall("need n >= 2")
    if zeros is None:
        zeros = kernels.sturm_zeros(cd.c, cd.d, n, 0.0)
    zeros = np.asarray(zeros, dtype=float)
    out = np.empty(n)
    for j, y in enumerate(zeros):
        m, _ = kernels.prev_at_zero(cd.c, cd.d, n, float(y))
        out[j] = np.sign(m) * (-1.0) ** j
    return out


def interlacing_margin(upper, lower) -> float:
    """Smallest gap in the strict interlacing of zeros of P_{k+1} (upper) and P_k (lower).

    Both inputs are decreasing.  A positive result means
    upper[0] > lower[0] > upper[1] > ... > lower[-1] > upper[-1].
    """
    upper = np.asarray(upper)
    lower = np.asarray(lower)
    if len(upper) != len(lower) + 1:
        raise ValueError("upper must have one more zero than lower")
    merged = np.empty(len(upper) + len(lower))
    merged[0::2] = upper
    merged[1::2] = lower
    return float(np.min(-np.diff(merged)))


def sign_condition_check(cd: CoefficientData, n: int) -> SignCondition:
    """Gershgorin test for all zeros of P_n being positive (or negative)."""
    if n < 2:
        raise DimensionTooSmall("need n >= 2")
    if n > cd.N:
        raise DegreeOutOfRange(f"data supports n <= {cd.N}")
    c = cd.c[:n]
    r = np.sqrt(cd.d[: n - 1])
    radius = np.zeros(n)
    radius[:-1] += r
    radius[1:] += r
    if np.all(c > radius):
        return SignCondition.ALL_POSITIVE
    if np.all(-c > radius):
        return SignCondition.ALL_NEGATIVE
    return SignCondition.NO_CONCLUSION
