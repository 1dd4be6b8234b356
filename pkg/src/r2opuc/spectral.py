"""Quadrature on the unit circle built from the zeros of P_n.

The zeros x_r of P_n are carried to ζ_r = (x_r + i)/(x_r - i) and given
the weights

    λ_r = (x_r^2 + 1)^(n-1) d_2 ... d_n / G_n(x_r),

with G_n the Wronskian.  The normalised weights λ̂_r = (1 + c_1^2) λ_r /
(x_r^2 + 1) define a probability measure Λ_n whose moments of order below n
do not depend on n.  The ``verify_*`` helpers sum the discrete orthogonality
relations and report the largest deviations.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels, pencil
from .errors import DegreeOutOfRange, DimensionTooSmall, MomentOutOfRange, NotPositiveDefinite
from .recurrence import (
    CoefficientData,
    coeffs_Phi,
    eval_Phi,
    eval_R,
    eval_R_hat,
    eval_u_hat,
    wronskian_at_zeros,
    zeta_of_x,
)


@dataclass(frozen=True)
class CircleQuadrature:
    """Nodes and weights of Λ_n.

    ``lam`` holds λ_r, ``lambda_hat`` the normalised weights summing to 1;
    ``x`` are the real zeros the nodes came from (decreasing).
    """

    n: int
    zeta: np.ndarray
    lam: np.ndarray
    lambda_hat: np.ndarray
    x: np.ndarray


def _log2_weights(cd: CoefficientData, n: int, x: np.ndarray) -> np.ndarray:
    G = wronskian_at_zeros(cd, n, x)
    if any(g.mantissa <= 0 for g in G):
        raise NotPositiveDefinite("Wronskian not positive at a zero; the data are invalid")
    base = float(np.sum(np.log2(cd.d[: n - 1])))
    return np.array([(n - 1) * math.log2(xr * xr + 1.0) + base - g.log2_abs() for xr, g in zip(x, G)])


def quadrature(cd: CoefficientData, n: int, spectral: Optional[pencil.SpectralData] = None) -> CircleQuadrature:
    """Nodes and weights of Λ_n from the zeros of P_n.

    The zeros come from :func:`r2opuc.pencil.solve` unless ``spectral`` is
    given; the weights use only the zeros and the recurrence data, never
    the eigenvectors.
    """
    if n < 2:
        raise DimensionTooSmall("quadrature needs n >= 2")
    if spectral is None:
        spectral = pencil.solve(pencil.build_pencil(cd, n), vectors=False)
    x = np.asarray(spectral.x, dtype=float)
    lw = _log2_weights(cd, n, x)
    lam = np.exp2(lw)
    lam_hat = np.exp2(lw + math.log2(1.0 + cd.c[0] ** 2) - np.log2(x * x + 1.0))
    for a in (x, lam, lam_hat):
        a.setflags(write=False)
    zeta = zeta_of_x(x)
    zeta.setflags(write=False)
    return CircleQuadrature(n=n, zeta=zeta, lam=lam, lambda_hat=lam_hat, x=x)


def discrete_moment(q: CircleQuadrature, k: int) -> complex:
    """Σ_r λ̂_r ζ_r^k.

    Equals the k-th moment of the limit measure only for |k| < n; larger
    orders are still computed but flagged with MomentOutOfRange.
    """
    if abs(k) >= q.n:
        warnings.warn(
            f"moment of order {k} is not fixed by Λ_{q.n}", MomentOutOfRange, stacklevel=2
        )
    return complex(np.sum(q.lambda_hat * q.zeta ** k))


@dataclass(frozen=True)
class OrthogonalityReport:
    """Gram matrix of a discrete orthogonality relation against its target.

    ``deviation`` is max |gram - expected| / sqrt(e_mm e_kk) over all
    entries, i.e. measured relative to the diagonal.
    """

    gram: np.ndarray
    expected: np.ndarray
    deviation: float
    max_offdiag: float
    max_diag_rel: float

    def passed(self, tol: float = 1e-9) -> bool:
        return bool(self.deviation <= tol)


def _report(gram: np.ndarray, diag: np.ndarray) -> OrthogonalityReport:
    expected = np.diag(diag).astype(complex)
    scale = np.sqrt(np.outer(diag, diag))
    rel = np.abs(gram - expected) / scale
    off = rel.copy()
    np.fill_diagonal(off, 0.0)
    return OrthogonalityReport(
        gram=gram,
        expected=expected,
        deviation=float(rel.max()),
        max_offdiag=float(off.max()),
        max_diag_rel=float(np.max(np.diag(rel))),
    )


def node_values(cd: CoefficientData, n: int, x) -> np.ndarray:
    """R_k(ζ_r) for k = 0..n at the zeros x_r of P_n; row n is zero.

    Uses R_k(ζ) = 2^k P_k(x)/(x - i)^k with P_k(x_r) = Π_{j<=k} P_j/P_{j-1}
    taken from the twisted ratio sweep.  Running the recurrence forward at
    a node loses accuracy once the eigenvector has passed its peak; the
    twisted ratios avoid that direction.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros((n + 1, len(x)), dtype=complex)
    for r, xr in enumerate(x):
        ratios = kernels.twisted_ratios(cd.c, cd.d, n, float(xr))
        step = 2.0 / complex(xr, -1.0)
        turn = -4.0 * complex(xr, 1.0) / complex(xr, -1.0)
        m, e = 1 + 0j, 0
        held = None
        out[0, r] = 1.0
        for k, rk in enumerate(ratios, start=1):
            if held is not None:
                # P_{k-1} = 0 exactly, so P_k = -d_k (x^2 + 1) P_{k-2}
                m, e = held
                m *= turn * cd.d[k - 2]
                held = None
            elif rk == 0.0:
                held = (m, e)
                out[k, r] = 0.0
                continue
            else:
                m *= rk * step
            s_ = math.frexp(abs(m))[1]
            m = m / 2.0 ** s_
            e += s_
            out[k, r] = m * 2.0 ** e
    return out


def _r_hat_rows(cd: CoefficientData, n: int, R: np.ndarray) -> np.ndarray:
    # R̂_k = R_k - 2 (1 - ℓ_k) R_{k-1}, k = 1..n
    k = np.arange(1, n + 1)
    return R[1:] - 2.0 * (1.0 - cd.ell[k - 1])[:, None] * R[:-1]


def _need_tail(cd: CoefficientData, n: int):
    # the norms use d_{n+1} and ℓ_{n+1}
    if len(cd.d) < n or len(cd.ell) < n + 1:
        raise DegreeOutOfRange(f"the norms up to degree {n} need d_{n + 1}")


def r_hat_norms(cd: CoefficientData, n: int) -> np.ndarray:
    """2^(2k) d_2 ... d_{k+1} / ℓ_{k+1} for k = 1..n."""
    _need_tail(cd, n)
    k = np.arange(1, n + 1)
    return 4.0 ** k * np.cumprod(cd.d[:n]) / cd.ell[1 : n + 1]


def verify_discrete_orthogonality(
    cd: CoefficientData, n: int, q: Optional[CircleQuadrature] = None, method: str = "twisted"
) -> OrthogonalityReport:
    """Σ_r λ_r conj(R̂_m(ζ_r)) R̂_k(ζ_r) against its diagonal, 1 <= m, k <= n.

    ``method="twisted"`` takes the node values from :func:`node_values`;
    ``"recurrence"`` runs the ζ-recurrence forward at each node.
    """
    if n < 2:
        raise DimensionTooSmall("need n >= 2")
    diag = r_hat_norms(cd, n)
    q = quadrature(cd, n) if q is None else q
    if method == "twisted":
        V = _r_hat_rows(cd, n, node_values(cd, n, q.x))
    elif method == "recurrence":
        V = np.array([[eval_R_hat(cd, k, z) for z in q.zeta] for k in range(1, n + 1)])
    else:
        raise ValueError("method must be 'twisted' or 'recurrence'")
    gram = (V.conj() * q.lam) @ V.T
    return _report(gram, diag)


def phi_norms(cd: CoefficientData, n: int) -> np.ndarray:
    """Target norms of Φ_0..Φ_{n-1} under Λ_n.

    (1 + c_1^2) 2^(2k) d_2 ... d_{k+2} / (ℓ_{k+2} (1 + c_1^2) ... (1 + c_{k+1}^2)).
    """
    _need_tail(cd, n)
    k = np.arange(n)
    dprod = np.cumprod(cd.d[:n])
    cprod = np.cumprod(1.0 + cd.c[:n] ** 2)
    return (1.0 + cd.c[0] ** 2) * 4.0 ** k * dprod / (cd.ell[1 : n + 1] * cprod)


def verify_phi_orthogonality(
    cd: CoefficientData, n: int, q: Optional[CircleQuadrature] = None, method: str = "twisted"
) -> OrthogonalityReport:
    """Σ_r λ̂_r conj(Φ_m(ζ_r)) Φ_k(ζ_r) against its diagonal, 0 <= m, k <= n-1.

    Φ_k = R̂_{k+1} / ((ζ - 1) Π_{j<=k+1}(1 + i c_j)).  ``method="twisted"``
    divides the node values of :func:`node_values`; ``"pointwise"`` and
    ``"deflation"`` go through :func:`r2opuc.recurrence.eval_Phi`.  Horner
    on the deflated coefficients cancels badly when the coefficients are
    much larger than Φ_k on the circle.
    """
    if n < 2:
        raise DimensionTooSmall("need n >= 2")
    diag = phi_norms(cd, n)
    q = quadrature(cd, n) if q is None else q
    if method == "twisted":
        Rh = _r_hat_rows(cd, n, node_values(cd, n, q.x))
        cprod = np.cumprod(1 + 1j * cd.c[:n])
        V = Rh / ((q.zeta - 1.0)[None, :] * cprod[:, None])
    elif method == "deflation":
        V = np.array([coeffs_Phi(cd, k)(q.zeta) for k in range(n)])
    elif method == "pointwise":
        V = np.array([[eval_Phi(cd, k, z, method=method) for z in q.zeta] for k in range(n)])
    else:
        raise ValueError("method must be 'twisted', 'pointwise' or 'deflation'")
    gram = (V.conj() * q.lambda_hat) @ V.T
    return _report(gram, diag)


def verify_u_hat_orthonormality(
    cd: CoefficientData, n: int, q: Optional[CircleQuadrature] = None, method: str = "twisted"
) -> OrthogonalityReport:
    """Σ_r λ_r conj(û_m(x_r)) û_k(x_r) against the identity, 1 <= m, k <= n.

    With u_k = (-1)^k R_k / (2^k Π_{j<=k} sqrt(d_{j+1})) the node values come
    from :func:`node_values`; ``method="recurrence"`` uses
    :func:`r2opuc.recurrence.eval_u_hat` instead.
    """
    if n < 2:
        raise DimensionTooSmall("need n >= 2")
    if len(cd.ell) < n + 1:
        raise DegreeOutOfRange(f"û_{n} needs ℓ_{n + 1}")
    q = quadrature(cd, n) if q is None else q
    if method == "twisted":
        R = node_values(cd, n, q.x)
        k = np.arange(n + 1)
        ld = np.concatenate([[0.0], np.cumsum(0.5 * np.log2(cd.d[:n]))])
        U = R * ((-0.5) ** k * np.exp2(-ld))[:, None]
        kk = np.arange(1, n + 1)
        V = np.sqrt(cd.ell[kk])[:, None] * U[1:] + np.sqrt(1.0 - cd.ell[kk - 1])[:, None] * U[:-1]
    elif method == "recurrence":
        V = np.array([[eval_u_hat(cd, k, x, form="closed") for x in q.x] for k in range(1, n + 1)])
    else:
        raise ValueError("method must be 'twisted' or 'recurrence'")
    gram = (V.conj() * q.lam) @ V.T
    return _report(gram, np.ones(n))


def combination_coefficients(ell, n: int) -> np.ndarray:
    """b_k = -1 / (2^k (1 - ℓ_1) ... (1 - ℓ_k)) for k = 1..n."""
    if n < 2:
        raise DimensionTooSmall("need n >= 2")
    ell = np.asarray(getattr(ell, "ell", ell), dtype=float)
    if len(ell) < n:
        raise DegreeOutOfRange(f"need ℓ_1..ℓ_{n}")
    k = np.arange(1, n + 1)
    return -1.0 / (2.0 ** k * np.cumprod(1.0 - ell[:n]))


def combination_residual(cd: CoefficientData, n: int, points, relative: bool = True) -> float:
    """max |1 - (Σ_{k<n} b_k R̂_k(z) - 2 b_n (1 - ℓ_n) R_{n-1}(z))| over ``points``.

    The sum telescopes to 1 through partial sums 1 + b_k R_k(z), so in
    floating point the error scales with the largest term.  By default the
    residual is divided by max(1, Σ |terms|); ``relative=False`` returns the
    absolute value.
    """
    b = combination_coefficients(cd.ell, n)
    worst = 0.0
    for z in np.atleast_1d(points):
        terms = [b[k - 1] * eval_R_hat(cd, k, z) for k in range(1, n)]
        terms.append(-2.0 * b[n - 1] * (1.0 - cd.ell[n - 1]) * eval_R(cd, n - 1, z).value)
        res = abs(1.0 - sum(terms))
        if relative:
            res /= max(1.0, sum(abs(t) for t in terms))
        worst = max(worst, res)
    return worst


def wall_partial_sum(cd: CoefficientData, n: int) -> float:
    """1 + Σ_{k=2..n} Π_{j=2..k} ℓ_j / (1 - ℓ_j), the value of Σ_r λ_r."""
    if n > len(cd.ell):
        raise DegreeOutOfRange(f"need ℓ_1..ℓ_{n}")
    ell = cd.ell[1:n]
    return float(1.0 + np.sum(np.cumprod(ell / (1.0 - ell))))
