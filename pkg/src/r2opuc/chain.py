"""Positive chain sequences: minimal/maximal parameters and Wall's test.

Indexing follows the usual convention for chain sequences {d_{n+1}}_{n>=1}:
arrays of d start at d_2, arrays of parameters start at g_1.  So
``ell[0]`` is ℓ_1 (always 0) and ``d[0]`` is d_2.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import DepthInsufficient, NotAChainSequence

DEFAULT_DEPTH = 10_000


class Classification(str, enum.Enum):
    SINGLE = "SingleParameter"
    MULTIPLE = "MultipleParameter"
    INCONCLUSIVE = "Inconclusive"


class ChainSequence:
    """A positive chain sequence d_2, d_3, ...

    Either a finite array (``values``) or an unbounded rule ``term(n)``
    returning d_{n+1} for an integer array ``n >= 1``.  Unbounded sequences
    are needed by :func:`maximal_params`, which has to look far ahead.
    """

    def __init__(self, values=None, term: Optional[Callable] = None):
        if (values is None) == (term is None):
            raise TypeError("give exactly one of values= or term=")
        self._values = None if values is None else np.asarray(values, dtype=float).copy()
        self._term = term
        if self._values is not None:
            self._values.setflags(write=False)

    @property
    def length(self) -> Optional[int]:
        """Number of available terms, or None when unbounded."""
        return None if self._values is None else len(self._values)

    def values(self, count: int) -> np.ndarray:
        """Return d_2..d_{count+1}."""
        if count < 0:
            raise ValueError("count must be non-negative")
        if self._values is not None:
            if count > len(self._values):
                raise DepthInsufficient(
                    f"chain sequence has {len(self._values)} terms, {count} requested"
                )
            return self._values[:count]
        n = np.arange(1, count + 1)
        return np.asarray(self._term(n), dtype=float).reshape(count)

    def __repr__(self):
        if self._values is not None:
            return f"ChainSequence(values=<{len(self._values)} terms>)"
        return f"ChainSequence(term={self._term!r})"


def as_chain(d) -> ChainSequence:
    if isinstance(d, ChainSequence):
        return d
    if callable(d):
        return ChainSequence(term=d)
    return ChainSequence(values=d)


@dataclass(frozen=True)
class ChainParams:
    """Parameter data of a chain sequence.

    ``ell`` holds ℓ_1..ℓ_N; ``maximal`` (if computed) M_1..M_N.
    """

    ell: np.ndarray
    maximal: Optional[np.ndarray] = None
    classification: Optional[Classification] = None


def minimal_params(d, N: int) -> ChainParams:
    """Minimal parameters ℓ_1..ℓ_N from ℓ_1 = 0, ℓ_{n+1} = d_{n+1}/(1 - ℓ_n).

    Raises NotAChainSequence as soon as some ℓ_{n+1} leaves (0, 1).
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    dv = as_chain(d).values(N - 1)
    ell = np.empty(N)
    ell[0] = 0.0
    prev = 0.0
    for k in range(1, N):
        cur = dv[k - 1] / (1.0 - prev)
        if not 0.0 < cur < 1.0:
            raise NotAChainSequence(
                f"minimal parameter ell_{k + 1} = {cur!r} is outside (0, 1)"
            )
        ell[k] = cur
        prev = cur
    ell.setflags(write=False)
    return ChainParams(ell=ell)


def _backward(chain: ChainSequence, depth: int, count: int) -> np.ndarray:
    return np.asarray(kernels.backward_chain(chain.values(depth), depth, count))


def _aitken_table(seq):
    cols = [list(seq)]
    while len(cols[-1]) >= 3:
        s = cols[-1]
        new = []
        for a, b, c in zip(s, s[1:], s[2:]):
            den = (c - b) - (b - a)
            new.append(c if den == 0.0 else c - (c - b) ** 2 / den)
        cols.append(new)
    return cols


def _extrapolated_anchor(chain, depth, index, doublings, tol):
    """Limit of the backward iterate at ``index`` as depth -> infinity.

    The truncated iterates converge only algebraically when d_{n+1} -> 1/4
    (e.g. d ≡ 1/4 gives an error of exactly 1/(2(K + 2 - n))), so they are
    sampled at geometric depths and accelerated with iterated Aitken.
    """
    depths = [depth * 2 ** j for j in range(doublings + 1)]
    if chain.length is not None:
        depths = [k for k in depths if k <= chain.length]
    if len(depths) < 3:
        raise DepthInsufficient("not enough terms to extrapolate the maximal parameters")
    samples = [_backward(chain, k, index)[index - 1] for k in depths]
    best, best_gap = samples[-1], abs(samples[-1] - samples[-2])
    for col in _aitken_table(samples):
        if len(col) >= 2:
            gap = abs(col[-1] - col[-2])
            if gap < best_gap:
                best, best_gap = col[-1], gap
    if best_gap > tol:
        raise DepthInsufficient(
            f"maximal parameters did not stabilise (spread {best_gap:.3e} > {tol:.1e})"
        )
    return best


def maximal_params(
    d,
    N: int,
    depth: int = DEFAULT_DEPTH,
    tol: float = 1e-12,
    extrapolate: bool = True,
    extrap_tol: float = 1e-10,
    doublings: int = 6,
) -> np.ndarray:
    """Approximate M_1..M_N by backward recursion g_n = 1 - d_{n+1}/g_{n+1}.

    The recursion starts from g_{depth+1} = 1.  If the iterates at ``depth``
    and ``depth + 32`` agree to ``tol`` they are returned as is.  Otherwise
    (slow algebraic convergence) M_{N+1} is extrapolated from geometrically
    spaced depths and M_N..M_1 are regenerated from it by the same backward
    map, so that (1 - M_n) M_{n+1} = d_{n+1} holds to rounding.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    chain = as_chain(d)
    count = N + 1
    depth = max(depth, count)
    if chain.length is not None:
        if chain.length < count + 32:
            raise DepthInsufficient("chain sequence too short for backward recursion")
        depth = min(depth, chain.length - 32)

    a = _backward(chain, depth, count)
    b = _backward(chain, depth + 32, count)
    if np.max(np.abs(a - b)) <= tol:
        M = b[:N]
    elif extrapolate:
        anchor = _extrapolated_anchor(chain, depth, count, doublings, extrap_tol)
        dv = chain.values(N)
        M = np.empty(N)
        g = anchor
        for n in range(N, 0, -1):
            g = 1.0 - dv[n - 1] / g
            M[n - 1] = g
    else:
        raise DepthInsufficient(
            f"backward recursion not converged: spread {np.max(np.abs(a - b)):.3e}"
        )

    ell = minimal_params(chain, N).ell
    slack = max(extrap_tol, tol) * 10
    if np.any(M > 1.0 + slack) or np.any(M < ell - slack):
        raise NotAChainSequence("maximal parameters fall outside [ell_n, 1]")
    M.setflags(write=False)
    return M


@dataclass(frozen=True)
class WallReport:
    """Finite-truncation evidence for Wall's single/multiple criterion.

    ``terms`` are t_k = prod_{j<=k} ℓ_{j+1}/(1-ℓ_{j+1}); ``decay_exponent``
    is the local power-law exponent p of t_k ~ k^(-p) measured between
    k = N/2 and k = N.  The series converges (multiple parameters) iff it
    is summable, which the heuristic reads off p.
    """

    classification: Classification
    partial_sum: float
    half_sum: float
    decay_exponent: float
    terms: np.ndarray


def wall_terms(d, N: int) -> np.ndarray:
    """Terms t_1..t_N of Wall's series for the minimal parameters."""
    ell = minimal_params(d, N + 1).ell[1:]
    logs = np.cumsum(np.log(ell) - np.log1p(-ell))
    with np.errstate(over="ignore"):
        return np.exp(logs)


def classify(d, N: int = 4096, margin: float = 0.05) -> WallReport:
    """Classify the chain sequence as single or multiple parameter.

    Wall's criterion is a statement about an infinite series; here it is
    decided from the decay exponent of the last half of N terms: p > 1 +
    margin means summable, p < 1 - margin divergent, anything in between is
    reported as Inconclusive.  Geometric decay/growth shows up as large
    positive/negative p.
    """
    if N < 4:
        raise ValueError("N must be at least 4")
    ell = minimal_params(d, N + 1).ell[1:]
    logs = np.cumsum(np.log(ell) - np.log1p(-ell))
    with np.errstate(over="ignore"):
        terms = np.exp(logs)
    half = N // 2
    p = (logs[half - 1] - logs[N - 1]) / math.log(N / half)
    if p > 1.0 + margin:
        label = Classification.MULTIPLE
    elif p < 1.0 - margin:
        label = Classification.SINGLE
    else:
        label = Classification.INCONCLUSIVE
    with np.errstate(over="ignore"):
        s_n = float(np.sum(terms))
        s_half = float(np.sum(terms[:half]))
    return WallReport(label, s_n, s_half, float(p), terms)
