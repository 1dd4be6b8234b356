"""Pure-Python hot loops.

Reference implementation of the kernels in ``_ckernels.pyx``; the two must
stay step-for-step equivalent.  Conventions shared by every kernel:

* ``c[k]`` holds c_{k+1} (so ``c[0]`` is c_1),
* ``d[k]`` holds d_{k+2} (so ``d[0]`` is d_2).

The Sturm count and the twisted sweeps run in extended precision
(``numpy.longdouble`` here, C ``long double`` in the compiled version).
"""
import math

import numpy as np

from .errors import BracketFailure, ConvergenceFailure, NotAChainSequence

_BIG = 2.0 ** 256
_SMALL = 2.0 ** -256
LD = np.longdouble
_LD_EPS = LD(np.finfo(LD).eps)
# stand-in for an exactly zero pivot
_LD_TINY = np.sqrt(np.finfo(LD).tiny)


def _floats(a):
    return [float(v) for v in a]


def _lds(a):
    return [LD(float(v)) for v in a]


def p_eval(c, d, n, x):
    """Evaluate P_n, P_{n-1} and their derivatives at real ``x``.

    Returns ``(p, p_prev, dp, dp_prev, e)``; the true values are the first
    four entries times ``2**e``.  For ``n == 0`` the "previous" entries are 0.
    """
    if n == 0:
        return 1.0, 0.0, 0.0, 0.0, 0
    x = float(x)
    q = x * x + 1.0
    p_prev = 1.0
    p = x - c[0]
    dp_prev = 0.0
    dp = 1.0
    e = 0
    for k in range(1, n):
        dk = d[k - 1]
        a = x - c[k]
        p_next = a * p - dk * q * p_prev
        dp_next = p + a * dp - dk * (2.0 * x * p_prev + q * dp_prev)
        p_prev = p
        p = p_next
        dp_prev = dp
        dp = dp_next
        m = max(abs(p), abs(p_prev), abs(dp), abs(dp_prev))
        if m > _BIG or (m < _SMALL and m != 0.0):
            s = math.frexp(m)[1]
            p = math.ldexp(p, -s)
            p_prev = math.ldexp(p_prev, -s)
            dp = math.ldexp(dp, -s)
            dp_prev = math.ldexp(dp_prev, -s)
            e += s
    return p, p_prev, dp, dp_prev, e


def p_eval_many(c, d, n, xs):
    """Vectorised :func:`p_eval`; returns five lists."""
    c, d = _floats(c), _floats(d)
    out = ([], [], [], [], [])
    for x in xs:
        for lst, v in zip(out, p_eval(c, d, n, float(x))):
            lst.append(v)
    return out


def _count(c, d, n, x):
    q = 1 + x * x
    delta = c[0] - x
    cnt = 1 if delta > 0 else 0
    for k in range(1, n):
        # a zero pivot becomes a tiny negative one, as if x were nudged off the zero of P_k
        if delta == 0:
            delta = -_LD_TINY
        delta = (c[k] - x) - d[k - 1] * q / delta
        if delta > 0:
            cnt += 1
    return cnt


def sturm_count(c, d, n, x):
    """Number of zeros of P_n greater than ``x``.

    Counts the positive pivots of the LDL^H factorisation of A_n - x B_n.
    The pivots are -P_k(x)/P_{k-1}(x), and by Sylvester's law of inertia
    their positive count is the number of pencil eigenvalues above x.
    """
    return _count(_lds(c), _lds(d), n, LD(float(x)))


def sturm_zeros(c, d, n, tol=0.0):
    """All zeros of P_n, decreasing, by bisection on :func:`sturm_count`.

    Each zero is bisected until its bracket stops shrinking in extended
    precision or is narrower than ``tol * max(1, |x|)``.
    """
    c, d = _lds(c), _lds(d)
    if n == 1:
        return [float(c[0])]
    r = LD(1)
    while _count(c, d, n, r) != 0 or _count(c, d, n, -r) != n:
        r *= 2
        if r > 1e150:
            raise BracketFailure(f"no finite bracket holds all zeros of P_{n}")
    out = []
    hi_prev = r
    for j in range(1, n + 1):
        lo, hi = -r, hi_prev
        while True:
            mid = (lo + hi) / 2
            if mid <= lo or mid >= hi or hi - lo <= tol * max(1.0, abs(float(mid))):
                break
            if _count(c, d, n, mid) >= j:
                lo = mid
            else:
                hi = mid
        out.append(float((lo + hi) / 2))
        hi_prev = hi
    return out


def _twisted(c, d, n, x):
    q = 1 + x * x
    f = [LD(0)] * (n + 1)
    b = [LD(0)] * (n + 1)
    f[1] = x - c[0]
    for k in range(1, n):
        if f[k] == 0:
            f[k] = _LD_TINY
        f[k + 1] = (x - c[k]) - d[k - 1] * q / f[k]
    for k in range(n - 1, 0, -1):
        den = (x - c[k]) - b[k + 1]
        if den == 0:
            den = _LD_TINY
        b[k] = d[k - 1] * q / den
    t, best = n, abs(b[n] - f[n])
    for k in range(n - 1, 0, -1):
        g = abs(b[k] - f[k])
        if g < best:
            t, best = k, g
    return [f[k] if k < t else b[k] for k in range(1, n)]


def twisted_ratios(c, d, n, x):
    """P_k(x)/P_{k-1}(x) for k = 1..n-1 at a zero x of P_n.

    f_k and b_k are the forward and backward estimates of the ratio; the
    backward sweep starts from P_n(x) = 0.  Forward ratios are used below
    the twist index t = argmin |b_k - f_k| and backward ratios from t on,
    so neither sweep runs in its unstable direction.
    """
    return [float(r) for r in _twisted(_lds(c), _lds(d), n, LD(float(x)))]


def prev_at_zero(c, d, n, x):
    """P_{n-1}(x) for a zero x of P_n as ``(m, e)`` with value m 2**e.

    The product of :func:`twisted_ratios`, accumulated in extended precision.
    """
    m, e = LD(1), 0
    for r in _twisted(_lds(c), _lds(d), n, LD(float(x))):
        m, s = np.frexp(m * r)
        e += int(s)
    return float(m), e


def twisted_refine(c, d, n, x0, maxit=16):
    """Rayleigh-quotient refinement of one eigenpair of A_n u = x B_n u.

    Each step forms the twisted factorisation of A_n - s B_n at the index t
    of smallest |gamma_t|, takes its null vector z (z_t = 1) and updates
    s <- s + gamma_t / (z^H B_n z), with z^H B_n z = |L^T z|^2 summed from
    the minimal parameters.  Iteration stops once the correction reaches
    the rounding level or stops shrinking.  Returns ``(x, log2_weight, z)``: the weight is
    |z_1|^2 / (z^H B_n z) and ``z`` (complex list) has unit max-norm.
    """
    c, d = _lds(c), _lds(d)
    ell = [LD(0)] * (n + 1)
    for k in range(1, n):
        ell[k + 1] = d[k - 1] / (1 - ell[k])
    s = [np.sqrt(v) for v in d[: n - 1]]
    sig = LD(float(x0))
    prev = LD(np.inf)
    dp = [LD(0)] * (n + 2)
    dm = [LD(0)] * (n + 2)
    zr = [LD(0)] * (n + 2)
    zi = [LD(0)] * (n + 2)
    for _ in range(maxit):
        q = 1 + sig * sig
        dp[1] = c[0] - sig
        for k in range(1, n):
            if dp[k] == 0:
                dp[k] = _LD_TINY
            dp[k + 1] = (c[k] - sig) - d[k - 1] * q / dp[k]
        dm[n] = c[n - 1] - sig
        for k in range(n - 1, 0, -1):
            if dm[k + 1] == 0:
                dm[k + 1] = _LD_TINY
            dm[k] = (c[k - 1] - sig) - d[k - 1] * q / dm[k + 1]
        t, gam = n, dp[n]
        for k in range(n - 1, 0, -1):
            g = dp[k] + dm[k] - (c[k - 1] - sig)
            if abs(g) < abs(gam):
                t, gam = k, g
        # the (j, j+1) entry of A - sB is (i - s) s_j
        zr[t], zi[t] = LD(1), LD(0)
        for j in range(t - 1, 0, -1):
            piv = dp[j] if dp[j] != 0 else _LD_TINY
            a, bb = zr[j + 1], zi[j + 1]
            zr[j] = (sig * a + bb) * s[j - 1] / piv
            zi[j] = (sig * bb - a) * s[j - 1] / piv
        for j in range(t + 1, n + 1):
            piv = dm[j] if dm[j] != 0 else _LD_TINY
            a, bb = zr[j - 1], zi[j - 1]
            zr[j] = (sig * a - bb) * s[j - 2] / piv
            zi[j] = (sig * bb + a) * s[j - 2] / piv
        nrm = LD(0)
        for j in range(1, n + 1):
            w = np.sqrt(1 - ell[j])
            vr, vi = w * zr[j], w * zi[j]
            if j < n:
                w = np.sqrt(ell[j + 1])
                vr += w * zr[j + 1]
                vi += w * zi[j + 1]
            nrm += vr * vr + vi * vi
        step = gam / nrm
        if abs(step) >= abs(prev) / 2:
            # stagnated at the rounding level; keep the current iterate
            break
        sig = sig + step
        prev = step
        if abs(step) <= 8 * _LD_EPS * max(LD(1), abs(sig)):
            break
    else:
        raise ConvergenceFailure("Rayleigh quotient iteration did not settle")
    w0 = zr[1] * zr[1] + zi[1] * zi[1]
    lw = float(np.log2(w0) - np.log2(nrm)) if w0 > 0 else -math.inf
    big = max(max(abs(zr[j]), abs(zi[j])) for j in range(1, n + 1))
    z = [complex(float(zr[j] / big), float(zi[j] / big)) for j in range(1, n + 1)]
    return float(sig), lw, z


def backward_chain(dvals, depth, count):
    """Backward iterate g_n = 1 - d_{n+1}/g_{n+1} from g_{depth+1} = 1.

    ``dvals[j]`` is d_{j+2}; needs ``len(dvals) >= depth``.  Returns
    g_1..g_count as a list (``count <= depth + 1``).
    """
    dvals = _floats(dvals[:depth])
    out = [0.0] * count
    g = 1.0
    if count == depth + 1:
        out[depth] = 1.0
    for n in range(depth, 0, -1):
        g = 1.0 - dvals[n - 1] / g
        if not g > 0.0:
            raise NotAChainSequence(f"backward parameter iterate left (0, 1] at n={n}")
        if n <= count:
            out[n - 1] = g
    return out
