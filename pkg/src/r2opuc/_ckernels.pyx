# cython: language_level=3
"""Compiled hot loops; mirrors ``_kernels_py`` exactly (same conventions)."""
from libc.math cimport INFINITY, fabs, fabsl, frexp, frexpl, ldexp, log2l, sqrtl

import numpy as np

from .errors import BracketFailure, ConvergenceFailure, NotAChainSequence

cdef double _BIG = 2.0 ** 256
cdef double _SMALL = 2.0 ** -256


cdef inline double _max4(double a, double b, double c, double d) nogil:
    cdef double m = fabs(a)
    if fabs(b) > m:
        m = fabs(b)
    if fabs(c) > m:
        m = fabs(c)
    if fabs(d) > m:
        m = fabs(d)
    return m


cdef void _p_eval(const double[::1] c, const double[::1] d, Py_ssize_t n, double x,
                  double* out, long* e_out) noexcept nogil:
    cdef double q, p_prev, p, dp_prev, dp, p_next, dp_next, dk, a, m
    cdef long e = 0
    cdef int s
    cdef Py_ssize_t k
    if n == 0:
        out[0] = 1.0
        out[1] = 0.0
        out[2] = 0.0
        out[3] = 0.0
        e_out[0] = 0
        return
    q = x * x + 1.0
    p_prev = 1.0
    p = x - c[0]
    dp_prev = 0.0
    dp = 1.0
    for k in range(1, n):
        dk = d[k - 1]
        a = x - c[k]
        p_next = a * p - dk * q * p_prev
        dp_next = p + a * dp - dk * (2.0 * x * p_prev + q * dp_prev)
        p_prev = p
        p = p_next
        dp_prev = dp
        dp = dp_next
        m = _max4(p, p_prev, dp, dp_prev)
        if m > _BIG or (m < _SMALL and m != 0.0):
            frexp(m, &s)
            p = ldexp(p, -s)
            p_prev = ldexp(p_prev, -s)
            dp = ldexp(dp, -s)
            dp_prev = ldexp(dp_prev, -s)
            e += s
    out[0] = p
    out[1] = p_prev
    out[2] = dp
    out[3] = dp_prev
    e_out[0] = e


def p_eval(c, d, Py_ssize_t n, double x):
    """Evaluate P_n, P_{n-1} and their derivatives; see ``_kernels_py.p_eval``."""
    cdef const double[::1] cv = _as_array(c)
    cdef const double[::1] dv = _as_array(d)
    cdef double out[4]
    cdef long e
    _p_eval(cv, dv, n, x, out, &e)
    return out[0], out[1], out[2], out[3], e


def p_eval_many(c, d, Py_ssize_t n, xs):
    """Vectorised ``p_eval``; returns five lists."""
    cdef const double[::1] cv = _as_array(c)
    cdef const double[::1] dv = _as_array(d)
    cdef const double[::1] xv = _as_array(xs)
    cdef Py_ssize_t i, m = xv.shape[0]
    cdef double out[4]
    cdef long e
    p, pp, dp, dpp, ee = [], [], [], [], []
    for i in range(m):
        _p_eval(cv, dv, n, xv[i], out, &e)
        p.append(out[0])
        pp.append(out[1])
        dp.append(out[2])
        dpp.append(out[3])
        ee.append(e)
    return p, pp, dp, dpp, ee


cdef extern from "float.h":
    long double LDBL_MIN
    long double LDBL_EPSILON


ctypedef long double ld

cdef ld _LD_TINY = sqrtl(LDBL_MIN)


cdef Py_ssize_t _count(const double[::1] c, const double[::1] d, Py_ssize_t n, ld x) noexcept nogil:
    cdef ld q = 1 + x * x
    cdef ld delta = <ld>c[0] - x
    cdef Py_ssize_t k, cnt = 0
    if delta > 0:
        cnt = 1
    for k in range(1, n):
        # a zero pivot becomes a tiny negative one, as if x were nudged off the zero of P_k
        if delta == 0:
            delta = -_LD_TINY
        delta = (<ld>c[k] - x) - <ld>d[k - 1] * q / delta
        if delta > 0:
            cnt += 1
    return cnt


def sturm_count(c, d, Py_ssize_t n, double x):
    """Number of zeros of P_n above ``x``; see ``_kernels_py.sturm_count``."""
    cdef const double[::1] cv = _as_array(c)
    cdef const double[::1] dv = _as_array(d)
    return _count(cv, dv, n, x)


def sturm_zeros(c, d, Py_ssize_t n, double tol=0.0):
    """Zeros of P_n by Sturm bisection; see ``_kernels_py.sturm_zeros``."""
    cdef const double[::1] cv = _as_array(c)
    cdef const double[::1] dv = _as_array(d)
    cdef ld r = 1, lo, hi, hi_prev, mid, scale
    cdef Py_ssize_t j
    if n == 1:
        return [float(cv[0])]
    while _count(cv, dv, n, r) != 0 or _count(cv, dv, n, -r) != n:
        r *= 2
        if r > 1e150:
            raise BracketFailure(f"no finite bracket holds all zeros of P_{n}")
    out = []
    hi_prev = r
    for j in range(1, n + 1):
        lo = -r
        hi = hi_prev
        while True:
            mid = (lo + hi) / 2
            scale = fabsl(<double>mid)
            if scale < 1:
                scale = 1
            if mid <= lo or mid >= hi or hi - lo <= tol * scale:
                break
            if _count(cv, dv, n, mid) >= j:
                lo = mid
            else:
                hi = mid
        out.append(<double>((lo + hi) / 2))
        hi_prev = hi
    return out


cdef void _twisted(const double[::1] cv, const double[::1] dv, Py_ssize_t n, ld x,
                   ld[::1] f, ld[::1] b, Py_ssize_t* t_out) noexcept:
    cdef ld q = 1 + x * x
    cdef ld den, best, g
    cdef Py_ssize_t k, t
    f[1] = x - <ld>cv[0]
    for k in range(1, n):
        if f[k] == 0:
            f[k] = _LD_TINY
        f[k + 1] = (x - <ld>cv[k]) - <ld>dv[k - 1] * q / f[k]
    b[n] = 0
    for k in range(n - 1, 0, -1):
        den = (x - <ld>cv[k]) - b[k + 1]
        if den == 0:
            den = _LD_TINY
        b[k] = <ld>dv[k - 1] * q / den
    t = n
    best = fabsl(b[n] - f[n])
    for k in range(n - 1, 0, -1):
        g = fabsl(b[k] - f[k])
        if g < best:
            t = k
            best = g
    t_out[0] = t


def twisted_ratios(c, d, Py_ssize_t n, double x0):
    """P_k/P_{k-1} at a zero of P_n by twisted sweeps; see ``_kernels_py.twisted_ratios``."""
    cdef const double[::1] cv = _as_array(c)
    cdef const double[::1] dv = _as_array(d)
    cdef ld[::1] f = np.zeros(n + 1, dtype=np.longdouble)
    cdef ld[::1] b = np.zeros(n + 1, dtype=np.longdouble)
    cdef Py_ssize_t k, t
    _twisted(cv, dv, n, x0, f, b, &t)
    return [<double>(f[k] if k < t else b[k]) for k in range(1, n)]


def prev_at_zero(c, d, Py_ssize_t n, double x0):
    """P_{n-1} at a zero of P_n by twisted sweeps; see ``_kernels_py.prev_at_zero``."""
    cdef const double[::1] cv = _as_array(c)
    cdef const double[::1] dv = _as_array(d)
    cdef ld[::1] f = np.zeros(n + 1, dtype=np.longdouble)
    cdef ld[::1] b = np.zeros(n + 1, dtype=np.longdouble)
    cdef ld m = 1
    cdef Py_ssize_t k, t
    cdef long e = 0
    cdef int s
    _twisted(cv, dv, n, x0, f, b, &t)
    for k in range(1, n):
        m = frexpl(m * (f[k] if k < t else b[k]), &s)
        e += s
    return <double>m, e


def twisted_refine(c, d, Py_ssize_t n, double x0, int maxit=16):
    """Rayleigh-quotient refinement by twisted factorisations; see ``_kernels_py.twisted_refine``."""
    cdef const double[::1] cv = _as_array(c)
    cdef const double[::1] dv = _as_array(d)
    cdef ld[::1] ell = np.zeros(n + 2, dtype=np.longdouble)
    cdef ld[::1] sd = np.zeros(n + 1, dtype=np.longdouble)
    cdef ld[::1] dp = np.zeros(n + 2, dtype=np.longdouble)
    cdef ld[::1] dm = np.zeros(n + 2, dtype=np.longdouble)
    cdef ld[::1] zr = np.zeros(n + 2, dtype=np.longdouble)
    cdef ld[::1] zi = np.zeros(n + 2, dtype=np.longdouble)
    cdef ld sig = x0, prev = INFINITY, q, g, gam, piv, a, bb, w, vr, vi, nrm = 1, step, w0, big
    cdef Py_ssize_t k, j, t
    cdef int it
    cdef bint done = False
    for k in range(1, n):
        ell[k + 1] = <ld>dv[k - 1] / (1 - ell[k])
        sd[k - 1] = sqrtl(<ld>dv[k - 1])
    for it in range(maxit):
        q = 1 + sig * sig
        dp[1] = <ld>cv[0] - sig
        for k in range(1, n):
            if dp[k] == 0:
                dp[k] = _LD_TINY
            dp[k + 1] = (<ld>cv[k] - sig) - <ld>dv[k - 1] * q / dp[k]
        dm[n] = <ld>cv[n - 1] - sig
        for k in range(n - 1, 0, -1):
            if dm[k + 1] == 0:
                dm[k + 1] = _LD_TINY
            dm[k] = (<ld>cv[k - 1] - sig) - <ld>dv[k - 1] * q / dm[k + 1]
        t = n
        gam = dp[n]
        for k in range(n - 1, 0, -1):
            g = dp[k] + dm[k] - (<ld>cv[k - 1] - sig)
            if fabsl(g) < fabsl(gam):
                t = k
                gam = g
        zr[t] = 1
        zi[t] = 0
        for j in range(t - 1, 0, -1):
            piv = dp[j] if dp[j] != 0 else _LD_TINY
            a = zr[j + 1]
            bb = zi[j + 1]
            zr[j] = (sig * a + bb) * sd[j - 1] / piv
            zi[j] = (sig * bb - a) * sd[j - 1] / piv
        for j in range(t + 1, n + 1):
            piv = dm[j] if dm[j] != 0 else _LD_TINY
            a = zr[j - 1]
            bb = zi[j - 1]
            zr[j] = (sig * a - bb) * sd[j - 2] / piv
            zi[j] = (sig * bb + a) * sd[j - 2] / piv
        nrm = 0
        for j in range(1, n + 1):
            w = sqrtl(1 - ell[j])
            vr = w * zr[j]
            vi = w * zi[j]
            if j < n:
                w = sqrtl(ell[j + 1])
                vr += w * zr[j + 1]
                vi += w * zi[j + 1]
            nrm += vr * vr + vi * vi
        step = gam / nrm
        if fabsl(step) >= fabsl(prev) / 2:
            done = True
            break
        sig = sig + step
        prev = step
        w = fabsl(sig)
        if w < 1:
            w = 1
        if fabsl(step) <= 8 * LDBL_EPSILON * w:
            done = True
            break
    if not done:
        raise ConvergenceFailure("Rayleigh quotient iteration did not settle")
    w0 = zr[1] * zr[1] + zi[1] * zi[1]
    lw = <double>(log2l(w0) - log2l(nrm)) if w0 > 0 else -np.inf
    big = 0
    for j in range(1, n + 1):
        if fabsl(zr[j]) > big:
            big = fabsl(zr[j])
        if fabsl(zi[j]) > big:
            big = fabsl(zi[j])
    z = [complex(<double>(zr[j] / big), <double>(zi[j] / big)) for j in range(1, n + 1)]
    return <double>sig, lw, z


def backward_chain(dvals, Py_ssize_t depth, Py_ssize_t count):
    """Backward parameter iterate from g_{depth+1} = 1; see ``_kernels_py.backward_chain``."""
    cdef const double[::1] dv = _as_array(dvals)
    cdef double g = 1.0
    cdef Py_ssize_t n
    out = [0.0] * count
    if count == depth + 1:
        out[depth] = 1.0
    for n in range(depth, 0, -1):
        g = 1.0 - dv[n - 1] / g
        if not g > 0.0:
            raise NotAChainSequence(f"backward parameter iterate left (0, 1] at n={n}")
        if n <= count:
            out[n - 1] = g
    return out


cdef object _as_array(obj):
    return np.ascontiguousarray(obj, dtype=np.float64).reshape(-1)
