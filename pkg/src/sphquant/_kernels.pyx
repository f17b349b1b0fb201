# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled oracle hot loops; see ``_kernels_py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, sqrt, atan2, fabs, floor, fmod, INFINITY, M_PI

cnp.import_array()

cdef double TWO_PI = 6.283185307179586

cdef double C_TOL = 1e-12

cdef enum:
    MAX_CAND = 4
    C_HULL = 33
    C_CIRCLE = 512
    C_EXHAUSTIVE = 4096

HULL_SAMPLES = C_HULL
CIRCLE_SAMPLES = C_CIRCLE
EXHAUSTIVE_SAMPLES = C_EXHAUSTIVE
REFINE_CANDIDATES = MAX_CAND
TERNARY_TOL = C_TOL

BACKEND = "cython"


cdef inline double _round_half_even(double v) noexcept nogil:
    cdef double r = floor(v + 0.5)
    if r - v == 0.5 and fmod(r, 2.0) != 0.0:
        r -= 1.0
    return r


cdef inline double _sigma2(double d, double sin2, double cos_phi) noexcept nogil:
    cdef double w, half, sh, ch, s
    if cos_phi == 1.0:
        w = d - TWO_PI * _round_half_even(d / TWO_PI)
        return w * w
    half = 0.5 * d
    sh = fabs(sin(half))
    ch = cos(half)
    s = 2.0 * atan2(cos_phi * sh, sqrt(ch * ch + sin2 * sh * sh))
    return s * s


cdef inline double _objective(const double* x, int s, double t,
                              double sin2, double cos_phi) noexcept nogil:
    cdef double acc = 0.0
    cdef int j
    for j in range(s):
        acc += _sigma2(x[j] - t, sin2, cos_phi)
    return acc


cdef void _search(const double* x, int s, double lo, double hi, int samples,
                  bint circular, double sin2, double cos_phi, double* fbuf,
                  double* out_val, double* out_arg) noexcept nogil:
    cdef double width = hi - lo
    cdef double step
    cdef int k, left, right, c, pos, n_cand = 0
    cdef double fl, fr, t
    cdef int cand[MAX_CAND]
    cdef double cand_f[MAX_CAND]
    cdef double a, b, m1, m2, f1, f2, mid, fm
    cdef double best_val = INFINITY, best_arg = lo
    cdef double grid_best = INFINITY, grid_arg = lo

    if circular:
        step = width / samples
    else:
        step = width / (samples - 1)

    for k in range(samples):
        if circular:
            t = lo + width * (<double>k / samples)
        else:
            t = lo + width * (<double>k / (samples - 1))
        fbuf[k] = _objective(x, s, t, sin2, cos_phi)
        if fbuf[k] < grid_best:
            grid_best = fbuf[k]
            grid_arg = t

    # keep the MAX_CAND lowest discrete local minima, ties by index
    for k in range(samples):
        if circular:
            left = (k - 1 + samples) % samples
            right = (k + 1) % samples
            fl = fbuf[left]
            fr = fbuf[right]
        else:
            fl = fbuf[k - 1] if k > 0 else INFINITY
            fr = fbuf[k + 1] if k < samples - 1 else INFINITY
        if not (fbuf[k] <= fl and fbuf[k] <= fr):
            continue
        pos = n_cand
        while pos > 0 and cand_f[pos - 1] > fbuf[k]:
            pos -= 1
        if pos >= MAX_CAND:
            continue
        if n_cand < MAX_CAND:
            n_cand += 1
        c = n_cand - 1
        while c > pos:
            cand[c] = cand[c - 1]
            cand_f[c] = cand_f[c - 1]
            c -= 1
        cand[pos] = k
        cand_f[pos] = fbuf[k]

    for c in range(n_cand):
        if circular:
            t = lo + width * (<double>cand[c] / samples)
        else:
            t = lo + width * (<double>cand[c] / (samples - 1))
        a = t - step
        b = t + step
        if not circular:
            if a < lo:
                a = lo
            if b > hi:
                b = hi
        while b - a > C_TOL:
            m1 = a + (b - a) / 3.0
            m2 = b - (b - a) / 3.0
            f1 = _objective(x, s, m1, sin2, cos_phi)
            f2 = _objective(x, s, m2, sin2, cos_phi)
            if f1 < f2:
                b = m2
            else:
                a = m1
        mid = 0.5 * (a + b)
        fm = _objective(x, s, mid, sin2, cos_phi)
        if fm < best_val:
            best_val = fm
            best_arg = mid

    if grid_best < best_val:
        best_val = grid_best
        best_arg = grid_arg
    out_val[0] = best_val
    out_arg[0] = best_arg


cdef inline double _wrap_2pi(double v) noexcept nogil:
    cdef double r = fmod(v, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    return r


def minimize_representative(x, double sin_phi, double cos_phi, double lo,
                            double hi, int samples, bint circular):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xa = np.ascontiguousarray(x, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] fbuf = np.empty(samples)
    cdef double val, arg
    _search(&xa[0], xa.shape[0], lo, hi, samples, circular,
            sin_phi * sin_phi, cos_phi, &fbuf[0], &val, &arg)
    return float(val), float(arg)


def segment_costs(theta, double sin_phi, double cos_phi):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef int n_pts = th.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] cost = np.zeros((n_pts, n_pts + 1))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] rep = np.zeros((n_pts, n_pts + 1))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] unwrapped = np.concatenate([th, th + TWO_PI])
    cdef cnp.ndarray[cnp.float64_t, ndim=1] fbuf = np.empty(max(CIRCLE_SAMPLES, HULL_SAMPLES))
    cdef double sin2 = sin_phi * sin_phi
    cdef double span, val, arg
    cdef int i, s
    cdef double* u = &unwrapped[0]
    with nogil:
        for i in range(n_pts):
            rep[i, 1] = th[i]
            for s in range(2, n_pts + 1):
                span = u[i + s - 1] - u[i]
                if span < M_PI:
                    _search(u + i, s, u[i], u[i + s - 1], C_HULL, False,
                            sin2, cos_phi, &fbuf[0], &val, &arg)
                else:
                    _search(u + i, s, u[i], u[i] + TWO_PI, C_CIRCLE, True,
                            sin2, cos_phi, &fbuf[0], &val, &arg)
                cost[i, s] = val
                rep[i, s] = _wrap_2pi(arg)
    return cost, rep


def cyclic_partition(cost_in, int n):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] cost = np.ascontiguousarray(cost_in, dtype=np.float64)
    cdef int n_pts = cost.shape[0]
    if not 1 <= n <= n_pts:
        raise ValueError(f"need 1 <= n <= {n_pts}, got {n}")
    cdef cnp.ndarray[cnp.float64_t, ndim=2] dp = np.empty((n + 1, n_pts + 1))
    cdef cnp.ndarray[cnp.int64_t, ndim=2] back = np.zeros((n + 1, n_pts + 1), dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] best_back = np.zeros((n + 1, n_pts + 1), dtype=np.int64)
    cdef double best = INFINITY, v, cur
    cdef int best_cut = 0
    cdef int c, k, i, j, arg
    with nogil:
        for c in range(n_pts):
            for j in range(n_pts + 1):
                dp[0, j] = INFINITY
            dp[0, 0] = 0.0
            for k in range(1, n + 1):
                for j in range(n_pts + 1):
                    cur = INFINITY
                    arg = 0
                    for i in range(0, j):
                        v = dp[k - 1, i] + cost[(c + i) % n_pts, j - i]
                        if v < cur:
                            cur = v
                            arg = i
                    dp[k, j] = cur
                    back[k, j] = arg
            if dp[n, n_pts] < best:
                best = dp[n, n_pts]
                best_cut = c
                for k in range(n + 1):
                    for j in range(n_pts + 1):
                        best_back[k, j] = back[k, j]
    sizes = []
    j = n_pts
    for k in range(n, 0, -1):
        i = best_back[k, j]
        sizes.append(j - i)
        j = i
    sizes.reverse()
    return float(best), int(best_cut), sizes


def subset_costs(theta, double sin_phi, double cos_phi, int samples=C_EXHAUSTIVE):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef int n_pts = th.shape[0]
    cdef long size = 1 << n_pts
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cost = np.zeros(size)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rep = np.zeros(size)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] fbuf = np.empty(samples)
    cdef double buf[64]
    cdef double sin2 = sin_phi * sin_phi
    cdef double val, arg
    cdef long mask
    cdef int b, m
    if n_pts > 64:
        raise ValueError("too many points for subset enumeration")
    with nogil:
        for mask in range(1, size):
            m = 0
            for b in range(n_pts):
                if (mask >> b) & 1:
                    buf[m] = th[b]
                    m += 1
            if m == 1:
                rep[mask] = buf[0]
                continue
            _search(&buf[0], m, buf[0], buf[0] + TWO_PI, samples, True,
                    sin2, cos_phi, &fbuf[0], &val, &arg)
            cost[mask] = val
            rep[mask] = _wrap_2pi(arg)
    return cost, rep
