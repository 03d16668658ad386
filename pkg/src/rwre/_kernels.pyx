#cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: the hot loops behind :mod:`rwre.kernels`.

Mirrors ``_kernels_py`` exactly, including random-stream consumption (one
uniform per step pulled straight off the Philox bit generator), so results
are bit-identical across backends.
"""

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport exp, INFINITY

import numpy as np

cimport numpy as cnp
from numpy.random cimport bitgen_t

cnp.import_array()

BACKEND = "compiled"

OK = 0
CAPPED = 1
LEFT_EXHAUSTED = 2

cdef int _OK = 0
cdef int _CAPPED = 1
cdef int _LEFT = 2

cdef long long _SENTINEL = -(2 ** 62)


cdef inline bitgen_t* _rng(object bit_generator):
    return <bitgen_t*> PyCapsule_GetPointer(bit_generator.capsule, "BitGenerator")


def walk_hit(const double[::1] omega, long long lo, long long start,
             long long target, long long cap, bit_generator):
    """Step the chain from `start` until `target` (right of start) or `cap`.

    Returns (pos, steps, min_site, max_site, status).
    """
    cdef bitgen_t* rng = _rng(bit_generator)
    cdef long long pos = start, t = 0, mn = start, mx = start
    cdef int status = _OK
    cdef double u
    with nogil:
        while pos != target:
            if t >= cap:
                status = _CAPPED
                break
            u = rng.next_double(rng.state)
            if u < omega[pos - lo]:
                pos += 1
                if pos > mx:
                    mx = pos
            else:
                pos -= 1
                if pos < mn:
                    mn = pos
                if pos < lo:
                    status = _LEFT
                    break
            t += 1
    return pos, t, mn, mx, status


def walk_fixed(const double[::1] omega, long long lo, long long start,
               long long nsteps, bit_generator):
    """Step the chain exactly `nsteps` times.

    Returns (pos, steps_done, min_site, max_site, status).
    """
    cdef bitgen_t* rng = _rng(bit_generator)
    cdef long long pos = start, t = 0, mn = start, mx = start
    cdef int status = _OK
    cdef double u
    with nogil:
        while t < nsteps:
            u = rng.next_double(rng.state)
            if u < omega[pos - lo]:
                pos += 1
                if pos > mx:
                    mx = pos
            else:
                pos -= 1
                if pos < mn:
                    mn = pos
                if pos < lo:
                    status = _LEFT
                    break
            t += 1
    return pos, t, mn, mx, status


def walk_coupled(const double[::1] omega, long long lo, const long long[::1] nu, long long b,
                 long long start, long long target, long long cap, bit_generator):
    """Plain walk and its backtrack-limited companion on one uniform stream.

    Returns (t_plain, t_ref, div_step, min_site, max_site, violations,
    status_plain, status_ref).
    """
    cdef bitgen_t* rng = _rng(bit_generator)
    cdef long long xp = start, xr = start, t = 0, mn = start, mx = start
    cdef long long t_plain = -1, t_ref = -1, div_step = -1, violations = 0
    cdef int status_p = _OK, status_r = _OK
    cdef long long n_nu = nu.shape[0]
    cdef long long k = np.searchsorted(np.asarray(nu), start, side="right") - 1
    cdef long long next_nu = k + 1
    cdef long long reflect_site = nu[k - b] if k - b >= 0 else _SENTINEL
    cdef double u
    with nogil:
        while t_plain < 0 or t_ref < 0:
            if t >= cap:
                if t_plain < 0:
                    status_p = _CAPPED
                    t_plain = cap
                if t_ref < 0:
                    status_r = _CAPPED
                    t_ref = cap
                break
            u = rng.next_double(rng.state)
            if t_ref < 0:
                if xr == reflect_site:
                    xr += 1
                elif u < omega[xr - lo]:
                    xr += 1
                else:
                    xr -= 1
                    if xr < lo:
                        status_r = _LEFT
                        status_p = _LEFT
                        break
                if xr > mx:
                    mx = xr
                while next_nu < n_nu and xr == nu[next_nu]:
                    k = next_nu
                    next_nu += 1
                    if k - b >= 0:
                        reflect_site = nu[k - b]
            if t_plain < 0:
                if u < omega[xp - lo]:
                    xp += 1
                else:
                    xp -= 1
                    if xp < mn:
                        mn = xp
                    if xp < lo:
                        status_p = _LEFT
                        break
            t += 1
            if t_ref < 0 and t_plain < 0:
                if div_step < 0 and xr != xp:
                    div_step = t
                if xr < xp:
                    violations += 1
            if t_ref < 0 and xr == target:
                t_ref = t
            if t_plain < 0 and xp == target:
                t_plain = t
    return t_plain, t_ref, div_step, mn, mx, violations, status_p, status_r


def w_forward(const double[::1] rho, double w_seed, double[::1] out):
    """Potential sums W_j = rho_j (1 + W_{j-1}) along `rho`."""
    cdef Py_ssize_t i, n = rho.shape[0]
    cdef double w = w_seed
    with nogil:
        for i in range(n):
            w = rho[i] * (1.0 + w)
            out[i] = w


def wv_forward(const double[::1] rho, double w_seed, double v_seed,
               double[::1] w_out, double[::1] v_out):
    """Joint recursion for W_j and V_j = rho_j (W + W^2 + V)_{j-1}."""
    cdef Py_ssize_t i, n = rho.shape[0]
    cdef double w = w_seed, v = v_seed, r
    with nogil:
        for i in range(n):
            r = rho[i]
            v = r * (w + w * w + v)
            w = r * (1.0 + w)
            w_out[i] = w
            v_out[i] = v


def ladder_scan(const double[::1] logrho, double tie_tol, double cum, double blockmax,
                long long[::1] nu_rel_out, double[::1] mlog_out, long long max_count):
    """Scan one chunk of log rho for ladder points (see python twin)."""
    cdef Py_ssize_t i = 0, n = logrho.shape[0]
    cdef long long found = 0
    with nogil:
        while i < n:
            cum += logrho[i]
            if cum > blockmax:
                blockmax = cum
            if cum < -tie_tol:
                nu_rel_out[found] = i + 1
                mlog_out[found] = blockmax
                found += 1
                cum = 0.0
                blockmax = -INFINITY
                if found >= max_count:
                    i += 1
                    break
            i += 1
    return found, cum, blockmax, i


def block_local_sums(const double[::1] rho, const long long[::1] bounds, double[::1] wend,
                     double[::1] suml, double[::1] sumpi, double[::1] pip):
    """Per-block W/product accumulations restarted at each block."""
    cdef Py_ssize_t bidx, j, nb = bounds.shape[0] - 1
    cdef double w, sw, p, sp, r
    with nogil:
        for bidx in range(nb):
            w = 0.0
            sw = 0.0
            p = 1.0
            sp = 0.0
            for j in range(bounds[bidx], bounds[bidx + 1]):
                r = rho[j]
                w = r * (1.0 + w)
                p *= r
                sw += w
                sp += p
            wend[bidx] = w
            suml[bidx] = sw
            sumpi[bidx] = sp
            pip[bidx] = p


def block_stats(const double[::1] rho, const long long[::1] starts, const double[::1] w_seeds,
                const double[::1] v_seeds, const long long[::1] blk_lo, const long long[::1] blk_hi,
                double[::1] mu_out, double[::1] sig_out):
    """Per-block crossing mean/variance under per-block left boundaries."""
    cdef Py_ssize_t bidx, nb = starts.shape[0]
    cdef long long j, lo, hi
    cdef double w, v, mu, sig, r
    with nogil:
        for bidx in range(nb):
            w = w_seeds[bidx]
            v = v_seeds[bidx]
            lo = blk_lo[bidx]
            hi = blk_hi[bidx]
            mu = 0.0
            sig = 0.0
            for j in range(starts[bidx], hi + 1):
                r = rho[j]
                v = r * (w + w * w + v)
                w = r * (1.0 + w)
                if j >= lo:
                    mu += 1.0 + 2.0 * w
                    sig += 4.0 * (w + w * w) + 8.0 * v
            mu_out[bidx] = mu
            sig_out[bidx] = sig


def localization_expectations(const double[::1] lens, const double[::1] suml,
                              const double[::1] sumpi, const double[::1] wend,
                              const double[::1] pip, const double[::1] plog,
                              const double[::1] cinf, const long long[::1] b_of,
                              double[::1] e_out):
    """Reflected expected hitting times of ladder points (see python twin)."""
    cdef Py_ssize_t J = lens.shape[0] - 1
    cdef long long j, i, ell, inext, b, b_prev
    cdef double S, e_acc, c, mu, drop
    cdef bint s_valid
    b_prev = -1
    S = 0.0
    s_valid = False
    e_acc = 0.0
    inext = 1
    with nogil:
        for j in range(2, J + 1):
            b = b_of[j]
            if b != b_prev:
                b_prev = b
                S = 0.0
                s_valid = False
                e_acc = 0.0
                inext = 1
            while inext < j:
                i = inext
                if b == 0:
                    mu = lens[i] + 2.0 * (suml[i] - sumpi[i])
                elif i <= b:
                    c = cinf[i]
                    mu = lens[i] + 2.0 * (suml[i] + c * sumpi[i])
                else:
                    if not s_valid:
                        S = 0.0
                        for ell in range(i - b, i):
                            S = pip[ell] * S + wend[ell]
                        s_valid = True
                    else:
                        drop = wend[i - 1 - b] * exp(plog[i - 2] - plog[i - 1 - b])
                        S = pip[i - 1] * (S - drop) + wend[i - 1]
                    c = S - exp(plog[i - 1] - plog[i - b - 1])
                    if c < 0.0:
                        c = 0.0
                    mu = lens[i] + 2.0 * (suml[i] + c * sumpi[i])
                e_acc += mu
                inext += 1
            e_out[j] = e_acc
