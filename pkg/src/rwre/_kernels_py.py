"""Pure-Python kernels: reference implementations of the hot loops.

These are the fallback backend behind :mod:`rwre.kernels`.  Each function is
a line-for-line counterpart of the compiled version in ``_kernels.pyx`` and
consumes the random stream in exactly the same order (one uniform per step),
so walks are bit-identical across backends.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.random import Generator

BACKEND = "python"

# walk status codes
OK = 0
CAPPED = 1
LEFT_EXHAUSTED = 2

_SENTINEL = -(2 ** 62)


def walk_hit(omega, lo, start, target, cap, bit_generator):
    """Step the chain from `start` until `target` (right of start) or `cap`.

    Returns (pos, steps, min_site, max_site, status).
    """
    gen = Generator(bit_generator)
    rand = gen.random
    pos = start
    t = 0
    mn = start
    mx = start
    status = OK
    while pos != target:
        if t >= cap:
            status = CAPPED
            break
        u = rand()
        if u < omega[pos - lo]:
            pos += 1
            if pos > mx:
                mx = pos
        else:
            pos -= 1
            if pos < mn:
                mn = pos
            if pos < lo:
                status = LEFT_EXHAUSTED
                break
        t += 1
    return pos, t, mn, mx, status


def walk_fixed(omega, lo, start, nsteps, bit_generator):
    """Step the chain exactly `nsteps` times.

    Returns (pos, steps_done, min_site, max_site, status).
    """
    gen = Generator(bit_generator)
    rand = gen.random
    pos = start
    mn = start
    mx = start
    status = OK
    t = 0
    while t < nsteps:
        u = rand()
        if u < omega[pos - lo]:
            pos += 1
            if pos > mx:
                mx = pos
        else:
            pos -= 1
            if pos < mn:
                mn = pos
            if pos < lo:
                status = LEFT_EXHAUSTED
                break
        t += 1
    return pos, t, mn, mx, status


def walk_coupled(omega, lo, nu, b, start, target, cap, bit_generator):
    """Drive the plain walk and its backtrack-limited companion with one
    shared uniform per time step.

    The companion turns the site nu[k-b] reflecting once it has reached
    ladder nu[k]; it therefore dominates the plain walk pathwise.  Returns
    (t_plain, t_ref, div_step, min_site, max_site, violations,
    status_plain, status_ref); div_step is -1 while the two walks never
    separated.
    """
    gen = Generator(bit_generator)
    rand = gen.random
    xp = start
    xr = start
    t = 0
    mn = start
    mx = start
    t_plain = -1
    t_ref = -1
    div_step = -1
    violations = 0
    status_p = OK
    status_r = OK
    n_nu = len(nu)
    # ladder index already attained by the companion walk
    k = int(np.searchsorted(nu, start, side="right")) - 1
    next_nu = k + 1
    reflect_site = nu[k - b] if k - b >= 0 else _SENTINEL

    while t_plain < 0 or t_ref < 0:
        if t >= cap:
            if t_plain < 0:
                status_p = CAPPED
                t_plain = cap
            if t_ref < 0:
                status_r = CAPPED
                t_ref = cap
            break
        u = rand()
        if t_ref < 0:
            if xr == reflect_site:
                xr += 1
            elif u < omega[xr - lo]:
                xr += 1
            else:
                xr -= 1
                if xr < lo:
                    status_r = LEFT_EXHAUSTED
                    status_p = LEFT_EXHAUSTED
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
                    status_p = LEFT_EXHAUSTED
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


def w_forward(rho, w_seed, out):
    """Potential sums W_j = rho_j (1 + W_{j-1}) along `rho`."""
    w = w_seed
    for i in range(len(rho)):
        w = rho[i] * (1.0 + w)
        out[i] = w


def wv_forward(rho, w_seed, v_seed, w_out, v_out):
    """Joint recursion for W_j and the variance companion
    V_j = rho_j (W_{j-1} + W_{j-1}^2 + V_{j-1})."""
    w = w_seed
    v = v_seed
    for i in range(len(rho)):
        r = rho[i]
        v = r * (w + w * w + v)
        w = r * (1.0 + w)
        w_out[i] = w
        v_out[i] = v


def ladder_scan(logrho, tie_tol, cum, blockmax, nu_rel_out, mlog_out, max_count):
    """Scan one chunk of log rho for ladder points.

    `cum` and `blockmax` carry the running log prefix product of the current
    block and its running maximum between chunks.  A site whose cumulative
    product drops strictly below 1 (log below -tie_tol) closes the block;
    the *next* site index is the ladder point.  Returns
    (found, cum, blockmax, consumed).
    """
    found = 0
    n = len(logrho)
    i = 0
    while i < n:
        cum += logrho[i]
        if cum > blockmax:
            blockmax = cum
        if cum < -tie_tol:
            nu_rel_out[found] = i + 1
            mlog_out[found] = blockmax
            found += 1
            cum = 0.0
            blockmax = -math.inf
            if found >= max_count:
                i += 1
                break
        i += 1
    return found, cum, blockmax, i


def block_local_sums(rho, bounds, wend, suml, sumpi, pip):
    """Per-block accumulations with the recursion restarted at each block.

    bounds[i]..bounds[i+1]-1 are the sites of block i (relative indices into
    `rho`).  Outputs per block: W at the last site (wend), the sum of W over
    the block (suml), the sum of prefix products from the block start
    (sumpi), and the full block product (pip, < 1 by the ladder property).
    """
    nb = len(bounds) - 1
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


def block_stats(rho, starts, w_seeds, v_seeds, blk_lo, blk_hi, mu_out, sig_out):
    """Per-block crossing mean and variance under a per-block left boundary.

    For each block, the W/V recursion runs from `starts[i]` (the site after
    the block's reflection point, or the window edge) with the given seeds;
    sites at or past blk_lo[i] accumulate the crossing mean 1 + 2 W_j and
    the crossing variance 4 (W_j + W_j^2) + 8 V_j.
    """
    for bidx in range(len(starts)):
        w = w_seeds[bidx]
        v = v_seeds[bidx]
        lo = blk_lo[bidx]
        mu = 0.0
        sig = 0.0
        for j in range(starts[bidx], blk_hi[bidx] + 1):
            r = rho[j]
            v = r * (w + w * w + v)
            w = r * (1.0 + w)
            if j >= lo:
                mu += 1.0 + 2.0 * w
                sig += 4.0 * (w + w * w) + 8.0 * v
        mu_out[bidx] = mu
        sig_out[bidx] = sig


def localization_expectations(lens, suml, sumpi, wend, pip, plog, cinf,
                              b_of, e_out):
    """Reflected expected hitting times of each ladder point from the origin.

    e_out[j] = sum_{i<j} mu_i(b_of[j]) where mu_i(b) is the expected
    crossing of block i for the walk whose backtracking is cut b blocks
    back.  Arrays are 1-based on block index; e_out[0] and e_out[1] are 0.
    Worst case O(sum over radius changes of the change position); the
    carried sums make each additional block O(1).
    """
    J = len(lens) - 1
    exp = math.exp
    b_prev = -1
    S = 0.0
    s_valid = False
    e_acc = 0.0
    inext = 1
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
                # reflection at the block's own first site: prefix products
                # from the block start drop out of every W in the block
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
