# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled ring sweep; the contract is defined by ``_pure.ring_analysis``.

Single pass in C over the ring: chain-vector lengths, interior angles with
orientation, neighbour chords, the windowed symmetry flags and the gated
pattern columns.  Kept in lockstep with the numpy fallback; the test suite
compares the two on every corpus.
"""

import numpy as np

from libc.math cimport atan2, fabs, sqrt

BACKEND_NAME = "compiled"


cdef inline Py_ssize_t _wrap(Py_ssize_t j, Py_ssize_t n) nogil:
    while j < 0:
        j += n
    while j >= n:
        j -= n
    return j


def ring_analysis(xs_in, ys_in, double eps_len, double eps_ang):
    xs_arr = np.ascontiguousarray(xs_in, dtype=np.float64)
    ys_arr = np.ascontiguousarray(ys_in, dtype=np.float64)
    cdef double[::1] xs = xs_arr
    cdef double[::1] ys = ys_arr
    cdef Py_ssize_t n = xs.shape[0]

    ulen_arr = np.empty(n, dtype=np.float64)
    alpha_arr = np.empty(n, dtype=np.float64)
    turn_arr = np.empty(n, dtype=np.int8)
    chord_arr = np.empty(n, dtype=np.float64)
    ang_eq_arr = np.zeros(n, dtype=np.uint8)
    turn_uni_arr = np.zeros(n, dtype=np.uint8)
    len_eq_arr = np.zeros(n, dtype=np.uint8)
    len_alt_arr = np.zeros(n, dtype=np.uint8)
    fam_arr = np.zeros(n, dtype=np.int8)
    var_arr = np.zeros(n, dtype=np.int8)

    cdef double[::1] ulen = ulen_arr
    cdef double[::1] alpha = alpha_arr
    cdef signed char[::1] turn = turn_arr
    cdef double[::1] chord = chord_arr
    cdef unsigned char[::1] ang_eq = ang_eq_arr
    cdef unsigned char[::1] turn_uni = turn_uni_arr
    cdef unsigned char[::1] len_eq = len_eq_arr
    cdef unsigned char[::1] len_alt = len_alt_arr
    cdef signed char[::1] fam = fam_arr
    cdef signed char[::1] var = var_arr

    cdef double[::1] ux = np.empty(n, dtype=np.float64)
    cdef double[::1] uy = np.empty(n, dtype=np.float64)

    cdef Py_ssize_t i, k, j, ip1, im1
    cdef double cross_u, dot_rays, cdx, cdy
    cdef double amax, amin, lmax, lmin, v
    cdef double am1, a0, ap1
    cdef signed char t0
    cdef bint uni, cyc, ok
    cdef signed char tw[7]
    cdef double lw[8]

    with nogil:
        for i in range(n):
            im1 = _wrap(i - 1, n)
            ux[i] = xs[i] - xs[im1]
            uy[i] = ys[i] - ys[im1]
            ulen[i] = sqrt(ux[i] * ux[i] + uy[i] * uy[i])

        for i in range(n):
            ip1 = _wrap(i + 1, n)
            im1 = _wrap(i - 1, n)
            cross_u = ux[i] * uy[ip1] - uy[i] * ux[ip1]
            dot_rays = (-ux[i]) * ux[ip1] + (-uy[i]) * uy[ip1]
            if ulen[i] <= eps_len or ulen[ip1] <= eps_len:
                alpha[i] = 0.0
                turn[i] = 0
            else:
                alpha[i] = atan2(fabs(cross_u), dot_rays)
                if fabs(cross_u) <= eps_ang * ulen[i] * ulen[ip1]:
                    turn[i] = 0
                elif cross_u > 0.0:
                    turn[i] = 1
                else:
                    turn[i] = -1
            cdx = xs[ip1] - xs[im1]
            cdy = ys[ip1] - ys[im1]
            chord[i] = sqrt(cdx * cdx + cdy * cdy)

        for i in range(n):
            # window flags over alpha[i-3..i+3], turn likewise, ulen[i-3..i+4]
            amax = -1.0
            amin = 1e300
            uni = True
            t0 = turn[_wrap(i - 3, n)]
            for k in range(7):
                j = _wrap(i - 3 + k, n)
                v = alpha[j]
                if v > amax:
                    amax = v
                if v < amin:
                    amin = v
                tw[k] = turn[j]
                if turn[j] != t0:
                    uni = False
            ang_eq[i] = 1 if (amax - amin) <= eps_ang else 0
            turn_uni[i] = 1 if uni else 0

            lmax = -1.0
            lmin = 1e300
            for k in range(8):
                j = _wrap(i - 3 + k, n)
                lw[k] = ulen[j]
                if lw[k] > lmax:
                    lmax = lw[k]
                if lw[k] < lmin:
                    lmin = lw[k]
            len_eq[i] = 1 if (lmax - lmin) <= eps_len else 0
            cyc = True
            for k in range(6):
                if fabs(lw[k] - lw[k + 2]) > eps_len:
                    cyc = False
                    break
            len_alt[i] = 1 if (cyc and fabs(lw[3] - lw[4]) > eps_len) else 0

            fam[i] = 0
            var[i] = 0
            if not ang_eq[i]:
                am1 = alpha[_wrap(i - 1, n)]
                a0 = alpha[i]
                ap1 = alpha[_wrap(i + 1, n)]
                if am1 > a0 + eps_ang and a0 <= ap1 + eps_ang:
                    fam[i] = 1
                    var[i] = 1
                elif am1 >= a0 - eps_ang and a0 < ap1 - eps_ang:
                    fam[i] = 1
                    var[i] = 2
            elif not turn_uni[i]:
                # tw offsets: tw[k] is turn at i-3+k, so offset o -> tw[o+3]
                ok = (
                    _same(tw[2], tw[4]) and _same(tw[4], tw[5]) and _opp(tw[4], tw[3])
                ) or (
                    _same(tw[1], tw[2]) and _same(tw[2], tw[4]) and _opp(tw[4], tw[3])
                )
                if ok:
                    fam[i] = 2
                    var[i] = 1
                else:
                    ok = (
                        _same(tw[2], tw[3]) and _opp(tw[3], tw[4])
                        and _same(tw[4], tw[5]) and _same(tw[5], tw[6])
                    ) or (
                        _same(tw[4], tw[3]) and _opp(tw[3], tw[2])
                        and _same(tw[2], tw[1]) and _same(tw[1], tw[0])
                    )
                    if ok:
                        fam[i] = 2
                        var[i] = 2
            else:
                # lw offsets: lw[k] is ulen at i-3+k, so offset o -> lw[o+3]
                ok = (
                    lw[3] <= lmin + eps_len
                    and lw[2] > lw[3] + eps_len
                    and lw[3] < lw[4] - eps_len
                    and lw[3] < lw[5] - eps_len
                ) or (
                    lw[4] <= lmin + eps_len
                    and lw[3] > lw[4] + eps_len
                    and lw[4] < lw[5] - eps_len
                    and lw[4] < lw[6] - eps_len
                )
                if ok:
                    fam[i] = 3
                    var[i] = 1
                else:
                    ok = (
                        fabs(lw[2] - lw[3]) <= eps_len and lw[3] < lw[4] - eps_len
                    ) or (
                        lw[3] > lw[4] + eps_len and fabs(lw[4] - lw[5]) <= eps_len
                    )
                    if ok:
                        fam[i] = 3
                        var[i] = 2

    return (
        ulen_arr,
        alpha_arr,
        turn_arr,
        chord_arr,
        ang_eq_arr.view(np.bool_),
        turn_uni_arr.view(np.bool_),
        len_eq_arr.view(np.bool_),
        len_alt_arr.view(np.bool_),
        fam_arr,
        var_arr,
    )


cdef inline bint _same(signed char a, signed char b) nogil:
    return a != 0 and a == b


cdef inline bint _opp(signed char a, signed char b) nogil:
    return a != 0 and b != 0 and a != b
