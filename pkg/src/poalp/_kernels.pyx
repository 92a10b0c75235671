# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled profile-enumeration kernels. Same contract as _kernels_py."""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


cdef inline void _decode(Py_ssize_t p, Py_ssize_t n, const Py_ssize_t[::1] n_actions,
                         Py_ssize_t* act) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(n - 1, -1, -1):
        act[i] = p % n_actions[i]
        p = p // n_actions[i]


cdef inline void _loads(Py_ssize_t n, Py_ssize_t m, const unsigned char[:, :, ::1] masks,
                        Py_ssize_t* act, Py_ssize_t* loads) noexcept nogil:
    cdef Py_ssize_t i, r
    for r in range(m):
        loads[r] = 0
    for i in range(n):
        for r in range(m):
            loads[r] += masks[i, act[i], r]


def n_profiles(const Py_ssize_t[::1] n_actions):
    cdef Py_ssize_t i, total = 1
    for i in range(n_actions.shape[0]):
        total *= n_actions[i]
    return total


def evaluate_profiles(const double[::1] values, const unsigned char[:, :, ::1] masks,
                      const Py_ssize_t[::1] n_actions, const double[::1] wpad,
                      const double[::1] fpad, double eps):
    """Welfare, Nash flag and utility sum of every joint profile."""
    cdef Py_ssize_t n = masks.shape[0], m = masks.shape[2]
    cdef Py_ssize_t P = n_profiles(n_actions)
    welfare_arr = np.empty(P, dtype=np.float64)
    nash_arr = np.empty(P, dtype=np.uint8)
    usum_arr = np.empty(P, dtype=np.float64)
    cdef double[::1] welfare = welfare_arr
    cdef unsigned char[::1] nash = nash_arr
    cdef double[::1] usum = usum_arr
    cdef Py_ssize_t[::1] act = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] loads = np.empty(m, dtype=np.intp)
    cdef Py_ssize_t p, i, k, r, ai
    cdef double wsum, u_cur, u_alt, total_u
    cdef bint ok
    with nogil:
        for p in range(P):
            _decode(p, n, n_actions, &act[0])
            _loads(n, m, masks, &act[0], &loads[0])
            wsum = 0.0
            for r in range(m):
                if loads[r] > 0:
                    wsum += values[r] * wpad[loads[r]]
            welfare[p] = wsum
            ok = True
            total_u = 0.0
            for i in range(n):
                ai = act[i]
                u_cur = 0.0
                for r in range(m):
                    if masks[i, ai, r]:
                        u_cur += values[r] * fpad[loads[r]]
                total_u += u_cur
                if ok:
                    for k in range(n_actions[i]):
                        if k == ai:
                            continue
                        u_alt = 0.0
                        for r in range(m):
                            if masks[i, k, r]:
                                u_alt += values[r] * fpad[loads[r] - masks[i, ai, r] + 1]
                        if u_alt > u_cur + eps:
                            ok = False
                            break
            nash[p] = ok
            usum[p] = total_u
    return welfare_arr, nash_arr.astype(bool), usum_arr


def deviation_table(const double[::1] values, const unsigned char[:, :, ::1] masks,
                    const Py_ssize_t[::1] n_actions, const double[::1] wpad,
                    const double[::1] fpad):
    """Welfare per profile and udev[p, i, k] = U_i(k, a_-i) at profile p."""
    cdef Py_ssize_t n = masks.shape[0], kmax = masks.shape[1], m = masks.shape[2]
    cdef Py_ssize_t P = n_profiles(n_actions)
    welfare_arr = np.empty(P, dtype=np.float64)
    udev_arr = np.full((P, n, kmax), -np.inf, dtype=np.float64)
    cdef double[::1] welfare = welfare_arr
    cdef double[:, :, ::1] udev = udev_arr
    cdef Py_ssize_t[::1] act = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] loads = np.empty(m, dtype=np.intp)
    cdef Py_ssize_t p, i, k, r, ai
    cdef double wsum, u
    with nogil:
        for p in range(P):
            _decode(p, n, n_actions, &act[0])
            _loads(n, m, masks, &act[0], &loads[0])
            wsum = 0.0
            for r in range(m):
                if loads[r] > 0:
                    wsum += values[r] * wpad[loads[r]]
            welfare[p] = wsum
            for i in range(n):
                ai = act[i]
                for k in range(n_actions[i]):
                    u = 0.0
                    for r in range(m):
                        if masks[i, k, r]:
                            u += values[r] * fpad[loads[r] - masks[i, ai, r] + 1]
                    udev[p, i, k] = u
    return welfare_arr, udev_arr
