# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the hot kernels.

Produces bit-identical results to ``_ref``: same 64-bit mixing, same
float operation order, and the Gaussian transform calls the identical
scipy (Cephes) inverse normal CDF.
"""

import numpy as np

cimport numpy as cnp
from scipy.special.cython_special cimport ndtri

cnp.import_array()

ctypedef unsigned long long u64

cdef u64 GAMMA = 0x9E3779B97F4A7C15ULL
cdef double INV53 = 2.0 ** -53


cdef inline u64 _mix64(u64 z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


def fill_u64(state, idx):
    cdef cnp.ndarray[cnp.int64_t, ndim=2, mode="c"] k = np.ascontiguousarray(idx, dtype=np.int64)
    cdef Py_ssize_t n = k.shape[0], m = k.shape[1]
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] out = np.empty(n, dtype=np.uint64)
    cdef u64 s = <u64> state
    cdef u64 h, w
    cdef Py_ssize_t i, j
    for i in range(n):
        h = s
        for j in range(m):
            w = (<u64> k[i, j]) + GAMMA * (<u64> (j + 1))
            h = _mix64(h ^ w)
        out[i] = _mix64(h)
    return out


def u64_to_uniform(u):
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] a = np.ascontiguousarray(u, dtype=np.uint64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(a.shape[0], dtype=np.float64)
    cdef Py_ssize_t i
    for i in range(a.shape[0]):
        out[i] = (<double> (a[i] >> 11) + 0.5) * INV53
    return out


def u64_to_rademacher(u, double sigma):
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] a = np.ascontiguousarray(u, dtype=np.uint64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(a.shape[0], dtype=np.float64)
    cdef Py_ssize_t i
    for i in range(a.shape[0]):
        out[i] = sigma if (a[i] >> 63) else -sigma
    return out


def u64_to_gaussian(u, double sigma):
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] a = np.ascontiguousarray(u, dtype=np.uint64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(a.shape[0], dtype=np.float64)
    cdef Py_ssize_t i
    for i in range(a.shape[0]):
        out[i] = sigma * ndtri((<double> (a[i] >> 11) + 0.5) * INV53)
    return out


def convolve_batch_1d(double[:, ::1] eps, Py_ssize_t b0,
                      long long[:, ::1] offs, double[::1] coeffs, Py_ssize_t n0):
    cdef Py_ssize_t reps = eps.shape[0], nt = coeffs.shape[0]
    out_arr = np.zeros((reps, n0), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t r, t, i, o0
    cdef double c
    for t in range(nt):
        c = coeffs[t]
        o0 = b0 - <Py_ssize_t> offs[t, 0]
        for r in range(reps):
            for i in range(n0):
                out[r, i] = out[r, i] + c * eps[r, i + o0]
    return out_arr


def convolve_batch_2d(double[:, :, ::1] eps, Py_ssize_t b0, Py_ssize_t b1,
                      long long[:, ::1] offs, double[::1] coeffs,
                      Py_ssize_t n0, Py_ssize_t n1):
    cdef Py_ssize_t reps = eps.shape[0], nt = coeffs.shape[0]
    out_arr = np.zeros((reps, n0, n1), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t r, t, i, j, o0, o1
    cdef double c
    for t in range(nt):
        c = coeffs[t]
        o0 = b0 - <Py_ssize_t> offs[t, 0]
        o1 = b1 - <Py_ssize_t> offs[t, 1]
        for r in range(reps):
            for i in range(n0):
                for j in range(n1):
                    out[r, i, j] = out[r, i, j] + c * eps[r, i + o0, j + o1]
    return out_arr


def convolve_batch_3d(double[:, :, :, ::1] eps, Py_ssize_t b0, Py_ssize_t b1, Py_ssize_t b2,
                      long long[:, ::1] offs, double[::1] coeffs,
                      Py_ssize_t n0, Py_ssize_t n1, Py_ssize_t n2):
    cdef Py_ssize_t reps = eps.shape[0], nt = coeffs.shape[0]
    out_arr = np.zeros((reps, n0, n1, n2), dtype=np.float64)
    cdef double[:, :, :, ::1] out = out_arr
    cdef Py_ssize_t r, t, i, j, k, o0, o1, o2
    cdef double c
    for t in range(nt):
        c = coeffs[t]
        o0 = b0 - <Py_ssize_t> offs[t, 0]
        o1 = b1 - <Py_ssize_t> offs[t, 1]
        o2 = b2 - <Py_ssize_t> offs[t, 2]
        for r in range(reps):
            for i in range(n0):
                for j in range(n1):
                    for k in range(n2):
                        out[r, i, j, k] = out[r, i, j, k] + c * eps[r, i + o0, j + o1, k + o2]
    return out_arr
