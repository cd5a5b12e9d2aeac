# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled contraction kernels; same contract as ``_pykernels``."""
import numpy as np

DEF MAXP = 64


def pi_kernel(const double[:, ::1] cpt, cards, list msgs):
    cdef Py_ssize_t rows = cpt.shape[0], k = cpt.shape[1]
    cdef int n = len(cards)
    if n > MAXP:
        raise ValueError("too many parents")
    cdef const double* ptr[MAXP]
    cdef int card[MAXP]
    cdef int digit[MAXP]
    cdef const double[::1] mv
    cdef int j
    for j in range(n):
        mv = msgs[j]
        ptr[j] = &mv[0]
        card[j] = cards[j]
        digit[j] = 0
    out_arr = np.zeros(k)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t r, x
    cdef double w
    for r in range(rows):
        w = 1.0
        for j in range(n):
            w *= ptr[j][digit[j]]
        if w != 0.0:
            for x in range(k):
                out[x] += w * cpt[r, x]
        j = n - 1
        while j >= 0:
            digit[j] += 1
            if digit[j] < card[j]:
                break
            digit[j] = 0
            j -= 1
    return out_arr


def lambda_kernel(const double[:, ::1] cpt, cards, list msgs, const double[::1] lam, int i):
    cdef Py_ssize_t rows = cpt.shape[0], k = cpt.shape[1]
    cdef int n = len(cards)
    if n > MAXP:
        raise ValueError("too many parents")
    cdef const double* ptr[MAXP]
    cdef int card[MAXP]
    cdef int digit[MAXP]
    cdef const double[::1] mv
    cdef int j
    for j in range(n):
        if j != i:
            mv = msgs[j]
            ptr[j] = &mv[0]
        card[j] = cards[j]
        digit[j] = 0
    out_arr = np.zeros(card[i])
    cdef double[::1] out = out_arr
    cdef Py_ssize_t r, x
    cdef double w, s
    for r in range(rows):
        w = 1.0
        for j in range(n):
            if j != i:
                w *= ptr[j][digit[j]]
        if w != 0.0:
            s = 0.0
            for x in range(k):
                s += cpt[r, x] * lam[x]
            out[digit[i]] += w * s
        j = n - 1
        while j >= 0:
            digit[j] += 1
            if digit[j] < card[j]:
                break
            digit[j] = 0
            j -= 1
    return out_arr
