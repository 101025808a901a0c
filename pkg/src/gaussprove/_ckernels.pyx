# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled sparse row kernels, same interface as ``_pykernels``.

Arithmetic goes straight to GMP on the mpq payloads, skipping the Python
number protocol.  Non-mpq coefficients are converted on entry.
"""
from cpython.dict cimport PyDict_GetItem, PyDict_Next
from cpython.object cimport PyObject
from libc.stdlib cimport malloc, free
from libc.math cimport fabs
from gmpy2 cimport import_gmpy2, mpq, MPQ, MPQ_Check, GMPy_MPQ_New, mpq_ptr, mpq_srcptr

cdef extern from "gmp.h":
    void mpq_add(mpq_ptr, mpq_srcptr, mpq_srcptr)
    void mpq_sub(mpq_ptr, mpq_srcptr, mpq_srcptr)
    void mpq_mul(mpq_ptr, mpq_srcptr, mpq_srcptr)
    void mpq_neg(mpq_ptr, mpq_srcptr)
    int mpq_sgn(mpq_srcptr)
    int mpq_cmp_si(mpq_srcptr, long, unsigned long)

import_gmpy2()


cdef inline mpq _q(object x):
    if MPQ_Check(x):
        return <mpq>x
    return mpq(x)


cdef inline int _unit(mpq c):
    # +1 / -1 / 0 for "c is 1", "c is -1", anything else
    if mpq_cmp_si(MPQ(c), 1, 1) == 0:
        return 1
    if mpq_cmp_si(MPQ(c), -1, 1) == 0:
        return -1
    return 0


cdef inline mpq _term(mpq c, mpq v, int unit):
    if unit == 1:
        return v
    cdef mpq r = GMPy_MPQ_New(NULL)
    if unit == -1:
        mpq_neg(MPQ(r), MPQ(v))
    else:
        mpq_mul(MPQ(r), MPQ(c), MPQ(v))
    return r


cdef inline mpq _fma(mpq x, mpq c, mpq v, int unit):
    cdef mpq r = GMPy_MPQ_New(NULL)
    if unit == 1:
        mpq_add(MPQ(r), MPQ(x), MPQ(v))
    elif unit == -1:
        mpq_sub(MPQ(r), MPQ(x), MPQ(v))
    else:
        mpq_mul(MPQ(r), MPQ(c), MPQ(v))
        mpq_add(MPQ(r), MPQ(x), MPQ(r))
    return r


cdef void _axpy(dict dst, dict src, mpq c, list added, list removed) except *:
    cdef int unit = _unit(c)
    cdef PyObject* p
    cdef mpq r
    cdef Py_ssize_t pos = 0
    cdef PyObject* kp
    cdef PyObject* vp
    if not mpq_sgn(MPQ(c)):
        return
    while PyDict_Next(src, &pos, &kp, &vp):
        k = <object>kp
        v = <object>vp
        p = PyDict_GetItem(dst, k)
        if p == NULL:
            dst[k] = _term(c, _q(v), unit)
            if added is not None:
                added.append(k)
        else:
            r = _fma(_q(<object>p), c, _q(v), unit)
            if mpq_sgn(MPQ(r)):
                dst[k] = r
            else:
                del dst[k]
                if removed is not None:
                    removed.append(k)


def axpy(dict dst, dict src, c):
    """dst += c * src, in place."""
    _axpy(dst, src, _q(c), None, None)


def axpy_track(dict dst, dict src, c, list added, list removed):
    _axpy(dst, src, _q(c), added, removed)


def scaled(dict src, c):
    cdef mpq cq = _q(c)
    cdef int unit = _unit(cq)
    if not mpq_sgn(MPQ(cq)):
        return {}
    return {k: _term(cq, _q(v), unit) for k, v in src.items()}


def reduce_full(dict form, dict pivots):
    cdef PyObject* p
    cdef mpq c
    hits = [k for k in form if k in pivots]
    for k in hits:
        p = PyDict_GetItem(form, k)
        if p == NULL:
            continue
        c = GMPy_MPQ_New(NULL)
        mpq_neg(MPQ(c), MPQ(_q(<object>p)))
        _axpy(form, <dict>pivots[k], c, None, None)
    return form


def substitute(dict form, key, dict repl):
    c = form.pop(key, None)
    if c is not None:
        _axpy(form, repl, _q(c), None, None)
    return form


# ---------------------------------------------------------------- dense float simplex

cdef void _pivot_dense(double* T, double* rhs, double* d, int* nz, int m, int W, int r, int j) noexcept:
    cdef double* Tr = T + <Py_ssize_t>r * W
    cdef double p = Tr[j]
    cdef double f
    cdef double* Ti
    cdef int i, k, cnt = 0
    for k in range(W):
        if Tr[k] != 0.0:
            Tr[k] /= p
            nz[cnt] = k
            cnt += 1
    rhs[r] /= p
    for i in range(m):
        if i == r:
            continue
        Ti = T + <Py_ssize_t>i * W
        f = Ti[j]
        if f != 0.0:
            for k in range(cnt):
                Ti[nz[k]] -= f * Tr[nz[k]]
            Ti[j] = 0.0
            rhs[i] -= f * rhs[r]
    if d != NULL:
        f = d[j]
        if f != 0.0:
            for k in range(cnt):
                d[nz[k]] -= f * Tr[nz[k]]
            d[j] = 0.0


cdef int _run(double* T, double* rhs, double* d, int* basis, int* nz, int m, int n, int W, long max_iter, long* it) noexcept:
    cdef int stall = 0, i, j, k, r
    cdef double best, a, t, q
    while True:
        j = -1
        if stall > 50:
            for k in range(n):
                if d[k] < -1e-9:
                    j = k
                    break
        else:
            best = -1e-9
            for k in range(n):
                if d[k] < best:
                    j = k
                    best = d[k]
        if j < 0:
            return 0
        r = -1
        q = 0.0
        for i in range(m):
            a = T[<Py_ssize_t>i * W + j]
            if a > 1e-9:
                t = rhs[i] / a
                if r < 0 or t < q - 1e-12 or (t <= q + 1e-12 and basis[i] < basis[r]):
                    r = i
                    q = t
        if r < 0:
            return 2
        if q <= 1e-12:
            stall += 1
        else:
            stall = 0
        _pivot_dense(T, rhs, d, nz, m, W, r, j)
        basis[r] = j
        it[0] += 1
        if it[0] > max_iter:
            return 2


cdef list _primal(double* rhs, int* basis, int m, int n):
    x = [0.0] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = rhs[i]
    return x


def float_simplex(A, b, c, int m, int n, long max_iter, crash=None):
    cdef int W = n + m
    cdef double* T = <double*>malloc(<Py_ssize_t>m * W * sizeof(double))
    cdef double* rhs = <double*>malloc(m * sizeof(double))
    cdef double* d = <double*>malloc(W * sizeof(double))
    cdef int* basis = <int*>malloc(m * sizeof(int))
    cdef int* nz = <int*>malloc(W * sizeof(int))
    cdef const double[::1] Av = A
    cdef const double[::1] bv = b
    cdef const double[::1] cv
    cdef int i, j, k, status
    cdef long it = 0
    cdef double sg, cb, scale = 1.0, art
    if T == NULL or rhs == NULL or d == NULL or basis == NULL or nz == NULL:
        free(T); free(rhs); free(d); free(basis); free(nz)
        raise MemoryError()
    try:
        for i in range(m):
            sg = -1.0 if bv[i] < 0 else 1.0
            for j in range(n):
                T[<Py_ssize_t>i * W + j] = sg * Av[<Py_ssize_t>i * n + j]
            for j in range(n, W):
                T[<Py_ssize_t>i * W + j] = 0.0
            T[<Py_ssize_t>i * W + n + i] = 1.0
            rhs[i] = sg * bv[i]
            scale += rhs[i]
            basis[i] = n + i if crash is None or crash[i] < 0 else crash[i]
        for j in range(W):
            d[j] = 0.0
        for i in range(m):
            if basis[i] >= n:
                for j in range(n):
                    d[j] -= T[<Py_ssize_t>i * W + j]
        for i in range(m):
            if basis[i] < n:
                d[basis[i]] = 0.0
        if _run(T, rhs, d, basis, nz, m, n, W, max_iter, &it) != 0:
            return 2, None, it
        art = 0.0
        for i in range(m):
            if basis[i] >= n:
                art += rhs[i]
        if art > 1e-7 * scale:
            return 1, None, it
        for i in range(m):
            if basis[i] >= n:
                for j in range(n):
                    if fabs(T[<Py_ssize_t>i * W + j]) > 1e-9:
                        _pivot_dense(T, rhs, NULL, nz, m, W, i, j)
                        basis[i] = j
                        break
        if c is None:
            return 0, _primal(rhs, basis, m, n), it
        cv = c
        for j in range(n):
            d[j] = cv[j]
        for j in range(n, W):
            d[j] = 0.0
        for i in range(m):
            if basis[i] < n:
                cb = cv[basis[i]]
                if cb != 0.0:
                    for k in range(W):
                        d[k] -= cb * T[<Py_ssize_t>i * W + k]
        for i in range(m):
            d[basis[i]] = 0.0
        if _run(T, rhs, d, basis, nz, m, n, W, max_iter, &it) != 0:
            return 2, None, it
        return 0, _primal(rhs, basis, m, n), it
    finally:
        free(T); free(rhs); free(d); free(basis); free(nz)
