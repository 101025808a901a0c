"""Pure-Python sparse row kernels.

Rows are plain dicts mapping integer variable keys to ``gmpy2.mpq``
coefficients; zero coefficients are never stored.  The compiled module
``_ckernels`` exposes exactly the same functions.
"""


def axpy(dst, src, c):
    """dst += c * src, in place."""
    if not c:
        return
    for k, v in src.items():
        x = dst.get(k)
        if x is None:
            dst[k] = c * v
        else:
            x = x + c * v
            if x:
                dst[k] = x
            else:
                del dst[k]


def axpy_track(dst, src, c, added, removed):
    """Like :func:`axpy` but reports keys that appeared in or vanished from dst."""
    if not c:
        return
    for k, v in src.items():
        x = dst.get(k)
        if x is None:
            dst[k] = c * v
            added.append(k)
        else:
            x = x + c * v
            if x:
                dst[k] = x
            else:
                del dst[k]
                removed.append(k)


def scaled(src, c):
    if not c:
        return {}
    return {k: c * v for k, v in src.items()}


def reduce_full(form, pivots):
    """Eliminate every pivot key from ``form`` in place.

    ``pivots`` maps a pivot key to a row whose pivot coefficient is 1 and
    which contains no other pivot key, so one pass over the keys suffices.
    """
    hits = [k for k in form if k in pivots]
    for k in hits:
        c = form.get(k)
        if c:
            axpy(form, pivots[k], -c)
    return form


def substitute(form, key, repl):
    """Replace ``key`` by the form ``repl`` inside ``form`` (in place)."""
    c = form.pop(key, None)
    if c is not None:
        axpy(form, repl, c)
    return form


def float_simplex(A, b, c, m, n, max_iter, crash=None):
    """Two-phase dense simplex in doubles: min c.x s.t. A x = b, x >= 0.

    ``A`` is row-major with ``m * n`` entries.  With ``c`` None the second
    phase is skipped and the first basic feasible point is returned.
    ``crash[i]``, when not -1, names a column equal to the i-th unit vector
    that starts in the basis in place of an artificial (needs b[i] >= 0).
    Returns ``(status, x, pivots)`` with status 0 (optimal), 1 (infeasible)
    or 2 (gave up).  Only a guide: callers check anything derived from x
    exactly.
    """
    W = n + m
    T = []
    rhs = []
    for i in range(m):
        row = [float(v) for v in A[i * n:(i + 1) * n]] + [0.0] * m
        row[n + i] = 1.0
        bi = float(b[i])
        if bi < 0:
            row = [-v for v in row]
            row[n + i] = 1.0
            bi = -bi
        T.append(row)
        rhs.append(bi)
    basis = [n + i if crash is None or crash[i] < 0 else crash[i] for i in range(m)]
    scale = 1.0 + sum(rhs)
    d = [0.0] * W
    for i in range(m):
        if basis[i] >= n:
            for j in range(n):
                d[j] -= T[i][j]
    for i in range(m):
        if basis[i] < n:
            d[basis[i]] = 0.0
    it = [0]

    def run(d):
        stall = 0
        while True:
            if stall > 50:
                j = next((j for j in range(n) if d[j] < -1e-9), -1)
            else:
                j, best = -1, -1e-9
                for k in range(n):
                    if d[k] < best:
                        j, best = k, d[k]
            if j < 0:
                return 0
            r, q = -1, 0.0
            for i in range(m):
                a = T[i][j]
                if a > 1e-9:
                    t = rhs[i] / a
                    if r < 0 or t < q - 1e-12 or (t <= q + 1e-12 and basis[i] < basis[r]):
                        r, q = i, t
            if r < 0:
                return 2
            stall = stall + 1 if q <= 1e-12 else 0
            _pivot_dense(T, rhs, d, r, j)
            basis[r] = j
            it[0] += 1
            if it[0] > max_iter:
                return 2

    if run(d) != 0:
        return 2, None, it[0]
    if sum(rhs[i] for i in range(m) if basis[i] >= n) > 1e-7 * scale:
        return 1, None, it[0]
    for i in range(m):
        if basis[i] >= n:
            j = next((j for j in range(n) if abs(T[i][j]) > 1e-9), -1)
            if j >= 0:
                _pivot_dense(T, rhs, None, i, j)
                basis[i] = j
    if c is not None:
        d = [float(v) for v in c] + [0.0] * m
        for i in range(m):
            cb = d[basis[i]] if basis[i] < n else 0.0
            if cb:
                for k in range(W):
                    d[k] -= cb * T[i][k]
        for i in range(m):
            d[basis[i]] = 0.0
        if run(d) != 0:
            return 2, None, it[0]
    x = [0.0] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = rhs[i]
    return 0, x, it[0]


def _pivot_dense(T, rhs, d, r, j):
    Tr = T[r]
    p = Tr[j]
    Tr[:] = [v / p for v in Tr]
    rhs[r] /= p
    nz = [k for k, v in enumerate(Tr) if v]
    for i, Ti in enumerate(T):
        if i != r:
            f = Ti[j]
            if f:
                for k in nz:
                    Ti[k] -= f * Tr[k]
                rhs[i] -= f * rhs[r]
    if d is not None:
        f = d[j]
        if f:
            for k in nz:
                d[k] -= f * Tr[k]
