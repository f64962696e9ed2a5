"""Compiled inner loops.  Everything here works on int64 and is checked
against pure-Python code in the test-suite."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _walk(ds, n, M, t):
    # c_j is constrained when K(c_1..c_{j-1}, 1) = q_{j-1} + q_{j-2} < t;
    # the expansion must also reach K(c_1..c_s, 1) >= t.
    qm = 0
    qc = 1
    for j in range(n):
        c = ds[j]
        if qc + qm < t and c > M:
            return False
        qm, qc = qc, c * qc + qm
    return qc + qm >= t


@njit(cache=True)
def is_member(a, q, M, t):
    ds = np.empty(128, dtype=np.int64)
    n = 0
    x, y = a, q
    while x != 0:
        c = y // x
        ds[n] = c
        n += 1
        y, x = x, y - c * x
    if n == 0:
        return False
    if _walk(ds, n, M, t):
        return True
    # the other expansion [..., c_s - 1, 1]
    ds[n - 1] -= 1
    ds[n] = 1
    return _walk(ds, n + 1, M, t)


@njit(cache=True)
def membership_mask(q, M, t):
    """``out[a]`` is True iff ``a`` (1 <= a < q) lies in Z_M(t)."""
    out = np.zeros(q + 1, dtype=np.bool_)
    for a in range(1, q):
        out[a] = is_member(a, q, M, t)
    return out


@njit(cache=True)
def max_digit(a, q):
    m = 0
    while a != 0:
        c = q // a
        if c > m:
            m = c
        q, a = a, q - c * a
    return m


@njit(cache=True)
def digit_sum(a, q):
    s = 0
    while a != 0:
        c = q // a
        s += c
        q, a = a, q - c * a
    return s


@njit(cache=True)
def bounded_numerators_mask(q, M):
    """``out[a]`` is True iff gcd(a, q) = 1 and every digit of a/q is <= M."""
    out = np.zeros(q, dtype=np.bool_)
    for a in range(1, q):
        x, y = a, q
        while y:
            x, y = y, x % y
        if x == 1 and max_digit(a, q) <= M:
            out[a] = True
    return out


@njit(cache=True)
def dfs_numerators(q, M):
    """Numerators with every digit <= M, in the depth-first order of
    :func:`zaremba_lab.zaremba.iter_numerators`."""
    cap = 96 * (M + 1)
    sk = np.empty(cap, np.int64)
    skm = np.empty(cap, np.int64)
    sp = np.empty(cap, np.int64)
    spm = np.empty(cap, np.int64)
    out = np.empty(q, np.int64)
    n_out = 0
    sk[0], skm[0], sp[0], spm[0] = 1, 0, 0, 1
    top = 1
    while top > 0:
        top -= 1
        k, km, p, pm = sk[top], skm[top], sp[top], spm[top]
        r = q - km
        if r % k == 0:
            c = r // k
            if 2 <= c <= M:
                out[n_out] = c * p + pm
                n_out += 1
        # children pushed in reverse so that c = 1 is popped first
        n_child = 0
        for c in range(1, M + 1):
            if 2 * (c * k + km) + k > q:
                break
            n_child = c
        for c in range(n_child, 0, -1):
            sk[top], skm[top], sp[top], spm[top] = c * k + km, k, c * p + pm, p
            top += 1
    return out[:n_out]


@njit(cache=True)
def min_sum_scan(q):
    """Smallest a coprime to q minimising S(a); S is accumulated with an
    early abort once it reaches the current best."""
    best_s = q + 1
    best_a = 0
    for a in range(1, q):
        x, y = a, q
        while y:
            x, y = y, x % y
        if x != 1:
            continue
        s = 0
        n, d = a, q
        while n != 0 and s < best_s:
            c = d // n
            s += c
            d, n = n, d - c * n
        if n == 0 and s < best_s:
            best_s = s
            best_a = a
    return best_a, best_s


@njit(cache=True)
def min_sum_table(q_lo, q_hi):
    out = np.zeros((q_hi - q_lo + 1, 3), dtype=np.int64)
    for i in range(q_hi - q_lo + 1):
        q = q_lo + i
        a, s = min_sum_scan(q)
        out[i, 0] = q
        out[i, 1] = a
        out[i, 2] = s
    return out


@njit(cache=True)
def lattice_star_discrepancy(a, q):
    """Exact star discrepancy of X(a, q) as a numerator over q^2.

    For a box [0, x) x [0, y) the supremum over the lattice structure is
    attained with corners on the grid i/q; the closed count bounds the
    volume from above and the open count from below.
    Returns (numerator, i, k, kind) with kind 0 = closed excess, 1 = open deficit.
    """
    best = 0
    bi = 0
    bk = 0
    kind = 0
    # closed counts C[i,k], open counts = C[i-1,k-1]
    C = np.zeros((q + 1, q + 1), dtype=np.int64)
    for j in range(1, q + 1):
        r = (a * j) % q
        if r == 0:
            r = q
        C[j, r] += 1
    for i in range(q + 1):
        for k in range(1, q + 1):
            C[i, k] += C[i, k - 1]
    for i in range(1, q + 1):
        for k in range(q + 1):
            C[i, k] += C[i - 1, k]
    for i in range(q + 1):
        for k in range(q + 1):
            v = q * C[i, k] - i * k
            if v > best:
                best = v
                bi = i
                bk = k
                kind = 0
            if i >= 1 and k >= 1:
                w = i * k - q * C[i - 1, k - 1]
                if w > best:
                    best = w
                    bi = i
                    bk = k
                    kind = 1
    return best, bi, bk, kind


@njit(cache=True)
def lattice_grid_upper_bound(a, q, m):
    """Rigorous upper bound for D*(X(a, q)) from an m x m grid.

    For ``x`` in ``[g/m, (g+1)/m]`` and ``y`` in ``[h/m, (h+1)/m]`` a closed
    box holds at most ``Cc(g+1, h+1)`` points and has volume at least
    ``g h / m^2``; an open box holds at least ``Co(g, h)`` points and has
    volume at most ``(g+1)(h+1)/m^2``.  Here ``Cc(G, H)`` counts points with
    ``x <= G/m, y <= H/m`` and ``Co`` counts ``x < G/m, y < H/m``.
    The result is an integer numerator over ``q m^2``.
    """
    Cc = np.zeros((m + 2, m + 2), dtype=np.int64)
    Co = np.zeros((m + 2, m + 2), dtype=np.int64)
    for j in range(1, q + 1):
        r = (a * j) % q
        if r == 0:
            r = q
        # i/q <= G/m  <=>  ceil(i m / q) <= G ;  i/q < G/m  <=>  floor(i m / q) + 1 <= G
        Cc[(j * m + q - 1) // q, (r * m + q - 1) // q] += 1
        Co[(j * m) // q + 1, (r * m) // q + 1] += 1
    for i in range(m + 2):
        for k in range(1, m + 2):
            Cc[i, k] += Cc[i, k - 1]
            Co[i, k] += Co[i, k - 1]
    for i in range(1, m + 2):
        for k in range(m + 2):
            Cc[i, k] += Cc[i - 1, k]
            Co[i, k] += Co[i - 1, k]
    mm = m * m
    best = 0
    for g in range(m):
        for h in range(m):
            v1 = Cc[g + 1, h + 1] * mm - g * h * q
            v2 = (g + 1) * (h + 1) * q - Co[g, h] * mm
            if v1 > best:
                best = v1
            if v2 > best:
                best = v2
    return best


@njit(cache=True)
def zaremba_bound_value(a, q):
    M = max_digit(a, q)
    lq = np.log(q)
    return (4.0 * M / np.log(M + 1.0) + (4.0 * M + 1.0) / lq) * lq / q


@njit(cache=True)
def certify_zaremba_bound(a, q, m0):
    """Certify D*(X(a, q)) <= min(1, bound).

    Returns (status, m_used): status 0 = trivially true (bound >= 1),
    1 = certified by a grid of size m_used, 2 = certified by the exact
    computation, -1 = violated (exact value exceeds the bound).
    """
    B = zaremba_bound_value(a, q)
    if B >= 1.0:
        return 0, 0
    m = m0
    while 2 * m < q:
        ub = lattice_grid_upper_bound(a, q, m)
        if ub <= B * q * m * m * (1.0 - 1e-12):
            return 1, m
        m *= 2
    best, _, _, _ = lattice_star_discrepancy(a, q)
    if best <= B * q * q * (1.0 - 1e-12):
        return 2, q
    return -1, q


@njit(cache=True)
def zaremba_bound_sweep(q_lo, q_hi):
    """Run :func:`certify_zaremba_bound` over all coprime pairs with
    q in [q_lo, q_hi].  X(a^{-1}, q) is the transpose of X(a, q), so only
    a <= a^{-1} is examined.  Returns counters and the list of violations."""
    n_pairs = 0
    n_trivial = 0
    n_grid = 0
    n_exact = 0
    bad = []
    for q in range(q_lo, q_hi + 1):
        # inverse table by the extended Euclidean algorithm
        for a in range(1, q):
            x, y = a, q
            while y:
                x, y = y, x % y
            if x != 1 and q > 1:
                continue
            # modular inverse
            r0, r1 = q, a
            s0, s1 = 0, 1
            while r1 != 0:
                k = r0 // r1
                r0, r1 = r1, r0 - k * r1
                s0, s1 = s1, s0 - k * s1
            inv = s0 % q if q > 1 else 0
            n_pairs += 1
            if inv < a:
                continue
            B = zaremba_bound_value(a, q)
            m0 = 16
            if B < 1.0:
                m0 = max(16, int(10.0 / B))
            st, _ = certify_zaremba_bound(a, q, m0)
            if st == 0:
                n_trivial += 1
            elif st == 1:
                n_grid += 1
            elif st == 2:
                n_exact += 1
            else:
                bad.append((a, q))
    return n_pairs, n_trivial, n_grid, n_exact, bad


@njit(cache=True)
def continuant_range(ds, lo, hi):
    """``K(ds[lo:hi])`` with ``K(()) = 1``."""
    k0, k1 = 0, 1
    for i in range(lo, hi):
        k0, k1 = k1, ds[i] * k1 + k0
    return k1


@njit(cache=True)
def _next_tuple(ds, top):
    """Odometer step over ``[1, top]^n``; False once every tuple was seen."""
    i = ds.size - 1
    while i >= 0 and ds[i] == top:
        ds[i] = 1
        i -= 1
    if i < 0:
        return False
    ds[i] += 1
    return True


@njit(cache=True)
def symmetry_sweep(n_max, top):
    """Compare ``K(c)`` with ``K(reversed c)`` for every tuple over ``[1, top]``
    of length ``0..n_max``.  Returns (checked, failures, first failing tuple)."""
    checked, failures = 0, 0
    first = np.zeros(0, np.int64)
    for n in range(n_max + 1):
        ds = np.ones(n, np.int64)
        rev = np.empty(n, np.int64)
        while True:
            for i in range(n):
                rev[i] = ds[n - 1 - i]
            checked += 1
            if continuant_range(ds, 0, n) != continuant_range(rev, 0, n):
                if failures == 0:
                    first = ds.copy()
                failures += 1
            if not _next_tuple(ds, top):
                break
    return checked, failures, first


@njit(cache=True)
def domino_sweep(n_max, top):
    """The domino identity at every split ``1 <= m < n`` of every tuple over
    ``[1, top]`` of length ``2..n_max``.  Returns (checked, failures, first
    failing tuple, its split)."""
    checked, failures, first_m = 0, 0, -1
    first = np.zeros(0, np.int64)
    for n in range(2, n_max + 1):
        ds = np.ones(n, np.int64)
        while True:
            whole = continuant_range(ds, 0, n)
            for m in range(1, n):
                rhs = continuant_range(ds, 0, m) * continuant_range(ds, m, n)
                rhs += continuant_range(ds, 0, m - 1) * continuant_range(ds, m + 1, n)
                checked += 1
                if whole != rhs:
                    if failures == 0:
                        first, first_m = ds.copy(), m
                    failures += 1
            if not _next_tuple(ds, top):
                break
    return checked, failures, first, first_m
