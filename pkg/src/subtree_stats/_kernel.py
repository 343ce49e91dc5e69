"""Compiled inner loops for the exact counters.

Determinants are taken modulo several primes below 2**31 so every product fits
in a signed 64-bit word; callers recover the integers by Chinese remaindering
against an a-priori bound.  Vertex sets are int64 bitsets, so graphs handled
here have at most 62 vertices.
"""

import numpy as np
from numba import njit

KERNEL_MAX_N = 62


def _is_prime(m):
    if m < 2:
        return False
    i = 2
    while i * i <= m:
        if m % i == 0:
            return False
        i += 1
    return True


def _make_primes(count, start=2**31 - 1):
    out = []
    m = start
    while len(out) < count:
        if _is_prime(m):
            out.append(m)
        m -= 2
    return out


PRIMES = np.array(_make_primes(64), dtype=np.int64)


@njit(cache=True)
def _popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@njit(cache=True)
def _lowbit_index(x):
    i = 0
    while not (x >> i) & 1:
        i += 1
    return i


@njit(cache=True)
def _inv_mod(a, p):
    # extended Euclid; a is nonzero mod p
    t, new_t = 0, 1
    r, new_r = p, a
    while new_r != 0:
        q = r // new_r
        t, new_t = new_t, t - q * new_t
        r, new_r = new_r, r - q * new_r
    if t < 0:
        t += p
    return t


@njit(cache=True)
def _det_mod(mat, m, p):
    """Determinant of ``mat[:m, :m]`` mod ``p``; destroys ``mat``."""
    det = 1
    for c in range(m):
        piv = -1
        for r in range(c, m):
            if mat[r, c] != 0:
                piv = r
                break
        if piv < 0:
            return 0
        if piv != c:
            for j in range(c, m):
                tmp = mat[c, j]
                mat[c, j] = mat[piv, j]
                mat[piv, j] = tmp
            det = p - det
        pv = mat[c, c]
        det = det * pv % p
        inv = _inv_mod(pv, p)
        for r in range(c + 1, m):
            f = mat[r, c]
            if f == 0:
                continue
            f = f * inv % p
            for j in range(c + 1, m):
                v = mat[r, j] - f * mat[c, j] % p
                if v < 0:
                    v += p
                mat[r, j] = v
    return det % p


@njit(cache=True)
def _fill_induced(adj, verts, k, mask, p, mat):
    # reduced Laplacian of G[mask], first vertex removed
    for i in range(1, k):
        vi = verts[i]
        for j in range(1, k):
            if i == j:
                mat[i - 1, j - 1] = _popcount(adj[vi] & mask) % p
            elif (adj[vi] >> verts[j]) & 1:
                mat[i - 1, j - 1] = p - 1
            else:
                mat[i - 1, j - 1] = 0


@njit(cache=True)
def _fill_grounded(adj, verts, k, p, mat):
    # Laplacian of G restricted to verts (full degrees): spanning forests rooted
    # at the removed set, i.e. spanning trees of the contraction
    for i in range(k):
        vi = verts[i]
        for j in range(k):
            if i == j:
                mat[i, j] = _popcount(adj[vi]) % p
            elif (adj[vi] >> verts[j]) & 1:
                mat[i, j] = p - 1
            else:
                mat[i, j] = 0


@njit(cache=True)
def _list_bits(mask, out):
    k = 0
    while mask:
        low = mask & -mask
        out[k] = _lowbit_index(low)
        k += 1
        mask ^= low
    return k


@njit(cache=True)
def connected_set_residues(adj, n, primes, nprimes, pair_mode):
    """Sum over connected vertex sets S of a determinant weight, per |S|, mod primes.

    ``pair_mode == 0``: weight is the spanning-tree count of G[S].
    ``pair_mode == 1``: weight is that count times the spanning-tree count of
    G with S contracted to a point.
    ``nprimes[k]`` says how many primes sets of size k need.
    """
    np_max = primes.shape[0]
    acc = np.zeros((n + 1, np_max), dtype=np.int64)
    mat = np.zeros((n, n), dtype=np.int64)
    verts = np.zeros(n, dtype=np.int64)
    cverts = np.zeros(n, dtype=np.int64)
    full = (np.int64(1) << n) - 1
    cap = n * n + n + 1
    st_s = np.zeros(cap, dtype=np.int64)
    st_x = np.zeros(cap, dtype=np.int64)
    st_b = np.zeros(cap, dtype=np.int64)
    for v in range(n):
        below = (np.int64(1) << v) - 1
        top = 0
        st_s[0] = np.int64(1) << v
        st_x[0] = adj[v] & ~below
        st_b[0] = below
        top = 1
        while top > 0:
            top -= 1
            s = st_s[top]
            ext = st_x[top]
            banned = st_b[top]
            while ext:
                w = ext & -ext
                ext ^= w
                nb = adj[_lowbit_index(w)]
                st_s[top] = s | w
                st_x[top] = (ext | nb) & ~(s | w | banned)
                st_b[top] = banned
                top += 1
                banned |= w
            k = _list_bits(s, verts)
            comp = full & ~s
            kc = 0
            if pair_mode == 1:
                kc = _list_bits(comp, cverts)
            for pi in range(nprimes[k]):
                p = primes[pi]
                if k <= 2:
                    w_s = 1
                else:
                    _fill_induced(adj, verts, k, s, p, mat)
                    w_s = _det_mod(mat, k - 1, p)
                if pair_mode == 1 and kc > 0 and w_s != 0:
                    _fill_grounded(adj, cverts, kc, p, mat)
                    w_s = w_s * _det_mod(mat, kc, p) % p
                acc[k, pi] = (acc[k, pi] + w_s) % p
    return acc


@njit(cache=True)
def _connected_mask(adj, mask):
    if mask == 0:
        return False
    low = mask & -mask
    seen = low
    frontier = low
    while frontier:
        nxt = np.int64(0)
        f = frontier
        while f:
            b = f & -f
            f ^= b
            nxt |= adj[_lowbit_index(b)]
        frontier = nxt & mask & ~seen
        seen |= frontier
    return seen == mask


@njit(cache=True)
def deletion_residues(adj, n, k, primes, nprimes):
    """Sum over k-subsets U of the spanning-tree count of G - U, mod primes."""
    acc = np.zeros(primes.shape[0], dtype=np.int64)
    if k > n:
        return acc
    mat = np.zeros((n, n), dtype=np.int64)
    verts = np.zeros(n, dtype=np.int64)
    idx = np.arange(k)
    full = (np.int64(1) << n) - 1
    m = n - k
    while True:
        u = np.int64(0)
        for i in range(k):
            u |= np.int64(1) << idx[i]
        w = full & ~u
        if m > 0 and _connected_mask(adj, w):
            _list_bits(w, verts)
            for pi in range(nprimes):
                p = primes[pi]
                if m <= 2:
                    d = 1
                else:
                    _fill_induced(adj, verts, m, w, p, mat)
                    d = _det_mod(mat, m - 1, p)
                acc[pi] = (acc[pi] + d) % p
        # next combination in lexicographic order
        i = k - 1
        while i >= 0 and idx[i] == n - k + i:
            i -= 1
        if i < 0:
            break
        idx[i] += 1
        for j in range(i + 1, k):
            idx[j] = idx[j - 1] + 1
    return acc
