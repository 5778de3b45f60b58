"""Arithmetic in a fixed chain of finite fields, plus exact mod-p linear algebra.

The chain is F_p = L1 < L2 < L3 < L4 with level k of degree k! over F_p,
so every level embeds in the next (k! divides (k+1)!).  The union of the
chain is a constructive stand-in for an algebraic closure: any element
algebraic of degree dividing 24 lives at some level.  Defining polynomials
are read from a frozen table; chain embeddings are constructed once per
run by locating a root of the lower polynomial inside the upper field and
are cached behind read-only handles.

Everything here is immutable after construction and safe to share.
"""

from __future__ import annotations

import functools
from importlib import resources

import numpy as np

MAX_LEVEL = 4

_FACTORIAL = [1, 1, 2, 6, 24]


class TowerExhausted(Exception):
    """A computation needed a field level beyond the configured chain."""


# ---------------------------------------------------------------------------
# exact linear algebra over F_p
# ---------------------------------------------------------------------------

def rref(M, p):
    """Reduced row echelon form over F_p.

    Args:
        M: integer matrix (any values, reduced mod p internally).
        p: prime modulus.

    Returns:
        (R, pivot_cols): R is the RREF (dtype int64, entries in [0, p)),
        pivot_cols the list of pivot column indices.
    """
    R = np.array(M, dtype=np.int64) % p
    if R.ndim != 2:
        R = R.reshape(len(R), -1)
    nrows, ncols = R.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if len(nz) == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            R[[r, i]] = R[[i, r]]
        inv = pow(int(R[r, c]), p - 2, p)
        R[r] = (R[r] * inv) % p
        others = np.nonzero(R[:, c])[0]
        others = others[others != r]
        if len(others):
            R[others] = (R[others] - np.outer(R[others, c], R[r])) % p
        pivots.append(c)
        r += 1
    return R, pivots


def rank(M, p):
    M = np.asarray(M)
    if M.size == 0:
        return 0
    if p == 2 and M.shape[0] * M.shape[1] > 65536:
        return gf2_rank(M)
    return len(rref(M, p)[1])


def matmul_mod(A, B, p):
    """Exact mod-p matrix product through the float64 BLAS path.

    Entries below p and inner dimensions in the 10^5 range keep every dot
    product well inside exact float64 integer territory.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    if A.size == 0 or B.size == 0:
        return np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    prod = A.astype(np.float64) @ B.astype(np.float64)
    return prod.astype(np.int64) % p


def kernel_basis(M, p):
    """Basis of the right kernel of M over F_p, as rows of a matrix."""
    M = np.asarray(M, dtype=np.int64) % p
    if M.ndim != 2:
        M = M.reshape(len(M), -1)
    ncols = M.shape[1]
    if ncols == 0:
        return np.zeros((0, 0), dtype=np.int64)
    R, pivots = rref(M, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for bi, fc in enumerate(free):
        basis[bi, fc] = 1
        for ri, pc in enumerate(pivots):
            basis[bi, pc] = (-int(R[ri, fc])) % p
    return basis


def solve(M, b, p):
    """One solution v of M v = b over F_p, or None if inconsistent."""
    M = np.asarray(M, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    aug = np.concatenate([M, b.reshape(-1, 1)], axis=1)
    R, pivots = rref(aug, p)
    if M.shape[1] in pivots:
        return None
    v = np.zeros(M.shape[1], dtype=np.int64)
    for ri, pc in enumerate(pivots):
        v[pc] = R[ri, -1]
    return v


def cokernel_basis(M, p):
    """Representatives of target/(column span of M), as rows (coordinate vectors).

    The column space in reduced row echelon form has pivots at certain
    coordinates; the standard basis vectors at the non-pivot coordinates
    complete it, so one reduction suffices.
    """
    M = np.asarray(M, dtype=np.int64) % p
    nt = M.shape[0]
    _, pivots = rref(M.T % p, p)
    reps = []
    for j in range(nt):
        if j not in pivots:
            e = np.zeros(nt, dtype=np.int64)
            e[j] = 1
            reps.append(e)
    return np.array(reps, dtype=np.int64).reshape(len(reps), nt)


# packed-word GF(2) rank, for the larger homology computations

def _gf2_pack(M):
    M = (np.asarray(M) % 2).astype(np.uint8)
    nrows, ncols = M.shape
    nwords = (ncols + 63) // 64
    W = np.zeros((nrows, nwords), dtype=np.uint64)
    for w in range(nwords):
        chunk = M[:, w * 64 : (w + 1) * 64]
        weights = (np.uint64(1) << np.arange(chunk.shape[1], dtype=np.uint64))
        W[:, w] = (chunk.astype(np.uint64) * weights).sum(axis=1)
    return W, ncols


def gf2_rank(M):
    """Rank over GF(2) via packed-word elimination."""
    M = np.asarray(M)
    if M.size == 0:
        return 0
    W, ncols = _gf2_pack(M)
    nrows = W.shape[0]
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        w, bit = divmod(c, 64)
        mask = np.uint64(1) << np.uint64(bit)
        hits = np.nonzero(W[r:, w] & mask)[0]
        if len(hits) == 0:
            continue
        i = r + int(hits[0])
        if i != r:
            W[[r, i]] = W[[i, r]]
        below = r + 1 + np.nonzero(W[r + 1 :, w] & mask)[0]
        if len(below):
            W[below] ^= W[r]
        r += 1
    return r


# ---------------------------------------------------------------------------
# polynomial helpers over F_p (coefficient tuples, ascending powers)
# ---------------------------------------------------------------------------

def _poly_table():
    text = resources.files("unstable_e2.data").joinpath("defining_polys.txt").read_text()
    table = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [int(x) for x in line.split()]
        p, deg, coeffs = parts[0], parts[1], parts[2:]
        assert len(coeffs) == deg + 1 and coeffs[-1] == 1
        table[(p, deg)] = tuple(coeffs)
    return table


_POLY_TABLE = _poly_table()


def _is_irreducible(f, p):
    n = len(f) - 1
    if n == 1:
        return True

    def mul(a, b):
        r = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    r[i + j] = (r[i + j] + ai * bj) % p
        for i in range(len(r) - 1, n - 1, -1):
            c = r[i]
            if c:
                r[i] = 0
                for j in range(n):
                    r[i - n + j] = (r[i - n + j] - c * f[j]) % p
        r = r[:n]
        return r + [0] * (n - len(r))

    def pow_x(e):
        result = [1] + [0] * (n - 1)
        base = [0, 1] + [0] * (n - 2)
        while e:
            if e & 1:
                result = mul(result, base)
            base = mul(base, base)
            e >>= 1
        return result

    def norm(x):
        x = list(x)
        while x and x[-1] == 0:
            x.pop()
        return x

    def gcd(a, b):
        a, b = norm(a), norm(b)
        while b:
            inv = pow(b[-1], p - 2, p)
            while len(a) >= len(b) and a:
                c = (a[-1] * inv) % p
                s = len(a) - len(b)
                for j in range(len(b)):
                    a[s + j] = (a[s + j] - c * b[j]) % p
                a = norm(a)
            a, b = b, a
        return a

    xx = [0, 1] + [0] * (n - 2)
    if pow_x(p ** n) != xx:
        return False
    m, qs, d = n, set(), 2
    while d * d <= m:
        while m % d == 0:
            qs.add(d)
            m //= d
        d += 1
    if m > 1:
        qs.add(m)
    for q in qs:
        e = pow_x(p ** (n // q))
        diff = [(e[i] - (1 if i == 1 else 0)) % p for i in range(n)]
        if len(gcd(diff, list(f))) > 1:
            return False
    return True


# ---------------------------------------------------------------------------
# the tower itself
# ---------------------------------------------------------------------------

class FieldLevel:
    """One level of the chain: F_{p^{k!}} presented as F_p[x]/(f)."""

    def __init__(self, p, level):
        self.p = p
        self.level = level
        self.degree = _FACTORIAL[level]
        key = (p, self.degree)
        if key not in _POLY_TABLE:
            raise TowerExhausted(f"no defining polynomial for p={p}, degree={self.degree}")
        self.poly = _POLY_TABLE[key]
        assert _is_irreducible(list(self.poly), p), f"bad table entry {key}"
        # reduction rows: x^(degree+i) mod f for i = 0..degree-2
        n = self.degree
        red = []
        cur = [(-c) % p for c in self.poly[:-1]]  # x^n mod f
        red.append(list(cur))
        for _ in range(n - 2):
            nxt = [0] + cur[:-1]
            c = cur[-1]
            if c:
                for j in range(n):
                    nxt[j] = (nxt[j] - c * self.poly[j]) % p
            nxt = nxt[:n]
            red.append(list(nxt))
            cur = nxt
        self._reduction = red
        self.frobenius_matrix = self._frobenius_matrix()

    def mul_coords(self, a, b):
        p, n = self.p, self.degree
        r = [0] * (2 * n - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    r[i + j] = (r[i + j] + ai * bj) % p
        out = list(r[:n])
        for i in range(n, 2 * n - 1):
            c = r[i]
            if c:
                row = self._reduction[i - n]
                for j in range(n):
                    out[j] = (out[j] + c * row[j]) % p
        return tuple(out)

    def pow_coords(self, a, e):
        result = (1,) + (0,) * (self.degree - 1)
        base = tuple(a)
        while e:
            if e & 1:
                result = self.mul_coords(result, base)
            base = self.mul_coords(base, base)
            e >>= 1
        return result

    def _frobenius_matrix(self):
        n = self.degree
        cols = []
        for j in range(n):
            e = [0] * n
            e[j] = 1
            cols.append(self.pow_coords(tuple(e), self.p))
        return np.array(cols, dtype=np.int64).T % self.p


class TowerElem:
    """Element of one level of the chain; immutable."""

    __slots__ = ("tower", "level", "coords")

    def __init__(self, tower, level, coords):
        self.tower = tower
        self.level = level
        self.coords = tuple(int(c) % tower.p for c in coords)

    def _lift(self, other):
        if not isinstance(other, TowerElem):
            other = self.tower.scalar(other)
        if other.level == self.level:
            return self, other
        k = max(self.level, other.level)
        return self.tower.embed(self, k), self.tower.embed(other, k)

    def __add__(self, other):
        a, b = self._lift(other)
        p = self.tower.p
        return TowerElem(self.tower, a.level, tuple((x + y) % p for x, y in zip(a.coords, b.coords)))

    def __sub__(self, other):
        a, b = self._lift(other)
        p = self.tower.p
        return TowerElem(self.tower, a.level, tuple((x - y) % p for x, y in zip(a.coords, b.coords)))

    def __neg__(self):
        p = self.tower.p
        return TowerElem(self.tower, self.level, tuple((-x) % p for x in self.coords))

    def __mul__(self, other):
        a, b = self._lift(other)
        fl = self.tower.field(a.level)
        return TowerElem(self.tower, a.level, fl.mul_coords(a.coords, b.coords))

    __radd__ = __add__
    __rmul__ = __mul__

    def __pow__(self, e):
        fl = self.tower.field(self.level)
        return TowerElem(self.tower, self.level, fl.pow_coords(self.coords, e))

    def __eq__(self, other):
        if not isinstance(other, TowerElem):
            other = self.tower.scalar(other)
        a, b = self._lift(other)
        return a.coords == b.coords

    def __hash__(self):
        x = self.tower.reduce_to_minimal_level(self)
        return hash((x.level, x.coords))

    def is_zero(self):
        return all(c == 0 for c in self.coords)

    def __repr__(self):
        return f"TowerElem(p={self.tower.p}, level={self.level}, {self.coords})"


class FieldTower:
    """The fixed chain F_p < F_{p^2} < F_{p^6} < F_{p^24} with cached embeddings."""

    def __init__(self, p, max_level=MAX_LEVEL):
        self.p = p
        self.max_level = max_level
        self._levels = {}
        self._embed_step = {}  # k -> matrix for level k -> k+1
        self._embed_comp = {}  # (j, k) -> composite matrix

    def field(self, k):
        if k < 1 or k > self.max_level:
            raise TowerExhausted(f"level {k} outside chain (max {self.max_level})")
        if k not in self._levels:
            self._levels[k] = FieldLevel(self.p, k)
        return self._levels[k]

    def zero(self, level=1):
        return TowerElem(self, level, (0,) * self.field(level).degree)

    def one(self, level=1):
        return TowerElem(self, level, (1,) + (0,) * (self.field(level).degree - 1))

    def scalar(self, c, level=1):
        return TowerElem(self, level, (int(c),) + (0,) * (self.field(level).degree - 1))

    def gen(self, level):
        """The class of x at the given level (a root of that level's polynomial)."""
        fl = self.field(level)
        coords = [0] * fl.degree
        if fl.degree == 1:
            # f = x, so the generator is 0; level 1 is plain F_p
            return TowerElem(self, level, coords)
        coords[1] = 1
        return TowerElem(self, level, coords)

    def elements(self, level):
        """Deterministic enumeration of the whole level (small levels only)."""
        fl = self.field(level)
        if self.p ** fl.degree > 1 << 20:
            raise ValueError("level too large to enumerate")
        idx = [0] * fl.degree
        while True:
            yield TowerElem(self, level, tuple(idx))
            i = 0
            while i < fl.degree:
                idx[i] += 1
                if idx[i] < self.p:
                    break
                idx[i] = 0
                i += 1
            if i == fl.degree:
                return

    # -- embeddings ---------------------------------------------------------

    def _embedding_step(self, k):
        """Matrix of the fixed embedding level k -> level k+1."""
        if k in self._embed_step:
            return self._embed_step[k]
        lo, hi = self.field(k), self.field(k + 1)
        dlo, dhi = lo.degree, hi.degree
        if dlo == 1:
            M = np.zeros((dhi, 1), dtype=np.int64)
            M[0, 0] = 1
            self._embed_step[k] = M
            return M
        # the copy of F_{p^dlo} inside the upper field is the kernel of Frob^dlo - id
        F = np.linalg.matrix_power(hi.frobenius_matrix, dlo) % self.p
        K = kernel_basis((F - np.eye(dhi, dtype=np.int64)) % self.p, self.p)
        assert K.shape[0] == dlo
        # scan that subfield (p^dlo elements, deterministic order) for a root of lo.poly
        root = None
        counters = [0] * dlo
        while True:
            vec = np.zeros(dhi, dtype=np.int64)
            for i, c in enumerate(counters):
                if c:
                    vec = (vec + c * K[i]) % self.p
            cand = TowerElem(self, k + 1, tuple(vec))
            acc = self.zero(k + 1)
            pw = self.one(k + 1)
            for c in lo.poly:
                if c:
                    acc = acc + self.scalar(c, k + 1) * pw
                pw = pw * cand
            if acc.is_zero():
                root = cand
                break
            i = 0
            while i < dlo:
                counters[i] += 1
                if counters[i] < self.p:
                    break
                counters[i] = 0
                i += 1
            if i == dlo:
                break
        assert root is not None, "defining polynomial has no root in the upper field"
        cols = []
        pw = self.one(k + 1)
        for _ in range(dlo):
            cols.append(pw.coords)
            pw = pw * root
        M = np.array(cols, dtype=np.int64).T % self.p
        self._embed_step[k] = M
        return M

    def embedding_matrix(self, j, k):
        """Composite embedding matrix level j -> level k (j <= k)."""
        if j == k:
            return np.eye(self.field(j).degree, dtype=np.int64)
        key = (j, k)
        if key not in self._embed_comp:
            M = self._embedding_step(j)
            for i in range(j + 1, k):
                M = (self._embedding_step(i) @ M) % self.p
            self._embed_comp[key] = M
        return self._embed_comp[key]

    def embed(self, x, k):
        if x.level == k:
            return x
        if x.level > k:
            y = self.reduce_to_minimal_level(x)
            if y.level > k:
                raise ValueError(f"element of level {x.level} does not lie in level {k}")
            return self.embed(y, k)
        M = self.embedding_matrix(x.level, k)
        coords = (M @ np.array(x.coords, dtype=np.int64)) % self.p
        return TowerElem(self, k, tuple(int(c) for c in coords))

    def reduce_to_minimal_level(self, x):
        """Rewrite x at the smallest chain level containing it."""
        for j in range(1, x.level):
            M = self.embedding_matrix(j, x.level)
            v = solve(M, np.array(x.coords, dtype=np.int64), self.p)
            if v is not None:
                return TowerElem(self, j, tuple(int(c) for c in v))
        return x

    # -- the named operations ------------------------------------------------

    def frobenius(self, x):
        """x -> x^p at the same level."""
        fl = self.field(x.level)
        coords = (fl.frobenius_matrix @ np.array(x.coords, dtype=np.int64)) % self.p
        return TowerElem(self, x.level, tuple(int(c) for c in coords))

    def artin_schreier_solve(self, b):
        """Solve x - x^p = b at the minimal chain level that contains a solution.

        Raises TowerExhausted when no level of the chain works (the solution
        always exists in the union; the chain is finite).
        """
        b = self.reduce_to_minimal_level(b)
        for k in range(b.level, self.max_level + 1):
            fl = self.field(k)
            bk = self.embed(b, k)
            M = (np.eye(fl.degree, dtype=np.int64) - fl.frobenius_matrix) % self.p
            v = solve(M, np.array(bk.coords, dtype=np.int64), self.p)
            if v is not None:
                return TowerElem(self, k, tuple(int(c) for c in v)), k
        raise TowerExhausted(
            f"x - x^p = b has no solution at levels <= {self.max_level} (p={self.p})"
        )


@functools.lru_cache(maxsize=None)
def get_tower(p, max_level=MAX_LEVEL):
    return FieldTower(p, max_level)


def frobenius(x):
    return x.tower.frobenius(x)


def artin_schreier_solve(b):
    return b.tower.artin_schreier_solve(b)


# ---------------------------------------------------------------------------
# semilinear endomorphisms
# ---------------------------------------------------------------------------

class SemilinearEndo:
    """A map T on (F_{p^{k!}})^n of shape T(v) = A . twist(v).

    With twist on, twist applies coordinatewise Frobenius, so T is additive
    and F_p-linear but only frobenius-semilinear over the level field.  A is
    an n x n matrix of TowerElem at the level (or None for the identity).
    """

    def __init__(self, tower, level, n, matrix=None, twist=False, subtract_from_identity=False):
        self.tower = tower
        self.level = level
        self.n = n
        self.matrix = matrix
        self.twist = twist
        self.subtract_from_identity = subtract_from_identity

    def fp_matrix(self):
        """The (n*m) x (n*m) matrix of T as an F_p-linear map, m = level degree."""
        tw, k, n = self.tower, self.level, self.n
        m = tw.field(k).degree
        F = tw.field(k).frobenius_matrix if self.twist else np.eye(m, dtype=np.int64)
        out = np.zeros((n * m, n * m), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                if self.matrix is None:
                    if i != j:
                        continue
                    block = F.copy()
                else:
                    a = self.matrix[i][j]
                    if a.is_zero():
                        continue
                    S = _scalar_mult_matrix(tw, tw.embed(a, k))
                    block = (S @ F) % tw.p
                out[i * m : (i + 1) * m, j * m : (j + 1) * m] = block
        if self.subtract_from_identity:
            out = (np.eye(n * m, dtype=np.int64) - out) % tw.p
        return out % tw.p


def _scalar_mult_matrix(tower, a):
    fl = tower.field(a.level)
    cols = []
    for j in range(fl.degree):
        e = [0] * fl.degree
        e[j] = 1
        cols.append(fl.mul_coords(a.coords, tuple(e)))
    return np.array(cols, dtype=np.int64).T % tower.p


def semilinear_kernel_cokernel(T):
    """Exact F_p kernel and cokernel bases of a (semi)linear endomorphism.

    Returns (kernel_rows, cokernel_rows) as integer matrices whose rows are
    coordinate vectors in the flattened F_p realization.  Coordinatewise
    endomorphisms (matrix None) are block-diagonal, so one block is solved
    and the result is tiled across the coordinates.
    """
    p = T.tower.p
    if T.matrix is None and T.n > 1:
        block = SemilinearEndo(
            T.tower, T.level, 1, matrix=None, twist=T.twist,
            subtract_from_identity=T.subtract_from_identity,
        )
        bker, bcok = semilinear_kernel_cokernel(block)
        m = T.tower.field(T.level).degree
        ker = np.zeros((T.n * bker.shape[0], T.n * m), dtype=np.int64)
        for c in range(T.n):
            for r in range(bker.shape[0]):
                ker[c * bker.shape[0] + r, c * m : (c + 1) * m] = bker[r]
        cok = np.zeros((T.n * bcok.shape[0], T.n * m), dtype=np.int64)
        for c in range(T.n):
            for r in range(bcok.shape[0]):
                cok[c * bcok.shape[0] + r, c * m : (c + 1) * m] = bcok[r]
        return ker, cok
    M = T.fp_matrix()
    ker = kernel_basis(M, p)
    cok = cokernel_basis(M, p)
    return ker, cok
