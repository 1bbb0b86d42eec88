"""Exact integer lattice algebra.

Vectors are tuples of Python ints. A lattice is stored by its canonical
basis: the rows of the Hermite normal form of any generating set (pivots
positive, entries above a pivot reduced into [0, pivot)). Two lattices are
equal exactly when their stored bases are equal.
"""


class DimensionMismatch(ValueError):
    pass


def xgcd(a, b):
    # returns (g, x, y) with g = x*a + y*b = gcd(a, b) >= 0
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _echelon(rows, npiv):
    """Row-reduce in place over the first npiv columns.

    Only unimodular row operations are used. Returns the number of pivot
    rows; those come first, with positive pivots and reduced entries above
    each pivot. Rows after them are zero in the first npiv columns.
    """
    r = 0
    nrows = len(rows)
    for j in range(npiv):
        if r == nrows:
            break
        for i in range(r + 1, nrows):
            b = rows[i][j]
            if not b:
                continue
            a = rows[r][j]
            if a == 0:
                rows[r], rows[i] = rows[i], rows[r]
                continue
            if b % a == 0:
                q = b // a
                ri, rr = rows[i], rows[r]
                rows[i] = [u - q * v for u, v in zip(ri, rr)]
                continue
            g, x, y = xgcd(a, b)
            ag, bg = a // g, b // g
            rr, ri = rows[r], rows[i]
            rows[r] = [x * u + y * v for u, v in zip(rr, ri)]
            rows[i] = [ag * v - bg * u for u, v in zip(rr, ri)]
        p = rows[r][j]
        if not p:
            continue
        if p < 0:
            rows[r] = [-u for u in rows[r]]
            p = -p
        prow = rows[r]
        for k in range(r):
            q = rows[k][j] // p
            if q:
                rows[k] = [u - q * v for u, v in zip(rows[k], prow)]
        r += 1
    return r


def hnf_rows(vectors, n):
    """Canonical basis (list of tuples) of the lattice spanned by vectors."""
    rows = [list(v) for v in vectors if any(v)]
    for v in rows:
        if len(v) != n:
            raise DimensionMismatch("vector of length %d in ambient %d" % (len(v), n))
    r = _echelon(rows, n)
    return [tuple(v) for v in rows[:r]]


class IntMap:
    """Integer matrix with explicit shape; acts on column vectors."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries, rows=None, cols=None):
        entries = tuple(tuple(int(x) for x in row) for row in entries)
        if rows is None:
            rows = len(entries)
        if cols is None:
            cols = len(entries[0]) if entries else 0
        if len(entries) != rows or any(len(row) != cols for row in entries):
            raise DimensionMismatch("matrix entries do not match shape %dx%d" % (rows, cols))
        self.rows = rows
        self.cols = cols
        self.entries = entries

    @classmethod
    def identity(cls, n):
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def zero(cls, rows, cols):
        return cls([[0] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def from_columns(cls, columns, rows):
        columns = [tuple(c) for c in columns]
        return cls([[c[i] for c in columns] for i in range(rows)], rows, len(columns))

    def columns(self):
        return [tuple(row[j] for row in self.entries) for j in range(self.cols)]

    def transpose(self):
        return IntMap(self.columns(), self.cols, self.rows)

    def apply(self, v):
        if len(v) != self.cols:
            raise DimensionMismatch("vector of length %d for %d columns" % (len(v), self.cols))
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.entries)

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise DimensionMismatch("cannot compose %dx%d with %dx%d"
                                    % (self.rows, self.cols, other.rows, other.cols))
        oc = other.columns()
        return IntMap([[sum(a * b for a, b in zip(row, c)) for c in oc] for row in self.entries],
                      self.rows, other.cols)

    def __eq__(self, other):
        return (isinstance(other, IntMap) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return "IntMap(%r)" % (list(map(list, self.entries)),)

    def tolist(self):
        return [list(row) for row in self.entries]


class IntLattice:
    """Subgroup of Z^n given by its canonical (HNF) basis."""

    __slots__ = ("ambient_dim", "basis")

    def __init__(self, ambient_dim, vectors=()):
        self.ambient_dim = ambient_dim
        self.basis = tuple(hnf_rows(vectors, ambient_dim))

    @classmethod
    def full(cls, n):
        return cls(n, [tuple(int(i == j) for j in range(n)) for i in range(n)])

    @property
    def rank(self):
        return len(self.basis)

    def __contains__(self, v):
        v = list(v)
        if len(v) != self.ambient_dim:
            raise DimensionMismatch("vector of length %d in ambient %d" % (len(v), self.ambient_dim))
        for row in self.basis:
            j = next(k for k, x in enumerate(row) if x)
            if any(v[:j]):
                return False
            q, rem = divmod(v[j], row[j])
            if rem:
                return False
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        return not any(v)

    def __eq__(self, other):
        return (isinstance(other, IntLattice) and self.ambient_dim == other.ambient_dim
                and self.basis == other.basis)

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self):
        return "IntLattice(%d, %r)" % (self.ambient_dim, [list(b) for b in self.basis])

    def matrix(self):
        """Basis vectors as the columns of an IntMap."""
        return IntMap.from_columns(self.basis, self.ambient_dim)


def _check_same(L1, L2):
    if L1.ambient_dim != L2.ambient_dim:
        raise DimensionMismatch("ambient dimensions %d and %d" % (L1.ambient_dim, L2.ambient_dim))


def kernel(M):
    """{x in Z^cols : Mx = 0}; always saturated."""
    m, n = M.rows, M.cols
    cols = M.columns()
    rows = [list(cols[i]) + [int(i == k) for k in range(n)] for i in range(n)]
    r = _echelon(rows, m)
    return IntLattice(n, [row[m:] for row in rows[r:]])


def image(M):
    return IntLattice(M.rows, M.columns())


def saturate(L):
    """Smallest saturated lattice containing L: (L^perp)^perp."""
    n = L.ambient_dim
    if L.rank in (0, n):
        return IntLattice.full(n) if L.rank == n else L
    perp = kernel(IntMap(L.basis, L.rank, n))
    return kernel(IntMap(perp.basis, perp.rank, n))


def is_saturated(L):
    return saturate(L) == L


def meet(L1, L2):
    """Exact intersection: solve a.B1 = b.B2 and map back through B1."""
    _check_same(L1, L2)
    k1, k2 = L1.rank, L2.rank
    if not k1 or not k2:
        return IntLattice(L1.ambient_dim)
    stacked = IntMap.from_columns(list(L1.basis) + [tuple(-x for x in v) for v in L2.basis],
                                  L1.ambient_dim)
    K = kernel(stacked)
    out = []
    for c in K.basis:
        out.append(tuple(sum(c[i] * L1.basis[i][t] for i in range(k1))
                         for t in range(L1.ambient_dim)))
    return IntLattice(L1.ambient_dim, out)


def join(L1, L2):
    _check_same(L1, L2)
    return IntLattice(L1.ambient_dim, L1.basis + L2.basis)


def contains(L1, L2):
    """True iff L1 contains L2."""
    _check_same(L1, L2)
    return all(v in L1 for v in L2.basis)


def compare(L1, L2):
    _check_same(L1, L2)
    return {
        "equal": L1.basis == L2.basis,
        "contains": contains(L1, L2),
        "rank1": L1.rank,
        "rank2": L2.rank,
    }


def _swap_rows(A, i, j):
    A[i], A[j] = A[j], A[i]


def _swap_cols(A, i, j):
    for row in A:
        row[i], row[j] = row[j], row[i]


def _row_combine(A, i, j, a, b, c, d):
    # (row_i, row_j) <- (a*row_i + b*row_j, c*row_i + d*row_j)
    ri, rj = A[i], A[j]
    A[i] = [a * u + b * v for u, v in zip(ri, rj)]
    A[j] = [c * u + d * v for u, v in zip(ri, rj)]


def _col_combine(A, i, j, a, b, c, d):
    for row in A:
        u, v = row[i], row[j]
        row[i] = a * u + b * v
        row[j] = c * u + d * v


def _bezout(a, b):
    # plain elimination when a divides b, so the pivot line is left unchanged
    if b % a == 0:
        return a, 1, 0
    return xgcd(a, b)


def smith(M):
    """Smith form with transforms: returns (diag, U, V) with U*M*V = diag."""
    m, n = M.rows, M.cols
    A = [list(row) for row in M.entries]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    t = 0
    while t < min(m, n):
        # choose a nonzero pivot of least absolute value in the trailing block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        _swap_rows(A, t, i)
        _swap_rows(U, t, i)
        _swap_cols(A, t, j)
        _swap_cols(V, t, j)
        while True:
            changed = False
            for i in range(t + 1, m):
                b = A[i][t]
                if b:
                    a = A[t][t]
                    g, x, y = _bezout(a, b)
                    _row_combine(A, t, i, x, y, -b // g, a // g)
                    _row_combine(U, t, i, x, y, -b // g, a // g)
                    changed = True
            for j in range(t + 1, n):
                b = A[t][j]
                if b:
                    a = A[t][t]
                    g, x, y = _bezout(a, b)
                    _col_combine(A, t, j, x, y, -b // g, a // g)
                    _col_combine(V, t, j, x, y, -b // g, a // g)
                    changed = True
            if changed:
                continue
            # the pivot must divide every trailing entry; if not, pull in
            # the offending row and clear again (the pivot shrinks)
            p = A[t][t]
            bad = next((i for i in range(t + 1, m)
                        if any(A[i][j] % p for j in range(t + 1, n))), None)
            if bad is None:
                break
            A[t] = [u + v for u, v in zip(A[t], A[bad])]
            U[t] = [u + v for u, v in zip(U[t], U[bad])]
        if A[t][t] < 0:
            A[t] = [-u for u in A[t]]
            U[t] = [-u for u in U[t]]
        t += 1
    diag = [A[k][k] for k in range(min(m, n))]
    return diag, IntMap(U, m, m), IntMap(V, n, n)


def det(M):
    """Determinant of a square integer matrix (Bareiss, fraction free)."""
    n = M.rows
    if n != M.cols:
        raise DimensionMismatch("determinant of a non-square matrix")
    A = [list(row) for row in M.entries]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1] if n else 1


def normal_forms(M):
    diag, U, V = smith(M)
    hnf = IntMap.from_columns(image(M).basis, M.rows) if M.rows else IntMap.zero(0, 0)
    return {"hnf": hnf, "snf_diag": diag, "transforms": (U, V)}


def solve(M, b):
    """An integral x with Mx = b, or None when there is none."""
    if len(b) != M.rows:
        raise DimensionMismatch("right-hand side of length %d for %d rows" % (len(b), M.rows))
    diag, U, V = smith(M)
    c = U.apply(b)
    y = [0] * M.cols
    for k, ck in enumerate(c):
        d = diag[k] if k < len(diag) else 0
        if d == 0:
            if ck:
                return None
            continue
        q, rem = divmod(ck, d)
        if rem:
            return None
        y[k] = q
    return V.apply(y)


def restricts_onto(M, S, T):
    """True iff M(S) contains T, each basis vector of T solved for integrally."""
    if S.ambient_dim != M.cols or T.ambient_dim != M.rows:
        raise DimensionMismatch("map %dx%d with lattices in Z^%d and Z^%d"
                                % (M.rows, M.cols, S.ambient_dim, T.ambient_dim))
    if not T.rank:
        return True
    if not S.rank:
        return False
    MS = M @ S.matrix()
    return all(solve(MS, t) is not None for t in T.basis)


def span(vectors, n):
    return IntLattice(n, vectors)
